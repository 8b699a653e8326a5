use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Bound, CheckContext, CheckOptions, CurvatureCheck, Verdict};
use crate::model::Curvature;
use crate::space::FiniteLorentzSpace;

const COARSE_POINTS: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("verdicts are not monotone in K over the bracket: {0:?}")]
    NonMonotoneVerdicts(Vec<(f64, Verdict)>),
    #[error("every check in the bracket is vacuous")]
    VacuousBracket,
    #[error("the bracket does not contain a verdict change: {0:?}")]
    NotBracketed(Vec<(f64, Verdict)>),
    #[error("invalid bracket or tolerance")]
    InvalidBracket,
}

/// `lo ≤ K* ≤ hi` with `hi − lo ≤ tol_K`, plus the coarse scan it started from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KInterval {
    pub lo: f64,
    pub hi: f64,
    pub coarse: Vec<(f64, Verdict)>,
}

/// Locate the threshold curvature of a checker by a coarse monotonicity scan
/// followed by bisection. Vacuous checks count as satisfied. For a lower bound
/// the result brackets the infimum of satisfied `K`; for an upper bound, the supremum.
pub fn estimate_k(
    space: &FiniteLorentzSpace,
    check: &dyn CurvatureCheck,
    bound: Bound,
    options: CheckOptions,
    bracket: (f64, f64),
    tol_k: f64,
) -> Result<KInterval, EstimateError> {
    let (lo, hi) = bracket;
    if !(lo < hi) || !(tol_k > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(EstimateError::InvalidBracket);
    }
    let verdict = |k: f64| check.run(&CheckContext { space, k: Curvature::new(k), bound, options }).verdict;
    let coarse: Vec<(f64, Verdict)> = (0..COARSE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (COARSE_POINTS - 1) as f64)
        .map(|k| (k, verdict(k)))
        .collect();
    if coarse.iter().all(|(_, v)| *v == Verdict::Vacuous) {
        return Err(EstimateError::VacuousBracket);
    }
    // comparison τ grows with K, so lower bounds hold on an up-set and upper bounds on a down-set
    let ok: Vec<bool> = coarse.iter().map(|(_, v)| *v != Verdict::Fail).collect();
    let changes = ok.windows(2).filter(|w| w[0] != w[1]).count();
    let expected_first = bound == Bound::Upper;
    if changes > 1 || (changes == 1 && ok[0] != expected_first) {
        return Err(EstimateError::NonMonotoneVerdicts(coarse));
    }
    if changes == 0 {
        return Err(EstimateError::NotBracketed(coarse));
    }
    let edge = ok.windows(2).position(|w| w[0] != w[1]).expect("one change");
    let (mut a, mut b) = (coarse[edge].0, coarse[edge + 1].0);
    while b - a > tol_k {
        let mid = 0.5 * (a + b);
        if (verdict(mid) != Verdict::Fail) == expected_first {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(KInterval { lo: a, hi: b, coarse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::lookup;
    use crate::model::minkowski_embed;
    use crate::space::geodesic_lattice;

    #[test]
    fn flat_lattice_threshold_is_zero() {
        let k = Curvature::new(0.0);
        let hubs = [minkowski_embed(k, 0.0, 0.0), minkowski_embed(k, 1.3, -1.0), minkowski_embed(k, 3.0, 0.0)];
        let s = geodesic_lattice(k, &hubs, 4).unwrap();
        let check = lookup("triangle").unwrap();
        let r = estimate_k(&s, check.as_ref(), Bound::Lower, CheckOptions::default(), (-1.0, 1.0), 0.05).unwrap();
        assert!(r.lo <= 0.0 && 0.0 <= r.hi && r.hi - r.lo <= 0.05, "{r:?}");
        let r = estimate_k(&s, check.as_ref(), Bound::Upper, CheckOptions::default(), (-1.0, 1.0), 0.05).unwrap();
        assert!(r.lo <= 0.0 && 0.0 <= r.hi, "{r:?}");
    }

    #[test]
    fn estimation_errors() {
        let check = lookup("triangle").unwrap();
        let empty = FiniteLorentzSpace::empty();
        let opts = CheckOptions::default();
        assert_eq!(estimate_k(&empty, check.as_ref(), Bound::Lower, opts, (-1.0, 1.0), 0.1), Err(EstimateError::VacuousBracket));
        assert_eq!(estimate_k(&empty, check.as_ref(), Bound::Lower, opts, (1.0, -1.0), 0.1), Err(EstimateError::InvalidBracket));
        let k = Curvature::new(0.0);
        let hubs = [minkowski_embed(k, 0.0, 0.0), minkowski_embed(k, 1.3, -1.0), minkowski_embed(k, 3.0, 0.0)];
        let s = geodesic_lattice(k, &hubs, 4).unwrap();
        assert!(matches!(
            estimate_k(&s, check.as_ref(), Bound::Lower, opts, (0.5, 1.0), 0.1),
            Err(EstimateError::NotBracketed(_))
        ));
    }
}
