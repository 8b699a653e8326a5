//! The ODE `f'' − K f = λ`: modified distance functions, two-point boundary
//! solutions and Jensen sub/supersolution tests on sampled data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{finite_diameter, Curvature};

pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("interval length {len} reaches the finite diameter {diameter}")]
    SizeBound { len: f64, diameter: f64 },
    #[error("boundary values at the gap are not zero: f(b) = {fb}, f(c) = {fc}")]
    BoundaryMismatch { fb: f64, fc: f64 },
    #[error("sampled function has no gap to bridge")]
    NoGap,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("sample parameters must be strictly increasing")]
    UnsortedSamples,
}

/// Values of the modified distance function and its two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modified {
    pub md: f64,
    pub sn: f64,
    pub cn: f64,
}

/// `md^K`, `sn^K = (md^K)'`, `cn^K = (sn^K)'` at `t`.
pub fn modified(k: Curvature, t: f64) -> Modified {
    let kv = k.value();
    if kv == 0.0 {
        return Modified { md: 0.5 * t * t, sn: t, cn: 1.0 };
    }
    let r = kv.abs().sqrt();
    let u = r * t;
    if kv > 0.0 {
        let cn = u.cosh();
        Modified { md: md_from(u, kv, cn, (0.5 * u).sinh()), sn: u.sinh() / r, cn }
    } else {
        let cn = u.cos();
        Modified { md: md_from(u, kv, cn, (0.5 * u).sin()), sn: u.sin() / r, cn }
    }
}

/// `(cn − 1)/K`, switching to the half-angle form where that difference cancels.
fn md_from(u: f64, kv: f64, cn: f64, half: f64) -> f64 {
    if u.abs() < 1.0 {
        2.0 * half * half / kv.abs()
    } else {
        (cn - 1.0) / kv
    }
}

pub fn md(k: Curvature, t: f64) -> f64 {
    modified(k, t).md
}

/// `g(t) = λ md(t − t0) + A cn(t − t0) + B sn(t − t0)`.
///
/// With `t0 = 0` this is the plain basis representation; boundary solves
/// anchor `t0` at the left endpoint for conditioning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    pub k: Curvature,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub t0: f64,
}

impl OdeSolution {
    pub fn eval(&self, t: f64) -> f64 {
        let m = modified(self.k, t - self.t0);
        self.lambda * m.md + self.a * m.cn + self.b * m.sn
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let m = modified(self.k, t - self.t0);
        (self.lambda + self.a * self.k.value()) * m.sn + self.b * m.cn
    }
}

/// Solution of `g'' − K g = λ` with `g(t1) = f1`, `g(t3) = f3`.
pub fn solve_bvp(k: Curvature, lambda: f64, t1: f64, f1: f64, t3: f64, f3: f64) -> Result<OdeSolution, OdeError> {
    let len = t3 - t1;
    let diameter = finite_diameter(k);
    if !(len > 0.0) || len >= diameter {
        return Err(OdeError::SizeBound { len, diameter });
    }
    let m = modified(k, len);
    let b = (f3 - lambda * m.md - f1 * m.cn) / m.sn;
    Ok(OdeSolution { k, lambda, a: f1, b, t0: t1 })
}

/// Samples `(t, f(t))` with strictly increasing `t`; `split` marks the first
/// sample of the right part of a split domain `[a,b] ∪ [c,d]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub samples: Vec<(f64, f64)>,
    pub split: Option<usize>,
}

impl SampledFunction {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, OdeError> {
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(OdeError::UnsortedSamples);
        }
        Ok(SampledFunction { samples, split: None })
    }

    pub fn from_fn(ts: &[f64], f: impl Fn(f64) -> f64) -> Result<Self, OdeError> {
        Self::new(ts.iter().map(|&t| (t, f(t))).collect())
    }

    pub fn with_split(mut self, split: usize) -> Self {
        self.split = Some(split);
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum JensenVerdict {
    Sub,
    Super,
    Both,
    Neither,
}

impl JensenVerdict {
    fn from_flags(sub: bool, sup: bool) -> Self {
        match (sub, sup) {
            (true, true) => JensenVerdict::Both,
            (true, false) => JensenVerdict::Sub,
            (false, true) => JensenVerdict::Super,
            (false, false) => JensenVerdict::Neither,
        }
    }

    pub fn is_sub(self) -> bool {
        matches!(self, JensenVerdict::Sub | JensenVerdict::Both)
    }

    pub fn is_super(self) -> bool {
        matches!(self, JensenVerdict::Super | JensenVerdict::Both)
    }
}

/// A sample triple (indices into the sampled function) with its margin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: [usize; 3],
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenReport {
    pub verdict: JensenVerdict,
    /// Smallest `g(t2) − f(t2)` over tested triples (subsolution margin).
    pub sub_margin: f64,
    /// Smallest `f(t2) − g(t2)` over tested triples (supersolution margin).
    pub super_margin: f64,
    pub sub_witness: Option<Witness>,
    pub super_witness: Option<Witness>,
    pub tested: usize,
    /// Every triple whose subsolution margin falls below `−tol`.
    #[serde(skip)]
    pub sub_failures: Vec<Witness>,
    #[serde(skip)]
    pub super_failures: Vec<Witness>,
}

struct MarginTracker {
    tol: f64,
    margin: f64,
    witness: Option<Witness>,
    failures: Vec<Witness>,
}

impl MarginTracker {
    fn new(tol: f64) -> Self {
        MarginTracker { tol, margin: f64::INFINITY, witness: None, failures: Vec::new() }
    }

    fn record(&mut self, indices: [usize; 3], margin: f64) {
        if margin < self.margin {
            self.margin = margin;
            self.witness = Some(Witness { indices, margin });
        }
        if margin < -self.tol {
            self.failures.push(Witness { indices, margin });
        }
    }

    fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Jensen inequalities for every sampled triple `t1 < t2 < t3` with `t3 − t1 < D_K`.
pub fn jensen_check(f: &SampledFunction, k: Curvature, lambda: f64, tol: f64) -> JensenReport {
    let s = &f.samples;
    let diameter = finite_diameter(k);
    let mut sub = MarginTracker::new(tol);
    let mut sup = MarginTracker::new(tol);
    let mut tested = 0;
    for i in 0..s.len() {
        for kk in i + 2..s.len() {
            let Ok(g) = solve_bvp(k, lambda, s[i].0, s[i].1, s[kk].0, s[kk].1) else {
                if s[kk].0 - s[i].0 >= diameter {
                    break;
                }
                continue;
            };
            for j in i + 1..kk {
                let gap = g.eval(s[j].0) - s[j].1;
                sub.record([i, j, kk], gap);
                sup.record([i, j, kk], -gap);
                tested += 1;
            }
        }
    }
    JensenReport {
        verdict: JensenVerdict::from_flags(sub.holds(), sup.holds()),
        sub_margin: sub.margin,
        super_margin: sup.margin,
        sub_witness: sub.witness,
        super_witness: sup.witness,
        tested,
        sub_failures: sub.failures,
        super_failures: sup.failures,
    }
}

/// Outer Jensen inequalities: for each sampled pair `t1 < t2` and each sample
/// `t ∉ (t1, t2)` with `t ∈ (t2 − D_K, t1 + D_K)`, a subsolution satisfies
/// `f(t) ≥ g(t)` and a supersolution `f(t) ≤ g(t)`.
/// Witness indices are `[i, j, outer]`.
pub fn outer_jensen_check(f: &SampledFunction, k: Curvature, lambda: f64, tol: f64) -> JensenReport {
    let s = &f.samples;
    let diameter = finite_diameter(k);
    let mut sub = MarginTracker::new(tol);
    let mut sup = MarginTracker::new(tol);
    let mut tested = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let Ok(g) = solve_bvp(k, lambda, s[i].0, s[i].1, s[j].0, s[j].1) else {
                continue;
            };
            for (m, &(t, ft)) in s.iter().enumerate() {
                let outside = t < s[i].0 || t > s[j].0;
                if !outside || t <= s[j].0 - diameter || t >= s[i].0 + diameter {
                    continue;
                }
                let gap = ft - g.eval(t);
                sub.record([i, j, m], gap);
                sup.record([i, j, m], -gap);
                tested += 1;
            }
        }
    }
    JensenReport {
        verdict: JensenVerdict::from_flags(sub.holds(), sup.holds()),
        sub_margin: sub.margin,
        super_margin: sup.margin,
        sub_witness: sub.witness,
        super_witness: sup.witness,
        tested,
        sub_failures: sub.failures,
        super_failures: sup.failures,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SplitVerdict {
    ExtensibleSub,
    ExtensibleSuper,
    ExtensibleBoth,
    Neither,
}

impl SplitVerdict {
    pub fn is_sub(self) -> bool {
        matches!(self, SplitVerdict::ExtensibleSub | SplitVerdict::ExtensibleBoth)
    }

    pub fn is_super(self) -> bool {
        matches!(self, SplitVerdict::ExtensibleSuper | SplitVerdict::ExtensibleBoth)
    }
}

/// Numerical estimates of the derivative criterion at the gap `(b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapDerivatives {
    pub f_left: f64,
    pub g_left: f64,
    pub f_right: f64,
    pub g_right: f64,
}

impl GapDerivatives {
    /// `f'(b−) ≤ g'(b)` and `f'(c+) ≥ g'(c)`, within `tol`.
    pub fn favours_sub(&self, tol: f64) -> bool {
        self.f_left <= self.g_left + tol && self.f_right >= self.g_right - tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub verdict: SplitVerdict,
    pub jensen: JensenReport,
    /// `None` when the gap reaches `D_K` or a part has a single sample.
    pub derivatives: Option<GapDerivatives>,
}

/// Extensibility across the gap of a split domain, decided by Jensen triples
/// spanning the whole sample set; derivative estimates are advisory.
pub fn split_domain_check(f: &SampledFunction, k: Curvature, lambda: f64, tol: f64) -> Result<SplitReport, OdeError> {
    let split = match f.split {
        Some(s) if s > 0 && s < f.len() => s,
        _ => return Err(OdeError::NoGap),
    };
    let s = &f.samples;
    let (b, fb) = s[split - 1];
    let (c, fc) = s[split];
    if fb.abs() > tol || fc.abs() > tol {
        return Err(OdeError::BoundaryMismatch { fb, fc });
    }
    let jensen = jensen_check(f, k, lambda, tol);
    let verdict = match (jensen.verdict.is_sub(), jensen.verdict.is_super()) {
        (true, true) => SplitVerdict::ExtensibleBoth,
        (true, false) => SplitVerdict::ExtensibleSub,
        (false, true) => SplitVerdict::ExtensibleSuper,
        (false, false) => SplitVerdict::Neither,
    };
    let derivatives = if split >= 2 && split + 1 < s.len() {
        solve_bvp(k, lambda, b, 0.0, c, 0.0).ok().map(|g| GapDerivatives {
            f_left: (fb - s[split - 2].1) / (b - s[split - 2].0),
            g_left: g.derivative(b),
            f_right: (s[split + 1].1 - fc) / (s[split + 1].0 - c),
            g_right: g.derivative(c),
        })
    } else {
        None
    };
    Ok(SplitReport { verdict, jensen, derivatives })
}

/// Sign lemma: a Jensen subsolution of `ψ'' − Kψ = 0` on `[0, L]`, `L < D_K`,
/// with nonpositive endpoint values is nonpositive; if one endpoint is strictly
/// negative it is strictly negative on the interior.
pub fn kirchberger_sign(k: Curvature, psi: &SampledFunction, tol: f64) -> Result<bool, OdeError> {
    let (Some(&(t0, first)), Some(&(t1, last))) = (psi.samples.first(), psi.samples.last()) else {
        return Err(OdeError::PreconditionFailed("no samples".into()));
    };
    let len = t1 - t0;
    if len >= finite_diameter(k) {
        return Err(OdeError::SizeBound { len, diameter: finite_diameter(k) });
    }
    if !jensen_check(psi, k, 0.0, tol).verdict.is_sub() {
        return Err(OdeError::PreconditionFailed("not a Jensen subsolution".into()));
    }
    if first > tol || last > tol {
        return Err(OdeError::PreconditionFailed("endpoint values are positive".into()));
    }
    let interior = &psi.samples[1..psi.len().saturating_sub(1).max(1)];
    let nonpositive = psi.samples.iter().all(|&(_, v)| v <= tol);
    let strict = first < -tol || last < -tol;
    Ok(nonpositive && (!strict || interior.iter().all(|&(_, v)| v < 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn k(v: f64) -> Curvature {
        Curvature::new(v)
    }

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn table_values() {
        assert_eq!(modified(k(0.0), 2.0), Modified { md: 2.0, sn: 2.0, cn: 1.0 });
        let m = modified(k(-1.0), PI / 2.0);
        assert!((m.md - 1.0).abs() < 1e-15 && (m.sn - 1.0).abs() < 1e-15 && m.cn.abs() < 1e-15);
        assert_eq!(modified(k(1.0), 0.0), Modified { md: 0.0, sn: 0.0, cn: 1.0 });
        let m = modified(k(1.0), 0.7);
        assert!((m.md - (0.7f64.cosh() - 1.0)).abs() < 1e-15);
        let m = modified(k(-4.0), 0.3);
        assert!((m.md - (1.0 - 0.6f64.cos()) / 4.0).abs() < 1e-15);
        assert!((m.sn - 0.6f64.sin() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_chain() {
        let h = 1e-4;
        for kv in [-1.0, -0.5, 0.0, 0.3, 1.0] {
            for t in [0.2, 0.9, 1.7] {
                let (l, r, c) = (modified(k(kv), t - h), modified(k(kv), t + h), modified(k(kv), t));
                assert!(((r.md - l.md) / (2.0 * h) - c.sn).abs() < 1e-6);
                assert!(((r.sn - l.sn) / (2.0 * h) - c.cn).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn boundary_solves() {
        let g = solve_bvp(k(0.0), 1.0, 0.0, 0.0, 2.0, 2.0).unwrap();
        assert!(g.a.abs() < 1e-15 && g.b.abs() < 1e-15);
        let g = solve_bvp(k(0.0), 1.0, 0.0, 0.0, 2.0, 4.0).unwrap();
        assert!((g.b - 1.0).abs() < 1e-15);
        assert!((g.eval(1.0) - 1.5).abs() < 1e-15);
        let g = solve_bvp(k(-1.0), 0.0, 0.0, 0.0, PI / 2.0, 1.0).unwrap();
        assert!(g.a.abs() < 1e-15 && (g.b - 1.0).abs() < 1e-15);
        assert!(matches!(solve_bvp(k(-1.0), 1.0, 0.0, 0.0, PI, 1.0), Err(OdeError::SizeBound { .. })));
    }

    #[test]
    fn jensen_examples() {
        let ts = grid(0.0, 2.0, 20);
        let f = SampledFunction::from_fn(&ts, |t| 0.5 * t * t).unwrap();
        assert_eq!(jensen_check(&f, k(0.0), 1.0, DEFAULT_TOL).verdict, JensenVerdict::Both);
        let f = SampledFunction::from_fn(&ts, |t| t * t).unwrap();
        assert_eq!(jensen_check(&f, k(0.0), 1.0, DEFAULT_TOL).verdict, JensenVerdict::Sub);
        let f = SampledFunction::from_fn(&ts, |t| -t * t).unwrap();
        let r = jensen_check(&f, k(0.0), 1.0, DEFAULT_TOL);
        assert_eq!(r.verdict, JensenVerdict::Super);
        assert!(r.sub_witness.unwrap().margin < 0.0);
    }

    #[test]
    fn outer_examples() {
        let ts = grid(0.0, 2.0, 20);
        for (f, expect_sub) in [(|t: f64| 0.5 * t * t) as fn(f64) -> f64, |t| t * t].into_iter().zip([true, true]) {
            let f = SampledFunction::from_fn(&ts, f).unwrap();
            assert_eq!(outer_jensen_check(&f, k(0.0), 1.0, DEFAULT_TOL).verdict.is_sub(), expect_sub);
        }
        let f = SampledFunction::from_fn(&ts, |t| -t * t).unwrap();
        assert!(!outer_jensen_check(&f, k(0.0), 1.0, DEFAULT_TOL).verdict.is_sub());
    }

    #[test]
    fn split_domain_examples() {
        // f(t) = md(τ(p, γ(t))) for p = (0, 1) off the flat axis γ(t) = (t, 0):
        // related for |t| ≥ 1, f = (t² − 1)/2 there.
        let mut ts: Vec<f64> = grid(-3.0, -1.0, 10);
        ts.extend(grid(1.0, 3.0, 10));
        let f = SampledFunction::from_fn(&ts, |t| 0.5 * (t * t - 1.0)).unwrap().with_split(11);
        let r = split_domain_check(&f, k(0.0), 1.0, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, SplitVerdict::ExtensibleBoth);

        let zero = SampledFunction::from_fn(&ts, |_| 0.0).unwrap().with_split(11);
        let r = split_domain_check(&zero, k(0.0), 0.0, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, SplitVerdict::ExtensibleBoth);

        // tilt both branches by δ(t ∓ 1): f'(b−) > g'(b) and f'(c+) > g'(c) for the bridge g = (t² − 1)/2
        let kinked = SampledFunction::from_fn(&ts, |t| 0.5 * (t * t - 1.0) + 0.3 * (t - t.signum()))
            .unwrap()
            .with_split(11);
        let r = split_domain_check(&kinked, k(0.0), 1.0, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, SplitVerdict::Neither);
        for w in [r.jensen.sub_witness.unwrap(), r.jensen.super_witness.unwrap()] {
            assert!(w.indices[0] < 11 && w.indices[2] >= 11);
        }
        let d = r.derivatives.unwrap();
        assert!(!d.favours_sub(1e-9));

        let bad = SampledFunction::from_fn(&ts, |t| t * t).unwrap().with_split(11);
        assert!(matches!(split_domain_check(&bad, k(0.0), 1.0, DEFAULT_TOL), Err(OdeError::BoundaryMismatch { .. })));
    }

    #[test]
    fn kirchberger_examples() {
        let kk = k(-1.0);
        let len = PI / 2.0;
        let ts = grid(0.0, len, 40);
        let sn = |t: f64| modified(kk, t).sn;
        let neg = SampledFunction::from_fn(&ts, |t| -sn(t)).unwrap();
        assert_eq!(kirchberger_sign(kk, &neg, DEFAULT_TOL), Ok(true));
        let pos = SampledFunction::from_fn(&ts, sn).unwrap();
        assert!(matches!(kirchberger_sign(kk, &pos, DEFAULT_TOL), Err(OdeError::PreconditionFailed(_))));
        let mx = SampledFunction::from_fn(&ts, |t| (-sn(t)).max(-sn(len - t))).unwrap();
        assert_eq!(kirchberger_sign(kk, &mx, DEFAULT_TOL), Ok(true));
    }
}
