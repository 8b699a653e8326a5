use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FiniteLorentzSpace, SpaceError};
use crate::model::{self, Chart, Curvature, ModelPoint};

/// Restriction of model points to a finite space.
pub fn induce_from_model(k: Curvature, pts: &[ModelPoint]) -> Result<FiniteLorentzSpace, SpaceError> {
    induce_with_chains(k, pts, Vec::new())
}

fn induce_with_chains(k: Curvature, pts: &[ModelPoint], chains: Vec<Vec<usize>>) -> Result<FiniteLorentzSpace, SpaceError> {
    if pts.iter().any(|p| !k.owns(p)) {
        return Err(SpaceError::ChartMismatch);
    }
    let n = pts.len();
    let mut tau = vec![0.0; n * n];
    let mut causal = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let rel = model::model_relation(k, &pts[i], &pts[j])?;
            causal[i * n + j] = i == j || rel.is_causal_forward();
            if i != j && rel.is_chronological_forward() {
                tau[i * n + j] = model::model_tau(k, &pts[i], &pts[j])?;
            }
        }
    }
    FiniteLorentzSpace::build(pts.iter().copied().map(Some).collect(), tau, Some(causal), chains)
}

/// Causal diamond between the chart base point and the axis point at separation `height`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diamond {
    pub height: f64,
}

impl Diamond {
    pub fn contains(&self, k: Curvature, p: &ModelPoint) -> Result<bool, SpaceError> {
        let top = k.axis_point(self.height);
        // past the conjugate locus of either tip means φ + |θ| > π > height
        let leq = |a: &ModelPoint, b: &ModelPoint| match model::model_leq(k, a, b) {
            Err(model::ModelError::OutsideDomain) => Ok(false),
            r => r,
        };
        Ok(leq(&k.base(), p)? && leq(p, &top)?)
    }
}

/// `n` points drawn uniformly with respect to the volume element from the diamond.
///
/// Samples come from rejection in global coordinates: null coordinates on the
/// plane, `(u, θ)` with density `cosh u` on de Sitter, `(φ, ρ)` with density
/// `cosh ρ` on anti-de Sitter.
pub fn sprinkle(k: Curvature, region: Diamond, n: usize, seed: u64) -> Result<FiniteLorentzSpace, SpaceError> {
    let diameter = k.diameter();
    if !(region.height > 0.0) || region.height >= diameter {
        return Err(SpaceError::SizeBound { tau: region.height, diameter });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = region.height / k.scale();
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = match k.chart() {
            Chart::Minkowski => {
                let (u, v) = (rng.gen::<f64>() * h, rng.gen::<f64>() * h);
                model::minkowski_embed(k, 0.5 * (u + v), 0.5 * (u - v))
            }
            Chart::DeSitter => {
                let width = gudermannian(h);
                let u = rng.gen::<f64>() * h;
                let theta = (2.0 * rng.gen::<f64>() - 1.0) * width;
                if rng.gen::<f64>() * h.cosh() > u.cosh() {
                    continue;
                }
                model::ds_embed(k, u * k.scale(), theta)
            }
            Chart::AntiDeSitter => {
                let reach = (0.5 * h).tan().asinh();
                let phi = rng.gen::<f64>() * h;
                let rho = (2.0 * rng.gen::<f64>() - 1.0) * reach;
                if rng.gen::<f64>() * reach.cosh() > rho.cosh() {
                    continue;
                }
                model::ads_embed(k, phi * k.scale(), rho)
            }
        };
        if region.contains(k, &p)? {
            pts.push(p);
        }
    }
    induce_from_model(k, &pts)
}

fn gudermannian(x: f64) -> f64 {
    x.sinh().atan()
}

/// Hubs plus `m` equally spaced geodesic samples on every chronological hub
/// pair; each such pair becomes a recorded chain. Unrelated hub pairs get no chain.
pub fn geodesic_lattice(k: Curvature, hubs: &[ModelPoint], m: usize) -> Result<FiniteLorentzSpace, SpaceError> {
    if hubs.iter().any(|p| !k.owns(p)) {
        return Err(SpaceError::ChartMismatch);
    }
    let mut pts: Vec<ModelPoint> = hubs.to_vec();
    let mut chains = Vec::new();
    for i in 0..hubs.len() {
        for j in 0..hubs.len() {
            if i == j || !model::model_relation(k, &hubs[i], &hubs[j])?.is_chronological_forward() {
                continue;
            }
            let tau = model::model_tau(k, &hubs[i], &hubs[j])?;
            if tau >= k.diameter() {
                return Err(SpaceError::SizeBound { tau, diameter: k.diameter() });
            }
            let mut chain = vec![i];
            for step in 1..=m {
                let s = step as f64 / (m + 1) as f64;
                chain.push(pts.len());
                pts.push(model::model_geodesic(k, &hubs[i], &hubs[j], s)?);
            }
            chain.push(j);
            chains.push(chain);
        }
    }
    induce_with_chains(k, &pts, chains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ads_embed, ds_embed, minkowski_embed};
    use crate::space::validate_space;

    #[test]
    fn collinear_flat_points() {
        let k = Curvature::new(0.0);
        let pts: Vec<_> = (0..3).map(|i| minkowski_embed(k, i as f64, 0.0)).collect();
        let s = FiniteLorentzSpace::build(
            pts.iter().copied().map(Some).collect(),
            induce_from_model(k, &pts).unwrap().tau_matrix().to_vec(),
            None,
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        assert_eq!(s.tau(0, 2), 2.0);
        assert!(validate_space(&s).is_valid());
        assert_eq!(s.chains()[0].total, 2.0);
    }

    #[test]
    fn spacelike_pair_is_unrelated() {
        let k = Curvature::new(0.0);
        let s = induce_from_model(k, &[minkowski_embed(k, 0.0, 0.0), minkowski_embed(k, 0.0, 1.0)]).unwrap();
        assert_eq!((s.tau(0, 1), s.tau(1, 0)), (0.0, 0.0));
        assert!(!s.leq(0, 1) && !s.leq(1, 0));
    }

    #[test]
    fn mixed_charts_are_rejected() {
        let pts = [Curvature::new(1.0).base(), Curvature::new(-1.0).base()];
        assert!(matches!(induce_from_model(Curvature::new(1.0), &pts), Err(SpaceError::ChartMismatch)));
    }

    #[test]
    fn sprinkles_are_valid_and_deterministic() {
        let flat = Curvature::new(0.0);
        assert!(sprinkle(flat, Diamond { height: 2.0 }, 0, 7).unwrap().is_empty());
        let s = sprinkle(flat, Diamond { height: 2.0 }, 40, 7).unwrap();
        assert_eq!(s.len(), 40);
        assert!(validate_space(&s).is_valid());
        for p in s.annotations().iter().flatten() {
            assert!(Diamond { height: 2.0 }.contains(flat, p).unwrap());
        }
        assert_eq!(s, sprinkle(flat, Diamond { height: 2.0 }, 40, 7).unwrap());
        assert_ne!(s, sprinkle(flat, Diamond { height: 2.0 }, 40, 8).unwrap());

        let ds = Curvature::new(1.0);
        let s = sprinkle(ds, Diamond { height: 2.0 }, 50, 3).unwrap();
        assert!(validate_space(&s).is_valid());
        let ads = Curvature::new(-1.0);
        let s = sprinkle(ads, Diamond { height: 2.5 }, 50, 3).unwrap();
        assert!(validate_space(&s).is_valid());
        assert!(matches!(sprinkle(ads, Diamond { height: 3.2 }, 5, 1), Err(SpaceError::SizeBound { .. })));
    }

    #[test]
    fn two_hub_lattice() {
        let k = Curvature::new(0.0);
        let s = geodesic_lattice(k, &[minkowski_embed(k, 0.0, 0.0), minkowski_embed(k, 2.0, 0.0)], 3).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.chains().len(), 1);
        assert_eq!(s.chains()[0].ids, vec![0, 2, 3, 4, 1]);
        assert_eq!(s.chains()[0].total, 2.0);
    }

    #[test]
    fn triangle_lattice_has_a_chain_per_side() {
        let k = Curvature::new(0.0);
        let hubs = [minkowski_embed(k, 0.0, 0.0), minkowski_embed(k, 1.0, -0.4), minkowski_embed(k, 2.5, 0.1)];
        let s = geodesic_lattice(k, &hubs, 4).unwrap();
        assert_eq!(s.chains().len(), 3);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(s.segment(a, b).unwrap().len(), 6);
        }
        assert!(validate_space(&s).is_valid());
    }

    #[test]
    fn curved_lattices_are_valid() {
        let ads = Curvature::new(-1.0);
        let s = geodesic_lattice(ads, &[ads_embed(ads, 0.0, 0.0), ads_embed(ads, 2.0, 0.0)], 4).unwrap();
        assert!((s.chains()[0].total - 2.0).abs() < 1e-12);
        assert!(validate_space(&s).is_valid());
        let ds = Curvature::new(1.0);
        let hubs = [ds_embed(ds, 0.0, 0.0), ds_embed(ds, 1.0, -0.3), ds_embed(ds, 2.0, 0.1)];
        assert!(validate_space(&geodesic_lattice(ds, &hubs, 5).unwrap()).is_valid());
    }
}
