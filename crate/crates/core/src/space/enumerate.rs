use serde::{Deserialize, Serialize};

use super::{ChainRealizer, FiniteLorentzSpace, SpaceError};
use crate::construct::TimeSense;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TriangleClass {
    Timelike,
    AdmissibleCausal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangle {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub class: TriangleClass,
}

/// `i ≤ j`, `i ≠ j`, not chronological.
fn null_pair(s: &FiniteLorentzSpace, i: usize, j: usize) -> bool {
    i != j && s.leq(i, j) && !s.ll(i, j)
}

/// Ordered triples `x ≤ y ≤ z` with timelike long side and at most one null short side.
/// With `require_chains`, every timelike side must lie on a recorded chain.
pub fn enumerate_triangles(s: &FiniteLorentzSpace, require_chains: bool) -> Vec<Triangle> {
    let n = s.len();
    let mut out = Vec::new();
    for x in 0..n {
        for z in 0..n {
            if !s.ll(x, z) || (require_chains && s.segment(x, z).is_none()) {
                continue;
            }
            for y in 0..n {
                if y == x || y == z {
                    continue;
                }
                let (xy, yz) = (s.ll(x, y), s.ll(y, z));
                let class = if xy && yz {
                    TriangleClass::Timelike
                } else if (xy && null_pair(s, y, z)) || (yz && null_pair(s, x, y)) {
                    TriangleClass::AdmissibleCausal
                } else {
                    continue;
                };
                if require_chains && ((xy && s.segment(x, y).is_none()) || (yz && s.segment(y, z).is_none())) {
                    continue;
                }
                out.push(Triangle { x, y, z, class });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConfigClass {
    Timelike,
    Causal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Straightness {
    None,
    Left,
    Right,
    Both,
}

impl Straightness {
    fn from_flags(left: bool, right: bool) -> Self {
        match (left, right) {
            (true, true) => Straightness::Both,
            (true, false) => Straightness::Left,
            (false, true) => Straightness::Right,
            (false, false) => Straightness::None,
        }
    }

    pub fn is_straight(self) -> bool {
        self != Straightness::None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StraightFilter {
    Any,
    Straight,
}

/// A four-point configuration. For the past sense the relations are reversed:
/// `z2, z1 ≪ x ≪ y` (resp. `≤` towards x for the causal class).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FourPointConfig {
    pub y: usize,
    pub x: usize,
    pub z1: usize,
    pub z2: usize,
    pub sense: TimeSense,
    pub class: ConfigClass,
    pub endpoint_causal: bool,
    pub straight: Straightness,
}

impl FourPointConfig {
    /// Ids in the written order: `(y, x, z1, z2)` or `(z2, z1, x, y)`.
    pub fn ids(&self) -> [usize; 4] {
        match self.sense {
            TimeSense::Future => [self.y, self.x, self.z1, self.z2],
            TimeSense::Past => [self.z2, self.z1, self.x, self.y],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourPointQuery {
    pub class: ConfigClass,
    pub sense: TimeSense,
    pub endpoint_causal_only: bool,
    pub straight: StraightFilter,
    pub eps_straight: f64,
}

impl FourPointQuery {
    pub fn new(class: ConfigClass, sense: TimeSense) -> Self {
        FourPointQuery { class, sense, endpoint_causal_only: false, straight: StraightFilter::Any, eps_straight: 1e-9 }
    }
}

/// Visit every matching configuration, ordered by `x`, then `y`, `z1`, `z2`.
/// `z1 = z2` and `z_i = x` are skipped (their comparison is trivial).
pub fn for_each_four_point(s: &FiniteLorentzSpace, q: &FourPointQuery, mut visit: impl FnMut(&FourPointConfig)) {
    let n = s.len();
    let future = q.sense == TimeSense::Future;
    // `before(a, b)` reads "a precedes b" in the chosen time sense
    let ll = |a: usize, b: usize| if future { s.ll(a, b) } else { s.ll(b, a) };
    let leq = |a: usize, b: usize| if future { s.leq(a, b) } else { s.leq(b, a) };
    let tau = |a: usize, b: usize| if future { s.tau(a, b) } else { s.tau(b, a) };
    for x in 0..n {
        let ys: Vec<usize> = (0..n).filter(|&y| ll(y, x)).collect();
        if ys.is_empty() {
            continue;
        }
        let zs: Vec<usize> = (0..n)
            .filter(|&z| {
                z != x
                    && match q.class {
                        ConfigClass::Timelike => ll(x, z),
                        ConfigClass::Causal => leq(x, z),
                    }
            })
            .collect();
        for &y in &ys {
            let straight: Vec<bool> =
                zs.iter().map(|&z| (tau(y, z) - tau(y, x) - tau(x, z)).abs() <= q.eps_straight).collect();
            for (i1, &z1) in zs.iter().enumerate() {
                for (i2, &z2) in zs.iter().enumerate() {
                    if z1 == z2 {
                        continue;
                    }
                    let endpoint_causal = leq(z1, z2);
                    if q.endpoint_causal_only && !endpoint_causal {
                        continue;
                    }
                    let straightness = Straightness::from_flags(straight[i1], straight[i2]);
                    if q.straight == StraightFilter::Straight && !straightness.is_straight() {
                        continue;
                    }
                    visit(&FourPointConfig {
                        y,
                        x,
                        z1,
                        z2,
                        sense: q.sense,
                        class: q.class,
                        endpoint_causal,
                        straight: straightness,
                    });
                }
            }
        }
    }
}

pub fn enumerate_four_point(s: &FiniteLorentzSpace, q: &FourPointQuery) -> Vec<FourPointConfig> {
    let mut out = Vec::new();
    for_each_four_point(s, q, |c| out.push(*c));
    out
}

const MAX_CHAINS: usize = 4096;

/// Maximal chains from `x` to `z` through intermediate points that realize
/// `τ(x,z)` within `tol`. The bare pair `[x, z]` is not reported.
pub fn find_chains(s: &FiniteLorentzSpace, x: usize, z: usize, tol: f64) -> Result<Vec<ChainRealizer>, SpaceError> {
    if !s.leq(x, z) {
        return Err(SpaceError::NotCausal(x, z));
    }
    let target = s.tau(x, z);
    let mut on: Vec<usize> = (0..s.len())
        .filter(|&m| m != x && m != z && s.ll(x, m) && s.ll(m, z) && s.tau(x, m) + s.tau(m, z) >= target - tol)
        .collect();
    on.sort_by(|&a, &b| s.tau(x, a).total_cmp(&s.tau(x, b)).then(a.cmp(&b)));
    // additive steps between realizing points, reduced to covering steps
    let additive = |a: usize, b: usize| s.ll(a, b) && s.tau(x, a) + s.tau(a, b) >= s.tau(x, b) - tol;
    let k = on.len();
    let mut next: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut has_prev = vec![false; k];
    for a in 0..k {
        for b in a + 1..k {
            if !additive(on[a], on[b]) {
                continue;
            }
            let covered = (a + 1..b).any(|m| additive(on[a], on[m]) && additive(on[m], on[b]));
            if !covered {
                next[a].push(b);
                has_prev[b] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..k).rev().filter(|&a| !has_prev[a]).map(|a| vec![a]).collect();
    while let Some(path) = stack.pop() {
        if out.len() >= MAX_CHAINS {
            break;
        }
        let last = *path.last().expect("paths are nonempty");
        if next[last].is_empty() {
            let mut ids = vec![x];
            ids.extend(path.iter().map(|&i| on[i]));
            ids.push(z);
            let total: f64 = ids.windows(2).map(|w| s.tau(w[0], w[1])).sum();
            if total >= target - tol {
                out.push(ChainRealizer { ids, total });
            }
            continue;
        }
        for &b in next[last].iter().rev() {
            let mut p = path.clone();
            p.push(b);
            stack.push(p);
        }
    }
    Ok(out)
}

/// Longest chain from `x` to `z` with at least one intermediate point,
/// by dynamic programming over the chronological order.
pub fn longest_chain(s: &FiniteLorentzSpace, x: usize, z: usize) -> Option<ChainRealizer> {
    let mut mids: Vec<usize> = (0..s.len()).filter(|&m| m != x && m != z && s.ll(x, m) && s.ll(m, z)).collect();
    mids.sort_by(|&a, &b| s.tau(x, a).total_cmp(&s.tau(x, b)).then(a.cmp(&b)));
    let mut best: Vec<(f64, Option<usize>)> = Vec::with_capacity(mids.len());
    for (bi, &b) in mids.iter().enumerate() {
        let mut entry = (s.tau(x, b), None);
        for (ai, &a) in mids[..bi].iter().enumerate() {
            if s.ll(a, b) && best[ai].0 + s.tau(a, b) > entry.0 {
                entry = (best[ai].0 + s.tau(a, b), Some(ai));
            }
        }
        best.push(entry);
    }
    let (end, total) = (0..mids.len())
        .map(|i| (i, best[i].0 + s.tau(mids[i], z)))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))?;
    let mut ids = vec![z];
    let mut cur = Some(end);
    while let Some(i) = cur {
        ids.push(mids[i]);
        cur = best[i].1;
    }
    ids.push(x);
    ids.reverse();
    Some(ChainRealizer { ids, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{minkowski_embed, Curvature};
    use crate::space::{geodesic_lattice, induce_from_model, sprinkle, Diamond};

    fn flat(points: &[(f64, f64)]) -> FiniteLorentzSpace {
        let k = Curvature::new(0.0);
        let pts: Vec<_> = points.iter().map(|&(t, x)| minkowski_embed(k, t, x)).collect();
        induce_from_model(k, &pts).unwrap()
    }

    #[test]
    fn collinear_chain_gives_one_degenerate_triangle() {
        let k = Curvature::new(0.0);
        let s = geodesic_lattice(k, &[minkowski_embed(k, 0.0, 0.0), minkowski_embed(k, 2.0, 0.0)], 1).unwrap();
        let t = enumerate_triangles(&s, true);
        assert_eq!(t, vec![Triangle { x: 0, y: 2, z: 1, class: TriangleClass::Timelike }]);
    }

    #[test]
    fn null_pair_gives_admissible_causal_triangle() {
        let s = flat(&[(0.0, 0.0), (1.0, 1.0), (3.0, 0.5), (5.0, 9.0)]);
        let t = enumerate_triangles(&s, false);
        assert_eq!(t, vec![Triangle { x: 0, y: 1, z: 2, class: TriangleClass::AdmissibleCausal }]);
    }

    #[test]
    fn triangle_count_matches_brute_force() {
        let s = sprinkle(Curvature::new(0.0), Diamond { height: 2.0 }, 20, 11).unwrap();
        let n = s.len();
        let mut count = 0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let distinct = x != y && y != z && x != z;
                    let nul = |a: usize, b: usize| s.leq(a, b) && !s.ll(a, b);
                    let timelike = s.ll(x, y) && s.ll(y, z);
                    let causal = s.ll(x, z) && ((s.ll(x, y) && nul(y, z)) || (nul(x, y) && s.ll(y, z)));
                    if distinct && (timelike || causal) {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(enumerate_triangles(&s, false).len(), count);
        assert!(count > 0);
    }

    #[test]
    fn collinear_four_point_is_straight_both_ways() {
        let s = flat(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        let configs = enumerate_four_point(&s, &FourPointQuery::new(ConfigClass::Timelike, TimeSense::Future));
        let c = configs.iter().find(|c| c.ids() == [0, 1, 2, 3]).unwrap();
        assert_eq!(c.straight, Straightness::Both);
        assert!(c.endpoint_causal);
    }

    #[test]
    fn null_endpoint_example() {
        let s = flat(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.5, 0.5)]);
        let configs = enumerate_four_point(&s, &FourPointQuery::new(ConfigClass::Timelike, TimeSense::Future));
        let c = configs.iter().find(|c| c.ids() == [0, 1, 2, 3]).unwrap();
        assert_eq!(c.straight, Straightness::Left);
        assert!(c.endpoint_causal);
        assert!(!s.ll(2, 3));
    }

    #[test]
    fn four_point_count_matches_brute_force() {
        let s = sprinkle(Curvature::new(0.0), Diamond { height: 2.0 }, 15, 5).unwrap();
        let n = s.len();
        for sense in [TimeSense::Future, TimeSense::Past] {
            for class in [ConfigClass::Timelike, ConfigClass::Causal] {
                let mut q = FourPointQuery::new(class, sense);
                q.endpoint_causal_only = true;
                let mut count = 0;
                for y in 0..n {
                    for x in 0..n {
                        for z1 in 0..n {
                            for z2 in 0..n {
                                let (ll, leq): (Box<dyn Fn(usize, usize) -> bool>, Box<dyn Fn(usize, usize) -> bool>) =
                                    match sense {
                                        TimeSense::Future => (Box::new(|a, b| s.ll(a, b)), Box::new(|a, b| s.leq(a, b))),
                                        TimeSense::Past => (Box::new(|a, b| s.ll(b, a)), Box::new(|a, b| s.leq(b, a))),
                                    };
                                let rel = |z: usize| match class {
                                    ConfigClass::Timelike => ll(x, z),
                                    ConfigClass::Causal => leq(x, z) && z != x,
                                };
                                if ll(y, x) && rel(z1) && rel(z2) && z1 != z2 && leq(z1, z2) {
                                    count += 1;
                                }
                            }
                        }
                    }
                }
                assert_eq!(enumerate_four_point(&s, &q).len(), count, "{sense:?} {class:?}");
            }
        }
    }

    #[test]
    fn timelike_configs_are_causal_configs() {
        let s = sprinkle(Curvature::new(0.0), Diamond { height: 2.0 }, 15, 9).unwrap();
        let tl = enumerate_four_point(&s, &FourPointQuery::new(ConfigClass::Timelike, TimeSense::Future));
        let ca = enumerate_four_point(&s, &FourPointQuery::new(ConfigClass::Causal, TimeSense::Future));
        let key = |c: &FourPointConfig| c.ids();
        let ca: std::collections::HashSet<_> = ca.iter().map(key).collect();
        assert!(tl.iter().all(|c| ca.contains(&key(c))));
    }

    #[test]
    fn chains_on_a_line() {
        let s = flat(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        let chains = find_chains(&s, 0, 3, 1e-9).unwrap();
        assert_eq!(chains, vec![ChainRealizer { ids: vec![0, 1, 2, 3], total: 2.0 }]);
    }

    #[test]
    fn two_parallel_midpoints() {
        // hand-built: both midpoints realize τ(0,3) = 2 and are unrelated to each other
        let tau = vec![
            0.0, 1.0, 1.0, 2.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 0.0, 0.0,
        ];
        let s = FiniteLorentzSpace::build(vec![None; 4], tau, None, vec![]).unwrap();
        let chains = find_chains(&s, 0, 3, 1e-9).unwrap();
        assert_eq!(chains.len(), 2);
        assert!(chains.iter().all(|c| c.total == 2.0));
    }

    #[test]
    fn generic_sprinkle_pair_has_no_realizer() {
        let s = sprinkle(Curvature::new(0.0), Diamond { height: 2.0 }, 30, 4).unwrap();
        let (x, z) = (0..s.len())
            .flat_map(|x| (0..s.len()).map(move |z| (x, z)))
            .filter(|&(x, z)| longest_chain(&s, x, z).is_some())
            .max_by(|a, b| s.tau(a.0, a.1).total_cmp(&s.tau(b.0, b.1)))
            .unwrap();
        let best = longest_chain(&s, x, z).unwrap();
        assert!(best.total < s.tau(x, z));
        assert!(find_chains(&s, x, z, 1e-9).unwrap().is_empty());
        assert!(matches!(find_chains(&s, z, x, 1e-9), Err(SpaceError::NotCausal(..))));
    }
}
