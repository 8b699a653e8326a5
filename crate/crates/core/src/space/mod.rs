//! Finite Lorentzian pre-length spaces: dense time separation and causal
//! matrices plus recorded chains standing in for distance realizers.

mod enumerate;
mod generate;
pub mod io;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Curvature, ModelError, ModelPoint};

pub use enumerate::{
    enumerate_four_point, enumerate_triangles, find_chains, for_each_four_point, longest_chain, ConfigClass,
    FourPointConfig, FourPointQuery, Straightness, StraightFilter, Triangle, TriangleClass,
};
pub use generate::{geodesic_lattice, induce_from_model, sprinkle, Diamond};

/// Tolerance of the reverse triangle inequality and of chain additivity.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("points do not share one chart and scale")]
    ChartMismatch,
    #[error("region or hub separation {tau} reaches the finite diameter {diameter}")]
    SizeBound { tau: f64, diameter: f64 },
    #[error("points {0} and {1} are not causally related")]
    NotCausal(usize, usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Ordered chronological chain with additive time separation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRealizer {
    pub ids: Vec<usize>,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLorentzSpace {
    n: usize,
    annotations: Vec<Option<ModelPoint>>,
    tau: Vec<f64>,
    causal: Vec<bool>,
    chains: Vec<ChainRealizer>,
    segments: HashMap<(usize, usize), (usize, usize, usize)>,
}

impl FiniteLorentzSpace {
    pub fn empty() -> Self {
        Self::build(Vec::new(), Vec::new(), None, Vec::new()).expect("empty space is well formed")
    }

    /// Assemble a space from a row-major `n × n` time separation matrix.
    ///
    /// Without an explicit causal matrix, `≤` is the reflexive-transitive
    /// closure of `≪ = {τ > 0}`. Chain totals are recomputed from `tau`.
    pub fn build(
        annotations: Vec<Option<ModelPoint>>,
        tau: Vec<f64>,
        causal: Option<Vec<bool>>,
        chains: Vec<Vec<usize>>,
    ) -> Result<Self, SpaceError> {
        let n = annotations.len();
        let schema = |path: &str, message: &str| SpaceError::Schema { path: path.into(), message: message.into() };
        if tau.len() != n * n {
            return Err(schema("tau", "matrix must be square with one row per point"));
        }
        if let Some((i, _)) = tau.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(schema(&format!("tau[{}][{}]", i / n, i % n), "entries must be finite and nonnegative"));
        }
        let causal = match causal {
            Some(c) if c.len() != n * n => return Err(schema("causal", "matrix must match tau")),
            Some(c) => c,
            None => closure(n, &tau),
        };
        for (ci, chain) in chains.iter().enumerate() {
            if let Some(bad) = chain.iter().position(|&id| id >= n) {
                return Err(schema(&format!("chains[{ci}][{bad}]"), "unknown point id"));
            }
        }
        let chains: Vec<ChainRealizer> = chains
            .into_iter()
            .map(|ids| {
                let total = match (ids.first(), ids.last()) {
                    (Some(&a), Some(&b)) => tau[a * n + b],
                    _ => 0.0,
                };
                ChainRealizer { ids, total }
            })
            .collect();
        let mut segments = HashMap::new();
        for (ci, chain) in chains.iter().enumerate() {
            for (pi, &a) in chain.ids.iter().enumerate() {
                for (pj, &b) in chain.ids.iter().enumerate().skip(pi + 1) {
                    segments.entry((a, b)).or_insert((ci, pi, pj));
                }
            }
        }
        Ok(FiniteLorentzSpace { n, annotations, tau, causal, chains, segments })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn tau(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    /// `i ≤ j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.causal[i * self.n + j]
    }

    /// `i ≪ j`.
    pub fn ll(&self, i: usize, j: usize) -> bool {
        self.tau(i, j) > 0.0
    }

    pub fn annotation(&self, i: usize) -> Option<&ModelPoint> {
        self.annotations[i].as_ref()
    }

    pub fn annotations(&self) -> &[Option<ModelPoint>] {
        &self.annotations
    }

    /// Curvature of the model space the annotations live in, if all points are annotated alike.
    pub fn model_curvature(&self) -> Option<Curvature> {
        let first = self.annotations.first()?.as_ref()?;
        let k = first.chart.curvature_sign() / (first.scale * first.scale);
        let k = Curvature::new(k);
        self.annotations.iter().all(|a| a.as_ref().is_some_and(|p| k.owns(p))).then_some(k)
    }

    pub fn chains(&self) -> &[ChainRealizer] {
        &self.chains
    }

    pub fn has_chains(&self) -> bool {
        !self.chains.is_empty()
    }

    /// Points of a recorded chain running from `a` to `b` (both included), if any.
    pub fn segment(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.segments.get(&(a, b)).map(|&(ci, pi, pj)| &self.chains[ci].ids[pi..=pj])
    }

    pub fn tau_matrix(&self) -> &[f64] {
        &self.tau
    }

    pub fn causal_matrix(&self) -> &[bool] {
        &self.causal
    }

    /// Time-reversed space: `τ'(i,j) = τ(j,i)`, chains run backwards.
    pub fn reversed(&self) -> Self {
        let n = self.n;
        let mut tau = vec![0.0; n * n];
        let mut causal = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                tau[i * n + j] = self.tau(j, i);
                causal[i * n + j] = self.leq(j, i);
            }
        }
        let chains = self.chains.iter().map(|c| c.ids.iter().rev().copied().collect()).collect();
        let annotations = self.annotations.iter().map(|a| a.as_ref().map(crate::model::reflect_time)).collect();
        Self::build(annotations, tau, Some(causal), chains).expect("reversal preserves shape")
    }

    /// Same relations with every time separation multiplied by `s > 0`.
    /// Annotations are dropped since they no longer match the scaled values.
    pub fn scaled(&self, s: f64) -> Self {
        let tau = self.tau.iter().map(|t| t * s).collect();
        let chains = self.chains.iter().map(|c| c.ids.clone()).collect();
        Self::build(vec![None; self.n], tau, Some(self.causal.clone()), chains).expect("scaling preserves shape")
    }

    /// Induced subspace on `keep` (in the given order); chains are restricted to kept points.
    pub fn subspace(&self, keep: &[usize]) -> Self {
        let m = keep.len();
        let mut tau = vec![0.0; m * m];
        let mut causal = vec![false; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                tau[a * m + b] = self.tau(i, j);
                causal[a * m + b] = self.leq(i, j);
            }
        }
        let index: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let chains = self
            .chains
            .iter()
            .map(|c| c.ids.iter().filter_map(|i| index.get(i).copied()).collect::<Vec<_>>())
            .filter(|c| c.len() >= 2)
            .collect();
        let annotations = keep.iter().map(|&i| self.annotations[i]).collect();
        Self::build(annotations, tau, Some(causal), chains).expect("subspace preserves shape")
    }
}

fn closure(n: usize, tau: &[f64]) -> Vec<bool> {
    let mut c: Vec<bool> = tau.iter().map(|&t| t > 0.0).collect();
    for i in 0..n {
        c[i * n + i] = true;
    }
    for m in 0..n {
        for i in 0..n {
            if !c[i * n + m] {
                continue;
            }
            for j in 0..n {
                if c[m * n + j] {
                    c[i * n + j] = true;
                }
            }
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpaceViolationKind {
    Chronology,
    ChronoNotCausal,
    CausalNotReflexive,
    CausalNotTransitive,
    ReverseTriangle,
    PushUp,
    ChainNotChronological,
    ChainNotAdditive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceViolation {
    pub kind: SpaceViolationKind,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceValidationReport {
    pub violations: Vec<SpaceViolation>,
    /// True when the witness list was cut at `MAX_WITNESSES`.
    pub truncated: bool,
}

impl SpaceValidationReport {
    pub const MAX_WITNESSES: usize = 1000;

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: SpaceViolationKind, witness: Vec<usize>) {
        if self.violations.len() < Self::MAX_WITNESSES {
            self.violations.push(SpaceViolation { kind, witness });
        } else {
            self.truncated = true;
        }
    }
}

pub fn validate_space(s: &FiniteLorentzSpace) -> SpaceValidationReport {
    use SpaceViolationKind::*;
    let n = s.len();
    let mut report = SpaceValidationReport::default();
    for i in 0..n {
        if s.ll(i, i) {
            report.push(Chronology, vec![i, i]);
        }
        if !s.leq(i, i) {
            report.push(CausalNotReflexive, vec![i]);
        }
        for j in 0..n {
            if s.ll(i, j) && !s.leq(i, j) {
                report.push(ChronoNotCausal, vec![i, j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !s.leq(i, j) {
                continue;
            }
            for k in 0..n {
                if !s.leq(j, k) {
                    continue;
                }
                if !s.leq(i, k) {
                    report.push(CausalNotTransitive, vec![i, j, k]);
                }
                if s.tau(i, k) < s.tau(i, j) + s.tau(j, k) - STRUCTURE_TOL {
                    report.push(ReverseTriangle, vec![i, j, k]);
                }
                if (s.ll(i, j) || s.ll(j, k)) && !s.ll(i, k) {
                    report.push(PushUp, vec![i, j, k]);
                }
            }
        }
    }
    for chain in s.chains() {
        let ids = &chain.ids;
        if ids.windows(2).any(|w| !s.ll(w[0], w[1])) {
            report.push(ChainNotChronological, ids.clone());
            continue;
        }
        let sum: f64 = ids.windows(2).map(|w| s.tau(w[0], w[1])).sum();
        if (sum - chain.total).abs() > STRUCTURE_TOL {
            report.push(ChainNotAdditive, ids.clone());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> FiniteLorentzSpace {
        FiniteLorentzSpace::build(vec![None; 2], vec![0.0, 1.0, 0.0, 0.0], None, vec![]).unwrap()
    }

    #[test]
    fn valid_two_point_space() {
        let s = two_point();
        assert!(s.leq(0, 1) && !s.leq(1, 0) && s.leq(1, 1));
        assert!(validate_space(&s).is_valid());
    }

    #[test]
    fn self_separation_is_a_chronology_violation() {
        let s = FiniteLorentzSpace::build(vec![None; 2], vec![0.5, 1.0, 0.0, 0.0], None, vec![]).unwrap();
        let r = validate_space(&s);
        assert_eq!(r.violations[0], SpaceViolation { kind: SpaceViolationKind::Chronology, witness: vec![0, 0] });
    }

    #[test]
    fn reverse_triangle_witness() {
        let tau = vec![0.0, 1.0, 1.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let s = FiniteLorentzSpace::build(vec![None; 3], tau, None, vec![]).unwrap();
        let r = validate_space(&s);
        assert!(r
            .violations
            .contains(&SpaceViolation { kind: SpaceViolationKind::ReverseTriangle, witness: vec![0, 1, 2] }));
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        let err = FiniteLorentzSpace::build(vec![None; 2], vec![0.0; 3], None, vec![]).unwrap_err();
        assert!(matches!(err, SpaceError::Schema { ref path, .. } if path == "tau"));
        let err = FiniteLorentzSpace::build(vec![None; 2], vec![0.0, -1.0, 0.0, 0.0], None, vec![]).unwrap_err();
        assert!(matches!(err, SpaceError::Schema { ref path, .. } if path == "tau[0][1]"));
        let err = FiniteLorentzSpace::build(vec![None; 2], vec![0.0; 4], None, vec![vec![0, 2]]).unwrap_err();
        assert!(matches!(err, SpaceError::Schema { ref path, .. } if path == "chains[0][1]"));
    }

    #[test]
    fn reversal_swaps_direction() {
        let s = two_point().reversed();
        assert_eq!(s.tau(1, 0), 1.0);
        assert!(s.leq(1, 0) && !s.leq(0, 1));
    }
}
