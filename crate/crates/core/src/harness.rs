//! Batch experiments: agreement matrices across senses and refinement studies
//! for the approximated limit angles.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::{limit_angle_errors, lookup, Bound, CheckContext, CheckError, CheckOptions, CurvatureCheck, Sense, Verdict};
use crate::model::{embed, Curvature};
use crate::space::{geodesic_lattice, io, sprinkle, Diamond, FiniteLorentzSpace, SpaceError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("K grid must be finite and strictly increasing")]
    UnsortedGrid,
    #[error("K = {k} has finite diameter {diameter}, below the largest time separation {max_tau} in the space")]
    Infeasible { k: f64, diameter: f64, max_tau: f64 },
    #[error("refinement needs one of angle, hinge, monotonicity, one-sided-monotonicity; got {0}")]
    NotRefinable(String),
    #[error("refinement needs a nonempty list of resolutions")]
    NoResolutions,
}

/// How to obtain the space an experiment runs on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceSpec {
    Sprinkle { k: f64, n: usize, seed: u64, height: f64 },
    /// Hubs are `(time, space)` chart parameters, see [`crate::model::embed`].
    Lattice { k: f64, hubs: Vec<[f64; 2]>, m: usize },
    File { path: PathBuf },
    Empty,
}

impl SpaceSpec {
    pub fn build(&self) -> Result<FiniteLorentzSpace, SpaceError> {
        match self {
            SpaceSpec::Sprinkle { k, n, seed, height } => sprinkle(Curvature::new(*k), Diamond { height: *height }, *n, *seed),
            SpaceSpec::Lattice { k, hubs, m } => lattice(Curvature::new(*k), hubs, *m),
            SpaceSpec::File { path } => io::read_space(path),
            SpaceSpec::Empty => Ok(FiniteLorentzSpace::empty()),
        }
    }
}

pub fn lattice(k: Curvature, hubs: &[[f64; 2]], m: usize) -> Result<FiniteLorentzSpace, SpaceError> {
    let pts: Vec<_> = hubs.iter().map(|&[t, x]| embed(k, t, x)).collect();
    geodesic_lattice(k, &pts, m)
}

/// Hub quadruple used when none is given: a long timelike axis with one hub on
/// each side, so every triangle has long side between 1.5 and 2.5.
pub fn default_hubs(k: Curvature) -> Vec<[f64; 2]> {
    match k.value() {
        v if v > 0.0 => vec![[0.0, 0.0], [0.9, -0.35], [2.0, 0.05], [1.1, 0.3]],
        v if v < 0.0 => vec![[0.0, 0.0], [0.9, -0.4], [2.0, 0.05], [1.1, 0.35]],
        _ => vec![[0.0, 0.0], [1.0, -0.6], [2.2, 0.0], [1.2, 0.5]],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub space: SpaceSpec,
    pub senses: Vec<String>,
    pub k_grid: Vec<f64>,
    pub bound: Bound,
    #[serde(default)]
    pub options: CheckOptions,
}

impl ExperimentPlan {
    /// Checks the grid against the space; returns the resolved checkers.
    fn prepare(&self, space: &FiniteLorentzSpace) -> Result<Vec<Box<dyn CurvatureCheck>>, HarnessError> {
        if self.k_grid.iter().any(|k| !k.is_finite()) || self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::UnsortedGrid);
        }
        let max_tau = space.tau_matrix().iter().copied().fold(0.0, f64::max);
        for &k in &self.k_grid {
            let diameter = Curvature::new(k).diameter();
            if max_tau >= diameter {
                return Err(HarnessError::Infeasible { k, diameter, max_tau });
            }
        }
        Ok(self.senses.iter().map(|s| lookup(s)).collect::<Result<_, _>>()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub verdict: Verdict,
    pub tested: usize,
    pub min_slack: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    #[serde(rename = "K")]
    pub k: f64,
    pub first: String,
    pub second: String,
    pub first_verdict: Verdict,
    pub second_verdict: Verdict,
}

/// Verdicts indexed `[sense][K]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub senses: Vec<String>,
    pub k_grid: Vec<f64>,
    pub bound: Bound,
    pub cells: Vec<Vec<Cell>>,
    /// Senses left out of the disagreement lists because their verdicts rest on approximations.
    pub approximate: Vec<String>,
    pub disagreements: Vec<Disagreement>,
    /// Disagreements where one side is VACUOUS; reported, never counted as failures.
    pub vacuous_disagreements: Vec<Disagreement>,
}

impl AgreementMatrix {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrices serialize")
    }

    /// Long-format table: one row per `(sense, K)` cell.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sense", "K", "verdict", "tested", "min_slack"]).expect("in-memory write");
        for (sense, row) in self.senses.iter().zip(&self.cells) {
            for (k, cell) in self.k_grid.iter().zip(row) {
                let slack = cell.min_slack.map(|v| v.to_string()).unwrap_or_default();
                w.write_record([sense.as_str(), &k.to_string(), &cell.verdict.to_string(), &cell.tested.to_string(), &slack])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn verdicts(&self, sense: &str) -> Option<Vec<Verdict>> {
        let i = self.senses.iter().position(|s| s == sense)?;
        Some(self.cells[i].iter().map(|c| c.verdict).collect())
    }
}

pub fn cross_validate(plan: &ExperimentPlan) -> Result<AgreementMatrix, HarnessError> {
    let space = plan.space.build()?;
    cross_validate_on(plan, &space)
}

/// [`cross_validate`] on an already built space; `plan.space` is ignored.
pub fn cross_validate_on(plan: &ExperimentPlan, space: &FiniteLorentzSpace) -> Result<AgreementMatrix, HarnessError> {
    let checks = plan.prepare(space)?;
    let cells: Vec<Vec<Cell>> = std::thread::scope(|scope| {
        let handles: Vec<_> = checks
            .iter()
            .map(|check| {
                scope.spawn(move || {
                    plan.k_grid
                        .iter()
                        .map(|&k| {
                            let ctx = CheckContext { space, k: Curvature::new(k), bound: plan.bound, options: plan.options };
                            let r = check.run(&ctx);
                            Cell { verdict: r.verdict, tested: r.tested, min_slack: r.min_slack }
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("checker thread")).collect()
    });
    let approximate: Vec<String> = checks.iter().filter(|c| c.approximate()).map(|c| c.name().to_string()).collect();
    let mut disagreements = Vec::new();
    let mut vacuous_disagreements = Vec::new();
    for a in 0..checks.len() {
        for b in a + 1..checks.len() {
            if checks[a].approximate() || checks[b].approximate() {
                continue;
            }
            for (ki, &k) in plan.k_grid.iter().enumerate() {
                let (va, vb) = (cells[a][ki].verdict, cells[b][ki].verdict);
                if va == vb {
                    continue;
                }
                let d = Disagreement {
                    k,
                    first: checks[a].name().to_string(),
                    second: checks[b].name().to_string(),
                    first_verdict: va,
                    second_verdict: vb,
                };
                if va == Verdict::Vacuous || vb == Verdict::Vacuous {
                    vacuous_disagreements.push(d);
                } else {
                    disagreements.push(d);
                }
            }
        }
    }
    Ok(AgreementMatrix {
        senses: checks.iter().map(|c| c.name().to_string()).collect(),
        k_grid: plan.k_grid.clone(),
        bound: plan.bound,
        cells,
        approximate,
        disagreements,
        vacuous_disagreements,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub m: usize,
    pub lower: Verdict,
    pub upper: Verdict,
    /// Smaller of the two reports' slacks.
    pub min_slack: Option<f64>,
    /// Worst gap between the limit-angle surrogate and the exact model quantity;
    /// `None` for senses that use no limit.
    pub worst_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementTable {
    pub sense: String,
    #[serde(rename = "K0")]
    pub k0: f64,
    pub rows: Vec<RefinementRow>,
}

/// Errors below this are treated as exact.
const ERROR_FLOOR: f64 = 1e-12;
/// Relative growth tolerated between consecutive resolutions.
const ERROR_SLACK: f64 = 0.1;

impl RefinementTable {
    /// Errors shrink from each resolution to the next up to a 10% slack, and
    /// strictly overall, unless everything sits at the floating-point floor.
    pub fn errors_decrease(&self) -> bool {
        let errs: Vec<f64> = self.rows.iter().filter_map(|r| r.worst_error).collect();
        if errs.iter().all(|&e| e <= ERROR_FLOOR) {
            return true;
        }
        let stepwise = errs.windows(2).all(|w| w[1] <= ERROR_FLOOR || w[1] <= w[0] * (1.0 + ERROR_SLACK));
        stepwise && errs.last() < errs.first()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

/// Run `sense` at its own curvature `k0` on lattices of increasing resolution.
pub fn refinement_study(k0: f64, hubs: &[[f64; 2]], m_list: &[usize], sense: &str, options: CheckOptions) -> Result<RefinementTable, HarnessError> {
    let check = lookup(sense)?;
    let which = check.sense();
    let refinable = [Sense::Angle, Sense::Hinge, Sense::Monotonicity, Sense::OneSidedMonotonicity];
    if !which.is_some_and(|s| refinable.contains(&s)) {
        return Err(HarnessError::NotRefinable(sense.to_string()));
    }
    if m_list.is_empty() {
        return Err(HarnessError::NoResolutions);
    }
    let k = Curvature::new(k0);
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let space = lattice(k, hubs, m)?;
        let run = |bound| check.run(&CheckContext { space: &space, k, bound, options });
        let (lo, up) = (run(Bound::Lower), run(Bound::Upper));
        let min_slack = match (lo.min_slack, up.min_slack) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let errors = limit_angle_errors(&space).unwrap_or_default();
        let worst_error = match which {
            Some(Sense::Angle) => Some(errors.iter().map(|e| (e.approximate - e.exact).abs()).fold(0.0, f64::max)),
            Some(Sense::Hinge) => Some(errors.iter().map(|e| e.hinge_tau_error.abs()).fold(0.0, f64::max)),
            _ => None,
        };
        rows.push(RefinementRow { m, lower: lo.verdict, upper: up.verdict, min_slack, worst_error });
    }
    Ok(RefinementTable { sense: sense.to_string(), k0, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(space: SpaceSpec, senses: &[&str], k_grid: &[f64], bound: Bound) -> ExperimentPlan {
        ExperimentPlan {
            space,
            senses: senses.iter().map(|s| s.to_string()).collect(),
            k_grid: k_grid.to_vec(),
            bound,
            options: CheckOptions::default(),
        }
    }

    #[test]
    fn flat_lattice_matrix() {
        let space = SpaceSpec::Lattice { k: 0.0, hubs: default_hubs(Curvature::new(0.0)), m: 4 };
        let p = plan(space, &["four-point-timelike", "tau-convexity", "triangle"], &[-1.0, -0.5, 0.0, 0.5, 1.0], Bound::Lower);
        let m = cross_validate(&p).unwrap();
        use Verdict::*;
        for sense in &p.senses {
            assert_eq!(m.verdicts(sense).unwrap(), vec![Fail, Fail, Pass, Pass, Pass], "{sense}");
        }
        assert!(m.disagreements.is_empty() && m.vacuous_disagreements.is_empty());
        let csv = m.to_csv();
        assert_eq!(csv.lines().count(), 1 + 15);
        assert!(csv.starts_with("sense,K,verdict,tested,min_slack\n"));
    }

    #[test]
    fn empty_space_is_vacuous_everywhere() {
        let p = plan(SpaceSpec::Empty, &["triangle", "hinge", "four-point-causal"], &[-1.0, 0.0, 1.0], Bound::Upper);
        let m = cross_validate(&p).unwrap();
        assert!(m.cells.iter().flatten().all(|c| c.verdict == Verdict::Vacuous));
        assert!(m.disagreements.is_empty() && m.vacuous_disagreements.is_empty());
        assert_eq!(m.approximate, vec!["hinge"]);
    }

    #[test]
    fn vacuous_disagreements_are_separate() {
        let space = SpaceSpec::Sprinkle { k: 0.0, n: 12, seed: 5, height: 2.0 };
        let p = plan(space, &["four-point-timelike", "triangle"], &[0.0], Bound::Lower);
        let m = cross_validate(&p).unwrap();
        assert!(m.disagreements.is_empty());
        assert_eq!(m.vacuous_disagreements.len(), 1);
        assert_eq!(m.vacuous_disagreements[0].second_verdict, Verdict::Vacuous);
    }

    #[test]
    fn plan_validation() {
        let p = plan(SpaceSpec::Empty, &["triangle"], &[1.0, 0.0], Bound::Lower);
        assert!(matches!(cross_validate(&p), Err(HarnessError::UnsortedGrid)));
        let p = plan(SpaceSpec::Empty, &["nope"], &[0.0], Bound::Lower);
        assert!(matches!(cross_validate(&p), Err(HarnessError::Check(_))));
        let space = SpaceSpec::Lattice { k: 0.0, hubs: vec![[0.0, 0.0], [3.0, 0.0]], m: 2 };
        let p = plan(space, &["triangle"], &[-2.0], Bound::Lower);
        assert!(matches!(cross_validate(&p), Err(HarnessError::Infeasible { .. })));
    }

    #[test]
    fn plans_round_trip_through_json() {
        let p = plan(SpaceSpec::Sprinkle { k: -1.0, n: 10, seed: 2, height: 1.0 }, &["triangle"], &[-1.0], Bound::Upper);
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"generator\":\"sprinkle\""));
        assert_eq!(serde_json::from_str::<ExperimentPlan>(&text).unwrap(), p);
    }

    #[test]
    fn flat_refinement_is_exact() {
        let k = Curvature::new(0.0);
        for sense in ["angle", "hinge"] {
            let t = refinement_study(0.0, &default_hubs(k), &[2, 4, 8], sense, CheckOptions::default()).unwrap();
            assert!(t.rows.iter().all(|r| r.worst_error.unwrap() < 1e-9), "{t:?}");
            assert!(t.errors_decrease());
        }
        assert!(matches!(
            refinement_study(0.0, &default_hubs(k), &[2], "triangle", CheckOptions::default()),
            Err(HarnessError::NotRefinable(_))
        ));
    }

    #[test]
    fn decrease_rule() {
        let table = |errs: &[f64]| RefinementTable {
            sense: "angle".into(),
            k0: 1.0,
            rows: errs
                .iter()
                .map(|&e| RefinementRow { m: 1, lower: Verdict::Pass, upper: Verdict::Pass, min_slack: None, worst_error: Some(e) })
                .collect(),
        };
        assert!(table(&[0.4, 0.2, 0.1]).errors_decrease());
        assert!(table(&[0.4, 0.42, 0.1]).errors_decrease());
        assert!(!table(&[0.4, 0.5, 0.1]).errors_decrease());
        assert!(!table(&[0.4, 0.4]).errors_decrease());
        assert!(table(&[1e-13, 5e-13]).errors_decrease());
    }
}
