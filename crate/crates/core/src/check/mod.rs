//! Curvature-bound checkers: each notion of a timelike curvature bound is a
//! [`CurvatureCheck`] registered under a kebab-case name.

mod convexity;
mod estimate;
mod four_point;
mod hinge;
mod triangle;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Curvature;
use crate::space::FiniteLorentzSpace;

pub use estimate::{estimate_k, EstimateError, KInterval};
pub use four_point::form_slacks;
pub use hinge::{limit_angle_errors, LimitAngleError};

/// Violations kept in a report; `violation_count` has the full number.
pub const MAX_REPORTED_VIOLATIONS: usize = 64;

/// The fifteen equivalent formulations of a timelike curvature bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Triangle,
    OneSidedTriangle,
    CausalTriangle,
    OneSidedCausalTriangle,
    StrictCausalTriangle,
    OneSidedStrictCausalTriangle,
    Monotonicity,
    OneSidedMonotonicity,
    Angle,
    Hinge,
    FourPointTimelike,
    FourPointAngle,
    FourPointCausal,
    FourPointStrictCausal,
    TauConvexity,
}

impl Sense {
    pub const ALL: [Sense; 15] = [
        Sense::Triangle,
        Sense::OneSidedTriangle,
        Sense::CausalTriangle,
        Sense::OneSidedCausalTriangle,
        Sense::StrictCausalTriangle,
        Sense::OneSidedStrictCausalTriangle,
        Sense::Monotonicity,
        Sense::OneSidedMonotonicity,
        Sense::Angle,
        Sense::Hinge,
        Sense::FourPointTimelike,
        Sense::FourPointAngle,
        Sense::FourPointCausal,
        Sense::FourPointStrictCausal,
        Sense::TauConvexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sense::Triangle => "triangle",
            Sense::OneSidedTriangle => "one-sided-triangle",
            Sense::CausalTriangle => "causal-triangle",
            Sense::OneSidedCausalTriangle => "one-sided-causal-triangle",
            Sense::StrictCausalTriangle => "strict-causal-triangle",
            Sense::OneSidedStrictCausalTriangle => "one-sided-strict-causal-triangle",
            Sense::Monotonicity => "monotonicity",
            Sense::OneSidedMonotonicity => "one-sided-monotonicity",
            Sense::Angle => "angle",
            Sense::Hinge => "hinge",
            Sense::FourPointTimelike => "four-point-timelike",
            Sense::FourPointAngle => "four-point-angle",
            Sense::FourPointCausal => "four-point-causal",
            Sense::FourPointStrictCausal => "four-point-strict-causal",
            Sense::TauConvexity => "tau-convexity",
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    /// Slack of `small ≤ large` for the lower bound, reversed for the upper one.
    fn slack(self, small: f64, large: f64) -> f64 {
        match self {
            Bound::Lower => large - small,
            Bound::Upper => small - large,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Vacuous => "VACUOUS",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flag {
    /// Continuity and openness clauses have no finite analogue.
    TopologyNotApplicable,
    LimitAngleApproximated,
    SplitBoundaryAtSampleResolution,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckOptions {
    pub tol: f64,
    pub tol_ang: f64,
    pub eps_straight: f64,
    /// Extra tolerance for comparisons that use an approximated limit angle.
    pub limit_slack: f64,
    /// Use the comparison-angle form of the four-point conditions.
    pub angle_version: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { tol: 1e-7, tol_ang: 1e-7, eps_straight: 1e-9, limit_slack: 0.0, angle_version: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub ids: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub sense: String,
    pub bound: Bound,
    #[serde(rename = "K")]
    pub k: f64,
    pub verdict: Verdict,
    pub tested: usize,
    pub min_slack: Option<f64>,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub flags: Vec<Flag>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub struct CheckContext<'a> {
    pub space: &'a FiniteLorentzSpace,
    pub k: Curvature,
    pub bound: Bound,
    pub options: CheckOptions,
}

pub trait CurvatureCheck: Send + Sync {
    fn name(&self) -> &'static str;

    /// The formulation this checker implements, if it is one of the equivalent fifteen.
    fn sense(&self) -> Option<Sense>;

    /// Whether verdicts rest on an approximated limit.
    fn approximate(&self) -> bool {
        false
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport;
}

#[derive(Debug, Error, PartialEq)]
pub enum CheckError {
    #[error("unknown sense {0:?}")]
    UnknownSense(String),
}

pub fn registry() -> Vec<Box<dyn CurvatureCheck>> {
    use four_point::{FourPointCheck, FourPointScope};
    use triangle::{TriangleCheck, TriangleScope};
    let tri = |sense, one_sided, scope| Box::new(TriangleCheck { sense, one_sided, scope }) as Box<dyn CurvatureCheck>;
    let fp = |sense, scope, angle| Box::new(FourPointCheck { sense, scope, angle }) as Box<dyn CurvatureCheck>;
    vec![
        tri(Sense::Triangle, false, TriangleScope::Timelike),
        tri(Sense::OneSidedTriangle, true, TriangleScope::Timelike),
        tri(Sense::CausalTriangle, false, TriangleScope::Causal),
        tri(Sense::OneSidedCausalTriangle, true, TriangleScope::Causal),
        tri(Sense::StrictCausalTriangle, false, TriangleScope::StrictCausal),
        tri(Sense::OneSidedStrictCausalTriangle, true, TriangleScope::StrictCausal),
        Box::new(hinge::MonotonicityCheck { one_sided: false }),
        Box::new(hinge::MonotonicityCheck { one_sided: true }),
        Box::new(hinge::AngleCheck),
        Box::new(hinge::HingeCheck),
        fp(Sense::FourPointTimelike, FourPointScope::Timelike, false),
        fp(Sense::FourPointAngle, FourPointScope::Timelike, true),
        fp(Sense::FourPointCausal, FourPointScope::Causal, false),
        fp(Sense::FourPointStrictCausal, FourPointScope::Strict, false),
        Box::new(convexity::TauConvexityCheck),
        Box::new(convexity::BiconcavityCheck),
        Box::new(convexity::ConcavityCheck),
    ]
}

pub fn lookup(name: &str) -> Result<Box<dyn CurvatureCheck>, CheckError> {
    registry().into_iter().find(|c| c.name() == name).ok_or_else(|| CheckError::UnknownSense(name.to_string()))
}

pub fn checker_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name()).collect()
}

pub fn run_check(
    name: &str,
    space: &FiniteLorentzSpace,
    k: Curvature,
    bound: Bound,
    options: CheckOptions,
) -> Result<CheckReport, CheckError> {
    Ok(lookup(name)?.run(&CheckContext { space, k, bound, options }))
}

/// Accumulates tests and violations for one report.
pub(crate) struct Tally {
    tested: usize,
    min_slack: f64,
    violations: Vec<Violation>,
    violation_count: usize,
    flags: Vec<Flag>,
    diagnostics: BTreeMap<String, f64>,
}

impl Tally {
    pub(crate) fn new() -> Self {
        Tally {
            tested: 0,
            min_slack: f64::INFINITY,
            violations: Vec::new(),
            violation_count: 0,
            flags: vec![Flag::TopologyNotApplicable],
            diagnostics: BTreeMap::new(),
        }
    }

    /// One inequality with `slack ≥ −tol` required.
    pub(crate) fn test(&mut self, ids: &[usize], lhs: f64, rhs: f64, slack: f64, tol: f64) {
        self.tested += 1;
        self.min_slack = self.min_slack.min(slack);
        if slack < -tol {
            self.violate(ids, lhs, rhs, slack);
        }
    }

    /// A causal implication; violations are recorded as `1 ⇒ 0` with margin −1.
    pub(crate) fn implication(&mut self, ids: &[usize], holds: bool) {
        self.tested += 1;
        if !holds {
            self.violate(ids, 1.0, 0.0, -1.0);
        }
    }

    pub(crate) fn add_tested(&mut self, n: usize, min_slack: f64) {
        self.tested += n;
        if n > 0 {
            self.min_slack = self.min_slack.min(min_slack);
        }
    }

    pub(crate) fn violate(&mut self, ids: &[usize], lhs: f64, rhs: f64, margin: f64) {
        self.violation_count += 1;
        self.violations.push(Violation { ids: ids.to_vec(), lhs, rhs, margin });
        if self.violations.len() >= 16 * MAX_REPORTED_VIOLATIONS {
            self.trim();
        }
    }

    pub(crate) fn flag(&mut self, flag: Flag) {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }

    pub(crate) fn bump(&mut self, key: &str, by: f64) {
        *self.diagnostics.entry(key.to_string()).or_insert(0.0) += by;
    }

    fn trim(&mut self) {
        self.violations.sort_by(|a, b| a.margin.total_cmp(&b.margin).then_with(|| a.ids.cmp(&b.ids)));
        self.violations.truncate(MAX_REPORTED_VIOLATIONS);
    }

    pub(crate) fn finish(mut self, name: &str, ctx: &CheckContext<'_>) -> CheckReport {
        self.trim();
        self.flags.sort();
        let verdict = if self.tested == 0 {
            Verdict::Vacuous
        } else if self.violation_count > 0 {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        CheckReport {
            sense: name.to_string(),
            bound: ctx.bound,
            k: ctx.k.value(),
            verdict,
            tested: self.tested,
            min_slack: (self.tested > 0 && self.min_slack.is_finite()).then_some(self.min_slack),
            violations: self.violations,
            violation_count: self.violation_count,
            flags: self.flags,
            diagnostics: self.diagnostics,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique_and_cover_every_sense() {
        let names = checker_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        for sense in Sense::ALL {
            let c = lookup(sense.name()).unwrap();
            assert_eq!(c.sense(), Some(sense));
            assert_eq!(serde_json::to_value(sense).unwrap(), sense.name());
        }
        assert!(lookup("biconcavity").unwrap().sense().is_none());
        assert_eq!(lookup("nope").err(), Some(CheckError::UnknownSense("nope".into())));
    }

    #[test]
    fn empty_space_is_vacuous_everywhere() {
        let s = FiniteLorentzSpace::empty();
        for c in registry() {
            let r = c.run(&CheckContext { space: &s, k: Curvature::new(0.0), bound: Bound::Lower, options: CheckOptions::default() });
            assert_eq!(r.verdict, Verdict::Vacuous, "{}", c.name());
            assert_eq!(r.min_slack, None);
            assert!(r.flags.contains(&Flag::TopologyNotApplicable));
        }
    }

    #[test]
    fn report_json_shape() {
        let s = FiniteLorentzSpace::empty();
        let r = run_check("triangle", &s, Curvature::new(0.5), Bound::Upper, CheckOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["sense"], "triangle");
        assert_eq!(v["bound"], "UPPER");
        assert_eq!(v["K"], 0.5);
        assert_eq!(v["verdict"], "VACUOUS");
        assert!(v["min_slack"].is_null());
        assert_eq!(v["flags"][0], "TOPOLOGY_NOT_APPLICABLE");
    }
}
