use super::{Bound, CheckContext, CheckReport, CurvatureCheck, Sense, Tally};
use crate::construct::{comparison_angle, four_point_wing, satisfies_size_bounds, TimeSense, TriangleSides, Vertex};
use crate::model::{model_leq, model_tau, Curvature, ModelPoint};
use crate::space::{for_each_four_point, ConfigClass, FiniteLorentzSpace, FourPointConfig, FourPointQuery, StraightFilter};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum FourPointScope {
    Timelike,
    Causal,
    Strict,
}

pub(crate) struct FourPointCheck {
    pub sense: Sense,
    pub scope: FourPointScope,
    pub angle: bool,
}

/// Per-`(y, x)` memo of comparison wings and angles, indexed by `z`.
struct WingCache {
    key: Option<(usize, usize)>,
    left: Vec<Option<Option<ModelPoint>>>,
    right: Vec<Option<Option<ModelPoint>>>,
    angle: Vec<Option<Option<f64>>>,
}

impl WingCache {
    fn new(n: usize) -> Self {
        WingCache { key: None, left: vec![None; n], right: vec![None; n], angle: vec![None; n] }
    }

    fn reset(&mut self, key: (usize, usize)) {
        if self.key != Some(key) {
            self.key = Some(key);
            self.left.iter_mut().for_each(|v| *v = None);
            self.right.iter_mut().for_each(|v| *v = None);
            self.angle.iter_mut().for_each(|v| *v = None);
        }
    }
}

/// Time separation read in the configuration's time sense.
fn sensed(s: &FiniteLorentzSpace, sense: TimeSense, a: usize, b: usize) -> f64 {
    match sense {
        TimeSense::Future => s.tau(a, b),
        TimeSense::Past => s.tau(b, a),
    }
}

fn sensed_leq(s: &FiniteLorentzSpace, sense: TimeSense, a: usize, b: usize) -> bool {
    match sense {
        TimeSense::Future => s.leq(a, b),
        TimeSense::Past => s.leq(b, a),
    }
}

impl FourPointCheck {
    fn query(&self, ctx: &CheckContext<'_>, sense: TimeSense) -> FourPointQuery {
        let class = if self.scope == FourPointScope::Timelike { ConfigClass::Timelike } else { ConfigClass::Causal };
        let mut q = FourPointQuery::new(class, sense);
        q.eps_straight = ctx.options.eps_straight;
        q.endpoint_causal_only = self.scope != FourPointScope::Strict || ctx.bound == Bound::Upper;
        if ctx.bound == Bound::Upper {
            q.straight = StraightFilter::Straight;
        }
        q
    }
}

impl CurvatureCheck for FourPointCheck {
    fn name(&self) -> &'static str {
        self.sense.name()
    }

    fn sense(&self) -> Option<Sense> {
        Some(self.sense)
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, k) = (ctx.space, ctx.k);
        let (tol, tol_ang) = (ctx.options.tol, ctx.options.tol_ang);
        let angle_form = self.angle || ctx.options.angle_version;
        let mut tally = Tally::new();
        let mut agreement = (0usize, 0usize);
        for sense in [TimeSense::Future, TimeSense::Past] {
            let mut cache = WingCache::new(s.len());
            let q = self.query(ctx, sense);
            for_each_four_point(s, &q, |c: &FourPointConfig| {
                let t = |a, b| sensed(s, sense, a, b);
                let (y, x, z1, z2) = (c.y, c.x, c.z1, c.z2);
                let c0 = t(y, x);
                let tau12 = t(z1, z2);
                if !satisfies_size_bounds(k, &[t(y, z1), t(y, z2), tau12]) {
                    return;
                }
                cache.reset((y, x));
                let wing = |cache: &mut WingCache, z: usize, side: f64| -> Option<ModelPoint> {
                    let slot = if side < 0.0 { &mut cache.left[z] } else { &mut cache.right[z] };
                    *slot.get_or_insert_with(|| four_point_wing(k, c0, t(y, z), t(x, z), side).ok())
                };
                let (Some(w1), Some(w2)) = (wing(&mut cache, z1, -1.0), wing(&mut cache, z2, 1.0)) else {
                    return;
                };
                let Ok(model_t) = model_tau(k, &w1, &w2) else { return };
                let ids = c.ids();
                // four-point lower bound: τ(z1,z2) ≥ τ(ẑ1,ẑ2)
                let tau_slack = ctx.bound.slack(model_t, tau12);
                if angle_form {
                    let mut opening = |z: usize| -> Option<f64> {
                        *cache.angle[z].get_or_insert_with(|| {
                            let sides = TriangleSides::new(c0, t(x, z), t(y, z));
                            comparison_angle(k, sides, Vertex::Y).ok().map(|a| a.magnitude)
                        })
                    };
                    let (o1, o2) = (opening(z1), opening(z2));
                    let spread = if sensed_leq(s, sense, z1, z2) {
                        comparison_angle(k, TriangleSides::new(t(x, z1), tau12, t(x, z2)), Vertex::X).ok().map(|a| a.magnitude)
                    } else {
                        None
                    };
                    if let (Some(o1), Some(o2), Some(spread)) = (o1, o2, spread) {
                        let angle_slack = ctx.bound.slack(spread, o1 + o2);
                        tally.test(&ids, spread, o1 + o2, angle_slack, tol_ang);
                        agreement.0 += 1;
                        if (tau_slack < -tol && angle_slack > tol_ang) || (tau_slack > tol && angle_slack < -tol_ang) {
                            agreement.1 += 1;
                        }
                    }
                } else {
                    tally.test(&ids, tau12, model_t, tau_slack, tol);
                }
                if self.scope == FourPointScope::Strict {
                    let Ok(model_le) = model_leq(k, &w1, &w2) else { return };
                    let space_le = sensed_leq(s, sense, z1, z2);
                    let holds = match ctx.bound {
                        Bound::Lower => !model_le || space_le,
                        Bound::Upper => !space_le || model_le,
                    };
                    tally.implication(&ids, holds);
                }
            });
        }
        if angle_form {
            tally.bump("angle_form_tested", agreement.0 as f64);
            tally.bump("angle_form_disagreements", agreement.1 as f64);
        }
        tally.finish(self.name(), ctx)
    }
}

/// Angle-form and `τ`-form slacks of every future configuration where both are
/// defined; used to cross-check the two forms outside the checker.
pub fn form_slacks(s: &FiniteLorentzSpace, k: Curvature, class: ConfigClass) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut q = FourPointQuery::new(class, TimeSense::Future);
    q.endpoint_causal_only = true;
    for_each_four_point(s, &q, |c| {
        let t = |a, b| s.tau(a, b);
        let (y, x, z1, z2) = (c.y, c.x, c.z1, c.z2);
        let c0 = t(y, x);
        let (Ok(w1), Ok(w2)) = (four_point_wing(k, c0, t(y, z1), t(x, z1), -1.0), four_point_wing(k, c0, t(y, z2), t(x, z2), 1.0)) else {
            return;
        };
        let Ok(model_t) = model_tau(k, &w1, &w2) else { return };
        let open = |z: usize| comparison_angle(k, TriangleSides::new(c0, t(x, z), t(y, z)), Vertex::Y).ok();
        let spread = comparison_angle(k, TriangleSides::new(t(x, z1), t(z1, z2), t(x, z2)), Vertex::X).ok();
        if let (Some(o1), Some(o2), Some(sp)) = (open(z1), open(z2), spread) {
            out.push((t(z1, z2) - model_t, o1.magnitude + o2.magnitude - sp.magnitude));
        }
    });
    out
}
