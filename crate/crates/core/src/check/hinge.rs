//! Checkers built on chain hinges: two chain rays leaving a common point.

use serde::{Deserialize, Serialize};

use super::{CheckContext, CheckReport, CurvatureCheck, Flag, Sense, Tally};
use crate::construct::{comparison_angle, realize_hinge, SignedAngle, TriangleSides, Vertex};
use crate::model::{self, angle_at, model_geodesic, model_tau, Curvature, ModelError, ModelPoint, Orientation};
use crate::space::FiniteLorentzSpace;

/// The part of a chain after (future) or before (past) a point, ordered away from it.
pub(crate) struct Ray {
    pub future: bool,
    pub ids: Vec<usize>,
    /// `τ` from the vertex along the ray.
    pub params: Vec<f64>,
}

impl Ray {
    fn orientation(&self) -> Orientation {
        if self.future {
            Orientation::Future
        } else {
            Orientation::Past
        }
    }

    fn len(&self) -> f64 {
        *self.params.last().expect("rays are nonempty")
    }
}

pub(crate) fn rays_at(s: &FiniteLorentzSpace, x: usize) -> Vec<Ray> {
    let mut rays = Vec::new();
    for chain in s.chains() {
        for (pos, &id) in chain.ids.iter().enumerate() {
            if id != x {
                continue;
            }
            if pos + 1 < chain.ids.len() {
                let ids = chain.ids[pos + 1..].to_vec();
                let params = ids.iter().map(|&p| s.tau(x, p)).collect();
                rays.push(Ray { future: true, ids, params });
            }
            if pos > 0 {
                let ids: Vec<usize> = chain.ids[..pos].iter().rev().copied().collect();
                let params = ids.iter().map(|&p| s.tau(p, x)).collect();
                rays.push(Ray { future: false, ids, params });
            }
        }
    }
    rays
}

/// Points lying on some chain, ascending.
fn chain_points(s: &FiniteLorentzSpace) -> Vec<usize> {
    let mut pts: Vec<usize> = s.chains().iter().flat_map(|c| c.ids.iter().copied()).collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Signed K-comparison angle at `x` between `a.ids[i]` and `b.ids[j]`, where defined.
fn hinge_angle(s: &FiniteLorentzSpace, k: Curvature, x: usize, a: &Ray, i: usize, b: &Ray, j: usize) -> Option<f64> {
    let (p, q) = (a.ids[i], b.ids[j]);
    if p == q {
        return None;
    }
    let t = |u: usize, v: usize| s.tau(u, v);
    let (sides, vertex) = match (a.future, b.future) {
        (true, true) => {
            let (near, far) = if s.leq(p, q) {
                (p, q)
            } else if s.leq(q, p) {
                (q, p)
            } else {
                return None;
            };
            (TriangleSides::new(t(x, near), t(near, far), t(x, far)), Vertex::X)
        }
        (false, false) => {
            let (early, late) = if s.leq(p, q) {
                (p, q)
            } else if s.leq(q, p) {
                (q, p)
            } else {
                return None;
            };
            (TriangleSides::new(t(early, late), t(late, x), t(early, x)), Vertex::Z)
        }
        (true, false) => (TriangleSides::new(t(q, x), t(x, p), t(q, p)), Vertex::Y),
        (false, true) => (TriangleSides::new(t(p, x), t(x, q), t(p, q)), Vertex::Y),
    };
    comparison_angle(k, sides, vertex).ok().map(|a| a.value())
}

/// Flat comparison angle at the smallest defined parameter pair, standing in
/// for the limit angle; `None` when no pair is related.
fn approximate_limit_angle(s: &FiniteLorentzSpace, x: usize, a: &Ray, b: &Ray) -> Option<(f64, usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..a.ids.len()).flat_map(|i| (0..b.ids.len()).map(move |j| (i, j))).collect();
    pairs.sort_by(|&(i1, j1), &(i2, j2)| (a.params[i1] + b.params[j1]).total_cmp(&(a.params[i2] + b.params[j2])));
    pairs
        .into_iter()
        .find_map(|(i, j)| hinge_angle(s, Curvature::new(0.0), x, a, i, b, j).map(|theta| (theta, i, j)))
}

pub(crate) struct MonotonicityCheck {
    pub one_sided: bool,
}

impl CurvatureCheck for MonotonicityCheck {
    fn name(&self) -> &'static str {
        self.sense().map(Sense::name).unwrap_or_default()
    }

    fn sense(&self) -> Option<Sense> {
        Some(if self.one_sided { Sense::OneSidedMonotonicity } else { Sense::Monotonicity })
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, k, tol) = (ctx.space, ctx.k, ctx.options.tol_ang);
        let mut tally = Tally::new();
        for x in chain_points(s) {
            let rays = rays_at(s, x);
            for (ai, a) in rays.iter().enumerate() {
                for (bi, b) in rays.iter().enumerate() {
                    if ai == bi {
                        continue;
                    }
                    let js: Vec<usize> = if self.one_sided { vec![b.ids.len() - 1] } else { (0..b.ids.len()).collect() };
                    for j in js {
                        let mut prev: Option<(usize, f64)> = None;
                        for i in 0..a.ids.len() {
                            let Some(theta) = hinge_angle(s, k, x, a, i, b, j) else { continue };
                            if let Some((pi, ptheta)) = prev {
                                let ids = [x, a.ids[pi], a.ids[i], b.ids[j]];
                                // nondecreasing for the lower bound
                                tally.test(&ids, ptheta, theta, ctx.bound.slack(ptheta, theta), tol);
                            }
                            prev = Some((i, theta));
                        }
                    }
                }
            }
        }
        tally.finish(self.name(), ctx)
    }
}

pub(crate) struct AngleCheck;

impl CurvatureCheck for AngleCheck {
    fn name(&self) -> &'static str {
        Sense::Angle.name()
    }

    fn sense(&self) -> Option<Sense> {
        Some(Sense::Angle)
    }

    fn approximate(&self) -> bool {
        true
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, k) = (ctx.space, ctx.k);
        let tol = ctx.options.tol_ang + ctx.options.limit_slack;
        let mut tally = Tally::new();
        tally.flag(Flag::LimitAngleApproximated);
        for x in chain_points(s) {
            let rays = rays_at(s, x);
            let mut limits = vec![vec![None; rays.len()]; rays.len()];
            for (ai, a) in rays.iter().enumerate() {
                for (bi, b) in rays.iter().enumerate().skip(ai + 1) {
                    let Some((limit, _, _)) = approximate_limit_angle(s, x, a, b) else { continue };
                    limits[ai][bi] = Some(limit);
                    limits[bi][ai] = Some(limit);
                    for i in 0..a.ids.len() {
                        for j in 0..b.ids.len() {
                            let Some(theta) = hinge_angle(s, k, x, a, i, b, j) else { continue };
                            let ids = [x, a.ids[i], b.ids[j]];
                            tally.test(&ids, limit, theta, ctx.bound.slack(limit, theta), tol);
                        }
                    }
                }
            }
            angle_triangle_diagnostic(&rays, &limits, ctx.options.tol_ang, &mut tally);
        }
        tally.finish(self.name(), ctx)
    }
}

/// Triangle inequality among limit angles of three equally oriented rays, recorded but never enforced.
fn angle_triangle_diagnostic(rays: &[Ray], limits: &[Vec<Option<f64>>], tol: f64, tally: &mut Tally) {
    let n = rays.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if rays[a].future != rays[b].future || rays[b].future != rays[c].future {
                    continue;
                }
                let (Some(ab), Some(bc), Some(ac)) = (limits[a][b], limits[b][c], limits[a][c]) else { continue };
                let (ab, bc, ac) = (ab.abs(), bc.abs(), ac.abs());
                tally.bump("angle_triangle_tested", 1.0);
                if ab > bc + ac + tol || bc > ab + ac + tol || ac > ab + bc + tol {
                    tally.bump("angle_triangle_violations", 1.0);
                }
            }
        }
    }
}

pub(crate) struct HingeCheck;

/// Point at `τ`-distance `d` from the vertex along a comparison hinge leg.
fn along_leg(k: Curvature, vertex: &ModelPoint, end: &ModelPoint, future: bool, d: f64, len: f64) -> Result<ModelPoint, ModelError> {
    let frac = (d / len).clamp(0.0, 1.0);
    if future {
        model_geodesic(k, vertex, end, frac)
    } else {
        model_geodesic(k, end, vertex, 1.0 - frac)
    }
}

impl CurvatureCheck for HingeCheck {
    fn name(&self) -> &'static str {
        Sense::Hinge.name()
    }

    fn sense(&self) -> Option<Sense> {
        Some(Sense::Hinge)
    }

    fn approximate(&self) -> bool {
        true
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, k) = (ctx.space, ctx.k);
        let tol = ctx.options.tol + ctx.options.limit_slack;
        let mut tally = Tally::new();
        tally.flag(Flag::LimitAngleApproximated);
        for x in chain_points(s) {
            let rays = rays_at(s, x);
            for (ai, a) in rays.iter().enumerate() {
                for b in rays.iter().skip(ai + 1) {
                    let Some((limit, _, _)) = approximate_limit_angle(s, x, a, b) else { continue };
                    let angle = SignedAngle { magnitude: limit.abs(), sign: model::sign_of(a.orientation(), b.orientation()) };
                    let Ok(h) = realize_hinge(k, a.len(), b.len(), angle, (a.orientation(), b.orientation())) else {
                        tally.bump("skipped_size_bound", 1.0);
                        continue;
                    };
                    for i in 0..a.ids.len() {
                        let Ok(pm) = along_leg(k, &h.vertex, &h.a_end, a.future, a.params[i], a.len()) else { continue };
                        for j in 0..b.ids.len() {
                            let Ok(qm) = along_leg(k, &h.vertex, &h.b_end, b.future, b.params[j], b.len()) else { continue };
                            let (p, q) = (a.ids[i], b.ids[j]);
                            for (u, um, v, vm) in [(p, pm, q, qm), (q, qm, p, pm)] {
                                let Ok(model_t) = model_tau(k, &um, &vm) else {
                                    tally.bump("model_errors", 1.0);
                                    continue;
                                };
                                let t = s.tau(u, v);
                                // lower bound: τ(α(a), β(b)) ≥ τ of the comparison hinge
                                tally.test(&[x, u, v], t, model_t, ctx.bound.slack(model_t, t), tol);
                            }
                        }
                    }
                }
            }
        }
        tally.finish(self.name(), ctx)
    }
}

/// Limit-angle surrogate against the exact model angle at one chain hinge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitAngleError {
    pub vertex: usize,
    pub approximate: f64,
    pub exact: f64,
    /// Model `τ` between the hinge endpoints built from the approximate angle, minus the exact value.
    pub hinge_tau_error: f64,
}

/// Compare the limit-angle surrogate with exact model angles; needs model annotations.
pub fn limit_angle_errors(s: &FiniteLorentzSpace) -> Option<Vec<LimitAngleError>> {
    let k = s.model_curvature()?;
    let mut out = Vec::new();
    for x in chain_points(s) {
        let rays = rays_at(s, x);
        let v = s.annotation(x)?;
        for (ai, a) in rays.iter().enumerate() {
            for b in rays.iter().skip(ai + 1) {
                let Some((limit, _, _)) = approximate_limit_angle(s, x, a, b) else { continue };
                let (ea, eb) = (s.annotation(*a.ids.last()?)?, s.annotation(*b.ids.last()?)?);
                let Ok(exact) = angle_at(k, v, ea, eb) else { continue };
                let sign = model::sign_of(a.orientation(), b.orientation());
                let orient = (a.orientation(), b.orientation());
                let endpoint_tau = |magnitude: f64| -> Option<f64> {
                    let h = realize_hinge(k, a.len(), b.len(), SignedAngle { magnitude, sign }, orient).ok()?;
                    Some(h.tau_ab(k).ok()? + h.tau_ba(k).ok()?)
                };
                let hinge_tau_error = match (endpoint_tau(limit.abs()), endpoint_tau(exact)) {
                    (Some(u), Some(w)) => u - w,
                    _ => continue,
                };
                out.push(LimitAngleError { vertex: x, approximate: limit.abs(), exact, hinge_tau_error });
            }
        }
    }
    Some(out)
}
