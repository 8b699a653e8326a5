use super::{Bound, CheckContext, CheckReport, CurvatureCheck, Sense, Tally};
use crate::construct::{comparison_point, realize_triangle, Side, TriangleSides};
use crate::model::{model_leq, model_tau, ModelPoint};
use crate::space::{enumerate_triangles, TriangleClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TriangleScope {
    Timelike,
    Causal,
    StrictCausal,
}

pub(crate) struct TriangleCheck {
    pub sense: Sense,
    pub one_sided: bool,
    pub scope: TriangleScope,
}

const XY: u8 = 1;
const YZ: u8 = 2;
const XZ: u8 = 4;

impl CurvatureCheck for TriangleCheck {
    fn name(&self) -> &'static str {
        self.sense.name()
    }

    fn sense(&self) -> Option<Sense> {
        Some(self.sense)
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, k, tol) = (ctx.space, ctx.k, ctx.options.tol);
        let mut tally = Tally::new();
        for tri in enumerate_triangles(s, true) {
            if self.scope == TriangleScope::Timelike && tri.class != TriangleClass::Timelike {
                continue;
            }
            let (x, y, z) = (tri.x, tri.y, tri.z);
            let sides = TriangleSides::new(s.tau(x, y), s.tau(y, z), s.tau(x, z));
            let Ok(model) = realize_triangle(k, sides) else {
                tally.bump("skipped_size_bound", 1.0);
                continue;
            };
            // (id, comparison point, sides the point lies on)
            let mut pts: Vec<(usize, ModelPoint, u8)> = vec![(x, model.x, XY | XZ), (y, model.y, XY | YZ), (z, model.z, YZ | XZ)];
            for (side, a, b, mask) in [(Side::XY, x, y, XY), (Side::YZ, y, z, YZ), (Side::XZ, x, z, XZ)] {
                let Some(seg) = s.segment(a, b) else { continue };
                for &p in &seg[1..seg.len() - 1] {
                    match comparison_point(k, &model, side, s.tau(a, p)) {
                        Ok(mp) => pts.push((p, mp, mask)),
                        Err(_) => tally.bump("model_errors", 1.0),
                    }
                }
            }
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let (p, pm, mask_p) = pts[i];
                    let (q, qm, mask_q) = pts[j];
                    if mask_p & mask_q != 0 {
                        continue;
                    }
                    if self.one_sided && mask_p.count_ones() + mask_q.count_ones() != 3 {
                        continue;
                    }
                    for (a, am, b, bm) in [(p, pm, q, qm), (q, qm, p, pm)] {
                        let Ok(model_t) = model_tau(k, &am, &bm) else {
                            tally.bump("model_errors", 1.0);
                            continue;
                        };
                        let t = s.tau(a, b);
                        let ids = [x, y, z, a, b];
                        tally.test(&ids, t, model_t, ctx.bound.slack(t, model_t), tol);
                        if self.scope == TriangleScope::StrictCausal {
                            let Ok(model_le) = model_leq(k, &am, &bm) else { continue };
                            let holds = match ctx.bound {
                                Bound::Lower => !s.leq(a, b) || model_le,
                                Bound::Upper => !model_le || s.leq(a, b),
                            };
                            tally.implication(&ids, holds);
                        }
                    }
                }
            }
        }
        tally.finish(self.name(), ctx)
    }
}
