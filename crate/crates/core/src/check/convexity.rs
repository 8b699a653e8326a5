use super::{Bound, CheckContext, CheckReport, CurvatureCheck, Flag, Sense, Tally};
use crate::ode::{jensen_check, md, split_domain_check, JensenReport, SampledFunction};

pub(crate) struct TauConvexityCheck;

impl CurvatureCheck for TauConvexityCheck {
    fn name(&self) -> &'static str {
        Sense::TauConvexity.name()
    }

    fn sense(&self) -> Option<Sense> {
        Some(Sense::TauConvexity)
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, k, tol) = (ctx.space, ctx.k, ctx.options.tol);
        let diameter = k.diameter();
        let mut tally = Tally::new();
        for p in 0..s.len() {
            for chain in s.chains() {
                let ids = &chain.ids;
                if ids.len() < 3 || chain.total >= diameter {
                    continue;
                }
                // samples of md(τ between p and γ(t)) where p and γ(t) are related
                let mut samples = Vec::new();
                let mut sample_ids = Vec::new();
                let mut split = None;
                let mut last_related: Option<usize> = None;
                let mut too_far = false;
                for (i, &g) in ids.iter().enumerate() {
                    if !(s.leq(p, g) || s.leq(g, p)) {
                        continue;
                    }
                    let tau = s.tau(p, g).max(s.tau(g, p));
                    if tau >= diameter {
                        too_far = true;
                        break;
                    }
                    if last_related.is_some_and(|l| l + 1 < i) {
                        split = Some(samples.len());
                    }
                    last_related = Some(i);
                    samples.push((s.tau(ids[0], g), md(k, tau)));
                    sample_ids.push(g);
                }
                if too_far || samples.len() < 3 {
                    continue;
                }
                let mut f = SampledFunction::new(samples).expect("chain parameters increase");
                let report: JensenReport = match split {
                    Some(at) => {
                        f.split = Some(at);
                        match split_domain_check(&f, k, 1.0, tol) {
                            Ok(r) => r.jensen,
                            Err(_) => {
                                tally.flag(Flag::SplitBoundaryAtSampleResolution);
                                jensen_check(&f, k, 1.0, tol)
                            }
                        }
                    }
                    None => jensen_check(&f, k, 1.0, tol),
                };
                let (margin, failures, sub) = match ctx.bound {
                    Bound::Lower => (report.sub_margin, &report.sub_failures, true),
                    Bound::Upper => (report.super_margin, &report.super_failures, false),
                };
                tally.add_tested(report.tested, margin);
                for w in failures {
                    let [i, j, l] = w.indices;
                    let value = f.samples[j].1;
                    let solution = if sub { value + w.margin } else { value - w.margin };
                    tally.violate(&[p, sample_ids[i], sample_ids[j], sample_ids[l]], value, solution, w.margin);
                }
            }
        }
        tally.finish(self.name(), ctx)
    }
}

/// Bi-concavity of `τ` along pairs of chains with matching normalized parameters.
pub(crate) struct BiconcavityCheck;

fn normalized(s: &crate::space::FiniteLorentzSpace, ids: &[usize]) -> Vec<f64> {
    let total = s.tau(ids[0], ids[ids.len() - 1]);
    ids.iter().map(|&g| s.tau(ids[0], g) / total).collect()
}

impl CurvatureCheck for BiconcavityCheck {
    fn name(&self) -> &'static str {
        "biconcavity"
    }

    fn sense(&self) -> Option<Sense> {
        None
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, tol) = (ctx.space, ctx.options.tol);
        let mut tally = Tally::new();
        let chains = s.chains();
        for alpha in chains {
            for beta in chains {
                let (a, b) = (&alpha.ids, &beta.ids);
                if a.len() != b.len() || a.len() < 3 {
                    continue;
                }
                let (a0, a1, b0, b1) = (a[0], a[a.len() - 1], b[0], b[b.len() - 1]);
                if !(s.leq(a0, b0) && s.leq(a1, b1)) {
                    continue;
                }
                let (ua, ub) = (normalized(s, a), normalized(s, b));
                if ua.iter().zip(&ub).any(|(x, y)| (x - y).abs() > 1e-9) {
                    tally.bump("skipped_unmatched_grids", 1.0);
                    continue;
                }
                for i in 1..a.len() - 1 {
                    let u = ua[i];
                    let chord = u * s.tau(a1, b1) + (1.0 - u) * s.tau(a0, b0);
                    let value = s.tau(a[i], b[i]);
                    tally.test(&[a0, a1, b0, b1, a[i], b[i]], chord, value, value - chord, tol);
                }
            }
        }
        tally.finish(self.name(), ctx)
    }
}

/// Concavity of `t ↦ τ(p, γ(t))` on runs where `τ < D_K / 2`.
pub(crate) struct ConcavityCheck;

impl CurvatureCheck for ConcavityCheck {
    fn name(&self) -> &'static str {
        "concavity"
    }

    fn sense(&self) -> Option<Sense> {
        None
    }

    fn run(&self, ctx: &CheckContext<'_>) -> CheckReport {
        let (s, tol) = (ctx.space, ctx.options.tol);
        let half = 0.5 * ctx.k.diameter();
        let mut tally = Tally::new();
        for p in 0..s.len() {
            for chain in s.chains() {
                let ids = &chain.ids;
                for future in [true, false] {
                    let value = |g: usize| if future { s.tau(p, g) } else { s.tau(g, p) };
                    let inside = |g: usize| value(g) > 0.0 && value(g) < half;
                    let mut start = 0;
                    while start < ids.len() {
                        if !inside(ids[start]) {
                            start += 1;
                            continue;
                        }
                        let mut end = start;
                        while end + 1 < ids.len() && inside(ids[end + 1]) {
                            end += 1;
                        }
                        let run = &ids[start..=end];
                        let t: Vec<f64> = run.iter().map(|&g| s.tau(ids[0], g)).collect();
                        for i in 0..run.len() {
                            for l in i + 2..run.len() {
                                for j in i + 1..l {
                                    let w = (t[j] - t[i]) / (t[l] - t[i]);
                                    let chord = (1.0 - w) * value(run[i]) + w * value(run[l]);
                                    let v = value(run[j]);
                                    tally.test(&[p, run[i], run[j], run[l]], chord, v, v - chord, tol);
                                }
                            }
                        }
                        start = end + 1;
                    }
                }
            }
        }
        tally.finish(self.name(), ctx)
    }
}
