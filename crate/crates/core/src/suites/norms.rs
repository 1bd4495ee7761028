use rand::Rng;
use serde_json::json;

use super::{Context, Observation, PropertySuite};
use crate::limcore::{check_norm_equivalence, sup_norm, x_norm, CompositeNorm, CoreNorm, LimFunctionHalf};
use crate::piecewise::GridFunction;
use crate::{sample, vecops};

pub struct Norms;

impl PropertySuite for Norms {
    fn name(&self) -> &'static str {
        "norms"
    }

    fn summary(&self) -> &'static str {
        "sup norm against composite norms on C_lim(R+)"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.sweep("sum-over-sup-ratio-in-[1,3]", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=3);
            let x = sample::half(rng, dim);
            let eq = check_norm_equivalence(&x);
            let err = (1.0 - eq.ratio).max(eq.ratio - 3.0).max(0.0);
            Ok(Observation::new(err, json!({ "x": x, "ratio": eq.ratio })).with_value(eq.ratio))
        });

        ctx.single("tightness-witness-ratio-3", 0.0, || {
            let x = LimFunctionHalf::new(GridFunction::from_points(&[(0.0, -2.0), (2.0, 0.0)])?, vec![1.0])?;
            let r = check_norm_equivalence(&x).ratio;
            Ok(Observation::new((r - 3.0).abs(), json!({ "x": x, "ratio": r })).with_value(r))
        });

        ctx.sweep("sup-norm-dominates-pointwise", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=3);
            let x = sample::half(rng, dim);
            let s = sup_norm(&x);
            let t = rng.gen_range(0.0..12.0);
            let v = vecops::norm2(&x.eval(t.into())?);
            let attained = x
                .breakpoint_values()
                .map(|(_, v)| vecops::norm2(&v))
                .fold(vecops::norm2(x.limit()), f64::max);
            Ok(Observation::new((v - s).max(0.0).max((attained - s).abs()), json!({ "x": x, "t": t })))
        });

        ctx.sweep("composite-norm-ordering", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let x = sample::half(rng, dim);
            let core = if rng.gen_bool(0.5) { CoreNorm::Sup } else { CoreNorm::Lp { p: rng.gen_range(1.0..4.0) } };
            let p = rng.gen_range(1.0..6.0);
            let norm = |c| x_norm(&x, c, core);
            let sum = norm(CompositeNorm::Sum)?;
            let p1 = norm(CompositeNorm::PComposite { p: 1.0 })?;
            let pp = norm(CompositeNorm::PComposite { p })?;
            let p2 = norm(CompositeNorm::PComposite { p: p + 1.0 })?;
            let max = norm(CompositeNorm::Max)?;
            // sum = P(1) >= P(p) >= P(p+1) >= max >= sum / 2
            let err = [(sum - p1).abs(), pp - p1, p2 - pp, max - p2, 0.5 * sum - max]
                .into_iter()
                .fold(0.0, f64::max);
            Ok(Observation::new(err, json!({ "x": x, "core": core, "p": p })))
        });
    }
}
