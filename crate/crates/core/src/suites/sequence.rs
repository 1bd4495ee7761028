use rand::Rng;
use serde_json::json;

use super::{Context, Observation, PropertySuite};
use crate::duals::{dual_norm_oracle, pair_sequence, DualFunctional, SequenceFunctional};
use crate::limcore::{CompositeNorm, CoreNorm, LimSequence};
use crate::{sample, vecops};

pub struct Sequence;

/// Instances for the oracle sweeps.
const ORACLE_COUNT: usize = 100;

fn l1_functional(rng: &mut rand_chacha::ChaCha8Rng) -> SequenceFunctional {
    let len = rng.gen_range(0..=8);
    SequenceFunctional::new(sample::reals(rng, len, 3.0), rng.gen_range(-3.0..3.0))
}

impl PropertySuite for Sequence {
    fn name(&self) -> &'static str {
        "sequence"
    }

    fn summary(&self) -> &'static str {
        "convergent sequences: pairing, Hölder, dual-norm audit"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.single("worked-example", 0.0, || {
            let f = SequenceFunctional::new(vec![0.0, 1.0, 2.0], -1.0);
            let x = LimSequence::new(vec![1.0, -1.0, 0.5], 2.0);
            let v = pair_sequence(&f, &x);
            Ok(Observation::new((v + 2.0).abs(), json!({ "f": f, "x": x, "value": v })).with_value(v))
        });

        ctx.sweep("sequence-pairing-bilinear", 1e-12, n, |rng| {
            let len = rng.gen_range(0..=10);
            let f = SequenceFunctional::new(sample::reals(rng, len, 2.0), rng.gen_range(-2.0..2.0));
            let (x, y) = (sample::sequence(rng, len), sample::sequence(rng, len));
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let z = LimSequence::new(
                vecops::add(&vecops::scaled(&x.head, a), &vecops::scaled(&y.head, b)),
                a * x.limit + b * y.limit,
            );
            let err = pair_sequence(&f, &z) - a * pair_sequence(&f, &x) - b * pair_sequence(&f, &y);
            Ok(Observation::new(err.abs(), json!({ "f": f, "x": x, "y": y, "a": a, "b": b })))
        });

        ctx.sweep("sequence-holder-bound", 1e-12, n, |rng| {
            let len = rng.gen_range(0..=10);
            let p = [1.0, 1.5, 2.0, 4.0, f64::INFINITY][rng.gen_range(0..5)];
            let q = vecops::conjugate_exponent(p);
            let f = SequenceFunctional::new(sample::reals(rng, len, 2.0), rng.gen_range(-2.0..2.0));
            let x = sample::sequence(rng, len);
            let v = pair_sequence(&f, &x).abs();
            let bound = vecops::norm_p(&f.y, q) * vecops::norm_p(&x.head, p) + f.alpha.abs() * x.limit.abs();
            Ok(Observation::new((v - bound).max(0.0), json!({ "f": f, "x": x, "p": p })))
        });

        let m = ORACLE_COUNT.min(n.max(1));
        ctx.sweep("oracle-l1-p-composite-1-equals-max-formula", 0.0, m, |rng| {
            let f = l1_functional(rng);
            let expected = vecops::norm_inf(&f.y).max(f.alpha.abs());
            let r = dual_norm_oracle(&DualFunctional::Sequence(f.clone()), CompositeNorm::PComposite { p: 1.0 }, CoreNorm::Lp { p: 1.0 }, None)?;
            let err = if r.oracle.certified { (r.oracle.value - expected).abs() } else { f64::INFINITY };
            Ok(Observation::new(err, json!({ "f": f, "report": r })))
        });

        ctx.sweep("oracle-l1-max-equals-sum-formula", 0.0, m, |rng| {
            let f = l1_functional(rng);
            let expected = vecops::norm_inf(&f.y) + f.alpha.abs();
            let r = dual_norm_oracle(&DualFunctional::Sequence(f.clone()), CompositeNorm::Max, CoreNorm::Lp { p: 1.0 }, None)?;
            let err = if r.oracle.certified { (r.oracle.value - expected).abs() } else { f64::INFINITY };
            Ok(Observation::new(err, json!({ "f": f, "report": r })))
        });

        // the sum formula against the oracle under the p-composite norm:
        // reported, with the largest discrepancy as witness
        ctx.audit("sum-formula-under-p-composite-1", m, |rng| {
            let f = l1_functional(rng);
            let r = dual_norm_oracle(&DualFunctional::Sequence(f.clone()), CompositeNorm::PComposite { p: 1.0 }, CoreNorm::Lp { p: 1.0 }, None)?;
            Ok(Observation::new((r.sum_formula - r.oracle.value).abs(), json!({ "f": f, "report": r })))
        });

        ctx.sweep("oracle-l2-p-composite-2-equals-q-formula", 1e-9, m.min(20), |rng| {
            let len = rng.gen_range(1..=6);
            let f = SequenceFunctional::new(sample::reals(rng, len, 3.0), rng.gen_range(-3.0..3.0));
            let r = dual_norm_oracle(&DualFunctional::Sequence(f.clone()), CompositeNorm::PComposite { p: 2.0 }, CoreNorm::Lp { p: 2.0 }, None)?;
            Ok(Observation::new((r.oracle.value - r.q_composite_formula).abs(), json!({ "f": f, "report": r })))
        });
    }
}
