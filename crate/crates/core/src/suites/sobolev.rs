use rand::Rng;
use serde_json::json;

use super::{Context, Observation, PropertySuite};
use crate::duals::{pair_density, pair_sobolev, DensityFunctional, SobolevFunctional};
use crate::limcore::LimFunctionHalf;
use crate::piecewise::{Density, StepFunction};
use crate::{sample, vecops};

pub struct Sobolev;

impl PropertySuite for Sobolev {
    fn name(&self) -> &'static str {
        "sobolev"
    }

    fn summary(&self) -> &'static str {
        "W^1_p,lim pairing with a (y0, y1) density pair"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.sweep("zero-y1-reduces-to-density", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let y0 = sample::density(rng, dim);
            let alpha = sample::reals(rng, dim, 2.0);
            let s = SobolevFunctional::new(y0.clone(), Density::zero(dim), alpha.clone())?;
            let d = DensityFunctional::new(y0, 2.0, alpha)?;
            let x = sample::half(rng, dim);
            Ok(Observation::new((pair_sobolev(&s, &x)? - pair_density(&d, &x)?).abs(), json!({ "f": s, "x": x })))
        });

        ctx.sweep("sobolev-pairing-bilinear", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let f = SobolevFunctional::new(sample::density(rng, dim), sample::density(rng, dim), sample::reals(rng, dim, 2.0))?;
            let (x, y) = (sample::half(rng, dim), sample::half(rng, dim));
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let z = x.lin_comb(a, &y, b)?;
            let err = pair_sobolev(&f, &z)? - a * pair_sobolev(&f, &x)? - b * pair_sobolev(&f, &y)?;
            Ok(Observation::new(err.abs(), json!({ "f": f, "x": x, "y": y, "a": a, "b": b })))
        });

        // ∫ c x₀' over a cell covering the core telescopes to -c x₀(0)
        ctx.sweep("constant-y1-telescopes", 1e-12, n, |rng| {
            let x = sample::half(rng, 1);
            let end = *x.core().breaks().last().expect("nonempty core");
            let c = rng.gen_range(-2.0..2.0);
            let y1 = Density::Step(StepFunction::constant(0.0, end + rng.gen_range(0.0..2.0), vec![c])?);
            let f = SobolevFunctional::new(Density::zero(1), y1, vec![0.0])?;
            let expected = -c * x.core().values()[0][0];
            Ok(Observation::new((pair_sobolev(&f, &x)? - expected).abs(), json!({ "x": x, "c": c })))
        });

        ctx.sweep("constant-reads-alpha", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let f = SobolevFunctional::new(sample::density(rng, dim), sample::density(rng, dim), sample::reals(rng, dim, 2.0))?;
            let a = sample::reals(rng, dim, 2.0);
            let v = pair_sobolev(&f, &LimFunctionHalf::constant(a.clone()))?;
            Ok(Observation::new((v - vecops::dot(f.alpha(), &a)).abs(), json!({ "f": f, "a": a })))
        });
    }
}
