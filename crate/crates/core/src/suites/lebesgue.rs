use rand::Rng;
use serde_json::json;

use super::{Context, Observation, PropertySuite};
use crate::duals::{assemble_line_density, pair_density, pair_density_line, pair_line_density_halves, DensityFunctional};
use crate::limcore::check_lambda_limit;
use crate::piecewise::GridFunction;
use crate::{sample, vecops};

pub struct Lebesgue;

const EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

impl PropertySuite for Lebesgue {
    fn name(&self) -> &'static str {
        "lebesgue"
    }

    fn summary(&self) -> &'static str {
        "density representation on L_p,lim, Hölder bounds, λ-limits"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.sweep("density-pairing-bilinear", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let f = DensityFunctional::new(sample::density(rng, dim), 2.0, sample::reals(rng, dim, 2.0))?;
            let (x, y) = (sample::half(rng, dim), sample::half(rng, dim));
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let z = x.lin_comb(a, &y, b)?;
            let in_x = pair_density(&f, &z)? - a * pair_density(&f, &x)? - b * pair_density(&f, &y)?;
            let g = DensityFunctional::new(f.y().scale(a), 2.0, vecops::scaled(f.alpha(), a))?;
            let in_f = pair_density(&g, &x)? - a * pair_density(&f, &x)?;
            Ok(Observation::new(in_x.abs().max(in_f.abs()), json!({ "f": f, "x": x, "y": y, "a": a, "b": b })))
        });

        ctx.sweep("holder-bound", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let q = EXPONENTS[rng.gen_range(0..EXPONENTS.len())];
            let f = DensityFunctional::new(sample::density(rng, dim), q, sample::reals(rng, dim, 2.0))?;
            let x = sample::half(rng, dim);
            let v = pair_density(&f, &x)?.abs();
            let bound = f.holder_bound(&x)?;
            Ok(Observation::new((v - bound).max(0.0), json!({ "f": f, "x": x, "value": v, "bound": bound })))
        });

        ctx.sweep("assembly-density-matches-halves", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let (y1, y2) = (sample::density(rng, dim), sample::density(rng, dim));
            let (a1, a2) = (sample::reals(rng, dim, 2.0), sample::reals(rng, dim, 2.0));
            let f = assemble_line_density(&y1, &y2, 2.0, &a1, &a2)?;
            let x = sample::line(rng, dim);
            let err = (pair_density_line(&f, &x)? - pair_line_density_halves(&y1, &y2, 2.0, &a1, &a2, &x)?).abs();
            Ok(Observation::new(err, json!({ "y1": y1, "y2": y2, "alpha1": a1, "alpha2": a2, "x": x })))
        });

        // a converging function sampled past its core: the violation set
        // shrinks as N and eps grow and is empty beyond the core
        ctx.sweep("lambda-limit-monotone", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let x = sample::half(rng, dim);
            let end = *x.core().breaks().last().expect("nonempty core");
            let mut breaks: Vec<f64> = x.core().breaks().to_vec();
            let mut values: Vec<Vec<f64>> = x.breakpoint_values().map(|(_, v)| v).collect();
            breaks.push(end + 3.0);
            values.push(x.limit().to_vec());
            let samples = GridFunction::new(dim, breaks, values)?;
            let a = x.limit();
            let eps = rng.gen_range(1e-3..1.0);
            let (n1, n2) = {
                let (u, v) = (rng.gen_range(0.0..end), rng.gen_range(0.0..end));
                (u.min(v), u.max(v))
            };
            let m1 = check_lambda_limit(&samples, a, eps, n1)?;
            let m2 = check_lambda_limit(&samples, a, eps, n2)?;
            let m3 = check_lambda_limit(&samples, a, 2.0 * eps, n1)?;
            let beyond = check_lambda_limit(&samples, a, eps, end)?;
            let err = [m2 - m1, m3 - m1, beyond, (m1 - (end - n1)).max(0.0)].into_iter().fold(0.0, f64::max);
            Ok(Observation::new(err, json!({ "x": x, "eps": eps, "n1": n1, "n2": n2 })))
        });
    }
}
