use rand::Rng;
use serde_json::json;

use super::{max_diff, Context, Observation, PropertySuite};
use crate::duals::{
    assemble_line_measure, from_extended, pair_extended, pair_line_measure_halves, pair_measure,
    pair_measure_line, to_extended, MeasureFunctional, MeasureFunctionalLine,
};
use crate::limcore::{join_line, split_line};
use crate::measures::{Atom, Compactified, MeasureDomain, SignedMeasure};
use crate::{sample, vecops, ExtendedReal};

pub struct RieszHalf;

fn functional(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, atoms_only: bool) -> crate::Result<MeasureFunctional> {
    let mu = sample::half_measure(rng, dim, atoms_only);
    MeasureFunctional::new(mu, sample::reals(rng, dim, 2.0))
}

/// Roughly `ulps` units in the last place at the scale of `values`.
fn ulp_scale(values: &[f64], ulps: f64) -> f64 {
    ulps * f64::EPSILON * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

impl PropertySuite for RieszHalf {
    fn name(&self) -> &'static str {
        "riesz-half"
    }

    fn summary(&self) -> &'static str {
        "measure representation on C_lim(R+), extended form, measures"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.sweep("extended-form-consistency", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=3);
            let f = functional(rng, dim, false)?;
            let x = sample::half(rng, dim);
            let a = pair_measure(&f, &x)?;
            let b = pair_extended(&to_extended(&f), &x)?;
            Ok(Observation::new((a - b).abs(), json!({ "f": f, "x": x })))
        });

        ctx.sweep("extended-round-trip", 0.0, n, |rng| {
            let dim = rng.gen_range(1..=3);
            let f = functional(rng, dim, false)?;
            let back = from_extended(&to_extended(&f))?;
            let same_measure = back.mu() == f.mu();
            // α passes through (α - m) + m, exact up to rounding of that sum
            let masses = f.mu().finite_mass();
            let slack = ulp_scale(&[f.alpha(), &masses[..]].concat(), 4.0);
            let alpha_err = (max_diff(back.alpha(), f.alpha()) - slack).max(0.0);
            let err = if same_measure { alpha_err } else { f64::INFINITY };
            Ok(Observation::new(err, json!({ "f": f, "back": back })))
        });

        ctx.sweep("total-variation-jordan", 1e-12, n, |rng| {
            let mu = sample::half_measure(rng, 1, false).reflect();
            let (pos, neg) = mu.jordan_decompose()?;
            let tv = mu.total_variation().total;
            let split = pos.mass()[0] + neg.mass()[0];
            let recombined = pos.lin_comb(1.0, &neg, -1.0)?;
            let x = sample::line(rng, 1);
            let err = [
                (tv - split).abs(),
                (mu.integrate(&x)? - recombined.integrate(&x)?).abs(),
                if pos.is_nonnegative() && neg.is_nonnegative() { 0.0 } else { f64::INFINITY },
            ]
            .into_iter()
            .fold(0.0, f64::max);
            Ok(Observation::new(err, json!({ "mu": mu })))
        });

        ctx.sweep("pairing-bilinear", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let (f, g) = (functional(rng, dim, false)?, functional(rng, dim, false)?);
            let (x, y) = (sample::half(rng, dim), sample::half(rng, dim));
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let z = x.lin_comb(a, &y, b)?;
            let in_x = pair_measure(&f, &z)? - a * pair_measure(&f, &x)? - b * pair_measure(&f, &y)?;
            let h = MeasureFunctional::new(
                f.mu().lin_comb(a, g.mu(), b)?,
                vecops::add(&vecops::scaled(f.alpha(), a), &vecops::scaled(g.alpha(), b)),
            )?;
            let in_f = pair_measure(&h, &x)? - a * pair_measure(&f, &x)? - b * pair_measure(&g, &x)?;
            Ok(Observation::new(in_x.abs().max(in_f.abs()), json!({ "f": f, "g": g, "x": x, "y": y, "a": a, "b": b })))
        });

        ctx.sweep("compactification-invariance-atoms", 1e-12, n, |rng| {
            let mut mu = sample::half_measure(rng, 1, true);
            if rng.gen_bool(0.5) {
                let w = rng.gen_range(-2.0..2.0);
                mu = mu.lin_comb(1.0, &SignedMeasure::atoms_only(MeasureDomain::Half, 1, vec![Atom::new(ExtendedReal::PosInf, vec![w])])?, 1.0)?;
            }
            let x = sample::half(rng, 1);
            let a = mu.integrate(&x)?;
            let b = mu.pushforward_compactify()?.integrate(&Compactified(&x))?;
            Ok(Observation::new((a - b).abs(), json!({ "mu": mu, "x": x })))
        });

        // densities are carried cell by cell, keeping each cell's mass
        ctx.sweep("compactification-preserves-mass", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let mu = sample::half_measure(rng, dim, false);
            let nu = mu.pushforward_compactify()?;
            let err = max_diff(&mu.mass(), &nu.mass())
                .max((mu.total_variation().total - nu.total_variation().total).abs());
            Ok(Observation::new(err, json!({ "mu": mu })))
        });
    }
}

pub struct RieszLine;

impl PropertySuite for RieszLine {
    fn name(&self) -> &'static str {
        "riesz-line"
    }

    fn summary(&self) -> &'static str {
        "line functionals, assembly from half-line pieces, splitting"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.sweep("assembly-measure-matches-halves", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let mu1 = sample::half_measure_off_zero(rng, dim, false);
            let mu2 = sample::half_measure(rng, dim, false);
            let alpha = sample::reals(rng, dim, 2.0);
            let f = assemble_line_measure(&mu1, &mu2, &alpha)?;
            let x = sample::line(rng, dim);
            let a = pair_measure_line(&f, &x)?;
            let b = pair_line_measure_halves(&mu1, &mu2, &alpha, &x)?;
            Ok(Observation::new((a - b).abs(), json!({ "mu1": mu1, "mu2": mu2, "alpha": alpha, "x": x })))
        });

        ctx.sweep("line-extended-form", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let mu = sample::half_measure(rng, dim, false).reflect();
            let mu = mu.lin_comb(1.0, &sample::half_measure(rng, dim, false).with_domain(MeasureDomain::Line)?, 1.0)?;
            let f = MeasureFunctionalLine::new(mu, sample::reals(rng, dim, 2.0), sample::reals(rng, dim, 2.0))?;
            let x = sample::line(rng, dim);
            let err = (pair_measure_line(&f, &x)? - pair_extended(&f.to_extended(), &x)?).abs();
            Ok(Observation::new(err, json!({ "f": f, "x": x })))
        });

        ctx.sweep("delta-zero-reads-x0", 0.0, n, |rng| {
            let x = sample::line(rng, 1);
            let f = MeasureFunctionalLine::new(SignedMeasure::dirac(MeasureDomain::Line, 0.0, vec![1.0])?, vec![0.0], vec![0.0])?;
            Ok(Observation::new((pair_measure_line(&f, &x)? - x.value_at_zero()[0]).abs(), json!({ "x": x })))
        });

        ctx.sweep("split-join-round-trip", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=2);
            let x = sample::line(rng, dim);
            let (x1, x2) = split_line(&x, false);
            let plain = join_line(&x1, &x2, &[], false)?;
            let mut err = if plain == x { 0.0 } else { f64::INFINITY };
            if x.is_continuous() {
                let (c1, c2) = split_line(&x, true);
                let back = join_line(&c1, &c2, &x.value_at_zero(), true)?;
                let diff = max_diff(back.limit_neg(), x.limit_neg()).max(max_diff(back.limit_pos(), x.limit_pos()));
                let cores = back.neg_core() == x.neg_core() && back.pos_core() == x.pos_core();
                err = err.max(if cores { diff } else { f64::INFINITY });
            }
            Ok(Observation::new(err, json!({ "x": x })))
        });
    }
}
