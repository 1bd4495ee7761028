use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use super::{Context, Observation, PropertySuite};
use crate::convex::{
    cone_interior_margin, degeneracy_check, subdifferential_extreme_points, subgradient_counterexample,
    subgradient_slack, sup_functional, ARGMAX_TOL,
};
use crate::limcore::{degenerate_perturbation, sup_norm, ScalarFn};
use crate::{sample, ExtendedReal};

pub struct Convex;

pub(crate) fn z() -> ScalarFn {
    Arc::new(|t| -1.0 / (1.0 + t))
}

impl PropertySuite for Convex {
    fn name(&self) -> &'static str {
        "convex"
    }

    fn summary(&self) -> &'static str {
        "sup functional, subdifferential, nonpositive cone, degeneracy of C0"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.sweep("extreme-points-unit-mass", 0.0, n, |rng| {
            let x = sample::half(rng, 1);
            let mut err: f64 = 0.0;
            for mu in subdifferential_extreme_points(&x)? {
                let tv = mu.mu_tilde.total_variation().total;
                err = err.max((tv - 1.0).abs());
                if !mu.mu_tilde.is_nonnegative() {
                    err = f64::INFINITY;
                }
            }
            Ok(Observation::new(err, json!({ "x": x })))
        });

        ctx.sweep("subgradient-inequality", 1e-12, n, |rng| {
            let x = sample::half(rng, 1);
            let y = sample::half(rng, 1);
            let mut err: f64 = 0.0;
            for mu in subdifferential_extreme_points(&x)? {
                err = err.max(-subgradient_slack(&mu, &x, &y)?);
            }
            Ok(Observation::new(err, json!({ "x": x, "y": y })))
        });

        ctx.sweep("non-argmax-dirac-has-counterexample", 0.0, n, |rng| {
            let x = sample::half(rng, 1);
            let sup = sup_functional(&x)?;
            let t = if rng.gen_bool(0.2) { ExtendedReal::PosInf } else { ExtendedReal::finite(rng.gen_range(0.0..10.0)) };
            if sup.value - x.eval(t)?[0] <= ARGMAX_TOL {
                return Ok(Observation::new(0.0, json!({ "x": x, "t": t, "skipped": "argmax" })));
            }
            let found = subgradient_counterexample(&x, t)?;
            Ok(Observation::new(if found.is_some() { 0.0 } else { 1.0 }, json!({ "x": x, "t": t })))
        });

        ctx.sweep("cone-margin-ball-stays-in-cone", 0.0, n, |rng| {
            let x = sample::half(rng, 1);
            // push x below zero so the margin is usually positive
            let x = x.lin_comb(1.0, &crate::LimFunctionHalf::constant(vec![-sup_norm(&x) - 0.1]), 1.0)?;
            let margin = cone_interior_margin(&x)?;
            let p = sample::half(rng, 1);
            let pn = sup_norm(&p);
            if margin <= 0.0 || pn == 0.0 {
                return Ok(Observation::new(0.0, json!({ "x": x })));
            }
            let p = p.scale(rng.gen_range(0.0..0.999) * margin / pn);
            let moved = sup_functional(&x.lin_comb(1.0, &p, 1.0)?)?.value;
            Ok(Observation::new(if moved < 0.0 { 0.0 } else { 1.0 }, json!({ "x": x, "p": p, "margin": margin })))
        });

        ctx.single("c0-versus-clim-degeneracy", 0.0, || {
            let grid: Vec<f64> = (0..=4000).map(|i| f64::from(i) * 0.05).collect();
            let d = degeneracy_check(&z(), 0.0, &grid)?;
            let clim_ok = d.clim_subgradients.len() == 1
                && d.clim_subgradients[0].mu_tilde.atom_at(ExtendedReal::PosInf) == vec![1.0]
                && d.clim_total_variation == vec![1.0]
                && d.clim_residuals.iter().all(|r| *r == 0.0);
            let c0_ok = !d.c0_sup_attained && d.c0_max_mass == 0.0 && d.c0_subgradient.total_variation().total == 0.0;
            Ok(Observation::new(if clim_ok && c0_ok { 0.0 } else { 1.0 }, &d))
        });

        ctx.single("degeneracy-table", 0.0, || {
            let mut err: f64 = 0.0;
            let mut prev = f64::INFINITY;
            for k in 1..=50u32 {
                let p = degenerate_perturbation(z(), k)?;
                let expected = 2.0 / (1.0 + 2.0 * f64::from(k));
                err = err.max((p.sup_dist() - expected).abs() / expected / f64::EPSILON - 2.0).max(0.0);
                if !(p.sup_dist() < prev) || !(p.witness() > 0.0) {
                    err = f64::INFINITY;
                }
                prev = p.sup_dist();
            }
            Ok(Observation::new(err, json!({ "n_max": 50 })))
        });
    }
}
