//! The sup functional `f(x) = max_{t in [0, inf]} x(t)` on scalar `C_lim`,
//! its subdifferential and the nonpositive cone.

use serde::{Deserialize, Serialize};

use crate::duals::{pair_extended, ExtendedMeasureFunctional};
use crate::error::{Error, Result};
use crate::limcore::{LimFunctionHalf, ScalarFn};
use crate::measures::{MeasureDomain, SignedMeasure};
use crate::piecewise::GridFunction;
use crate::ExtendedReal;

pub const ARGMAX_TOL: f64 = 1e-9;
pub const SUBGRADIENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupValue {
    pub value: f64,
    /// Maximizers within [`ARGMAX_TOL`], ascending, `inf` last.
    pub argmax: Vec<ExtendedReal>,
}

fn sup_over(points: impl IntoIterator<Item = (ExtendedReal, f64)>) -> SupValue {
    let mut points: Vec<(ExtendedReal, f64)> = points.into_iter().collect();
    points.sort_by(|a, b| a.0.cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    let value = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let argmax = points.iter().filter(|p| value - p.1 <= ARGMAX_TOL).map(|p| p.0).collect();
    SupValue { value, argmax }
}

fn scalar(x: &LimFunctionHalf) -> Result<()> {
    if x.dim() == 1 {
        Ok(())
    } else {
        Err(Error::NotScalar(x.dim()))
    }
}

/// Maximum over the breakpoints, `t = 0` and `t = inf`; a piecewise-linear
/// function attains its max at one of them.
pub fn sup_functional(x: &LimFunctionHalf) -> Result<SupValue> {
    scalar(x)?;
    let a = x.limit()[0];
    let points = x
        .breakpoint_values()
        .map(|(t, v)| (ExtendedReal::finite(t), v[0]))
        .chain([(ExtendedReal::finite(0.0), x.eval(ExtendedReal::finite(0.0))?[0]), (ExtendedReal::PosInf, a)]);
    Ok(sup_over(points))
}

/// `{δ_t : t in argmax}`; the subdifferential is their closed convex hull.
pub fn subdifferential_extreme_points(x: &LimFunctionHalf) -> Result<Vec<ExtendedMeasureFunctional>> {
    sup_functional(x)?
        .argmax
        .into_iter()
        .map(|t| ExtendedMeasureFunctional::new(SignedMeasure::dirac(MeasureDomain::Half, t, vec![1.0])?))
        .collect()
}

/// `f(y) >= f(x) + <μ, y - x>` within [`SUBGRADIENT_TOL`].
pub fn subgradient_check(mu: &ExtendedMeasureFunctional, x: &LimFunctionHalf, y: &LimFunctionHalf) -> Result<bool> {
    Ok(subgradient_slack(mu, x, y)? >= -SUBGRADIENT_TOL)
}

/// `f(y) - f(x) - <μ, y - x>`.
pub fn subgradient_slack(mu: &ExtendedMeasureFunctional, x: &LimFunctionHalf, y: &LimFunctionHalf) -> Result<f64> {
    let d = y.sub(x)?;
    Ok(sup_functional(y)?.value - sup_functional(x)?.value - pair_extended(mu, &d)?)
}

/// For `δ_t` with `t` outside the argmax of `x`, a `y` violating the
/// subgradient inequality: `x` plus a narrow bump at `t`, or for `t = inf`
/// the limit raised while `x` is kept on the core support.
pub fn subgradient_counterexample(x: &LimFunctionHalf, t: ExtendedReal) -> Result<Option<LimFunctionHalf>> {
    let sup = sup_functional(x)?;
    if sup.argmax.contains(&t) {
        return Ok(None);
    }
    let xt = x.eval(t)?[0];
    let gap = sup.value - xt;
    if gap <= 0.0 {
        return Ok(None);
    }
    let h = 0.5 * gap;
    let bump = match t {
        ExtendedReal::Finite(s) => {
            let slope = x
                .core()
                .breaks()
                .windows(2)
                .zip(x.core().values().windows(2))
                .map(|(b, v)| ((v[1][0] - v[0][0]) / (b[1] - b[0])).abs())
                .fold(0.0, f64::max);
            let width = if slope > 0.0 { (gap / (4.0 * slope)).min(1.0) } else { 1.0 };
            let points = if s == 0.0 {
                vec![(0.0, 1.0), (width, 0.0)]
            } else if s <= width {
                vec![(0.0, 1.0 - s / width), (s, 1.0), (s + width, 0.0)]
            } else {
                vec![(0.0, 0.0), (s - width, 0.0), (s, 1.0), (s + width, 0.0)]
            };
            LimFunctionHalf::new(GridFunction::from_points(&points)?, vec![0.0])?
        }
        ExtendedReal::PosInf => {
            let end = x.core().breaks().last().copied().unwrap_or(0.0);
            let points = if end > 0.0 { vec![(0.0, -1.0), (end, -1.0), (end + 1.0, 0.0)] } else { vec![(0.0, -1.0), (1.0, 0.0)] };
            LimFunctionHalf::new(GridFunction::from_points(&points)?, vec![1.0])?
        }
        ExtendedReal::NegInf => return Err(Error::DomainMismatch("-inf is not in [0, inf]".into())),
    };
    let y = x.lin_comb(1.0, &bump, h)?;
    let mu = ExtendedMeasureFunctional::new(SignedMeasure::dirac(MeasureDomain::Half, t, vec![1.0])?)?;
    Ok(if subgradient_check(&mu, x, &y)? { None } else { Some(y) })
}

/// `-f(x)`: positive exactly when `x` is interior to the nonpositive cone,
/// and then every sup-norm perturbation smaller than it stays in the cone.
pub fn cone_interior_margin(x: &LimFunctionHalf) -> Result<f64> {
    Ok(-sup_functional(x)?.value)
}

/// Subgradients of `f` at a strictly negative `z` vanishing at infinity that
/// satisfy `<μ, z> = f(z)`, in `C₀` (no point at infinity) and in `C_lim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyCheck {
    /// `sup z` over the sample points and the limit.
    pub sup: f64,
    /// Whether some finite sample attains the sup.
    pub c0_sup_attained: bool,
    /// Largest mass a nonnegative `μ` with `<μ, z> = f(z)` can carry in `C₀`.
    pub c0_max_mass: f64,
    pub c0_subgradient: SignedMeasure,
    pub clim_subgradients: Vec<ExtendedMeasureFunctional>,
    pub clim_total_variation: Vec<f64>,
    /// `<μ, z> - f(z)` for each `C_lim` subgradient.
    pub clim_residuals: Vec<f64>,
}

/// Samples `z` on `grid` and compares the two models. A nonnegative `μ` of
/// mass at most 1 meets `<μ, z> = sup z` only if it lives on the argmax; in
/// `C₀` that set is empty, in `C_lim` it is `{inf}`.
pub fn degeneracy_check(z: &ScalarFn, limit: f64, grid: &[f64]) -> Result<DegeneracyCheck> {
    if grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidGrid("sample points must be finite and nonnegative".into()));
    }
    let samples: Vec<(ExtendedReal, f64)> = grid.iter().map(|&t| (ExtendedReal::finite(t), z(t))).collect();
    let c0 = sup_over(samples.iter().copied());
    let sup = c0.value.max(limit);
    let c0_attained = samples.iter().any(|p| sup - p.1 <= ARGMAX_TOL);
    let mass = if c0_attained { 1.0 } else { 0.0 };
    let c0_atoms = samples
        .iter()
        .filter(|p| c0_attained && sup - p.1 <= ARGMAX_TOL)
        .take(1)
        .map(|p| crate::Atom::new(p.0, vec![1.0]))
        .collect();
    let c0_subgradient = SignedMeasure::atoms_only(MeasureDomain::Half, 1, c0_atoms)?;

    let clim = sup_over(samples.iter().copied().chain([(ExtendedReal::PosInf, limit)]));
    let mut subs = Vec::new();
    let mut tv = Vec::new();
    let mut residuals = Vec::new();
    for t in clim.argmax {
        let mu = SignedMeasure::dirac(MeasureDomain::Half, t, vec![1.0])?;
        tv.push(mu.total_variation().total);
        let at = if t == ExtendedReal::PosInf { limit } else { z(t.to_f64()) };
        residuals.push(at - clim.value);
        subs.push(ExtendedMeasureFunctional::new(mu)?);
    }
    Ok(DegeneracyCheck {
        sup,
        c0_sup_attained: c0_attained,
        c0_max_mass: mass,
        c0_subgradient,
        clim_subgradients: subs,
        clim_total_variation: tv,
        clim_residuals: residuals,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn half(points: &[(f64, f64)], a: f64) -> LimFunctionHalf {
        LimFunctionHalf::new(GridFunction::from_points(points).unwrap(), vec![a]).unwrap()
    }

    fn random_half(rng: &mut ChaCha8Rng) -> LimFunctionHalf {
        let k = rng.gen_range(1..6);
        let mut t = 0.0;
        let mut pts = Vec::new();
        for i in 0..=k {
            pts.push((t, if i == k { 0.0 } else { rng.gen_range(-2.0..2.0) }));
            t += rng.gen_range(0.2..1.5);
        }
        half(&pts, rng.gen_range(-2.0..2.0))
    }

    #[test]
    fn sup_examples() {
        let c = half(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 1.5);
        let s = sup_functional(&c).unwrap();
        assert_eq!(s.value, 1.5);
        assert_eq!(s.argmax, vec![0.0.into(), 1.0.into(), 2.0.into(), ExtendedReal::PosInf]);

        let neg = half(&[(0.0, -1.0), (1.0, -0.5), (2.0, 0.0)], 0.0);
        let s = sup_functional(&neg).unwrap();
        assert_eq!(s.value, 0.0);
        // the core returns to 0 at its last breakpoint, so t = 2 ties with inf
        assert_eq!(s.argmax, vec![2.0.into(), ExtendedReal::PosInf]);

        let peak = half(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)], 0.0);
        assert_eq!(sup_functional(&peak).unwrap(), SupValue { value: 2.0, argmax: vec![1.0.into()] });
    }

    #[test]
    fn strictly_negative_core_has_sup_at_infinity_only() {
        // x(t) = -1 + ramp reaching 0 only at infinity: core -1 on [0,1] with limit shifted
        let x = half(&[(0.0, -2.0), (1.0, -1.5), (3.0, 0.0)], -0.5);
        let s = sup_functional(&x).unwrap();
        assert_eq!(s.value, -0.5);
        assert_eq!(s.argmax, vec![3.0.into(), ExtendedReal::PosInf]);
        let lifted = x.lin_comb(1.0, &LimFunctionHalf::constant(vec![0.5]), 1.0).unwrap();
        assert_eq!(sup_functional(&lifted).unwrap().value, 0.0);
    }

    #[test]
    fn extreme_points_have_unit_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = random_half(&mut rng);
            for mu in subdifferential_extreme_points(&x).unwrap() {
                assert!(mu.mu_tilde.is_nonnegative());
                assert_eq!(mu.mu_tilde.total_variation().total, 1.0);
                for _ in 0..20 {
                    let y = random_half(&mut rng);
                    assert!(subgradient_check(&mu, &x, &y).unwrap());
                }
                assert!(subgradient_check(&mu, &x, &x).unwrap());
            }
        }
    }

    #[test]
    fn two_peaks_give_two_diracs() {
        let x = half(&[(0.0, 0.0), (1.0, 3.0), (2.0, 0.0), (3.0, 3.0), (4.0, 0.0)], 0.0);
        let e = subdifferential_extreme_points(&x).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].mu_tilde.atoms()[0].loc, 1.0.into());
        assert_eq!(e[1].mu_tilde.atoms()[0].loc, 3.0.into());
    }

    #[test]
    fn zero_function_admits_every_dirac() {
        let x = half(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)], 0.0);
        let e = subdifferential_extreme_points(&x).unwrap();
        assert_eq!(e.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let t = rng.gen_range(0.0..10.0);
            let mu = ExtendedMeasureFunctional::new(SignedMeasure::dirac(MeasureDomain::Half, t, vec![1.0]).unwrap()).unwrap();
            let y = random_half(&mut rng);
            assert!(subgradient_check(&mu, &x, &y).unwrap());
        }
    }

    #[test]
    fn non_argmax_dirac_has_counterexample() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = 0;
        for _ in 0..50 {
            let x = random_half(&mut rng);
            let sup = sup_functional(&x).unwrap();
            let candidates = x.core().breaks().iter().map(|t| ExtendedReal::finite(*t)).chain([ExtendedReal::finite(rng.gen_range(0.0..8.0)), ExtendedReal::PosInf]);
            for t in candidates {
                if sup.value - x.eval(t).unwrap()[0] <= ARGMAX_TOL {
                    continue;
                }
                let y = subgradient_counterexample(&x, t).unwrap().expect("counterexample");
                let mu = ExtendedMeasureFunctional::new(SignedMeasure::dirac(MeasureDomain::Half, t, vec![1.0]).unwrap()).unwrap();
                assert!(subgradient_slack(&mu, &x, &y).unwrap() < -1e-6);
                found += 1;
            }
        }
        assert!(found > 50);
    }

    #[test]
    fn cone_margin() {
        let minus_one = LimFunctionHalf::constant(vec![-1.0]);
        assert_eq!(cone_interior_margin(&minus_one).unwrap(), 1.0);
        let boundary = half(&[(0.0, -1.0), (2.0, 0.0)], 0.0);
        assert_eq!(cone_interior_margin(&boundary).unwrap(), 0.0);
        let bump = half(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.5), (3.0, 0.0)], 0.0);
        let moved = minus_one.lin_comb(1.0, &bump, 1.0).unwrap();
        assert!(sup_functional(&moved).unwrap().value < 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let x = random_half(&mut rng);
            let m = cone_interior_margin(&x).unwrap();
            if m <= 0.0 {
                continue;
            }
            let p = random_half(&mut rng);
            let pn = crate::limcore::sup_norm(&p);
            let p = p.scale(0.999 * m / pn);
            assert!(sup_functional(&x.lin_comb(1.0, &p, 1.0).unwrap()).unwrap().value < 0.0);
        }
    }

    #[test]
    fn degeneracy_of_c0() {
        let z: ScalarFn = Arc::new(|t| -1.0 / (1.0 + t));
        let grid: Vec<f64> = (0..=400).map(|i| f64::from(i) * 0.25).collect();
        let d = degeneracy_check(&z, 0.0, &grid).unwrap();
        assert_eq!(d.sup, 0.0);
        assert!(!d.c0_sup_attained);
        assert_eq!(d.c0_max_mass, 0.0);
        assert_eq!(d.c0_subgradient.total_variation().total, 0.0);
        assert_eq!(d.clim_subgradients.len(), 1);
        assert_eq!(d.clim_subgradients[0].mu_tilde.atom_at(ExtendedReal::PosInf), vec![1.0]);
        assert_eq!(d.clim_total_variation, vec![1.0]);
        assert_abs_diff_eq!(d.clim_residuals[0], 0.0);
    }

    #[test]
    fn vector_input_rejected() {
        let x = LimFunctionHalf::constant(vec![1.0, 2.0]);
        assert!(matches!(sup_functional(&x), Err(Error::NotScalar(2))));
    }
}
