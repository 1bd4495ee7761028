//! Functions and sequences converging at infinity.
//!
//! Every element is stored as `core + limit`: the core is a compactly
//! supported piecewise-linear function (or a finite sequence head) and the
//! limit vector carries all behaviour at infinity.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::measures::{Integrand, MeasureDomain};
use crate::piecewise::{self, GridFunction, Piecewise, StepFunction};
use crate::vecops;

const CONTINUITY_TOL: f64 = 1e-12;

fn check_half_core(core: &GridFunction) -> Result<()> {
    if core.is_empty() {
        return Ok(());
    }
    if core.breaks()[0] != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "half-line core must start at 0, starts at {}",
            core.breaks()[0]
        )));
    }
    if vecops::norm_inf(&core.last_value()) != 0.0 {
        return Err(Error::InvalidGrid("core must vanish at its last breakpoint".into()));
    }
    Ok(())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `x(t) = x₀(t) + a` on `[0, inf)`, with `x(inf) = a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHalf", into = "RawHalf")]
pub struct LimFunctionHalf {
    core: GridFunction,
    limit: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawHalf {
    #[serde(default)]
    breaks: Vec<f64>,
    #[serde(default)]
    values: Vec<Vec<f64>>,
    limit: Vec<f64>,
}

impl TryFrom<RawHalf> for LimFunctionHalf {
    type Error = Error;

    fn try_from(raw: RawHalf) -> Result<Self> {
        let core = GridFunction::new(raw.limit.len(), raw.breaks, raw.values)?;
        LimFunctionHalf::new(core, raw.limit)
    }
}

impl From<LimFunctionHalf> for RawHalf {
    fn from(x: LimFunctionHalf) -> Self {
        RawHalf {
            breaks: x.core.breaks().to_vec(),
            values: x.core.values().to_vec(),
            limit: x.limit,
        }
    }
}

impl LimFunctionHalf {
    /// The core must start at `t = 0` and vanish at its last breakpoint.
    pub fn new(core: GridFunction, limit: Vec<f64>) -> Result<Self> {
        check_dim(core.dim(), limit.len())?;
        check_half_core(&core)?;
        if let Some(bad) = limit.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*bad));
        }
        Ok(LimFunctionHalf { core, limit })
    }

    pub fn constant(limit: Vec<f64>) -> Self {
        LimFunctionHalf { core: GridFunction::zero(limit.len()), limit }
    }

    /// A compactly supported function (`a = 0`).
    pub fn from_core(core: GridFunction) -> Result<Self> {
        let dim = core.dim();
        LimFunctionHalf::new(core, vec![0.0; dim])
    }

    pub fn core(&self) -> &GridFunction {
        &self.core
    }

    pub fn limit(&self) -> &[f64] {
        &self.limit
    }

    pub fn dim(&self) -> usize {
        self.limit.len()
    }

    pub fn eval(&self, t: ExtendedReal) -> Result<Vec<f64>> {
        match t {
            ExtendedReal::PosInf => Ok(self.limit.clone()),
            ExtendedReal::Finite(s) if s >= 0.0 => Ok(vecops::add(&self.core.eval(s), &self.limit)),
            other => Err(Error::DomainMismatch(format!("{other} is not in [0, inf]"))),
        }
    }

    /// `x - x(inf)`, i.e. the core as an element with zero limit.
    pub fn shifted(&self) -> LimFunctionHalf {
        LimFunctionHalf { core: self.core.clone(), limit: vec![0.0; self.dim()] }
    }

    pub fn scale(&self, c: f64) -> LimFunctionHalf {
        LimFunctionHalf { core: self.core.scale(c), limit: vecops::scaled(&self.limit, c) }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &LimFunctionHalf, b: f64) -> Result<LimFunctionHalf> {
        check_dim(self.dim(), other.dim())?;
        let core = self.core.lin_comb(a, &other.core, b)?;
        let mut limit = vecops::scaled(&self.limit, a);
        vecops::axpy(&mut limit, b, &other.limit);
        LimFunctionHalf::new(core, limit)
    }

    pub fn sub(&self, other: &LimFunctionHalf) -> Result<LimFunctionHalf> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Values `x(t_i)` at the core breakpoints.
    pub fn breakpoint_values(&self) -> impl Iterator<Item = (f64, Vec<f64>)> + '_ {
        self.core
            .breaks()
            .iter()
            .zip(self.core.values())
            .map(|(&t, v)| (t, vecops::add(v, &self.limit)))
    }
}

impl Integrand for LimFunctionHalf {
    fn dim(&self) -> usize {
        self.limit.len()
    }

    fn accepts(&self, domain: MeasureDomain) -> bool {
        domain == MeasureDomain::Half
    }

    fn describe(&self) -> &'static str {
        "half-line"
    }

    fn value_at(&self, t: ExtendedReal) -> Result<Vec<f64>> {
        self.eval(t)
    }

    fn pair_density(&self, density: &StepFunction) -> Result<f64> {
        Ok(piecewise::inner(&self.core, density) + vecops::dot(&self.limit, &density.integral()))
    }
}

/// A function on the whole line converging at `±inf`:
/// `x(t) = x₀(t) + a₁` for `t < 0` and `x₀(t) + a₂` for `t >= 0`.
///
/// The core is held as its two halves `t -> x₀(-t)` and `t -> x₀(t)` on
/// `[0, inf)`, so the core may jump at the switch point 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLine", into = "RawLine")]
pub struct LimFunctionLine {
    neg: GridFunction,
    pos: GridFunction,
    limit_neg: Vec<f64>,
    limit_pos: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawLine {
    #[serde(default)]
    breaks: Vec<f64>,
    #[serde(default)]
    values: Vec<Vec<f64>>,
    limit_neg: Vec<f64>,
    limit: Vec<f64>,
    /// Core value just left of 0, when the core jumps there.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left_at_zero: Option<Vec<f64>>,
}

impl TryFrom<RawLine> for LimFunctionLine {
    type Error = Error;

    fn try_from(raw: RawLine) -> Result<Self> {
        let dim = raw.limit.len();
        let core = GridFunction::new(dim, raw.breaks, raw.values)?;
        let mut x = LimFunctionLine::from_core(core, raw.limit_neg, raw.limit)?;
        if let Some(left) = raw.left_at_zero {
            check_dim(dim, left.len())?;
            if x.neg.breaks().first() != Some(&0.0) {
                return Err(Error::InvalidGrid("left_at_zero needs core support left of 0".into()));
            }
            let mut values = x.neg.values().to_vec();
            values[0] = left;
            x.neg = GridFunction::new(dim, x.neg.breaks().to_vec(), values)?;
        }
        Ok(x)
    }
}

impl From<LimFunctionLine> for RawLine {
    fn from(x: LimFunctionLine) -> Self {
        let left = x.neg.first_value();
        let right = x.pos.first_value();
        let jump = !x.neg.is_empty() && !x.pos.is_empty() && left != right;
        let mut breaks: Vec<f64> = x.neg.breaks().iter().rev().map(|t| -t).collect();
        let mut values: Vec<Vec<f64>> = x.neg.values().iter().rev().cloned().collect();
        if !x.pos.is_empty() {
            if breaks.last() == Some(&0.0) {
                breaks.pop();
                values.pop();
            }
            breaks.extend_from_slice(x.pos.breaks());
            values.extend_from_slice(x.pos.values());
        }
        RawLine {
            breaks,
            values,
            limit_neg: x.limit_neg,
            limit: x.limit_pos,
            left_at_zero: if jump { Some(left) } else { None },
        }
    }
}

impl LimFunctionLine {
    /// From the two half-line cores `t -> x₀(-t)` and `t -> x₀(t)`.
    pub fn from_halves(
        neg: GridFunction,
        pos: GridFunction,
        limit_neg: Vec<f64>,
        limit_pos: Vec<f64>,
    ) -> Result<Self> {
        check_dim(limit_pos.len(), limit_neg.len())?;
        check_dim(limit_pos.len(), neg.dim())?;
        check_dim(limit_pos.len(), pos.dim())?;
        check_half_core(&neg)?;
        check_half_core(&pos)?;
        Ok(LimFunctionLine { neg, pos, limit_neg, limit_pos })
    }

    /// From a core on the real line. The core must vanish at both ends of its
    /// support, except that a support starting exactly at 0 may start nonzero.
    pub fn from_core(core: GridFunction, limit_neg: Vec<f64>, limit_pos: Vec<f64>) -> Result<Self> {
        let dim = core.dim();
        let (neg, pos) = match core.support() {
            None => (GridFunction::zero(dim), GridFunction::zero(dim)),
            Some((lo, _)) => {
                if lo != 0.0 && vecops::norm_inf(&core.first_value()) != 0.0 {
                    return Err(Error::InvalidGrid(
                        "line core must vanish at its first breakpoint unless it starts at 0".into(),
                    ));
                }
                (
                    core.restrict(f64::NEG_INFINITY, 0.0).reflect(),
                    core.restrict(0.0, f64::INFINITY),
                )
            }
        };
        LimFunctionLine::from_halves(neg, pos, limit_neg, limit_pos)
    }

    pub fn dim(&self) -> usize {
        self.limit_pos.len()
    }

    pub fn neg_core(&self) -> &GridFunction {
        &self.neg
    }

    pub fn pos_core(&self) -> &GridFunction {
        &self.pos
    }

    pub fn limit_neg(&self) -> &[f64] {
        &self.limit_neg
    }

    pub fn limit_pos(&self) -> &[f64] {
        &self.limit_pos
    }

    pub fn eval(&self, t: ExtendedReal) -> Vec<f64> {
        match t {
            ExtendedReal::NegInf => self.limit_neg.clone(),
            ExtendedReal::PosInf => self.limit_pos.clone(),
            ExtendedReal::Finite(s) if s < 0.0 => vecops::add(&self.neg.eval(-s), &self.limit_neg),
            ExtendedReal::Finite(s) => vecops::add(&self.pos.eval(s), &self.limit_pos),
        }
    }

    /// `x(0)`, taken from the right.
    pub fn value_at_zero(&self) -> Vec<f64> {
        self.eval(ExtendedReal::Finite(0.0))
    }

    pub fn left_limit_at_zero(&self) -> Vec<f64> {
        vecops::add(&self.neg.eval(0.0), &self.limit_neg)
    }

    /// No jump at the switch point (the halves are continuous by construction).
    pub fn is_continuous(&self) -> bool {
        let gap = vecops::sub(&self.left_limit_at_zero(), &self.value_at_zero());
        vecops::norm_inf(&gap) <= CONTINUITY_TOL
    }

    /// All breakpoints on the real line, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.neg.breaks().iter().map(|t| -t).collect();
        out.extend_from_slice(self.pos.breaks());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

impl Integrand for LimFunctionLine {
    fn dim(&self) -> usize {
        self.limit_pos.len()
    }

    fn accepts(&self, domain: MeasureDomain) -> bool {
        domain == MeasureDomain::Line
    }

    fn describe(&self) -> &'static str {
        "line"
    }

    fn value_at(&self, t: ExtendedReal) -> Result<Vec<f64>> {
        Ok(self.eval(t))
    }

    fn pair_density(&self, density: &StepFunction) -> Result<f64> {
        let left = density.restrict(f64::NEG_INFINITY, 0.0).reflect();
        let right = density.restrict(0.0, f64::INFINITY);
        Ok(piecewise::inner(&self.neg, &left)
            + vecops::dot(&self.limit_neg, &left.integral())
            + piecewise::inner(&self.pos, &right)
            + vecops::dot(&self.limit_pos, &right.integral()))
    }
}

/// `x_n = x⁰_n + a` with `x⁰_n = 0` beyond the head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimSequence {
    pub head: Vec<f64>,
    pub limit: f64,
}

impl LimSequence {
    pub fn new(head: Vec<f64>, limit: f64) -> Self {
        LimSequence { head, limit }
    }

    /// `x_n` for `n >= 1`.
    pub fn get(&self, n: usize) -> f64 {
        assert!(n >= 1, "sequences are indexed from 1");
        self.head.get(n - 1).copied().unwrap_or(0.0) + self.limit
    }
}

/// How the core norm and the limit norm combine on `X = X₀ ⊕ Rⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CompositeNorm {
    /// `(‖x₀‖^p + ‖a‖^p)^{1/p}`
    PComposite { p: f64 },
    /// `‖x₀‖ + ‖a‖`
    Sum,
    /// `max(‖x₀‖, ‖a‖)`
    Max,
}

impl CompositeNorm {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CompositeNorm::PComposite { p } if !(p >= 1.0) || p.is_infinite() => {
                Err(Error::InvalidExponent(p))
            }
            _ => Ok(()),
        }
    }

    pub fn combine(&self, core: f64, limit: f64) -> f64 {
        match *self {
            CompositeNorm::PComposite { p } if p == 1.0 => core + limit,
            CompositeNorm::PComposite { p } if p == 2.0 => core.hypot(limit),
            CompositeNorm::PComposite { p } => (core.powf(p) + limit.powf(p)).powf(1.0 / p),
            CompositeNorm::Sum => core + limit,
            CompositeNorm::Max => core.max(limit),
        }
    }

    /// The composite rule of the dual norm: `q`-composite for `p`-composite,
    /// max for sum and sum for max.
    pub fn dual(&self) -> CompositeNorm {
        match *self {
            CompositeNorm::PComposite { p } if p == 1.0 => CompositeNorm::Max,
            CompositeNorm::PComposite { p } => {
                CompositeNorm::PComposite { p: vecops::conjugate_exponent(p) }
            }
            CompositeNorm::Sum => CompositeNorm::Max,
            CompositeNorm::Max => CompositeNorm::Sum,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CompositeNorm::PComposite { p } => format!("p-composite({p})"),
            CompositeNorm::Sum => "sum".into(),
            CompositeNorm::Max => "max".into(),
        }
    }
}

/// Norm on the core space `X₀`: sup norm (continuous functions) or `L_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoreNorm {
    Sup,
    Lp { p: f64 },
}

impl CoreNorm {
    pub fn of(&self, core: &GridFunction) -> Result<f64> {
        match *self {
            CoreNorm::Sup => Ok(core.max_norm()),
            CoreNorm::Lp { p } => piecewise::lp_norm(core, p),
        }
    }

    /// The norm applied to a finite sequence head (`Sup` is the max norm).
    pub fn of_sequence(&self, head: &[f64]) -> Result<f64> {
        match *self {
            CoreNorm::Sup => Ok(vecops::norm_inf(head)),
            CoreNorm::Lp { p } if p >= 1.0 => Ok(vecops::norm_p(head, p)),
            CoreNorm::Lp { p } => Err(Error::InvalidExponent(p)),
        }
    }
}

/// `sup_{t in [0, inf]} ‖x(t)‖`, attained at a breakpoint or at infinity.
pub fn sup_norm(x: &LimFunctionHalf) -> f64 {
    x.breakpoint_values()
        .map(|(_, v)| vecops::norm2(&v))
        .fold(vecops::norm2(x.limit()), f64::max)
}

/// Composite norm `‖x‖_X` built from a core norm and the Euclidean norm of the limit.
pub fn x_norm(x: &LimFunctionHalf, composite: CompositeNorm, core: CoreNorm) -> Result<f64> {
    composite.validate()?;
    Ok(composite.combine(core.of(x.core())?, vecops::norm2(x.limit())))
}

/// Sup norm against the sum-composite norm with sup-norm core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEquivalence {
    pub sup_norm: f64,
    pub composite_norm: f64,
    /// `composite_norm / sup_norm`, defined as 1 for the zero function.
    pub ratio: f64,
}

impl NormEquivalence {
    /// `1 <= ratio <= 3`.
    pub fn holds(&self) -> bool {
        (1.0..=3.0).contains(&self.ratio)
    }
}

pub fn check_norm_equivalence(x: &LimFunctionHalf) -> NormEquivalence {
    let sup = sup_norm(x);
    let composite = x.core().max_norm() + vecops::norm2(x.limit());
    let ratio = if sup == 0.0 { 1.0 } else { composite / sup };
    NormEquivalence { sup_norm: sup, composite_norm: composite, ratio }
}

/// `(x(-t), x(t))`, or `(x(-t) - x(0), x(t) - x(0))` when `continuous`.
pub fn split_line(x: &LimFunctionLine, continuous: bool) -> (LimFunctionHalf, LimFunctionHalf) {
    let shift = if continuous { x.value_at_zero() } else { vec![0.0; x.dim()] };
    let x1 = LimFunctionHalf {
        core: x.neg.clone(),
        limit: vecops::sub(&x.limit_neg, &shift),
    };
    let x2 = LimFunctionHalf {
        core: x.pos.clone(),
        limit: vecops::sub(&x.limit_pos, &shift),
    };
    (x1, x2)
}

/// Inverse of [`split_line`]. The continuous variant needs `x1(0) = x2(0) = 0`
/// and the value `x(0)` that was subtracted.
pub fn join_line(
    x1: &LimFunctionHalf,
    x2: &LimFunctionHalf,
    x_at_0: &[f64],
    continuous: bool,
) -> Result<LimFunctionLine> {
    check_dim(x1.dim(), x2.dim())?;
    let shift = if continuous {
        check_dim(x1.dim(), x_at_0.len())?;
        for (name, x) in [("x1", x1), ("x2", x2)] {
            let v = x.eval(ExtendedReal::Finite(0.0))?;
            if vecops::norm_inf(&v) > CONTINUITY_TOL {
                return Err(Error::Continuity(format!("{name}(0) = {v:?}, expected 0")));
            }
        }
        x_at_0.to_vec()
    } else {
        vec![0.0; x1.dim()]
    };
    LimFunctionLine::from_halves(
        x1.core.clone(),
        x2.core.clone(),
        vecops::add(&x1.limit, &shift),
        vecops::add(&x2.limit, &shift),
    )
}

/// Lebesgue measure of `{t in [n, T] : ‖x(t) - a‖ >= eps}` for the linear
/// interpolant of `samples` on `[t_0, T]`, by exact root finding on each piece.
pub fn check_lambda_limit(samples: &GridFunction, a: &[f64], eps: f64, n: f64) -> Result<f64> {
    check_dim(samples.dim(), a.len())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let Some((t0, t_end)) = samples.support() else { return Ok(0.0) };
    if !(n >= 0.0 && n <= t_end) {
        return Err(Error::InvalidArgument(format!("N = {n} outside [0, {t_end}]")));
    }
    let lo = n.max(t0);
    let knots = piecewise::merge_knots(samples.breaks(), &[], lo, t_end);
    let mut total = 0.0;
    for w in knots.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (va, vb) = samples.piece(l, r);
        let u = vecops::sub(&va, a);
        let d = vecops::sub(&vb, &va);
        total += (r - l) * violation_fraction(&u, &d, eps);
    }
    Ok(total)
}

/// Length of `{s in [0, 1] : ‖u + s d‖ >= eps}`.
fn violation_fraction(u: &[f64], d: &[f64], eps: f64) -> f64 {
    let qa = vecops::dot(d, d);
    let qb = 2.0 * vecops::dot(u, d);
    let qc = vecops::dot(u, u) - eps * eps;
    if qa == 0.0 {
        return if qc >= 0.0 { 1.0 } else { 0.0 };
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        // q >= 0 everywhere (touching the threshold at most at one point)
        return 1.0;
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (qb + qb.signum() * sq);
    let (mut r1, mut r2) = if qq == 0.0 {
        (-sq / (2.0 * qa), sq / (2.0 * qa))
    } else {
        (qq / qa, qc / qq)
    };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    // inside (r1, r2) the norm is below eps
    let inside = (r2.min(1.0) - r1.max(0.0)).max(0.0);
    1.0 - inside
}

/// A scalar function handle.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `z_n = z + 2|z(2n)| (t - (2n-1)) ((2n+1) - t)` on `[2n-1, 2n+1]`, `z`
/// elsewhere: a sup-norm-small perturbation of a strictly negative `z` that
/// leaves the nonpositive cone.
#[derive(Clone)]
pub struct Perturbation {
    z: ScalarFn,
    n: u32,
    height: f64,
}

impl Perturbation {
    pub fn n(&self) -> u32 {
        self.n
    }

    fn bump(&self, t: f64) -> f64 {
        let (lo, hi) = (2.0 * self.n as f64 - 1.0, 2.0 * self.n as f64 + 1.0);
        if t < lo || t > hi {
            0.0
        } else {
            self.height * (t - lo) * (hi - t)
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.z)(t) + self.bump(t)
    }

    /// `sup |z_n - z|`, attained at `t = 2n`.
    pub fn sup_dist(&self) -> f64 {
        self.bump(2.0 * self.n as f64)
    }

    /// `z_n(2n)`; positive whenever `z(2n) < 0`.
    pub fn witness(&self) -> f64 {
        self.eval(2.0 * self.n as f64)
    }

    pub fn as_fn(&self) -> ScalarFn {
        let me = self.clone();
        Arc::new(move |t| me.eval(t))
    }
}

pub fn degenerate_perturbation(z: ScalarFn, n: u32) -> Result<Perturbation> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let height = 2.0 * z(2.0 * n as f64).abs();
    Ok(Perturbation { z, n, height })
}
