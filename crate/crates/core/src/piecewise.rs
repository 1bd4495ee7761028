//! Piecewise-linear and piecewise-constant vector functions on the real line,
//! with exact quadrature for products and norms.
//!
//! Both representations are zero outside their breakpoint range. Integrals of
//! products reduce to integrals of quadratics on each merged cell and are
//! computed in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops;

/// Access to the polynomial pieces of a piecewise function.
pub trait Piecewise {
    fn dim(&self) -> usize;

    /// Breakpoints, strictly increasing. Empty for the zero function.
    fn knots(&self) -> &[f64];

    /// Endpoint values `(f(l+), f(r-))` of the affine piece active on `(l, r)`.
    /// The open interval must not contain a knot.
    fn piece(&self, l: f64, r: f64) -> (Vec<f64>, Vec<f64>);

    fn support(&self) -> Option<(f64, f64)> {
        let k = self.knots();
        if k.len() < 2 {
            None
        } else {
            Some((k[0], k[k.len() - 1]))
        }
    }
}

fn check_breaks(breaks: &[f64]) -> Result<()> {
    if let Some(bad) = breaks.iter().find(|t| !t.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("breakpoints must be strictly increasing".into()));
    }
    Ok(())
}

fn check_values(values: &[Vec<f64>], dim: usize) -> Result<()> {
    for v in values {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(*bad));
        }
    }
    Ok(())
}

/// Sorted union of two knot sets restricted to `[lo, hi]`, endpoints included.
pub(crate) fn merge_knots(a: &[f64], b: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = a
        .iter()
        .chain(b.iter())
        .copied()
        .filter(|&t| t >= lo && t <= hi)
        .chain([lo, hi])
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Continuous piecewise-linear vector function, linearly interpolated between
/// breakpoints and zero outside `[t_0, t_m]`.
///
/// Nonzero end values make the function jump at the support boundary; cores of
/// converging functions require the last value to vanish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridFunction {
    dim: usize,
    breaks: Vec<f64>,
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    breaks: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<RawGrid> for GridFunction {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        let dim = raw.values.first().map_or(1, Vec::len);
        GridFunction::new(dim, raw.breaks, raw.values)
    }
}

impl From<GridFunction> for RawGrid {
    fn from(g: GridFunction) -> Self {
        RawGrid { breaks: g.breaks, values: g.values }
    }
}

impl GridFunction {
    pub fn new(dim: usize, breaks: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if breaks.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} breakpoints but {} values",
                breaks.len(),
                values.len()
            )));
        }
        check_breaks(&breaks)?;
        check_values(&values, dim)?;
        Ok(GridFunction { dim, breaks, values })
    }

    /// Scalar convenience constructor.
    pub fn scalar(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        GridFunction::new(1, breaks, values.into_iter().map(|v| vec![v]).collect())
    }

    /// Scalar function from `(t, value)` pairs.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        GridFunction::scalar(
            points.iter().map(|p| p.0).collect(),
            points.iter().map(|p| p.1).collect(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        GridFunction { dim, breaks: Vec::new(), values: Vec::new() }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.breaks.is_empty()
    }

    pub fn first_value(&self) -> Vec<f64> {
        self.values.first().cloned().unwrap_or_else(|| vec![0.0; self.dim])
    }

    pub fn last_value(&self) -> Vec<f64> {
        self.values.last().cloned().unwrap_or_else(|| vec![0.0; self.dim])
    }

    /// Pointwise value; exact at breakpoints, zero outside the support.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let b = &self.breaks;
        if b.is_empty() || t < b[0] || t > b[b.len() - 1] {
            return vec![0.0; self.dim];
        }
        let i = b.partition_point(|&x| x <= t);
        // i >= 1 since t >= b[0]
        if b[i - 1] == t {
            return self.values[i - 1].clone();
        }
        let (t0, t1) = (b[i - 1], b[i]);
        let s = (t - t0) / (t1 - t0);
        vecops::lerp(&self.values[i - 1], &self.values[i], s)
    }

    /// `t -> f(-t)`.
    pub fn reflect(&self) -> GridFunction {
        GridFunction {
            dim: self.dim,
            breaks: self.breaks.iter().rev().map(|t| -t).collect(),
            values: self.values.iter().rev().cloned().collect(),
        }
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map_values(|v| vecops::scaled(v, c))
    }

    pub fn map_values(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> GridFunction {
        GridFunction {
            dim: self.dim,
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| f(v)).collect(),
        }
    }

    /// Restriction to `[lo, hi]`, inserting breakpoints at the cut points.
    pub fn restrict(&self, lo: f64, hi: f64) -> GridFunction {
        match self.support() {
            Some((a, b)) if lo < b && hi > a => {
                let (l, r) = (lo.max(a), hi.min(b));
                let knots = merge_knots(&self.breaks, &[], l, r);
                let mut values = Vec::with_capacity(knots.len());
                for (k, &t) in knots.iter().enumerate() {
                    // one-sided limits at the cut points
                    let v = if k == 0 && knots.len() > 1 {
                        self.piece(t, knots[1]).0
                    } else if k == knots.len() - 1 && k > 0 {
                        self.piece(knots[k - 1], t).1
                    } else {
                        self.eval(t)
                    };
                    values.push(v);
                }
                GridFunction { dim: self.dim, breaks: knots, values }
            }
            _ => GridFunction::zero(self.dim),
        }
    }

    /// `a * self + b * other` on the merged grid.
    ///
    /// Fails when the result would need a jump the grid cannot represent, that
    /// is when a support boundary of one operand falls strictly inside the
    /// other's support while carrying a nonzero value.
    pub fn lin_comb(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let (lo, hi) = match (self.support(), other.support()) {
            // single-point grids carry no mass
            (None, None) => return Ok(if self.breaks.is_empty() { other.scale(b) } else { self.scale(a) }),
            (Some(_), None) => return Ok(self.scale(a)),
            (None, Some(_)) => return Ok(other.scale(b)),
            (Some((a0, a1)), Some((b0, b1))) => (a0.min(b0), a1.max(b1)),
        };
        for (g, (s0, s1)) in [(self, self.support().unwrap()), (other, other.support().unwrap())] {
            let jump_inside = |t: f64, v: &[f64]| t > lo && t < hi && vecops::norm_inf(v) != 0.0;
            if jump_inside(s0, &g.values[0]) || jump_inside(s1, &g.values[g.values.len() - 1]) {
                return Err(Error::InvalidGrid(
                    "linear combination would create an interior jump".into(),
                ));
            }
        }
        let knots = merge_knots(&self.breaks, &other.breaks, lo, hi);
        let values = knots
            .iter()
            .map(|&t| {
                let mut v = self.eval(t);
                vecops::scale_in_place(&mut v, a);
                vecops::axpy(&mut v, b, &other.eval(t));
                v
            })
            .collect();
        Ok(GridFunction { dim: self.dim, breaks: knots, values })
    }

    /// Piecewise-constant derivative on the interior of the support. Boundary
    /// jumps are not included.
    pub fn derivative(&self) -> StepFunction {
        if self.breaks.len() < 2 {
            return StepFunction::zero(self.dim);
        }
        let values = self
            .breaks
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| {
                let h = t[1] - t[0];
                v[1].iter().zip(&v[0]).map(|(b, a)| (b - a) / h).collect()
            })
            .collect();
        StepFunction { dim: self.dim, breaks: self.breaks.clone(), values }
    }

    /// Maximum Euclidean norm over the breakpoints (the sup norm of the
    /// interpolant on its support).
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| vecops::norm2(v)).fold(0.0, f64::max)
    }
}

impl Piecewise for GridFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn knots(&self) -> &[f64] {
        &self.breaks
    }

    fn piece(&self, l: f64, r: f64) -> (Vec<f64>, Vec<f64>) {
        let b = &self.breaks;
        let m = 0.5 * (l + r);
        if b.len() < 2 || m < b[0] || m > b[b.len() - 1] {
            return (vec![0.0; self.dim], vec![0.0; self.dim]);
        }
        let i = b.partition_point(|&x| x <= m).clamp(1, b.len() - 1);
        let (t0, t1) = (b[i - 1], b[i]);
        let (v0, v1) = (&self.values[i - 1], &self.values[i]);
        let at = |t: f64| {
            if t == t0 {
                v0.clone()
            } else if t == t1 {
                v1.clone()
            } else {
                vecops::lerp(v0, v1, (t - t0) / (t1 - t0))
            }
        };
        (at(l), at(r))
    }
}

/// Piecewise-constant vector function: `values[i]` on `[breaks[i], breaks[i+1])`,
/// zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct StepFunction {
    dim: usize,
    breaks: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<RawGrid> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        let dim = raw.values.first().map_or(1, Vec::len);
        StepFunction::new(dim, raw.breaks, raw.values)
    }
}

impl From<StepFunction> for RawGrid {
    fn from(g: StepFunction) -> Self {
        RawGrid { breaks: g.breaks, values: g.values }
    }
}

impl StepFunction {
    pub fn new(dim: usize, breaks: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let cells = breaks.len().saturating_sub(1);
        if values.len() != cells {
            return Err(Error::InvalidGrid(format!(
                "{} breakpoints need {} cell values, got {}",
                breaks.len(),
                cells,
                values.len()
            )));
        }
        check_breaks(&breaks)?;
        check_values(&values, dim)?;
        let breaks = if values.is_empty() { Vec::new() } else { breaks };
        Ok(StepFunction { dim, breaks, values })
    }

    pub fn scalar(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        StepFunction::new(1, breaks, values.into_iter().map(|v| vec![v]).collect())
    }

    /// Constant `value` on `[lo, hi)`.
    pub fn constant(lo: f64, hi: f64, value: Vec<f64>) -> Result<Self> {
        StepFunction::new(value.len(), vec![lo, hi], vec![value])
    }

    pub fn zero(dim: usize) -> Self {
        StepFunction { dim, breaks: Vec::new(), values: Vec::new() }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let b = &self.breaks;
        if b.len() < 2 || t < b[0] || t >= b[b.len() - 1] {
            return vec![0.0; self.dim];
        }
        let i = b.partition_point(|&x| x <= t);
        self.values[i - 1].clone()
    }

    /// Componentwise integral over the real line.
    pub fn integral(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (t, v) in self.breaks.windows(2).zip(&self.values) {
            vecops::axpy(&mut out, t[1] - t[0], v);
        }
        out
    }

    /// Componentwise `∫|f_j|`.
    pub fn abs_integral(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (t, v) in self.breaks.windows(2).zip(&self.values) {
            let h = t[1] - t[0];
            for (o, x) in out.iter_mut().zip(v) {
                *o += h * x.abs();
            }
        }
        out
    }

    pub fn reflect(&self) -> StepFunction {
        StepFunction {
            dim: self.dim,
            breaks: self.breaks.iter().rev().map(|t| -t).collect(),
            values: self.values.iter().rev().cloned().collect(),
        }
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        self.map_values(|v| vecops::scaled(v, c))
    }

    pub fn map_values(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> StepFunction {
        StepFunction {
            dim: self.dim,
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| f(v)).collect(),
        }
    }

    /// Restriction to `[lo, hi)`.
    pub fn restrict(&self, lo: f64, hi: f64) -> StepFunction {
        match self.support() {
            Some((a, b)) if lo < b && hi > a => {
                let knots = merge_knots(&self.breaks, &[], lo.max(a), hi.min(b));
                let values = knots
                    .windows(2)
                    .map(|w| self.piece(w[0], w[1]).0)
                    .collect();
                StepFunction { dim: self.dim, breaks: knots, values }
            }
            _ => StepFunction::zero(self.dim),
        }
    }

    /// `a * self + b * other` on the merged grid.
    pub fn lin_comb(&self, a: f64, other: &StepFunction, b: f64) -> Result<StepFunction> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let (lo, hi) = match (self.support(), other.support()) {
            (None, None) => return Ok(StepFunction::zero(self.dim)),
            (Some(_), None) => return Ok(self.scale(a)),
            (None, Some(_)) => return Ok(other.scale(b)),
            (Some((a0, a1)), Some((b0, b1))) => (a0.min(b0), a1.max(b1)),
        };
        let knots = merge_knots(&self.breaks, &other.breaks, lo, hi);
        let values = knots
            .windows(2)
            .map(|w| {
                let mut v = self.piece(w[0], w[1]).0;
                vecops::scale_in_place(&mut v, a);
                vecops::axpy(&mut v, b, &other.piece(w[0], w[1]).0);
                v
            })
            .collect();
        Ok(StepFunction { dim: self.dim, breaks: knots, values })
    }

    /// Largest Euclidean norm over the cells (the essential sup norm).
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| vecops::norm2(v)).fold(0.0, f64::max)
    }
}

impl Piecewise for StepFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn knots(&self) -> &[f64] {
        &self.breaks
    }

    fn piece(&self, l: f64, r: f64) -> (Vec<f64>, Vec<f64>) {
        let v = self.eval(0.5 * (l + r));
        (v.clone(), v)
    }
}

/// A square-integrable density used by dual representations: either
/// piecewise linear or piecewise constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    Linear(GridFunction),
    Step(StepFunction),
}

impl Density {
    pub fn zero(dim: usize) -> Self {
        Density::Step(StepFunction::zero(dim))
    }

    pub fn as_piecewise(&self) -> &dyn Piecewise {
        match self {
            Density::Linear(g) => g,
            Density::Step(s) => s,
        }
    }

    pub fn reflect(&self) -> Density {
        match self {
            Density::Linear(g) => Density::Linear(g.reflect()),
            Density::Step(s) => Density::Step(s.reflect()),
        }
    }

    pub fn restrict(&self, lo: f64, hi: f64) -> Density {
        match self {
            Density::Linear(g) => Density::Linear(g.restrict(lo, hi)),
            Density::Step(s) => Density::Step(s.restrict(lo, hi)),
        }
    }

    pub fn scale(&self, c: f64) -> Density {
        match self {
            Density::Linear(g) => Density::Linear(g.scale(c)),
            Density::Step(s) => Density::Step(s.scale(c)),
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self {
            Density::Linear(g) => g.eval(t),
            Density::Step(s) => s.eval(t),
        }
    }

    pub fn dim(&self) -> usize {
        self.as_piecewise().dim()
    }

    pub fn integral(&self) -> Vec<f64> {
        integral(self.as_piecewise())
    }

    /// `L_q` norm with Euclidean pointwise norm; `q = ∞` is the essential sup.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        if q.is_infinite() {
            return Ok(match self {
                Density::Linear(g) => g.max_norm(),
                Density::Step(s) => s.max_norm(),
            });
        }
        lp_norm(self.as_piecewise(), q)
    }
}

/// `f - g` for two piecewise functions, with the union of their knots.
pub struct Difference<'a> {
    f: &'a dyn Piecewise,
    g: &'a dyn Piecewise,
    knots: Vec<f64>,
}

impl<'a> Difference<'a> {
    pub fn new(f: &'a dyn Piecewise, g: &'a dyn Piecewise) -> Result<Self> {
        if f.dim() != g.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), found: g.dim() });
        }
        let bounds = [f.support(), g.support()].into_iter().flatten();
        let (lo, hi) = bounds.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
        let knots = if lo < hi { merge_knots(f.knots(), g.knots(), lo, hi) } else { Vec::new() };
        Ok(Difference { f, g, knots })
    }
}

impl Piecewise for Difference<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn piece(&self, l: f64, r: f64) -> (Vec<f64>, Vec<f64>) {
        let (fa, fb) = self.f.piece(l, r);
        let (ga, gb) = self.g.piece(l, r);
        (vecops::sub(&fa, &ga), vecops::sub(&fb, &gb))
    }
}

/// Componentwise `∫ f`.
pub fn integral(f: &dyn Piecewise) -> Vec<f64> {
    let mut out = vec![0.0; f.dim()];
    let Some((lo, hi)) = f.support() else { return out };
    let knots = merge_knots(f.knots(), &[], lo, hi);
    for w in knots.windows(2) {
        let (a, b) = f.piece(w[0], w[1]);
        let h = w[1] - w[0];
        for ((o, x), y) in out.iter_mut().zip(&a).zip(&b) {
            *o += 0.5 * h * (x + y);
        }
    }
    out
}

/// `∫ <f(t), g(t)> dt`, exact for affine pieces.
pub fn inner(f: &dyn Piecewise, g: &dyn Piecewise) -> f64 {
    let (Some((f0, f1)), Some((g0, g1))) = (f.support(), g.support()) else {
        return 0.0;
    };
    let (lo, hi) = (f0.max(g0), f1.min(g1));
    if lo >= hi {
        return 0.0;
    }
    let knots = merge_knots(f.knots(), g.knots(), lo, hi);
    knots
        .windows(2)
        .map(|w| {
            let (fa, fb) = f.piece(w[0], w[1]);
            let (ga, gb) = g.piece(w[0], w[1]);
            let h = w[1] - w[0];
            h / 6.0
                * (2.0 * vecops::dot(&fa, &ga)
                    + vecops::dot(&fa, &gb)
                    + vecops::dot(&fb, &ga)
                    + 2.0 * vecops::dot(&fb, &gb))
        })
        .sum()
}

/// `(∫ |f(t)|^p dt)^{1/p}` with the Euclidean pointwise norm, `p >= 1` finite.
///
/// Closed form for `p = 2` and for scalar functions; vector functions with
/// other exponents fall back to adaptive quadrature (absolute tolerance 1e-12
/// per piece).
pub fn lp_norm(f: &dyn Piecewise, p: f64) -> Result<f64> {
    Ok(lp_norm_pow(f, p)?.powf(1.0 / p))
}

/// `∫ |f(t)|^p dt`.
pub fn lp_norm_pow(f: &dyn Piecewise, p: f64) -> Result<f64> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let Some((lo, hi)) = f.support() else { return Ok(0.0) };
    let knots = merge_knots(f.knots(), &[], lo, hi);
    Ok(knots
        .windows(2)
        .map(|w| {
            let (a, b) = f.piece(w[0], w[1]);
            (w[1] - w[0]) * unit_piece_pow(&a, &b, p)
        })
        .sum())
}

/// `∫_0^1 |a + s (b - a)|^p ds`.
fn unit_piece_pow(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return (vecops::dot(a, a) + vecops::dot(a, b) + vecops::dot(b, b)) / 3.0;
    }
    if a.len() == 1 {
        return scalar_piece_pow(a[0], b[0], p);
    }
    let d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let dd = vecops::dot(&d, &d);
    if dd == 0.0 {
        return vecops::norm2(a).powf(p);
    }
    let integrand = |s: f64| {
        let v: Vec<f64> = a.iter().zip(&d).map(|(x, y)| x + s * y).collect();
        vecops::norm2(&v).powf(p)
    };
    // The norm of an affine path is smooth except at its closest approach
    // to the origin; split there.
    let s_star = (-vecops::dot(a, &d) / dd).clamp(0.0, 1.0);
    let mut total = 0.0;
    for (l, r) in [(0.0, s_star), (s_star, 1.0)] {
        if r > l {
            total += crate::quad::integrate(&integrand, l, r, 1e-13);
        }
    }
    total
}

fn scalar_piece_pow(a: f64, b: f64, p: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    if a * b < 0.0 {
        // sign change at s0 = a / (a - b)
        let s0 = a / (a - b);
        return (s0 * a.abs().powf(p) + (1.0 - s0) * b.abs().powf(p)) / (p + 1.0);
    }
    let (u, v) = (a.abs().min(b.abs()), a.abs().max(b.abs()));
    if u == 0.0 {
        return v.powf(p) / (p + 1.0);
    }
    if u == v {
        return u.powf(p);
    }
    // (v^{p+1} - u^{p+1}) / ((p+1)(v-u)) without cancellation
    let r = (v - u) / u;
    let num = u.powf(p + 1.0) * ((p + 1.0) * r.ln_1p()).exp_m1();
    num / ((p + 1.0) * (v - u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tri() -> GridFunction {
        GridFunction::from_points(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]).unwrap()
    }

    #[test]
    fn eval_interpolates_and_vanishes_outside() {
        let g = tri();
        assert_eq!(g.eval(0.5), vec![1.0]);
        assert_eq!(g.eval(1.0), vec![2.0]);
        assert_eq!(g.eval(-0.1), vec![0.0]);
        assert_eq!(g.eval(2.5), vec![0.0]);
    }

    #[test]
    fn rejects_unsorted_breaks() {
        assert!(GridFunction::scalar(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        assert!(StepFunction::scalar(vec![1.0, 0.5], vec![1.0]).is_err());
        assert!(GridFunction::scalar(vec![0.0, f64::NAN], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn exact_integrals() {
        let g = tri();
        assert_eq!(integral(&g), vec![2.0]);
        // ∫ tri^2 = 2 * ∫_0^1 (2t)^2 = 8/3
        assert_abs_diff_eq!(lp_norm_pow(&g, 2.0).unwrap(), 8.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lp_norm(&g, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        let box1 = StepFunction::constant(0.0, 2.0, vec![1.0]).unwrap();
        assert_abs_diff_eq!(inner(&g, &box1), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn scalar_power_matches_quadrature() {
        for &(a, b, p) in &[(1.0, 3.0, 1.5), (-2.0, 1.0, 3.3), (0.7, 0.7000001, 2.5), (0.0, 4.0, 1.2)] {
            let exact = scalar_piece_pow(a, b, p);
            let f = |s: f64| ((a + s * (b - a)) as f64).abs().powf(p);
            let num = crate::quad::integrate(&f, 0.0, 1.0, 1e-14);
            assert_abs_diff_eq!(exact, num, epsilon = 1e-11);
        }
    }

    #[test]
    fn vector_lp_by_quadrature_matches_p2_closed_form_limit() {
        let g = GridFunction::new(2, vec![0.0, 1.0, 3.0], vec![vec![1.0, -1.0], vec![0.5, 2.0], vec![0.0, 0.0]])
            .unwrap();
        let via_quad = lp_norm_pow(&g, 2.000000001).unwrap();
        let exact = lp_norm_pow(&g, 2.0).unwrap();
        assert!((via_quad - exact).abs() < 1e-7);
    }

    #[test]
    fn lin_comb_merges_grids() {
        let f = GridFunction::from_points(&[(0.0, 1.0), (2.0, 0.0)]).unwrap();
        let g = GridFunction::from_points(&[(0.0, 0.0), (1.0, 1.0), (3.0, 0.0)]).unwrap();
        let h = f.lin_comb(2.0, &g, -1.0).unwrap();
        for t in [0.0, 0.5, 1.0, 1.7, 2.0, 2.5, 3.0, 4.0] {
            let want = 2.0 * f.eval(t)[0] - g.eval(t)[0];
            assert_abs_diff_eq!(h.eval(t)[0], want, epsilon = 1e-15);
        }
    }

    #[test]
    fn lin_comb_rejects_interior_jump() {
        let f = GridFunction::from_points(&[(0.0, 1.0), (2.0, 0.0)]).unwrap();
        let g = GridFunction::from_points(&[(1.0, 1.0), (3.0, 0.0)]).unwrap();
        assert!(f.lin_comb(1.0, &g, 1.0).is_err());
    }

    #[test]
    fn step_restrict_and_reflect() {
        let s = StepFunction::scalar(vec![-1.0, 0.0, 2.0], vec![3.0, -1.0]).unwrap();
        let pos = s.restrict(0.0, f64::INFINITY);
        assert_eq!(pos.integral(), vec![-2.0]);
        let neg = s.restrict(f64::NEG_INFINITY, 0.0).reflect();
        assert_eq!(neg.breaks(), &[0.0, 1.0]);
        assert_eq!(neg.integral(), vec![3.0]);
    }

    #[test]
    fn derivative_of_triangle() {
        let d = tri().derivative();
        assert_eq!(d.values(), &[vec![2.0], vec![-2.0]]);
    }
}
