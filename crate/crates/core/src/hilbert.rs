//! Hilbert structure of `L_{2,lim}`: inner product, the Haar-based
//! orthonormal basis `{(0,1), (φ_k, 0)}`, expansions and Parseval checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limcore::{split_line, LimFunctionHalf, LimFunctionLine};
use crate::piecewise::{self, Difference, Piecewise, StepFunction};
use crate::vecops;

pub const MAX_DEPTH: u32 = 20;

/// `<x₀, y₀>_{L₂} + aᵀb`.
pub fn inner_product(x: &LimFunctionHalf, y: &LimFunctionHalf) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(piecewise::inner(x.core(), y.core()) + vecops::dot(x.limit(), y.limit()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    LimitUnit,
    /// `index = 0` is the scaling function, `index = 2^j + k` the wavelet on
    /// the `k`-th dyadic cell of level `j`.
    Core { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisElement {
    pub kind: BasisKind,
    /// Core part; the limit part is 1 for the limit unit and 0 otherwise.
    pub core_fn: Option<StepFunction>,
}

impl BasisElement {
    pub fn limit(&self) -> f64 {
        match self.kind {
            BasisKind::LimitUnit => 1.0,
            BasisKind::Core { .. } => 0.0,
        }
    }
}

/// Haar system on `[0, T]`: the scaling function and all wavelets of levels
/// `0..depth`, `2^depth` functions in total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarBasis {
    pub t_max: f64,
    pub depth: u32,
}

/// Level and cell of a Haar index; `None` for the scaling function.
fn level_of(index: usize) -> Option<(u32, usize)> {
    if index == 0 {
        None
    } else {
        let j = usize::BITS - 1 - index.leading_zeros();
        Some((j, index - (1 << j)))
    }
}

impl HaarBasis {
    pub fn new(t_max: f64, depth: u32) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidArgument(format!("basis interval length must be positive, got {t_max}")));
        }
        if depth > MAX_DEPTH {
            return Err(Error::TruncationTooLarge { size: depth as usize, max: MAX_DEPTH as usize });
        }
        Ok(HaarBasis { t_max, depth })
    }

    /// Number of core elements.
    pub fn len(&self) -> usize {
        1 << self.depth
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn limit_unit(&self) -> BasisElement {
        BasisElement { kind: BasisKind::LimitUnit, core_fn: None }
    }

    pub fn core_fn(&self, index: usize) -> Result<StepFunction> {
        if index >= self.len() {
            return Err(Error::InvalidArgument(format!("Haar index {index} beyond {}", self.len())));
        }
        let t = self.t_max;
        Ok(match level_of(index) {
            None => StepFunction::constant(0.0, t, vec![1.0 / t.sqrt()])?,
            Some((j, k)) => {
                let cells = (1u64 << j) as f64;
                let width = t / cells;
                let amp = (cells / t).sqrt();
                let lo = k as f64 * width;
                StepFunction::scalar(vec![lo, lo + 0.5 * width, lo + width], vec![amp, -amp])?
            }
        })
    }

    pub fn element(&self, index: usize) -> Result<BasisElement> {
        Ok(BasisElement { kind: BasisKind::Core { index }, core_fn: Some(self.core_fn(index)?) })
    }

    /// `{LIMIT_UNIT, φ_0, …, φ_{K-1}}`.
    pub fn elements(&self) -> Vec<BasisElement> {
        std::iter::once(self.limit_unit())
            .chain((0..self.len()).map(|k| self.element(k).expect("index in range")))
            .collect()
    }

    /// Sign of element `index` on the `cell`-th dyadic cell of level `depth`
    /// (the scaling function counts as +1 everywhere).
    fn sign_on(&self, index: usize, cell: usize, depth: u32) -> i64 {
        match level_of(index) {
            None => 1,
            Some((j, k)) => {
                let span = 1usize << (depth - j);
                if cell / span != k {
                    0
                } else if cell % span < span / 2 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Inner product of two basis elements from their dyadic sign patterns.
    /// The coarser element is constant on each half of the finer one's
    /// support, so the overlap is an integer count times a power of two and
    /// the Gram matrix is computed without rounding.
    pub fn structural_inner(&self, a: &BasisElement, b: &BasisElement) -> f64 {
        match (a.kind, b.kind) {
            (BasisKind::LimitUnit, BasisKind::LimitUnit) => 1.0,
            (BasisKind::Core { index: i }, BasisKind::Core { index: k }) => {
                let fine = self.depth.max(1);
                let rank = |x: usize| level_of(x).map_or(-1, |(j, _)| j as i64);
                let (finer, coarser) = if rank(i) >= rank(k) { (i, k) } else { (k, i) };
                // support of the finer element in finest cells, split in halves
                let (first, span) = match level_of(finer) {
                    None => (0, 1usize << fine),
                    Some((j, c)) => {
                        let span = 1usize << (fine - j);
                        (c * span, span)
                    }
                };
                let half = span / 2;
                let overlap: i64 = if finer == coarser {
                    span as i64
                } else {
                    let left = self.sign_on(finer, first, fine) * self.sign_on(coarser, first, fine);
                    let right = self.sign_on(finer, first + half, fine) * self.sign_on(coarser, first + half, fine);
                    half as i64 * (left + right)
                };
                if overlap == 0 {
                    return 0.0;
                }
                // amplitude_i * amplitude_k * cell width = 2^{(j_i + j_k)/2} / 2^fine
                let level = |x: usize| level_of(x).map_or(0, |(j, _)| j as i32);
                let twice = level(i) + level(k);
                let scale = if twice % 2 == 0 {
                    2f64.powi(twice / 2)
                } else {
                    2f64.powi(twice / 2) * std::f64::consts::SQRT_2
                };
                overlap as f64 * scale / 2f64.powi(fine as i32)
            }
            _ => 0.0,
        }
    }

    /// Gram matrix of [`HaarBasis::elements`] via [`HaarBasis::structural_inner`].
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let e = self.elements();
        e.iter().map(|a| e.iter().map(|b| self.structural_inner(a, b)).collect()).collect()
    }

    /// Gram matrix from numerical piecewise integrals.
    pub fn gram_numeric(&self) -> Vec<Vec<f64>> {
        let e = self.elements();
        e.iter()
            .map(|a| {
                e.iter()
                    .map(|b| {
                        let core = match (&a.core_fn, &b.core_fn) {
                            (Some(f), Some(g)) => piecewise::inner(f, g),
                            _ => 0.0,
                        };
                        core + a.limit() * b.limit()
                    })
                    .collect()
            })
            .collect()
    }

    fn check_support(&self, x: &LimFunctionHalf) -> Result<()> {
        if x.dim() != 1 {
            return Err(Error::NotScalar(x.dim()));
        }
        match x.core().support() {
            Some((_, end)) if end > self.t_max => Err(Error::SupportExceeded { end, limit: self.t_max }),
            _ => Ok(()),
        }
    }

    /// `c_limit = a`, `c_k = <x₀, φ_k>`.
    pub fn project(&self, x: &LimFunctionHalf) -> Result<HaarCoefficients> {
        self.check_support(x)?;
        let core = (0..self.len())
            .into_par_iter()
            .map(|k| piecewise::inner(x.core(), &self.core_fn(k).expect("index in range")))
            .collect();
        Ok(HaarCoefficients { limit: x.limit()[0], core })
    }

    /// `Σ c_k φ_k` as a step function on the finest dyadic cells, plus the limit.
    pub fn reconstruct(&self, c: &HaarCoefficients) -> Result<(StepFunction, f64)> {
        if c.core.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: c.core.len() });
        }
        let fine = self.depth;
        let cells = 1usize << fine;
        let width = self.t_max / cells as f64;
        let values: Vec<f64> = (0..cells)
            .map(|cell| {
                c.core
                    .iter()
                    .enumerate()
                    .filter(|(_, ck)| **ck != 0.0)
                    .map(|(k, ck)| {
                        let amp = match level_of(k) {
                            None => 1.0 / self.t_max.sqrt(),
                            Some((j, _)) => ((1u64 << j) as f64 / self.t_max).sqrt(),
                        };
                        ck * amp * self.sign_on(k, cell, fine) as f64
                    })
                    .sum()
            })
            .collect();
        let breaks = (0..=cells).map(|i| i as f64 * width).collect();
        Ok((StepFunction::scalar(breaks, values)?, c.limit))
    }

    /// `‖x - P_J x‖_{L_{2,lim}}`, computed cell by cell.
    pub fn reconstruction_error(&self, x: &LimFunctionHalf, c: &HaarCoefficients) -> Result<f64> {
        let (core, limit) = self.reconstruct(c)?;
        let diff = Difference::new(x.core(), &core)?;
        Ok(piecewise::lp_norm_pow(&diff, 2.0)?.sqrt().hypot(x.limit()[0] - limit))
    }

    pub fn parseval_check(&self, x: &LimFunctionHalf) -> Result<Parseval> {
        let c = self.project(x)?;
        let lhs = inner_product(x, x)?;
        let rhs = c.limit * c.limit + c.core.iter().map(|v| v * v).sum::<f64>();
        Ok(Parseval { lhs, rhs, gap: lhs - rhs })
    }

    /// Plain split of `x` into `(x(-t), x(t))` and the expansion of each half.
    pub fn expand_line(&self, x: &LimFunctionLine) -> Result<LineCoefficients> {
        let (x1, x2) = split_line(x, false);
        Ok(LineCoefficients { neg: self.project(&x1)?, pos: self.project(&x2)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarCoefficients {
    pub limit: f64,
    pub core: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCoefficients {
    pub neg: HaarCoefficients,
    pub pos: HaarCoefficients,
}

/// `lhs = ‖x‖²`, `rhs = Σ c²`; Bessel's inequality makes `gap >= 0` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parseval {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}
