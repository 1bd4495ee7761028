//! Representations of continuous linear functionals on the converging spaces
//! and their pairings with primal elements.
//!
//! Each form splits a functional into a part acting on the core `x - x(inf)`
//! and a vector `α` acting on the limit.

mod oracle;

pub use oracle::{dual_norm_oracle, DualNormReport, OracleReport, MAX_TRUNCATION, RESTARTS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limcore::{LimFunctionHalf, LimFunctionLine, LimSequence};
use crate::measures::{Atom, Integrand, MeasureDomain, SignedMeasure};
use crate::piecewise::{self, Density};
use crate::vecops;
use crate::ExtendedReal;

/// A functional evaluated against primal elements of type `X`.
pub trait Pairing<X: ?Sized> {
    fn pair(&self, x: &X) -> Result<f64>;
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `x ↦ ∫ <x(t) - x(inf), dμ(t)> + αᵀ x(inf)` on the half line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasureFunctional", into = "RawMeasureFunctional")]
pub struct MeasureFunctional {
    mu: SignedMeasure,
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasureFunctional {
    mu: SignedMeasure,
    alpha: Vec<f64>,
}

impl TryFrom<RawMeasureFunctional> for MeasureFunctional {
    type Error = Error;

    fn try_from(raw: RawMeasureFunctional) -> Result<Self> {
        MeasureFunctional::new(raw.mu, raw.alpha)
    }
}

impl From<MeasureFunctional> for RawMeasureFunctional {
    fn from(f: MeasureFunctional) -> Self {
        RawMeasureFunctional { mu: f.mu, alpha: f.alpha }
    }
}

impl MeasureFunctional {
    /// `mu` must live on the half line without atoms at infinity; the mass at
    /// infinity is carried by `alpha`.
    pub fn new(mu: SignedMeasure, alpha: Vec<f64>) -> Result<Self> {
        if mu.domain() != MeasureDomain::Half {
            return Err(Error::DomainMismatch(format!("expected a half-line measure, got {:?}", mu.domain())));
        }
        if mu.has_infinite_atoms() {
            return Err(Error::InvalidMeasure("atoms at infinity belong in alpha".into()));
        }
        check_dim(mu.dim(), alpha.len())?;
        Ok(MeasureFunctional { mu, alpha })
    }

    pub fn mu(&self) -> &SignedMeasure {
        &self.mu
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }
}

pub fn pair_measure(f: &MeasureFunctional, x: &LimFunctionHalf) -> Result<f64> {
    check_dim(f.dim(), x.dim())?;
    Ok(f.mu.integrate(&x.shifted())? + vecops::dot(&f.alpha, x.limit()))
}

impl Pairing<LimFunctionHalf> for MeasureFunctional {
    fn pair(&self, x: &LimFunctionHalf) -> Result<f64> {
        pair_measure(self, x)
    }
}

/// A single measure on `[0, inf]` or `[-inf, inf]`, atoms at infinity allowed:
/// `x ↦ ∫ <x(t), dμ̃(t)>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedMeasureFunctional {
    pub mu_tilde: SignedMeasure,
}

impl ExtendedMeasureFunctional {
    pub fn new(mu_tilde: SignedMeasure) -> Result<Self> {
        match mu_tilde.domain() {
            MeasureDomain::Half | MeasureDomain::Line => Ok(ExtendedMeasureFunctional { mu_tilde }),
            other => Err(Error::DomainMismatch(format!("extended measures live on [0,inf] or [-inf,inf], got {other:?}"))),
        }
    }
}

/// `μ̃ = μ + ν_inf δ_inf` with `ν_inf = α - μ(R₊)`.
pub fn to_extended(f: &MeasureFunctional) -> ExtendedMeasureFunctional {
    let nu_inf = vecops::sub(&f.alpha, &f.mu.finite_mass());
    let mut atoms = f.mu.atoms().to_vec();
    atoms.push(Atom { loc: ExtendedReal::PosInf, w: nu_inf });
    let mu_tilde = SignedMeasure::new(MeasureDomain::Half, f.dim(), atoms, f.mu.density().clone())
        .expect("finite half-line measure plus an atom at infinity is well formed");
    ExtendedMeasureFunctional { mu_tilde }
}

/// Inverse of [`to_extended`]: `α = ν_inf + μ(R₊)`, `μ` the finite part.
pub fn from_extended(g: &ExtendedMeasureFunctional) -> Result<MeasureFunctional> {
    if g.mu_tilde.domain() != MeasureDomain::Half {
        return Err(Error::DomainMismatch("from_extended needs a half-line measure".into()));
    }
    MeasureFunctional::new(g.mu_tilde.finite_part(), g.mu_tilde.mass())
}

/// `∫ <x(t), dμ̃(t)>`; atoms at `±inf` read the limits of `x`.
pub fn pair_extended(g: &ExtendedMeasureFunctional, x: &dyn Integrand) -> Result<f64> {
    g.mu_tilde.integrate(x)
}

impl Pairing<LimFunctionHalf> for ExtendedMeasureFunctional {
    fn pair(&self, x: &LimFunctionHalf) -> Result<f64> {
        pair_extended(self, x)
    }
}

impl Pairing<LimFunctionLine> for ExtendedMeasureFunctional {
    fn pair(&self, x: &LimFunctionLine) -> Result<f64> {
        pair_extended(self, x)
    }
}

/// `x ↦ ∫ <x(t), dμ(t)> + α₁ᵀ x(-inf) + α₂ᵀ x(inf)` on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasureLine", into = "RawMeasureLine")]
pub struct MeasureFunctionalLine {
    mu: SignedMeasure,
    alpha_neg: Vec<f64>,
    alpha_pos: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasureLine {
    mu: SignedMeasure,
    alpha_neg: Vec<f64>,
    alpha_pos: Vec<f64>,
}

impl TryFrom<RawMeasureLine> for MeasureFunctionalLine {
    type Error = Error;

    fn try_from(raw: RawMeasureLine) -> Result<Self> {
        MeasureFunctionalLine::new(raw.mu, raw.alpha_neg, raw.alpha_pos)
    }
}

impl From<MeasureFunctionalLine> for RawMeasureLine {
    fn from(f: MeasureFunctionalLine) -> Self {
        RawMeasureLine { mu: f.mu, alpha_neg: f.alpha_neg, alpha_pos: f.alpha_pos }
    }
}

impl MeasureFunctionalLine {
    pub fn new(mu: SignedMeasure, alpha_neg: Vec<f64>, alpha_pos: Vec<f64>) -> Result<Self> {
        if mu.domain() != MeasureDomain::Line {
            return Err(Error::DomainMismatch(format!("expected a line measure, got {:?}", mu.domain())));
        }
        if mu.has_infinite_atoms() {
            return Err(Error::InvalidMeasure("atoms at infinity belong in alpha".into()));
        }
        check_dim(mu.dim(), alpha_neg.len())?;
        check_dim(mu.dim(), alpha_pos.len())?;
        Ok(MeasureFunctionalLine { mu, alpha_neg, alpha_pos })
    }

    pub fn mu(&self) -> &SignedMeasure {
        &self.mu
    }

    pub fn alpha_neg(&self) -> &[f64] {
        &self.alpha_neg
    }

    pub fn alpha_pos(&self) -> &[f64] {
        &self.alpha_pos
    }

    /// The equivalent single measure on `[-inf, inf]`.
    pub fn to_extended(&self) -> ExtendedMeasureFunctional {
        let mut atoms = self.mu.atoms().to_vec();
        atoms.push(Atom { loc: ExtendedReal::NegInf, w: self.alpha_neg.clone() });
        atoms.push(Atom { loc: ExtendedReal::PosInf, w: self.alpha_pos.clone() });
        let mu_tilde = SignedMeasure::new(MeasureDomain::Line, self.mu.dim(), atoms, self.mu.density().clone())
            .expect("line measure plus atoms at ±inf is well formed");
        ExtendedMeasureFunctional { mu_tilde }
    }
}

pub fn pair_measure_line(f: &MeasureFunctionalLine, x: &LimFunctionLine) -> Result<f64> {
    Ok(f.mu.integrate(x)?
        + vecops::dot(&f.alpha_neg, x.limit_neg())
        + vecops::dot(&f.alpha_pos, x.limit_pos()))
}

impl Pairing<LimFunctionLine> for MeasureFunctionalLine {
    fn pair(&self, x: &LimFunctionLine) -> Result<f64> {
        pair_measure_line(self, x)
    }
}

/// Line functional from its two half-line pieces: `μ₁` acting on
/// `x(-t) - x(-inf)`, `μ₂` on `x(t) - x(inf)`, and `α` on `x(inf)`.
///
/// Gives `μ = μ₁(-·) + μ₂`, `α₁ = -μ₁(R₊)`, `α₂ = α - μ₂(R₊)`.
pub fn assemble_line_measure(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    alpha: &[f64],
) -> Result<MeasureFunctionalLine> {
    for m in [mu1, mu2] {
        if m.domain() != MeasureDomain::Half || m.has_infinite_atoms() {
            return Err(Error::InvalidMeasure("pieces must be finite half-line measures".into()));
        }
    }
    let mu = mu1.reflect().lin_comb(1.0, &mu2.with_domain(MeasureDomain::Line)?, 1.0)?;
    let alpha_neg = vecops::scaled(&mu1.finite_mass(), -1.0);
    let alpha_pos = vecops::sub(alpha, &mu2.finite_mass());
    MeasureFunctionalLine::new(mu, alpha_neg, alpha_pos)
}

/// The same functional evaluated through the split `(x(-t), x(t))`.
pub fn pair_line_measure_halves(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    alpha: &[f64],
    x: &LimFunctionLine,
) -> Result<f64> {
    let (x1, x2) = crate::limcore::split_line(x, false);
    let zero = vec![0.0; alpha.len()];
    Ok(pair_measure(&MeasureFunctional::new(mu1.clone(), zero)?, &x1)?
        + pair_measure(&MeasureFunctional::new(mu2.clone(), alpha.to_vec())?, &x2)?)
}

fn check_half_density(y: &Density) -> Result<()> {
    match y.as_piecewise().support() {
        Some((lo, _)) if lo < 0.0 => Err(Error::DomainMismatch(format!("density starts at {lo} < 0"))),
        _ => Ok(()),
    }
}

fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(q))
    }
}

/// `x ↦ ∫ <y(t), x(t) - x(inf)> dt + αᵀ x(inf)` with `y ∈ L_q(R₊)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensity", into = "RawDensity")]
pub struct DensityFunctional {
    y: Density,
    q: f64,
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDensity {
    y: Density,
    #[serde(with = "exponent")]
    q: f64,
    alpha: Vec<f64>,
}

impl TryFrom<RawDensity> for DensityFunctional {
    type Error = Error;

    fn try_from(raw: RawDensity) -> Result<Self> {
        DensityFunctional::new(raw.y, raw.q, raw.alpha)
    }
}

impl From<DensityFunctional> for RawDensity {
    fn from(f: DensityFunctional) -> Self {
        RawDensity { y: f.y, q: f.q, alpha: f.alpha }
    }
}

impl DensityFunctional {
    /// `q` is the Hölder conjugate of the primal exponent (`inf` allowed).
    pub fn new(y: Density, q: f64, alpha: Vec<f64>) -> Result<Self> {
        check_half_density(&y)?;
        check_q(q)?;
        check_dim(y.dim(), alpha.len())?;
        Ok(DensityFunctional { y, q, alpha })
    }

    pub fn y(&self) -> &Density {
        &self.y
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The primal exponent `p` with `1/p + 1/q = 1`.
    pub fn p(&self) -> f64 {
        vecops::conjugate_exponent(self.q)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `‖y‖_q ‖x - a‖_p + ‖α‖ ‖a‖`, an upper bound for `|<f, x>|`.
    pub fn holder_bound(&self, x: &LimFunctionHalf) -> Result<f64> {
        let p = self.p();
        let core = if p.is_infinite() { x.core().max_norm() } else { piecewise::lp_norm(x.core(), p)? };
        Ok(self.y.lq_norm(self.q)? * core + vecops::norm2(&self.alpha) * vecops::norm2(x.limit()))
    }
}

pub fn pair_density(f: &DensityFunctional, x: &LimFunctionHalf) -> Result<f64> {
    check_dim(f.dim(), x.dim())?;
    Ok(piecewise::inner(f.y.as_piecewise(), x.core()) + vecops::dot(&f.alpha, x.limit()))
}

impl Pairing<LimFunctionHalf> for DensityFunctional {
    fn pair(&self, x: &LimFunctionHalf) -> Result<f64> {
        pair_density(self, x)
    }
}

/// `x ↦ ∫ <y(t), x(t)> dt + α₁ᵀ x(-inf) + α₂ᵀ x(inf)` on the line; `y` is
/// held as its halves `t ↦ y(-t)` and `t ↦ y(t)` on `[0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensityLine", into = "RawDensityLine")]
pub struct DensityFunctionalLine {
    y_neg: Density,
    y_pos: Density,
    q: f64,
    alpha_neg: Vec<f64>,
    alpha_pos: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDensityLine {
    y_neg: Density,
    y_pos: Density,
    #[serde(with = "exponent")]
    q: f64,
    alpha_neg: Vec<f64>,
    alpha_pos: Vec<f64>,
}

impl TryFrom<RawDensityLine> for DensityFunctionalLine {
    type Error = Error;

    fn try_from(raw: RawDensityLine) -> Result<Self> {
        DensityFunctionalLine::new(raw.y_neg, raw.y_pos, raw.q, raw.alpha_neg, raw.alpha_pos)
    }
}

impl From<DensityFunctionalLine> for RawDensityLine {
    fn from(f: DensityFunctionalLine) -> Self {
        RawDensityLine {
            y_neg: f.y_neg,
            y_pos: f.y_pos,
            q: f.q,
            alpha_neg: f.alpha_neg,
            alpha_pos: f.alpha_pos,
        }
    }
}

impl DensityFunctionalLine {
    pub fn new(y_neg: Density, y_pos: Density, q: f64, alpha_neg: Vec<f64>, alpha_pos: Vec<f64>) -> Result<Self> {
        check_half_density(&y_neg)?;
        check_half_density(&y_pos)?;
        check_q(q)?;
        let dim = alpha_pos.len();
        check_dim(dim, alpha_neg.len())?;
        check_dim(dim, y_neg.dim())?;
        check_dim(dim, y_pos.dim())?;
        Ok(DensityFunctionalLine { y_neg, y_pos, q, alpha_neg, alpha_pos })
    }

    /// `y(t)` on the real line (right-continuous at 0).
    pub fn y_at(&self, t: f64) -> Vec<f64> {
        if t < 0.0 {
            self.y_neg.eval(-t)
        } else {
            self.y_pos.eval(t)
        }
    }

    pub fn alpha_neg(&self) -> &[f64] {
        &self.alpha_neg
    }

    pub fn alpha_pos(&self) -> &[f64] {
        &self.alpha_pos
    }
}

pub fn pair_density_line(f: &DensityFunctionalLine, x: &LimFunctionLine) -> Result<f64> {
    check_dim(f.alpha_pos.len(), x.dim())?;
    let (yn, yp) = (f.y_neg.as_piecewise(), f.y_pos.as_piecewise());
    Ok(piecewise::inner(yn, x.neg_core())
        + vecops::dot(&piecewise::integral(yn), x.limit_neg())
        + piecewise::inner(yp, x.pos_core())
        + vecops::dot(&piecewise::integral(yp), x.limit_pos())
        + vecops::dot(&f.alpha_neg, x.limit_neg())
        + vecops::dot(&f.alpha_pos, x.limit_pos()))
}

impl Pairing<LimFunctionLine> for DensityFunctionalLine {
    fn pair(&self, x: &LimFunctionLine) -> Result<f64> {
        pair_density_line(self, x)
    }
}

/// Line density functional from two half-line functionals `(y₁, α₁)` acting on
/// `x(-t)` and `(y₂, α₂)` acting on `x(t)`: `y(t) = y₁(-t)` for `t < 0`,
/// `y(t) = y₂(t)` for `t >= 0`, `α̃₁ = α₁ - ∫_{R₋} y`, `α̃₂ = α₂ - ∫_{R₊} y`.
pub fn assemble_line_density(
    y1: &Density,
    y2: &Density,
    q: f64,
    alpha1: &[f64],
    alpha2: &[f64],
) -> Result<DensityFunctionalLine> {
    let alpha_neg = vecops::sub(alpha1, &y1.integral());
    let alpha_pos = vecops::sub(alpha2, &y2.integral());
    DensityFunctionalLine::new(y1.clone(), y2.clone(), q, alpha_neg, alpha_pos)
}

/// The two half-line density functionals applied to the plain split of `x`.
pub fn pair_line_density_halves(
    y1: &Density,
    y2: &Density,
    q: f64,
    alpha1: &[f64],
    alpha2: &[f64],
    x: &LimFunctionLine,
) -> Result<f64> {
    let (x1, x2) = crate::limcore::split_line(x, false);
    Ok(pair_density(&DensityFunctional::new(y1.clone(), q, alpha1.to_vec())?, &x1)?
        + pair_density(&DensityFunctional::new(y2.clone(), q, alpha2.to_vec())?, &x2)?)
}

/// `x ↦ Σ y_n (x_n - a) + α a` on convergent sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFunctional {
    pub y: Vec<f64>,
    pub alpha: f64,
}

impl SequenceFunctional {
    pub fn new(y: Vec<f64>, alpha: f64) -> Self {
        SequenceFunctional { y, alpha }
    }
}

pub fn pair_sequence(f: &SequenceFunctional, x: &LimSequence) -> f64 {
    f.y.iter().zip(&x.head).map(|(y, x0)| y * x0).sum::<f64>() + f.alpha * x.limit
}

impl Pairing<LimSequence> for SequenceFunctional {
    fn pair(&self, x: &LimSequence) -> Result<f64> {
        Ok(pair_sequence(self, x))
    }
}

/// `x ↦ ∫ <y₀, x - x(inf)> + <y₁, x'> dt + αᵀ x(inf)` on the Sobolev space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSobolev", into = "RawSobolev")]
pub struct SobolevFunctional {
    y0: Density,
    y1: Density,
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSobolev {
    y0: Density,
    y1: Density,
    alpha: Vec<f64>,
}

impl TryFrom<RawSobolev> for SobolevFunctional {
    type Error = Error;

    fn try_from(raw: RawSobolev) -> Result<Self> {
        SobolevFunctional::new(raw.y0, raw.y1, raw.alpha)
    }
}

impl From<SobolevFunctional> for RawSobolev {
    fn from(f: SobolevFunctional) -> Self {
        RawSobolev { y0: f.y0, y1: f.y1, alpha: f.alpha }
    }
}

impl SobolevFunctional {
    pub fn new(y0: Density, y1: Density, alpha: Vec<f64>) -> Result<Self> {
        check_half_density(&y0)?;
        check_half_density(&y1)?;
        check_dim(alpha.len(), y0.dim())?;
        check_dim(alpha.len(), y1.dim())?;
        Ok(SobolevFunctional { y0, y1, alpha })
    }

    pub fn y0(&self) -> &Density {
        &self.y0
    }

    pub fn y1(&self) -> &Density {
        &self.y1
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
}

pub fn pair_sobolev(f: &SobolevFunctional, x: &LimFunctionHalf) -> Result<f64> {
    check_dim(f.alpha.len(), x.dim())?;
    let slope = x.core().derivative();
    Ok(piecewise::inner(f.y0.as_piecewise(), x.core())
        + piecewise::inner(f.y1.as_piecewise(), &slope)
        + vecops::dot(&f.alpha, x.limit()))
}

impl Pairing<LimFunctionHalf> for SobolevFunctional {
    fn pair(&self, x: &LimFunctionHalf) -> Result<f64> {
        pair_sobolev(self, x)
    }
}

/// Any of the representation forms, tagged by `"form"` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DualFunctional {
    Measure(MeasureFunctional),
    MeasureLine(MeasureFunctionalLine),
    Extended(ExtendedMeasureFunctional),
    Density(DensityFunctional),
    DensityLine(DensityFunctionalLine),
    Sequence(SequenceFunctional),
    Sobolev(SobolevFunctional),
}

impl DualFunctional {
    pub fn form(&self) -> &'static str {
        match self {
            DualFunctional::Measure(_) => "measure",
            DualFunctional::MeasureLine(_) => "measure_line",
            DualFunctional::Extended(_) => "extended",
            DualFunctional::Density(_) => "density",
            DualFunctional::DensityLine(_) => "density_line",
            DualFunctional::Sequence(_) => "sequence",
            DualFunctional::Sobolev(_) => "sobolev",
        }
    }
}

impl Pairing<LimFunctionHalf> for DualFunctional {
    fn pair(&self, x: &LimFunctionHalf) -> Result<f64> {
        match self {
            DualFunctional::Measure(f) => f.pair(x),
            DualFunctional::Extended(f) => pair_extended(f, x),
            DualFunctional::Density(f) => f.pair(x),
            DualFunctional::Sobolev(f) => f.pair(x),
            other => Err(Error::Unsupported(format!("{} functional on half-line functions", other.form()))),
        }
    }
}

/// `q` in JSON: a number or the string `"inf"`.
mod exponent {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::ExtendedReal;

    pub fn serialize<S: Serializer>(q: &f64, s: S) -> Result<S::Ok, S::Error> {
        ExtendedReal::new(*q).map_err(serde::ser::Error::custom)?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(ExtendedReal::deserialize(d)?.to_f64())
    }
}
