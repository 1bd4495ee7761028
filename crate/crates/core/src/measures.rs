//! Signed measures on `[0, inf]`, `[-inf, inf]` and bounded subsets of the
//! line, represented as finitely many atoms plus a piecewise-constant density.
//!
//! Atoms at `±inf` pair with the limit values of an integrand. With this
//! representation every integral against a piecewise-linear function is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::piecewise::{self, Piecewise, StepFunction};
use crate::quad;
use crate::vecops;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureDomain {
    /// `[0, inf]`
    Half,
    /// `[-inf, inf]`
    Line,
    /// A bounded subset of the real line; no infinite atoms.
    Finite,
}

impl MeasureDomain {
    fn admits(&self, t: ExtendedReal) -> bool {
        match self {
            MeasureDomain::Half => t >= ExtendedReal::Finite(0.0),
            MeasureDomain::Line => true,
            MeasureDomain::Finite => t.is_finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub loc: ExtendedReal,
    pub w: Vec<f64>,
}

impl Atom {
    pub fn new(loc: impl Into<ExtendedReal>, w: Vec<f64>) -> Self {
        Atom { loc: loc.into(), w }
    }
}

/// Total variation, per component and summed over components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalVariation {
    pub per_component: Vec<f64>,
    pub total: f64,
}

/// Vector-valued signed measure `μ = ν + ν_{-inf} + ν_{inf}`: atoms at finite
/// points and a density make up `ν`, atoms at `±inf` the concentrated parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct SignedMeasure {
    domain: MeasureDomain,
    dim: usize,
    atoms: Vec<Atom>,
    density: StepFunction,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    domain: MeasureDomain,
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<StepFunction>,
}

impl TryFrom<RawMeasure> for SignedMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        let dim = raw
            .atoms
            .first()
            .map(|a| a.w.len())
            .or_else(|| raw.density.as_ref().filter(|d| !d.is_empty()).map(|d| d.dim()))
            .unwrap_or(1);
        let density = raw.density.unwrap_or_else(|| StepFunction::zero(dim));
        SignedMeasure::new(raw.domain, dim, raw.atoms, density)
    }
}

impl From<SignedMeasure> for RawMeasure {
    fn from(m: SignedMeasure) -> Self {
        RawMeasure {
            domain: m.domain,
            atoms: m.atoms,
            density: if m.density.is_empty() { None } else { Some(m.density) },
        }
    }
}

impl SignedMeasure {
    /// Builds a measure, sorting atoms by location and merging atoms that share
    /// a location by summing their weights.
    pub fn new(
        domain: MeasureDomain,
        dim: usize,
        atoms: Vec<Atom>,
        density: StepFunction,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let density = if density.is_empty() { StepFunction::zero(dim) } else { density };
        if density.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: density.dim() });
        }
        for a in &atoms {
            if a.w.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.w.len() });
            }
            if let Some(bad) = a.w.iter().find(|x| !x.is_finite()) {
                return Err(Error::NonFinite(*bad));
            }
            if !domain.admits(a.loc) {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} outside the {:?} domain",
                    a.loc, domain
                )));
            }
        }
        if domain == MeasureDomain::Half {
            if let Some((lo, _)) = density.support() {
                if lo < 0.0 {
                    return Err(Error::InvalidMeasure(format!(
                        "density starts at {lo} on the half line"
                    )));
                }
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.loc.cmp(&b.loc));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.loc == a.loc => vecops::axpy(&mut last.w, 1.0, &a.w),
                _ => merged.push(a),
            }
        }
        Ok(SignedMeasure { domain, dim, atoms: merged, density })
    }

    pub fn zero(domain: MeasureDomain, dim: usize) -> Self {
        SignedMeasure { domain, dim, atoms: Vec::new(), density: StepFunction::zero(dim) }
    }

    pub fn dirac(domain: MeasureDomain, loc: impl Into<ExtendedReal>, w: Vec<f64>) -> Result<Self> {
        let dim = w.len();
        SignedMeasure::new(domain, dim, vec![Atom::new(loc, w)], StepFunction::zero(dim))
    }

    pub fn atoms_only(domain: MeasureDomain, dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        SignedMeasure::new(domain, dim, atoms, StepFunction::zero(dim))
    }

    pub fn from_density(domain: MeasureDomain, density: StepFunction) -> Result<Self> {
        let dim = density.dim();
        SignedMeasure::new(domain, dim, Vec::new(), density)
    }

    pub fn domain(&self) -> MeasureDomain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &StepFunction {
        &self.density
    }

    /// Weight of the atom at `loc`, zero if absent.
    pub fn atom_at(&self, loc: ExtendedReal) -> Vec<f64> {
        self.atoms
            .iter()
            .find(|a| a.loc == loc)
            .map(|a| a.w.clone())
            .unwrap_or_else(|| vec![0.0; self.dim])
    }

    pub fn has_infinite_atoms(&self) -> bool {
        self.atoms.iter().any(|a| !a.loc.is_finite())
    }

    /// The part `ν` living on the finite line.
    pub fn finite_part(&self) -> SignedMeasure {
        SignedMeasure {
            domain: self.domain,
            dim: self.dim,
            atoms: self.atoms.iter().filter(|a| a.loc.is_finite()).cloned().collect(),
            density: self.density.clone(),
        }
    }

    /// Componentwise mass of the finite part, `ν(R)`.
    pub fn finite_mass(&self) -> Vec<f64> {
        let mut m = self.density.integral();
        for a in self.atoms.iter().filter(|a| a.loc.is_finite()) {
            vecops::axpy(&mut m, 1.0, &a.w);
        }
        m
    }

    /// Componentwise total mass including atoms at infinity.
    pub fn mass(&self) -> Vec<f64> {
        let mut m = self.density.integral();
        for a in &self.atoms {
            vecops::axpy(&mut m, 1.0, &a.w);
        }
        m
    }

    /// `Σ |w| + ∫ |density|`, exact.
    pub fn total_variation(&self) -> TotalVariation {
        let mut per = self.density.abs_integral();
        for a in &self.atoms {
            for (p, w) in per.iter_mut().zip(&a.w) {
                *p += w.abs();
            }
        }
        let total = per.iter().sum();
        TotalVariation { per_component: per, total }
    }

    /// Hahn–Jordan split `μ = μ⁺ - μ⁻` of a scalar measure.
    pub fn jordan_decompose(&self) -> Result<(SignedMeasure, SignedMeasure)> {
        if self.dim != 1 {
            return Err(Error::NotScalar(self.dim));
        }
        let part = |sign: f64| {
            let atoms = self
                .atoms
                .iter()
                .filter(|a| sign * a.w[0] > 0.0)
                .map(|a| Atom { loc: a.loc, w: vec![sign * a.w[0]] })
                .collect();
            let density = self.density.map_values(|v| vec![(sign * v[0]).max(0.0)]);
            SignedMeasure { domain: self.domain, dim: 1, atoms, density }
        };
        Ok((part(1.0), part(-1.0)))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.iter().all(|a| a.w.iter().all(|&w| w >= 0.0))
            && self.density.values().iter().all(|v| v.iter().all(|&x| x >= 0.0))
    }

    pub fn scale(&self, c: f64) -> SignedMeasure {
        SignedMeasure {
            domain: self.domain,
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { loc: a.loc, w: vecops::scaled(&a.w, c) })
                .collect(),
            density: self.density.scale(c),
        }
    }

    /// `a * self + b * other`; both measures must share domain and dimension.
    pub fn lin_comb(&self, a: f64, other: &SignedMeasure, b: f64) -> Result<SignedMeasure> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain, other.domain
            )));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let atoms = self
            .scale(a)
            .atoms
            .into_iter()
            .chain(other.scale(b).atoms)
            .collect();
        let density = self.density.lin_comb(a, &other.density, b)?;
        SignedMeasure::new(self.domain, self.dim, atoms, density)
    }

    /// Same measure viewed on a larger domain (e.g. half line inside the line).
    pub fn with_domain(&self, domain: MeasureDomain) -> Result<SignedMeasure> {
        SignedMeasure::new(domain, self.dim, self.atoms.clone(), self.density.clone())
    }

    /// Image under `t -> -t`, as a measure on the line.
    pub fn reflect(&self) -> SignedMeasure {
        SignedMeasure {
            domain: MeasureDomain::Line,
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .rev()
                .map(|a| Atom { loc: a.loc.neg(), w: a.w.clone() })
                .collect(),
            density: self.density.reflect(),
        }
    }

    /// Restriction to `[0, inf]` of a measure on the line (atom at 0 included).
    pub fn restrict_nonnegative(&self) -> SignedMeasure {
        SignedMeasure {
            domain: MeasureDomain::Half,
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .filter(|a| a.loc >= ExtendedReal::Finite(0.0))
                .cloned()
                .collect(),
            density: self.density.restrict(0.0, f64::INFINITY),
        }
    }

    /// `∫ <x(t), dμ(t)>`, with atoms at `±inf` reading the limits of `x`.
    pub fn integrate(&self, x: &dyn Integrand) -> Result<f64> {
        if !x.accepts(self.domain) {
            return Err(Error::DomainMismatch(format!(
                "{:?} measure against {} integrand",
                self.domain,
                x.describe()
            )));
        }
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        let mut total = 0.0;
        for a in &self.atoms {
            total += vecops::dot(&x.value_at(a.loc)?, &a.w);
        }
        if !self.density.is_empty() {
            total += x.pair_density(&self.density)?;
        }
        Ok(total)
    }

    /// Pushforward of a half-line measure under `t(s) = s / (1 + s)` onto
    /// `[0, 1]`; the atom at `inf` lands on 1.
    ///
    /// Density cells map to their image cells with values rescaled so that
    /// every cell keeps its mass.
    pub fn pushforward_compactify(&self) -> Result<SignedMeasure> {
        if self.domain != MeasureDomain::Half {
            return Err(Error::DomainMismatch(format!(
                "compactification needs a half-line measure, got {:?}",
                self.domain
            )));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { loc: ExtendedReal::Finite(compactify(a.loc)), w: a.w.clone() })
            .collect();
        let density = if self.density.is_empty() {
            StepFunction::zero(self.dim)
        } else {
            let src = self.density.breaks();
            let breaks: Vec<f64> = src.iter().map(|&s| compactify(ExtendedReal::Finite(s))).collect();
            let values = src
                .windows(2)
                .zip(breaks.windows(2))
                .zip(self.density.values())
                .map(|((s, tau), v)| vecops::scaled(v, (s[1] - s[0]) / (tau[1] - tau[0])))
                .collect();
            StepFunction::new(self.dim, breaks, values)?
        };
        SignedMeasure::new(MeasureDomain::Finite, self.dim, atoms, density)
    }
}

/// `t(s) = s / (1 + s)`, with `t(inf) = 1`.
pub fn compactify(s: ExtendedReal) -> f64 {
    match s {
        ExtendedReal::PosInf => 1.0,
        ExtendedReal::Finite(s) => s / (1.0 + s),
        ExtendedReal::NegInf => f64::NAN,
    }
}

/// `s(τ) = τ / (1 - τ)`, with `s(1) = inf`.
pub fn decompactify(tau: f64) -> ExtendedReal {
    if tau >= 1.0 {
        ExtendedReal::PosInf
    } else {
        ExtendedReal::Finite(tau / (1.0 - tau))
    }
}

/// Something a measure can integrate: point values (including the limits at
/// `±inf`) and exact pairings with piecewise-constant densities.
pub trait Integrand {
    fn dim(&self) -> usize;

    /// Whether measures on `domain` can integrate this function.
    fn accepts(&self, domain: MeasureDomain) -> bool;

    fn describe(&self) -> &'static str;

    fn value_at(&self, t: ExtendedReal) -> Result<Vec<f64>>;

    /// `∫ <x(t), d(t)> dt`.
    fn pair_density(&self, density: &StepFunction) -> Result<f64>;
}

/// `x ∘ s` on `[0, 1]` for a half-line function `x`, where `s(τ) = τ/(1-τ)`.
pub struct Compactified<'a>(pub &'a crate::limcore::LimFunctionHalf);

impl Integrand for Compactified<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn accepts(&self, domain: MeasureDomain) -> bool {
        domain == MeasureDomain::Finite
    }

    fn describe(&self) -> &'static str {
        "compactified half-line"
    }

    fn value_at(&self, t: ExtendedReal) -> Result<Vec<f64>> {
        match t {
            ExtendedReal::Finite(tau) if (0.0..=1.0).contains(&tau) => {
                self.0.eval(decompactify(tau))
            }
            other => Err(Error::DomainMismatch(format!("{other} outside [0, 1]"))),
        }
    }

    fn pair_density(&self, density: &StepFunction) -> Result<f64> {
        let Some((lo, hi)) = density.support() else { return Ok(0.0) };
        if lo < 0.0 || hi > 1.0 {
            return Err(Error::DomainMismatch("density outside [0, 1]".into()));
        }
        let images: Vec<f64> = self
            .0
            .core()
            .breaks()
            .iter()
            .map(|&s| compactify(ExtendedReal::Finite(s)))
            .collect();
        let knots = piecewise::merge_knots(density.breaks(), &images, lo, hi);
        let mut total = 0.0;
        for w in knots.windows(2) {
            let d = density.piece(w[0], w[1]).0;
            let f = |tau: f64| {
                let x = self.0.eval(decompactify(tau)).expect("finite point");
                vecops::dot(&x, &d)
            };
            total += quad::integrate(&f, w[0], w[1], 1e-14);
        }
        Ok(total)
    }
}
