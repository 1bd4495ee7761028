//! Brute-force dual norms on finite truncations.
//!
//! The primal unit ball is cut down to finitely many coordinates: the head of
//! a sequence, or the nodal values of a piecewise-linear core on a fixed grid.
//! Polyhedral balls are searched by enumerating their extreme points; all
//! other balls by ascent from random starting points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DualFunctional, Pairing};
use crate::error::{Error, Result};
use crate::limcore::{CompositeNorm, CoreNorm, LimFunctionHalf, LimSequence};
use crate::piecewise::{self, GridFunction};
use crate::vecops;

pub const MAX_TRUNCATION: usize = 8;
pub const RESTARTS: usize = 64;
const SEED: u64 = 0x6475_616c_6e6f_726d;
const MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Largest pairing found on the unit sphere; always a lower bound.
    pub value: f64,
    /// True when the search covered every extreme point of the ball.
    pub certified: bool,
    /// Distance to the true supremum when known (0 for certified results).
    pub gap: Option<f64>,
    pub restarts: usize,
    pub witness: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualNormReport {
    pub form: String,
    pub primal: CompositeNorm,
    pub core: CoreNorm,
    pub oracle: OracleReport,
    /// Dual norm of the core part on the same truncation.
    pub core_dual: f64,
    pub alpha_norm: f64,
    /// `‖x₀*‖ + ‖α‖`
    pub sum_formula: f64,
    /// The dual composite rule applied to `(‖x₀*‖, ‖α‖)`.
    pub q_composite_formula: f64,
    /// Formulas within 1e-9 of the oracle value.
    pub matches: Vec<String>,
}

enum Coords {
    Sequence,
    Grid { breaks: Vec<f64>, dim: usize },
}

struct Model {
    coeffs: Vec<f64>,
    n_core: usize,
    coords: Coords,
    core: CoreNorm,
    composite: CompositeNorm,
}

impl Model {
    fn build(f: &DualFunctional, core: CoreNorm, composite: CompositeNorm, grid: Option<&[f64]>) -> Result<Model> {
        composite.validate()?;
        if let CoreNorm::Lp { p } = core {
            if !(p >= 1.0) || p.is_infinite() {
                return Err(Error::InvalidExponent(p));
            }
        }
        if let DualFunctional::Sequence(s) = f {
            if s.y.len() > MAX_TRUNCATION {
                return Err(Error::TruncationTooLarge { size: s.y.len(), max: MAX_TRUNCATION });
            }
            let mut coeffs = s.y.clone();
            coeffs.push(s.alpha);
            return Ok(Model { coeffs, n_core: s.y.len(), coords: Coords::Sequence, core, composite });
        }
        let dim = functional_dim(f)?;
        let breaks = grid.ok_or_else(|| Error::InvalidArgument("function forms need a truncation grid".into()))?;
        if breaks.len() > MAX_TRUNCATION {
            return Err(Error::TruncationTooLarge { size: breaks.len(), max: MAX_TRUNCATION });
        }
        if breaks.len() < 2 || breaks[0] != 0.0 {
            return Err(Error::InvalidGrid("truncation grid must start at 0 and have two points".into()));
        }
        let breaks = breaks.to_vec();
        let n_core = (breaks.len() - 1) * dim;
        let mut coeffs = Vec::with_capacity(n_core + dim);
        for k in 0..n_core + dim {
            let mut u = vec![0.0; n_core + dim];
            u[k] = 1.0;
            coeffs.push(f.pair(&grid_element(&breaks, dim, n_core, &u)?)?);
        }
        Ok(Model { coeffs, n_core, coords: Coords::Grid { breaks, dim }, core, composite })
    }

    fn limit_dim(&self) -> usize {
        self.coeffs.len() - self.n_core
    }

    fn core_norm(&self, u: &[f64]) -> f64 {
        let u = &u[..self.n_core];
        match (&self.coords, self.core) {
            (Coords::Sequence, CoreNorm::Sup) => vecops::norm_inf(u),
            (Coords::Sequence, CoreNorm::Lp { p }) => vecops::norm_p(u, p),
            (Coords::Grid { dim, .. }, CoreNorm::Sup) => {
                u.chunks(*dim).map(vecops::norm2).fold(0.0, f64::max)
            }
            (Coords::Grid { breaks, dim }, CoreNorm::Lp { p }) => {
                piecewise::lp_norm(&grid_core(breaks, *dim, u), p).expect("exponent validated")
            }
        }
    }

    fn norm(&self, u: &[f64]) -> f64 {
        self.composite.combine(self.core_norm(u), vecops::norm2(&u[self.n_core..]))
    }

    fn value(&self, u: &[f64]) -> f64 {
        vecops::dot(&self.coeffs, u)
    }

    /// Extreme points of the core ball when it is a polytope.
    fn core_vertices(&self) -> Option<Vec<Vec<f64>>> {
        let m = self.n_core;
        if m == 0 {
            return Some(vec![Vec::new()]);
        }
        let cross = || {
            (0..m)
                .flat_map(|i| {
                    [1.0, -1.0].map(|s| {
                        let mut v = vec![0.0; m];
                        v[i] = s;
                        v
                    })
                })
                .collect()
        };
        let cube = || {
            (0..1usize << m)
                .map(|mask| (0..m).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
                .collect()
        };
        match (&self.coords, self.core) {
            (Coords::Sequence, CoreNorm::Lp { p }) if p == 1.0 => Some(cross()),
            (Coords::Sequence, CoreNorm::Sup) => Some(cube()),
            (Coords::Grid { dim: 1, .. }, CoreNorm::Sup) => Some(cube()),
            _ => None,
        }
    }

    /// Extreme points of the full ball: the composite rule must be polyhedral
    /// and the limit slot one-dimensional.
    fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        let p1 = matches!(self.composite, CompositeNorm::Sum)
            || matches!(self.composite, CompositeNorm::PComposite { p } if p == 1.0);
        let max = matches!(self.composite, CompositeNorm::Max);
        if !(p1 || max) || self.limit_dim() != 1 {
            return None;
        }
        let core = self.core_vertices()?;
        let join = |v: &[f64], a: f64| {
            let mut u = v.to_vec();
            u.push(a);
            u
        };
        let mut out = Vec::new();
        if p1 {
            out.extend(core.iter().map(|v| join(v, 0.0)));
            let zero = vec![0.0; self.n_core];
            out.push(join(&zero, 1.0));
            out.push(join(&zero, -1.0));
        } else {
            for v in &core {
                out.push(join(v, 1.0));
                out.push(join(v, -1.0));
            }
        }
        Some(out)
    }

    fn witness(&self, u: &[f64]) -> serde_json::Value {
        let (core, limit) = u.split_at(self.n_core);
        match &self.coords {
            Coords::Sequence => {
                serde_json::to_value(LimSequence::new(core.to_vec(), limit[0])).expect("plain data")
            }
            Coords::Grid { breaks, dim } => {
                let x = grid_element(breaks, *dim, self.n_core, u).expect("grid validated");
                serde_json::to_value(x).expect("plain data")
            }
        }
    }
}

fn functional_dim(f: &DualFunctional) -> Result<usize> {
    match f {
        DualFunctional::Measure(m) => Ok(m.dim()),
        DualFunctional::Extended(e) => Ok(e.mu_tilde.dim()),
        DualFunctional::Density(d) => Ok(d.dim()),
        DualFunctional::Sobolev(s) => Ok(s.alpha().len()),
        other => Err(Error::Unsupported(format!("dual norm of a {} functional", other.form()))),
    }
}

fn grid_core(breaks: &[f64], dim: usize, core: &[f64]) -> GridFunction {
    let mut values: Vec<Vec<f64>> = core.chunks(dim).map(<[f64]>::to_vec).collect();
    values.push(vec![0.0; dim]);
    GridFunction::new(dim, breaks.to_vec(), values).expect("grid validated")
}

fn grid_element(breaks: &[f64], dim: usize, n_core: usize, u: &[f64]) -> Result<LimFunctionHalf> {
    LimFunctionHalf::new(grid_core(breaks, dim, &u[..n_core]), u[n_core..].to_vec())
}

fn normalize(model: &Model, u: &mut [f64]) -> bool {
    let n = model.norm(u);
    if n > 0.0 && n.is_finite() {
        vecops::scale_in_place(u, 1.0 / n);
        true
    } else {
        false
    }
}

/// Ascent of `c·u / N(u)` on the unit sphere from `u`: finite-difference
/// gradient steps, then random-direction search to get past kinks.
fn ascend(model: &Model, mut u: Vec<f64>, rng: &mut ChaCha8Rng) -> (f64, Vec<f64>) {
    let d = u.len();
    if !normalize(model, &mut u) {
        return (f64::NEG_INFINITY, u);
    }
    let ratio = |v: &[f64]| model.value(v) / model.norm(v);
    let mut best = model.value(&u);
    let mut step = 0.25;
    for _ in 0..2000 {
        let mut grad = vec![0.0; d];
        for i in 0..d {
            let h = 1e-7;
            let mut up = u.clone();
            let mut dn = u.clone();
            up[i] += h;
            dn[i] -= h;
            grad[i] = (ratio(&up) - ratio(&dn)) / (2.0 * h);
        }
        let gn = vecops::norm2(&grad);
        if !(gn > 1e-14) {
            break;
        }
        let mut moved = false;
        while step > 1e-13 {
            let mut cand = u.clone();
            vecops::axpy(&mut cand, step / gn, &grad);
            if normalize(model, &mut cand) && model.value(&cand) > best {
                best = model.value(&cand);
                u = cand;
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let mut radius = 0.1;
    while radius > 1e-12 {
        let mut moved = false;
        for _ in 0..8 * d {
            let mut cand = u.clone();
            for c in cand.iter_mut() {
                *c += radius * rng.gen_range(-1.0..1.0);
            }
            if normalize(model, &mut cand) && model.value(&cand) > best {
                best = model.value(&cand);
                u = cand;
                moved = true;
            }
        }
        if !moved {
            radius *= 0.5;
        }
    }
    (best, u)
}

fn search(model: &Model) -> OracleReport {
    if let Some(vertices) = model.vertices() {
        let (value, u) = vertices
            .iter()
            .map(|v| (model.value(v), v))
            .fold((f64::NEG_INFINITY, &vertices[0]), |acc, x| if x.0 > acc.0 { x } else { acc });
        return OracleReport {
            value,
            certified: true,
            gap: Some(0.0),
            restarts: 0,
            witness: model.witness(u),
        };
    }
    let d = model.coeffs.len();
    let runs: Vec<(f64, Vec<f64>)> = (0..RESTARTS)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add(k as u64));
            let start = if k == 0 && model.coeffs.iter().any(|c| *c != 0.0) {
                model.coeffs.clone()
            } else {
                (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()
            };
            ascend(model, start, &mut rng)
        })
        .collect();
    let (value, u) = runs
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |acc, x| if x.0 > acc.0 { x } else { acc });
    OracleReport {
        value: value.max(0.0),
        certified: false,
        gap: None,
        restarts: RESTARTS,
        witness: if u.is_empty() { serde_json::Value::Null } else { model.witness(&u) },
    }
}

/// Supremum of `|<f, x>|` over the unit ball of the chosen primal norm,
/// restricted to the truncation. Sequence forms use their own head length;
/// function forms need `grid` (at most eight points, starting at 0).
pub fn dual_norm_oracle(
    f: &DualFunctional,
    primal: CompositeNorm,
    core: CoreNorm,
    grid: Option<&[f64]>,
) -> Result<DualNormReport> {
    let model = Model::build(f, core, primal, grid)?;
    let oracle = search(&model);
    let alpha_norm = vecops::norm2(&model.coeffs[model.n_core..]);
    let core_dual = core_dual_norm(&model);
    let sum_formula = core_dual + alpha_norm;
    let q_composite_formula = primal.dual().combine(core_dual, alpha_norm);
    let mut matches = Vec::new();
    if (oracle.value - sum_formula).abs() <= MATCH_TOL {
        matches.push("sum".to_string());
    }
    if (oracle.value - q_composite_formula).abs() <= MATCH_TOL {
        matches.push("q-composite".to_string());
    }
    Ok(DualNormReport {
        form: f.form().to_string(),
        primal,
        core,
        oracle,
        core_dual,
        alpha_norm,
        sum_formula,
        q_composite_formula,
        matches,
    })
}

/// Dual of the core norm on the truncated coordinates: closed forms where the
/// core ball is an `ℓ_p` ball or a box of Euclidean balls, otherwise the same
/// search with the limit slot removed.
fn core_dual_norm(model: &Model) -> f64 {
    let c = &model.coeffs[..model.n_core];
    match (&model.coords, model.core) {
        (Coords::Sequence, CoreNorm::Sup) => vecops::norm1(c),
        (Coords::Sequence, CoreNorm::Lp { p }) => vecops::norm_p(c, vecops::conjugate_exponent(p)),
        (Coords::Grid { dim, .. }, CoreNorm::Sup) => c.chunks(*dim).map(vecops::norm2).sum(),
        (Coords::Grid { breaks, dim }, CoreNorm::Lp { p }) => {
            if model.n_core == 0 {
                return 0.0;
            }
            // A zero-dimensional limit slot turns the composite into the core norm.
            let core_only = Model {
                coeffs: c.to_vec(),
                n_core: model.n_core,
                coords: Coords::Grid { breaks: breaks.clone(), dim: *dim },
                core: CoreNorm::Lp { p },
                composite: CompositeNorm::Sum,
            };
            search(&core_only).value
        }
    }
}

