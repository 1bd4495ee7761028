//! Seeded random instances for property sweeps. Each instance draws from its
//! own ChaCha stream, so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::limcore::{LimFunctionHalf, LimFunctionLine, LimSequence};
use crate::measures::{Atom, MeasureDomain, SignedMeasure};
use crate::piecewise::{Density, GridFunction, StepFunction};

/// Generator for instance `index` of stream `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index);
    rng
}

fn vector(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-r..r)).collect()
}

fn increasing(rng: &mut ChaCha8Rng, start: f64, count: usize, max_gap: f64) -> Vec<f64> {
    let mut t = start;
    (0..count)
        .map(|_| {
            let now = t;
            t += rng.gen_range(0.05..max_gap);
            now
        })
        .collect()
}

/// Core on `[0, T]` with 1-6 pieces, `T <= 9`.
pub fn half(rng: &mut ChaCha8Rng, dim: usize) -> LimFunctionHalf {
    let pieces = rng.gen_range(1..=6);
    let breaks = increasing(rng, 0.0, pieces + 1, 1.5);
    let values = (0..=pieces).map(|i| if i == pieces { vec![0.0; dim] } else { vector(rng, dim, 2.0) }).collect();
    let core = GridFunction::new(dim, breaks, values).expect("valid grid");
    LimFunctionHalf::new(core, vector(rng, dim, 2.0)).expect("core vanishes at its end")
}

/// Line function from two random halves; continuous at 0 half of the time.
pub fn line(rng: &mut ChaCha8Rng, dim: usize) -> LimFunctionLine {
    let (x1, x2) = (half(rng, dim), half(rng, dim));
    let mut neg = x1.core().clone();
    if rng.gen_bool(0.5) {
        let left = x1.eval(0.0.into()).expect("0 in domain");
        let right = x2.eval(0.0.into()).expect("0 in domain");
        let mut values = neg.values().to_vec();
        for ((v, l), r) in values[0].iter_mut().zip(&left).zip(&right) {
            *v += r - l;
        }
        neg = GridFunction::new(dim, neg.breaks().to_vec(), values).expect("valid grid");
    }
    LimFunctionLine::from_halves(neg, x2.core().clone(), x1.limit().to_vec(), x2.limit().to_vec()).expect("valid halves")
}

/// Finite atoms on `[0, 6)` (a third of them on integers, so they meet
/// breakpoints) and, unless `atoms_only`, a step density.
pub fn half_measure(rng: &mut ChaCha8Rng, dim: usize, atoms_only: bool) -> SignedMeasure {
    let atoms = (0..rng.gen_range(0..=4))
        .map(|_| {
            let loc = if rng.gen_bool(1.0 / 3.0) { f64::from(rng.gen_range(0..6)) } else { rng.gen_range(0.0..6.0) };
            Atom::new(loc, vector(rng, dim, 2.0))
        })
        .collect();
    let density = if atoms_only || rng.gen_bool(0.3) {
        StepFunction::zero(dim)
    } else {
        let start = rng.gen_range(0.0..1.0);
        step(rng, dim, start)
    };
    SignedMeasure::new(MeasureDomain::Half, dim, atoms, density).expect("valid measure")
}

/// As [`half_measure`] with no atom at 0, which the left piece of a jumping
/// line function would read ambiguously.
pub fn half_measure_off_zero(rng: &mut ChaCha8Rng, dim: usize, atoms_only: bool) -> SignedMeasure {
    let m = half_measure(rng, dim, atoms_only);
    let atoms = m.atoms().iter().filter(|a| a.loc != 0.0.into()).cloned().collect();
    SignedMeasure::new(MeasureDomain::Half, dim, atoms, m.density().clone()).expect("valid measure")
}

pub fn step(rng: &mut ChaCha8Rng, dim: usize, start: f64) -> StepFunction {
    let cells = rng.gen_range(1..=4);
    let breaks = increasing(rng, start, cells + 1, 2.0);
    let values = (0..cells).map(|_| vector(rng, dim, 1.5)).collect();
    StepFunction::new(dim, breaks, values).expect("valid steps")
}

/// Step or piecewise-linear density supported in `[0, 10)`.
pub fn density(rng: &mut ChaCha8Rng, dim: usize) -> Density {
    let start = rng.gen_range(0.0..1.0);
    if rng.gen_bool(0.5) {
        Density::Step(step(rng, dim, start))
    } else {
        let k = rng.gen_range(2..=5);
        let breaks = increasing(rng, start, k, 2.0);
        let values = (0..k).map(|_| vector(rng, dim, 1.5)).collect();
        Density::Linear(GridFunction::new(dim, breaks, values).expect("valid grid"))
    }
}

pub fn sequence(rng: &mut ChaCha8Rng, len: usize) -> LimSequence {
    LimSequence::new(vector(rng, len, 2.0), rng.gen_range(-2.0..2.0))
}

pub fn reals(rng: &mut ChaCha8Rng, len: usize, r: f64) -> Vec<f64> {
    vector(rng, len, r)
}
