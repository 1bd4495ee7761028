//! Named property suites behind a common trait, selected at run time.

mod convex;
mod hilbert;
mod lebesgue;
mod norms;
mod riesz;
mod sequence;
mod sobolev;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample;

pub const ALL: &str = "all";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random instances per sweep property.
    pub count: usize,
    /// Replace the first tolerance of the run by -1 so that property fails.
    pub inject_failure: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    /// Fails when an observed error exceeds the tolerance.
    Check,
    /// Reports a discrepancy without failing.
    Audit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub kind: PropertyKind,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub max_error: f64,
    pub tolerance: f64,
    /// Observed range of the property's headline quantity, if it has one.
    pub observed: Option<Range>,
    /// First failing instance (lowest index).
    pub witness: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub count: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// One checked instance: its error against the property and a serialized
/// description of the instance.
pub struct Observation {
    pub error: f64,
    pub value: Option<f64>,
    pub witness: serde_json::Value,
}

impl Observation {
    pub fn new(error: f64, witness: impl Serialize) -> Self {
        let witness = serde_json::to_value(witness).unwrap_or(serde_json::Value::Null);
        Observation { error, value: None, witness }
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }
}

/// Largest absolute difference between two equal-length slices.
pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Collects property results for one suite run.
pub struct Context<'a> {
    cfg: &'a SuiteConfig,
    suite: &'static str,
    inject: &'a mut bool,
    results: Vec<PropertyResult>,
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

impl Context<'_> {
    pub fn count(&self) -> usize {
        self.cfg.count
    }

    pub fn seed(&self) -> u64 {
        self.cfg.seed
    }

    fn tolerance(&mut self, tolerance: f64) -> f64 {
        if *self.inject {
            *self.inject = false;
            -1.0
        } else {
            tolerance
        }
    }

    /// Runs `f` on `n` instances, each with its own random stream.
    pub fn sweep<F>(&mut self, name: &str, tolerance: f64, n: usize, f: F)
    where
        F: Fn(&mut ChaCha8Rng) -> Result<Observation> + Sync,
    {
        let tolerance = self.tolerance(tolerance);
        let stream = fnv1a(&format!("{}/{}", self.suite, name));
        let seed = self.cfg.seed;
        let obs: Vec<Observation> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample::rng_for(seed, stream, i);
                f(&mut rng).unwrap_or_else(|e| Observation::new(f64::INFINITY, format!("error: {e}")))
            })
            .collect();
        self.results.push(summarize(name, PropertyKind::Check, tolerance, obs));
    }

    /// A deterministic property checked once.
    pub fn single<F>(&mut self, name: &str, tolerance: f64, f: F)
    where
        F: FnOnce() -> Result<Observation>,
    {
        let tolerance = self.tolerance(tolerance);
        let obs = f().unwrap_or_else(|e| Observation::new(f64::INFINITY, format!("error: {e}")));
        self.results.push(summarize(name, PropertyKind::Check, tolerance, vec![obs]));
    }

    /// Like [`Context::sweep`] but never fails; the witness is the worst instance.
    pub fn audit<F>(&mut self, name: &str, n: usize, f: F)
    where
        F: Fn(&mut ChaCha8Rng) -> Result<Observation> + Sync,
    {
        let stream = fnv1a(&format!("{}/{}", self.suite, name));
        let seed = self.cfg.seed;
        let obs: Vec<Observation> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample::rng_for(seed, stream, i);
                f(&mut rng).unwrap_or_else(|e| Observation::new(f64::INFINITY, format!("error: {e}")))
            })
            .collect();
        self.results.push(summarize(name, PropertyKind::Audit, 0.0, obs));
    }
}

fn summarize(name: &str, kind: PropertyKind, tolerance: f64, obs: Vec<Observation>) -> PropertyResult {
    let checked = obs.len();
    let mut max_error: f64 = 0.0;
    let mut failures = 0;
    let mut witness = None;
    let mut worst: Option<(f64, serde_json::Value)> = None;
    let mut observed: Option<Range> = None;
    for o in obs {
        let bad = !(o.error <= tolerance);
        if !(o.error <= max_error) {
            max_error = o.error;
        }
        if let Some(v) = o.value {
            observed = Some(match observed {
                None => Range { min: v, max: v },
                Some(r) => Range { min: r.min.min(v), max: r.max.max(v) },
            });
        }
        match kind {
            PropertyKind::Check if bad => {
                failures += 1;
                if witness.is_none() {
                    witness = Some(o.witness);
                }
            }
            PropertyKind::Audit if o.error > tolerance => {
                failures += 1;
                if worst.as_ref().map_or(true, |(e, _)| o.error > *e) {
                    worst = Some((o.error, o.witness));
                }
            }
            _ => {}
        }
    }
    if kind == PropertyKind::Audit {
        witness = worst.map(|w| w.1);
    }
    PropertyResult {
        name: name.to_string(),
        kind,
        passed: kind == PropertyKind::Audit || failures == 0,
        checked,
        failures,
        max_error,
        tolerance,
        observed,
        witness,
    }
}

pub trait PropertySuite: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn run(&self, ctx: &mut Context<'_>);
}

/// Suites by name, in registration order.
#[derive(Default)]
pub struct Registry {
    suites: Vec<Box<dyn PropertySuite>>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// All built-in suites.
    pub fn builtin() -> Self {
        let mut r = Registry::new();
        r.register(Box::new(norms::Norms));
        r.register(Box::new(riesz::RieszHalf));
        r.register(Box::new(riesz::RieszLine));
        r.register(Box::new(lebesgue::Lebesgue));
        r.register(Box::new(sequence::Sequence));
        r.register(Box::new(sobolev::Sobolev));
        r.register(Box::new(hilbert::Hilbert));
        r.register(Box::new(convex::Convex));
        r
    }

    /// Adds a suite, replacing any suite with the same name.
    pub fn register(&mut self, suite: Box<dyn PropertySuite>) {
        match self.suites.iter().position(|s| s.name() == suite.name()) {
            Some(i) => self.suites[i] = suite,
            None => self.suites.push(suite),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn PropertySuite> {
        self.suites.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    /// Runs one suite, or every suite for [`ALL`].
    pub fn run(&self, name: &str, cfg: &SuiteConfig) -> Result<VerifyReport> {
        let selected: Vec<&dyn PropertySuite> = if name == ALL {
            self.suites.iter().map(|s| s.as_ref()).collect()
        } else {
            vec![self.get(name).ok_or_else(|| Error::InvalidArgument(format!("unknown suite {name:?}")))?]
        };
        let mut inject = cfg.inject_failure;
        let suites: Vec<SuiteReport> = selected
            .into_iter()
            .map(|s| {
                let mut ctx = Context { cfg, suite: s.name(), inject: &mut inject, results: Vec::new() };
                s.run(&mut ctx);
                let properties = ctx.results;
                SuiteReport { suite: s.name().to_string(), passed: properties.iter().all(|p| p.passed), properties }
            })
            .collect();
        Ok(VerifyReport { seed: cfg.seed, count: cfg.count, passed: suites.iter().all(|s| s.passed), suites })
    }
}

#[cfg(test)]
mod tests;
