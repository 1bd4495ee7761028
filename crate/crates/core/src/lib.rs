//! Banach spaces of functions converging at infinity and executable dual-space
//! representations for them.

pub mod convex;
pub mod duals;
pub mod error;
pub mod extended;
pub mod hilbert;
pub mod limcore;
pub mod measures;
pub mod piecewise;
pub mod quad;
pub mod report;
pub mod sample;
pub mod suites;
pub mod vecops;

pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use limcore::{CompositeNorm, CoreNorm, LimFunctionHalf, LimFunctionLine, LimSequence};
pub use measures::{Atom, MeasureDomain, SignedMeasure};
pub use piecewise::{Density, GridFunction, StepFunction};
