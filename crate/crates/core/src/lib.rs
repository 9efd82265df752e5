//! Synthesis and behavioral verification of memristor-based direct-form
//! FIR filters.
//!
//! Target coefficients come from [`filter_design`]. [`synthesis`] maps each
//! coefficient onto a differential memristor pair drawn from a
//! resolution-limited [`device::MemristanceGrid`]. [`sim`] runs the sampled
//! analog circuit and [`analysis`] measures what came out.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the command-line
//! tool uses.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod device;
pub mod error;
pub mod filter_design;
pub mod scalar;
pub mod sim;
pub mod synthesis;

pub use error::{Error, Result};
pub use scalar::Real;

pub type FilterSpec64 = filter_design::FilterSpec<f64>;
pub type CoefficientSet64 = filter_design::CoefficientSet<f64>;
pub type MemristanceGrid64 = device::MemristanceGrid<f64>;
pub type MemristorState64 = device::MemristorState<f64>;
pub type DeviceParams64 = device::DeviceParams<f64>;
pub type SynthesisResult64 = synthesis::SynthesisResult<f64>;
pub type SearchConfig64 = synthesis::SearchConfig<f64>;
pub type Signal64 = sim::Signal<f64>;
pub type ToneSpec64 = sim::ToneSpec<f64>;
pub type CircuitConfig64 = sim::CircuitConfig<f64>;
pub type FrequencyResponse64 = analysis::FrequencyResponse<f64>;

pub type CoefficientSet32 = filter_design::CoefficientSet<f32>;
pub type MemristanceGrid32 = device::MemristanceGrid<f32>;
pub type SynthesisResult32 = synthesis::SynthesisResult<f32>;
pub type Signal32 = sim::Signal<f32>;
