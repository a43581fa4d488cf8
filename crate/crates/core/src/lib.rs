//! Decentralized gradient methods with heterogeneous local step sizes and
//! exact worst-case analysis through performance estimation problems.

pub mod algorithms;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod pep;
pub mod problem;
pub mod scalar;
pub mod sdp;
pub mod smoothness;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ProblemInstanceF64 = problem::ProblemInstance<f64>;
pub type ProblemInstanceF32 = problem::ProblemInstance<f32>;
pub type TraceF64 = algorithms::AlgorithmTrace<f64>;
pub type TraceF32 = algorithms::AlgorithmTrace<f32>;
pub type SampleF64 = ingest::Sample<f64>;
pub type SampleF32 = ingest::Sample<f32>;
