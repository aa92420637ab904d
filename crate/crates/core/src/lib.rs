pub mod error;
pub mod operators;
pub mod problems;
pub mod rng;
pub mod sampling;
pub mod surrogate;
pub mod types;
pub mod engine;
pub mod harness;
