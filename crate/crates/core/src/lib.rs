//! Multi-swarm discrete particle swarm optimization for the quadratic
//! assignment problem.
//!
//! This crate is `no_std` and only needs `alloc`. It holds the algorithmic
//! pieces: QAPLIB text parsing, exact cost evaluation, the velocity and
//! aggregation kernels, migration between swarms, the phase-structured
//! iteration engine and the statistics collected per iteration. Threading,
//! file IO and timing live in the `qapswarm` companion crate, which plugs a
//! parallel [`engine::ParticleExecutor`] into the same engine.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assignment;
pub mod engine;
pub mod error;
pub mod instance;
pub mod kernels;
pub mod matrix;
pub mod migration;
pub mod rng;
pub mod stats;

pub use assignment::{evaluate_cost, gap, matrix_to_assignment, Assignment};
pub use engine::{
    buffer_bytes, init_population, step, BestSoFar, ParticleExecutor, PopulationState, Sequential, SolverConfig,
    StepReport,
};
pub use error::Error;
pub use instance::{parse_instance, ParseErrorKind, parse_reference_solution, ParseError, QapInstance, ReferenceSolution};
pub use kernels::{PsoCoefficients, SvMode, SxMode};
pub use matrix::SquareMatrix;
pub use migration::{migrate, migration_depth, MigrationEvent, ParticleId, SwarmBestTable};
pub use rng::{DrawPurpose, RandomStream};
pub use stats::{
    percentile, pmf, Histogram, IterationStats, StatsCollector, StatsOptions, SwarmPercentiles, PERCENTILE_RANKS,
};
