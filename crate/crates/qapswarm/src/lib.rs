//! File IO, CSV export, a thread-pool executor and the timed run loop around
//! [`qapswarm_core`].
//!
//! ```no_run
//! use qapswarm::{io, run};
//! use qapswarm::core::SolverConfig;
//!
//! let instance = io::read_instance("data/qaplib/chr12c.dat")?;
//! let result = run(&SolverConfig::default(), &instance)?;
//! println!("{} at iteration {}", result.cost, result.iteration);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod executor;
pub mod export;
pub mod io;
pub mod runner;

pub use qapswarm_core as core;

pub use executor::ThreadPoolExecutor;
pub use export::{export_csv, ExportError};
pub use io::LoadError;
pub use runner::{run, run_on, run_with_observer, RunError, RunResult};
