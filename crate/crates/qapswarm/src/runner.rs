//! The timed iteration loop.

use std::time::{Duration, Instant};

use qapswarm_core::{
    gap, init_population, step, Assignment, IterationStats, ParticleExecutor, PopulationState, QapInstance,
    ReferenceSolution, SolverConfig, StatsCollector, StepReport,
};
use thiserror::Error;

use crate::executor::ThreadPoolExecutor;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Solver(#[from] qapswarm_core::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Assignment,
    pub cost: f64,
    /// Iteration at which `cost` was first reached.
    pub iteration: u64,
    /// Relative gap to the instance's reference value, when it has one.
    pub gap: Option<f64>,
    pub stats: Vec<IterationStats>,
    /// Number of steps executed.
    pub iterations: u64,
    pub init_time: Duration,
    pub total_time: Duration,
}

impl RunResult {
    /// Mean wall time per step, excluding initialization.
    pub fn mean_iteration_ms(&self) -> f64 {
        if self.iterations == 0 {
            return 0.0;
        }
        (self.total_time - self.init_time).as_secs_f64() * 1e3 / self.iterations as f64
    }

    pub fn solution(&self) -> ReferenceSolution {
        ReferenceSolution { n: self.best.n(), cost: self.cost, permutation: self.best.perm().to_vec() }
    }
}

/// Runs the solver on a thread pool with `config.workers` threads.
pub fn run(config: &SolverConfig, instance: &QapInstance) -> Result<RunResult, RunError> {
    run_with_observer(config, instance, |_, _| {})
}

/// Like [`run`], calling `observer` after initialization (with no report) and
/// after every step.
pub fn run_with_observer<F>(config: &SolverConfig, instance: &QapInstance, observer: F) -> Result<RunResult, RunError>
where
    F: FnMut(&PopulationState, Option<&StepReport>),
{
    config.validate(instance.n())?;
    let executor = ThreadPoolExecutor::new(config.workers)?;
    run_on(config, instance, &executor, observer)
}

/// Runs the solver with a caller-supplied executor. Stops after
/// `config.max_iterations` steps or once the best cost is at or below
/// `config.target_cost`.
pub fn run_on<E, F>(config: &SolverConfig, instance: &QapInstance, executor: &E, mut observer: F) -> Result<RunResult, RunError>
where
    E: ParticleExecutor,
    F: FnMut(&PopulationState, Option<&StepReport>),
{
    let start = Instant::now();
    let mut state = init_population(config, instance)?;
    let init_time = start.elapsed();
    observer(&state, None);

    let mut collector = StatsCollector::new(config.stats);
    let mut stats = Vec::new();
    stats.push(collector.collect(&state, ms(init_time)));

    let reached = |state: &PopulationState| config.target_cost.is_some_and(|t| state.best().cost <= t);
    while state.iteration() < config.max_iterations && !reached(&state) {
        let t0 = Instant::now();
        let report = step(&mut state, instance, config, executor)?;
        let elapsed = t0.elapsed();
        observer(&state, Some(&report));
        if collector.should_collect(state.iteration()) {
            stats.push(collector.collect(&state, ms(elapsed)));
        }
    }
    let total_time = start.elapsed();

    let best = state.best();
    Ok(RunResult {
        best: Assignment::from_perm(best.perm.clone())?,
        cost: best.cost,
        iteration: best.iteration,
        gap: instance.known_best().and_then(|r| gap(best.cost, r).ok()),
        stats,
        iterations: state.iteration(),
        init_time,
        total_time,
    })
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
