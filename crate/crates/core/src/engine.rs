//! Population buffers and the bulk-synchronous iteration.
//!
//! All particle data lives in flat tables indexed by particle id: current
//! and next solutions, local bests (one length-`n` block per particle in
//! vector view), velocities (one `n × n` block per particle), and cost
//! tables. Particle `p` belongs to swarm `p / swarm_size`.
//!
//! One [`step`] runs five phases separated by barriers:
//!
//! 1. velocity update, parallel over particles;
//! 2. aggregation of `X + V` into `X_new`, parallel over particles;
//! 3. goal function of `X_new`, parallel over particles;
//! 4. local, swarm and global best update, then the `X`/`X_new` swap
//!    (sequential);
//! 5. migration (sequential, only with a non-zero migration factor).
//!
//! The parallel phases go through a [`ParticleExecutor`], which hands each
//! particle its own disjoint block of the buffer being written. Randomness
//! comes from streams keyed by `(seed, iteration, purpose, particle)`, so the
//! result does not depend on the executor or its worker count.

use alloc::vec;
use alloc::vec::Vec;
use core::mem::size_of;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::assignment::cost_of;
use crate::error::Error;
use crate::instance::QapInstance;
use crate::kernels::{aggregate, position_combine, velocity_update, PsoCoefficients};
use crate::migration::{migrate, migration_depth, MigrationEvent, ParticleId, SwarmBestTable, SwarmPopulation};
use crate::rng::{DrawPurpose, RandomStream};
use crate::stats::StatsOptions;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub swarms: usize,
    pub swarm_size: usize,
    pub coefficients: PsoCoefficients,
    /// Fraction of swarms whose best entry is replaced each iteration, in
    /// `[0, 0.5)`.
    pub migration_factor: f64,
    pub max_iterations: u64,
    /// Stop as soon as the best cost is at or below this value.
    pub target_cost: Option<f64>,
    pub seed: u64,
    /// Parallelism width. Has no effect on results.
    pub workers: usize,
    pub stats: StatsOptions,
    /// Initial velocities are uniform in `[-a, a]`.
    pub init_velocity_amplitude: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            swarms: 10,
            swarm_size: 50,
            coefficients: PsoCoefficients::default(),
            migration_factor: 0.0,
            max_iterations: 200,
            target_cost: None,
            seed: 1,
            workers: 1,
            stats: StatsOptions::default(),
            init_velocity_amplitude: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn particles(&self) -> usize {
        self.swarms * self.swarm_size
    }

    pub fn migration_depth(&self) -> Result<usize, Error> {
        migration_depth(self.migration_factor, self.swarms)
    }

    pub fn validate(&self, n: usize) -> Result<(), Error> {
        if self.swarms == 0 || self.swarm_size == 0 {
            return Err(Error::InvalidConfig("swarms and swarm size must be positive"));
        }
        if self.swarms.checked_mul(self.swarm_size).is_none() {
            return Err(Error::InvalidConfig("particle count overflows"));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be positive"));
        }
        if !(self.init_velocity_amplitude > 0.0 && self.init_velocity_amplitude.is_finite()) {
            return Err(Error::InvalidConfig("initial velocity amplitude must be positive"));
        }
        if self.stats.stride == 0 || self.stats.pmf_bins == 0 {
            return Err(Error::InvalidConfig("stats stride and pmf bins must be positive"));
        }
        self.coefficients.validate(n)?;
        self.migration_depth()?;
        Ok(())
    }
}

/// Bytes held by the population buffers for `particles` particles split into
/// `swarms` swarms on a problem of size `n`.
pub fn buffer_bytes(n: usize, particles: usize, swarms: usize) -> u64 {
    let (n, particles, swarms) = (n as u64, particles as u64, swarms as u64);
    let idx = size_of::<usize>() as u64;
    let real = size_of::<f64>() as u64;
    // X, X_new and P^L in vector view, V dense.
    let particle_blocks = particles * (3 * n * idx + n * n * real);
    let tables = particles * 2 * real + swarms * (n * idx + real);
    particle_blocks + tables
}

/// Runs a phase over every particle, handing each call the particle id and
/// that particle's `block`-sized chunk of `data`.
///
/// Implementations may call `f` concurrently and in any order; the call
/// returns only after every particle is done, which is the phase barrier.
pub trait ParticleExecutor {
    fn for_each_block<T, F>(&self, data: &mut [T], block: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send;
}

/// Runs every particle on the calling thread, in id order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ParticleExecutor for Sequential {
    fn for_each_block<T, F>(&self, data: &mut [T], block: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        for (p, chunk) in data.chunks_exact_mut(block).enumerate() {
            f(p, chunk);
        }
    }
}

/// Best solution observed so far in the run.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSoFar {
    pub perm: Vec<usize>,
    pub cost: f64,
    /// Iteration in which the cost was first reached; 0 is initialization.
    pub iteration: u64,
    pub particle: ParticleId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    n: usize,
    swarm_size: usize,
    positions: Vec<usize>,
    next_positions: Vec<usize>,
    velocities: Vec<f64>,
    local_best: Vec<usize>,
    costs: Vec<f64>,
    local_best_costs: Vec<f64>,
    swarm_best: SwarmBestTable,
    iteration: u64,
    best: BestSoFar,
}

/// What one [`step`] changed.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub iteration: u64,
    pub improved_local_bests: usize,
    pub improved_swarm_bests: usize,
    pub best_improved: bool,
    pub migrations: Vec<MigrationEvent>,
}

fn try_buffer<T: Clone>(len: usize, fill: T, config: &SolverConfig, n: usize) -> Result<Vec<T>, Error> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| Error::Allocation {
        bytes: buffer_bytes(n, config.particles(), config.swarms),
        particles: config.particles(),
        n,
    })?;
    v.resize(len, fill);
    Ok(v)
}

/// Draws a random permutation and velocity for every particle, evaluates
/// them and seeds the local, swarm and global bests.
pub fn init_population(config: &SolverConfig, instance: &QapInstance) -> Result<PopulationState, Error> {
    let n = instance.n();
    config.validate(n)?;
    let particles = config.particles();
    let nn = n * n;
    let mut positions = try_buffer(particles * n, 0usize, config, n)?;
    let next_positions = try_buffer(particles * n, 0usize, config, n)?;
    let mut velocities = try_buffer(particles * nn, 0.0f64, config, n)?;
    let mut costs = try_buffer(particles, 0.0f64, config, n)?;

    let a = config.init_velocity_amplitude;
    for p in 0..particles {
        let mut rng = RandomStream::particle(config.seed, p, 0, DrawPurpose::Init);
        let perm = &mut positions[p * n..(p + 1) * n];
        for (i, slot) in perm.iter_mut().enumerate() {
            *slot = i;
        }
        perm.shuffle(&mut rng);
        for v in &mut velocities[p * nn..(p + 1) * nn] {
            *v = rng.random_range(-a..=a);
        }
        costs[p] = cost_of(instance, perm);
    }

    let mut swarm_perms = Vec::with_capacity(config.swarms * n);
    let mut swarm_costs = Vec::with_capacity(config.swarms);
    for s in 0..config.swarms {
        let p = argmin(&costs[s * config.swarm_size..(s + 1) * config.swarm_size]) + s * config.swarm_size;
        swarm_perms.extend_from_slice(&positions[p * n..(p + 1) * n]);
        swarm_costs.push(costs[p]);
    }
    let p = argmin(&costs);
    let best = BestSoFar { perm: positions[p * n..(p + 1) * n].to_vec(), cost: costs[p], iteration: 0, particle: ParticleId(p) };

    Ok(PopulationState {
        n,
        swarm_size: config.swarm_size,
        local_best: positions.clone(),
        local_best_costs: costs.clone(),
        positions,
        next_positions,
        velocities,
        costs,
        swarm_best: SwarmBestTable::new(n, swarm_perms, swarm_costs),
        iteration: 0,
        best,
    })
}

/// Index of the first minimum.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Advances the population by one iteration.
pub fn step<E: ParticleExecutor>(
    state: &mut PopulationState,
    instance: &QapInstance,
    config: &SolverConfig,
    executor: &E,
) -> Result<StepReport, Error> {
    let n = state.n;
    if instance.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: instance.n() });
    }
    if config.swarm_size != state.swarm_size || config.swarms != state.swarms() {
        return Err(Error::InvalidConfig("configuration does not match the population"));
    }
    config.validate(n)?;
    let depth = config.migration_depth()?;
    let t = state.iteration + 1;
    let seed = config.seed;
    let coeffs = config.coefficients;
    let swarm_size = state.swarm_size;
    let nn = n * n;

    let PopulationState {
        positions,
        next_positions,
        velocities,
        local_best,
        costs,
        local_best_costs,
        swarm_best,
        iteration,
        best,
        ..
    } = state;

    // (1) velocity
    {
        let positions = &*positions;
        let local_best = &*local_best;
        let swarm_best = &*swarm_best;
        executor.for_each_block(velocities, nn, |p, v| {
            let mut rng = RandomStream::particle(seed, p, t, DrawPurpose::Velocity);
            let r2 = rng.unit();
            let r3 = rng.unit();
            velocity_update(
                v,
                &positions[p * n..(p + 1) * n],
                &local_best[p * n..(p + 1) * n],
                swarm_best.perm(p / swarm_size),
                &coeffs,
                r2,
                r3,
            )
            .expect("inputs validated");
        });
    }

    // (2) aggregation
    {
        let positions = &*positions;
        let velocities = &*velocities;
        executor.for_each_block(next_positions, n, |p, out| {
            let mut rng = RandomStream::particle(seed, p, t, DrawPurpose::Aggregation);
            let x = &positions[p * n..(p + 1) * n];
            let mut combined = vec![0.0; nn];
            position_combine(x, &velocities[p * nn..(p + 1) * nn], &mut combined).expect("block sizes");
            aggregate(&coeffs, &combined, x, &mut rng, out).expect("inputs validated");
        });
    }

    // (3) goal function
    {
        let next_positions = &*next_positions;
        executor.for_each_block(costs, 1, |p, cost| {
            cost[0] = cost_of(instance, &next_positions[p * n..(p + 1) * n]);
        });
    }

    // (4) best update
    let mut report = StepReport {
        iteration: t,
        improved_local_bests: 0,
        improved_swarm_bests: 0,
        best_improved: false,
        migrations: Vec::new(),
    };
    for p in 0..costs.len() {
        if costs[p] < local_best_costs[p] {
            local_best_costs[p] = costs[p];
            local_best[p * n..(p + 1) * n].copy_from_slice(&next_positions[p * n..(p + 1) * n]);
            report.improved_local_bests += 1;
            let swarm = p / swarm_size;
            if costs[p] < swarm_best.cost(swarm) {
                swarm_best.set(swarm, &local_best[p * n..(p + 1) * n], costs[p]);
                report.improved_swarm_bests += 1;
            }
        }
    }
    let p = argmin(costs);
    if costs[p] < best.cost {
        *best = BestSoFar {
            perm: next_positions[p * n..(p + 1) * n].to_vec(),
            cost: costs[p],
            iteration: t,
            particle: ParticleId(p),
        };
        report.best_improved = true;
    }
    core::mem::swap(positions, next_positions);

    // (5) migration
    if depth > 0 {
        let mut rng = RandomStream::host(seed, t, DrawPurpose::Migration);
        let population = SwarmPopulation { positions, n, swarm_size };
        report.migrations = migrate(depth, swarm_best, population, instance, &mut rng)?;
    }

    *iteration = t;
    Ok(report)
}

impl PopulationState {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn particles(&self) -> usize {
        self.costs.len()
    }

    pub fn swarms(&self) -> usize {
        self.swarm_best.swarms()
    }

    pub fn swarm_size(&self) -> usize {
        self.swarm_size
    }

    pub fn swarm_of(&self, p: usize) -> usize {
        p / self.swarm_size
    }

    /// Number of completed iterations; 0 right after initialization.
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn position(&self, p: usize) -> &[usize] {
        &self.positions[p * self.n..(p + 1) * self.n]
    }

    pub fn velocity(&self, p: usize) -> &[f64] {
        let nn = self.n * self.n;
        &self.velocities[p * nn..(p + 1) * nn]
    }

    pub fn local_best(&self, p: usize) -> &[usize] {
        &self.local_best[p * self.n..(p + 1) * self.n]
    }

    /// Costs of the current solutions, indexed by particle.
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn local_best_costs(&self) -> &[f64] {
        &self.local_best_costs
    }

    pub fn swarm_best(&self) -> &SwarmBestTable {
        &self.swarm_best
    }

    pub fn best(&self) -> &BestSoFar {
        &self.best
    }

    /// Flat tables in particle-id order: current solutions, velocities,
    /// local bests and swarm bests.
    pub fn buffers(&self) -> (&[usize], &[f64], &[usize], &[usize]) {
        (&self.positions, &self.velocities, &self.local_best, self.swarm_best.perms())
    }
}
