//! Information exchange between swarms.
//!
//! Swarms are ranked by their best cost. For each of the `d` best ranks a
//! particle of that swarm is drawn at random and its current solution is
//! copied into the swarm-best slot of the mirror rank at the bottom. Only
//! particle solutions are ever copied, never another swarm's best entry,
//! so a single solution cannot clone itself across swarms.

use alloc::vec::Vec;

use rand::Rng;

use crate::assignment::cost_of;
use crate::error::Error;
use crate::instance::QapInstance;

/// Index of a particle in the flat population buffers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParticleId(pub usize);

/// Best solution and its cost for each of `m` swarms, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmBestTable {
    n: usize,
    perms: Vec<usize>,
    costs: Vec<f64>,
}

impl SwarmBestTable {
    pub fn new(n: usize, perms: Vec<usize>, costs: Vec<f64>) -> Self {
        assert_eq!(perms.len(), n * costs.len());
        Self { n, perms, costs }
    }

    pub fn swarms(&self) -> usize {
        self.costs.len()
    }

    #[inline]
    pub fn perm(&self, swarm: usize) -> &[usize] {
        &self.perms[swarm * self.n..(swarm + 1) * self.n]
    }

    #[inline]
    pub fn cost(&self, swarm: usize) -> f64 {
        self.costs[swarm]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub(crate) fn perms(&self) -> &[usize] {
        &self.perms
    }

    pub(crate) fn set(&mut self, swarm: usize, perm: &[usize], cost: f64) {
        self.perms[swarm * self.n..(swarm + 1) * self.n].copy_from_slice(perm);
        self.costs[swarm] = cost;
    }
}

/// Current particle solutions grouped into equally sized swarms; particle
/// `p` belongs to swarm `p / swarm_size`.
#[derive(Debug, Clone, Copy)]
pub struct SwarmPopulation<'a> {
    pub positions: &'a [usize],
    pub n: usize,
    pub swarm_size: usize,
}

impl SwarmPopulation<'_> {
    fn particle(&self, id: ParticleId) -> &[usize] {
        &self.positions[id.0 * self.n..(id.0 + 1) * self.n]
    }
}

/// One swarm-best replacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationEvent {
    pub source_swarm: usize,
    /// The particle whose current solution was copied.
    pub source_particle: ParticleId,
    pub target_swarm: usize,
    pub previous_cost: f64,
    pub new_cost: f64,
}

/// Number of replacements per migration event for a migration factor `f`:
/// `⌊f·m⌋`, which stays below `m/2` for `f < 0.5`.
pub fn migration_depth(factor: f64, swarms: usize) -> Result<usize, Error> {
    if !(0.0..0.5).contains(&factor) {
        return Err(Error::InvalidConfig("migration factor must lie in [0, 0.5)"));
    }
    let depth = libm::floor(factor * swarms as f64) as usize;
    check_depth(depth, swarms)?;
    Ok(depth)
}

fn check_depth(depth: usize, swarms: usize) -> Result<(), Error> {
    if 2 * depth >= swarms && depth > 0 {
        return Err(Error::MigrationDepth { depth, swarms });
    }
    Ok(())
}

/// Replaces the swarm bests of the `depth` worst-ranked swarms with random
/// particle solutions from the `depth` best-ranked ones.
///
/// Ranks are 0-based: the swarm at rank `k` feeds the swarm at rank
/// `m − 1 − k`. Ties in cost rank by swarm index. The copied solution's cost
/// is recomputed and accepted even when it is worse than the one it replaces.
pub fn migrate<R: Rng + ?Sized>(
    depth: usize,
    bests: &mut SwarmBestTable,
    population: SwarmPopulation<'_>,
    instance: &QapInstance,
    rng: &mut R,
) -> Result<Vec<MigrationEvent>, Error> {
    let m = bests.swarms();
    check_depth(depth, m)?;
    if population.swarm_size == 0 {
        return Err(Error::EmptySwarm(0));
    }
    let available = population.positions.len() / population.n.max(1) / population.swarm_size;
    if available < m {
        return Err(Error::EmptySwarm(available));
    }
    if depth == 0 {
        return Ok(Vec::new());
    }

    let mut ranked: Vec<usize> = (0..m).collect();
    ranked.sort_by(|&a, &b| bests.cost(a).total_cmp(&bests.cost(b)).then(a.cmp(&b)));

    let mut events = Vec::with_capacity(depth);
    for k in 0..depth {
        let source_swarm = ranked[k];
        let target_swarm = ranked[m - 1 - k];
        let offset = rng.random_range(0..population.swarm_size);
        let source_particle = ParticleId(source_swarm * population.swarm_size + offset);
        let solution = population.particle(source_particle);
        let new_cost = cost_of(instance, solution);
        let previous_cost = bests.cost(target_swarm);
        bests.set(target_swarm, solution, new_cost);
        events.push(MigrationEvent { source_swarm, source_particle, target_swarm, previous_cost, new_cost });
    }
    Ok(events)
}
