//! Per-iteration statistics over the population's costs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::engine::PopulationState;

/// Percentile ranks recorded every iteration.
pub const PERCENTILE_RANKS: [f64; 4] = [5.0, 25.0, 50.0, 75.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatsOptions {
    /// Record every `stride`-th iteration (iteration 0 always included).
    pub stride: u64,
    pub pmf_bins: usize,
    /// Record percentiles for every swarm, not only the leading one.
    pub all_swarm_percentiles: bool,
    /// Record measured iteration times. Off by default, in which case times
    /// are reported as zero and the series is a pure function of the run
    /// configuration.
    pub record_timing: bool,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self { stride: 1, pmf_bins: 60, all_swarm_percentiles: false, record_timing: false }
    }
}

/// Nearest-rank percentile: the `⌈rank/100 · len⌉`-th smallest value.
pub fn percentile(values: &[f64], rank: f64) -> Result<f64, Error> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(rank > 0.0 && rank < 100.0) {
        return Err(Error::InvalidRank(rank));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(nearest_rank(&sorted, rank))
}

fn nearest_rank(sorted: &[f64], rank: f64) -> f64 {
    let k = libm::ceil(rank / 100.0 * sorted.len() as f64) as usize;
    sorted[k.clamp(1, sorted.len()) - 1]
}

/// Equal-width histogram normalized to relative frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub freqs: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.freqs.len()
    }

    /// Lower and upper edge of bin `i`.
    pub fn edges(&self, i: usize) -> (f64, f64) {
        let width = (self.hi - self.lo) / self.bins() as f64;
        let lo = self.lo + width * i as f64;
        let hi = if i + 1 == self.bins() { self.hi } else { self.lo + width * (i + 1) as f64 };
        (lo, hi)
    }
}

/// Probability mass function of `values` over `bins` equal bins spanning
/// `[lo, hi]`. Values outside the range land in the first or last bin.
pub fn pmf(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram, Error> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidRange { lo, hi, bins });
    }
    let mut counts = vec![0usize; bins];
    let scale = bins as f64 / (hi - lo);
    for &v in values {
        let pos = libm::floor((v - lo) * scale);
        let idx = if pos < 0.0 { 0 } else { (pos as usize).min(bins - 1) };
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    Ok(Histogram { lo, hi, freqs: counts.into_iter().map(|c| c as f64 / total).collect() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmPercentiles {
    pub swarm: usize,
    /// Values at [`PERCENTILE_RANKS`].
    pub values: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub iteration: u64,
    /// Population percentiles at [`PERCENTILE_RANKS`].
    pub percentiles: [f64; 4],
    /// Lowest cost in the current population.
    pub best: f64,
    pub global_best: f64,
    /// Swarm-best cost of every swarm.
    pub swarm_bests: Vec<f64>,
    pub pmf: Histogram,
    pub time_ms: f64,
    /// Percentiles of the swarm holding the best-so-far solution, or of every
    /// swarm when enabled in [`StatsOptions`].
    pub swarm_percentiles: Vec<SwarmPercentiles>,
}

impl IterationStats {
    pub fn p5(&self) -> f64 {
        self.percentiles[0]
    }

    pub fn p25(&self) -> f64 {
        self.percentiles[1]
    }

    pub fn p50(&self) -> f64 {
        self.percentiles[2]
    }

    pub fn p75(&self) -> f64 {
        self.percentiles[3]
    }
}

/// Builds [`IterationStats`] from population snapshots. The PMF range is
/// fixed on the first call to `[min, max]` of the costs seen then, so later
/// histograms share one axis.
#[derive(Debug, Clone)]
pub struct StatsCollector {
    options: StatsOptions,
    range: Option<(f64, f64)>,
}

impl StatsCollector {
    pub fn new(options: StatsOptions) -> Self {
        Self { options, range: None }
    }

    pub fn options(&self) -> &StatsOptions {
        &self.options
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        self.range
    }

    pub fn should_collect(&self, iteration: u64) -> bool {
        iteration.is_multiple_of(self.options.stride)
    }

    pub fn collect(&mut self, state: &PopulationState, time_ms: f64) -> IterationStats {
        let mut sorted = state.costs().to_vec();
        sorted.sort_by(f64::total_cmp);
        let (lo, hi) = *self.range.get_or_insert_with(|| {
            let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
            if lo < hi { (lo, hi) } else { (lo - 0.5, hi + 0.5) }
        });
        let pmf = pmf(&sorted, self.options.pmf_bins, lo, hi).expect("non-empty population, valid range");

        let swarm_size = state.swarm_size();
        let swarms: Vec<usize> = if self.options.all_swarm_percentiles {
            (0..state.swarms()).collect()
        } else {
            vec![state.swarm_of(state.best().particle.0)]
        };
        let swarm_percentiles = swarms
            .into_iter()
            .map(|s| {
                let mut costs = state.costs()[s * swarm_size..(s + 1) * swarm_size].to_vec();
                costs.sort_by(f64::total_cmp);
                SwarmPercentiles { swarm: s, values: PERCENTILE_RANKS.map(|r| nearest_rank(&costs, r)) }
            })
            .collect();

        IterationStats {
            iteration: state.iteration(),
            percentiles: PERCENTILE_RANKS.map(|r| nearest_rank(&sorted, r)),
            best: sorted[0],
            global_best: state.best().cost,
            swarm_bests: state.swarm_best().costs().to_vec(),
            pmf,
            time_ms: if self.options.record_timing { time_ms } else { 0.0 },
            swarm_percentiles,
        }
    }
}
