//! Uniform microstate sampling by stars and bars.
//!
//! A microstate is a weak composition of `M` into `N` labelled parts, and those
//! are in bijection with the `(N-1)`-subsets of `M+N-1` positions (the bars).
//! Sampling a uniform subset therefore samples microstates uniformly.
//!
//! Work is split into fixed chunks of [`CHUNK_SIZE`] draws. Chunk `c` draws
//! from ChaCha8 seeded with the configured seed on stream `c`, and chunk tallies
//! are integers, so reports are bit-identical for any thread count.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::combinatorics::multinomial_weight;
use crate::distributions::DistributionTable;
use crate::enumeration::{enumerate_macrostates_capped, microstate_count, EnumerationCap};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::moments::{exact_moment, MomentSpec};
use crate::system::{OccupationVector, SystemParams};

pub const CHUNK_SIZE: u64 = 1 << 14;

/// |z| above this is flagged.
pub const Z_FLAG: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub params: SystemParams,
    pub sample_count: u64,
    pub seed: u64,
    /// Highest level tracked by [`empirical_stats`]; `None` tracks all of `0..=M`.
    pub level_cutoff: Option<u64>,
}

impl SamplerConfig {
    pub fn new(params: SystemParams, sample_count: u64, seed: u64) -> Result<Self> {
        if sample_count == 0 {
            return Err(Error::Domain("sample_count must be at least 1".into()));
        }
        Ok(Self {
            params,
            sample_count,
            seed,
            level_cutoff: None,
        })
    }

    pub fn with_level_cutoff(mut self, cutoff: u64) -> Self {
        self.level_cutoff = Some(cutoff);
        self
    }

    fn top_level(&self) -> u64 {
        self.level_cutoff.map_or(self.params.m(), |c| c.min(self.params.m()))
    }

    fn chunks(&self) -> Vec<(u64, u64)> {
        let full = self.sample_count / CHUNK_SIZE;
        let rest = self.sample_count % CHUNK_SIZE;
        let mut out: Vec<(u64, u64)> = (0..full).map(|c| (c, CHUNK_SIZE)).collect();
        if rest > 0 {
            out.push((full, rest));
        }
        out
    }

    fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chunk);
        rng
    }
}

/// Reusable buffers for repeated draws at one `(N, M)`.
struct Sampler {
    n: u64,
    m: u64,
    slots: Vec<u32>,
    is_bar: Vec<bool>,
}

impl Sampler {
    fn new(params: &SystemParams) -> Self {
        let len = (params.m() + params.n() - 1) as usize;
        Self {
            n: params.n(),
            m: params.m(),
            slots: (0..len as u32).collect(),
            is_bar: vec![false; len],
        }
    }

    /// Overwrites `counts` (length `M+1`) with the occupation vector of one draw.
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R, counts: &mut [u64]) {
        let len = self.slots.len();
        let bars = (self.n - 1) as usize;
        // partial Fisher-Yates: the first `bars` slots become a uniform subset
        for i in 0..bars {
            let k = rng.random_range(i..len);
            self.slots.swap(i, k);
            self.is_bar[self.slots[i] as usize] = true;
        }
        counts.fill(0);
        let (mut run, mut particles, mut energy) = (0u64, 0u64, 0u64);
        for bar in self.is_bar.iter_mut() {
            if *bar {
                counts[run as usize] += 1;
                particles += 1;
                energy += run;
                run = 0;
                *bar = false;
            } else {
                run += 1;
            }
        }
        counts[run as usize] += 1;
        particles += 1;
        energy += run;
        assert!(particles == self.n && energy == self.m, "sampler broke conservation");
    }
}

/// One uniformly random microstate, reported as its occupation vector.
pub fn sample_microstate<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> OccupationVector {
    let mut counts = vec![0u64; params.m() as usize + 1];
    Sampler::new(params).draw(rng, &mut counts);
    OccupationVector::new(counts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: u64,
    pub sum: u64,
    pub sum_sq: u128,
    /// `histogram[k]` counts draws with `n_j = k`, for `k = 0..=N`.
    pub histogram: Vec<u64>,
}

impl LevelStats {
    pub fn mean(&self, samples: u64) -> f64 {
        self.sum as f64 / samples as f64
    }

    /// Unbiased sample variance; zero for a single sample.
    pub fn variance(&self, samples: u64) -> f64 {
        if samples < 2 {
            return 0.0;
        }
        let s = samples as f64;
        let mean = self.sum as f64 / s;
        ((self.sum_sq as f64 - s * mean * mean) / (s - 1.0)).max(0.0)
    }

    pub fn standard_error(&self, samples: u64) -> f64 {
        (self.variance(samples) / samples as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub params: SystemParams,
    pub samples: u64,
    pub seed: u64,
    pub levels: Vec<LevelStats>,
}

impl EmpiricalStats {
    pub fn level(&self, level: u64) -> Option<&LevelStats> {
        self.levels.get(level as usize)
    }

    pub fn mean(&self, level: u64) -> Option<f64> {
        self.level(level).map(|l| l.mean(self.samples))
    }

    pub fn variance(&self, level: u64) -> Option<f64> {
        self.level(level).map(|l| l.variance(self.samples))
    }

    pub fn standard_error(&self, level: u64) -> Option<f64> {
        self.level(level).map(|l| l.standard_error(self.samples))
    }

    /// Relative frequencies of `n_j` over `0..=N`.
    pub fn histogram_table(&self, level: u64) -> Option<DistributionTable<f64>> {
        let stats = self.level(level)?;
        let s = self.samples as f64;
        Some(DistributionTable::empirical(
            (0..stats.histogram.len() as u64).collect(),
            stats.histogram.iter().map(|&c| c as f64 / s).collect(),
        ))
    }

    fn merge(&mut self, other: &EmpiricalStats) {
        self.samples += other.samples;
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            a.sum += b.sum;
            a.sum_sq += b.sum_sq;
            for (x, y) in a.histogram.iter_mut().zip(&b.histogram) {
                *x += y;
            }
        }
    }
}

pub fn empirical_stats(config: &SamplerConfig) -> EmpiricalStats {
    empirical_stats_with(config, Execution::default())
}

pub fn empirical_stats_with(config: &SamplerConfig, exec: Execution) -> EmpiricalStats {
    let params = config.params;
    let tracked = config.top_level() as usize + 1;
    let blank = |samples| EmpiricalStats {
        params,
        samples,
        seed: config.seed,
        levels: (0..tracked as u64)
            .map(|level| LevelStats {
                level,
                sum: 0,
                sum_sq: 0,
                histogram: vec![0; params.n() as usize + 1],
            })
            .collect(),
    };
    let parts = exec.map_slice(&config.chunks(), |&(chunk, draws)| {
        let mut rng = config.chunk_rng(chunk);
        let mut sampler = Sampler::new(&params);
        let mut counts = vec![0u64; params.m() as usize + 1];
        let mut acc = blank(draws);
        for _ in 0..draws {
            sampler.draw(&mut rng, &mut counts);
            for (stats, &k) in acc.levels.iter_mut().zip(&counts[..tracked]) {
                stats.sum += k;
                stats.sum_sq += (k * k) as u128;
                stats.histogram[k as usize] += 1;
            }
        }
        acc
    });
    let mut total = blank(0);
    for part in &parts {
        total.merge(part);
    }
    total
}

/// How often each macrostate was drawn.
pub fn macrostate_frequencies(config: &SamplerConfig) -> BTreeMap<OccupationVector, u64> {
    macrostate_frequencies_with(config, Execution::default())
}

pub fn macrostate_frequencies_with(
    config: &SamplerConfig,
    exec: Execution,
) -> BTreeMap<OccupationVector, u64> {
    let params = config.params;
    let parts = exec.map_slice(&config.chunks(), |&(chunk, draws)| {
        let mut rng = config.chunk_rng(chunk);
        let mut sampler = Sampler::new(&params);
        let mut counts = vec![0u64; params.m() as usize + 1];
        let mut seen: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        for _ in 0..draws {
            sampler.draw(&mut rng, &mut counts);
            *seen.entry(counts.clone()).or_default() += 1;
        }
        seen
    });
    let mut out: BTreeMap<OccupationVector, u64> = BTreeMap::new();
    for part in parts {
        for (state, c) in part {
            *out.entry(OccupationVector::new(state)).or_default() += c;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ZScore {
    Value(f64),
    /// No sampling variance and the empirical mean equals the exact one.
    ExactMatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZEntry {
    pub level: u64,
    pub empirical_mean: f64,
    pub exact_mean: f64,
    pub standard_error: f64,
    pub z: ZScore,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZScoreReport {
    pub params: SystemParams,
    pub samples: u64,
    pub seed: u64,
    pub entries: Vec<ZEntry>,
}

impl ZScoreReport {
    pub fn flagged(&self) -> impl Iterator<Item = &ZEntry> {
        self.entries.iter().filter(|e| e.flagged)
    }

    pub fn all_within_band(&self) -> bool {
        self.flagged().next().is_none()
    }
}

/// `z_j = (empirical <n_j> - exact <n_j>) / standard error`.
pub fn z_score_report(config: &SamplerConfig, levels: &[u64]) -> Result<ZScoreReport> {
    z_score_report_with(config, levels, Execution::default())
}

pub fn z_score_report_with(
    config: &SamplerConfig,
    levels: &[u64],
    exec: Execution,
) -> Result<ZScoreReport> {
    for &level in levels {
        config.params.check_level(level)?;
    }
    let top = levels.iter().copied().max().unwrap_or(0);
    let mut run = config.clone();
    run.level_cutoff = Some(top);
    let stats = empirical_stats_with(&run, exec);
    let entries = levels
        .iter()
        .map(|&level| {
            let exact = exact_moment(&config.params, MomentSpec::new(level, 1))?
                .to_f64()
                .unwrap_or(f64::NAN);
            let empirical = stats.mean(level).expect("level tracked");
            let se = stats.standard_error(level).expect("level tracked");
            let z = if se > 0.0 {
                ZScore::Value((empirical - exact) / se)
            } else if empirical == exact {
                ZScore::ExactMatch
            } else {
                ZScore::Value(f64::INFINITY.copysign(empirical - exact))
            };
            let flagged = matches!(z, ZScore::Value(v) if v.is_nan() || v.abs() > Z_FLAG);
            Ok(ZEntry {
                level,
                empirical_mean: empirical,
                exact_mean: exact,
                standard_error: se,
                z,
                flagged,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ZScoreReport {
        params: config.params,
        samples: stats.samples,
        seed: config.seed,
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

/// Pearson chi-square of drawn macrostate counts against
/// `multiplicity / C(M+N-1, N-1)`, over every macrostate of the system.
pub fn uniformity_chi_square(config: &SamplerConfig, cap: EnumerationCap) -> Result<ChiSquareResult> {
    let observed = macrostate_frequencies(config);
    let total = microstate_count(&config.params).to_f64().unwrap_or(f64::NAN);
    let samples = config.sample_count as f64;
    let mut statistic = 0.0;
    let mut cells = 0u64;
    for weighted in enumerate_macrostates_capped(&config.params, &cap)? {
        let expected = samples
            * multinomial_weight(weighted.state.counts()).to_f64().unwrap_or(f64::NAN)
            / total;
        let seen = observed.get(&weighted.state).copied().unwrap_or(0) as f64;
        statistic += (seen - expected).powi(2) / expected;
        cells += 1;
    }
    if observed.len() as u64 > cells {
        return Err(Error::Conservation("sampler produced a non-existent macrostate".into()));
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map_err(|e| Error::Domain(e.to_string()))?
            .sf(statistic)
    };
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: dof,
        p_value,
    })
}
