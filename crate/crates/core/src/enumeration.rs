//! Ground truth by exhaustive enumeration of macrostates.
//!
//! Nothing here reuses the closed-form machinery: multiplicities come from
//! factorial products computed locally and every normalization is the total
//! weight of the enumerated stream itself.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::ExactRational;
use crate::distributions::DistributionTable;
use crate::error::{Error, Result};
use crate::system::{OccupationVector, SystemParams};

/// Default ceiling on desk-scale enumeration.
pub const DEFAULT_ENUM_CAP: EnumerationCap = EnumerationCap {
    max_n: 12,
    max_m: 16,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationCap {
    pub max_n: u64,
    pub max_m: u64,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        DEFAULT_ENUM_CAP
    }
}

impl EnumerationCap {
    pub fn check(&self, params: &SystemParams) -> Result<()> {
        if params.n() > self.max_n || params.m() > self.max_m {
            return Err(Error::EnumerationCap {
                n: params.n(),
                m: params.m(),
                max_n: self.max_n,
                max_m: self.max_m,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMacrostate {
    pub state: OccupationVector,
    pub multiplicity: BigInt,
}

#[derive(Clone, Debug)]
struct Frame {
    level: u64,
    count: u64,
    max: u64,
    particles_before: u64,
    energy_before: u64,
}

/// Streams every macrostate of `(N, M)` exactly once with its multiplicity.
///
/// Levels are filled from `M` down to `1` by depth-first descent, each level
/// taking the smallest count that still leaves the remaining energy reachable
/// by the remaining particles; level 0 absorbs whatever particles are left.
/// The resulting order is not part of the contract.
#[derive(Clone, Debug)]
pub struct Macrostates {
    n: u64,
    m: u64,
    counts: Vec<u64>,
    stack: Vec<Frame>,
    started: bool,
    done: bool,
}

impl Macrostates {
    pub fn new(params: &SystemParams) -> Self {
        Self {
            n: params.n(),
            m: params.m(),
            counts: vec![0; params.m() as usize + 1],
            stack: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn descend(&mut self, top: u64, mut particles: u64, mut energy: u64) {
        for level in (1..=top).rev() {
            let min = energy.saturating_sub(particles * (level - 1));
            let max = particles.min(energy / level);
            debug_assert!(min <= max, "pruning left an infeasible branch");
            self.stack.push(Frame {
                level,
                count: min,
                max,
                particles_before: particles,
                energy_before: energy,
            });
            self.counts[level as usize] = min;
            particles -= min;
            energy -= min * level;
        }
        debug_assert_eq!(energy, 0);
        self.counts[0] = particles;
    }

    fn advance(&mut self) -> bool {
        while let Some(frame) = self.stack.last_mut() {
            if frame.count < frame.max {
                frame.count += 1;
                let (level, count) = (frame.level, frame.count);
                let particles = frame.particles_before - count;
                let energy = frame.energy_before - count * level;
                self.counts[level as usize] = count;
                self.descend(level - 1, particles, energy);
                return true;
            }
            self.counts[frame.level as usize] = 0;
            self.stack.pop();
        }
        false
    }
}

impl Iterator for Macrostates {
    type Item = WeightedMacrostate;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend(self.m, self.n, self.m);
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        let state = OccupationVector::new(self.counts.clone());
        debug_assert_eq!(state.particles(), self.n);
        debug_assert_eq!(state.energy(), self.m);
        let multiplicity = multiplicity(&self.counts);
        Some(WeightedMacrostate {
            state,
            multiplicity,
        })
    }
}

fn multiplicity(counts: &[u64]) -> BigInt {
    let n: u64 = counts.iter().sum();
    let numer = (2..=n).fold(BigInt::one(), |acc, i| acc * i);
    let denom = counts.iter().fold(BigInt::one(), |acc, &c| {
        (2..=c).fold(acc, |a, i| a * i)
    });
    numer / denom
}

pub fn enumerate_macrostates(params: &SystemParams) -> Macrostates {
    Macrostates::new(params)
}

/// Like [`enumerate_macrostates`] but refuses instances above `cap`.
pub fn enumerate_macrostates_capped(
    params: &SystemParams,
    cap: &EnumerationCap,
) -> Result<Macrostates> {
    cap.check(params)?;
    Ok(Macrostates::new(params))
}

/// Total number of microstates, `C(M+N-1, N-1)`.
pub fn microstate_count(params: &SystemParams) -> BigInt {
    crate::combinatorics::binomial(
        (params.m() + params.n() - 1) as i64,
        (params.n() - 1) as i64,
    )
}

/// Weighted sum of `f(state)` over all macrostates, divided by the total weight.
fn weighted_average<F>(params: &SystemParams, f: F) -> ExactRational
where
    F: Fn(&OccupationVector) -> BigInt,
{
    let mut total = BigInt::zero();
    let mut acc = BigInt::zero();
    for ws in enumerate_macrostates(params) {
        acc += f(&ws.state) * &ws.multiplicity;
        total += ws.multiplicity;
    }
    ExactRational::new(acc, total)
}

/// `<n_j^m>` by direct weighted summation.
pub fn oracle_moment(params: &SystemParams, level: u64, order: u32) -> Result<ExactRational> {
    params.check_level(level)?;
    Ok(weighted_average(params, |s| {
        num_traits::pow(BigInt::from(s.get(level)), order as usize)
    }))
}

/// `Var(x_j)` of the density `x_j = n_j / N`, by enumeration.
pub fn oracle_density_variance(params: &SystemParams, level: u64) -> Result<ExactRational> {
    let n = ExactRational::from_integer(BigInt::from(params.n()));
    let first = oracle_moment(params, level, 1)? / &n;
    let second = oracle_moment(params, level, 2)? / (&n * &n);
    Ok(second - &first * &first)
}

/// Exact distribution of `n_j` over `0..=N`.
pub fn oracle_pdf(params: &SystemParams, level: u64) -> Result<DistributionTable<ExactRational>> {
    params.check_level(level)?;
    let mut weights = vec![BigInt::zero(); params.n() as usize + 1];
    let mut total = BigInt::zero();
    for ws in enumerate_macrostates(params) {
        weights[ws.state.get(level) as usize] += &ws.multiplicity;
        total += ws.multiplicity;
    }
    let probabilities = weights
        .into_iter()
        .map(|w| ExactRational::new(w, total.clone()))
        .collect();
    Ok(DistributionTable::exact((0..=params.n()).collect(), probabilities))
}

fn check_levels(params: &SystemParams, levels: &[u64]) -> Result<()> {
    for (i, &l) in levels.iter().enumerate() {
        params.check_level(l)?;
        if levels[..i].contains(&l) {
            return Err(Error::Domain(format!("level {l} listed twice")));
        }
    }
    Ok(())
}

/// Probability that `n_{levels[s]} = counts[s]` for every `s` at once.
///
/// Levels must be distinct and within `0..=M`; their order is irrelevant as
/// long as `counts` is ordered the same way.
pub fn oracle_joint_pdf(
    params: &SystemParams,
    levels: &[u64],
    counts: &[u64],
) -> Result<ExactRational> {
    check_levels(params, levels)?;
    if levels.len() != counts.len() {
        return Err(Error::Domain("levels and counts differ in length".into()));
    }
    Ok(weighted_average(params, |s| {
        let hit = levels.iter().zip(counts).all(|(&l, &c)| s.get(l) == c);
        if hit {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    }))
}

/// Every non-zero joint probability over `levels` in one enumeration pass,
/// keyed by the count tuple.
pub fn oracle_joint_table(
    params: &SystemParams,
    levels: &[u64],
) -> Result<BTreeMap<Vec<u64>, ExactRational>> {
    check_levels(params, levels)?;
    let mut weights: BTreeMap<Vec<u64>, BigInt> = BTreeMap::new();
    let mut total = BigInt::zero();
    for ws in enumerate_macrostates(params) {
        let key: Vec<u64> = levels.iter().map(|&l| ws.state.get(l)).collect();
        *weights.entry(key).or_insert_with(BigInt::zero) += &ws.multiplicity;
        total += ws.multiplicity;
    }
    Ok(weights
        .into_iter()
        .map(|(k, w)| (k, ExactRational::new(w, total.clone())))
        .collect())
}
