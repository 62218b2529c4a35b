use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::combinatorics::ExactRational;
use crate::error::{Error, Result};

/// `N` distinguishable particles sharing `M` energy quanta on levels `0..=M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemParams {
    n_particles: u64,
    energy_units: u64,
}

impl SystemParams {
    pub fn new(n_particles: u64, energy_units: u64) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidParams("need at least one particle".into()));
        }
        Ok(Self {
            n_particles,
            energy_units,
        })
    }

    pub fn n(&self) -> u64 {
        self.n_particles
    }

    pub fn m(&self) -> u64 {
        self.energy_units
    }

    /// Quanta per particle, `T = M/N`.
    pub fn temperature(&self) -> ExactRational {
        ExactRational::new(
            BigInt::from(self.energy_units),
            BigInt::from(self.n_particles),
        )
    }

    pub fn temperature_f64(&self) -> f64 {
        self.energy_units as f64 / self.n_particles as f64
    }

    pub fn check_level(&self, level: u64) -> Result<()> {
        if level > self.energy_units {
            return Err(Error::Domain(format!(
                "level {level} outside 0..={}",
                self.energy_units
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={}, M={}", self.n_particles, self.energy_units)
    }
}

/// A macrostate: `counts[j]` particles on level `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<u64>);

impl OccupationVector {
    pub fn new(counts: Vec<u64>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.0
    }

    pub fn get(&self, level: u64) -> u64 {
        self.0.get(level as usize).copied().unwrap_or(0)
    }

    pub fn particles(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn energy(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &c)| j as u64 * c)
            .sum()
    }

    /// Infers `(N, M)` from the vector itself.
    pub fn implied_params(&self) -> Result<SystemParams> {
        SystemParams::new(self.particles(), self.energy())
    }

    /// Checks both conservation laws against `params`; trailing levels above
    /// `M` must be empty.
    pub fn check_conservation(&self, params: &SystemParams) -> Result<()> {
        let (n, m) = (self.particles(), self.energy());
        if n != params.n() || m != params.m() {
            return Err(Error::Conservation(format!(
                "vector holds N={n}, M={m} but system has {params}"
            )));
        }
        Ok(())
    }
}

impl From<Vec<u64>> for OccupationVector {
    fn from(v: Vec<u64>) -> Self {
        Self(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_zero_particles() {
        assert!(SystemParams::new(0, 3).is_err());
        let p = SystemParams::new(4, 6).unwrap();
        assert_eq!(p.temperature(), ExactRational::new(3.into(), 2.into()));
        assert!(p.check_level(6).is_ok());
        assert!(p.check_level(7).is_err());
    }

    #[test]
    fn conservation_laws() {
        let p = SystemParams::new(2, 2).unwrap();
        assert!(OccupationVector::new(vec![1, 0, 1]).check_conservation(&p).is_ok());
        assert!(OccupationVector::new(vec![0, 2, 0]).check_conservation(&p).is_ok());
        assert!(OccupationVector::new(vec![2, 0, 0]).check_conservation(&p).is_err());
        assert!(OccupationVector::new(vec![0, 1, 1]).check_conservation(&p).is_err());
        assert_eq!(OccupationVector::new(vec![0, 2]).get(5), 0);
    }
}
