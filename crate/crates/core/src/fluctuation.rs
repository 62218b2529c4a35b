//! Fluctuation measures of the whole occupation vector in the large-`N`
//! multinomial model with success probabilities `<x_l> = T^l/(T+1)^{l+1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::moments::mean_density_limit;

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("temperature must be positive and finite, got {t}")))
    }
}

/// `<n_l> = N <x_l>` for `l = 0..=M`.
pub fn mean_vector(n: u64, t: f64, m: u64) -> Result<Vec<f64>> {
    check_temperature(t)?;
    (0..=m)
        .map(|l| mean_density_limit(t, l).map(|p| n as f64 * p))
        .collect()
}

/// Multinomial covariance of `(n_0, ..., n_M)`:
/// `N p_l (1 - p_l)` on the diagonal and `-N p_a p_b` off it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    n: u64,
    t: f64,
    m: u64,
    entries: Vec<Vec<f64>>,
}

impl CovarianceMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn params(&self) -> (u64, f64, u64) {
        (self.n, self.t, self.m)
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a][b]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|l| self.entries[l][l]).sum()
    }

    pub fn row_sum(&self, a: usize) -> f64 {
        self.entries[a].iter().sum()
    }
}

pub fn covariance_matrix(n: u64, t: f64, m: u64) -> Result<CovarianceMatrix> {
    covariance_matrix_with(n, t, m, Execution::default())
}

pub fn covariance_matrix_with(n: u64, t: f64, m: u64, exec: Execution) -> Result<CovarianceMatrix> {
    check_temperature(t)?;
    let p: Vec<f64> = (0..=m)
        .map(|l| mean_density_limit(t, l))
        .collect::<Result<_>>()?;
    let nf = n as f64;
    let entries = exec.map_slice(&p, |&pa| {
        p.iter().map(|&pb| -(nf * (pa * pb))).collect::<Vec<f64>>()
    });
    let mut entries = entries;
    for (l, row) in entries.iter_mut().enumerate() {
        row[l] = nf * p[l] * (1.0 - p[l]);
    }
    Ok(CovarianceMatrix { n, t, m, entries })
}

/// Pearson coefficient of `n_i` and `n_j`, `i != j`:
/// `-sqrt(<x_i><x_j> / ((1-<x_i>)(1-<x_j>)))`.
pub fn pearson_correlation(t: f64, i: u64, j: u64) -> Result<f64> {
    if i == j {
        return Err(Error::Domain(format!("correlation needs two distinct levels, got {i} twice")));
    }
    let pi = mean_density_limit(t, i)?;
    let pj = mean_density_limit(t, j)?;
    let (ri, rj) = (pi / (1.0 - pi), pj / (1.0 - pj));
    Ok(-(ri * rj).sqrt())
}

/// `sqrt(tr Cov) / sum_l <n_l>` with the energy `M = N T` treated as real.
///
/// With `x = T/(T+1)` this is
/// `sqrt(x/(1+x)) sqrt(2 - x^M - x^{M+1} + x^{2M+1} - x^{2M+2}) / (sqrt(N)(1 - x^{M+1}))`.
/// Powers of `x` are taken in log space and the differences from one through
/// `expm1`, which keeps both the `x -> 1` and the `x^M -> 1` ends accurate.
pub fn total_fluctuation_ratio(n: u64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let nf = n as f64;
    let m = nf * t;
    let ln_x = t.ln() - t.ln_1p();
    let x = ln_x.exp();
    let x_m = (m * ln_x).exp();
    let one_minus_x_m = -(m * ln_x).exp_m1();
    let one_minus_x_m1 = -((m + 1.0) * ln_x).exp_m1();
    // 2 - x^M - x^{M+1} + x^{2M+1} - x^{2M+2}, regrouped into positive terms
    let spread = one_minus_x_m + one_minus_x_m1 + x_m * x_m * x / (1.0 + t);
    Ok((x / (1.0 + x)).sqrt() * spread.sqrt() / (nf.sqrt() * one_minus_x_m1))
}

/// [`total_fluctuation_ratio`] at integer energy `M`, i.e. `T = M/N`.
pub fn total_fluctuation_ratio_nm(n: u64, m: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::Domain("zero energy has no fluctuations to measure".into()));
    }
    total_fluctuation_ratio(n, m as f64 / n as f64)
}

/// `(1/sqrt(N)) (1 - e^{-N})^{-1/2}`, the high temperature plateau.
pub fn total_fluctuation_plateau(n: u64) -> f64 {
    let nf = n as f64;
    1.0 / (nf.sqrt() * (-(-nf).exp_m1()).sqrt())
}
