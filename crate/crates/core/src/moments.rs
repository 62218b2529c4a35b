//! Closed-form moments of occupation numbers `n_j` and densities `x_j = n_j/N`,
//! exact at finite `N` and in the large-`N` limit at fixed `T = M/N`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, factorial, triangle_coefficient, ExactRational};
use crate::enumeration::microstate_count;
use crate::error::{Error, Result};
use crate::system::SystemParams;

/// Boltzmann constant in J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Level `j` and order `m` of `<n_j^m>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MomentSpec {
    pub level: u64,
    pub order: u32,
}

impl MomentSpec {
    pub fn new(level: u64, order: u32) -> Self {
        Self { level, order }
    }
}

/// Unnormalized `E[(n_j)_q] / (N)_q`, i.e. the weight of `q` labelled
/// particles all sitting on level `j`:
/// `1[qj<=M] C(M-qj+N-1-q, N-1-q)` for `q < N`, `delta(Nj, M)` for `q = N`.
pub(crate) fn level_weight(params: &SystemParams, level: u64, q: u64) -> BigInt {
    let (n, m) = (params.n(), params.m());
    if q > n || q * level > m {
        return BigInt::zero();
    }
    if q == n {
        return if n * level == m {
            BigInt::one()
        } else {
            BigInt::zero()
        };
    }
    let (n, m, q, j) = (n as i64, m as i64, q as i64, level as i64);
    binomial(m - q * j + n - 1 - q, n - 1 - q)
}

fn check_temperature(t: f64) -> Result<()> {
    if t.is_nan() || t <= 0.0 || t.is_infinite() {
        return Err(Error::Domain(format!("temperature must be positive, got {t}")));
    }
    Ok(())
}

/// `<n_j^m>` from the Stirling-coefficient expansion over factorial moments:
/// `sum_{q=1}^{min(N,m)} a_q^(m) q! C(N,q) w_q / C(M+N-1, N-1)`.
pub fn exact_moment(params: &SystemParams, spec: MomentSpec) -> Result<ExactRational> {
    params.check_level(spec.level)?;
    if spec.order == 0 {
        return Ok(ExactRational::one());
    }
    let n = params.n();
    let top = n.min(spec.order as u64);
    let mut acc = BigInt::zero();
    for q in 1..=top {
        let weight = level_weight(params, spec.level, q);
        if weight.is_zero() {
            continue;
        }
        acc += triangle_coefficient(spec.order as usize, q as usize)
            * factorial(q)
            * binomial(n as i64, q as i64)
            * weight;
    }
    Ok(ExactRational::new(acc, microstate_count(params)))
}

/// Leading-order factorized density moment
/// `1[mj<=M] C(M-mj+N-1-m, N-1-m) / C(M+N-1, N-1)`.
///
/// This is exact for `m = 1` when `N >= 2`; higher orders drop the `O(1/N)`
/// remainder, and at `N = 1` the ratio vanishes identically.
pub fn density_moment_factorized(params: &SystemParams, spec: MomentSpec) -> Result<ExactRational> {
    params.check_level(spec.level)?;
    let (n, m) = (params.n() as i64, params.m() as i64);
    let (j, k) = (spec.level as i64, spec.order as i64);
    if k * j > m {
        return Ok(ExactRational::zero());
    }
    let numer = binomial(m - k * j + n - 1 - k, n - 1 - k);
    Ok(ExactRational::new(numer, microstate_count(params)))
}

/// `ln <x_j>` in the large-`N` limit, `j ln T - (j+1) ln(1+T)`.
fn ln_mean_density(t: f64, level: u64) -> f64 {
    let j = level as f64;
    let log_t = if level == 0 { 0.0 } else { j * t.ln() };
    log_t - (j + 1.0) * t.ln_1p()
}

/// `(T^j / (T+1)^{j+1})^m`.
pub fn density_moment_limit(t: f64, spec: MomentSpec) -> Result<f64> {
    check_temperature(t)?;
    Ok((spec.order as f64 * ln_mean_density(t, spec.level)).exp())
}

/// Large-`N` mean density `<x_j> = T^j / (T+1)^{j+1}`.
pub fn mean_density_limit(t: f64, level: u64) -> Result<f64> {
    density_moment_limit(t, MomentSpec::new(level, 1))
}

/// [`density_moment_limit`] carried out in exact arithmetic for rational `T`.
pub fn density_moment_limit_exact(t: &ExactRational, spec: MomentSpec) -> Result<ExactRational> {
    if *t <= ExactRational::zero() {
        return Err(Error::Domain(format!("temperature must be positive, got {t}")));
    }
    let one = ExactRational::one();
    let mean = num_traits::pow(t.clone(), spec.level as usize)
        / num_traits::pow(t + &one, spec.level as usize + 1);
    Ok(num_traits::pow(mean, spec.order as usize))
}

/// Exact `Var(x_j)`:
/// `A (1/N - A) + (N-1)/N B` with `A`, `B` the one- and two-particle level
/// weights over `C(M+N-1, N-1)`.
///
/// The corner contributions at `q = N` are included, so this equals the
/// enumerated variance for every `N`, including `N <= 2`.
pub fn variance_exact(params: &SystemParams, level: u64) -> Result<ExactRational> {
    params.check_level(level)?;
    let total = microstate_count(params);
    let n = BigInt::from(params.n());
    let one_particle = ExactRational::new(level_weight(params, level, 1), total.clone());
    let two_particle = ExactRational::new(level_weight(params, level, 2), total);
    let inv_n = ExactRational::new(BigInt::one(), n.clone());
    let pair_factor = ExactRational::new(&n - 1, n);
    Ok(&one_particle * (&inv_n - &one_particle) + pair_factor * two_particle)
}

/// `(1/N) <x_j> (1 - <x_j>)` with the large-`N` mean density.
pub fn variance_limit(n: u64, t: f64, level: u64) -> Result<f64> {
    let p = mean_density_limit(t, level)?;
    Ok(p * (1.0 - p) / n as f64)
}

/// `sigma_j / <x_j> = sqrt((1 - <x_j>) / (N <x_j>))`.
pub fn std_over_mean(n: u64, t: f64, level: u64) -> Result<f64> {
    check_temperature(t)?;
    let ln_p = ln_mean_density(t, level);
    // 1/sqrt(p) via logs so tiny densities do not underflow
    let p = ln_p.exp();
    Ok((-0.5 * ln_p).exp() * (1.0 - p).sqrt() / (n as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxVariance {
    pub t_star: f64,
    pub x_max: f64,
    pub sigma_sq_max: f64,
}

/// The large-`N` density variance of level `j >= 1` peaks at `T = j` with
/// `<x_j> = j^j / (j+1)^{j+1}`.
pub fn max_variance_point(n: u64, level: u64) -> Result<MaxVariance> {
    if level == 0 {
        return Err(Error::Domain("the ground level variance has no interior maximum".into()));
    }
    let j = level as f64;
    let x_max = (j * j.ln() - (j + 1.0) * (j + 1.0).ln()).exp();
    Ok(MaxVariance {
        t_star: j,
        x_max,
        sigma_sq_max: x_max * (1.0 - x_max) / n as f64,
    })
}

/// Absolute temperature in kelvin for level spacing `epsilon_joules`:
/// `(2 eps / 3 k_B) (M/N)`.
pub fn physical_temperature(params: &SystemParams, epsilon_joules: f64) -> Result<f64> {
    if epsilon_joules.is_nan() || epsilon_joules <= 0.0 || epsilon_joules.is_infinite() {
        return Err(Error::Domain(format!(
            "level spacing must be positive, got {epsilon_joules}"
        )));
    }
    Ok(2.0 * epsilon_joules / (3.0 * BOLTZMANN) * params.temperature_f64())
}
