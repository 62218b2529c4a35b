//! Exact and limiting distributions of occupation numbers: the univariate law
//! of `n_j`, the joint law of several levels at once, their binomial, normal and
//! multinomial large-`N` limits, and whole-macrostate probabilities.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::combinatorics::{binomial, factorial, multinomial_weight, ExactRational};
use crate::enumeration::microstate_count;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::moments::{level_weight, mean_density_limit};
use crate::system::{OccupationVector, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Limit,
    Empirical,
}

/// Probabilities of `n_j = k` over a support of counts `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable<P> {
    support: Vec<u64>,
    probabilities: Vec<P>,
    mode: Mode,
    warning: Option<String>,
}

impl<P> DistributionTable<P> {
    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn probabilities(&self) -> &[P] {
        &self.probabilities
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Set when the table was produced outside the regime its formula claims.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn get(&self, outcome: u64) -> Option<&P> {
        self.support
            .iter()
            .position(|&s| s == outcome)
            .map(|i| &self.probabilities[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &P)> {
        self.support.iter().copied().zip(self.probabilities.iter())
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

impl DistributionTable<ExactRational> {
    pub fn exact(support: Vec<u64>, probabilities: Vec<ExactRational>) -> Self {
        assert_eq!(support.len(), probabilities.len());
        Self {
            support,
            probabilities,
            mode: Mode::Exact,
            warning: None,
        }
    }

    pub fn total(&self) -> ExactRational {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> ExactRational {
        self.iter()
            .map(|(k, p)| p * ExactRational::from_integer(BigInt::from(k)))
            .sum()
    }

    pub fn to_f64(&self) -> DistributionTable<f64> {
        DistributionTable {
            support: self.support.clone(),
            probabilities: self
                .probabilities
                .iter()
                .map(|p| p.to_f64().unwrap_or(f64::NAN))
                .collect(),
            mode: Mode::Exact,
            warning: self.warning.clone(),
        }
    }
}

impl DistributionTable<f64> {
    pub fn limit(support: Vec<u64>, probabilities: Vec<f64>, warning: Option<String>) -> Self {
        assert_eq!(support.len(), probabilities.len());
        Self {
            support,
            probabilities,
            mode: Mode::Limit,
            warning,
        }
    }

    pub fn empirical(support: Vec<u64>, probabilities: Vec<f64>) -> Self {
        assert_eq!(support.len(), probabilities.len());
        Self {
            support,
            probabilities,
            mode: Mode::Empirical,
            warning: None,
        }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn std_dev(&self) -> f64 {
        let mean = self.mean();
        self.iter()
            .map(|(k, p)| (k as f64 - mean).powi(2) * p)
            .sum::<f64>()
            .sqrt()
    }
}

/// `0.5 * sum |a_k - b_k|` over tables sharing one support.
pub fn total_variation(a: &DistributionTable<f64>, b: &DistributionTable<f64>) -> f64 {
    assert_eq!(a.support(), b.support(), "tables must share a support");
    0.5 * a
        .probabilities()
        .iter()
        .zip(b.probabilities())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

/// Strictly ascending set of levels `j_1 < ... < j_p` within `0..=M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelSelection(Vec<u64>);

impl LevelSelection {
    pub fn new(levels: Vec<u64>, params: &SystemParams) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("select at least one level".into()));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!("levels {levels:?} are not strictly ascending")));
        }
        params.check_level(*levels.last().expect("non-empty"))?;
        Ok(Self(levels))
    }

    pub fn levels(&self) -> &[u64] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

/// Exact law of `n_j` over `0..=N`:
/// `P(k) C(M+N-1,N-1) = sum_{q>=k} C(q,k) (-1)^{q-k} C(N,q) w_q`.
pub fn occupation_pdf_exact(
    params: &SystemParams,
    level: u64,
) -> Result<DistributionTable<ExactRational>> {
    occupation_pdf_exact_with(params, level, Execution::default())
}

pub fn occupation_pdf_exact_with(
    params: &SystemParams,
    level: u64,
    exec: Execution,
) -> Result<DistributionTable<ExactRational>> {
    params.check_level(level)?;
    let n = params.n();
    // w_q = C(N,q) * (level weight); zero once q j exceeds M
    let weights: Vec<BigInt> = (0..=n)
        .take_while(|q| q * level <= params.m())
        .map(|q| binomial(n as i64, q as i64) * level_weight(params, level, q))
        .collect();
    let total = microstate_count(params);
    let probabilities = exec.map_range(n as usize + 1, |k| {
        let mut acc = BigInt::zero();
        let mut choose = BigInt::one(); // C(q, k), starting at q = k
        for q in k..weights.len() {
            if q > k {
                choose = choose * q / (q - k);
            }
            let term = &choose * &weights[q];
            if (q - k) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        ExactRational::new(acc, total.clone())
    });
    Ok(DistributionTable::exact((0..=n).collect(), probabilities))
}

fn binomial_limit_warning(t: f64, level: u64) -> Option<String> {
    (level as f64 >= t).then(|| {
        format!("large-N limit is only claimed for j < T; here j = {level}, T = {t}")
    })
}

/// `Binomial(N, <x_j>)` with the large-`N` mean density.
pub fn occupation_pdf_binomial_limit(n: u64, t: f64, level: u64) -> Result<DistributionTable<f64>> {
    let p = mean_density_limit(t, level)?;
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let probabilities = (0..=n)
        .map(|k| {
            let log = ln_binomial(n, k) + k as f64 * ln_p + (n - k) as f64 * ln_q;
            if k == 0 {
                (n as f64 * ln_q).exp()
            } else {
                log.exp()
            }
        })
        .collect();
    Ok(DistributionTable::limit(
        (0..=n).collect(),
        probabilities,
        binomial_limit_warning(t, level),
    ))
}

/// Gaussian approximation `Normal(N<x_j>, N<x_j>(1-<x_j>))` to the law of `n_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalApprox {
    pub mean: f64,
    pub variance: f64,
    pub warning: Option<String>,
}

impl NormalApprox {
    pub fn density(&self, x: f64) -> f64 {
        let z = x - self.mean;
        (-(z * z) / (2.0 * self.variance)).exp()
            / (2.0 * std::f64::consts::PI * self.variance).sqrt()
    }
}

pub fn occupation_pdf_normal_limit(n: u64, t: f64, level: u64) -> Result<NormalApprox> {
    let p = mean_density_limit(t, level)?;
    let n = n as f64;
    Ok(NormalApprox {
        mean: n * p,
        variance: n * p * (1.0 - p),
        warning: binomial_limit_warning(t, level),
    })
}

/// Calls `f` with every way of writing `total` as an ordered sum of `parts`
/// non-negative integers.
pub(crate) fn for_each_composition<F: FnMut(&[u64])>(total: u64, parts: usize, mut f: F) {
    fn fill<F: FnMut(&[u64])>(buf: &mut [u64], at: usize, left: u64, f: &mut F) {
        if at + 1 == buf.len() {
            buf[at] = left;
            f(buf);
            return;
        }
        for v in 0..=left {
            buf[at] = v;
            fill(buf, at + 1, left - v, f);
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    let mut buf = vec![0u64; parts];
    fill(&mut buf, 0, total, &mut f);
}

fn sorted_pairs(
    params: &SystemParams,
    levels: &[u64],
    counts: &[u64],
) -> Result<(Vec<u64>, Vec<u64>)> {
    if levels.len() != counts.len() {
        return Err(Error::Domain("levels and counts differ in length".into()));
    }
    let mut pairs: Vec<(u64, u64)> = levels.iter().copied().zip(counts.iter().copied()).collect();
    pairs.sort_unstable();
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Domain(format!("level {} listed twice", w[0].0)));
        }
    }
    if let Some(&(top, _)) = pairs.last() {
        params.check_level(top)?;
    }
    Ok(pairs.into_iter().unzip())
}

/// Exact joint probability `P(n_{j_1} = k_1, ..., n_{j_p} = k_p)`.
///
/// The hypercube sum over grid points `s in {1..p}^q` is grouped by how many
/// coordinates hit each level, i.e. by compositions `r` of `q` with weight
/// `q! / prod r_l!`. Only `r_l >= k_l` contribute. Levels may be given in any
/// order; `counts` follows the same order.
pub fn joint_pdf_exact(
    params: &SystemParams,
    levels: &[u64],
    counts: &[u64],
) -> Result<ExactRational> {
    let (levels, counts) = sorted_pairs(params, levels, counts)?;
    let (n, m) = (params.n(), params.m());
    let arity = levels.len();
    let floor: u64 = counts.iter().sum();
    let mut acc = BigInt::zero();
    let mut r = vec![0u64; arity];
    for q in floor..=n {
        let mut inner = BigInt::zero();
        for_each_composition(q - floor, arity, |extra| {
            let mut energy = 0u64;
            for l in 0..arity {
                r[l] = counts[l] + extra[l];
                energy += r[l] * levels[l];
            }
            if energy > m || (q == n && energy != m) {
                return;
            }
            let mut term = factorial(q);
            let mut negative = false;
            for l in 0..arity {
                term /= factorial(r[l]);
                term *= binomial(r[l] as i64, counts[l] as i64);
                negative ^= extra[l] % 2 == 1;
            }
            if q < n {
                term *= binomial((m - energy + n - 1 - q) as i64, (n - 1 - q) as i64);
            }
            if negative {
                inner -= term;
            } else {
                inner += term;
            }
        });
        if q < n && !inner.is_zero() {
            inner *= binomial(n as i64, q as i64);
        }
        acc += inner;
    }
    Ok(ExactRational::new(acc, microstate_count(params)))
}

/// Success probabilities `p_1..p_{p+1}` of the multinomial limit over levels
/// `0..p-1`: `p_l = (T/(T+1))^l / T` for `l <= p`, `p_{p+1} = (T/(T+1))^p`.
pub fn trial_probabilities(t: f64, arity: usize) -> Result<Vec<f64>> {
    let ln_ratio = ln_trial_ratio(t)?;
    let mut out: Vec<f64> = (1..=arity)
        .map(|l| (l as f64 * ln_ratio - t.ln()).exp())
        .collect();
    out.push((arity as f64 * ln_ratio).exp());
    Ok(out)
}

fn ln_trial_ratio(t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 || t.is_infinite() {
        return Err(Error::Domain(format!("temperature must be positive, got {t}")));
    }
    Ok(t.ln() - t.ln_1p())
}

/// Large-`N` multinomial limit of the joint law of levels `0..p-1`, evaluated
/// in log space.
pub fn joint_pdf_multinomial_limit(n: u64, t: f64, arity: usize, counts: &[u64]) -> Result<f64> {
    if counts.len() != arity || arity == 0 {
        return Err(Error::Domain(format!(
            "expected {arity} counts for arity {arity}, got {}",
            counts.len()
        )));
    }
    let ln_ratio = ln_trial_ratio(t)?;
    let used: u64 = counts.iter().sum();
    if used > n {
        return Err(Error::Domain(format!("counts sum to {used} > N = {n}")));
    }
    let rest = n - used;
    let mut log = ln_factorial(n) - ln_factorial(rest);
    for (l, &k) in counts.iter().enumerate() {
        let ln_p = (l + 1) as f64 * ln_ratio - t.ln();
        log += k as f64 * ln_p - ln_factorial(k);
    }
    log += rest as f64 * arity as f64 * ln_ratio;
    Ok(log.exp())
}

/// `N! / prod n_j!` over `C(M+N-1, N-1)`.
pub fn macrostate_probability_exact(
    params: &SystemParams,
    state: &OccupationVector,
) -> Result<ExactRational> {
    state.check_conservation(params)?;
    Ok(ExactRational::new(
        multinomial_weight(state.counts()),
        microstate_count(params),
    ))
}

/// `N!/prod n_l! * T^M / (T+1)^{N+M}`.
///
/// Its ratio to the exact probability is `C(M+N-1,N-1) T^M/(T+1)^{N+M}`,
/// independent of the macrostate, and tends to `1/sqrt(2 pi T (T+1) N)`.
pub fn macrostate_probability_large_n(n: u64, t: f64, state: &OccupationVector) -> Result<f64> {
    if t.is_nan() || t <= 0.0 || t.is_infinite() {
        return Err(Error::Domain(format!("temperature must be positive, got {t}")));
    }
    let (particles, energy) = (state.particles(), state.energy());
    if particles != n {
        return Err(Error::Conservation(format!("vector holds {particles} particles, N = {n}")));
    }
    let m = energy as f64;
    if (t * n as f64 - m).abs() > 1e-9 * m.max(1.0) {
        return Err(Error::Conservation(format!(
            "vector holds M = {energy} quanta but T N = {}",
            t * n as f64
        )));
    }
    let mut log = ln_factorial(n);
    for &c in state.counts() {
        log -= ln_factorial(c);
    }
    log += m * t.ln() - (n as f64 + m) * t.ln_1p();
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{oracle_joint_pdf, oracle_pdf};
    use crate::moments::{exact_moment, MomentSpec};

    fn params(n: u64, m: u64) -> SystemParams {
        SystemParams::new(n, m).unwrap()
    }

    fn q(a: i64, b: i64) -> ExactRational {
        ExactRational::new(a.into(), b.into())
    }

    /// Literal hypercube grid-point sum, exponential in q.
    fn joint_pdf_gridpoint(params: &SystemParams, levels: &[u64], counts: &[u64]) -> ExactRational {
        let (n, m) = (params.n(), params.m());
        let p = levels.len();
        let mut acc = BigInt::zero();
        for q in 0..=n {
            let mut grid = vec![0usize; q as usize];
            loop {
                let mut hits = vec![0u64; p];
                for &s in &grid {
                    hits[s] += 1;
                }
                let energy: u64 = grid.iter().map(|&s| levels[s]).sum();
                let ok = if q < n { energy <= m } else { energy == m };
                if ok {
                    let mut term = BigInt::one();
                    for l in 0..p {
                        term *= binomial(hits[l] as i64, counts[l] as i64);
                        if hits[l] >= counts[l] && (hits[l] - counts[l]) % 2 == 1 {
                            term = -term;
                        }
                    }
                    if q < n {
                        term *= binomial(n as i64, q as i64)
                            * binomial((m - energy + n - 1 - q) as i64, (n - 1 - q) as i64);
                    }
                    acc += term;
                }
                let mut i = 0;
                loop {
                    if i == grid.len() {
                        break;
                    }
                    grid[i] += 1;
                    if grid[i] < p {
                        break;
                    }
                    grid[i] = 0;
                    i += 1;
                }
                if i == grid.len() {
                    break;
                }
            }
        }
        ExactRational::new(acc, microstate_count(params))
    }

    #[test]
    fn compositions_are_complete() {
        let mut seen = Vec::new();
        for_each_composition(3, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert!(seen.iter().all(|c| c.iter().sum::<u64>() == 3));
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 10);

        let mut count = 0;
        for_each_composition(0, 4, |c| {
            assert_eq!(c, &[0, 0, 0, 0]);
            count += 1;
        });
        assert_eq!(count, 1);
        let mut count = 0;
        for_each_composition(5, 1, |c| {
            assert_eq!(c, &[5]);
            count += 1;
        });
        assert_eq!(count, 1);
        for_each_composition(2, 0, |_| panic!("no way to split 2 into 0 parts"));
    }

    #[test]
    fn exact_pdf_examples() {
        let t = occupation_pdf_exact(&params(2, 2), 1).unwrap();
        assert_eq!(t.probabilities(), &[q(2, 3), q(0, 1), q(1, 3)]);
        let t = occupation_pdf_exact(&params(1, 3), 3).unwrap();
        assert_eq!(t.probabilities(), &[q(0, 1), q(1, 1)]);
        let t = occupation_pdf_exact(&params(2, 2), 0).unwrap();
        assert_eq!(t.probabilities(), &[q(1, 3), q(2, 3), q(0, 1)]);
        assert_eq!(t.mode(), Mode::Exact);
    }

    #[test]
    fn exact_pdf_matches_oracle_and_first_moment() {
        for n in 1..=6 {
            for m in 0..=8 {
                let p = params(n, m);
                for j in 0..=m {
                    let table = occupation_pdf_exact(&p, j).unwrap();
                    assert_eq!(table, oracle_pdf(&p, j).unwrap(), "N={n} M={m} j={j}");
                    assert_eq!(table.total(), q(1, 1));
                    assert_eq!(table.mean(), exact_moment(&p, MomentSpec::new(j, 1)).unwrap());
                }
            }
        }
    }

    #[test]
    fn execution_policies_agree() {
        let p = params(40, 90);
        let a = occupation_pdf_exact_with(&p, 2, Execution::Sequential).unwrap();
        let b = occupation_pdf_exact_with(&p, 2, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binomial_limit_examples() {
        let t = occupation_pdf_binomial_limit(2, 1.0, 0).unwrap();
        let expect = [0.25, 0.5, 0.25];
        for (got, want) in t.probabilities().iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(t.warning().is_none());
        assert_eq!(t.mode(), Mode::Limit);

        let t = occupation_pdf_binomial_limit(37, 2.5, 1).unwrap();
        assert!((t.total() - 1.0).abs() < 1e-12);
        assert!((t.mean() - 37.0 * 2.5 / 3.5f64.powi(2)).abs() < 1e-10);

        assert!(occupation_pdf_binomial_limit(10, 1.0, 3).unwrap().warning().is_some());
        assert!(occupation_pdf_binomial_limit(10, 0.0, 0).is_err());
    }

    #[test]
    fn binomial_limit_tracks_exact_at_n50_t2() {
        let exact = occupation_pdf_exact(&params(50, 100), 1).unwrap().to_f64();
        let limit = occupation_pdf_binomial_limit(50, 2.0, 1).unwrap();
        let tv = total_variation(&exact, &limit);
        assert!(tv < 0.05, "tv = {tv}");
    }

    #[test]
    fn normal_limit_examples() {
        let g = occupation_pdf_normal_limit(100, 1.0, 0).unwrap();
        assert!((g.mean - 50.0).abs() < 1e-12);
        assert!((g.variance - 25.0).abs() < 1e-12);
        // composite Simpson over +-12 sigma
        let sd = g.variance.sqrt();
        let (a, b, steps) = (g.mean - 12.0 * sd, g.mean + 12.0 * sd, 4000);
        let h = (b - a) / steps as f64;
        let mut s = g.density(a) + g.density(b);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g.density(a + h * i as f64);
        }
        let integral = s * h / 3.0;
        assert!((integral - 1.0).abs() < 1e-9, "{integral}");
    }

    #[test]
    fn joint_examples() {
        let p = params(2, 2);
        assert_eq!(joint_pdf_exact(&p, &[0, 1], &[1, 0]).unwrap(), q(2, 3));
        assert_eq!(joint_pdf_exact(&p, &[0, 1, 2], &[0, 2, 0]).unwrap(), q(1, 3));
        assert_eq!(joint_pdf_exact(&p, &[1], &[2]).unwrap(), q(1, 3));
        assert_eq!(joint_pdf_exact(&p, &[0], &[2]).unwrap(), q(0, 1));
        assert!(joint_pdf_exact(&p, &[1, 1], &[0, 0]).is_err());
        assert!(joint_pdf_exact(&p, &[0, 3], &[0, 0]).is_err());
    }

    #[test]
    fn joint_reduces_to_univariate() {
        for (n, m) in [(3, 5), (5, 4), (6, 6)] {
            let p = params(n, m);
            for j in 0..=m {
                let table = occupation_pdf_exact(&p, j).unwrap();
                for (k, prob) in table.iter() {
                    assert_eq!(&joint_pdf_exact(&p, &[j], &[k]).unwrap(), prob);
                }
            }
        }
    }

    #[test]
    fn joint_matches_gridpoint_sum() {
        for n in 1..=7 {
            for m in 0..=5 {
                let p = params(n, m);
                for levels in [vec![0], vec![1], vec![0, 1], vec![0, 2], vec![1, 3]] {
                    if levels.iter().any(|&l| l > m) {
                        continue;
                    }
                    for a in 0..=n {
                        for b in 0..=n {
                            let counts = [a, b];
                            let counts = &counts[..levels.len()];
                            assert_eq!(
                                joint_pdf_exact(&p, &levels, counts).unwrap(),
                                joint_pdf_gridpoint(&p, &levels, counts),
                                "N={n} M={m} {levels:?} {counts:?}"
                            );
                            if levels.len() == 1 {
                                break;
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn joint_matches_oracle_and_permutes() {
        let p = params(5, 7);
        for levels in [[0u64, 1, 2], [1, 3, 6], [0, 2, 7]] {
            for a in 0..=5 {
                for b in 0..=5 {
                    for c in 0..=5 {
                        let exact = joint_pdf_exact(&p, &levels, &[a, b, c]).unwrap();
                        assert_eq!(exact, oracle_joint_pdf(&p, &levels, &[a, b, c]).unwrap());
                        let permuted = joint_pdf_exact(
                            &p,
                            &[levels[2], levels[0], levels[1]],
                            &[c, a, b],
                        )
                        .unwrap();
                        assert_eq!(exact, permuted);
                    }
                }
            }
        }
    }

    #[test]
    fn level_selection_validation() {
        let p = params(3, 4);
        assert!(LevelSelection::new(vec![0, 2, 4], &p).is_ok());
        assert!(LevelSelection::new(vec![2, 1], &p).is_err());
        assert!(LevelSelection::new(vec![1, 1], &p).is_err());
        assert!(LevelSelection::new(vec![0, 5], &p).is_err());
        assert!(LevelSelection::new(vec![], &p).is_err());
    }

    #[test]
    fn trial_probabilities_at_unit_temperature() {
        let probs = trial_probabilities(1.0, 2).unwrap();
        assert_eq!(probs.len(), 3);
        for (got, want) in probs.iter().zip([0.5, 0.25, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }
        for t in [0.01, 0.7, 3.0, 250.0] {
            for arity in 1..=6 {
                let s: f64 = trial_probabilities(t, arity).unwrap().iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multinomial_limit_reduces_to_binomial() {
        for t in [0.5, 1.0, 4.0] {
            let bin = occupation_pdf_binomial_limit(12, t, 0).unwrap();
            for (k, prob) in bin.iter() {
                let multi = joint_pdf_multinomial_limit(12, t, 1, &[k]).unwrap();
                assert!((multi - prob).abs() < 1e-12 * prob.max(1e-300));
            }
        }
    }

    #[test]
    fn multinomial_limit_against_direct_enumeration() {
        // independent route: direct products with f64 factorials
        let (n, t) = (8u64, 1.0f64);
        let probs = [0.5f64, 0.25, 0.25];
        let fact = |k: u64| (1..=k).map(|i| i as f64).product::<f64>();
        let mut total = 0.0;
        for a in 0..=n {
            for b in 0..=n - a {
                let rest = n - a - b;
                let direct = fact(n) / (fact(a) * fact(b) * fact(rest))
                    * probs[0].powi(a as i32)
                    * probs[1].powi(b as i32)
                    * probs[2].powi(rest as i32);
                let ours = joint_pdf_multinomial_limit(n, t, 2, &[a, b]).unwrap();
                assert!((ours - direct).abs() < 1e-13, "{a},{b}");
                total += ours;
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
        let v = joint_pdf_multinomial_limit(n, t, 2, &[4, 2]).unwrap();
        assert!((v - 420.0 * 0.5f64.powi(4) * 0.25f64.powi(4)).abs() < 1e-15);
        assert!(joint_pdf_multinomial_limit(n, t, 2, &[5, 4]).is_err());
        assert!(joint_pdf_multinomial_limit(n, 0.0, 2, &[1, 1]).is_err());
        assert!(joint_pdf_multinomial_limit(2000, 3.0, 3, &[500, 300, 200]).unwrap().is_finite());
    }

    #[test]
    fn macrostate_probability_examples() {
        let p = params(2, 2);
        let s = OccupationVector::new(vec![0, 2, 0]);
        assert_eq!(macrostate_probability_exact(&p, &s).unwrap(), q(1, 3));
        let s = OccupationVector::new(vec![1, 0, 1]);
        assert_eq!(macrostate_probability_exact(&p, &s).unwrap(), q(2, 3));
        let forced = OccupationVector::new(vec![0, 0, 0, 0, 1]);
        assert_eq!(
            macrostate_probability_exact(&params(1, 4), &forced).unwrap(),
            q(1, 1)
        );
        let bad = OccupationVector::new(vec![2, 0, 0]);
        assert!(macrostate_probability_exact(&p, &bad).is_err());
    }

    #[test]
    fn large_n_macrostate_prefactor() {
        // ratio to the exact value is state independent; compare it to the
        // Stirling prefactor 1/sqrt(2 pi T (T+1) N)
        let (n, m) = (200u64, 200u64);
        let p = params(n, m);
        let mut counts = vec![0u64; m as usize + 1];
        counts[0] = 100;
        counts[1] = 50;
        counts[2] = 25;
        counts[3] = 12;
        counts[4] = 7;
        counts[5] = 5;
        counts[6] = 1;
        let energy: u64 = counts.iter().enumerate().map(|(j, c)| j as u64 * c).sum();
        // top up the energy with one particle moved from level 0
        counts[0] -= 1;
        counts[(m - energy) as usize] += 1;
        let state = OccupationVector::new(counts);
        state.check_conservation(&p).unwrap();

        let approx = macrostate_probability_large_n(n, 1.0, &state).unwrap();
        let exact = macrostate_probability_exact(&p, &state).unwrap().to_f64().unwrap();
        let ratio = approx / exact;
        let stirling = 1.0 / (2.0 * std::f64::consts::PI * 2.0 * n as f64).sqrt();
        assert!((ratio / stirling - 1.0).abs() < 0.1, "{ratio} vs {stirling}");
        // the N-free prefactor differs from the ratio by exactly the sqrt(N) factor
        let printed = 1.0 / (2.0 * std::f64::consts::PI * 2.0f64).sqrt();
        assert!((ratio * (n as f64).sqrt() / printed - 1.0).abs() < 0.1);

        assert!(macrostate_probability_large_n(n, 2.0, &state).is_err());
        assert!(macrostate_probability_large_n(n + 1, 1.0, &state).is_err());
    }

    #[test]
    fn large_n_macrostate_peaks_near_exponential_profile() {
        let (n, m) = (50u64, 50u64);
        let t = 1.0;
        // start from the rounded exponential profile, repair energy on level 0/1
        let mut counts = vec![0i64; m as usize + 1];
        for (j, c) in counts.iter_mut().enumerate() {
            *c = (n as f64 * mean_density_limit(t, j as u64).unwrap()).round() as i64;
        }
        let fix_particles = n as i64 - counts.iter().sum::<i64>();
        counts[0] += fix_particles;
        let energy: i64 = counts.iter().enumerate().map(|(j, c)| j as i64 * c).sum();
        let mut deficit = m as i64 - energy;
        while deficit > 0 {
            counts[0] -= 1;
            counts[1] += 1;
            deficit -= 1;
        }
        while deficit < 0 {
            counts[1] -= 1;
            counts[0] += 1;
            deficit += 1;
        }
        let value = |c: &[i64]| {
            let s = OccupationVector::new(c.iter().map(|&x| x as u64).collect());
            macrostate_probability_large_n(n, t, &s).unwrap()
        };
        // steepest ascent over moves that keep N and M fixed
        let mut current = counts.clone();
        loop {
            let base = value(&current);
            let mut best: Option<(f64, Vec<i64>)> = None;
            for up in 0..m as usize {
                for down in 1..=m as usize {
                    if up + 1 == down || current[up] == 0 || current[down] == 0 {
                        continue;
                    }
                    if up == down && current[up] < 2 {
                        continue;
                    }
                    let mut next = current.clone();
                    next[up] -= 1;
                    next[up + 1] += 1;
                    next[down] -= 1;
                    next[down - 1] += 1;
                    let v = value(&next);
                    if v > base && best.as_ref().is_none_or(|b| v > b.0) {
                        best = Some((v, next));
                    }
                }
            }
            match best {
                Some((_, next)) => current = next,
                None => break,
            }
        }
        for (j, &peak) in current.iter().enumerate() {
            let profile = n as f64 * mean_density_limit(t, j as u64).unwrap();
            assert!((peak as f64 - profile).abs() <= 1.5, "level {j}: {peak} vs {profile}");
        }
    }
}
