//! Executable checks of the combinatorial identities the exact formulas rest
//! on. Identities the pipeline depends on are compared exactly; the sum of
//! powers expansion is only measured, through its residual.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::combinatorics::{
    factorial, power_of_sum_coefficient, ratio_string, triangle_coefficient,
    ExactRational,
};
use crate::distributions::{joint_pdf_exact, LevelSelection};
use crate::error::Result;
use crate::exec::Execution;
use crate::system::SystemParams;

/// Series order used by [`check_differential_identity`] unless told otherwise.
pub const DEFAULT_SERIES_ORDER: usize = 16;

/// Rationals the simplex identity is sampled at.
pub fn simplex_sample_values() -> Vec<ExactRational> {
    [(1, 2), (1, 3), (2, 5), (3, 7)]
        .iter()
        .map(|&(a, b)| ExactRational::new(BigInt::from(a), BigInt::from(b)))
        .collect()
}

/// Printed expansion coefficients `c_0..c_3` of the sum of powers identity.
pub fn printed_sum_of_powers_coefficients() -> Vec<ExactRational> {
    [(1, 1), (-1, 2), (1, 12), (-1, 8)]
        .iter()
        .map(|&(a, b)| ExactRational::new(BigInt::from(a), BigInt::from(b)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExactEqual,
    Mismatch,
    /// Measured rather than asserted; see the residual field.
    Residual,
    /// The parameter point lies outside the identity's domain.
    DomainError,
}

impl Verdict {
    pub fn is_red(self) -> bool {
        matches!(self, Verdict::Mismatch | Verdict::DomainError)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ExactEqual => "exact-equal",
            Verdict::Mismatch => "mismatch",
            Verdict::Residual => "residual",
            Verdict::DomainError => "domain-error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub params: Value,
    pub verdict: Verdict,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub residual: Option<String>,
    pub notes: Vec<String>,
}

impl IdentityReport {
    fn new(name: &str, params: Value) -> Self {
        Self {
            name: name.into(),
            params,
            verdict: Verdict::Mismatch,
            lhs: None,
            rhs: None,
            residual: None,
            notes: Vec::new(),
        }
    }

    fn compare(mut self, lhs: &ExactRational, rhs: &ExactRational) -> Self {
        self.verdict = if lhs == rhs { Verdict::ExactEqual } else { Verdict::Mismatch };
        self.lhs = Some(ratio_string(lhs));
        self.rhs = Some(ratio_string(rhs));
        self
    }
}

/// `sum_k c_k y^k + O(y^{K+1})` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coefficients: Vec<ExactRational>,
}

impl TruncatedSeries {
    pub fn new(mut coefficients: Vec<ExactRational>, order: usize) -> Self {
        coefficients.resize(order + 1, ExactRational::zero());
        Self { coefficients }
    }

    pub fn constant(c: ExactRational, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// `e^{s y}`.
    pub fn exp_scaled(s: i64, order: usize) -> Self {
        let mut c = Vec::with_capacity(order + 1);
        let mut term = ExactRational::one();
        let s = ExactRational::from_integer(BigInt::from(s));
        for k in 0..=order {
            c.push(term.clone());
            term = term * &s / ExactRational::from_integer(BigInt::from(k + 1));
        }
        Self::new(c, order)
    }

    /// `e^y - 1`.
    pub fn exp_minus_one(order: usize) -> Self {
        let mut s = Self::exp_scaled(1, order);
        s.coefficients[0] = ExactRational::zero();
        s
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coefficients
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let c = (0..=order)
            .map(|k| &self.coefficients[k] + &other.coefficients[k])
            .collect();
        Self::new(c, order)
    }

    pub fn scale(&self, by: &ExactRational) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * by).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut c = vec![ExactRational::zero(); order + 1];
        for (i, a) in self.coefficients.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(order + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Self::new(c, order)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(ExactRational::one(), self.order());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `d/dy`, losing one order of accuracy.
    pub fn derivative(&self) -> Self {
        assert!(self.order() >= 1, "cannot differentiate an order-0 series");
        let c = self.coefficients[1..]
            .iter()
            .enumerate()
            .map(|(k, a)| a * ExactRational::from_integer(BigInt::from(k + 1)))
            .collect();
        Self::new(c, self.order() - 1)
    }

    /// `f(e^y - 1)` for `f` given by this series in its own variable.
    pub fn compose_exp_minus_one(&self) -> Self {
        let order = self.order();
        let inner = Self::exp_minus_one(order);
        let mut out = Self::constant(ExactRational::zero(), order);
        let mut power = Self::constant(ExactRational::one(), order);
        for c in &self.coefficients {
            out = out.add(&power.scale(c));
            power = power.mul(&inner);
        }
        out
    }
}

fn int(v: impl Into<BigInt>) -> ExactRational {
    ExactRational::from_integer(v.into())
}

/// Expands `((1 - z^{M+1})/(1 - z) + z^j u)^N` modulo `z^{M+1}` and compares
/// each `z^p u^q` coefficient with `1[qj <= p] alpha_q^(p,j,N)` for `q < N` and
/// `delta(Nj, p)` for `q = N`.
pub fn check_power_of_sum(n: u64, m: u64, j: u64) -> IdentityReport {
    let report = IdentityReport::new("power-of-sum", json!({ "N": n, "M": m, "j": j }));
    if n == 0 || j > m {
        return IdentityReport {
            verdict: Verdict::DomainError,
            notes: vec!["needs N >= 1 and j <= M".into()],
            ..report
        };
    }
    let (zs, us) = (m as usize + 1, n as usize + 1);
    // poly[p][q] is the coefficient of z^p u^q
    let mut base = vec![vec![BigInt::zero(); us]; zs];
    for row in base.iter_mut() {
        row[0] = BigInt::one();
    }
    base[j as usize][1] += 1;
    let mut poly = vec![vec![BigInt::zero(); us]; zs];
    poly[0][0] = BigInt::one();
    for _ in 0..n {
        let mut next = vec![vec![BigInt::zero(); us]; zs];
        for (p1, row1) in poly.iter().enumerate() {
            for (q1, a) in row1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (p2, row2) in base.iter().enumerate().take(zs - p1) {
                    for (q2, b) in row2.iter().enumerate().take(us - q1) {
                        if !b.is_zero() {
                            next[p1 + p2][q1 + q2] += a * b;
                        }
                    }
                }
            }
        }
        poly = next;
    }
    let mut mismatches = Vec::new();
    for (p, row) in poly.iter().enumerate() {
        for (q, got) in row.iter().enumerate() {
            let (p, q) = (p as u64, q as u64);
            let want = alpha(p, j, n, q);
            if *got != want {
                mismatches.push(format!("z^{p} u^{q}: expanded {got}, closed form {want}"));
            }
        }
    }
    let cells = zs * us;
    IdentityReport {
        verdict: if mismatches.is_empty() { Verdict::ExactEqual } else { Verdict::Mismatch },
        lhs: Some(format!("{cells} expanded coefficients")),
        rhs: Some(format!("{} agree", cells - mismatches.len())),
        notes: mismatches,
        ..report
    }
}

/// Compares `d^m/dy^m (e^y - 1)^q` against
/// `sum_s (e^y - 1)^{q-s} e^{sy} q!/(q-s)! a_s^(m)` on every coefficient up to `y^K`.
pub fn check_differential_identity(q: u32, m: u32, order: usize) -> IdentityReport {
    let report = IdentityReport::new(
        "differential",
        json!({ "q": q, "m": m, "K": order }),
    );
    if m == 0 {
        return IdentityReport {
            verdict: Verdict::DomainError,
            notes: vec!["needs m >= 1".into()],
            ..report
        };
    }
    let wide = order + m as usize;
    let mut lhs = TruncatedSeries::exp_minus_one(wide).pow(q);
    for _ in 0..m {
        lhs = lhs.derivative();
    }
    let base = TruncatedSeries::exp_minus_one(order);
    let mut rhs = TruncatedSeries::constant(ExactRational::zero(), order);
    for s in 1..=m.min(q) {
        let falling: BigInt = (0..s).map(|i| BigInt::from(q - i)).product();
        let coeff = int(falling * triangle_coefficient(m as usize, s as usize));
        let term = base.pow(q - s).mul(&TruncatedSeries::exp_scaled(s as i64, order));
        rhs = rhs.add(&term.scale(&coeff));
    }
    let mismatched: Vec<String> = (0..=order)
        .filter(|&k| lhs.coefficients()[k] != rhs.coefficients()[k])
        .map(|k| format!("y^{k}"))
        .collect();
    IdentityReport {
        verdict: if mismatched.is_empty() { Verdict::ExactEqual } else { Verdict::Mismatch },
        lhs: Some(format!("[{}]", join_ratios(lhs.coefficients()))),
        rhs: Some(format!("[{}]", join_ratios(rhs.coefficients()))),
        notes: mismatched,
        ..report
    }
}

fn join_ratios(values: &[ExactRational]) -> String {
    values.iter().map(ratio_string).collect::<Vec<_>>().join(", ")
}

/// Left side by nested summation over `0 <= n_0 <= ... <= n_{p-1} <= n_p` of
/// `prod a_q^{n_q}`, right side by the alternating closed form
/// `sum_q (-1)^{p-q} prod_{l>=q} a_l^{n_p+p-l}
///   / (prod_{l<q} (1 - a_l...a_{q-1}) prod_{l>=q} (1 - a_q...a_l))`.
pub fn check_simplex_sum_ii(p: usize, a_values: &[ExactRational], n_p: u64) -> IdentityReport {
    let report = IdentityReport::new(
        "simplex-sum-ii",
        json!({ "p": p, "a": a_values.iter().map(ratio_string).collect::<Vec<_>>(), "n_p": n_p }),
    );
    if p == 0 || a_values.len() != p {
        return IdentityReport {
            verdict: Verdict::DomainError,
            notes: vec![format!("needs p >= 1 values, got p = {p} and {} values", a_values.len())],
            ..report
        };
    }
    let one = ExactRational::one();
    let span = |lo: usize, hi: usize| -> ExactRational {
        a_values[lo..=hi].iter().fold(one.clone(), |acc, a| acc * a)
    };
    for lo in 0..p {
        for hi in lo..p {
            if span(lo, hi) == one {
                return IdentityReport {
                    verdict: Verdict::DomainError,
                    notes: vec![format!("a_{lo}..a_{hi} multiply to 1, a denominator vanishes")],
                    ..report
                };
            }
        }
    }

    let lhs = nested_geometric_sum(a_values, n_p);

    let mut rhs = ExactRational::zero();
    for q in 0..=p {
        let mut num = one.clone();
        for l in q..p {
            num *= num_traits::pow(a_values[l].clone(), n_p as usize + p - l);
        }
        let mut den = one.clone();
        for l in 0..q {
            den *= &one - span(l, q - 1);
        }
        for l in q..p {
            den *= &one - span(q, l);
        }
        let term = num / den;
        if (p - q).is_multiple_of(2) {
            rhs += term;
        } else {
            rhs -= term;
        }
    }
    let mut out = report.compare(&lhs, &rhs);
    if p % 2 == 1 {
        out.notes.push("alternating sign taken as (-1)^(p-q); (-1)^q flips odd p".into());
    }
    out
}

fn nested_geometric_sum(a: &[ExactRational], top: u64) -> ExactRational {
    // tail[k] = sum over n_i..n_{p-1} with n_i >= k; built from the last index down
    let p = a.len();
    let width = top as usize + 1;
    let mut suffix = vec![ExactRational::one(); width];
    for i in (0..p).rev() {
        let mut next = vec![ExactRational::zero(); width];
        let mut running = ExactRational::zero();
        for k in (0..width).rev() {
            // n_i = k, then n_{i+1} >= k
            running += num_traits::pow(a[i].clone(), k) * &suffix[k];
            next[k] = running.clone();
        }
        suffix = next;
    }
    suffix[0].clone()
}

/// `sum_{k=0}^{max_k} t^{n-k+1} n!/(n-k+1)! c_k` for `k <= n + 1`.
pub fn sum_of_powers_rhs(n: u64, t: u64, coefficients: &[ExactRational], max_k: u64) -> ExactRational {
    let top = max_k.min(n + 1).min(coefficients.len() as u64 - 1);
    (0..=top)
        .map(|k| {
            let scale = ExactRational::new(factorial(n), factorial(n + 1 - k));
            int(num_traits::pow(BigInt::from(t), (n + 1 - k) as usize)) * scale
                * &coefficients[k as usize]
        })
        .sum()
}

/// `c_k` from its defining alternating sum over compositions with parts `>= 2`.
pub fn defined_sum_of_powers_coefficient(k: u64) -> ExactRational {
    let mut total = ExactRational::zero();
    for parts in 0..=k {
        let target = parts + k;
        let mut acc = ExactRational::zero();
        if parts == 0 {
            if target == 0 {
                acc = ExactRational::one();
            }
        } else if target >= 2 * parts {
            let mut inner = ExactRational::zero();
            crate::distributions::for_each_composition(target - 2 * parts, parts as usize, |c| {
                let den: BigInt = c.iter().map(|&x| factorial(x + 2)).product();
                inner += ExactRational::new(BigInt::one(), den);
            });
            acc = inner;
        }
        if parts % 2 == 0 {
            total += acc;
        } else {
            total -= acc;
        }
    }
    total
}

fn power_sum(n: u64, t: u64) -> ExactRational {
    int((0..t).map(|l| num_traits::pow(BigInt::from(l), n as usize)).sum::<BigInt>())
}

/// Residual `rhs - lhs` of the printed expansion, truncated at `k <= max_k`.
pub fn sum_of_powers_residual(n: u64, t: u64, max_k: u64) -> ExactRational {
    sum_of_powers_rhs(n, t, &printed_sum_of_powers_coefficients(), max_k) - power_sum(n, t)
}

/// Least-squares slope of `log |residual|` against `log t`, or `None` when the
/// residual vanishes at every sampled `t`.
pub fn sum_of_powers_growth_order(n: u64, max_k: u64, ts: &[u64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = ts
        .iter()
        .filter_map(|&t| {
            let r = sum_of_powers_residual(n, t, max_k).abs().to_f64()?;
            (r > 0.0).then(|| ((t as f64).ln(), r.ln()))
        })
        .collect();
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Slack allowed on a fitted log-log slope; lower-order terms bend the fit.
pub const SLOPE_TOLERANCE: f64 = 0.01;

/// The sampled grid `t = 10, 20, ..., 50`.
pub fn growth_grid() -> Vec<u64> {
    (1..=5).map(|i| 10 * i).collect()
}

/// Measures the printed sum of powers expansion at `(n, t)` without asserting it.
pub fn measure_sum_of_powers_residual(n: u64, t: u64) -> IdentityReport {
    let mut report = IdentityReport::new("sum-of-powers", json!({ "n": n, "t": t }));
    let printed = printed_sum_of_powers_coefficients();
    let lhs = power_sum(n, t);
    let rhs = sum_of_powers_rhs(n, t, &printed, 3);
    report.verdict = Verdict::Residual;
    report.residual = Some(ratio_string(&(&rhs - &lhs)));
    report.lhs = Some(ratio_string(&lhs));
    report.rhs = Some(ratio_string(&rhs));
    let grid = growth_grid();
    match sum_of_powers_growth_order(n, 3, &grid) {
        Some(slope) => report.notes.push(format!("residual grows like t^{slope:.3}")),
        None => report.notes.push("residual vanishes on the sampled grid".into()),
    }
    match sum_of_powers_growth_order(n, 1, &grid) {
        Some(slope) => report
            .notes
            .push(format!("leading-order truncation k <= 1 leaves t^{slope:.3}")),
        None => report.notes.push("leading-order truncation k <= 1 is exact".into()),
    }
    let defined: Vec<ExactRational> = (0..=n + 1).map(defined_sum_of_powers_coefficient).collect();
    report.notes.push(format!(
        "defining sum gives c_0..c_{} = [{}]",
        n + 1,
        join_ratios(&defined)
    ));
    let exact_k_le_n = sum_of_powers_rhs(n, t, &defined, n) == lhs;
    report.notes.push(format!(
        "with the defined c_k and k <= n the expansion is {}",
        if exact_k_le_n { "exact" } else { "not exact" }
    ));
    report
}

/// Sums `joint_pdf_exact` over the full count lattice `{0..=N}^p`.
pub fn check_joint_normalization(params: &SystemParams, levels: &LevelSelection) -> Result<IdentityReport> {
    let report = IdentityReport::new(
        "joint-normalization",
        json!({ "N": params.n(), "M": params.m(), "levels": levels.levels() }),
    );
    let n = params.n();
    let arity = levels.arity();
    let mut counts = vec![0u64; arity];
    let mut total = ExactRational::zero();
    loop {
        total += joint_pdf_exact(params, levels.levels(), &counts)?;
        let mut i = 0;
        while i < arity {
            counts[i] += 1;
            if counts[i] <= n {
                break;
            }
            counts[i] = 0;
            i += 1;
        }
        if i == arity {
            break;
        }
    }
    Ok(report.compare(&total, &ExactRational::one()))
}

#[derive(Clone, Debug, PartialEq)]
enum Case {
    PowerOfSum(u64, u64, u64),
    Differential(u32, u32),
    Simplex(usize, usize, u64),
    Joint(u64, u64, Vec<u64>),
    SumOfPowers(u64, u64),
}

fn full_grid() -> Vec<Case> {
    let mut cases = Vec::new();
    for n in 1..=6 {
        for m in 0..=8 {
            for j in 0..=m {
                cases.push(Case::PowerOfSum(n, m, j));
            }
        }
    }
    for q in 1..=6 {
        for m in 1..=6 {
            cases.push(Case::Differential(q, m));
        }
    }
    for p in 1..=4 {
        for rotation in 0..4 {
            for n in 0..=8 {
                cases.push(Case::Simplex(p, rotation, n));
            }
        }
    }
    for n in 1..=6u64 {
        for m in 0..=8u64 {
            for levels in level_subsets(m, 3) {
                cases.push(Case::Joint(n, m, levels));
            }
        }
    }
    for n in 1..=4 {
        for t in [2, 10, 50] {
            cases.push(Case::SumOfPowers(n, t));
        }
    }
    cases
}

/// All strictly ascending subsets of `0..=m` with between 1 and `max_len` elements.
pub fn level_subsets(m: u64, max_len: usize) -> Vec<Vec<u64>> {
    fn grow(start: u64, m: u64, max_len: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        for l in start..=m {
            cur.push(l);
            out.push(cur.clone());
            if cur.len() < max_len {
                grow(l + 1, m, max_len, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(0, m, max_len, &mut Vec::new(), &mut out);
    out
}

fn run_case(case: &Case) -> IdentityReport {
    match case {
        &Case::PowerOfSum(n, m, j) => check_power_of_sum(n, m, j),
        &Case::Differential(q, m) => check_differential_identity(q, m, DEFAULT_SERIES_ORDER),
        &Case::Simplex(p, rotation, n) => {
            let mut values = simplex_sample_values();
            values.rotate_left(rotation);
            check_simplex_sum_ii(p, &values[..p], n)
        }
        Case::Joint(n, m, levels) => {
            let params = SystemParams::new(*n, *m).expect("grid has N >= 1");
            let selection = LevelSelection::new(levels.clone(), &params).expect("grid levels are valid");
            check_joint_normalization(&params, &selection).expect("grid points are in range")
        }
        &Case::SumOfPowers(n, t) => measure_sum_of_powers_residual(n, t),
    }
}

/// Every identity over its full grid, in a fixed order.
pub fn run_all() -> Vec<IdentityReport> {
    run_all_with(Execution::default())
}

pub fn run_all_with(exec: Execution) -> Vec<IdentityReport> {
    exec.map_slice(&full_grid(), run_case)
}

/// Coefficient of `z^p u^q` in the power of the sum, including the `q = N` corner.
pub fn alpha(p: u64, j: u64, n: u64, q: u64) -> BigInt {
    if q >= n {
        return BigInt::from((q == n && n * j == p) as u8);
    }
    power_of_sum_coefficient(p, j, n, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> ExactRational {
        ExactRational::new(a.into(), b.into())
    }

    #[test]
    fn power_of_sum_examples() {
        for (n, m, j) in [(2, 3, 1), (4, 4, 1), (1, 5, 3), (3, 6, 0)] {
            let r = check_power_of_sum(n, m, j);
            assert_eq!(r.verdict, Verdict::ExactEqual, "{r:?}");
        }
        assert_eq!(check_power_of_sum(2, 1, 2).verdict, Verdict::DomainError);
    }

    #[test]
    fn linear_case_coefficients() {
        for m in 0..6u64 {
            for j in 0..=m {
                for p in 0..=m {
                    assert_eq!(alpha(p, j, 1, 0), BigInt::one());
                    assert_eq!(alpha(p, j, 1, 1), BigInt::from((p == j) as u8));
                }
            }
        }
    }

    #[test]
    fn series_arithmetic() {
        let k = 8;
        let e = TruncatedSeries::exp_scaled(1, k);
        assert_eq!(e.derivative(), TruncatedSeries::exp_scaled(1, k - 1));
        assert_eq!(e.mul(&e), TruncatedSeries::exp_scaled(2, k));
        assert_eq!(
            TruncatedSeries::exp_minus_one(k).add(&TruncatedSeries::constant(q(1, 1), k)),
            e
        );
        // log(1 + x) composed with e^y - 1 is y
        let log1p: Vec<ExactRational> =
            (0..=k as i64).map(|i| if i == 0 { q(0, 1) } else { q(if i % 2 == 1 { 1 } else { -1 }, i) }).collect();
        let y = TruncatedSeries::new(log1p, k).compose_exp_minus_one();
        let mut expect = vec![q(0, 1); k + 1];
        expect[1] = q(1, 1);
        assert_eq!(y.coefficients(), &expect[..]);
    }

    #[test]
    fn differential_examples() {
        for (qq, m, k) in [(1, 1, 16), (2, 3, 10), (3, 5, 12), (6, 6, 16)] {
            let r = check_differential_identity(qq, m, k);
            assert_eq!(r.verdict, Verdict::ExactEqual, "{r:?}");
        }
        // the m = 5 row feeds the q = 3 case
        assert_eq!(
            (1..=5).map(|s| triangle_coefficient(5, s)).collect::<Vec<_>>(),
            [1, 15, 25, 10, 1].map(BigInt::from).to_vec()
        );
    }

    #[test]
    fn simplex_examples() {
        let r = check_simplex_sum_ii(1, &[q(1, 2)], 3);
        assert_eq!(r.verdict, Verdict::ExactEqual);
        assert_eq!(r.lhs.as_deref(), Some("15/8"));
        assert_eq!(r.rhs.as_deref(), Some("15/8"));
        let r = check_simplex_sum_ii(2, &[q(1, 2), q(1, 3)], 4);
        assert_eq!(r.verdict, Verdict::ExactEqual);
        assert_eq!(check_simplex_sum_ii(1, &[q(1, 1)], 3).verdict, Verdict::DomainError);
        assert_eq!(check_simplex_sum_ii(2, &[q(2, 1), q(1, 2)], 3).verdict, Verdict::DomainError);
        assert_eq!(check_simplex_sum_ii(2, &[q(1, 2)], 3).verdict, Verdict::DomainError);
    }

    #[test]
    fn simplex_nested_sum_against_brute_force() {
        let a = [q(1, 2), q(2, 5), q(3, 7)];
        let top = 4u64;
        let mut brute = q(0, 1);
        for n0 in 0..=top {
            for n1 in n0..=top {
                for n2 in n1..=top {
                    brute += num_traits::pow(a[0].clone(), n0 as usize)
                        * num_traits::pow(a[1].clone(), n1 as usize)
                        * num_traits::pow(a[2].clone(), n2 as usize);
                }
            }
        }
        assert_eq!(nested_geometric_sum(&a, top), brute);
    }

    #[test]
    fn sum_of_powers_measurements() {
        assert_eq!(sum_of_powers_residual(1, 10, 3), q(1, 12));
        assert_eq!(sum_of_powers_rhs(1, 10, &printed_sum_of_powers_coefficients(), 1), q(45, 1));
        assert_eq!(sum_of_powers_residual(2, 10, 3), q(-1, 4));
        assert_eq!(sum_of_powers_residual(3, 10, 3), q(-30, 4));
        assert_eq!(power_sum(2, 10), q(285, 1));
        assert_eq!(power_sum(1, 2), q(1, 1));
        let r = measure_sum_of_powers_residual(1, 10);
        assert_eq!(r.verdict, Verdict::Residual);
        assert_eq!(r.residual.as_deref(), Some("1/12"));
        assert!(!r.verdict.is_red());
    }

    #[test]
    fn sum_of_powers_growth() {
        let grid = growth_grid();
        assert_eq!(sum_of_powers_growth_order(1, 1, &grid), None);
        for n in 2..=4 {
            let slope = sum_of_powers_growth_order(n, 1, &grid).unwrap();
            assert!(slope <= (n - 1) as f64 + SLOPE_TOLERANCE, "n={n}: {slope}");
        }
        let printed_n3 = sum_of_powers_growth_order(3, 3, &grid).unwrap();
        assert!((printed_n3 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn defined_coefficients_are_bernoulli_over_factorial() {
        let expect = [q(1, 1), q(-1, 2), q(1, 12), q(0, 1), q(-1, 720), q(0, 1), q(1, 30240)];
        for (k, want) in expect.iter().enumerate() {
            assert_eq!(&defined_sum_of_powers_coefficient(k as u64), want, "k={k}");
        }
        for n in 1..=6 {
            let c: Vec<_> = (0..=n + 1).map(defined_sum_of_powers_coefficient).collect();
            for t in 2..=20 {
                assert_eq!(sum_of_powers_rhs(n, t, &c, n), power_sum(n, t));
            }
        }
    }

    #[test]
    fn joint_normalization_examples() {
        for (n, m, levels) in [(2, 2, vec![0, 1]), (1, 1, vec![0]), (4, 5, vec![0, 2, 4])] {
            let p = SystemParams::new(n, m).unwrap();
            let r = check_joint_normalization(&p, &LevelSelection::new(levels, &p).unwrap()).unwrap();
            assert_eq!(r.verdict, Verdict::ExactEqual);
            assert_eq!(r.lhs.as_deref(), Some("1/1"));
        }
    }

    #[test]
    fn level_subset_counts() {
        assert_eq!(level_subsets(0, 3), vec![vec![0]]);
        assert_eq!(level_subsets(8, 3).len(), 9 + 36 + 84);
    }

    #[test]
    fn reports_serialize() {
        let r = check_simplex_sum_ii(1, &[q(1, 2)], 3);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "exact-equal");
        assert_eq!(v["name"], "simplex-sum-ii");
        assert_eq!(v["params"]["n_p"], 3);
    }

    proptest! {
        #[test]
        fn simplex_holds_at_random_rationals(
            p in 1usize..=3,
            nums in proptest::collection::vec(1i64..9, 3),
            dens in proptest::collection::vec(10i64..20, 3),
            top in 0u64..6,
        ) {
            let a: Vec<_> = nums.iter().zip(&dens).map(|(&x, &y)| q(x, y)).collect();
            let r = check_simplex_sum_ii(p, &a[..p], top);
            prop_assert_eq!(r.verdict, Verdict::ExactEqual);
        }
    }
}
