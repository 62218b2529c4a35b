//! Exact integer and rational primitives: binomials, multinomial weights, the
//! `a_s^(m)` coefficient triangle of the differential identity and the
//! power-of-the-sum coefficients.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

/// Orders cached by the shared coefficient triangle.
pub const DEFAULT_TRIANGLE_ORDER: usize = 32;

/// Formats a rational as `numerator/denominator`, including `1/1` for integers.
pub fn ratio_string(value: &ExactRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Binomial coefficient `C(n, k)`; zero whenever `k < 0`, `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `N! / prod_j n_j!` with `N = sum_j n_j`.
pub fn multinomial_weight(counts: &[u64]) -> BigInt {
    // product of binomials keeps intermediates small
    let mut total: u64 = 0;
    let mut acc = BigInt::one();
    for &c in counts {
        total += c;
        acc *= binomial(total as i64, c as i64);
    }
    acc
}

/// Rows `m = 1..=max_order` of the triangle `a_s^(m)`, `s = 1..=m`
/// (Stirling numbers of the second kind).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTriangle {
    rows: Vec<Vec<BigInt>>,
}

impl CoefficientTriangle {
    /// Builds rows up to `max_order` by the recursion
    /// `a_s^(m+1) = s a_s^(m) 1[s<=m] + a_{s-1}^(m) 1[s>=2]`.
    ///
    /// Every entry is checked against the closed form at construction.
    ///
    /// # Panics
    /// If the recursion and the closed form disagree, which can only be an
    /// implementation bug.
    pub fn new(max_order: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_order);
        if max_order >= 1 {
            rows.push(vec![BigInt::one()]);
        }
        for m in 1..max_order {
            let prev = &rows[m - 1];
            let next: Vec<BigInt> = (1..=m + 1)
                .map(|s| {
                    let mut v = BigInt::zero();
                    if s <= m {
                        v += &prev[s - 1] * s;
                    }
                    if s >= 2 {
                        v += &prev[s - 2];
                    }
                    v
                })
                .collect();
            rows.push(next);
        }
        for (idx, row) in rows.iter().enumerate() {
            let m = idx + 1;
            for (s_idx, entry) in row.iter().enumerate() {
                let closed = closed_form_coefficient(m, s_idx + 1);
                assert_eq!(
                    *entry, closed,
                    "a_{}^({}) recursion {} != closed form {}",
                    s_idx + 1, m, entry, closed
                );
            }
        }
        Self { rows }
    }

    pub fn max_order(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, m: usize) -> Option<&[BigInt]> {
        if m == 0 {
            return None;
        }
        self.rows.get(m - 1).map(Vec::as_slice)
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// `a_s^(m)`, zero outside `1 <= s <= m`. `None` beyond the cached order.
    pub fn get(&self, m: usize, s: usize) -> Option<BigInt> {
        if m == 0 || s == 0 || s > m {
            return Some(BigInt::zero());
        }
        self.row(m).map(|row| row[s - 1].clone())
    }
}

/// `a_s^(m) = (1/(s-1)!) sum_{q=0}^{s-1} (-1)^q C(s-1, q) (s-q)^(m-1)`.
fn closed_form_coefficient(m: usize, s: usize) -> BigInt {
    if m == 0 || s == 0 {
        return BigInt::zero();
    }
    let mut sum = BigInt::zero();
    for q in 0..s {
        let term = binomial(s as i64 - 1, q as i64) * num_traits::pow(BigInt::from(s - q), m - 1);
        if q % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let denom = factorial(s as u64 - 1);
    debug_assert!((&sum % &denom).is_zero() && !sum.is_negative());
    sum / denom
}

fn shared_triangle() -> &'static CoefficientTriangle {
    static TRIANGLE: OnceLock<CoefficientTriangle> = OnceLock::new();
    TRIANGLE.get_or_init(|| CoefficientTriangle::new(DEFAULT_TRIANGLE_ORDER))
}

/// `a_s^(m)`, served from the shared cache when `m` is within its order.
pub fn triangle_coefficient(m: usize, s: usize) -> BigInt {
    match shared_triangle().get(m, s) {
        Some(v) => v,
        None => stirling_like_row(m)[s - 1].clone(),
    }
}

/// Row `m` of the triangle, `(a_s^(m))_{s=1..m}`. Panics for `m = 0`.
pub fn stirling_like_row(m: usize) -> Vec<BigInt> {
    assert!(m >= 1, "triangle rows start at m = 1");
    if let Some(row) = shared_triangle().row(m) {
        return row.to_vec();
    }
    CoefficientTriangle::new(m).rows.pop().expect("m >= 1")
}

/// `alpha_q^(p,j,N) = C(N, q) C(p - qj + N - 1 - q, N - 1 - q)`, gated to zero
/// when `qj > p`.
pub fn power_of_sum_coefficient(p: u64, j: u64, n: u64, q: u64) -> BigInt {
    if q * j > p {
        return BigInt::zero();
    }
    let (p, j, n, q) = (p as i64, j as i64, n as i64, q as i64);
    binomial(n, q) * binomial(p - q * j + n - 1 - q, n - 1 - q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(5, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(-1, -1), BigInt::zero());
        assert_eq!(binomial(-3, 1), BigInt::zero());
        assert_eq!(binomial(52, 5), BigInt::from(2_598_960));
    }

    #[test]
    fn multinomial_weights() {
        assert_eq!(multinomial_weight(&[1, 2, 0]), BigInt::from(3));
        assert_eq!(multinomial_weight(&[4]), BigInt::from(1));
        assert_eq!(multinomial_weight(&[2, 2]), BigInt::from(6));
        assert_eq!(multinomial_weight(&[]), BigInt::from(1));
    }

    #[test]
    fn printed_triangle_rows() {
        assert_eq!(stirling_like_row(1), ints(&[1]));
        assert_eq!(stirling_like_row(2), ints(&[1, 1]));
        assert_eq!(stirling_like_row(3), ints(&[1, 3, 1]));
        assert_eq!(stirling_like_row(4), ints(&[1, 7, 6, 1]));
        assert_eq!(stirling_like_row(5), ints(&[1, 15, 25, 10, 1]));
        assert_eq!(stirling_like_row(6), ints(&[1, 31, 90, 65, 15, 1]));
    }

    #[test]
    fn rows_beyond_cache_are_built_on_demand() {
        let row = stirling_like_row(DEFAULT_TRIANGLE_ORDER + 3);
        assert_eq!(row.len(), DEFAULT_TRIANGLE_ORDER + 3);
        assert_eq!(row[0], BigInt::one());
        assert_eq!(*row.last().unwrap(), BigInt::one());
        assert_eq!(
            triangle_coefficient(DEFAULT_TRIANGLE_ORDER + 3, 2),
            row[1]
        );
    }

    #[test]
    fn triangle_edges_and_out_of_range() {
        let t = CoefficientTriangle::new(12);
        for row in t.rows() {
            assert_eq!(row[0], BigInt::one());
            assert_eq!(*row.last().unwrap(), BigInt::one());
        }
        assert_eq!(t.get(5, 0), Some(BigInt::zero()));
        assert_eq!(t.get(5, 6), Some(BigInt::zero()));
        assert_eq!(t.get(13, 2), None);
    }

    #[test]
    fn row_sums_match_bell_numbers() {
        // Bell triangle, independent of the recursion above
        let mut bell = vec![BigInt::one()];
        let mut row = vec![BigInt::one()];
        for _ in 0..12 {
            let mut next = vec![row.last().unwrap().clone()];
            for x in &row {
                let v = next.last().unwrap() + x;
                next.push(v);
            }
            row = next;
            bell.push(row[0].clone());
        }
        let t = CoefficientTriangle::new(12);
        for m in 1..=12 {
            let sum: BigInt = t.row(m).unwrap().iter().sum();
            assert_eq!(sum, bell[m], "m = {m}");
        }
    }

    #[test]
    fn power_of_sum_coefficient_examples() {
        assert_eq!(power_of_sum_coefficient(2, 1, 2, 1), BigInt::from(2));
        assert_eq!(power_of_sum_coefficient(1, 2, 3, 1), BigInt::zero());
        for (p, n) in [(0, 1), (3, 2), (7, 5)] {
            assert_eq!(
                power_of_sum_coefficient(p, 3, n, 0),
                binomial((p + n - 1) as i64, (n - 1) as i64)
            );
        }
    }

    #[test]
    fn ratio_string_keeps_unit_denominator() {
        assert_eq!(ratio_string(&ExactRational::from_integer(1.into())), "1/1");
        assert_eq!(
            ratio_string(&ExactRational::new(4.into(), 6.into())),
            "2/3"
        );
    }

    proptest! {
        #[test]
        fn pascal_rule(n in 1i64..60, k in 0i64..60) {
            prop_assume!(k <= n);
            prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        }

        #[test]
        fn binomial_symmetry(n in 0i64..80, k in 0i64..80) {
            prop_assume!(k <= n);
            prop_assert_eq!(binomial(n, k), binomial(n, n - k));
        }
    }
}
