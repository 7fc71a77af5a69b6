//! The generating functions behind the identity: triangular numbers, the
//! shifted theta function and the eta quotient that equals it.

use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use super::series::{FracSeries, SCALE};

fn one() -> BigRational {
    BigRational::one()
}

/// `Σ_{n≥0} q^{n(n+1)/2}` up to `q^{N/16}`.
pub fn triangle_series(truncation: i64) -> FracSeries {
    let mut s = FracSeries::zero(truncation);
    let mut n: i64 = 0;
    loop {
        let exp = SCALE * n * (n + 1) / 2;
        if exp > truncation {
            break;
        }
        s.add_term(exp, one());
        n += 1;
    }
    s
}

/// `∏_{n≥1} (1 - q^{2n}) / (1 - q^{2n-1})` expanded up to `q^{N/16}`.
pub fn triangle_product_form(truncation: i64) -> FracSeries {
    let mut acc = FracSeries::one(truncation);
    let mut n: i64 = 1;
    while SCALE * (2 * n - 1) <= truncation {
        let odd = SCALE * (2 * n - 1);
        // 1/(1 - q^{2n-1}) as a geometric series
        let geometric = FracSeries::from_terms(
            (0..)
                .map(|j| j * odd)
                .take_while(|e| *e <= truncation)
                .map(|e| (e, one())),
            truncation,
        );
        acc = &acc * &geometric;
        let even = SCALE * 2 * n;
        if even <= truncation {
            let numer = FracSeries::from_terms([(0, one()), (even, -one())], truncation);
            acc = &acc * &numer;
        }
        n += 1;
    }
    acc
}

/// `θ_△(τ) = q^{1/16} △(q^{1/2}) = (1/2) Σ_{n ∈ 1/2+ℤ} q^{n²/4}`.
///
/// On the scale-16 lattice the support is the odd squares `(2k+1)²`.
pub fn theta_triangle(truncation: i64) -> FracSeries {
    let mut s = FracSeries::zero(truncation);
    let mut k: i64 = 0;
    while (2 * k + 1) * (2 * k + 1) <= truncation {
        s.add_term((2 * k + 1) * (2 * k + 1), one());
        k += 1;
    }
    s
}

/// `∏_{n≥1} (1 - q^{step·n/16})` up to `q^{N/16}`.
pub fn euler_product(step: i64, truncation: i64) -> FracSeries {
    assert!(step > 0, "euler_product step must be positive");
    let mut acc = FracSeries::one(truncation);
    let mut n: i64 = 1;
    while step * n <= truncation {
        let factor = FracSeries::from_terms([(0, one()), (step * n, -one())], truncation);
        acc = &acc * &factor;
        n += 1;
    }
    acc
}

/// `η(τ)² / η(τ/2)` with `η(τ) = q^{1/24} ∏(1 - q^n)`, expanded by exact series
/// inversion of `∏(1 - q^{n/2})`.
pub fn eta_quotient_theta(truncation: i64) -> FracSeries {
    // q-power prefactor: 2·(1/24) - (1/2)(1/24)
    let prefactor = Ratio::new(2i64, 24) - Ratio::new(1i64, 48);
    let scaled = prefactor * Ratio::from_integer(SCALE);
    assert!(
        scaled.is_integer(),
        "eta quotient prefactor must lie on the 1/16 lattice"
    );
    let shift = scaled.to_integer();

    let unit_truncation = truncation - shift;
    let eta_full = euler_product(SCALE, unit_truncation);
    let eta_half = euler_product(SCALE / 2, unit_truncation);
    let numerator = &eta_full * &eta_full;
    let denominator = eta_half
        .inverse()
        .expect("Euler product has constant term 1");
    let unit = &numerator * &denominator;
    unit.shift(shift)
}

/// Exact `e`-th power; see [`FracSeries::pow`].
pub fn series_pow(s: &FracSeries, e: u32) -> FracSeries {
    s.pow(e)
}

/// Number of ordered representations of `n` as a sum of `parts` triangular
/// numbers, by direct dynamic programming over the parts.
pub fn triangular_representations(n: u64, parts: usize) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    let tri: Vec<u64> = (0..)
        .map(|k: u64| k * (k + 1) / 2)
        .take_while(|t| *t <= n)
        .collect();
    let mut ways = vec![BigUint::zero(); n as usize + 1];
    ways[0] = BigUint::one();
    for _ in 0..parts {
        let mut next = vec![BigUint::zero(); n as usize + 1];
        for (total, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for t in tri.iter() {
                let s = total + *t as usize;
                if s > n as usize {
                    break;
                }
                next[s] += w;
            }
        }
        ways = next;
    }
    ways.swap_remove(n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn triangle_coefficients() {
        let s = triangle_series(16 * 10);
        assert_eq!(s.coeff(0).unwrap(), r(1));
        assert_eq!(s.coeff(16 * 2).unwrap(), r(0));
        for t in [1, 3, 6, 10] {
            assert_eq!(s.coeff(16 * t).unwrap(), r(1));
        }
        // off-lattice exponents are zero
        assert_eq!(s.coeff(8).unwrap(), r(0));
    }

    #[test]
    fn product_form_small_orders() {
        let p = triangle_product_form(16 * 12);
        assert_eq!(p.coeff(0).unwrap(), r(1));
        assert_eq!(p.coeff(16 * 4).unwrap(), r(0));
        assert!(p.agrees_with(&triangle_series(16 * 12)));
    }

    #[test]
    fn theta_triangle_leading_terms() {
        let t = theta_triangle(100);
        assert_eq!(
            t.leading_term().map(|(n, c)| (n, c.clone())),
            Some((1, r(1)))
        );
        assert_eq!(t.coeff(9).unwrap(), r(1));
        assert_eq!(t.coeff(2).unwrap(), r(0));
        assert_eq!(t.coeff(25).unwrap(), r(1));
    }

    #[test]
    fn eta_quotient_leading_term() {
        let e = eta_quotient_theta(120);
        assert_eq!(e.truncation(), 120);
        assert_eq!(e.valuation(), Some(1));
        assert_eq!(e.coeff(1).unwrap(), r(1));
    }

    // Hand expansion of (1-q)(1-q^2)(1-q^3)(1-q^4)(1-q^5) through q^5.
    #[test]
    fn euler_product_against_hand_expansion() {
        let e = euler_product(SCALE, SCALE * 5);
        let expected = [1, -1, -1, 0, 0, 1];
        for (k, c) in expected.iter().enumerate() {
            assert_eq!(e.coeff(SCALE * k as i64).unwrap(), r(*c), "q^{k}");
        }
    }

    // η(τ)²/η(τ/2) · q^{-1/16} multiplied back by ∏(1-q^{n/2}) must give
    // ∏(1-q^n)², whose coefficients through q^5 are 1,-2,-1,2,1,2.
    #[test]
    fn eta_quotient_against_squared_euler_product() {
        let n = 16 * 5 + 1;
        let e = eta_quotient_theta(n).shift(-1);
        let back = &e * &euler_product(8, n - 1);
        let expected = [1, -2, -1, 2, 1, 2];
        for (k, c) in expected.iter().enumerate() {
            assert_eq!(back.coeff(SCALE * k as i64).unwrap(), r(*c), "q^{k}");
        }
        for k in 1..=5 {
            assert_eq!(
                eta_quotient_theta(n).coeff(1 + SCALE * k).unwrap(),
                theta_triangle(n).coeff(1 + SCALE * k).unwrap()
            );
        }
    }

    #[test]
    fn theta_sixth_power() {
        let t6 = series_pow(&theta_triangle(96), 6);
        assert_eq!(t6.valuation(), Some(6));
        assert_eq!(t6.coeff(6).unwrap(), r(1));
        // one q^{1/2} factor chosen among six copies
        assert_eq!(t6.coeff(6 + 8).unwrap(), r(6));
    }

    #[test]
    fn triangular_counts_small() {
        // 3 = 3 or 1+1+1 over two parts: only 3+0, 0+3
        assert_eq!(triangular_representations(3, 2), 2u32.into());
        assert_eq!(triangular_representations(2, 2), 1u32.into());
        assert_eq!(triangular_representations(1, 6), 6u32.into());
    }
}
