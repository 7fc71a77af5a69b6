//! Truncated formal q-series with exponents on the lattice (1/16)·ℤ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::SeriesError;

/// Denominator of every exponent: a stored key `n` stands for `q^{n/16}`.
pub const SCALE: i64 = 16;

/// A q-series `Σ c_n q^{n/16}` known exactly for every `n ≤ truncation`.
///
/// Coefficients past the truncation are unknown, not zero. Reading one is an
/// error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracSeries {
    truncation: i64,
    terms: BTreeMap<i64, BigRational>,
}

impl FracSeries {
    pub fn zero(truncation: i64) -> Self {
        Self {
            truncation,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(truncation: i64) -> Self {
        Self::monomial(0, BigRational::one(), truncation)
    }

    /// `coeff · q^{n/16}`, known to `truncation`.
    pub fn monomial(n: i64, coeff: BigRational, truncation: i64) -> Self {
        let mut s = Self::zero(truncation);
        s.add_term(n, coeff);
        s
    }

    /// Builds a series from `(n, coeff)` pairs; repeated exponents are summed
    /// and anything past `truncation` is discarded.
    pub fn from_terms<I>(terms: I, truncation: i64) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut s = Self::zero(truncation);
        for (n, c) in terms {
            s.add_term(n, c);
        }
        s
    }

    /// Adds `coeff · q^{n/16}` in place. Terms past the truncation are dropped.
    pub fn add_term(&mut self, n: i64, coeff: BigRational) {
        if n > self.truncation || coeff.is_zero() {
            return;
        }
        match self.terms.entry(n) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    /// Lowest exponent numerator with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Valuation, or `truncation + 1` for a series with no known terms. This is
    /// the lowest exponent at which the series could possibly be nonzero.
    fn effective_valuation(&self) -> i64 {
        self.valuation()
            .unwrap_or(self.truncation.saturating_add(1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `q^{n/16}`.
    pub fn coeff(&self, n: i64) -> Result<BigRational, SeriesError> {
        if n > self.truncation {
            return Err(SeriesError::BeyondTruncation {
                exponent: n,
                truncation: self.truncation,
            });
        }
        Ok(self
            .terms
            .get(&n)
            .cloned()
            .unwrap_or_else(BigRational::zero))
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(n, c)| (*n, c))
    }

    pub fn leading_term(&self) -> Option<(i64, &BigRational)> {
        self.terms.iter().next().map(|(n, c)| (*n, c))
    }

    /// Forgets everything past `truncation` (which must not exceed the current one).
    pub fn truncate(&self, truncation: i64) -> Result<Self, SeriesError> {
        if truncation > self.truncation {
            return Err(SeriesError::BeyondTruncation {
                exponent: truncation,
                truncation: self.truncation,
            });
        }
        Ok(Self {
            truncation,
            terms: self
                .terms
                .range(..=truncation)
                .map(|(n, c)| (*n, c.clone()))
                .collect(),
        })
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.truncation);
        }
        Self {
            truncation: self.truncation,
            terms: self.terms.iter().map(|(n, c)| (*n, c * factor)).collect(),
        }
    }

    /// Multiplies by `q^{shift/16}`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            truncation: self.truncation.saturating_add(shift),
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n + shift, c.clone()))
                .collect(),
        }
    }

    /// Exact `e`-th power by binary exponentiation.
    ///
    /// The result is valid up to `N + (e-1)·v` where `N` is the truncation and
    /// `v` the valuation of `self`.
    pub fn pow(&self, e: u32) -> Self {
        let v = self.effective_valuation();
        if e == 0 {
            return Self::one(self.truncation - v);
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => &r * &base,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        result.expect("e > 0")
    }

    /// Multiplicative inverse. Requires a nonzero leading term; a series with
    /// valuation `v` and truncation `N` has an inverse known to `N - 2v`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let (v, lead) = self.leading_term().ok_or(SeriesError::NotInvertible)?;
        let lead_inv = lead.recip();
        // unit part u = self / (lead · q^v), known for offsets 0..=N-v
        let width = self.truncation - v;
        let unit: Vec<(i64, BigRational)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(n, c)| (n - v, c * &lead_inv))
            .collect();
        let mut inv: BTreeMap<i64, BigRational> = BTreeMap::new();
        inv.insert(0, BigRational::one());
        for n in 1..=width {
            let mut acc = BigRational::zero();
            for (k, a) in unit.iter() {
                if *k > n {
                    break;
                }
                if let Some(b) = inv.get(&(n - k)) {
                    acc -= a * b;
                }
            }
            if !acc.is_zero() {
                inv.insert(n, acc);
            }
        }
        Ok(Self {
            truncation: width - v,
            terms: inv
                .into_iter()
                .map(|(n, c)| (n - v, c * &lead_inv))
                .collect(),
        })
    }

    /// First exponent numerator (up to the common truncation) where the two
    /// series differ, or `None` if they agree there.
    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        let limit = self.truncation.min(other.truncation);
        let mut keys: Vec<i64> = self
            .terms
            .range(..=limit)
            .chain(other.terms.range(..=limit))
            .map(|(n, _)| *n)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .find(|n| self.terms.get(n) != other.terms.get(n))
    }

    /// Equality on the common range of validity.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesJson::from(self)).expect("series JSON is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, SeriesError> {
        let raw: SeriesJson = serde_json::from_str(text)?;
        Self::try_from(raw)
    }
}

impl fmt::Display for FracSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})q^({n}/{SCALE})")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^({}/{SCALE}))", self.truncation + 1)
    }
}

impl<'a> Add<&'a FracSeries> for &'a FracSeries {
    type Output = FracSeries;

    fn add(self, rhs: &'a FracSeries) -> FracSeries {
        let truncation = self.truncation.min(rhs.truncation);
        let mut out = FracSeries::zero(truncation);
        for (n, c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(*n, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a FracSeries> for &'a FracSeries {
    type Output = FracSeries;

    fn sub(self, rhs: &'a FracSeries) -> FracSeries {
        self + &(-rhs)
    }
}

impl Neg for &FracSeries {
    type Output = FracSeries;

    fn neg(self) -> FracSeries {
        FracSeries {
            truncation: self.truncation,
            terms: self.terms.iter().map(|(n, c)| (*n, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a FracSeries> for &'a FracSeries {
    type Output = FracSeries;

    fn mul(self, rhs: &'a FracSeries) -> FracSeries {
        let truncation = (self.truncation.saturating_add(rhs.effective_valuation()))
            .min(rhs.truncation.saturating_add(self.effective_valuation()));
        let mut acc: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (na, ca) in self.terms.iter() {
            for (nb, cb) in rhs.terms.iter() {
                let n = na + nb;
                if n > truncation {
                    break;
                }
                *acc.entry(n).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        FracSeries {
            truncation,
            terms: acc,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    scale: i64,
    truncation: i64,
    terms: Vec<(i64, String)>,
}

impl From<&FracSeries> for SeriesJson {
    fn from(s: &FracSeries) -> Self {
        Self {
            scale: SCALE,
            truncation: s.truncation,
            terms: s.terms.iter().map(|(n, c)| (*n, c.to_string())).collect(),
        }
    }
}

impl TryFrom<SeriesJson> for FracSeries {
    type Error = SeriesError;

    fn try_from(raw: SeriesJson) -> Result<Self, SeriesError> {
        if raw.scale != SCALE {
            return Err(SeriesError::Scale(raw.scale));
        }
        let mut s = FracSeries::zero(raw.truncation);
        let mut last = None;
        for (n, text) in raw.terms {
            if last.is_some_and(|l| n <= l) {
                return Err(SeriesError::Malformed(format!(
                    "exponents not strictly ascending at {n}"
                )));
            }
            if n > raw.truncation {
                return Err(SeriesError::Malformed(format!(
                    "exponent {n} beyond truncation {}",
                    raw.truncation
                )));
            }
            last = Some(n);
            s.add_term(n, parse_rational(&text)?);
        }
        Ok(s)
    }
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, SeriesError> {
    let bad = || SeriesError::Malformed(format!("bad rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Converts an exact rational to `f64` (to within a couple of ulps).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // very large numerator/denominator: shift both down before dividing
    let n_bits = r.numer().bits() as i64;
    let d_bits = r.denom().bits() as i64;
    let shift_n = (n_bits - 1000).max(0);
    let shift_d = (d_bits - 1000).max(0);
    let n = (r.numer().abs() >> shift_n as usize)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let d = (r.denom() >> shift_d as usize)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * n / d * 2f64.powi((shift_n - shift_d) as i32)
}
