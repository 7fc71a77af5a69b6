//! Exact expansion of the cone-form series `KW_m`, the end-to-end identity
//! `θ_△^{2m(2m+1)} = KW_m`, and evaluation of exact series at a point.
//!
//! ```text
//! KW_m = 2^m / (m! (∏(2j−1)!)²) Σ V_m(x) ∏_j q^{(x_j² − y_j²)/2} (−1)^{x_j − y_j − 1/2}
//! ```
//!
//! over `x_j ∈ ℤ_{>0}`, `y_j ∈ 1/2 + ℤ_{≥0}`, `x_j > y_j`. A cone pair is
//! stored as `(x, 2y)`; its exponent on the 1/16 lattice is `8x² − 2(2y)²`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactq::{rational_to_f64, theta_triangle, FracSeries, SeriesError, SCALE};
use crate::mpoly::{kw_normaliser, vm_poly};
use crate::theta::TauPoint;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("m must be at least 1")]
    ZeroRank,
    #[error("tail of the truncated series at v = {v} is bounded only by {bound:e}; need v larger or more terms")]
    TailTooLarge { v: f64, bound: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `(x, y)` with `x ∈ ℤ_{>0}`, `y ∈ 1/2 + ℤ_{≥0}` and `x > y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConePair {
    x: i64,
    y2: i64,
}

impl ConePair {
    /// `y = y2/2`; `y2` must be odd.
    pub fn new(x: i64, y2: i64) -> Option<Self> {
        (x > 0 && y2 > 0 && y2 % 2 == 1 && 2 * x > y2).then_some(Self { x, y2 })
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    /// Twice `y`.
    pub fn y2(&self) -> i64 {
        self.y2
    }

    pub fn y(&self) -> BigRational {
        BigRational::new(self.y2.into(), 2.into())
    }

    /// `16 · (x² − y²)/2`.
    pub fn key(&self) -> i64 {
        8 * self.x * self.x - 2 * self.y2 * self.y2
    }

    pub fn exponent(&self) -> BigRational {
        BigRational::new(self.key().into(), SCALE.into())
    }

    /// `(−1)^{x − y − 1/2}`.
    pub fn sign(&self) -> i64 {
        parity_sign(self.x - (self.y2 + 1) / 2)
    }
}

fn parity_sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// All cone pairs with `(x² − y²)/2 ≤ key_max/16`, ordered by exponent then `x`.
///
/// With `δ = 2(x − y)` and `σ = 2(x + y)`, both odd, the exponent is
/// `2δσ/16`; `δ ≥ 1`, `σ > δ`, `σ ≡ −δ (mod 4)`.
pub fn cone_pairs_up_to(key_max: i64) -> Vec<ConePair> {
    let mut out = Vec::new();
    let mut delta = 1;
    while 2 * delta * (delta + 2) <= key_max {
        let mut sigma = delta + 2;
        while 2 * delta * sigma <= key_max {
            let x = (delta + sigma) / 4;
            let y2 = (sigma - delta) / 2;
            out.push(ConePair::new(x, y2).expect("valid by construction"));
            sigma += 4;
        }
        delta += 2;
    }
    out.sort_by_key(|p| (p.key(), p.x));
    out
}

/// `(pair, exponent, sign)` for every pair with exponent at most `max_exponent`.
pub fn enumerate_cone_pairs(max_exponent: &BigRational) -> Vec<(ConePair, BigRational, i64)> {
    let key_max = (max_exponent * BigRational::from_integer(SCALE.into()))
        .floor()
        .to_integer()
        .to_i64()
        .unwrap_or(i64::MAX / 4);
    cone_pairs_up_to(key_max)
        .into_iter()
        .map(|p| (p, p.exponent(), p.sign()))
        .collect()
}

/// Sign convention for the character `(−1)^{x − y ∓ 1/2}`; `Flipped` is the
/// negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignConvention {
    Standard,
    Flipped,
}

/// Smallest exponent key of a cone pair, `(1, 1/2)`.
const MIN_KEY: i64 = 6;

/// `V_m · 2^{m²}` at cone pairs, as an integer.
fn vm_scaled(pairs: &[ConePair]) -> BigInt {
    let mut v = BigInt::one();
    for (i, p) in pairs.iter().enumerate() {
        v *= BigInt::from(p.x) * BigInt::from(p.y2);
        for q in &pairs[i + 1..] {
            v *= BigInt::from(p.x * p.x - q.x * q.x) * BigInt::from(p.y2 * p.y2 - q.y2 * q.y2);
        }
    }
    v
}

/// `KW_m` to `q^{N/16}` from the cone form.
pub fn kw_series(m: usize, truncation: i64) -> Result<FracSeries, VerifyError> {
    kw_series_with(m, truncation, SignConvention::Standard)
}

pub fn kw_series_with(
    m: usize,
    truncation: i64,
    sign: SignConvention,
) -> Result<FracSeries, VerifyError> {
    if m == 0 {
        return Err(VerifyError::ZeroRank);
    }
    let budget = truncation - (m as i64 - 1) * MIN_KEY;
    let pairs = if budget >= MIN_KEY {
        cone_pairs_up_to(budget)
    } else {
        Vec::new()
    };
    let flip = match sign {
        SignConvention::Standard => 1,
        SignConvention::Flipped => parity_sign(m as i64),
    };

    fn rec(
        pairs: &[ConePair],
        m: usize,
        left: i64,
        chosen: &mut Vec<ConePair>,
        acc: &mut BTreeMap<i64, BigInt>,
        key: i64,
        sign: i64,
    ) {
        if chosen.len() == m {
            let v = vm_scaled(chosen) * sign;
            *acc.entry(key).or_insert_with(BigInt::zero) += v;
            return;
        }
        let reserve = (m - chosen.len() - 1) as i64 * MIN_KEY;
        for p in pairs {
            let k = p.key();
            if k > left - reserve {
                break;
            }
            // V_m vanishes on repeated x or repeated y
            if chosen.iter().any(|c| c.x == p.x || c.y2 == p.y2) {
                continue;
            }
            chosen.push(*p);
            rec(pairs, m, left - k, chosen, acc, key + k, sign * p.sign());
            chosen.pop();
        }
    }

    let partial: Vec<BTreeMap<i64, BigInt>> = pairs
        .par_iter()
        .map(|first| {
            let mut acc = BTreeMap::new();
            let k = first.key();
            if k <= budget {
                let mut chosen = vec![*first];
                rec(
                    &pairs,
                    m,
                    truncation - k,
                    &mut chosen,
                    &mut acc,
                    k,
                    first.sign(),
                );
            }
            acc
        })
        .collect();

    let mut total: BTreeMap<i64, BigInt> = BTreeMap::new();
    for map in partial {
        for (k, v) in map {
            *total.entry(k).or_insert_with(BigInt::zero) += v;
        }
    }
    let two_m = BigInt::one() << m;
    let denom = kw_normaliser(m) * (BigInt::one() << (m * m));
    let prefactor = BigRational::new(two_m * flip, denom);
    Ok(FracSeries::from_terms(
        total
            .into_iter()
            .map(|(k, v)| (k, BigRational::from_integer(v) * &prefactor)),
        truncation,
    ))
}

/// `KW_m` to `q^{N/16}` from the unfolded full-lattice sign-kernel form.
///
/// Every `x ∈ ℤ`, `y ∈ 1/2 + ℤ` is visited; `V_m` is evaluated with the exact
/// polynomial from `mpoly`, so this shares no arithmetic with [`kw_series`].
pub fn kw_series_fulllattice(m: usize, truncation: i64) -> Result<FracSeries, VerifyError> {
    if m == 0 {
        return Err(VerifyError::ZeroRank);
    }
    // (x, 2y, key, H · sign) for lattice points with H ≠ 0
    let budget = truncation - (m as i64 - 1) * MIN_KEY;
    let xmax = budget.max(0) / 8 + 2;
    let mut points: Vec<(i64, i64, i64, i64)> = Vec::new();
    for x in -xmax..=xmax {
        for y2 in (-2 * xmax - 1..=2 * xmax + 1).filter(|y| y.rem_euclid(2) == 1) {
            // sgn(x − y) − sgn(−x − y), doubled coordinates
            let h = (2 * x - y2).signum() - (-2 * x - y2).signum();
            if h == 0 {
                continue;
            }
            let key = 8 * x * x - 2 * y2 * y2;
            if key > budget {
                continue;
            }
            let sign = parity_sign((2 * x - y2 - 1) / 2);
            points.push((x, y2, key, h * sign));
        }
    }
    points.sort_by_key(|p| p.2);
    let v = vm_poly(m);
    let mut acc: BTreeMap<i64, BigRational> = BTreeMap::new();
    let mut idx = vec![0usize; m];
    // odometer over m-tuples with total key ≤ truncation
    fn rec(
        points: &[(i64, i64, i64, i64)],
        m: usize,
        left: i64,
        idx: &mut Vec<usize>,
        depth: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == m {
            out.push(idx.clone());
            return;
        }
        let reserve = (m - depth - 1) as i64 * MIN_KEY;
        for (i, p) in points.iter().enumerate() {
            if p.2 > left - reserve {
                break;
            }
            idx[depth] = i;
            rec(points, m, left - p.2, idx, depth + 1, out);
        }
    }
    let mut tuples = Vec::new();
    rec(&points, m, truncation, &mut idx, 0, &mut tuples);
    let half = BigRational::new(1.into(), 2.into());
    for t in tuples {
        let mut coords = Vec::with_capacity(2 * m);
        let mut key = 0;
        let mut weight = 1;
        for i in &t {
            let (x, y2, k, w) = points[*i];
            coords.push(BigRational::from_integer(x.into()));
            coords.push(BigRational::from_integer(y2.into()) * &half);
            key += k;
            weight *= w;
        }
        let val = v.eval_rational(&coords).expect("dimension 2m")
            * BigRational::from_integer(weight.into());
        *acc.entry(key).or_insert_with(BigRational::zero) += val;
    }
    let prefactor = BigRational::new(BigInt::one(), (BigInt::one() << (2 * m)) * kw_normaliser(m));
    Ok(FracSeries::from_terms(
        acc.into_iter().map(|(k, c)| (k, c * &prefactor)),
        truncation,
    ))
}

/// Power `2m(2m+1)` of the triangular-number series.
pub fn identity_power(m: usize) -> u32 {
    (2 * m * (2 * m + 1)) as u32
}

/// Exponent key of the leading term `q^{m(2m+1)/8}`.
pub fn leading_key(m: usize) -> i64 {
    identity_power(m) as i64
}

/// Truncation covering `terms` half-integer steps past the leading exponent.
pub fn truncation_for_terms(m: usize, terms: i64) -> i64 {
    leading_key(m) + 8 * terms
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: i64,
    pub equal: bool,
    pub first_mismatch: Option<i64>,
    pub terms_checked: usize,
}

/// Compares `θ_△^{2m(2m+1)}` with `KW_m` coefficientwise to `q^{N/16}`.
pub fn verify_identity(m: usize, truncation: i64) -> Result<IdentityReport, VerifyError> {
    verify_identity_with(m, truncation, SignConvention::Standard)
}

pub fn verify_identity_with(
    m: usize,
    truncation: i64,
    sign: SignConvention,
) -> Result<IdentityReport, VerifyError> {
    if m == 0 {
        return Err(VerifyError::ZeroRank);
    }
    let lhs = theta_triangle(truncation)
        .pow(identity_power(m))
        .truncate(truncation)?;
    let rhs = kw_series_with(m, truncation, sign)?;
    let first_mismatch = lhs.first_mismatch(&rhs);
    Ok(IdentityReport {
        m,
        n: truncation,
        equal: first_mismatch.is_none(),
        first_mismatch,
        terms_checked: lhs.len(),
    })
}

/// Every exponent of `s` lies in `m(2m+1)/8 + (1/2)ℤ_{≥0}`. This is what makes
/// `KW_m(τ+2) = i^{m(2m+1)} KW_m(τ) = (−i)^m KW_m(τ)` an identity of series.
pub fn support_in_kw_progression(s: &FracSeries, m: usize) -> bool {
    let lead = leading_key(m);
    s.terms().all(|(n, _)| n >= lead && (n - lead) % 8 == 0)
}

/// `i^{m(2m+1)} = (−i)^m`, the phase a support in `m(2m+1)/8 + (1/2)ℤ` picks
/// up under `τ ↦ τ+2`.
pub fn translation_phase_matches(m: usize) -> bool {
    let a = (m * (2 * m + 1)) % 4;
    let b = (3 * m) % 4;
    a == b
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Estimated bound on the omitted tail.
    pub tail: f64,
}

/// Largest tail accepted by [`series_eval_at`].
pub const TAIL_LIMIT: f64 = 1e-12;

/// `Σ c_n e^{2πiτ n/16}` over the stored coefficients.
///
/// The tail past the truncation is estimated from a power-law envelope
/// `|c_n| ≤ A (n/16 + 1)^P` fitted to the stored coefficients (with one extra
/// power of slack). It is a bound for series of polynomial growth, which covers
/// every theta power and `KW_m`.
pub fn series_eval_at(s: &FracSeries, tau: TauPoint) -> Result<SeriesValue, VerifyError> {
    let mut value = Complex64::new(0.0, 0.0);
    for (n, c) in s.terms() {
        let e = n as f64 / SCALE as f64;
        let mag = (-2.0 * PI * tau.v * e).exp();
        let phase = (tau.u * e).rem_euclid(1.0);
        value += Complex64::from_polar(mag, 2.0 * PI * phase) * rational_to_f64(c);
    }
    let tail = tail_estimate(s, tau.v);
    if tail > TAIL_LIMIT {
        return Err(VerifyError::TailTooLarge {
            v: tau.v,
            bound: tail,
        });
    }
    Ok(SeriesValue { value, tail })
}

fn tail_estimate(s: &FracSeries, v: f64) -> f64 {
    let n_max = s.truncation();
    let pts: Vec<(f64, f64)> = s
        .terms()
        .filter(|(n, _)| *n > 0)
        .map(|(n, c)| {
            (
                (n as f64 / SCALE as f64 + 1.0).ln(),
                rational_to_f64(&c.abs()).ln(),
            )
        })
        .collect();
    if pts.is_empty() {
        // only a constant term is stored
        return 0.0;
    }
    let p = if pts.len() >= 2 {
        let (lo, hi) = pts.split_at(pts.len() / 2);
        let max_lo =
            lo.iter().cloned().fold(
                (0.0, f64::NEG_INFINITY),
                |a, b| if b.1 > a.1 { b } else { a },
            );
        let max_hi =
            hi.iter().cloned().fold(
                (0.0, f64::NEG_INFINITY),
                |a, b| if b.1 > a.1 { b } else { a },
            );
        if max_hi.0 > max_lo.0 {
            ((max_hi.1 - max_lo.1) / (max_hi.0 - max_lo.0)).max(0.0)
        } else {
            0.0
        }
    } else {
        0.0
    } + 1.0;
    let log_a = pts
        .iter()
        .map(|(ln_n, ln_c)| ln_c - p * ln_n)
        .fold(f64::NEG_INFINITY, f64::max);
    let rate = 2.0 * PI * v / SCALE as f64;
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let ln_term = log_a + p * (n as f64 / SCALE as f64 + 1.0).ln() - rate * n as f64;
        let term = ln_term.exp();
        tail += term;
        // terms are decreasing once past the envelope's peak; stop when negligible
        let peak = SCALE as f64 * p / (SCALE as f64 * rate) - SCALE as f64;
        if (n as f64 > peak && term < 1e-3 * tail.max(1e-300)) || n - n_max > 1_000_000 {
            break;
        }
        n += 1;
    }
    tail
}
