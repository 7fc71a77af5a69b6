//! The error-type function `E(z) = 2∫_0^z e^{−πu²} du = erf(√π z)`, its
//! derivative tower, and the complementary `β(z) = ∫_z^∞ u^{−1/2} e^{−πu} du`.
//!
//! `erf`, `erfc` and the scaled `erfcx(x) = e^{x²} erfc(x)` follow W. J. Cody's
//! rational Chebyshev approximations (SPECFUN `CALERF`), which are accurate to
//! roughly machine precision on the whole real line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecialError {
    #[error("beta is only defined for z >= 0, got {0}")]
    NegativeArgument(f64),
    #[error("derivative order must be at least 1")]
    ZeroOrder,
    #[error("derivative order {0} exceeds the cached tower (max {1})")]
    OrderTooLarge(u32, u32),
}

// erf on |x| <= 0.46875
#[allow(clippy::excessive_precision)]
const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302_02,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
#[allow(clippy::excessive_precision)]
const B: [f64; 4] = [
    23.601_290_952_344_12,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_170_6,
];
// erfc on 0.46875 < x <= 4
#[allow(clippy::excessive_precision)]
const C: [f64; 9] = [
    0.564_188_496_988_670_1,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_13,
    881.952_221_241_769_1,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_6,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_5e-8,
];
#[allow(clippy::excessive_precision)]
const D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_2,
    3_290.799_235_733_459_6,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_4,
];
// erfc on x > 4
#[allow(clippy::excessive_precision)]
const P: [f64; 6] = [
    0.305_326_634_961_232_36,
    0.360_344_899_949_804_45,
    0.125_781_726_111_229_26,
    0.016_083_785_148_742_275,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_097,
];
#[allow(clippy::excessive_precision)]
const Q: [f64; 5] = [
    2.568_520_192_289_822,
    1.872_952_849_923_460_4,
    0.527_905_102_951_428_4,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SMALL: f64 = 0.468_75;
const SQRT_PI: f64 = 1.772_453_850_905_516;

fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let num = (((A[4] * z + A[0]) * z + A[1]) * z + A[2]) * z + A[3];
    let den = (((z + B[0]) * z + B[1]) * z + B[2]) * z + B[3];
    x * num / den
}

/// `erfcx(y)` for `y > 0.46875`.
fn erfcx_tail(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let r = z * (num + P[4]) / (den + Q[4]);
        (FRAC_1_SQRT_PI - r) / y
    }
}

/// `e^{−y²}` split as `e^{−ỹ²} e^{−(y−ỹ)(y+ỹ)}` with `ỹ` rounded to 1/16, which
/// keeps the rounding error of `y²` out of the exponent.
fn exp_neg_square(y: f64) -> f64 {
    let yt = (y * 16.0).trunc() / 16.0;
    (-yt * yt).exp() * (-(y - yt) * (y + yt)).exp()
}

pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= SMALL {
        return erf_small(x);
    }
    let tail = if y >= 26.6 {
        0.0
    } else {
        erfcx_tail(y) * exp_neg_square(y)
    };
    if x < 0.0 {
        tail - 1.0
    } else {
        1.0 - tail
    }
}

pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= SMALL {
        return 1.0 - erf_small(x);
    }
    let tail = if y >= 26.6 {
        0.0
    } else {
        erfcx_tail(y) * exp_neg_square(y)
    };
    if x < 0.0 {
        2.0 - tail
    } else {
        tail
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    let y = x.abs();
    if y <= SMALL {
        return (x * x).exp() * (1.0 - erf_small(x));
    }
    if x > 0.0 {
        return erfcx_tail(y);
    }
    if x < -26.6 {
        return f64::INFINITY;
    }
    let yt = (y * 16.0).trunc() / 16.0;
    let e = (yt * yt).exp() * ((y - yt) * (y + yt)).exp();
    2.0 * e - erfcx_tail(y)
}

/// `E(z) = 2∫_0^z e^{−πu²} du`.
pub fn error_e(z: f64) -> f64 {
    erf(SQRT_PI * z)
}

/// `β(z) = ∫_z^∞ u^{−1/2} e^{−πu} du = erfc(√(πz))`, for `z ≥ 0`.
pub fn beta_fn(z: f64) -> Result<f64, SpecialError> {
    if z < 0.0 || z.is_nan() {
        return Err(SpecialError::NegativeArgument(z));
    }
    Ok(erfc((PI * z).sqrt()))
}

/// `β(z²) e^{w}` for real `z`, computed without underflow as
/// `erfcx(√π|z|) e^{w − πz²}`.
pub fn beta_sq_weighted(z: f64, log_weight: f64) -> f64 {
    erfcx(SQRT_PI * z.abs()) * (log_weight - PI * z * z).exp()
}

/// `E^{(k)}(z) = P_k(z) e^{−πz²}` with `P_1 = 2` and
/// `P_{k+1} = P_k′ − 2πz P_k`.
///
/// `coeffs[i]` is the rational part of the `z^i` coefficient; the full
/// coefficient is `coeffs[i] · π^{(k−1+i)/2}` (odd-offset entries are zero).
#[derive(Clone, Debug, PartialEq)]
pub struct DerivTowerEntry {
    pub k: u32,
    pub coeffs: Vec<BigRational>,
}

impl DerivTowerEntry {
    pub fn first() -> Self {
        Self {
            k: 1,
            coeffs: vec![BigRational::from_integer(BigInt::from(2))],
        }
    }

    pub fn pi_power(&self, i: usize) -> u32 {
        (self.k - 1 + i as u32) / 2
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn next(&self) -> Self {
        let deg = self.coeffs.len() - 1;
        let mut out = vec![BigRational::zero(); deg + 2];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i >= 1 {
                out[i - 1] += c * BigRational::from_integer(BigInt::from(i));
            }
            out[i + 1] -= c * BigRational::from_integer(BigInt::from(2));
        }
        Self {
            k: self.k + 1,
            coeffs: out,
        }
    }

    fn float_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_f64().unwrap_or(f64::NAN) * PI.powi(self.pi_power(i) as i32))
            .collect()
    }
}

/// Cached `P_1 … P_kmax`, exact and in floating point.
#[derive(Clone, Debug)]
pub struct DerivTower {
    entries: Vec<DerivTowerEntry>,
    float: Vec<Vec<f64>>,
}

impl DerivTower {
    pub fn new(kmax: u32) -> Self {
        let mut entries = Vec::with_capacity(kmax as usize);
        if kmax >= 1 {
            entries.push(DerivTowerEntry::first());
            for _ in 1..kmax {
                let next = entries.last().expect("non-empty").next();
                entries.push(next);
            }
        }
        let float = entries.iter().map(|e| e.float_coeffs()).collect();
        Self { entries, float }
    }

    pub fn max_order(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn entry(&self, k: u32) -> Option<&DerivTowerEntry> {
        k.checked_sub(1).and_then(|i| self.entries.get(i as usize))
    }

    /// `P_k(z)` (no Gaussian factor).
    pub fn poly(&self, k: u32, z: f64) -> f64 {
        let c = &self.float[k as usize - 1];
        c.iter().rev().fold(0.0, |acc, a| acc * z + a)
    }

    /// `E^{(k)}(z)` for `k ≥ 1`; `k = 0` gives `E(z)` itself.
    pub fn eval(&self, k: u32, z: f64) -> f64 {
        if k == 0 {
            return error_e(z);
        }
        self.poly(k, z) * (-PI * z * z).exp()
    }

    /// `E^{(k)}(z) e^{w}` for `k ≥ 1`, folding the Gaussian into the exponent.
    pub fn eval_weighted(&self, k: u32, z: f64, log_weight: f64) -> f64 {
        self.poly(k, z) * (log_weight - PI * z * z).exp()
    }
}

const GLOBAL_MAX_ORDER: u32 = 64;

fn global_tower() -> &'static DerivTower {
    static TOWER: OnceLock<DerivTower> = OnceLock::new();
    TOWER.get_or_init(|| DerivTower::new(GLOBAL_MAX_ORDER))
}

/// `E^{(k)}(z)` for `1 ≤ k ≤ 64`.
pub fn error_e_deriv(k: u32, z: f64) -> Result<f64, SpecialError> {
    if k == 0 {
        return Err(SpecialError::ZeroOrder);
    }
    if k > GLOBAL_MAX_ORDER {
        return Err(SpecialError::OrderTooLarge(k, GLOBAL_MAX_ORDER));
    }
    Ok(global_tower().eval(k, z))
}

/// `sgn` with `sgn(0) = 0`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
