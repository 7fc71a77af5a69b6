//! The error-function kernel `p^{c0,c1}[f]` on `ℝ^{2m}` built from pairs of
//! cone vectors and a spherical polynomial, with analytic partials and the
//! Vignéras eigenvalue check.
//!
//! For a spherical `f` of degree `d`,
//!
//! ```text
//! p(x) = Σ_σ (−1)^{|σ|} Σ_{|k| ≤ d} (−1)^{|k|}/(4π)^{|k|}
//!        ∏_j E^{(k_j)}(z_j^{σ_j}) / k_j!  ·  (∏_j ∂_{c_j^{σ_j}}^{k_j}) f (x)
//! ```
//!
//! with `z_j^σ = B_1(c_j^σ, x_j)/√(−Q_1(c_j^σ))`. When `k_j = 0` the polynomial
//! factor does not see `σ_j`, so that sum collapses to `E(z_j^0) − E(z_j^1)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Signed;
use thiserror::Error;

use crate::exactq::rational_to_f64;
use crate::mpoly::{x_var, y_var, FloatPoly, MultiPoly, PointR2m, PolyError, PowTable};
use crate::special::{beta_sq_weighted, error_e, sgn, DerivTower};

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("kernel polynomial is not spherical (homogeneous and harmonic)")]
    NotSpherical,
    #[error("({c1}, {c2}) is not a cone vector: need c1² < c2² and c2 > 0")]
    NotInCone { c1: f64, c2: f64 },
    #[error("expected {expected} cone vectors per side, got {got}")]
    ConeCount { expected: usize, got: usize },
    #[error("cone parameter t must be a positive finite number, got {0}")]
    BadParameter(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A vector `c = (c1, c2)` with `Q_1(c) < 0` and `c2 > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeVector {
    c1: BigRational,
    c2: BigRational,
    neg_q: BigRational,
    f1: f64,
    f2: f64,
    norm: f64,
}

impl ConeVector {
    pub fn new(c1: BigRational, c2: BigRational) -> Result<Self, KernelError> {
        let two = BigRational::from_integer(BigInt::from(2));
        let neg_q = (&c2 * &c2 - &c1 * &c1) / two;
        if !c2.is_positive() || !neg_q.is_positive() {
            return Err(KernelError::NotInCone {
                c1: rational_to_f64(&c1),
                c2: rational_to_f64(&c2),
            });
        }
        let f1 = rational_to_f64(&c1);
        let f2 = rational_to_f64(&c2);
        let norm = rational_to_f64(&neg_q).sqrt();
        Ok(Self {
            c1,
            c2,
            neg_q,
            f1,
            f2,
            norm,
        })
    }

    /// Exact binary value of each float.
    pub fn from_f64(c1: f64, c2: f64) -> Result<Self, KernelError> {
        let conv = |v: f64| Ratio::from_float(v).ok_or(KernelError::NotInCone { c1, c2 });
        Self::new(conv(c1)?, conv(c2)?)
    }

    /// The pair `(1, 1+t)`, `(−1, 1+t)` whose `t → 0` limit is the sign kernel.
    pub fn sign_limit(t: f64) -> Result<(Self, Self), KernelError> {
        if !(t.is_finite() && t > 0.0) {
            return Err(KernelError::BadParameter(t));
        }
        let top = 1.0 + t;
        Ok((Self::from_f64(1.0, top)?, Self::from_f64(-1.0, top)?))
    }

    pub fn exact(&self) -> (&BigRational, &BigRational) {
        (&self.c1, &self.c2)
    }

    /// `−Q_1(c) = (c2² − c1²)/2`.
    pub fn neg_q1_exact(&self) -> BigRational {
        self.neg_q.clone()
    }

    pub fn c1(&self) -> f64 {
        self.f1
    }

    pub fn c2(&self) -> f64 {
        self.f2
    }

    /// `√(−Q_1(c))`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `B_1(c, (x, y)) / √(−Q_1(c))`.
    #[inline]
    pub fn argument(&self, x: f64, y: f64) -> f64 {
        (self.f1 * x - self.f2 * y) / self.norm
    }

    /// `(∂z/∂x, ∂z/∂y)` of [`argument`](Self::argument).
    #[inline]
    pub fn argument_gradient(&self) -> (f64, f64) {
        (self.f1 / self.norm, -self.f2 / self.norm)
    }
}

/// One `(k, σ)` summand: `coef · ∏_{k_j>0} E^{(k_j)}(z_j^{σ_j}) · ∏_{k_j=0} H_j · g`.
#[derive(Clone, Debug)]
struct Term {
    k: Vec<u32>,
    sigma: Vec<u8>,
    coef: f64,
    g: FloatPoly,
}

/// Value, gradient and diagonal Hessian of the kernel at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hess_diag: Vec<f64>,
}

/// Cone vectors and spherical polynomial, with every `G_{σ,k}` expanded once.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    m: usize,
    degree: u32,
    f: MultiPoly,
    c0: Vec<ConeVector>,
    c1: Vec<ConeVector>,
    terms: Vec<Term>,
    tower: DerivTower,
    max_power: u32,
}

impl KernelSpec {
    pub fn new(
        f: MultiPoly,
        c0: Vec<ConeVector>,
        c1: Vec<ConeVector>,
    ) -> Result<Self, KernelError> {
        let d = f.spherical_degree().ok_or(KernelError::NotSpherical)?;
        Self::build(f, d, c0, c1)
    }

    /// The same cone pair `(1, 1+t)`, `(−1, 1+t)` in every coordinate pair.
    pub fn sign_limit(f: MultiPoly, t: f64) -> Result<Self, KernelError> {
        let (a, b) = ConeVector::sign_limit(t)?;
        let m = f.m();
        Self::new(f, vec![a; m], vec![b; m])
    }

    /// No sphericity check. The expansion is still exact for any homogeneous
    /// `f` with `degree` its total degree; only the eigenvalue property is lost.
    pub(crate) fn unchecked(
        f: MultiPoly,
        degree: u32,
        c0: Vec<ConeVector>,
        c1: Vec<ConeVector>,
    ) -> Result<Self, KernelError> {
        Self::build(f, degree, c0, c1)
    }

    fn build(
        f: MultiPoly,
        d: u32,
        c0: Vec<ConeVector>,
        c1: Vec<ConeVector>,
    ) -> Result<Self, KernelError> {
        let m = f.m();
        if m == 0 {
            return Err(PolyError::ZeroRank.into());
        }
        for side in [&c0, &c1] {
            if side.len() != m {
                return Err(KernelError::ConeCount {
                    expected: m,
                    got: side.len(),
                });
            }
        }
        let pair_degree: Vec<u32> = (0..m)
            .map(|j| {
                f.terms()
                    .map(|(e, _)| e[x_var(j)] + e[y_var(j)])
                    .max()
                    .unwrap_or(0)
            })
            .collect();

        let mut terms = Vec::new();
        for k in multi_indices(&pair_degree, d) {
            let support: Vec<usize> = (0..m).filter(|j| k[*j] > 0).collect();
            let total: u32 = k.iter().sum();
            let factorial: f64 = k.iter().map(|kj| factorial(*kj)).product();
            let base = (-1.0f64).powi(total as i32) / (4.0 * PI).powi(total as i32) / factorial;
            for mask in 0u32..(1 << support.len()) {
                let mut sigma = vec![0u8; m];
                let mut g = f.clone();
                let mut scalar = 1.0;
                for (bit, j) in support.iter().enumerate() {
                    let s = ((mask >> bit) & 1) as u8;
                    sigma[*j] = s;
                    let c = if s == 0 { &c0[*j] } else { &c1[*j] };
                    let scaled = g.directional_derivative(c, *j, k[*j])?;
                    scalar *= scaled.scalar_f64();
                    g = scaled.poly;
                    if g.is_zero() {
                        break;
                    }
                }
                if g.is_zero() {
                    continue;
                }
                let sign = if mask.count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                terms.push(Term {
                    k: k.clone(),
                    sigma,
                    coef: sign * base * scalar,
                    g: FloatPoly::from_exact(&g, 1.0),
                });
            }
        }
        let max_power = f.total_degree().unwrap_or(0);
        Ok(Self {
            m,
            degree: d,
            f,
            c0,
            c1,
            terms,
            tower: DerivTower::new(d + 2),
            max_power,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.f
    }

    pub fn cones(&self) -> (&[ConeVector], &[ConeVector]) {
        (&self.c0, &self.c1)
    }

    /// Number of cached `(k, σ)` summands.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn check_point(&self, x: &PointR2m) -> Result<(), KernelError> {
        if x.m() != self.m {
            return Err(PolyError::Dimension {
                got: x.coords().len(),
                expected: 2 * self.m,
            }
            .into());
        }
        Ok(())
    }

    /// `p(x) e^{−2πQ_m(x)}` evaluated without overflow or cancellation of the
    /// two large factors. Coordinates must have length `2m`.
    pub fn eval_weighted_raw(&self, coords: &[f64]) -> f64 {
        self.eval_scaled(coords, true)
    }

    pub fn eval_raw(&self, coords: &[f64]) -> f64 {
        self.eval_scaled(coords, false)
    }

    fn eval_scaled(&self, coords: &[f64], weighted: bool) -> f64 {
        let m = self.m;
        let dmax = self.degree as usize;
        // per pair: H_j, then E^{(k)}(z^σ) for k = 1..=d, σ = 0, 1
        let mut h = vec![0.0; m];
        let mut ek = vec![[vec![0.0; dmax + 1], vec![0.0; dmax + 1]]; m];
        for j in 0..m {
            let (x, y) = (coords[x_var(j)], coords[y_var(j)]);
            let w = if weighted { -PI * (x * x - y * y) } else { 0.0 };
            let z0 = self.c0[j].argument(x, y);
            let z1 = self.c1[j].argument(x, y);
            h[j] = sign_difference(z0, z1, w);
            for (s, z) in [z0, z1].into_iter().enumerate() {
                for (k, slot) in ek[j][s].iter_mut().enumerate().take(dmax + 1).skip(1) {
                    *slot = self.tower.eval_weighted(k as u32, z, w);
                }
            }
        }
        let pows = PowTable::new(coords, self.max_power);
        let mut acc = 0.0;
        for t in &self.terms {
            let mut factor = t.coef;
            for j in 0..m {
                factor *= if t.k[j] == 0 {
                    h[j]
                } else {
                    ek[j][t.sigma[j] as usize][t.k[j] as usize]
                };
            }
            if factor != 0.0 {
                acc += factor * t.g.eval_with(&pows);
            }
        }
        acc
    }

    /// Value, gradient and diagonal second partials of `p`.
    pub fn partials_raw(&self, coords: &[f64]) -> KernelValue {
        let m = self.m;
        let n = 2 * m;
        let dmax = self.degree as usize + 2;
        // jets[j][s][k] = E^{(k)}(z_j^s) for k = 0..=d+2
        let mut jets = vec![[vec![0.0; dmax + 1], vec![0.0; dmax + 1]]; m];
        let mut grads = vec![[(0.0, 0.0); 2]; m];
        for j in 0..m {
            let (x, y) = (coords[x_var(j)], coords[y_var(j)]);
            for (s, c) in [&self.c0[j], &self.c1[j]].into_iter().enumerate() {
                let z = c.argument(x, y);
                grads[j][s] = c.argument_gradient();
                jets[j][s][0] = error_e(z);
                for (k, slot) in jets[j][s].iter_mut().enumerate().take(dmax + 1).skip(1) {
                    *slot = self.tower.eval(k as u32, z);
                }
            }
        }
        let pows = PowTable::new(coords, self.max_power);
        let mut value = 0.0;
        let mut gradient = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for t in &self.terms {
            // per-pair factor A_j with its partials in x_j and y_j
            let mut a = vec![0.0; m];
            let mut da = vec![[0.0; 2]; m];
            let mut dda = vec![[0.0; 2]; m];
            for j in 0..m {
                if t.k[j] == 0 {
                    let (g0, g1) = (grads[j][0], grads[j][1]);
                    let e0 = &jets[j][0];
                    let e1 = &jets[j][1];
                    a[j] = e0[0] - e1[0];
                    da[j] = [e0[1] * g0.0 - e1[1] * g1.0, e0[1] * g0.1 - e1[1] * g1.1];
                    dda[j] = [
                        e0[2] * g0.0 * g0.0 - e1[2] * g1.0 * g1.0,
                        e0[2] * g0.1 * g0.1 - e1[2] * g1.1 * g1.1,
                    ];
                } else {
                    let s = t.sigma[j] as usize;
                    let k = t.k[j] as usize;
                    let g = grads[j][s];
                    let e = &jets[j][s];
                    a[j] = e[k];
                    da[j] = [e[k + 1] * g.0, e[k + 1] * g.1];
                    dda[j] = [e[k + 2] * g.0 * g.0, e[k + 2] * g.1 * g.1];
                }
            }
            let prod_all: f64 = a.iter().product();
            let gval = t.g.eval_with(&pows);
            value += t.coef * prod_all * gval;
            for j in 0..m {
                let others: f64 = (0..m).filter(|i| *i != j).map(|i| a[i]).product();
                for (slot, var) in [x_var(j), y_var(j)].into_iter().enumerate() {
                    let (gv, g1, g2) = t.g.eval_jet(&pows, var);
                    let af = others * a[j];
                    let d1 = others * da[j][slot];
                    let d2 = others * dda[j][slot];
                    gradient[var] += t.coef * (d1 * gv + af * g1);
                    hess[var] += t.coef * (d2 * gv + 2.0 * d1 * g1 + af * g2);
                }
            }
        }
        KernelValue {
            value,
            gradient,
            hess_diag: hess,
        }
    }
}

/// `(E(z0) − E(z1)) e^{w}`. When `z0`, `z1` share a sign both error functions
/// are close to the same `±1`; the difference is then taken between the two
/// complementary tails.
fn sign_difference(z0: f64, z1: f64, w: f64) -> f64 {
    let s0 = sgn(z0);
    let s1 = sgn(z1);
    if s0 != 0.0 && s0 == s1 {
        s0 * (beta_sq_weighted(z1, w) - beta_sq_weighted(z0, w))
    } else {
        (error_e(z0) - error_e(z1)) * w.exp()
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// All `k ∈ ℤ_{≥0}^m` with `k_j ≤ bounds[j]` and `|k| ≤ total`, lexicographic.
fn multi_indices(bounds: &[u32], total: u32) -> Vec<Vec<u32>> {
    fn rec(bounds: &[u32], left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == bounds.len() {
            out.push(prefix.clone());
            return;
        }
        let b = bounds[prefix.len()].min(left);
        for k in 0..=b {
            prefix.push(k);
            rec(bounds, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(bounds, total, &mut Vec::new(), &mut out);
    out
}

pub fn kernel_eval(spec: &KernelSpec, x: &PointR2m) -> Result<f64, KernelError> {
    spec.check_point(x)?;
    Ok(spec.eval_raw(x.coords()))
}

/// `p(x) e^{−2πQ_m(x)}`.
pub fn kernel_eval_weighted(spec: &KernelSpec, x: &PointR2m) -> Result<f64, KernelError> {
    spec.check_point(x)?;
    Ok(spec.eval_weighted_raw(x.coords()))
}

pub fn kernel_partials(spec: &KernelSpec, x: &PointR2m) -> Result<KernelValue, KernelError> {
    spec.check_point(x)?;
    Ok(spec.partials_raw(x.coords()))
}

/// `|𝒟p − d·p|` with `𝒟 = Σ_j (x_j∂_{x_j} + y_j∂_{y_j}) − (1/4π) Σ_j (∂²_{x_j} − ∂²_{y_j})`.
pub fn vigneras_residual(spec: &KernelSpec, x: &PointR2m) -> Result<f64, KernelError> {
    let kv = kernel_partials(spec, x)?;
    let c = x.coords();
    let mut d = 0.0;
    for j in 0..spec.m {
        let (ix, iy) = (x_var(j), y_var(j));
        d += c[ix] * kv.gradient[ix] + c[iy] * kv.gradient[iy];
        d -= (kv.hess_diag[ix] - kv.hess_diag[iy]) / (4.0 * PI);
    }
    Ok((d - spec.degree as f64 * kv.value).abs())
}

/// `∏_j (sgn(x_j − y_j) − sgn(−x_j − y_j))`.
pub fn sign_kernel(x: &PointR2m) -> f64 {
    (0..x.m())
        .map(|j| {
            let (a, b) = x.pair(j);
            sgn(a - b) - sgn(-a - b)
        })
        .product()
}

impl KernelSpec {
    /// False when only the `k = 0` part survives (constant `f`).
    pub fn has_derivative_terms(&self) -> bool {
        self.terms.iter().any(|t| t.k.iter().any(|k| *k > 0))
    }
}
