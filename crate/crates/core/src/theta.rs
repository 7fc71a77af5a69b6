//! Numerical indefinite theta functions of signature `(m, m)` and their
//! holomorphic sign-kernel limit.
//!
//! ```text
//! θ_{a,b}(τ) = v^{−d/2} Σ_{x ∈ a + ℤ^{2m}} p(x√v) q^{Q_m(x)} e^{2πi B_m(x, b)}
//! ```
//!
//! Box sums factor over coordinate pairs. The kernel is linear in `f`, and for
//! `f = ∏_j x_j^{e_j} y_j^{f_j}` it is the product of the one-pair kernels of
//! the factors, so a sum over `‖n‖_∞ ≤ R` is `Σ_mono c ∏_j T_j(e_j, f_j)` with
//! two-dimensional sums `T_j`. The direct `2m`-dimensional sum is kept for
//! cross-checks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::exactq::rational_to_f64;
use crate::kernel::{KernelError, KernelSpec};
use crate::mpoly::{kw_normaliser, vm_poly, MultiPoly, PointR2m, PolyError};
use crate::special::sgn;

#[derive(Debug, Error, PartialEq)]
pub enum ThetaError {
    #[error("τ must lie in the upper half-plane, got {0}")]
    BadTau(String),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("shift vector has {got} coordinates, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("pair {pair} of the shift a has B_1((1,1),a) or B_1((-1,1),a) integral")]
    LimitCondition { pair: usize },
    #[error("no convergence by radius {radius}: last change {change:e}, shell bound {shell:e}")]
    NonConvergence {
        radius: usize,
        change: f64,
        shell: f64,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `τ = u + iv` with `v > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauPoint {
    pub u: f64,
    pub v: f64,
}

impl TauPoint {
    pub fn new(u: f64, v: f64) -> Result<Self, ThetaError> {
        if !(u.is_finite() && v.is_finite() && v > 0.0) {
            return Err(ThetaError::BadTau(format!("{u}{v:+}i")));
        }
        Ok(Self { u, v })
    }

    pub fn from_complex(z: Complex64) -> Result<Self, ThetaError> {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    /// `−1/τ`.
    pub fn s_image(self) -> Self {
        let z = -self.to_complex().inv();
        Self { u: z.re, v: z.im }
    }

    pub fn translate(self, n: f64) -> Self {
        Self {
            u: self.u + n,
            v: self.v,
        }
    }

    /// `τ/(2τ+1)`.
    pub fn st2s_image(self) -> Self {
        let t = self.to_complex();
        let z = t / (2.0 * t + 1.0);
        Self { u: z.re, v: z.im }
    }
}

impl fmt::Display for TauPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.u, self.v)
    }
}

/// Parses `U+Vi`, `U-Vi`, `Vi` or `i`.
impl FromStr for TauPoint {
    type Err = ThetaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ThetaError::BadTau(s.to_string());
        let t = s.trim().replace(' ', "");
        let body = t.strip_suffix('i').ok_or_else(bad)?;
        // split at the last sign that is not the leading one or part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        let re = re.parse::<f64>().map_err(|_| bad())?;
        Self::new(re, im)
    }
}

/// `z^s = exp(s · Log z)` with the principal logarithm.
pub fn principal_pow(z: Complex64, s: f64) -> Complex64 {
    (z.ln() * s).exp()
}

/// `(−τ)^{m+d}`, the automorphy factor of the inversion law.
pub fn inversion_factor(tau: TauPoint, m: usize, d: u32) -> Complex64 {
    principal_pow(-tau.to_complex(), (m as u32 + d) as f64)
}

/// A kernel together with the shifts `a` (lattice coset) and `b` (character).
#[derive(Clone, Debug)]
pub struct ThetaSpec {
    kernel: Arc<KernelSpec>,
    a: PointR2m,
    b: PointR2m,
}

impl ThetaSpec {
    pub fn new(kernel: Arc<KernelSpec>, a: PointR2m, b: PointR2m) -> Result<Self, ThetaError> {
        let m = kernel.m();
        for p in [&a, &b] {
            if p.m() != m {
                return Err(ThetaError::Dimension {
                    got: p.coords().len(),
                    expected: 2 * m,
                });
            }
        }
        Ok(Self { kernel, a, b })
    }

    /// `V_m` with cones `(±1, 1+t)` and the shifts of the triangular-number
    /// identity.
    pub fn kw(m: usize, t: f64) -> Result<Self, ThetaError> {
        let kernel = KernelSpec::sign_limit(vm_poly(m), t)?;
        let (a, b) = kw_shifts(m);
        Self::new(Arc::new(kernel), a, b)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn a(&self) -> &PointR2m {
        &self.a
    }

    pub fn b(&self) -> &PointR2m {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.kernel.m()
    }

    /// The same theta function with shifts `(−b, a)`.
    pub fn swapped(&self) -> Self {
        Self {
            kernel: Arc::clone(&self.kernel),
            a: self.b.neg(),
            b: self.a.clone(),
        }
    }

    /// Whether `a` avoids the null lines, as the sign-kernel limit needs.
    pub fn limit_condition(&self) -> bool {
        limit_condition_failure(&self.a).is_none()
    }
}

fn limit_condition_failure(a: &PointR2m) -> Option<usize> {
    (0..a.m()).find(|j| {
        let (x, y) = a.pair(*j);
        is_integral(x - y) || is_integral(-x - y)
    })
}

fn is_integral(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

/// `a = ((0, 1/2), …)`, `b = ((1/2, 1/2), …)`.
pub fn kw_shifts(m: usize) -> (PointR2m, PointR2m) {
    let a = PointR2m::from_pairs(&vec![(0.0, 0.5); m]).expect("finite");
    let b = PointR2m::from_pairs(&vec![(0.5, 0.5); m]).expect("finite");
    (a, b)
}

/// `(4i)^m · m! · (∏(2j−1)!)²`.
pub fn kw_constant(m: usize) -> Complex64 {
    let c = rational_to_f64(&num_rational::BigRational::from_integer(kw_normaliser(m)));
    Complex64::new(0.0, 4.0).powi(m as i32) * c
}

/// Adaptive box-radius schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationConfig {
    pub tol: f64,
    /// Read `tol` relative to the magnitude of the current value.
    pub relative: bool,
    pub r_start: usize,
    pub r_cap: usize,
}

impl TruncationConfig {
    pub const THETA_CAP: usize = 64;
    pub const LIMIT_CAP: usize = 512;

    pub fn absolute(tol: f64, r_cap: usize) -> Self {
        Self {
            tol,
            relative: false,
            r_start: 2,
            r_cap,
        }
    }

    pub fn relative(tol: f64, r_cap: usize) -> Self {
        Self {
            relative: true,
            ..Self::absolute(tol, r_cap)
        }
    }

    fn check(&self) -> Result<(), ThetaError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ThetaError::BadTolerance(self.tol));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Final box radius `R` (sum over `‖n‖_∞ ≤ R`).
    pub radius: usize,
    /// Bound on the absolute contribution of the last shell.
    pub shell: f64,
    /// Change from the previous radius.
    pub change: f64,
}

impl ThetaValue {
    pub fn to_json(&self, m: usize, tau: TauPoint, tol: f64) -> serde_json::Value {
        json!({
            "m": m,
            "tau": [tau.u, tau.v],
            "value": [self.value.re, self.value.im],
            "radius": self.radius,
            "tol": tol,
        })
    }
}

/// A box sum at one radius: value and the matching sum of absolute values.
#[derive(Clone, Copy, Debug)]
struct BoxSum {
    value: Complex64,
    abs: f64,
}

fn adapt<F>(cfg: &TruncationConfig, eval: F) -> Result<ThetaValue, ThetaError>
where
    F: Fn(usize) -> BoxSum,
{
    cfg.check()?;
    let mut r = cfg.r_start.max(1);
    let mut prev = eval(r);
    loop {
        let next_r = 2 * r;
        if next_r > cfg.r_cap {
            return Err(ThetaError::NonConvergence {
                radius: r,
                change: f64::NAN,
                shell: f64::NAN,
            });
        }
        let cur = eval(next_r);
        let shell = (cur.abs - prev.abs).max(0.0);
        let change = (cur.value - prev.value).norm();
        let tol = if cfg.relative {
            cfg.tol * cur.value.norm()
        } else {
            cfg.tol
        };
        if shell < tol / 10.0 && change < tol {
            return Ok(ThetaValue {
                value: cur.value,
                radius: next_r,
                shell,
                change,
            });
        }
        if 2 * next_r > cfg.r_cap {
            return Err(ThetaError::NonConvergence {
                radius: next_r,
                change,
                shell,
            });
        }
        prev = cur;
        r = next_r;
    }
}

/// `f` split into per-pair monomials: the distinct `(e, f)` of each pair and,
/// for each term, its coefficient and index into those lists.
struct Factorisation {
    per_pair: Vec<Vec<(u32, u32)>>,
    terms: Vec<(f64, Vec<usize>)>,
}

impl Factorisation {
    fn new(f: &MultiPoly) -> Self {
        let m = f.m();
        let mut per_pair: Vec<Vec<(u32, u32)>> = vec![Vec::new(); m];
        let mut terms = Vec::new();
        for (c, pairs) in f.pair_factorisation() {
            let idx = pairs
                .iter()
                .enumerate()
                .map(|(j, ef)| match per_pair[j].iter().position(|x| x == ef) {
                    Some(i) => i,
                    None => {
                        per_pair[j].push(*ef);
                        per_pair[j].len() - 1
                    }
                })
                .collect();
            terms.push((rational_to_f64(&c), idx));
        }
        Self { per_pair, terms }
    }

    /// Combines per-pair sums `(values, abs)` into the full box sum.
    fn combine(&self, pair_sums: &[(Vec<Complex64>, Vec<f64>)], scale: f64) -> BoxSum {
        let mut value = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (c, idx) in &self.terms {
            let mut v = Complex64::new(*c, 0.0);
            let mut a = c.abs();
            for (j, i) in idx.iter().enumerate() {
                v *= pair_sums[j].0[*i];
                a *= pair_sums[j].1[*i];
            }
            value += v;
            abs += a;
        }
        BoxSum {
            value: value * scale,
            abs: abs * scale,
        }
    }
}

/// `e^{2πi(u Q_1(x) + B_1(x, b))}` for one pair.
#[inline]
fn pair_phase(u: f64, x: f64, y: f64, b: (f64, f64)) -> Complex64 {
    let arg = u * 0.5 * (x * x - y * y) + x * b.0 - y * b.1;
    Complex64::from_polar(1.0, 2.0 * PI * arg.rem_euclid(1.0))
}

/// Sums row by row in parallel, then reduces the rows in order.
fn ordered_rows<F>(r: usize, width: usize, row: F) -> (Vec<Complex64>, Vec<f64>)
where
    F: Fn(i64) -> (Vec<Complex64>, Vec<f64>) + Sync + Send,
{
    let r = r as i64;
    let rows: Vec<(Vec<Complex64>, Vec<f64>)> = (-r..=r).into_par_iter().map(&row).collect();
    let mut vals = vec![Complex64::new(0.0, 0.0); width];
    let mut abs = vec![0.0; width];
    for (v, a) in rows {
        for i in 0..width {
            vals[i] += v[i];
            abs[i] += a[i];
        }
    }
    (vals, abs)
}

fn check_tau(tau: TauPoint) -> Result<(), ThetaError> {
    TauPoint::new(tau.u, tau.v).map(|_| ())
}

/// Per-pair one-dimensional kernels for the monomials of each pair.
fn pair_kernels(spec: &ThetaSpec, fac: &Factorisation) -> Result<Vec<Vec<KernelSpec>>, ThetaError> {
    let (c0, c1) = spec.kernel.cones();
    fac.per_pair
        .iter()
        .enumerate()
        .map(|(j, monos)| {
            monos
                .iter()
                .map(|(e, f)| {
                    let mut exps = vec![0u32; 2];
                    exps[0] = *e;
                    exps[1] = *f;
                    let poly = MultiPoly::monomial(
                        1,
                        exps,
                        num_rational::BigRational::from_integer(1.into()),
                    );
                    KernelSpec::unchecked(poly, e + f, vec![c0[j].clone()], vec![c1[j].clone()])
                        .map_err(ThetaError::from)
                })
                .collect()
        })
        .collect()
}

/// Box sum of the theta series at radius `r`, by pairs.
fn theta_box(
    spec: &ThetaSpec,
    fac: &Factorisation,
    kernels: &[Vec<KernelSpec>],
    tau: TauPoint,
    r: usize,
) -> BoxSum {
    let sv = tau.v.sqrt();
    let ri = r as i64;
    let pair_sums: Vec<(Vec<Complex64>, Vec<f64>)> = (0..spec.m())
        .map(|j| {
            let (ax, ay) = spec.a.pair(j);
            let b = spec.b.pair(j);
            let ks = &kernels[j];
            ordered_rows(r, ks.len(), |n1| {
                let mut vals = vec![Complex64::new(0.0, 0.0); ks.len()];
                let mut abs = vec![0.0; ks.len()];
                let x = ax + n1 as f64;
                for n2 in -ri..=ri {
                    let y = ay + n2 as f64;
                    let phase = pair_phase(tau.u, x, y, b);
                    let pt = [x * sv, y * sv];
                    for (i, k) in ks.iter().enumerate() {
                        let w = k.eval_weighted_raw(&pt);
                        vals[i] += phase * w;
                        abs[i] += w.abs();
                    }
                }
                (vals, abs)
            })
        })
        .collect();
    let d = spec.kernel.degree() as f64;
    fac.combine(&pair_sums, tau.v.powf(-d / 2.0))
}

/// `θ_{a,b}(τ)` with the default radius cap and absolute tolerance `tol`.
pub fn theta_eval(spec: &ThetaSpec, tau: TauPoint, tol: f64) -> Result<ThetaValue, ThetaError> {
    theta_eval_with(
        spec,
        tau,
        &TruncationConfig::absolute(tol, TruncationConfig::THETA_CAP),
    )
}

pub fn theta_eval_with(
    spec: &ThetaSpec,
    tau: TauPoint,
    cfg: &TruncationConfig,
) -> Result<ThetaValue, ThetaError> {
    check_tau(tau)?;
    let fac = Factorisation::new(spec.kernel.polynomial());
    let kernels = pair_kernels(spec, &fac)?;
    adapt(cfg, |r| theta_box(spec, &fac, &kernels, tau, r))
}

/// The plain `2m`-dimensional box sum at a fixed radius.
pub fn theta_eval_direct(
    spec: &ThetaSpec,
    tau: TauPoint,
    radius: usize,
) -> Result<Complex64, ThetaError> {
    check_tau(tau)?;
    let m = spec.m();
    let sv = tau.v.sqrt();
    let r = radius as i64;
    let side = (2 * r + 1) as usize;
    let total = side.pow(2 * m as u32 - 1);
    let a = spec.a.coords().to_vec();
    let bvec = spec.b.clone();
    let rows: Vec<Complex64> = (-r..=r)
        .into_par_iter()
        .map(|n0| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut x = vec![0.0; 2 * m];
            let mut scaled = vec![0.0; 2 * m];
            for idx in 0..total {
                let mut rest = idx;
                x[0] = a[0] + n0 as f64;
                for (i, xi) in x.iter_mut().enumerate().skip(1) {
                    *xi = a[i] + ((rest % side) as i64 - r) as f64;
                    rest /= side;
                }
                for (s, xi) in scaled.iter_mut().zip(x.iter()) {
                    *s = xi * sv;
                }
                let w = spec.kernel.eval_weighted_raw(&scaled);
                let mut phase = Complex64::new(1.0, 0.0);
                for j in 0..m {
                    phase *= pair_phase(tau.u, x[2 * j], x[2 * j + 1], bvec.pair(j));
                }
                acc += phase * w;
            }
            acc
        })
        .collect();
    let d = spec.kernel.degree() as f64;
    Ok(rows.into_iter().sum::<Complex64>() * tau.v.powf(-d / 2.0))
}

/// Sign-kernel sum `Σ ∏_j (sgn(x_j−y_j) − sgn(−x_j−y_j)) f(x) q^{Q_m(x)} e^{2πiB_m(x,b)}`.
pub fn holomorphic_limit_eval(
    f: &MultiPoly,
    a: &PointR2m,
    b: &PointR2m,
    tau: TauPoint,
    tol: f64,
) -> Result<ThetaValue, ThetaError> {
    holomorphic_limit_eval_with(
        f,
        a,
        b,
        tau,
        &TruncationConfig::absolute(tol, TruncationConfig::LIMIT_CAP),
    )
}

pub fn holomorphic_limit_eval_with(
    f: &MultiPoly,
    a: &PointR2m,
    b: &PointR2m,
    tau: TauPoint,
    cfg: &TruncationConfig,
) -> Result<ThetaValue, ThetaError> {
    check_tau(tau)?;
    let m = f.m();
    for p in [a, b] {
        if p.m() != m {
            return Err(ThetaError::Dimension {
                got: p.coords().len(),
                expected: 2 * m,
            });
        }
    }
    if let Some(pair) = limit_condition_failure(a) {
        return Err(ThetaError::LimitCondition { pair });
    }
    let fac = Factorisation::new(f);
    adapt(cfg, |r| limit_box(&fac, a, b, tau, r))
}

fn limit_box(fac: &Factorisation, a: &PointR2m, b: &PointR2m, tau: TauPoint, r: usize) -> BoxSum {
    let ri = r as i64;
    let pair_sums: Vec<(Vec<Complex64>, Vec<f64>)> = fac
        .per_pair
        .iter()
        .enumerate()
        .map(|(j, monos)| {
            let (ax, ay) = a.pair(j);
            let bj = b.pair(j);
            ordered_rows(r, monos.len(), |n1| {
                let mut vals = vec![Complex64::new(0.0, 0.0); monos.len()];
                let mut abs = vec![0.0; monos.len()];
                let x = ax + n1 as f64;
                for n2 in -ri..=ri {
                    let y = ay + n2 as f64;
                    let h = sgn(x - y) - sgn(-x - y);
                    if h == 0.0 {
                        continue;
                    }
                    let w = h * (-2.0 * PI * tau.v * 0.5 * (x * x - y * y)).exp();
                    if w == 0.0 {
                        continue;
                    }
                    let phase = pair_phase(tau.u, x, y, bj);
                    for (i, (e, f)) in monos.iter().enumerate() {
                        let t = w * x.powi(*e as i32) * y.powi(*f as i32);
                        vals[i] += phase * t;
                        abs[i] += t.abs();
                    }
                }
                (vals, abs)
            })
        })
        .collect();
    fac.combine(&pair_sums, 1.0)
}

/// The plain sign-kernel sum at a fixed radius.
pub fn holomorphic_limit_direct(
    f: &MultiPoly,
    a: &PointR2m,
    b: &PointR2m,
    tau: TauPoint,
    radius: usize,
) -> Result<Complex64, ThetaError> {
    let m = f.m();
    let r = radius as i64;
    let side = (2 * r + 1) as usize;
    let total = side.pow(2 * m as u32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = vec![0.0; 2 * m];
    for idx in 0..total {
        let mut rest = idx;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = a.coords()[i] + ((rest % side) as i64 - r) as f64;
            rest /= side;
        }
        let p = PointR2m::new(x.clone())?;
        let h = crate::kernel::sign_kernel(&p);
        if h == 0.0 {
            continue;
        }
        let q = (-2.0 * PI * tau.v * p.quadratic_form()).exp();
        let arg = tau.u * p.quadratic_form() + p.bilinear(b);
        acc += Complex64::from_polar(1.0, 2.0 * PI * arg) * (h * f.eval_f64(&x)? * q);
    }
    Ok(acc)
}

/// `KW_m(τ)` from the sign-kernel sum, to relative tolerance `rel_tol`.
pub fn kw_numeric(m: usize, tau: TauPoint, rel_tol: f64) -> Result<ThetaValue, ThetaError> {
    let (a, b) = kw_shifts(m);
    let cfg = TruncationConfig::relative(rel_tol, TruncationConfig::LIMIT_CAP);
    let mut v = holomorphic_limit_eval_with(&vm_poly(m), &a, &b, tau, &cfg)?;
    let c = kw_constant(m);
    v.value /= c;
    v.shell /= c.norm();
    v.change /= c.norm();
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct STransformReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub relative: f64,
}

/// Compares `θ_{a,b}(−1/τ)` with `(−τ)^{m+d} e^{2πiB_m(a,b)} θ_{−b,a}(τ)`.
pub fn s_transform_check(
    spec: &ThetaSpec,
    tau: TauPoint,
    tol: f64,
) -> Result<STransformReport, ThetaError> {
    let lhs = theta_eval(spec, tau.s_image(), tol)?.value;
    let inner = theta_eval(&spec.swapped(), tau, tol)?.value;
    let phase = Complex64::from_polar(1.0, 2.0 * PI * spec.a.bilinear(&spec.b));
    let rhs = inversion_factor(tau, spec.m(), spec.kernel.degree()) * phase * inner;
    Ok(STransformReport {
        lhs,
        rhs,
        relative: (lhs - rhs).norm() / lhs.norm(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow {
    pub t: f64,
    pub value: Complex64,
    pub error: f64,
    pub radius: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub m: usize,
    pub tau: TauPoint,
    pub target: Complex64,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }

    /// Last error over first error.
    pub fn reduction(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.error / a.error,
            _ => f64::NAN,
        }
    }

    /// Least-squares slope of `ln error` against `ln t`.
    pub fn observed_order(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.t.ln(), r.error.ln())).collect();
        least_squares_slope(&pts)
    }
}

/// Errors of `θ` with cones `(±1, 1+t)` against the `t → 0` sign-kernel sum.
pub fn limit_t_check(
    m: usize,
    tau: TauPoint,
    t_list: &[f64],
    tol: f64,
) -> Result<LimitReport, ThetaError> {
    let (a, b) = kw_shifts(m);
    let target = holomorphic_limit_eval(&vm_poly(m), &a, &b, tau, tol)?.value;
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let spec = ThetaSpec::kw(m, t)?;
        let v = theta_eval(&spec, tau, tol)?;
        rows.push(LimitRow {
            t,
            value: v.value,
            error: (v.value - target).norm(),
            radius: v.radius,
        });
    }
    Ok(LimitReport {
        m,
        tau,
        target,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gamma2Report {
    pub m: usize,
    pub tau: TauPoint,
    pub kw_tau: Complex64,
    /// `|KW(τ+2) − (−i)^m KW(τ)| / |KW(τ)|`.
    pub translation: f64,
    /// `|KW(τ/(2τ+1)) − (2τ+1)^{m(2m+1)} KW(τ)| / |KW(τ)|`.
    pub st2s: f64,
}

/// Residuals of the two generator laws of the level-2 congruence group.
pub fn gamma2_transform_check(
    m: usize,
    tau: TauPoint,
    tol: f64,
) -> Result<Gamma2Report, ThetaError> {
    let rel = (tol * 1e-3).max(1e-14);
    let base = kw_numeric(m, tau, rel)?.value;
    let shifted = kw_numeric(m, tau.translate(2.0), rel)?.value;
    let image = kw_numeric(m, tau.st2s_image(), rel)?.value;
    let weight = (m * (2 * m + 1)) as i32;
    let t = tau.to_complex();
    let translation =
        (shifted - Complex64::new(0.0, -1.0).powi(m as i32) * base).norm() / base.norm();
    let st2s = (image - (2.0 * t + 1.0).powi(weight) * base).norm() / base.norm();
    Ok(Gamma2Report {
        m,
        tau,
        kw_tau: base,
        translation,
        st2s,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CuspRow {
    pub v: f64,
    /// `|KW(iv)|`.
    pub infinity: f64,
    /// `v^{−m(2m+1)} |KW(i/v)|`.
    pub zero: f64,
    /// `v^{−m(2m+1)} |KW(1 + i/v)|`.
    pub one: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CuspReport {
    pub m: usize,
    pub rows: Vec<CuspRow>,
    /// `m(2m+1)/8`.
    pub expected_exponent: f64,
    pub fitted_infinity: f64,
    pub fitted_one: f64,
    /// Largest over smallest scaled value at the cusp 0.
    pub zero_spread: f64,
}

/// Scaled magnitudes of `KW_m` along `τ = iv` at the three cusps.
pub fn cusp_behavior_check(
    m: usize,
    v_list: &[f64],
    rel_tol: f64,
) -> Result<CuspReport, ThetaError> {
    let weight = (m * (2 * m + 1)) as i32;
    let mut rows = Vec::with_capacity(v_list.len());
    for &v in v_list {
        let at = |u: f64, im: f64| -> Result<f64, ThetaError> {
            Ok(kw_numeric(m, TauPoint::new(u, im)?, rel_tol)?.value.norm())
        };
        let scale = v.powi(-weight);
        rows.push(CuspRow {
            v,
            infinity: at(0.0, v)?,
            zero: scale * at(0.0, 1.0 / v)?,
            one: scale * at(1.0, 1.0 / v)?,
        });
    }
    let fit = |sel: fn(&CuspRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.v, sel(r).ln())).collect();
        -least_squares_slope(&pts) / (2.0 * PI)
    };
    let fitted_infinity = fit(|r| r.infinity);
    let fitted_one = fit(|r| r.one);
    let zmax = rows.iter().map(|r| r.zero).fold(0.0, f64::max);
    let zmin = rows.iter().map(|r| r.zero).fold(f64::INFINITY, f64::min);
    Ok(CuspReport {
        m,
        rows,
        expected_exponent: weight as f64 / 8.0,
        fitted_infinity,
        fitted_one,
        zero_spread: zmax / zmin,
    })
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn xy() -> MultiPoly {
        &MultiPoly::x(1, 0) * &MultiPoly::y(1, 0)
    }

    fn xy_spec(t: f64, a: (f64, f64), b: (f64, f64)) -> ThetaSpec {
        let kernel = KernelSpec::sign_limit(xy(), t).unwrap();
        ThetaSpec::new(
            Arc::new(kernel),
            PointR2m::from_pairs(&[a]).unwrap(),
            PointR2m::from_pairs(&[b]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn tau_parsing() {
        assert_eq!(
            "0+1i".parse::<TauPoint>().unwrap(),
            TauPoint::new(0.0, 1.0).unwrap()
        );
        assert_eq!(
            "i".parse::<TauPoint>().unwrap(),
            TauPoint::new(0.0, 1.0).unwrap()
        );
        assert_eq!(
            "0.2+0.5i".parse::<TauPoint>().unwrap(),
            TauPoint::new(0.2, 0.5).unwrap()
        );
        assert_eq!(
            "-1e-1+2i".parse::<TauPoint>().unwrap(),
            TauPoint::new(-0.1, 2.0).unwrap()
        );
        assert_eq!(
            "2.5i".parse::<TauPoint>().unwrap(),
            TauPoint::new(0.0, 2.5).unwrap()
        );
        assert!("1-1i".parse::<TauPoint>().is_err());
        assert!("1+2".parse::<TauPoint>().is_err());
    }

    #[test]
    fn mobius_images() {
        let t = TauPoint::new(0.0, 1.0).unwrap();
        let s = t.s_image();
        assert!((s.u).abs() < 1e-15 && (s.v - 1.0).abs() < 1e-15);
        let g = t.st2s_image();
        assert!((g.u - 0.4).abs() < 1e-15 && (g.v - 0.2).abs() < 1e-15);
    }

    // i^{−s−λ}(−iτ)^{λ+n/2} = (−τ)^{m+d} for signature (m, m), λ = d, n = 2m.
    #[test]
    fn principal_branch_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let i = Complex64::new(0.0, 1.0);
        for _ in 0..200 {
            let tau = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0));
            let m = rng.gen_range(1..5usize);
            let d = rng.gen_range(0..20u32);
            let lambda = d as f64;
            let lhs =
                principal_pow(i, -(m as f64) - lambda) * principal_pow(-i * tau, lambda + m as f64);
            let rhs = inversion_factor(TauPoint::from_complex(tau).unwrap(), m, d);
            assert!(
                (lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0),
                "{lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn s_transform_m1() {
        let spec = xy_spec(1.0, (0.0, 0.5), (0.5, 0.5));
        for tau in [
            TauPoint::new(0.0, 1.0).unwrap(),
            TauPoint::new(1.0 / 3.0, 0.5).unwrap(),
        ] {
            let r = s_transform_check(&spec, tau, 1e-12).unwrap();
            assert!(r.relative <= 1e-5, "τ = {tau}: {}", r.relative);
        }
    }

    #[test]
    fn s_transform_generic_shifts() {
        let spec = xy_spec(0.6, (0.17, 0.3), (0.25, -0.4));
        let r = s_transform_check(&spec, TauPoint::new(0.2, 0.8).unwrap(), 1e-12).unwrap();
        assert!(r.relative <= 1e-8, "{}", r.relative);
    }

    // E is odd, so p[f](−x) = (−1)^{m+d} p[f](x); with a = b = 0 the lattice
    // sum cancels in ± pairs whenever m + d is odd.
    #[test]
    fn odd_summand_sums_to_zero() {
        let tol = 1e-10;
        let tau = TauPoint::new(0.3, 0.9).unwrap();
        for f in [MultiPoly::x(2, 0), xy()] {
            let m = f.m();
            let kernel = KernelSpec::sign_limit(f, 1.0).unwrap();
            let spec =
                ThetaSpec::new(Arc::new(kernel), PointR2m::zeros(m), PointR2m::zeros(m)).unwrap();
            let v = theta_eval(&spec, tau, tol).unwrap();
            assert!(v.value.norm() <= tol, "m = {m}: {}", v.value);
        }
        // m + d even: no cancellation
        let kernel = KernelSpec::sign_limit(MultiPoly::x(1, 0), 1.0).unwrap();
        let spec =
            ThetaSpec::new(Arc::new(kernel), PointR2m::zeros(1), PointR2m::zeros(1)).unwrap();
        assert!(theta_eval(&spec, tau, tol).unwrap().value.norm() > 1e-3);
    }

    #[test]
    fn factorised_matches_direct() {
        let spec = xy_spec(1.0, (0.1, 0.5), (0.5, 0.2));
        let tau = TauPoint::new(0.25, 1.0).unwrap();
        let fac = Factorisation::new(spec.kernel.polynomial());
        let kernels = pair_kernels(&spec, &fac).unwrap();
        let a = theta_box(&spec, &fac, &kernels, tau, 6).value;
        let b = theta_eval_direct(&spec, tau, 6).unwrap();
        assert!((a - b).norm() < 1e-12);

        let spec = ThetaSpec::kw(2, 0.5).unwrap();
        let fac = Factorisation::new(spec.kernel.polynomial());
        let kernels = pair_kernels(&spec, &fac).unwrap();
        let a = theta_box(&spec, &fac, &kernels, tau, 3).value;
        let b = theta_eval_direct(&spec, tau, 3).unwrap();
        assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn half_and_double_radius_agree() {
        let spec = xy_spec(1.0, (0.0, 0.5), (0.5, 0.5));
        let tau = TauPoint::new(0.0, 1.0).unwrap();
        let tol = 1e-10;
        let v = theta_eval(&spec, tau, tol).unwrap();
        let wide = theta_eval_direct(&spec, tau, 2 * v.radius).unwrap();
        let narrow = theta_eval_direct(&spec, tau, v.radius / 2).unwrap();
        assert!((v.value - wide).norm() <= tol);
        assert!((narrow - wide).norm() <= tol);
    }

    #[test]
    fn limit_sum_factorised_matches_direct() {
        let (a, b) = kw_shifts(2);
        let tau = TauPoint::new(0.1, 0.9).unwrap();
        let fac = Factorisation::new(&vm_poly(2));
        let lhs = limit_box(&fac, &a, &b, tau, 5).value;
        let rhs = holomorphic_limit_direct(&vm_poly(2), &a, &b, tau, 5).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn limit_condition_is_enforced() {
        let a = PointR2m::from_pairs(&[(0.5, 0.5)]).unwrap();
        let b = PointR2m::zeros(1);
        let r = holomorphic_limit_eval(&xy(), &a, &b, TauPoint::new(0.0, 1.0).unwrap(), 1e-8);
        assert_eq!(r.unwrap_err(), ThetaError::LimitCondition { pair: 0 });
        assert!(ThetaSpec::kw(1, 1.0).unwrap().limit_condition());
    }

    // KW_1 = q^{3/8}(1 + 6q^{1/2} + 15q + 26q^{3/2} + …) and the constant 4i.
    #[test]
    fn kw1_leading_terms_at_i() {
        let tau = TauPoint::new(0.0, 1.0).unwrap();
        let got = kw_numeric(1, tau, 1e-14).unwrap().value;
        let q = (-2.0 * PI).exp();
        let coeffs = [1.0, 6.0, 15.0, 26.0];
        let mut want = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            want += c * q.powf(0.375 + 0.5 * k as f64);
        }
        let next = q.powf(0.375 + 2.0);
        assert!(got.im.abs() < 1e-14);
        assert!((got.re - want).abs() < 60.0 * next, "{got} vs {want}");
    }

    #[test]
    fn kw_decays_at_infinity() {
        let a = kw_numeric(1, TauPoint::new(0.0, 2.0).unwrap(), 1e-12)
            .unwrap()
            .value
            .norm();
        let b = kw_numeric(1, TauPoint::new(0.0, 4.0).unwrap(), 1e-12)
            .unwrap()
            .value
            .norm();
        let slope = (b.ln() - a.ln()) / 2.0;
        assert!((-slope / (2.0 * PI) - 0.375).abs() < 0.01);
    }

    #[test]
    fn gamma2_m1() {
        let r = gamma2_transform_check(1, TauPoint::new(0.0, 1.0).unwrap(), 1e-5).unwrap();
        assert!(r.translation <= 1e-5 && r.st2s <= 1e-5, "{r:?}");
    }

    #[test]
    fn json_record() {
        let v = ThetaValue {
            value: Complex64::new(1.5, -2.0),
            radius: 8,
            shell: 0.0,
            change: 0.0,
        };
        let j = v.to_json(1, TauPoint::new(0.0, 1.0).unwrap(), 1e-6);
        assert_eq!(
            j.to_string(),
            r#"{"m":1,"radius":8,"tau":[0.0,1.0],"tol":1e-6,"value":[1.5,-2.0]}"#
        );
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = xy_spec(1.0, (0.0, 0.5), (0.5, 0.5));
        let cfg = TruncationConfig::absolute(1e-30, 8);
        let r = theta_eval_with(&spec, TauPoint::new(0.0, 1.0).unwrap(), &cfg);
        assert!(matches!(r, Err(ThetaError::NonConvergence { .. })));
        assert!(matches!(
            theta_eval(&spec, TauPoint::new(0.0, 1.0).unwrap(), -1.0),
            Err(ThetaError::BadTolerance(_))
        ));
    }
}
