//! Exact multivariate polynomials in `x_1, y_1, …, x_m, y_m` and the
//! differential operators of signature `(m, m)`.
//!
//! Exponent vectors are stored pair-interleaved, `[e(x_1), e(y_1), …]`, matching
//! the layout of [`PointR2m`].

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;
use thiserror::Error;

use crate::exactq::rational_to_f64;
use crate::kernel::ConeVector;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("pair index {pair} out of range for m = {m}")]
    PairIndex { pair: usize, m: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("point coordinates must be finite")]
    NonFinite,
    #[error("m must be positive")]
    ZeroRank,
}

/// Index of `x_{j+1}` in an exponent vector.
#[inline]
pub fn x_var(pair: usize) -> usize {
    2 * pair
}

/// Index of `y_{j+1}` in an exponent vector.
#[inline]
pub fn y_var(pair: usize) -> usize {
    2 * pair + 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    m: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiPoly {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: BigRational) -> Self {
        Self::monomial(m, vec![0; 2 * m], c)
    }

    pub fn one(m: usize) -> Self {
        Self::constant(m, BigRational::one())
    }

    pub fn monomial(m: usize, exponents: Vec<u32>, c: BigRational) -> Self {
        assert_eq!(exponents.len(), 2 * m, "exponent vector length must be 2m");
        let mut p = Self::zero(m);
        p.add_term(exponents, c);
        p
    }

    /// The coordinate `x_{pair+1}`.
    pub fn x(m: usize, pair: usize) -> Self {
        let mut e = vec![0; 2 * m];
        e[x_var(pair)] = 1;
        Self::monomial(m, e, BigRational::one())
    }

    /// The coordinate `y_{pair+1}`.
    pub fn y(m: usize, pair: usize) -> Self {
        let mut e = vec![0; 2 * m];
        e[y_var(pair)] = 1;
        Self::monomial(m, e, BigRational::one())
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponents) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// `Some(d)` when every term has total degree `d`; `None` for the zero
    /// polynomial or a mixed-degree one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = degrees.next()?;
        degrees.all(|x| x == d).then_some(d)
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        let mut out = Self::zero(self.m);
        for (e, c) in self.terms.iter() {
            out.add_term(e.clone(), c * factor);
        }
        out
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.m);
        for (e, c) in self.terms.iter() {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * BigRational::from_integer(BigInt::from(e[var])));
        }
        out
    }

    /// `Σ_j (∂²/∂x_j² − ∂²/∂y_j²)`.
    pub fn laplacian_mm(&self) -> Self {
        let mut out = Self::zero(self.m);
        for pair in 0..self.m {
            out = &out + &self.partial(x_var(pair)).partial(x_var(pair));
            out = &out - &self.partial(y_var(pair)).partial(y_var(pair));
        }
        out
    }

    /// `Σ_i x_i ∂/∂x_i` over all `2m` variables: scales each term by its degree.
    pub fn euler_op(&self) -> Self {
        let mut out = Self::zero(self.m);
        for (e, c) in self.terms.iter() {
            let deg: u32 = e.iter().sum();
            out.add_term(e.clone(), c * BigRational::from_integer(BigInt::from(deg)));
        }
        out
    }

    /// Degree `d` if the polynomial is homogeneous of degree `d` and harmonic
    /// for the signature-`(m,m)` Laplacian.
    pub fn spherical_degree(&self) -> Option<u32> {
        let d = self.homogeneous_degree()?;
        self.laplacian_mm().is_zero().then_some(d)
    }

    pub fn is_spherical(&self) -> bool {
        self.spherical_degree().is_some()
    }

    /// `(c_1 ∂/∂x_j + c_2 ∂/∂y_j)` without the normalising square root.
    fn raw_directional(&self, c1: &BigRational, c2: &BigRational, pair: usize) -> Self {
        let dx = self.partial(x_var(pair)).scale(c1);
        let dy = self.partial(y_var(pair)).scale(c2);
        &dx + &dy
    }

    /// Applies `∂_c(𝐱_j)^k`; see [`ScaledPoly`] for how the normalising
    /// `1/√(−Q_1(c))^k` is carried.
    pub fn directional_derivative(
        &self,
        c: &ConeVector,
        pair: usize,
        k: u32,
    ) -> Result<ScaledPoly, PolyError> {
        if pair >= self.m {
            return Err(PolyError::PairIndex { pair, m: self.m });
        }
        let (c1, c2) = c.exact();
        let mut poly = self.clone();
        for _ in 0..k {
            if poly.is_zero() {
                break;
            }
            poly = poly.raw_directional(c1, c2, pair);
        }
        Ok(ScaledPoly {
            poly,
            half_power: k,
            neg_q: c.neg_q1_exact(),
        })
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational, PolyError> {
        self.check_dim(point.len())?;
        let mut acc = BigRational::zero();
        for (e, c) in self.terms.iter() {
            let mut t = c.clone();
            for (x, k) in point.iter().zip(e.iter()) {
                if *k > 0 {
                    t *= num_traits::pow(x.clone(), *k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, PolyError> {
        self.check_dim(point.len())?;
        Ok(FloatPoly::from_exact(self, 1.0).eval(point))
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyError> {
        if got != 2 * self.m {
            return Err(PolyError::Dimension {
                got,
                expected: 2 * self.m,
            });
        }
        Ok(())
    }

    /// Relabels pair `i` as pair `j` and vice versa.
    pub fn swap_pairs(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero(self.m);
        for (e, c) in self.terms.iter() {
            let mut e2 = e.clone();
            e2.swap(x_var(i), x_var(j));
            e2.swap(y_var(i), y_var(j));
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Splits into the distinct per-pair monomials used by factorised lattice
    /// sums: each term becomes `c · ∏_j x_j^{e_j} y_j^{f_j}`.
    pub fn pair_factorisation(&self) -> Vec<(BigRational, Vec<(u32, u32)>)> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let pairs = (0..self.m).map(|j| (e[x_var(j)], e[y_var(j)])).collect();
                (c.clone(), pairs)
            })
            .collect()
    }

    /// `[[exponent-vector, "p/q"], ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .terms
            .iter()
            .map(|(e, c)| json!([e, c.to_string()]))
            .collect::<Vec<_>>())
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        assert_eq!(self.m, rhs.m, "polynomials in different numbers of pairs");
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            m: self.m,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        assert_eq!(self.m, rhs.m, "polynomials in different numbers of pairs");
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (ea, ca) in self.terms.iter() {
            for (eb, cb) in rhs.terms.iter() {
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MultiPoly {
            m: self.m,
            terms: acc,
        }
    }
}

/// A polynomial times `(−Q_1(c))^{−half_power/2}`.
///
/// The square root is irrational in general, so it stays symbolic until the
/// kernel converts to floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledPoly {
    pub poly: MultiPoly,
    pub half_power: u32,
    pub neg_q: BigRational,
}

impl ScaledPoly {
    pub fn scalar_f64(&self) -> f64 {
        rational_to_f64(&self.neg_q).powf(-(self.half_power as f64) / 2.0)
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::from_exact(&self.poly, self.scalar_f64())
    }
}

/// `V_m = ∏_{i<j} (x_i² − x_j²)(y_i² − y_j²) · ∏_j x_j y_j`, fully expanded.
pub fn vm_poly(m: usize) -> MultiPoly {
    assert!(m >= 1, "V_m needs m ≥ 1");
    let mut p = MultiPoly::one(m);
    for j in 0..m {
        p = &p * &(&MultiPoly::x(m, j) * &MultiPoly::y(m, j));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let xi = MultiPoly::x(m, i);
            let xj = MultiPoly::x(m, j);
            let yi = MultiPoly::y(m, i);
            let yj = MultiPoly::y(m, j);
            let dx = &(&xi * &xi) - &(&xj * &xj);
            let dy = &(&yi * &yi) - &(&yj * &yj);
            p = &p * &(&dx * &dy);
        }
    }
    p
}

/// `m! · (∏_{j=1}^m (2j−1)!)²`, the constant dividing every `V_m` lattice sum.
pub fn kw_normaliser(m: usize) -> BigInt {
    let fact = |n: usize| (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    let odd: BigInt = (1..=m).map(|j| fact(2 * j - 1)).product();
    fact(m) * &odd * &odd
}

pub fn laplacian_mm(p: &MultiPoly) -> MultiPoly {
    p.laplacian_mm()
}

pub fn euler_op(p: &MultiPoly) -> MultiPoly {
    p.euler_op()
}

/// `(true, Some(d))` for a spherical polynomial of degree `d`.
pub fn is_spherical(p: &MultiPoly) -> (bool, Option<u32>) {
    let d = p.spherical_degree();
    (d.is_some(), d)
}

pub fn directional_derivative(
    p: &MultiPoly,
    c: &ConeVector,
    pair: usize,
    k: u32,
) -> Result<ScaledPoly, PolyError> {
    p.directional_derivative(c, pair, k)
}

/// A point of `ℝ^{2m}` laid out as `(x_1, y_1, …, x_m, y_m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointR2m(Vec<f64>);

impl PointR2m {
    pub fn new(coords: Vec<f64>) -> Result<Self, PolyError> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(PolyError::Dimension {
                got: coords.len(),
                expected: coords.len().max(2).next_multiple_of(2),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(Self(coords))
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, PolyError> {
        Self::new(pairs.iter().flat_map(|(x, y)| [*x, *y]).collect())
    }

    /// The same pair repeated `m` times.
    pub fn repeated(m: usize, pair: (f64, f64)) -> Result<Self, PolyError> {
        if m == 0 {
            return Err(PolyError::ZeroRank);
        }
        Self::from_pairs(&vec![pair; m])
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; 2 * m])
    }

    pub fn m(&self) -> usize {
        self.0.len() / 2
    }

    pub fn pair(&self, j: usize) -> (f64, f64) {
        (self.0[x_var(j)], self.0[y_var(j)])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|x| x * s).collect())
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1.0)
    }

    /// `Q_m(x) = (1/2) Σ (x_j² − y_j²)`.
    pub fn quadratic_form(&self) -> f64 {
        (0..self.m())
            .map(|j| {
                let (x, y) = self.pair(j);
                0.5 * (x * x - y * y)
            })
            .sum()
    }

    /// `B_m(x, b) = Σ (x_j b_j − y_j b'_j)`.
    pub fn bilinear(&self, other: &Self) -> f64 {
        (0..self.m())
            .map(|j| {
                let (x, y) = self.pair(j);
                let (u, v) = other.pair(j);
                x * u - y * v
            })
            .sum()
    }
}

/// Floating-point image of an exact polynomial, evaluated against a table of
/// coordinate powers so that many polynomials can share one point.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    pub fn from_exact(p: &MultiPoly, scalar: f64) -> Self {
        Self {
            terms: p
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), rational_to_f64(c) * scalar))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|(e, _)| e.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let max = self.max_degree();
        self.eval_with(&PowTable::new(point, max))
    }

    pub fn eval_with(&self, pows: &PowTable) -> f64 {
        self.terms.iter().map(|(e, c)| c * pows.monomial(e)).sum()
    }

    /// Value, first partial and second partial in variable `var`.
    pub fn eval_jet(&self, pows: &PowTable, var: usize) -> (f64, f64, f64) {
        let mut v = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (e, c) in self.terms.iter() {
            let k = e[var];
            let rest = pows.monomial_except(e, var);
            v += c * rest * pows.get(var, k);
            if k >= 1 {
                d1 += c * rest * k as f64 * pows.get(var, k - 1);
            }
            if k >= 2 {
                d2 += c * rest * (k * (k - 1)) as f64 * pows.get(var, k - 2);
            }
        }
        (v, d1, d2)
    }
}

/// `pows[i][k] = point[i]^k` for `k ≤ max`.
pub struct PowTable {
    pows: Vec<Vec<f64>>,
}

impl PowTable {
    pub fn new(point: &[f64], max: u32) -> Self {
        Self {
            pows: point
                .iter()
                .map(|x| {
                    let mut row = Vec::with_capacity(max as usize + 1);
                    let mut acc = 1.0;
                    for _ in 0..=max {
                        row.push(acc);
                        acc *= x;
                    }
                    row
                })
                .collect(),
        }
    }

    #[inline]
    pub fn get(&self, var: usize, k: u32) -> f64 {
        self.pows[var][k as usize]
    }

    #[inline]
    fn monomial(&self, e: &[u32]) -> f64 {
        e.iter()
            .enumerate()
            .map(|(i, k)| self.pows[i][*k as usize])
            .product()
    }

    #[inline]
    fn monomial_except(&self, e: &[u32], skip: usize) -> f64 {
        e.iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(i, k)| self.pows[i][*k as usize])
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qi(n: i64) -> BigRational {
        q(n, 1)
    }

    #[test]
    fn v1_is_xy() {
        let v = vm_poly(1);
        let expected = &MultiPoly::x(1, 0) * &MultiPoly::y(1, 0);
        assert_eq!(v, expected);
    }

    #[test]
    fn v2_at_leading_cone_point() {
        // (x1, y1, x2, y2) = (1, 1/2, 2, 3/2): (1/2²)(1!·3!)² = 9
        let v = vm_poly(2);
        let pt = [qi(1), q(1, 2), qi(2), q(3, 2)];
        assert_eq!(v.eval_rational(&pt).unwrap(), qi(9));
    }

    #[test]
    fn normaliser_values() {
        assert_eq!(kw_normaliser(1), BigInt::from(1));
        assert_eq!(kw_normaliser(2), BigInt::from(72));
        assert_eq!(kw_normaliser(3), BigInt::from(6 * 720 * 720));
    }

    #[test]
    fn vm_vanishes_on_repeated_x() {
        for m in 2..=3 {
            let v = vm_poly(m);
            let mut pt: Vec<BigRational> = (0..2 * m).map(|i| q(i as i64 + 2, 3)).collect();
            pt[x_var(1)] = pt[x_var(0)].clone();
            assert!(v.eval_rational(&pt).unwrap().is_zero());
        }
    }

    #[test]
    fn vm_is_homogeneous_of_degree_2m_squared() {
        for m in 1..=4 {
            assert_eq!(vm_poly(m).homogeneous_degree(), Some(2 * (m * m) as u32));
        }
    }

    #[test]
    fn laplacian_examples() {
        let x = MultiPoly::x(1, 0);
        let y = MultiPoly::y(1, 0);
        let x2 = &x * &x;
        let y2 = &y * &y;
        assert_eq!(x2.laplacian_mm(), MultiPoly::constant(1, qi(2)));
        assert!((&x2 + &y2).laplacian_mm().is_zero());
    }

    #[test]
    fn euler_examples() {
        assert!(MultiPoly::constant(2, qi(5)).euler_op().is_zero());
        let x1 = MultiPoly::x(2, 0);
        let y2 = MultiPoly::y(2, 1);
        let p = &x1 * &(&y2 * &(&y2 * &y2));
        assert_eq!(p.euler_op(), p.scale(&qi(4)));
        let v = vm_poly(2);
        assert_eq!(v.euler_op(), v.scale(&qi(8)));
    }

    #[test]
    fn sphericality_examples() {
        for m in 1..=3 {
            let d = 2 * (m * m) as u32;
            assert_eq!(is_spherical(&vm_poly(m)), (true, Some(d)));
        }
        let x = MultiPoly::x(1, 0);
        let y = MultiPoly::y(1, 0);
        assert_eq!(is_spherical(&(&x * &x)), (false, None));
        assert_eq!(is_spherical(&(&(&x * &y) + &x)), (false, None));
    }

    #[test]
    fn directional_derivative_examples() {
        let c = ConeVector::new(qi(0), qi(1)).unwrap();
        let x = MultiPoly::x(1, 0);
        let d0 = x.directional_derivative(&c, 0, 0).unwrap();
        assert_eq!(d0.poly, x);
        let d1 = x.directional_derivative(&c, 0, 1).unwrap();
        assert!(d1.poly.is_zero());
        assert_eq!(d1.neg_q, q(1, 2));

        // degree-3 polynomial in pair 0, fourth derivative vanishes
        let c = ConeVector::new(q(1, 3), qi(2)).unwrap();
        let p = &(&x * &x) * &MultiPoly::y(1, 0);
        assert!(!p.directional_derivative(&c, 0, 3).unwrap().poly.is_zero());
        assert!(p.directional_derivative(&c, 0, 4).unwrap().poly.is_zero());
        assert!(matches!(
            p.directional_derivative(&c, 1, 1),
            Err(PolyError::PairIndex { .. })
        ));
    }

    #[test]
    fn directional_derivatives_commute_across_pairs() {
        let v = vm_poly(2);
        let a = ConeVector::new(qi(1), qi(2)).unwrap();
        let b = ConeVector::new(q(-1, 2), q(3, 2)).unwrap();
        let ab = v
            .directional_derivative(&a, 0, 2)
            .unwrap()
            .poly
            .directional_derivative(&b, 1, 3)
            .unwrap()
            .poly;
        let ba = v
            .directional_derivative(&b, 1, 3)
            .unwrap()
            .poly
            .directional_derivative(&a, 0, 2)
            .unwrap()
            .poly;
        assert_eq!(ab, ba);
    }

    #[test]
    fn scaled_poly_scalar() {
        let c = ConeVector::new(qi(1), qi(3)).unwrap(); // -Q1 = 4
        let s = MultiPoly::x(1, 0).directional_derivative(&c, 0, 2).unwrap();
        assert!((s.scalar_f64() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn float_jet_matches_exact_partials() {
        let v = vm_poly(2);
        let pt = [0.3, -1.1, 0.7, 0.45];
        let fp = FloatPoly::from_exact(&v, 1.0);
        let pows = PowTable::new(&pt, fp.max_degree());
        for var in 0..4 {
            let (val, d1, d2) = fp.eval_jet(&pows, var);
            assert!((val - v.eval_f64(&pt).unwrap()).abs() < 1e-13);
            assert!((d1 - v.partial(var).eval_f64(&pt).unwrap()).abs() < 1e-12);
            assert!((d2 - v.partial(var).partial(var).eval_f64(&pt).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let p = MultiPoly::x(1, 0).scale(&q(-3, 2));
        assert_eq!(p.to_json().to_string(), r#"[[[1,0],"-3/2"]]"#);
    }

    #[test]
    fn point_forms() {
        let p = PointR2m::from_pairs(&[(3.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_eq!(p.quadratic_form(), 4.0);
        let b = PointR2m::from_pairs(&[(0.5, 0.5), (1.0, 0.0)]).unwrap();
        assert_eq!(p.bilinear(&b), 1.5 - 0.5 + 2.0);
        assert_eq!(
            PointR2m::new(vec![1.0]),
            Err(PolyError::Dimension {
                got: 1,
                expected: 2
            })
        );
        assert_eq!(
            PointR2m::new(vec![1.0, f64::NAN]),
            Err(PolyError::NonFinite)
        );
    }
}
