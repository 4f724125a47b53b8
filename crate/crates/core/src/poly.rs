//! Exact multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exact rational number; always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Formats a rational as `p/q`, omitting `/q` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exponent vector `(k_1, ..., k_n)` of a monomial, also used as a derivative multi-index.
///
/// Ordered graded-lexicographically: total degree first, then by the exponent of
/// `x1`, then `x2`, and so on.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, dim))
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut m = Self::zero(dim);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(exponents: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(exponents))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn with_incremented(&self, i: usize) -> MultiIndex {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    /// `self - e_i`, or `None` when the exponent of `x_i` is zero.
    pub fn with_decremented(&self, i: usize) -> Option<MultiIndex> {
        if self.0[i] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[i] -= 1;
        Some(m)
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Index of the first variable with a nonzero exponent.
    pub fn first_variable(&self) -> Option<usize> {
        self.0.iter().position(|&k| k > 0)
    }

    /// `K! = k_1! ... k_n!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// `K! / (K - J)!`, the constant produced by `∂_J x^K`, or zero when `J` does not divide `K`.
    pub fn falling_factorial(&self, j: &MultiIndex) -> BigInt {
        let mut acc = BigInt::one();
        for (&k, &d) in self.0.iter().zip(j.0.iter()) {
            if d > k {
                return BigInt::zero();
            }
            for t in 0..d {
                acc *= BigInt::from(k - t);
            }
        }
        acc
    }

    /// Product of binomials `binom(k_i, j_i)`.
    pub fn binomial(&self, j: &MultiIndex) -> BigInt {
        self.0
            .iter()
            .zip(j.0.iter())
            .map(|(&k, &d)| binomial(k, d))
            .product()
    }

    /// All multi-indices `J` with `J <= self` componentwise.
    pub fn divisors(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.dim())];
        for i in 0..self.dim() {
            let mut next = Vec::with_capacity(out.len() * (self.0[i] as usize + 1));
            for m in &out {
                for e in 0..=self.0[i] {
                    let mut m2 = m.clone();
                    m2.0[i] = e;
                    next.push(m2);
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices of dimension `dim` with total degree exactly `degree`.
    pub fn all_of_degree(dim: usize, degree: usize) -> Vec<MultiIndex> {
        fn rec(dim: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == dim {
                cur.push(left);
                out.push(MultiIndex::from_slice(cur));
                cur.pop();
                return;
            }
            for k in (0..=left).rev() {
                cur.push(k);
                rec(dim, pos + 1, left - k, cur, out);
                cur.pop();
            }
        }
        if dim == 0 {
            return if degree == 0 { vec![MultiIndex::zero(0)] } else { Vec::new() };
        }
        let mut out = Vec::new();
        rec(dim, 0, degree as u32, &mut Vec::with_capacity(dim), &mut out);
        out
    }

    /// All multi-indices of dimension `dim` with total degree at most `max_degree`, ascending.
    pub fn all_up_to_degree(dim: usize, max_degree: usize) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = (0..=max_degree)
            .flat_map(|d| MultiIndex::all_of_degree(dim, d))
            .collect();
        out.sort();
        out
    }

    pub(crate) fn var_powers(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Writes one signed term `c * factors` in canonical form. `factors` are already
/// rendered (`x1^2`, `nu`, ...); an empty list means a constant term.
pub(crate) fn write_term(
    f: &mut fmt::Formatter<'_>,
    coeff: &Rational,
    factors: &[String],
    first: bool,
) -> fmt::Result {
    let negative = coeff.is_negative();
    let abs = coeff.abs();
    match (first, negative) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    if factors.is_empty() {
        return write!(f, "{}", format_rational(&abs));
    }
    if !abs.is_one() {
        write!(f, "{}*", format_rational(&abs))?;
    }
    write!(f, "{}", factors.join("*"))
}

pub(crate) fn monomial_factors(m: &MultiIndex) -> Vec<String> {
    m.var_powers()
        .map(|(i, k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
        .collect()
}

/// Exact polynomial in `dim` variables with rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} out of range for dimension {dim}");
        Self::monomial(MultiIndex::unit(dim, i), Rational::one())
    }

    pub fn monomial(m: MultiIndex, c: Rational) -> Self {
        let mut p = Polynomial::zero(m.dim());
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, combining duplicates.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Polynomial::zero(dim);
        for (m, c) in terms {
            Error::check_dim(dim, m.dim())?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (MultiIndex, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&MultiIndex::zero(self.dim))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(MultiIndex::degree)
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Rational) {
        debug_assert_eq!(m.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Polynomial, c: &Rational) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    /// `self += c * x^shift * other`
    pub fn add_scaled_shifted(&mut self, other: &Polynomial, c: &Rational, shift: &MultiIndex) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.add(shift), a * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Product with dimension check.
    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        Error::check_dim(self.dim, other.dim)?;
        Ok(self * other)
    }

    /// Product keeping only terms of total degree `>= min_degree`.
    pub fn mul_truncated(&self, other: &Polynomial, min_degree: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                if ma.degree() + mb.degree() >= min_degree {
                    out.add_term(ma.add(mb), a * b);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Iterated partial derivative `∂_J`.
    pub fn derivative(&self, j: &MultiIndex) -> Result<Polynomial> {
        Error::check_dim(self.dim, j.dim())?;
        Ok(self.derivative_unchecked(j))
    }

    pub(crate) fn derivative_unchecked(&self, j: &MultiIndex) -> Polynomial {
        if j.is_zero() {
            return self.clone();
        }
        let mut out = Polynomial::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some(rest) = m.checked_sub(j) {
                let factor = Rational::from_integer(m.falling_factorial(j));
                out.add_term(rest, c * factor);
            }
        }
        out
    }

    /// `∂ / ∂x_{i+1}`
    pub fn partial(&self, i: usize) -> Polynomial {
        self.derivative_unchecked(&MultiIndex::unit(self.dim, i))
    }

    /// Degree-`d` homogeneous component.
    pub fn homogeneous(&self, d: usize) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops every term of total degree below `min_degree`.
    pub fn truncate_below(&mut self, min_degree: usize) {
        if min_degree == 0 {
            return;
        }
        self.terms.retain(|m, _| m.degree() >= min_degree);
    }

    /// Substitutes rationals for all variables.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        Error::check_dim(self.dim, point.len())?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, k) in m.var_powers() {
                for _ in 0..k {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Re-embeds into a space with `new_dim >= dim` variables; new variables get exponent zero.
    pub fn embed(&self, new_dim: usize) -> Polynomial {
        assert!(new_dim >= self.dim);
        let mut out = Polynomial::zero(new_dim);
        for (m, c) in &self.terms {
            let mut e = m.exponents().to_vec();
            e.resize(new_dim, 0);
            out.add_term(MultiIndex::from_slice(&e), c.clone());
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            write_term(f, c, &monomial_factors(m), idx == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.dim, self)
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    /// Panics on dimension mismatch; see [`Polynomial::checked_mul`].
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        self.mul_truncated(rhs, 0)
    }
}

/// Pointwise product of two polynomials.
pub fn poly_mul(f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    f.checked_mul(g)
}

/// Exact iterated partial derivative `∂_J f`.
pub fn partial_derivative(f: &Polynomial, j: &MultiIndex) -> Result<Polynomial> {
    f.derivative(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, i: usize) -> Polynomial {
        Polynomial::var(dim, i)
    }

    #[test]
    fn difference_of_squares() {
        let a = &x(2, 0) + &x(2, 1);
        let b = &x(2, 0) - &x(2, 1);
        let prod = poly_mul(&a, &b).unwrap();
        assert_eq!(prod, &x(2, 0).pow(2) - &x(2, 1).pow(2));
        assert_eq!(prod.to_string(), "x1^2 - x2^2");
    }

    #[test]
    fn unit_and_rational_cancellation() {
        let f = &x(2, 0).pow(3) + &Polynomial::constant(2, rat(-7, 3));
        assert_eq!(poly_mul(&f, &Polynomial::one(2)).unwrap(), f);
        let a = x(2, 0).scale(&rat(2, 3));
        let b = x(2, 1).scale(&rat(3, 2));
        assert_eq!(poly_mul(&a, &b).unwrap(), &x(2, 0) * &x(2, 1));
    }

    #[test]
    fn mul_dimension_mismatch() {
        assert!(matches!(
            poly_mul(&x(2, 0), &x(3, 0)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn derivatives() {
        let f = &x(2, 0).pow(2) * &x(2, 1);
        let d = partial_derivative(&f, &MultiIndex::from_slice(&[1, 1])).unwrap();
        assert_eq!(d, x(2, 0).scale(&int(2)));
        assert_eq!(partial_derivative(&f, &MultiIndex::zero(2)).unwrap(), f);
        let sq = x(2, 0).pow(2);
        assert!(partial_derivative(&sq, &MultiIndex::from_slice(&[3, 0])).unwrap().is_zero());
        assert!(partial_derivative(&sq, &MultiIndex::zero(3)).is_err());
    }

    #[test]
    fn graded_lex_printing() {
        let f = Polynomial::from_terms(
            3,
            [
                (MultiIndex::from_slice(&[2, 1, 0]), int(1)),
                (MultiIndex::from_slice(&[0, 0, 1]), rat(-3, 2)),
                (MultiIndex::from_slice(&[0, 0, 0]), int(5)),
                (MultiIndex::from_slice(&[1, 2, 0]), int(-1)),
            ],
        )
        .unwrap();
        assert_eq!(f.to_string(), "x1^2*x2 - x1*x2^2 - 3/2*x3 + 5");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(MultiIndex::all_of_degree(3, 4).len(), 15);
        assert_eq!(MultiIndex::all_up_to_degree(3, 6).len(), 84);
        assert_eq!(MultiIndex::from_slice(&[2, 1]).divisors().len(), 6);
    }
}
