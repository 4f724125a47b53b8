//! Formal series in `nu` with polynomial coefficients, truncated at a fixed order.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{monomial_factors, write_term, Polynomial, Rational};

/// `a_0 + nu a_1 + ... + nu^R a_R`; arithmetic discards every term of order above `R`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NuSeries {
    dim: usize,
    coeffs: Vec<Polynomial>,
}

impl NuSeries {
    pub fn zero(dim: usize, order: usize) -> Self {
        NuSeries { dim, coeffs: vec![Polynomial::zero(dim); order + 1] }
    }

    pub fn one(dim: usize, order: usize) -> Self {
        Self::from_polynomial(Polynomial::one(dim), order)
    }

    /// Constant series (`nu^0` coefficient only).
    pub fn from_polynomial(p: Polynomial, order: usize) -> Self {
        let mut s = Self::zero(p.dim(), order);
        s.coeffs[0] = p;
        s
    }

    /// Builds a series from its coefficients; the truncation order is `coeffs.len() - 1`.
    pub fn from_coefficients(dim: usize, coeffs: Vec<Polynomial>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a series needs at least one coefficient".into()));
        }
        for c in &coeffs {
            Error::check_dim(dim, c.dim())?;
        }
        Ok(NuSeries { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, r: usize) -> &Polynomial {
        &self.coeffs[r]
    }

    pub fn coefficient_mut(&mut self, r: usize) -> &mut Polynomial {
        &mut self.coeffs[r]
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Polynomial> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    /// True when every coefficient of positive order vanishes.
    pub fn is_constant_in_nu(&self) -> bool {
        self.coeffs[1..].iter().all(Polynomial::is_zero)
    }

    /// Lowest order `r` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check_compatible(&self, other: &NuSeries) -> Result<()> {
        Error::check_dim(self.dim, other.dim)?;
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &NuSeries) -> Result<NuSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &NuSeries) -> Result<NuSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    /// `self += c * other`, requiring identical shape.
    pub fn add_scaled(&mut self, other: &NuSeries, c: &Rational) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(b, c);
        }
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> NuSeries {
        NuSeries { dim: self.dim, coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    /// Multiplies by `nu^k`, dropping what falls beyond the truncation order.
    pub fn shift(&self, k: usize) -> NuSeries {
        let mut out = NuSeries::zero(self.dim, self.order());
        for r in 0..=self.order() {
            if r + k <= self.order() {
                out.coeffs[r + k] = self.coeffs[r].clone();
            }
        }
        out
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &NuSeries) -> Result<NuSeries> {
        self.check_compatible(other)?;
        let order = self.order();
        let mut out = NuSeries::zero(self.dim, order);
        for (r, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (s, b) in other.coeffs.iter().enumerate().take(order + 1 - r) {
                if !b.is_zero() {
                    out.coeffs[r + s] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Same series at a different truncation order (padding with zeros or dropping terms).
    pub fn retruncate(&self, order: usize) -> NuSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Polynomial::zero(self.dim));
        NuSeries { dim: self.dim, coeffs }
    }
}

/// Cauchy product of two series of equal order and dimension.
pub fn series_mul(a: &NuSeries, b: &NuSeries) -> Result<NuSeries> {
    a.mul(b)
}

/// The projection onto the `nu^0` coefficient.
pub fn project_pi(a: &NuSeries) -> Polynomial {
    a.coeffs[0].clone()
}

impl fmt::Display for NuSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (r, c) in self.coeffs.iter().enumerate() {
            for (m, a) in c.terms().rev() {
                let mut factors = monomial_factors(m);
                match r {
                    0 => {}
                    1 => factors.push("nu".into()),
                    _ => factors.push(format!("nu^{r}")),
                }
                write_term(f, a, &factors, first)?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for NuSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NuSeries[dim {}, order {}]({})", self.dim, self.order(), self)
    }
}

impl From<&NuSeries> for Vec<Polynomial> {
    fn from(s: &NuSeries) -> Self {
        s.coeffs.clone()
    }
}
