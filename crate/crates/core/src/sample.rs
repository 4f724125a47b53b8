//! Seeded random inputs for property checks.

use num_bigint::BigInt;
use rand::Rng;

use crate::lie::LinearForm;
use crate::poly::{MultiIndex, Polynomial, Rational};

/// A rational `p/q` with `|p| <= 5`, `1 <= q <= 3`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::new(BigInt::from(rng.random_range(-5i64..=5)), BigInt::from(rng.random_range(1i64..=3)))
}

pub fn random_nonzero_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    loop {
        let r = random_rational(rng);
        if r != Rational::from_integer(BigInt::from(0)) {
            return r;
        }
    }
}

/// Up to `terms` random monomials of degree `<= max_degree`, each with a nonzero coefficient.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_degree: usize, terms: usize) -> Polynomial {
    let pool = MultiIndex::all_up_to_degree(dim, max_degree);
    let mut p = Polynomial::zero(dim);
    for _ in 0..terms {
        let m = pool[rng.random_range(0..pool.len())].clone();
        p.add_term(m, random_nonzero_rational(rng));
    }
    p
}

/// A random polynomial without constant term, so that it is not a multiple of `1`.
pub fn random_nonconstant_polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_degree: usize, terms: usize) -> Polynomial {
    loop {
        let mut p = random_polynomial(rng, dim, max_degree, terms);
        p.truncate_below(1);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn random_linear_form<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> LinearForm {
    loop {
        let v = LinearForm::new((0..dim).map(|_| random_rational(rng)).collect());
        if !v.is_zero() {
            return v;
        }
    }
}
