//! Differential and bidifferential operators with polynomial coefficients, formal
//! operator series in `nu`, the Hochschild coboundary on low-arity cochains, and
//! recovery of a differential operator from its values on monomials.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{monomial_factors, MultiIndex, Polynomial, Rational};
use crate::series::NuSeries;

/// `D = Σ_J φ^J(x) ∂_J`, stored with derivatives to the right of coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiffOp {
    dim: usize,
    terms: BTreeMap<MultiIndex, Polynomial>,
}

impl DiffOp {
    pub fn zero(dim: usize) -> Self {
        DiffOp { dim, terms: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::term(MultiIndex::zero(dim), Polynomial::one(dim))
    }

    /// Single term `coeff * ∂_J`.
    pub fn term(j: MultiIndex, coeff: Polynomial) -> Self {
        let mut d = DiffOp::zero(j.dim());
        d.add_term(j, &coeff);
        d
    }

    /// `∂_J` with unit coefficient.
    pub fn partial(j: &[u32]) -> Self {
        let j = MultiIndex::from_slice(j);
        let dim = j.dim();
        Self::term(j, Polynomial::one(dim))
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Polynomial)>,
    {
        let mut d = DiffOp::zero(dim);
        for (j, c) in terms {
            Error::check_dim(dim, j.dim())?;
            Error::check_dim(dim, c.dim())?;
            d.add_term(j, &c);
        }
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Polynomial)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, j: &MultiIndex) -> Polynomial {
        self.terms.get(j).cloned().unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    pub fn add_term(&mut self, j: MultiIndex, coeff: &Polynomial) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(j.clone()).or_insert_with(|| Polynomial::zero(self.dim));
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&j);
        }
    }

    /// Highest derivative order `max |J|`; zero for the zero operator.
    pub fn order(&self) -> usize {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// No `J = 0` term, i.e. `D(1) = 0`.
    pub fn is_null_on_constants(&self) -> bool {
        !self.terms.contains_key(&MultiIndex::zero(self.dim))
    }

    /// `D(1) = D(x_k) = 0` for all `k`: no terms with `|J| <= 1`.
    pub fn vanishes_on_linear(&self) -> bool {
        self.terms.keys().all(|j| j.degree() >= 2)
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        Error::check_dim(self.dim, f.dim())?;
        Ok(self.apply_unchecked(f))
    }

    pub(crate) fn apply_unchecked(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        let fdeg = f.degree().unwrap_or(0);
        for (j, c) in &self.terms {
            if j.degree() > fdeg {
                continue;
            }
            let d = f.derivative_unchecked(j);
            if !d.is_zero() {
                out += &(c * &d);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        let mut out = DiffOp::zero(self.dim);
        for (j, p) in &self.terms {
            out.add_term(j.clone(), &p.scale(c));
        }
        out
    }

    pub fn checked_add(&self, other: &DiffOp) -> Result<DiffOp> {
        Error::check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (j, p) in &other.terms {
            out.add_term(j.clone(), p);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    /// `self ∘ other`, normalised by the Leibniz rule:
    /// `a ∂_I ∘ b ∂_J = Σ_{K <= I} binom(I, K) a (∂_K b) ∂_{I - K + J}`.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        Error::check_dim(self.dim, other.dim)?;
        let mut acc: BTreeMap<MultiIndex, Polynomial> = BTreeMap::new();
        for (i, a) in &self.terms {
            for k in i.divisors() {
                let binom = Rational::from_integer(i.binomial(&k));
                let rest = i.checked_sub(&k).expect("divisor");
                for (j, b) in &other.terms {
                    let db = b.derivative_unchecked(&k);
                    if db.is_zero() {
                        continue;
                    }
                    let coeff = (a * &db).scale(&binom);
                    acc.entry(rest.add(j))
                        .or_insert_with(|| Polynomial::zero(self.dim))
                        .add_scaled(&coeff, &Rational::one());
                }
            }
        }
        DiffOp::from_terms(self.dim, acc.into_iter().filter(|(_, c)| !c.is_zero()))
    }
}

fn derivative_factors(j: &MultiIndex) -> Vec<String> {
    j.exponents()
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("d{}", i + 1) } else { format!("d{}^{}", i + 1, k) })
        .collect()
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.terms.iter().rev() {
            let derivs = derivative_factors(j);
            if c.len() == 1 {
                let (m, a) = c.terms().next().expect("one term");
                let mut factors = monomial_factors(m);
                factors.extend(derivs);
                crate::poly::write_term(f, a, &factors, first)?;
            } else {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "({c})")?;
                if !derivs.is_empty() {
                    write!(f, "*{}", derivs.join("*"))?;
                }
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp[{}]({})", self.dim, self)
    }
}

/// `B(f, g) = Σ_{I,J} φ^{I,J}(x) ∂_I f ∂_J g`.
#[derive(Clone, PartialEq, Eq)]
pub struct BiDiffOp {
    dim: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), Polynomial>,
}

impl BiDiffOp {
    pub fn zero(dim: usize) -> Self {
        BiDiffOp { dim, terms: BTreeMap::new() }
    }

    /// The pointwise product `(f, g) ↦ fg`.
    pub fn multiplication(dim: usize) -> Self {
        let mut b = Self::zero(dim);
        b.add_term(MultiIndex::zero(dim), MultiIndex::zero(dim), &Polynomial::one(dim));
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Polynomial)> + '_ {
        self.terms.iter()
    }

    pub fn add_term(&mut self, i: MultiIndex, j: MultiIndex, coeff: &Polynomial) {
        if coeff.is_zero() {
            return;
        }
        let key = (i, j);
        let entry = self.terms.entry(key.clone()).or_insert_with(|| Polynomial::zero(self.dim));
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// No term with `I = 0` or `J = 0`.
    pub fn is_null_on_constants(&self) -> bool {
        self.terms.keys().all(|(i, j)| !i.is_zero() && !j.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> BiDiffOp {
        let mut out = BiDiffOp::zero(self.dim);
        for ((i, j), p) in &self.terms {
            out.add_term(i.clone(), j.clone(), &p.scale(c));
        }
        out
    }

    pub fn apply(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        Error::check_dim(self.dim, f.dim())?;
        Error::check_dim(self.dim, g.dim())?;
        Ok(self.apply_unchecked(f, g))
    }

    pub(crate) fn apply_unchecked(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        let (fd, gd) = (f.degree().unwrap_or(0), g.degree().unwrap_or(0));
        let mut fcache: BTreeMap<&MultiIndex, Polynomial> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            if i.degree() > fd || j.degree() > gd {
                continue;
            }
            let df = fcache.entry(i).or_insert_with(|| f.derivative_unchecked(i));
            if df.is_zero() {
                continue;
            }
            let dg = g.derivative_unchecked(j);
            if dg.is_zero() {
                continue;
            }
            out += &(&(c * df) * &dg);
        }
        out
    }
}

impl fmt::Debug for BiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// `T = I + ν T_1 + ... + ν^R T_R` with each `T_r` (r ≥ 1) vanishing on constants.
#[derive(Clone, PartialEq, Eq)]
pub struct OperatorSeries {
    dim: usize,
    terms: Vec<DiffOp>,
}

impl OperatorSeries {
    pub fn identity(dim: usize, order: usize) -> Self {
        let mut terms = vec![DiffOp::zero(dim); order + 1];
        terms[0] = DiffOp::identity(dim);
        OperatorSeries { dim, terms }
    }

    /// Builds `I + Σ_{r≥1} ν^r higher[r-1]`.
    pub fn from_higher(dim: usize, higher: Vec<DiffOp>) -> Result<Self> {
        let mut terms = Vec::with_capacity(higher.len() + 1);
        terms.push(DiffOp::identity(dim));
        terms.extend(higher);
        Self::new(dim, terms)
    }

    /// Validates `terms[0] = I` and that the higher terms vanish on constants.
    pub fn new(dim: usize, terms: Vec<DiffOp>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidOperatorSeries("no terms".into()));
        }
        for t in &terms {
            Error::check_dim(dim, t.dim())?;
        }
        if terms[0] != DiffOp::identity(dim) {
            return Err(Error::InvalidOperatorSeries("the nu^0 term must be the identity".into()));
        }
        if let Some(r) = terms.iter().skip(1).position(|t| !t.is_null_on_constants()) {
            return Err(Error::InvalidOperatorSeries(format!(
                "the nu^{} term does not vanish on constants",
                r + 1
            )));
        }
        Ok(OperatorSeries { dim, terms })
    }

    /// Truncated `exp(ν Δ) = Σ_r ν^r Δ^r / r!`.
    pub fn exp_of(delta: &DiffOp, order: usize) -> Result<Self> {
        if !delta.is_null_on_constants() {
            return Err(Error::NotNullOnConstants);
        }
        let dim = delta.dim();
        let mut terms = vec![DiffOp::identity(dim)];
        let mut power = DiffOp::identity(dim);
        for r in 1..=order {
            power = delta.compose(&power)?;
            terms.push(power.scale(&Rational::new(One::one(), crate::poly::factorial(r as u32))));
        }
        Self::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term(&self, r: usize) -> &DiffOp {
        &self.terms[r]
    }

    pub fn terms(&self) -> &[DiffOp] {
        &self.terms
    }

    pub fn is_identity(&self) -> bool {
        self.terms[1..].iter().all(DiffOp::is_zero)
    }

    /// Same series read at a different order: padded with zero operators or cut.
    pub fn with_order(&self, order: usize) -> OperatorSeries {
        let mut terms = self.terms.clone();
        terms.resize(order + 1, DiffOp::zero(self.dim));
        OperatorSeries { dim: self.dim, terms }
    }

    /// `T(f)` for a polynomial `f`, as a series of the operator's order.
    pub fn apply(&self, f: &Polynomial) -> Result<NuSeries> {
        Error::check_dim(self.dim, f.dim())?;
        let coeffs = self.terms.iter().map(|t| t.apply_unchecked(f)).collect();
        NuSeries::from_coefficients(self.dim, coeffs)
    }

    /// `(T a)_t = Σ_{r+s=t} T_r(a_s)`; orders must agree.
    pub fn apply_series(&self, a: &NuSeries) -> Result<NuSeries> {
        Error::check_dim(self.dim, a.dim())?;
        if a.order() != self.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: a.order() });
        }
        let order = self.order();
        let mut out = NuSeries::zero(self.dim, order);
        for (s, coeff) in a.coefficients().iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (r, t) in self.terms.iter().enumerate().take(order + 1 - s) {
                if !t.is_zero() {
                    *out.coefficient_mut(r + s) += &t.apply_unchecked(coeff);
                }
            }
        }
        Ok(out)
    }

    /// `(A∘B)_t = Σ_{r+s=t} A_r ∘ B_s`.
    pub fn compose(&self, other: &OperatorSeries) -> Result<OperatorSeries> {
        Error::check_dim(self.dim, other.dim)?;
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        let order = self.order();
        let mut terms = vec![DiffOp::zero(self.dim); order + 1];
        for (r, a) in self.terms.iter().enumerate() {
            for (s, b) in other.terms.iter().enumerate().take(order + 1 - r) {
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                terms[r + s] = terms[r + s].checked_add(&a.compose(b)?)?;
            }
        }
        OperatorSeries::new(self.dim, terms)
    }

    /// Formal inverse through the series' order: `S_0 = I`, `S_t = -Σ_{r=1}^t T_r ∘ S_{t-r}`.
    pub fn invert(&self) -> Result<OperatorSeries> {
        if self.terms[0] != DiffOp::identity(self.dim) {
            return Err(Error::InvalidOperatorSeries("the nu^0 term must be the identity".into()));
        }
        let mut inv: Vec<DiffOp> = vec![DiffOp::identity(self.dim)];
        for t in 1..=self.order() {
            let mut acc = DiffOp::zero(self.dim);
            for r in 1..=t {
                if self.terms[r].is_zero() || inv[t - r].is_zero() {
                    continue;
                }
                acc = acc.checked_add(&self.terms[r].compose(&inv[t - r])?)?;
            }
            inv.push(acc.scale(&-Rational::one()));
        }
        OperatorSeries::new(self.dim, inv)
    }
}

impl fmt::Display for OperatorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I")?;
        for (r, t) in self.terms.iter().enumerate().skip(1) {
            if !t.is_zero() {
                write!(f, " + nu^{r}*[{t}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OperatorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorSeries[order {}]({})", self.order(), self)
    }
}

/// Free-function form of [`OperatorSeries::invert`].
pub fn invert_operator_series(t: &OperatorSeries) -> Result<OperatorSeries> {
    t.invert()
}

/// Free-function form of [`OperatorSeries::compose`].
pub fn compose_operator_series(a: &OperatorSeries, b: &OperatorSeries) -> Result<OperatorSeries> {
    a.compose(b)
}

pub fn apply_diffop(d: &DiffOp, f: &Polynomial) -> Result<Polynomial> {
    d.apply(f)
}

pub fn apply_bidiffop(b: &BiDiffOp, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    b.apply(f, g)
}

type UnaryFn<'a> = Box<dyn Fn(&Polynomial) -> Result<Polynomial> + 'a>;
type BinaryFn<'a> = Box<dyn Fn(&Polynomial, &Polynomial) -> Result<Polynomial> + 'a>;
type TernaryFn<'a> = Box<dyn Fn(&Polynomial, &Polynomial, &Polynomial) -> Result<Polynomial> + 'a>;

/// A multilinear map on polynomials, given as an evaluator.
pub enum Cochain<'a> {
    Unary(UnaryFn<'a>),
    Binary(BinaryFn<'a>),
    Ternary(TernaryFn<'a>),
}

impl<'a> Cochain<'a> {
    pub fn unary(f: impl Fn(&Polynomial) -> Result<Polynomial> + 'a) -> Self {
        Cochain::Unary(Box::new(f))
    }

    pub fn binary(f: impl Fn(&Polynomial, &Polynomial) -> Result<Polynomial> + 'a) -> Self {
        Cochain::Binary(Box::new(f))
    }

    pub fn from_diffop(d: &'a DiffOp) -> Self {
        Cochain::unary(move |f| d.apply(f))
    }

    pub fn arity(&self) -> usize {
        match self {
            Cochain::Unary(_) => 1,
            Cochain::Binary(_) => 2,
            Cochain::Ternary(_) => 3,
        }
    }

    pub fn eval(&self, args: &[Polynomial]) -> Result<Polynomial> {
        if args.len() != self.arity() {
            return Err(Error::InvalidArgument(format!(
                "cochain of arity {} evaluated on {} arguments",
                self.arity(),
                args.len()
            )));
        }
        match self {
            Cochain::Unary(c) => c(&args[0]),
            Cochain::Binary(c) => c(&args[0], &args[1]),
            Cochain::Ternary(c) => c(&args[0], &args[1], &args[2]),
        }
    }
}

/// Hochschild coboundary of a 1- or 2-cochain of the pointwise product:
///
/// `δT(f, g) = f T(g) - T(fg) + T(f) g`
///
/// `δC(f, g, h) = f C(g, h) - C(fg, h) + C(f, gh) - C(f, g) h`
pub fn hochschild_coboundary(c: Cochain<'_>) -> Result<Cochain<'_>> {
    match c {
        Cochain::Unary(t) => Ok(Cochain::binary(move |f, g| {
            let mut out = f.checked_mul(&t(g)?)?;
            out -= &t(&f.checked_mul(g)?)?;
            out += &(&t(f)? * g);
            Ok(out)
        })),
        Cochain::Binary(b) => Ok(Cochain::Ternary(Box::new(move |f, g, h| {
            let mut out = f.checked_mul(&b(g, h)?)?;
            out -= &b(&f.checked_mul(g)?, h)?;
            out += &b(f, &g.checked_mul(h)?)?;
            out -= &(&b(f, g)? * h);
            Ok(out)
        }))),
        Cochain::Ternary(_) => Err(Error::UnsupportedArity(3)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    /// Probes are taken on every monomial of total degree `<= max_degree`.
    pub max_degree: usize,
    /// Terms `∂_J` with `|J| > max_order` are not fitted; monomials above this degree
    /// only serve as residual checks.
    pub max_order: usize,
    /// Whether a `J = 0` (multiplication) term is admitted.
    pub allow_constant: bool,
}

impl FitOptions {
    pub fn new(max_degree: usize, max_order: usize) -> Self {
        FitOptions { max_degree, max_order, allow_constant: false }
    }

    pub fn with_constants(mut self) -> Self {
        self.allow_constant = true;
        self
    }
}

/// Recovers the differential operator `D = Σ_{|J| <= O} φ^J ∂_J` agreeing with a linear
/// `probe` on every monomial of degree `<= D`.
///
/// Monomials are visited in increasing degree. Since `∂_J x^M` vanishes unless `J <= M`
/// and `∂_M x^M = M!`, the coefficient `φ^M` is fixed by the residual left on `x^M` after
/// subtracting the already fitted lower terms. Above the order bound that residual must
/// vanish.
pub fn fit_diffop<F>(dim: usize, mut probe: F, opts: FitOptions) -> Result<DiffOp>
where
    F: FnMut(&Polynomial) -> Result<Polynomial>,
{
    if opts.max_order > opts.max_degree {
        return Err(Error::InvalidArgument(format!(
            "max_order {} exceeds max_degree {}",
            opts.max_order, opts.max_degree
        )));
    }
    let mut fitted = DiffOp::zero(dim);
    for m in MultiIndex::all_up_to_degree(dim, opts.max_degree) {
        let xm = Polynomial::monomial(m.clone(), Rational::one());
        let value = probe(&xm)?;
        Error::check_dim(dim, value.dim())?;
        let residual = &value - &fitted.apply_unchecked(&xm);
        if residual.is_zero() {
            continue;
        }
        if m.is_zero() && !opts.allow_constant {
            return Err(Error::NotNullOnConstants);
        }
        if m.degree() > opts.max_order {
            return Err(Error::FitResidual { max_order: opts.max_order, monomial: m });
        }
        let norm = Rational::new(One::one(), m.factorial());
        fitted.add_term(m, &residual.scale(&norm));
    }
    Ok(fitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn x(dim: usize, i: usize) -> Polynomial {
        Polynomial::var(dim, i)
    }

    #[test]
    fn apply_examples() {
        let d = DiffOp::term(MultiIndex::from_slice(&[1, 0]), x(2, 1));
        assert_eq!(apply_diffop(&d, &x(2, 0).pow(2)).unwrap(), (&x(2, 0) * &x(2, 1)).scale(&int(2)));
        let f = &x(2, 0).pow(3) - &x(2, 1);
        assert_eq!(apply_diffop(&DiffOp::identity(2), &f).unwrap(), f);
        assert!(d.is_null_on_constants());
        assert!(apply_diffop(&d, &Polynomial::one(2)).unwrap().is_zero());
        assert!(apply_diffop(&d, &x(3, 0)).is_err());
    }

    #[test]
    fn bidiffop_examples() {
        let mut b = BiDiffOp::zero(2);
        b.add_term(MultiIndex::from_slice(&[1, 0]), MultiIndex::from_slice(&[0, 1]), &Polynomial::one(2));
        let v = apply_bidiffop(&b, &x(2, 0).pow(2), &x(2, 1).pow(2)).unwrap();
        assert_eq!(v, (&x(2, 0) * &x(2, 1)).scale(&int(4)));
        assert!(b.is_null_on_constants());
        assert!(apply_bidiffop(&b, &Polynomial::one(2), &x(2, 1)).unwrap().is_zero());
        let m = BiDiffOp::multiplication(2);
        let (f, g) = (&x(2, 0) + &x(2, 1), &x(2, 0) - &Polynomial::one(2));
        assert_eq!(apply_bidiffop(&m, &f, &g).unwrap(), &f * &g);
    }

    #[test]
    fn coboundary_of_second_derivative() {
        let t = DiffOp::partial(&[2]);
        let dt = hochschild_coboundary(Cochain::from_diffop(&t)).unwrap();
        let v = dt.eval(&[x(1, 0), x(1, 0)]).unwrap();
        assert_eq!(v, Polynomial::constant(1, int(-2)));
        let one = Polynomial::one(1);
        let f = &x(1, 0).pow(3) + &x(1, 0);
        assert!(dt.eval(&[one.clone(), f.clone()]).unwrap().is_zero());
        assert!(dt.eval(&[f, one]).unwrap().is_zero());
    }

    #[test]
    fn coboundary_rejects_arity_three() {
        let t = DiffOp::partial(&[1]);
        let d2 = hochschild_coboundary(hochschild_coboundary(Cochain::from_diffop(&t)).unwrap()).unwrap();
        assert_eq!(d2.arity(), 3);
        assert!(matches!(hochschild_coboundary(d2), Err(Error::UnsupportedArity(3))));
    }

    #[test]
    fn geometric_inverse() {
        let d1 = DiffOp::partial(&[1, 0]);
        let t = OperatorSeries::from_higher(2, vec![d1.clone(), DiffOp::zero(2), DiffOp::zero(2)]).unwrap();
        let inv = invert_operator_series(&t).unwrap();
        assert_eq!(inv.term(1), &d1.scale(&int(-1)));
        assert_eq!(inv.term(2), &DiffOp::partial(&[2, 0]));
        assert_eq!(inv.term(3), &DiffOp::partial(&[3, 0]).scale(&int(-1)));
        let id = OperatorSeries::identity(2, 3);
        assert_eq!(invert_operator_series(&id).unwrap(), id);
        assert_eq!(compose_operator_series(&t, &inv).unwrap(), id);
    }

    #[test]
    fn composition_examples() {
        let d1 = DiffOp::partial(&[1, 0]);
        let a = OperatorSeries::from_higher(2, vec![d1.clone(), DiffOp::zero(2)]).unwrap();
        let b = OperatorSeries::from_higher(2, vec![d1.scale(&int(-1)), DiffOp::zero(2)]).unwrap();
        let ab = compose_operator_series(&a, &b).unwrap();
        assert!(ab.term(1).is_zero());
        assert_eq!(ab.term(2), &DiffOp::partial(&[2, 0]).scale(&int(-1)));
        assert_eq!(compose_operator_series(&a, &OperatorSeries::identity(2, 2)).unwrap(), a);

        let x1d1 = DiffOp::term(MultiIndex::from_slice(&[1, 0]), x(2, 0));
        let left = x1d1.compose(&d1).unwrap();
        let right = d1.compose(&x1d1).unwrap();
        assert_eq!(left, DiffOp::term(MultiIndex::from_slice(&[2, 0]), x(2, 0)));
        assert_eq!(right.checked_sub(&left).unwrap(), d1);
    }

    #[test]
    fn invalid_series() {
        assert!(OperatorSeries::new(1, vec![DiffOp::partial(&[1])]).is_err());
        assert!(OperatorSeries::new(1, vec![DiffOp::identity(1), DiffOp::identity(1)]).is_err());
    }

    #[test]
    fn fit_examples() {
        let twice_d1 = |f: &Polynomial| Ok(f.partial(0).scale(&int(2)));
        let d = fit_diffop(2, twice_d1, FitOptions::new(3, 3)).unwrap();
        assert_eq!(d, DiffOp::partial(&[1, 0]).scale(&int(2)));

        let id = |f: &Polynomial| Ok(f.clone());
        assert!(matches!(fit_diffop(2, id, FitOptions::new(3, 3)), Err(Error::NotNullOnConstants)));
        let d = fit_diffop(2, id, FitOptions::new(3, 3).with_constants()).unwrap();
        assert_eq!(d, DiffOp::identity(2));

        let euler = |f: &Polynomial| Ok(&x(2, 0) * &f.partial(0));
        let d = fit_diffop(2, euler, FitOptions::new(4, 4)).unwrap();
        assert_eq!(d, DiffOp::term(MultiIndex::from_slice(&[1, 0]), x(2, 0)));

        let second = |f: &Polynomial| Ok(f.derivative_unchecked(&MultiIndex::from_slice(&[2, 0])));
        match fit_diffop(2, second, FitOptions::new(3, 1)) {
            Err(Error::FitResidual { max_order: 1, monomial }) => assert_eq!(monomial.degree(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn display() {
        let d = DiffOp::term(MultiIndex::from_slice(&[2, 0]), x(2, 0).scale(&int(-3)))
            .checked_add(&DiffOp::term(MultiIndex::from_slice(&[0, 1]), &x(2, 1) + &Polynomial::one(2)))
            .unwrap();
        assert_eq!(d.to_string(), "-3*x1*d1^2 + (x2 + 1)*d2");
    }
}
