//! Star-products `f ∗ g = Σ ν^r C_r(f, g)` on polynomial algebras.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::diffop::{BiDiffOp, OperatorSeries};
use crate::error::{Error, Result};
use crate::lie::{
    ad_power, f_series_explicit, f_series_recursive, BchContext, BernoulliCache, LieAlgebra,
    LinearForm, PoissonStructure,
};
use crate::pbw::GuttEngine;
use crate::poly::{factorial, MultiIndex, Polynomial, Rational};
use crate::series::NuSeries;

/// Which construction a [`StarProduct`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarKind {
    Moyal,
    Gutt,
    Twist,
    Perturbed,
}

/// Constant-coefficient Moyal operator of one order, grouped by the first-slot derivative.
type MoyalLevel = BTreeMap<MultiIndex, Vec<(MultiIndex, Rational)>>;

enum Backend {
    Moyal {
        levels: RwLock<Vec<Arc<MoyalLevel>>>,
    },
    Gutt {
        algebra: LieAlgebra,
        engines: RwLock<BTreeMap<usize, Arc<GuttEngine>>>,
    },
    Twist {
        base: StarProduct,
        generator: OperatorSeries,
        inverted: bool,
        inverse: RwLock<Option<OperatorSeries>>,
    },
    Perturbed {
        base: StarProduct,
        corrections: Vec<(usize, BiDiffOp)>,
    },
}

struct Inner {
    poisson: PoissonStructure,
    backend: Backend,
}

/// A star-product, cheap to clone.
#[derive(Clone)]
pub struct StarProduct {
    inner: Arc<Inner>,
}

impl StarProduct {
    /// Moyal product of a constant Poisson structure.
    pub fn moyal(poisson: PoissonStructure) -> Result<Self> {
        if !poisson.is_constant() {
            return Err(Error::NonConstantPoisson);
        }
        let level0: MoyalLevel =
            BTreeMap::from([(MultiIndex::zero(poisson.dim()), vec![(MultiIndex::zero(poisson.dim()), Rational::one())])]);
        Ok(Self::from_parts(poisson, Backend::Moyal { levels: RwLock::new(vec![Arc::new(level0)]) }))
    }

    /// The undeformed product.
    pub fn pointwise(dim: usize) -> Self {
        Self::moyal(PoissonStructure::zero(dim)).expect("zero structure is constant")
    }

    /// Gutt's star-product on the dual of `algebra`.
    pub fn gutt(algebra: LieAlgebra) -> Self {
        let poisson = algebra.poisson();
        Self::from_parts(poisson, Backend::Gutt { algebra, engines: RwLock::new(BTreeMap::new()) })
    }

    /// `f ∗' g = T⁻¹(T f ∗ T g)`.
    pub fn twist(base: &StarProduct, t: &OperatorSeries) -> Result<Self> {
        Error::check_dim(base.dim(), t.dim())?;
        Ok(Self::from_parts(
            base.poisson().clone(),
            Backend::Twist {
                base: base.clone(),
                generator: t.clone(),
                inverted: false,
                inverse: RwLock::new(None),
            },
        ))
    }

    /// `f ∗' g = T(T⁻¹ f ∗ T⁻¹ g)`, the twist by `T⁻¹`, computed without truncating `T⁻¹`.
    pub fn twist_inverse(base: &StarProduct, t: &OperatorSeries) -> Result<Self> {
        Error::check_dim(base.dim(), t.dim())?;
        Ok(Self::from_parts(
            base.poisson().clone(),
            Backend::Twist {
                base: base.clone(),
                generator: t.clone(),
                inverted: true,
                inverse: RwLock::new(None),
            },
        ))
    }

    /// `C'_r = C_r + Σ B` for the listed `(r, B)`; generally not associative.
    pub fn perturbed(base: &StarProduct, corrections: Vec<(usize, BiDiffOp)>) -> Result<Self> {
        for (_, b) in &corrections {
            Error::check_dim(base.dim(), b.dim())?;
        }
        Ok(Self::from_parts(
            base.poisson().clone(),
            Backend::Perturbed { base: base.clone(), corrections },
        ))
    }

    fn from_parts(poisson: PoissonStructure, backend: Backend) -> Self {
        StarProduct { inner: Arc::new(Inner { poisson, backend }) }
    }

    pub fn dim(&self) -> usize {
        self.inner.poisson.dim()
    }

    pub fn poisson(&self) -> &PoissonStructure {
        &self.inner.poisson
    }

    pub fn kind(&self) -> StarKind {
        match &self.inner.backend {
            Backend::Moyal { .. } => StarKind::Moyal,
            Backend::Gutt { .. } => StarKind::Gutt,
            Backend::Twist { .. } => StarKind::Twist,
            Backend::Perturbed { .. } => StarKind::Perturbed,
        }
    }

    /// The Lie algebra of a Gutt product, looking through twists and perturbations.
    pub fn algebra(&self) -> Option<&LieAlgebra> {
        match &self.inner.backend {
            Backend::Gutt { algebra, .. } => Some(algebra),
            Backend::Twist { base, .. } | Backend::Perturbed { base, .. } => base.algebra(),
            Backend::Moyal { .. } => None,
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match &self.inner.backend {
            Backend::Moyal { .. } if self.poisson().is_zero() => "pointwise".into(),
            Backend::Moyal { .. } => "moyal".into(),
            Backend::Gutt { .. } => "gutt".into(),
            Backend::Twist { base, generator, inverted, .. } => {
                let t = if *inverted { format!("({generator})^-1") } else { generator.to_string() };
                format!("twist of {} by {t}", base.describe())
            }
            Backend::Perturbed { base, corrections } => {
                format!("{} with {} perturbed cochain(s)", base.describe(), corrections.len())
            }
        }
    }

    fn moyal_level(&self, r: usize) -> Arc<MoyalLevel> {
        let Backend::Moyal { levels } = &self.inner.backend else {
            unreachable!("moyal_level on a non-Moyal product")
        };
        if let Some(l) = levels.read().get(r) {
            return l.clone();
        }
        let p = &self.inner.poisson;
        let n = p.dim();
        let mut levels = levels.write();
        while levels.len() <= r {
            // Unnormalized `c^{(k)}[(I + e_i, J + e_j)] += c^{(k-1)}[(I, J)] P^{ij}`.
            let k = levels.len();
            let prev_scale = Rational::from_integer(factorial(k as u32 - 1));
            let mut acc: BTreeMap<(MultiIndex, MultiIndex), Rational> = BTreeMap::new();
            for (i_idx, row) in levels[k - 1].iter() {
                for (j_idx, c) in row {
                    let c = c * &prev_scale;
                    for i in 0..n {
                        for j in 0..n {
                            let pij = p.entry(i, j).constant_term();
                            if pij.is_zero() {
                                continue;
                            }
                            *acc.entry((i_idx.with_incremented(i), j_idx.with_incremented(j)))
                                .or_insert_with(Rational::zero) += &c * &pij;
                        }
                    }
                }
            }
            let inv = Rational::new(BigInt::one(), factorial(k as u32));
            let mut level: MoyalLevel = BTreeMap::new();
            for ((i_idx, j_idx), c) in acc {
                if !c.is_zero() {
                    level.entry(i_idx).or_default().push((j_idx, c * &inv));
                }
            }
            levels.push(Arc::new(level));
        }
        levels[r].clone()
    }

    /// The Moyal cochain `C_r` as a constant-coefficient bidifferential operator.
    pub fn moyal_operator(&self, r: usize) -> Result<BiDiffOp> {
        if self.kind() != StarKind::Moyal {
            return Err(Error::InvalidArgument("not a Moyal product".into()));
        }
        let n = self.dim();
        let mut out = BiDiffOp::zero(n);
        for (i_idx, row) in self.moyal_level(r).iter() {
            for (j_idx, c) in row {
                out.add_term(i_idx.clone(), j_idx.clone(), &Polynomial::constant(n, c.clone()));
            }
        }
        Ok(out)
    }

    fn gutt_engine(&self, depth: usize) -> Arc<GuttEngine> {
        let Backend::Gutt { algebra, engines } = &self.inner.backend else {
            unreachable!("gutt_engine on a non-Gutt product")
        };
        if let Some((_, e)) = engines.read().range(depth..).next() {
            return e.clone();
        }
        let mut engines = engines.write();
        let d = depth.max(4);
        engines
            .entry(d)
            .or_insert_with(|| Arc::new(GuttEngine::with_depth(algebra.clone(), d)))
            .clone()
    }

    fn twist_maps(&self, order: usize) -> Result<(OperatorSeries, OperatorSeries)> {
        let Backend::Twist { generator, inverted, inverse, .. } = &self.inner.backend else {
            unreachable!("twist_maps on a non-twist product")
        };
        let cached = inverse.read().as_ref().filter(|s| s.order() >= order).map(|s| s.with_order(order));
        let inv = match cached {
            Some(s) => s,
            None => {
                let s = generator.with_order(order).invert()?;
                *inverse.write() = Some(s.clone());
                s
            }
        };
        let t = generator.with_order(order);
        Ok(if *inverted { (inv, t) } else { (t, inv) })
    }

    /// `C_0(f, g), ..., C_order(f, g)`.
    pub fn cochains(&self, f: &Polynomial, g: &Polynomial, order: usize) -> Result<Vec<Polynomial>> {
        Error::check_dim(self.dim(), f.dim())?;
        Error::check_dim(self.dim(), g.dim())?;
        let n = self.dim();
        match &self.inner.backend {
            Backend::Moyal { .. } => {
                let mut out = Vec::with_capacity(order + 1);
                for r in 0..=order {
                    let mut acc = Polynomial::zero(n);
                    if f.degree().unwrap_or(0) >= r && g.degree().unwrap_or(0) >= r {
                        for (i_idx, row) in self.moyal_level(r).iter() {
                            let df = f.derivative_unchecked(i_idx);
                            if df.is_zero() {
                                continue;
                            }
                            for (j_idx, c) in row {
                                let dg = g.derivative_unchecked(j_idx);
                                if !dg.is_zero() {
                                    acc.add_scaled(&(&df * &dg), c);
                                }
                            }
                        }
                    }
                    out.push(acc);
                }
                Ok(out)
            }
            Backend::Gutt { .. } => self.gutt_engine(order).cochains(f, g, order),
            Backend::Twist { base, .. } => {
                let (inner, outer) = self.twist_maps(order)?;
                let prod = base.star_mul(&inner.apply(f)?, &inner.apply(g)?)?;
                Ok(outer.apply_series(&prod)?.into_coefficients())
            }
            Backend::Perturbed { base, corrections } => {
                let mut out = base.cochains(f, g, order)?;
                for (r, b) in corrections {
                    if *r <= order {
                        out[*r] += &b.apply(f, g)?;
                    }
                }
                Ok(out)
            }
        }
    }

    /// `C_r(f, g)`.
    pub fn cochain(&self, r: usize, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        Ok(self.cochains(f, g, r)?.swap_remove(r))
    }

    /// `f ∗ g` for polynomials, truncated at `ν^order`.
    pub fn star_mul_poly(&self, f: &Polynomial, g: &Polynomial, order: usize) -> Result<NuSeries> {
        NuSeries::from_coefficients(self.dim(), self.cochains(f, g, order)?)
    }

    /// `(a ∗ b)_t = Σ_{r+s+u=t} C_r(a_s, b_u)`.
    pub fn star_mul(&self, a: &NuSeries, b: &NuSeries) -> Result<NuSeries> {
        Error::check_dim(self.dim(), a.dim())?;
        Error::check_dim(self.dim(), b.dim())?;
        if a.order() != b.order() {
            return Err(Error::OrderMismatch { left: a.order(), right: b.order() });
        }
        let order = a.order();
        if let Backend::Twist { base, .. } = &self.inner.backend {
            let (inner, outer) = self.twist_maps(order)?;
            let prod = base.star_mul(&inner.apply_series(a)?, &inner.apply_series(b)?)?;
            return outer.apply_series(&prod);
        }
        let mut out = NuSeries::zero(self.dim(), order);
        for (s, fa) in a.coefficients().iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (u, gb) in b.coefficients().iter().enumerate().take(order + 1 - s) {
                if gb.is_zero() {
                    continue;
                }
                for (r, c) in self.cochains(fa, gb, order - s - u)?.iter().enumerate() {
                    *out.coefficient_mut(r + s + u) += c;
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for StarProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StarProduct({})", self.describe())
    }
}

pub fn star_mul(star: &StarProduct, a: &NuSeries, b: &NuSeries) -> Result<NuSeries> {
    star.star_mul(a, b)
}

/// Moyal cochain `C_r(f, g)` of a constant Poisson structure.
pub fn moyal_cochain(p: &PoissonStructure, r: usize, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    StarProduct::moyal(p.clone())?.cochain(r, f, g)
}

/// `f ∗' g = T⁻¹(T f ∗ T g)`.
pub fn apply_equivalence(t: &OperatorSeries, star: &StarProduct) -> Result<StarProduct> {
    StarProduct::twist(star, t)
}

/// Outcome of an associativity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociativityReport {
    pub order: usize,
    /// First order at which `(f∗g)∗h` and `f∗(g∗h)` differ, with the difference there.
    pub failure: Option<(usize, Polynomial)>,
}

impl AssociativityReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn check_associativity(
    star: &StarProduct,
    f: &Polynomial,
    g: &Polynomial,
    h: &Polynomial,
    order: usize,
) -> Result<AssociativityReport> {
    let lift = |p: &Polynomial| NuSeries::from_polynomial(p.clone(), order);
    let (f, g, h) = (lift(f), lift(g), lift(h));
    let left = star.star_mul(&star.star_mul(&f, &g)?, &h)?;
    let right = star.star_mul(&f, &star.star_mul(&g, &h)?)?;
    let diff = left.checked_sub(&right)?;
    let failure = diff.valuation().map(|r| (r, diff.coefficient(r).clone()));
    Ok(AssociativityReport { order, failure })
}

/// Violations of the unit, pointwise-leading-term, Poisson and finiteness axioms on one pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `C_0(f,g) = fg`, `C_r(1,f) = C_r(f,1) = 0` for `r >= 1`,
/// `C_1(f,g) - C_1(g,f) = 2 P(f,g)` and `C_r(f,g) = 0` for `r > deg f + deg g`.
pub fn check_axioms(star: &StarProduct, f: &Polynomial, g: &Polynomial, order: usize) -> Result<AxiomReport> {
    let mut report = AxiomReport::default();
    let n = star.dim();
    let top = f.degree().unwrap_or(0) + g.degree().unwrap_or(0);
    let order = order.max(1).max(top + 1);
    let fg = star.cochains(f, g, order)?;
    if fg[0] != f * g {
        report.failures.push(format!("C_0({f}, {g}) = {} is not the pointwise product", fg[0]));
    }
    let one = Polynomial::one(n);
    for (a, b) in [(&one, f), (f, &one)] {
        for (r, c) in star.cochains(a, b, order)?.iter().enumerate().skip(1) {
            if !c.is_zero() {
                report.failures.push(format!("C_{r}({a}, {b}) = {c} does not vanish"));
            }
        }
    }
    let gf = star.cochains(g, f, 1)?;
    let twice_bracket = star.poisson().bracket(f, g)?.scale(&Rational::from_integer(BigInt::from(2)));
    if &fg[1] - &gf[1] != twice_bracket {
        report.failures.push(format!("C_1({f}, {g}) - C_1({g}, {f}) differs from 2P"));
    }
    for (r, c) in fg.iter().enumerate().skip(top + 1) {
        if !c.is_zero() {
            report.failures.push(format!("C_{r}({f}, {g}) = {c} beyond total degree {top}"));
        }
    }
    Ok(report)
}

/// Result of the covariance check; witnesses are 1-based pairs with the residual
/// `x_i ∗ x_j - x_j ∗ x_i - 2ν Σ C_ij^k x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceReport {
    pub pass: bool,
    pub witnesses: Vec<(usize, usize, NuSeries)>,
}

pub fn check_covariance(star: &StarProduct, algebra: &LieAlgebra) -> Result<CovarianceReport> {
    let n = algebra.dim();
    Error::check_dim(star.dim(), n)?;
    let order = 2;
    let mut witnesses = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (xi, xj) = (Polynomial::var(n, i), Polynomial::var(n, j));
            let mut diff = star.star_mul_poly(&xi, &xj, order)?.checked_sub(&star.star_mul_poly(&xj, &xi, order)?)?;
            let bracket = algebra.bracket_basis(i, j).to_polynomial();
            *diff.coefficient_mut(1) -= &bracket.scale(&Rational::from_integer(BigInt::from(2)));
            if !diff.is_zero() {
                witnesses.push((i + 1, j + 1, diff));
            }
        }
    }
    Ok(CovarianceReport { pass: witnesses.is_empty(), witnesses })
}

/// Coefficient of `s^a t^b` in a polynomial whose last two variables are `s`, `t`.
fn st_coefficient(p: &Polynomial, a: u32, b: u32) -> Polynomial {
    let n = p.dim() - 2;
    let mut out = Polynomial::zero(n);
    for (m, c) in p.terms() {
        let e = m.exponents();
        if e[n] == a && e[n + 1] == b {
            out.add_term(MultiIndex::from_slice(&e[..n]), c.clone());
        }
    }
    out
}

/// A mismatch found by one of the identity checks below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityMismatch {
    pub label: String,
    pub lhs: Polynomial,
    pub rhs: Polynomial,
}

/// Outcome of an identity check over a range of indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub checked: usize,
    pub mismatch: Option<IdentityMismatch>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares the `s^a t^b` coefficients (`a + b <= max_st`) of `C_r(exp(sX), exp(tY))` and
/// `F_r(sX, tY) exp(sX + tY)` for `r <= order`.
pub fn check_chs(
    star: &StarProduct,
    algebra: &LieAlgebra,
    x: &LinearForm,
    y: &LinearForm,
    order: usize,
    max_st: usize,
) -> Result<IdentityReport> {
    let n = algebra.dim();
    Error::check_dim(star.dim(), n)?;
    let ctx = BchContext::new(algebra.clone()).with_max_order((order + 1).max(BchContext::DEFAULT_MAX_ORDER));
    let (xp, yp) = (x.to_polynomial(), y.to_polynomial());

    let mut z = vec![Polynomial::zero(n + 2)];
    for m in 1..=order {
        z.push(ctx.z_graded_polynomial(m, x, y)?);
    }
    let f_rec = f_series_recursive(&z, order);

    let mut s_var = vec![0u32; n + 2];
    s_var[n] = 1;
    let mut t_var = vec![0u32; n + 2];
    t_var[n + 1] = 1;
    let sx = xp.embed(n + 2).mul_truncated(&Polynomial::monomial(MultiIndex::from_slice(&s_var), Rational::one()), 0);
    let ty = yp.embed(n + 2).mul_truncated(&Polynomial::monomial(MultiIndex::from_slice(&t_var), Rational::one()), 0);
    let arg = &sx + &ty;
    let mut exp = Polynomial::zero(n + 2);
    let mut power = Polynomial::one(n + 2);
    for k in 0..=max_st {
        exp.add_scaled(&power, &Rational::new(BigInt::one(), factorial(k as u32)));
        power = &power * &arg;
    }

    let x_pows: Vec<Polynomial> = (0..=max_st as u32).map(|a| xp.pow(a)).collect();
    let y_pows: Vec<Polynomial> = (0..=max_st as u32).map(|b| yp.pow(b)).collect();
    let mut checked = 0;
    for (r, fr) in f_rec.iter().enumerate() {
        if fr != &f_series_explicit(&z, r) {
            return Err(Error::Internal(format!("F_{r} recursion and explicit sum disagree")));
        }
        let rhs_full = fr * &exp;
        for a in 0..=max_st {
            for b in 0..=max_st - a {
                let lhs = star
                    .cochain(r, &x_pows[a], &y_pows[b])?
                    .scale(&Rational::new(BigInt::one(), factorial(a as u32) * factorial(b as u32)));
                let rhs = st_coefficient(&rhs_full, a as u32, b as u32);
                checked += 1;
                if lhs != rhs {
                    return Ok(IdentityReport {
                        checked,
                        mismatch: Some(IdentityMismatch { label: format!("r={r}, s^{a} t^{b}"), lhs, rhs }),
                    });
                }
            }
        }
    }
    Ok(IdentityReport { checked, mismatch: None })
}

/// Checks `C_r(X, Y^m) = 2^r B_r / r! · m!/(m-r)! · (ad_Y)^r(X) · Y^{m-r}`.
pub fn check_eco(
    star: &StarProduct,
    algebra: &LieAlgebra,
    x: &LinearForm,
    y: &LinearForm,
    r: usize,
    m: usize,
) -> Result<IdentityReport> {
    if r > m {
        return Err(Error::InvalidArgument(format!("need r <= m, got r = {r}, m = {m}")));
    }
    Error::check_dim(star.dim(), algebra.dim())?;
    let yp = y.to_polynomial();
    let lhs = star.cochain(r, &x.to_polynomial(), &yp.pow(m as u32))?;
    let coeff = Rational::from_integer(BigInt::from(2).pow(r as u32))
        * BernoulliCache::global().get(r)
        * Rational::new(factorial(m as u32), factorial(r as u32) * factorial((m - r) as u32));
    let rhs = (&ad_power(algebra, y, r, x).to_polynomial() * &yp.pow((m - r) as u32)).scale(&coeff);
    let mismatch = (lhs != rhs).then(|| IdentityMismatch { label: format!("r={r}, m={m}"), lhs, rhs });
    Ok(IdentityReport { checked: 1, mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::DiffOp;
    use crate::poly::{int, rat};

    fn plane() -> StarProduct {
        StarProduct::moyal(PoissonStructure::symplectic(2).unwrap()).unwrap()
    }

    fn v(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn moyal_examples() {
        let s = plane();
        let (x1, x2) = (v(2, 0), v(2, 1));
        assert_eq!(s.star_mul_poly(&x1, &x2, 3).unwrap().to_string(), "x1*x2 + nu");
        let p = s.star_mul_poly(&x1.pow(2), &x2.pow(2), 3).unwrap();
        assert_eq!(p.to_string(), "x1^2*x2^2 + 4*x1*x2*nu + 2*nu^2");
        assert!(s.cochain(3, &x1.pow(2), &x2.pow(5)).unwrap().is_zero());
        let comm = s
            .star_mul_poly(&x1, &x2, 2)
            .unwrap()
            .checked_sub(&s.star_mul_poly(&x2, &x1, 2).unwrap())
            .unwrap();
        assert_eq!(comm.to_string(), "2*nu");
    }

    #[test]
    fn moyal_rejects_nonconstant() {
        assert!(matches!(
            StarProduct::moyal(LieAlgebra::heisenberg().poisson()),
            Err(Error::NonConstantPoisson)
        ));
    }

    #[test]
    fn unit_series() {
        let s = StarProduct::gutt(LieAlgebra::su2());
        let f = NuSeries::from_polynomial(&v(3, 0).pow(2) + &v(3, 2), 3);
        let one = NuSeries::one(3, 3);
        assert_eq!(s.star_mul(&one, &f).unwrap(), f);
        assert_eq!(s.star_mul(&f, &one).unwrap(), f);
    }

    #[test]
    fn covariance_examples() {
        for alg in [LieAlgebra::heisenberg(), LieAlgebra::su2()] {
            assert!(check_covariance(&StarProduct::gutt(alg.clone()), &alg).unwrap().pass);
        }
        let ab = LieAlgebra::abelian(2);
        assert!(check_covariance(&StarProduct::pointwise(2), &ab).unwrap().pass);
        let report = check_covariance(&StarProduct::gutt(LieAlgebra::heisenberg()), &LieAlgebra::su2()).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn twist_first_order() {
        let s = plane();
        let d = DiffOp::partial(&[2, 0]);
        let t = OperatorSeries::from_higher(2, vec![d.clone()]).unwrap();
        let tw = apply_equivalence(&t, &s).unwrap();
        let (f, g) = (&v(2, 0).pow(3) + &v(2, 1), &v(2, 0).pow(2) * &v(2, 1));
        let expected = &(&(&s.cochain(1, &f, &g).unwrap() + &(&d.apply(&f).unwrap() * &g))
            + &(&f * &d.apply(&g).unwrap()))
            - &d.apply(&(&f * &g)).unwrap();
        assert_eq!(tw.cochain(1, &f, &g).unwrap(), expected);
        let anti = &tw.cochain(1, &f, &g).unwrap() - &tw.cochain(1, &g, &f).unwrap();
        assert_eq!(anti, s.poisson().bracket(&f, &g).unwrap().scale(&int(2)));
        let id = apply_equivalence(&OperatorSeries::identity(2, 2), &s).unwrap();
        assert_eq!(id.cochains(&f, &g, 4).unwrap(), s.cochains(&f, &g, 4).unwrap());
    }

    #[test]
    fn associativity_and_corruption() {
        let s = plane();
        let (x1, x2) = (v(2, 0), v(2, 1));
        let f = &x1.pow(2) + &x2;
        let g = &x1 * &x2.pow(2);
        let h = &x2.pow(3) - &x1;
        assert!(check_associativity(&s, &f, &g, &h, 5).unwrap().passed());
        let mut bad = BiDiffOp::zero(2);
        bad.add_term(MultiIndex::unit(2, 0), MultiIndex::unit(2, 0), &Polynomial::one(2));
        let corrupted = StarProduct::perturbed(&s, vec![(2, bad)]).unwrap();
        let report = check_associativity(&corrupted, &x1.pow(2), &x1, &x2, 4).unwrap();
        let (r, residual) = report.failure.expect("corruption is detected");
        assert!(r <= 3 && !residual.is_zero());
    }

    #[test]
    fn axioms_hold() {
        let h = StarProduct::gutt(LieAlgebra::heisenberg());
        let f = &v(3, 0).pow(2) + &v(3, 2);
        let g = &v(3, 1) * &v(3, 0);
        assert!(check_axioms(&h, &f, &g, 3).unwrap().passed());
        assert!(check_axioms(&plane(), &v(2, 0).pow(2), &v(2, 1), 2).unwrap().passed());
    }

    #[test]
    fn eco_and_chs_examples() {
        let alg = LieAlgebra::heisenberg();
        let s = StarProduct::gutt(alg.clone());
        let x = LinearForm::basis(3, 0);
        let y = LinearForm::basis(3, 1);
        for m in 0..5 {
            for r in 0..=m.min(3) {
                assert!(check_eco(&s, &alg, &x, &y, r, m).unwrap().passed(), "r={r} m={m}");
            }
        }
        assert!(check_chs(&s, &alg, &x, &y, 2, 4).unwrap().passed());
        let ab = LieAlgebra::abelian(2);
        let p = StarProduct::gutt(ab.clone());
        let xa = LinearForm::new(vec![int(1), rat(1, 2)]);
        assert!(check_chs(&p, &ab, &xa, &LinearForm::basis(2, 1), 2, 3).unwrap().passed());
        assert!(check_eco(&s, &alg, &x, &y, 3, 2).is_err());
    }
}
