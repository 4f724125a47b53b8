//! Sun-products: factor each monomial into linear factors, multiply the factors with a
//! star-product in every order and average. The `ν`-coefficients of the result are the
//! cochains `ρ_r`, which are reconstructed here as differential operators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use parking_lot::RwLock;

use crate::diffop::{fit_diffop, DiffOp, FitOptions, OperatorSeries};
use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial, Rational};
use crate::series::NuSeries;
use crate::star::StarProduct;

/// Multiplicities of the linear factors `x_i` of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FactorMultiset {
    counts: MultiIndex,
}

impl FactorMultiset {
    pub fn new(counts: MultiIndex) -> Self {
        FactorMultiset { counts }
    }

    pub fn counts(&self) -> &MultiIndex {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.degree()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_zero()
    }

    /// The factors as a word of 0-based variable indices, in increasing order.
    pub fn factors(&self) -> Vec<usize> {
        self.counts
            .exponents()
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect()
    }
}

pub fn lambda_factor(monomial: &MultiIndex) -> FactorMultiset {
    FactorMultiset::new(monomial.clone())
}

/// The sun-product of a star-product at a fixed truncation order.
pub struct SunProduct {
    star: StarProduct,
    order: usize,
    memo: RwLock<HashMap<MultiIndex, Arc<NuSeries>>>,
}

impl SunProduct {
    pub fn new(star: StarProduct, order: usize) -> Self {
        SunProduct { star, order, memo: RwLock::new(HashMap::new()) }
    }

    pub fn star(&self) -> &StarProduct {
        &self.star
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.star.dim()
    }

    /// `(1/k!) Σ_σ f_{σ(1)} ∗ ... ∗ f_{σ(k)}`, computed as
    /// `value(K) = (1/k) Σ_i K_i x_i ∗ value(K - e_i)`.
    pub fn symmetrized(&self, factors: &FactorMultiset) -> Result<Arc<NuSeries>> {
        let k = factors.counts();
        Error::check_dim(self.dim(), k.dim())?;
        if let Some(v) = self.memo.read().get(k) {
            return Ok(v.clone());
        }
        let n = self.dim();
        let deg = k.degree();
        let value = if deg <= 1 {
            NuSeries::from_polynomial(Polynomial::monomial(k.clone(), Rational::one()), self.order)
        } else {
            let mut acc = NuSeries::zero(n, self.order);
            for (i, &ki) in k.exponents().iter().enumerate() {
                if ki == 0 {
                    continue;
                }
                let rest = self.symmetrized(&FactorMultiset::new(k.with_decremented(i).expect("K_i > 0")))?;
                let xi = NuSeries::from_polynomial(Polynomial::var(n, i), self.order);
                acc.add_scaled(&self.star.star_mul(&xi, &rest)?, &Rational::from_integer(BigInt::from(ki)))?;
            }
            acc.scale(&Rational::new(BigInt::one(), BigInt::from(deg)))
        };
        let value = Arc::new(value);
        Ok(self.memo.write().entry(k.clone()).or_insert(value).clone())
    }

    /// `T_∗(λ(p))`, extended linearly over the monomials of `p`.
    pub fn apply(&self, p: &Polynomial) -> Result<NuSeries> {
        Error::check_dim(self.dim(), p.dim())?;
        let mut out = NuSeries::zero(self.dim(), self.order);
        for (m, c) in p.terms() {
            out.add_scaled(&*self.symmetrized(&lambda_factor(m))?, c)?;
        }
        Ok(out)
    }

    /// `f ⊙ g = T_∗(λ(π(f) π(g)))`.
    pub fn mul(&self, f: &NuSeries, g: &NuSeries) -> Result<NuSeries> {
        Error::check_dim(self.dim(), f.dim())?;
        Error::check_dim(self.dim(), g.dim())?;
        self.apply(&(f.coefficient(0) * g.coefficient(0)))
    }
}

impl fmt::Debug for SunProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SunProduct({}, order {})", self.star.describe(), self.order)
    }
}

pub fn symmetrized_star(star: &StarProduct, factors: &FactorMultiset, order: usize) -> Result<NuSeries> {
    Ok(SunProduct::new(star.clone(), order).symmetrized(factors)?.as_ref().clone())
}

pub fn sun_mul(sun: &SunProduct, f: &NuSeries, g: &NuSeries) -> Result<NuSeries> {
    sun.mul(f, g)
}

/// Raw table `ρ_r(x^K)` for `1 <= r <= order`, `|K| <= degree`, and, once reconstructed,
/// the operators `ρ_1..ρ_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SunCochains {
    dim: usize,
    order: usize,
    degree: usize,
    table: BTreeMap<MultiIndex, Vec<Polynomial>>,
    rho: Vec<DiffOp>,
}

impl SunCochains {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `ρ_r(x^K)` from the table (`r >= 1`).
    pub fn value(&self, r: usize, k: &MultiIndex) -> Option<&Polynomial> {
        if r == 0 || r > self.order {
            return None;
        }
        self.table.get(k).map(|v| &v[r - 1])
    }

    pub fn table(&self) -> impl Iterator<Item = (&MultiIndex, &[Polynomial])> + '_ {
        self.table.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Nonzero entries `(r, K, ρ_r(x^K))`.
    pub fn nonzero_entries(&self) -> Vec<(usize, &MultiIndex, &Polynomial)> {
        let mut out = Vec::new();
        for r in 1..=self.order {
            for (k, v) in &self.table {
                if !v[r - 1].is_zero() {
                    out.push((r, k, &v[r - 1]));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.table.values().all(|v| v.iter().all(Polynomial::is_zero))
    }

    /// Reconstructed operators `ρ_1, ..., ρ_k` (empty before reconstruction).
    pub fn operators(&self) -> &[DiffOp] {
        &self.rho
    }

    /// Records the next reconstructed operator `ρ_{k+1}`.
    pub fn push_operator(&mut self, op: DiffOp) -> Result<()> {
        Error::check_dim(self.dim, op.dim())?;
        if self.rho.len() >= self.order {
            return Err(Error::InvalidArgument(format!("all {} cochains are already reconstructed", self.order)));
        }
        self.rho.push(op);
        Ok(())
    }

    /// `I + Σ ν^r ρ_r` from the reconstructed operators.
    pub fn operator_series(&self) -> Result<OperatorSeries> {
        if self.rho.len() < self.order {
            return Err(Error::MissingCochain(self.rho.len() + 1));
        }
        OperatorSeries::from_higher(self.dim, self.rho.clone())
    }
}

pub fn extract_sun_cochains(sun: &SunProduct, degree: usize) -> Result<SunCochains> {
    let n = sun.dim();
    let order = sun.order();
    let mut table = BTreeMap::new();
    for k in MultiIndex::all_up_to_degree(n, degree) {
        let v = sun.symmetrized(&lambda_factor(&k))?;
        table.insert(k, v.coefficients()[1..].to_vec());
    }
    Ok(SunCochains { dim: n, order, degree, table, rho: Vec::new() })
}

/// Builds `ρ_r` from the star-product cochains and `ρ_1..ρ_{r-1}` (already in `cochains`).
///
/// With `φ_r(f, g) = -C_r(f, g) - Σ_{a+b=r, a,b>=1} C_a(f, ρ_b(g))`, the operators
/// `g ↦ φ_r(x_i, g) = Σ_J φ^{i,J} ∂_J g` are fitted on monomials of degree `< degree` and
/// `ρ_r = -Σ_{i,J} φ^{i,J} / (|J| + 1) ∂_{J + e_i}`. The result is compared with the table
/// on every monomial of degree `<= degree`.
pub fn reconstruct_cochain_diffop(
    star: &StarProduct,
    cochains: &SunCochains,
    r: usize,
    degree: usize,
) -> Result<DiffOp> {
    let n = star.dim();
    Error::check_dim(n, cochains.dim())?;
    if r == 0 || r > cochains.order() {
        return Err(Error::InvalidArgument(format!("cochain index {r} outside 1..={}", cochains.order())));
    }
    if cochains.operators().len() < r - 1 {
        return Err(Error::MissingCochain(cochains.operators().len() + 1));
    }
    if degree > cochains.degree() {
        return Err(Error::InvalidArgument(format!(
            "reconstruction degree {degree} exceeds the table degree {}",
            cochains.degree()
        )));
    }
    let rho = cochains.operators();
    let fit_degree = degree.saturating_sub(1);
    let mut out = DiffOp::zero(n);
    for i in 0..n {
        let xi = Polynomial::var(n, i);
        let probe = |g: &Polynomial| -> Result<Polynomial> {
            let c = star.cochains(&xi, g, r)?;
            let mut phi = -&c[r];
            for a in 1..r {
                let rg = rho[r - a - 1].apply(g)?;
                if !rg.is_zero() {
                    phi -= &star.cochain(a, &xi, &rg)?;
                }
            }
            Ok(phi)
        };
        let fitted = fit_diffop(n, probe, FitOptions::new(fit_degree, fit_degree))?;
        for (j, coeff) in fitted.terms() {
            let w = Rational::new(-BigInt::one(), BigInt::from(j.degree() + 1));
            out.add_term(j.with_incremented(i), &coeff.scale(&w));
        }
    }
    for (k, values) in cochains.table() {
        if k.degree() > degree {
            continue;
        }
        let xk = Polynomial::monomial(k.clone(), Rational::one());
        if out.apply(&xk)? != values[r - 1] {
            return Err(Error::ReconstructionMismatch { order: r, monomial: k.clone() });
        }
    }
    Ok(out)
}

/// Extracts the table up to `degree` and reconstructs `ρ_1..ρ_R` in turn.
pub fn reconstruct_sun_cochains(sun: &SunProduct, degree: usize) -> Result<SunCochains> {
    let mut cochains = extract_sun_cochains(sun, degree)?;
    for r in 1..=sun.order() {
        let op = reconstruct_cochain_diffop(sun.star(), &cochains, r, degree)?;
        cochains.rho.push(op);
    }
    Ok(cochains)
}

/// Per-order outcome of reconstructing at one degree and refitting at a higher one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefitEntry {
    pub order: usize,
    pub operator: Option<DiffOp>,
    pub refit: Option<DiffOp>,
    pub matches_table: bool,
    pub stable: bool,
}

/// Reconstructs `ρ_1..ρ_R` from degree-`degree` data and again from degree-`refit_degree`
/// data. Entries stop at the first order whose reconstruction fails.
pub fn check_reconstruction(star: &StarProduct, order: usize, degree: usize, refit_degree: usize) -> Result<Vec<RefitEntry>> {
    let sun = SunProduct::new(star.clone(), order);
    let low = reconstruct_partial(&sun, degree)?;
    let high = reconstruct_partial(&sun, refit_degree)?;
    let mut out = Vec::new();
    for r in 1..=order {
        let operator = low.operators().get(r - 1).cloned();
        let refit = high.operators().get(r - 1).cloned();
        let matches_table = operator.is_some();
        let stable = matches_table && operator == refit;
        out.push(RefitEntry { order: r, operator, refit, matches_table, stable });
    }
    Ok(out)
}

/// Like [`reconstruct_sun_cochains`] but keeps the orders reconstructed before a mismatch.
fn reconstruct_partial(sun: &SunProduct, degree: usize) -> Result<SunCochains> {
    let mut cochains = extract_sun_cochains(sun, degree)?;
    for r in 1..=sun.order() {
        match reconstruct_cochain_diffop(sun.star(), &cochains, r, degree) {
            Ok(op) => cochains.rho.push(op),
            Err(Error::ReconstructionMismatch { .. }) | Err(Error::FitResidual { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(cochains)
}

/// `δρ_1(f, g) - (P(f, g) - C_1(f, g))`; zero when the identity holds.
pub fn lemma3_residual(star: &StarProduct, rho1: &DiffOp, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    let delta = &(&(f * &rho1.apply(g)?) - &rho1.apply(&(f * g))?) + &(&rho1.apply(f)? * g);
    let rhs = &star.poisson().bracket(f, g)? - &star.cochain(1, f, g)?;
    Ok(&delta - &rhs)
}

/// Membership in `E(P)` on the probed range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpReport {
    pub in_ep: bool,
    /// First nonzero table entry `(r, K, ρ_r(x^K))`.
    pub witness: Option<(usize, MultiIndex, Polynomial)>,
}

#[allow(non_snake_case)]
pub fn check_in_EP(star: &StarProduct, order: usize, degree: usize) -> Result<EpReport> {
    let table = extract_sun_cochains(&SunProduct::new(star.clone(), order), degree)?;
    let witness = table.nonzero_entries().first().map(|(r, k, v)| (*r, (*k).clone(), (*v).clone()));
    Ok(EpReport { in_ep: witness.is_none(), witness })
}

/// `T = I + Σ ν^r ρ_r` and the equivalent product `f ∗' g = T⁻¹(T f ∗ T g)` in `E(P)`.
#[allow(non_snake_case)]
pub fn equivalence_to_EP(star: &StarProduct, order: usize, degree: usize) -> Result<(OperatorSeries, StarProduct)> {
    let cochains = reconstruct_sun_cochains(&SunProduct::new(star.clone(), order), degree)?;
    let t = cochains.operator_series()?;
    let twisted = StarProduct::twist(star, &t)?;
    Ok((t, twisted))
}

fn check_vanishes_on_linear(op: &DiffOp) -> Result<()> {
    if !op.is_null_on_constants() {
        return Err(Error::NotNullOnConstants);
    }
    let n = op.dim();
    for i in 0..n {
        if !op.apply(&Polynomial::var(n, i))?.is_zero() {
            return Err(Error::NotNullOnLinear(format!("x{}", i + 1)));
        }
    }
    Ok(())
}

/// A star-product whose sun cochains are the given `η_1, η_2, ...`: the twist of `base`
/// by `(I + Σ ν^i η_i)⁻¹`.
pub fn build_star_with_cochains(base: &StarProduct, etas: &[DiffOp], order: usize) -> Result<StarProduct> {
    for eta in etas {
        Error::check_dim(base.dim(), eta.dim())?;
        check_vanishes_on_linear(eta)?;
    }
    let mut higher: Vec<DiffOp> = etas.iter().take(order).cloned().collect();
    higher.resize(order, DiffOp::zero(base.dim()));
    let t = OperatorSeries::from_higher(base.dim(), higher)?;
    StarProduct::twist_inverse(base, &t)
}

/// `S = (I + Σ ν^r ρ_r)⁻¹`, so that `S(f ⊙ g) = π(f) π(g)`.
pub fn weak_trivializer(sun: &SunProduct, degree: usize) -> Result<OperatorSeries> {
    reconstruct_sun_cochains(sun, degree)?.operator_series()?.invert()
}

/// A failing monomial pair of a pairwise check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairFailure {
    pub order: usize,
    pub f: Polynomial,
    pub g: Polynomial,
    pub lhs: Polynomial,
    pub rhs: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub checked: usize,
    pub failure: Option<PairFailure>,
}

impl PairReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Runs `check` on monomial pairs `(x^I, x^J)` with `|I| + |J| <= degree`, comparing two
/// series order by order.
fn check_pairs<F>(dim: usize, degree: usize, mut check: F) -> Result<PairReport>
where
    F: FnMut(&Polynomial, &Polynomial) -> Result<(NuSeries, NuSeries)>,
{
    let monomials = MultiIndex::all_up_to_degree(dim, degree);
    let mut checked = 0;
    for i in &monomials {
        for j in &monomials {
            if i.degree() + j.degree() > degree {
                continue;
            }
            let f = Polynomial::monomial(i.clone(), Rational::one());
            let g = Polynomial::monomial(j.clone(), Rational::one());
            let (lhs, rhs) = check(&f, &g)?;
            checked += 1;
            if let Some(t) = lhs.checked_sub(&rhs)?.valuation() {
                let failure = PairFailure {
                    order: t,
                    f,
                    g,
                    lhs: lhs.coefficient(t).clone(),
                    rhs: rhs.coefficient(t).clone(),
                };
                return Ok(PairReport { checked, failure: Some(failure) });
            }
        }
    }
    Ok(PairReport { checked, failure: None })
}

/// `S(f ⊙_A g) = f ⊙_B g` on monomial pairs.
pub fn check_weak_equivalence(a: &SunProduct, b: &SunProduct, s: &OperatorSeries, degree: usize) -> Result<PairReport> {
    Error::check_dim(a.dim(), b.dim())?;
    let order = a.order().min(b.order());
    let s = s.with_order(order);
    check_pairs(a.dim(), degree, |f, g| {
        let fg = f * g;
        let lhs = s.apply_series(&a.apply(&fg)?.retruncate(order))?;
        let rhs = b.apply(&fg)?.retruncate(order);
        Ok((lhs, rhs))
    })
}

/// `Σ_{r+s=t} S_r(ρ_s(fg)) = Σ_{r+a+b=t} ρ'_r(S_a(f) S_b(g))` on monomial pairs.
pub fn check_strong_equivalence(
    a: &SunProduct,
    b: &SunProduct,
    s: &OperatorSeries,
    order: usize,
    degree: usize,
) -> Result<PairReport> {
    Error::check_dim(a.dim(), b.dim())?;
    if a.order() < order || b.order() < order {
        return Err(Error::OrderMismatch { left: a.order().min(b.order()), right: order });
    }
    let n = a.dim();
    let s = s.with_order(order);
    check_pairs(n, degree, |f, g| {
        let lhs = s.apply_series(&a.apply(&(f * g))?.retruncate(order))?;
        let sf = s.apply(f)?;
        let sg = s.apply(g)?;
        let mut rhs = NuSeries::zero(n, order);
        for (p, fa) in sf.coefficients().iter().enumerate() {
            for (q, gb) in sg.coefficients().iter().enumerate().take(order + 1 - p) {
                let prod = fa * gb;
                if prod.is_zero() {
                    continue;
                }
                let part = b.apply(&prod)?.retruncate(order).shift(p + q);
                rhs.add_scaled(&part, &Rational::one())?;
            }
        }
        Ok((lhs, rhs))
    })
}

/// `S(fg) = S(f) S(g)` through `ν^order` on monomial pairs.
pub fn check_strong_multiplicativity(s: &OperatorSeries, order: usize, degree: usize) -> Result<PairReport> {
    let s = s.with_order(order);
    check_pairs(s.dim(), degree, |f, g| {
        let lhs = s.apply(&(f * g))?;
        let rhs = s.apply(f)?.mul(&s.apply(g)?)?;
        Ok((lhs, rhs))
    })
}
