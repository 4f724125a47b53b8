//! The universal enveloping algebra `U(g)` in its ordered PBW basis, the symmetrization
//! map `φ: S(g) → U(g)` and Gutt's star-product cochains.
//!
//! PBW elements are stored as polynomials: the monomial `x^M` stands for the ordered
//! product `e_1^{m_1} ... e_n^{m_n}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::poly::{write_term, MultiIndex, Polynomial, Rational};

/// Element of `U(g)` in normal-ordered PBW form.
#[derive(Clone, PartialEq, Eq)]
pub struct PbwElement {
    coeffs: Polynomial,
}

impl PbwElement {
    pub fn zero(dim: usize) -> Self {
        PbwElement { coeffs: Polynomial::zero(dim) }
    }

    pub fn one(dim: usize) -> Self {
        PbwElement { coeffs: Polynomial::one(dim) }
    }

    /// The ordered monomial `e^M`.
    pub fn basis(m: MultiIndex) -> Self {
        PbwElement { coeffs: Polynomial::monomial(m, Rational::one()) }
    }

    /// The generator `e_{i+1}`.
    pub fn generator(dim: usize, i: usize) -> Self {
        Self::basis(MultiIndex::unit(dim, i))
    }

    /// Reinterprets a polynomial's monomials as ordered PBW monomials.
    pub fn from_ordered(coeffs: Polynomial) -> Self {
        PbwElement { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Rational {
        self.coeffs.coefficient(m)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> + '_ {
        self.coeffs.terms()
    }

    /// Coefficients as a polynomial in the commuting variables `x_i ↔ e_i`.
    pub fn as_ordered(&self) -> &Polynomial {
        &self.coeffs
    }

    pub fn scale(&self, c: &Rational) -> PbwElement {
        PbwElement { coeffs: self.coeffs.scale(c) }
    }
}

impl std::ops::Add for &PbwElement {
    type Output = PbwElement;
    fn add(self, rhs: &PbwElement) -> PbwElement {
        PbwElement { coeffs: &self.coeffs + &rhs.coeffs }
    }
}

impl std::ops::Sub for &PbwElement {
    type Output = PbwElement;
    fn sub(self, rhs: &PbwElement) -> PbwElement {
        PbwElement { coeffs: &self.coeffs - &rhs.coeffs }
    }
}

impl fmt::Display for PbwElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.coeffs.terms().rev() {
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("e{}", i + 1) } else { format!("e{}^{}", i + 1, k) })
                .collect();
            write_term(f, c, &factors, first)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PbwElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PbwElement({self})")
    }
}

type Memo<K> = RwLock<HashMap<K, Arc<Polynomial>>>;

fn memo_get<K: Eq + Hash>(memo: &Memo<K>, key: &K) -> Option<Arc<Polynomial>> {
    memo.read().get(key).cloned()
}

fn memo_put<K: Eq + Hash>(memo: &Memo<K>, key: K, value: Polynomial) -> Arc<Polynomial> {
    let value = Arc::new(value);
    memo.write().entry(key).or_insert(value).clone()
}

/// Memoized rewriting engine for one Lie algebra.
///
/// With a finite `depth`, every memoized quantity whose top degree is `t` keeps only
/// the components of degree `>= t - depth`. All maps involved lower degree by at most
/// their nominal shift, so the retained components are exact; this is all that is
/// needed for cochains `C_r` with `r <= depth`.
pub struct GuttEngine {
    algebra: LieAlgebra,
    depth: Option<usize>,
    left_gen: Memo<(usize, MultiIndex)>,
    sym: Memo<MultiIndex>,
    inv: Memo<MultiIndex>,
    left_sym: Memo<(usize, MultiIndex)>,
    product: Memo<(MultiIndex, MultiIndex)>,
}

impl GuttEngine {
    /// Engine keeping every degree component.
    pub fn exact(algebra: LieAlgebra) -> Self {
        Self::build(algebra, None)
    }

    /// Engine sufficient for cochains `C_r` with `r <= depth`.
    pub fn with_depth(algebra: LieAlgebra, depth: usize) -> Self {
        Self::build(algebra, Some(depth))
    }

    fn build(algebra: LieAlgebra, depth: Option<usize>) -> Self {
        GuttEngine {
            algebra,
            depth,
            left_gen: RwLock::default(),
            sym: RwLock::default(),
            inv: RwLock::default(),
            left_sym: RwLock::default(),
            product: RwLock::default(),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn depth(&self) -> Option<usize> {
        self.depth
    }

    fn dim(&self) -> usize {
        self.algebra.dim()
    }

    fn keep(&self, mut p: Polynomial, top: usize) -> Polynomial {
        if let Some(d) = self.depth {
            p.truncate_below(top.saturating_sub(d));
        }
        p
    }

    /// `e_i · e^M` in normal order, using `e_i e_j = e_j e_i + Σ_l C_ij^l e_l` for `i > j`.
    fn left_gen(&self, i: usize, m: &MultiIndex) -> Arc<Polynomial> {
        let key = (i, m.clone());
        if let Some(v) = memo_get(&self.left_gen, &key) {
            return v;
        }
        let n = self.dim();
        let value = match m.first_variable() {
            Some(j) if j < i => {
                let rest = m.with_decremented(j).expect("j occurs in M");
                let inner = self.left_gen(i, &rest);
                let mut out = self.left_mul_gen(j, &inner);
                for l in 0..n {
                    let c = self.algebra.structure_constant(i, j, l);
                    if !c.is_zero() {
                        out.add_scaled(&self.left_gen(l, &rest), c);
                    }
                }
                self.keep(out, m.degree() + 1)
            }
            _ => Polynomial::monomial(m.with_incremented(i), Rational::one()),
        };
        memo_put(&self.left_gen, key, value)
    }

    /// `e_i · u` for a normal-ordered `u`.
    fn left_mul_gen(&self, i: usize, u: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.dim());
        for (m, c) in u.terms() {
            out.add_scaled(&self.left_gen(i, m), c);
        }
        out
    }

    /// `φ(x^K)` in normal order, via `φ(x^K) = (1/k) Σ_i K_i e_i φ(x^{K - e_i})`.
    fn sym(&self, k: &MultiIndex) -> Arc<Polynomial> {
        if let Some(v) = memo_get(&self.sym, k) {
            return v;
        }
        let n = self.dim();
        let deg = k.degree();
        let value = if deg == 0 {
            Polynomial::one(n)
        } else {
            let mut out = Polynomial::zero(n);
            for (i, &ki) in k.exponents().iter().enumerate() {
                if ki == 0 {
                    continue;
                }
                let rest = k.with_decremented(i).expect("K_i > 0");
                let part = self.left_mul_gen(i, &self.sym(&rest));
                out.add_scaled(&part, &Rational::from_integer(BigInt::from(ki)));
            }
            let out = out.scale(&Rational::new(BigInt::one(), BigInt::from(deg)));
            self.keep(out, deg)
        };
        memo_put(&self.sym, k.clone(), value)
    }

    /// `φ⁻¹(e^M)`. The top component of `φ(x^M)` is exactly `e^M`, so
    /// `φ⁻¹(e^M) = x^M - Σ_{M' ≠ M} [φ(x^M)]_{M'} φ⁻¹(e^{M'})`.
    fn inv(&self, m: &MultiIndex) -> Arc<Polynomial> {
        if let Some(v) = memo_get(&self.inv, m) {
            return v;
        }
        let sym = self.sym(m);
        let mut out = Polynomial::monomial(m.clone(), Rational::one());
        for (mm, c) in sym.terms() {
            if mm != m {
                out.add_scaled(&self.inv(mm), &-c);
            }
        }
        let value = self.keep(out, m.degree());
        memo_put(&self.inv, m.clone(), value)
    }

    /// `φ⁻¹(u)` for a normal-ordered `u`.
    fn unsymmetrize(&self, u: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.dim());
        for (m, c) in u.terms() {
            out.add_scaled(&self.inv(m), c);
        }
        out
    }

    /// `φ⁻¹(e_i · φ(x^M))`.
    fn left_sym(&self, i: usize, m: &MultiIndex) -> Arc<Polynomial> {
        let key = (i, m.clone());
        if let Some(v) = memo_get(&self.left_sym, &key) {
            return v;
        }
        let u = self.left_mul_gen(i, &self.sym(m));
        let value = self.keep(self.unsymmetrize(&u), m.degree() + 1);
        memo_put(&self.left_sym, key, value)
    }

    /// `φ⁻¹(φ(x^I) φ(x^J))`, peeling one generator off `φ(x^I)` at a time.
    pub fn symmetric_product(&self, i: &MultiIndex, j: &MultiIndex) -> Arc<Polynomial> {
        let key = (i.clone(), j.clone());
        if let Some(v) = memo_get(&self.product, &key) {
            return v;
        }
        let n = self.dim();
        let deg = i.degree();
        let value = if deg == 0 {
            Polynomial::monomial(j.clone(), Rational::one())
        } else {
            let mut out = Polynomial::zero(n);
            for (v, &iv) in i.exponents().iter().enumerate() {
                if iv == 0 {
                    continue;
                }
                let rest = i.with_decremented(v).expect("I_v > 0");
                let w = Rational::from_integer(BigInt::from(iv));
                for (m, c) in self.symmetric_product(&rest, j).terms() {
                    out.add_scaled(&self.left_sym(v, m), &(c * &w));
                }
            }
            let out = out.scale(&Rational::new(BigInt::one(), BigInt::from(deg)));
            self.keep(out, deg + j.degree())
        };
        memo_put(&self.product, key, value)
    }

    fn check_depth(&self, r: usize) -> Result<()> {
        match self.depth {
            Some(d) if r > d => Err(Error::InvalidArgument(format!(
                "cochain order {r} exceeds engine depth {d}"
            ))),
            _ => Ok(()),
        }
    }

    /// `C_r(x^I, x^J) = 2^r [φ⁻¹(φ(x^I) φ(x^J))]_{|I|+|J|-r}`.
    pub fn monomial_cochain(&self, r: usize, i: &MultiIndex, j: &MultiIndex) -> Result<Polynomial> {
        self.check_depth(r)?;
        let top = i.degree() + j.degree();
        if r > top {
            return Ok(Polynomial::zero(self.dim()));
        }
        let p = self.symmetric_product(i, j).homogeneous(top - r);
        Ok(p.scale(&Rational::from_integer(BigInt::from(2).pow(r as u32))))
    }

    /// `C_r(f, g)` extended bilinearly.
    pub fn cochain(&self, r: usize, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        Error::check_dim(self.dim(), f.dim())?;
        Error::check_dim(self.dim(), g.dim())?;
        self.check_depth(r)?;
        let mut out = Polynomial::zero(self.dim());
        for (mi, a) in f.terms() {
            for (mj, b) in g.terms() {
                if mi.degree() + mj.degree() < r {
                    continue;
                }
                out.add_scaled(&self.monomial_cochain(r, mi, mj)?, &(a * b));
            }
        }
        Ok(out)
    }

    /// All cochains `C_0..=C_order` on `(f, g)`, sharing the symmetric products.
    pub fn cochains(&self, f: &Polynomial, g: &Polynomial, order: usize) -> Result<Vec<Polynomial>> {
        Error::check_dim(self.dim(), f.dim())?;
        Error::check_dim(self.dim(), g.dim())?;
        self.check_depth(order)?;
        let n = self.dim();
        let mut out = vec![Polynomial::zero(n); order + 1];
        for (mi, a) in f.terms() {
            for (mj, b) in g.terms() {
                let top = mi.degree() + mj.degree();
                let prod = self.symmetric_product(mi, mj);
                let ab = a * b;
                let mut scale = ab.clone();
                for (r, slot) in out.iter_mut().enumerate().take(top.min(order) + 1) {
                    if r > 0 {
                        scale *= Rational::from_integer(BigInt::from(2));
                    }
                    slot.add_scaled(&prod.homogeneous(top - r), &scale);
                }
            }
        }
        Ok(out)
    }

    /// `φ(p)` in normal order.
    pub fn symmetrize(&self, p: &Polynomial) -> PbwElement {
        let mut out = Polynomial::zero(self.dim());
        for (m, c) in p.terms() {
            out.add_scaled(&self.sym(m), c);
        }
        PbwElement { coeffs: out }
    }

    /// `φ⁻¹(u)` through the memoized inverse basis.
    pub fn unsymmetrize_element(&self, u: &PbwElement) -> Polynomial {
        self.unsymmetrize(&u.coeffs)
    }

    /// Product in `U(g)`: `e^M · w = e_{a_1}(e_{a_2}(... (e_{a_k} w)))`.
    pub fn mul(&self, a: &PbwElement, b: &PbwElement) -> PbwElement {
        let n = self.dim();
        let mut out = Polynomial::zero(n);
        for (m, c) in a.coeffs.terms() {
            let mut w = b.coeffs.clone();
            for (i, k) in m.exponents().iter().enumerate().rev() {
                for _ in 0..*k {
                    w = self.left_mul_gen(i, &w);
                }
            }
            out.add_scaled(&w, c);
        }
        PbwElement { coeffs: out }
    }
}

impl fmt::Debug for GuttEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GuttEngine")
            .field("algebra", &self.algebra)
            .field("depth", &self.depth)
            .finish_non_exhaustive()
    }
}

/// `φ(x^K)`: the normal-ordered full symmetrization of the generator word of `x^K`.
pub fn gutt_symmetrize(algebra: &LieAlgebra, monomial: &MultiIndex) -> PbwElement {
    GuttEngine::exact(algebra.clone()).symmetrize(&Polynomial::monomial(monomial.clone(), Rational::one()))
}

/// Splits `u = Σ_r φ(p_r)` with `p_r` homogeneous of degree `r`, by repeatedly removing
/// `φ` of the top-degree symbol.
pub fn gutt_decompose(algebra: &LieAlgebra, u: &PbwElement) -> BTreeMap<usize, Polynomial> {
    let engine = GuttEngine::exact(algebra.clone());
    let mut rest = u.coeffs.clone();
    let mut out = BTreeMap::new();
    while let Some(d) = rest.degree() {
        let top = rest.homogeneous(d);
        rest = &rest - &engine.symmetrize(&top).coeffs;
        out.insert(d, top);
    }
    out
}

/// `C_r(f, g)` of Gutt's star-product on `g*`.
pub fn gutt_cochain(algebra: &LieAlgebra, r: usize, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    GuttEngine::with_depth(algebra.clone(), r).cochain(r, f, g)
}
