//! Poisson structures, Lie algebras given by structure constants, Bernoulli numbers and
//! Campbell–Hausdorff coefficients evaluated in a concrete Lie algebra.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::poly::{binomial, factorial, MultiIndex, Polynomial, Rational};

/// Antisymmetric bivector `P^{ij}(x)`; `P(f, g) = Σ P^{ij} ∂_i f ∂_j g`.
#[derive(Clone, PartialEq, Eq)]
pub struct PoissonStructure {
    dim: usize,
    matrix: Vec<Polynomial>,
}

/// Outcome of the Jacobi check. Indices are 1-based, matching `x1..xn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JacobiReport {
    Pass,
    Fail { triple: (usize, usize, usize), residual: Polynomial },
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        matches!(self, JacobiReport::Pass)
    }
}

impl PoissonStructure {
    /// Validates antisymmetry only; see [`PoissonStructure::new`] for the full check.
    pub fn antisymmetric(dim: usize, matrix: Vec<Vec<Polynomial>>) -> Result<Self> {
        if matrix.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.len() });
        }
        let mut flat = Vec::with_capacity(dim * dim);
        for row in &matrix {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            for p in row {
                Error::check_dim(dim, p.dim())?;
                flat.push(p.clone());
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let a = &flat[i * dim + j];
                let b = &flat[j * dim + i];
                if !(a + b).is_zero() {
                    return Err(Error::NotAntisymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(PoissonStructure { dim, matrix: flat })
    }

    /// Antisymmetric and satisfying the Jacobi identity.
    pub fn new(dim: usize, matrix: Vec<Vec<Polynomial>>) -> Result<Self> {
        let p = Self::antisymmetric(dim, matrix)?;
        if let JacobiReport::Fail { triple: (i, j, k), .. } = p.jacobi_check() {
            return Err(Error::JacobiViolation { i, j, k });
        }
        Ok(p)
    }

    pub fn constant(dim: usize, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let m = matrix
            .into_iter()
            .map(|row| row.into_iter().map(|c| Polynomial::constant(dim, c)).collect())
            .collect();
        Self::new(dim, m)
    }

    pub fn zero(dim: usize) -> Self {
        PoissonStructure { dim, matrix: vec![Polynomial::zero(dim); dim * dim] }
    }

    /// Standard symplectic structure on `R^{2m}`: `P^{2k-1, 2k} = 1`.
    pub fn symplectic(dim: usize) -> Result<Self> {
        if !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("symplectic dimension {dim} is odd")));
        }
        let mut m = vec![vec![Rational::zero(); dim]; dim];
        for k in 0..dim / 2 {
            m[2 * k][2 * k + 1] = Rational::one();
            m[2 * k + 1][2 * k] = -Rational::one();
        }
        Self::constant(dim, m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Zero-based entry `P^{ij}`.
    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.matrix[i * self.dim + j]
    }

    pub fn is_constant(&self) -> bool {
        self.matrix.iter().all(Polynomial::is_constant)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(Polynomial::is_zero)
    }

    pub fn bracket(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        Error::check_dim(self.dim, f.dim())?;
        Error::check_dim(self.dim, g.dim())?;
        let df: Vec<Polynomial> = (0..self.dim).map(|i| f.partial(i)).collect();
        let dg: Vec<Polynomial> = (0..self.dim).map(|j| g.partial(j)).collect();
        let mut out = Polynomial::zero(self.dim);
        for i in 0..self.dim {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                let p = self.entry(i, j);
                if p.is_zero() || dg[j].is_zero() {
                    continue;
                }
                out += &(&(p * &df[i]) * &dg[j]);
            }
        }
        Ok(out)
    }

    /// Checks `Σ_l (P^{il} ∂_l P^{jk} + P^{jl} ∂_l P^{ki} + P^{kl} ∂_l P^{ij}) = 0` for `i < j < k`.
    pub fn jacobi_check(&self) -> JacobiReport {
        let n = self.dim;
        let cyc = |a: usize, b: usize, c: usize| -> Polynomial {
            let mut acc = Polynomial::zero(n);
            for l in 0..n {
                let d = self.entry(b, c).partial(l);
                if !d.is_zero() {
                    acc += &(self.entry(a, l) * &d);
                }
            }
            acc
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut r = cyc(i, j, k);
                    r += &cyc(j, k, i);
                    r += &cyc(k, i, j);
                    if !r.is_zero() {
                        return JacobiReport::Fail { triple: (i + 1, j + 1, k + 1), residual: r };
                    }
                }
            }
        }
        JacobiReport::Pass
    }
}

impl fmt::Debug for PoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entry(i, j).to_string()).collect())
            .collect();
        write!(f, "PoissonStructure{rows:?}")
    }
}

pub fn poisson_bracket(p: &PoissonStructure, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    p.bracket(f, g)
}

pub fn jacobi_check(p: &PoissonStructure) -> JacobiReport {
    p.jacobi_check()
}

/// Element `Σ a_i x_i` of the space of linear forms, identified with `Σ a_i e_i ∈ g`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearForm(Vec<Rational>);

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        LinearForm(coeffs)
    }

    pub fn zero(dim: usize) -> Self {
        LinearForm(vec![Rational::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &Rational) -> LinearForm {
        LinearForm(self.0.iter().map(|a| a * c).collect())
    }

    pub fn add_scaled(&mut self, other: &LinearForm, c: &Rational) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * c;
        }
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.dim();
        let mut p = Polynomial::zero(n);
        for (i, a) in self.0.iter().enumerate() {
            p.add_term(MultiIndex::unit(n, i), a.clone());
        }
        p
    }

    /// Fails unless `p` is homogeneous of degree one (or zero).
    pub fn from_polynomial(p: &Polynomial) -> Result<Self> {
        let mut v = Self::zero(p.dim());
        for (m, c) in p.terms() {
            match m.first_variable() {
                Some(i) if m.degree() == 1 => v.0[i] = c.clone(),
                _ => {
                    return Err(Error::InvalidArgument(format!("{p} is not a linear form")));
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearForm({})", self.to_polynomial())
    }
}

/// Finite-dimensional Lie algebra with basis `e_1..e_n` and `[e_i, e_j] = Σ_k C_ij^k e_k`.
#[derive(Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    consts: Vec<Rational>,
}

impl LieAlgebra {
    /// Builds from brackets `[e_i, e_j] ∋ c e_k` given as zero-based `(i, j, k, c)` with
    /// `i != j`; antisymmetry is implied. Jacobi is validated.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        let mut consts = vec![Rational::zero(); dim * dim * dim];
        for (i, j, k, c) in brackets {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidArgument(format!(
                    "structure constant index ({}, {}, {}) out of range for dimension {dim}",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            if i == j {
                if !c.is_zero() {
                    return Err(Error::NotAntisymmetric { i: i + 1, j: j + 1 });
                }
                continue;
            }
            consts[(i * dim + j) * dim + k] += c;
            consts[(j * dim + i) * dim + k] -= c;
        }
        let alg = LieAlgebra { dim, consts };
        if let Some((i, j, k)) = alg.jacobi_failure() {
            return Err(Error::JacobiViolation { i, j, k });
        }
        Ok(alg)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { dim, consts: vec![Rational::zero(); dim * dim * dim] }
    }

    /// `[e_1, e_2] = e_3`, all other brackets zero.
    pub fn heisenberg() -> Self {
        Self::from_brackets(3, &[(0, 1, 2, Rational::one())]).expect("Heisenberg algebra")
    }

    /// `[e_1, e_2] = e_3`, `[e_2, e_3] = e_1`, `[e_3, e_1] = e_2`.
    pub fn su2() -> Self {
        let one = Rational::one();
        Self::from_brackets(3, &[(0, 1, 2, one.clone()), (1, 2, 0, one.clone()), (2, 0, 1, one)])
            .expect("su(2)")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Zero-based `C_ij^k`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.consts[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_abelian(&self) -> bool {
        self.consts.iter().all(Zero::is_zero)
    }

    /// Nonzero `(i, j, k, C_ij^k)` with `i < j`, zero-based.
    pub fn brackets(&self) -> Vec<(usize, usize, usize, Rational)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.structure_constant(i, j, k);
                    if !c.is_zero() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    /// `[e_i, e_j]` as a linear form.
    pub fn bracket_basis(&self, i: usize, j: usize) -> LinearForm {
        let n = self.dim;
        LinearForm((0..n).map(|k| self.structure_constant(i, j, k).clone()).collect())
    }

    pub fn bracket(&self, x: &LinearForm, y: &LinearForm) -> LinearForm {
        let n = self.dim;
        let mut out = LinearForm::zero(n);
        for (i, a) in x.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.0.iter().enumerate() {
                if b.is_zero() || i == j {
                    continue;
                }
                let ab = a * b;
                for k in 0..n {
                    let c = self.structure_constant(i, j, k);
                    if !c.is_zero() {
                        out.0[k] += &ab * c;
                    }
                }
            }
        }
        out
    }

    /// The linear Poisson structure `P_C^{ij} = Σ_k C_ij^k x_k`.
    pub fn poisson(&self) -> PoissonStructure {
        let n = self.dim;
        let matrix = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.bracket_basis(i, j).to_polynomial())
            .collect();
        PoissonStructure { dim: n, matrix }
    }

    fn jacobi_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        let c = |i, j, k| self.structure_constant(i, j, k);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for m in 0..n {
                        let mut s = Rational::zero();
                        for l in 0..n {
                            s += c(i, j, l) * c(l, k, m);
                            s += c(j, k, l) * c(l, i, m);
                            s += c(k, i, l) * c(l, j, m);
                        }
                        if !s.is_zero() {
                            return Some((i + 1, j + 1, k + 1));
                        }
                    }
                }
            }
        }
        None
    }
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra(dim {}, brackets {:?})", self.dim, self.brackets())
    }
}

/// `(ad_Y)^r (X)` with `ad_Y: X ↦ [Y, X]`.
pub fn ad_power(algebra: &LieAlgebra, y: &LinearForm, r: usize, x: &LinearForm) -> LinearForm {
    let mut v = x.clone();
    for _ in 0..r {
        if v.is_zero() {
            break;
        }
        v = algebra.bracket(y, &v);
    }
    v
}

/// Append-only memo of Bernoulli numbers (first kind, `B_1 = -1/2`).
pub struct BernoulliCache {
    memo: RwLock<Vec<Rational>>,
}

impl BernoulliCache {
    pub fn new() -> Self {
        BernoulliCache { memo: RwLock::new(vec![Rational::one()]) }
    }

    pub fn global() -> &'static BernoulliCache {
        static CACHE: OnceLock<BernoulliCache> = OnceLock::new();
        CACHE.get_or_init(BernoulliCache::new)
    }

    /// `B_n` from `Σ_{k=0}^{n} binom(n+1, k) B_k = 0`.
    pub fn get(&self, n: usize) -> Rational {
        if let Some(b) = self.memo.read().get(n) {
            return b.clone();
        }
        let mut memo = self.memo.write();
        while memo.len() <= n {
            let m = memo.len() as u32;
            let mut s = Rational::zero();
            for (k, b) in memo.iter().enumerate() {
                s += Rational::from_integer(binomial(m + 1, k as u32)) * b;
            }
            let b = -s / Rational::from_integer(BigInt::from(m + 1));
            memo.push(b);
        }
        memo[n].clone()
    }
}

impl Default for BernoulliCache {
    fn default() -> Self {
        Self::new()
    }
}

pub fn bernoulli(n: i64) -> Result<Rational> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("Bernoulli index {n} is negative")));
    }
    Ok(BernoulliCache::global().get(n as usize))
}

/// A word in the letters `X` (`false`) and `Y` (`true`).
type Word = Vec<bool>;

/// Dynkin's formula for the degree-`r` part of `log(e^X e^Y)`:
///
/// `Σ_n (-1)^{n-1}/n Σ [X^{a_1} Y^{b_1} ... X^{a_n} Y^{b_n}] / (r Π a_i! b_i!)`,
///
/// summed over `a_i + b_i >= 1` with `Σ (a_i + b_i) = r`, where `[w_1 ... w_m]` is the
/// right-nested bracket `[w_1, [w_2, ..., [w_{m-1}, w_m]]]`. Identical words are merged
/// and words whose bracket vanishes identically are dropped.
type DynkinTable = Arc<Vec<(Word, Rational)>>;

fn dynkin_table(r: usize) -> DynkinTable {
    static TABLES: OnceLock<RwLock<HashMap<usize, DynkinTable>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = tables.read().get(&r) {
        return t.clone();
    }
    let mut acc: BTreeMap<Word, Rational> = BTreeMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    dynkin_rec(r, r, &mut pairs, &mut acc);
    let table: Vec<(Word, Rational)> = acc
        .into_iter()
        .filter(|(w, c)| !c.is_zero() && (w.len() == 1 || w[w.len() - 1] != w[w.len() - 2]))
        .collect();
    let table = Arc::new(table);
    tables.write().insert(r, table.clone());
    table
}

fn dynkin_rec(
    total: usize,
    left: usize,
    pairs: &mut Vec<(usize, usize)>,
    acc: &mut BTreeMap<Word, Rational>,
) {
    if left == 0 {
        let n = pairs.len();
        let mut denom = BigInt::from(n * total);
        let mut word = Vec::with_capacity(total);
        for &(a, b) in pairs.iter() {
            denom *= factorial(a as u32) * factorial(b as u32);
            word.extend(std::iter::repeat_n(false, a));
            word.extend(std::iter::repeat_n(true, b));
        }
        let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        *acc.entry(word).or_insert_with(Rational::zero) += Rational::new(sign, denom);
        return;
    }
    for size in 1..=left {
        for a in 0..=size {
            pairs.push((a, size - a));
            dynkin_rec(total, left - size, pairs, acc);
            pairs.pop();
        }
    }
}

/// Campbell–Hausdorff context for a fixed Lie algebra.
pub struct BchContext {
    algebra: LieAlgebra,
    max_order: usize,
}

impl BchContext {
    pub const DEFAULT_MAX_ORDER: usize = 8;

    pub fn new(algebra: LieAlgebra) -> Self {
        BchContext { algebra, max_order: Self::DEFAULT_MAX_ORDER }
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    fn nested_bracket(&self, word: &[bool], x: &LinearForm, y: &LinearForm) -> LinearForm {
        let letter = |b: bool| if b { y } else { x };
        let mut v = letter(word[word.len() - 1]).clone();
        for &l in word[..word.len() - 1].iter().rev() {
            if v.is_zero() {
                break;
            }
            v = self.algebra.bracket(letter(l), &v);
        }
        v
    }

    fn check_order(&self, r: usize) -> Result<()> {
        if r == 0 {
            return Err(Error::InvalidArgument("Campbell-Hausdorff index starts at 1".into()));
        }
        if r > self.max_order {
            return Err(Error::InvalidArgument(format!(
                "Campbell-Hausdorff order {r} exceeds the configured cap {}",
                self.max_order
            )));
        }
        Ok(())
    }

    /// `c_r(X, Y)`.
    pub fn coefficient(&self, r: usize, x: &LinearForm, y: &LinearForm) -> Result<LinearForm> {
        let graded = self.graded_coefficient(r, x, y)?;
        let mut out = LinearForm::zero(self.algebra.dim());
        for v in graded.values() {
            out = out.add(v);
        }
        Ok(out)
    }

    /// `c_r(sX, tY) = Σ_{a+b=r} s^a t^b c_r^{(a,b)}(X, Y)`, keyed by `(a, b)`.
    pub fn graded_coefficient(
        &self,
        r: usize,
        x: &LinearForm,
        y: &LinearForm,
    ) -> Result<BTreeMap<(usize, usize), LinearForm>> {
        self.check_order(r)?;
        Error::check_dim(self.algebra.dim(), x.dim())?;
        Error::check_dim(self.algebra.dim(), y.dim())?;
        let mut out: BTreeMap<(usize, usize), LinearForm> = BTreeMap::new();
        for (word, c) in dynkin_table(r).iter() {
            let b = word.iter().filter(|&&l| l).count();
            let v = self.nested_bracket(word, x, y);
            if v.is_zero() {
                continue;
            }
            out.entry((r - b, b))
                .or_insert_with(|| LinearForm::zero(self.algebra.dim()))
                .add_scaled(&v, c);
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// `Z_r(X, Y) = 2^r c_{r+1}(X, Y)`.
    pub fn z(&self, r: usize, x: &LinearForm, y: &LinearForm) -> Result<LinearForm> {
        let c = self.coefficient(r + 1, x, y)?;
        Ok(c.scale(&Rational::from_integer(BigInt::from(2).pow(r as u32))))
    }

    /// `Z_r(sX, tY)` as a polynomial in `n + 2` variables, `s = x_{n+1}`, `t = x_{n+2}`.
    pub fn z_graded_polynomial(&self, r: usize, x: &LinearForm, y: &LinearForm) -> Result<Polynomial> {
        let n = self.algebra.dim();
        let two_r = Rational::from_integer(BigInt::from(2).pow(r as u32));
        let mut out = Polynomial::zero(n + 2);
        for ((a, b), v) in self.graded_coefficient(r + 1, x, y)? {
            let mut shift = vec![0u32; n + 2];
            shift[n] = a as u32;
            shift[n + 1] = b as u32;
            out.add_scaled_shifted(&v.to_polynomial().embed(n + 2), &two_r, &MultiIndex::from_slice(&shift));
        }
        Ok(out)
    }

    /// `F_r(X, Y)`, computed by the recursion and cross-checked against the explicit
    /// partition sum.
    pub fn f_series(&self, r: usize, x: &LinearForm, y: &LinearForm) -> Result<Polynomial> {
        let n = self.algebra.dim();
        let mut z = vec![Polynomial::zero(n)];
        for m in 1..=r {
            z.push(self.z(m, x, y)?.to_polynomial());
        }
        let rec = f_series_recursive(&z, r).pop().expect("F_0 present");
        let exp = f_series_explicit(&z, r);
        if rec != exp {
            return Err(Error::Internal(format!(
                "F_{r}: recursion gives {rec}, explicit formula gives {exp}"
            )));
        }
        Ok(rec)
    }
}

pub fn bch_coefficient(ctx: &BchContext, r: usize, x: &LinearForm, y: &LinearForm) -> Result<LinearForm> {
    ctx.coefficient(r, x, y)
}

pub fn z_coefficient(ctx: &BchContext, r: usize, x: &LinearForm, y: &LinearForm) -> Result<LinearForm> {
    ctx.z(r, x, y)
}

pub fn f_series(ctx: &BchContext, r: usize, x: &LinearForm, y: &LinearForm) -> Result<Polynomial> {
    ctx.f_series(r, x, y)
}

/// `F_0 = 1`, `F_r = (1/r) Σ_{k<r} (r-k) Z_{r-k} F_k`; returns `F_0..=F_r`.
/// `z[m]` holds `Z_m` for `1 <= m <= r` (`z[0]` is ignored).
pub fn f_series_recursive(z: &[Polynomial], r: usize) -> Vec<Polynomial> {
    let dim = z[0].dim();
    let mut f = vec![Polynomial::one(dim)];
    for s in 1..=r {
        let mut acc = Polynomial::zero(dim);
        for (k, fk) in f.iter().enumerate() {
            let w = Rational::from_integer(BigInt::from(s - k));
            acc.add_scaled(&(&z[s - k] * fk), &w);
        }
        f.push(acc.scale(&Rational::new(BigInt::one(), BigInt::from(s))));
    }
    f
}

/// `F_r = Σ Π_i Z_{m_i}^{n_i} / n_i!` over partitions `r = Σ m_i n_i` with distinct parts.
pub fn f_series_explicit(z: &[Polynomial], r: usize) -> Polynomial {
    let dim = z[0].dim();
    if r == 0 {
        return Polynomial::one(dim);
    }
    let mut out = Polynomial::zero(dim);
    let mut parts: Vec<(usize, usize)> = Vec::new();
    partitions(r, r, &mut parts, &mut |ps| {
        let mut term = Polynomial::one(dim);
        let mut denom = BigInt::one();
        for &(m, mult) in ps {
            term = &term * &z[m].pow(mult as u32);
            denom *= factorial(mult as u32);
        }
        out.add_scaled(&term, &Rational::new(BigInt::one(), denom));
    });
    out
}

/// Enumerates partitions of `left` into distinct parts `< bound + 1` with multiplicities.
fn partitions(
    left: usize,
    bound: usize,
    parts: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    if left == 0 {
        visit(parts);
        return;
    }
    for m in (1..=bound.min(left)).rev() {
        for mult in 1..=left / m {
            parts.push((m, mult));
            partitions(left - m * mult, m - 1, parts, visit);
            parts.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn lf(v: &[i64]) -> LinearForm {
        LinearForm::new(v.iter().map(|&a| int(a)).collect())
    }

    fn x(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    #[test]
    fn bracket_examples() {
        let sympl = PoissonStructure::symplectic(2).unwrap();
        let v = poisson_bracket(&sympl, &Polynomial::var(2, 0), &Polynomial::var(2, 1)).unwrap();
        assert_eq!(v, Polynomial::one(2));
        let h = LieAlgebra::heisenberg().poisson();
        assert_eq!(poisson_bracket(&h, &x(0), &x(1)).unwrap(), x(2));
        let f = &(&x(0) * &x(1)) + &x(2).pow(2);
        assert!(poisson_bracket(&LieAlgebra::su2().poisson(), &f, &f).unwrap().is_zero());
    }

    #[test]
    fn jacobi_examples() {
        let c = PoissonStructure::constant(
            3,
            vec![
                vec![int(0), int(2), rat(1, 3)],
                vec![int(-2), int(0), int(5)],
                vec![rat(-1, 3), int(-5), int(0)],
            ],
        )
        .unwrap();
        assert!(c.jacobi_check().passed());
        assert!(LieAlgebra::su2().poisson().jacobi_check().passed());

        let z = Polynomial::zero(3);
        let one = Polynomial::one(3);
        let m = vec![
            vec![z.clone(), x(0), x(1)],
            vec![-&x(0), z.clone(), one.clone()],
            vec![-&x(1), -&one, z.clone()],
        ];
        let bad = PoissonStructure::antisymmetric(3, m.clone()).unwrap();
        match bad.jacobi_check() {
            JacobiReport::Fail { triple, residual } => {
                assert_eq!(triple, (1, 2, 3));
                assert_eq!(residual, -&x(1));
            }
            JacobiReport::Pass => panic!("expected failure"),
        }
        assert!(matches!(PoissonStructure::new(3, m), Err(Error::JacobiViolation { i: 1, j: 2, k: 3 })));
    }

    #[test]
    fn antisymmetry_required() {
        let m = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert!(matches!(PoissonStructure::constant(2, m), Err(Error::NotAntisymmetric { .. })));
    }

    #[test]
    fn lie_jacobi_validated() {
        let bad = LieAlgebra::from_brackets(3, &[(0, 1, 1, int(1)), (1, 2, 0, int(1))]);
        assert!(matches!(bad, Err(Error::JacobiViolation { .. })));
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0).unwrap(), int(1));
        assert_eq!(bernoulli(1).unwrap(), rat(-1, 2));
        assert_eq!(bernoulli(2).unwrap(), rat(1, 6));
        assert_eq!(bernoulli(3).unwrap(), int(0));
        assert_eq!(bernoulli(4).unwrap(), rat(-1, 30));
        assert_eq!(bernoulli(12).unwrap(), rat(-691, 2730));
        assert!(bernoulli(-1).is_err());
    }

    #[test]
    fn ad_power_examples() {
        let h = LieAlgebra::heisenberg();
        assert_eq!(ad_power(&h, &lf(&[0, 1, 0]), 0, &lf(&[1, 0, 0])), lf(&[1, 0, 0]));
        assert_eq!(ad_power(&h, &lf(&[0, 1, 0]), 1, &lf(&[1, 0, 0])), lf(&[0, 0, -1]));
        let s = LieAlgebra::su2();
        assert_eq!(ad_power(&s, &lf(&[1, 0, 0]), 2, &lf(&[0, 1, 0])), lf(&[0, -1, 0]));
    }

    #[test]
    fn low_order_bch() {
        let ctx = BchContext::new(LieAlgebra::heisenberg());
        let (a, b) = (lf(&[1, 0, 0]), lf(&[0, 1, 0]));
        assert_eq!(bch_coefficient(&ctx, 1, &a, &b).unwrap(), lf(&[1, 1, 0]));
        assert_eq!(
            bch_coefficient(&ctx, 2, &a, &b).unwrap(),
            LinearForm::new(vec![int(0), int(0), rat(1, 2)])
        );
        assert_eq!(z_coefficient(&ctx, 0, &a, &b).unwrap(), lf(&[1, 1, 0]));
        assert_eq!(z_coefficient(&ctx, 1, &a, &b).unwrap(), lf(&[0, 0, 1]));
        for r in 2..6 {
            assert!(z_coefficient(&ctx, r, &a, &b).unwrap().is_zero());
        }
        assert!(bch_coefficient(&ctx, 9, &a, &b).is_err());
        assert!(bch_coefficient(&ctx, 0, &a, &b).is_err());
    }

    #[test]
    fn third_order_bch_matches_hand_expansion() {
        let s = LieAlgebra::su2();
        let ctx = BchContext::new(s.clone());
        for (a, b) in [(lf(&[1, 2, 0]), lf(&[0, 1, -3])), (lf(&[2, -1, 1]), lf(&[1, 1, 1]))] {
            let xy = s.bracket(&a, &b);
            let yx = s.bracket(&b, &a);
            let expected = s
                .bracket(&a, &xy)
                .add(&s.bracket(&b, &yx))
                .scale(&rat(1, 12));
            assert_eq!(bch_coefficient(&ctx, 3, &a, &b).unwrap(), expected);
        }
    }

    #[test]
    fn f_series_low_orders() {
        let ctx = BchContext::new(LieAlgebra::su2());
        let (a, b) = (lf(&[1, 0, 2]), lf(&[0, -1, 1]));
        assert_eq!(f_series(&ctx, 0, &a, &b).unwrap(), Polynomial::one(3));
        let z1 = ctx.z(1, &a, &b).unwrap().to_polynomial();
        let z2 = ctx.z(2, &a, &b).unwrap().to_polynomial();
        assert_eq!(f_series(&ctx, 1, &a, &b).unwrap(), z1);
        assert_eq!(f_series(&ctx, 2, &a, &b).unwrap(), &z2 + &z1.pow(2).scale(&rat(1, 2)));
        for r in 3..=6 {
            f_series(&ctx, r, &a, &b).unwrap();
        }
    }
}
