use num_bigint::BigInt;
use proptest::prelude::*;
use sunstar::{
    bernoulli, gutt_decompose, hochschild_coboundary, parse_polynomial, BchContext, BiDiffOp,
    Cochain, DiffOp, FitOptions, GuttEngine, LieAlgebra, LinearForm, MultiIndex, NuSeries,
    OperatorSeries, PbwElement, PoissonStructure, Polynomial, Rational, StarProduct, SunProduct,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn polynomial(dim: usize, max_degree: usize, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let monomials = MultiIndex::all_up_to_degree(dim, max_degree);
    prop::collection::vec((0..monomials.len(), rational()), 0..=max_terms).prop_map(move |terms| {
        let mut p = Polynomial::zero(dim);
        for (i, c) in terms {
            p.add_term(monomials[i].clone(), c);
        }
        p
    })
}

fn linear_form(dim: usize) -> impl Strategy<Value = LinearForm> {
    prop::collection::vec(rational(), dim).prop_map(LinearForm::new)
}

/// Random operator `Σ c_J(x) ∂_J` with `min_order <= |J| <= max_order` and `deg c_J <= coeff_degree`.
fn diffop_with(dim: usize, min_order: usize, max_order: usize, coeff_degree: usize) -> impl Strategy<Value = DiffOp> {
    let orders: Vec<MultiIndex> = MultiIndex::all_up_to_degree(dim, max_order)
        .into_iter()
        .filter(|j| j.degree() >= min_order.max(1))
        .collect();
    prop::collection::vec((0..orders.len(), polynomial(dim, coeff_degree, 2)), 1..=3).prop_map(move |terms| {
        let mut d = DiffOp::zero(dim);
        for (j, c) in terms {
            d.add_term(orders[j].clone(), &c);
        }
        d
    })
}

fn diffop(dim: usize, max_order: usize) -> impl Strategy<Value = DiffOp> {
    diffop_with(dim, 1, max_order, 1)
}

fn two_cochain_coboundary(
    c: &dyn Fn(&Polynomial, &Polynomial) -> Polynomial,
    f: &Polynomial,
    g: &Polynomial,
    h: &Polynomial,
) -> Polynomial {
    let a = f * &c(g, h);
    let b = c(&(f * g), h);
    let d = c(f, &(g * h));
    let e = &c(f, g) * h;
    &(&(&a - &b) + &d) - &e
}

fn plane() -> StarProduct {
    StarProduct::moyal(PoissonStructure::symplectic(2).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_laws(a in polynomial(3, 3, 4), b in polynomial(3, 3, 4), c in polynomial(3, 2, 3)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn print_parse_round_trip(p in polynomial(3, 4, 6)) {
        prop_assert_eq!(parse_polynomial(&p.to_string(), 3).unwrap(), p);
    }

    #[test]
    fn leibniz_rule(a in polynomial(2, 4, 4), b in polynomial(2, 4, 4), i in 0usize..2) {
        prop_assert_eq!((&a * &b).partial(i), &(&a.partial(i) * &b) + &(&a * &b.partial(i)));
    }

    #[test]
    fn invert_then_compose_is_identity(t1 in diffop(2, 2), t2 in diffop(2, 2)) {
        let t = OperatorSeries::from_higher(2, vec![t1, t2, DiffOp::zero(2)]).unwrap();
        let inv = t.invert().unwrap();
        prop_assert!(t.compose(&inv).unwrap().is_identity());
        prop_assert!(inv.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn fit_recovers_operator(d in diffop(2, 3)) {
        let fitted = sunstar::fit_diffop(2, |f| d.apply(f), FitOptions::new(3, 3)).unwrap();
        prop_assert_eq!(fitted, d);
    }

    #[test]
    fn coboundary_squares_to_zero(
        t in diffop(2, 2),
        f in polynomial(2, 3, 3),
        g in polynomial(2, 3, 3),
        h in polynomial(2, 3, 3),
    ) {
        let dt = hochschild_coboundary(Cochain::from_diffop(&t)).unwrap();
        let ddt = hochschild_coboundary(dt).unwrap();
        prop_assert!(ddt.eval(&[f, g, h]).unwrap().is_zero());
    }

    #[test]
    fn first_cochain_is_a_cocycle(
        f in polynomial(3, 3, 3),
        g in polynomial(3, 3, 3),
        h in polynomial(3, 2, 3),
    ) {
        for star in [StarProduct::gutt(LieAlgebra::su2()), StarProduct::gutt(LieAlgebra::heisenberg())] {
            let c1 = |a: &Polynomial, b: &Polynomial| star.cochain(1, a, b).unwrap();
            prop_assert!(two_cochain_coboundary(&c1, &f, &g, &h).is_zero());
        }
    }

    #[test]
    fn poisson_jacobi_identity(
        f in polynomial(3, 3, 3),
        g in polynomial(3, 3, 3),
        h in polynomial(3, 3, 3),
    ) {
        let p = LieAlgebra::su2().poisson();
        let b = |a: &Polynomial, c: &Polynomial| p.bracket(a, c).unwrap();
        let sum = &(&b(&f, &b(&g, &h)) + &b(&g, &b(&h, &f))) + &b(&h, &b(&f, &g));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn bch_vanishes_on_zero_argument(x in linear_form(3)) {
        let zero = LinearForm::zero(3);
        for alg in [LieAlgebra::su2(), LieAlgebra::heisenberg()] {
            let ctx = BchContext::new(alg);
            for i in 2..=6 {
                prop_assert!(ctx.coefficient(i, &zero, &x).unwrap().is_zero());
                prop_assert!(ctx.coefficient(i, &x, &zero).unwrap().is_zero());
            }
            prop_assert_eq!(ctx.coefficient(1, &x, &zero).unwrap(), x.clone());
        }
    }

    #[test]
    fn bch_linear_in_first_argument(x in linear_form(3), y in linear_form(3)) {
        for alg in [LieAlgebra::su2(), LieAlgebra::heisenberg()] {
            let ctx = BchContext::new(alg.clone());
            for i in 2..=5 {
                let graded = ctx.graded_coefficient(i, &x, &y).unwrap();
                let got = graded.get(&(1, i - 1)).cloned().unwrap_or_else(|| LinearForm::zero(3));
                let k = (i - 1) as u32;
                let fact = (1..=k).fold(BigInt::from(1), |a, b| a * BigInt::from(b));
                let coeff = bernoulli(k as i64).unwrap() / Rational::from_integer(fact);
                let want = sunstar::ad_power(&alg, &y, i - 1, &x).scale(&coeff);
                prop_assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn f_series_paths_agree(x in linear_form(3), y in linear_form(3)) {
        let ctx = BchContext::new(LieAlgebra::su2());
        for r in 0..=6 {
            ctx.f_series(r, &x, &y).unwrap();
        }
    }

    #[test]
    fn moyal_associative(
        f in polynomial(2, 3, 3),
        g in polynomial(2, 3, 3),
        h in polynomial(2, 3, 3),
    ) {
        prop_assert!(sunstar::check_associativity(&plane(), &f, &g, &h, 5).unwrap().passed());
    }

    /// Twists whose `T_r` lower degree by at least `r`, so cochains stay finite.
    #[test]
    fn twisted_products_associative(
        f in polynomial(2, 3, 2),
        g in polynomial(2, 3, 2),
        h in polynomial(2, 2, 2),
        d in diffop_with(2, 1, 2, 0),
        e in diffop_with(2, 3, 3, 1),
    ) {
        let t = OperatorSeries::from_higher(2, vec![d, e]).unwrap();
        let tw = StarProduct::twist(&plane(), &t).unwrap();
        prop_assert!(sunstar::check_associativity(&tw, &f, &g, &h, 3).unwrap().passed());
        prop_assert!(sunstar::check_axioms(&tw, &f, &g, 3).unwrap().passed());
    }

    #[test]
    fn sun_product_laws(
        f in polynomial(3, 2, 3),
        g in polynomial(3, 2, 3),
        h in polynomial(3, 2, 2),
        junk in polynomial(3, 2, 2),
    ) {
        let t = OperatorSeries::from_higher(3, vec![DiffOp::partial(&[2, 0, 0])]).unwrap();
        let star = StarProduct::twist(&StarProduct::gutt(LieAlgebra::su2()), &t).unwrap();
        let sun = SunProduct::new(star, 3);
        let s = |p: &Polynomial| NuSeries::from_polynomial(p.clone(), 3);
        let fg = sun.mul(&s(&f), &s(&g)).unwrap();
        prop_assert_eq!(&fg, &sun.mul(&s(&g), &s(&f)).unwrap());
        prop_assert_eq!(fg.coefficient(0), &(&f * &g));
        let left = sun.mul(&fg, &s(&h)).unwrap();
        let right = sun.mul(&s(&f), &sun.mul(&s(&g), &s(&h)).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let noisy = s(&f).checked_add(&s(&junk).shift(1)).unwrap();
        prop_assert_eq!(sun.mul(&noisy, &s(&g)).unwrap(), fg);
    }

    #[test]
    fn decompose_inverts_symmetrize(p in polynomial(3, 4, 4)) {
        for alg in [LieAlgebra::su2(), LieAlgebra::heisenberg()] {
            let engine = GuttEngine::exact(alg.clone());
            let u = engine.symmetrize(&p);
            let parts = gutt_decompose(&alg, &u);
            let mut total = Polynomial::zero(3);
            for (d, part) in &parts {
                prop_assert_eq!(part.degree(), Some(*d));
                total += part;
            }
            prop_assert_eq!(&total, &p);
            prop_assert_eq!(engine.unsymmetrize_element(&u), p.clone());
        }
    }

    #[test]
    fn decompose_paths_agree(coeffs in polynomial(3, 4, 5)) {
        let alg = LieAlgebra::su2();
        let u = PbwElement::from_ordered(coeffs);
        let slow: Polynomial = gutt_decompose(&alg, &u).values().fold(Polynomial::zero(3), |a, b| &a + b);
        prop_assert_eq!(GuttEngine::exact(alg).unsymmetrize_element(&u), slow);
    }

    #[test]
    fn gutt_star_powers_of_linear_forms(x in linear_form(3)) {
        for alg in [LieAlgebra::su2(), LieAlgebra::heisenberg()] {
            let star = StarProduct::gutt(alg);
            let xp = NuSeries::from_polynomial(x.to_polynomial(), 5);
            let mut acc = xp.clone();
            for m in 2..=6u32 {
                acc = star.star_mul(&xp, &acc).unwrap();
                prop_assert_eq!(&acc, &NuSeries::from_polynomial(x.to_polynomial().pow(m), 5));
            }
        }
    }
}

#[test]
fn bernoulli_recurrence_and_odd_vanishing() {
    for n in 1..=12u32 {
        let mut s = Rational::from_integer(BigInt::from(0));
        for k in 0..=n {
            s += Rational::from_integer(sunstar::poly::binomial(n + 1, k)) * bernoulli(k as i64).unwrap();
        }
        assert_eq!(s, Rational::from_integer(BigInt::from(0)), "n = {n}");
    }
    for k in 1..6 {
        assert_eq!(bernoulli(2 * k + 1).unwrap(), Rational::from_integer(BigInt::from(0)));
    }
}

#[test]
fn bernoulli_sign_forced_by_second_bch_coefficient() {
    // c_2(sX, Y) at s^1 is B_1 (ad_Y)(X) = B_1 [Y, X] and also (1/2)[X, Y].
    let alg = LieAlgebra::su2();
    let ctx = BchContext::new(alg.clone());
    let (x, y) = (LinearForm::basis(3, 0), LinearForm::basis(3, 1));
    let half = alg.bracket(&x, &y).scale(&Rational::new(BigInt::from(1), BigInt::from(2)));
    assert_eq!(ctx.coefficient(2, &x, &y).unwrap(), half);
    assert_eq!(alg.bracket(&y, &x).scale(&bernoulli(1).unwrap()), half);
}

#[test]
fn sun_cochains_vanish_at_or_above_factor_count() {
    let t = OperatorSeries::from_higher(2, vec![DiffOp::partial(&[2, 0]), DiffOp::term(MultiIndex::from_slice(&[0, 3]), Polynomial::var(2, 0))]).unwrap();
    let star = StarProduct::twist(&plane(), &t).unwrap();
    let table = sunstar::extract_sun_cochains(&SunProduct::new(star, 4), 5).unwrap();
    for (k, values) in table.table() {
        for (r, v) in values.iter().enumerate().map(|(i, v)| (i + 1, v)) {
            if r >= k.degree() {
                assert!(v.is_zero(), "rho_{r}({k:?}) = {v}");
            }
        }
    }
}

#[test]
fn unit_fails_for_products_outside_ep() {
    let t = OperatorSeries::from_higher(2, vec![DiffOp::partial(&[2, 0])]).unwrap();
    let star = StarProduct::twist(&plane(), &t).unwrap();
    let sun = SunProduct::new(star, 2);
    let one = NuSeries::one(2, 2);
    let x1 = NuSeries::from_polynomial(Polynomial::var(2, 0), 2);
    assert_eq!(sun.mul(&one, &x1).unwrap(), x1);
    let sq = NuSeries::from_polynomial(Polynomial::var(2, 0).pow(2), 2);
    assert_ne!(sun.mul(&one, &sq).unwrap(), sq);
}

#[test]
fn perturbed_second_cochain_breaks_associativity() {
    let mut b = BiDiffOp::zero(2);
    b.add_term(MultiIndex::unit(2, 0), MultiIndex::unit(2, 0), &Polynomial::one(2));
    let bad = StarProduct::perturbed(&plane(), vec![(2, b)]).unwrap();
    let x = |i| Polynomial::var(2, i);
    let report = sunstar::check_associativity(&bad, &x(0).pow(2), &x(0), &x(1).pow(2), 4).unwrap();
    assert!(!report.passed());
}
