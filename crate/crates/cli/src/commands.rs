use anyhow::{bail, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sunstar::exchange::{diffop_to_terms, series_to_orders};
use sunstar::sample::{random_linear_form, random_polynomial};
use sunstar::sun::weak_trivializer;
use sunstar::{
    check_associativity, check_axioms, check_chs, check_covariance, check_eco, check_in_EP,
    check_reconstruction, check_strong_equivalence, check_strong_multiplicativity,
    check_weak_equivalence, equivalence_to_EP, extract_sun_cochains, lemma3_residual, parse_series,
    reconstruct_cochain_diffop, BchContext, DiffOp, Error, LieAlgebra, LinearForm, NuSeries,
    OperatorSeries, PairReport, Polynomial, StarProduct, SunProduct,
};

use crate::config::Session;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Associativity,
    Covariance,
    Theorem1,
    Lemma3,
    Eco,
    Chs,
    Fseries,
    Weak,
    Strong,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Associativity => "associativity",
            Suite::Covariance => "covariance",
            Suite::Theorem1 => "theorem1",
            Suite::Lemma3 => "lemma3",
            Suite::Eco => "eco",
            Suite::Chs => "chs",
            Suite::Fseries => "fseries",
            Suite::Weak => "weak",
            Suite::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    StarMul { f: String, g: String },
    SunMul { f: String, g: String },
    Cochains,
    InEp,
    EquivToEp,
    WeakTrivializer,
    Verify(Suite),
}

/// What a command produced: exit status plus both renderings.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: i32,
    pub human: String,
    pub json: Value,
}

impl Outcome {
    fn ok(human: String, json: Value) -> Self {
        Outcome { status: 0, human, json }
    }
}

pub fn run_command(session: &Session, command: &Command) -> Result<Outcome> {
    match command {
        Command::StarMul { f, g } => product(session, "star-mul", f, g, false),
        Command::SunMul { f, g } => product(session, "sun-mul", f, g, true),
        Command::Cochains => cochains(session),
        Command::InEp => in_ep(session),
        Command::EquivToEp => equiv_to_ep(session),
        Command::WeakTrivializer => weak(session),
        Command::Verify(suite) => verify(session, *suite),
    }
}

fn header(session: &Session, command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("star".into(), json!(session.star.describe()));
    m.insert("order".into(), json!(session.order));
    m.insert("degree".into(), json!(session.degree));
    m
}

fn series_json(s: &NuSeries) -> Value {
    json!(s.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

fn product(session: &Session, name: &str, f: &str, g: &str, sun: bool) -> Result<Outcome> {
    let (n, r) = (session.dim, session.order);
    let (a, b) = (parse_series(f, n, r)?, parse_series(g, n, r)?);
    let result = if sun {
        SunProduct::new(session.star.clone(), r).mul(&a, &b)?
    } else {
        session.star.star_mul(&a, &b)?
    };
    let mut m = header(session, name);
    m.insert("result".into(), json!(result.to_string()));
    m.insert("coefficients".into(), series_json(&result));
    Ok(Outcome::ok(result.to_string(), Value::Object(m)))
}

fn is_refit_failure(e: &Error) -> bool {
    matches!(e, Error::ReconstructionMismatch { .. } | Error::FitResidual { .. })
}

fn operator_json(op: &OperatorSeries) -> Value {
    json!(series_to_orders(op))
}

fn cochains(session: &Session) -> Result<Outcome> {
    let sun = SunProduct::new(session.star.clone(), session.order);
    let mut table = extract_sun_cochains(&sun, session.degree)?;
    let entries = table.nonzero_entries().into_iter().map(|(r, k, v)| (r, k.clone(), v.clone())).collect::<Vec<_>>();
    let mut human = Vec::new();
    let mut list = Vec::new();
    let mut status = 0;
    let mut broken = false;
    for r in 1..=session.order {
        let rows: Vec<_> = entries.iter().filter(|(s, _, _)| *s == r).collect();
        let table_json: Vec<Value> = rows
            .iter()
            .map(|(_, k, v)| json!({"monomial": monomial(k).to_string(), "value": v.to_string()}))
            .collect();
        let fitted = if broken {
            None
        } else {
            match reconstruct_cochain_diffop(&session.star, &table, r, session.degree) {
                Ok(op) => Some(op),
                Err(e) if is_refit_failure(&e) => {
                    broken = true;
                    human.push(format!("rho_{r}: reconstruction failed: {e}"));
                    None
                }
                Err(e) => return Err(e.into()),
            }
        };
        let entry = match &fitted {
            Some(op) if op.is_zero() => {
                human.push(format!("rho_{r} = zero"));
                json!({"r": r, "status": "zero", "table": table_json})
            }
            Some(op) => {
                human.push(format!("rho_{r} = {op}"));
                json!({"r": r, "status": "operator", "operator": diffop_to_terms(op), "table": table_json})
            }
            None => {
                status = 1;
                json!({"r": r, "status": "unreconstructed", "table": table_json})
            }
        };
        for (_, k, v) in &rows {
            human.push(format!("  rho_{r}({}) = {v}", monomial(k)));
        }
        list.push(entry);
        if let Some(op) = fitted {
            table.push_operator(op)?;
        }
    }
    let mut m = header(session, "cochains");
    m.insert("cochains".into(), Value::Array(list));
    Ok(Outcome { status, human: human.join("\n"), json: Value::Object(m) })
}

fn in_ep(session: &Session) -> Result<Outcome> {
    let report = check_in_EP(&session.star, session.order, session.degree)?;
    let mut m = header(session, "in-ep");
    m.insert("in_ep".into(), json!(report.in_ep));
    let (human, witness) = match &report.witness {
        None => ("in E(P): yes".to_string(), Value::Null),
        Some((r, k, v)) => {
            let mono = monomial(k).to_string();
            (format!("in E(P): no (rho_{r}({mono}) = {v})"), json!({"r": r, "monomial": mono, "value": v.to_string()}))
        }
    };
    m.insert("witness".into(), witness);
    Ok(Outcome::ok(human, Value::Object(m)))
}

fn refit_failure(session: &Session, name: &str, e: &Error) -> Outcome {
    let mut m = header(session, name);
    m.insert("error".into(), json!(e.to_string()));
    Outcome { status: 1, human: format!("{name}: {e}"), json: Value::Object(m) }
}

fn equiv_to_ep(session: &Session) -> Result<Outcome> {
    let (t, twisted) = match equivalence_to_EP(&session.star, session.order, session.degree) {
        Ok(v) => v,
        Err(e) if is_refit_failure(&e) => return Ok(refit_failure(session, "equiv-to-ep", &e)),
        Err(e) => return Err(e.into()),
    };
    let check = check_in_EP(&twisted, session.order, session.degree)?;
    let mut m = header(session, "equiv-to-ep");
    m.insert("operator".into(), operator_json(&t));
    m.insert("display".into(), json!(t.to_string()));
    m.insert("result_star".into(), json!(twisted.describe()));
    m.insert("result_in_ep".into(), json!(check.in_ep));
    let human = format!("T = {t}\nstar = {}\nin E(P): {}", twisted.describe(), if check.in_ep { "yes" } else { "no" });
    Ok(Outcome { status: if check.in_ep { 0 } else { 1 }, human, json: Value::Object(m) })
}

fn weak(session: &Session) -> Result<Outcome> {
    let sun = SunProduct::new(session.star.clone(), session.order);
    let s = match weak_trivializer(&sun, session.degree) {
        Ok(s) => s,
        Err(e) if is_refit_failure(&e) => return Ok(refit_failure(session, "weak-trivializer", &e)),
        Err(e) => return Err(e.into()),
    };
    let mut m = header(session, "weak-trivializer");
    m.insert("operator".into(), operator_json(&s));
    m.insert("display".into(), json!(s.to_string()));
    Ok(Outcome::ok(format!("S = {s}"), Value::Object(m)))
}

/// One named check inside a verify suite.
#[derive(Debug, Clone)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

fn pair_check(name: &str, report: &PairReport, expect_pass: bool) -> Check {
    let detail = match &report.failure {
        None => format!("{} pairs", report.checked),
        Some(f) => format!("nu^{} on ({}, {}): {} vs {}", f.order, f.f, f.g, f.lhs, f.rhs),
    };
    Check::new(name, report.passed() == expect_pass, detail)
}

fn verify(session: &Session, suite: Suite) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(session.seed);
    let checks = match suite {
        Suite::Associativity => suite_associativity(session, &mut rng)?,
        Suite::Covariance => suite_covariance(session)?,
        Suite::Theorem1 => suite_theorem1(session)?,
        Suite::Lemma3 => suite_lemma3(session, &mut rng)?,
        Suite::Eco => suite_eco(session, &mut rng)?,
        Suite::Chs => suite_chs(session, &mut rng)?,
        Suite::Fseries => suite_fseries(session, &mut rng)?,
        Suite::Weak => suite_weak(session)?,
        Suite::Strong => suite_strong(session)?,
    };
    let passed = checks.iter().all(|c| c.passed);
    let mut human = vec![format!("verify {}: {}", suite.name(), if passed { "PASS" } else { "FAIL" })];
    for c in &checks {
        human.push(format!("  [{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail));
    }
    let mut m = header(session, "verify");
    m.insert("suite".into(), json!(suite.name()));
    m.insert("seed".into(), json!(session.seed));
    m.insert("passed".into(), json!(passed));
    m.insert(
        "checks".into(),
        Value::Array(checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect()),
    );
    Ok(Outcome { status: if passed { 0 } else { 1 }, human: human.join("\n"), json: Value::Object(m) })
}

fn require_algebra(session: &Session, suite: Suite) -> Result<LieAlgebra> {
    match &session.algebra {
        Some(a) => Ok(a.clone()),
        None => bail!("verify {} needs a Lie algebra config", suite.name()),
    }
}

fn suite_associativity(session: &Session, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (n, r) = (session.dim, session.order);
    let deg = session.degree.min(4);
    let mut checks = Vec::new();
    for t in 0..20 {
        let f = random_polynomial(rng, n, deg, 3);
        let g = random_polynomial(rng, n, deg, 3);
        let h = random_polynomial(rng, n, deg, 3);
        let assoc = check_associativity(&session.star, &f, &g, &h, r)?;
        let detail = match &assoc.failure {
            None => format!("through nu^{r}"),
            Some((k, d)) => format!("defect at nu^{k}: {d}"),
        };
        checks.push(Check::new(format!("associativity #{t}"), assoc.passed(), detail));
        let axioms = check_axioms(&session.star, &f, &g, r)?;
        let detail = if axioms.passed() { "unit, C_0, C_1, finiteness".to_string() } else { axioms.failures.join("; ") };
        checks.push(Check::new(format!("axioms #{t}"), axioms.passed(), detail));
    }
    Ok(checks)
}

fn suite_covariance(session: &Session) -> Result<Vec<Check>> {
    let alg = require_algebra(session, Suite::Covariance)?;
    let report = check_covariance(&session.star, &alg)?;
    let detail = report
        .witnesses
        .iter()
        .map(|(i, j, d)| format!("(x{i}, x{j}): {d}"))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(vec![Check::new("x_i * x_j - x_j * x_i = 2 nu [x_i, x_j]", report.pass, detail)])
}

fn suite_theorem1(session: &Session) -> Result<Vec<Check>> {
    let entries = check_reconstruction(&session.star, session.order, session.degree, session.degree + 2)?;
    let mut checks = Vec::new();
    for e in entries {
        let shown = |op: &Option<DiffOp>| op.as_ref().map_or("none".to_string(), |o| o.to_string());
        checks.push(Check::new(format!("rho_{} matches table", e.order), e.matches_table, shown(&e.operator)));
        checks.push(Check::new(
            format!("rho_{} stable at degree {}", e.order, session.degree + 2),
            e.stable,
            format!("refit {}", shown(&e.refit)),
        ));
    }
    Ok(checks)
}

fn suite_lemma3(session: &Session, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = session.dim;
    let sun = SunProduct::new(session.star.clone(), 1);
    let table = extract_sun_cochains(&sun, session.degree)?;
    let rho1 = reconstruct_cochain_diffop(&session.star, &table, 1, session.degree)?;
    let half = (session.degree / 2).max(1);
    let mut checks = Vec::new();
    for t in 0..20 {
        let f = random_polynomial(rng, n, half, 3);
        let g = random_polynomial(rng, n, half, 3);
        let res = lemma3_residual(&session.star, &rho1, &f, &g)?;
        checks.push(Check::new(format!("delta rho_1 = P - C_1 #{t}"), res.is_zero(), format!("residual {res}")));
    }
    Ok(checks)
}

fn random_pairs(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<(LinearForm, LinearForm)> {
    (0..count).map(|_| (random_linear_form(rng, dim), random_linear_form(rng, dim))).collect()
}

fn suite_eco(session: &Session, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let alg = require_algebra(session, Suite::Eco)?;
    let max_r = session.order.min(4);
    let max_m = session.degree.min(6);
    let mut checks = Vec::new();
    for (t, (x, y)) in random_pairs(rng, alg.dim(), 10).iter().enumerate() {
        let mut failure = None;
        let mut count = 0;
        for r in 1..=max_r {
            for m in r..=max_m {
                let rep = check_eco(&session.star, &alg, x, y, r, m)?;
                count += rep.checked;
                if let Some(mm) = rep.mismatch {
                    failure.get_or_insert(format!("{}: {} vs {}", mm.label, mm.lhs, mm.rhs));
                }
            }
        }
        let passed = failure.is_none();
        checks.push(Check::new(format!("pair #{t}"), passed, failure.unwrap_or(format!("{count} identities"))));
    }
    Ok(checks)
}

fn suite_chs(session: &Session, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let alg = require_algebra(session, Suite::Chs)?;
    let order = session.order.min(3);
    let max_st = session.degree.min(5);
    let mut checks = Vec::new();
    for (t, (x, y)) in random_pairs(rng, alg.dim(), 3).iter().enumerate() {
        let rep = check_chs(&session.star, &alg, x, y, order, max_st)?;
        let detail = match &rep.mismatch {
            None => format!("{} coefficients", rep.checked),
            Some(m) => format!("{}: {} vs {}", m.label, m.lhs, m.rhs),
        };
        checks.push(Check::new(format!("pair #{t}"), rep.passed(), detail));
    }
    Ok(checks)
}

fn suite_fseries(session: &Session, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let alg = session.algebra_or_abelian();
    let ctx = BchContext::new(alg.clone());
    let mut checks = Vec::new();
    for (t, (x, y)) in random_pairs(rng, alg.dim(), 5).iter().enumerate() {
        let c1 = ctx.coefficient(1, x, y)?;
        checks.push(Check::new(format!("c_1 = X + Y #{t}"), c1 == x.add(y), c1.to_polynomial().to_string()));
        let c2 = ctx.coefficient(2, x, y)?;
        let half = alg.bracket(x, y).scale(&sunstar::Rational::new(1.into(), 2.into()));
        checks.push(Check::new(format!("c_2 = [X, Y]/2 #{t}"), c2 == half, c2.to_polynomial().to_string()));
        let mut z = vec![Polynomial::zero(alg.dim() + 2)];
        for m in 1..=6 {
            z.push(ctx.z_graded_polynomial(m, x, y)?);
        }
        let rec = sunstar::lie::f_series_recursive(&z, 6);
        let bad = (0..=6).find(|&r| rec[r] != sunstar::lie::f_series_explicit(&z, r));
        checks.push(Check::new(
            format!("F_r recursion = explicit sum #{t}"),
            bad.is_none(),
            bad.map_or("r <= 6".to_string(), |r| format!("differs at r = {r}")),
        ));
    }
    Ok(checks)
}

fn suite_weak(session: &Session) -> Result<Vec<Check>> {
    let sun = SunProduct::new(session.star.clone(), session.order);
    let s = weak_trivializer(&sun, session.degree)?;
    let pointwise = SunProduct::new(StarProduct::pointwise(session.dim), session.order);
    let report = check_weak_equivalence(&sun, &pointwise, &s, session.degree)?;
    Ok(vec![
        Check::new("S = weak trivializer", true, s.to_string()),
        pair_check("S(f . g) = pi(f) pi(g)", &report, true),
    ])
}

fn suite_strong(session: &Session) -> Result<Vec<Check>> {
    let n = session.dim;
    let (r, d) = (session.order, session.degree);
    let pointwise = SunProduct::new(StarProduct::pointwise(n), r);
    let mut derivations = vec![("x1 d1", DiffOp::term(unit(n, 0), Polynomial::var(n, 0)))];
    if n >= 2 {
        derivations.push(("x2 d1", DiffOp::term(unit(n, 0), Polynomial::var(n, 1))));
    }
    let mut checks = Vec::new();
    for (name, delta) in derivations {
        let s = OperatorSeries::exp_of(&delta, r)?;
        checks.push(pair_check(&format!("exp(nu {name}) multiplicative"), &check_strong_multiplicativity(&s, r, d)?, true));
        checks.push(pair_check(
            &format!("exp(nu {name}) strong equivalence"),
            &check_strong_equivalence(&pointwise, &pointwise, &s, r, d)?,
            true,
        ));
    }
    let mut second = vec![0u32; n];
    second[0] = 2;
    let s = OperatorSeries::from_higher(n, vec![DiffOp::partial(&second)])?;
    let mult = check_strong_multiplicativity(&s, r, d)?;
    let witness_ok = mult.failure.as_ref().is_some_and(|f| f.f == Polynomial::var(n, 0) && f.g == Polynomial::var(n, 0));
    let mut c = pair_check("I + nu d1^2 fails multiplicativity at (x1, x1)", &mult, false);
    c.passed = witness_ok;
    checks.push(c);
    checks.push(pair_check(
        "I + nu d1^2 fails strong equivalence",
        &check_strong_equivalence(&pointwise, &pointwise, &s, r, d)?,
        false,
    ));
    Ok(checks)
}

fn unit(n: usize, i: usize) -> sunstar::MultiIndex {
    sunstar::MultiIndex::zero(n).with_incremented(i)
}

fn monomial(k: &sunstar::MultiIndex) -> Polynomial {
    Polynomial::monomial(k.clone(), sunstar::Rational::from_integer(1.into()))
}
