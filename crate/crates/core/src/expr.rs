//! Text form of polynomials and `nu`-series: a small recursive-descent parser whose
//! output round-trips with the canonical printers.
//!
//! ```text
//! expr     := ["+" | "-"] term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := atom ("^" uint)*
//! atom     := rational | "x" uint | "nu" | "(" expr ")"
//! rational := uint ["/" uint]
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial, Rational};
use crate::series::NuSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    /// Signed summands; `true` marks subtraction.
    Sum(Vec<(bool, ExprAst)>),
    Product(Vec<ExprAst>),
    Power(Box<ExprAst>, u32),
    /// Zero-based variable index.
    Var(usize),
    Nu,
    Literal(Rational),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
    allow_nu: bool,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<(usize, BigInt)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected an unsigned integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok((start, text.parse().expect("digits parse")))
    }

    fn small_uint(&mut self) -> Result<(usize, u32)> {
        let (start, n) = self.uint()?;
        match u32::try_from(n) {
            Ok(v) => Ok((start, v)),
            Err(_) => self.err(start, "integer too large"),
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut parts = Vec::new();
        let mut negative = false;
        if self.eat(b'-') {
            negative = true;
        } else {
            self.eat(b'+');
        }
        parts.push((negative, self.term()?));
        loop {
            if self.eat(b'+') {
                parts.push((false, self.term()?));
            } else if self.eat(b'-') {
                parts.push((true, self.term()?));
            } else {
                break;
            }
        }
        if parts.len() == 1 && !parts[0].0 {
            return Ok(parts.pop().unwrap().1);
        }
        Ok(ExprAst::Sum(parts))
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        Ok(ExprAst::Product(factors))
    }

    fn factor(&mut self) -> Result<ExprAst> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            let (_, k) = self.small_uint()?;
            base = ExprAst::Power(Box::new(base), k);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err(self.pos, "expected ')'");
                }
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return self.err(self.pos, "expected a variable index after 'x'");
                }
                let (_, idx) = self.small_uint()?;
                if idx == 0 || idx as usize > self.dim {
                    return self.err(
                        start,
                        format!("variable index x{idx} out of range (dimension {})", self.dim),
                    );
                }
                Ok(ExprAst::Var(idx as usize - 1))
            }
            Some(b'n') => {
                if self.src[self.pos..].starts_with(b"nu") {
                    if !self.allow_nu {
                        return self.err(start, "'nu' is not allowed in a polynomial");
                    }
                    self.pos += 2;
                    Ok(ExprAst::Nu)
                } else {
                    self.err(start, "unexpected character 'n'")
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let (_, num) = self.uint()?;
                let save = self.pos;
                if self.eat(b'/') {
                    let (dpos, den) = self.uint()?;
                    if den.is_zero() {
                        return self.err(dpos, "zero denominator");
                    }
                    return Ok(ExprAst::Literal(Rational::new(num, den)));
                }
                self.pos = save;
                Ok(ExprAst::Literal(Rational::from_integer(num)))
            }
            Some(c) => self.err(start, format!("unexpected character '{}'", c as char)),
            None => self.err(start, "unexpected end of input"),
        }
    }
}

/// Parses `text` into an AST over `dim` variables (`x1`..`x{dim}`).
pub fn parse_ast(text: &str, dim: usize, allow_nu: bool) -> Result<ExprAst> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim, allow_nu };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err(p.pos, format!("unexpected trailing input '{}'", &text[p.pos..]));
    }
    Ok(e)
}

impl ExprAst {
    /// Evaluates into a polynomial in `dim + 1` variables where the last one stands for `nu`.
    fn eval_extended(&self, dim: usize) -> Polynomial {
        let ext = dim + 1;
        match self {
            ExprAst::Sum(parts) => {
                let mut acc = Polynomial::zero(ext);
                for (neg, e) in parts {
                    let v = e.eval_extended(dim);
                    if *neg {
                        acc -= &v;
                    } else {
                        acc += &v;
                    }
                }
                acc
            }
            ExprAst::Product(fs) => fs
                .iter()
                .fold(Polynomial::one(ext), |acc, e| &acc * &e.eval_extended(dim)),
            ExprAst::Power(b, k) => b.eval_extended(dim).pow(*k),
            ExprAst::Var(i) => Polynomial::var(ext, *i),
            ExprAst::Nu => Polynomial::var(ext, dim),
            ExprAst::Literal(r) => Polynomial::constant(ext, r.clone()),
        }
    }
}

/// Parses a polynomial expression in `dim` variables.
pub fn parse_polynomial(text: &str, dim: usize) -> Result<Polynomial> {
    let ast = parse_ast(text, dim, false)?;
    let ext = ast.eval_extended(dim);
    let mut out = Polynomial::zero(dim);
    for (m, c) in ext.into_terms() {
        out.add_term(MultiIndex::from_slice(&m.exponents()[..dim]), c);
    }
    Ok(out)
}

/// Parses an expression that may contain `nu`, truncating at `order`.
pub fn parse_series(text: &str, dim: usize, order: usize) -> Result<NuSeries> {
    let ast = parse_ast(text, dim, true)?;
    let ext = ast.eval_extended(dim);
    let mut out = NuSeries::zero(dim, order);
    for (m, c) in ext.into_terms() {
        let r = m.get(dim) as usize;
        if r <= order {
            out.coefficient_mut(r).add_term(MultiIndex::from_slice(&m.exponents()[..dim]), c);
        }
    }
    Ok(out)
}

/// Parses a rational literal such as `-3/4`, `5` or `0`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let bad = || Error::Parse { pos: 0, msg: format!("invalid rational '{text}'") };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body, "1"),
    };
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(num) || !all_digits(den) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse { pos: 0, msg: "zero denominator".into() });
    }
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    #[test]
    fn grammar_examples() {
        let p = parse_polynomial("x1^2*x2 - 3/2*x3", 3).unwrap();
        let expected = Polynomial::from_terms(
            3,
            [
                (MultiIndex::from_slice(&[2, 1, 0]), int(1)),
                (MultiIndex::from_slice(&[0, 0, 1]), rat(-3, 2)),
            ],
        )
        .unwrap();
        assert_eq!(p, expected);

        let q = parse_polynomial("x1*(x1+x2)", 2).unwrap();
        assert_eq!(q.to_string(), "x1^2 + x1*x2");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_polynomial("x4", 3) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 0);
                assert!(msg.contains("out of range"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_polynomial("1/0", 1), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_polynomial("x1 +", 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("x1 x2", 2), Err(Error::Parse { pos: 3, .. })));
        assert!(parse_polynomial("nu", 1).is_err());
    }

    #[test]
    fn whitespace_and_signs() {
        let a = parse_polynomial("  - x1 ^ 2 +  2 * x2 ", 2).unwrap();
        assert_eq!(a.to_string(), "-x1^2 + 2*x2");
        assert_eq!(parse_polynomial("-(x1 - x2)", 2).unwrap().to_string(), "-x1 + x2");
        assert_eq!(parse_polynomial("(x1+1)^2", 1).unwrap().to_string(), "x1^2 + 2*x1 + 1");
    }

    #[test]
    fn series_parsing() {
        let s = parse_series("x1*x2 + nu + 4*x1*x2*nu + 2*nu^2 + nu^5", 2, 3).unwrap();
        assert_eq!(s.to_string(), "x1*x2 + 4*x1*x2*nu + nu + 2*nu^2");
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
