//! JSON exchange format for differential operators and operator series.
//!
//! A series is a list of `{"order": r, "terms": [{"coeff": "<polynomial>", "derivs": [j1, ..., jn]}]}`
//! entries giving `T_r = Σ coeff ∂_J`; orders not listed are zero and `T_0 = I` is implied.

use serde::{Deserialize, Serialize};

use crate::diffop::{DiffOp, OperatorSeries};
use crate::error::{Error, Result};
use crate::expr::parse_polynomial;
use crate::poly::MultiIndex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub coeff: String,
    pub derivs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorOrder {
    pub order: usize,
    pub terms: Vec<OperatorTerm>,
}

pub fn diffop_to_terms(op: &DiffOp) -> Vec<OperatorTerm> {
    op.terms()
        .rev()
        .map(|(j, c)| OperatorTerm { coeff: c.to_string(), derivs: j.exponents().to_vec() })
        .collect()
}

pub fn diffop_from_terms(dim: usize, terms: &[OperatorTerm]) -> Result<DiffOp> {
    let mut op = DiffOp::zero(dim);
    for t in terms {
        if t.derivs.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: t.derivs.len() });
        }
        let coeff = parse_polynomial(&t.coeff, dim)?;
        op.add_term(MultiIndex::from_slice(&t.derivs), &coeff);
    }
    Ok(op)
}

/// The nonzero orders `r >= 1` of a series.
pub fn series_to_orders(series: &OperatorSeries) -> Vec<OperatorOrder> {
    series
        .terms()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, t)| !t.is_zero())
        .map(|(order, t)| OperatorOrder { order, terms: diffop_to_terms(t) })
        .collect()
}

/// Builds `I + Σ ν^r T_r`; the truncation order is the largest listed order, at least `min_order`.
pub fn series_from_orders(dim: usize, orders: &[OperatorOrder], min_order: usize) -> Result<OperatorSeries> {
    if let Some(o) = orders.iter().find(|o| o.order == 0) {
        return Err(Error::InvalidOperatorSeries(format!(
            "order 0 is the identity and cannot be listed ({} term(s) given)",
            o.terms.len()
        )));
    }
    let top = orders.iter().map(|o| o.order).max().unwrap_or(0).max(min_order);
    let mut higher = vec![DiffOp::zero(dim); top];
    for o in orders {
        let op = diffop_from_terms(dim, &o.terms)?;
        higher[o.order - 1] = higher[o.order - 1].checked_add(&op)?;
    }
    OperatorSeries::from_higher(dim, higher)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    #[test]
    fn round_trip() {
        let text = r#"[{"order": 1, "terms": [{"coeff": "1", "derivs": [2, 0]}]},
                       {"order": 2, "terms": [{"coeff": "x1", "derivs": [0, 3]}]}]"#;
        let orders: Vec<OperatorOrder> = serde_json::from_str(text).unwrap();
        let s = series_from_orders(2, &orders, 0).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.term(1), &DiffOp::partial(&[2, 0]));
        assert_eq!(s.term(2), &DiffOp::term(MultiIndex::from_slice(&[0, 3]), Polynomial::var(2, 0)));
        assert_eq!(series_to_orders(&s), orders);
        assert_eq!(series_from_orders(2, &orders, 4).unwrap().order(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = vec![OperatorOrder { order: 1, terms: vec![OperatorTerm { coeff: "1".into(), derivs: vec![0, 0] }] }];
        assert!(series_from_orders(2, &bad, 0).is_err());
        let bad = vec![OperatorOrder { order: 1, terms: vec![OperatorTerm { coeff: "x3".into(), derivs: vec![1, 0] }] }];
        assert!(series_from_orders(2, &bad, 0).is_err());
    }
}
