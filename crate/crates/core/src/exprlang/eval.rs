use std::collections::HashMap;
use std::sync::Arc;

use super::{Expr, Node};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    NegativeSqrt,
    NonFinite,
}

#[derive(Debug, Clone, Error)]
pub enum EvalError {
    #[error("domain error ({kind:?}) in subexpression {expr:?}")]
    Domain { kind: DomainKind, expr: Expr },
    #[error("point has {got} coordinates but expression uses coordinate {needed}")]
    PointLength { got: usize, needed: usize },
}

impl Expr {
    /// Evaluates at a chart point in IEEE double precision.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        PointEvaluator::new(point).eval(self)
    }

    fn domain(&self, kind: DomainKind) -> EvalError {
        EvalError::Domain {
            kind,
            expr: self.clone(),
        }
    }
}

/// Evaluates expressions at one point, computing every shared subexpression
/// once. Symbolic inverses and Hodge duals are DAGs whose expanded trees can
/// be many orders of magnitude larger than the graph.
pub struct PointEvaluator<'p> {
    point: &'p [f64],
    cache: HashMap<*const Node, f64>,
    /// Keeps cached nodes alive so their addresses stay unique.
    keep: Vec<Expr>,
}

impl<'p> PointEvaluator<'p> {
    pub fn new(point: &'p [f64]) -> PointEvaluator<'p> {
        PointEvaluator {
            point,
            cache: HashMap::new(),
            keep: Vec::new(),
        }
    }

    pub fn point(&self) -> &'p [f64] {
        self.point
    }

    pub fn eval(&mut self, e: &Expr) -> Result<f64, EvalError> {
        let shared = Arc::strong_count(&e.0) > 1
            && !matches!(e.node(), Node::Const(_) | Node::Coord(_));
        let key = Arc::as_ptr(&e.0);
        if shared {
            if let Some(v) = self.cache.get(&key) {
                return Ok(*v);
            }
        }
        let v = self.compute(e)?;
        if shared {
            self.cache.insert(key, v);
            self.keep.push(e.clone());
        }
        Ok(v)
    }

    fn compute(&mut self, e: &Expr) -> Result<f64, EvalError> {
        let point = self.point;
        let v = match e.node() {
            Node::Const(c) => *c,
            Node::Coord(i) => *point.get(*i).ok_or(EvalError::PointLength {
                got: point.len(),
                needed: *i,
            })?,
            Node::Add(terms) => {
                let mut s = 0.0;
                for t in terms {
                    s += self.eval(t)?;
                }
                s
            }
            Node::Mul(factors) => {
                let mut p = 1.0;
                for f in factors {
                    p *= self.eval(f)?;
                }
                p
            }
            Node::Neg(a) => -self.eval(a)?,
            Node::Div(n, d) => {
                let den = self.eval(d)?;
                if den == 0.0 {
                    return Err(e.domain(DomainKind::DivisionByZero));
                }
                self.eval(n)? / den
            }
            Node::IntPow(b, k) => {
                let base = self.eval(b)?;
                if base == 0.0 && *k < 0 {
                    return Err(e.domain(DomainKind::DivisionByZero));
                }
                base.powi(*k)
            }
            Node::Sqrt(a) => {
                let x = self.eval(a)?;
                if x < 0.0 {
                    return Err(e.domain(DomainKind::NegativeSqrt));
                }
                x.sqrt()
            }
            Node::Exp(a) => self.eval(a)?.exp(),
            Node::Sin(a) => self.eval(a)?.sin(),
            Node::Cos(a) => self.eval(a)?.cos(),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(e.domain(DomainKind::NonFinite))
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::exprlang::{parse, Chart, DomainKind, EvalError};

    #[test]
    fn arithmetic_examples() {
        let c = Chart::new(&["u", "x1", "x2", "x3", "v"]).unwrap();
        let sq = parse("x1^2", &c).unwrap();
        assert_eq!(sq.eval(&[0.0, 2.0, 0.0, 0.0, 0.0]).unwrap(), 4.0);
        let h = parse("1/6 * u^2 * (x1^2+x2^2+x3^2)", &c).unwrap();
        let v = h.eval(&[1.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sqrt_of_negative_is_domain_error() {
        let c = Chart::new(&["u"]).unwrap();
        let e = parse("sqrt(u)", &c).unwrap();
        match e.eval(&[-1.0]) {
            Err(EvalError::Domain { kind, expr }) => {
                assert_eq!(kind, DomainKind::NegativeSqrt);
                assert_eq!(expr, e);
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn division_by_zero_reports_subexpression() {
        let c = Chart::new(&["u", "z"]).unwrap();
        let e = parse("u + 1/z", &c).unwrap();
        assert!(matches!(
            e.eval(&[1.0, 0.0]),
            Err(EvalError::Domain {
                kind: DomainKind::DivisionByZero,
                ..
            })
        ));
        assert!(matches!(e.eval(&[1.0]), Err(EvalError::PointLength { .. })));
    }
}
