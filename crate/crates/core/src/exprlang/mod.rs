//! Scalar expressions over chart coordinates: AST, parser, exact
//! differentiation and point evaluation.

mod ast;
mod chart;
mod diff;
mod eval;
mod parse;

pub use ast::{Expr, Node};
pub use chart::{Chart, MAX_DIM};
pub use diff::diff;
pub use eval::{DomainKind, EvalError, PointEvaluator};
pub use parse::parse;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("malformed exponent '{text}' at byte {pos}: expected a signed integer")]
    MalformedExponent { pos: usize, text: String },
    #[error("chart dimension {0} outside 1..=11")]
    ChartDimension(usize),
    #[error("duplicate coordinate name '{0}'")]
    DuplicateCoordinate(String),
    #[error("'{0}' is not a usable coordinate name")]
    BadCoordinateName(String),
}

impl Expr {
    pub fn diff(&self, i: usize) -> Expr {
        diff(self, i)
    }

    /// Renders the expression in the input grammar using the chart's
    /// coordinate names. `parse(e.to_text(c), c)` evaluates like `e`.
    pub fn to_text(&self, chart: &Chart) -> String {
        let mut s = String::new();
        write_text(self, chart, &mut s);
        s
    }
}

fn write_text(e: &Expr, chart: &Chart, out: &mut String) {
    use std::fmt::Write;
    match e.node() {
        Node::Const(c) => {
            if *c < 0.0 {
                let _ = write!(out, "(-{:?})", -c);
            } else {
                let _ = write!(out, "{c:?}");
            }
        }
        Node::Coord(i) => out.push_str(chart.name(*i)),
        Node::Add(terms) => {
            out.push('(');
            for (k, t) in terms.iter().enumerate() {
                if k > 0 {
                    out.push_str(" + ");
                }
                write_text(t, chart, out);
            }
            out.push(')');
        }
        Node::Mul(factors) => {
            out.push('(');
            for (k, f) in factors.iter().enumerate() {
                if k > 0 {
                    out.push_str(" * ");
                }
                write_text(f, chart, out);
            }
            out.push(')');
        }
        Node::Neg(a) => {
            out.push_str("(-");
            write_text(a, chart, out);
            out.push(')');
        }
        Node::Div(n, d) => {
            out.push('(');
            write_text(n, chart, out);
            out.push_str(" / ");
            write_text(d, chart, out);
            out.push(')');
        }
        Node::IntPow(b, k) => {
            out.push('(');
            write_text(b, chart, out);
            let _ = write!(out, ")^{k}");
        }
        Node::Sqrt(a) | Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => {
            let name = match e.node() {
                Node::Sqrt(_) => "sqrt",
                Node::Exp(_) => "exp",
                Node::Sin(_) => "sin",
                _ => "cos",
            };
            out.push_str(name);
            out.push('(');
            write_text(a, chart, out);
            out.push(')');
        }
    }
}
