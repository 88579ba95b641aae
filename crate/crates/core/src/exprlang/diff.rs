use super::ast::Memo;
use super::{Expr, Node};

/// Exact partial derivative with respect to coordinate `i`.
pub fn diff(e: &Expr, i: usize) -> Expr {
    diff_memo(e, i, &mut Memo::default())
}

fn diff_memo(e: &Expr, i: usize, memo: &mut Memo) -> Expr {
    if let Some(d) = memo.get(e) {
        return d;
    }
    let d = match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Coord(j) => {
            if *j == i {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(terms) => Expr::add(terms.iter().map(|t| diff_memo(t, i, memo)).collect()),
        Node::Mul(factors) => {
            let mut terms = Vec::new();
            for (k, f) in factors.iter().enumerate() {
                let df = diff_memo(f, i, memo);
                if df.is_zero() {
                    continue;
                }
                let mut prod: Vec<Expr> = Vec::with_capacity(factors.len());
                for (m, g) in factors.iter().enumerate() {
                    prod.push(if m == k { df.clone() } else { g.clone() });
                }
                terms.push(Expr::mul(prod));
            }
            Expr::add(terms)
        }
        Node::Neg(a) => Expr::neg(diff_memo(a, i, memo)),
        Node::Div(num, den) => {
            let dn = diff_memo(num, i, memo);
            let dd = diff_memo(den, i, memo);
            if dd.is_zero() {
                return Expr::div(dn, den.clone());
            }
            let top = Expr::sub(
                Expr::mul(vec![dn, den.clone()]),
                Expr::mul(vec![num.clone(), dd]),
            );
            Expr::div(top, Expr::powi(den.clone(), 2))
        }
        Node::IntPow(base, k) => {
            let db = diff_memo(base, i, memo);
            if db.is_zero() {
                return Expr::zero();
            }
            Expr::mul(vec![
                Expr::constant(*k as f64),
                Expr::powi(base.clone(), k - 1),
                db,
            ])
        }
        Node::Sqrt(a) => {
            let da = diff_memo(a, i, memo);
            if da.is_zero() {
                return Expr::zero();
            }
            Expr::div(da, Expr::mul(vec![Expr::constant(2.0), e.clone()]))
        }
        Node::Exp(a) => {
            let da = diff_memo(a, i, memo);
            if da.is_zero() {
                return Expr::zero();
            }
            Expr::mul(vec![e.clone(), da])
        }
        Node::Sin(a) => {
            let da = diff_memo(a, i, memo);
            if da.is_zero() {
                return Expr::zero();
            }
            Expr::mul(vec![Expr::cos(a.clone()), da])
        }
        Node::Cos(a) => {
            let da = diff_memo(a, i, memo);
            if da.is_zero() {
                return Expr::zero();
            }
            Expr::neg(Expr::mul(vec![Expr::sin(a.clone()), da]))
        }
    };
    memo.put(e, &d);
    d
}
