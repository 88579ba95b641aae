use std::collections::BTreeMap;

use super::CatalogError;
use crate::exprlang::{Expr, Node};
use crate::geometry::{V, X};

/// Exponents of (x1, x2, x3).
type Mono = [u32; 3];

/// Polynomial in x1, x2, x3 with coefficients that may depend on u.
#[derive(Debug, Clone, Default)]
struct Poly(BTreeMap<Mono, Expr>);

impl Poly {
    fn constant(c: Expr) -> Poly {
        let mut p = Poly::default();
        p.push([0, 0, 0], c);
        p
    }

    fn push(&mut self, m: Mono, c: Expr) {
        if c.is_zero() {
            return;
        }
        let merged = match self.0.remove(&m) {
            Some(old) => Expr::add(vec![old, c]),
            None => c,
        };
        if !merged.is_zero() {
            self.0.insert(m, merged);
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.push(*m, c.clone());
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
                out.push(m, Expr::mul(vec![ca.clone(), cb.clone()]));
            }
        }
        out
    }

    fn scale(&self, c: &Expr) -> Poly {
        let mut out = Poly::default();
        for (m, e) in &self.0 {
            out.push(*m, Expr::mul(vec![c.clone(), e.clone()]));
        }
        out
    }

    fn is_constant(&self) -> bool {
        self.0.keys().all(|m| *m == [0, 0, 0])
    }

    /// `∫∫ · dx1 dx1` with zero integration constants.
    fn integrate_x1_twice(&self) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.0 {
            let n = m[0] as f64;
            out.push([m[0] + 2, m[1], m[2]], c.scale(1.0 / ((n + 1.0) * (n + 2.0))));
        }
        out
    }

    /// `∂²/∂x2² + ∂²/∂x3²`.
    fn transverse_laplacian(&self) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.0 {
            for k in [1, 2] {
                if m[k] >= 2 {
                    let mut e = *m;
                    e[k] -= 2;
                    out.push(e, c.scale((m[k] * (m[k] - 1)) as f64));
                }
            }
        }
        out
    }

    fn to_expr(&self) -> Expr {
        let terms = self
            .0
            .iter()
            .map(|(m, c)| {
                let mut f = vec![c.clone()];
                for (k, &p) in m.iter().enumerate() {
                    if p > 0 {
                        f.push(Expr::powi(Expr::coord(X[k]), p as i32));
                    }
                }
                Expr::mul(f)
            })
            .collect();
        Expr::add(terms)
    }
}

fn depends_on_x(e: &Expr) -> bool {
    X.iter().any(|&i| e.depends_on(i))
}

/// Reads `e` as a polynomial in x with u-dependent coefficients.
fn to_poly(e: &Expr) -> Result<Poly, CatalogError> {
    if e.depends_on(V) {
        return Err(CatalogError::RhsDependsOnV);
    }
    if !depends_on_x(e) {
        return Ok(Poly::constant(e.clone()));
    }
    match e.node() {
        Node::Coord(i) => {
            let k = X.iter().position(|x| x == i).expect("x coordinate");
            let mut m = [0, 0, 0];
            m[k] = 1;
            let mut p = Poly::default();
            p.push(m, Expr::one());
            Ok(p)
        }
        Node::Add(v) => v
            .iter()
            .try_fold(Poly::default(), |acc, t| Ok(acc.add(&to_poly(t)?))),
        Node::Mul(v) => v
            .iter()
            .try_fold(Poly::constant(Expr::one()), |acc, t| Ok(acc.mul(&to_poly(t)?))),
        Node::Neg(a) => Ok(to_poly(a)?.scale(&Expr::constant(-1.0))),
        Node::Div(n, d) if !depends_on_x(d) => {
            Ok(to_poly(n)?.scale(&Expr::div(Expr::one(), d.clone())))
        }
        Node::IntPow(b, k) if *k >= 0 => {
            let base = to_poly(b)?;
            Ok((0..*k).fold(Poly::constant(Expr::one()), |acc, _| acc.mul(&base)))
        }
        _ => Err(CatalogError::NonPolynomialRhs(format!("{e:?}"))),
    }
}

/// Solves `Δ_ρ H = rhs` for flat `ρ = −Σ dxⁱ²` (so `Δ_ρ = −Σ ∂²_{xⁱ}`) on
/// the Walker chart `(u, x1, x2, x3, v)`.
///
/// A right-hand side constant in x, `c₀(u)`, gives `−c₀/6 · Σ(xⁱ)²`.
/// Otherwise H is built by double antidifferentiation in x1 with zero
/// constants, correcting for any x2/x3 dependence until it terminates.
pub fn solve_walker_h(rhs: &Expr) -> Result<Expr, CatalogError> {
    let r = to_poly(rhs)?;
    if r.is_constant() {
        let c0 = r.0.get(&[0, 0, 0]).cloned().unwrap_or_else(Expr::zero);
        let sum = Expr::add(X.iter().map(|&i| Expr::powi(Expr::coord(i), 2)).collect());
        return Ok(Expr::mul(vec![c0.scale(-1.0 / 6.0), sum]));
    }
    // H = I(−r) − I(T H), expanded as a terminating Neumann series.
    let mut term = r.scale(&Expr::constant(-1.0)).integrate_x1_twice();
    let mut h = Poly::default();
    while !term.0.is_empty() {
        h = h.add(&term);
        term = term
            .transverse_laplacian()
            .integrate_x1_twice()
            .scale(&Expr::constant(-1.0));
    }
    Ok(h.to_expr())
}
