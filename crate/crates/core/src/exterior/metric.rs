use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{FormError, Mask};
use crate::exprlang::{Chart, Expr, PointEvaluator};

/// A hyperplane `x^coord = value` where the metric (or some field) is
/// singular. Sample points closer than the sampler's margin are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularHyperplane {
    pub coord: usize,
    pub value: f64,
}

/// Symmetric metric with symbolic entries, declared signature `(p, q)`
/// (q = number of negative eigenvalues) and a symbolic inverse.
#[derive(Debug, Clone)]
pub struct Metric {
    chart: Chart,
    entries: Vec<Vec<Expr>>,
    signature: (usize, usize),
    inverse: Vec<Vec<Expr>>,
    det: Expr,
    sqrt_abs_det: Expr,
    singular: Vec<SingularHyperplane>,
}

impl Metric {
    /// Builds a metric from a full matrix; off-diagonal pairs must agree.
    pub fn new(
        chart: &Chart,
        entries: Vec<Vec<Expr>>,
        signature: (usize, usize),
    ) -> Result<Metric, FormError> {
        let n = chart.dim();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(FormError::MetricShape(n));
        }
        if signature.0 + signature.1 != n {
            return Err(FormError::SignatureDimension {
                p: signature.0,
                q: signature.1,
                n,
            });
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(FormError::NotSymmetric(i, j));
                }
            }
        }
        let (inverse, det) = symbolic_inverse(&entries);
        let sign = if signature.1 % 2 == 0 { 1.0 } else { -1.0 };
        let sqrt_abs_det = Expr::sqrt(det.scale(sign));
        Ok(Metric {
            chart: chart.clone(),
            entries,
            signature,
            inverse,
            det,
            sqrt_abs_det,
            singular: Vec::new(),
        })
    }

    /// Builds a metric from its upper triangle (`g(i, j)` for `i <= j`).
    pub fn from_upper(
        chart: &Chart,
        upper: &[(usize, usize, Expr)],
        signature: (usize, usize),
    ) -> Result<Metric, FormError> {
        let n = chart.dim();
        let mut entries = vec![vec![Expr::zero(); n]; n];
        for (i, j, e) in upper {
            let (i, j) = if i <= j { (*i, *j) } else { (*j, *i) };
            if j >= n {
                return Err(FormError::IndexOutOfRange { index: j, dim: n });
            }
            entries[i][j] = e.clone();
            entries[j][i] = e.clone();
        }
        Metric::new(chart, entries, signature)
    }

    pub fn diagonal(
        chart: &Chart,
        diag: Vec<Expr>,
        signature: (usize, usize),
    ) -> Result<Metric, FormError> {
        let upper: Vec<_> = diag.into_iter().enumerate().map(|(i, e)| (i, i, e)).collect();
        Metric::from_upper(chart, &upper, signature)
    }

    pub fn with_singular(mut self, planes: Vec<SingularHyperplane>) -> Metric {
        self.singular = planes;
        self
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    /// Number of negative eigenvalues.
    pub fn negatives(&self) -> usize {
        self.signature.1
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<Expr>] {
        &self.entries
    }

    pub fn inverse_entry(&self, i: usize, j: usize) -> &Expr {
        &self.inverse[i][j]
    }

    pub fn det(&self) -> &Expr {
        &self.det
    }

    pub fn sqrt_abs_det(&self) -> &Expr {
        &self.sqrt_abs_det
    }

    pub fn singular(&self) -> &[SingularHyperplane] {
        &self.singular
    }

    /// Bitmask of the coordinates coupled to `i` through the inverse metric.
    pub(crate) fn inverse_neighbors(&self, i: usize) -> Mask {
        (0..self.dim())
            .filter(|&j| !self.inverse[i][j].is_zero())
            .fold(0, |m, j| m | (1 << j))
    }

    /// Numeric metric matrix at a point.
    pub fn eval(&self, point: &[f64]) -> Result<DMatrix<f64>, FormError> {
        let n = self.dim();
        let mut ev = PointEvaluator::new(point);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = ev.eval(&self.entries[i][j])?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Numeric inverse by LU of the evaluated matrix, independent of the
    /// symbolic adjugate.
    pub fn eval_inverse(&self, point: &[f64]) -> Result<DMatrix<f64>, FormError> {
        self.eval(point)?
            .try_inverse()
            .ok_or_else(|| FormError::SingularMetric(point.to_vec()))
    }

    /// Checks invertibility and the declared count of negative eigenvalues.
    pub fn check_signature(&self, point: &[f64]) -> Result<(), FormError> {
        let m = self.eval(point)?;
        let eig = SymmetricEigen::new(m);
        let scale = eig.eigenvalues.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if eig.eigenvalues.iter().any(|v| v.abs() <= 1e-12 * scale) {
            return Err(FormError::SingularMetric(point.to_vec()));
        }
        let q = eig.eigenvalues.iter().filter(|v| **v < 0.0).count();
        if q != self.signature.1 {
            return Err(FormError::SignatureMismatch {
                declared: self.signature.1,
                found: q,
            });
        }
        Ok(())
    }

    /// `m(X, Y)` as an expression.
    pub fn apply(&self, x: &[Expr], y: &[Expr]) -> Expr {
        let mut terms = Vec::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if x[i].is_zero() || y[j].is_zero() || self.entries[i][j].is_zero() {
                    continue;
                }
                terms.push(Expr::mul(vec![
                    self.entries[i][j].clone(),
                    x[i].clone(),
                    y[j].clone(),
                ]));
            }
        }
        Expr::add(terms)
    }

    /// The metric with every entry negated (signature flipped).
    pub fn negated(&self) -> Metric {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|e| Expr::neg(e.clone())).collect())
            .collect();
        let (p, q) = self.signature;
        Metric::new(&self.chart, entries, (q, p))
            .expect("negation preserves shape")
            .with_singular(self.singular.clone())
    }
}

/// Inverse and determinant of a symmetric matrix of expressions.
///
/// The coordinates are split into the connected components of the sparsity
/// graph; each component is inverted through its adjugate, with minors
/// computed by memoized Laplace expansion that skips literal zeros.
pub(crate) fn symbolic_inverse(m: &[Vec<Expr>]) -> (Vec<Vec<Expr>>, Expr) {
    let n = m.len();
    let mut inverse = vec![vec![Expr::zero(); n]; n];
    let mut dets = Vec::new();
    for comp in components(m) {
        let sub: Vec<Vec<Expr>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| m[i][j].clone()).collect())
            .collect();
        let k = comp.len();
        let mut minors = Minors::new(&sub);
        let full: Mask = if k == 16 { u16::MAX } else { (1 << k) - 1 };
        let det = minors.det(full, full);
        for (a, &i) in comp.iter().enumerate() {
            for (b, &j) in comp.iter().enumerate() {
                // inv[a][b] = cofactor(b, a) / det
                let minor = minors.det(full & !(1 << b), full & !(1 << a));
                if minor.is_zero() {
                    continue;
                }
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                inverse[i][j] = Expr::div(minor.scale(sign), det.clone());
            }
        }
        dets.push(det);
    }
    (inverse, Expr::mul(dets))
}

fn components(m: &[Vec<Expr>]) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for j in 0..n {
                if !seen[j] && !(m[i][j].is_zero() && m[j][i].is_zero()) {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Memoized determinants of square submatrices selected by row/column masks.
pub(crate) struct Minors<'a> {
    m: &'a [Vec<Expr>],
    memo: HashMap<(Mask, Mask), Expr>,
}

impl<'a> Minors<'a> {
    pub(crate) fn new(m: &'a [Vec<Expr>]) -> Self {
        Minors {
            m,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn det(&mut self, rows: Mask, cols: Mask) -> Expr {
        debug_assert_eq!(rows.count_ones(), cols.count_ones());
        if rows == 0 {
            return Expr::one();
        }
        if let Some(e) = self.memo.get(&(rows, cols)) {
            return e.clone();
        }
        let r = rows.trailing_zeros() as usize;
        let rest = rows & !(1 << r);
        let mut terms = Vec::new();
        let mut c_rest = cols;
        let mut pos = 0;
        while c_rest != 0 {
            let c = c_rest.trailing_zeros() as usize;
            c_rest &= c_rest - 1;
            let entry = &self.m[r][c];
            if !entry.is_zero() {
                let sub = self.det(rest, cols & !(1 << c));
                if !sub.is_zero() {
                    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                    terms.push(Expr::mul(vec![Expr::constant(sign), entry.clone(), sub]));
                }
            }
            pos += 1;
        }
        let d = Expr::add(terms);
        self.memo.insert((rows, cols), d.clone());
        d
    }
}
