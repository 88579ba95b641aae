use std::collections::BTreeMap;

use super::form::merge_sign;
use super::metric::Minors;
use super::{FormError, KForm, Mask, Metric, NumForm};
use crate::exprlang::Expr;

/// Sign of a permutation given as a list of distinct indices `0..n`.
pub fn permutation_sign(order: &[usize]) -> Result<f64, FormError> {
    let n = order.len();
    let mut seen = vec![false; n];
    for &o in order {
        if o >= n || seen[o] {
            return Err(FormError::BadOrientation);
        }
        seen[o] = true;
    }
    let mut inversions = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if order[i] > order[j] {
                inversions += 1;
            }
        }
    }
    Ok(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// The identity orientation `(0, 1, …, n-1)`.
pub fn standard_orientation(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// `vol = √|det m| dx^{o1} ∧ … ∧ dx^{on}`.
pub fn volume_form(m: &Metric, orientation: &[usize]) -> Result<KForm, FormError> {
    if orientation.len() != m.dim() {
        return Err(FormError::BadOrientation);
    }
    let sign = permutation_sign(orientation)?;
    let n = m.dim();
    let full: Mask = ((1u32 << n) - 1) as Mask;
    let mut terms = BTreeMap::new();
    terms.insert(full, m.sqrt_abs_det().scale(sign));
    Ok(KForm::from_mask_terms(m.chart(), n, terms))
}

/// Components `a^I` (sorted index sets) of a form with all indices raised by
/// the symbolic inverse metric.
pub fn raise_indices(a: &KForm, m: &Metric) -> BTreeMap<Mask, Expr> {
    let inv: Vec<Vec<Expr>> = (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.inverse_entry(i, j).clone()).collect())
        .collect();
    let neighbors: Vec<Mask> = (0..m.dim()).map(|i| m.inverse_neighbors(i)).collect();
    let mut minors = Minors::new(&inv);
    let k = a.degree() as u32;
    let mut raised: BTreeMap<Mask, Vec<Expr>> = BTreeMap::new();
    for (cols, coeff) in a.masks() {
        let mut cand: Mask = 0;
        let mut rest = cols;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            cand |= neighbors[j];
            rest &= rest - 1;
        }
        // every k-subset of the candidate rows
        let mut sub = cand;
        loop {
            if sub.count_ones() == k {
                let det = minors.det(sub, cols);
                if !det.is_zero() {
                    raised
                        .entry(sub)
                        .or_default()
                        .push(Expr::mul(vec![det, coeff.clone()]));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & cand;
        }
    }
    raised
        .into_iter()
        .map(|(mask, terms)| (mask, Expr::add(terms)))
        .filter(|(_, e)| !e.is_zero())
        .collect()
}

/// Symbolic Hodge star, defined by `a ∧ ★b = ⟨a, b⟩ vol` with
/// `vol = √|det m| dx^{o1}∧…∧dx^{on}` for the given orientation.
pub fn hodge(a: &KForm, m: &Metric, orientation: &[usize]) -> Result<KForm, FormError> {
    if a.chart() != m.chart() {
        return Err(FormError::ChartMismatch);
    }
    if orientation.len() != m.dim() {
        return Err(FormError::BadOrientation);
    }
    let osign = permutation_sign(orientation)?;
    let n = m.dim();
    let full: Mask = ((1u32 << n) - 1) as Mask;
    let mut out = BTreeMap::new();
    for (i, up) in raise_indices(a, m) {
        let k = full & !i;
        let sign = merge_sign(i, k) * osign;
        out.insert(
            k,
            Expr::mul(vec![Expr::constant(sign), m.sqrt_abs_det().clone(), up]),
        );
    }
    Ok(KForm::from_mask_terms(m.chart(), n - a.degree(), out))
}

/// Hodge star with the chart's coordinate order as orientation.
pub fn hodge_std(a: &KForm, m: &Metric) -> Result<KForm, FormError> {
    hodge(a, m, &standard_orientation(m.dim()))
}

/// Induced inner product `⟨a, b⟩ = 1/k! Σ a_{i…} b_{j…} m^{i j}…` at a point.
pub fn form_inner(a: &KForm, b: &KForm, m: &Metric, point: &[f64]) -> Result<f64, FormError> {
    if a.chart() != m.chart() || b.chart() != m.chart() {
        return Err(FormError::ChartMismatch);
    }
    if a.degree() != b.degree() {
        return Err(FormError::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    let inv = m.eval_inverse(point)?;
    Ok(a.eval(point)?.inner(&b.eval(point)?, &inv))
}

/// `‖a‖²` at a point.
pub fn norm_sq(a: &KForm, m: &Metric, point: &[f64]) -> Result<f64, FormError> {
    form_inner(a, a, m, point)
}

/// Numeric Hodge star of an evaluated form, for cross-checks.
pub fn hodge_numeric(
    a: &NumForm,
    ginv: &nalgebra::DMatrix<f64>,
    sqrt_abs_det: f64,
    orientation_sign: f64,
) -> NumForm {
    let n = ginv.nrows();
    let full: Mask = ((1u32 << n) - 1) as Mask;
    let raised = a.raise(ginv);
    let mut out = BTreeMap::new();
    for (i, v) in raised.terms() {
        let k = full & !i;
        out.insert(k, merge_sign(i, k) * orientation_sign * sqrt_abs_det * v);
    }
    NumForm::new(n - a.degree(), out)
}
