use std::collections::BTreeMap;

use super::{mask_indices, FormError, Mask};
use crate::exprlang::{Chart, Expr, PointEvaluator};

/// Sparse differential k-form on a chart.
///
/// Keys are bitmasks of the (strictly increasing) index tuple, so the degree
/// of every key is its popcount and ordering is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<Mask, Expr>,
}

/// Sign of `dx^I ∧ dx^J` relative to `dx^{I∪J}` for disjoint masks.
pub fn merge_sign(i: Mask, j: Mask) -> f64 {
    let mut inversions = 0u32;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        inversions += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Number of set bits in `mask` strictly below bit `i`.
pub(crate) fn bits_below(mask: Mask, i: usize) -> u32 {
    (mask & ((1u16 << i) - 1)).count_ones()
}

impl KForm {
    pub fn zero(chart: &Chart, degree: usize) -> KForm {
        KForm {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(chart: &Chart, f: Expr) -> KForm {
        let mut form = KForm::zero(chart, 0);
        form.accumulate(0, f);
        form
    }

    /// `dx^i`.
    pub fn dx(chart: &Chart, i: usize) -> KForm {
        assert!(i < chart.dim(), "coordinate {i} outside chart");
        let mut form = KForm::zero(chart, 1);
        form.accumulate(1 << i, Expr::one());
        form
    }

    /// Builds `coeff · dx^{i1} ∧ … ∧ dx^{ik}` for indices in any order.
    /// Repeated indices give the zero form.
    pub fn monomial(chart: &Chart, coeff: Expr, indices: &[usize]) -> Result<KForm, FormError> {
        let mut form = KForm::zero(chart, indices.len());
        let mut mask: Mask = 0;
        let mut sign = 1.0;
        for &i in indices {
            if i >= chart.dim() {
                return Err(FormError::IndexOutOfRange {
                    index: i,
                    dim: chart.dim(),
                });
            }
            if mask & (1 << i) != 0 {
                return Ok(form);
            }
            // moving dx^i left past the already-placed larger indices
            let above = (mask >> i).count_ones();
            if above % 2 == 1 {
                sign = -sign;
            }
            mask |= 1 << i;
        }
        form.accumulate(mask, coeff.scale(sign));
        Ok(form)
    }

    /// Builds a form from `(sorted index tuple, coefficient)` pairs.
    pub fn from_terms<I>(chart: &Chart, degree: usize, terms: I) -> Result<KForm, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let mut form = KForm::zero(chart, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(FormError::DegreeMismatch {
                    left: degree,
                    right: idx.len(),
                });
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FormError::UnsortedIndices(idx));
            }
            form = form.add(&KForm::monomial(chart, c, &idx)?)?;
        }
        Ok(form)
    }

    pub(crate) fn from_mask_terms(
        chart: &Chart,
        degree: usize,
        terms: BTreeMap<Mask, Expr>,
    ) -> KForm {
        let mut form = KForm::zero(chart, degree);
        for (m, c) in terms {
            debug_assert_eq!(m.count_ones() as usize, degree);
            form.accumulate(m, c);
        }
        form
    }

    pub(crate) fn accumulate(&mut self, mask: Mask, c: Expr) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&mask) {
            Some(old) => Expr::add(vec![old, c]),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(mask, merged);
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn masks(&self) -> impl Iterator<Item = (Mask, &Expr)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    /// Terms as (sorted index tuple, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> {
        self.terms.iter().map(|(m, c)| (mask_indices(*m), c))
    }

    /// Coefficient of `dx^{i1}∧…∧dx^{ik}` for a sorted tuple.
    pub fn coeff(&self, indices: &[usize]) -> Expr {
        let mask = indices.iter().fold(0 as Mask, |m, &i| m | (1 << i));
        self.terms.get(&mask).cloned().unwrap_or_else(Expr::zero)
    }

    /// Bitmask of all coordinates appearing in some index tuple.
    pub fn support_mask(&self) -> Mask {
        self.terms.keys().fold(0, |acc, m| acc | m)
    }

    /// Coordinates that some coefficient depends on.
    pub fn coefficient_coords(&self) -> std::collections::BTreeSet<usize> {
        self.terms.values().flat_map(|c| c.coords()).collect()
    }

    fn same_chart(&self, other: &KForm) -> Result<(), FormError> {
        if self.chart != other.chart {
            Err(FormError::ChartMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &KForm) -> Result<KForm, FormError> {
        self.same_chart(other)?;
        if self.degree != other.degree {
            // the zero form of any degree is absorbed
            if other.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(other.clone());
            }
            return Err(FormError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> KForm {
        self.scale_const(-1.0)
    }

    pub fn scale_const(&self, c: f64) -> KForm {
        self.scale(&Expr::constant(c))
    }

    pub fn scale(&self, f: &Expr) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree);
        for (m, c) in &self.terms {
            out.accumulate(*m, Expr::mul(vec![f.clone(), c.clone()]));
        }
        out
    }

    /// Exterior product. Degrees adding past the chart dimension give the
    /// zero form of that (empty) degree.
    pub fn wedge(&self, other: &KForm) -> Result<KForm, FormError> {
        self.same_chart(other)?;
        let degree = self.degree + other.degree;
        let mut out = KForm::zero(&self.chart, degree);
        if degree > self.dim() {
            return Ok(out);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let sign = merge_sign(*ma, *mb);
                out.accumulate(
                    ma | mb,
                    Expr::mul(vec![Expr::constant(sign), ca.clone(), cb.clone()]),
                );
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn ext_d(&self) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree + 1);
        if self.degree >= self.dim() {
            return out;
        }
        for (m, c) in &self.terms {
            for i in 0..self.dim() {
                if m & (1 << i) != 0 {
                    continue;
                }
                let dc = c.diff(i);
                if dc.is_zero() {
                    continue;
                }
                let sign = if bits_below(*m, i) % 2 == 0 { 1.0 } else { -1.0 };
                out.accumulate(m | (1 << i), dc.scale(sign));
            }
        }
        out
    }

    /// Contraction `X ⌟ a` with a vector field given by its coordinate
    /// components.
    pub fn interior(&self, x: &[Expr]) -> Result<KForm, FormError> {
        if x.len() != self.dim() {
            return Err(FormError::VectorLength {
                got: x.len(),
                dim: self.dim(),
            });
        }
        if self.degree == 0 {
            return Ok(KForm::zero(&self.chart, 0));
        }
        let mut out = KForm::zero(&self.chart, self.degree - 1);
        for (m, c) in &self.terms {
            for (pos, i) in mask_indices(*m).into_iter().enumerate() {
                if x[i].is_zero() {
                    continue;
                }
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.accumulate(
                    m & !(1 << i),
                    Expr::mul(vec![Expr::constant(sign), x[i].clone(), c.clone()]),
                );
            }
        }
        Ok(out)
    }

    /// Contraction with the coordinate vector field `∂_i`.
    pub fn interior_coord(&self, i: usize) -> KForm {
        let mut x = vec![Expr::zero(); self.dim()];
        x[i] = Expr::one();
        self.interior(&x).expect("vector has chart length")
    }

    /// Re-expresses the form on `target`, sending coordinate `i` to `map[i]`
    /// in both index tuples and coefficients.
    pub fn embed(&self, target: &Chart, map: &[usize]) -> Result<KForm, FormError> {
        if map.len() != self.dim() || map.iter().any(|&t| t >= target.dim()) {
            return Err(FormError::BadEmbedding);
        }
        let f = |i: usize| map[i];
        let mut out = KForm::zero(target, self.degree);
        for (m, c) in &self.terms {
            let idx: Vec<usize> = mask_indices(*m).into_iter().map(f).collect();
            let piece = KForm::monomial(target, c.map_coords(&f), &idx)?;
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// Evaluates every coefficient.
    pub fn eval(&self, point: &[f64]) -> Result<super::NumForm, FormError> {
        let mut ev = PointEvaluator::new(point);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = ev.eval(c)?;
            if v != 0.0 {
                terms.insert(*m, v);
            }
        }
        Ok(super::NumForm::new(self.degree, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;

    fn walker() -> Chart {
        Chart::new(&["u", "x1", "x2", "x3", "v"]).unwrap()
    }

    #[test]
    fn du_wedge_du_vanishes() {
        let c = walker();
        let du = KForm::dx(&c, 0);
        assert!(du.wedge(&du).unwrap().is_zero());
    }

    #[test]
    fn wedge_of_coordinate_forms() {
        let c = walker();
        let a = KForm::dx(&c, 1).wedge(&KForm::dx(&c, 2)).unwrap();
        let b = a.wedge(&KForm::dx(&c, 3)).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.coeff(&[1, 2, 3]).is_one());
        // reversed order picks up the sign of the permutation
        let r = KForm::dx(&c, 3)
            .wedge(&KForm::dx(&c, 2))
            .unwrap()
            .wedge(&KForm::dx(&c, 1))
            .unwrap();
        assert_eq!(r.coeff(&[1, 2, 3]).as_const(), Some(-1.0));
    }

    #[test]
    fn d_of_x1_dx2() {
        let c = walker();
        let a = KForm::monomial(&c, Expr::coord(1), &[2]).unwrap();
        let da = a.ext_d();
        assert_eq!(da.len(), 1);
        assert!(da.coeff(&[1, 2]).is_one());
    }

    #[test]
    fn closed_alpha_has_zero_derivative() {
        let c = walker();
        let f = parse("u^3 + sin(u)", &c).unwrap();
        let alpha = KForm::monomial(&c, f, &[0, 1, 2, 3]).unwrap();
        assert!(alpha.ext_d().is_zero());
    }

    #[test]
    fn interior_examples() {
        let c = walker();
        let du_dx1 = KForm::dx(&c, 0).wedge(&KForm::dx(&c, 1)).unwrap();
        // ∂u⌟(du∧dx1) = dx1
        assert_eq!(du_dx1.interior_coord(0), KForm::dx(&c, 1));
        assert!(du_dx1.interior_coord(2).is_zero());
        // ∂v⌟(du∧dv) = -du
        let du_dv = KForm::dx(&c, 0).wedge(&KForm::dx(&c, 4)).unwrap();
        assert_eq!(du_dv.interior_coord(4), KForm::dx(&c, 0).neg());

        let y = Chart::new(&["y1", "y2", "y3", "y4", "y5", "y6"]).unwrap();
        let w = KForm::from_terms(
            &y,
            2,
            vec![
                (vec![0, 1], Expr::one()),
                (vec![2, 3], Expr::one()),
                (vec![4, 5], Expr::one()),
            ],
        )
        .unwrap();
        assert_eq!(w.interior_coord(0), KForm::dx(&y, 1));
    }

    #[test]
    fn zero_form_flows_through() {
        let c = walker();
        let z = KForm::zero(&c, 2);
        assert!(z.ext_d().is_zero());
        assert!(z.wedge(&KForm::dx(&c, 0)).unwrap().is_zero());
        assert!(z.interior_coord(0).is_zero());
        assert!(KForm::zero(&c, 0).interior_coord(0).is_zero());
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        let a = KForm::dx(&walker(), 0);
        let other = Chart::new(&["t"]).unwrap();
        assert!(matches!(
            a.wedge(&KForm::dx(&other, 0)),
            Err(FormError::ChartMismatch)
        ));
    }

    #[test]
    fn merge_sign_counts_inversions() {
        // dx2 ∧ dx0 = -dx0∧dx2
        assert_eq!(merge_sign(0b100, 0b001), -1.0);
        assert_eq!(merge_sign(0b001, 0b100), 1.0);
        // (dx1∧dx2) ∧ dx0 = dx0∧dx1∧dx2
        assert_eq!(merge_sign(0b110, 0b001), 1.0);
    }
}
