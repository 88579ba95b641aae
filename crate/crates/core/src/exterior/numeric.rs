use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::form::merge_sign;
use super::{mask_indices, Mask};

/// A form evaluated at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct NumForm {
    degree: usize,
    terms: BTreeMap<Mask, f64>,
}

impl NumForm {
    pub fn new(degree: usize, terms: BTreeMap<Mask, f64>) -> NumForm {
        NumForm { degree, terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, f64)> + '_ {
        self.terms.iter().map(|(m, v)| (*m, *v))
    }

    pub fn get(&self, mask: Mask) -> f64 {
        self.terms.get(&mask).copied().unwrap_or(0.0)
    }

    /// Largest absolute coefficient and where it sits.
    pub fn max_abs(&self) -> (f64, Option<Mask>) {
        self.terms
            .iter()
            .fold((0.0, None), |(best, at), (m, v)| {
                if v.abs() > best {
                    (v.abs(), Some(*m))
                } else {
                    (best, at)
                }
            })
    }

    pub fn sub(&self, other: &NumForm) -> NumForm {
        let mut terms = self.terms.clone();
        for (m, v) in &other.terms {
            *terms.entry(*m).or_insert(0.0) -= v;
        }
        NumForm::new(self.degree.max(other.degree), terms)
    }

    pub fn scale(&self, c: f64) -> NumForm {
        NumForm::new(
            self.degree,
            self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        )
    }

    pub fn wedge(&self, other: &NumForm) -> NumForm {
        let mut terms = BTreeMap::new();
        for (ma, va) in &self.terms {
            for (mb, vb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                *terms.entry(ma | mb).or_insert(0.0) += merge_sign(*ma, *mb) * va * vb;
            }
        }
        NumForm::new(self.degree + other.degree, terms)
    }

    /// Contraction with the coordinate vector `∂_i`.
    pub fn interior_coord(&self, i: usize) -> NumForm {
        let mut terms = BTreeMap::new();
        if self.degree == 0 {
            return NumForm::new(0, terms);
        }
        for (m, v) in &self.terms {
            if m & (1 << i) == 0 {
                continue;
            }
            let pos = (m & ((1u16 << i) - 1)).count_ones();
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            *terms.entry(m & !(1 << i)).or_insert(0.0) += sign * v;
        }
        NumForm::new(self.degree - 1, terms)
    }

    /// All indices raised with the inverse metric `ginv`.
    pub fn raise(&self, ginv: &DMatrix<f64>) -> NumForm {
        let n = ginv.nrows();
        let k = self.degree as u32;
        let mut terms = BTreeMap::new();
        if k == 0 {
            return self.clone();
        }
        let rows_all: Vec<Mask> = (0..1u32 << n)
            .map(|m| m as Mask)
            .filter(|m| m.count_ones() == k)
            .collect();
        for (cols, v) in &self.terms {
            let ci = mask_indices(*cols);
            for rows in &rows_all {
                let d = minor_det(ginv, &mask_indices(*rows), &ci);
                if d != 0.0 {
                    *terms.entry(*rows).or_insert(0.0) += d * v;
                }
            }
        }
        NumForm::new(self.degree, terms)
    }

    /// `⟨self, other⟩` with the inverse metric `ginv`.
    pub fn inner(&self, other: &NumForm, ginv: &DMatrix<f64>) -> f64 {
        assert_eq!(self.degree, other.degree, "inner product of unequal degrees");
        let mut s = 0.0;
        for (ma, va) in &self.terms {
            let ri = mask_indices(*ma);
            for (mb, vb) in &other.terms {
                let ci = mask_indices(*mb);
                s += va * vb * minor_det(ginv, &ri, &ci);
            }
        }
        s
    }
}

/// Determinant of the submatrix of `m` with the given rows and columns.
pub(crate) fn minor_det(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    match k {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        2 => {
            m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
                - m[(rows[0], cols[1])] * m[(rows[1], cols[0])]
        }
        _ => {
            let mut a = [[0.0f64; 11]; 11];
            for (r, &ri) in rows.iter().enumerate() {
                for (c, &ci) in cols.iter().enumerate() {
                    a[r][c] = m[(ri, ci)];
                }
            }
            let mut det = 1.0;
            for col in 0..k {
                let piv = (col..k)
                    .max_by(|x, y| a[*x][col].abs().total_cmp(&a[*y][col].abs()))
                    .unwrap();
                if a[piv][col] == 0.0 {
                    return 0.0;
                }
                if piv != col {
                    a.swap(piv, col);
                    det = -det;
                }
                det *= a[col][col];
                for r in col + 1..k {
                    let f = a[r][col] / a[col][col];
                    if f != 0.0 {
                        for c in col..k {
                            a[r][c] -= f * a[col][c];
                        }
                    }
                }
            }
            det
        }
    }
}
