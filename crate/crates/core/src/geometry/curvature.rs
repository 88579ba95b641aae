use nalgebra::DMatrix;

use crate::exprlang::{Expr, PointEvaluator};
use crate::exterior::{FormError, Metric};

/// Christoffel symbols of the second kind, `gamma[k][i][j] = Γ^k_{ij}`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub gamma: Vec<Vec<Vec<Expr>>>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> &Expr {
        &self.gamma[k][i][j]
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<Vec<Vec<f64>>>, FormError> {
        let mut ev = PointEvaluator::new(point);
        self.gamma
            .iter()
            .map(|gk| {
                gk.iter()
                    .map(|row| row.iter().map(|e| ev.eval(e).map_err(FormError::from)).collect())
                    .collect()
            })
            .collect()
    }
}

/// `Γ^k_{ij} = ½ m^{kl}(∂_i m_{jl} + ∂_j m_{il} − ∂_l m_{ij})`, symbolic.
pub fn christoffel(m: &Metric) -> Christoffel {
    let n = m.dim();
    // lowered symbols Γ_{l ij}
    let mut lower = vec![vec![vec![Expr::zero(); n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let e = Expr::add(vec![
                    m.entry(j, l).diff(i),
                    m.entry(i, l).diff(j),
                    Expr::neg(m.entry(i, j).diff(l)),
                ])
                .scale(0.5);
                lower[l][i][j] = e.clone();
                lower[l][j][i] = e;
            }
        }
    }
    let mut gamma = vec![vec![vec![Expr::zero(); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let terms: Vec<Expr> = (0..n)
                    .filter(|&l| !m.inverse_entry(k, l).is_zero() && !lower[l][i][j].is_zero())
                    .map(|l| Expr::mul(vec![m.inverse_entry(k, l).clone(), lower[l][i][j].clone()]))
                    .collect();
                let e = Expr::add(terms);
                gamma[k][i][j] = e.clone();
                gamma[k][j][i] = e;
            }
        }
    }
    Christoffel { gamma }
}

/// Ricci tensor `R_{ij} = ∂_k Γ^k_{ij} − ∂_j Γ^k_{ik} + Γ^k_{kl}Γ^l_{ij} − Γ^k_{jl}Γ^l_{ik}`,
/// symbolic. With this convention a pp-wave has `Ric = −½ Δ_ρ(H) du²`.
pub fn ricci(m: &Metric) -> Vec<Vec<Expr>> {
    let n = m.dim();
    let ch = christoffel(m);
    let g = &ch.gamma;
    let trace: Vec<Expr> = (0..n)
        .map(|l| Expr::add((0..n).map(|k| g[k][k][l].clone()).collect()))
        .collect();
    let mut ric = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut terms = Vec::new();
            for k in 0..n {
                terms.push(g[k][i][j].diff(k));
            }
            terms.push(Expr::neg(trace[i].diff(j)));
            for l in 0..n {
                if !g[l][i][j].is_zero() && !trace[l].is_zero() {
                    terms.push(Expr::mul(vec![trace[l].clone(), g[l][i][j].clone()]));
                }
            }
            for k in 0..n {
                for l in 0..n {
                    if !g[k][j][l].is_zero() && !g[l][i][k].is_zero() {
                        terms.push(Expr::neg(Expr::mul(vec![
                            g[k][j][l].clone(),
                            g[l][i][k].clone(),
                        ])));
                    }
                }
            }
            let e = Expr::add(terms);
            ric[i][j] = e.clone();
            ric[j][i] = e;
        }
    }
    ric
}

/// `Δ s = Σ m^{ij}(∂_i∂_j s − Γ^k_{ij}∂_k s)`, symbolic.
pub fn laplace_beltrami(m: &Metric, s: &Expr) -> Expr {
    let n = m.dim();
    let ch = christoffel(m);
    let grad: Vec<Expr> = (0..n).map(|k| s.diff(k)).collect();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let inv = m.inverse_entry(i, j);
            if inv.is_zero() {
                continue;
            }
            let mut inner = vec![grad[i].diff(j)];
            for k in 0..n {
                if !ch.gamma[k][i][j].is_zero() && !grad[k].is_zero() {
                    inner.push(Expr::neg(Expr::mul(vec![
                        ch.gamma[k][i][j].clone(),
                        grad[k].clone(),
                    ])));
                }
            }
            terms.push(Expr::mul(vec![inv.clone(), Expr::add(inner)]));
        }
    }
    Expr::add(terms)
}

/// Exact first and second partial derivatives of the metric entries, kept
/// symbolic and evaluated pointwise. Curvature at a point is then assembled
/// numerically, which avoids building the (large) symbolic Ricci trees on
/// eleven-dimensional products.
#[derive(Debug, Clone)]
pub struct MetricJet {
    metric: Metric,
    /// (a, b, c, ∂_a m_{bc}) with b <= c, nonzero only
    d1: Vec<(usize, usize, usize, Expr)>,
    /// (a, b, c, d, ∂_a∂_b m_{cd}) with a <= b, c <= d, nonzero only
    d2: Vec<(usize, usize, usize, usize, Expr)>,
}

/// Numeric curvature data at one point.
#[derive(Debug, Clone)]
pub struct PointCurvature {
    pub metric: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    /// `gamma[k][i][j] = Γ^k_{ij}`
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub ricci: DMatrix<f64>,
}

impl PointCurvature {
    pub fn scalar(&self) -> f64 {
        let n = self.metric.nrows();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.inverse[(i, j)] * self.ricci[(i, j)];
            }
        }
        s
    }

    /// Ricci endomorphism `ric = m^{-1} Ric` applied to `x`.
    pub fn ricci_endo(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.inverse * &self.ricci * DMatrix::from_column_slice(x.len(), 1, x);
        v.iter().copied().collect()
    }
}

impl MetricJet {
    pub fn new(m: &Metric) -> MetricJet {
        let n = m.dim();
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for c in 0..n {
            for d in c..n {
                let e = m.entry(c, d);
                if e.is_zero() {
                    continue;
                }
                for a in e.coords() {
                    let da = e.diff(a);
                    if da.is_zero() {
                        continue;
                    }
                    for b in da.coords().into_iter().filter(|&b| b >= a) {
                        let dab = da.diff(b);
                        if !dab.is_zero() {
                            d2.push((a, b, c, d, dab));
                        }
                    }
                    d1.push((a, c, d, da));
                }
            }
        }
        MetricJet {
            metric: m.clone(),
            d1,
            d2,
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn at(&self, point: &[f64]) -> Result<PointCurvature, FormError> {
        let n = self.metric.dim();
        let g = self.metric.eval(point)?;
        let ginv = self.metric.eval_inverse(point)?;
        // dg[a][(b, c)]
        let mut ev = PointEvaluator::new(point);
        let mut dg = vec![DMatrix::<f64>::zeros(n, n); n];
        for (a, b, c, e) in &self.d1 {
            let v = ev.eval(e)?;
            dg[*a][(*b, *c)] = v;
            dg[*a][(*c, *b)] = v;
        }
        let mut ddg = vec![vec![DMatrix::<f64>::zeros(n, n); n]; n];
        for (a, b, c, d, e) in &self.d2 {
            let v = ev.eval(e)?;
            for (x, y) in [(*a, *b), (*b, *a)] {
                ddg[x][y][(*c, *d)] = v;
                ddg[x][y][(*d, *c)] = v;
            }
        }
        // lowered Γ_{l ij} and its derivatives
        let low = |l: usize, i: usize, j: usize| 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
        let dlow = |m: usize, l: usize, i: usize, j: usize| {
            0.5 * (ddg[m][i][(j, l)] + ddg[m][j][(i, l)] - ddg[m][l][(i, j)])
        };
        let dinv: Vec<DMatrix<f64>> = (0..n).map(|a| -(&ginv * &dg[a] * &ginv)).collect();
        let mut lower = vec![vec![vec![0.0; n]; n]; n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    lower[l][i][j] = low(l, i, j);
                }
            }
        }
        let mut gamma = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let s: f64 = (0..n).map(|l| ginv[(k, l)] * lower[l][i][j]).sum();
                    gamma[k][i][j] = s;
                    gamma[k][j][i] = s;
                }
            }
        }
        // dgamma(m, k, i, j) = ∂_m Γ^k_{ij}
        let dgamma = |m: usize, k: usize, i: usize, j: usize| -> f64 {
            (0..n)
                .map(|l| dinv[m][(k, l)] * lower[l][i][j] + ginv[(k, l)] * dlow(m, l, i, j))
                .sum()
        };
        let trace: Vec<f64> = (0..n).map(|l| (0..n).map(|k| gamma[k][k][l]).sum()).collect();
        let mut ric = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += dgamma(k, k, i, j) - dgamma(j, k, i, k);
                }
                for l in 0..n {
                    s += trace[l] * gamma[l][i][j];
                }
                for k in 0..n {
                    for l in 0..n {
                        s -= gamma[k][j][l] * gamma[l][i][k];
                    }
                }
                ric[(i, j)] = s;
                ric[(j, i)] = s;
            }
        }
        Ok(PointCurvature {
            metric: g,
            inverse: ginv,
            gamma,
            ricci: ric,
        })
    }
}

/// Scalar curvature `m^{ij} R_{ij}` at a point.
pub fn scalar_curvature(m: &Metric, point: &[f64]) -> Result<f64, FormError> {
    Ok(MetricJet::new(m).at(point)?.scalar())
}

/// Evaluates a matrix of expressions.
pub fn eval_matrix(entries: &[Vec<Expr>], point: &[f64]) -> Result<DMatrix<f64>, FormError> {
    let n = entries.len();
    let mut ev = PointEvaluator::new(point);
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = ev.eval(&entries[i][j])?;
        }
    }
    Ok(out)
}
