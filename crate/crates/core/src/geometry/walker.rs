use nalgebra::SymmetricEigen;

use super::curvature::{christoffel, MetricJet};
use super::GeometryError;
use crate::exprlang::{Chart, Expr};
use crate::exterior::Metric;

/// Coordinate slots of a Walker chart `(u, x1, x2, x3, v)`.
pub const U: usize = 0;
pub const X: [usize; 3] = [1, 2, 3];
pub const V: usize = 4;

/// Data of a Walker metric `2 du dv + ρ + 2 A du + H du²` on a five-chart
/// ordered as `(u, x1, x2, x3, v)`.
#[derive(Debug, Clone)]
pub struct WalkerData {
    pub chart: Chart,
    /// 3×3 block on the x-coordinates; entries may depend on u and x.
    pub rho: Vec<Vec<Expr>>,
    /// components of A along dx1, dx2, dx3
    pub a: Vec<Expr>,
    pub h: Expr,
}

impl WalkerData {
    /// Flat `ρ = −Σ dxⁱ²`, `A = 0`.
    pub fn pp_wave(chart: &Chart, h: Expr) -> WalkerData {
        let mut rho = vec![vec![Expr::zero(); 3]; 3];
        for (i, row) in rho.iter_mut().enumerate() {
            row[i] = Expr::constant(-1.0);
        }
        WalkerData {
            chart: chart.clone(),
            rho,
            a: vec![Expr::zero(); 3],
            h,
        }
    }

    /// Standard chart names `u, x1, x2, x3, v`.
    pub fn standard_chart() -> Chart {
        Chart::new(&["u", "x1", "x2", "x3", "v"]).expect("valid names")
    }

    /// `ρ` frozen at a value of u, as a metric on the chart `(x1, x2, x3)`.
    fn rho_slice(&self, u: f64) -> Result<Metric, GeometryError> {
        let xchart = Chart::new(&X.map(|i| self.chart.name(i).to_string()))?;
        let sub = |i: usize| -> Option<Expr> {
            if i == U {
                Some(Expr::constant(u))
            } else {
                Some(Expr::coord(i - 1))
            }
        };
        let entries = self
            .rho
            .iter()
            .map(|r| r.iter().map(|e| e.substitute(&sub)).collect())
            .collect();
        Ok(Metric::new(&xchart, entries, (0, 3))?)
    }

    /// Checks the Ricci-isotropic conditions `∂_v H = 0`, `A = 0` and `ρ`
    /// Ricci-flat at the probe points (given on the five-chart).
    pub fn validate_ricci_isotropic(&self, probes: &[Vec<f64>]) -> Result<(), GeometryError> {
        let hv = self.h.diff(V);
        for p in probes {
            if hv.eval(p)?.abs() > 1e-12 {
                return Err(GeometryError::NotRicciIsotropic(format!(
                    "H depends on v at {p:?}"
                )));
            }
            for (i, a) in self.a.iter().enumerate() {
                if a.eval(p)?.abs() > 1e-12 {
                    return Err(GeometryError::NotRicciIsotropic(format!(
                        "A_{} nonzero at {p:?}",
                        i + 1
                    )));
                }
            }
            let slice = self.rho_slice(p[U])?;
            let ric = MetricJet::new(&slice).at(&[p[1], p[2], p[3]])?.ricci;
            if ric.amax() > 1e-9 {
                return Err(GeometryError::NotRicciIsotropic(format!(
                    "rho not Ricci-flat at {p:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Assembles the Walker metric, rejecting `ρ` that is not negative definite
/// at the probe points.
pub fn walker_metric(w: &WalkerData, probes: &[Vec<f64>]) -> Result<Metric, GeometryError> {
    if w.chart.dim() != 5 || w.rho.len() != 3 || w.rho.iter().any(|r| r.len() != 3) || w.a.len() != 3
    {
        return Err(GeometryError::WalkerShape);
    }
    let mut entries = vec![vec![Expr::zero(); 5]; 5];
    entries[U][U] = w.h.clone();
    entries[U][V] = Expr::one();
    entries[V][U] = Expr::one();
    for (r, &i) in X.iter().enumerate() {
        entries[U][i] = w.a[r].clone();
        entries[i][U] = w.a[r].clone();
        for (c, &j) in X.iter().enumerate() {
            entries[i][j] = w.rho[r][c].clone();
        }
    }
    let m = Metric::new(&w.chart, entries, (1, 4))?;
    for p in probes {
        let rho = nalgebra::DMatrix::from_fn(3, 3, |r, c| w.rho[r][c].eval(p).unwrap_or(f64::NAN));
        let eig = SymmetricEigen::new(rho);
        if eig.eigenvalues.iter().any(|v| !(*v < 0.0)) {
            return Err(GeometryError::RhoNotNegativeDefinite(p.clone()));
        }
    }
    Ok(m)
}

/// `Δ_ρ(s) = Σ ρ^{ij}(∂_i∂_j s − Γ^k_{ij} ∂_k s)` over the x-coordinates,
/// with Γ the Levi-Civita symbols of ρ at fixed u.
pub fn walker_laplacian(w: &WalkerData, s: &Expr) -> Result<Expr, GeometryError> {
    // ρ padded with unit u and v directions; the x-block of its Christoffel
    // symbols equals that of ρ.
    let mut entries = vec![vec![Expr::zero(); 5]; 5];
    entries[U][U] = Expr::one();
    entries[V][V] = Expr::one();
    for (r, &i) in X.iter().enumerate() {
        for (c, &j) in X.iter().enumerate() {
            entries[i][j] = w.rho[r][c].clone();
        }
    }
    let padded = Metric::new(&w.chart, entries, (2, 3))?;
    let ch = christoffel(&padded);
    let mut terms = Vec::new();
    for &i in &X {
        for &j in &X {
            let inv = padded.inverse_entry(i, j);
            if inv.is_zero() {
                continue;
            }
            let mut inner = vec![s.diff(i).diff(j)];
            for &k in &X {
                inner.push(Expr::neg(Expr::mul(vec![
                    ch.gamma[k][i][j].clone(),
                    s.diff(k),
                ])));
            }
            terms.push(Expr::mul(vec![inv.clone(), Expr::add(inner)]));
        }
    }
    Ok(Expr::add(terms))
}
