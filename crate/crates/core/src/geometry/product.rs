use super::GeometryError;
use crate::exprlang::{Chart, Expr};
use crate::exterior::{Metric, SingularHyperplane};

pub const LORENTZ_DIM: usize = 5;
pub const RIEMANN_DIM: usize = 6;

/// A five-dimensional Lorentzian factor (signature (1,4)) and a
/// six-dimensional negative definite factor. On the product chart the
/// Lorentzian coordinates come first.
#[derive(Debug, Clone)]
pub struct ProductStructure {
    pub lorentz: Metric,
    pub riemann: Metric,
}

impl ProductStructure {
    pub fn new(lorentz: Metric, riemann: Metric) -> Result<ProductStructure, GeometryError> {
        if lorentz.dim() != LORENTZ_DIM || riemann.dim() != RIEMANN_DIM {
            return Err(GeometryError::BlockDimension {
                lorentz: lorentz.dim(),
                riemann: riemann.dim(),
            });
        }
        if lorentz.signature() != (1, 4) {
            return Err(GeometryError::BlockSignature("lorentz", lorentz.signature()));
        }
        if riemann.signature() != (0, 6) {
            return Err(GeometryError::BlockSignature("riemann", riemann.signature()));
        }
        lorentz.chart().product(riemann.chart())?;
        Ok(ProductStructure { lorentz, riemann })
    }

    pub fn chart(&self) -> Chart {
        self.lorentz
            .chart()
            .product(self.riemann.chart())
            .expect("checked in new")
    }

    /// Product-chart indices of the Lorentzian coordinates.
    pub fn lorentz_map(&self) -> Vec<usize> {
        (0..LORENTZ_DIM).collect()
    }

    /// Product-chart indices of the Riemannian coordinates.
    pub fn riemann_map(&self) -> Vec<usize> {
        (LORENTZ_DIM..LORENTZ_DIM + RIEMANN_DIM).collect()
    }

    pub fn is_lorentz(i: usize) -> bool {
        i < LORENTZ_DIM
    }

    /// Splits a product-chart point into the two factor points.
    pub fn split_point(point: &[f64]) -> (&[f64], &[f64]) {
        point.split_at(LORENTZ_DIM)
    }
}

/// Block-diagonal `h = g̃ + g` on the product chart, signature (1,10).
pub fn product_metric(ps: &ProductStructure) -> Result<Metric, GeometryError> {
    let chart = ps.chart();
    let n = chart.dim();
    let mut entries = vec![vec![Expr::zero(); n]; n];
    for (block, map) in [(&ps.lorentz, ps.lorentz_map()), (&ps.riemann, ps.riemann_map())] {
        let f = |i: usize| map[i];
        for i in 0..block.dim() {
            for j in 0..block.dim() {
                entries[map[i]][map[j]] = block.entry(i, j).map_coords(&f);
            }
        }
    }
    let mut singular: Vec<SingularHyperplane> = ps.lorentz.singular().to_vec();
    singular.extend(ps.riemann.singular().iter().map(|s| SingularHyperplane {
        coord: s.coord + LORENTZ_DIM,
        value: s.value,
    }));
    Ok(Metric::new(&chart, entries, (1, 10))?.with_singular(singular))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricJet;

    #[test]
    fn walker_times_flat_has_block_ricci() {
        let lc = Chart::new(&["u", "x1", "x2", "x3", "v"]).unwrap();
        let rc = Chart::new(&["y1", "y2", "y3", "y4", "y5", "y6"]).unwrap();
        let h = crate::exprlang::parse("x1^2 + x2^2 + x3^2", &lc).unwrap();
        let w = crate::geometry::WalkerData::pp_wave(&lc, h);
        let lorentz = crate::geometry::walker_metric(&w, &[]).unwrap();
        let riemann = Metric::diagonal(&rc, vec![Expr::constant(-1.0); 6], (0, 6)).unwrap();
        let ps = ProductStructure::new(lorentz, riemann).unwrap();
        let h = product_metric(&ps).unwrap();
        assert_eq!(h.signature(), (1, 10));
        let p: Vec<f64> = (0..11).map(|i| 0.1 * i as f64 - 0.4).collect();
        let ric = MetricJet::new(&h).at(&p).unwrap().ricci;
        for i in 0..11 {
            for j in 0..11 {
                let want = if i == 0 && j == 0 { 3.0 } else { 0.0 };
                assert!((ric[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clashing_names_rejected() {
        let lc = Chart::new(&["a", "b", "c", "d", "e"]).unwrap();
        let rc = Chart::new(&["a", "y2", "y3", "y4", "y5", "y6"]).unwrap();
        let l = Metric::diagonal(&lc, [1.0, -1.0, -1.0, -1.0, -1.0].map(Expr::constant).to_vec(), (1, 4)).unwrap();
        let r = Metric::diagonal(&rc, vec![Expr::constant(-1.0); 6], (0, 6)).unwrap();
        assert!(ProductStructure::new(l, r).is_err());
    }
}
