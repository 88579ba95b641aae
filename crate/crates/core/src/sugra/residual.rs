use nalgebra::DMatrix;
use rayon::prelude::*;

use super::background::{Background, SamplePlan};
use super::flux::assemble_flux;
use super::SugraError;
use crate::exprlang::Chart;
use crate::exterior::{hodge_std, mask_indices, KForm, Mask, Metric, NumForm};
use crate::geometry::{MetricJet, PointCurvature, LORENTZ_DIM};

/// Report rows in output order: (equation, block).
pub const ROWS: [(&str, &str); 9] = [
    ("closedness", "all"),
    ("maxwell", "(2~,6)"),
    ("maxwell", "(3~,5)"),
    ("maxwell", "(4~,4)"),
    ("maxwell", "(5~,3)"),
    ("einstein", "HH"),
    ("einstein", "VV"),
    ("einstein", "VH"),
    ("trace", "all"),
];

/// Symbolic pieces of a background, built once and evaluated per point.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub chart: Chart,
    pub h: Metric,
    pub jet: MetricJet,
    pub flux: KForm,
    pub d_flux: KForm,
    /// `d★Φ − ½Φ∧Φ`
    pub maxwell: KForm,
}

impl Prepared {
    pub fn new(bg: &Background) -> Result<Prepared, SugraError> {
        let h = bg.metric()?;
        let flux = assemble_flux(&bg.flux, &bg.product)?;
        let d_flux = flux.ext_d();
        let d_star = hodge_std(&flux, &h)?.ext_d();
        let half_sq = flux.wedge(&flux)?.scale_const(0.5);
        let maxwell = d_star.sub(&half_sq)?;
        Ok(Prepared {
            chart: h.chart().clone(),
            jet: MetricJet::new(&h),
            h,
            flux,
            d_flux,
            maxwell,
        })
    }

    /// Curvature and flux contractions at one point.
    pub fn at(&self, point: &[f64]) -> Result<PointEval, SugraError> {
        self.h.check_signature(point)?;
        let curv = self.jet.at(point)?;
        let phi = self.flux.eval(point)?;
        let n = self.chart.dim();
        let contracted: Vec<NumForm> = (0..n).map(|i| phi.interior_coord(i)).collect();
        let mut contraction = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if phi.degree() == 0 {
                    0.0
                } else {
                    contracted[i].inner(&contracted[j], &curv.inverse)
                };
                contraction[(i, j)] = v;
                contraction[(j, i)] = v;
            }
        }
        let norm = phi.inner(&phi, &curv.inverse);
        Ok(PointEval {
            curv,
            contraction,
            norm,
            d_flux: self.d_flux.eval(point)?,
            maxwell: self.maxwell.eval(point)?,
        })
    }
}

/// Everything the residuals need at one point.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub curv: PointCurvature,
    /// `⟨∂_i⌟Φ, ∂_j⌟Φ⟩_h`
    pub contraction: DMatrix<f64>,
    /// `‖Φ‖²_h`
    pub norm: f64,
    pub d_flux: NumForm,
    pub maxwell: NumForm,
}

impl PointEval {
    /// `Ric_h + ½⟨∂_i⌟Φ, ∂_j⌟Φ⟩ − (1/6) h ‖Φ‖²`.
    pub fn einstein(&self) -> DMatrix<f64> {
        &self.curv.ricci + &self.contraction * 0.5 - &self.curv.metric * (self.norm / 6.0)
    }

    pub fn scalar(&self) -> f64 {
        self.curv.scalar()
    }

    /// Trace of the Einstein equation: `Scal_h + ‖Φ‖²/6` (zero on solutions).
    pub fn trace_residual(&self) -> f64 {
        self.scalar() + self.norm / 6.0
    }
}

/// One row of the residual table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub equation: String,
    pub block: String,
    pub max: f64,
    pub mean: f64,
    pub worst_point: Vec<f64>,
    pub worst_component: String,
}

/// Max/mean of a scalar over the plan.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub id: String,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub rows: Vec<ResidualRow>,
    /// `|Scal_h − ‖Φ‖²/6|`: the trace identity with the opposite sign, kept
    /// for reference; not part of the verdict.
    pub opposite_sign_trace: Stat,
}

impl ResidualReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.max < self.tolerance)
    }

    pub fn row(&self, equation: &str, block: &str) -> Option<&ResidualRow> {
        self.rows
            .iter()
            .find(|r| r.equation == equation && r.block == block)
    }

    /// Largest residual among rows of one equation.
    pub fn max_of(&self, equation: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.equation == equation)
            .fold(0.0, |a, r| a.max(r.max))
    }
}

fn form_component(chart: &Chart, mask: Mask) -> String {
    mask_indices(mask)
        .into_iter()
        .map(|i| format!("d{}", chart.name(i)))
        .collect::<Vec<_>>()
        .join("^")
}

/// Maxwell type of an 8-form mask: number of Lorentzian indices.
fn lorentz_count(mask: Mask) -> usize {
    (mask & ((1 << LORENTZ_DIM) - 1)).count_ones() as usize
}

/// Per-row worst value and component at one point.
fn point_rows(chart: &Chart, e: &PointEval) -> Vec<(f64, String)> {
    let mut rows: Vec<(f64, String)> = vec![(0.0, "-".into()); ROWS.len()];
    let mut bump = |slot: usize, v: f64, comp: String| {
        if v.abs() > rows[slot].0 || (rows[slot].1 == "-" && v.abs() >= rows[slot].0) {
            rows[slot] = (v.abs(), comp);
        }
    };
    for (m, v) in e.d_flux.terms() {
        bump(0, v, form_component(chart, m));
    }
    for (m, v) in e.maxwell.terms() {
        let slot = match lorentz_count(m) {
            2 => 1,
            3 => 2,
            4 => 3,
            _ => 4,
        };
        bump(slot, v, form_component(chart, m));
    }
    let ein = e.einstein();
    let n = chart.dim();
    for i in 0..n {
        for j in i..n {
            let slot = match (i < LORENTZ_DIM, j < LORENTZ_DIM) {
                (false, false) => 5,
                (true, true) => 6,
                _ => 7,
            };
            bump(
                slot,
                ein[(i, j)],
                format!("({},{})", chart.name(i), chart.name(j)),
            );
        }
    }
    bump(8, e.trace_residual(), "scal".into());
    rows
}

/// Runs every residual over the plan. `jobs = None` uses rayon's default
/// pool; results do not depend on the number of workers.
pub fn evaluate(
    bg: &Background,
    plan: &SamplePlan,
    tolerance: f64,
    jobs: Option<usize>,
) -> Result<ResidualReport, SugraError> {
    let prep = Prepared::new(bg)?;
    evaluate_prepared(bg, &prep, plan, tolerance, jobs)
}

pub fn evaluate_prepared(
    bg: &Background,
    prep: &Prepared,
    plan: &SamplePlan,
    tolerance: f64,
    jobs: Option<usize>,
) -> Result<ResidualReport, SugraError> {
    let work = || -> Result<Vec<(Vec<(f64, String)>, f64)>, SugraError> {
        plan.points
            .par_iter()
            .map(|p| {
                let e = prep.at(p)?;
                Ok((point_rows(&prep.chart, &e), (e.scalar() - e.norm / 6.0).abs()))
            })
            .collect()
    };
    let per_point = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| SugraError::ThreadPool(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let count = per_point.len().max(1) as f64;
    let mut rows = Vec::with_capacity(ROWS.len());
    for (slot, (equation, block)) in ROWS.iter().enumerate() {
        let mut max = 0.0;
        let mut sum = 0.0;
        let mut worst = 0usize;
        for (k, (vals, _)) in per_point.iter().enumerate() {
            let v = vals[slot].0;
            sum += v;
            if v > max {
                max = v;
                worst = k;
            }
        }
        rows.push(ResidualRow {
            equation: equation.to_string(),
            block: block.to_string(),
            max,
            mean: sum / count,
            worst_point: plan.points.get(worst).cloned().unwrap_or_default(),
            worst_component: per_point
                .get(worst)
                .filter(|_| max > 0.0)
                .map(|(v, _)| v[slot].1.clone())
                .unwrap_or_else(|| "-".into()),
        });
    }
    let opposite = per_point.iter().fold(Stat::default(), |s, (_, d)| Stat {
        max: s.max.max(*d),
        mean: s.mean + d / count,
    });
    Ok(ResidualReport {
        id: bg.id.clone(),
        seed: plan.seed,
        points: plan.len(),
        tolerance,
        rows,
        opposite_sign_trace: opposite,
    })
}
