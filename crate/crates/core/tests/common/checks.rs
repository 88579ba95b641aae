//! Measurements shared by the integration tests and the acceptance suite.

use nalgebra::DMatrix;
use rand::Rng;

use sugra::catalog::{self, solve_walker_h, spheres_cubed};
use sugra::exprlang::Expr;
use sugra::exterior::{form_inner, norm_sq, KForm};
use sugra::geometry::{walker_laplacian, walker_metric, MetricJet, WalkerData, U};
use sugra::sugra::{evaluate, Background, Prepared, ResidualReport, SamplePlan};

use super::{fd_ricci, metric_fn, random_point, random_poly};

pub const WALKER_IDS: [&str; 7] = [
    "alpha-ppwave",
    "beta-nu-ppwave",
    "gamma-delta-ppwave",
    "varpi-epsilon-ppwave",
    "general-combined",
    "alphabeta-trig",
    "alphabeta-poly",
];

/// Random `∂_v`-free polynomial profile of degree ≤ 4 in `(u, x1, x2, x3)`.
pub fn random_profile<R: Rng>(rng: &mut R) -> Expr {
    random_poly(rng, &[0, 1, 2, 3], 4, 5)
}

/// For a pp-wave with profile `h`: (max over points of the largest Ricci
/// entry other than `(u,u)`, max `|Ric_uu + ½Δ_ρH|`, max deviation from
/// the finite-difference oracle).
pub fn walker_ricci<R: Rng>(rng: &mut R, h: Expr, points: usize, fd_points: usize) -> (f64, f64, f64) {
    let w = WalkerData::pp_wave(&WalkerData::standard_chart(), h.clone());
    let m = walker_metric(&w, &[]).unwrap();
    let jet = MetricJet::new(&m);
    let lap = walker_laplacian(&w, &h).unwrap();
    let (mut off, mut uu, mut fd) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..points {
        let p = random_point(rng, &[(-1.0, 1.0); 5]);
        let ric = jet.at(&p).unwrap().ricci;
        for i in 0..5 {
            for j in 0..5 {
                if (i, j) != (U, U) {
                    off = off.max(ric[(i, j)].abs());
                }
            }
        }
        uu = uu.max((ric[(U, U)] + 0.5 * lap.eval(&p).unwrap()).abs());
        if k < fd_points {
            let oracle = fd_ricci(&metric_fn(&m), &p, 1e-3);
            fd = fd.max((&ric - oracle).amax());
        }
    }
    (off, uu, fd)
}

/// Largest `|∂_k g_ij − Γ^l_ki g_lj − Γ^l_kj g_il|` and largest asymmetry
/// `|Γ^k_ij − Γ^k_ji|` over the plan.
pub fn metric_compatibility(bg: &Background, plan: &SamplePlan) -> (f64, f64) {
    let m = bg.metric().unwrap();
    let n = m.dim();
    let jet = MetricJet::new(&m);
    let derivs: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|k| (0..n).map(|i| (0..n).map(|j| m.entry(i, j).diff(k)).collect()).collect())
        .collect();
    let (mut nabla, mut asym) = (0.0f64, 0.0f64);
    for p in &plan.points {
        let c = jet.at(p).unwrap();
        let g = &c.metric;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = derivs[k][i][j].eval(p).unwrap();
                    for l in 0..n {
                        v -= c.gamma[l][k][i] * g[(l, j)] + c.gamma[l][k][j] * g[(i, l)];
                    }
                    nabla = nabla.max(v.abs());
                    asym = asym.max((c.gamma[k][i][j] - c.gamma[k][j][i]).abs());
                }
            }
        }
    }
    (nabla, asym)
}

/// For a Walker catalog entry: (largest Ricci entry other than `(u,u)`,
/// largest `|Ric_uu + ½Δ_ρH|`).
pub fn catalog_walker_ricci(bg: &Background, plan: &SamplePlan) -> (f64, f64) {
    let m = bg.metric().unwrap();
    let jet = MetricJet::new(&m);
    let h = bg.product.lorentz.entry(U, U).clone();
    let w = WalkerData::pp_wave(bg.product.lorentz.chart(), h.clone());
    let lap = walker_laplacian(&w, &h).unwrap();
    let (mut off, mut uu) = (0.0f64, 0.0f64);
    for p in &plan.points {
        let ric = jet.at(p).unwrap().ricci;
        for i in 0..11 {
            for j in 0..11 {
                if (i, j) != (U, U) {
                    off = off.max(ric[(i, j)].abs());
                }
            }
        }
        uu = uu.max((ric[(U, U)] + 0.5 * lap.eval(&p[..5]).unwrap()).abs());
    }
    (off, uu)
}

/// Null-flux structure: (max `|‖Φ‖²|`, max `|Scal|`, max `|h(ric X, ric Y)|`
/// over `pairs` random vector pairs per point).
pub fn null_flux_structure<R: Rng>(bg: &Background, plan: &SamplePlan, rng: &mut R, pairs: usize) -> (f64, f64, f64) {
    let prep = Prepared::new(bg).unwrap();
    let (mut norm, mut scal, mut null) = (0.0f64, 0.0f64, 0.0f64);
    for p in &plan.points {
        let e = prep.at(p).unwrap();
        norm = norm.max(e.norm.abs());
        scal = scal.max(e.scalar().abs());
        for _ in 0..pairs {
            let x = random_point(rng, &[(-1.0, 1.0); 11]);
            let y = random_point(rng, &[(-1.0, 1.0); 11]);
            let rx = DMatrix::from_vec(11, 1, e.curv.ricci_endo(&x));
            let ry = DMatrix::from_vec(11, 1, e.curv.ricci_endo(&y));
            null = null.max((rx.transpose() * &e.curv.metric * ry)[(0, 0)].abs());
        }
    }
    (norm, scal, null)
}

#[derive(Debug, Clone, Copy)]
pub struct KahlerMeasurements {
    /// Least-squares Einstein constants on each block and the worst
    /// `|Ric − λ g|` entry.
    pub lorentz_lambda: f64,
    pub lorentz_fit: f64,
    pub riemann_lambda: f64,
    pub riemann_fit: f64,
    /// max `|‖ω‖² − 3|`
    pub omega_norm: f64,
    /// max `|⟨eᵢ⌟θ, eⱼ⌟θ⟩ − (2/3)‖θ‖² gᵢⱼ|`
    pub contraction: f64,
    /// max `|⟨eᵢ⌟★ω, eⱼ⌟★ω⟩ − 2 gᵢⱼ|`
    pub unit_contraction: f64,
    /// Scal_h range over the plan
    pub scal_min: f64,
    pub scal_max: f64,
    /// max `|‖Φ‖² − 3c²|`
    pub flux_norm: f64,
}

fn fit_block(ric: &[DMatrix<f64>], g: &[DMatrix<f64>]) -> (f64, f64) {
    let (mut rg, mut gg) = (0.0, 0.0);
    for (r, m) in ric.iter().zip(g) {
        rg += r.component_mul(m).sum();
        gg += m.component_mul(m).sum();
    }
    let lambda = rg / gg;
    let worst = ric
        .iter()
        .zip(g)
        .fold(0.0f64, |a, (r, m)| a.max((r - m * lambda).amax()));
    (lambda, worst)
}

pub fn kahler_measurements(bg: &Background, plan: &SamplePlan, c: f64, k: f64) -> KahlerMeasurements {
    let prep = Prepared::new(bg).unwrap();
    let (_, omega) = spheres_cubed(k).unwrap();
    let g6 = &bg.product.riemann;
    let theta = &bg.flux.theta;
    let unit = theta.scale_const(1.0 / c);
    let (mut lr, mut lg, mut rr, mut rg) = (vec![], vec![], vec![], vec![]);
    let mut m = KahlerMeasurements {
        lorentz_lambda: 0.0,
        lorentz_fit: 0.0,
        riemann_lambda: 0.0,
        riemann_fit: 0.0,
        omega_norm: 0.0,
        contraction: 0.0,
        unit_contraction: 0.0,
        scal_min: f64::INFINITY,
        scal_max: f64::NEG_INFINITY,
        flux_norm: 0.0,
    };
    for p in &plan.points {
        let e = prep.at(p).unwrap();
        lr.push(e.curv.ricci.view((0, 0), (5, 5)).into_owned());
        lg.push(e.curv.metric.view((0, 0), (5, 5)).into_owned());
        rr.push(e.curv.ricci.view((5, 5), (6, 6)).into_owned());
        rg.push(e.curv.metric.view((5, 5), (6, 6)).into_owned());
        let s = e.scalar();
        m.scal_min = m.scal_min.min(s);
        m.scal_max = m.scal_max.max(s);
        m.flux_norm = m.flux_norm.max((e.norm - 3.0 * c * c).abs());
        let q = &p[5..];
        m.omega_norm = m.omega_norm.max((norm_sq(&omega, g6, q).unwrap() - 3.0).abs());
        let tn = norm_sq(theta, g6, q).unwrap();
        let gm = g6.eval(q).unwrap();
        let basis = |i: usize| -> Vec<Expr> {
            (0..6).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()
        };
        let contract = |f: &KForm, i: usize| f.interior(&basis(i)).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let v = form_inner(&contract(theta, i), &contract(theta, j), g6, q).unwrap();
                m.contraction = m.contraction.max((v - 2.0 / 3.0 * tn * gm[(i, j)]).abs());
                let u = form_inner(&contract(&unit, i), &contract(&unit, j), g6, q).unwrap();
                m.unit_contraction = m.unit_contraction.max((u - 2.0 * gm[(i, j)]).abs());
            }
        }
    }
    (m.lorentz_lambda, m.lorentz_fit) = fit_block(&lr, &lg);
    (m.riemann_lambda, m.riemann_fit) = fit_block(&rr, &rg);
    m
}

/// Max `|Δ_ρ(solve(rhs)) − rhs|` for one random polynomial right-hand side
/// with u-dependent coefficients, over `points` random points.
pub fn solver_round_trip<R: Rng>(rng: &mut R, points: usize) -> f64 {
    let rhs = random_poly(rng, &[0, 1, 2, 3], 4, 6);
    let h = solve_walker_h(&rhs).unwrap();
    let w = WalkerData::pp_wave(&WalkerData::standard_chart(), h.clone());
    let lap = walker_laplacian(&w, &h).unwrap();
    (0..points).fold(0.0f64, |a, _| {
        let p = random_point(rng, &[(-1.0, 1.0); 5]);
        a.max((lap.eval(&p).unwrap() - rhs.eval(&p).unwrap()).abs())
    })
}

/// Largest difference between two residual tables (maxima, means and the
/// opposite-sign trace statistic).
pub fn table_difference(a: &ResidualReport, b: &ResidualReport) -> f64 {
    assert_eq!(a.rows.len(), b.rows.len());
    let mut d = (a.opposite_sign_trace.max - b.opposite_sign_trace.max).abs();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!((&x.equation, &x.block), (&y.equation, &y.block));
        d = d.max((x.max - y.max).abs()).max((x.mean - y.mean).abs());
    }
    d
}

pub fn default_report(id: &str, points: usize) -> ResidualReport {
    let bg = catalog::build_default(id).unwrap();
    let plan = bg.plan(points, 42).unwrap();
    evaluate(&bg, &plan, 1e-8, None).unwrap()
}

pub fn backgrounds_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../backgrounds")
}
