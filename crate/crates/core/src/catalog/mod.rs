//! Explicit backgrounds with tunable parameters, and the flat-ρ Walker
//! profile solver.

mod solver;

pub use solver::solve_walker_h;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exprlang::{Chart, Expr, ExprError};
use crate::exterior::{hodge_std, FormError, KForm, Metric, SingularHyperplane};
use crate::geometry::{walker_metric, GeometryError, ProductStructure, WalkerData};
use crate::sugra::{Background, FluxSpec, SampleBox, SugraError};

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Error)]
pub enum CatalogError {
    #[error("unknown catalog id '{0}'")]
    UnknownId(String),
    #[error("unknown parameter '{key}' for '{id}'")]
    UnknownParam { id: String, key: String },
    #[error("parameter {key} = {value} out of range: {why}")]
    OutOfRange {
        key: String,
        value: f64,
        why: &'static str,
    },
    #[error("right-hand side is not polynomial in x: {0}")]
    NonPolynomialRhs(String),
    #[error("right-hand side depends on v")]
    RhsDependsOnV,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sugra(#[from] SugraError),
}

/// Static description of a catalog entry.
#[derive(Debug, Clone, Copy)]
pub struct EntryInfo {
    pub id: &'static str,
    pub summary: &'static str,
    /// (name, default value)
    pub params: &'static [(&'static str, f64)],
    /// Parameter scaled by `--perturb` in the non-vacuousness checks.
    pub perturb_key: &'static str,
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

pub const ENTRIES: [EntryInfo; 8] = [
    EntryInfo {
        id: "alpha-ppwave",
        summary: "pp-wave, flux f(u) du^dx1^dx2^dx3 with f = a*u, flat R^6",
        params: &[("a", 1.0), ("H", 1.0)],
        perturb_key: "H",
    },
    EntryInfo {
        id: "beta-nu-ppwave",
        summary: "pp-wave, flux b du^dx1^dx2^dt on R x R^5",
        params: &[("b", 1.0), ("H", 1.0)],
        perturb_key: "H",
    },
    EntryInfo {
        id: "gamma-delta-ppwave",
        summary: "pp-wave, flux g du^dx1 ^ (flat Kaehler form on R^6)",
        params: &[("g", 1.0), ("H", 1.0)],
        perturb_key: "H",
    },
    EntryInfo {
        id: "varpi-epsilon-ppwave",
        summary: "pp-wave, flux E du^dy1^dy2^dy3 on flat R^6",
        params: &[("E", 1.0), ("H", 1.0)],
        perturb_key: "H",
    },
    EntryInfo {
        id: "general-combined",
        summary: "pp-wave, flux du^(f1 vol_rho + f2 dx1^dx2^dy3 + f3 dx1^dy2^dy3 + f4 dy1^dy2^dy3)",
        params: &[("f1", 1.0), ("f2", 1.0), ("f3", 1.0), ("f4", 1.0), ("H", 1.0)],
        perturb_key: "H",
    },
    EntryInfo {
        id: "alphabeta-trig",
        summary: "pp-wave x S^1 x R^5, phi = sin(y1), f = exp(x1), H = exp(2 x1)/4",
        params: &[("kappa", 1.0), ("H", 1.0)],
        perturb_key: "H",
    },
    EntryInfo {
        id: "alphabeta-poly",
        summary: "pp-wave x (-L,L) x R^5, f = x1, H = x1^4/12 + L^2 x1^2/2",
        params: &[("L", 1.0), ("H", 1.0)],
        perturb_key: "H",
    },
    EntryInfo {
        id: "kahler-theta",
        summary: "AdS5 x (S^2)^3, flux c *6(omega), c^2 = 2K = 8/L^2",
        params: &[("K", 1.0), ("c", SQRT2), ("L", 2.0)],
        perturb_key: "c",
    },
];

pub fn info(id: &str) -> Option<&'static EntryInfo> {
    ENTRIES.iter().find(|e| e.id == id)
}

/// Defaults overridden by `overrides`; unknown keys are rejected.
pub fn resolve_params(id: &str, overrides: &Params) -> Result<Params, CatalogError> {
    let e = info(id).ok_or_else(|| CatalogError::UnknownId(id.to_string()))?;
    let mut p: Params = e.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        if !p.contains_key(k) {
            return Err(CatalogError::UnknownParam {
                id: id.to_string(),
                key: k.clone(),
            });
        }
        p.insert(k.clone(), *v);
    }
    Ok(p)
}

/// Parameters with `key` scaled by `factor`.
pub fn perturbed_params(id: &str, key: &str, factor: f64) -> Result<Params, CatalogError> {
    let base = resolve_params(id, &Params::new())?;
    let v = *base.get(key).ok_or_else(|| CatalogError::UnknownParam {
        id: id.to_string(),
        key: key.to_string(),
    })?;
    let mut o = Params::new();
    o.insert(key.to_string(), v * factor);
    resolve_params(id, &o)
}

pub fn build_default(id: &str) -> Result<Background, CatalogError> {
    build(id, &Params::new())
}

pub fn build(id: &str, overrides: &Params) -> Result<Background, CatalogError> {
    let p = resolve_params(id, overrides)?;
    let get = |k: &str| p[k];
    match id {
        "alpha-ppwave" => alpha_ppwave(get("a"), get("H")),
        "beta-nu-ppwave" => beta_nu_ppwave(get("b"), get("H")),
        "gamma-delta-ppwave" => gamma_delta_ppwave(get("g"), get("H")),
        "varpi-epsilon-ppwave" => varpi_epsilon_ppwave(get("E"), get("H")),
        "general-combined" => general_combined([get("f1"), get("f2"), get("f3"), get("f4")], get("H")),
        "alphabeta-trig" => alphabeta_trig(get("kappa"), get("H")),
        "alphabeta-poly" => alphabeta_poly(get("L"), get("H")),
        "kahler-theta" => kahler_theta(get("K"), get("c"), get("L")),
        _ => Err(CatalogError::UnknownId(id.to_string())),
    }
}

fn c(v: f64) -> Expr {
    Expr::constant(v)
}

fn ys() -> Chart {
    Chart::new(&["y1", "y2", "y3", "y4", "y5", "y6"]).expect("valid names")
}

fn flat_riemann(chart: &Chart) -> Result<Metric, CatalogError> {
    Ok(Metric::diagonal(chart, vec![c(-1.0); 6], (0, 6))?)
}

/// Lorentzian pp-wave factor with flat ρ and profile `h`.
fn pp_wave(h: Expr) -> Result<Metric, CatalogError> {
    let w = WalkerData::pp_wave(&WalkerData::standard_chart(), h);
    Ok(walker_metric(&w, &[vec![0.0; 5]])?)
}

fn mono(chart: &Chart, coeff: Expr, idx: &[usize]) -> Result<KForm, CatalogError> {
    Ok(KForm::monomial(chart, coeff, idx)?)
}

fn unit_box() -> SampleBox {
    SampleBox::uniform(11, -1.0, 1.0)
}

fn positive(key: &str, v: f64) -> Result<(), CatalogError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CatalogError::OutOfRange {
            key: key.to_string(),
            value: v,
            why: "must be positive",
        })
    }
}

/// Walker chart indices.
const U: usize = 0;
const X1: usize = 1;
const X2: usize = 2;
const X3: usize = 3;

fn walker_background(
    id: &str,
    note: &str,
    h: Expr,
    riemann: Metric,
    flux: impl FnOnce(&ProductStructure) -> Result<FluxSpec, CatalogError>,
    sample: SampleBox,
) -> Result<Background, CatalogError> {
    let ps = ProductStructure::new(pp_wave(h)?, riemann)?;
    let fs = flux(&ps)?;
    Ok(Background::new(id, note, ps, fs, sample)?)
}

fn alpha_ppwave(a: f64, hs: f64) -> Result<Background, CatalogError> {
    let l = WalkerData::standard_chart();
    let f = Expr::coord(U).scale(a);
    // Δ_ρ H = ‖f dx1^dx2^dx3‖²_ρ = −f²
    let h = solve_walker_h(&Expr::neg(Expr::powi(f.clone(), 2)))?.scale(hs);
    walker_background(
        "alpha-ppwave",
        "pp-wave with flux f(u) du^dx1^dx2^dx3, f = a u",
        h,
        flat_riemann(&ys())?,
        |ps| {
            let mut fs = FluxSpec::zero(ps);
            fs.alpha = mono(&l, f, &[U, X1, X2, X3])?;
            Ok(fs)
        },
        unit_box(),
    )
}

fn beta_nu_ppwave(b: f64, hs: f64) -> Result<Background, CatalogError> {
    let l = WalkerData::standard_chart();
    let r = Chart::new(&["t", "y2", "y3", "y4", "y5", "y6"])?;
    // ‖b dx1^dx2‖²_ρ ‖dt‖²_g = −b²
    let h = solve_walker_h(&c(-b * b))?.scale(hs);
    let rr = r.clone();
    walker_background(
        "beta-nu-ppwave",
        "pp-wave with flux b du^dx1^dx2 ^ dt on R x R^5",
        h,
        flat_riemann(&r)?,
        move |ps| {
            let mut fs = FluxSpec::zero(ps);
            fs.beta = mono(&l, c(b), &[U, X1, X2])?;
            fs.nu = KForm::dx(&rr, 0);
            Ok(fs)
        },
        unit_box(),
    )
}

/// `dy1^dy2 + dy3^dy4 + dy5^dy6`.
fn flat_kahler(r: &Chart) -> Result<KForm, CatalogError> {
    Ok(KForm::from_terms(
        r,
        2,
        vec![(vec![0, 1], c(1.0)), (vec![2, 3], c(1.0)), (vec![4, 5], c(1.0))],
    )?)
}

fn gamma_delta_ppwave(g: f64, hs: f64) -> Result<Background, CatalogError> {
    let l = WalkerData::standard_chart();
    let r = ys();
    // ‖g dx1‖²_ρ ‖δ‖²_g = (−g²)(3)
    let h = solve_walker_h(&c(-3.0 * g * g))?.scale(hs);
    let rr = r.clone();
    walker_background(
        "gamma-delta-ppwave",
        "pp-wave with flux g du^dx1 ^ delta, delta the flat Kaehler form",
        h,
        flat_riemann(&r)?,
        move |ps| {
            let mut fs = FluxSpec::zero(ps);
            fs.gamma = mono(&l, c(g), &[U, X1])?;
            fs.delta = flat_kahler(&rr)?;
            Ok(fs)
        },
        unit_box(),
    )
}

fn varpi_epsilon_ppwave(e: f64, hs: f64) -> Result<Background, CatalogError> {
    let l = WalkerData::standard_chart();
    let r = ys();
    // ‖du‖ factor stripped: ‖E dy1^dy2^dy3‖²_g = −E²
    let h = solve_walker_h(&c(-e * e))?.scale(hs);
    let rr = r.clone();
    walker_background(
        "varpi-epsilon-ppwave",
        "pp-wave with flux du ^ E dy1^dy2^dy3",
        h,
        flat_riemann(&r)?,
        move |ps| {
            let mut fs = FluxSpec::zero(ps);
            fs.varpi = KForm::dx(&l, U);
            fs.epsilon = mono(&rr, c(e), &[0, 1, 2])?;
            Ok(fs)
        },
        unit_box(),
    )
}

fn general_combined(f: [f64; 4], hs: f64) -> Result<Background, CatalogError> {
    let l = WalkerData::standard_chart();
    let r = ys();
    // every 3-form in du⌟Φ has three negative directions: Δ_ρ H = −Σ fᵢ²
    let sum: f64 = f.iter().map(|v| v * v).sum();
    let h = solve_walker_h(&c(-sum))?.scale(hs);
    let rr = r.clone();
    walker_background(
        "general-combined",
        "pp-wave with flux du ^ (f1 vol_rho + f2 dx1^dx2^nu + f3 dx1^delta + f4 epsilon)",
        h,
        flat_riemann(&r)?,
        move |ps| {
            let mut fs = FluxSpec::zero(ps);
            fs.alpha = mono(&l, c(f[0]), &[U, X1, X2, X3])?;
            fs.beta = mono(&l, c(f[1]), &[U, X1, X2])?;
            fs.nu = KForm::dx(&rr, 2);
            fs.gamma = mono(&l, c(f[2]), &[U, X1])?;
            fs.delta = mono(&rr, c(1.0), &[1, 2])?;
            fs.varpi = mono(&l, c(f[3]), &[U])?;
            fs.epsilon = mono(&rr, c(1.0), &[0, 1, 2])?;
            Ok(fs)
        },
        unit_box(),
    )
}

fn alphabeta_trig(kappa: f64, hs: f64) -> Result<Background, CatalogError> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(CatalogError::OutOfRange {
            key: "kappa".into(),
            value: kappa,
            why: "must be nonzero",
        });
    }
    let l = WalkerData::standard_chart();
    let r = ys();
    let x1 = Expr::coord(X1);
    let y1 = Expr::coord(0);
    // not polynomial, so not from the solver: −Σ∂²H = −exp(2 x1)
    let h = Expr::exp(x1.scale(2.0)).scale(0.25 * hs);
    let rr = r.clone();
    walker_background(
        "alphabeta-trig",
        "pp-wave x S^1 x R^5 (y1 periodic with period 2 pi), phi = sin(y1), nu = cos(y1) dy1 / kappa",
        h,
        flat_riemann(&r)?,
        move |ps| {
            let mut fs = FluxSpec::zero(ps);
            let f = Expr::exp(x1);
            fs.phi = Expr::sin(y1.clone());
            fs.nu = mono(&rr, Expr::cos(y1).scale(1.0 / kappa), &[0])?;
            fs.alpha = mono(&l, f.clone(), &[U, X1, X2, X3])?;
            // β̃ = du ^ ω with ω = κ exp(x1) dx2^dx3
            fs.beta = mono(&l, f.scale(kappa), &[U, X2, X3])?;
            Ok(fs)
        },
        unit_box().set(5, -3.0, 3.0),
    )
}

fn alphabeta_poly(big_l: f64, hs: f64) -> Result<Background, CatalogError> {
    positive("L", big_l)?;
    let l = WalkerData::standard_chart();
    let r = ys();
    let x1 = Expr::coord(X1);
    let rhs = Expr::neg(Expr::add(vec![c(big_l * big_l), Expr::powi(x1.clone(), 2)]));
    let h = solve_walker_h(&rhs)?.scale(hs);
    let riemann = flat_riemann(&r)?.with_singular(vec![
        SingularHyperplane { coord: 0, value: -big_l },
        SingularHyperplane { coord: 0, value: big_l },
    ]);
    let rr = r.clone();
    walker_background(
        "alphabeta-poly",
        "pp-wave x (-L,L) x R^5, nu = -y1 dy1 + sqrt(L^2 - y1^2) dy2, f = x1",
        h,
        riemann,
        move |ps| {
            let mut fs = FluxSpec::zero(ps);
            let y1 = Expr::coord(0);
            let root = Expr::sqrt(Expr::sub(c(big_l * big_l), Expr::powi(y1.clone(), 2)));
            fs.alpha = mono(&l, x1, &[U, X1, X2, X3])?;
            fs.beta = mono(&l, c(1.0), &[U, X2, X3])?;
            fs.nu = mono(&rr, Expr::neg(y1), &[0])?.add(&mono(&rr, root, &[1])?)?;
            Ok(fs)
        },
        unit_box().set(5, -big_l, big_l),
    )
}

/// Area form and metric factor of a round sphere of curvature K in
/// stereographic coordinates `(a, b)`: `(4/K)/(1 + a² + b²)²`.
fn sphere_factor(k: f64, a: usize, b: usize) -> Expr {
    let r2 = Expr::add(vec![
        c(1.0),
        Expr::powi(Expr::coord(a), 2),
        Expr::powi(Expr::coord(b), 2),
    ]);
    Expr::div(c(4.0 / k), Expr::powi(r2, 2))
}

/// `(S²)³` with `g = −(g₁ + g₂ + g₃)` and Kähler form `ω = Ω₁ + Ω₂ + Ω₃`.
pub fn spheres_cubed(k: f64) -> Result<(Metric, KForm), CatalogError> {
    positive("K", k)?;
    let r = ys();
    let factors: Vec<Expr> = (0..3).map(|s| sphere_factor(k, 2 * s, 2 * s + 1)).collect();
    let diag = (0..6).map(|i| Expr::neg(factors[i / 2].clone())).collect();
    let g = Metric::diagonal(&r, diag, (0, 6))?;
    let omega = KForm::from_terms(
        &r,
        2,
        (0..3).map(|s| (vec![2 * s, 2 * s + 1], factors[s].clone())),
    )?;
    Ok((g, omega))
}

/// AdS₅ Poincaré patch `(L²/z²)(dt² − Σdxᵢ² − dz²)` on `(t, x1, x2, x3, z)`.
pub fn ads5(big_l: f64) -> Result<Metric, CatalogError> {
    positive("L", big_l)?;
    let chart = Chart::new(&["t", "x1", "x2", "x3", "z"])?;
    let conf = Expr::div(c(big_l * big_l), Expr::powi(Expr::coord(4), 2));
    let diag = [1.0, -1.0, -1.0, -1.0, -1.0].iter().map(|s| conf.scale(*s)).collect();
    Ok(Metric::diagonal(&chart, diag, (1, 4))?
        .with_singular(vec![SingularHyperplane { coord: 4, value: 0.0 }]))
}

fn kahler_theta(k: f64, cc: f64, big_l: f64) -> Result<Background, CatalogError> {
    let (g, omega) = spheres_cubed(k)?;
    let gt = ads5(big_l)?;
    let theta = hodge_std(&omega, &g)?.scale_const(cc);
    let ps = ProductStructure::new(gt, g)?;
    let mut fs = FluxSpec::zero(&ps);
    fs.theta = theta;
    Ok(Background::new(
        "kahler-theta",
        "AdS5 (Poincare patch) x (S^2)^3 with flux c *6(omega)",
        ps,
        fs,
        unit_box().set(4, 0.5, 1.5),
    )?)
}
