//! Shared test helpers: a finite-difference curvature oracle, random
//! expressions and forms, and a few fixed metrics.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;

use sugra::exprlang::{Chart, Expr};
use sugra::exterior::{KForm, Metric, NumForm};

/// Central difference with one Richardson step: `(4 D(h/2) − D(h)) / 3`.
pub fn richardson<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    let d = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn shifted(p: &[f64], i: usize, s: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += s;
    q
}

/// `Γ^k_ij` from finite differences of the metric components.
pub fn fd_christoffel(g: &dyn Fn(&[f64]) -> DMatrix<f64>, p: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let n = p.len();
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|l| {
            DMatrix::from_fn(n, n, |i, j| richardson(|s| g(&shifted(p, l, s))[(i, j)], h))
        })
        .collect();
    let inv = g(p).try_inverse().expect("invertible metric");
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += inv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                }
                gamma[k][i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// `R_ij = ∂_kΓ^k_ij − ∂_jΓ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik`, with the
/// Christoffel symbols differentiated numerically once more.
pub fn fd_ricci(g: &dyn Fn(&[f64]) -> DMatrix<f64>, p: &[f64], h: f64) -> DMatrix<f64> {
    let n = p.len();
    let inner = h / 10.0;
    let gam = fd_christoffel(g, p, inner);
    // dgam[l][k][i][j] = ∂_l Γ^k_ij
    let dgam: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|l| {
            let plus_h = fd_christoffel(g, &shifted(p, l, h / 2.0), inner);
            let minus_h = fd_christoffel(g, &shifted(p, l, -h / 2.0), inner);
            let plus_2h = fd_christoffel(g, &shifted(p, l, h), inner);
            let minus_2h = fd_christoffel(g, &shifted(p, l, -h), inner);
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| {
                                    let d1 = (plus_h[k][i][j] - minus_h[k][i][j]) / h;
                                    let d2 = (plus_2h[k][i][j] - minus_2h[k][i][j]) / (2.0 * h);
                                    (4.0 * d1 - d2) / 3.0
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        let mut r = 0.0;
        for k in 0..n {
            r += dgam[k][k][i][j] - dgam[j][k][i][k];
            for l in 0..n {
                r += gam[k][k][l] * gam[l][i][j] - gam[k][j][l] * gam[l][i][k];
            }
        }
        r
    })
}

pub fn metric_fn(m: &Metric) -> impl Fn(&[f64]) -> DMatrix<f64> + '_ {
    move |p| m.eval(p).expect("metric evaluates")
}

/// Random polynomial of total degree ≤ `degree` in the given coordinates,
/// with small integer-ish coefficients.
pub fn random_poly<R: Rng>(rng: &mut R, coords: &[usize], degree: u32, terms: usize) -> Expr {
    let mut sum = Vec::new();
    for _ in 0..terms {
        let mut factors = vec![Expr::constant((rng.gen_range(-20..=20) as f64) / 4.0)];
        let d = rng.gen_range(0..=degree);
        for _ in 0..d {
            factors.push(Expr::coord(coords[rng.gen_range(0..coords.len())]));
        }
        sum.push(Expr::mul(factors));
    }
    Expr::add(sum)
}

/// Random smooth coefficient: polynomial plus an occasional sine or exp.
pub fn random_coeff<R: Rng>(rng: &mut R, coords: &[usize]) -> Expr {
    let p = random_poly(rng, coords, 2, 3);
    match rng.gen_range(0..4) {
        0 => Expr::add(vec![p, Expr::sin(Expr::coord(coords[rng.gen_range(0..coords.len())]))]),
        1 => Expr::mul(vec![p, Expr::exp(Expr::coord(coords[rng.gen_range(0..coords.len())]).scale(0.5))]),
        _ => p,
    }
}

/// Random `degree`-form on `chart` whose coefficients depend on `coords`
/// and whose monomials use indices from `slots`.
pub fn random_form<R: Rng>(
    rng: &mut R,
    chart: &Chart,
    degree: usize,
    slots: &[usize],
    coords: &[usize],
    terms: usize,
) -> KForm {
    let mut out = KForm::zero(chart, degree);
    if degree > slots.len() {
        return out;
    }
    for _ in 0..terms {
        let mut pool = slots.to_vec();
        let mut idx = Vec::new();
        for _ in 0..degree {
            let k = rng.gen_range(0..pool.len());
            idx.push(pool.swap_remove(k));
        }
        let t = KForm::monomial(chart, random_coeff(rng, coords), &idx).unwrap();
        out = out.add(&t).unwrap();
    }
    out
}

pub fn random_point<R: Rng>(rng: &mut R, ranges: &[(f64, f64)]) -> Vec<f64> {
    ranges.iter().map(|&(a, b)| rng.gen_range(a..b)).collect()
}

pub fn num_diff(a: &NumForm, b: &NumForm) -> f64 {
    a.sub(b).max_abs().0
}

/// Largest coefficient of `a − b` relative to `1 + max|b|`.
pub fn rel_diff(a: &NumForm, b: &NumForm) -> f64 {
    num_diff(a, b) / (1.0 + b.max_abs().0)
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// A non-diagonal metric of signature (p, q) on `chart`: `P^T D P` with a
/// coordinate-dependent unipotent `P`, so the signature is fixed everywhere.
pub fn twisted_metric<R: Rng>(rng: &mut R, chart: &Chart, p: usize, q: usize) -> Metric {
    let n = chart.dim();
    assert_eq!(n, p + q);
    let coords: Vec<usize> = (0..n).collect();
    // upper unipotent P with a few polynomial entries
    let mut pm = vec![vec![Expr::zero(); n]; n];
    for (i, row) in pm.iter_mut().enumerate() {
        row[i] = Expr::one();
    }
    for _ in 0..n {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        pm[i][j] = random_poly(rng, &coords, 1, 2).scale(0.3);
    }
    let d: Vec<Expr> = (0..n)
        .map(|i| {
            let sign = if i < p { 1.0 } else { -1.0 };
            let c = Expr::coord(rng.gen_range(0..n));
            Expr::add(vec![Expr::constant(1.5), Expr::mul(vec![c.clone(), c])]).scale(sign)
        })
        .collect();
    let mut upper = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut s = Vec::new();
            for k in 0..=i.min(j) {
                if pm[k][i].is_zero() || pm[k][j].is_zero() {
                    continue;
                }
                s.push(Expr::mul(vec![pm[k][i].clone(), d[k].clone(), pm[k][j].clone()]));
            }
            let e = Expr::add(s);
            if !e.is_zero() {
                upper.push((i, j, e));
            }
        }
    }
    Metric::from_upper(chart, &upper, (p, q)).unwrap()
}

pub mod hodge_checks {
    use rand::Rng;

    use sugra::exprlang::Chart;
    use sugra::exterior::{form_inner, hodge_numeric, hodge_std, volume_form, KForm, Metric, NumForm};
    use sugra::geometry::{product_metric, ProductStructure};

    use super::{names, random_form, random_point, rel_diff, twisted_metric};

    /// A product of two twisted factor metrics of signatures (1,4), (0,6).
    pub struct Fixture {
        pub ps: ProductStructure,
        pub h: Metric,
        pub chart: Chart,
    }

    impl Fixture {
        pub fn new<R: Rng>(rng: &mut R) -> Fixture {
            let l = Chart::new(&names("a", 5)).unwrap();
            let r = Chart::new(&names("b", 6)).unwrap();
            let ps = ProductStructure::new(twisted_metric(rng, &l, 1, 4), twisted_metric(rng, &r, 0, 6))
                .unwrap();
            let h = product_metric(&ps).unwrap();
            let chart = h.chart().clone();
            Fixture { ps, h, chart }
        }

        pub fn point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
            random_point(rng, &vec![(-1.0, 1.0); 11])
        }
    }

    fn sign(e: usize) -> f64 {
        if e % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Max relative residual of `a ∧ ★b − ⟨a,b⟩ vol` at `p`.
    pub fn defining_identity(m: &Metric, a: &KForm, b: &KForm, p: &[f64]) -> f64 {
        let n = m.dim();
        let lhs = a.wedge(&hodge_std(b, m).unwrap()).unwrap().eval(p).unwrap();
        let vol = volume_form(m, &(0..n).collect::<Vec<_>>()).unwrap();
        let rhs = vol.eval(p).unwrap().scale(form_inner(a, b, m, p).unwrap());
        rel_diff(&lhs, &rhs)
    }

    /// Max relative residual of `★★a − (−1)^{k(n−k)+q} a` at `p`.
    pub fn double_star(m: &Metric, a: &KForm, p: &[f64]) -> f64 {
        let (n, k, q) = (m.dim(), a.degree(), m.signature().1);
        let ss = hodge_std(&hodge_std(a, m).unwrap(), m).unwrap().eval(p).unwrap();
        let expect = a.eval(p).unwrap().scale(sign(k * (n - k) + q));
        rel_diff(&ss, &expect)
    }

    /// Residuals of the six product identities for factor forms
    /// `α̃ ∈ Ω^kt(M̃)`, `β ∈ Ω^k(M)`:
    /// `★α̃ = ★₅α̃∧vol_M`, `★vol_M̃ = (−1)^s̃ vol_M`, `★β = (−1)^{pq}★₆β∧vol_M̃`,
    /// `★vol_M = (−1)^s(−1)^{pq} vol_M̃`, `‖α̃∧β‖² = ‖α̃‖²‖β‖²`,
    /// `★(α̃∧β) = (−1)^{k(p−kt)} ★₅α̃∧★₆β`.
    pub fn product_identities<R: Rng>(fx: &Fixture, rng: &mut R, kt: usize, k: usize) -> [f64; 6] {
        let (p, q) = (5usize, 6usize);
        let (st, s) = (fx.ps.lorentz.signature().1, fx.ps.riemann.signature().1);
        let (lc, rc) = (fx.ps.lorentz.chart().clone(), fx.ps.riemann.chart().clone());
        let (lm, rm) = (fx.ps.lorentz_map(), fx.ps.riemann_map());
        let up_l = |f: &KForm| f.embed(&fx.chart, &lm).unwrap();
        let up_r = |f: &KForm| f.embed(&fx.chart, &rm).unwrap();
        // the eleven-dimensional star is evaluated numerically at the point,
        // independently of the factor-wise construction under test
        let pt = fx.point(rng);
        let hinv = fx.h.eval_inverse(&pt).unwrap();
        let root = fx.h.eval(&pt).unwrap().determinant().abs().sqrt();
        let star = |f: &KForm| -> NumForm { hodge_numeric(&f.eval(&pt).unwrap(), &hinv, root, 1.0) };
        let lslots: Vec<usize> = (0..p).collect();
        let rslots: Vec<usize> = (0..q).collect();
        let alpha = random_form(rng, &lc, kt, &lslots, &lslots, 2);
        let beta = random_form(rng, &rc, k, &rslots, &rslots, 2);
        let vol_l = volume_form(&fx.ps.lorentz, &lslots).unwrap();
        let vol_r = volume_form(&fx.ps.riemann, &rslots).unwrap();
        let (a, b, vl, vr) = (up_l(&alpha), up_r(&beta), up_l(&vol_l), up_r(&vol_r));
        let star_l = up_l(&hodge_std(&alpha, &fx.ps.lorentz).unwrap());
        let star_r = up_r(&hodge_std(&beta, &fx.ps.riemann).unwrap());
        let ev = |f: &KForm| f.eval(&pt).unwrap();
        let ab = a.wedge(&b).unwrap();
        let (lp, rp) = pt.split_at(p);
        let norm_prod = form_inner(&alpha, &alpha, &fx.ps.lorentz, lp).unwrap()
            * form_inner(&beta, &beta, &fx.ps.riemann, rp).unwrap();
        let norm_ab = form_inner(&ab, &ab, &fx.h, &pt).unwrap();
        [
            rel_diff(&star(&a), &ev(&star_l.wedge(&vr).unwrap())),
            rel_diff(&star(&vl), &ev(&vr).scale(sign(st))),
            rel_diff(&star(&b), &ev(&star_r.wedge(&vl).unwrap()).scale(sign(p * q))),
            rel_diff(&star(&vr), &ev(&vl).scale(sign(s) * sign(p * q))),
            (norm_ab - norm_prod).abs() / (1.0 + norm_prod.abs()),
            rel_diff(
                &star(&ab),
                &ev(&star_l.wedge(&star_r).unwrap()).scale(sign(k * (p - kt))),
            ),
        ]
    }
}

pub mod checks;

/// Walker factor with a random polynomial profile times a twisted (0,6)
/// factor, for block-respecting random fluxes.
pub fn random_profile_metric<R: Rng>(rng: &mut R) -> sugra::geometry::ProductStructure {
    use sugra::geometry::{walker_metric, ProductStructure, WalkerData};
    let h = random_poly(rng, &[0, 1, 2, 3], 3, 4);
    let w = WalkerData::pp_wave(&WalkerData::standard_chart(), h);
    let l = walker_metric(&w, &[]).unwrap();
    let rc = Chart::new(&names("y", 6)).unwrap();
    ProductStructure::new(l, twisted_metric(rng, &rc, 0, 6)).unwrap()
}
