use std::collections::BTreeMap;
use std::fmt;

use super::background::SamplePlan;
use super::flux::{FluxSpec, Pieces};
use super::SugraError;
use crate::exterior::{hodge_std, KForm, Mask, NumForm};
use crate::geometry::ProductStructure;

/// Fitted constants with magnitude below this are taken to be zero.
pub const ZERO_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedCase {
    /// One of the nine sparsity patterns, numbered 1..=9.
    Case(u8),
    /// Lorentzian pieces share a coordinate 1-form factor `dx^i` and `θ = 0`.
    ProductFactor(usize),
    General,
    /// `Φ = 0`.
    Zero,
}

impl fmt::Display for ReducedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReducedCase::Case(k) => write!(f, "case ({k})"),
            ReducedCase::ProductFactor(i) => write!(f, "product-factor (coordinate {i})"),
            ReducedCase::General => write!(f, "general"),
            ReducedCase::Zero => write!(f, "zero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubResidual {
    pub equation: String,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCaseDiagnosis {
    pub case: ReducedCase,
    pub kappa: Option<f64>,
    pub lambda: Option<f64>,
    pub residuals: Vec<SubResidual>,
    /// False only for case (8) with both pieces present.
    pub consistent: bool,
}

impl ReducedCaseDiagnosis {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, r| a.max(r.max))
    }
}

/// Sparsity pattern to case number.
pub fn classify(p: Pieces) -> Option<u8> {
    let key = (p.alpha, p.beta_nu, p.gamma_delta, p.varpi_epsilon, p.theta);
    match key {
        (true, false, false, false, false) => Some(1),
        (false, true, false, false, false) => Some(2),
        (false, false, true, false, false) => Some(3),
        (false, false, false, true, false) => Some(4),
        (false, false, false, false, true) => Some(5),
        (true, true, false, false, false) => Some(6),
        (false, false, false, true, true) => Some(7),
        (true, false, false, false, true) => Some(8),
        (false, true, false, true, false) => Some(9),
        _ => None,
    }
}

/// Coordinate `i` such that every term of every nonzero Lorentzian piece
/// contains `dx^i`.
fn common_factor(fs: &FluxSpec, p: Pieces) -> Option<usize> {
    let mut common: Mask = (1 << fs.alpha.dim()) - 1;
    let mut any = false;
    let forms = [
        (p.alpha, &fs.alpha),
        (p.beta_nu, &fs.beta),
        (p.gamma_delta, &fs.gamma),
        (p.varpi_epsilon, &fs.varpi),
    ];
    for (present, f) in forms {
        if !present {
            continue;
        }
        any = true;
        for (m, _) in f.masks() {
            common &= m;
        }
    }
    if any && common != 0 {
        Some(common.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Forms on the factor charts, embedded into the product chart so that all
/// sub-equations are evaluated at the same product points.
struct Ctx<'a> {
    ps: &'a ProductStructure,
    plan: &'a SamplePlan,
}

impl Ctx<'_> {
    fn up_l(&self, f: &KForm) -> Result<KForm, SugraError> {
        Ok(f.embed(&self.ps.chart(), &self.ps.lorentz_map())?)
    }

    fn up_r(&self, f: &KForm) -> Result<KForm, SugraError> {
        Ok(f.embed(&self.ps.chart(), &self.ps.riemann_map())?)
    }

    fn star_l(&self, f: &KForm) -> Result<KForm, SugraError> {
        self.up_l(&hodge_std(f, &self.ps.lorentz)?)
    }

    fn star_r(&self, f: &KForm) -> Result<KForm, SugraError> {
        self.up_r(&hodge_std(f, &self.ps.riemann)?)
    }

    fn eval_all(&self, f: &KForm) -> Result<Vec<NumForm>, SugraError> {
        self.plan
            .points
            .iter()
            .map(|p| f.eval(p).map_err(SugraError::from))
            .collect()
    }

    /// Max absolute coefficient over the plan.
    fn max(&self, f: &KForm) -> Result<f64, SugraError> {
        Ok(self
            .eval_all(f)?
            .iter()
            .fold(0.0, |a, n| a.max(n.max_abs().0)))
    }

    /// Least-squares `c` in `a = c·b` over all points and components, with
    /// the residual `max |a − c b|`. Returns `c = 0` when `b` vanishes.
    fn fit(&self, a: &KForm, b: &KForm) -> Result<(f64, f64), SugraError> {
        let na = self.eval_all(a)?;
        let nb = self.eval_all(b)?;
        let (mut ab, mut bb) = (0.0, 0.0);
        for (x, y) in na.iter().zip(&nb) {
            let masks: BTreeMap<Mask, ()> = x.terms().chain(y.terms()).map(|(m, _)| (m, ())).collect();
            for m in masks.keys() {
                ab += x.get(*m) * y.get(*m);
                bb += y.get(*m) * y.get(*m);
            }
        }
        let mut c = if bb > 0.0 { ab / bb } else { 0.0 };
        if c.abs() < ZERO_THRESHOLD {
            c = 0.0;
        }
        let res = na
            .iter()
            .zip(&nb)
            .fold(0.0f64, |acc, (x, y)| acc.max(x.sub(&y.scale(c)).max_abs().0));
        Ok((c, res))
    }
}

fn sub(name: &str, max: f64) -> SubResidual {
    SubResidual {
        equation: name.to_string(),
        max,
    }
}

fn d(f: &KForm) -> KForm {
    f.ext_d()
}

fn w(a: &KForm, b: &KForm) -> Result<KForm, SugraError> {
    Ok(a.wedge(b)?)
}

fn minus(a: &KForm, b: &KForm) -> Result<KForm, SugraError> {
    Ok(a.sub(b)?)
}

/// Identifies the reduced case of the closedness and Maxwell system and
/// reports the residual of each of its equations.
pub fn diagnose_reduced_case(
    fs: &FluxSpec,
    ps: &ProductStructure,
    plan: &SamplePlan,
) -> Result<ReducedCaseDiagnosis, SugraError> {
    fs.validate(ps)?;
    let pieces = fs.pieces();
    let cx = Ctx { ps, plan };
    let phi = KForm::scalar(ps.riemann.chart(), fs.phi.clone());
    let psi = KForm::scalar(ps.lorentz.chart(), fs.psi.clone());
    let l = |f: &KForm| cx.up_l(f);
    let r = |f: &KForm| cx.up_r(f);
    let mut out = ReducedCaseDiagnosis {
        case: ReducedCase::General,
        kappa: None,
        lambda: None,
        residuals: Vec::new(),
        consistent: true,
    };
    let push = |out: &mut ReducedCaseDiagnosis, name: &str, f: &KForm| -> Result<(), SugraError> {
        let m = cx.max(f)?;
        out.residuals.push(sub(name, m));
        Ok(())
    };
    let case = classify(pieces);
    match case {
        Some(1) => {
            push(&mut out, "d phi", &r(&d(&phi))?)?;
            push(&mut out, "d alpha", &l(&d(&fs.alpha))?)?;
            push(&mut out, "d *5 alpha", &l(&d(&hodge_std(&fs.alpha, &ps.lorentz)?))?)?;
        }
        Some(2) => {
            push(&mut out, "d beta", &l(&d(&fs.beta))?)?;
            push(&mut out, "d *5 beta", &l(&d(&hodge_std(&fs.beta, &ps.lorentz)?))?)?;
            push(&mut out, "d nu", &r(&d(&fs.nu))?)?;
            push(&mut out, "d *6 nu", &r(&d(&hodge_std(&fs.nu, &ps.riemann)?))?)?;
        }
        Some(3) => {
            let g = &fs.gamma;
            let dl = &fs.delta;
            push(&mut out, "d gamma", &l(&d(g))?)?;
            push(&mut out, "d delta", &r(&d(dl))?)?;
            push(&mut out, "d *6 delta", &r(&d(&hodge_std(dl, &ps.riemann)?))?)?;
            let ds5g = l(&d(&hodge_std(g, &ps.lorentz)?))?;
            let s6d = cx.star_r(dl)?;
            let gg = l(&w(g, g)?)?;
            let dd = r(&w(dl, dl)?)?;
            let lhs = w(&ds5g, &s6d)?;
            let rhs = w(&gg, &dd)?.scale_const(0.5);
            push(&mut out, "d *5 gamma ^ *6 delta - 1/2 gamma^gamma^delta^delta", &minus(&lhs, &rhs)?)?;
            if cx.max(&gg)? > ZERO_THRESHOLD {
                let (k, res) = cx.fit(&ds5g, &gg)?;
                out.kappa = Some(k);
                out.residuals.push(sub("d *5 gamma - kappa gamma^gamma", res));
                push(
                    &mut out,
                    "kappa *6 delta - 1/2 delta^delta",
                    &minus(&s6d.scale_const(k), &dd.scale_const(0.5))?,
                )?;
            } else {
                push(&mut out, "d *5 gamma", &ds5g)?;
            }
        }
        Some(4) => {
            push(&mut out, "d varpi", &l(&d(&fs.varpi))?)?;
            push(&mut out, "d *5 varpi", &l(&d(&hodge_std(&fs.varpi, &ps.lorentz)?))?)?;
            push(&mut out, "d epsilon", &r(&d(&fs.epsilon))?)?;
            push(&mut out, "d *6 epsilon", &r(&d(&hodge_std(&fs.epsilon, &ps.riemann)?))?)?;
        }
        Some(5) => {
            push(&mut out, "d psi", &l(&d(&psi))?)?;
            push(&mut out, "d theta", &r(&d(&fs.theta))?)?;
            push(&mut out, "d *6 theta", &r(&d(&hodge_std(&fs.theta, &ps.riemann)?))?)?;
        }
        Some(6) => {
            push(&mut out, "d alpha", &l(&d(&fs.alpha))?)?;
            push(&mut out, "d *5 beta", &l(&d(&hodge_std(&fs.beta, &ps.lorentz)?))?)?;
            push(&mut out, "d nu", &r(&d(&fs.nu))?)?;
            let (k, res) = cx.fit(&r(&d(&phi))?, &r(&fs.nu)?)?;
            out.kappa = Some(k);
            out.residuals.push(sub("d phi - kappa nu", res));
            push(
                &mut out,
                "d beta + kappa alpha",
                &l(&d(&fs.beta).add(&fs.alpha.scale_const(k))?)?,
            )?;
            let (lam, res) = cx.fit(&r(&d(&hodge_std(&fs.nu, &ps.riemann)?))?, &cx.star_r(&phi)?)?;
            out.lambda = Some(lam);
            out.residuals.push(sub("d *6 nu - lambda *6 phi", res));
            let lhs = d(&hodge_std(&fs.alpha, &ps.lorentz)?);
            let s5b = hodge_std(&fs.beta, &ps.lorentz)?;
            push(
                &mut out,
                "d *5 alpha + lambda *5 beta",
                &l(&lhs.add(&s5b.scale_const(lam))?)?,
            )?;
        }
        Some(7) => {
            push(&mut out, "d theta", &r(&d(&fs.theta))?)?;
            push(&mut out, "d varpi", &l(&d(&fs.varpi))?)?;
            push(&mut out, "d *6 epsilon", &r(&d(&hodge_std(&fs.epsilon, &ps.riemann)?))?)?;
            let (k, res) = cx.fit(&l(&d(&psi))?, &l(&fs.varpi)?)?;
            out.kappa = Some(k);
            out.residuals.push(sub("d psi - kappa varpi", res));
            push(
                &mut out,
                "d epsilon - kappa theta",
                &r(&d(&fs.epsilon).sub(&fs.theta.scale_const(k))?)?,
            )?;
            let (lam, res) = cx.fit(&l(&d(&hodge_std(&fs.varpi, &ps.lorentz)?))?, &cx.star_l(&psi)?)?;
            out.lambda = Some(lam);
            out.residuals.push(sub("d *5 varpi - lambda *5 psi", res));
            let lhs = d(&hodge_std(&fs.theta, &ps.riemann)?);
            let s6e = hodge_std(&fs.epsilon, &ps.riemann)?;
            push(
                &mut out,
                "d *6 theta - lambda *6 epsilon",
                &r(&lhs.sub(&s6e.scale_const(lam))?)?,
            )?;
        }
        Some(8) => {
            let a = cx.max(&r(&phi)?.wedge(&l(&fs.alpha)?)?)?;
            let t = cx.max(&l(&psi)?.wedge(&r(&fs.theta)?)?)?;
            out.residuals.push(sub("min(|phi alpha|, |psi theta|)", a.min(t)));
            out.consistent = a.min(t) < ZERO_THRESHOLD;
        }
        Some(9) => {
            push(&mut out, "d beta", &l(&d(&fs.beta))?)?;
            push(&mut out, "d nu", &r(&d(&fs.nu))?)?;
            push(&mut out, "d varpi", &l(&d(&fs.varpi))?)?;
            push(&mut out, "d epsilon", &r(&d(&fs.epsilon))?)?;
            push(&mut out, "d *6 nu", &r(&d(&hodge_std(&fs.nu, &ps.riemann)?))?)?;
            push(&mut out, "d *5 beta", &l(&d(&hodge_std(&fs.beta, &ps.lorentz)?))?)?;
            push(&mut out, "d *5 varpi", &l(&d(&hodge_std(&fs.varpi, &ps.lorentz)?))?)?;
            let s5v = cx.star_l(&fs.varpi)?;
            let ds6e = r(&d(&hodge_std(&fs.epsilon, &ps.riemann)?))?;
            let bv = l(&w(&fs.beta, &fs.varpi)?)?;
            let en = r(&w(&fs.epsilon, &fs.nu)?)?;
            push(
                &mut out,
                "*5 varpi ^ d *6 epsilon - beta^varpi^epsilon^nu",
                &minus(&w(&s5v, &ds6e)?, &w(&bv, &en)?)?,
            )?;
            if cx.max(&en)? > ZERO_THRESHOLD {
                let (k, res) = cx.fit(&ds6e, &en)?;
                out.kappa = Some(k);
                out.residuals.push(sub("d *6 epsilon - kappa epsilon^nu", res));
                push(&mut out, "kappa *5 varpi - beta^varpi", &minus(&s5v.scale_const(k), &bv)?)?;
            } else {
                push(&mut out, "d *6 epsilon", &ds6e)?;
            }
        }
        _ => {}
    }
    if let Some(k) = case {
        out.case = ReducedCase::Case(k);
        return Ok(out);
    }
    if pieces == Pieces::default() {
        out.case = ReducedCase::Zero;
        return Ok(out);
    }
    // Outside the nine patterns: the typed Maxwell system, which reduces to
    // four homogeneous equations when the Lorentzian pieces share a factor.
    let s6phi = cx.star_r(&phi)?;
    let sa = l(&d(&hodge_std(&fs.alpha, &ps.lorentz)?))?;
    let sb = cx.star_l(&fs.beta)?;
    let dsb = l(&d(&hodge_std(&fs.beta, &ps.lorentz)?))?;
    let s6nu = cx.star_r(&fs.nu)?;
    let ds6nu = r(&d(&hodge_std(&fs.nu, &ps.riemann)?))?;
    let sg = cx.star_l(&fs.gamma)?;
    let dsg = l(&d(&hodge_std(&fs.gamma, &ps.lorentz)?))?;
    let s6d = cx.star_r(&fs.delta)?;
    let ds6d = r(&d(&hodge_std(&fs.delta, &ps.riemann)?))?;
    let sv = cx.star_l(&fs.varpi)?;
    let dsv = l(&d(&hodge_std(&fs.varpi, &ps.lorentz)?))?;
    let s6e = cx.star_r(&fs.epsilon)?;
    let ds6e = r(&d(&hodge_std(&fs.epsilon, &ps.riemann)?))?;
    let s5psi = cx.star_l(&psi)?;
    let ds6t = r(&d(&hodge_std(&fs.theta, &ps.riemann)?))?;
    let (pa, b, nu, g, dl, v, e, ps_, th) = (
        r(&phi)?.wedge(&l(&fs.alpha)?)?,
        l(&fs.beta)?,
        r(&fs.nu)?,
        l(&fs.gamma)?,
        r(&fs.delta)?,
        l(&fs.varpi)?,
        r(&fs.epsilon)?,
        l(&psi)?,
        r(&fs.theta)?,
    );
    let lhs = [
        w(&sa, &s6phi)?.add(&w(&sb, &ds6nu)?)?,
        w(&dsb, &s6nu)?.sub(&w(&sg, &ds6d)?)?,
        w(&dsg, &s6d)?.add(&w(&sv, &ds6e)?)?,
        w(&dsv, &s6e)?.sub(&w(&s5psi, &ds6t)?)?,
    ];
    let rhs = [
        w(&w(&w(&ps_, &g)?, &th)?, &dl)?,
        w(&w(&w(&ps_, &b)?, &th)?, &nu)?.add(&w(&w(&w(&g, &v)?, &e)?, &dl)?)?,
        w(&w(&ps_, &pa)?, &th)?
            .add(&w(&w(&w(&b, &v)?, &e)?, &nu)?)?
            .add(&w(&w(&w(&g, &g)?, &dl)?, &dl)?.scale_const(0.5))?,
        w(&w(&pa, &v)?, &e)?.add(&w(&w(&w(&b, &g)?, &dl)?, &nu)?)?,
    ];
    push(&mut out, "d Phi", &super::assemble_flux(fs, ps)?.ext_d())?;
    let names = ["(2~,6)", "(3~,5)", "(4~,4)", "(5~,3)"];
    let factor = if pieces.theta { None } else { common_factor(fs, pieces) };
    for k in 0..4 {
        match factor {
            Some(_) => {
                push(&mut out, &format!("maxwell {} lhs", names[k]), &lhs[k])?;
                out.residuals.push(sub(
                    &format!("maxwell {} rhs", names[k]),
                    cx.max(&rhs[k])?,
                ));
            }
            None => push(&mut out, &format!("maxwell {}", names[k]), &minus(&lhs[k], &rhs[k])?)?,
        }
    }
    out.case = match factor {
        Some(i) => ReducedCase::ProductFactor(i),
        None => ReducedCase::General,
    };
    Ok(out)
}
