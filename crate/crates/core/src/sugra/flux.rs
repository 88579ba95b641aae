use super::SugraError;
use crate::exprlang::Expr;
use crate::exterior::{norm_sq, KForm, Metric};
use crate::geometry::ProductStructure;

/// The ten pieces of `Φ = φα̃ + β̃∧ν + γ̃∧δ + ϖ̃∧ε + ψ̃θ`. Tilded pieces and
/// `ψ̃` live on the Lorentzian factor chart, the others on the Riemannian one.
#[derive(Debug, Clone)]
pub struct FluxSpec {
    pub phi: Expr,
    pub alpha: KForm,
    pub beta: KForm,
    pub nu: KForm,
    pub gamma: KForm,
    pub delta: KForm,
    pub varpi: KForm,
    pub epsilon: KForm,
    pub psi: Expr,
    pub theta: KForm,
}

/// Which of the five products in the decomposition are nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pieces {
    pub alpha: bool,
    pub beta_nu: bool,
    pub gamma_delta: bool,
    pub varpi_epsilon: bool,
    pub theta: bool,
}

impl FluxSpec {
    /// All pieces zero, with `φ = ψ̃ = 1`.
    pub fn zero(ps: &ProductStructure) -> FluxSpec {
        let l = ps.lorentz.chart();
        let r = ps.riemann.chart();
        FluxSpec {
            phi: Expr::one(),
            alpha: KForm::zero(l, 4),
            beta: KForm::zero(l, 3),
            nu: KForm::zero(r, 1),
            gamma: KForm::zero(l, 2),
            delta: KForm::zero(r, 2),
            varpi: KForm::zero(l, 1),
            epsilon: KForm::zero(r, 3),
            psi: Expr::one(),
            theta: KForm::zero(r, 4),
        }
    }

    pub fn pieces(&self) -> Pieces {
        Pieces {
            alpha: !self.phi.is_zero() && !self.alpha.is_zero(),
            beta_nu: !self.beta.is_zero() && !self.nu.is_zero(),
            gamma_delta: !self.gamma.is_zero() && !self.delta.is_zero(),
            varpi_epsilon: !self.varpi.is_zero() && !self.epsilon.is_zero(),
            theta: !self.psi.is_zero() && !self.theta.is_zero(),
        }
    }

    /// Checks degrees and that every piece lives on its factor chart.
    pub fn validate(&self, ps: &ProductStructure) -> Result<(), SugraError> {
        let l = ps.lorentz.chart();
        let r = ps.riemann.chart();
        let checks: [(&str, &KForm, usize, bool); 8] = [
            ("alpha", &self.alpha, 4, true),
            ("beta", &self.beta, 3, true),
            ("nu", &self.nu, 1, false),
            ("gamma", &self.gamma, 2, true),
            ("delta", &self.delta, 2, false),
            ("varpi", &self.varpi, 1, true),
            ("epsilon", &self.epsilon, 3, false),
            ("theta", &self.theta, 4, false),
        ];
        for (name, form, degree, lorentz) in checks {
            let chart = if lorentz { l } else { r };
            if form.chart() != chart {
                return Err(SugraError::BlockViolation(format!(
                    "{name} is not defined on the {} factor",
                    if lorentz { "lorentzian" } else { "riemannian" }
                )));
            }
            if form.degree() != degree {
                return Err(SugraError::BlockViolation(format!(
                    "{name} has degree {}, expected {degree}",
                    form.degree()
                )));
            }
        }
        let bound = |e: &Expr, n: usize| e.coords().iter().all(|&i| i < n);
        if !bound(&self.phi, r.dim()) || !bound(&self.psi, l.dim()) {
            return Err(SugraError::BlockViolation("scalar piece outside its chart".into()));
        }
        Ok(())
    }
}

/// Pieces of a flux spec embedded in the product chart.
#[derive(Debug, Clone)]
pub struct EmbeddedFlux {
    pub phi_alpha: KForm,
    pub beta_nu: KForm,
    pub gamma_delta: KForm,
    pub varpi_epsilon: KForm,
    pub psi_theta: KForm,
}

impl EmbeddedFlux {
    pub fn new(fs: &FluxSpec, ps: &ProductStructure) -> Result<EmbeddedFlux, SugraError> {
        fs.validate(ps)?;
        let chart = ps.chart();
        let lm = ps.lorentz_map();
        let rm = ps.riemann_map();
        let up_l = |f: &KForm| f.embed(&chart, &lm);
        let up_r = |f: &KForm| f.embed(&chart, &rm);
        let phi = KForm::scalar(ps.riemann.chart(), fs.phi.clone());
        let psi = KForm::scalar(ps.lorentz.chart(), fs.psi.clone());
        Ok(EmbeddedFlux {
            phi_alpha: up_r(&phi)?.wedge(&up_l(&fs.alpha)?)?,
            beta_nu: up_l(&fs.beta)?.wedge(&up_r(&fs.nu)?)?,
            gamma_delta: up_l(&fs.gamma)?.wedge(&up_r(&fs.delta)?)?,
            varpi_epsilon: up_l(&fs.varpi)?.wedge(&up_r(&fs.epsilon)?)?,
            psi_theta: up_l(&psi)?.wedge(&up_r(&fs.theta)?)?,
        })
    }

    pub fn total(&self) -> KForm {
        [
            &self.beta_nu,
            &self.gamma_delta,
            &self.varpi_epsilon,
            &self.psi_theta,
        ]
        .iter()
        .fold(self.phi_alpha.clone(), |acc, f| {
            acc.add(f).expect("all pieces are 4-forms on one chart")
        })
    }
}

/// The assembled 4-form on the product chart.
pub fn assemble_flux(fs: &FluxSpec, ps: &ProductStructure) -> Result<KForm, SugraError> {
    Ok(EmbeddedFlux::new(fs, ps)?.total())
}

/// `‖Φ‖²_h` from the pieces:
/// `φ²‖α̃‖² + ‖β̃‖²‖ν‖² + ‖γ̃‖²‖δ‖² + ‖ϖ̃‖²‖ε‖² + ψ̃²‖θ‖²`.
pub fn flux_norm_sq_pieces(
    fs: &FluxSpec,
    ps: &ProductStructure,
    point: &[f64],
) -> Result<f64, SugraError> {
    let (pl, pr) = ProductStructure::split_point(point);
    let l = |f: &KForm| -> Result<f64, SugraError> { norm_l(f, &ps.lorentz, pl) };
    let r = |f: &KForm| -> Result<f64, SugraError> { norm_l(f, &ps.riemann, pr) };
    let phi = fs.phi.eval(pr)?;
    let psi = fs.psi.eval(pl)?;
    Ok(phi * phi * l(&fs.alpha)?
        + l(&fs.beta)? * r(&fs.nu)?
        + l(&fs.gamma)? * r(&fs.delta)?
        + l(&fs.varpi)? * r(&fs.epsilon)?
        + psi * psi * r(&fs.theta)?)
}

fn norm_l(f: &KForm, m: &Metric, p: &[f64]) -> Result<f64, SugraError> {
    if f.is_zero() {
        return Ok(0.0);
    }
    Ok(norm_sq(f, m, p)?)
}

/// `‖Φ‖²_h` from the assembled form and the product metric.
pub fn flux_norm_sq(phi: &KForm, h: &Metric, point: &[f64]) -> Result<f64, SugraError> {
    Ok(norm_sq(phi, h, point)?)
}
