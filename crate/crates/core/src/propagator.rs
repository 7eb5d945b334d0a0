//! Exact interaction-picture propagator of one `Δ` subspace under the
//! coupling `λ(t) = λ₀ sech(t / 2τ)`.
//!
//! Writing `Uᵢ = exp[−iδ̄(t−t₀)σ₃] Ũ` with `Ũ = [[H*, F*], [−F, H]]`, both `H`
//! and `F` solve
//!
//! ```text
//! X″ + (−d/dt ln λ + 2iδ̄) X′ + χ λ² X = 0
//! ```
//!
//! with `H(t₀) = 1, H′(t₀) = 0` and `F(t₀) = 0, F′(t₀) = i√χ λ(t₀)`. In the
//! logistic variable `z = e^{t/τ} / (1 + e^{t/τ})` this is the hypergeometric
//! equation with `a = α`, `b = −α`, `c = γ`, where
//! `α = 2λ₀τ√χ` and `γ = 1/2 + 2iδ̄τ`.

use std::f64::consts::FRAC_PI_2;

use crate::algebra::{subspace_params, ModelSpec, SubspaceParams};
use crate::specfun::{hyp2f1_grid, second_solution_grid, ZPoint};
use crate::{Error, Result, C64};

/// Largest `|t/τ|` fed to the logistic map. Beyond it `1 − z` (or `z`)
/// would underflow; the coupling there is below `e^{-350} λ₀`.
const MAX_REDUCED_TIME: f64 = 700.0;

/// Parameters of the sech coupling pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Peak coupling `λ₀`, reached at `t = 0`.
    pub lambda0: f64,
    /// Width parameter `τ`.
    pub tau: f64,
    /// Time at which the propagator is the identity.
    pub t0: f64,
}

impl PulseParams {
    pub fn new(lambda0: f64, tau: f64, t0: f64) -> Result<Self> {
        if !(lambda0 >= 0.0 && lambda0.is_finite()) {
            return Err(Error::Domain(format!("peak coupling must be ≥ 0, got {lambda0}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("pulse width must be > 0, got {tau}")));
        }
        if !t0.is_finite() {
            return Err(Error::Domain("initial time must be finite".into()));
        }
        Ok(PulseParams { lambda0, tau, t0 })
    }

    /// `λ(t) = λ₀ sech(t / 2τ)`.
    pub fn coupling(&self, t: f64) -> f64 {
        let x = (t / (2.0 * self.tau)).abs();
        // sech x = 2e^{-x} / (1 + e^{-2x})
        let e = (-x).exp();
        self.lambda0 * 2.0 * e / (1.0 + e * e)
    }

    /// Pulse area `Θ(t) = ∫_{t₀}^{t} λ(t′) dt′ = 2λ₀τ [gd(t/2τ) − gd(t₀/2τ)]`.
    pub fn area(&self, t: f64) -> f64 {
        let two_tau = 2.0 * self.tau;
        2.0 * self.lambda0 * self.tau * gudermannian_difference(self.t0 / two_tau, t / two_tau)
    }
}

/// Gudermannian function `gd(x) = 2 arctan(eˣ) − π/2`.
pub fn gudermannian(x: f64) -> f64 {
    x.sinh().atan()
}

/// `gd(x1) − gd(x0)` without cancellation when both arguments are large.
fn gudermannian_difference(x0: f64, x1: f64) -> f64 {
    let x0 = x0.clamp(-MAX_REDUCED_TIME, MAX_REDUCED_TIME);
    let x1 = x1.clamp(-MAX_REDUCED_TIME, MAX_REDUCED_TIME);
    // 2[atan(e^{x1}) − atan(e^{x0})] = 2 atan((e^{x1} − e^{x0}) / (1 + e^{x1+x0}))
    let ratio = if x0 + x1 > 0.0 {
        ((-x0).exp() - (-x1).exp()) / (1.0 + (-x0 - x1).exp())
    } else {
        (x1.exp() - x0.exp()) / (1.0 + (x0 + x1).exp())
    };
    2.0 * ratio.atan()
}

/// Logistic time variable `z(t) = e^{t/τ} / (1 + e^{t/τ})`.
pub fn z_of_t(t: f64, tau: f64) -> f64 {
    mapped_time(t, tau).z
}

/// `z(t)` together with `1 − z(t)`, both to full relative precision.
pub fn mapped_time(t: f64, tau: f64) -> ZPoint {
    ZPoint::logistic((t / tau).clamp(-MAX_REDUCED_TIME, MAX_REDUCED_TIME))
}

/// Dimensionless `(α, γ)` of a subspace: `α = 2λ₀τ√χ`, `γ = 1/2 + 2iδ̄τ`.
pub fn sech_parameters(params: &SubspaceParams, pulse: &PulseParams) -> (f64, C64) {
    let alpha = 2.0 * pulse.lambda0 * pulse.tau * params.coupling_weight;
    let gamma = C64::new(0.5, 2.0 * params.delta_eff * pulse.tau);
    (alpha, gamma)
}

/// Constants matching the hypergeometric solutions to the initial data:
/// `H = A_h F₁ + B_h F₂`, `F = A_f F₁ + B_f F₂` with
/// `F₁ = ₂F₁(α, −α; γ; z)` and `F₂ = z^{1−γ} ₂F₁(α−γ+1, −α−γ+1; 2−γ; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricCoefficients {
    pub a_h: C64,
    pub b_h: C64,
    pub a_f: C64,
    pub b_f: C64,
}

pub fn hypergeometric_coefficients(alpha: f64, gamma: C64, z0: ZPoint) -> Result<HypergeometricCoefficients> {
    if gamma.im.abs() < 1e-13 && (gamma.re - gamma.re.round()).abs() < 1e-12 {
        return Err(Error::Degenerate(format!(
            "γ = {gamma} is an integer; the two hypergeometric solutions are not independent"
        )));
    }
    if !(z0.z > 0.0 && z0.one_minus_z > 0.0) {
        return Err(Error::Domain(format!("z₀ = {} must lie strictly inside (0, 1)", z0.z)));
    }
    let one = C64::new(1.0, 0.0);
    let i = C64::i();
    let ln_z = z0.z.ln();
    let ln_w = z0.one_minus_z.ln();
    let ln_ratio = ln_z - ln_w;
    let a1 = alpha - gamma + 1.0;
    let b1 = -alpha - gamma + 1.0;
    let at = |a: C64, b: C64, c: C64| -> Result<C64> { Ok(hyp2f1_grid(a, b, c, &[z0])?[0]) };

    let a_h = ((one - gamma) * ln_w).exp() * at(a1, b1, one - gamma)?;
    let b_h = alpha * alpha * z0.z / (gamma * (one - gamma))
        * ((gamma - 1.0) * ln_ratio).exp()
        * at((alpha + 1.0).into(), (1.0 - alpha).into(), gamma + 1.0)?;
    let prefactor = i * alpha / (one - gamma) * ((gamma - 0.5) * ln_ratio).exp();
    let a_f = -prefactor * ((one - gamma) * ln_z).exp() * at(a1, b1, 2.0 - gamma)?;
    let b_f = prefactor * at(alpha.into(), (-alpha).into(), gamma)?;
    Ok(HypergeometricCoefficients { a_h, b_h, a_f, b_f })
}

/// `(H, F)` of one subspace at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspacePropagator {
    pub delta_total: u64,
    pub h: C64,
    pub f: C64,
    pub t: f64,
}

impl SubspacePropagator {
    pub fn identity(delta_total: u64, t: f64) -> Self {
        SubspacePropagator {
            delta_total,
            h: C64::new(1.0, 0.0),
            f: C64::new(0.0, 0.0),
            t,
        }
    }

    /// `|H|² + |F|² − 1`.
    pub fn unitarity_defect(&self) -> f64 {
        self.h.norm_sqr() + self.f.norm_sqr() - 1.0
    }

    /// Transition probability `|F|²`.
    pub fn transfer(&self) -> f64 {
        self.f.norm_sqr()
    }
}

/// The hypergeometric solution of one subspace, with its constants computed
/// once and reusable for any number of evaluation times.
#[derive(Debug, Clone)]
pub struct SechSolution {
    delta_total: u64,
    alpha: f64,
    gamma: C64,
    tau: f64,
    coefficients: HypergeometricCoefficients,
}

impl SechSolution {
    pub fn new(model: &ModelSpec, pulse: &PulseParams, delta_total: u64) -> Result<Self> {
        let params = subspace_params(model, delta_total)?;
        let (alpha, gamma) = sech_parameters(&params, pulse);
        Self::from_parameters(delta_total, alpha, gamma, pulse)
    }

    /// Same as [`SechSolution::new`] with `γ` displaced by `offset`. Produces a
    /// wrong propagator on purpose; used to exercise cross-checks.
    #[doc(hidden)]
    pub fn with_gamma_offset(model: &ModelSpec, pulse: &PulseParams, delta_total: u64, offset: C64) -> Result<Self> {
        let params = subspace_params(model, delta_total)?;
        let (alpha, gamma) = sech_parameters(&params, pulse);
        Self::from_parameters(delta_total, alpha, gamma + offset, pulse)
    }

    pub fn from_parameters(delta_total: u64, alpha: f64, gamma: C64, pulse: &PulseParams) -> Result<Self> {
        let z0 = mapped_time(pulse.t0, pulse.tau);
        let coefficients = hypergeometric_coefficients(alpha, gamma, z0)?;
        Ok(SechSolution {
            delta_total,
            alpha,
            gamma,
            tau: pulse.tau,
            coefficients,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    pub fn coefficients(&self) -> &HypergeometricCoefficients {
        &self.coefficients
    }

    pub fn eval(&self, t: f64) -> Result<SubspacePropagator> {
        Ok(self.eval_grid(&[t])?[0])
    }

    pub fn eval_grid(&self, times: &[f64]) -> Result<Vec<SubspacePropagator>> {
        if self.alpha == 0.0 {
            return Ok(times.iter().map(|&t| SubspacePropagator::identity(self.delta_total, t)).collect());
        }
        let points: Vec<ZPoint> = times.iter().map(|&t| mapped_time(t, self.tau)).collect();
        let regular = hyp2f1_grid(self.alpha.into(), (-self.alpha).into(), self.gamma, &points)?;
        let singular = second_solution_grid(self.alpha, self.gamma, &points)?;
        let k = &self.coefficients;
        Ok(times
            .iter()
            .zip(regular.into_iter().zip(singular))
            .map(|(&t, (f1, f2))| SubspacePropagator {
                delta_total: self.delta_total,
                h: k.a_h * f1 + k.b_h * f2,
                f: k.a_f * f1 + k.b_f * f2,
                t,
            })
            .collect())
    }
}

/// Exact `(H, F)` of subspace `delta_total` at time `t`.
pub fn propagate_subspace(model: &ModelSpec, pulse: &PulseParams, delta_total: u64, t: f64) -> Result<SubspacePropagator> {
    SechSolution::new(model, pulse, delta_total)
        .and_then(|s| s.eval(t))
        .map_err(|e| e.at(delta_total, t))
}

/// Closed form for a subspace with `δ̄ = 0`, where the interaction
/// Hamiltonian commutes with itself at different times:
/// `H = cos(√χ Θ)`, `F = i sin(√χ Θ)`, `Θ` the pulse area since `t₀`.
pub fn propagate_zero_detuning(model: &ModelSpec, pulse: &PulseParams, delta_total: u64, t: f64) -> Result<SubspacePropagator> {
    let params = subspace_params(model, delta_total)?;
    if params.delta_eff != 0.0 {
        return Err(Error::Domain(format!(
            "zero-detuning propagator called for Δ={delta_total} with δ̄ = {}",
            params.delta_eff
        )));
    }
    let phase = params.coupling_weight * pulse.area(t);
    Ok(SubspacePropagator {
        delta_total,
        h: C64::new(phase.cos(), 0.0),
        f: C64::new(0.0, phase.sin()),
        t,
    })
}

/// Total area of a pulse running from `−∞` to `+∞`: `2πλ₀τ`.
pub fn full_pulse_area(pulse: &PulseParams) -> f64 {
    4.0 * FRAC_PI_2 * pulse.lambda0 * pulse.tau
}
