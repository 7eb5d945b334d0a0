//! Brute-force reference: direct numerical integration of
//! `i dUᵢ/dt = (J·B) Uᵢ`, `B = 2(λ(t)√χ, 0, δ̄)`, subspace by subspace, with an
//! adaptive Dormand-Prince 5(4) pair.
//!
//! Nothing here touches the hypergeometric machinery; the results serve as
//! the independent check on [`crate::propagator`].

use crate::algebra::{classify_state, subspace_params, Atom, ModelSpec, StateClass, SubspaceParams};
use crate::propagator::{PulseParams, SubspacePropagator};
use crate::states::QuantumState;
use crate::{Error, Result, C64};

/// Tolerances and step budget of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings {
            rel_tol: 1e-12,
            abs_tol: 1e-13,
            max_steps: 2_000_000,
        }
    }
}

impl OdeSettings {
    pub fn new(rel_tol: f64, abs_tol: f64, max_steps: usize) -> Result<Self> {
        let s = OdeSettings {
            rel_tol,
            abs_tol,
            max_steps,
        };
        s.validate()?;
        Ok(s)
    }

    /// Same relative and absolute tolerance.
    pub fn with_tolerance(tol: f64) -> Result<Self> {
        Self::new(tol, tol, OdeSettings::default().max_steps)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x <= 1e-2;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::Config(format!(
                "ODE tolerances must lie in (0, 1e-2], got rel={} abs={}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("ODE step budget must be positive".into()));
        }
        Ok(())
    }
}

type State = [C64; 2];

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for &(c, k) in terms {
        if c != 0.0 {
            out[0] += k[0] * (c * h);
            out[1] += k[1] * (c * h);
        }
    }
    out
}

/// Integrates `y′ = rhs(t, y)` from `(t0, y0)` and records `y` at each of
/// `targets`, which must be sorted and not before `t0`.
fn integrate_to_targets<F>(rhs: F, t0: f64, y0: State, targets: &[f64], max_step: f64, settings: &OdeSettings) -> Result<Vec<State>>
where
    F: Fn(f64, &State) -> State,
{
    settings.validate()?;
    let mut out = Vec::with_capacity(targets.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = {
        let scale = y[0].norm() + y[1].norm();
        let slope = k1[0].norm() + k1[1].norm();
        let guess = if slope > 0.0 { 1e-2 * scale / slope } else { 1e-3 * max_step };
        guess.min(max_step).max(1e-12 * max_step)
    };
    let mut steps = 0usize;
    for &target in targets {
        if target < t0 {
            return Err(Error::Integration(format!("target time {target} precedes t₀ = {t0}")));
        }
        while t < target {
            if steps >= settings.max_steps {
                return Err(Error::Integration(format!(
                    "step budget of {} exhausted at t = {t}",
                    settings.max_steps
                )));
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            let k2 = rhs(t + C2 * step, &combo(&y, step, &[(A21, &k1)]));
            let k3 = rhs(t + C3 * step, &combo(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(t + C4 * step, &combo(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = rhs(
                t + C5 * step,
                &combo(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                t + step,
                &combo(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = combo(&y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = rhs(t + step, &y_new);
            let err_vec = combo(
                &[C64::new(0.0, 0.0); 2],
                step,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            let mut err2 = 0.0;
            for i in 0..2 {
                let sc = settings.abs_tol + settings.rel_tol * y[i].norm().max(y_new[i].norm());
                err2 += (err_vec[i].norm() / sc).powi(2);
            }
            let err = (err2 / 2.0).sqrt();
            steps += 1;
            if !err.is_finite() {
                return Err(Error::Integration(format!("non-finite error estimate at t = {t}")));
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
                if !last {
                    h = (step * factor).min(max_step);
                }
            } else {
                h = step * factor;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Integration(format!("step size underflow at t = {t}")));
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// `d/dt ψ = −i (δ̄ σ₃ + λ(t)√χ σ₁) ψ`.
fn interaction_rhs<'a>(params: &'a SubspaceParams, pulse: &'a PulseParams) -> impl Fn(f64, &State) -> State + 'a {
    let i = C64::i();
    move |t, psi| {
        let k = pulse.coupling(t) * params.coupling_weight;
        let d = params.delta_eff;
        [
            -i * (psi[0] * d + psi[1] * k),
            -i * (psi[0] * k - psi[1] * d),
        ]
    }
}

/// Solves the interaction-picture equation for `ψ(t₀) = initial` and returns
/// `ψ` at every time of `times` (sorted internally; output follows input order).
fn integrate_interaction(
    params: &SubspaceParams,
    pulse: &PulseParams,
    initial: State,
    times: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<State>> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| times[i]).collect();
    let rhs = interaction_rhs(params, pulse);
    let max_step = 0.25 * pulse.tau;
    let values = integrate_to_targets(rhs, pulse.t0, initial, &sorted, max_step, settings)?;
    let mut out = vec![[C64::new(0.0, 0.0); 2]; times.len()];
    for (slot, value) in order.into_iter().zip(values) {
        out[slot] = value;
    }
    Ok(out)
}

fn propagator_from_column(delta_total: u64, params: &SubspaceParams, t0: f64, t: f64, col: &State) -> SubspacePropagator {
    // first column of Uᵢ = e^{−iφσ₃}Ũ is (e^{−iφ} H*, −e^{iφ} F), φ = δ̄(t − t₀)
    let phase = C64::from_polar(1.0, params.delta_eff * (t - t0));
    SubspacePropagator {
        delta_total,
        h: (col[0] * phase).conj(),
        f: -col[1] / phase,
        t,
    }
}

/// `(H, F)` of subspace `delta_total` at time `t` by direct integration from `t₀`.
pub fn integrate_subspace(
    model: &ModelSpec,
    pulse: &PulseParams,
    delta_total: u64,
    t: f64,
    settings: &OdeSettings,
) -> Result<SubspacePropagator> {
    Ok(integrate_subspace_grid(model, pulse, delta_total, &[t], settings)?[0])
}

/// As [`integrate_subspace`] for many times; a single integration from `t₀`
/// passes through every requested time.
pub fn integrate_subspace_grid(
    model: &ModelSpec,
    pulse: &PulseParams,
    delta_total: u64,
    times: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<SubspacePropagator>> {
    let params = subspace_params(model, delta_total)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let cols = integrate_interaction(&params, pulse, [one, zero], times, settings)
        .map_err(|e| e.at(delta_total, times.last().copied().unwrap_or(pulse.t0)))?;
    Ok(times
        .iter()
        .zip(cols.iter())
        .map(|(&t, col)| propagator_from_column(delta_total, &params, pulse.t0, t, col))
        .collect())
}

/// Evolves a whole truncated state to each of `times` by integrating every
/// populated subspace directly. The returned states carry `n_max + m` so that
/// partners of the top Fock levels are represented.
pub fn full_state_oracle_grid(
    model: &ModelSpec,
    pulse: &PulseParams,
    state0: &QuantumState,
    times: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<QuantumState>> {
    for &t in times {
        if t < pulse.t0 {
            return Err(Error::Integration(format!("evolution requested at t = {t} before t₀ = {}", pulse.t0)));
        }
    }
    let m = model.m() as usize;
    let n_out = state0.n_max() + m;
    let mut u = vec![vec![C64::new(0.0, 0.0); n_out + 1]; times.len()];
    let mut v = u.clone();
    let u0 = |n: usize| state0.u().get(n).copied().unwrap_or_default();
    let v0 = |n: usize| state0.v().get(n).copied().unwrap_or_default();
    let phase = |energy: f64, t: f64| C64::from_polar(1.0, -energy * (t - pulse.t0));

    for n in 0..=n_out {
        // |n,↓⟩ outside any pair
        if classify_state(model, n as u64, Atom::Down) == StateClass::Low {
            let e = model.bare_energy(n as u64, Atom::Down);
            for (k, &t) in times.iter().enumerate() {
                v[k][n] = phase(e, t) * v0(n);
            }
        }
        match classify_state(model, n as u64, Atom::Up) {
            StateClass::High => {
                let e = model.bare_energy(n as u64, Atom::Up);
                for (k, &t) in times.iter().enumerate() {
                    u[k][n] = phase(e, t) * u0(n);
                }
            }
            StateClass::TwoDim(delta) => {
                let partner = delta as usize;
                let init = [u0(n), v0(partner)];
                if init[0] == C64::new(0.0, 0.0) && init[1] == C64::new(0.0, 0.0) {
                    continue;
                }
                let params = subspace_params(model, delta)?;
                let psi = integrate_interaction(&params, pulse, init, times, settings)
                    .map_err(|e| e.at(delta, times.last().copied().unwrap_or(pulse.t0)))?;
                for (k, &t) in times.iter().enumerate() {
                    let p = phase(params.omega_phase, t);
                    u[k][n] = p * psi[k][0];
                    if partner <= n_out {
                        v[k][partner] = p * psi[k][1];
                    }
                }
            }
            StateClass::Low => unreachable!("up states are never low"),
        }
    }
    Ok(u.into_iter().zip(v).map(|(u, v)| QuantumState::from_raw(u, v)).collect())
}

/// Evolved state at a single time, by direct integration.
pub fn full_state_oracle(
    model: &ModelSpec,
    pulse: &PulseParams,
    state0: &QuantumState,
    t: f64,
    settings: &OdeSettings,
) -> Result<QuantumState> {
    Ok(full_state_oracle_grid(model, pulse, state0, &[t], settings)?.remove(0))
}
