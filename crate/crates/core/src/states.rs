//! Truncated atom-field states, their time evolution and the atomic inversion.
//!
//! A state is `Σₙ uₙ|n,↑⟩ + vₙ|n,↓⟩`. Each pair `(uₙ, vₙ₊ₘ)` evolves inside the
//! subspace `Δ = n + m`:
//!
//! ```text
//! uₙ(t)   = e^{−i(Ω+δ̄)(t−t₀)} [H* uₙ(t₀) + F* vₙ₊ₘ(t₀)]
//! vₙ₊ₘ(t) = e^{−i(Ω−δ̄)(t−t₀)} [−F uₙ(t₀) + H vₙ₊ₘ(t₀)]
//! ```
//!
//! while ladder-edge states only pick up the phase of their bare energy.

use std::fmt;

use crate::algebra::{classify_state, subspace_params, Atom, ModelSpec, StateClass};
use crate::oracle::{full_state_oracle_grid, integrate_subspace_grid, OdeSettings};
use crate::propagator::{PulseParams, SechSolution, SubspacePropagator};
use crate::specfun::ln_gamma;
use crate::{Error, Result, C64};

/// Default discarded probability when truncating coherent states.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

const NORM_TOL: f64 = 1e-10;

/// Amplitudes `uₙ` (`|n,↑⟩`) and `vₙ` (`|n,↓⟩`) for `0 ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    u: Vec<C64>,
    v: Vec<C64>,
}

impl QuantumState {
    /// Checked constructor: equal, nonzero lengths and unit norm.
    pub fn new(u: Vec<C64>, v: Vec<C64>) -> Result<Self> {
        if u.is_empty() || u.len() != v.len() {
            return Err(Error::InvalidState(format!(
                "amplitude arrays must be nonempty and of equal length ({} vs {})",
                u.len(),
                v.len()
            )));
        }
        let state = QuantumState { u, v };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm² is {norm}, expected 1")));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(u: Vec<C64>, v: Vec<C64>) -> Self {
        debug_assert_eq!(u.len(), v.len());
        QuantumState { u, v }
    }

    pub fn n_max(&self) -> usize {
        self.u.len() - 1
    }

    pub fn u(&self) -> &[C64] {
        &self.u
    }

    pub fn v(&self) -> &[C64] {
        &self.v
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.iter().chain(self.v.iter()).map(|a| a.norm_sqr()).sum()
    }

    /// `⟨σ₃⟩ = Σₙ |uₙ|² − |vₙ|²`.
    pub fn inversion(&self) -> f64 {
        self.u.iter().zip(&self.v).map(|(u, v)| u.norm_sqr() - v.norm_sqr()).sum()
    }

    /// `|u_{Δ−m}|² + |v_Δ|²`, the population of one two-dimensional subspace.
    pub fn subspace_population(&self, m: u32, delta_total: u64) -> f64 {
        let lower = delta_total.checked_sub(m as u64).map(|n| n as usize);
        let pu = lower.and_then(|n| self.u.get(n)).map_or(0.0, |a| a.norm_sqr());
        let pv = self.v.get(delta_total as usize).map_or(0.0, |a| a.norm_sqr());
        pu + pv
    }
}

/// `⟨σ₃⟩` of a state.
pub fn inversion(state: &QuantumState) -> f64 {
    state.inversion()
}

/// Field in `|n⟩`, atom in `c_e|↑⟩ + c_g|↓⟩`.
pub fn make_number_state(n: usize, c_e: C64, c_g: C64, n_max: usize) -> Result<QuantumState> {
    if n > n_max {
        return Err(Error::InvalidState(format!("photon number {n} exceeds truncation {n_max}")));
    }
    let norm = c_e.norm_sqr() + c_g.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidState(format!("|c_e|² + |c_g|² = {norm}, expected 1")));
    }
    let mut u = vec![C64::new(0.0, 0.0); n_max + 1];
    let mut v = u.clone();
    u[n] = c_e;
    v[n] = c_g;
    Ok(QuantumState { u, v })
}

/// Poisson weights `e^{−n̄} n̄ⁿ / n!` for `n = 0..=N`, with `N` the smallest
/// index whose tail `Σ_{k>N}` is below `tail_eps`. Not renormalized.
pub fn poisson_weights(n_bar: f64, tail_eps: f64) -> Result<Vec<f64>> {
    if !(n_bar > 0.0 && n_bar.is_finite()) {
        return Err(Error::InvalidState(format!("mean photon number must be > 0, got {n_bar}")));
    }
    if !(tail_eps > 0.0 && tail_eps < 1.0) {
        return Err(Error::InvalidState(format!("tail_eps must lie in (0, 1), got {tail_eps}")));
    }
    let ln_nbar = n_bar.ln();
    let weight = |n: usize| -> f64 {
        let lg = ln_gamma(C64::new(n as f64 + 1.0, 0.0)).map(|g| g.re).unwrap_or(f64::INFINITY);
        (-n_bar + n as f64 * ln_nbar - lg).exp()
    };
    // extend well past the mode until terms are negligible against tail_eps
    let mut w = Vec::new();
    let mut n = 0usize;
    loop {
        let p = weight(n);
        w.push(p);
        if n as f64 > n_bar && p < 1e-6 * tail_eps {
            break;
        }
        n += 1;
    }
    // tails[k] = Σ_{j>k} w[j], accumulated from the small end
    let mut tail = 0.0;
    let mut cut = w.len() - 1;
    for k in (0..w.len()).rev() {
        if tail >= tail_eps {
            break;
        }
        cut = k;
        tail += w[k];
    }
    w.truncate(cut + 1);
    Ok(w)
}

/// Coherent field with real positive amplitude `√n̄`, truncated so the
/// discarded Poisson tail is below `tail_eps`, then renormalized. The atom
/// starts in `|↑⟩` if `excited`, else `|↓⟩`.
pub fn make_coherent_state(n_bar: f64, excited: bool, tail_eps: f64) -> Result<QuantumState> {
    let w = poisson_weights(n_bar, tail_eps)?;
    let total: f64 = w.iter().sum();
    let amps: Vec<C64> = w.iter().map(|p| C64::new((p / total).sqrt(), 0.0)).collect();
    let zeros = vec![C64::new(0.0, 0.0); amps.len()];
    let (u, v) = if excited { (amps, zeros) } else { (zeros, amps) };
    Ok(QuantumState { u, v })
}

/// Which engine produces the per-subspace propagators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    Analytic,
    Ode(OdeSettings),
}

/// Per-subspace `(H, F)` over a grid of times from the chosen engine.
pub fn subspace_series(
    model: &ModelSpec,
    pulse: &PulseParams,
    delta_total: u64,
    times: &[f64],
    engine: &Engine,
) -> Result<Vec<SubspacePropagator>> {
    match engine {
        Engine::Analytic => SechSolution::new(model, pulse, delta_total)
            .and_then(|s| s.eval_grid(times))
            .map_err(|e| e.at(delta_total, times.last().copied().unwrap_or(pulse.t0))),
        Engine::Ode(settings) => integrate_subspace_grid(model, pulse, delta_total, times, settings),
    }
}

/// Assembles evolved states from per-subspace propagators.
fn assemble(
    model: &ModelSpec,
    pulse: &PulseParams,
    state0: &QuantumState,
    times: &[f64],
    engine: &Engine,
) -> Result<Vec<QuantumState>> {
    let m = model.m() as usize;
    let n_out = state0.n_max() + m;
    let zero = C64::new(0.0, 0.0);
    let mut u = vec![vec![zero; n_out + 1]; times.len()];
    let mut v = u.clone();
    let u0 = |n: usize| state0.u.get(n).copied().unwrap_or_default();
    let v0 = |n: usize| state0.v.get(n).copied().unwrap_or_default();
    let phase = |rate: f64, t: f64| C64::from_polar(1.0, -rate * (t - pulse.t0));

    for n in 0..=n_out {
        if classify_state(model, n as u64, Atom::Down) == StateClass::Low && v0(n) != zero {
            // Ω(l) − δ̄(l) is the bare energy of |l,↓⟩
            let rate = model.bare_energy(n as u64, Atom::Down);
            for (k, &t) in times.iter().enumerate() {
                v[k][n] = phase(rate, t) * v0(n);
            }
        }
        match classify_state(model, n as u64, Atom::Up) {
            StateClass::High => {
                let rate = model.bare_energy(n as u64, Atom::Up);
                for (k, &t) in times.iter().enumerate() {
                    u[k][n] = phase(rate, t) * u0(n);
                }
            }
            StateClass::TwoDim(delta) => {
                let partner = delta as usize;
                let (a, b) = (u0(n), v0(partner));
                if a == zero && b == zero {
                    continue;
                }
                let params = subspace_params(model, delta)?;
                let props = subspace_series(model, pulse, delta, times, engine)?;
                for (k, p) in props.iter().enumerate() {
                    let t = times[k];
                    u[k][n] = phase(params.omega_phase + params.delta_eff, t) * (p.h.conj() * a + p.f.conj() * b);
                    if partner <= n_out {
                        v[k][partner] = phase(params.omega_phase - params.delta_eff, t) * (-p.f * a + p.h * b);
                    }
                }
            }
            StateClass::Low => unreachable!("up states are never low"),
        }
    }
    Ok(u.into_iter().zip(v).map(|(u, v)| QuantumState { u, v }).collect())
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
fn check_times(pulse: &PulseParams, times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|&&t| !(t >= pulse.t0)) {
        return Err(Error::Domain(format!("evolution requested at t = {t} before t₀ = {}", pulse.t0)));
    }
    Ok(())
}

/// State at time `t`. The result has truncation `n_max + m`.
pub fn evolve(model: &ModelSpec, pulse: &PulseParams, state0: &QuantumState, t: f64, engine: &Engine) -> Result<QuantumState> {
    Ok(evolve_grid(model, pulse, state0, &[t], engine)?.remove(0))
}

/// [`evolve`] at every time of `times`.
pub fn evolve_grid(
    model: &ModelSpec,
    pulse: &PulseParams,
    state0: &QuantumState,
    times: &[f64],
    engine: &Engine,
) -> Result<Vec<QuantumState>> {
    check_times(pulse, times)?;
    match engine {
        Engine::Analytic => assemble(model, pulse, state0, times, engine),
        Engine::Ode(settings) => full_state_oracle_grid(model, pulse, state0, times, settings),
    }
}

/// Parameters recorded alongside a series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub model: String,
    pub pulse: PulseParams,
    pub initial: String,
}

impl fmt::Display for SeriesMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "model={} lambda0={} tau={} t0={} initial={}",
            self.model, self.pulse.lambda0, self.pulse.tau, self.pulse.t0, self.initial
        )
    }
}

/// Observable sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    meta: SeriesMeta,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, meta: SeriesMeta) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Domain(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_increasing(&times)?;
        Ok(TimeSeries { times, values, meta })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_increasing(times: &[f64]) -> Result<()> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    Ok(())
}

fn require_one_photon(model: &ModelSpec) -> Result<()> {
    if model.m() != 1 {
        return Err(Error::InvalidModel(format!(
            "closed inversion formulas need the one-photon model, got m = {}",
            model.m()
        )));
    }
    Ok(())
}

fn meta(model: &ModelSpec, pulse: &PulseParams, initial: String) -> SeriesMeta {
    SeriesMeta {
        model: model.to_string(),
        pulse: *pulse,
        initial,
    }
}

/// `|F_Δ(t)|²` over the grid, or zeros when `Δ` labels no two-dimensional
/// subspace (ladder bottom).
fn transfer_series(model: &ModelSpec, pulse: &PulseParams, delta_total: u64, times: &[f64], engine: &Engine) -> Result<Vec<f64>> {
    if delta_total < model.m() as u64 || model.chi(delta_total) == 0.0 {
        return Ok(vec![0.0; times.len()]);
    }
    Ok(subspace_series(model, pulse, delta_total, times, engine)?
        .iter()
        .map(|p| p.transfer())
        .collect())
}

/// `⟨σ₃(t)⟩ = p_e(1 − 2|F_{n+1}|²) − (1 − p_e)(1 − 2|F_n|²)` for field `|n⟩`.
pub fn inversion_series_number(
    model: &ModelSpec,
    pulse: &PulseParams,
    n: u64,
    p_e: f64,
    times: &[f64],
) -> Result<TimeSeries> {
    inversion_series_number_with(model, pulse, n, p_e, times, &Engine::Analytic)
}

pub fn inversion_series_number_with(
    model: &ModelSpec,
    pulse: &PulseParams,
    n: u64,
    p_e: f64,
    times: &[f64],
    engine: &Engine,
) -> Result<TimeSeries> {
    require_one_photon(model)?;
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::InvalidState(format!("p_e must lie in [0, 1], got {p_e}")));
    }
    check_times(pulse, times)?;
    check_increasing(times)?;
    let upper = if p_e > 0.0 {
        transfer_series(model, pulse, n + 1, times, engine)?
    } else {
        vec![0.0; times.len()]
    };
    let lower = if p_e < 1.0 {
        transfer_series(model, pulse, n, times, engine)?
    } else {
        vec![0.0; times.len()]
    };
    let values = upper
        .iter()
        .zip(&lower)
        .map(|(fu, fl)| p_e * (1.0 - 2.0 * fu) - (1.0 - p_e) * (1.0 - 2.0 * fl))
        .collect();
    TimeSeries::new(
        times.to_vec(),
        values,
        meta(model, pulse, format!("number(n={n}, p_e={p_e})")),
    )
}

/// `⟨σ₃(t)⟩ = Σₙ (1 − 2|F_{n+1}|²) Pₙ` for an excited atom and a coherent field
/// with Poisson weights `Pₙ` (truncated at `tail_eps`, renormalized).
pub fn inversion_series_coherent(
    model: &ModelSpec,
    pulse: &PulseParams,
    n_bar: f64,
    times: &[f64],
    tail_eps: f64,
) -> Result<TimeSeries> {
    inversion_series_coherent_with(model, pulse, n_bar, times, tail_eps, &Engine::Analytic)
}

pub fn inversion_series_coherent_with(
    model: &ModelSpec,
    pulse: &PulseParams,
    n_bar: f64,
    times: &[f64],
    tail_eps: f64,
    engine: &Engine,
) -> Result<TimeSeries> {
    require_one_photon(model)?;
    check_times(pulse, times)?;
    check_increasing(times)?;
    let weights = poisson_weights(n_bar, tail_eps)?;
    let total: f64 = weights.iter().sum();
    let mut values = vec![0.0; times.len()];
    for (n, w) in weights.iter().enumerate() {
        let transfer = transfer_series(model, pulse, n as u64 + 1, times, engine)?;
        for (acc, f2) in values.iter_mut().zip(transfer) {
            *acc += (1.0 - 2.0 * f2) * (w / total);
        }
    }
    TimeSeries::new(
        times.to_vec(),
        values,
        meta(model, pulse, format!("coherent(n_bar={n_bar}, excited)")),
    )
}

/// Closed expression for arbitrary initial amplitudes,
///
/// ```text
/// ⟨σ₃(t)⟩ = −|v₀|² + Σₙ [(1 − 2|F_{n+1}|²)(|uₙ|² − |vₙ₊₁|²) + 4 Re(H_{n+1} F*_{n+1} uₙ* vₙ₊₁)]
/// ```
///
/// with amplitudes taken at `t₀`.
pub fn inversion_series_general(
    model: &ModelSpec,
    pulse: &PulseParams,
    state0: &QuantumState,
    times: &[f64],
) -> Result<TimeSeries> {
    require_one_photon(model)?;
    check_times(pulse, times)?;
    check_increasing(times)?;
    let zero = C64::new(0.0, 0.0);
    let u0 = |n: usize| state0.u.get(n).copied().unwrap_or_default();
    let v0 = |n: usize| state0.v.get(n).copied().unwrap_or_default();
    let mut values = vec![-v0(0).norm_sqr(); times.len()];
    for n in 0..=state0.n_max() {
        let (u, v) = (u0(n), v0(n + 1));
        if u == zero && v == zero {
            continue;
        }
        let props = subspace_series(model, pulse, n as u64 + 1, times, &Engine::Analytic)?;
        let diff = u.norm_sqr() - v.norm_sqr();
        let cross = u.conj() * v;
        for (acc, p) in values.iter_mut().zip(&props) {
            *acc += (1.0 - 2.0 * p.f.norm_sqr()) * diff + 4.0 * (p.h * p.f.conj() * cross).re;
        }
    }
    TimeSeries::new(times.to_vec(), values, meta(model, pulse, "general".into()))
}

/// `⟨σ₃⟩` of the fully evolved state at each time; engine-agnostic reference
/// for the closed formulas.
pub fn inversion_series_evolved(
    model: &ModelSpec,
    pulse: &PulseParams,
    state0: &QuantumState,
    times: &[f64],
    engine: &Engine,
) -> Result<TimeSeries> {
    check_increasing(times)?;
    let states = evolve_grid(model, pulse, state0, times, engine)?;
    let values = states.iter().map(QuantumState::inversion).collect();
    TimeSeries::new(times.to_vec(), values, meta(model, pulse, "evolved".into()))
}
