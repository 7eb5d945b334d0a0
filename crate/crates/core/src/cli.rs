//! Run configuration, presets, CSV output and the engine cross-check behind
//! the `sech-jcm` binary.
//!
//! All user-facing quantities are dimensionless in units of the pulse width:
//! times as `t/τ`, couplings as `λ₀τ`, frequencies as `ωτ`. [`RunConfig::physical`]
//! is the only place where they become model and pulse parameters.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::algebra::{
    classify_state, make_kerr_jcm, make_multiphoton_jcm, make_standard_jcm, Atom, Family, ModelSpec, StateClass,
};
use crate::oracle::{integrate_subspace_grid, OdeSettings};
use crate::propagator::{PulseParams, SechSolution, SubspacePropagator};
use crate::states::{poisson_weights, DEFAULT_TAIL_EPS};
use crate::{Error, Result, C64};

/// Maximum allowed per-subspace discrepancy between engines in `verify`.
pub const VERIFY_TOL: f64 = 1e-6;

/// Default number of samples of a preset grid.
pub const PRESET_SAMPLES: usize = 4001;

/// Default grid length after `t₀`, in units of τ.
pub const PRESET_SPAN: f64 = 40.0;

pub const PRESETS: [&str; 6] = [
    "fig1_resonant",
    "fig1_detuned",
    "fig2_resonant",
    "fig2_detuned",
    "fig3_resonant",
    "fig3_detuned",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    /// Field `|n⟩`, atom `√p_e|↑⟩ + √(1−p_e)|↓⟩`.
    Number { n: u64, p_e: f64 },
    /// Coherent field with mean photon number `n̄`, atom excited.
    Coherent { n_bar: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Analytic,
    Ode,
    Both,
}

impl FromStr for EngineChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(EngineChoice::Analytic),
            "ode" => Ok(EngineChoice::Ode),
            "both" => Ok(EngineChoice::Both),
            _ => Err(Error::Config(format!("unknown engine '{s}' (analytic|ode|both)"))),
        }
    }
}

/// Uniform grid in units of τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.end - self.start) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| if k + 1 == self.samples { self.end } else { self.start + k as f64 * step })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start:end:samples`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid must be start:end:samples, got '{s}'")));
        }
        Ok(Grid {
            start: parse_num(parts[0], "grid start")?,
            end: parse_num(parts[1], "grid end")?,
            samples: parse_num(parts[2], "grid samples")?,
        })
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {what} from '{s}'")))
}

fn parse_family(s: &str) -> Result<Family> {
    match s {
        "standard" => Ok(Family::Standard),
        "mphoton" => Ok(Family::MultiPhoton),
        "kerr" => Ok(Family::Kerr),
        _ => Err(Error::Config(format!("unknown model '{s}' (standard|mphoton|kerr)"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    /// Field frequency `ωτ`; the atomic frequency follows as `mω + δ`.
    pub omega_tau: f64,
    pub delta_tau: f64,
    pub kappa_tau: f64,
    pub m: u32,
    pub lambda0_tau: f64,
    /// Pulse switch-on time in units of τ.
    pub t0: f64,
    pub initial: Initial,
    /// Defaults to `[t₀, t₀ + 40] × 4001`.
    pub grid: Option<Grid>,
    pub engine: EngineChoice,
    pub out: Option<PathBuf>,
    pub tail_eps: f64,
    pub tol: f64,
    /// Added to γ in the analytic engine. Negative-control hook for `verify`.
    pub gamma_shift: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: Family::Standard,
            omega_tau: 1.0,
            delta_tau: 0.0,
            kappa_tau: 0.0,
            m: 1,
            lambda0_tau: 5.0,
            t0: -10.0,
            initial: Initial::Number { n: 0, p_e: 1.0 },
            grid: None,
            engine: EngineChoice::Analytic,
            out: None,
            tail_eps: DEFAULT_TAIL_EPS,
            tol: 1e-12,
            gamma_shift: 0.0,
        }
    }
}

/// Model, pulse and absolute time grid derived from a configuration (τ = 1).
#[derive(Debug, Clone)]
pub struct Physical {
    pub model: ModelSpec,
    pub pulse: PulseParams,
    pub times: Vec<f64>,
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = RunConfig::default();
        let coherent = Initial::Coherent { n_bar: 10.0 };
        let config = match name {
            "fig1_resonant" => RunConfig {
                initial: Initial::Number { n: 3, p_e: 1.0 },
                ..base
            },
            "fig1_detuned" => RunConfig {
                initial: Initial::Number { n: 3, p_e: 1.0 },
                delta_tau: 1.0,
                ..base
            },
            "fig2_resonant" => RunConfig { initial: coherent, ..base },
            "fig2_detuned" => RunConfig {
                initial: coherent,
                delta_tau: 0.5,
                ..base
            },
            "fig3_resonant" => RunConfig {
                initial: coherent,
                t0: 0.0,
                ..base
            },
            "fig3_detuned" => RunConfig {
                initial: coherent,
                t0: 0.0,
                delta_tau: 0.5,
                ..base
            },
            _ => {
                return Err(Error::Config(format!(
                    "unknown preset '{name}' (one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(config)
    }

    /// Builds a configuration from `key=value` settings applied in order. A
    /// `preset` key anywhere selects the base; the last one wins.
    pub fn from_settings(settings: &[(String, String)]) -> Result<Self> {
        let mut config = match settings.iter().rev().find(|(k, _)| k == "preset") {
            Some((_, name)) => RunConfig::preset(name)?,
            None => RunConfig::default(),
        };
        for (key, value) in settings.iter().filter(|(k, _)| k != "preset") {
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "model" => self.family = parse_family(value)?,
            "omega_tau" => self.omega_tau = parse_num(value, key)?,
            "delta_tau" => self.delta_tau = parse_num(value, key)?,
            "kappa_tau" => self.kappa_tau = parse_num(value, key)?,
            "m" => self.m = parse_num(value, key)?,
            "lambda0_tau" => self.lambda0_tau = parse_num(value, key)?,
            "t0" => self.t0 = parse_num(value, key)?,
            "n" => {
                let p_e = match self.initial {
                    Initial::Number { p_e, .. } => p_e,
                    Initial::Coherent { .. } => 1.0,
                };
                self.initial = Initial::Number {
                    n: parse_num(value, key)?,
                    p_e,
                };
            }
            "pe" => match &mut self.initial {
                Initial::Number { p_e, .. } => *p_e = parse_num(value, key)?,
                Initial::Coherent { .. } => {
                    return Err(Error::Config("pe applies to number states only; set n first".into()))
                }
            },
            "nbar" => {
                self.initial = Initial::Coherent {
                    n_bar: parse_num(value, key)?,
                }
            }
            "grid" => self.grid = Some(value.parse()?),
            "engine" => self.engine = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "tail_eps" => self.tail_eps = parse_num(value, key)?,
            "tol" => self.tol = parse_num(value, key)?,
            "gamma_shift" => self.gamma_shift = parse_num(value, key)?,
            _ => return Err(Error::Config(format!("unknown setting '{key}'"))),
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        self.grid.unwrap_or(Grid {
            start: self.t0,
            end: self.t0 + PRESET_SPAN,
            samples: PRESET_SAMPLES,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid();
        if grid.samples < 2 {
            return Err(Error::Config(format!("grid needs at least 2 samples, got {}", grid.samples)));
        }
        if !(grid.start.is_finite() && grid.end.is_finite() && grid.end > grid.start) {
            return Err(Error::Config(format!("grid end {} must exceed start {}", grid.end, grid.start)));
        }
        if grid.start < self.t0 {
            return Err(Error::Config(format!("grid start {} precedes t0 {}", grid.start, self.t0)));
        }
        if self.family == Family::Standard && self.m != 1 {
            return Err(Error::Config("the standard model has m = 1; use mphoton or kerr".into()));
        }
        if self.family != Family::Kerr && self.kappa_tau != 0.0 {
            return Err(Error::Config("kappa_tau requires the kerr model".into()));
        }
        match self.initial {
            Initial::Number { p_e, .. } if !(0.0..=1.0).contains(&p_e) => {
                return Err(Error::Config(format!("pe must lie in [0, 1], got {p_e}")))
            }
            Initial::Coherent { n_bar } if !(n_bar > 0.0 && n_bar.is_finite()) => {
                return Err(Error::Config(format!("nbar must be positive, got {n_bar}")))
            }
            _ => {}
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1.0) {
            return Err(Error::Config(format!("tail_eps must lie in (0, 1), got {}", self.tail_eps)));
        }
        OdeSettings::with_tolerance(self.tol)?;
        if !self.gamma_shift.is_finite() {
            return Err(Error::Config("gamma_shift must be finite".into()));
        }
        Ok(())
    }

    /// Unit boundary: with τ = 1 the dimensionless inputs are used as-is.
    pub fn physical(&self) -> Result<Physical> {
        self.validate()?;
        let omega = self.omega_tau;
        let omega0 = self.m as f64 * omega + self.delta_tau;
        let model = match self.family {
            Family::Standard => make_standard_jcm(omega, omega0),
            Family::MultiPhoton => make_multiphoton_jcm(omega, omega0, self.m)?,
            Family::Kerr => make_kerr_jcm(omega, omega0, self.kappa_tau, self.m)?,
            Family::Custom => return Err(Error::Config("custom models are not available from the CLI".into())),
        };
        let pulse = PulseParams::new(self.lambda0_tau, 1.0, self.t0)?;
        Ok(Physical {
            model,
            pulse,
            times: self.grid().points(),
        })
    }

    fn ode_settings(&self) -> Result<OdeSettings> {
        let mut s = OdeSettings::with_tolerance(self.tol)?;
        s.abs_tol = 0.1 * self.tol;
        Ok(s)
    }
}

/// Populated subspaces of the initial state, each with its initial upper
/// probability `|uₙ|²` and lower probability `|vₙ₊ₘ|²`, plus the constant
/// inversion carried by ladder-edge states.
struct Populations {
    subspaces: Vec<(u64, f64, f64)>,
    edge_inversion: f64,
}

fn populations(config: &RunConfig, model: &ModelSpec) -> Result<Populations> {
    let mut out = Populations {
        subspaces: Vec::new(),
        edge_inversion: 0.0,
    };
    let mut add = |n: u64, atom: Atom, p: f64| {
        if p == 0.0 {
            return;
        }
        match (classify_state(model, n, atom), atom) {
            (StateClass::TwoDim(delta), Atom::Up) => out.subspaces.push((delta, p, 0.0)),
            (StateClass::TwoDim(delta), Atom::Down) => out.subspaces.push((delta, 0.0, p)),
            (_, Atom::Up) => out.edge_inversion += p,
            (_, Atom::Down) => out.edge_inversion -= p,
        }
    };
    match config.initial {
        Initial::Number { n, p_e } => {
            add(n, Atom::Up, p_e);
            add(n, Atom::Down, 1.0 - p_e);
        }
        Initial::Coherent { n_bar } => {
            let w = poisson_weights(n_bar, config.tail_eps)?;
            let total: f64 = w.iter().sum();
            for (n, p) in w.iter().enumerate() {
                add(n as u64, Atom::Up, p / total);
            }
        }
    }
    Ok(out)
}

fn analytic_series(config: &RunConfig, phys: &Physical, delta: u64) -> Result<Vec<SubspacePropagator>> {
    let t_end = phys.times.last().copied().unwrap_or(phys.pulse.t0);
    let solution = if config.gamma_shift != 0.0 {
        SechSolution::with_gamma_offset(&phys.model, &phys.pulse, delta, C64::new(config.gamma_shift, 0.0))
    } else {
        SechSolution::new(&phys.model, &phys.pulse, delta)
    };
    solution.and_then(|s| s.eval_grid(&phys.times)).map_err(|e| e.at(delta, t_end))
}

/// Inversion from the per-subspace transfer probabilities. The initial state
/// never populates both members of one pair, so no cross terms arise.
fn inversion_from(pops: &Populations, series: &[Vec<SubspacePropagator>], samples: usize) -> Vec<f64> {
    let mut values = vec![pops.edge_inversion; samples];
    for ((_, pu, pv), props) in pops.subspaces.iter().zip(series) {
        for (acc, p) in values.iter_mut().zip(props) {
            *acc += (1.0 - 2.0 * p.transfer()) * (pu - pv);
        }
    }
    values
}

/// Largest per-subspace `max(|Δh|, |Δf|)` between the engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub value: f64,
    pub t_over_tau: f64,
    pub delta_total: u64,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:e} at t/tau = {} in subspace Delta = {}",
            self.value, self.t_over_tau, self.delta_total
        )
    }
}

fn worst_discrepancy(
    pops: &Populations,
    analytic: &[Vec<SubspacePropagator>],
    ode: &[Vec<SubspacePropagator>],
) -> Option<Discrepancy> {
    let mut worst: Option<Discrepancy> = None;
    for (((delta, _, _), a), o) in pops.subspaces.iter().zip(analytic).zip(ode) {
        for (pa, po) in a.iter().zip(o) {
            let d = (pa.h - po.h).norm().max((pa.f - po.f).norm());
            if worst.is_none_or(|w| d > w.value) || d.is_nan() {
                worst = Some(Discrepancy {
                    value: d,
                    t_over_tau: pa.t,
                    delta_total: *delta,
                });
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub times: Vec<f64>,
    pub analytic: Option<Vec<f64>>,
    pub ode: Option<Vec<f64>>,
    pub subspace_discrepancy: Option<Discrepancy>,
}

impl RunOutput {
    /// `max |⟨σ₃⟩_analytic − ⟨σ₃⟩_ode|` when both engines ran.
    pub fn max_abs_discrepancy(&self) -> Option<f64> {
        let (a, o) = (self.analytic.as_ref()?, self.ode.as_ref()?);
        Some(a.iter().zip(o).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let columns: Vec<&Vec<f64>> = self.analytic.iter().chain(self.ode.iter()).collect();
        let header = match (&self.analytic, &self.ode) {
            (Some(_), Some(_)) => "# t_over_tau,inversion,inversion_ode",
            _ => "# t_over_tau,inversion",
        };
        s.push_str(header);
        s.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let _ = write!(s, "{t}");
            for c in &columns {
                let _ = write!(s, ",{}", c[k]);
            }
            s.push('\n');
        }
        if let Some(d) = self.max_abs_discrepancy() {
            let _ = writeln!(s, "# max_abs_discrepancy={d:e}");
        }
        if let Some(d) = self.subspace_discrepancy {
            let _ = writeln!(
                s,
                "# max_subspace_discrepancy={:e} t_over_tau={} delta_total={}",
                d.value, d.t_over_tau, d.delta_total
            );
        }
        s
    }
}

/// Computes the inversion series for a configuration.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let phys = config.physical()?;
    let pops = populations(config, &phys.model)?;
    let n = phys.times.len();
    let want_analytic = config.engine != EngineChoice::Ode;
    let want_ode = config.engine != EngineChoice::Analytic;

    let analytic = if want_analytic {
        Some(
            pops.subspaces
                .iter()
                .map(|&(delta, _, _)| analytic_series(config, &phys, delta))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let ode = if want_ode {
        let settings = config.ode_settings()?;
        Some(
            pops.subspaces
                .iter()
                .map(|&(delta, _, _)| integrate_subspace_grid(&phys.model, &phys.pulse, delta, &phys.times, &settings))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let subspace_discrepancy = match (&analytic, &ode) {
        (Some(a), Some(o)) => worst_discrepancy(&pops, a, o),
        _ => None,
    };
    Ok(RunOutput {
        times: phys.times.clone(),
        analytic: analytic.as_ref().map(|s| inversion_from(&pops, s, n)),
        ode: ode.as_ref().map(|s| inversion_from(&pops, s, n)),
        subspace_discrepancy,
    })
}

/// Writes the CSV to `config.out`, or returns it when no path is set.
pub fn run_and_emit(config: &RunConfig) -> Result<Option<String>> {
    let csv = run(config)?.to_csv();
    match &config.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(None)
        }
        None => Ok(Some(csv)),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub worst: Discrepancy,
    pub passed: bool,
}

/// Runs both engines and checks every populated subspace at every grid time
/// against [`VERIFY_TOL`].
pub fn verify(config: &RunConfig) -> Result<VerifyReport> {
    let both = RunConfig {
        engine: EngineChoice::Both,
        ..config.clone()
    };
    let out = run(&both)?;
    let worst = out.subspace_discrepancy.unwrap_or(Discrepancy {
        value: 0.0,
        t_over_tau: both.grid().start,
        delta_total: 0,
    });
    Ok(VerifyReport {
        worst,
        passed: worst.value <= VERIFY_TOL,
    })
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped. Keys may
/// use `-` or `_`.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got '{line}'", i + 1)))?;
        out.push((normalize_key(k), v.trim().to_string()));
    }
    Ok(out)
}

pub fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}
