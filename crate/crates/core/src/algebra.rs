//! Generalized Jaynes-Cummings families and their reduction to two-level
//! subspaces.
//!
//! A model is described entirely by functions of the photon-like quantum
//! number `n` (the eigenvalue of `A₀`):
//!
//! ```text
//! H = r(A₀) + s(A₀) σ₃ + λ(t) (A₊ σ₋ + A₋ σ₊),   A₊A₋ = χ(A₀),   [A₀, A±] = ±m A±
//! ```
//!
//! `Δ = A₀ + m (1 + σ₃) / 2` commutes with every term, so the dynamics splits
//! into the pairs `{|Δ−m,↑⟩, |Δ,↓⟩}` plus one-dimensional edge subspaces.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Which closed-form family a [`ModelSpec`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// One-photon JCM: `m = 1`, `χ(n) = n`, `r(n) = ωn`, `s(n) = ω₀/2`.
    Standard,
    /// m-photon JCM in a linear medium.
    MultiPhoton,
    /// m-photon JCM in a Kerr medium, `r(n) = ωn + κ(n² − n)`.
    Kerr,
    /// User supplied `χ`, `r`, `s`.
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Standard => "standard",
            Family::MultiPhoton => "mphoton",
            Family::Kerr => "kerr",
            Family::Custom => "custom",
        };
        f.write_str(name)
    }
}

type NumberFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Tagged {
        family: Family,
        omega: f64,
        omega0: f64,
        kappa: f64,
    },
    Custom {
        chi: NumberFn,
        r: NumberFn,
        s: NumberFn,
    },
}

/// A generalized JCM: ladder step `m` and the functions `χ`, `r`, `s`.
///
/// Immutable once built; cloning is cheap.
#[derive(Clone)]
pub struct ModelSpec {
    m: u32,
    kind: Kind,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Tagged {
                family,
                omega,
                omega0,
                kappa,
            } => f
                .debug_struct("ModelSpec")
                .field("family", family)
                .field("m", &self.m)
                .field("omega", omega)
                .field("omega0", omega0)
                .field("kappa", kappa)
                .finish(),
            Kind::Custom { .. } => f
                .debug_struct("ModelSpec")
                .field("family", &Family::Custom)
                .field("m", &self.m)
                .finish_non_exhaustive(),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Tagged {
                family,
                omega,
                omega0,
                kappa,
            } => write!(
                f,
                "{family}(m={}, omega={omega}, omega0={omega0}, kappa={kappa})",
                self.m
            ),
            Kind::Custom { .. } => write!(f, "custom(m={})", self.m),
        }
    }
}

/// Standard one-photon JCM with field frequency `omega` and atomic
/// transition frequency `omega0`.
pub fn make_standard_jcm(omega: f64, omega0: f64) -> ModelSpec {
    ModelSpec {
        m: 1,
        kind: Kind::Tagged {
            family: Family::Standard,
            omega,
            omega0,
            kappa: 0.0,
        },
    }
}

/// m-photon JCM in a linear medium (`κ = 0`).
pub fn make_multiphoton_jcm(omega: f64, omega0: f64, m: u32) -> Result<ModelSpec> {
    if m == 0 {
        return Err(Error::InvalidModel("ladder step m must be at least 1".into()));
    }
    Ok(ModelSpec {
        m,
        kind: Kind::Tagged {
            family: Family::MultiPhoton,
            omega,
            omega0,
            kappa: 0.0,
        },
    })
}

/// m-photon JCM in a Kerr medium.
pub fn make_kerr_jcm(omega: f64, omega0: f64, kappa: f64, m: u32) -> Result<ModelSpec> {
    if m == 0 {
        return Err(Error::InvalidModel("ladder step m must be at least 1".into()));
    }
    Ok(ModelSpec {
        m,
        kind: Kind::Tagged {
            family: Family::Kerr,
            omega,
            omega0,
            kappa,
        },
    })
}

impl ModelSpec {
    /// Model from arbitrary `χ`, `r`, `s`. `χ` must be nonnegative; values of
    /// `χ(n)` for `n < m` are ignored since `A₋` annihilates those states.
    pub fn custom<C, R, S>(m: u32, chi: C, r: R, s: S) -> Result<Self>
    where
        C: Fn(u64) -> f64 + Send + Sync + 'static,
        R: Fn(u64) -> f64 + Send + Sync + 'static,
        S: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        if m == 0 {
            return Err(Error::InvalidModel("ladder step m must be at least 1".into()));
        }
        Ok(ModelSpec {
            m,
            kind: Kind::Custom {
                chi: Arc::new(chi),
                r: Arc::new(r),
                s: Arc::new(s),
            },
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn family(&self) -> Family {
        match &self.kind {
            Kind::Tagged { family, .. } => *family,
            Kind::Custom { .. } => Family::Custom,
        }
    }

    /// `δ = ω₀ − mω` for the tagged families.
    pub fn detuning(&self) -> Option<f64> {
        match &self.kind {
            Kind::Tagged { omega, omega0, .. } => Some(omega0 - self.m as f64 * omega),
            Kind::Custom { .. } => None,
        }
    }

    /// Eigenvalue of `A₊A₋` on `|n⟩`.
    pub fn chi(&self, n: u64) -> f64 {
        match &self.kind {
            Kind::Tagged { .. } => falling_factorial(n, self.m),
            Kind::Custom { chi, .. } => {
                if n < self.m as u64 {
                    0.0
                } else {
                    chi(n)
                }
            }
        }
    }

    /// Field energy term.
    pub fn r(&self, n: u64) -> f64 {
        match &self.kind {
            Kind::Tagged { omega, kappa, .. } => {
                let x = n as f64;
                omega * x + kappa * (x * x - x)
            }
            Kind::Custom { r, .. } => r(n),
        }
    }

    /// Coefficient of `σ₃`.
    pub fn s(&self, n: u64) -> f64 {
        match &self.kind {
            Kind::Tagged { omega0, .. } => 0.5 * omega0,
            Kind::Custom { s, .. } => s(n),
        }
    }

    /// `r(upper) − r(lower)`, exact for the built-in families so that a
    /// resonant model has `δ̄ = 0` without rounding.
    pub fn field_gap(&self, lower: u64, upper: u64) -> f64 {
        match &self.kind {
            Kind::Tagged { omega, kappa, .. } => {
                let (lo, hi) = (lower as f64, upper as f64);
                (hi - lo) * (omega + kappa * (hi + lo - 1.0))
            }
            Kind::Custom { r, .. } => r(upper) - r(lower),
        }
    }

    /// Diagonal energy of the product state `|n, atom⟩` with the coupling off.
    pub fn bare_energy(&self, n: u64, atom: Atom) -> f64 {
        match atom {
            Atom::Up => self.r(n) + self.s(n),
            Atom::Down => self.r(n) - self.s(n),
        }
    }
}

/// `n! / (n−m)!` as a running product; zero for `n < m`.
fn falling_factorial(n: u64, m: u32) -> f64 {
    if n < m as u64 {
        return 0.0;
    }
    (0..m as u64).map(|k| (n - k) as f64).product()
}

/// Reduction data for the subspace `{|Δ−m,↑⟩, |Δ,↓⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceParams {
    pub delta_total: u64,
    /// `Ω(Δ)`, the common phase rate.
    pub omega_phase: f64,
    /// `δ̄(Δ)`, the coefficient of `σ₃` inside the subspace.
    pub delta_eff: f64,
    /// `√χ(Δ)`.
    pub coupling_weight: f64,
}

impl SubspaceParams {
    /// The projected Hamiltonian `Ω I + δ̄ σ₃ + λ √χ σ₁` in the basis
    /// `(|Δ−m,↑⟩, |Δ,↓⟩)`.
    pub fn hamiltonian(&self, lambda: f64) -> [[f64; 2]; 2] {
        let off = lambda * self.coupling_weight;
        [
            [self.omega_phase + self.delta_eff, off],
            [off, self.omega_phase - self.delta_eff],
        ]
    }
}

/// `Ω(Δ)`, `δ̄(Δ)` and `√χ(Δ)` for a two-dimensional subspace.
pub fn subspace_params(model: &ModelSpec, delta_total: u64) -> Result<SubspaceParams> {
    let m = model.m();
    if delta_total < m as u64 {
        return Err(Error::OneDimensionalSubspace { delta_total, m });
    }
    let lower = delta_total - m as u64;
    let (r_lo, r_hi) = (model.r(lower), model.r(delta_total));
    let (s_lo, s_hi) = (model.s(lower), model.s(delta_total));
    let chi = model.chi(delta_total);
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(chi >= 0.0) {
        return Err(Error::InvalidModel(format!("χ({delta_total}) = {chi} is negative")));
    }
    Ok(SubspaceParams {
        delta_total,
        omega_phase: 0.5 * (r_lo + r_hi) + 0.5 * (s_lo - s_hi),
        delta_eff: 0.5 * (s_lo + s_hi - model.field_gap(lower, delta_total)),
        coupling_weight: chi.sqrt(),
    })
}

/// Atomic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Up,
    Down,
}

/// Which invariant subspace a product state `|n, atom⟩` belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateClass {
    /// Member of the two-dimensional subspace with the given `Δ`.
    TwoDim(u64),
    /// `|l,↓⟩` at the bottom of a ladder; phase-only evolution.
    Low,
    /// `|h,↑⟩` at the top of a ladder; phase-only evolution.
    High,
}

pub fn classify_state(model: &ModelSpec, n: u64, atom: Atom) -> StateClass {
    let m = model.m() as u64;
    match atom {
        Atom::Down => {
            if n >= m && model.chi(n) > 0.0 {
                StateClass::TwoDim(n)
            } else {
                StateClass::Low
            }
        }
        Atom::Up => {
            if model.chi(n + m) > 0.0 {
                StateClass::TwoDim(n + m)
            } else {
                StateClass::High
            }
        }
    }
}
