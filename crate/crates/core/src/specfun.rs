//! Complex log-gamma and the Gauss hypergeometric function `₂F₁(a, b; c; z)`
//! on the real segment `0 ≤ z < 1`.
//!
//! `₂F₁` is evaluated by one of three routes:
//!
//! 1. the defining power series, for `z ≤ 0.5`;
//! 2. the linear transformation to argument `1 − z` (connection coefficients
//!    from [`ln_gamma`]), for `z > 0.5`;
//! 3. Taylor-series continuation of the hypergeometric ODE along the real
//!    axis, whenever the selected series would cancel catastrophically.
//!
//! Route 3 is what keeps large parameters usable. For `b = −a` and real `a`
//! the function oscillates roughly `a` times on `[0, 1)`, and the terms of
//! either power series grow like `exp(2|a|√z)` before they decay, which wipes
//! out every significant digit once `|a|` reaches a few tens. The series
//! routes report their own cancellation factor and are used only when it is
//! small.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Switch point between the direct series and the `1 − z` transformation.
pub const Z_SWITCH: f64 = 0.5;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 10_000;

/// Largest accepted ratio between the biggest series term and the sum.
const MAX_CANCELLATION: f64 = 64.0;

const MAX_TAYLOR_STEPS: usize = 200_000;
const MAX_TAYLOR_TERMS: usize = 2_000;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(w: C64) -> bool {
    w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round()
}

fn is_near_integer(w: C64) -> bool {
    w.im.abs() < 1e-13 && (w.re - w.re.round()).abs() < 1e-12
}

/// Log-gamma for complex argument.
///
/// Analytic (not principal-log) continuation: real on the positive real axis
/// and continuous on `Re w > 0`. Uses a `g = 7`, nine-term Lanczos sum for
/// `Re w ≥ 1/2` and the reflection formula below that.
pub fn ln_gamma(w: C64) -> Result<C64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain(format!("ln_gamma of non-finite argument {w}")));
    }
    if is_nonpositive_integer(w) {
        return Err(Error::Pole(format!("Γ has a pole at {}", w.re)));
    }
    if w.re < 0.5 {
        Ok(C64::new(PI.ln(), 0.0) - ln_sin_pi(w) - ln_gamma_lanczos(1.0 - w))
    } else {
        Ok(ln_gamma_lanczos(w))
    }
}

fn ln_gamma_lanczos(w: C64) -> C64 {
    let z = w - 1.0;
    let mut series = C64::new(LANCZOS_COEF[0], 0.0);
    for (k, &coef) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += coef / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln sin(πw)` without overflow for large `|Im w|`.
fn ln_sin_pi(w: C64) -> C64 {
    let x = PI * w;
    let i = C64::i();
    if x.im > 30.0 {
        // sin x = (i/2) e^{-ix} (1 − e^{2ix})
        -i * x + (1.0 - (2.0 * i * x).exp()).ln() + C64::new(-(2.0f64.ln()), 0.5 * PI)
    } else if x.im < -30.0 {
        i * x + (1.0 - (-2.0 * i * x).exp()).ln() + C64::new(-(2.0f64.ln()), -0.5 * PI)
    } else {
        x.sin().ln()
    }
}

/// Point of `[0, 1)` carried together with its complement, so that values
/// very close to 1 keep full relative precision in `1 − z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZPoint {
    pub z: f64,
    pub one_minus_z: f64,
}

impl ZPoint {
    pub fn from_z(z: f64) -> Self {
        ZPoint {
            z,
            one_minus_z: 1.0 - z,
        }
    }

    /// `z = 1 − w` for a small complement `w`.
    pub fn from_complement(w: f64) -> Self {
        ZPoint {
            z: 1.0 - w,
            one_minus_z: w,
        }
    }

    /// Logistic map `z = eˣ / (1 + eˣ)`.
    pub fn logistic(x: f64) -> Self {
        ZPoint {
            z: logistic(x),
            one_minus_z: logistic(-x),
        }
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Parameters of `₂F₁(a, b; c; z)` in the regime used by the propagator:
/// real `a`, `b` (with `b = −a` there), complex `c`, real `z ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: C64,
    pub z: f64,
}

/// `₂F₁(a, b; c; z)` for real `z ∈ [0, 1)`.
pub fn hyp2f1(p: &Hyp2F1Params) -> Result<C64> {
    hyp2f1_at(p.a.into(), p.b.into(), p.c, ZPoint::from_z(p.z))
}

/// `₂F₁(a, b; c; z)` for complex parameters at a single point.
pub fn hyp2f1_at(a: C64, b: C64, c: C64, x: ZPoint) -> Result<C64> {
    Ok(hyp2f1_grid(a, b, c, &[x])?[0])
}

/// Result of a power-series route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    /// Largest term magnitude divided by `|value|`; roughly the factor by
    /// which rounding errors are amplified.
    pub cancellation: f64,
}

fn check_c(c: C64) -> Result<()> {
    if is_nonpositive_integer(c) {
        return Err(Error::Pole(format!("₂F₁ is undefined for c = {}", c.re)));
    }
    Ok(())
}

fn check_point(x: ZPoint) -> Result<()> {
    let ok = x.z >= 0.0 && x.one_minus_z > 0.0 && x.z.is_finite() && x.one_minus_z.is_finite();
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "₂F₁ evaluated at z = {} (1 − z = {}), outside [0, 1)",
            x.z, x.one_minus_z
        )))
    }
}

/// Sum of the defining series and of its derivative.
fn series_with_derivative(a: C64, b: C64, c: C64, z: f64) -> Result<(SeriesValue, SeriesValue)> {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut dsum = C64::new(0.0, 0.0);
    let mut biggest: f64 = 1.0;
    let mut dbiggest: f64 = 0.0;
    let mut small_run = 0;
    for n in 0..MAX_SERIES_TERMS {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        if term == C64::new(0.0, 0.0) {
            // terminating series
            return Ok(finish_series(sum, biggest, dsum, dbiggest));
        }
        let dterm = term * ((k + 1.0) / z);
        sum += term;
        dsum += dterm;
        biggest = biggest.max(term.norm());
        dbiggest = dbiggest.max(dterm.norm());
        if term.norm() <= f64::EPSILON * 0.25 * sum.norm() && dterm.norm() <= f64::EPSILON * 0.25 * dsum.norm() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(finish_series(sum, biggest, dsum, dbiggest));
            }
        } else {
            small_run = 0;
        }
        if !sum.re.is_finite() || !sum.im.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence(format!(
        "₂F₁({a}, {b}; {c}; {z}) series did not settle within {MAX_SERIES_TERMS} terms"
    )))
}

fn finish_series(sum: C64, biggest: f64, dsum: C64, dbiggest: f64) -> (SeriesValue, SeriesValue) {
    let ratio = |big: f64, s: C64| {
        if big == 0.0 {
            1.0
        } else {
            big / s.norm()
        }
    };
    (
        SeriesValue {
            value: sum,
            cancellation: ratio(biggest, sum),
        },
        SeriesValue {
            value: dsum,
            cancellation: ratio(dbiggest, dsum),
        },
    )
}

/// Direct power series `Σ (a)ₙ(b)ₙ / ((c)ₙ n!) zⁿ`.
pub fn hyp2f1_series(a: C64, b: C64, c: C64, z: f64) -> Result<SeriesValue> {
    check_c(c)?;
    check_point(ZPoint::from_z(z))?;
    if z == 0.0 {
        return Ok(SeriesValue {
            value: C64::new(1.0, 0.0),
            cancellation: 1.0,
        });
    }
    Ok(series_with_derivative(a, b, c, z)?.0)
}

/// The `z → 1 − z` linear transformation,
///
/// ```text
/// ₂F₁(a,b;c;z) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)) ₂F₁(a,b;a+b−c+1;1−z)
///              + (1−z)^{c−a−b} Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)) ₂F₁(c−a,c−b;c−a−b+1;1−z)
/// ```
///
/// valid when `c − a − b` is not an integer.
pub fn hyp2f1_one_minus_z(a: C64, b: C64, c: C64, x: ZPoint) -> Result<SeriesValue> {
    check_c(c)?;
    check_point(x)?;
    let s = c - a - b;
    if is_near_integer(s) {
        return Err(Error::NonConvergence(format!(
            "1 − z transformation is degenerate for integer c − a − b = {s}"
        )));
    }
    let w = x.one_minus_z;
    let lg_c = ln_gamma(c)?;
    let first = if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        None
    } else {
        let coef = (lg_c + ln_gamma(s)? - ln_gamma(c - a)? - ln_gamma(c - b)?).exp();
        let (f, _) = series_with_derivative(a, b, 1.0 - s, w)?;
        Some((coef, f))
    };
    let second = if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        None
    } else {
        let coef = (lg_c + ln_gamma(-s)? - ln_gamma(a)? - ln_gamma(b)?).exp() * (s * w.ln()).exp();
        let (f, _) = series_with_derivative(c - a, c - b, s + 1.0, w)?;
        Some((coef, f))
    };
    let mut value = C64::new(0.0, 0.0);
    let mut biggest: f64 = 0.0;
    for (coef, f) in [first, second].into_iter().flatten() {
        value += coef * f.value;
        biggest = biggest.max(coef.norm() * f.value.norm() * f.cancellation);
    }
    let cancellation = if biggest == 0.0 { 1.0 } else { biggest / value.norm() };
    Ok(SeriesValue { value, cancellation })
}

/// Running state of the Taylor continuation: position, value, derivative.
#[derive(Debug, Clone, Copy)]
struct Marcher {
    z: f64,
    w: f64,
    y: C64,
    dy: C64,
}

impl Marcher {
    fn start(a: C64, b: C64, c: C64, target: ZPoint) -> Result<Self> {
        let scale = (a * b).norm().max((a * b / c).norm()).max(1.0);
        let mut z0 = (0.25 / scale).min(0.25).min(target.z);
        for _ in 0..64 {
            let (f, df) = series_with_derivative(a, b, c, z0)?;
            if f.cancellation <= MAX_CANCELLATION && df.cancellation <= MAX_CANCELLATION.powi(2) {
                return Ok(Marcher {
                    z: z0,
                    w: 1.0 - z0,
                    y: f.value,
                    dy: df.value,
                });
            }
            z0 *= 0.5;
        }
        Err(Error::NonConvergence(format!(
            "no well-conditioned starting point for ₂F₁({a}, {b}; {c}; z)"
        )))
    }

    fn advance(&mut self, a: C64, b: C64, c: C64, target: ZPoint) -> Result<()> {
        let abp1 = a + b + 1.0;
        let ab = a * b;
        for _ in 0..MAX_TAYLOR_STEPS {
            let remaining = target.z - self.z;
            if remaining <= 0.0 {
                self.z = target.z;
                self.w = target.one_minus_z;
                return Ok(());
            }
            let p0 = self.z * self.w;
            let q0 = c - abp1 * self.z;
            let drift = q0.norm() / p0;
            let rate = 0.5 * drift + (0.25 * drift * drift + ab.norm() / p0).sqrt();
            let reach = 0.5 * self.z.min(self.w);
            let mut h = reach.min(2.0 / rate);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let (y, dy) = taylor_step(a, b, c, self.z, self.w, self.y, self.dy, h)?;
            self.y = y;
            self.dy = dy;
            if last {
                self.z = target.z;
                self.w = target.one_minus_z;
                return Ok(());
            }
            self.z += h;
            self.w = 1.0 - self.z;
        }
        Err(Error::NonConvergence(format!(
            "Taylor continuation of ₂F₁({a}, {b}; {c}; z) exceeded {MAX_TAYLOR_STEPS} steps"
        )))
    }
}

/// One Taylor step of `z(1−z)y″ + (c − (a+b+1)z)y′ − ab y = 0` from `z0` by `h`.
#[allow(clippy::too_many_arguments)]
fn taylor_step(a: C64, b: C64, c: C64, z0: f64, w0: f64, y0: C64, dy0: C64, h: f64) -> Result<(C64, C64)> {
    let p0 = z0 * w0;
    let p1 = w0 - z0;
    let q0 = c - (a + b + 1.0) * z0;
    let q1 = -(a + b + 1.0);
    let r = -(a * b);

    // e_n = c_n hⁿ
    let mut e_prev = y0;
    let mut e_cur = dy0 * h;
    let mut y = e_prev + e_cur;
    let mut dy_h = e_cur; // h·y′(z0 + h)
    let mut small_run = 0;
    for n in 0..MAX_TAYLOR_TERMS {
        let k = n as f64;
        let e_next = -((p1 * k * (k + 1.0) + q0 * (k + 1.0)) * e_cur * h
            + (q1 * k + r - k * (k - 1.0)) * e_prev * (h * h))
            / (p0 * (k + 2.0) * (k + 1.0));
        y += e_next;
        dy_h += e_next * (k + 2.0);
        let scale = y.norm() + dy_h.norm();
        if e_next.norm() * (k + 3.0) <= f64::EPSILON * 0.1 * scale {
            small_run += 1;
            if small_run >= 2 {
                return Ok((y, dy_h / h));
            }
        } else {
            small_run = 0;
        }
        e_prev = e_cur;
        e_cur = e_next;
    }
    Err(Error::NonConvergence(format!(
        "Taylor step at z = {z0} (h = {h}) did not converge"
    )))
}

/// `₂F₁(a, b; c; ·)` at every point of `points`.
///
/// Points may come in any order. Where neither power series is
/// well conditioned the function is continued along increasing `z`, reusing
/// the continuation between consecutive points.
pub fn hyp2f1_grid(a: C64, b: C64, c: C64, points: &[ZPoint]) -> Result<Vec<C64>> {
    check_c(c)?;
    for &x in points {
        check_point(x)?;
    }
    let one = C64::new(1.0, 0.0);
    if a == C64::new(0.0, 0.0) || b == C64::new(0.0, 0.0) {
        return Ok(vec![one; points.len()]);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].z.total_cmp(&points[j].z));

    let degenerate = is_near_integer(c - a - b);
    let mut out = vec![one; points.len()];
    let mut marcher: Option<Marcher> = None;
    for idx in order {
        let x = points[idx];
        if x.z == 0.0 {
            continue;
        }
        let direct = if x.z <= Z_SWITCH {
            hyp2f1_series(a, b, c, x.z).ok()
        } else if !degenerate {
            hyp2f1_one_minus_z(a, b, c, x).ok()
        } else {
            None
        };
        if let Some(sv) = direct.filter(|sv| sv.cancellation <= MAX_CANCELLATION) {
            out[idx] = sv.value;
            continue;
        }
        let state = match marcher.as_mut() {
            Some(m) => m,
            None => marcher.insert(Marcher::start(a, b, c, x)?),
        };
        state.advance(a, b, c, x)?;
        out[idx] = state.y;
    }
    Ok(out)
}

/// `z^{1−γ} ₂F₁(α−γ+1, −α−γ+1; 2−γ; z)`, the solution of
/// `z(1−z)X″ + (γ − z)X′ + α²X = 0` that is not regular at `z = 0`.
pub fn hyp2f1_second_solution(alpha: f64, gamma: C64, z: f64) -> Result<C64> {
    Ok(second_solution_grid(alpha, gamma, &[ZPoint::from_z(z)])?[0])
}

pub(crate) fn second_solution_grid(alpha: f64, gamma: C64, points: &[ZPoint]) -> Result<Vec<C64>> {
    let exponent = 1.0 - gamma;
    if points.iter().any(|x| x.z == 0.0) && exponent.re <= 0.0 {
        return Err(Error::Domain(format!(
            "z^(1−γ) is singular at z = 0 for γ = {gamma}"
        )));
    }
    let a = alpha - gamma + 1.0;
    let b = -alpha - gamma + 1.0;
    let f = hyp2f1_grid(a, b, 2.0 - gamma, points)?;
    Ok(points
        .iter()
        .zip(f)
        .map(|(x, v)| {
            if x.z == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                (exponent * x.z.ln()).exp() * v
            }
        })
        .collect())
}
