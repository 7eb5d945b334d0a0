#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sech_jcm::algebra::ModelSpec;
use sech_jcm::propagator::PulseParams;

/// One point of the random propagator sweep.
#[derive(Debug, Clone)]
pub struct SweepCase {
    pub lambda0_tau: f64,
    pub delta_bar_tau: f64,
    pub delta_total: u64,
    pub t0: f64,
    pub t: f64,
}

impl SweepCase {
    /// Model whose subspace `delta_total` has effective detuning `delta_bar`
    /// (standard ladder, τ = 1).
    pub fn model(&self) -> ModelSpec {
        sech_jcm::algebra::make_standard_jcm(1.0, 1.0 + 2.0 * self.delta_bar_tau)
    }

    pub fn pulse(&self) -> PulseParams {
        PulseParams::new(self.lambda0_tau, 1.0, self.t0).unwrap()
    }
}

/// λ₀τ ∈ [0.1, 10], δ̄τ ∈ [−2, 2], Δ ∈ [1, 30], t₀ ∈ [−20, 0]τ, t ∈ [t₀, t₀ + 40τ].
pub fn sweep(seed: u64, count: usize) -> Vec<SweepCase> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t0 = rng.gen_range(-20.0..=0.0);
            SweepCase {
                lambda0_tau: rng.gen_range(0.1..=10.0),
                delta_bar_tau: rng.gen_range(-2.0..=2.0),
                delta_total: rng.gen_range(1..=30),
                t0,
                t: t0 + rng.gen_range(0.0..=40.0),
            }
        })
        .collect()
}

/// Reads a `# `-commented CSV into its columns.
pub fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        for (k, field) in line.split(',').enumerate() {
            if cols.len() <= k {
                cols.push(Vec::new());
            }
            cols[k].push(field.parse().unwrap());
        }
    }
    cols
}

/// RMS of `x` minus its local mean, over windows of total width `width` in
/// the (non-decreasing) abscissa `theta`.
pub fn windowed_rms(theta: &[f64], x: &[f64], width: f64) -> Vec<f64> {
    let n = x.len();
    let (mut lo, mut hi) = (0usize, 0usize);
    (0..n)
        .map(|i| {
            while hi < n && theta[hi] <= theta[i] + 0.5 * width {
                hi += 1;
            }
            while theta[lo] < theta[i] - 0.5 * width {
                lo += 1;
            }
            let w = &x[lo..hi];
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt()
        })
        .collect()
}

/// Collapse and revival structure of an envelope.
#[derive(Debug, Clone)]
pub struct Lobes {
    pub initial: f64,
    pub floor: f64,
    pub floor_at: usize,
    /// Peaks that rose above threshold and then fell below half their height.
    pub completed: Vec<f64>,
    /// A rise still in progress at the end of the data.
    pub pending: Option<f64>,
}

/// The initial collapse is the first point below `collapse_fraction` of the
/// starting envelope; the floor is the minimum after it. A revival lobe must
/// exceed `lobe_factor × floor`, rise to `prominence ×` the preceding trough,
/// and later fall below half its peak.
pub fn find_lobes(env: &[f64], collapse_fraction: f64, lobe_factor: f64, prominence: f64) -> Option<Lobes> {
    let initial = env[0];
    let collapse = env.iter().position(|&e| e < collapse_fraction * initial)?;
    let (floor_at, floor) = env[collapse..]
        .iter()
        .enumerate()
        .fold((collapse, f64::INFINITY), |acc, (k, &e)| if e < acc.1 { (collapse + k, e) } else { acc });
    let threshold = lobe_factor * floor;
    let mut completed = Vec::new();
    let mut trough = floor;
    let mut peak: Option<f64> = None;
    for &e in &env[floor_at..] {
        match peak {
            None => {
                trough = trough.min(e);
                if e > threshold && e > prominence * trough {
                    peak = Some(e);
                }
            }
            Some(p) => {
                let p = p.max(e);
                if e < 0.5 * p {
                    completed.push(p);
                    peak = None;
                    trough = e;
                } else {
                    peak = Some(p);
                }
            }
        }
    }
    Some(Lobes {
        initial,
        floor,
        floor_at,
        completed,
        pending: peak,
    })
}

/// Local extrema `(t, x, is_max)`, refined by a parabola through the three
/// samples around each.
pub fn refined_extrema(t: &[f64], x: &[f64]) -> Vec<(f64, f64, bool)> {
    let mut out = Vec::new();
    for i in 1..x.len() - 1 {
        let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
        if (b - a) * (c - b) < 0.0 {
            let offset = 0.5 * (a - c) / (a - 2.0 * b + c);
            let h = t[i + 1] - t[i];
            out.push((t[i] + offset * h, b - 0.25 * (a - c) * offset, b > a));
        }
    }
    out
}

/// Alternating maxima and minima that differ from their predecessor by at
/// least `min_swing`; smaller wiggles are absorbed.
pub fn significant_extrema(t: &[f64], x: &[f64], min_swing: f64) -> Vec<(f64, f64)> {
    let mut kept: Vec<(f64, f64, bool)> = Vec::new();
    for e in refined_extrema(t, x) {
        match kept.last_mut() {
            Some(last) if last.2 == e.2 => {
                if (e.2 && e.1 > last.1) || (!e.2 && e.1 < last.1) {
                    *last = e;
                }
            }
            Some(last) if (e.1 - last.1).abs() < min_swing => {}
            _ => kept.push(e),
        }
    }
    kept.into_iter().map(|(t, x, _)| (t, x)).collect()
}

/// `(midpoint, π/spacing)` between consecutive significant extrema.
pub fn instantaneous_frequency(t: &[f64], x: &[f64], min_swing: f64) -> Vec<(f64, f64)> {
    significant_extrema(t, x, min_swing)
        .windows(2)
        .map(|w| (0.5 * (w[0].0 + w[1].0), std::f64::consts::PI / (w[1].0 - w[0].0)))
        .collect()
}

/// Strictly rising up to the maximum and strictly falling after; returns the
/// time of the maximum when so.
pub fn rises_then_falls(freq: &[(f64, f64)]) -> Option<f64> {
    let k = freq
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?
        .0;
    let up = freq[..=k].windows(2).all(|w| w[1].1 > w[0].1);
    let down = freq[k..].windows(2).all(|w| w[1].1 < w[0].1);
    (up && down && k > 0 && k + 1 < freq.len()).then_some(freq[k].0)
}
