//! Return-probability scans and exact-revival classification.
//!
//! The revival measure is the return probability `|psi_j(j; t)|^2`. Since
//! the state is normalized, it reaches 1 exactly when the whole distribution
//! is back on the start node.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::walk::{build_spectrum, evolve, CycleConfig};

/// `|psi_j(j; t)|^2 = |(1/N) sum_n exp(-i gamma E_n t)|^2`, clamped to `[0, 1]`
/// against rounding.
pub fn fidelity(config: &CycleConfig, t: f64) -> Result<f64> {
    config.validate()?;
    let spectrum = build_spectrum(config.n)?;
    let amp: Complex64 = spectrum.phases(config.gamma, t).into_iter().sum();
    let p = amp.norm_sqr() / (config.n * config.n) as f64;
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalPeak {
    pub t: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalScan {
    pub config: CycleConfig,
    pub times: Vec<f64>,
    pub fidelities: Vec<f64>,
    /// `sum_x | |psi(x;t)|^2 - delta_{x,j} |`, the L1 distance of the full
    /// distribution to its initial value.
    pub l1_distances: Vec<f64>,
    /// Interior local maxima, highest first; equal fidelities keep time order.
    pub peaks: Vec<RevivalPeak>,
    /// `N^2 / 2 pi`, the scale on which partial revivals start to appear.
    pub t_r_estimate: f64,
}

impl RevivalScan {
    /// Sample with the highest return probability (earliest on ties).
    pub fn argmax(&self) -> RevivalPeak {
        let mut best = 0;
        for (i, &f) in self.fidelities.iter().enumerate() {
            if f > self.fidelities[best] {
                best = i;
            }
        }
        RevivalPeak {
            t: self.times[best],
            fidelity: self.fidelities[best],
        }
    }
}

/// Scan the uniform grid `t_start + i dt`, `i = 0, 1, ...` up to `t_end`.
pub fn revival_scan(
    config: &CycleConfig,
    t_start: f64,
    t_end: f64,
    dt: f64,
) -> Result<RevivalScan> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(WalkError::InvalidRange(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_start < t_end && t_start.is_finite() && t_end.is_finite()) {
        return Err(WalkError::InvalidRange(format!(
            "need t_start < t_end, got [{t_start}, {t_end}]"
        )));
    }
    // Tolerate t_end landing a rounding error short of the last grid point.
    let steps = ((t_end - t_start) / dt * (1.0 + 1e-12)).floor() as usize;
    let times = (0..=steps).map(|i| t_start + i as f64 * dt).collect();
    revival_scan_at(config, times)
}

/// Scan an explicit, strictly increasing list of times.
pub fn revival_scan_at(config: &CycleConfig, times: Vec<f64>) -> Result<RevivalScan> {
    config.validate()?;
    if times.len() < 3 {
        return Err(WalkError::InvalidRange(format!(
            "a scan needs at least 3 samples, got {}",
            times.len()
        )));
    }
    if times
        .windows(2)
        .any(|w| w[0] >= w[1] || w[0].is_nan() || w[1].is_nan())
    {
        return Err(WalkError::InvalidRange(
            "scan times must be strictly increasing".into(),
        ));
    }

    let mut fidelities = Vec::with_capacity(times.len());
    let mut l1_distances = Vec::with_capacity(times.len());
    for &t in &times {
        let probs = evolve(config, t)?.probabilities();
        let l1 = probs
            .iter()
            .enumerate()
            .map(|(x, p)| {
                if x == config.j {
                    (1.0 - p).abs()
                } else {
                    p.abs()
                }
            })
            .sum();
        fidelities.push(fidelity(config, t)?);
        l1_distances.push(l1);
    }

    let peaks = find_peaks(&times, &fidelities);
    let n = config.n as f64;
    Ok(RevivalScan {
        config: *config,
        times,
        fidelities,
        l1_distances,
        peaks,
        t_r_estimate: n * n / (2.0 * PI),
    })
}

/// Strict interior local maxima. A flat top counts once, at its earliest
/// sample, when both sides of the plateau are lower.
fn find_peaks(times: &[f64], values: &[f64]) -> Vec<RevivalPeak> {
    let mut peaks = Vec::new();
    let len = values.len();
    let mut i = 1;
    while i + 1 < len {
        if values[i] > values[i - 1] {
            let mut end = i;
            while end + 1 < len && values[end + 1] == values[i] {
                end += 1;
            }
            if end + 1 < len && values[end + 1] < values[i] {
                peaks.push(RevivalPeak {
                    t: times[i],
                    fidelity: values[i],
                });
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    // Stable sort keeps earlier times first among equal fidelities.
    peaks.sort_by(|a, b| b.fidelity.total_cmp(&a.fidelity));
    peaks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRevival {
    pub revives: bool,
    /// Smallest `t > 0` (unit coupling) with `psi(t) = psi(0)`, when one exists.
    pub period: Option<f64>,
}

/// A ring revives exactly iff every Bloch energy is an integer (the energies
/// are algebraic, and `E_1 = 2 - 2 cos(2 pi / N)` is rational only for
/// `N = 1, 2, 3, 4, 6`). The period is then `2 pi / gcd(E_n)`.
pub fn exact_revival_check(n: usize) -> Result<ExactRevival> {
    let spectrum = build_spectrum(n)?;
    let mut gcd = 0u64;
    for &e in &spectrum.energies {
        let rounded = e.round();
        if (e - rounded).abs() > 1e-12 {
            return Ok(ExactRevival {
                revives: false,
                period: None,
            });
        }
        gcd = gcd_u64(gcd, rounded as u64);
    }
    Ok(ExactRevival {
        revives: true,
        period: Some(2.0 * PI / gcd as f64),
    })
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}
