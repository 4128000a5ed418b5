//! Ring configuration, Bloch spectrum and closed-form time evolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, WalkError};

/// A walk on an `n`-node cycle started from node `j`, with uniform bond
/// coupling `gamma` (`hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub n: usize,
    pub j: usize,
    pub gamma: f64,
}

impl CycleConfig {
    /// Unit-coupling walk; fails unless `n >= 2` and `j < n`.
    pub fn new(n: usize, j: usize) -> Result<Self> {
        Self::with_gamma(n, j, 1.0)
    }

    pub fn with_gamma(n: usize, j: usize, gamma: f64) -> Result<Self> {
        let config = CycleConfig { n, j, gamma };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(WalkError::InvalidConfig(format!(
                "ring size must satisfy N >= 2, got N = {}",
                self.n
            )));
        }
        if self.j >= self.n {
            return Err(WalkError::InvalidConfig(format!(
                "start node must satisfy 0 <= j < N, got j = {} with N = {}",
                self.j, self.n
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(WalkError::InvalidConfig(format!(
                "coupling must be finite and positive, got gamma = {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Reduces an arbitrary integer position onto the ring.
    #[inline]
    pub fn wrap(&self, x: i64) -> usize {
        x.rem_euclid(self.n as i64) as usize
    }

    /// Node diametrically opposite the start node; only meaningful for even `n`.
    pub fn antipode(&self) -> usize {
        (self.j + self.n / 2) % self.n
    }

    pub fn is_even(&self) -> bool {
        self.n.is_multiple_of(2)
    }
}

/// Eigenphases `theta_n = 2 pi n / N` and eigenvalues `E_n = 2 - 2 cos theta_n`
/// of the unit-coupling ring Hamiltonian, in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSpectrum {
    pub thetas: Vec<f64>,
    pub energies: Vec<f64>,
}

impl BlochSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `exp(-i gamma E_n t)` for every mode.
    pub fn phases(&self, gamma: f64, t: f64) -> Vec<Complex64> {
        self.energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -gamma * e * t))
            .collect()
    }
}

pub fn build_spectrum(n: usize) -> Result<BlochSpectrum> {
    if n < 2 {
        return Err(WalkError::InvalidConfig(format!(
            "ring size must satisfy N >= 2, got N = {n}"
        )));
    }
    let thetas: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let energies = (0..n).map(|k| ring_energy(k, n)).collect();
    Ok(BlochSpectrum { thetas, energies })
}

/// `2 - 2 cos(2 pi k / n)`, folded onto `k <= n/2` so that `E_k == E_{n-k}`
/// holds bit-exactly.
pub(crate) fn ring_energy(k: usize, n: usize) -> f64 {
    let k = k % n;
    let k = k.min(n - k);
    if 4 * k == n {
        return 2.0;
    }
    2.0 - 2.0 * (2.0 * PI * k as f64 / n as f64).cos()
}

/// `exp(i 2 pi m / n)` for `m = 0..n`, used with integer-reduced exponents.
pub(crate) fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
        .collect()
}

/// Position-space amplitudes `psi(x)` on the ring, tagged with the
/// configuration and time they describe.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub amplitudes: Vec<Complex64>,
    pub config: CycleConfig,
    pub t: f64,
}

impl WaveFunction {
    /// Wraps externally prepared amplitudes. The vector length must match the
    /// ring and the state must be normalized within `1e-12 * N`.
    pub fn from_amplitudes(
        config: CycleConfig,
        t: f64,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        config.validate()?;
        if amplitudes.len() != config.n {
            return Err(WalkError::InvalidState(format!(
                "expected {} amplitudes, got {}",
                config.n,
                amplitudes.len()
            )));
        }
        let psi = WaveFunction {
            amplitudes,
            config,
            t,
        };
        psi.check_normalized()?;
        Ok(psi)
    }

    /// Localized state `|j>` at `t = 0`.
    pub fn localized(config: CycleConfig) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); config.n];
        amplitudes[config.j] = Complex64::new(1.0, 0.0);
        WaveFunction {
            amplitudes,
            config,
            t: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    /// Amplitude at an arbitrary integer position, with periodic wrap.
    #[inline]
    pub fn at(&self, x: i64) -> Complex64 {
        self.amplitudes[x.rem_euclid(self.n() as i64) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr();
        let tol = 1e-12 * self.n() as f64;
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(WalkError::InvalidState(format!(
                "state is not normalized: sum |psi|^2 = {norm:e}, tolerance {tol:e}"
            )));
        }
        Ok(())
    }

    /// Advances the state by `dt` under the ring Hamiltonian by going to the
    /// Bloch basis, applying the spectral phases and transforming back.
    pub fn propagate(&self, dt: f64) -> WaveFunction {
        let n = self.n();
        let spectrum = build_spectrum(n).expect("wave function on a valid ring");
        let phases = spectrum.phases(self.config.gamma, dt);
        let mut planner = FftPlanner::new();
        let mut buf = self.amplitudes.clone();
        planner.plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        for (b, p) in buf.iter_mut().zip(&phases) {
            *b *= p * scale;
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        WaveFunction {
            amplitudes: buf,
            config: self.config,
            t: self.t + dt,
        }
    }
}

/// `psi_j(x; t) = (1/N) sum_n exp[i 2 pi n (x - j) / N] exp[-i gamma E_n t]`,
/// evaluated as one inverse FFT of the phase vector
/// `exp[-i gamma E_n t] exp[-i 2 pi n j / N]`.
pub fn evolve(config: &CycleConfig, t: f64) -> Result<WaveFunction> {
    config.validate()?;
    let n = config.n;
    let spectrum = build_spectrum(n)?;
    let roots = unit_roots(n);
    let mut buf: Vec<Complex64> = spectrum
        .phases(config.gamma, t)
        .into_iter()
        .enumerate()
        .map(|(k, p)| p * roots[(n - (k * config.j) % n) % n])
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|a| *a *= scale);
    Ok(WaveFunction {
        amplitudes: buf,
        config: *config,
        t,
    })
}

/// Same amplitudes as [`evolve`], by the explicit O(N^2) double sum.
pub fn evolve_oracle(config: &CycleConfig, t: f64) -> Result<WaveFunction> {
    config.validate()?;
    let n = config.n;
    let spectrum = build_spectrum(n)?;
    let phases = spectrum.phases(config.gamma, t);
    let roots = unit_roots(n);
    let scale = 1.0 / n as f64;
    let amplitudes = (0..n)
        .map(|x| {
            let shift = config.wrap(x as i64 - config.j as i64);
            let sum: Complex64 = phases
                .iter()
                .enumerate()
                .map(|(k, p)| roots[(k * shift) % n] * p)
                .sum();
            sum * scale
        })
        .collect();
    Ok(WaveFunction {
        amplitudes,
        config: *config,
        t,
    })
}

/// `|psi_j(x; t)|^2` for `x = 0..N`.
pub fn transition_probability(config: &CycleConfig, t: f64) -> Result<Vec<f64>> {
    Ok(evolve(config, t)?.probabilities())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn spectrum_small_rings() {
        assert_close(&build_spectrum(2).unwrap().energies, &[0.0, 4.0], 1e-15);
        assert_close(
            &build_spectrum(4).unwrap().energies,
            &[0.0, 2.0, 4.0, 2.0],
            1e-15,
        );
        assert_close(
            &build_spectrum(6).unwrap().energies,
            &[0.0, 1.0, 3.0, 4.0, 3.0, 1.0],
            1e-14,
        );
    }

    #[test]
    fn spectrum_bounds_and_reflection() {
        for n in 2..200 {
            let s = build_spectrum(n).unwrap();
            assert_eq!(s.energies[0], 0.0);
            for k in 0..n {
                assert!(s.energies[k] >= 0.0 && s.energies[k] <= 4.0);
                assert_eq!(s.energies[k], s.energies[(n - k) % n]);
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(build_spectrum(1).is_err());
        assert!(CycleConfig::new(1, 0).is_err());
        assert!(CycleConfig::new(5, 5).is_err());
        assert!(CycleConfig::with_gamma(5, 0, 0.0).is_err());
        assert!(CycleConfig::with_gamma(5, 0, f64::NAN).is_err());
    }

    #[test]
    fn zero_time_is_localized() {
        for (n, j) in [(2, 1), (7, 3), (10, 0)] {
            let c = CycleConfig::new(n, j).unwrap();
            let p = transition_probability(&c, 0.0).unwrap();
            for (x, v) in p.iter().enumerate() {
                let want = if x == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn four_ring_revives_at_pi() {
        let c = CycleConfig::new(4, 0).unwrap();
        let p = transition_probability(&c, PI).unwrap();
        assert_close(&p, &[1.0, 0.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn six_ring_revives_at_two_pi() {
        let c = CycleConfig::new(6, 0).unwrap();
        let p = transition_probability(&c, 2.0 * PI).unwrap();
        assert_close(&p, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn fast_path_matches_oracle() {
        for n in 2..=64 {
            for j in [0, n / 2, n - 1] {
                let c = CycleConfig::new(n, j).unwrap();
                for t in [0.0, 0.7, 13.0, -4.2, 1234.5] {
                    let fast = evolve(&c, t).unwrap();
                    let slow = evolve_oracle(&c, t).unwrap();
                    for (a, b) in fast.amplitudes.iter().zip(&slow.amplitudes) {
                        assert!((a - b).norm() < 1e-12, "n={n} j={j} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_enters_as_product_with_time() {
        let a = CycleConfig::with_gamma(9, 2, 2.5).unwrap();
        let b = CycleConfig::new(9, 2).unwrap();
        let pa = evolve(&a, 1.2).unwrap();
        let pb = evolve(&b, 3.0).unwrap();
        for (x, y) in pa.amplitudes.iter().zip(&pb.amplitudes) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn from_amplitudes_checks_norm_and_length() {
        let c = CycleConfig::new(3, 0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert!(WaveFunction::from_amplitudes(c, 0.0, vec![one, zero, zero]).is_ok());
        assert!(WaveFunction::from_amplitudes(c, 0.0, vec![one, one, zero]).is_err());
        assert!(WaveFunction::from_amplitudes(c, 0.0, vec![one, zero]).is_err());
    }

    #[test]
    fn negative_time_reverses_evolution() {
        let c = CycleConfig::new(11, 4).unwrap();
        let back = evolve(&c, 3.3).unwrap().propagate(-3.3);
        let p = back.probabilities();
        assert!((p[4] - 1.0).abs() < 1e-12);
    }
}
