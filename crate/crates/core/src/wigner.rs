//! Discrete Wigner function on the ring.
//!
//! For a state `psi` on `N` nodes the phase-space function is
//!
//! ```text
//! W(x, kappa) = (1/N) sum_{y=0}^{N-1} exp(i 2 pi kappa y / N) psi*(x - y) psi(x + y)
//! ```
//!
//! with all positions taken modulo `N`. The summand pairs `y` with `N - y`
//! as complex conjugates, so `W` is real; every path below computes in
//! complex arithmetic, records the largest discarded imaginary part and
//! keeps the real part.
//!
//! Three evaluation routes are provided and cross-checked in the tests:
//! the literal sum ([`wigner_direct`], O(N^3)), the closed Bloch-mode sum for
//! a walk started at a single node ([`wigner_bloch`], O(N^3)), and one FFT per
//! position row ([`wigner_fft`], O(N^2 log N)).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, WalkError};
use crate::walk::{build_spectrum, evolve, unit_roots, CycleConfig, WaveFunction};

/// How a [`WignerGrid`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Bloch,
    Fft,
    /// Closed-form long-time limit.
    Analytic,
    /// Numerical time average of FFT grids.
    TimeAverage,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Bloch => "bloch",
            Method::Fft => "fft",
            Method::Analytic => "analytic",
            Method::TimeAverage => "time-average",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "bloch" => Ok(Method::Bloch),
            "fft" => Ok(Method::Fft),
            "analytic" => Ok(Method::Analytic),
            "time-average" => Ok(Method::TimeAverage),
            other => Err(WalkError::InvalidConfig(format!(
                "unknown method tag '{other}'"
            ))),
        }
    }
}

/// Real `N x N` phase-space array, row-major with rows `x` and columns `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub values: Vec<f64>,
    pub config: CycleConfig,
    pub t: f64,
    pub method: Method,
    /// Largest |Im W| dropped when the complex sums were made real.
    pub max_imag_residue: f64,
}

impl WignerGrid {
    pub fn n(&self) -> usize {
        self.config.n
    }

    #[inline]
    pub fn get(&self, x: usize, kappa: usize) -> f64 {
        self.values[x * self.n() + kappa]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let n = self.n();
        &self.values[x * n..(x + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n())
    }

    /// Values along fixed `kappa`, indexed by `x`.
    pub fn column(&self, kappa: usize) -> Vec<f64> {
        (0..self.n()).map(|x| self.get(x, kappa)).collect()
    }

    /// Sum over the whole phase space.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference to another grid of the same size.
    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        assert_eq!(self.n(), other.n(), "grid size mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest violation of `W(x, kappa) = W(x, N - kappa)`. This mirror
    /// symmetry holds for walks on even rings only.
    pub fn kappa_reflection_error(&self) -> f64 {
        let n = self.n();
        self.symmetry_error(|x, kappa| (x, (n - kappa) % n))
    }

    /// Largest violation of the point reflection through the start node,
    /// `W(x, kappa) = W(2j - x, N - kappa)`, which every walk started from a
    /// single node satisfies.
    pub fn point_reflection_error(&self) -> f64 {
        let n = self.n();
        let j = self.config.j;
        self.symmetry_error(|x, kappa| ((2 * j + n - x) % n, (n - kappa) % n))
    }

    fn symmetry_error(&self, image: impl Fn(usize, usize) -> (usize, usize)) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for kappa in 0..n {
                let (xi, ki) = image(x, kappa);
                worst = worst.max((self.get(x, kappa) - self.get(xi, ki)).abs());
            }
        }
        worst
    }
}

/// `Delta_m = 1` iff `m = 0 (mod N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicDelta {
    pub modulus: usize,
}

impl PeriodicDelta {
    pub fn new(modulus: usize) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        PeriodicDelta { modulus }
    }

    #[inline]
    pub fn holds(&self, m: i64) -> bool {
        m.rem_euclid(self.modulus as i64) == 0
    }

    #[inline]
    pub fn value(&self, m: i64) -> u32 {
        self.holds(m) as u32
    }
}

fn realify(config: CycleConfig, t: f64, method: Method, complex: Vec<Complex64>) -> WignerGrid {
    let max_imag_residue = complex.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    WignerGrid {
        values: complex.into_iter().map(|c| c.re).collect(),
        config,
        t,
        method,
        max_imag_residue,
    }
}

/// General window `y in [offset, offset + len)` with prefactor `1/len`.
fn window_sum(psi: &WaveFunction, offset: i64, len: usize) -> Vec<Complex64> {
    let n = psi.n();
    let roots = unit_roots(n);
    let scale = 1.0 / len as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(x, row)| {
        let x = x as i64;
        let products: Vec<(i64, Complex64)> = (offset..offset + len as i64)
            .map(|y| (y, psi.at(x - y).conj() * psi.at(x + y)))
            .collect();
        for (kappa, cell) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(y, p) in &products {
                acc += roots[(kappa as i64 * y).rem_euclid(n as i64) as usize] * p;
            }
            *cell = acc * scale;
        }
    });
    out
}

/// Literal evaluation of the discrete Wigner sum for an arbitrary normalized
/// state.
pub fn wigner_direct(psi: &WaveFunction) -> Result<WignerGrid> {
    psi.check_normalized()?;
    let values = window_sum(psi, 0, psi.n());
    Ok(realify(psi.config, psi.t, Method::Direct, values))
}

/// The same sum with `y` running over `offset..offset + N`. Any `N`
/// consecutive values give the same grid.
pub fn window_shifted_wigner(psi: &WaveFunction, offset: i64) -> Result<WignerGrid> {
    psi.check_normalized()?;
    let values = window_sum(psi, offset, psi.n());
    Ok(realify(psi.config, psi.t, Method::Direct, values))
}

/// The sum over `m` full periods `y in [0, m N)` with prefactor `1/(m N)`.
pub fn window_repeated_wigner(psi: &WaveFunction, periods: usize) -> Result<WignerGrid> {
    if periods == 0 {
        return Err(WalkError::InvalidRange(
            "window must span at least one period".into(),
        ));
    }
    psi.check_normalized()?;
    let values = window_sum(psi, 0, periods * psi.n());
    Ok(realify(psi.config, psi.t, Method::Direct, values))
}

/// Closed Bloch-mode form for the walk started at node `j`:
///
/// ```text
/// W(x, kappa) = (1/N^2) sum_n exp[+i 2 pi (2n + kappa)(x - j) / N]
///                             exp{-i 2 gamma t [cos(2 pi (kappa + n)/N) - cos(2 pi n / N)]}
/// ```
///
/// The `+` sign in the spatial factor is what the `y`-sum produces with the
/// `exp(+i k y)` kernel; the opposite sign yields the grid mirrored to
/// `kappa -> N - kappa`. The cosine difference is evaluated as
/// `(E_n - E_{n+kappa}) / 2` so that the `kappa = 0` row is time independent
/// to the last bit.
pub fn wigner_bloch(config: &CycleConfig, t: f64) -> Result<WignerGrid> {
    config.validate()?;
    let n = config.n;
    let energies = build_spectrum(n)?.energies;
    let roots = unit_roots(n);
    let gamma_t = config.gamma * t;

    // dynamic[kappa * n + mode]
    let dynamic: Vec<Complex64> = (0..n)
        .flat_map(|kappa| {
            let energies = &energies;
            (0..n).map(move |mode| {
                let de = energies[mode] - energies[(mode + kappa) % n];
                Complex64::from_polar(1.0, -gamma_t * de)
            })
        })
        .collect();

    let scale = 1.0 / (n * n) as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(x, row)| {
        let shift = config.wrap(x as i64 - config.j as i64);
        for (kappa, cell) in row.iter_mut().enumerate() {
            let phases = &dynamic[kappa * n..(kappa + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (mode, p) in phases.iter().enumerate() {
                acc += roots[((2 * mode + kappa) * shift) % n] * p;
            }
            *cell = acc * scale;
        }
    });
    Ok(realify(*config, t, Method::Bloch, out))
}

/// Row-wise FFT evaluation: evolve `psi` spectrally, then transform the `N`
/// products `psi*(x - y) psi(x + y)` over `y` for each `x`.
pub fn wigner_fft(config: &CycleConfig, t: f64) -> Result<WignerGrid> {
    let psi = evolve(config, t)?;
    let n = config.n;
    let plan = FftPlanner::new().plan_fft_inverse(n);
    let values = fft_rows(&psi, &plan);
    Ok(realify(*config, t, Method::Fft, values))
}

pub(crate) fn fft_rows(psi: &WaveFunction, plan: &Arc<dyn Fft<f64>>) -> Vec<Complex64> {
    let n = psi.n();
    let scale = 1.0 / n as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each_init(
        || vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()],
        |scratch, (x, row)| {
            let x = x as i64;
            for (y, cell) in row.iter_mut().enumerate() {
                let y = y as i64;
                *cell = psi.at(x - y).conj() * psi.at(x + y);
            }
            plan.process_with_scratch(row, scratch);
            row.iter_mut().for_each(|c| *c *= scale);
        },
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn indicator_grid(n: usize, j: usize) -> Vec<f64> {
        // W at t = 0: only y = 0 (and y = N/2 for even N) survive.
        let mut g = vec![0.0; n * n];
        for kappa in 0..n {
            g[j * n + kappa] += 1.0 / n as f64;
            if n.is_multiple_of(2) {
                let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
                g[((j + n / 2) % n) * n + kappa] += sign / n as f64;
            }
        }
        g
    }

    #[test]
    fn zero_time_grids_all_paths() {
        for (n, j) in [(3, 1), (7, 2), (8, 2), (10, 9), (2, 0)] {
            let c = CycleConfig::new(n, j).unwrap();
            let want = indicator_grid(n, j);
            let grids = [
                wigner_direct(&WaveFunction::localized(c)).unwrap(),
                wigner_bloch(&c, 0.0).unwrap(),
                wigner_fft(&c, 0.0).unwrap(),
            ];
            for g in grids {
                for (a, b) in g.values.iter().zip(&want) {
                    assert!((a - b).abs() < 1e-14, "n={n} method={}", g.method);
                }
            }
        }
    }

    #[test]
    fn six_ring_revival_row() {
        let c = CycleConfig::new(6, 0).unwrap();
        for g in [
            wigner_direct(&evolve(&c, 2.0 * PI).unwrap()).unwrap(),
            wigner_bloch(&c, 2.0 * PI).unwrap(),
            wigner_fft(&c, 2.0 * PI).unwrap(),
        ] {
            for kappa in 0..6 {
                assert!((g.get(0, kappa) - 1.0 / 6.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bloch_matches_direct_odd_ring() {
        let c = CycleConfig::new(7, 3).unwrap();
        let direct = wigner_direct(&evolve(&c, 1.7).unwrap()).unwrap();
        let bloch = wigner_bloch(&c, 1.7).unwrap();
        assert!(direct.max_abs_diff(&bloch) < 1e-10);
        assert!(bloch.max_imag_residue < 1e-10);
    }

    #[test]
    fn fft_matches_direct_n64() {
        let c = CycleConfig::new(64, 0).unwrap();
        let direct = wigner_direct(&evolve(&c, 5.0).unwrap()).unwrap();
        let fft = wigner_fft(&c, 5.0).unwrap();
        assert!(direct.max_abs_diff(&fft) < 1e-10);
    }

    #[test]
    fn kappa_zero_row_static_even_ring() {
        let c = CycleConfig::new(100, 50).unwrap();
        let start = wigner_bloch(&c, 0.0).unwrap().column(0);
        let later = wigner_bloch(&c, 37.25).unwrap().column(0);
        for (a, b) in start.iter().zip(&later) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_rejects_unnormalized_state() {
        let c = CycleConfig::new(3, 0).unwrap();
        let psi = WaveFunction {
            amplitudes: vec![Complex64::new(1.0, 0.0); 3],
            config: c,
            t: 0.0,
        };
        assert!(matches!(
            wigner_direct(&psi),
            Err(WalkError::InvalidState(_))
        ));
    }

    #[test]
    fn periodic_delta() {
        let d = PeriodicDelta::new(5);
        assert!(d.holds(0) && d.holds(10) && d.holds(-15));
        assert!(!d.holds(3) && !d.holds(-1));
        for m in -20..20 {
            assert_eq!(d.value(m), d.value(m + 5));
        }
    }

    #[test]
    fn method_tags_round_trip() {
        for m in [
            Method::Direct,
            Method::Bloch,
            Method::Fft,
            Method::Analytic,
            Method::TimeAverage,
        ] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("spline".parse::<Method>().is_err());
    }
}
