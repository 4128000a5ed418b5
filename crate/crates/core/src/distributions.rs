//! Marginals of the Wigner grid and the long-time limits of the walk.
//!
//! Summing a grid over `kappa` gives the position distribution `|psi(x)|^2`;
//! summing over `x` gives a time-independent momentum pattern: `1/N` for
//! odd `N`, and `2/N` on even `kappa`, `0` on odd `kappa` for even `N`.
//!
//! The long-time average of the Bloch-mode Wigner sum keeps only the modes
//! with `cos(2 pi (kappa + n)/N) = cos(2 pi n/N)`, i.e. `kappa = 0` (every
//! `n`) or `2n + kappa = 0 (mod N)`. Counting those solutions gives
//!
//! | parity | `kappa = 0` row               | `kappa != 0`              |
//! |--------|-------------------------------|---------------------------|
//! | odd    | `1/N` at `x = j`, else 0      | `1/N^2`                   |
//! | even   | `1/N` at `x = j, j + N/2`     | `2/N^2` even, `0` odd     |
//!
//! The even row deliberately does not use a uniform `1/N^2` background with
//! weight `1/(2N)` at the two `kappa = 0` peaks: that table would break the
//! momentum marginal (odd-`kappa` rows sum to zero at every time), the
//! time independence of the `kappa = 0` row, and the even-`N` limiting
//! position distribution `chi`. The numerical time average settles it; see
//! the `time_average_wigner` tests.

use num_rational::Rational64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::bessel::infinite_line_probability;
use crate::error::{Result, WalkError};
use crate::walk::{evolve, CycleConfig};
use crate::wigner::{fft_rows, Method, PeriodicDelta, WignerGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Position marginal `p(x) = sum_kappa W(x, kappa)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalX {
    pub values: Vec<f64>,
    pub config: CycleConfig,
    pub t: f64,
}

/// Momentum marginal `q(kappa) = sum_x W(x, kappa)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalK {
    pub values: Vec<f64>,
    pub config: CycleConfig,
    pub t: f64,
}

pub fn marginal_over_k(grid: &WignerGrid) -> MarginalX {
    MarginalX {
        values: grid.rows().map(|row| row.iter().sum()).collect(),
        config: grid.config,
        t: grid.t,
    }
}

pub fn marginal_over_x(grid: &WignerGrid) -> MarginalK {
    let n = grid.n();
    let mut values = vec![0.0; n];
    for row in grid.rows() {
        for (acc, v) in values.iter_mut().zip(row) {
            *acc += v;
        }
    }
    MarginalK {
        values,
        config: grid.config,
        t: grid.t,
    }
}

/// The exact momentum marginal every grid on an `n`-ring must have.
pub fn momentum_marginal_pattern(n: usize) -> Vec<Rational64> {
    let n = n as i64;
    (0..n)
        .map(|kappa| match (n % 2, kappa % 2) {
            (1, _) => Rational64::new(1, n),
            (_, 0) => Rational64::new(2, n),
            _ => Rational64::from_integer(0),
        })
        .collect()
}

/// Closed-form long-time average of the Wigner function.
///
/// Every `kappa != 0` row is constant in `x`, so it is stored as one weight
/// per row; the `kappa = 0` row is zero except at a few peak positions.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingWigner {
    pub config: CycleConfig,
    pub parity: Parity,
    /// Value of row `kappa` at every `x`, for `kappa != 0`. Entry 0 is unused
    /// and kept at zero.
    pub row_weights: Vec<Rational64>,
    /// Non-zero `(x, 0, value)` cells of the `kappa = 0` row.
    pub exceptional: Vec<(usize, usize, Rational64)>,
}

impl LimitingWigner {
    /// Generic off-axis value: `1/N^2` for odd rings, `2/N^2` (even `kappa`)
    /// for even rings.
    pub fn background(&self) -> Rational64 {
        let n = self.config.n as i64;
        match self.parity {
            Parity::Odd => Rational64::new(1, n * n),
            Parity::Even => Rational64::new(2, n * n),
        }
    }

    pub fn value(&self, x: usize, kappa: usize) -> Rational64 {
        if kappa != 0 {
            return self.row_weights[kappa];
        }
        self.exceptional
            .iter()
            .find(|(ex, _, _)| *ex == x)
            .map(|&(_, _, v)| v)
            .unwrap_or_else(|| Rational64::from_integer(0))
    }

    /// Exact grid, row-major `(x, kappa)`.
    pub fn exact_grid(&self) -> Vec<Rational64> {
        let n = self.config.n;
        (0..n)
            .flat_map(|x| (0..n).map(move |kappa| (x, kappa)))
            .map(|(x, kappa)| self.value(x, kappa))
            .collect()
    }

    pub fn to_grid(&self) -> WignerGrid {
        WignerGrid {
            values: self.exact_grid().iter().map(rational_to_f64).collect(),
            config: self.config,
            t: f64::INFINITY,
            method: Method::Analytic,
            max_imag_residue: 0.0,
        }
    }

    /// `sum_kappa` of the exact grid at each `x`.
    pub fn position_marginal(&self) -> Vec<Rational64> {
        let n = self.config.n;
        let grid = self.exact_grid();
        grid.chunks(n)
            .map(|row| row.iter().copied().sum())
            .collect()
    }
}

pub fn limiting_wigner(config: &CycleConfig) -> Result<LimitingWigner> {
    config.validate()?;
    let n = config.n;
    let ni = n as i64;
    let delta = PeriodicDelta::new(n);
    let per_mode = Rational64::new(1, ni * ni);

    // Off-axis rows: a surviving mode n satisfies 2n + kappa = 0 (mod N) and
    // contributes exp[-i 2 pi (2n + kappa)(x - j)/N] = 1 at every x.
    let mut row_weights = vec![Rational64::from_integer(0); n];
    for (kappa, weight) in row_weights.iter_mut().enumerate().skip(1) {
        let count = (0..ni)
            .filter(|&m| delta.holds(2 * m + kappa as i64))
            .count();
        *weight = per_mode * count as i64;
    }

    // kappa = 0: every mode survives; sum_n exp[-i 4 pi n (x - j)/N] equals
    // N when 2(x - j) = 0 (mod N) and vanishes otherwise.
    let exceptional = (0..n)
        .filter(|&x| delta.holds(2 * (x as i64 - config.j as i64)))
        .map(|x| (x, 0, Rational64::new(1, ni)))
        .collect();

    Ok(LimitingWigner {
        config: *config,
        parity: Parity::of(n),
        row_weights,
        exceptional,
    })
}

/// Long-time average of `|psi_j(x; t)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingMarginal {
    pub values: Vec<Rational64>,
    pub parity: Parity,
    pub config: CycleConfig,
}

impl LimitingMarginal {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(rational_to_f64).collect()
    }
}

/// `chi_xj`: odd `N` gives `(2N-1)/N^2` at `x = j` and `(N-1)/N^2` elsewhere;
/// even `N` gives `(2N-2)/N^2` at `x = j, j + N/2` and `(N-2)/N^2` elsewhere.
pub fn limiting_chi(config: &CycleConfig) -> Result<LimitingMarginal> {
    config.validate()?;
    let n = config.n as i64;
    let nn = n * n;
    let parity = Parity::of(config.n);
    let values = (0..config.n)
        .map(|x| match parity {
            Parity::Odd if x == config.j => Rational64::new(2 * n - 1, nn),
            Parity::Odd => Rational64::new(n - 1, nn),
            Parity::Even if x == config.j || x == config.antipode() => {
                Rational64::new(2 * n - 2, nn)
            }
            Parity::Even => Rational64::new(n - 2, nn),
        })
        .collect();
    Ok(LimitingMarginal {
        values,
        parity,
        config: *config,
    })
}

/// Samples summed sequentially inside one parallel work unit.
const AVERAGE_BLOCK: usize = 64;

/// `(1/T) int_0^T W dt` approximated by the mean of FFT grids on the
/// endpoint-open uniform grid `t_s = s T / samples`, `s = 0..samples`.
///
/// Samples are summed in fixed blocks and the block sums are combined
/// pairwise in index order, so the result does not depend on the thread
/// count.
pub fn time_average_wigner(
    config: &CycleConfig,
    total_time: f64,
    samples: usize,
) -> Result<WignerGrid> {
    config.validate()?;
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(WalkError::InvalidRange(format!(
            "averaging time must be positive and finite, got T = {total_time}"
        )));
    }
    if samples < 2 {
        return Err(WalkError::InvalidRange(format!(
            "at least two samples are required, got {samples}"
        )));
    }
    let n = config.n;
    let plan = FftPlanner::new().plan_fft_inverse(n);
    let dt = total_time / samples as f64;

    let blocks: Vec<(Vec<f64>, f64)> = (0..samples)
        .collect::<Vec<_>>()
        .par_chunks(AVERAGE_BLOCK)
        .map(|block| -> Result<(Vec<f64>, f64)> {
            let mut acc = vec![0.0; n * n];
            let mut residue: f64 = 0.0;
            for &s in block {
                let psi = evolve(config, s as f64 * dt)?;
                for (a, c) in acc.iter_mut().zip(fft_rows(&psi, &plan)) {
                    *a += c.re;
                    residue = residue.max(c.im.abs());
                }
            }
            Ok((acc, residue))
        })
        .collect::<Result<_>>()?;

    let max_imag_residue = blocks.iter().fold(0.0f64, |m, (_, r)| m.max(*r));
    let sums: Vec<Vec<f64>> = blocks.into_iter().map(|(acc, _)| acc).collect();
    let total = pairwise_sum(sums);
    let scale = 1.0 / samples as f64;
    Ok(WignerGrid {
        values: total.into_iter().map(|v| v * scale).collect(),
        config: *config,
        t: total_time,
        method: Method::TimeAverage,
        max_imag_residue,
    })
}

fn pairwise_sum(mut parts: Vec<Vec<f64>>) -> Vec<f64> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut iter = parts.into_iter();
        while let Some(mut a) = iter.next() {
            if let Some(b) = iter.next() {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

/// `[J_d(2t)]^2`, the large-`N` limit of the position marginal at
/// displacement `d = x - j` (before the wavefront wraps the ring).
pub fn infinite_line_marginal(d: i64, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(WalkError::InvalidRange(format!(
            "time must be finite and non-negative, got t = {t}"
        )));
    }
    Ok(infinite_line_probability(d, t))
}

pub(crate) fn rational_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::transition_probability;
    use crate::wigner::{wigner_bloch, wigner_fft};

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn momentum_pattern_small() {
        assert_eq!(momentum_marginal_pattern(2), vec![r(1, 1), r(0, 1)]);
        assert_eq!(momentum_marginal_pattern(3), vec![r(1, 3); 3]);
        assert_eq!(
            momentum_marginal_pattern(4),
            vec![r(1, 2), r(0, 1), r(1, 2), r(0, 1)]
        );
    }

    #[test]
    fn marginals_of_fft_grid() {
        let c = CycleConfig::new(100, 50).unwrap();
        let g = wigner_fft(&c, 7.0).unwrap();
        let px = marginal_over_k(&g);
        let p = transition_probability(&c, 7.0).unwrap();
        for (a, b) in px.values.iter().zip(&p) {
            assert!((a - b).abs() < 1e-12);
        }
        let qk = marginal_over_x(&g);
        for (kappa, v) in qk.values.iter().enumerate() {
            let want = if kappa % 2 == 0 { 0.02 } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn limiting_odd_table() {
        let c = CycleConfig::new(101, 50).unwrap();
        let lim = limiting_wigner(&c).unwrap();
        assert_eq!(lim.parity, Parity::Odd);
        assert_eq!(lim.background(), r(1, 101 * 101));
        assert_eq!(lim.exceptional, vec![(50, 0, r(1, 101))]);
        for kappa in 1..101 {
            assert_eq!(lim.value(3, kappa), r(1, 101 * 101));
        }
        assert_eq!(lim.value(49, 0), r(0, 1));
    }

    #[test]
    fn limiting_even_table() {
        let c = CycleConfig::new(100, 50).unwrap();
        let lim = limiting_wigner(&c).unwrap();
        assert_eq!(lim.exceptional, vec![(0, 0, r(1, 100)), (50, 0, r(1, 100))]);
        for kappa in 1..100 {
            let want = if kappa % 2 == 0 { r(2, 10000) } else { r(0, 1) };
            assert_eq!(lim.value(17, kappa), want);
        }

        let two = limiting_wigner(&CycleConfig::new(2, 0).unwrap()).unwrap();
        assert_eq!(two.exact_grid(), vec![r(1, 2), r(0, 1), r(1, 2), r(0, 1)]);
    }

    #[test]
    fn chi_tables() {
        let odd = limiting_chi(&CycleConfig::new(3, 0).unwrap()).unwrap();
        assert_eq!(odd.values, vec![r(5, 9), r(2, 9), r(2, 9)]);

        let even = limiting_chi(&CycleConfig::new(100, 50).unwrap()).unwrap();
        assert_eq!(even.values[50], r(198, 10000));
        assert_eq!(even.values[0], r(198, 10000));
        assert_eq!(even.values[1], r(98, 10000));
    }

    #[test]
    fn chi_is_row_sum_of_limit() {
        for n in 2..40 {
            for j in [0, n / 2, n - 1] {
                let c = CycleConfig::new(n, j).unwrap();
                let lim = limiting_wigner(&c).unwrap();
                assert_eq!(lim.position_marginal(), limiting_chi(&c).unwrap().values);
                let total: Rational64 = lim.exact_grid().into_iter().sum();
                assert_eq!(total, r(1, 1));
            }
        }
    }

    #[test]
    fn time_average_keeps_static_row() {
        let c = CycleConfig::new(9, 4).unwrap();
        let avg = time_average_wigner(&c, 123.4, 50).unwrap();
        let start = wigner_bloch(&c, 0.0).unwrap();
        for x in 0..9 {
            assert!((avg.get(x, 0) - start.get(x, 0)).abs() < 1e-10);
        }
    }

    #[test]
    fn time_average_converges_odd_and_even() {
        for n in [7, 8] {
            let c = CycleConfig::new(n, 0).unwrap();
            let avg = time_average_wigner(&c, 5000.0, 5000).unwrap();
            let lim = limiting_wigner(&c).unwrap().to_grid();
            let dev = avg.max_abs_diff(&lim);
            assert!(dev < 5e-3, "n={n}: deviation {dev}");
        }
    }

    #[test]
    fn time_average_rejects_bad_ranges() {
        let c = CycleConfig::new(5, 0).unwrap();
        assert!(time_average_wigner(&c, 0.0, 10).is_err());
        assert!(time_average_wigner(&c, 10.0, 1).is_err());
    }

    #[test]
    fn infinite_line_edges() {
        assert_eq!(infinite_line_marginal(0, 0.0).unwrap(), 1.0);
        assert_eq!(infinite_line_marginal(4, 0.0).unwrap(), 0.0);
        assert!(infinite_line_marginal(0, -1.0).is_err());
        let total: f64 = (-300..=300)
            .map(|d| infinite_line_marginal(d, 5.0).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}
