//! Continuous-time quantum walks on N-node cycles, viewed in discrete phase
//! space.
//!
//! The walk Hamiltonian is the nearest-neighbour ring Laplacian
//! `H|j> = 2|j> - |j-1> - |j+1>` (scaled by the coupling `gamma`), which is
//! diagonal in the Bloch basis with energies `E_n = 2 - 2 cos(2 pi n / N)`.
//! On top of the closed-form evolution this crate provides
//!
//! * the discrete Wigner function `W(x, kappa; t)` by three independent
//!   evaluation paths ([`wigner_direct`], [`wigner_bloch`], [`wigner_fft`]),
//! * its marginals and the analytic long-time limits ([`distributions`]),
//! * the infinite-line Bessel limit ([`bessel`]),
//! * return-probability revival analysis ([`revival`]).
//!
//! Grids are indexed `(x, kappa)`: rows are positions, columns are momentum
//! indices `kappa` in `[0, N)` with `k = 2 pi kappa / N`.

pub mod bessel;
pub mod distributions;
pub mod error;
pub mod revival;
pub mod walk;
pub mod wigner;

pub use distributions::{
    infinite_line_marginal, limiting_chi, limiting_wigner, marginal_over_k, marginal_over_x,
    momentum_marginal_pattern, time_average_wigner, LimitingMarginal, LimitingWigner, MarginalK,
    MarginalX, Parity,
};
pub use error::{Result, WalkError};
pub use revival::{
    exact_revival_check, fidelity, revival_scan, revival_scan_at, ExactRevival, RevivalPeak,
    RevivalScan,
};
pub use walk::{
    build_spectrum, evolve, evolve_oracle, transition_probability, BlochSpectrum, CycleConfig,
    WaveFunction,
};
pub use wigner::{
    wigner_bloch, wigner_direct, wigner_fft, window_repeated_wigner, window_shifted_wigner, Method,
    PeriodicDelta, WignerGrid,
};

pub use num_complex::Complex64;
