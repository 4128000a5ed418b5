//! Benchmarks for the qwps kernels live under `benches/`.
