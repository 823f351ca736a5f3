//! Criterion benchmarks for the Gram-matrix pipeline live in `benches/`.
