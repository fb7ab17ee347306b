//! Criterion benchmarks for the minor engine live in `benches/`.
