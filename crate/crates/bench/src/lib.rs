//! Criterion benchmarks for the core algorithms; see `benches/algebra.rs`.
