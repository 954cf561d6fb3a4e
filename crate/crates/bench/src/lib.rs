//! Criterion benchmarks for the extraction pipeline live in `benches/`.
