//! Criterion benchmarks for selberg-core live in `benches/`.
