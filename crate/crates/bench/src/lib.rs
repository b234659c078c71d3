//! Criterion benchmarks for the graph pipeline live in `benches/`.
