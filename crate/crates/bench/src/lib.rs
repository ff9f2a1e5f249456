//! Criterion benchmarks for ndr-core; see `benches/`.
