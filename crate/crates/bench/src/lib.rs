//! Criterion benchmarks for `fnef-core`; see `benches/cone.rs`.
