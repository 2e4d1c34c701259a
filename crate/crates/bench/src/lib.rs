//! Criterion benchmarks for `gravclock`; see `benches/pipeline.rs`.
