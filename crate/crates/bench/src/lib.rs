//! Benchmarks for the sensitivity model live in `benches/`.
