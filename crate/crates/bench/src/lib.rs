//! Criterion benchmarks for `wishfade`; see `benches/`.
