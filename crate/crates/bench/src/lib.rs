//! Criterion benchmarks for the cyclewalk kernels live in `benches/`.
