//! Criterion benchmarks for the quadrature-heavy kernels live in `benches/`.
