//! Criterion benchmarks for qcreg live under `benches/`.
