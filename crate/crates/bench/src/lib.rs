//! Benchmarks for the pcircuit simulator live under `benches/`.
