//! Criterion benchmarks for the sampling, nodal-domain and level-sweep
//! stages; see `benches/pipeline.rs`.
