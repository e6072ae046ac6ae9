//! Criterion benchmarks for the core kernels live in `benches/kernels.rs`.
//! Run with `cargo bench -p rookstat-bench`.

pub use rookstat_core;
