//! Benchmark-only crate; see `benches/precoding.rs`.
