//! Criterion benchmarks for the boundaryk engine; run with `cargo bench -p boundaryk-bench`.
