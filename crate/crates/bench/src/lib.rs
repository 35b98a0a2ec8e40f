//! Benchmarks live in `benches/`; run them with `cargo bench -p nl2sql-forge-bench`.
