//! Empty library anchor; the crate exists for its criterion benchmarks
//! (see `benches/hot_paths.rs`).
