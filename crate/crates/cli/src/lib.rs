//! Library side of the `bures` command-line driver: matrix-file I/O, seeded
//! instance generation, and the fixed-point vs projected-gradient benchmark
//! harness. The binary in `main.rs` is a thin argument-parsing layer over
//! these modules and `bures-core`.

pub mod bench;
pub mod error;
pub mod gen;
pub mod matfile;
