//! Standard-library side of the static permutation Mastermind toolkit: text
//! formats, multi-threaded certification, the constant sweep and the `pmm`
//! command line. All algorithms live in `pmm-core`.

pub mod bench;
pub mod cli;
pub mod format;
pub mod parallel;

pub use pmm_core as core;
