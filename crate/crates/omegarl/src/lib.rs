//! File formats, exporters and the `omegarl` command-line tool on top of
//! `omegarl-core`.

pub use omegarl_core as core;

pub mod csv_out;
pub mod digest;
pub mod dot;
pub mod input;
pub mod qfile;
