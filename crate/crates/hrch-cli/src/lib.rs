//! Host-side plumbing around `hrch-core`: the flat key-value config format,
//! CSV emission with round-trippable floats, static SVG plots, and a
//! thread-capped parallel runner for sweeps.

pub mod config;
pub mod csv;
pub mod runner;
pub mod svg;

/// Exit codes of the `hrch` binary.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const CONVERGENCE: i32 = 3;
    pub const IO: i32 = 4;
}

/// Maps a core error to the binary's exit code.
pub fn exit_code_for(err: &hrch_core::Error) -> i32 {
    match err {
        hrch_core::Error::Convergence { .. } => exit_codes::CONVERGENCE,
        _ => exit_codes::CONFIG,
    }
}
