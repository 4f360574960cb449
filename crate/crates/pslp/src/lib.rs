//! File formats, timing and the command-line driver around `pslp-core`.

pub mod cli;
pub mod clock;
pub mod codec;
pub mod metrics;
pub mod mps;
