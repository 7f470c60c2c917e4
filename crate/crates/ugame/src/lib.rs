//! File formats, random instances, simulation and the verification runner
//! behind the `ugame` command.

pub mod format;
pub mod random;
pub mod runner;
pub mod simulate;
