//! File formats, a threaded ISD backend, validation harness and CLI on top
//! of `qldpc-core`.

pub mod cli;
pub mod formats;
pub mod harness;
pub mod manifest;
pub mod parallel;
pub mod run;
pub mod verify;
