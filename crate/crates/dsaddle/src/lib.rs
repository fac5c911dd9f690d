//! Files, reports and the command line around [`dsaddle_core`].

pub use dsaddle_core as core;

pub mod blocks;
pub mod cli;
pub mod mm;
pub mod report;
