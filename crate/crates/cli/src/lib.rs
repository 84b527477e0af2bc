//! Library half of the `rflat` command: argument types, result records, the
//! on-disk cache and the subcommands.

pub mod args;
pub mod cache;
pub mod commands;
pub mod error;
pub mod output;
pub mod record;
