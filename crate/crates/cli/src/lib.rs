//! Configuration, input resolution and output writing behind the `bcl`
//! binary.

pub mod commands;
pub mod config;
pub mod inputs;
pub mod output;
