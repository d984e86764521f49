//! Configuration, execution and verification machinery behind the
//! `radiance` binary.

pub mod config;
pub mod run;
pub mod verify;
