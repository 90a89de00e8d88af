//! File formats and error classes shared by the `choimap` binary and its
//! integration tests.

pub mod error;
pub mod files;
