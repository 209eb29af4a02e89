//! One module per subcommand; each `run` returns the verdict (`Ok(true)`
//! for pass) or an error.

pub mod check;
pub mod estimates;
pub mod fundamental;
pub mod michlin;
pub mod oracle;
pub mod solve;
