//! Batch front end for the plchain engine: space files, reports and the commands.

pub mod commands;
pub mod format;
pub mod report;
pub mod verify;
