// SPDX-License-Identifier: Apache-2.0

//! File formats, reports and the command-line driver for `xbarsim-core`.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod report;

pub use error::{CliError, Result};
pub use xbarsim_core as core;
