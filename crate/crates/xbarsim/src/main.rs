// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

use clap::Parser;
use xbarsim::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let xbarsim::CliError::Model(xbarsim::core::Error::Infeasible { cluster, violations }) = &e {
                for v in violations {
                    eprintln!("  cluster {cluster}: {} -> {} ({}) at {}", v.pre, v.post, v.state, v.cell);
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
