//! `lpfz`: batch front end for `lpfz-core`.
//!
//! Exit status is 0 when every check is consistent, 2 when a run finds a
//! numerical counterexample (the report is still written), and 1 on usage or
//! operational errors.

mod commands;
mod config;
mod output;
mod spec_file;

use std::process::ExitCode;

use anyhow::{Context, Result};

use crate::output::Status;

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("LPFZ_THREADS") else { return Ok(()) };
    let threads: usize = value.trim().parse().with_context(|| format!("LPFZ_THREADS={value:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let config = match config::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|()| commands::run(&config)) {
        Ok(Status::Consistent) => ExitCode::SUCCESS,
        Ok(Status::Falsified) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
