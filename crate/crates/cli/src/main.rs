//! `zagier`: command-line driver for the zagier-core workbench.
//!
//! Exit codes: 0 success, 1 invalid input, 2 computation failure, failed
//! invariant or interruption.
#![allow(clippy::neg_cmp_op_on_partial_ord)]


mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::Parser;

use args::Cli;
use commands::{Ctx, Invalid};

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Invalid>().is_some() {
        return 1;
    }
    if let Some(e) = err.downcast_ref::<zagier_core::Error>() {
        use zagier_core::Error::*;
        return match e {
            Domain(_) | Pole(_) | InvalidDiscriminant(..) | Precondition(_) | Parse { .. } => 1,
            _ => 2,
        };
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let interrupted = Arc::new(AtomicBool::new(false));
    {
        let flag = interrupted.clone();
        // First Ctrl-C asks for a clean stop; a second one exits at once.
        let _ = ctrlc::set_handler(move || {
            if flag.swap(true, Ordering::SeqCst) {
                std::process::exit(2);
            }
            eprintln!("interrupt received, flushing partial output");
        });
    }
    let ctx = Ctx { global: cli.global, interrupted };
    match commands::run(&ctx, &cli.command) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: interrupted, output truncated");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
