// SPDX-License-Identifier: Apache-2.0

//! `arithgame`: generate, search, verify, evaluate and export prefix adders
//! and compressor-tree multipliers.

mod args;
mod commands;
mod config;
mod design;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::OptimizeAdder(a) => commands::optimize_adder(&a),
        Command::OptimizeMultiplier(a) => commands::optimize_multiplier(&a),
        Command::EmitVerilog(a) => commands::emit_verilog(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Pareto(a) => commands::pareto(&a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_config(std::env::args_os().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
