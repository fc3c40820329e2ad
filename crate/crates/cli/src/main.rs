//! `trace-shape --config experiment.cfg --out results/`
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad configuration,
//! 3 infeasible or empty admissible class, 4 some solve did not converge
//! (outputs are still written).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod run;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use trace_shape_core::Error;

use crate::validate::Finding;

#[derive(Parser, Debug)]
#[command(name = "trace-shape", version, about = "Trace constants with optimal vanishing windows and holes")]
struct Args {
    /// Experiment file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write plot.svg when the command has a plot.
    #[arg(long)]
    plot: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Check the configuration, print the findings as JSON and exit.
    #[arg(long)]
    validate: bool,
}

fn findings_json(f: &[Finding]) -> serde_json::Value {
    f.iter().map(|f| json!({"code": f.code, "message": f.message, "fatal": f.fatal})).collect()
}

fn fail(code: u8, kind: &str, message: String) -> ExitCode {
    eprintln!("{}", json!({"error": kind, "message": message}));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(2, "config", format!("{}: {e}", args.config.display())),
    };
    let mut cfg = match config::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(2, "config", e.to_string()),
    };
    if let Some(seed) = args.seed {
        cfg.solver.seed = seed;
    }

    let findings = validate::validate(&cfg);
    let fatal = findings.iter().any(|f| f.fatal);
    if args.validate {
        println!("{}", serde_json::to_string_pretty(&findings_json(&findings)).expect("plain JSON"));
        return ExitCode::from(if fatal { 2 } else { 0 });
    }
    if fatal {
        eprintln!("{}", json!({"error": "config", "findings": findings_json(&findings)}));
        return ExitCode::from(2);
    }

    if let Some(n) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(1, "runtime", e.to_string());
        }
    }

    let mut out = match run::run(&cfg) {
        Ok(o) => o,
        Err(e @ (Error::Infeasible(_) | Error::EmptyAdmissible(_))) => return fail(3, "infeasible", e.to_string()),
        Err(e) => return fail(1, "runtime", e.to_string()),
    };
    for f in &findings {
        eprintln!("warning: {}", f.message);
        out.log.insert(1, format!("warning: {}", f.message));
    }
    if let Err(e) = out.write(&args.out, args.plot) {
        return fail(1, "io", e.to_string());
    }
    if out.all_converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}", json!({"warning": "not converged", "message": "at least one solve hit max_iters"}));
        ExitCode::from(4)
    }
}
