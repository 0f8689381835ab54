use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use darboux::config::{Mode, RunConfig};
use darboux::run::{run, RunOptions};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Sigma,
    Grav,
    Ernst,
    Verify,
    SqrtDemo,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sigma => Mode::Sigma,
            ModeArg::Grav => Mode::Grav,
            ModeArg::Ernst => Mode::Ernst,
            ModeArg::Verify => Mode::Verify,
            ModeArg::SqrtDemo => Mode::SqrtDemo,
        }
    }
}

/// Explicit σ-model, gravitational and Ernst-type solutions by the GBDT
/// Bäcklund–Darboux transformation, with residual checks.
///
/// Exit status: 0 all checks passed, 1 invalid configuration or setup,
/// 2 singular points cost more than the coverage floor, 3 a check failed.
#[derive(Debug, Parser)]
#[command(name = "darboux", version)]
struct Cli {
    mode: ModeArg,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the field CSV and the JSON sidecar.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Validate the configuration and check the seed data only.
    #[arg(long)]
    seed_check_only: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let text = match fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            println!("RESULT fail NaN");
            return ExitCode::from(1);
        }
    };
    let cfg = match RunConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprint!("error: {e}");
            println!("RESULT fail NaN");
            return ExitCode::from(1);
        }
    };
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        seed_check_only: cli.seed_check_only,
    };
    let mode: Mode = cli.mode.into();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            println!("RESULT fail NaN");
            return ExitCode::from(1);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(mode, &cfg, &opts)) {
        Ok(outcome) => {
            for c in &outcome.report.checks {
                eprintln!(
                    "{:<26} {} max {:.3e} mean {:.3e} tol {:.1e} coverage {:.4}",
                    c.name,
                    if c.pass { "ok  " } else { "FAIL" },
                    c.max,
                    c.mean,
                    c.tolerance,
                    c.coverage
                );
            }
            if outcome.exit_code == 2 {
                eprintln!(
                    "error: field coverage {:.4} is below the floor {}",
                    outcome.field_coverage, cfg.tolerances.coverage_floor
                );
            }
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            for line in &outcome.stdout {
                println!("{line}");
            }
            println!("{}", outcome.result_line());
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprint!("error: {e}");
            if !e.to_string().ends_with('\n') {
                eprintln!();
            }
            println!("RESULT fail NaN");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
