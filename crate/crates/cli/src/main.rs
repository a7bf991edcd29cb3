//! `isotrack`: run, verify, sweep and plot isoline-tracking scenarios.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 config error, 3 scenario
//! build error, 4 in-run abort, 5 infeasible under `--require-feasible`.

mod config;
mod output;
mod plot;
mod runner;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{read_table, set_dotted, RunConfig};
use runner::{simulate, verify, write_report, Failure, RunOptions, TRAJECTORY_FILE};

#[derive(Parser)]
#[command(
    name = "isotrack",
    version,
    about = "Sliding-mode tracking of moving isolines by a unicycle"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Seed for a random start drawn from the start band; overrides `sim.seed`.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Simulate the closed loop and write the trajectory, summary and report.
    Run {
        #[command(flatten)]
        common: Common,
        /// Refuse to simulate when the verifier finds the tuning infeasible.
        #[arg(long)]
        require_feasible: bool,
        /// Log lambda, rho, kappa and omega at the robot.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Print the feasibility report for the configured scenario.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        require_feasible: bool,
    },
    /// Run the `[sweep]` grid in parallel, one directory per run.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        require_feasible: bool,
        #[arg(long)]
        diagnostics: bool,
    },
    /// Draw figures from a trajectory written by `run`.
    Plot {
        #[command(flatten)]
        common: Common,
        /// Trajectory CSV; defaults to the one in the output directory.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    let mut table = read_table(&common.config)?;
    if let Some(seed) = common.seed {
        set_dotted(&mut table, "sim.seed", toml::Value::Integer(seed as i64))?;
    }
    Ok(RunConfig::from_table(table)?)
}

fn cmd_run(common: &Common, opts: RunOptions) -> Result<(), Failure> {
    let cfg = load(common)?;
    let (v, s) = simulate(&cfg, &common.out, opts)?;
    println!(
        "{}: feasible {}, converged {}, first entry {}, in-band fraction {:.4}, final |d - d0| {:.3e}, stayed in zone {}",
        v.scenario.name,
        v.report.satisfied,
        s.converged,
        s.first_entry.map_or_else(|| "never".into(), |t| format!("{t} s")),
        s.in_band_fraction,
        s.final_error,
        s.stayed_in_zone
    );
    println!("wrote {}", common.out.display());
    Ok(())
}

fn cmd_verify(common: &Common, require_feasible: bool) -> Result<(), Failure> {
    let cfg = load(common)?;
    let v = verify(&cfg)?;
    print!("{}", v.report);
    write_report(&common.out, &v)?;
    if require_feasible && !v.report.satisfied {
        let keys = v
            .report
            .violations()
            .iter()
            .map(|k| k.to_string())
            .collect();
        return Err(Failure::Infeasible(keys));
    }
    Ok(())
}

fn cmd_sweep(common: &Common, opts: RunOptions) -> Result<(), Failure> {
    let table = read_table(&common.config)?;
    let runs = sweep::plan(table, common.seed)?;
    let rows = sweep::execute(&runs, &common.out, opts)?;
    let ok = rows.iter().filter(|r| r.exit_code == 0).count();
    let converged = rows.iter().filter(|r| r.converged == Some(true)).count();
    println!(
        "{} runs: {ok} completed, {converged} converged; table in {}",
        rows.len(),
        common.out.join("sweep.csv").display()
    );
    Ok(())
}

fn cmd_plot(common: &Common, input: Option<&Path>) -> Result<(), Failure> {
    let cfg = load(common)?;
    let scenario = cfg.build().map_err(Failure::Build)?;
    let input = input.map_or_else(|| common.out.join(TRAJECTORY_FILE), Path::to_path_buf);
    let rows = output::read_trajectory(&input)?;
    for f in plot::emit_plots(&rows, &scenario, &common.out)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.verb {
        Verb::Run {
            common,
            require_feasible,
            diagnostics,
        } => cmd_run(
            common,
            RunOptions {
                require_feasible: *require_feasible,
                diagnostics: *diagnostics,
            },
        ),
        Verb::Verify {
            common,
            require_feasible,
        } => cmd_verify(common, *require_feasible),
        Verb::Sweep {
            common,
            require_feasible,
            diagnostics,
        } => cmd_sweep(
            common,
            RunOptions {
                require_feasible: *require_feasible,
                diagnostics: *diagnostics,
            },
        ),
        Verb::Plot { common, input } => cmd_plot(common, input.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
