use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use aniso_lp::norms::{besov_norm, x_norms, AnisoBesovIndex};
use aniso_lp::pressure::{pressure_solve, pressure_terms};
use aniso_lp::solver::{initial_data, run, RunConfig, Verdict};
use aniso_lp::verify::{eps_sweep, report_dir, run_suites, write_report, Suite, SuiteOptions};
use aniso_lp::Error;

const PASS: u8 = 0;
const SUITE_FAILED: u8 = 1;
const CONFIG_ERROR: u8 = 2;
const HALTED: u8 = 3;

#[derive(Parser)]
#[command(name = "aniso-lp", version, about = "Anisotropic Littlewood-Paley checks and rescaled Navier-Stokes runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (reports go to ANISO_LP_REPORT_DIR when set).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Thread limit for concurrent suites and sweep members.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Exit 3 when a run halts before t_end.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run inequality suites.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Integrate one configuration.
    Run(ConfigArgs),
    /// Run one configuration over several eps.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
    },
    /// Data norms of the configured initial data.
    Norms(ConfigArgs),
    /// Solve the pressure equation for the configured initial data.
    PressureCheck(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// `key=value` override with a JSON value; dotted keys reach nested fields.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        let config = matches!(
            e.downcast_ref::<Error>(),
            Some(
                Error::InvalidGrid(_)
                    | Error::InvalidParameter(_)
                    | Error::Precondition(_)
                    | Error::Json(_)
                    | Error::PhaseOverflow(_)
                    | Error::GridMismatch
                    | Error::ComponentMismatch { .. }
            )
        ) || e.downcast_ref::<std::io::Error>().is_some()
            || e.downcast_ref::<serde_json::Error>().is_some();
        if config {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn resolve(args: &ConfigArgs, seed: Option<u64>) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg: RunConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.config.display()))?;
    for o in &args.overrides {
        cfg.set(o)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn verify(cli: &Cli, suite: &str, grid: Option<usize>, trials: Option<usize>) -> Result<u8, Failure> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let opts = SuiteOptions {
        grid,
        trials,
        seed: cli.seed.unwrap_or(1),
        ..SuiteOptions::default()
    };
    let root = report_dir(&cli.out);
    let reports = run_suites(&suites, &opts, cli.jobs)?;
    let mut code = PASS;
    for r in &reports {
        let path = write_report(&root, &r.suite, "suite", Some(r.pass), r)?;
        eprintln!(
            "{}: {} (max {:.4e}, median {:.4e}) -> {}",
            r.suite,
            if r.pass { "pass" } else { "FAIL" },
            r.max_ratio,
            r.median_ratio,
            path.display()
        );
        if !r.pass {
            code = SUITE_FAILED;
        }
    }
    Ok(code)
}

fn run_one(cli: &Cli, args: &ConfigArgs) -> Result<u8, Failure> {
    let mut cfg = resolve(args, cli.seed)?;
    cfg.output = Some(cli.out.clone());
    let out = run(&cfg)?;
    eprintln!(
        "{:?} at t = {} after {} steps; max theta {:.4e}, max Psi {:.4e}",
        out.verdict.verdict, out.verdict.t_halt, out.summary.steps, out.summary.max_theta, out.summary.max_psi
    );
    Ok(if cli.strict && out.verdict.verdict != Verdict::Completed {
        HALTED
    } else {
        PASS
    })
}

fn sweep(cli: &Cli, args: &ConfigArgs, eps: &[f64]) -> Result<u8, Failure> {
    let mut cfg = resolve(args, cli.seed)?;
    write_json(&cli.out.join("config.json"), &cfg)?;
    cfg.output = Some(cli.out.join("sweep"));
    let report = eps_sweep(&cfg, eps, cli.jobs)?;
    let path = write_report(&report_dir(&cli.out), "sweep", "sweep", Some(report.pass), &report)?;
    match report.slope {
        Some(s) => eprintln!("slope {s:.4} (gamma {}) -> {}", report.gamma, path.display()),
        None => eprintln!("slope undefined (degenerate sweep) -> {}", path.display()),
    }
    let halted = report.runs.iter().any(|r| r.verdict != Verdict::Completed);
    Ok(if cli.strict && halted {
        HALTED
    } else if !report.degenerate && !report.pass {
        SUITE_FAILED
    } else {
        PASS
    })
}

fn norms(cli: &Cli, args: &ConfigArgs) -> Result<u8, Failure> {
    let cfg = resolve(args, cli.seed)?;
    write_json(&cli.out.join("config.json"), &cfg)?;
    let (a0, v0) = initial_data(&cfg.grid()?, &cfg.a0, &cfg.v0, cfg.seed)?;
    let x = x_norms(&a0, &v0, cfg.delta, cfg.params.gamma)?;
    let g = cfg.params.gamma;
    let indices = [
        AnisoBesovIndex::new(1.0, 0.5),
        AnisoBesovIndex::new(1.0 - g, 0.5 + g),
        AnisoBesovIndex::new(1.0 + g, 0.5 - g),
        AnisoBesovIndex::new(0.0, 0.5),
    ];
    let besov: Vec<_> = indices
        .iter()
        .map(|i| json!({ "sigma": i.sigma, "s": i.s, "a0": besov_norm(&a0, *i), "v0": besov_norm(&v0, *i) }))
        .collect();
    let doc = json!({
        "x_norms": x,
        "besov": besov,
        "a0_l2": a0.l2_norm(),
        "v0_l2": v0.l2_norm(),
    });
    write_json(&cli.out.join("norms.json"), &doc)?;
    eprintln!("X1 {:.4e}, X2 {:.4e}, X3 {:.4e}", x.x1, x.x2, x.x3);
    Ok(PASS)
}

fn pressure_check(cli: &Cli, args: &ConfigArgs) -> Result<u8, Failure> {
    let cfg = resolve(args, cli.seed)?;
    write_json(&cli.out.join("config.json"), &cfg)?;
    let (a0, v0) = initial_data(&cfg.grid()?, &cfg.a0, &cfg.v0, cfg.seed)?;
    let sol = pressure_solve(&a0, &v0, &cfg.params, &cfg.pressure)?;
    let t = pressure_terms(&a0, &v0, &sol.q, &cfg.params)?;
    let recon = (&t.sum() - &sol.q).l2_norm();
    let doc = json!({
        "iters": sol.iters,
        "residual": sol.residual,
        "history": sol.history,
        "q_l2": sol.q.l2_norm(),
        "terms_l2": {
            "q1": t.q1.l2_norm(), "q2": t.q2.l2_norm(), "q3": t.q3.l2_norm(),
            "q4": t.q4.l2_norm(), "q5": t.q5.l2_norm(),
            "q51": t.q51.l2_norm(), "q52": t.q52.l2_norm(),
            "q53": t.q53.l2_norm(), "q54": t.q54.l2_norm(),
        },
        "reconstruction_error": recon,
    });
    write_json(&cli.out.join("pressure_check.json"), &doc)?;
    eprintln!("pressure converged in {} iterations, residual {:.3e}", sol.iters, sol.residual);
    Ok(PASS)
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Verify { suite, grid, trials } => verify(cli, suite, *grid, *trials),
        Command::Run(args) => run_one(cli, args),
        Command::Sweep { config, eps } => sweep(cli, config, eps),
        Command::Norms(args) => norms(cli, args),
        Command::PressureCheck(args) => pressure_check(cli, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { CONFIG_ERROR } else { PASS });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(HALTED)
        }
    }
}
