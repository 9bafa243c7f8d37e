use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use convex_boolean::theory::{classify_regime, ModelExponents};
use convex_boolean_cli::config::RawConfig;
use convex_boolean_cli::suites::{run_suite, Scale, SUITES};
use convex_boolean_cli::{plot, scan, CliError, Result};

#[derive(Parser)]
#[command(name = "convex-boolean", version, about = "Experiments on Boolean models with heavy-tailed convex grains")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output directory of scans.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Robust set, kappa, prefactor and regime of a tail index vector.
    Kappa(KappaArgs),
    /// Chemical distance between two Palm points over a grid of separations.
    DistanceScan(ConfigArgs),
    /// Boundary-reaching probability over a coupled intensity grid.
    ThetaScan(ConfigArgs),
    /// Run the oracle suites.
    Validate(ValidateArgs),
    /// Render a scan summary CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct KappaArgs {
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated tail indices; `inf` allowed.
    #[arg(long)]
    alpha: Option<String>,
    /// Grain volume is integrable.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    vol_l1: bool,
    /// Grain volume is square-integrable.
    #[arg(long)]
    vol_l2: bool,
    /// The first diameter has a finite d-th moment.
    #[arg(long)]
    d1_ld: bool,
    /// Take indices and moment flags from the family of a config file.
    #[arg(long, conflicts_with_all = ["d", "alpha"])]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config entry, `key=value`; repeatable.
    #[arg(long = "set")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Run only these suites; repeatable.
    #[arg(long)]
    suite: Vec<String>,
    /// Tolerance handed to the predicates under test.
    #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
    tolerance: f64,
}

#[derive(Args)]
struct PlotArgs {
    input: PathBuf,
    /// Defaults to the input path with an `.svg` extension.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load(args: &ConfigArgs, seed: Option<u64>) -> Result<convex_boolean_cli::config::ExperimentConfig> {
    let mut raw = match &args.config {
        Some(p) => RawConfig::from_file(p)?,
        None => RawConfig::default(),
    };
    for o in &args.overrides {
        raw.set_pair(o)?;
    }
    if let Some(s) = seed {
        raw.set("seed", &s.to_string())?;
    }
    raw.resolve()
}

fn kappa(args: &KappaArgs) -> Result<()> {
    let (d, alpha, l1, l2, dl) = match &args.config {
        Some(p) => {
            let cfg = RawConfig::from_file(p)?.resolve()?;
            let m = cfg.family.moment_flags();
            (cfg.family.dim(), cfg.family.tail_index_vector(), m.vol_l1, m.vol_l2, m.d1_ld)
        }
        None => {
            let d = args.d.ok_or_else(|| CliError::usage("--d is required"))?;
            let text = args.alpha.as_deref().ok_or_else(|| CliError::usage("--alpha is required"))?;
            let alpha = text
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad index '{s}'"))))
                .collect::<Result<Vec<_>>>()?;
            (d, alpha, args.vol_l1, args.vol_l2, args.d1_ld)
        }
    };
    let exp = ModelExponents::new(d, alpha)?;
    println!("{}", classify_regime(&exp, l1, l2, dl)?.to_json());
    Ok(())
}

/// Exit code 1 when a suite fails.
fn validate(args: &ValidateArgs, seed: u64) -> Result<bool> {
    let names: Vec<&str> = if args.suite.is_empty() {
        SUITES.to_vec()
    } else {
        for s in &args.suite {
            if !SUITES.contains(&s.as_str()) {
                return Err(CliError::usage(format!("unknown suite '{s}'; known: {}", SUITES.join(", "))));
            }
        }
        args.suite.iter().map(String::as_str).collect()
    };
    let scale = Scale::desk();
    let mut ok = true;
    println!("{:<10} {:>6} {:>8} {:>8} {:>8}  note", "suite", "result", "checks", "failures", "seconds");
    for name in names {
        let r = run_suite(name, &scale, seed, args.tolerance).expect("known suite");
        ok &= r.passed();
        println!(
            "{:<10} {:>6} {:>8} {:>8} {:>8.2}  {}",
            r.name,
            if r.passed() { "PASS" } else { "FAIL" },
            r.checks,
            r.failures,
            r.seconds,
            r.note
        );
    }
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Kappa(a) => kappa(a).map(|_| true),
        Command::DistanceScan(a) => {
            let cfg = load(a, cli.seed)?;
            let s = scan::distance_scan(&cfg)?;
            scan::write_distance_scan(&cfg, &s, &cli.out)?;
            Ok(true)
        }
        Command::ThetaScan(a) => {
            let cfg = load(a, cli.seed)?;
            let s = scan::theta_scan(&cfg)?;
            scan::write_theta_scan(&cfg, &s, &cli.out)?;
            Ok(true)
        }
        Command::Validate(a) => validate(a, cli.seed.unwrap_or(0)),
        Command::Plot(a) => {
            let text = std::fs::read_to_string(&a.input)
                .map_err(|e| CliError::usage(format!("{}: {e}", a.input.display())))?;
            let svg = plot::render(&text)?;
            let out = a.output.clone().unwrap_or_else(|| a.input.with_extension("svg"));
            std::fs::write(out, svg)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
