//! `sincsup` command-line interface: coefficient sampling, supremum
//! enclosures, discrete-proxy evaluation, Monte Carlo sweeps, scaling fits,
//! and built-in self-checks.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 I/O error,
//! 3 selfcheck failure. Every subcommand prints its resolved configuration
//! as `#`-prefixed lines on standard output before the payload, so outputs
//! stay self-describing yet machine-parseable.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sincsup::ensembles::Ensemble;
use sincsup::experiments::{self, ScalingFit, ScalingModel, TrialRecord, MODEL_ORDER};
use sincsup::selfcheck;
use sincsup::signal::{CoefficientVector, SincSeries};
use sincsup::supbound::{
    certified_supremum, default_epsilon, heuristic_supremum, heuristic_supremum_auto,
    DEFAULT_CELL_BUDGET,
};
use sincsup::{Error, Result};

#[derive(Parser)]
#[command(
    name = "sincsup",
    version,
    about = "Suprema of random shifted-sinc signals: certified enclosures, discrete proxies, and scaling sweeps"
)]
struct Cli {
    /// Worker threads for sweeps (0 = all available cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a coefficient vector and print it, one value per line
    Sample(SampleArgs),
    /// Compute a supremum enclosure for one signal (JSON on stdout)
    Sup(SupArgs),
    /// Evaluate the discrete proxy X/Y/Z for a coefficient vector (CSV)
    Proxy(ProxyArgs),
    /// Run a Monte Carlo sweep described by a config file
    Sweep(SweepArgs),
    /// Fit scaling models to sweep records (JSON on stdout)
    Fit(FitArgs),
    /// Run the built-in consistency suites
    Selfcheck,
}

#[derive(Args)]
struct EnsembleArgs {
    /// gaussian | rademacher | bounded_symmetric
    #[arg(long)]
    ensemble: Option<String>,
    /// Standard deviation (ensemble = gaussian)
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Magnitude bound M (ensemble = bounded_symmetric)
    #[arg(long, default_value_t = 1.0)]
    bound: f64,
    /// Mean-absolute-value floor m (ensemble = bounded_symmetric)
    #[arg(long, default_value_t = 0.5)]
    mean_abs_floor: f64,
    /// uniform | scaled_rademacher | two_point_mixture (ensemble = bounded_symmetric)
    #[arg(long, default_value = "uniform")]
    shape: String,
}

impl EnsembleArgs {
    fn build(&self) -> Result<Ensemble> {
        let kind = self
            .ensemble
            .as_deref()
            .ok_or_else(|| Error::validation("--ensemble is required"))?;
        match kind {
            "gaussian" => Ensemble::gaussian(self.sigma),
            "rademacher" => Ok(Ensemble::rademacher()),
            "bounded_symmetric" => {
                Ensemble::bounded_symmetric(self.bound, self.mean_abs_floor, self.shape.parse()?)
            }
            other => Err(Error::validation(format!(
                "unknown ensemble {other:?} (expected gaussian, rademacher, or bounded_symmetric)"
            ))),
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Vector length
    #[arg(long)]
    n: usize,
    /// Sampling seed (decimal or 0x-prefixed hex)
    #[arg(long, value_parser = parse_seed)]
    seed: u64,
    /// Also write the payload to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SupArgs {
    /// Read coefficients from a file (one per line, # comments allowed)
    #[arg(long)]
    coeffs_file: Option<PathBuf>,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Vector length (with --ensemble)
    #[arg(long)]
    n: Option<usize>,
    /// Sampling seed (with --ensemble)
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// certified | heuristic
    #[arg(long, default_value = "certified")]
    method: String,
    /// Enclosure tolerance (certified; omit for the per-instance default)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Branch-and-bound cell budget (certified)
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    cell_budget: usize,
    /// Scan density per unit interval (heuristic; 0 = automatic)
    #[arg(long, default_value_t = 0)]
    points_per_unit: usize,
    /// Also write the payload to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProxyArgs {
    /// Read coefficients from a file (one per line, # comments allowed)
    #[arg(long)]
    coeffs_file: PathBuf,
    /// Also write the payload to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file (flat key = value lines)
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Records CSV produced by `sweep`
    #[arg(long)]
    records: PathBuf,
    /// sqrt_log | loglog | sqrt_nlog | constant | auto
    #[arg(long, default_value = "auto")]
    model: String,
    /// Also write the payload to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| format!("bad 64-bit seed value {s:?}"))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Io { .. } => 2,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sample(args) => run_sample(args),
        Command::Sup(args) => run_sup(args),
        Command::Proxy(args) => run_proxy(args),
        Command::Sweep(args) => run_sweep(args, cli.threads),
        Command::Fit(args) => run_fit(args),
        Command::Selfcheck => run_selfcheck(),
    }
}

/// Prints the payload to stdout and mirrors it to `--out` when given.
fn emit(payload: &str, out: Option<&Path>) -> Result<()> {
    print!("{payload}");
    if let Some(path) = out {
        std::fs::write(path, payload).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn float_line(v: f64) -> String {
    format!("{v:.16e}")
}

fn run_sample(args: SampleArgs) -> Result<i32> {
    let ensemble = args.ensemble.build()?;
    println!("# ensemble = {ensemble}");
    println!("# n = {}", args.n);
    println!("# seed = {}", args.seed);
    let a = ensemble.sample(args.n, args.seed)?;
    let mut payload = String::with_capacity(a.len() * 26);
    for &v in a.values() {
        payload.push_str(&float_line(v));
        payload.push('\n');
    }
    emit(&payload, args.out.as_deref())?;
    Ok(0)
}

/// Coefficient files are one float per line; blank lines and `#` comments
/// are skipped, so `sample` output (including its header) reads back in.
fn read_coeffs(path: &Path) -> Result<CoefficientVector> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            Error::validation(format!(
                "{}: line {} is not a number: {raw:?}",
                path.display(),
                idx + 1
            ))
        })?;
        values.push(v);
    }
    CoefficientVector::new(values)
}

fn run_sup(args: SupArgs) -> Result<i32> {
    let coefficients = match (&args.coeffs_file, &args.ensemble.ensemble) {
        (Some(_), Some(_)) => {
            return Err(Error::validation(
                "--coeffs-file and --ensemble are mutually exclusive",
            ))
        }
        (Some(path), None) => {
            let a = read_coeffs(path)?;
            println!("# coefficients = file {} (n = {})", path.display(), a.len());
            a
        }
        (None, Some(_)) => {
            let ensemble = args.ensemble.build()?;
            let n = args.n.ok_or_else(|| Error::validation("--n is required with --ensemble"))?;
            let seed =
                args.seed.ok_or_else(|| Error::validation("--seed is required with --ensemble"))?;
            println!("# coefficients = ensemble {ensemble}, n = {n}, seed = {seed}");
            ensemble.sample(n, seed)?
        }
        (None, None) => {
            return Err(Error::validation("either --coeffs-file or --ensemble is required"))
        }
    };

    let max_abs = coefficients.max_abs();
    let series = SincSeries::new(coefficients);
    let est = match args.method.as_str() {
        "certified" => {
            let (eps, how) = match args.epsilon {
                Some(e) => (e, String::new()),
                None => (default_epsilon(max_abs), " (default, scaled to max|a|)".to_owned()),
            };
            println!("# method = certified");
            println!("# epsilon = {eps}{how}");
            println!("# cell_budget = {}", args.cell_budget);
            certified_supremum(&series, eps, args.cell_budget)?
        }
        "heuristic" => {
            if args.epsilon.is_some() {
                return Err(Error::validation("--epsilon applies only to --method certified"));
            }
            println!("# method = heuristic");
            match args.points_per_unit {
                0 => {
                    println!("# points_per_unit = 0 (automatic escalation)");
                    heuristic_supremum_auto(&series)?
                }
                p => {
                    println!("# points_per_unit = {p}");
                    heuristic_supremum(&series, p)?
                }
            }
        }
        other => {
            return Err(Error::validation(format!(
                "unknown method {other:?} (expected certified or heuristic)"
            )))
        }
    };

    let mut payload =
        serde_json::to_string_pretty(&est).expect("supremum estimates always serialize");
    payload.push('\n');
    emit(&payload, args.out.as_deref())?;
    Ok(0)
}

fn run_proxy(args: ProxyArgs) -> Result<i32> {
    let a = read_coeffs(&args.coeffs_file)?;
    println!("# coefficients = file {} (n = {})", args.coeffs_file.display(), a.len());
    let vectors = sincsup::discrete::proxy_via_convolution(&a);
    let mut payload = String::with_capacity(a.len() * 80 + 10);
    payload.push_str("k,x,y,z\n");
    for k in 0..a.len() {
        payload.push_str(&format!(
            "{},{},{},{}\n",
            k + 1,
            float_line(vectors.x[k]),
            float_line(vectors.y[k]),
            float_line(vectors.z[k]),
        ));
    }
    emit(&payload, args.out.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    records: usize,
    csv: &'a Path,
    json: &'a Path,
    fits: &'a [ScalingFit],
}

fn run_sweep(args: SweepArgs, threads: usize) -> Result<i32> {
    let config = experiments::load_config(&args.config)?;
    println!("# config = {}", args.config.display());
    println!("# ensemble = {}", config.ensemble);
    let grid: Vec<String> = config.n_grid.iter().map(|n| n.to_string()).collect();
    println!("# n_grid = {}", grid.join(", "));
    println!("# trials_per_n = {}", config.trials_per_n);
    println!("# master_seed = {}", config.master_seed);
    match config.sup_method {
        experiments::SupMethod::Certified { epsilon, cell_budget } => match epsilon {
            Some(e) => println!("# sup_method = certified (epsilon = {e}, cell_budget = {cell_budget})"),
            None => println!(
                "# sup_method = certified (per-instance default epsilon, cell_budget = {cell_budget})"
            ),
        },
        experiments::SupMethod::Heuristic { points_per_unit: 0 } => {
            println!("# sup_method = heuristic (automatic density)")
        }
        experiments::SupMethod::Heuristic { points_per_unit } => {
            println!("# sup_method = heuristic (points_per_unit = {points_per_unit})")
        }
    }
    println!("# signal_family = {}", config.signal_family);
    println!("# output_path = {}", config.output_path.display());
    if threads == 0 {
        println!("# threads = all available");
    } else {
        println!("# threads = {threads}");
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::validation(format!("cannot build thread pool: {e}")))?;
    let started = std::time::Instant::now();
    let output = pool.install(|| experiments::run_sweep_and_export(&config))?;
    eprintln!("sweep finished in {:.1} s", started.elapsed().as_secs_f64());

    let summary = SweepSummary {
        records: output.records.len(),
        csv: &output.csv_path,
        json: &output.json_path,
        fits: &output.fits,
    };
    let mut payload =
        serde_json::to_string_pretty(&summary).expect("sweep summaries always serialize");
    payload.push('\n');
    print!("{payload}");
    Ok(0)
}

fn fit_points(records: &[TrialRecord]) -> Result<Vec<(usize, f64)>> {
    let mut levels: Vec<usize> = records.iter().map(|r| r.n).collect();
    levels.sort_unstable();
    levels.dedup();
    levels
        .into_iter()
        .map(|n| experiments::aggregate(records, n).map(|(mean, _, _)| (n, mean)))
        .collect()
}

#[derive(Serialize)]
struct AutoFit {
    candidates: Vec<ScalingFit>,
    selected: ScalingFit,
}

fn run_fit(args: FitArgs) -> Result<i32> {
    let records = experiments::read_records_csv(&args.records)?;
    println!("# records = {} ({} rows)", args.records.display(), records.len());
    println!("# model = {}", args.model);
    let points = fit_points(&records)?;

    let payload = if args.model == "auto" {
        let candidates: Vec<ScalingFit> = MODEL_ORDER
            .iter()
            .map(|&m| experiments::fit_scaling(&points, m))
            .collect::<Result<_>>()?;
        let selected = experiments::select_model(&candidates)?;
        serde_json::to_string_pretty(&AutoFit { candidates, selected })
    } else {
        let model: ScalingModel = args.model.parse()?;
        serde_json::to_string_pretty(&experiments::fit_scaling(&points, model)?)
    }
    .expect("fits always serialize");
    emit(&format!("{payload}\n"), args.out.as_deref())?;
    Ok(0)
}

fn run_selfcheck() -> Result<i32> {
    println!("# suites = sign-expectation-oracle, enclosure-vs-dense-grid, derivative-consistency");
    println!("# deterministic = true (fixed internal seeds)");
    let results = selfcheck::run_all();
    let mut all_ok = true;
    for suite in &results {
        if suite.passed() {
            println!("ok   {} ({} cases)", suite.name, suite.cases);
        } else {
            all_ok = false;
            println!(
                "FAIL {} ({} of {} cases): {}",
                suite.name, suite.failures, suite.cases, suite.detail
            );
        }
    }
    Ok(if all_ok { 0 } else { 3 })
}
