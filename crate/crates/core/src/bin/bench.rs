//! Command-line front end: run an experiment grid, aggregate results, audit
//! the theory and check gradients.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cs_reject::audit::{run_all, AuditSizes};
use cs_reject::baselines::BendSlope;
use cs_reject::gradcheck::run_suite;
use cs_reject::harness::{
    aggregate, read_rows_csv, run_grid_resume, write_rows_csv, write_summary_csv, DatasetSpec, GridSpec, MethodId,
    ModelChoice, Setting,
};

#[derive(Parser)]
#[command(name = "bench", about = "Classification-with-rejection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate every cell of a grid and write one CSV row per cell.
    Run(RunArgs),
    /// Collapse trials into mean and standard error per cell.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Multiply metrics by 100.
        #[arg(long)]
        percent: bool,
    },
    /// Randomised checks of the oracles and excess-risk bounds.
    Audit {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        oracle_cases: usize,
        #[arg(long, default_value_t = 1_000)]
        calibration_cases: usize,
        #[arg(long, default_value_t = 10_000)]
        excess_cases: usize,
    },
    /// Finite-difference checks of every loss gradient.
    Gradcheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// `twonorm` or a path to a CSV file whose last column is the label.
    #[arg(long, value_delimiter = ',', default_value = "twonorm")]
    dataset: Vec<String>,
    /// Treat the first CSV line as a header.
    #[arg(long)]
    csv_header: bool,
    #[arg(long, value_delimiter = ',', default_value = "cs-sigmoid,cs-hinge,sce,defer,angle")]
    methods: Vec<String>,
    #[arg(long, default_value = "clean")]
    setting: String,
    /// `start:stop:step`, inclusive, or a comma-separated list.
    #[arg(long, default_value = "0.1:0.4:0.05")]
    costs: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.25)]
    noise_rate: f64,
    #[arg(long, default_value_t = 0.7)]
    prior: f64,
    /// `auto`, `linear` or `mlp`.
    #[arg(long, default_value = "auto")]
    model: String,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    /// Use the second ANGLE bend slope.
    #[arg(long)]
    angle_a2: bool,
    /// Record wall-clock training time.
    #[arg(long)]
    timing: bool,
    /// Keep rows already present in the output file and only run the rest.
    #[arg(long)]
    resume: bool,
    #[arg(long)]
    out: PathBuf,
}

fn parse_costs(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad cost `{t}`"));
    if parts.len() == 3 {
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 {
            return Err("cost step must be positive".into());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // Rounded to 12 decimals so 0.1 + 5 * 0.05 prints as 0.35.
        Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

fn run(args: RunArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let datasets = args
        .dataset
        .iter()
        .map(|d| {
            if d == "twonorm" {
                DatasetSpec::twonorm()
            } else {
                DatasetSpec::csv(d, args.csv_header)
            }
        })
        .collect();
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<MethodId>())
        .collect::<Result<Vec<_>, _>>()?;
    let grid = GridSpec {
        datasets,
        methods,
        costs: parse_costs(&args.costs)?,
        trials: args.trials,
        setting: args.setting.parse::<Setting>()?,
        master_seed: args.seed,
        noise_rate: args.noise_rate,
        prior: args.prior,
        model: args.model.parse::<ModelChoice>()?,
        epochs: args.epochs,
        angle_slope: if args.angle_a2 { BendSlope::A2 } else { BendSlope::A1 },
        timing: args.timing,
        ..GridSpec::default()
    };
    let existing = if args.resume && args.out.exists() {
        read_rows_csv(&args.out)?
    } else {
        Vec::new()
    };
    let rows = run_grid_resume(&grid, &existing)?;
    write_rows_csv(&rows, &args.out)?;
    let flagged: Vec<_> = rows.iter().filter(|r| r.flag.is_some()).collect();
    for r in &flagged {
        eprintln!(
            "flagged: {} {} c={} trial {}: {}",
            r.dataset,
            r.method,
            r.cost,
            r.trial,
            r.flag.as_deref().unwrap_or_default()
        );
    }
    eprintln!("{} rows written to {}", rows.len(), args.out.display());
    Ok(flagged.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool, Box<dyn std::error::Error>> = match cli.command {
        Command::Run(args) => run(args),
        Command::Aggregate { input, out, percent } => read_rows_csv(&input)
            .and_then(|rows| {
                let s = aggregate(&rows);
                write_summary_csv(&s, if percent { 100.0 } else { 1.0 }, &out)?;
                Ok(s.iter().all(|g| !g.single))
            })
            .map_err(Into::into),
        Command::Audit {
            seed,
            oracle_cases,
            calibration_cases,
            excess_cases,
        } => {
            let sizes = AuditSizes {
                oracle: oracle_cases,
                calibration: calibration_cases,
                excess: excess_cases,
            };
            let lines = run_all(sizes, seed);
            for l in &lines {
                println!("{:<20} {}  {}", l.name, if l.passed { "PASS" } else { "FAIL" }, l.detail);
            }
            Ok(lines.iter().all(|l| l.passed))
        }
        Command::Gradcheck { seed } => {
            let checks = run_suite(seed);
            for c in &checks {
                println!(
                    "{:<28} {}  max rel err {:.2e} ({} checked, {} at kinks)",
                    c.name,
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.max_rel_err,
                    c.checked,
                    c.skipped
                );
            }
            Ok(checks.iter().all(|c| c.passed()))
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
