//! `harmlab` — apply grid operators to sampled functions, compute weight
//! diagnostics, run inequality verification suites and sharpness scans.
//! CSV in, CSV out.
//!
//! Exit codes are a stable contract: 0 on success, 1 when a verification
//! or input-validation check fails (reports are still written), 2 on usage
//! or configuration errors.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use harmlab::error::Error;
use harmlab::grid::{read_csv_file, write_csv_file, GridFunction, Weight};
use harmlab::maximal::{
    dyadic_m_delta, dyadic_maximal, hl_maximal, m_delta, m_squared, orlicz_maximal, sharp_maximal,
    sharp_maximal_delta, IntervalFamily,
};
use harmlab::orlicz::YoungFunction;
use harmlab::singular::{apply_kernel_operator, commutator_kernel_form, hilbert_kernel};
use harmlab::verify::{run_verification, sharpness_scan};
use harmlab::weights::WeightReport;

#[derive(Parser)]
#[command(
    name = "harmlab",
    version,
    about = "Discrete harmonic-analysis laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator to a sampled function and write the result.
    Op(OpArgs),
    /// Compute weight diagnostics (A_1, A_p, reverse Holder) for a sampled
    /// weight.
    Report(ReportArgs),
    /// Run the inequality suites listed in a config file.
    Verify { config: PathBuf },
    /// Fit growth exponents along an extremal family per a config file.
    Scan { config: PathBuf },
}

#[derive(clap::Args)]
struct OpArgs {
    /// Operator to apply.
    #[arg(long, value_enum)]
    kind: OpKind,
    /// Input samples (`x,value` CSV on a uniform grid).
    #[arg(long)]
    input: PathBuf,
    /// Symbol samples; required by the commutator, meaningless elsewhere.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Power for `Mr`.
    #[arg(long)]
    r: Option<f64>,
    /// Truncation power for `Md` / `Msharp`; omitted means the untruncated
    /// operator.
    #[arg(long)]
    delta: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpKind {
    /// Hardy-Littlewood maximal function.
    #[value(name = "M")]
    M,
    /// Dyadic maximal function.
    #[value(name = "Md")]
    Md,
    /// Sharp (oscillation) maximal function.
    #[value(name = "Msharp")]
    Msharp,
    /// Power-adjusted maximal function (M |f|^r)^{1/r}.
    #[value(name = "Mr")]
    Mr,
    /// Orlicz maximal function with the L log L gauge.
    #[value(name = "MLlogL")]
    MLlogL,
    /// Twice-iterated maximal function.
    #[value(name = "M2")]
    M2,
    /// Discrete Hilbert transform.
    #[value(name = "T")]
    T,
    /// Commutator [b, T] with the Hilbert kernel.
    #[value(name = "commutator")]
    Commutator,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// Weight samples (`x,value` CSV, strictly positive).
    #[arg(long)]
    input: PathBuf,
    /// Label for the report row; defaults to the input file stem.
    #[arg(long)]
    name: Option<String>,
    /// Exponents for the A_p columns.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.5, 2.0, 3.0])]
    p: Vec<f64>,
    /// Output CSV path.
    #[arg(long)]
    output: PathBuf,
}

/// Failures carry the exit code they map to.
enum Failure {
    /// Exit 2: the invocation or configuration is wrong.
    Usage(String),
    /// Exit 1: inputs parsed but a validation or verification check failed.
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Run(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Run(m) => m,
        }
    }
}

/// Core errors split by blame: unknown ids, family/spec mismatches, and
/// missing files are the caller's fault; numeric validation is the data's.
fn core_failure(e: Error) -> Failure {
    match e {
        Error::UnknownSpec(_) | Error::ArityMismatch { .. } | Error::Io(_) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Run(e.to_string()),
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Op(args) => cmd_op(args),
        Command::Report(args) => cmd_report(args),
        Command::Verify { config } => cmd_verify(&config),
        Command::Scan { config } => cmd_scan(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("harmlab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read_function(path: &Path) -> Result<GridFunction, Failure> {
    read_csv_file(path).map_err(core_failure)
}

/// Reject a flag that the chosen operator does not consume, so a typo'd
/// invocation never silently computes something else.
fn deny_flag<T>(value: &Option<T>, flag: &str, uses: &str) -> Result<(), Failure> {
    if value.is_some() {
        return Err(usage(format!("{flag} only applies to --kind {uses}")));
    }
    Ok(())
}

fn cmd_op(args: OpArgs) -> Result<(), Failure> {
    if args.kind != OpKind::Commutator {
        deny_flag(&args.b, "--b", "commutator")?;
    }
    if args.kind != OpKind::Mr {
        deny_flag(&args.r, "--r", "Mr")?;
    }
    if !matches!(args.kind, OpKind::Md | OpKind::Msharp) {
        deny_flag(&args.delta, "--delta", "Md or Msharp")?;
    }

    let f = read_function(&args.input)?;
    let result = match args.kind {
        OpKind::M => hl_maximal(&f),
        OpKind::Md => match args.delta {
            Some(d) => dyadic_m_delta(&f, d).map_err(core_failure)?,
            None => dyadic_maximal(&f).map_err(core_failure)?,
        },
        OpKind::Msharp => match args.delta {
            Some(d) => sharp_maximal_delta(&f, d, IntervalFamily::All).map_err(core_failure)?,
            None => sharp_maximal(&f),
        },
        OpKind::Mr => {
            let r = args
                .r
                .ok_or_else(|| usage("--kind Mr requires --r".to_string()))?;
            m_delta(&f, r).map_err(core_failure)?
        }
        OpKind::MLlogL => orlicz_maximal(&f, &YoungFunction::l_log_l()).map_err(core_failure)?,
        OpKind::M2 => m_squared(&f),
        OpKind::T => apply_kernel_operator(&hilbert_kernel(), &f),
        OpKind::Commutator => {
            let b_path = args
                .b
                .ok_or_else(|| usage("--kind commutator requires --b".to_string()))?;
            let b = read_function(&b_path)?;
            commutator_kernel_form(&b, &hilbert_kernel(), &f).map_err(core_failure)?
        }
    };
    write_csv_file(&result, &args.output).map_err(core_failure)?;
    println!("wrote {} ({} cells)", args.output.display(), result.len());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    let samples = read_function(&args.input)?;
    let w = Weight::new(samples).map_err(core_failure)?;
    let name = match &args.name {
        Some(n) => n.clone(),
        None => args
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "weight".to_string()),
    };
    let report = WeightReport::compute(&name, &w, &args.p).map_err(core_failure)?;
    let csv = format!(
        "{}\n{}\n",
        WeightReport::csv_header(&args.p),
        report.csv_row()
    );
    fs::write(&args.output, csv).map_err(|e| usage(format!("{}: {e}", args.output.display())))?;
    println!(
        "{name}: a1={:.6e} rw={:.6} rh_ok={}",
        report.a1, report.reverse_holder_exponent, report.reverse_holder_ok
    );
    println!("wrote {}", args.output.display());
    Ok(())
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_output(dir: &Path, file: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let path = dir.join(file);
    fs::write(&path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(path: &Path) -> Result<(), Failure> {
    let cfg = config::load_verify(&read_config(path)?).map_err(usage)?;
    let mut reports = Vec::with_capacity(cfg.ids.len());
    for id in &cfg.ids {
        let report = run_verification(id, &cfg.family, &cfg.grid, &cfg.kernel, &cfg.sweep)
            .map_err(core_failure)?;
        reports.push(report);
    }

    let mut csv = String::from("spec_id,param_point,lhs,rhs,ratio\n");
    for report in &reports {
        // Per-report csv() repeats the header; keep a single one here.
        let body = report.csv();
        csv.push_str(body.split_once('\n').map(|(_, b)| b).unwrap_or(""));
    }
    write_output(&cfg.out_dir, "report.csv", &csv)?;

    for report in &reports {
        println!();
        print!("{}", report.summary());
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.id.as_str())
        .collect();
    if failed.is_empty() {
        println!("\nall {} suite(s) passed", reports.len());
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "verification failed for: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_scan(path: &Path) -> Result<(), Failure> {
    let cfg = config::load_scan(&read_config(path)?).map_err(usage)?;
    let mut reports = Vec::with_capacity(cfg.ids.len());
    for id in &cfg.ids {
        let report =
            sharpness_scan(id, &cfg.family, &cfg.grid, &cfg.kernel).map_err(core_failure)?;
        reports.push(report);
    }

    let mut csv = String::from("delta,a1,p,lhs_norm_ratio,fitted_exponent\n");
    for report in &reports {
        let body = report.csv();
        csv.push_str(body.split_once('\n').map(|(_, b)| b).unwrap_or(""));
    }
    write_output(&cfg.out_dir, "scan.csv", &csv)?;

    for report in &reports {
        println!(
            "{}: exponent={:.4} r2={:.4} degenerate={} rows={}",
            report.id,
            report.fit.exponent,
            report.fit.r_squared,
            report.fit.degenerate,
            report.rows.len()
        );
    }
    Ok(())
}
