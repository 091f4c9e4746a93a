//! Command-line front end: solve the two reduced equations and write orbit
//! artifacts, build curvature reports, tabulate the period map, and run the
//! aggregated certification suite.
//!
//! # Exit codes
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (for `verify`: every check passed) |
//! | 1 | `verify` ran to completion but at least one check failed |
//! | 2 | command-line or parameter validation error |
//! | 3 | requested period at or below the small-oscillation limit |
//! | 4 | energy outside the closed-orbit window |
//! | 5 | solver failure (root finding, integration, quadrature, orbit validation) |
//! | 6 | geometry failure (positivity, periodicity, chart domain, certificates) |
//! | 7 | artifact input/output failure |
//!
//! # Artifacts
//!
//! Commands that write files take `--out`. When it is omitted, a fixed
//! default name is used, placed in the directory named by the
//! `PSEUDOCYL_OUT_DIR` environment variable (created if needed) or in the
//! working directory. Floats in artifacts carry 17 significant digits and
//! nothing embeds timestamps, so identical invocations of the same build
//! produce byte-identical files and stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pseudocyl::conformal::{
    harmonicity_certificate, oracle_cross_check, ConformalCylinderMetric, CurvatureReport,
    GridSpec, OracleComparison, CROSS_CHECK_SEED,
};
use pseudocyl::derdzinski::DerdzinskiSystem;
use pseudocyl::fowler::FowlerSystem;
use pseudocyl::io::{self, OrbitHeader};
use pseudocyl::orbit::{OneDofSystem, OrbitFamily, PeriodicOrbit};
use pseudocyl::periodic::PeriodicScalar;
use pseudocyl::verify;
use pseudocyl::{Error, Result};

/// Version tag carried by every JSON payload this binary prints.
const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "pseudocyl",
    version,
    about = "Curvature certification toolkit for conformally-cylindrical and warped-product metrics",
    long_about = "Solve the two reduced equations, export orbits as CSV + JSON artifacts, build \
                  curvature reports, tabulate the period map, and run the aggregated \
                  certification suite.\n\nExit codes: 0 success; 1 verification failure; \
                  2 invalid parameters; 3 period at or below the small-oscillation limit; \
                  4 energy outside the closed-orbit window; 5 solver failure; 6 geometry \
                  failure; 7 artifact I/O failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the conformal-factor equation at a prescribed circle length and
    /// write the orbit artifacts.
    SolveFowler(SolveFowlerArgs),
    /// Solve the warp equation at a relative energy inside the closed-orbit
    /// window and write the orbit artifacts.
    SolveDerdzinski(SolveDerdzinskiArgs),
    /// Build the curvature report of a conformally-cylindrical metric:
    /// certificates, Weyl sweep, and closed-form vs oracle comparison.
    CurvatureReport(CurvatureReportArgs),
    /// Tabulate the period map over an energy grid.
    PeriodTable(PeriodTableArgs),
    /// Run the aggregated certification suite and report per-check verdicts.
    Verify(VerifyArgs),
}

/// What a command prints to stdout.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// JSON summary or report.
    Json,
    /// The command's CSV artifact.
    Csv,
}

#[derive(Args)]
struct SolveFowlerArgs {
    /// Total dimension (at least 3).
    #[arg(long)]
    n: u32,
    /// Requested circle length; must exceed the small-oscillation limit
    /// 2*pi/sqrt(n-2).
    #[arg(long)]
    period: f64,
    /// Output stem: writes <stem>.csv and <stem>.json
    /// [default: fowler-orbit, placed per PSEUDOCYL_OUT_DIR].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout payload.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SolveDerdzinskiArgs {
    /// Fiber parameter of the warp equation (at least 3).
    #[arg(long)]
    m: u32,
    /// Fiber scalar curvature (positive).
    #[arg(long = "R")]
    fiber_scalar: f64,
    /// Linear coefficient (positive).
    #[arg(long = "C")]
    stiffness: f64,
    /// Relative position inside the closed-orbit window: 0 is the well
    /// bottom (excluded), 1 the escape threshold (excluded).
    #[arg(long)]
    energy_offset: f64,
    /// Output stem: writes <stem>.csv and <stem>.json
    /// [default: derdzinski-orbit, placed per PSEUDOCYL_OUT_DIR].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout payload.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Built-in factors for reports that do not start from an orbit file.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuiltinFactor {
    /// The constant solution (the round cylinder; parallel Ricci tensor).
    Cylinder,
    /// The generic non-solution control 1 + 0.3 sin(2 pi t / T).
    Sine,
}

#[derive(Args)]
struct CurvatureReportArgs {
    /// Orbit artifact stem (reads <stem>.csv and <stem>.json) supplying the
    /// factor; must come from the conformal-factor equation.
    #[arg(long, conflicts_with_all = ["factor", "n"])]
    orbit: Option<PathBuf>,
    /// Built-in factor to report on instead of an orbit file.
    #[arg(long, value_enum, requires = "n")]
    factor: Option<BuiltinFactor>,
    /// Total dimension for a built-in factor.
    #[arg(long)]
    n: Option<u32>,
    /// Circle length for a built-in factor.
    #[arg(long, default_value_t = 6.0)]
    period: f64,
    /// Sample times around the circle.
    #[arg(long, default_value_t = GridSpec::default().time_points)]
    grid_t: usize,
    /// First-polar-angle samples across the chart band.
    #[arg(long, default_value_t = GridSpec::default().angular_points)]
    grid_angular: usize,
    /// Gate on the closed-form vs oracle relative gaps in the verdict.
    #[arg(long, default_value_t = verify::ORACLE_GAP_TOL)]
    tol: f64,
    /// Also write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout payload (this command only supports json).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct PeriodTableArgs {
    /// Total dimension (at least 3).
    #[arg(long)]
    n: u32,
    /// Number of table rows (at least 3).
    #[arg(long, default_value_t = 50)]
    rows: usize,
    /// Output path for the CSV table
    /// [default: period-table.csv, placed per PSEUDOCYL_OUT_DIR].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout payload.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Also write the JSON suite report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout payload (this command only supports json).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::SolveFowler(args) => cmd_solve_fowler(args),
        Command::SolveDerdzinski(args) => cmd_solve_derdzinski(args),
        Command::CurvatureReport(args) => cmd_curvature_report(args),
        Command::PeriodTable(args) => cmd_period_table(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// Map every error variant onto its documented exit code.
fn exit_code(err: &Error) -> ExitCode {
    let code: u8 = match err {
        Error::InvalidParameter(_) => 2,
        Error::BelowThreshold { .. } => 3,
        Error::EnergyOutsideWindow { .. } => 4,
        Error::InvalidBracket { .. }
        | Error::DegenerateBracket { .. }
        | Error::StepSizeUnderflow { .. }
        | Error::NonFiniteState { .. }
        | Error::QuadratureBudget { .. }
        | Error::OutsideTrajectory { .. }
        | Error::OrbitValidation(_) => 5,
        Error::NonPositiveFactor { .. }
        | Error::NotPeriodic { .. }
        | Error::InconsistentDerivative { .. }
        | Error::MetricNotPositiveDefinite { .. }
        | Error::MetricNearSingular { .. }
        | Error::OutsideChart { .. }
        | Error::ReparametrizationCertificate(_) => 6,
        Error::MalformedOrbitFile(_) | Error::Io(_) | Error::Json(_) => 7,
        // The error enum is non-exhaustive; treat anything new as a solver
        // failure until it gets its own code.
        _ => 5,
    };
    ExitCode::from(code)
}

/// Resolve an output stem: `--out` verbatim when given, otherwise the fixed
/// default under `PSEUDOCYL_OUT_DIR` (or the working directory).
fn resolve_out(out: Option<PathBuf>, default_name: &str) -> Result<PathBuf> {
    match out {
        Some(path) => Ok(path),
        None => match std::env::var_os("PSEUDOCYL_OUT_DIR") {
            Some(dir) => {
                let dir = PathBuf::from(dir);
                std::fs::create_dir_all(&dir)?;
                Ok(dir.join(default_name))
            }
            None => Ok(PathBuf::from(default_name)),
        },
    }
}

/// Print a JSON payload and optionally copy it to a file.
fn emit_json<T: Serialize>(payload: &T, copy: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(payload)?;
    text.push('\n');
    print!("{text}");
    if let Some(path) = copy {
        std::fs::write(path, &text)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// solve-fowler / solve-derdzinski
// ---------------------------------------------------------------------------

/// Stdout summary of a solve command.
#[derive(Serialize)]
struct OrbitSummary<'a> {
    #[serde(flatten)]
    header: &'a OrbitHeader,
    /// Equation residual of the stored interpolant.
    residual_max: f64,
    /// Peak deviation of the sample energies from the target energy.
    energy_spread: f64,
    /// Path of the written CSV artifact.
    csv: String,
    /// Path of the written JSON header.
    json: String,
}

fn write_orbit_artifacts(
    orbit: &PeriodicOrbit,
    out: Option<PathBuf>,
    default_stem: &str,
    format: Format,
) -> Result<ExitCode> {
    let stem = resolve_out(out, default_stem)?;
    let csv_path = stem.with_extension("csv");
    let json_path = stem.with_extension("json");
    io::write_orbit(orbit, &csv_path, &json_path)?;
    match format {
        Format::Json => {
            let header = OrbitHeader::of(orbit);
            emit_json(
                &OrbitSummary {
                    header: &header,
                    residual_max: orbit.residual_max(),
                    energy_spread: orbit.energy_spread(),
                    csv: csv_path.display().to_string(),
                    json: json_path.display().to_string(),
                },
                None,
            )?;
        }
        Format::Csv => print!("{}", std::fs::read_to_string(&csv_path)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve_fowler(args: SolveFowlerArgs) -> Result<ExitCode> {
    let orbit = FowlerSystem::new(args.n)?.solve_period(args.period)?;
    write_orbit_artifacts(&orbit, args.out, "fowler-orbit", args.format)
}

fn cmd_solve_derdzinski(args: SolveDerdzinskiArgs) -> Result<ExitCode> {
    let sys = DerdzinskiSystem::new(args.m, args.fiber_scalar, args.stiffness)?;
    let energy = sys.energy_at_offset(args.energy_offset)?;
    let orbit = sys.solve_at_energy(energy)?;
    write_orbit_artifacts(&orbit, args.out, "derdzinski-orbit", args.format)
}

// ---------------------------------------------------------------------------
// curvature-report
// ---------------------------------------------------------------------------

/// Aggregate verdict flags of a curvature report.
#[derive(Serialize)]
struct VerdictFlags {
    /// The Codazzi residual stayed within its gate everywhere.
    harmonic: bool,
    /// The Ricci-derivative norm never reached the nonconstancy floor.
    parallel: bool,
    /// The Weyl sweep stayed within the dimension's bound.
    weyl_flat: bool,
    /// Every closed-form vs oracle gap stayed within `--tol`.
    oracle_agreement: bool,
}

/// Stdout payload of `curvature-report`.
#[derive(Serialize)]
struct CurvatureVerdict {
    schema_version: String,
    /// Where the factor came from.
    source: String,
    /// Full grid certificate (statistics, witnesses, convention audit).
    report: CurvatureReport,
    /// Closed-form vs finite-difference comparison at seeded points.
    oracle: OracleComparison,
    /// Gate applied to the oracle gaps.
    oracle_tolerance: f64,
    /// Bound applied to the Weyl sweep for this dimension.
    weyl_bound: f64,
    verdict: VerdictFlags,
}

fn report_inputs(args: &CurvatureReportArgs) -> Result<(String, u32, PeriodicScalar)> {
    if let Some(stem) = &args.orbit {
        let record = io::OrbitRecord::read(&stem.with_extension("csv"), &stem.with_extension("json"))?;
        let OrbitFamily::Fowler { n } = record.family() else {
            return Err(Error::invalid_parameter(
                "curvature reports need a conformal-factor orbit; transport warp-equation \
                 orbits through the identification instead"
                    .to_string(),
            ));
        };
        Ok((
            format!("orbit file {}", stem.display()),
            n,
            record.factor()?,
        ))
    } else if let Some(builtin) = args.factor {
        let n = args
            .n
            .ok_or_else(|| Error::invalid_parameter("--factor needs --n".to_string()))?;
        let factor = match builtin {
            BuiltinFactor::Cylinder => PeriodicScalar::constant(
                args.period,
                FowlerSystem::new(n)?.constant_solution(),
            )?,
            BuiltinFactor::Sine => PeriodicScalar::offset_sine(args.period, 1.0, 0.3)?,
        };
        let label = match builtin {
            BuiltinFactor::Cylinder => "builtin cylinder factor",
            BuiltinFactor::Sine => "builtin sine control factor",
        };
        Ok((format!("{label} (n = {n}, T = {})", args.period), n, factor))
    } else {
        Err(Error::invalid_parameter(
            "pass exactly one of --orbit or --factor".to_string(),
        ))
    }
}

fn cmd_curvature_report(args: CurvatureReportArgs) -> Result<ExitCode> {
    if args.format == Format::Csv {
        return Err(Error::invalid_parameter(
            "curvature-report only emits json".to_string(),
        ));
    }
    let (source, n, factor) = report_inputs(&args)?;
    let grid = GridSpec {
        time_points: args.grid_t,
        angular_points: args.grid_angular,
        ..GridSpec::default()
    };
    let metric = ConformalCylinderMetric::new(n, factor)?;
    let report = harmonicity_certificate(&metric, &grid)?;
    let oracle = oracle_cross_check(&metric, verify::CROSS_CHECK_POINTS, CROSS_CHECK_SEED)?;
    let weyl_bound = if n == 3 {
        verify::WEYL_EXACT_TOL
    } else {
        verify::WEYL_TOL
    };
    let verdict = VerdictFlags {
        harmonic: report.harmonic,
        parallel: !report.nonparallel,
        weyl_flat: report.weyl_max <= weyl_bound,
        oracle_agreement: oracle.max_gap() <= args.tol,
    };
    emit_json(
        &CurvatureVerdict {
            schema_version: SCHEMA_VERSION.to_string(),
            source,
            report,
            oracle,
            oracle_tolerance: args.tol,
            weyl_bound,
            verdict,
        },
        args.out.as_deref(),
    )?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// period-table
// ---------------------------------------------------------------------------

/// Stdout summary of `period-table`.
#[derive(Serialize)]
struct TableSummary {
    schema_version: String,
    /// Total dimension.
    n: u32,
    /// Analytic small-oscillation limit of the period map.
    limit_period: f64,
    /// Rows written.
    rows: usize,
    /// First tabulated period (hugs the limit).
    first_period: f64,
    /// Last tabulated period.
    last_period: f64,
    /// Path of the written CSV table.
    csv: String,
}

/// Energy offsets for the table: the first row hugs the well bottom (it pins
/// the small-oscillation limit), the rest are log-spaced from where adjacent
/// period differences clear the quadrature noise floor out to near-zero
/// energy, so the measured column increases strictly.
fn table_offsets(rows: usize) -> Vec<f64> {
    let mut offsets = Vec::with_capacity(rows);
    offsets.push(1e-8);
    for k in 0..rows - 1 {
        offsets.push(1e-4 * (0.999f64 / 1e-4).powf(k as f64 / (rows - 2) as f64));
    }
    offsets
}

fn cmd_period_table(args: PeriodTableArgs) -> Result<ExitCode> {
    if args.rows < 3 {
        return Err(Error::invalid_parameter(format!(
            "a period table needs at least 3 rows, got {}",
            args.rows
        )));
    }
    let sys = FowlerSystem::new(args.n)?;
    let e_center = sys.center_energy();
    let mut table = Vec::with_capacity(args.rows);
    for s in table_offsets(args.rows) {
        let energy = e_center * (1.0 - s);
        table.push((energy, sys.period_function(energy)?));
    }
    let path = resolve_out(args.out, "period-table")?.with_extension("csv");
    io::write_period_table(&path, &table)?;
    match args.format {
        Format::Json => emit_json(
            &TableSummary {
                schema_version: SCHEMA_VERSION.to_string(),
                n: args.n,
                limit_period: sys.critical_period(),
                rows: table.len(),
                first_period: table[0].1,
                last_period: table[table.len() - 1].1,
                csv: path.display().to_string(),
            },
            None,
        )?,
        Format::Csv => print!("{}", std::fs::read_to_string(&path)?),
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    if args.format == Format::Csv {
        return Err(Error::invalid_parameter(
            "verify only emits json".to_string(),
        ));
    }
    let report = verify::run_full_suite()?;
    emit_json(&report, args.out.as_deref())?;
    Ok(if report.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
