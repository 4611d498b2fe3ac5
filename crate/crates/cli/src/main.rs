use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use opcalc::calculus::{rieffel_pipeline, GammaKernel};
use opcalc::deformation::{deformed_product, left_action, right_action};
use opcalc::module_space::module_norm;
use opcalc::{Field, ModuleFunction, OperatorHandle, PhaseGrid, SkewForm};
use opcalc_cli::grid_io::{read_grid, write_grid};
use opcalc_cli::suites::catalogue;
use opcalc_cli::{run_suite, CliError, SuiteConfig};
use serde_json::json;

/// Numerical verification of deformed products, pseudo-differential
/// operators and their symbol calculus.
#[derive(Parser)]
#[command(name = "opcalc", version)]
struct Cli {
    /// JSON suite configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Position grid as n,N,L.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Uses J = [[0, theta], [-theta, 0]] (n = 2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file: the JSON report for `verify`, an MGF1 grid otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a verification suite and reports every check.
    Verify {
        /// module_axioms, fourier, deformation, quantization, heisenberg,
        /// calculus, rieffel_pipeline or all.
        suite: String,
        /// Also writes a CSV of (check, residual, tolerance, pass).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Deformed product of two MGF1 grids.
    Product { left: PathBuf, right: PathBuf },
    /// Left or right action of a field on a function.
    Apply {
        field: PathBuf,
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::Left)]
        side: Side,
    },
    /// Recovers F from the operator L_F through its symbol.
    Recover { field: PathBuf },
    /// Describes an MGF1 grid, or lists the checks when no file is given.
    Info { file: Option<PathBuf> },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

/// Largest phase grid `recover` will sample, in complex values.
const RECOVER_LIMIT: usize = 1 << 24;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config(cli: &Cli) -> Result<SuiteConfig, CliError> {
    let mut c = match &cli.config {
        Some(p) => SuiteConfig::load(p)?,
        None => SuiteConfig::default(),
    };
    if let Some(g) = &cli.grid {
        c.set_grid(g)?;
    }
    if let Some(t) = cli.theta {
        if c.n != 2 {
            return Err(CliError::Config("--theta needs a two-dimensional grid".into()));
        }
        c.set_theta(t);
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    Ok(c)
}

/// `J` from the configuration, or zero for one-dimensional files when the
/// configuration does not describe one.
fn skew_for(c: &SuiteConfig, n: usize) -> Result<SkewForm, CliError> {
    if c.j.len() == n * n {
        return SkewForm::new(n, c.j.clone()).map_err(|e| CliError::Config(e.to_string()));
    }
    if n == 1 {
        return Ok(SkewForm::zero(1));
    }
    Err(CliError::Config(format!("J has {} entries but the grid has n = {n}", c.j.len())))
}

fn read(cli: &Cli, path: &Path, c: &SuiteConfig) -> Result<ModuleFunction, CliError> {
    // an explicit config pins the algebra dimension
    read_grid(path, cli.config.as_ref().map(|_| c.k))
}

fn emit(cli: &Cli, result: &ModuleFunction) -> Result<(), CliError> {
    if let Some(p) = &cli.out {
        write_grid(p, result)?;
    }
    out(&describe(result).to_string());
    Ok(())
}

fn describe(f: &ModuleFunction) -> serde_json::Value {
    let g = f.grid();
    json!({
        "n": g.n(),
        "points": g.points(),
        "half_width": g.half_width(),
        "k": f.algebra_dim(),
        "sup_norm": f.sup_norm(),
        "module_norm": module_norm(f),
        "l2_norm": f.l2_norm(),
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut c = config(&cli)?;
    match &cli.command {
        Command::Verify { suite, csv } => {
            c.suite = suite.clone();
            if cli.out.is_some() {
                c.report = cli.out.clone();
            }
            if csv.is_some() {
                c.csv = csv.clone();
            }
            let report = run_suite(&c)?;
            out(report.summary().trim_end());
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Product { left, right } => {
            let (f, g) = (read(&cli, left, &c)?, read(&cli, right, &c)?);
            let j = skew_for(&c, f.grid().n())?;
            let p = deformed_product(&Field::Sampled(f.clone()), &Field::Sampled(g), &j, f.grid())?;
            emit(&cli, &p)?;
            Ok(0)
        }
        Command::Apply { field, input, side } => {
            let (f, u) = (read(&cli, field, &c)?, read(&cli, input, &c)?);
            let j = skew_for(&c, u.grid().n())?;
            let out = match side {
                Side::Left => left_action(&Field::Sampled(f), &u, &j)?,
                Side::Right => right_action(&Field::Sampled(f), &u, &j)?,
            };
            emit(&cli, &out)?;
            Ok(0)
        }
        Command::Recover { field } => {
            let f = read(&cli, field, &c)?;
            let grid = *f.grid();
            let k = f.algebra_dim();
            if grid.len().saturating_mul(grid.len()).saturating_mul(k * k) > RECOVER_LIMIT {
                return Err(CliError::Config(format!("grid {grid:?} is too large to sample over phase space")));
            }
            let j = skew_for(&c, grid.n())?;
            let t = OperatorHandle::left(Field::Sampled(f.clone()), j.clone());
            let unit = |a: usize| (0..grid.n()).map(|b| if a == b { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
            let shifts = vec![
                (unit(0).iter().map(|v| v * grid.spacing()).collect(), unit(grid.n() - 1).iter().map(|v| v * grid.frequency_spacing()).collect()),
            ];
            let report = rieffel_pipeline(&t, k, &j, &PhaseGrid::operator(grid), &shifts, &GammaKernel::default())?;
            let recovered = &report.recovery.f;
            if let Some(p) = &cli.out {
                write_grid(p, recovered)?;
            }
            let accepted = report.recovery.accepted(1e-6);
            let summary = json!({
                "shift_invariance": report.shift_invariance,
                "reconstruction_error": report.reconstruction_error,
                "translation_residual": report.recovery.residual / report.recovery.scale.max(f64::MIN_POSITIVE),
                "input_error": recovered.sub(&f)?.sup_norm(),
                "accepted": accepted,
            });
            out(&serde_json::to_string_pretty(&summary).expect("serializable"));
            Ok(if accepted { 0 } else { 1 })
        }
        Command::Info { file } => {
            match file {
                Some(p) => out(&serde_json::to_string_pretty(&describe(&read(&cli, p, &c)?)).expect("serializable")),
                None => {
                    let lines: Vec<String> =
                        catalogue().into_iter().map(|(suite, id, anchor, tol)| format!("{suite:<17} {id:<36} tol {tol:<8.1e} {anchor}")).collect();
                    out(&lines.join("\n"));
                }
            }
            Ok(0)
        }
    }
}

/// Writes a line to stdout. A closed pipe (`opcalc info | head`) is not an
/// error worth reporting.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}").and_then(|_| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
        }
    }
}
