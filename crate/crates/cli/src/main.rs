use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qmeixner::charfun::{bose_cf_grid, fermi_cf_grid, linspace, nmode_cf};
use qmeixner::dist::{atoms, classify_bose, classify_fermi, density, sample, ClassificationResult, DistributionSpec};
use qmeixner::error::Error;
use qmeixner::io::MatrixFile;
use qmeixner::oracle::{bose_oracle, fermi_oracle, oracle_grid};

#[derive(Parser)]
#[command(name = "qmeixner", version, about = "Vacuum distributions of quadratic Bose and Fermi Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Bose,
    Fermi,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the vacuum law of a one-mode Bose or two-mode Fermi Hamiltonian.
    Classify {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// Print the distribution as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the vacuum characteristic function on a uniform grid.
    Cf {
        #[arg(long, value_enum, required_unless_present = "matrices")]
        family: Option<FamilyArg>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "matrices")]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "matrices")]
        beta: Option<f64>,
        /// n-mode coefficient file {"n", "A", "C"}.
        #[arg(long, conflicts_with_all = ["family", "alpha", "beta"])]
        matrices: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_max: f64,
        /// Number of grid points.
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the closed form against the Fock-space oracle.
    Verify {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// Bose truncation (ignored for fermions).
        #[arg(long, default_value_t = 128)]
        cutoff: usize,
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
        /// Defaults to 1e-12 for fermions and 1e-8 for bosons.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the full report as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw seeded samples from a distribution file.
    Sample {
        #[arg(long)]
        dist_json: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the density of a continuous law on a uniform grid.
    Density {
        #[arg(long)]
        dist_json: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the atoms of an atomic law.
    Atoms {
        #[arg(long)]
        dist_json: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_)
        | Error::Unsupported(_)
        | Error::Schema { .. }
        | Error::AtomicLaw
        | Error::ContinuousLaw => 2,
        Error::BranchTracking { .. } | Error::Singular(_) | Error::NonDecaying { .. } => 3,
        Error::ResourceLimit(_) => 4,
    }
}

fn finite(name: &str, x: f64) -> Result<f64, Error> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidArgument(format!("--{name} must be a finite real, got {x}")))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes()).ok();
            Ok(())
        }
    }
}

fn load_dist(path: &Path) -> Result<DistributionSpec, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    DistributionSpec::from_json_str(&text)
}

fn describe(result: &ClassificationResult) -> String {
    let mut s = String::new();
    writeln!(s, "class: {:?}", result.class_label).unwrap();
    writeln!(s, "distribution: {}", result.dist.class_name()).unwrap();
    let params = result.dist.to_json();
    for (k, v) in params["params"].as_object().unwrap() {
        writeln!(s, "  {k} = {v}").unwrap();
    }
    if let DistributionSpec::TwoAtom { x1, p1, x2, p2 } = result.dist {
        writeln!(s, "atoms: {x1} (weight {p1}), {x2} (weight {p2})").unwrap();
    }
    writeln!(s, "det_h = {}", result.det_h).unwrap();
    writeln!(s, "omega = {} + {}i", result.omega.re, result.omega.im).unwrap();
    if let Some(f) = result.fermi {
        writeln!(s, "fermionic Meixner class: {:?} (by definition), {:?} (by limit)", f.by_definition, f.by_limit)
            .unwrap();
    }
    writeln!(s, "convention: E[exp(itX)]").unwrap();
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { family, alpha, beta, json } => {
            let (alpha, beta) = (finite("alpha", alpha)?, finite("beta", beta)?);
            let result = match family {
                FamilyArg::Bose => classify_bose(alpha, beta)?,
                FamilyArg::Fermi => classify_fermi(alpha, beta)?,
            };
            if json {
                println!("{}", result.to_json());
            } else {
                print!("{}", describe(&result));
            }
        }
        Command::Cf { family, alpha, beta, matrices, t_min, t_max, steps, out } => {
            let (t_min, t_max) = (finite("t-min", t_min)?, finite("t-max", t_max)?);
            if steps == 0 || (steps > 1 && !(t_max > t_min)) {
                return Err(Error::InvalidArgument("need --steps >= 1 and --t-max > --t-min".into()).into());
            }
            let ts = linspace(t_min, t_max, steps);
            let grid = match matrices {
                Some(path) => {
                    let m = MatrixFile::load(&path)?;
                    nmode_cf(&m.a, &m.c, &ts)?
                }
                None => {
                    let (alpha, beta) = (finite("alpha", alpha.unwrap())?, finite("beta", beta.unwrap())?);
                    match family.unwrap() {
                        FamilyArg::Bose => bose_cf_grid(alpha, beta, &ts)?,
                        FamilyArg::Fermi => fermi_cf_grid(alpha, beta, &ts)?,
                    }
                }
            };
            emit(out.as_deref(), &grid.to_csv())?;
        }
        Command::Verify { family, alpha, beta, cutoff, t_max, tol, out } => {
            let (alpha, beta, t_max) = (finite("alpha", alpha)?, finite("beta", beta)?, finite("t-max", t_max)?);
            let ts = oracle_grid(t_max);
            let (report, tol) = match family {
                FamilyArg::Fermi => (fermi_oracle(alpha, beta, &ts)?, tol.unwrap_or(1e-12)),
                FamilyArg::Bose => (bose_oracle(alpha, beta, cutoff, &ts)?, tol.unwrap_or(1e-8)),
            };
            if let Some(path) = out.as_deref() {
                emit(Some(path), &report.to_csv())?;
            }
            let pass = report.max_abs_error <= tol;
            let summary = serde_json::json!({
                "family": if family == FamilyArg::Bose { "bose" } else { "fermi" },
                "alpha": alpha,
                "beta": beta,
                "cutoff": report.cutoff,
                "t_max": t_max,
                "points": ts.len(),
                "max_abs_error": report.max_abs_error,
                "tol": tol,
                "pass": pass,
            });
            println!("{summary}");
            if !pass {
                return Err(Failure::Verify(format!(
                    "max_abs_error {:e} exceeds tolerance {tol:e}",
                    report.max_abs_error
                )));
            }
        }
        Command::Sample { dist_json, n, seed, out } => {
            let spec = load_dist(&dist_json)?;
            let xs = sample(&spec, n, seed)?;
            let mut csv = String::from("x\n");
            for x in xs {
                writeln!(csv, "{x:.17e}").unwrap();
            }
            emit(out.as_deref(), &csv)?;
        }
        Command::Density { dist_json, x_min, x_max, steps, out } => {
            let spec = load_dist(&dist_json)?;
            if spec.is_atomic() {
                return Err(Error::AtomicLaw.into());
            }
            let (x_min, x_max) = (finite("x-min", x_min)?, finite("x-max", x_max)?);
            if steps == 0 || (steps > 1 && !(x_max > x_min)) {
                return Err(Error::InvalidArgument("need --steps >= 1 and --x-max > --x-min".into()).into());
            }
            let mut csv = String::from("x,p\n");
            for x in linspace(x_min, x_max, steps) {
                writeln!(csv, "{x:.17e},{:.17e}", density(&spec, x)?).unwrap();
            }
            emit(out.as_deref(), &csv)?;
        }
        Command::Atoms { dist_json, out } => {
            let spec = load_dist(&dist_json)?;
            let mut csv = String::from("x,weight\n");
            for (x, w) in atoms(&spec)? {
                writeln!(csv, "{x:.17e},{w:.17e}").unwrap();
            }
            emit(out.as_deref(), &csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
