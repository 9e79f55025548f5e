use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use canonframe::analysis::{analyze, compare, verify, Corruption};
use canonframe::problem::Problem;
use canonframe::rational::Rational;
use canonframe::report::{render, render_comparison, ReportOptions};
use canonframe::{Error, Result};

/// Canonical frames and invariants of scalar ODEs x^(k+1) = F(t, x, .., x^(k)).
///
/// Exit codes: 0 success, 2 input error, 3 internal consistency failure.
#[derive(Parser)]
#[command(name = "canonframe", version)]
struct Cli {
    /// Jet order override.
    #[arg(long, global = true)]
    order: Option<u32>,
    /// Seed for sample-point search.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the invariant report for a problem file.
    Analyze {
        file: PathBuf,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Include torsion coefficients as full jets.
        #[arg(long)]
        jets: bool,
        /// Include timings (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run every identity check; fails with exit code 3 on any failure.
    Verify {
        file: PathBuf,
        /// Shift an ansatz unknown (0..4) by one before checking.
        #[arg(long, hide = true)]
        corrupt_frame: Option<usize>,
    },
    /// Compare invariant verdicts of two problems with the same k.
    Compare { a: PathBuf, b: PathBuf },
}

fn load(path: &Path, cli: &Cli) -> Result<Problem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let mut p = Problem::parse(&text).map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        e => e,
    })?;
    if cli.order.is_some() {
        p.order = cli.order;
    }
    if let Some(s) = cli.seed {
        p.seed = s;
    }
    p.validate()?;
    Ok(p)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Analyze { file, out, jets, timings } => {
            let p = load(file, cli)?;
            let a = analyze(&p)?;
            let text = render(&a, ReportOptions { jets: *jets, timings: *timings })?;
            match out {
                Some(path) => std::fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { file, corrupt_frame } => {
            let p = load(file, cli)?;
            let corrupt = match corrupt_frame {
                Some(w) if *w < 4 => Some(Corruption { which: *w, delta: Rational::one() }),
                Some(w) => return Err(Error::Input(format!("no ansatz unknown {w}"))),
                None => None,
            };
            let v = verify(&p, corrupt.as_ref())?;
            for c in &v.checks {
                println!("{c}");
            }
            if v.passed() {
                println!("verify: pass ({} checks)", v.checks.len());
                Ok(ExitCode::SUCCESS)
            } else {
                let failed: Vec<&str> = v.failures().map(|c| c.name.as_str()).collect();
                eprintln!("verify: FAIL: {}", failed.join("; "));
                Ok(ExitCode::from(3))
            }
        }
        Cmd::Compare { a, b } => {
            let (pa, pb) = (load(a, cli)?, load(b, cli)?);
            if pa.k != pb.k {
                return Err(Error::Input(format!("cannot compare k = {} with k = {}", pa.k, pb.k)));
            }
            let (ra, rb) = (analyze(&pa)?, analyze(&pb)?);
            let c = compare(&ra, &rb)?;
            print!("{}", render_comparison(&ra, &rb, &c));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
