//! `density-lab`: build the constructions, export density profiles and run the
//! verification checks. Reports go to stdout or `-o`; the exit code follows the
//! report verdict (0 pass, 1 fail, 2 inconclusive) and is 3 for usage or input
//! errors.

mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

const ERROR_EXIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "density-lab",
    version,
    about = "Exact pinned-distance density experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a construction, write it as JSON and print its certificates.
    Build(BuildArgs),
    /// Density profile of a construction file as CSV.
    Profile(ProfileArgs),
    /// Pinned distance profiles of a construction file as CSV.
    Pinned(PinnedArgs),
    /// Run a verification check and emit its JSON report.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of |A ∩ B(c, R)| for a construction file.
    Mc(McArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Boxes,
    Annuli,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// eps = 1/(10^5 d) for boxes; annuli start at index 100.
    Paper,
    /// eps = 1/100 for boxes; annuli start at index 1.
    Relaxed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    AnnularBound,
    Theorem,
    Translation,
    Submon,
    Counterexample,
    Sharpness,
    McCrosscheck,
    DensityBound,
}

/// Parameters for building a construction in place of a file.
#[derive(Args, Debug, Clone)]
struct ConstructionArgs {
    /// Ambient dimension (at least 2).
    #[arg(short = 'd', long = "dim", default_value_t = 2)]
    d: usize,
    /// Number of boxes or annuli.
    #[arg(short = 'N', long = "count", default_value_t = 6)]
    count: usize,
    #[arg(long, value_enum, default_value = "relaxed")]
    preset: Preset,
    /// Box width parameter as p/q.
    #[arg(long)]
    eps: Option<String>,
    /// Annulus thickness as p/q.
    #[arg(long)]
    eps0: Option<String>,
    /// Radius growth factor K as p/q.
    #[arg(long)]
    growth: Option<String>,
    /// First annulus index.
    #[arg(long)]
    start_index: Option<usize>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[command(flatten)]
    construction: ConstructionArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    file: PathBuf,
    /// `canonical` or `geom:r0,g,n`.
    #[arg(long, default_value = "canonical")]
    schedule: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PinnedArgs {
    file: PathBuf,
    /// Pin as `x1,x2,...` in p/q form, `0` for the origin or `grid:n` (boxes).
    #[arg(long = "pin", alias = "pins")]
    pins: Vec<String>,
    /// File with one pin per line; `#` starts a comment.
    #[arg(long)]
    pins_file: Option<PathBuf>,
    #[arg(long, default_value = "canonical")]
    schedule: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: Check,
    /// Construction file; otherwise one is built from the flags below.
    #[arg(long)]
    construction: Option<PathBuf>,
    /// Construction kind to build when no file is given.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[command(flatten)]
    params: ConstructionArgs,
    /// Pins: `0`, `grid:n` or `x1,x2,...`; repeatable.
    #[arg(long = "pins", alias = "pin")]
    pins: Vec<String>,
    /// annular-bound: number of seeded random annuli families.
    #[arg(long)]
    random: Option<usize>,
    /// annular-bound: radii per random family.
    #[arg(long, default_value_t = 20)]
    radii: usize,
    /// translation: shift vector `x1,x2,...`; defaults to the first unit vector.
    #[arg(long, alias = "x")]
    shift: Option<String>,
    /// `canonical` or `geom:r0,g,n`.
    #[arg(long)]
    schedule: Option<String>,
    /// Monte Carlo samples (translation, mc-crosscheck).
    #[arg(long)]
    samples: Option<u64>,
    /// mc-crosscheck: number of volume cases.
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long, env = "DENSITY_LAB_SEED")]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    file: PathBuf,
    /// Ball radius as p/q.
    #[arg(long)]
    radius: String,
    /// Ball centre; defaults to the origin.
    #[arg(long)]
    center: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, env = "DENSITY_LAB_SEED")]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Writes `text` to the file if given, else to stdout.
fn emit(output: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(ERROR_EXIT),
            };
        }
    };
    let result = match cli.command {
        Command::Build(a) => run::build(&a).map(|_| 0),
        Command::Profile(a) => run::profile(&a).map(|_| 0),
        Command::Pinned(a) => run::pinned(&a).map(|_| 0),
        Command::Verify(a) => run::verify(&a),
        Command::Mc(a) => run::mc(&a).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}
