//! `pw`: command-line front end for the P=W verification engine.
//!
//! Exit status: 0 when every check passes, 1 when a verification fails (the
//! first counterexample is printed), 2 on usage or resource errors.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pw_core::{PwError, WordBound};

#[derive(Parser, Debug)]
#[command(name = "pw", version, about = "Machine checks for P=W on abelian varieties")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bigraded dimension table of one side.
    Table {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = SideArg::Betti)]
        side: SideArg,
    },
    /// Mixed Hodge polynomial H(q, t) of the Betti moduli space.
    HodgePoly {
        #[command(flatten)]
        grid: GridArgs,
        /// `minus` prints the literal det(I - qt A) sum (negative coefficients).
        #[arg(long, value_enum, default_value_t = Convention::Plus)]
        convention: Convention,
    },
    /// Check one of the statements.
    #[command(subcommand)]
    Verify(Verify),
    /// Explicit non-abelian Hodge correspondence.
    #[command(subcommand)]
    Nah(Nah),
    /// Spectral data.
    #[command(subcommand)]
    Sd(Sd),
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Perverse table = weight table (and the closed form).
    PEqualsW(VerifyArgs),
    /// H(1/(qt^2), t) (qt)^(2gr) = H(q, t).
    CuriousDuality(VerifyArgs),
    /// Weight pieces are of Hodge type (p, p).
    HodgeTate(VerifyArgs),
    /// Ranks of L^k: H^(gr-k) -> H^(gr+k).
    HardLefschetz {
        #[command(flatten)]
        args: VerifyArgs,
        /// Positive integer weights c_i of the class sum c_i e_i^e_(g+i).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<i64>>,
    },
    /// Local homology of S^(2gr-1)/S_r at a Z/2-stabilizer point.
    Manifold(VerifyArgs),
    /// S^(2gr-1)/S_r is a rational homology sphere.
    RationalSphere(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum Nah {
    /// Rank-one Betti <-> Dolbeault roundtrips.
    Roundtrip(NahArgs),
    /// Commutativity of the spectral-data square.
    Diagram(NahArgs),
}

#[derive(Subcommand, Debug)]
enum Sd {
    /// Coefficients sigma_1..sigma_r of prod (s - <lambda, y>).
    Embed(PointsArgs),
    /// Radial retraction onto S^(2gr-1)/S_r.
    Retract(PointsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Dolbeault,
    Betti,
    ClosedForm,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Plus,
    Minus,
}

/// Either one cell (`--g`, `--r`) or a grid (`--g-max`, `--r-max`); the two can be mixed.
#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    g: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    r: Option<u32>,
    #[arg(long, conflicts_with = "g", value_parser = clap::value_parser!(u32).range(1..))]
    g_max: Option<u32>,
    #[arg(long, conflicts_with = "r", value_parser = clap::value_parser!(u32).range(1..))]
    r_max: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Debug: perturb the computed data so the check must fail.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Args, Debug, Clone)]
pub struct NahArgs {
    /// Genus of the square lattice when no --lattice is given.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    g: Option<u32>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    r: u32,
    /// Lattice JSON: {"g": g, "basis": [[[re, im], ...], ...]}.
    #[arg(long)]
    lattice: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Push samples out of the ball of this radius (log-modulus coordinates).
    #[arg(long)]
    min_radius: Option<f64>,
    /// Debug: perturb one coordinate so the check must fail.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PointsArgs {
    /// JSON list of r vectors in C^g; entries are numbers or [re, im].
    #[arg(long)]
    points: String,
}

impl GridArgs {
    fn is_grid(&self) -> bool {
        self.g_max.is_some() || self.r_max.is_some()
    }

    /// Cells in `(g, r)` order. A single cell over the resource bound is an
    /// error; grid cells over it are skipped with a note on stderr.
    fn cells(&self, bound: WordBound) -> Result<Vec<(u32, u32)>, PwError> {
        let gs = match (self.g, self.g_max) {
            (Some(g), _) => g..=g,
            (None, Some(m)) => 1..=m,
            (None, None) => return Err(PwError::Usage("give --g or --g-max".into())),
        };
        let rs = match (self.r, self.r_max) {
            (Some(r), _) => r..=r,
            (None, Some(m)) => 1..=m,
            (None, None) => return Err(PwError::Usage("give --r or --r-max".into())),
        };
        let mut cells = Vec::new();
        let mut skipped = Vec::new();
        for g in gs {
            for r in rs.clone() {
                match bound.check(g, r) {
                    Ok(()) => cells.push((g, r)),
                    Err(e @ PwError::ResourceGuard { .. }) if !self.is_grid() => return Err(e),
                    Err(PwError::ResourceGuard { .. }) => skipped.push(format!("(g={g}, r={r})")),
                    Err(e) => return Err(e),
                }
            }
        }
        if !skipped.is_empty() {
            eprintln!("pw: skipping cells with 2gr > {}: {}", bound.0, skipped.join(" "));
        }
        if cells.is_empty() {
            return Err(PwError::ResourceGuard {
                width: 2 * self.g.unwrap_or(1) * self.r.unwrap_or(1),
                bound: bound.0,
            });
        }
        Ok(cells)
    }
}

/// Failure of a run that is not a verification failure.
#[derive(Debug)]
pub enum CliError {
    Pw(PwError),
    Io(String),
}

impl From<PwError> for CliError {
    fn from(e: PwError) -> Self {
        CliError::Pw(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Pw(e) => write!(f, "{e}"),
            CliError::Io(s) => f.write_str(s),
        }
    }
}

fn word_bound() -> Result<WordBound, CliError> {
    match std::env::var("PW_MAX_WORD_BITS") {
        Ok(v) => v.trim().parse::<u32>().ok().filter(|&b| b > 0).map(WordBound).ok_or_else(|| {
            CliError::Pw(PwError::Usage(format!("PW_MAX_WORD_BITS must be a positive integer, got {v:?}")))
        }),
        Err(_) => Ok(WordBound::default()),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let bound = word_bound()?;
    let fmt = cli.format;
    match cli.command {
        Command::Table { grid, side } => commands::table(&grid, side, fmt, bound),
        Command::HodgePoly { grid, convention } => commands::hodge_poly(&grid, convention, fmt, bound),
        Command::Verify(v) => match v {
            Verify::PEqualsW(a) => commands::p_equals_w(&a, fmt, bound),
            Verify::CuriousDuality(a) => commands::curious_duality(&a, fmt, bound),
            Verify::HodgeTate(a) => commands::hodge_tate(&a, fmt, bound),
            Verify::HardLefschetz { args, weights } => commands::hard_lefschetz(&args, weights.as_deref(), fmt, bound),
            Verify::Manifold(a) => commands::manifold(&a, fmt, bound),
            Verify::RationalSphere(a) => commands::rational_sphere(&a, fmt, bound),
        },
        Command::Nah(n) => match n {
            Nah::Roundtrip(a) => commands::nah_roundtrip(&a, fmt),
            Nah::Diagram(a) => commands::nah_diagram(&a, fmt),
        },
        Command::Sd(s) => match s {
            Sd::Embed(a) => commands::sd_embed(&a, fmt),
            Sd::Retract(a) => commands::sd_retract(&a, fmt),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("pw: error: {e}");
            ExitCode::from(2)
        }
    }
}
