use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symtangle::{run, Invocation};

/// Cohomology, boundary algebras and indices of symmetric entanglers.
#[derive(Parser)]
#[command(name = "symtangle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Scenario file, or the name of a shipped scenario.
    #[arg(long, global = true)]
    scenario: Option<String>,
    /// Builtin group: Z<n>, Z2xZ2 or S3.
    #[arg(long, global = true)]
    group: Option<String>,
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Cut position x.
    #[arg(long, global = true, allow_hyphen_values = true)]
    cut: Option<i64>,
    /// Width r; the window size for `swindle`.
    #[arg(long, global = true)]
    width: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Use the enumeration and definition-route oracles.
    #[arg(long, global = true)]
    brute_force: bool,
    /// Also write the report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a tolerance or limit, e.g. `span=1e-6`.
    #[arg(long = "tol-override", value_name = "KEY=VAL", global = true)]
    tol_override: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant factors and generators of H^n(G, U(1)).
    Cohomology,
    /// Charges of symmetric unitaries in zero dimensions.
    #[command(name = "index0d")]
    Index0d,
    /// Index of a one-dimensional symmetric entangler.
    #[command(name = "index1d")]
    Index1d,
    /// Classes of projective regular representations.
    #[command(name = "lps0d")]
    Lps0d,
    /// Boundary algebra at a cut.
    Boundary,
    /// Row algebras along a vertical cut of a torus.
    #[command(name = "boundary2d")]
    Boundary2d,
    /// Blend an entangler into the identity at a cut.
    Blend,
    /// Even/odd factorization of an entangler with trivial index.
    Factorize,
    /// Charge schedule of the swindle.
    Swindle,
    /// Symmetric disentangling of zero-dimensional charges.
    #[command(name = "disentangle0d")]
    Disentangle0d,
    /// Run the shipped scenarios and group checks.
    VerifySuite {
        #[arg(long)]
        all: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, all) = match cli.command {
        Command::Cohomology => ("cohomology", false),
        Command::Index0d => ("index0d", false),
        Command::Index1d => ("index1d", false),
        Command::Lps0d => ("lps0d", false),
        Command::Boundary => ("boundary", false),
        Command::Boundary2d => ("boundary2d", false),
        Command::Blend => ("blend", false),
        Command::Factorize => ("factorize", false),
        Command::Swindle => ("swindle", false),
        Command::Disentangle0d => ("disentangle0d", false),
        Command::VerifySuite { all } => ("verify-suite", all),
    };
    let f = cli.flags;
    let report = run(&Invocation {
        command: command.into(),
        scenario: f.scenario,
        group: f.group,
        degree: f.degree,
        cut: f.cut,
        width: f.width,
        seed: f.seed,
        brute_force: f.brute_force,
        tol_overrides: f.tol_override,
        all,
    });
    let text = report.to_json();
    print!("{text}");
    if let Some(path) = f.out {
        if let Err(e) = std::fs::write(&path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
