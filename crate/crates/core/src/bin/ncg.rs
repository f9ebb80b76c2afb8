use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncg_core::cli::{cmd_gamma_search, cmd_spectrum, cmd_verify, Outcome, Overrides, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "ncg", version, about = "Checks truncated equivariant spectral triples on noncommutative tori and the theta-deformed 3-sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print a JSON report.
    Verify(Common),
    /// Search for the projection Gamma and print the solutions as JSON.
    GammaSearch(Common),
    /// Print the spectrum of one operator as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// D, D_h, D_v, D_omega, script_D_omega, D0_plus or D0_minus.
        #[arg(long)]
        operator: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated suite names.
    #[arg(long, value_delimiter = ',')]
    suite: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// K for tori, 2L for the sphere.
    #[arg(long)]
    cutoff_override: Option<i32>,
}

impl Common {
    fn overrides(&self, operator: Option<String>) -> Overrides {
        Overrides { suite: self.suite.clone(), seed: self.seed, tol: self.tol, cutoff: self.cutoff_override, operator }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("NCG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let (common, operator, run): (&Common, Option<String>, fn(&str, &Overrides) -> Outcome) = match &cli.command {
        Command::Verify(c) => (c, None, cmd_verify),
        Command::GammaSearch(c) => (c, None, cmd_gamma_search),
        Command::Spectrum { common, operator } => (common, operator.clone(), cmd_spectrum),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let outcome = run(&text, &common.overrides(operator));
    if outcome.output.starts_with("error:") {
        eprint!("{}", outcome.output);
    } else if let Some(path) = common.out.clone().or_else(|| outcome.path.clone().map(PathBuf::from)) {
        if let Err(e) = std::fs::write(&path, &outcome.output) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    } else {
        print!("{}", outcome.output);
    }
    ExitCode::from(outcome.code as u8)
}
