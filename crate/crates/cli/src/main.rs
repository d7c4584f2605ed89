use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use k3glue_cli::runner::{run, Profile};
use k3glue_cli::{scenario, CliError};

#[derive(Parser, Debug)]
#[command(name = "k3glue", version, about = "Run a numerical scenario and write CSV/JSON results")]
struct Args {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Profile::Strict)]
    tolerance_profile: Profile,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let sc = scenario::load(&args.scenario)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let rep = pool.install(|| run(&sc, args.tolerance_profile, args.seed))?;
    let base = sc.output.clone().unwrap_or_else(|| sc.kind.as_str().to_string());
    let (csv, json) = rep.write(&args.out, &base)?;
    for c in &rep.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(rep.pass)
}
