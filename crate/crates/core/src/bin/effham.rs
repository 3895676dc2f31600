use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use effham::experiments::bench::{
    bench_givens, bench_magnus, givens_scaling_exponent, BenchGivensConfig, BenchMagnusConfig,
};
use effham::experiments::driven_qubit::{self, DrivenQubitConfig};
use effham::experiments::jch_mott::{self, JchMottConfig};
use effham::experiments::spin_chain::{self, SpinChainConfig};
use effham::experiments::{load_config, write_rows};
use effham::Error;

#[derive(Parser)]
#[command(name = "effham", version, about = "Effective-Hamiltonian experiments and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mott-lobe boundaries from NPAD, dense diagonalization and closed form.
    JchMott(Common),
    /// Driven qubit: coarse Magnus against fine Magnus and RWA.
    DrivenQubit(Common),
    /// Spin-chain populations, error sweep and timing.
    SpinChain(Common),
    /// Time one Givens rotation on the sparse ladder operator.
    BenchGivens(Common),
    /// Time Magnus against fixed-step RK4.
    BenchMagnus(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pulse seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Timing repeats, at least 5 (overrides the config).
    #[arg(long)]
    repeats: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    parallelism: Option<usize>,
}

/// Failure split into the exit-code classes.
enum Failure {
    Config(Error),
    Numerical(Error),
}

fn config_err(e: Error) -> Failure {
    Failure::Config(e)
}

fn run_err(e: Error) -> Failure {
    match e {
        Error::Io(_) => Failure::Config(e),
        other => Failure::Numerical(other),
    }
}

fn output_path(flag: &Option<PathBuf>, config: &Option<PathBuf>, default: &str) -> PathBuf {
    flag.clone().or_else(|| config.clone()).unwrap_or_else(|| PathBuf::from(default))
}

fn load<T: serde::de::DeserializeOwned + Default>(c: &Common) -> Result<T, Failure> {
    load_config(c.config.as_deref()).map_err(config_err)
}

fn report(path: &Path) {
    eprintln!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = match &cli.command {
        Command::JchMott(c)
        | Command::DrivenQubit(c)
        | Command::SpinChain(c)
        | Command::BenchGivens(c)
        | Command::BenchMagnus(c) => c,
    };
    if let Some(p) = common.parallelism {
        if p == 0 {
            return Err(Failure::Config(Error::InvalidParameter("parallelism must be >= 1".into())));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(p)
            .build_global()
            .map_err(|e| Failure::Config(Error::InvalidParameter(e.to_string())))?;
    }

    match &cli.command {
        Command::JchMott(c) => {
            let cfg: JchMottConfig = load(c)?;
            cfg.validate().map_err(config_err)?;
            let rows = jch_mott::run(&cfg).map_err(run_err)?;
            let out = output_path(&c.out, &cfg.out, "jch_mott.csv");
            write_rows(&out, &rows).map_err(run_err)?;
            let worst = rows.iter().map(|r| r.rel_err_npad).fold(0.0, f64::max);
            eprintln!("max relative error (NPAD vs closed form): {worst:.3e}");
            report(&out);
        }
        Command::DrivenQubit(c) => {
            let cfg: DrivenQubitConfig = load(c)?;
            cfg.validate().map_err(config_err)?;
            let rep = driven_qubit::run(&cfg).map_err(run_err)?;
            let out = output_path(&c.out, &cfg.out, "driven_qubit.csv");
            rep.write(&out).map_err(run_err)?;
            eprintln!(
                "max deviation: magnus(M={}) {:.3e}, rwa {:.3e}; sweep slope {:.3}",
                rep.intervals, rep.magnus_max_deviation, rep.rwa_max_deviation, rep.sweep_slope
            );
            report(&out);
        }
        Command::SpinChain(c) => {
            let mut cfg: SpinChainConfig = load(c)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            if let Some(r) = c.repeats {
                cfg.repeats = r;
            }
            cfg.validate().map_err(config_err)?;
            let rep = spin_chain::run(&cfg).map_err(run_err)?;
            let out = output_path(&c.out, &cfg.out, "spin_chain.csv");
            rep.write(&out).map_err(run_err)?;
            eprintln!("final state error vs RK4({} steps): {:.3e}", cfg.reference_steps, rep.final_error);
            report(&out);
        }
        Command::BenchGivens(c) => {
            let mut cfg: BenchGivensConfig = load(c)?;
            if let Some(r) = c.repeats {
                cfg.repeats = r;
            }
            cfg.validate().map_err(config_err)?;
            let recs = bench_givens(&cfg).map_err(run_err)?;
            let out = output_path(&c.out, &cfg.out, "bench_givens.csv");
            write_rows(&out, &recs).map_err(run_err)?;
            if recs.len() >= 2 {
                eprintln!("time ~ N^{:.3}", givens_scaling_exponent(&recs));
            }
            report(&out);
        }
        Command::BenchMagnus(c) => {
            let mut cfg: BenchMagnusConfig = load(c)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            if let Some(r) = c.repeats {
                cfg.repeats = r;
            }
            cfg.validate().map_err(config_err)?;
            let rows = bench_magnus(&cfg).map_err(run_err)?;
            let out = output_path(&c.out, &cfg.out, "bench_magnus.csv");
            write_rows(&out, &rows).map_err(run_err)?;
            report(&out);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
    }
}
