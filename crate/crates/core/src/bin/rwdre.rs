use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rwdre::harness::{emit_outputs, run_experiment, ExperimentSpec, Preset, ResultBody, RunResult};
use rwdre::Error;

#[derive(Parser)]
#[command(name = "rwdre", version, about = "Random walk in a dynamic field of random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single configuration, per-replica output.
    Simulate(Common),
    /// Speed and occupancy over a density grid.
    SpeedCurve(Common),
    /// Occupied fraction over a density grid.
    RhoCurve(Common),
    /// Frozen-field speed and sign classes over a (p, density) grid.
    StaticSolomon(Common),
    /// Block-level tail event frequencies.
    BlockTails(Common),
    /// Coverage probability, density threshold and the closed-loop coverage check.
    Coverage(Common),
    /// Coverage probability only.
    FEstimate(Common),
    /// Scale conditions of the block construction.
    ConstantsCheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Output directory (default: out/<preset>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_BREACH: u8 = 4;

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::InvalidParameter(_) | Error::InvalidKernel(_) | Error::Infeasible(_) => {
            EXIT_CONFIG
        }
        Error::Budget(_) => EXIT_BUDGET,
        _ => 1,
    }
}

fn load(preset: Preset, c: &Common) -> Result<ExperimentSpec, Error> {
    let mut spec = match &c.config {
        Some(path) => ExperimentSpec::from_file(path)?,
        None => ExperimentSpec::new(preset),
    };
    if spec.preset != preset {
        return Err(Error::Config(format!(
            "config preset `{}` does not match the subcommand (`{}`)",
            spec.preset.name(),
            preset.name()
        )));
    }
    if let Some(s) = c.seed {
        spec.seed = s;
    }
    if let Some(r) = c.replicas {
        spec.replicas = r;
    }
    if c.out.is_some() {
        spec.out = c.out.clone();
    }
    if c.workers.is_some() {
        spec.workers = c.workers;
    }
    spec.validate()?;
    Ok(spec)
}

fn report(r: &RunResult) {
    match &r.body {
        ResultBody::Walk { rows, .. } => {
            println!("{:>8} {:>10} {:>9} {:>8} {:>8} {:>10}", "mu", "v", "v_se", "rho", "rho_se", "gap");
            for w in rows {
                println!(
                    "{:>8} {:>10.5} {:>9.5} {:>8.4} {:>8.4} {:>10.2e}",
                    w.mu, w.v, w.v_se, w.rho, w.rho_se, w.gap
                );
            }
        }
        ResultBody::Phase { rows, .. } => {
            println!("{:>5} {:>8} {:>9} {:>10} {:>9} {:>5} {:>9}", "p", "mu", "t", "v", "v_se", "sign", "predicted");
            for w in rows {
                println!(
                    "{:>5} {:>8} {:>9} {:>10.5} {:>9.5} {:>5} {:>9}",
                    w.p,
                    w.mu,
                    w.t,
                    w.v,
                    w.v_se,
                    w.sign.symbol(),
                    w.predicted.symbol()
                );
            }
        }
        ResultBody::Tails(t) => {
            println!("{:>8} {:>6} {:>8} {:>8} {:>8}", "mu", "n", "phi", "gamma", "lambda");
            for w in &t.rows {
                println!(
                    "{:>8} {:>6} {:>8.4} {:>8.4} {:>8.4}",
                    w.mu, w.phi.trials, w.phi.estimate, w.gamma.estimate, w.lambda.estimate
                );
            }
        }
        ResultBody::Coverage(c) => {
            println!(
                "f uniform {:.4} [{:.4}, {:.4}], corner {:.4} [{:.4}, {:.4}]",
                c.f.uniform.estimate, c.f.uniform.lo, c.f.uniform.hi, c.f.corner.estimate, c.f.corner.lo, c.f.corner.hi
            );
            match c.mu1 {
                Some(mu) => println!("density threshold {mu:.4} at eps1 = {}", c.eps1),
                None => println!("density threshold: infinite (no covered trial)"),
            }
            if let Some(l) = &c.closed_loop {
                println!(
                    "uncovered given pedestal: {}/{} = {:.4} (se {:.4}) -> {}",
                    l.conditional.successes,
                    l.conditional.trials,
                    l.conditional.estimate,
                    l.conditional.se(),
                    if l.passes { "within target" } else { "above target" }
                );
            }
        }
        ResultBody::Constants(c) => {
            println!(
                "C0 = {}, gamma0 = {}: gamma bound base 2 {:.4} ({}), base C0 {:.4} ({})",
                c.c0,
                c.gamma0,
                c.gamma_bound_base2,
                ok(c.gamma_ok_base2),
                c.gamma_bound_c0,
                ok(c.gamma_ok_c0)
            );
            for row in &c.rows {
                println!(
                    "r = {}: scale {} ({:.3e} vs {:.3e}), density {} (log lhs {:.3})",
                    row.r,
                    ok(row.const3_ok),
                    row.const3_lhs,
                    row.const3_rhs,
                    ok(row.const4_ok),
                    row.const4_log_lhs
                );
            }
            match c.minimal_c0 {
                Some(b) => println!("smallest admissible C0 in range: {b}"),
                None => println!("no admissible C0 in {:?}", c.c0_range),
            }
        }
    }
    println!(
        "replicas {} (ok {}, breaches {}, truncated {}), {:.1}s",
        r.counts.total, r.counts.ok, r.counts.breaches, r.counts.truncated, r.runtime_seconds
    );
}

fn ok(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (preset, common) = match &cli.command {
        Command::Simulate(c) => (Preset::SingleRun, c),
        Command::SpeedCurve(c) => (Preset::SpeedCurve, c),
        Command::RhoCurve(c) => (Preset::RhoCurve, c),
        Command::StaticSolomon(c) => (Preset::StaticSolomon, c),
        Command::BlockTails(c) => (Preset::BlockTails, c),
        Command::Coverage(c) => (Preset::CoverageProbe, c),
        Command::FEstimate(c) => (Preset::FEstimate, c),
        Command::ConstantsCheck(c) => (Preset::ConstantsReport, c),
    };
    let spec = match load(preset, common) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = match run_experiment(&spec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    };
    let dir = spec
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(preset.name()));
    match emit_outputs(&result, &spec, &dir) {
        Ok(paths) => {
            report(&result);
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    }
    if result.truncated() {
        eprintln!("warning: {} replicas hit the event budget", result.counts.truncated);
        return ExitCode::from(EXIT_BUDGET);
    }
    if result.unreliable {
        eprintln!(
            "warning: breach rate {:.2}% exceeds the limit of {:.2}%",
            100.0 * result.breach_rate,
            100.0 * spec.run.breach_limit
        );
        return ExitCode::from(EXIT_BREACH);
    }
    ExitCode::SUCCESS
}
