//! Command-line front end: instance I/O, auction runs, experiment
//! sweeps, and property audits behind a single binary with subcommands.
//!
//! Exit codes are a stable contract: 0 on success, 1 when a property or
//! runtime contract fails (I/O errors, invalid instances, violated
//! audits), 2 on usage errors (bad flags, bad ranges, guard refusals).
//!
//! Configuration precedence: an explicit `--config` path wins, then a
//! path named by the `SEMMARKET_CONFIG` environment variable, then the
//! built-in defaults. Config files are JSON and may be partial; missing
//! fields take their defaults.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::auction::{derive_truthful_bids, run_auction};
use crate::experiments::{
    csv_string, solver_gap_sweep, transmission_compare, winner_list_sweep, write_csv_file, BRange,
};
use crate::model::{
    AuctionOutcome, Instance, MarketConfig, MarketError, SealedBid, SolverKind, WelfareMode,
};
use crate::scenario::{generate_scenario, solver_gap_fixture, two_tier_fixture, GeneratorParams};
use crate::verify::run_property_suites;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "SEMMARKET_CONFIG";

/// Where failing verify runs persist their counterexample by default.
pub const DEFAULT_COUNTEREXAMPLE_PATH: &str = "semmarket-counterexample.json";

#[derive(Debug, Parser)]
#[command(
    name = "semmarket",
    version,
    about = "Sealed reverse-auction simulator for semantic uplink markets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random market instance as JSON.
    Generate {
        /// Number of devices; must be positive.
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output path for the instance JSON.
        #[arg(long)]
        out: PathBuf,
        /// Market configuration JSON (partial files allowed).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Settle one auction round from an instance file.
    Auction {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::ExactDp)]
        solver: SolverArg,
        /// Override the instance's welfare mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Override the instance's channel budget.
        #[arg(long = "b", alias = "B")]
        b: Option<u32>,
        /// Also write the full outcome as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a budget-sweep experiment and emit CSV.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
    /// Run the randomized mechanism property suites.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Largest market size to draw; capped by the enumeration guard.
        #[arg(long = "n-max", default_value_t = 12)]
        n_max: usize,
        /// Where to persist the first failing market, if any.
        #[arg(long, default_value = DEFAULT_COUNTEREXAMPLE_PATH)]
        counterexample_out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Exact vs greedy welfare; defaults to the adversarial fixture.
    SolverGap {
        /// Budget sweep, spelled start:end:step (inclusive).
        #[arg(long = "b", alias = "B", value_parser = parse_brange, default_value = "3:22:1")]
        b: BRange,
        /// Sweep this instance instead of the shipped fixture.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Semantic vs raw winner counts; defaults to a seeded 20-device
    /// population.
    Transmission {
        #[arg(long = "b", alias = "B", value_parser = parse_brange, default_value = "10:40:5")]
        b: BRange,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Winner composition; defaults to the two-tier reference population.
    WinnerList {
        #[arg(long = "b", alias = "B", value_parser = parse_brange, default_value = "3:21:3")]
        b: BRange,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Winner-determination backend, as a flag value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    ExactDp,
    BranchBound,
    Greedy,
    BruteForce,
}

impl From<SolverArg> for SolverKind {
    fn from(arg: SolverArg) -> Self {
        match arg {
            SolverArg::ExactDp => SolverKind::ExactDp,
            SolverArg::BranchBound => SolverKind::BranchBound,
            SolverArg::Greedy => SolverKind::Greedy,
            SolverArg::BruteForce => SolverKind::BruteForce,
        }
    }
}

/// Welfare mode, as a flag value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Literal,
    ValueAware,
}

impl From<ModeArg> for WelfareMode {
    fn from(arg: ModeArg) -> Self {
        match arg {
            ModeArg::Literal => WelfareMode::Literal,
            ModeArg::ValueAware => WelfareMode::ValueAware,
        }
    }
}

fn parse_brange(s: &str) -> Result<BRange, String> {
    s.parse::<BRange>().map_err(|e| e.to_string())
}

fn mode_name(mode: WelfareMode) -> &'static str {
    match mode {
        WelfareMode::Literal => "literal",
        WelfareMode::ValueAware => "value_aware",
    }
}

fn solver_name(solver: SolverKind) -> &'static str {
    match solver {
        SolverKind::ExactDp => "exact_dp",
        SolverKind::BranchBound => "branch_bound",
        SolverKind::Greedy => "greedy",
        SolverKind::BruteForce => "brute_force",
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> MarketError {
    MarketError::Io(format!("{}: {e}", path.display()))
}

/// Reads a JSON instance file.
pub fn read_instance(path: &Path) -> Result<Instance, MarketError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

/// Writes an instance as pretty-printed JSON; byte-identical for
/// identical instances.
pub fn write_instance(instance: &Instance, path: &Path) -> Result<(), MarketError> {
    let text = serde_json::to_string_pretty(instance).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// Resolves the market configuration: `--config` flag, then the
/// `SEMMARKET_CONFIG` environment variable, then built-in defaults.
pub fn load_config(flag: Option<&Path>) -> Result<MarketConfig, MarketError> {
    let path = flag
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        Some(p) => {
            let text = fs::read_to_string(&p).map_err(|e| io_err(&p, e))?;
            serde_json::from_str(&text).map_err(|e| io_err(&p, e))
        }
        None => Ok(MarketConfig::default()),
    }
}

fn exit_code_for(e: &MarketError) -> i32 {
    match e {
        MarketError::InvalidRange(_)
        | MarketError::NonPositive { .. }
        | MarketError::InstanceTooLarge { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` and runs the selected command, returning the process
/// exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// [`run_from`] over the real process arguments.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

fn dispatch(command: Command) -> Result<i32, MarketError> {
    match command {
        Command::Generate {
            n,
            seed,
            out,
            config,
        } => cmd_generate(n, seed, &out, config.as_deref()),
        Command::Auction {
            instance,
            solver,
            mode,
            b,
            out,
        } => cmd_auction(&instance, solver, mode, b, out.as_deref()),
        Command::Experiment { which } => cmd_experiment(which),
        Command::Verify {
            trials,
            seed,
            n_max,
            counterexample_out,
        } => cmd_verify(trials, seed, n_max, &counterexample_out),
    }
}

fn cmd_generate(
    n: usize,
    seed: u64,
    out: &Path,
    config_path: Option<&Path>,
) -> Result<i32, MarketError> {
    let config = load_config(config_path)?;
    let params = GeneratorParams {
        n,
        seed,
        ..GeneratorParams::default()
    };
    let instance = generate_scenario(&params, &config)?;
    write_instance(&instance, out)?;
    let demand: u64 = instance
        .bids
        .as_ref()
        .map(|bids| bids.iter().map(|b| u64::from(b.channel_demand)).sum())
        .unwrap_or(0);
    println!(
        "generated {} devices (seed {}): total channel demand {}, mode {} -> {}",
        n,
        seed,
        demand,
        mode_name(config.welfare_mode),
        out.display()
    );
    Ok(0)
}

fn cmd_auction(
    instance_path: &Path,
    solver: SolverArg,
    mode: Option<ModeArg>,
    b: Option<u32>,
    out: Option<&Path>,
) -> Result<i32, MarketError> {
    let mut instance = read_instance(instance_path)?;
    if let Some(b) = b {
        instance.config.num_channels = b;
    }
    if let Some(mode) = mode {
        instance.config.welfare_mode = mode.into();
    }
    let outcome = run_auction(&instance, solver.into())?;
    let bids = match &instance.bids {
        Some(bids) => bids.clone(),
        None => derive_truthful_bids(&instance)?,
    };
    print_outcome(&bids, &instance.config, &outcome);
    if let Some(path) = out {
        let text =
            serde_json::to_string_pretty(&outcome).map_err(|e| io_err(path, e))?;
        fs::write(path, text + "\n").map_err(|e| io_err(path, e))?;
    }
    Ok(0)
}

fn print_outcome(bids: &[SealedBid], config: &MarketConfig, outcome: &AuctionOutcome) {
    println!("mode: {}", mode_name(config.welfare_mode));
    println!("solver: {}", solver_name(outcome.solver));
    println!(
        "bidders: {}, channel budget: {}",
        bids.len(),
        config.num_channels
    );
    println!("welfare: {}", outcome.social_welfare);
    println!(
        "channels used: {} of {}",
        outcome.channels_used, config.num_channels
    );
    if outcome.winners.is_empty() {
        println!("no winners");
    } else {
        let ids: Vec<String> = outcome.winners.iter().map(usize::to_string).collect();
        println!("winners: {}", ids.join(", "));
        for (i, bid) in bids.iter().enumerate() {
            if !outcome.allocation[i] {
                continue;
            }
            match (&outcome.payments, &outcome.device_utilities) {
                (Some(p), Some(u)) => println!(
                    "  device {}: demand {}, bid {}, payment = {}, utility = {}",
                    bid.device_id, bid.channel_demand, bid.bid, p[i], u[i]
                ),
                _ => println!(
                    "  device {}: demand {}, bid {}",
                    bid.device_id, bid.channel_demand, bid.bid
                ),
            }
        }
    }
    match outcome.vsp_utility {
        Some(v) => println!("vsp utility: {}", v),
        None => println!(
            "payments omitted: greedy outcomes are heuristic, and externality \
             payments are only defined against an exact optimum"
        ),
    }
}

fn cmd_experiment(which: ExperimentCommand) -> Result<i32, MarketError> {
    match which {
        ExperimentCommand::SolverGap { b, instance, out } => {
            let inst = match instance {
                Some(p) => read_instance(&p)?,
                None => solver_gap_fixture(),
            };
            emit(&solver_gap_sweep(&inst, b)?, out.as_deref())
        }
        ExperimentCommand::Transmission { b, instance, out } => {
            let inst = match instance {
                Some(p) => read_instance(&p)?,
                None => generate_scenario(&GeneratorParams::default(), &MarketConfig::default())?,
            };
            emit(&transmission_compare(&inst, b)?, out.as_deref())
        }
        ExperimentCommand::WinnerList { b, instance, out } => {
            let inst = match instance {
                Some(p) => read_instance(&p)?,
                None => two_tier_fixture(3, 1),
            };
            emit(&winner_list_sweep(&inst, b)?, out.as_deref())
        }
    }
}

fn emit<T: serde::Serialize>(records: &[T], out: Option<&Path>) -> Result<i32, MarketError> {
    match out {
        Some(path) => {
            write_csv_file(records, path)?;
            println!("wrote {} rows to {}", records.len(), path.display());
        }
        None => print!("{}", csv_string(records)?),
    }
    Ok(0)
}

fn cmd_verify(
    trials: usize,
    seed: u64,
    n_max: usize,
    counterexample_out: &Path,
) -> Result<i32, MarketError> {
    let outcome = run_property_suites(trials, seed, n_max)?;
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    println!("trials: {} (seed {}, up to {} bidders)", outcome.trials, seed, n_max);
    println!(
        "oracle equivalence (exact vs exhaustive): {}",
        flag(outcome.oracle_ok)
    );
    println!(
        "backend agreement (branch and bound vs exact): {}",
        flag(outcome.backend_ok)
    );
    println!(
        "greedy dominance and budget monotonicity: {}",
        flag(outcome.dominance_ok)
    );
    println!(
        "incentive compatibility: max misreport gain {:e}: {}",
        outcome.max_ic_gain,
        flag(outcome.ic_ok)
    );
    println!("individual rationality: {}", flag(outcome.ir_ok));
    if outcome.all_ok() {
        println!("all property suites passed");
        return Ok(0);
    }
    if let Some(ce) = &outcome.counterexample {
        let text = serde_json::to_string_pretty(ce)
            .map_err(|e| io_err(counterexample_out, e))?;
        fs::write(counterexample_out, text + "\n")
            .map_err(|e| io_err(counterexample_out, e))?;
        eprintln!(
            "counterexample ({}) written to {}",
            ce.label,
            counterexample_out.display()
        );
    }
    println!("property suites FAILED");
    Ok(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_flag_accepts_the_reference_sweep() {
        assert_eq!(
            parse_brange("3:21:3").unwrap(),
            BRange::new(3, 21, 3).unwrap()
        );
        assert!(parse_brange("3:21").is_err());
    }

    #[test]
    fn usage_errors_map_to_exit_code_2() {
        assert_eq!(
            exit_code_for(&MarketError::InvalidRange("x".into())),
            2
        );
        assert_eq!(
            exit_code_for(&MarketError::NonPositive {
                what: "n",
                value: 0.0
            }),
            2
        );
        assert_eq!(
            exit_code_for(&MarketError::InstanceTooLarge { n: 30, max: 25 }),
            2
        );
        assert_eq!(exit_code_for(&MarketError::Io("gone".into())), 1);
        assert_eq!(
            exit_code_for(&MarketError::PaymentsRequireExactSolver),
            1
        );
    }

    #[test]
    fn flag_enums_map_onto_domain_enums() {
        assert_eq!(SolverKind::from(SolverArg::Greedy), SolverKind::Greedy);
        assert_eq!(SolverKind::from(SolverArg::ExactDp), SolverKind::ExactDp);
        assert_eq!(WelfareMode::from(ModeArg::Literal), WelfareMode::Literal);
    }

    #[test]
    fn missing_config_falls_back_to_defaults() {
        // No flag and (in this test) no env override: built-in defaults.
        if std::env::var_os(CONFIG_ENV).is_none() {
            let config = load_config(None).unwrap();
            assert_eq!(config, MarketConfig::default());
        }
    }

    #[test]
    fn cli_definition_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
