//! Desk-scale experiment harness: budget sweeps over a fixed market,
//! reported as CSV.
//!
//! Three experiments are provided, each producing one row per channel
//! budget:
//!
//! * solver gap — `B,welfare_exact,welfare_greedy,gap`
//! * transmission comparison — `B,winners_semantic,winners_raw,welfare_semantic,welfare_raw`
//! * winner list — `B,winner_count,winners,groups`
//!
//! Budgets are spelled `start:end:step` (inclusive), so `3:21:3` sweeps
//! seven budgets. Every sweep re-solves the winner-determination problem
//! with the exact solver and re-checks feasibility before a row is
//! emitted.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auction::{solve_wdp_exact, solve_wdp_greedy};
use crate::cost::TransmissionMode;
use crate::model::{Instance, MarketError, SealedBid};
use crate::scenario::{build_bids, two_tier_fixture};

/// Inclusive arithmetic budget range, parsed from `start:end:step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BRange {
    pub start: u32,
    pub end: u32,
    pub step: u32,
}

impl BRange {
    pub fn new(start: u32, end: u32, step: u32) -> Result<Self, MarketError> {
        if step == 0 {
            return Err(MarketError::InvalidRange(
                "step must be positive".to_string(),
            ));
        }
        if start > end {
            return Err(MarketError::InvalidRange(format!(
                "start {start} exceeds end {end}"
            )));
        }
        Ok(BRange { start, end, step })
    }

    /// The budgets the range covers, in ascending order.
    pub fn budgets(&self) -> Vec<u32> {
        (self.start..=self.end)
            .step_by(self.step as usize)
            .collect()
    }
}

impl FromStr for BRange {
    type Err = MarketError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(MarketError::InvalidRange(format!(
                "expected start:end:step, got {s:?}"
            )));
        }
        let parse = |part: &str, what: &str| {
            part.trim().parse::<u32>().map_err(|_| {
                MarketError::InvalidRange(format!("{what} {part:?} is not a whole number"))
            })
        };
        BRange::new(
            parse(parts[0], "start")?,
            parse(parts[1], "end")?,
            parse(parts[2], "step")?,
        )
    }
}

impl fmt::Display for BRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

/// One row of the exact-vs-greedy comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverGapRecord {
    #[serde(rename = "B")]
    pub b: u32,
    pub welfare_exact: f64,
    pub welfare_greedy: f64,
    /// `welfare_exact - welfare_greedy`; never negative.
    pub gap: f64,
}

/// One row of the semantic-vs-raw transmission comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionRecord {
    #[serde(rename = "B")]
    pub b: u32,
    pub winners_semantic: usize,
    pub winners_raw: usize,
    pub welfare_semantic: f64,
    pub welfare_raw: f64,
}

/// One row of the winner-list sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinnerListRecord {
    #[serde(rename = "B")]
    pub b: u32,
    pub winner_count: usize,
    /// Winning device ids, ascending, semicolon-joined.
    pub winners: String,
    /// Group tag per winner (same order as `winners`), semicolon-joined.
    pub groups: String,
}

fn instance_bids(instance: &Instance) -> Result<Vec<SealedBid>, MarketError> {
    instance.ensure_valid()?;
    match &instance.bids {
        Some(bids) => Ok(bids.clone()),
        None => build_bids(instance, TransmissionMode::Semantic),
    }
}

fn assert_feasible(bids: &[SealedBid], winners: &[usize], budget: u32) {
    let used: u64 = winners
        .iter()
        .map(|id| {
            u64::from(
                bids.iter()
                    .find(|b| b.device_id == *id)
                    .expect("winner must hold a bid")
                    .channel_demand,
            )
        })
        .sum();
    assert!(
        used <= u64::from(budget),
        "allocation uses {used} channels with only {budget} available"
    );
}

/// Sweeps the budget range, solving each market exactly and greedily.
pub fn solver_gap_sweep(
    instance: &Instance,
    range: BRange,
) -> Result<Vec<SolverGapRecord>, MarketError> {
    let bids = instance_bids(instance)?;
    Ok(range
        .budgets()
        .par_iter()
        .map(|&b| {
            let config = instance.config.with_channels(b);
            let exact = solve_wdp_exact(&bids, &config);
            let greedy = solve_wdp_greedy(&bids, &config);
            assert_feasible(&bids, &exact.winners, b);
            assert_feasible(&bids, &greedy.winners, b);
            SolverGapRecord {
                b,
                welfare_exact: exact.welfare,
                welfare_greedy: greedy.welfare,
                gap: exact.welfare - greedy.welfare,
            }
        })
        .collect())
}

/// Sweeps the budget range twice over the same population: once with
/// devices bidding to ship compact semantic payloads, once with the
/// same devices bidding to ship their raw captures. Any explicit bids
/// on the instance are ignored — both bid sets are derived from the
/// devices so the two columns describe the same hardware.
pub fn transmission_compare(
    instance: &Instance,
    range: BRange,
) -> Result<Vec<TransmissionRecord>, MarketError> {
    instance.ensure_valid()?;
    let semantic = build_bids(instance, TransmissionMode::Semantic)?;
    let raw = build_bids(instance, TransmissionMode::Raw)?;
    Ok(range
        .budgets()
        .par_iter()
        .map(|&b| {
            let config = instance.config.with_channels(b);
            let sem = solve_wdp_exact(&semantic, &config);
            let rw = solve_wdp_exact(&raw, &config);
            assert_feasible(&semantic, &sem.winners, b);
            assert_feasible(&raw, &rw.winners, b);
            TransmissionRecord {
                b,
                winners_semantic: sem.winners.len(),
                winners_raw: rw.winners.len(),
                welfare_semantic: sem.welfare,
                welfare_raw: rw.welfare,
            }
        })
        .collect())
}

/// Group tag for the two-tier reference population: devices 0–4 carry
/// richer scenes (group 1), devices 5–9 sparser ones (group 2).
pub fn device_group(device_id: usize) -> u32 {
    if device_id < 5 {
        1
    } else {
        2
    }
}

/// Sweeps the budget range over the two-tier reference population and
/// records who wins at each budget.
pub fn winner_list_experiment(range: BRange) -> Result<Vec<WinnerListRecord>, MarketError> {
    let instance = two_tier_fixture(3, 1);
    winner_list_sweep(&instance, range)
}

/// Winner-list sweep over an arbitrary instance.
pub fn winner_list_sweep(
    instance: &Instance,
    range: BRange,
) -> Result<Vec<WinnerListRecord>, MarketError> {
    let bids = instance_bids(instance)?;
    Ok(range
        .budgets()
        .par_iter()
        .map(|&b| {
            let config = instance.config.with_channels(b);
            let outcome = solve_wdp_exact(&bids, &config);
            assert_feasible(&bids, &outcome.winners, b);
            let winners: Vec<String> = outcome.winners.iter().map(|id| id.to_string()).collect();
            let groups: Vec<String> = outcome
                .winners
                .iter()
                .map(|&id| device_group(id).to_string())
                .collect();
            WinnerListRecord {
                b,
                winner_count: outcome.winners.len(),
                winners: winners.join(";"),
                groups: groups.join(";"),
            }
        })
        .collect())
}

/// Serializes records as CSV with a header row.
pub fn write_csv<T: Serialize, W: Write>(records: &[T], out: W) -> Result<(), MarketError> {
    let mut writer = csv::Writer::from_writer(out);
    for record in records {
        writer
            .serialize(record)
            .map_err(|e| MarketError::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| MarketError::Io(e.to_string()))
}

/// Serializes records as CSV to a file path.
pub fn write_csv_file<T: Serialize>(records: &[T], path: &Path) -> Result<(), MarketError> {
    let file = std::fs::File::create(path).map_err(|e| MarketError::Io(e.to_string()))?;
    write_csv(records, file)
}

/// Renders records as a CSV string (handy for stdout reporting).
pub fn csv_string<T: Serialize>(records: &[T]) -> Result<String, MarketError> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| MarketError::Io(e.to_string()))
}
