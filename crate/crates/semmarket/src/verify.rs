//! Executable mechanism-design properties: incentive compatibility (no
//! bidder gains by misreporting its cost), individual rationality (no
//! winner is worse off for participating), and solver-oracle agreement.
//!
//! The audits recompute payments through one shared routine. Setting the
//! environment variable `SEMMARKET_VERIFY_FAULT=overpay` makes that
//! routine deliberately overpay winners by 10% of their submitted bid —
//! a negative control proving the suites can actually fail.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auction::{solve_wdp_branch_bound, solve_wdp_bruteforce, solve_wdp_exact};
use crate::model::{check_bids, MarketConfig, MarketError, SealedBid, WelfareMode};
use crate::scenario::SeededRng;

/// Absolute tolerance for every property assertion.
pub const TOLERANCE: f64 = 1e-9;

/// Misreport multipliers every audit tries: underbidding by half, mild
/// shading, mild padding, and doubling.
pub const DEFAULT_DEVIATION_GRID: [f64; 4] = [0.5, 0.8, 1.2, 2.0];

fn fault_active() -> bool {
    std::env::var("SEMMARKET_VERIFY_FAULT")
        .map(|v| v == "overpay")
        .unwrap_or(false)
}

/// Externality payment for one winner, recomputed from first principles
/// (and misbehaving on purpose when the fault hook is armed).
fn audited_payment(s_with: f64, s_without: f64, value: f64, submitted_bid: f64) -> f64 {
    let p = (s_with - s_without) + (value + submitted_bid);
    if fault_active() {
        p + 0.1 * submitted_bid
    } else {
        p
    }
}

fn exact_welfare_without(bids: &[SealedBid], config: &MarketConfig, excluded: usize) -> f64 {
    let reduced: Vec<SealedBid> = bids
        .iter()
        .filter(|b| b.device_id != excluded)
        .cloned()
        .collect();
    solve_wdp_exact(&reduced, config).welfare
}

/// The single most profitable misreport an audit found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcDeviation {
    pub device_id: usize,
    /// Misreported bid as a multiple of the true cost.
    pub multiplier: f64,
    /// Utility gained over truthful bidding (positive would break IC).
    pub gain: f64,
}

/// Result of an incentive-compatibility audit over one bid set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcReport {
    /// Largest utility gain any tried misreport achieved.
    pub max_gain: f64,
    pub worst: Option<IcDeviation>,
    pub deviations_tested: usize,
}

impl IcReport {
    pub fn holds(&self) -> bool {
        self.max_gain <= TOLERANCE
    }
}

/// Result of an individual-rationality audit over one bid set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrReport {
    /// Smallest winner utility (losers earn exactly zero by construction).
    pub min_winner_utility: f64,
    /// Largest deviation of a winner's utility from its welfare
    /// contribution (the marginal-contribution identity).
    pub max_identity_error: f64,
    pub winners: usize,
}

impl IrReport {
    pub fn holds(&self) -> bool {
        self.min_winner_utility >= -TOLERANCE && self.max_identity_error <= TOLERANCE
    }
}

/// Combined audit outcome for one bid set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub ic: IcReport,
    pub ir: IrReport,
}

impl AuditReport {
    pub fn holds(&self) -> bool {
        self.ic.holds() && self.ir.holds()
    }
}

/// Audits incentive compatibility: every device in turn misreports its
/// cost by each grid multiplier plus `trials` seeded random multipliers
/// (drawn once from `[0.25, 3]`), utilities are evaluated at the true
/// cost, and the maximum gain over truthful bidding is reported.
///
/// The submitted bids are taken to BE the true costs (truthful round),
/// and reported values are provider-verified, so only the price is
/// strategic.
pub fn ic_audit(
    bids: &[SealedBid],
    config: &MarketConfig,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<IcReport, MarketError> {
    check_bids(bids)?;
    let mut multipliers: Vec<f64> = grid.to_vec();
    let mut rng = SeededRng::new(seed);
    for _ in 0..trials {
        multipliers.push(rng.uniform_f64(0.25, 3.0));
    }
    for &m in &multipliers {
        if !(m.is_finite() && m > 0.0) {
            return Err(MarketError::NonPositive {
                what: "deviation multiplier",
                value: m,
            });
        }
    }

    let truthful = solve_wdp_exact(bids, config);
    let s_star = truthful.welfare;

    let per_device: Vec<(usize, f64, f64)> = bids
        .par_iter()
        .enumerate()
        .map(|(k, bid)| {
            let s_minus = exact_welfare_without(bids, config, bid.device_id);
            let true_cost = bid.bid;
            let base_utility = if truthful.chosen[k] {
                audited_payment(s_star, s_minus, bid.semantic_value, true_cost)
                    - bid.semantic_value
                    - true_cost
            } else {
                0.0
            };

            let mut worst_gain = f64::NEG_INFINITY;
            let mut worst_mult = multipliers[0];
            for &m in &multipliers {
                let mut deviated = bids.to_vec();
                deviated[k].bid = m * true_cost;
                let outcome = solve_wdp_exact(&deviated, config);
                let utility = if outcome.chosen[k] {
                    // The bidder-less sub-market is unchanged by k's own
                    // misreport, so s_minus is reused.
                    audited_payment(
                        outcome.welfare,
                        s_minus,
                        deviated[k].semantic_value,
                        deviated[k].bid,
                    ) - deviated[k].semantic_value
                        - true_cost
                } else {
                    0.0
                };
                let gain = utility - base_utility;
                if gain > worst_gain {
                    worst_gain = gain;
                    worst_mult = m;
                }
            }
            (bid.device_id, worst_mult, worst_gain)
        })
        .collect();

    let mut report = IcReport {
        max_gain: f64::NEG_INFINITY,
        worst: None,
        deviations_tested: multipliers.len() * bids.len(),
    };
    for (device_id, multiplier, gain) in per_device {
        if gain > report.max_gain {
            report.max_gain = gain;
            report.worst = Some(IcDeviation {
                device_id,
                multiplier,
                gain,
            });
        }
    }
    if bids.is_empty() {
        report.max_gain = 0.0;
    }
    Ok(report)
}

/// Audits individual rationality: every winner's utility must be
/// non-negative and equal its marginal welfare contribution.
pub fn ir_audit(bids: &[SealedBid], config: &MarketConfig) -> Result<IrReport, MarketError> {
    check_bids(bids)?;
    let alloc = solve_wdp_exact(bids, config);
    let s_star = alloc.welfare;

    let stats: Vec<(f64, f64)> = bids
        .par_iter()
        .zip(alloc.chosen.par_iter())
        .filter(|(_, &won)| won)
        .map(|(bid, _)| {
            let s_minus = exact_welfare_without(bids, config, bid.device_id);
            let payment = audited_payment(s_star, s_minus, bid.semantic_value, bid.bid);
            let utility = payment - bid.semantic_value - bid.bid;
            let identity_error = (utility - (s_star - s_minus)).abs();
            (utility, identity_error)
        })
        .collect();

    Ok(IrReport {
        min_winner_utility: stats.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        max_identity_error: stats.iter().map(|s| s.1).fold(0.0, f64::max),
        winners: stats.len(),
    })
}

/// IC and IR together.
pub fn audit_instance(
    bids: &[SealedBid],
    config: &MarketConfig,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<AuditReport, MarketError> {
    Ok(AuditReport {
        ic: ic_audit(bids, config, grid, trials, seed)?,
        ir: ir_audit(bids, config)?,
    })
}

/// A failing random instance, persisted so the failure can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub label: String,
    pub detail: String,
    pub config: MarketConfig,
    pub bids: Vec<SealedBid>,
}

/// Aggregate outcome of the randomized property suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub trials: usize,
    /// Exact-DP vs exhaustive enumeration: identical welfare and winners.
    pub oracle_ok: bool,
    /// Exact-DP vs branch and bound: identical welfare and winners.
    pub backend_ok: bool,
    /// Greedy never beats the optimum, and welfare never falls as the
    /// budget grows.
    pub dominance_ok: bool,
    pub ic_ok: bool,
    pub ir_ok: bool,
    pub max_ic_gain: f64,
    pub counterexample: Option<Counterexample>,
}

impl SuiteOutcome {
    pub fn all_ok(&self) -> bool {
        self.oracle_ok && self.backend_ok && self.dominance_ok && self.ic_ok && self.ir_ok
    }
}

/// One seeded random market: dense ids, positive bids, small demands.
/// Mostly value-aware; one trial in four runs in literal mode, where the
/// degenerate empty optimum must also survive every audit.
pub fn random_market(rng: &mut SeededRng, n_max: usize, b_max: u32) -> (Vec<SealedBid>, MarketConfig) {
    let n = rng.uniform_u64(1, n_max as u64) as usize;
    let bids: Vec<SealedBid> = (0..n)
        .map(|id| SealedBid {
            device_id: id,
            bid: rng.uniform_f64(0.1, 5.0),
            semantic_value: rng.uniform_f64(0.0, 10.0),
            channel_demand: rng.uniform_u64(1, 6) as u32,
        })
        .collect();
    let config = MarketConfig {
        num_channels: rng.uniform_u64(0, u64::from(b_max)) as u32,
        channel_cost: if rng.chance(0.5) { 0.0 } else { 1.5 },
        welfare_mode: if rng.chance(0.25) {
            WelfareMode::Literal
        } else {
            WelfareMode::ValueAware
        },
        ..MarketConfig::default()
    };
    (bids, config)
}

/// Runs the oracle-equivalence, backend-agreement, greedy-dominance,
/// monotonicity, IC, and IR suites over `trials` seeded random markets
/// with at most `n_max` bidders. Deterministic in `(trials, seed, n_max)`.
/// The first failing check is captured as a counterexample and the
/// remaining trials are still executed (their checks count toward the
/// flags, but only the first counterexample is kept).
pub fn run_property_suites(
    trials: usize,
    seed: u64,
    n_max: usize,
) -> Result<SuiteOutcome, MarketError> {
    if n_max > crate::auction::BRUTE_FORCE_MAX_BIDDERS {
        return Err(MarketError::InstanceTooLarge {
            n: n_max,
            max: crate::auction::BRUTE_FORCE_MAX_BIDDERS,
        });
    }
    if n_max == 0 {
        return Err(MarketError::NonPositive {
            what: "n_max",
            value: 0.0,
        });
    }

    let mut rng = SeededRng::new(seed);
    let markets: Vec<(Vec<SealedBid>, MarketConfig)> = (0..trials)
        .map(|_| random_market(&mut rng, n_max, 40))
        .collect();

    struct TrialResult {
        oracle_ok: bool,
        backend_ok: bool,
        dominance_ok: bool,
        ic_ok: bool,
        ir_ok: bool,
        max_ic_gain: f64,
        failure: Option<(String, String)>,
    }

    let results: Vec<TrialResult> = markets
        .par_iter()
        .enumerate()
        .map(|(i, (bids, config))| {
            let mut r = TrialResult {
                oracle_ok: true,
                backend_ok: true,
                dominance_ok: true,
                ic_ok: true,
                ir_ok: true,
                max_ic_gain: 0.0,
                failure: None,
            };
            let note = |r: &mut TrialResult, label: &str, detail: String| {
                if r.failure.is_none() {
                    r.failure = Some((label.to_string(), detail));
                }
            };

            let dp = solve_wdp_exact(bids, config);
            let bf = solve_wdp_bruteforce(bids, config).expect("n_max is guarded");
            if dp.welfare != bf.welfare || dp.winners != bf.winners {
                r.oracle_ok = false;
                note(
                    &mut r,
                    "oracle",
                    format!(
                        "dp welfare {} winners {:?} vs brute force {} {:?}",
                        dp.welfare, dp.winners, bf.welfare, bf.winners
                    ),
                );
            }
            let bb = solve_wdp_branch_bound(bids, config);
            if bb.welfare != dp.welfare || bb.winners != dp.winners {
                r.backend_ok = false;
                note(
                    &mut r,
                    "backend",
                    format!(
                        "branch-and-bound welfare {} winners {:?} vs dp {} {:?}",
                        bb.welfare, bb.winners, dp.welfare, dp.winners
                    ),
                );
            }
            let greedy = crate::auction::solve_wdp_greedy(bids, config);
            if greedy.welfare > dp.welfare {
                r.dominance_ok = false;
                note(
                    &mut r,
                    "dominance",
                    format!("greedy {} beats exact {}", greedy.welfare, dp.welfare),
                );
            }
            let wider = solve_wdp_exact(
                bids,
                &config.with_channels(config.num_channels.saturating_add(1)),
            );
            if wider.welfare < dp.welfare {
                r.dominance_ok = false;
                note(
                    &mut r,
                    "monotonicity",
                    format!(
                        "welfare fell from {} to {} when the budget grew",
                        dp.welfare, wider.welfare
                    ),
                );
            }

            match audit_instance(bids, config, &DEFAULT_DEVIATION_GRID, 2, seed ^ (i as u64)) {
                Ok(audit) => {
                    r.max_ic_gain = audit.ic.max_gain.max(0.0);
                    if !audit.ic.holds() {
                        r.ic_ok = false;
                        note(
                            &mut r,
                            "incentive-compatibility",
                            format!("worst deviation {:?}", audit.ic.worst),
                        );
                    }
                    if !audit.ir.holds() {
                        r.ir_ok = false;
                        note(
                            &mut r,
                            "individual-rationality",
                            format!(
                                "min winner utility {}, max identity error {}",
                                audit.ir.min_winner_utility, audit.ir.max_identity_error
                            ),
                        );
                    }
                }
                Err(e) => {
                    r.ic_ok = false;
                    r.ir_ok = false;
                    note(&mut r, "audit-error", e.to_string());
                }
            }
            r
        })
        .collect();

    let mut outcome = SuiteOutcome {
        trials,
        oracle_ok: true,
        backend_ok: true,
        dominance_ok: true,
        ic_ok: true,
        ir_ok: true,
        max_ic_gain: 0.0,
        counterexample: None,
    };
    for (i, r) in results.iter().enumerate() {
        outcome.oracle_ok &= r.oracle_ok;
        outcome.backend_ok &= r.backend_ok;
        outcome.dominance_ok &= r.dominance_ok;
        outcome.ic_ok &= r.ic_ok;
        outcome.ir_ok &= r.ir_ok;
        outcome.max_ic_gain = outcome.max_ic_gain.max(r.max_ic_gain);
        if outcome.counterexample.is_none() {
            if let Some((label, detail)) = &r.failure {
                outcome.counterexample = Some(Counterexample {
                    label: label.clone(),
                    detail: detail.clone(),
                    config: markets[i].1.clone(),
                    bids: markets[i].0.clone(),
                });
            }
        }
    }
    Ok(outcome)
}
