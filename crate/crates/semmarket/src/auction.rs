//! Winner determination, welfare accounting, externality payments, and
//! settlement for the sealed reverse channel auction.
//!
//! The provider faces a 0/1 knapsack: each bidder offers one
//! all-or-nothing channel bundle, and the chosen set's demands must fit
//! the channel budget. Three exact backends (dynamic program, branch and
//! bound, exhaustive enumeration) and one heuristic (bid-sorted greedy)
//! solve it; all four report welfare through one canonical summation so
//! that equal allocations produce bit-identical welfare, which in turn
//! lets the test suites assert *exact* agreement instead of approximate.
//!
//! Canonical summation: per-bidder weights are accumulated from the
//! highest device id down, and the channel cost is subtracted last. The
//! dynamic program's table arithmetic produces exactly this association,
//! and IEEE addition is commutative, so a recomputed welfare matches the
//! table bit for bit.
//!
//! Tie-breaking between co-optimal allocations prefers the winner list
//! that includes the smallest undecided device id at the first point of
//! difference (so the lexicographically smallest id list; in the
//! floating-point corner where one optimal list extends another, the
//! longer one). Every backend implements the same rule, which makes the
//! payment rule's re-solves reproducible.
//!
//! Bidders whose weight (surplus in value-aware mode, negated bid in
//! literal mode) is not strictly positive are pruned before any search:
//! they can never appear in a preferred optimal set, and pruning them
//! keeps the tie-break well-defined.

use rayon::prelude::*;

use crate::model::{
    check_bids, AuctionOutcome, Instance, MarketConfig, MarketError, SealedBid, SolverKind,
    WelfareMode,
};

/// Largest bidder count the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_BIDDERS: usize = 25;

/// A solver's raw answer: who won, what it is worth, what it uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// Winner flag per entry of the bid slice the solver ran on.
    pub chosen: Vec<bool>,
    /// Winning device ids, ascending.
    pub winners: Vec<usize>,
    /// Canonical welfare of the selection (mode-dependent, net of the
    /// channel cost).
    pub welfare: f64,
    /// Total channels the selection occupies.
    pub channels_used: u64,
}

/// Per-bidder contribution to the welfare objective: reported value minus
/// bid in value-aware mode, negated bid in literal mode.
pub fn bid_weight(bid: &SealedBid, mode: WelfareMode) -> f64 {
    match mode {
        WelfareMode::ValueAware => bid.semantic_value - bid.bid,
        WelfareMode::Literal => -bid.bid,
    }
}

/// Canonical welfare of a selection: weights of the selected bids summed
/// in descending device-id order, channel cost subtracted last. All
/// solvers and auditors report through this function.
pub fn welfare_of_selection(bids: &[SealedBid], config: &MarketConfig, chosen: &[bool]) -> f64 {
    debug_assert_eq!(bids.len(), chosen.len());
    let mut picked: Vec<(usize, f64)> = bids
        .iter()
        .zip(chosen)
        .filter(|(_, &c)| c)
        .map(|(b, _)| (b.device_id, bid_weight(b, config.welfare_mode)))
        .collect();
    picked.sort_unstable_by_key(|&(id, _)| id);
    let sum = picked.iter().rev().fold(0.0, |acc, &(_, w)| acc + w);
    sum - config.channel_cost
}

/// One pruned, id-sorted solver candidate.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    /// Index into the original bid slice.
    pos: usize,
    id: usize,
    demand: u64,
    weight: f64,
}

/// Keep only bidders that could appear in a preferred optimal set:
/// finite, strictly positive weight. Sorted by device id ascending.
fn candidates(bids: &[SealedBid], config: &MarketConfig) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = bids
        .iter()
        .enumerate()
        .map(|(pos, b)| Candidate {
            pos,
            id: b.device_id,
            demand: u64::from(b.channel_demand),
            weight: bid_weight(b, config.welfare_mode),
        })
        .filter(|c| c.weight.is_finite() && c.weight > 0.0)
        .collect();
    out.sort_unstable_by_key(|c| c.id);
    out
}

fn allocation_from(bids: &[SealedBid], config: &MarketConfig, chosen_pos: &[usize]) -> Allocation {
    let mut chosen = vec![false; bids.len()];
    for &p in chosen_pos {
        chosen[p] = true;
    }
    let mut winners: Vec<usize> = chosen_pos.iter().map(|&p| bids[p].device_id).collect();
    winners.sort_unstable();
    let channels_used = chosen_pos
        .iter()
        .map(|&p| u64::from(bids[p].channel_demand))
        .sum();
    let welfare = welfare_of_selection(bids, config, &chosen);
    Allocation {
        chosen,
        winners,
        welfare,
        channels_used,
    }
}

/// Tie order between equal-welfare winner lists (both ascending): smaller
/// id at the first difference wins; if one list is a prefix of the other,
/// the longer wins (that corner is reachable only through floating-point
/// absorption, and preferring the superset matches the dynamic program's
/// take-first reconstruction).
fn prefers(a: &[usize], b: &[usize]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x < y;
        }
    }
    a.len() > b.len()
}

/// Exact winner determination via a suffix dynamic program over the
/// channel budget, O(candidates × budget) time and space. Falls back to
/// branch and bound when the table would be unreasonably large (huge
/// budgets), which returns identical results.
pub fn solve_wdp_exact(bids: &[SealedBid], config: &MarketConfig) -> Allocation {
    let cands = candidates(bids, config);
    let n = cands.len();
    let total_demand: u64 = cands.iter().map(|c| c.demand).sum();
    let budget = u64::from(config.num_channels).min(total_demand) as usize;

    const MAX_TABLE_CELLS: usize = 64_000_000;
    if (n + 1).saturating_mul(budget + 1) > MAX_TABLE_CELLS {
        return solve_wdp_branch_bound(bids, config);
    }

    let width = budget + 1;
    // dp[i][b] = best canonical suffix sum over candidates i.. within b.
    let mut dp = vec![0.0f64; (n + 1) * width];
    for i in (0..n).rev() {
        let demand = cands[i].demand as usize;
        let weight = cands[i].weight;
        for b in 0..width {
            let skip = dp[(i + 1) * width + b];
            let mut best = skip;
            if demand <= b {
                let take = weight + dp[(i + 1) * width + (b - demand)];
                if take >= skip {
                    best = take;
                }
            }
            dp[i * width + b] = best;
        }
    }

    // Forward reconstruction, taking whenever taking still reaches the
    // optimum (bitwise), which yields the preferred winner list.
    let mut chosen_pos = Vec::new();
    let mut b = budget;
    for i in 0..n {
        let demand = cands[i].demand as usize;
        if demand <= b {
            let take = cands[i].weight + dp[(i + 1) * width + (b - demand)];
            if take == dp[i * width + b] {
                chosen_pos.push(cands[i].pos);
                b -= demand;
            }
        }
    }
    allocation_from(bids, config, &chosen_pos)
}

/// Exact winner determination by depth-first branch and bound over the
/// id-sorted candidates, take-branch first. The bound is the sum of all
/// remaining weights with a slack margin, so no tying branch is ever
/// pruned; the first optimum found is therefore the preferred one.
pub fn solve_wdp_branch_bound(bids: &[SealedBid], config: &MarketConfig) -> Allocation {
    let cands = candidates(bids, config);
    let n = cands.len();
    // suffix_sum[i] = upper bound on what candidates i.. can add.
    let mut suffix_sum = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix_sum[i] = suffix_sum[i + 1] + cands[i].weight;
    }

    struct Search<'a> {
        cands: &'a [Candidate],
        suffix_sum: &'a [f64],
        stack: Vec<usize>,
        best_sum: f64,
        best: Vec<usize>,
        found: bool,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize, budget_left: u64) {
            if i == self.cands.len() {
                // Canonical recompute of this leaf's sum: descending ids.
                let sum = self
                    .stack
                    .iter()
                    .rev()
                    .fold(0.0, |acc, &j| acc + self.cands[j].weight);
                if !self.found || sum > self.best_sum {
                    self.found = true;
                    self.best_sum = sum;
                    self.best = self.stack.clone();
                }
                return;
            }
            if self.found {
                let slack = 1e-9 * (1.0 + self.best_sum.abs());
                let partial: f64 = self
                    .stack
                    .iter()
                    .rev()
                    .fold(0.0, |acc, &j| acc + self.cands[j].weight);
                if partial + self.suffix_sum[i] < self.best_sum - slack {
                    return;
                }
            }
            if self.cands[i].demand <= budget_left {
                self.stack.push(i);
                self.run(i + 1, budget_left - self.cands[i].demand);
                self.stack.pop();
            }
            self.run(i + 1, budget_left);
        }
    }

    let mut search = Search {
        cands: &cands,
        suffix_sum: &suffix_sum,
        stack: Vec::new(),
        best_sum: f64::NEG_INFINITY,
        best: Vec::new(),
        found: false,
    };
    search.run(0, u64::from(config.num_channels));
    let chosen_pos: Vec<usize> = search.best.iter().map(|&j| cands[j].pos).collect();
    allocation_from(bids, config, &chosen_pos)
}

/// Exhaustive test oracle: enumerates every feasible subset and keeps the
/// best under the shared tie order. Refuses more than
/// [`BRUTE_FORCE_MAX_BIDDERS`] bidders.
pub fn solve_wdp_bruteforce(
    bids: &[SealedBid],
    config: &MarketConfig,
) -> Result<Allocation, MarketError> {
    if bids.len() > BRUTE_FORCE_MAX_BIDDERS {
        return Err(MarketError::InstanceTooLarge {
            n: bids.len(),
            max: BRUTE_FORCE_MAX_BIDDERS,
        });
    }
    let cands = candidates(bids, config);
    let n = cands.len();

    // Depth-first over candidates from the highest id down, so the
    // running sum accumulates in canonical order.
    struct Enumerate<'a> {
        cands: &'a [Candidate],
        stack: Vec<usize>,
        best_sum: f64,
        best_ids: Vec<usize>,
        best_idx: Vec<usize>,
        found: bool,
    }

    impl Enumerate<'_> {
        fn run(&mut self, next_below: usize, acc: f64, budget_left: u64) {
            if next_below == 0 {
                let mut ids: Vec<usize> =
                    self.stack.iter().map(|&j| self.cands[j].id).collect();
                ids.reverse(); // pushed descending, so reverse to ascending
                let better = !self.found
                    || acc > self.best_sum
                    || (acc == self.best_sum && prefers(&ids, &self.best_ids));
                if better {
                    self.found = true;
                    self.best_sum = acc;
                    self.best_ids = ids;
                    self.best_idx = self.stack.clone();
                }
                return;
            }
            let i = next_below - 1;
            if self.cands[i].demand <= budget_left {
                self.stack.push(i);
                self.run(i, acc + self.cands[i].weight, budget_left - self.cands[i].demand);
                self.stack.pop();
            }
            self.run(i, acc, budget_left);
        }
    }

    let mut e = Enumerate {
        cands: &cands,
        stack: Vec::new(),
        best_sum: f64::NEG_INFINITY,
        best_ids: Vec::new(),
        best_idx: Vec::new(),
        found: false,
    };
    e.run(n, 0.0, u64::from(config.num_channels));
    let chosen_pos: Vec<usize> = e.best_idx.iter().map(|&j| cands[j].pos).collect();
    Ok(allocation_from(bids, config, &chosen_pos))
}

/// Heuristic baseline: candidates sorted by ascending bid (ties by id)
/// are scanned once; one that does not fit the remaining channels is
/// skipped, and the scan stops at the first candidate whose addition
/// would not increase welfare.
pub fn solve_wdp_greedy(bids: &[SealedBid], config: &MarketConfig) -> Allocation {
    let mut order = candidates(bids, config);
    order.sort_by(|a, b| {
        bids[a.pos]
            .bid
            .partial_cmp(&bids[b.pos].bid)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.id.cmp(&b.id))
    });

    let mut chosen_pos: Vec<usize> = Vec::new();
    let mut chosen = vec![false; bids.len()];
    let mut budget_left = u64::from(config.num_channels);
    let mut welfare = welfare_of_selection(bids, config, &chosen);
    for cand in &order {
        if cand.demand > budget_left {
            continue;
        }
        chosen[cand.pos] = true;
        let trial = welfare_of_selection(bids, config, &chosen);
        if trial > welfare {
            chosen_pos.push(cand.pos);
            budget_left -= cand.demand;
            welfare = trial;
        } else {
            chosen[cand.pos] = false;
            break;
        }
    }
    allocation_from(bids, config, &chosen_pos)
}

/// Winner determination through the chosen backend.
pub fn solve_wdp(
    bids: &[SealedBid],
    config: &MarketConfig,
    solver: SolverKind,
) -> Result<Allocation, MarketError> {
    check_bids(bids)?;
    match solver {
        SolverKind::ExactDp => Ok(solve_wdp_exact(bids, config)),
        SolverKind::BranchBound => Ok(solve_wdp_branch_bound(bids, config)),
        SolverKind::Greedy => Ok(solve_wdp_greedy(bids, config)),
        SolverKind::BruteForce => solve_wdp_bruteforce(bids, config),
    }
}

/// Welfare of the exact optimum over a bid subset, excluding one device.
fn welfare_without(bids: &[SealedBid], config: &MarketConfig, excluded: usize) -> f64 {
    let reduced: Vec<SealedBid> = bids
        .iter()
        .filter(|b| b.device_id != excluded)
        .cloned()
        .collect();
    solve_wdp_exact(&reduced, config).welfare
}

/// Externality payment for every bid position, given the exact optimum.
///
/// A winner is paid the welfare drop its absence would cause, plus its
/// reported value and bid; losers are paid exactly zero by fiat (the
/// formula also evaluates to zero for them, but only up to tie-break
/// agreement, so it is not re-derived). The channel cost cancels in the
/// welfare difference, a fact the property tests pin down.
///
/// The per-winner re-solves are independent and run in parallel; results
/// are positioned deterministically, so the output is identical to a
/// sequential run.
pub fn vcg_payments(
    bids: &[SealedBid],
    config: &MarketConfig,
    allocation: &Allocation,
) -> Result<Vec<f64>, MarketError> {
    check_bids(bids)?;
    let optimal = solve_wdp_exact(bids, config);
    if allocation.welfare != optimal.welfare {
        return Err(MarketError::NotOptimal {
            given: allocation.welfare,
            optimal: optimal.welfare,
        });
    }
    let s_star = allocation.welfare;
    Ok(bids
        .par_iter()
        .zip(allocation.chosen.par_iter())
        .map(|(bid, &won)| {
            if !won {
                return 0.0;
            }
            let s_without = welfare_without(bids, config, bid.device_id);
            (s_star - s_without) + (bid.semantic_value + bid.bid)
        })
        .collect())
}

/// Run the auction end to end: solve, and for exact backends price and
/// account. Heuristic outcomes carry no payments, utilities, or provider
/// utility — the payment rule is only defined against an exact optimum.
pub fn settle(
    bids: &[SealedBid],
    config: &MarketConfig,
    solver: SolverKind,
) -> Result<AuctionOutcome, MarketError> {
    check_bids(bids)?;
    let allocation = solve_wdp(bids, config, solver)?;

    let (payments, utilities, vsp_utility) = if solver.is_exact() {
        let payments = vcg_payments(bids, config, &allocation)?;
        let utilities: Vec<f64> = bids
            .iter()
            .zip(&allocation.chosen)
            .zip(&payments)
            .map(|((bid, &won), &p)| {
                if won {
                    p - bid.semantic_value - bid.bid
                } else {
                    0.0
                }
            })
            .collect();
        let value_received: f64 = bids
            .iter()
            .zip(&allocation.chosen)
            .filter(|(_, &won)| won)
            .map(|(b, _)| b.semantic_value)
            .sum();
        let paid: f64 = payments.iter().sum();
        // Empty sums are IEEE -0.0; adding +0.0 normalizes the sign so
        // reports and JSON never show "-0".
        let vsp = value_received - paid - config.channel_cost + 0.0;

        if config.welfare_mode == WelfareMode::Literal {
            // Accounting identity: seller utilities plus provider utility
            // add up to the social welfare.
            let total_u: f64 = utilities.iter().sum();
            let s = allocation.welfare;
            debug_assert!(
                (total_u + vsp - s).abs() <= 1e-9 * s.abs().max(1.0),
                "literal-mode accounting identity violated: {} vs {}",
                total_u + vsp,
                s
            );
        }
        (Some(payments), Some(utilities), Some(vsp))
    } else {
        (None, None, None)
    };

    Ok(AuctionOutcome {
        allocation: allocation.chosen.clone(),
        winners: allocation.winners.clone(),
        payments,
        device_utilities: utilities,
        vsp_utility,
        social_welfare: allocation.welfare,
        channels_used: allocation.channels_used,
        solver,
    })
}

/// [`settle`], refusing backends that cannot carry payments.
pub fn settle_with_payments(
    bids: &[SealedBid],
    config: &MarketConfig,
    solver: SolverKind,
) -> Result<AuctionOutcome, MarketError> {
    if !solver.is_exact() {
        return Err(MarketError::PaymentsRequireExactSolver);
    }
    settle(bids, config, solver)
}

/// Validate an instance, take its bids (or derive truthful semantic-mode
/// bids from its devices and scenes), and settle.
pub fn run_auction(
    instance: &Instance,
    solver: SolverKind,
) -> Result<AuctionOutcome, MarketError> {
    instance.ensure_valid()?;
    let bids = match &instance.bids {
        Some(b) => b.clone(),
        None => derive_truthful_bids(instance)?,
    };
    settle(&bids, &instance.config, solver)
}

/// Truthful semantic-mode bids for every device of a valid instance.
pub fn derive_truthful_bids(instance: &Instance) -> Result<Vec<SealedBid>, MarketError> {
    instance
        .devices
        .iter()
        .map(|d| {
            let scene = instance.scene_of(d).ok_or(MarketError::InvalidBids(format!(
                "device {} references a missing scene",
                d.id
            )))?;
            crate::semval::make_bid(d, scene, &instance.config, crate::cost::TransmissionMode::Semantic)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bid(id: usize, b: f64, r: f64, c: u32) -> SealedBid {
        SealedBid {
            device_id: id,
            bid: b,
            semantic_value: r,
            channel_demand: c,
        }
    }

    fn cfg(b: u32) -> MarketConfig {
        MarketConfig {
            num_channels: b,
            ..MarketConfig::default()
        }
    }

    #[test]
    fn exact_solver_picks_the_best_knapsack_set() {
        // Surpluses 5, 4, 3 with demands 2, 2, 1 under a budget of 3.
        let bids = vec![bid(0, 1.0, 6.0, 2), bid(1, 1.0, 5.0, 2), bid(2, 1.0, 4.0, 1)];
        let alloc = solve_wdp_exact(&bids, &cfg(3));
        assert_eq!(alloc.winners, vec![0, 2]);
        assert_eq!(alloc.welfare, 8.0);
        assert_eq!(alloc.channels_used, 3);
    }

    #[test]
    fn zero_budget_means_empty_allocation() {
        let bids = vec![bid(0, 1.0, 9.0, 1)];
        let alloc = solve_wdp_exact(&bids, &cfg(0));
        assert!(alloc.winners.is_empty());
        assert_eq!(alloc.welfare, 0.0);
    }

    #[test]
    fn literal_mode_selects_nothing_when_all_bids_are_positive() {
        let config = MarketConfig {
            num_channels: 10,
            welfare_mode: WelfareMode::Literal,
            ..MarketConfig::default()
        };
        let bids = vec![bid(0, 1.0, 9.0, 1), bid(1, 0.5, 9.0, 1)];
        let alloc = solve_wdp_exact(&bids, &config);
        assert!(alloc.winners.is_empty());
        assert_eq!(alloc.welfare, 0.0);
        let brute = solve_wdp_bruteforce(&bids, &config).unwrap();
        assert_eq!(brute.winners, alloc.winners);
        assert_eq!(brute.welfare, alloc.welfare);
    }

    #[test]
    fn greedy_falls_into_the_cheap_bid_trap() {
        // The cheap bidder hogs the whole budget for a surplus of 1; the
        // expensive one would have been worth 8.
        let bids = vec![bid(0, 1.0, 2.0, 3), bid(1, 2.0, 10.0, 3)];
        let greedy = solve_wdp_greedy(&bids, &cfg(3));
        let exact = solve_wdp_exact(&bids, &cfg(3));
        assert_eq!(greedy.winners, vec![0]);
        assert_eq!(greedy.welfare, 1.0);
        assert_eq!(exact.winners, vec![1]);
        assert_eq!(exact.welfare, 8.0);
    }

    #[test]
    fn greedy_matches_exact_on_a_single_improving_bidder() {
        let bids = vec![bid(0, 1.0, 3.0, 2)];
        let greedy = solve_wdp_greedy(&bids, &cfg(5));
        let exact = solve_wdp_exact(&bids, &cfg(5));
        assert_eq!(greedy.winners, exact.winners);
        assert_eq!(greedy.welfare, exact.welfare);
    }

    #[test]
    fn greedy_matches_exact_when_everyone_fits() {
        let bids = vec![
            bid(0, 0.5, 2.0, 1),
            bid(1, 1.0, 4.0, 2),
            bid(2, 1.5, 3.0, 3),
        ];
        let greedy = solve_wdp_greedy(&bids, &cfg(6));
        let exact = solve_wdp_exact(&bids, &cfg(6));
        assert_eq!(greedy.winners, vec![0, 1, 2]);
        assert_eq!(greedy.welfare, exact.welfare);
    }

    #[test]
    fn brute_force_refuses_oversized_inputs_and_handles_empty_ones() {
        let many: Vec<SealedBid> = (0..26).map(|i| bid(i, 1.0, 2.0, 1)).collect();
        assert!(matches!(
            solve_wdp_bruteforce(&many, &cfg(5)),
            Err(MarketError::InstanceTooLarge { n: 26, max: 25 })
        ));
        let config = MarketConfig {
            num_channels: 5,
            channel_cost: 1.5,
            ..MarketConfig::default()
        };
        let empty = solve_wdp_bruteforce(&[], &config).unwrap();
        assert!(empty.winners.is_empty());
        assert_eq!(empty.welfare, -1.5);
    }

    #[test]
    fn backends_agree_on_a_small_instance() {
        let bids = vec![
            bid(0, 1.2, 4.0, 2),
            bid(1, 0.4, 1.9, 1),
            bid(2, 2.0, 7.5, 3),
            bid(3, 0.9, 2.2, 2),
            bid(4, 1.1, 1.0, 1), // negative surplus: pruned everywhere
        ];
        for b in 0..8 {
            let dp = solve_wdp_exact(&bids, &cfg(b));
            let bb = solve_wdp_branch_bound(&bids, &cfg(b));
            let bf = solve_wdp_bruteforce(&bids, &cfg(b)).unwrap();
            assert_eq!(dp.welfare, bb.welfare, "B={b}");
            assert_eq!(dp.welfare, bf.welfare, "B={b}");
            assert_eq!(dp.winners, bb.winners, "B={b}");
            assert_eq!(dp.winners, bf.winners, "B={b}");
            assert!(!dp.winners.contains(&4));
        }
    }

    #[test]
    fn tie_break_prefers_the_smallest_id_list() {
        // Two disjoint optima of identical welfare: {0} and {1}.
        let bids = vec![bid(0, 1.0, 3.0, 2), bid(1, 1.0, 3.0, 2)];
        for solver in [SolverKind::ExactDp, SolverKind::BranchBound, SolverKind::BruteForce] {
            let alloc = solve_wdp(&bids, &cfg(2), solver).unwrap();
            assert_eq!(alloc.winners, vec![0], "{solver:?}");
        }
    }

    #[test]
    fn vcg_payment_matches_the_hand_example() {
        // Winner 0: welfare 5 with it, 3 without; paid 2 + (6 + 1) = 9.
        let bids = vec![bid(0, 1.0, 6.0, 1), bid(1, 1.0, 4.0, 1)];
        let outcome = settle(&bids, &cfg(1), SolverKind::ExactDp).unwrap();
        assert_eq!(outcome.winners, vec![0]);
        let payments = outcome.payments.as_ref().unwrap();
        let utilities = outcome.device_utilities.as_ref().unwrap();
        assert!((payments[0] - 9.0).abs() <= 1e-9);
        assert_eq!(payments[1], 0.0);
        assert!((utilities[0] - 2.0).abs() <= 1e-9);
        assert_eq!(utilities[1], 0.0);
        assert!((outcome.vsp_utility.unwrap() - (6.0 - 9.0)).abs() <= 1e-9);
        assert_eq!(outcome.social_welfare, 5.0);
    }

    #[test]
    fn a_monopolist_captures_its_full_surplus() {
        let bids = vec![bid(0, 2.0, 7.0, 2)];
        let outcome = settle(&bids, &cfg(4), SolverKind::ExactDp).unwrap();
        let payments = outcome.payments.as_ref().unwrap();
        let utilities = outcome.device_utilities.as_ref().unwrap();
        assert!((payments[0] - 14.0).abs() <= 1e-9, "paid twice its value");
        assert!((utilities[0] - 5.0).abs() <= 1e-9, "keeps value minus bid");
    }

    #[test]
    fn losers_are_paid_exactly_zero() {
        let bids = vec![
            bid(0, 1.0, 6.0, 2),
            bid(1, 1.0, 5.5, 2),
            bid(2, 1.0, 2.0, 2),
        ];
        let outcome = settle(&bids, &cfg(4), SolverKind::ExactDp).unwrap();
        assert_eq!(outcome.winners, vec![0, 1]);
        let payments = outcome.payments.as_ref().unwrap();
        let utilities = outcome.device_utilities.as_ref().unwrap();
        assert_eq!(payments[2], 0.0);
        assert_eq!(utilities[2], 0.0);
    }

    #[test]
    fn greedy_settlement_carries_no_payments() {
        let bids = vec![bid(0, 1.0, 2.0, 1)];
        let outcome = settle(&bids, &cfg(2), SolverKind::Greedy).unwrap();
        assert!(outcome.payments.is_none());
        assert!(outcome.device_utilities.is_none());
        assert!(outcome.vsp_utility.is_none());
        assert!(matches!(
            settle_with_payments(&bids, &cfg(2), SolverKind::Greedy),
            Err(MarketError::PaymentsRequireExactSolver)
        ));
    }

    #[test]
    fn payments_reject_a_non_optimal_allocation() {
        let bids = vec![bid(0, 1.0, 6.0, 1), bid(1, 1.0, 4.0, 1)];
        let config = cfg(1);
        let bogus = allocation_from(&bids, &config, &[1]);
        assert!(matches!(
            vcg_payments(&bids, &config, &bogus),
            Err(MarketError::NotOptimal { .. })
        ));
    }

    #[test]
    fn literal_mode_accounting_identity_holds_for_empty_winner_sets() {
        let config = MarketConfig {
            num_channels: 4,
            channel_cost: 2.5,
            welfare_mode: WelfareMode::Literal,
            ..MarketConfig::default()
        };
        let bids = vec![bid(0, 1.0, 5.0, 1)];
        let outcome = settle(&bids, &config, SolverKind::ExactDp).unwrap();
        assert!(outcome.winners.is_empty());
        assert_eq!(outcome.social_welfare, -2.5);
        assert_eq!(outcome.vsp_utility.unwrap(), -2.5);
    }

    #[test]
    fn duplicate_device_ids_are_rejected() {
        let bids = vec![bid(0, 1.0, 2.0, 1), bid(0, 1.0, 2.0, 1)];
        assert!(solve_wdp(&bids, &cfg(2), SolverKind::ExactDp).is_err());
    }
}
