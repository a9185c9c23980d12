//! Randomized property net: cost algebra, solver agreement, mechanism
//! guarantees, and serialization round-trips.

use proptest::prelude::*;
use semmarket::auction::{
    solve_wdp_branch_bound, solve_wdp_bruteforce, solve_wdp_exact, solve_wdp_greedy,
};
use semmarket::cost::{
    communication_cost, raw_collection_cost, semantic_extraction_cost, service_cost,
};
use semmarket::model::{
    AlgorithmKind, Device, Instance, MarketConfig, SealedBid, SensorKind, SensorReading,
    SolverKind, WelfareMode,
};
use semmarket::{
    generate_scenario, settle, solver_gap_fixture, two_tier_fixture, vcg_payments,
    winner_drop_fixture, GeneratorParams, TransmissionMode,
};

const REL_TOL: f64 = 1e-12;

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn camera_reading(size: f64, cost: f64) -> SensorReading {
    SensorReading {
        sensor_kind: SensorKind::Camera,
        raw_size_kb: size,
        per_unit_compute_cost: cost,
    }
}

fn device_from(readings: Vec<SensorReading>, dt: f64, gamma: f64, beta: f64) -> Device {
    Device {
        id: 0,
        readings,
        algorithm: AlgorithmKind::MaskRcnn,
        extraction_time_s: dt,
        per_step_compute_cost: gamma,
        per_unit_tx_cost: beta,
        scene_id: 0,
    }
}

fn device_strategy() -> impl Strategy<Value = Device> {
    (
        prop::collection::vec((1.0f64..1000.0, 0.0f64..0.05), 1..=4),
        0.0f64..2.0,
        0.0f64..2.0,
        0.0f64..0.1,
    )
        .prop_map(|(rows, dt, gamma, beta)| {
            let readings = rows
                .into_iter()
                .map(|(s, c)| camera_reading(s, c))
                .collect();
            device_from(readings, dt, gamma, beta)
        })
}

fn bids_strategy() -> impl Strategy<Value = Vec<SealedBid>> {
    prop::collection::vec((0.1f64..5.0, 0.0f64..10.0, 1u32..=6), 1..=12).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(id, (bid, value, demand))| SealedBid {
                device_id: id,
                bid,
                semantic_value: value,
                channel_demand: demand,
            })
            .collect()
    })
}

fn config_strategy() -> impl Strategy<Value = MarketConfig> {
    (0u32..=40, prop::bool::ANY, prop::bool::ANY).prop_map(|(b, costly, literal)| MarketConfig {
        num_channels: b,
        channel_cost: if costly { 1.5 } else { 0.0 },
        welfare_mode: if literal {
            WelfareMode::Literal
        } else {
            WelfareMode::ValueAware
        },
        ..MarketConfig::default()
    })
}

mod cost_algebra {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// Collection cost over a combined sensor suite equals the sum
        /// over its parts.
        #[test]
        fn collection_is_additive_over_readings(
            rows in prop::collection::vec((1.0f64..1000.0, 0.0f64..0.05), 2..=6),
            split in 1usize..=5,
        ) {
            let split = split.min(rows.len() - 1);
            let all: Vec<_> = rows.iter().map(|&(s, c)| camera_reading(s, c)).collect();
            let whole = raw_collection_cost(&device_from(all.clone(), 0.0, 0.0, 0.0));
            let left = raw_collection_cost(&device_from(all[..split].to_vec(), 0.0, 0.0, 0.0));
            let right = raw_collection_cost(&device_from(all[split..].to_vec(), 0.0, 0.0, 0.0));
            prop_assert!(rel_close(whole, left + right), "{whole} vs {}", left + right);
        }

        /// Scaling every raw capture scales the collection cost linearly.
        #[test]
        fn collection_is_homogeneous_in_size(
            device in device_strategy(),
            lambda in 0.1f64..10.0,
        ) {
            let scaled = device_from(
                device
                    .readings
                    .iter()
                    .map(|r| camera_reading(r.raw_size_kb * lambda, r.per_unit_compute_cost))
                    .collect(),
                device.extraction_time_s,
                device.per_step_compute_cost,
                device.per_unit_tx_cost,
            );
            prop_assert!(rel_close(
                raw_collection_cost(&scaled),
                lambda * raw_collection_cost(&device)
            ));
        }

        /// The reported total is the sum of its own components, bitwise.
        #[test]
        fn total_is_the_componentwise_sum(
            device in device_strategy(),
            demand in 1u32..=8,
            mode in prop::bool::ANY,
        ) {
            let config = MarketConfig::default();
            let mode = if mode { TransmissionMode::Semantic } else { TransmissionMode::Raw };
            let cost = service_cost(&device, demand, &config, mode);
            prop_assert_eq!(
                cost.total,
                cost.collection + cost.extraction + cost.communication
            );
        }

        /// Growing any input never shrinks the matching component.
        #[test]
        fn components_are_monotone(
            device in device_strategy(),
            demand in 1u32..=8,
            extra_size in 1.0f64..500.0,
            extra_time in 0.0f64..1.0,
        ) {
            let config = MarketConfig::default();
            let mut bigger = device.clone();
            bigger.readings.push(camera_reading(extra_size, 0.01));
            prop_assert!(raw_collection_cost(&bigger) >= raw_collection_cost(&device));

            let mut slower = device.clone();
            slower.extraction_time_s += extra_time;
            prop_assert!(semantic_extraction_cost(&slower) >= semantic_extraction_cost(&device));

            prop_assert!(
                communication_cost(&device, demand + 1, &config)
                    >= communication_cost(&device, demand, &config)
            );
        }

        /// Raw transmission skips extraction and changes nothing else.
        #[test]
        fn raw_mode_only_drops_extraction(
            device in device_strategy(),
            demand in 1u32..=8,
        ) {
            let config = MarketConfig::default();
            let semantic = service_cost(&device, demand, &config, TransmissionMode::Semantic);
            let raw = service_cost(&device, demand, &config, TransmissionMode::Raw);
            prop_assert_eq!(raw.collection, semantic.collection);
            prop_assert_eq!(raw.communication, semantic.communication);
            prop_assert_eq!(raw.extraction, 0.0);
        }
    }
}

mod solver_agreement {
    use super::*;

    proptest! {
        /// The dynamic program and exhaustive enumeration agree bitwise,
        /// winners included.
        #[test]
        fn dp_matches_brute_force(bids in bids_strategy(), config in config_strategy()) {
            let dp = solve_wdp_exact(&bids, &config);
            let bf = solve_wdp_bruteforce(&bids, &config).unwrap();
            prop_assert_eq!(dp.welfare, bf.welfare);
            prop_assert_eq!(dp.winners, bf.winners);
        }

        /// Branch and bound agrees with the dynamic program.
        #[test]
        fn branch_bound_matches_dp(bids in bids_strategy(), config in config_strategy()) {
            let dp = solve_wdp_exact(&bids, &config);
            let bb = solve_wdp_branch_bound(&bids, &config);
            prop_assert_eq!(dp.welfare, bb.welfare);
            prop_assert_eq!(dp.winners, bb.winners);
        }

        /// The heuristic never reports more welfare than the optimum.
        #[test]
        fn greedy_never_beats_exact(bids in bids_strategy(), config in config_strategy()) {
            let dp = solve_wdp_exact(&bids, &config);
            let greedy = solve_wdp_greedy(&bids, &config);
            prop_assert!(greedy.welfare <= dp.welfare);
        }

        /// More channels never hurt.
        #[test]
        fn welfare_is_monotone_in_the_budget(
            bids in bids_strategy(),
            config in config_strategy(),
        ) {
            let here = solve_wdp_exact(&bids, &config);
            let wider = solve_wdp_exact(&bids, &config.with_channels(config.num_channels + 1));
            prop_assert!(wider.welfare >= here.welfare);
        }

        /// No solver ever allocates past the budget.
        #[test]
        fn allocations_fit_the_budget(bids in bids_strategy(), config in config_strategy()) {
            for solver in [
                SolverKind::ExactDp,
                SolverKind::BranchBound,
                SolverKind::Greedy,
                SolverKind::BruteForce,
            ] {
                let outcome = settle(&bids, &config, solver).unwrap();
                prop_assert!(outcome.channels_used <= u64::from(config.num_channels));
            }
        }

        /// The provider's fixed channel cost shifts welfare but never the
        /// selection, and payments move by at most rounding noise.
        #[test]
        fn channel_cost_does_not_steer_selection(bids in bids_strategy(), b in 0u32..=40) {
            let free = MarketConfig { num_channels: b, channel_cost: 0.0, ..MarketConfig::default() };
            let costly = MarketConfig { channel_cost: 1.5, ..free.clone() };
            let a = solve_wdp_exact(&bids, &free);
            let z = solve_wdp_exact(&bids, &costly);
            prop_assert_eq!(&a.winners, &z.winners);
            prop_assert!(((a.welfare - z.welfare) - 1.5).abs() <= 1e-9);

            let pa = vcg_payments(&bids, &free, &a).unwrap();
            let pz = vcg_payments(&bids, &costly, &z).unwrap();
            for (x, y) in pa.iter().zip(&pz) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }

        /// Losers are paid exactly zero and settlement is deterministic.
        #[test]
        fn settlement_is_deterministic_and_losers_get_nothing(
            bids in bids_strategy(),
            config in config_strategy(),
        ) {
            let once = settle(&bids, &config, SolverKind::ExactDp).unwrap();
            let twice = settle(&bids, &config, SolverKind::ExactDp).unwrap();
            prop_assert_eq!(&once, &twice);
            let payments = once.payments.as_ref().unwrap();
            for (i, &won) in once.allocation.iter().enumerate() {
                if !won {
                    prop_assert_eq!(payments[i], 0.0);
                }
            }
        }
    }
}

mod mechanism_audits {
    use super::*;
    use semmarket::verify::{audit_instance, DEFAULT_DEVIATION_GRID};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Truthfulness and participation stay rational on random markets.
        #[test]
        fn audits_hold(bids in bids_strategy(), config in config_strategy(), seed in 0u64..1000) {
            let report = audit_instance(&bids, &config, &DEFAULT_DEVIATION_GRID, 1, seed).unwrap();
            prop_assert!(report.holds(), "{report:?}");
        }
    }
}

#[test]
fn instances_round_trip_through_json() {
    let generated = generate_scenario(
        &GeneratorParams {
            n: 6,
            seed: 11,
            ..GeneratorParams::default()
        },
        &MarketConfig::default(),
    )
    .unwrap();
    for instance in [
        two_tier_fixture(3, 1),
        solver_gap_fixture(),
        winner_drop_fixture(),
        generated,
    ] {
        let text = serde_json::to_string(&instance).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(instance, back);
        assert!(back.validate().is_valid());
    }
}

#[test]
fn outcomes_round_trip_through_json() {
    let instance = winner_drop_fixture();
    let outcome = semmarket::run_auction(&instance, SolverKind::ExactDp).unwrap();
    let text = serde_json::to_string(&outcome).unwrap();
    let back: semmarket::AuctionOutcome = serde_json::from_str(&text).unwrap();
    assert_eq!(outcome, back);
}

#[test]
fn experiment_csv_rows_parse_back() {
    let records =
        semmarket::solver_gap_sweep(&solver_gap_fixture(), semmarket::BRange::new(3, 9, 2).unwrap())
            .unwrap();
    let text = semmarket::experiments::csv_string(&records).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let back: Vec<semmarket::SolverGapRecord> =
        reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(records, back);
}
