//! Seeded synthetic scenario generation — the stand-in for real sensor
//! corpora — plus the fixed fixtures the experiments and tests run on.
//!
//! Determinism contract: every random quantity is drawn from a ChaCha8
//! stream seeded with a caller-supplied 64-bit seed, through the two
//! explicit mappings documented on [`SeededRng`]. No platform- or
//! version-dependent sampling is used anywhere, so identical parameters
//! produce identical instances everywhere.

use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::model::{
    AlgorithmKind, Device, Instance, MarketConfig, MarketError, ObjectSemantics, SceneSemantics,
    SealedBid, SensorKind, SensorReading,
};
use crate::semval::{make_bid_with, SizeBasis};

/// Deterministic random source: ChaCha8 behind two fixed mappings.
///
/// - `uniform_f64(lo, hi)` = `lo + (hi − lo) · m` where `m` is the top 53
///   bits of `next_u64` scaled by 2⁻⁵³ (so `m ∈ [0, 1)`).
/// - `uniform_u64(lo, hi)` (inclusive) reduces `next_u64` modulo the span;
///   the modulo bias is ≤ span/2⁶⁴ and accepted for stability.
pub struct SeededRng(rand_chacha::ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform_f64(&mut self, lo: f64, hi: f64) -> f64 {
        let m = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * m
    }

    /// Uniform integer in `lo..=hi`.
    pub fn uniform_u64(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        let span = hi - lo + 1;
        lo + self.next_u64() % span
    }

    /// True with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform_f64(0.0, 1.0) < p
    }
}

/// Which semantic aspects a sensor modality can populate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaCaps {
    pub speed: bool,
    pub size: bool,
    pub position: bool,
    pub direction: bool,
}

impl DeltaCaps {
    /// Radar measures relative speed and position.
    pub const RADAR: DeltaCaps = DeltaCaps {
        speed: true,
        size: false,
        position: true,
        direction: false,
    };
    /// Cameras see size and moving direction.
    pub const CAMERA: DeltaCaps = DeltaCaps {
        speed: false,
        size: true,
        position: false,
        direction: true,
    };
    /// Camera + radar fusion covers everything.
    pub const ALL: DeltaCaps = DeltaCaps {
        speed: true,
        size: true,
        position: true,
        direction: true,
    };
}

/// One extraction algorithm's profile: output quality, how long it runs,
/// and which semantic aspects its modality can populate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmProfile {
    pub algorithm: AlgorithmKind,
    /// Extraction quality in [0, 1]; becomes each detected object's
    /// quality.
    pub quality: f64,
    pub extraction_time_s: f64,
    pub caps: DeltaCaps,
}

/// Default profile table. Quality magnitudes are declared configuration,
/// not ground truth; their ordering is what matters — the radar-only
/// RAMP-CNN profile is strictly the weakest and the camera+radar fusion
/// strictly the strongest.
pub fn default_profiles() -> Vec<AlgorithmProfile> {
    vec![
        AlgorithmProfile {
            algorithm: AlgorithmKind::MaskRcnn,
            quality: 0.74,
            extraction_time_s: 0.30,
            caps: DeltaCaps::CAMERA,
        },
        AlgorithmProfile {
            algorithm: AlgorithmKind::RampCnnRa,
            quality: 0.45,
            extraction_time_s: 0.12,
            caps: DeltaCaps::RADAR,
        },
        AlgorithmProfile {
            algorithm: AlgorithmKind::Fcn8sRa,
            quality: 0.55,
            extraction_time_s: 0.15,
            caps: DeltaCaps::RADAR,
        },
        AlgorithmProfile {
            algorithm: AlgorithmKind::Fcn8sRd,
            quality: 0.55,
            extraction_time_s: 0.18,
            caps: DeltaCaps::RADAR,
        },
        AlgorithmProfile {
            algorithm: AlgorithmKind::TmvaNet,
            quality: 0.68,
            extraction_time_s: 0.22,
            caps: DeltaCaps::RADAR,
        },
        AlgorithmProfile {
            algorithm: AlgorithmKind::MaskRcnnTmvaNet,
            quality: 0.80,
            extraction_time_s: 0.52,
            caps: DeltaCaps::ALL,
        },
    ]
}

/// Checks the quality-ordering contract of a profile table: the RAMP-CNN
/// entry (if present) is strictly the lowest quality and the camera+radar
/// fusion entry (if present) strictly the highest.
pub fn check_profiles(profiles: &[AlgorithmProfile]) -> Result<(), MarketError> {
    if profiles.is_empty() {
        return Err(MarketError::InvalidBids("profile table is empty".into()));
    }
    for p in profiles {
        if !(p.quality.is_finite() && (0.0..=1.0).contains(&p.quality)) {
            return Err(MarketError::InvalidBids(format!(
                "profile {:?}: quality must lie in [0, 1]",
                p.algorithm
            )));
        }
        if !(p.extraction_time_s.is_finite() && p.extraction_time_s >= 0.0) {
            return Err(MarketError::InvalidBids(format!(
                "profile {:?}: extraction time must be non-negative",
                p.algorithm
            )));
        }
        let others = profiles.iter().filter(|o| o.algorithm != p.algorithm);
        match p.algorithm {
            AlgorithmKind::RampCnnRa => {
                for o in others {
                    if o.quality <= p.quality {
                        return Err(MarketError::InvalidBids(
                            "profile table violates the quality ordering: RAMP-CNN must be strictly the lowest".into(),
                        ));
                    }
                }
            }
            AlgorithmKind::MaskRcnnTmvaNet => {
                for o in others {
                    if o.quality >= p.quality {
                        return Err(MarketError::InvalidBids(
                            "profile table violates the quality ordering: the camera+radar fusion must be strictly the highest".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Everything the generator draws from, with defaults matching the
/// shipped experiments (20 devices, camera frames of 500 kb, radar views
/// of 256 kb, semantic payloads of a few kilobits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorParams {
    pub n: usize,
    pub seed: u64,
    pub profiles: Vec<AlgorithmProfile>,
    pub camera_raw_kb: f64,
    pub radar_raw_kb: f64,
    /// Uniform range for the semantic mask payload, kilobits.
    pub mask_payload_kb: (f64, f64),
    /// Metadata is drawn uniformly from (0, this].
    pub metadata_max_kb: f64,
    /// Inclusive range for the number of detected objects per scene.
    pub object_count: (u64, u64),
    pub weather: (f64, f64),
    /// Per-kilobit collection cost range.
    pub collection_cost: (f64, f64),
    /// Per-second extraction cost range.
    pub step_cost: (f64, f64),
    /// Per-(kbps·channel) transmission cost range.
    pub tx_cost: (f64, f64),
    /// Probability that a capable semantic aspect is actually present.
    pub flag_presence: f64,
    pub size_basis: SizeBasis,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n: 20,
            seed: 42,
            profiles: default_profiles(),
            camera_raw_kb: 500.0,
            radar_raw_kb: 256.0,
            mask_payload_kb: (2.0, 6.0),
            metadata_max_kb: 1.0,
            object_count: (1, 5),
            weather: (0.5, 1.0),
            collection_cost: (0.00005, 0.0002),
            step_cost: (0.5, 1.5),
            tx_cost: (0.005, 0.02),
            flag_presence: 0.85,
            size_basis: SizeBasis::RawSize,
        }
    }
}

/// Generates a validated instance: `n` devices with uniformly assigned
/// algorithm profiles, one scene per device, and truthful semantic-mode
/// bids. Deterministic in the parameters.
pub fn generate_scenario(
    params: &GeneratorParams,
    config: &MarketConfig,
) -> Result<Instance, MarketError> {
    if params.n == 0 {
        return Err(MarketError::NonPositive {
            what: "population size",
            value: 0.0,
        });
    }
    check_profiles(&params.profiles)?;
    let mut rng = SeededRng::new(params.seed);
    let mut devices = Vec::with_capacity(params.n);
    let mut scenes = Vec::with_capacity(params.n);

    for id in 0..params.n {
        let profile =
            &params.profiles[rng.uniform_u64(0, params.profiles.len() as u64 - 1) as usize];
        let readings: Vec<SensorReading> = profile
            .algorithm
            .sensor_views()
            .iter()
            .map(|&kind| SensorReading {
                sensor_kind: kind,
                raw_size_kb: match kind {
                    SensorKind::Camera => params.camera_raw_kb,
                    _ => params.radar_raw_kb,
                },
                per_unit_compute_cost: rng
                    .uniform_f64(params.collection_cost.0, params.collection_cost.1),
            })
            .collect();
        let raw_size_kb: f64 = readings.iter().map(|r| r.raw_size_kb).sum();

        let object_count = rng.uniform_u64(params.object_count.0, params.object_count.1) as usize;
        let objects: Vec<ObjectSemantics> = (0..object_count)
            .map(|_| ObjectSemantics {
                has_speed: profile.caps.speed && rng.chance(params.flag_presence),
                has_size: profile.caps.size && rng.chance(params.flag_presence),
                has_position: profile.caps.position && rng.chance(params.flag_presence),
                has_direction: profile.caps.direction && rng.chance(params.flag_presence),
                quality: profile.quality,
            })
            .collect();

        let weather = rng
            .uniform_f64(params.weather.0, params.weather.1)
            .clamp(config.w_min, 1.0);
        let mask = rng.uniform_f64(params.mask_payload_kb.0, params.mask_payload_kb.1);
        let metadata = rng.uniform_f64(0.0, params.metadata_max_kb);
        let semantic_payload_kb = (mask + metadata).min(raw_size_kb);

        scenes.push(SceneSemantics {
            object_count,
            objects,
            weather,
            raw_size_kb,
            semantic_payload_kb,
        });
        devices.push(Device {
            id,
            readings,
            algorithm: profile.algorithm,
            extraction_time_s: profile.extraction_time_s,
            per_step_compute_cost: rng.uniform_f64(params.step_cost.0, params.step_cost.1),
            per_unit_tx_cost: rng.uniform_f64(params.tx_cost.0, params.tx_cost.1),
            scene_id: id,
        });
    }

    let bids = devices
        .iter()
        .map(|d| {
            make_bid_with(
                d,
                &scenes[d.scene_id],
                config,
                crate::cost::TransmissionMode::Semantic,
                params.size_basis,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let instance = Instance {
        config: config.clone(),
        devices,
        scenes,
        bids: Some(bids),
    };
    let report = instance.validate();
    if !report.is_valid() {
        return Err(MarketError::InvalidInstance(report));
    }
    Ok(instance)
}

/// Spec-shaped convenience wrapper around [`generate_scenario`].
pub fn generate_population(
    n: usize,
    seed: u64,
    config: &MarketConfig,
    profiles: &[AlgorithmProfile],
) -> Result<(Vec<Device>, Vec<SceneSemantics>, Vec<SealedBid>), MarketError> {
    let params = GeneratorParams {
        n,
        seed,
        profiles: profiles.to_vec(),
        ..GeneratorParams::default()
    };
    let instance = generate_scenario(&params, config)?;
    Ok((
        instance.devices,
        instance.scenes,
        instance.bids.expect("generator always emits bids"),
    ))
}

/// Truthful bids for every device of an instance under the given mode.
pub fn build_bids(
    instance: &Instance,
    mode: crate::cost::TransmissionMode,
) -> Result<Vec<SealedBid>, MarketError> {
    build_bids_with(instance, mode, SizeBasis::default())
}

/// [`build_bids`] with an explicit size basis for the value term.
pub fn build_bids_with(
    instance: &Instance,
    mode: crate::cost::TransmissionMode,
    basis: SizeBasis,
) -> Result<Vec<SealedBid>, MarketError> {
    instance
        .devices
        .iter()
        .map(|d| {
            let scene = instance
                .scene_of(d)
                .ok_or_else(|| MarketError::InvalidBids(format!(
                    "device {} references a missing scene",
                    d.id
                )))?;
            make_bid_with(d, scene, &instance.config, mode, basis)
        })
        .collect()
}

fn fixed_reading(kind: SensorKind, size: f64) -> SensorReading {
    SensorReading {
        sensor_kind: kind,
        raw_size_kb: size,
        per_unit_compute_cost: 0.0001,
    }
}

fn objects_for(caps: DeltaCaps, quality: f64, count: usize) -> Vec<ObjectSemantics> {
    (0..count)
        .map(|_| ObjectSemantics {
            has_speed: caps.speed,
            has_size: caps.size,
            has_position: caps.position,
            has_direction: caps.direction,
            quality,
        })
        .collect()
}

/// The two-group, ten-device fixture: both groups hold the same five
/// device rows (camera/Mask R-CNN, radar/RAMP-CNN, radar/FCN-8s,
/// radar/TMVA-NET, camera+radar fusion), but group 1 (ids 0–4) observes
/// scenes with `objects_group1` objects while group 2 (ids 5–9) observes
/// `objects_group2`. Masks scale with the object count, so richer scenes
/// demand more channels.
///
/// Under the default quality table and a sweep of the channel budget from
/// 3 to 21, group-1 devices win first, and at a budget of 15 the group-2
/// fusion device (id 9) enters the winner list while group 1's RAMP-CNN
/// device (id 1) drops out.
pub fn two_tier_fixture(objects_group1: usize, objects_group2: usize) -> Instance {
    let profiles = default_profiles();
    let row_algorithms = [
        AlgorithmKind::MaskRcnn,
        AlgorithmKind::RampCnnRa,
        AlgorithmKind::Fcn8sRa,
        AlgorithmKind::TmvaNet,
        AlgorithmKind::MaskRcnnTmvaNet,
    ];
    let config = MarketConfig {
        num_channels: 21,
        ..MarketConfig::default()
    };

    let mut devices = Vec::new();
    let mut scenes = Vec::new();
    for id in 0..10 {
        let algorithm = row_algorithms[id % 5];
        let profile = profiles
            .iter()
            .find(|p| p.algorithm == algorithm)
            .expect("default table covers every row");
        let object_count = if id < 5 { objects_group1 } else { objects_group2 };

        let readings: Vec<SensorReading> = algorithm
            .sensor_views()
            .iter()
            .map(|&kind| match kind {
                SensorKind::Camera => fixed_reading(kind, 500.0),
                _ => fixed_reading(kind, 256.0),
            })
            .collect();
        let raw_size_kb: f64 = readings.iter().map(|r| r.raw_size_kb).sum();
        let views = readings.len() as f64;
        // Per-view mask grows with scene richness; metadata rides along.
        let semantic_payload_kb = (7.5 + 2.0 * object_count as f64) * views + 0.75;

        scenes.push(SceneSemantics {
            object_count,
            objects: objects_for(profile.caps, profile.quality, object_count),
            weather: 0.8,
            raw_size_kb,
            semantic_payload_kb: semantic_payload_kb.min(raw_size_kb),
        });
        devices.push(Device {
            id,
            readings,
            algorithm,
            extraction_time_s: profile.extraction_time_s,
            per_step_compute_cost: 1.0,
            per_unit_tx_cost: 0.01,
            scene_id: id,
        });
    }

    let mut instance = Instance {
        config,
        devices,
        scenes,
        bids: None,
    };
    let bids = build_bids(&instance, crate::cost::TransmissionMode::Semantic)
        .expect("fixture bids are always derivable");
    instance.bids = Some(bids);
    instance
}

/// Adversarial bid set for the solver comparison: one cheap, low-surplus,
/// budget-hogging bidder leads the greedy scan astray at small budgets,
/// while at 22 channels everyone fits and the two solvers coincide.
pub fn solver_gap_fixture() -> Instance {
    // (bid, reported value, channel demand); surpluses 1.0, 0.8, 8, 5, 4, 3, 2.
    let rows = [
        (0.5_f64, 1.5_f64, 3_u32),
        (0.8, 1.6, 2),
        (1.0, 9.0, 3),
        (1.5, 6.5, 2),
        (2.0, 6.0, 4),
        (2.5, 5.5, 3),
        (3.0, 5.0, 5),
    ];
    let config = MarketConfig {
        num_channels: 22,
        ..MarketConfig::default()
    };
    let mut devices = Vec::new();
    let mut scenes = Vec::new();
    let mut bids = Vec::new();
    for (id, &(bid, value, demand)) in rows.iter().enumerate() {
        devices.push(Device {
            id,
            readings: vec![fixed_reading(SensorKind::Camera, 100.0)],
            algorithm: AlgorithmKind::MaskRcnn,
            extraction_time_s: 0.1,
            per_step_compute_cost: 1.0,
            per_unit_tx_cost: 0.01,
            scene_id: id,
        });
        scenes.push(SceneSemantics {
            object_count: 1,
            objects: objects_for(DeltaCaps::CAMERA, 0.74, 1),
            weather: 1.0,
            raw_size_kb: 100.0,
            semantic_payload_kb: 5.0,
        });
        bids.push(SealedBid {
            device_id: id,
            bid,
            semantic_value: value,
            channel_demand: demand,
        });
    }
    Instance {
        config,
        devices,
        scenes,
        bids: Some(bids),
    }
}

/// Three-device fixture whose semantic-mode winner count falls from two
/// to one as the budget grows from 25 to 30 channels, while welfare
/// rises: a bulky, very valuable fusion device displaces two smaller
/// winners the moment its 28-channel bundle fits.
pub fn winner_drop_fixture() -> Instance {
    let config = MarketConfig::default();
    let rows: [(AlgorithmKind, DeltaCaps, f64, f64, usize, f64, f64); 3] = [
        // (algorithm, caps, quality, weather, objects, extraction time, payload)
        (AlgorithmKind::MaskRcnn, DeltaCaps::CAMERA, 0.74, 0.8, 3, 0.30, 95.0),
        (AlgorithmKind::TmvaNet, DeltaCaps::RADAR, 0.68, 0.8, 3, 0.22, 95.0),
        (AlgorithmKind::MaskRcnnTmvaNet, DeltaCaps::ALL, 0.80, 0.5, 5, 0.52, 275.0),
    ];
    let mut devices = Vec::new();
    let mut scenes = Vec::new();
    for (id, &(algorithm, caps, quality, weather, count, dt, payload)) in rows.iter().enumerate() {
        let readings: Vec<SensorReading> = algorithm
            .sensor_views()
            .iter()
            .map(|&kind| match kind {
                SensorKind::Camera => fixed_reading(kind, 500.0),
                _ => fixed_reading(kind, 256.0),
            })
            .collect();
        let raw_size_kb: f64 = readings.iter().map(|r| r.raw_size_kb).sum();
        scenes.push(SceneSemantics {
            object_count: count,
            objects: objects_for(caps, quality, count),
            weather,
            raw_size_kb,
            semantic_payload_kb: payload,
        });
        devices.push(Device {
            id,
            readings,
            algorithm,
            extraction_time_s: dt,
            per_step_compute_cost: 1.0,
            per_unit_tx_cost: 0.01,
            scene_id: id,
        });
    }
    let mut instance = Instance {
        config,
        devices,
        scenes,
        bids: None,
    };
    let bids = build_bids(&instance, crate::cost::TransmissionMode::Semantic)
        .expect("fixture bids are always derivable");
    instance.bids = Some(bids);
    instance
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{settle, solve_wdp_exact};
    use crate::model::SolverKind;

    #[test]
    fn generation_is_deterministic() {
        let cfg = MarketConfig::default();
        let params = GeneratorParams::default();
        let a = generate_scenario(&params, &cfg).unwrap();
        let b = generate_scenario(&params, &cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_scenario(
            &GeneratorParams {
                seed: 43,
                ..GeneratorParams::default()
            },
            &cfg,
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_instances_validate_and_respect_profiles() {
        let cfg = MarketConfig::default();
        for seed in [1_u64, 7, 42, 99] {
            let params = GeneratorParams {
                seed,
                ..GeneratorParams::default()
            };
            let inst = generate_scenario(&params, &cfg).unwrap();
            assert!(inst.validate().is_valid());
            assert_eq!(inst.devices.len(), 20);
            let ramp_quality = 0.45;
            for d in &inst.devices {
                let scene = inst.scene_of(d).unwrap();
                assert!(scene.semantic_payload_kb <= scene.raw_size_kb);
                if d.algorithm == AlgorithmKind::RampCnnRa {
                    for o in &scene.objects {
                        assert_eq!(o.quality, ramp_quality);
                        assert!(!o.has_size && !o.has_direction, "radar cannot see size");
                    }
                }
            }
        }
    }

    #[test]
    fn bad_profile_tables_are_refused() {
        let mut table = default_profiles();
        table[0].quality = 0.2; // camera below RAMP-CNN breaks the ordering
        assert!(check_profiles(&table).is_err());
        assert!(check_profiles(&default_profiles()).is_ok());
        assert!(check_profiles(&[]).is_err());
    }

    #[test]
    fn two_tier_fixture_has_the_expected_shape() {
        let inst = two_tier_fixture(3, 1);
        assert!(inst.validate().is_valid());
        assert_eq!(inst.devices.len(), 10);
        assert_eq!(inst.devices[4].algorithm, AlgorithmKind::MaskRcnnTmvaNet);
        assert_eq!(inst.devices[9].algorithm, AlgorithmKind::MaskRcnnTmvaNet);
        let bids = inst.bids.as_ref().unwrap();
        let demands: Vec<u32> = bids.iter().map(|b| b.channel_demand).collect();
        assert_eq!(demands, vec![2, 2, 2, 3, 5, 2, 2, 2, 2, 3]);
        // Group-2 fusion must out-value group-1's RAMP-CNN for the
        // winner-list swap to exist.
        let surplus = |i: usize| bids[i].semantic_value - bids[i].bid;
        assert!(surplus(9) > surplus(1));
    }

    #[test]
    fn two_tier_fixture_with_empty_scenes_reduces_to_the_size_term() {
        let inst = two_tier_fixture(0, 0);
        assert!(inst.validate().is_valid());
        for (bid, device) in inst.bids.as_ref().unwrap().iter().zip(&inst.devices) {
            let raw = inst.scene_of(device).unwrap().raw_size_kb;
            assert_eq!(bid.semantic_value, 1.0 / raw);
        }
    }

    #[test]
    fn solver_gap_fixture_saturates_at_twenty_two_channels() {
        let inst = solver_gap_fixture();
        assert!(inst.validate().is_valid());
        let bids = inst.bids.as_ref().unwrap();
        let total: u64 = bids.iter().map(|b| u64::from(b.channel_demand)).sum();
        assert_eq!(total, 22);
    }

    #[test]
    fn winner_drop_fixture_drops_a_winner_between_25_and_30() {
        let inst = winner_drop_fixture();
        assert!(inst.validate().is_valid());
        let bids = inst.bids.as_ref().unwrap();
        let at = |b: u32| {
            let cfg = inst.config.with_channels(b);
            solve_wdp_exact(bids, &cfg)
        };
        let narrow = at(25);
        let wide = at(30);
        assert_eq!(narrow.winners.len(), 2);
        assert_eq!(wide.winners.len(), 1);
        assert!(wide.welfare > narrow.welfare);
    }

    #[test]
    fn fixture_auctions_settle_cleanly() {
        let inst = two_tier_fixture(3, 1);
        let outcome = settle(
            inst.bids.as_ref().unwrap(),
            &inst.config,
            SolverKind::ExactDp,
        )
        .unwrap();
        assert!(!outcome.winners.is_empty());
        assert!(outcome.payments.is_some());
    }
}
