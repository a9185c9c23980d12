//! Domain types shared by every other module: devices, scenes, bids,
//! market configuration, auction outcomes, and the instance container
//! with its report-style validator.
//!
//! All quantities are plain 64-bit reals in abstract units: data sizes in
//! kilobits, rates in kbps, times in seconds, money in cost-units. Types
//! are immutable after construction and safe to share across threads.

use serde::{Deserialize, Serialize};

/// Sensor modality attached to an IoT device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SensorKind {
    #[serde(rename = "camera")]
    Camera,
    /// Radar, range-angle view.
    #[serde(rename = "radar_RA")]
    RadarRangeAngle,
    /// Radar, range-Doppler view.
    #[serde(rename = "radar_RD")]
    RadarRangeDoppler,
}

/// Semantic-extraction algorithm a device runs on its raw data.
///
/// The combined camera+radar profile fuses the camera and radar pipelines
/// and covers every semantic aspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    #[serde(rename = "MaskRCNN")]
    MaskRcnn,
    #[serde(rename = "RAMP_CNN_RA")]
    RampCnnRa,
    #[serde(rename = "FCN8s_RA")]
    Fcn8sRa,
    #[serde(rename = "FCN8s_RD")]
    Fcn8sRd,
    #[serde(rename = "TMVA_NET")]
    TmvaNet,
    #[serde(rename = "MaskRCNN+TMVA_NET")]
    MaskRcnnTmvaNet,
}

impl AlgorithmKind {
    /// Sensor views this algorithm consumes; drives which raw readings a
    /// device of this kind collects.
    pub fn sensor_views(self) -> &'static [SensorKind] {
        use SensorKind::*;
        match self {
            AlgorithmKind::MaskRcnn => &[Camera],
            AlgorithmKind::RampCnnRa => &[RadarRangeAngle],
            AlgorithmKind::Fcn8sRa => &[RadarRangeAngle],
            AlgorithmKind::Fcn8sRd => &[RadarRangeDoppler],
            AlgorithmKind::TmvaNet => &[RadarRangeAngle, RadarRangeDoppler],
            AlgorithmKind::MaskRcnnTmvaNet => &[Camera, RadarRangeAngle, RadarRangeDoppler],
        }
    }
}

/// One raw capture by one sensor: its size and the per-kilobit cost of
/// collecting it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorReading {
    pub sensor_kind: SensorKind,
    /// Size of the collected raw data, kilobits. Non-negative.
    pub raw_size_kb: f64,
    /// Computation cost per kilobit of raw collection. Non-negative.
    pub per_unit_compute_cost: f64,
}

/// An IoT seller: its sensor suite, cost coefficients, extraction
/// algorithm, and the scene it observed this round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    /// Dense id, unique within a market instance (0..N-1).
    pub id: usize,
    /// At least one reading; one entry per supported sensor.
    pub readings: Vec<SensorReading>,
    pub algorithm: AlgorithmKind,
    /// Wall time the semantic extraction takes, seconds.
    pub extraction_time_s: f64,
    /// Computation cost per second of extraction.
    pub per_step_compute_cost: f64,
    /// Transmission energy cost per (kbps * channel).
    pub per_unit_tx_cost: f64,
    /// Index into the instance's scene list.
    pub scene_id: usize,
}

impl Device {
    /// Total raw data size across all readings, kilobits.
    pub fn total_raw_size_kb(&self) -> f64 {
        self.readings.iter().map(|r| r.raw_size_kb).sum()
    }
}

/// Semantic flags and model quality for one detected object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSemantics {
    /// Relative speed information present.
    pub has_speed: bool,
    /// Size information present.
    pub has_size: bool,
    /// Relative position information present.
    pub has_position: bool,
    /// Moving-direction information present.
    pub has_direction: bool,
    /// Extraction-model quality for this object, in [0, 1].
    pub quality: f64,
}

impl ObjectSemantics {
    /// Number of semantic aspects present for this object (0..=4).
    pub fn flag_count(&self) -> u32 {
        self.has_speed as u32
            + self.has_size as u32
            + self.has_position as u32
            + self.has_direction as u32
    }
}

/// Extracted content of one sensed scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSemantics {
    /// Number of detected objects; must equal `objects.len()`.
    pub object_count: usize,
    pub objects: Vec<ObjectSemantics>,
    /// Weather condition scaled to [w_min, 1]; lower means worse weather
    /// and more valuable semantics.
    pub weather: f64,
    /// Total raw data size behind this scene, kilobits. Positive.
    pub raw_size_kb: f64,
    /// Mask payload plus metadata actually transmitted in semantic mode,
    /// kilobits. Positive and never larger than `raw_size_kb`.
    pub semantic_payload_kb: f64,
}

/// A device's sealed submission: reported price and semantic value plus
/// its all-or-nothing channel demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SealedBid {
    pub device_id: usize,
    /// Reported service price, cost-units. Positive and finite.
    pub bid: f64,
    /// Reported semantic value; treated as verifiable by the provider.
    pub semantic_value: f64,
    /// Channels demanded, all-or-nothing. At least 1.
    pub channel_demand: u32,
}

/// Objective used for winner determination and welfare accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum WelfareMode {
    /// Welfare is the negated sum of winning bids minus the channel cost.
    /// Degenerate on purpose: with positive bids the empty allocation is
    /// always optimal. Kept for the accounting identities.
    #[serde(rename = "literal")]
    Literal,
    /// Welfare sums each winner's surplus (semantic value minus bid) and
    /// subtracts the channel cost. Default.
    #[serde(rename = "value_aware")]
    #[default]
    ValueAware,
}

/// Deterministic tie-breaking rule between co-optimal allocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TieBreak {
    /// Prefer the lexicographically smallest ascending winner-id list.
    #[serde(rename = "ascending_id")]
    #[default]
    AscendingId,
}

/// Provider-side market parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketConfig {
    /// Number of uplink channels on offer.
    pub num_channels: u32,
    /// Capacity of each channel, kbps. Positive.
    pub channel_rate_kbps: f64,
    /// Information-freshness threshold: maximum transmission time, seconds.
    pub freshness_threshold_s: f64,
    /// Provider's cost of allocating the channel pool. Non-negative.
    pub channel_cost: f64,
    pub welfare_mode: WelfareMode,
    /// Lower clamp for the weather scale, in (0, 1].
    pub w_min: f64,
    pub tie_break: TieBreak,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            num_channels: 30,
            channel_rate_kbps: 10.0,
            freshness_threshold_s: 1.0,
            channel_cost: 0.0,
            welfare_mode: WelfareMode::ValueAware,
            w_min: 0.05,
            tie_break: TieBreak::AscendingId,
        }
    }
}

impl MarketConfig {
    /// Kilobits one channel can move within the freshness threshold.
    pub fn channel_capacity_kb(&self) -> f64 {
        self.channel_rate_kbps * self.freshness_threshold_s
    }

    /// Same configuration with a different channel count.
    pub fn with_channels(&self, num_channels: u32) -> Self {
        MarketConfig {
            num_channels,
            ..self.clone()
        }
    }
}

/// Which winner-determination backend produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverKind {
    /// Dynamic program over the channel budget. Exact.
    #[serde(rename = "exact_dp")]
    ExactDp,
    /// Depth-first branch and bound. Exact, must agree with the DP.
    #[serde(rename = "branch_bound")]
    BranchBound,
    /// Bid-sorted heuristic that stops once welfare stops increasing.
    #[serde(rename = "greedy")]
    Greedy,
    /// Exhaustive subset enumeration; the test oracle.
    #[serde(rename = "brute_force")]
    BruteForce,
}

impl SolverKind {
    /// True for backends that always return a welfare-maximal allocation.
    pub fn is_exact(self) -> bool {
        !matches!(self, SolverKind::Greedy)
    }
}

/// Result of settling one auction round.
///
/// Vectors are aligned with the bid list the auction ran on. Payments,
/// utilities, and the provider utility are absent for heuristic outcomes:
/// VCG payments are only defined against an exact optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    /// Per-bid winner flag.
    pub allocation: Vec<bool>,
    /// Winning device ids, ascending.
    pub winners: Vec<usize>,
    /// Per-bid payment; exactly 0 for losers. `None` for greedy outcomes.
    pub payments: Option<Vec<f64>>,
    /// Per-bid seller utility; exactly 0 for losers. `None` for greedy outcomes.
    pub device_utilities: Option<Vec<f64>>,
    /// Provider utility: value received minus payments minus channel cost.
    pub vsp_utility: Option<f64>,
    /// Welfare of the allocation under the configured mode.
    pub social_welfare: f64,
    /// Channels actually allocated.
    pub channels_used: u64,
    pub solver: SolverKind,
}

/// A complete market instance: one configuration, the seller population,
/// their scenes, and optionally their sealed bids (derivable from the
/// rest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub config: MarketConfig,
    pub devices: Vec<Device>,
    pub scenes: Vec<SceneSemantics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bids: Option<Vec<SealedBid>>,
}

impl Instance {
    /// Report-style validation; see [`validate_instance`].
    pub fn validate(&self) -> ValidationReport {
        validate_instance(self)
    }

    /// Validation as a hard error, for call sites that cannot proceed on
    /// a broken instance.
    pub fn ensure_valid(&self) -> Result<(), MarketError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(MarketError::InvalidInstance(report))
        }
    }

    /// Scene assigned to `device`, if the reference resolves.
    pub fn scene_of(&self, device: &Device) -> Option<&SceneSemantics> {
        self.scenes.get(device.scene_id)
    }
}

/// Outcome of validating an instance: the list of violated invariants.
/// Empty means valid. Validation never mutates its input.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            write!(f, "instance valid")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  - {v}")?;
            }
            Ok(())
        }
    }
}

/// Errors surfaced by library operations. Validation itself never errors;
/// it reports.
#[derive(Debug, thiserror::Error)]
pub enum MarketError {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("brute force refused: {n} bidders exceeds the enumeration guard of {max}")]
    InstanceTooLarge { n: usize, max: usize },
    #[error("allocation passed to the payment rule is not the exact optimum (welfare {given} vs {optimal})")]
    NotOptimal { given: f64, optimal: f64 },
    #[error("VCG payments require an exact winner-determination backend; greedy outcomes carry no payments")]
    PaymentsRequireExactSolver,
    #[error("invalid bids: {0}")]
    InvalidBids(String),
    #[error("invalid instance:\n{0}")]
    InvalidInstance(ValidationReport),
    #[error("invalid budget range: {0}")]
    InvalidRange(String),
    #[error("i/o error: {0}")]
    Io(String),
}

fn finite_nonneg(report: &mut Vec<String>, ctx: &str, what: &str, v: f64) {
    if !v.is_finite() {
        report.push(format!("{ctx}: {what} must be finite (got {v})"));
    } else if v < 0.0 {
        report.push(format!("{ctx}: {what} must be non-negative (got {v})"));
    }
}

/// Checks every domain invariant of the instance and returns the list of
/// violations (empty when the instance is well-formed). Idempotent and
/// side-effect free.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut out = Vec::new();
    let cfg = &instance.config;

    if !(cfg.channel_rate_kbps.is_finite() && cfg.channel_rate_kbps > 0.0) {
        out.push(format!(
            "config: channel_rate_kbps must be positive (got {})",
            cfg.channel_rate_kbps
        ));
    }
    if !(cfg.freshness_threshold_s.is_finite() && cfg.freshness_threshold_s > 0.0) {
        out.push(format!(
            "config: freshness_threshold_s must be positive (got {})",
            cfg.freshness_threshold_s
        ));
    }
    finite_nonneg(&mut out, "config", "channel_cost", cfg.channel_cost);
    if !(cfg.w_min.is_finite() && cfg.w_min > 0.0 && cfg.w_min <= 1.0) {
        out.push(format!("config: w_min must lie in (0, 1] (got {})", cfg.w_min));
    }

    for (idx, scene) in instance.scenes.iter().enumerate() {
        let ctx = format!("scene {idx}");
        if scene.object_count != scene.objects.len() {
            out.push(format!(
                "{ctx}: object_count {} does not match objects list length {}",
                scene.object_count,
                scene.objects.len()
            ));
        }
        if !(scene.weather.is_finite() && scene.weather <= 1.0) || scene.weather < cfg.w_min {
            out.push(format!(
                "{ctx}: weather below w_min or above 1 (weather {}, w_min {})",
                scene.weather, cfg.w_min
            ));
        }
        if !(scene.raw_size_kb.is_finite() && scene.raw_size_kb > 0.0) {
            out.push(format!("{ctx}: raw_size_kb must be positive (got {})", scene.raw_size_kb));
        }
        if !(scene.semantic_payload_kb.is_finite() && scene.semantic_payload_kb > 0.0) {
            out.push(format!(
                "{ctx}: semantic_payload_kb must be positive (got {})",
                scene.semantic_payload_kb
            ));
        } else if scene.semantic_payload_kb > scene.raw_size_kb {
            out.push(format!(
                "{ctx}: semantic_payload_kb {} exceeds raw_size_kb {}",
                scene.semantic_payload_kb, scene.raw_size_kb
            ));
        }
        for (j, obj) in scene.objects.iter().enumerate() {
            if !(obj.quality.is_finite() && (0.0..=1.0).contains(&obj.quality)) {
                out.push(format!(
                    "{ctx}, object {j}: quality must lie in [0, 1] (got {})",
                    obj.quality
                ));
            }
        }
    }

    let mut seen_ids = std::collections::HashSet::new();
    for device in &instance.devices {
        let ctx = format!("device {}", device.id);
        if !seen_ids.insert(device.id) {
            out.push(format!("{ctx}: duplicate device id"));
        }
        if device.readings.is_empty() {
            out.push(format!("{ctx}: device must have at least one sensor reading"));
        }
        for (k, r) in device.readings.iter().enumerate() {
            finite_nonneg(&mut out, &format!("{ctx}, reading {k}"), "raw_size_kb", r.raw_size_kb);
            finite_nonneg(
                &mut out,
                &format!("{ctx}, reading {k}"),
                "per_unit_compute_cost",
                r.per_unit_compute_cost,
            );
        }
        finite_nonneg(&mut out, &ctx, "extraction_time_s", device.extraction_time_s);
        finite_nonneg(&mut out, &ctx, "per_step_compute_cost", device.per_step_compute_cost);
        finite_nonneg(&mut out, &ctx, "per_unit_tx_cost", device.per_unit_tx_cost);
        match instance.scenes.get(device.scene_id) {
            None => out.push(format!(
                "{ctx}: scene_id {} out of range ({} scenes)",
                device.scene_id,
                instance.scenes.len()
            )),
            Some(scene) => {
                // The scene's total raw size must restate the sum of the
                // device's readings.
                let total = device.total_raw_size_kb();
                if (scene.raw_size_kb - total).abs() > 1e-9 * scene.raw_size_kb.abs().max(1.0) {
                    out.push(format!(
                        "{ctx}: scene raw_size_kb {} does not match total reading size {}",
                        scene.raw_size_kb, total
                    ));
                }
            }
        }
    }

    if let Some(bids) = &instance.bids {
        let mut seen_bidders = std::collections::HashSet::new();
        for bid in bids {
            let ctx = format!("bid of device {}", bid.device_id);
            if !seen_ids.contains(&bid.device_id) {
                out.push(format!("{ctx}: no such device"));
            }
            if !seen_bidders.insert(bid.device_id) {
                out.push(format!("{ctx}: duplicate bid for one device"));
            }
            if !bid.bid.is_finite() {
                out.push(format!("{ctx}: bid must be finite (got {})", bid.bid));
            } else if bid.bid <= 0.0 {
                out.push(format!("{ctx}: bid must be positive (got {})", bid.bid));
            }
            if !(bid.semantic_value.is_finite() && bid.semantic_value >= 0.0) {
                out.push(format!(
                    "{ctx}: semantic_value must be finite and non-negative (got {})",
                    bid.semantic_value
                ));
            }
            if bid.channel_demand < 1 {
                out.push(format!(
                    "{ctx}: channel_demand \u{2265} 1 violated (got {})",
                    bid.channel_demand
                ));
            }
        }
    }

    ValidationReport { violations: out }
}

/// Quick structural check of a bare bid list against a config, for the
/// auction entry points that operate without a full instance: ids unique,
/// bids finite, demands at least 1.
pub fn check_bids(bids: &[SealedBid]) -> Result<(), MarketError> {
    let mut seen = std::collections::HashSet::new();
    for b in bids {
        if !seen.insert(b.device_id) {
            return Err(MarketError::InvalidBids(format!(
                "duplicate bid for device {}",
                b.device_id
            )));
        }
        if !b.bid.is_finite() {
            return Err(MarketError::InvalidBids(format!(
                "bid of device {} is not finite",
                b.device_id
            )));
        }
        if !b.semantic_value.is_finite() {
            return Err(MarketError::InvalidBids(format!(
                "semantic value of device {} is not finite",
                b.device_id
            )));
        }
        if b.channel_demand < 1 {
            return Err(MarketError::InvalidBids(format!(
                "channel demand of device {} must be at least 1",
                b.device_id
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reading(size: f64, cost: f64) -> SensorReading {
        SensorReading {
            sensor_kind: SensorKind::Camera,
            raw_size_kb: size,
            per_unit_compute_cost: cost,
        }
    }

    fn small_instance() -> Instance {
        let scenes: Vec<SceneSemantics> = (0..3)
            .map(|i| SceneSemantics {
                object_count: 1,
                objects: vec![ObjectSemantics {
                    has_speed: true,
                    has_size: false,
                    has_position: true,
                    has_direction: false,
                    quality: 0.6,
                }],
                weather: 0.5,
                raw_size_kb: 100.0 + i as f64,
                semantic_payload_kb: 5.0,
            })
            .collect();
        let devices: Vec<Device> = (0..3)
            .map(|i| Device {
                id: i,
                readings: vec![reading(100.0 + i as f64, 0.001)],
                algorithm: AlgorithmKind::MaskRcnn,
                extraction_time_s: 0.2,
                per_step_compute_cost: 1.0,
                per_unit_tx_cost: 0.01,
                scene_id: i,
            })
            .collect();
        let bids = devices
            .iter()
            .map(|d| SealedBid {
                device_id: d.id,
                bid: 1.0,
                semantic_value: 2.0,
                channel_demand: 1,
            })
            .collect();
        Instance {
            config: MarketConfig::default(),
            devices,
            scenes,
            bids: Some(bids),
        }
    }

    #[test]
    fn well_formed_instance_yields_empty_report() {
        let report = small_instance().validate();
        assert!(report.is_valid(), "unexpected violations: {report}");
    }

    #[test]
    fn zero_channel_demand_is_reported() {
        let mut inst = small_instance();
        inst.bids.as_mut().unwrap()[1].channel_demand = 0;
        let report = inst.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("channel_demand \u{2265} 1"));
    }

    #[test]
    fn weather_below_w_min_is_reported() {
        let mut inst = small_instance();
        inst.scenes[0].weather = 0.0;
        let report = inst.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("weather below w_min"));
    }

    #[test]
    fn validation_is_idempotent_and_does_not_mutate() {
        let inst = small_instance();
        let snapshot = inst.clone();
        let first = inst.validate();
        let second = inst.validate();
        assert_eq!(first, second);
        assert_eq!(inst, snapshot);
    }

    #[test]
    fn duplicate_ids_and_dangling_scene_are_reported() {
        let mut inst = small_instance();
        inst.devices[2].id = 0;
        inst.devices[1].scene_id = 17;
        let report = inst.validate();
        assert!(report.violations.iter().any(|v| v.contains("duplicate device id")));
        assert!(report.violations.iter().any(|v| v.contains("out of range")));
    }

    #[test]
    fn payload_larger_than_raw_is_reported() {
        let mut inst = small_instance();
        inst.scenes[2].semantic_payload_kb = 1e6;
        let report = inst.validate();
        assert!(report.violations.iter().any(|v| v.contains("exceeds raw_size_kb")));
    }

    #[test]
    fn unknown_json_fields_are_rejected() {
        let json = r#"{
            "config": {"num_channels": 3, "surprise": 1},
            "devices": [], "scenes": []
        }"#;
        assert!(serde_json::from_str::<Instance>(json).is_err());
    }

    #[test]
    fn config_defaults_fill_missing_fields() {
        let cfg: MarketConfig = serde_json::from_str(r#"{"num_channels": 7}"#).unwrap();
        assert_eq!(cfg.num_channels, 7);
        assert_eq!(cfg.channel_rate_kbps, 10.0);
        assert_eq!(cfg.welfare_mode, WelfareMode::ValueAware);
        assert_eq!(cfg.w_min, 0.05);
    }
}
