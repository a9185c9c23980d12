//! Seller-side service cost: what a device spends to collect raw data,
//! extract semantics from it, and transmit the result over its granted
//! channels. Truthful bids equal this cost.
//!
//! All functions here are pure; the total is always formed as
//! `collection + extraction + communication` in that order, so additivity
//! holds bitwise.

use serde::{Deserialize, Serialize};

use crate::model::{Device, MarketConfig};

/// What a device puts on the uplink: the extracted semantics or the raw
/// sensor data itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransmissionMode {
    #[serde(rename = "semantic")]
    Semantic,
    #[serde(rename = "raw")]
    Raw,
}

/// Itemized service cost for one device in one auction round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Raw-data collection across all sensors.
    pub collection: f64,
    /// Semantic extraction; zero when transmitting raw data, since no
    /// extraction runs in that mode.
    pub extraction: f64,
    /// Channel transmission for the granted bundle.
    pub communication: f64,
    /// `collection + extraction + communication`, summed in that order.
    pub total: f64,
}

/// Cost of collecting the raw data: each reading's size times its
/// per-kilobit computation cost, summed over the device's sensors.
pub fn raw_collection_cost(device: &Device) -> f64 {
    device
        .readings
        .iter()
        .fold(0.0, |acc, r| acc + r.raw_size_kb * r.per_unit_compute_cost)
}

/// Cost of running the extraction algorithm: wall time times the
/// per-second computation cost.
pub fn semantic_extraction_cost(device: &Device) -> f64 {
    device.extraction_time_s * device.per_step_compute_cost
}

/// Transmission cost for a bundle of `channel_demand` channels at the
/// configured per-channel rate.
pub fn communication_cost(device: &Device, channel_demand: u32, config: &MarketConfig) -> f64 {
    config.channel_rate_kbps * channel_demand as f64 * device.per_unit_tx_cost
}

/// Itemized service cost under the given transmission mode. Raw mode
/// skips extraction entirely (the data is sent as collected), an
/// interpretation documented here rather than taken from any source.
pub fn service_cost(
    device: &Device,
    channel_demand: u32,
    config: &MarketConfig,
    mode: TransmissionMode,
) -> CostBreakdown {
    let collection = raw_collection_cost(device);
    let extraction = match mode {
        TransmissionMode::Semantic => semantic_extraction_cost(device),
        TransmissionMode::Raw => 0.0,
    };
    let communication = communication_cost(device, channel_demand, config);
    CostBreakdown {
        collection,
        extraction,
        communication,
        total: collection + extraction + communication,
    }
}

/// Total semantic-mode service cost; the quantity a truthful device bids.
pub fn total_service_cost(device: &Device, channel_demand: u32, config: &MarketConfig) -> f64 {
    service_cost(device, channel_demand, config, TransmissionMode::Semantic).total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AlgorithmKind, SensorKind, SensorReading};

    fn device_with(readings: Vec<(f64, f64)>, dt: f64, gamma: f64, beta: f64) -> Device {
        Device {
            id: 0,
            readings: readings
                .into_iter()
                .map(|(size, cost)| SensorReading {
                    sensor_kind: SensorKind::Camera,
                    raw_size_kb: size,
                    per_unit_compute_cost: cost,
                })
                .collect(),
            algorithm: AlgorithmKind::MaskRcnn,
            extraction_time_s: dt,
            per_step_compute_cost: gamma,
            per_unit_tx_cost: beta,
            scene_id: 0,
        }
    }

    fn close(a: f64, b: f64) {
        let scale = a.abs().max(b.abs()).max(1.0);
        assert!((a - b).abs() <= 1e-12 * scale, "{a} != {b}");
    }

    #[test]
    fn collection_cost_sums_per_reading_products() {
        let d = device_with(vec![(100.0, 0.01), (200.0, 0.02)], 0.0, 0.0, 0.0);
        assert_eq!(raw_collection_cost(&d), 5.0);
        let single = device_with(vec![(50.0, 0.1)], 0.0, 0.0, 0.0);
        assert_eq!(raw_collection_cost(&single), 5.0);
        let free = device_with(vec![(100.0, 0.0), (200.0, 0.0)], 0.0, 0.0, 0.0);
        assert_eq!(raw_collection_cost(&free), 0.0);
    }

    #[test]
    fn extraction_cost_is_time_times_rate() {
        let d = device_with(vec![(1.0, 0.0)], 0.2, 1.5, 0.0);
        close(semantic_extraction_cost(&d), 0.3);
        let idle = device_with(vec![(1.0, 0.0)], 0.0, 9.0, 0.0);
        assert_eq!(semantic_extraction_cost(&idle), 0.0);
        let free = device_with(vec![(1.0, 0.0)], 1.0, 0.0, 0.0);
        assert_eq!(semantic_extraction_cost(&free), 0.0);
    }

    #[test]
    fn communication_cost_scales_with_rate_demand_and_coefficient() {
        let cfg = MarketConfig {
            channel_rate_kbps: 10.0,
            ..MarketConfig::default()
        };
        let d = device_with(vec![(1.0, 0.0)], 0.0, 0.0, 0.1);
        close(communication_cost(&d, 3, &cfg), 3.0);
        assert_eq!(communication_cost(&d, 0, &cfg), 0.0);
        let wired = device_with(vec![(1.0, 0.0)], 0.0, 0.0, 0.0);
        assert_eq!(communication_cost(&wired, 5, &cfg), 0.0);
    }

    #[test]
    fn total_is_the_sum_of_the_three_components() {
        let cfg = MarketConfig {
            channel_rate_kbps: 10.0,
            ..MarketConfig::default()
        };
        let d = device_with(vec![(100.0, 0.01), (200.0, 0.02)], 0.2, 1.5, 0.1);
        let parts = service_cost(&d, 3, &cfg, TransmissionMode::Semantic);
        close(parts.total, 8.3);
        assert_eq!(
            parts.total,
            parts.collection + parts.extraction + parts.communication
        );
        assert_eq!(parts.total, total_service_cost(&d, 3, &cfg));

        let nothing = device_with(vec![(0.0, 0.0)], 0.0, 0.0, 0.0);
        assert_eq!(total_service_cost(&nothing, 0, &cfg), 0.0);
        let tx_only = device_with(vec![(1.0, 0.0)], 0.0, 0.0, 1.0);
        assert_eq!(total_service_cost(&tx_only, 1, &cfg), 10.0);
    }

    #[test]
    fn raw_mode_drops_the_extraction_term_only() {
        let cfg = MarketConfig::default();
        let d = device_with(vec![(500.0, 0.001)], 0.4, 2.0, 0.05);
        let semantic = service_cost(&d, 2, &cfg, TransmissionMode::Semantic);
        let raw = service_cost(&d, 2, &cfg, TransmissionMode::Raw);
        assert_eq!(raw.extraction, 0.0);
        assert_eq!(raw.collection, semantic.collection);
        assert_eq!(raw.communication, semantic.communication);
        assert!(raw.total < semantic.total);
    }
}
