//! Buyer-side worth of a scene's extracted semantics, and the channel
//! demand implied by the freshness threshold.
//!
//! The value of a scene grows with the number of semantic aspects
//! detected per object (weighted by extraction quality), is inflated in
//! bad weather (scarce information is worth more), and carries a small
//! bonus for compact data. The reciprocal-size term mixes units on
//! purpose — it mirrors the value function as defined, and the unit
//! mismatch is accepted rather than papered over with a normalization.

use serde::{Deserialize, Serialize};

use crate::cost::{service_cost, TransmissionMode};
use crate::model::{Device, MarketConfig, MarketError, SceneSemantics, SealedBid};

/// Weather floor used when no market configuration is in scope; equals
/// the `MarketConfig` default for `w_min`.
pub const DEFAULT_W_MIN: f64 = 0.05;

/// Which data size feeds the reciprocal term of the value function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SizeBasis {
    /// The scene's full raw size. Default.
    #[serde(rename = "raw_size")]
    #[default]
    RawSize,
    /// The payload actually transmitted, so compact semantic uploads are
    /// rewarded for their compactness.
    #[serde(rename = "payload")]
    Payload,
}

/// Semantic value of a scene whose data has the given size, with the
/// weather clamped to `[DEFAULT_W_MIN, 1]`.
pub fn semantic_value(scene: &SceneSemantics, size_kb: f64) -> Result<f64, MarketError> {
    semantic_value_with_floor(scene, size_kb, DEFAULT_W_MIN)
}

/// Semantic value with an explicit weather floor (`MarketConfig::w_min`).
///
/// Per object, each present semantic aspect contributes the object's
/// extraction quality; the object sum is divided by the (clamped)
/// weather and a `1/size` term is added.
pub fn semantic_value_with_floor(
    scene: &SceneSemantics,
    size_kb: f64,
    w_min: f64,
) -> Result<f64, MarketError> {
    if !(size_kb.is_finite() && size_kb > 0.0) {
        return Err(MarketError::NonPositive {
            what: "data size for the semantic-value size term",
            value: size_kb,
        });
    }
    let content: f64 = scene
        .objects
        .iter()
        .fold(0.0, |acc, o| acc + f64::from(o.flag_count()) * o.quality);
    let weather = scene.weather.clamp(w_min, 1.0);
    Ok(content / weather + 1.0 / size_kb)
}

/// Channels needed to move `payload_kb` within the freshness threshold:
/// the payload divided by one channel's capacity, rounded up, never less
/// than one.
pub fn channel_demand(payload_kb: f64, config: &MarketConfig) -> Result<u32, MarketError> {
    if !(payload_kb.is_finite() && payload_kb > 0.0) {
        return Err(MarketError::NonPositive {
            what: "transmission payload",
            value: payload_kb,
        });
    }
    let capacity = config.channel_capacity_kb();
    if !(capacity.is_finite() && capacity > 0.0) {
        return Err(MarketError::NonPositive {
            what: "per-channel capacity (rate × freshness threshold)",
            value: capacity,
        });
    }
    let raw = (payload_kb / capacity).ceil();
    Ok((raw as u32).max(1))
}

/// Truthful sealed bid for one device: price equals its service cost,
/// value is recomputed from the scene, demand follows from the mode's
/// payload. The reciprocal size term uses the scene's raw size.
pub fn make_bid(
    device: &Device,
    scene: &SceneSemantics,
    config: &MarketConfig,
    mode: TransmissionMode,
) -> Result<SealedBid, MarketError> {
    make_bid_with(device, scene, config, mode, SizeBasis::default())
}

/// [`make_bid`] with an explicit size basis for the value function.
pub fn make_bid_with(
    device: &Device,
    scene: &SceneSemantics,
    config: &MarketConfig,
    mode: TransmissionMode,
    basis: SizeBasis,
) -> Result<SealedBid, MarketError> {
    let payload_kb = match mode {
        TransmissionMode::Semantic => scene.semantic_payload_kb,
        TransmissionMode::Raw => scene.raw_size_kb,
    };
    let demand = channel_demand(payload_kb, config)?;
    let cost = service_cost(device, demand, config, mode).total;
    let value_size = match basis {
        SizeBasis::RawSize => scene.raw_size_kb,
        SizeBasis::Payload => payload_kb,
    };
    let value = semantic_value_with_floor(scene, value_size, config.w_min)?;
    Ok(SealedBid {
        device_id: device.id,
        bid: cost,
        semantic_value: value,
        channel_demand: demand,
    })
}
