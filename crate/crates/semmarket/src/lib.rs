//! Deterministic simulator of a market for semantic information.
//!
//! IoT devices observe driving scenes, extract compact semantics from raw
//! sensor data, and compete in a sealed reverse auction for a limited pool
//! of uplink channels sold by a virtual service provider. The provider
//! picks winners by social-welfare maximization (a 0/1 knapsack over the
//! channel budget) and charges externality payments, which makes truthful
//! bidding a dominant strategy and participation individually rational —
//! properties this crate checks rather than assumes.
//!
//! Module map:
//! - [`model`] — domain types, market configuration, instance validation
//! - [`cost`] — seller-side service cost (collection, extraction, transmission)
//! - [`semval`] — semantic value of extracted scene information
//! - [`auction`] — winner determination (exact and heuristic), pricing, settlement
//! - [`scenario`] — seeded scenario generation and fixed fixtures
//! - [`experiments`] — sweep harnesses producing CSV-ready rows
//! - [`verify`] — incentive-compatibility and rationality audits
//!
//! Everything is deterministic: the same inputs (and seeds) produce
//! byte-identical outputs, including across the parallel code paths.

pub mod auction;
pub mod cli;
pub mod cost;
pub mod experiments;
pub mod model;
pub mod scenario;
pub mod semval;
pub mod verify;

pub use auction::{
    derive_truthful_bids, run_auction, settle, settle_with_payments, solve_wdp, vcg_payments,
    Allocation,
};
pub use cost::{service_cost, total_service_cost, CostBreakdown, TransmissionMode};
pub use experiments::{
    solver_gap_sweep, transmission_compare, winner_list_experiment, BRange, SolverGapRecord,
    TransmissionRecord, WinnerListRecord,
};
pub use model::{
    check_bids, validate_instance, AlgorithmKind, AuctionOutcome, Device, Instance, MarketConfig,
    MarketError, ObjectSemantics, SceneSemantics, SealedBid, SensorKind, SensorReading,
    SolverKind, TieBreak, ValidationReport, WelfareMode,
};
pub use scenario::{
    build_bids, default_profiles, generate_population, generate_scenario, solver_gap_fixture,
    two_tier_fixture, winner_drop_fixture, AlgorithmProfile, GeneratorParams, SeededRng,
};
pub use semval::{channel_demand, make_bid, semantic_value, SizeBasis};
pub use verify::{
    audit_instance, ic_audit, ir_audit, run_property_suites, AuditReport, IcReport, IrReport,
    SuiteOutcome,
};
