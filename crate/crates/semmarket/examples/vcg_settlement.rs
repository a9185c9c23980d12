//! Settles the smallest interesting market by hand: two sellers, one
//! channel.
//!
//! Seller 0 reports more surplus than seller 1, wins the channel, and is
//! paid its own report plus the welfare the runner-up would have created
//! — the externality price that makes truthful bidding optimal.
//!
//! ```text
//! cargo run --example vcg_settlement
//! ```

use anyhow::Result;
use semmarket::{settle_with_payments, MarketConfig, SealedBid, SolverKind};

fn main() -> Result<()> {
    let bids = vec![
        SealedBid {
            device_id: 0,
            bid: 1.0,
            semantic_value: 6.0,
            channel_demand: 1,
        },
        SealedBid {
            device_id: 1,
            bid: 1.0,
            semantic_value: 4.0,
            channel_demand: 1,
        },
    ];
    let config = MarketConfig {
        num_channels: 1,
        ..MarketConfig::default()
    };

    let outcome = settle_with_payments(&bids, &config, SolverKind::ExactDp)?;
    let payments = outcome.payments.as_ref().expect("exact solver pays");
    let utilities = outcome.device_utilities.as_ref().expect("exact solver pays");

    println!("channel budget: {}", config.num_channels);
    for (bid, (&p, &u)) in bids.iter().zip(payments.iter().zip(utilities)) {
        let role = if outcome.winners.contains(&bid.device_id) {
            "winner"
        } else {
            "loser "
        };
        println!(
            "device {} ({role}): value {}, cost {}, payment {p}, utility {u}",
            bid.device_id, bid.semantic_value, bid.bid
        );
    }
    println!("social welfare: {}", outcome.social_welfare);
    println!("provider utility: {}", outcome.vsp_utility.unwrap());

    // The winner's utility equals its marginal contribution: welfare with
    // it (5) minus welfare without it (3).
    assert_eq!(payments[0], 9.0);
    assert_eq!(utilities[0], 2.0);
    assert_eq!(payments[1], 0.0);
    println!("\nthe winner earned exactly the welfare it added: 5 - 3 = 2");
    Ok(())
}
