//! More channels can mean fewer winners.
//!
//! The shipped three-device fixture holds two modest sellers and one
//! high-value fusion device too big for a 25-channel pool. At 30
//! channels the big seller finally fits and displaces both incumbents:
//! the winner count drops by one while welfare strictly rises —
//! welfare, not headcount, is what the provider maximizes.
//!
//! ```text
//! cargo run --example winner_drop
//! ```

use anyhow::Result;
use semmarket::auction::solve_wdp_exact;
use semmarket::{build_bids, winner_drop_fixture, TransmissionMode};

fn main() -> Result<()> {
    let instance = winner_drop_fixture();
    let bids = build_bids(&instance, TransmissionMode::Semantic)?;

    println!("sellers:");
    for bid in &bids {
        println!(
            "  device {}: demand {:>2} channels, surplus {:.3}",
            bid.device_id,
            bid.channel_demand,
            bid.semantic_value - bid.bid
        );
    }

    println!("\n{:>3}  {:>8}  {:>9}  winners", "B", "#winners", "welfare");
    let mut previous: Option<(usize, f64)> = None;
    for b in (10..=40).step_by(5) {
        let outcome = solve_wdp_exact(&bids, &instance.config.with_channels(b));
        println!(
            "{:>3}  {:>8}  {:>9.3}  {:?}",
            b,
            outcome.winners.len(),
            outcome.welfare,
            outcome.winners
        );
        if let Some((count, welfare)) = previous {
            if outcome.winners.len() < count {
                assert!(outcome.welfare > welfare);
                println!(
                    "      ^ one winner fewer than at B = {}, yet welfare rose",
                    b - 5
                );
            }
        }
        previous = Some((outcome.winners.len(), outcome.welfare));
    }
    Ok(())
}
