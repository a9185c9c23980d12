//! Checks, rather than assumes, that lying does not pay.
//!
//! A seeded random market is audited: every seller in turn misreports
//! its cost by a grid of multipliers plus random ones, utilities are
//! evaluated at the true cost, and the best gain anyone achieves is
//! printed. Under externality pricing it never exceeds floating-point
//! noise. The same pass confirms individual rationality: each winner's
//! utility equals the welfare it adds, and is never negative.
//!
//! ```text
//! cargo run --example ic_audit
//! ```

use anyhow::Result;
use semmarket::verify::{random_market, DEFAULT_DEVIATION_GRID, TOLERANCE};
use semmarket::{audit_instance, SeededRng};

fn main() -> Result<()> {
    let mut rng = SeededRng::new(9);
    let (bids, config) = random_market(&mut rng, 12, 20);
    println!(
        "market: {} sellers, {} channels, {:?} welfare",
        bids.len(),
        config.num_channels,
        config.welfare_mode
    );

    let audit = audit_instance(&bids, &config, &DEFAULT_DEVIATION_GRID, 8, 7)?;

    println!(
        "\nincentive compatibility: {} misreports tried, best gain {:e}",
        audit.ic.deviations_tested, audit.ic.max_gain
    );
    if let Some(worst) = &audit.ic.worst {
        println!(
            "  most tempting lie: device {} reporting {:.2}x its true cost \
             (gain {:e})",
            worst.device_id, worst.multiplier, worst.gain
        );
    }
    assert!(audit.ic.holds(), "a profitable misreport slipped through");

    println!(
        "\nindividual rationality: {} winners, lowest utility {:.6}, \
         marginal-contribution identity off by at most {:e}",
        audit.ir.winners, audit.ir.min_winner_utility, audit.ir.max_identity_error
    );
    assert!(audit.ir.holds());

    println!("\nboth properties hold within {TOLERANCE:e}");
    Ok(())
}
