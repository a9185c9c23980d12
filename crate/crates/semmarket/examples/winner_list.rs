//! Who wins as the channel pool grows, on the two-tier reference
//! population.
//!
//! Devices 0-4 observe a rich scene (group 1), devices 5-9 a sparse one
//! (group 2); the two groups otherwise run the same algorithm lineup.
//! Small pools go entirely to group 1. Growing the pool eventually lets
//! group 2's camera+radar fusion device in — before group 1's weakest
//! single-sensor device.
//!
//! ```text
//! cargo run --example winner_list
//! ```

use anyhow::Result;
use semmarket::experiments::device_group;
use semmarket::{winner_list_experiment, BRange};

fn main() -> Result<()> {
    let records = winner_list_experiment(BRange::new(3, 21, 3)?)?;

    println!("{:>3}  {:>7}  winners (group)", "B", "#/10");
    for r in &records {
        let tagged: Vec<String> = r
            .winners
            .split(';')
            .map(|id| {
                let id: usize = id.parse().expect("ids are numeric");
                format!("{id}(g{})", device_group(id))
            })
            .collect();
        println!("{:>3}  {:>7}  {}", r.b, r.winner_count, tagged.join(" "));
    }

    let crossover = records
        .iter()
        .find(|r| r.groups.split(';').any(|g| g == "2"))
        .expect("the sweep reaches group 2");
    println!(
        "\nfirst group-2 winner appears at B = {} — the fusion device \
         displaces group 1's weakest seller",
        crossover.b
    );
    Ok(())
}
