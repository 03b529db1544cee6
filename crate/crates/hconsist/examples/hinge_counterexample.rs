//! Two-point instance where hinge point regrets vanish but the pair regret does not.

use hconsist::ranking::{hinge_counterexample, implied_floor};

fn main() -> hconsist::Result<()> {
    for (a, b) in [(0.99, 0.51), (0.75, 0.51), (0.9, 0.6)] {
        let c = hinge_counterexample(a, b)?;
        println!("eta = ({a}, {b}): point regrets {:?}, pair regret {:.6}", c.point_regrets, c.delta_pair_regret);
    }
    let q: Vec<(f64, f64)> = (1..=4).map(|k| (1.0 - 10f64.powi(-k), 0.5 + 10f64.powi(-k))).collect();
    println!("implied floor over {q:?}: {:.6}", implied_floor(&q)?);
    Ok(())
}
