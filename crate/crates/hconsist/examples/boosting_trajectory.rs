//! AdaBoost on decision stumps, audited against the exp ranking bound each round.

use hconsist::experiments::{audit_trajectory, ranking_instance, train_boosting, StumpPool, Which};

fn main() -> hconsist::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let d = ranking_instance(seed, 20, 2)?;
    let pool = StumpPool::build(&d, true)?;
    let traj = train_boosting(&d, &pool, 50, seed)?;
    println!("pool of {} stumps", pool.len());
    for p in audit_trajectory(&traj, &d, Which::ExpBound)?.iter().step_by(5) {
        println!(
            "iter {:>2}: exp regret {:.5}  pair regret {:.5}  rhs {:.5}  slack {:+.5}",
            p.iteration, p.surrogate_estimation_error, p.pair_estimation_error, p.bound_rhs, p.slack
        );
    }
    Ok(())
}
