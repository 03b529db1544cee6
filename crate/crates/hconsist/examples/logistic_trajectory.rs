// Population logistic regression, audited against the log ranking bound.

use hconsist::experiments::{
    audit_trajectory, fit_logistic, ranking_instance, train_logistic, Init, StepPolicy, Which,
};

fn main() -> hconsist::Result<()> {
    let d = ranking_instance(4, 20, 2)?;
    let traj = train_logistic(&d, 40, StepPolicy::default(), Init::Zero)?;
    for p in audit_trajectory(&traj, &d, Which::LogBound)?.iter().step_by(4) {
        println!(
            "iter {:>2}: pair regret {:.5} rhs {:.5} slack {:+.5}",
            p.iteration, p.pair_estimation_error, p.bound_rhs, p.slack
        );
    }
    match fit_logistic(&d, 1e-8, Init::Zero) {
        Ok(f) => println!("fit: value {:.8} grad norm {:.1e} after {} steps", f.value, f.grad_norm, f.iterations),
        Err(e) => println!("fit did not converge: {e}"),
    }
    Ok(())
}
