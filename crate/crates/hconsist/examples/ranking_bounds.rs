//! Pairwise inequalities, aggregate ranking bounds and the calibration check.

use hconsist::dist::{sample_distribution, SampleConstraints};
use hconsist::hypothesis::Hypothesis;
use hconsist::losses::PhiSpec;
use hconsist::ranking::{
    calibration_family_check, default_calibration_grid, exp_ranking_bound, log_ranking_bound, pair_inequality_report,
    PairFactor,
};

fn main() -> hconsist::Result<()> {
    let d = sample_distribution(21, 5, 2, SampleConstraints::default())?;
    let h = Hypothesis::scalar(&[0.9, -0.4, 0.2, 1.3, -1.0]);
    for (name, r) in [("exp aggregate", exp_ranking_bound(&h, &d)?), ("log aggregate", log_ranking_bound(&h, &d)?)] {
        println!("{name}: pair regret {:.5} <= {:.5} (slack {:+.5})", r.lhs, r.rhs, r.slack);
    }
    for (name, f) in [("exp pairwise", PairFactor::ExpError), ("log pairwise", PairFactor::UMax)] {
        let r = pair_inequality_report(f, &h, &d, 1.0)?;
        println!("{name}: smallest residual {:+.5} at {:?}", r.min_residual(), r.worst_point);
    }
    let grid = default_calibration_grid();
    for phi in [PhiSpec::Exp, PhiSpec::Logistic, PhiSpec::Hinge, PhiSpec::SqHinge] {
        let c = calibration_family_check(phi, &[1.0, 2.0], &grid);
        println!("{:>9}: calibrated {} nu {:?} spread {:.2e}", phi.name(), c.calibrated, c.nu, c.spread);
    }
    Ok(())
}
