//! Λ(h)-sharpened bounds for constrained losses next to their Λ = 0 baseline.

use hconsist::bounds::{constrained_enhanced_bound_with, GammaConstants};
use hconsist::dist::{sample_distribution, SampleConstraints};
use hconsist::hypothesis::Hypothesis;
use hconsist::losses::PhiSpec;

fn main() -> hconsist::Result<()> {
    let d = sample_distribution(17, 4, 3, SampleConstraints::default())?;
    let h = Hypothesis::sum_zero_tabular(vec![
        vec![1.2, -0.4, -0.8],
        vec![0.3, 0.5, -0.8],
        vec![-0.6, 0.9, -0.3],
        vec![0.4, 0.4, -0.8],
    ])?;
    for phi in [PhiSpec::Exp, PhiSpec::Hinge, PhiSpec::SqHinge] {
        for c in [GammaConstants::Stated, GammaConstants::LabelAware] {
            let b = constrained_enhanced_bound_with(phi, &h, &d, c, 1.0)?;
            println!(
                "{:>9} {c:?}: lambda {:.3}  lhs {:.4}  enhanced rhs {:.4}  baseline rhs {:.4}  slack {:+.4}",
                phi.name(),
                b.lambda,
                b.enhanced.lhs,
                b.enhanced.rhs,
                b.baseline.rhs,
                b.enhanced.slack
            );
        }
    }
    Ok(())
}
