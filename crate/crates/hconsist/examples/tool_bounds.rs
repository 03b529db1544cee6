//! The concave α/β tool bound on a binary instance, in both γ(h) forms.

use hconsist::bounds::tables::table_transform;
use hconsist::bounds::{evaluate_tool_bound, FactorSpec, ToolSetup, Variant};
use hconsist::dist::DiscreteDistribution;
use hconsist::hypothesis::Hypothesis;
use hconsist::losses::{LossSpec, PhiSpec};
use hconsist::regret::HypothesisSet;

fn main() -> hconsist::Result<()> {
    let d = DiscreteDistribution::binary_with_features(
        &[0.95, 0.7, 0.4, 0.1],
        &[0.2, 0.3, 0.3, 0.2],
        vec![vec![0.1], vec![0.4], vec![0.6], vec![0.9]],
    )?;
    // hinge regrets rise with the feature, so the FKG form applies to it
    let h = Hypothesis::scalar(&[1.0, 0.5, 0.0, 1.0]);
    for phi in [PhiSpec::Hinge, PhiSpec::Exp, PhiSpec::Logistic, PhiSpec::SqHinge] {
        let s = LossSpec::margin(phi);
        let t = table_transform(&s, 2).expect("table entry");
        for (alpha, beta) in [
            (FactorSpec::One, FactorSpec::One),
            (FactorSpec::One, FactorSpec::Const { v: 2.0 }),
            (FactorSpec::DisagreementPlusEps { eps: 0.1 }, FactorSpec::UMax),
        ] {
            let setup = ToolSetup::new(LossSpec::ZeroOneBinary, s, HypothesisSet::Complete, t).factors(alpha, beta);
            let sup = evaluate_tool_bound(&setup, &h, &d, Variant::SupForm)?;
            let fkg = evaluate_tool_bound(&setup, &h, &d, Variant::FkgForm);
            println!(
                "{:>9} a={alpha:?} b={beta:?}: lhs {:.4} rhs {:.4} applicable {} | fkg {}",
                phi.name(),
                sup.lhs,
                sup.rhs,
                sup.applicable,
                match fkg {
                    Ok(r) => format!("gamma {:.4} <= {:.4}", r.gamma_h, sup.gamma_h),
                    Err(e) => format!("skipped: {e}"),
                }
            );
        }
    }
    Ok(())
}
