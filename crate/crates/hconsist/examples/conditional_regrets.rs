//! Best-in-class conditional errors and regrets for a handful of losses.

use hconsist::dist::DiscreteDistribution;
use hconsist::hypothesis::Hypothesis;
use hconsist::losses::{CompSumFamily, LossSpec, PhiSpec};
use hconsist::regret::{best_in_class_probs, expected_regret, regret_records, HypothesisSet};

fn main() -> hconsist::Result<()> {
    let eta = 0.8;
    for phi in [PhiSpec::Hinge, PhiSpec::Logistic, PhiSpec::Exp, PhiSpec::SqHinge, PhiSpec::Sigmoid { k: 1.0 }] {
        let (v, how) = best_in_class_probs(&LossSpec::margin(phi), &[eta, 1.0 - eta], &HypothesisSet::Complete)?;
        println!("C*({:>9}, eta={eta}) = {v:.6}  via {how:?}", phi.name());
    }
    let p = [0.5, 0.3, 0.2];
    for family in
        [CompSumFamily::MultinomialLogistic, CompSumFamily::SumExp, CompSumFamily::Gce { a: 0.5 }, CompSumFamily::Mae]
    {
        let (v, _) = best_in_class_probs(&LossSpec::CompSum { family }, &p, &HypothesisSet::Complete)?;
        println!("C*({family:?}, p={p:?}) = {v:.6}");
    }

    let d = DiscreteDistribution::binary(&[0.9, 0.6, 0.2], &[0.5, 0.3, 0.2])?;
    let h = Hypothesis::scalar(&[0.7, -0.1, 0.4]);
    let exp = LossSpec::margin(PhiSpec::Exp);
    for r in regret_records(&exp, &h, &d, &HypothesisSet::Complete)? {
        println!("{r:?}");
    }
    println!("E[regret] exp  = {:.6}", expected_regret(&exp, &h, &d, &HypothesisSet::Complete)?);
    println!("E[regret] 0-1  = {:.6}", expected_regret(&LossSpec::ZeroOneBinary, &h, &d, &HypothesisSet::Complete)?);
    println!("E[regret] exp, |h| <= 0.5: {:.6}", expected_regret(&exp, &h, &d, &HypothesisSet::Bounded { b: 0.5 })?);
    Ok(())
}
