//! Monte Carlo empirical Rademacher complexity of a few classes.

use hconsist::experiments::{
    estimate_rademacher, nestedness_pair, ranking_instance, FunctionClass, Sample, StumpPool, Target,
};
use hconsist::hypothesis::Hypothesis;
use hconsist::losses::{LossSpec, PhiSpec};

fn main() -> hconsist::Result<()> {
    let d = ranking_instance(1, 12, 2)?;
    let s = Sample::draw(&d, 100, 2)?;
    let h = Hypothesis::scalar(&[0.3; 12]);
    let single = estimate_rademacher(&Target::Scores, &FunctionClass::Singleton(h), &d, &s, 5000, 3)?;
    println!("singleton:      {:+.5} +- {:.5}", single.value, single.std_error);
    let pool = StumpPool::build(&d, true)?;
    for c in [0.5, 1.0, 2.0] {
        let e =
            estimate_rademacher(&Target::Scores, &FunctionClass::StumpSpan { pool: pool.clone(), c }, &d, &s, 200, 4)?;
        println!("stump span c={c}: {:.5} +- {:.5}", e.value, e.std_error);
    }
    let exp = Target::Loss(LossSpec::margin(PhiSpec::Exp));
    let e = estimate_rademacher(&exp, &FunctionClass::StumpSpan { pool, c: 1.0 }, &d, &s, 50, 5)?;
    println!("exp loss over stump span: {:.5} +- {:.5} (B = {:.3})", e.value, e.std_error, e.b_loss);
    let (a, b) = nestedness_pair(&Target::Loss(LossSpec::margin(PhiSpec::Logistic)), 1.0, 1, &d, &s, 30, 6)?;
    println!("logistic over linear ball W=1: {:.5}, W=2: {:.5}", a.value, b.value);
    Ok(())
}
