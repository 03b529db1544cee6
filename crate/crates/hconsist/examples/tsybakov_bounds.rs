//! Noise envelope fit and the resulting Tsybakov-type bounds.

use hconsist::bounds::{tsybakov_bound, tsybakov_exponent, Setting, TsybakovSetup};
use hconsist::dist::{fit_tsybakov_envelope, sample_distribution, SampleConstraints};
use hconsist::hypothesis::Hypothesis;
use hconsist::losses::{LossSpec, PhiSpec};
use hconsist::regret::HypothesisSet;

fn main() -> hconsist::Result<()> {
    let d =
        sample_distribution(5, 6, 2, SampleConstraints { massart_floor: Some(0.3), ..SampleConstraints::default() })?;
    let h = Hypothesis::scalar(&[0.4, -0.3, 1.5, -2.0, 0.1, 0.7]);
    for alpha in [0.2, 0.5, 0.8] {
        let noise = fit_tsybakov_envelope(&d, alpha)?;
        println!("alpha {alpha}: B {:.4} c {:.4} exponent {:.4}", noise.b, noise.c, tsybakov_exponent(2.0, alpha));
        for phi in [PhiSpec::Logistic, PhiSpec::Exp, PhiSpec::SqHinge] {
            let setup = TsybakovSetup::new(Setting::Binary, LossSpec::margin(phi), HypothesisSet::Complete, 2.0)?;
            let r = tsybakov_bound(&setup, &h, &d, &noise)?;
            println!("  {:>9}: lhs {:.4} rhs {:.4} slack {:+.4}", phi.name(), r.lhs, r.rhs, r.slack);
        }
    }
    Ok(())
}
