//! Seeded random distributions under noise constraints.

use hconsist::dist::{fit_tsybakov_envelope, margin_gamma, sample_distribution, SampleConstraints};

fn main() -> hconsist::Result<()> {
    let free = sample_distribution(3, 5, 3, SampleConstraints::default())?;
    println!("{}", free.to_json()?);
    let massart =
        sample_distribution(3, 5, 3, SampleConstraints { massart_floor: Some(0.4), ..SampleConstraints::default() })?;
    let margins: Vec<f64> = (0..5).map(|i| margin_gamma(&massart, massart.id(i))).collect::<Result<_, _>>()?;
    println!("margins with floor 0.4: {margins:.3?}");
    let tsy =
        sample_distribution(8, 8, 2, SampleConstraints { tsybakov: Some((0.5, 2.0)), ..SampleConstraints::default() })?;
    let fit = fit_tsybakov_envelope(&tsy, 0.5)?;
    println!("tsybakov target (0.5, 2.0): fitted B {:.4}", fit.b);
    Ok(())
}
