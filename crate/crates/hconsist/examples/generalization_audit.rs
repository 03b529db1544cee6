//! Sampled generalization bounds audited over seeds.

use std::time::Instant;

use hconsist::experiments::{generalization_audit, GenConfig, GenSetting};

fn main() -> hconsist::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let cfg = GenConfig::default();
    let seeds: Vec<u64> = (0..seeds).collect();
    for s in GenSetting::ALL {
        let t = Instant::now();
        let a = generalization_audit(s, &seeds, &cfg)?;
        println!(
            "{:?}: {} runs, {} violations ({:.3}), worst slack {:.4}, estimate misses {} [{:.1}s]",
            s,
            a.runs,
            a.violations,
            a.fraction,
            a.worst_slack,
            a.estimate_misses,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
