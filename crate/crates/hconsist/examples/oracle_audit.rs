//! Brute-force oracle checks and randomized bound audits, with and without a halved Γ.

use hconsist::oracle::{audit_bound, check_closed_form, AuditConfig, BoundId, ClosedFormId};

fn main() -> hconsist::Result<()> {
    for id in [ClosedFormId::BinaryBestExp, ClosedFormId::PairBestExp, ClosedFormId::ConstrainedBestHinge] {
        let c = check_closed_form(id, 100, 1)?;
        println!("{id:?}: max |closed - grid| = {:.2e}", c.max_discrepancy);
    }
    for id in BoundId::ALL {
        let s = audit_bound(&AuditConfig { trials: 300, ..AuditConfig::default() }, id)?;
        let half = audit_bound(&AuditConfig { trials: 300, gamma_scale: 0.5, ..AuditConfig::default() }, id)?;
        println!(
            "{:34} violations {:4} inapplicable {:4} worst {:+.2e} | halved: {:4}",
            id.name(),
            s.violations,
            s.inapplicable,
            s.worst_slack,
            half.violations
        );
    }
    Ok(())
}
