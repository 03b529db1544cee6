//! Training harnesses audited against the ranking bounds, Rademacher
//! estimation, and sampled generalization bounds.

pub mod boosting;
pub mod generalization;
pub mod logistic;
pub mod rademacher;
pub mod trajectory;

pub use boosting::{train_boosting, StumpPool, EPS_CLAMP};
pub use generalization::{
    generalization_audit, generalization_bound, run_generalization, GenAudit, GenConfig, GenInputs, GenRun, GenSetting,
};
pub use logistic::{fit_logistic, train_logistic, Init, LogisticFit, StepPolicy};
pub use rademacher::{estimate_rademacher, nestedness_pair, FunctionClass, RademacherEstimate, Sample, Target};
pub use trajectory::{
    audit_trajectory, ranking_instance, read_trajectory_csv, write_trajectory_csv, TrajectoryPoint, Which,
};
