//! The positivity proof as explicit derivation lists, and a checker that
//! validates them without the LP engine.

mod audit;
mod check;
mod script;

pub use audit::{claim_audit, ClaimAudit};
pub use check::{certificates, check, flatten_partitions, CheckReport, StepFailure};
pub use script::{script_for, Derivation, EmbeddedReduction, Kind, ProofScript, Step};
