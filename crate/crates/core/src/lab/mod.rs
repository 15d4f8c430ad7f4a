//! Redundancy measurement, closed-form bounds and inequality oracles.

pub mod bounds;
pub mod fuzz;
pub mod kernel;
pub mod ledger;
pub mod lemmas;
pub mod sweep;

pub use bounds::{
    check_fixed, check_varying, fixed_bound, varying_bound, BoundReport, BoundTerms,
    BOUND_TOLERANCE,
};
pub use fuzz::{run_fuzz, FuzzPlan, FuzzReport, Lemma, LemmaStats};
pub use kernel::{entropy, kl_divergence, l1_variation};
pub use ledger::{model_code_length, total_code_length, CodeLengthLedger};
pub use lemmas::{InequalityCheck, LEMMA_SLACK};
pub use sweep::{sweep_bounds, BoundOutcome, SweepSummary};
