//! The quantum counting argument: how many orthonormal outputs a channel
//! can approximately produce from a `d`-dimensional input, plus the
//! entropy tools its proof runs on.

mod bound;
mod ensemble;
mod fannes;
mod reach;
mod verify;

pub use bound::{counting_bound, qc_counting_bound, relaxed_qc_bound, DELTA_LIMIT};
pub use ensemble::{Ensemble, TOL_WEIGHTS};
pub use fannes::{eta, fannes_bound, fannes_check, FannesReport, FannesStatus};
pub use reach::{minimize_distance, reachability, ReachOutcome, SearchBudget, WITNESS_SLACK};
pub use verify::{
    replay_proof_chain, verify_counting_instance, ChainStep, CountingReport, ProofChain, Witness,
};
