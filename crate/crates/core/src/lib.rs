//! Evolutionary shape-optimization loop whose search mean is proposed by a
//! language model (or an offline mock) from a curated history of scored
//! designs, plus a real-coded GA baseline sharing the same interfaces.

pub mod bounds;
pub mod error;
pub mod es;
pub mod ga;
pub mod llm;
pub mod objective;
pub mod persist;
pub mod proposer;
pub mod records;

pub use bounds::{decode_design, encode_design, Bounds, DesignVector, ENCODED_MAX};
pub use error::CoreError;
pub use es::{
    generation_rng, run_optimization, sample_generation, EsConfig, MeanSource, RunError,
    RunErrorKind, RunObserver, RunOutcome, SearchState,
};
pub use ga::{ga_step, run_ga, GaConfig};
pub use objective::{evaluate_designs, EvalError, Objective, QuadraticObjective};
pub use proposer::{MeanProposer, ProposalRequest, ProposedMean, ProposerError, ResponseParseError};
pub use records::{
    rank_generations, select_records, EvalStatus, RecordBuffer, ScoredRecord, SelectionConfig,
};
