//! Growth-rate comparisons and the measures built on them.

pub mod aspi;
pub mod bigo;
pub mod majorize;
pub mod pr;

use thiserror::Error;

use crate::arena::ArenaError;
use crate::budget::BudgetExceeded;
use crate::machine::TeError;
use crate::zoo::ZooError;

pub use aspi::{
    aspi_big_o_estimate, aspi_hierarchy_profile, original_hibbard_measure_empirical, AspiProfile,
    Estimate, GameParams, LevelOutcome, LevelReport, MeasureBudgets, SuiteConfig, SuiteMember,
};
pub use bigo::{
    big_o_member, big_theta_member, check_big_o_witness, default_grid, BigOVerdict,
    BigThetaVerdict, Side,
};
pub use majorize::{
    diagonal_majorizer, hibbard_growth_rate, majorizes, majorizes_with, HibbardRate,
    MajorizationVerdict, NatSeq, SeqValue,
};
pub use pr::{
    hibbard_f, pr_enumerate, pr_eval, pr_eval_unary, pr_index, HibbardError, PrError, PrTerm,
    ENUMERATION_SCHEME,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("values at n={n} are both past the bit cap and cannot be compared")]
    Incomparable { n: u64 },
    #[error("n={n} is outside the measured window {start}..={end}")]
    OutsideProfile { n: u64, start: u64, end: u64 },
    #[error("the constant grid is empty")]
    EmptyGrid,
    #[error("the ladder is empty")]
    EmptyLadder,
    #[error("ladder is not strictly increasing at position {index}: {prev} then {next}")]
    LadderOrder {
        index: usize,
        prev: String,
        next: String,
    },
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Cost(#[from] TeError),
    #[error("play against {evader} failed: {source}")]
    Arena { evader: String, source: ArenaError },
    #[error("evader {evader} is not a machine, so it needs an explicit level")]
    NeedsLevel { evader: String },
    #[error("evader {evader} is assigned to level {level}, which is not on the ladder")]
    UnknownLevel { evader: String, level: String },
    #[error("evader {evader} does not qualify for its assigned level {level}")]
    Misassigned { evader: String, level: String },
    #[error("could not draw a constructible random evader after {attempts} attempts")]
    Generation { attempts: u32 },
    #[error("invalid parameters: {0}")]
    Invalid(String),
}
