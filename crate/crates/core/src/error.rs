use alloc::string::String;
use alloc::vec::Vec;

use crate::diophantine::ViolationWitness;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the documented domain of an operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A direction vector is not of unit length.
    #[error("direction vector has norm {norm}, expected 1 within {tolerance:e}")]
    NotUnit { norm: f64, tolerance: f64 },

    /// Vector lengths disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Membership in an untruncated set cannot be decided by enumeration.
    #[error("no cutoff supplied; membership in the untruncated set cannot be decided by enumeration")]
    MissingCutoff,

    /// The enumeration engine hit its configured node budget.
    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    /// An integer vector left the supported coordinate range.
    #[error("integer coordinate exceeds 2^30 (|entry| = {entry})")]
    Overflow { entry: i128 },

    /// The cutoff does not satisfy N > 1 + n^2 n!.
    #[error("cutoff {cutoff} does not exceed 1 + n^2 n! = {required}")]
    CutoffTooSmall { cutoff: f64, required: f64 },

    /// The direction vector fails the truncated Diophantine condition.
    #[error("direction is not Diophantine: k = {:?} gives |k.alpha| = {:e} < {:e}", .0.k, .0.inner, .0.threshold)]
    NotDiophantine(ViolationWitness),

    /// The coverage grid cannot certify density at this radius.
    #[error("delta = {delta} too small for grid certification; need delta > {min_delta}")]
    DeltaTooSmall { delta: f64, min_delta: f64 },

    /// An integer matrix that must be unimodular is not.
    #[error("basis is not unimodular (determinant {det})")]
    NotUnimodular { det: i128 },

    /// A guarantee from the underlying theory did not hold; indicates a bug
    /// or a numerical breakdown.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    /// Integer vectors found by the exclusion check inside the coreciprocal
    /// cylinder.
    #[error("coreciprocal cylinder contains nonzero lattice points: {0:?}")]
    ExclusionFailed(Vec<Vec<i64>>),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// True when the failure is a resource limit rather than a mathematical
    /// outcome or bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::Overflow { .. })
    }
}
