use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set needs at least 4 points, got {0}")]
    GroundTooSmall(u32),
    #[error("ground set of {0} points exceeds the supported maximum of {max}", max = crate::divisors::MAX_POINTS)]
    GroundTooLarge(u32),
    #[error("invalid subset {subset:?} of {{1..{n}}}: {reason}")]
    InvalidSubset {
        subset: Vec<u32>,
        n: u32,
        reason: &'static str,
    },
    #[error("label {label} is out of range for {{1..{n}}}")]
    LabelOutOfRange { label: u32, n: u32 },
    #[error("ground-set mismatch: {left} points vs {right} points")]
    GroundMismatch { left: u32, right: u32 },
    #[error("unsupported symmetry S_{m} on {n} points (need 4 <= n and n-3 <= m <= n)")]
    UnsupportedSymmetry { n: u32, m: u32 },
    #[error("invalid orbit index: {0}")]
    InvalidOrbit(String),
    #[error("orbit {0} is not an element of the invariant basis")]
    NotInBasis(String),
    #[error("orbit {orbit} is excluded from the invariant basis ({rule})")]
    ExcludedOrbit { orbit: String, rule: &'static str },
    #[error("divisor is not invariant under the symmetric group: {0}")]
    NotInvariant(String),
    #[error("cannot pull back the psi class of point {0}: it lies on the glued component")]
    UnsupportedPullback(u32),
    #[error("invalid attaching map: {0}")]
    InvalidAttachingMap(String),
    #[error("reduction failed: orbit {orbit} has nonzero coefficient {coeff} on the reduced space")]
    ReductionFailure { orbit: String, coeff: String },
    #[error("simplex exceeded its pivot limit of {0}")]
    PivotLimit(usize),
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("duplicate entry {0}")]
    Duplicate(String),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("internal error: {0}")]
    Internal(String),
}
