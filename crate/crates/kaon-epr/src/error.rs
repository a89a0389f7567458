//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("decay width must be positive (got {0})")]
    NonPositiveWidth(f64),
    #[error("|epsilon| must be < 1 (got {0})")]
    EpsilonTooLarge(f64),
    #[error("decoherence rate must be nonnegative (got {0})")]
    NegativeLambda(f64),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error(
        "lambda exceeds complete-positivity bound for these parameters: \
         radicand {radicand:.6e} at tau = {tau:.6e}"
    )]
    BoundViolation { tau: f64, radicand: f64 },
    #[error("momentum mass must be positive (got {0})")]
    NonPositiveMass(f64),
    #[error("momentum labels must be unique (duplicate `{0}`)")]
    DuplicateMomentum(String),
    #[error("unknown momentum label `{0}`")]
    UnknownMomentum(String),
    #[error("state space needs at least one momentum")]
    EmptyMomentumSet,
    #[error("operator layouts do not match")]
    LayoutMismatch,
    #[error("expected a one-particle operator")]
    NotOneParticle,
    #[error("expected a two-particle operator")]
    NotTwoParticle,
    #[error("permutation defined only on identical factor spaces")]
    NonIdenticalFactors,
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error(
        "observable must be permutation symmetric for identical particles (deviation {0:.3e})"
    )]
    NotSymmetric(f64),
    #[error("local observables must commute (deviation {0:.3e})")]
    NonCommuting(f64),
    #[error("not a valid density operator: {0}")]
    InvalidDensity(String),
    #[error("evolution defined for nonnegative time only (got {0})")]
    NegativeTime(f64),
    #[error("measurement ordering requires t_b >= t_a (got t_a = {t_a}, t_b = {t_b})")]
    TimeOrdering { t_a: f64, t_b: f64 },
    #[error("statistics mode does not match state layout: {0}")]
    ModeMismatch(String),
    #[error("invalid parameter file: {0}")]
    ParamsFile(#[from] serde_json::Error),
}
