use thiserror::Error;

/// Errors raised by the geometric and algebraic routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a unit quaternion, got norm {norm}")]
    NonUnitQuaternion { norm: f64 },
    #[error("tangent vector is not attached to the given point (tangency defect {defect:e})")]
    MismatchedBasepoint { defect: f64 },
    #[error("numerical rank {rank} is below the expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("radius {radius:e} is too close to the zero section")]
    ZeroRadius { radius: f64 },
    #[error("finite-difference step underflows near radius {radius:e}")]
    StepTooSmall { radius: f64 },
    #[error("integrator drift {drift:e} exceeds tolerance")]
    StepTooLarge { drift: f64 },
    #[error("loop size {eps} outside the supported range [1e-4, 1e-1]")]
    LoopSizeOutOfRange { eps: f64 },
    #[error("vector is not horizontal (vertical part {vertical_norm:e})")]
    NotHorizontal { vertical_norm: f64 },
    #[error("direction has a component along 1 or i")]
    DirectionOutOfPlane,
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("matrix is not skew-symmetric (defect {defect:e})")]
    NotSkew { defect: f64 },
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("skew endomorphism vanishes; invariant splitting is not unique")]
    ZeroEndomorphism,
    #[error("rotation rates {rate1} and {rate2} coincide; invariant splitting is not unique")]
    NonUnique { rate1: f64, rate2: f64 },
    #[error("F2 vanishes at sample {index}; the second plane bundle is flat")]
    FlatBundle { index: usize },
    #[error("F1/F2 is not constant (max deviation {max_deviation:e})")]
    NotProportional { max_deviation: f64 },
    #[error("sample lists have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("no samples given")]
    EmptySamples,
    #[error("kernel construction needs odd dimension, got {n}")]
    EvenDimension { n: usize },
    #[error("grid size {n_grid} below the minimum of 16")]
    GridTooCoarse { n_grid: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
