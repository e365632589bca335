use thiserror::Error;

/// Errors for POVM, zonotope, and estimator computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("not Hermitian (symmetry defect {0:.3e} exceeds tolerance)")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not normalized (norm {0})")]
    NotUnitVector(f64),

    #[error("operator is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("singular operator: eigenvalue {eigenvalue:.3e} below floor {floor:.3e}")]
    SingularOperator { eigenvalue: f64, floor: f64 },

    #[error("POVM element {index} is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    ElementNotPositive { index: usize, min_eigenvalue: f64 },

    #[error("POVM elements do not sum to the identity (defect {defect:.3e})")]
    IncompletePovm { defect: f64 },

    #[error("sub-POVM element sum exceeds the identity (max eigenvalue {max_eigenvalue})")]
    SubPovmExceedsIdentity { max_eigenvalue: f64 },

    #[error("state-measure weights do not sum to 1 (sum {0})")]
    WeightsNotNormalized(f64),

    #[error("state-measure barycenter is not Id/d (defect {defect:.3e})")]
    BarycenterViolation { defect: f64 },

    #[error("degenerate direction {index}: reference support function vanishes")]
    DegenerateDirection { index: usize },

    #[error("degenerate reference at direction {index}: reference norm is zero")]
    DegenerateReference { index: usize },

    #[error("dense size exceeded: dimension {dim} is above the bound {bound}")]
    SizeExceeded { dim: usize, bound: usize },

    #[error("frame operator has weight {weight:.3e} outside the symmetric subspace")]
    OffSymmetricSupport { weight: f64 },

    #[error("atoms do not form a 1-design (barycenter defect {defect:.3e})")]
    NotAOneDesign { defect: f64 },

    #[error("gram operator stayed singular after {attempts} sampling attempts")]
    SingularGram { attempts: usize },

    #[error("sparsification budget too small: {distinct} distinct elements, min ratio {min_ratio:.3}")]
    BudgetTooSmall { distinct: usize, min_ratio: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
