use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("invalid point `{0}`, expected `x,y`")]
    Point(String),
    #[error("invalid group `{0}`, expected full, gamma:N, gamma0:N or gamma1:N")]
    Group(String),
    #[error("invalid matrix `{0}`, expected [a,b,c,d]")]
    Matrix(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point is not in the upper half-plane (y = {0})")]
    NotInUpperHalfPlane(String),
    #[error("matrix [{0}, {1}, {2}, {3}] does not have determinant 1")]
    Determinant(i64, i64, i64, i64),
    #[error("integer overflow in group arithmetic")]
    Overflow,
    #[error("coset enumeration did not close within word length {0}")]
    CosetEnumeration(usize),
    #[error("coset enumeration found {found} cosets, expected {expected}")]
    IndexMismatch { found: usize, expected: usize },
    #[error("ball enumeration exceeded the cap of {0} candidates")]
    CapExceeded(usize),
    #[error("invalid threshold {0}; cosh thresholds must be finite and >= 1")]
    Threshold(f64),
    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("strip height must be positive, got {0}")]
    StripHeight(f64),
    #[error("point {0} lies outside the region")]
    OutsideRegion(String),
    #[error("base point is fixed by a nontrivial group element")]
    EllipticBase,
    #[error("region has no finite diameter")]
    UnboundedRegion,
    #[error("rejection sampling gave up after {0} draws")]
    Sampling(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
