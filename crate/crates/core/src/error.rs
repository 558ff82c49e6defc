use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("not representable")]
    NotRepresentable,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("vertical vector")]
    VerticalVector,
    #[error("degenerate shear")]
    DegenerateShear,
    #[error("section coverage violated at ({a}, {b})")]
    CoverageViolated { a: String, b: String },
    #[error("return map range violated: {0}")]
    RangeViolated(String),
    #[error("point outside section: {0}")]
    OutsideSection(String),
    #[error("radius below 1")]
    RadiusBelowOne,
    #[error("cusp {cusp}: short vector not normalized")]
    ShortVectorNotNormalized { cusp: usize },
    #[error("cusp {cusp}: nonpositive width")]
    NonpositiveWidth { cusp: usize },
    #[error("cusp {cusp}: conjugated generator is not [[{sign}, alpha], [0, {sign}]]")]
    BadParabolic { cusp: usize, sign: i8 },
    #[error("cusp {cusp}: eigenvalue -1 requires a surface without -Id")]
    EigenSignWithMinusId { cusp: usize },
    #[error("cusp index {0} out of range")]
    NoSuchCusp(usize),
    #[error("not in section")]
    NotInSection,
    #[error("not upper triangular")]
    NotUpperTriangular,
    #[error("outside real branch")]
    OutsideRealBranch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
