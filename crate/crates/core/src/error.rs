use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into domain/validation failures and numerical failures
/// (tolerance breaches); the CLI maps the two groups to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate form")]
    DegenerateForm,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("isotropic reflection vector")]
    IsotropicReflection,
    #[error("matrix is not an isometry of the lattice")]
    NotIsometry,
    #[error("zero linear form")]
    ZeroForm,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("not in the orthogonal complement of the period plane (residual {residual:e})")]
    NotInPerp { residual: f64 },
    #[error("span is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("signature too small: {0}")]
    SignatureTooSmall(String),
    #[error("max_links exceeded ({0} links)")]
    MaxLinksExceeded(usize),
    #[error("hard Lefschetz fails (residual {residual:e})")]
    HardLefschetzFails { residual: f64 },
    #[error("Lie closure exceeded dimension cap {0}")]
    ClosureCap(usize),
    #[error("Fujiki relation violated at sample {sample:?}")]
    FujikiViolated { sample: Vec<i64> },
    #[error("enumeration cap exceeded: {0}")]
    EnumerationCap(String),
    #[error("not a cocycle")]
    NotCocycle,
    #[error("degree {0} out of range")]
    DegreeOverflow(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for tolerance breaches and failed numerical solves.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Inconsistent(_))
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateForm => "degenerate_form",
            Error::NotSymmetric => "not_symmetric",
            Error::Dimension { .. } => "dimension",
            Error::Invalid(_) => "invalid",
            Error::IsotropicReflection => "isotropic_reflection",
            Error::NotIsometry => "not_isometry",
            Error::ZeroForm => "zero_form",
            Error::Inconsistent(_) => "inconsistent",
            Error::NotInPerp { .. } => "not_in_perp",
            Error::NotPositive { .. } => "not_positive",
            Error::SignatureTooSmall(_) => "signature_too_small",
            Error::MaxLinksExceeded(_) => "max_links_exceeded",
            Error::HardLefschetzFails { .. } => "hard_lefschetz_fails",
            Error::ClosureCap(_) => "closure_cap",
            Error::FujikiViolated { .. } => "fujiki_violated",
            Error::EnumerationCap(_) => "enumeration_cap",
            Error::NotCocycle => "not_cocycle",
            Error::DegreeOverflow(_) => "degree_overflow",
            Error::Numerical(_) => "numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
