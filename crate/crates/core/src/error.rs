use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("system size must be at least 1")]
    EmptySystem,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("site {site} out of range for {len} sites")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("gate sites must differ (got {0} twice)")]
    RepeatedSite(usize),
    #[error("generator is not Hermitian (phase {0})")]
    NonHermitian(u8),
    #[error("generator anticommutes with an existing generator")]
    Anticommuting,
    #[error("generator is dependent on the existing generators")]
    Dependent,
    #[error("regions overlap")]
    OverlappingRegions,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("dense simulation limited to {max} sites, got {got}")]
    DenseTooLarge { max: usize, got: usize },
    #[error("sampled a branch of zero probability ({0:e})")]
    ZeroProbability(f64),
    #[error("density matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("missing q=0 baseline for L={l}, p={p}")]
    MissingBaseline { l: usize, p: f64 },
    #[error("no sign change of the volume coefficient in the p range")]
    NoSignChange,
    #[error("permutation size mismatch: {0} vs {1}")]
    PermSizeMismatch(usize, usize),
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("Gram matrix is singular for d={d} < Q={q}")]
    SingularGram { q: usize, d: usize },
    #[error("{engine} budget exceeded: {needed:.3e} > limit {limit:e}")]
    Budget {
        engine: &'static str,
        needed: f64,
        limit: f64,
    },
    #[error("inconsistent patch: {0}")]
    InconsistentPatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
