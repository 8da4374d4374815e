use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("modulus mismatch: {0}")]
    ModulusMismatch(String),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("parameters infeasible: {0}")]
    Infeasible(String),
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("no nonzero solution exists")]
    NoSolution,
    #[error("version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("no directory entry for this function vector")]
    MissingDirectoryEntry,
    #[error("identity is revoked for this function")]
    Revoked,
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("revocation vector annihilates an unrevoked identity after {0} attempts")]
    DegenerateNullspace(usize),
    #[error("ciphertext update budget exhausted ({0} updates)")]
    UpdateBudget(u32),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("corrupted payload: {0}")]
    Corruption(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable kebab-case name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension-mismatch",
            Error::ModulusMismatch(_) => "modulus-mismatch",
            Error::Parameter(_) => "invalid-parameters",
            Error::Infeasible(_) => "infeasible-parameters",
            Error::Domain(_) => "out-of-domain",
            Error::NoSolution => "no-solution",
            Error::VersionMismatch { .. } => "version-mismatch",
            Error::MissingDirectoryEntry => "missing-directory-entry",
            Error::Revoked => "revoked",
            Error::Capacity(_) => "capacity-exceeded",
            Error::DegenerateNullspace(_) => "degenerate-nullspace",
            Error::UpdateBudget(_) => "update-budget-exhausted",
            Error::Encoding(_) => "encoding-error",
            Error::Format(_) => "format-error",
            Error::Corruption(_) => "corrupted",
            Error::Overflow(_) => "overflow",
            Error::Internal(_) => "internal-error",
        }
    }
}

pub(crate) fn dim_check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Dimension(what()))
    }
}
