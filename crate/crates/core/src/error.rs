use thiserror::Error;

use crate::bounds::BoundError;
use crate::corpus::CorpusError;
use crate::curves::manifest::ManifestError;
use crate::curves::CurveError;
use crate::feasibility::FeasibilityError;
use crate::finite_field::FieldError;
use crate::gram::GramError;
use crate::zeta::ZetaError;

/// Umbrella error for callers that drive several modules at once.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

impl Error {
    /// True when the failure is an exhausted enumeration budget rather than
    /// invalid input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Curve(CurveError::BudgetExceeded(_))
                | Error::Manifest(ManifestError::Curve(CurveError::BudgetExceeded(_)))
                | Error::Bound(BoundError::Curve(CurveError::BudgetExceeded(_)))
                | Error::Feasibility(FeasibilityError::BudgetExceeded { .. })
                | Error::Corpus(CorpusError::Curve(CurveError::BudgetExceeded(_)))
        )
    }
}
