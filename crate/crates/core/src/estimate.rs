//! Energy values tagged with their bound character.
//!
//! Every number the toolkit reports is either exact, a certified upper or
//! lower bound, or a high-precision estimate standing in for an exact seed.
//! Operations that combine estimates must preserve the bound direction; the
//! only direction-safe primitive is multiplication by a positive factor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How a computed value relates to the true ground-state energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    Upper,
    Lower,
    Estimate,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Exact => "exact",
            BoundKind::Upper => "upper",
            BoundKind::Lower => "lower",
            BoundKind::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("scaling an energy estimate requires a positive factor, got {0}")]
    NonPositiveFactor(f64),
}

/// An energy value in the system's dimensionless units, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub kind: BoundKind,
    /// Short method tag, e.g. "hylleraas", "hartree", "chain_lower".
    pub method: String,
    /// Label of the system the value refers to, e.g. "coulomb[z=1]".
    pub system: String,
    /// Particle count the value refers to.
    pub n: u32,
}

impl EnergyEstimate {
    pub fn new(value: f64, kind: BoundKind, method: &str, system: &str, n: u32) -> Self {
        EnergyEstimate {
            value,
            kind,
            method: method.to_string(),
            system: system.to_string(),
            n,
        }
    }

    /// Multiply by a positive factor; the bound direction is preserved.
    pub fn scaled(&self, factor: f64) -> Result<EnergyEstimate, EstimateError> {
        if !(factor > 0.0) {
            return Err(EstimateError::NonPositiveFactor(factor));
        }
        Ok(EnergyEstimate {
            value: self.value * factor,
            ..self.clone()
        })
    }
}
