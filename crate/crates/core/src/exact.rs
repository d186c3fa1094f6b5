//! Closed-form ground-state energies and the two-body → one-body reduction.

use crate::system::{ModelError, SystemSpec};
use serde::{Deserialize, Serialize};

/// One particle of effective mass μ in the attractive potential −γ/|q|
/// (ħ = 1), i.e. kinetic term |p|²/(2μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrogenicProblem {
    pub effective_mass: f64,
    pub attraction: f64,
}

impl HydrogenicProblem {
    pub fn new(effective_mass: f64, attraction: f64) -> Result<Self, ModelError> {
        if !(effective_mass > 0.0) || !(attraction > 0.0) {
            return Err(ModelError::InvalidSpec(format!(
                "hydrogenic problem needs positive mass and attraction, got ({effective_mass}, {attraction})"
            )));
        }
        Ok(HydrogenicProblem {
            effective_mass,
            attraction,
        })
    }
}

/// Exact ground-state energy −μγ²/2 of a hydrogenic problem.
pub fn hydrogenic_energy(pb: &HydrogenicProblem) -> f64 {
    -0.5 * pb.effective_mass * pb.attraction * pb.attraction
}

/// Reduce the translation-invariant two-boson star (in its dimensionless
/// units) to the effective one-body problem in the relative coordinate:
/// reduced mass 1/2, unit attraction.  Feeding the result to
/// [`hydrogenic_energy`] gives the exact two-body value −1/4.
pub fn reduce_two_body_intrinsic() -> HydrogenicProblem {
    HydrogenicProblem {
        effective_mass: 0.5,
        attraction: 1.0,
    }
}

/// The two-body fixed-grain system with grain mass halved and gravitational
/// coupling doubled, expressed in the original system's dimensionless units.
///
/// Halving M and doubling G leaves the central strength and the energy unit
/// unchanged while doubling the pair coupling, so the returned spec is simply
/// a two-body grain system at mass ratio 2β.  Three times its ground-state
/// energy is the lower-bound seed for the three-body grain system.
pub fn two_newt_seed(beta: f64) -> Result<SystemSpec, ModelError> {
    if !(beta > 0.0) {
        return Err(ModelError::InvalidSpec(format!(
            "mass ratio must be positive, got {beta}"
        )));
    }
    let spec = SystemSpec::fixed_grain(2, 2.0 * beta);
    spec.validate()?;
    Ok(spec)
}
