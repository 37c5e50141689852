//! The primitive bundle shared by every solver.

use crate::error::{Error, Result};
use crate::knowledge::{CivicParams, SimplexVector};
use crate::learning::{LearningConstants, LearningTech};
use crate::politics::GovernanceTech;

/// Grid used for the concavity bound whenever an [`Economy`] is built.
pub const CONSTANTS_GRID: usize = 10_000;

/// Primitives of one economy: technology, productive and civic profiles,
/// integration efficiency, output scale and governance technology.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    pub tech: LearningTech,
    pub constants: LearningConstants,
    pub q: SimplexVector,
    pub civ: CivicParams,
    pub theta: f64,
    pub v: f64,
    pub gov: GovernanceTech,
}

impl Economy {
    pub fn new(
        tech: LearningTech,
        q: SimplexVector,
        civ: CivicParams,
        theta: f64,
        v: f64,
        gov: GovernanceTech,
    ) -> Result<Self> {
        if q.dim() != civ.u.dim() {
            return Err(Error::DimensionMismatch {
                expected: q.dim(),
                found: civ.u.dim(),
            });
        }
        if !q.is_interior() {
            return Err(Error::InvalidParameter(
                "production profile q must be strictly interior".into(),
            ));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "integration efficiency theta must be nonnegative, got {theta}"
            )));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "output scale V must be positive, got {v}"
            )));
        }
        let constants = tech.constants(CONSTANTS_GRID)?;
        Ok(Self {
            tech,
            constants,
            q,
            civ,
            theta,
            v,
            gov,
        })
    }

    pub fn k(&self) -> usize {
        self.q.dim()
    }

    pub fn theta_bar(&self) -> f64 {
        self.constants.theta_bar
    }

    /// `Err(AboveCoordinationCutoff)` unless `theta < theta_bar`.
    pub fn require_below_cutoff(&self) -> Result<()> {
        if self.theta < self.theta_bar() {
            Ok(())
        } else {
            Err(Error::AboveCoordinationCutoff {
                theta: self.theta,
                cutoff: self.theta_bar(),
            })
        }
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    pub fn with_civic_profile(&self, u: SimplexVector) -> Result<Self> {
        Ok(Self {
            civ: self.civ.with_profile(u)?,
            ..self.clone()
        })
    }

    pub fn with_gov(&self, gov: GovernanceTech) -> Self {
        Self {
            gov,
            ..self.clone()
        }
    }

    /// After-tax output scale `(1 - tau) V`.
    pub fn v_tilde(&self) -> f64 {
        (1.0 - self.gov.tau) * self.v
    }
}
