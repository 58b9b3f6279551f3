//! Integral operators over the boundary `ℝⁿ⁻¹`, `2 ≤ n ≤ 5`.

pub mod data;
mod operators;
pub(crate) mod region;
pub mod rules;

pub use data::{BoundaryData, Support, SupportPiece};
pub use operators::*;
pub use rules::Estimate;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Dirichlet,
    Neumann,
}

/// Resolution and tolerance settings shared by all boundary integrals.
///
/// Unbounded regions are split at `truncation_radius`; the part beyond is
/// integrated after the substitution `|y'| = R/τ`, so nothing is discarded.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub truncation_radius: f64,
    /// Initial uniform radial panels per region.
    pub radial_panels: usize,
    /// Initial uniform panels per angular level below the polar one.
    pub angular_order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Panel budget of each adaptive 1D integration.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            truncation_radius: 64.0,
            radial_panels: 4,
            angular_order: 1,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_panels: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_truncation_radius(mut self, r: f64) -> Self {
        self.truncation_radius = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return domain("truncation_radius must be positive and finite");
        }
        if self.radial_panels == 0 || self.angular_order == 0 || self.max_panels == 0 {
            return domain("panel counts must be positive");
        }
        if !(self.abs_tol > 0.0 && self.rel_tol >= 0.0) {
            return domain("tolerances must be positive");
        }
        Ok(())
    }
}
