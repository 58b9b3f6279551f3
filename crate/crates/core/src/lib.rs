//! Classical and modified Poisson integrals for the half space
//! `{x ∈ ℝⁿ : x_n > 0}`, their asymptotic expansions, and numerical checks of
//! the identities and growth estimates they satisfy.
//!
//! Module overview:
//!
//! * [`gegenbauer`]: ultraspherical polynomials `C_m^λ`.
//! * [`geometry`]: points in the half space and on its boundary.
//! * [`kernels`]: the kernel `K`, the modified kernels `K_M` and `K̃_M`.
//! * [`quadrature`]: boundary data and the integral operators `D`, `N`,
//!   `D_M`, `N_M`, `F`, `F̃` and the assembled solutions `u`, `v`.
//! * [`expansions`]: harmonic families, expansion coefficients, the
//!   `exp(-|y|)` example.
//! * [`sharpness`]: constants, regions and data from the sharpness argument.
//! * [`verification`]: finite-difference and quadrature based checks.

pub mod error;
pub mod expansions;
pub mod gegenbauer;
pub mod geometry;
pub mod kernels;
pub mod quadrature;
pub mod report;
pub mod sharpness;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
pub use geometry::{AngleTriple, BoundaryPoint, Direction, HalfSpacePoint};
pub use kernels::{KernelKind, KernelParams};
pub use quadrature::{BoundaryData, Estimate, Problem, QuadratureSpec};
pub use report::{CheckReport, Status};
