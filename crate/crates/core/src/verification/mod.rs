//! Independent checks on candidate equilibria.
//!
//! Nothing here depends on the closed-form solvers: best responses come from
//! a multiplier bisection, the grid oracle from exhaustive search, and the
//! concavity certificate from the second derivatives of the profits.

mod best_response;
mod certificate;
mod dynamics;
mod grid;
mod residuals;

pub use best_response::best_response;
pub use certificate::{concavity_certificate, ConcavityCertificate, SCHUR_REL_TOL};
pub use dynamics::{iterated_best_response, IteratedOutcome, DEFAULT_DAMPING};
pub use grid::{grid_oracle_ne, GridOracleResult, MAX_GRID_CELLS};
pub use residuals::{duals_from_stationarity, kkt_residual, ne_residual};
