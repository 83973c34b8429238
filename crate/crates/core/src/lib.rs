//! Equilibrium computation for a two-company fleet allocation game.
//!
//! Two ride-hailing companies split fleets of sizes `X_a` and `X_b` over `m`
//! regions. In region `j` a company placing `x` vehicles against the
//! opponent's `y` earns `beta_m * x / (x + y + eps) - beta_c * x`: a contest
//! share of the regional market, where `eps > 0` models customers lost to
//! abandonment, minus a linear charging cost.
//!
//! The game has a unique pure equilibrium. This crate
//!
//! * computes it in closed form up to one scalar root when it is interior
//!   ([`interior`]),
//! * computes it exactly for two regions wherever it lies ([`boundary`]),
//! * checks candidates independently ([`verification`]),
//! * reproduces the reference parameter studies ([`experiments`]),
//! * reads configurations and writes CSV ([`io`]).

pub mod boundary;
pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod game;
pub mod interior;
pub mod io;
pub mod verification;

pub use equilibrium::{EquilibriumResult, Location};
pub use error::{Error, Result};
pub use game::{Allocation, DualCertificate, GameSpec, JointStrategy, Player, RegionParams};
