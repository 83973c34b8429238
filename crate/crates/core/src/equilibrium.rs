use std::fmt;

use crate::boundary::BoundaryFamily;
use crate::game::{DualCertificate, GameSpec, JointStrategy, Player};
use crate::interior::InteriorSolveTrace;

/// Where an equilibrium sits in the joint feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Interior,
    /// One of the four two-region boundary structures.
    Family(BoundaryFamily),
    /// On the boundary of a game with more than two regions.
    Boundary,
}

impl Location {
    /// Classifies a point; components at or below `rel_tol * fleet` count as zero.
    pub fn classify(spec: &GameSpec, joint: &JointStrategy, rel_tol: f64) -> Location {
        let zero_at = |player: Player| -> Option<usize> {
            let thr = rel_tol * spec.fleet(player);
            joint.of(player).values.iter().position(|&v| v <= thr)
        };
        let (za, zb) = (zero_at(Player::A), zero_at(Player::B));
        if za.is_none() && zb.is_none() {
            return Location::Interior;
        }
        if spec.num_regions() != 2 {
            return Location::Boundary;
        }
        match (za, zb) {
            (Some(0), _) => Location::Family(BoundaryFamily::A1),
            (Some(_), _) => Location::Family(BoundaryFamily::A2),
            (None, Some(0)) => Location::Family(BoundaryFamily::B1),
            (None, _) => Location::Family(BoundaryFamily::B2),
        }
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, Location::Interior)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Location::Interior => "interior",
            Location::Family(f) => f.tag(),
            Location::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A solved equilibrium together with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub strategy: JointStrategy,
    pub duals: DualCertificate,
    pub location: Location,
    /// Largest unilateral improvement available to either company.
    pub ne_residual: f64,
    pub solver_trace: Option<InteriorSolveTrace>,
}

impl EquilibriumResult {
    pub fn utilities(&self, spec: &GameSpec) -> (f64, f64) {
        let (a, b) = (self.strategy.a(), self.strategy.b());
        (spec.payoff(a, b), spec.payoff(b, a))
    }

    /// Acceptance bound on [`EquilibriumResult::ne_residual`].
    pub fn residual_bound(&self, spec: &GameSpec) -> f64 {
        let (ua, ub) = self.utilities(spec);
        1e-6 * (ua.abs() + ub.abs() + 1.0)
    }
}
