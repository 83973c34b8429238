//! Exact solution of two-region games, including equilibria on the boundary.
//!
//! When one company puts its whole fleet in a single region, the other
//! company's best response is a scalar concave problem in its region-1 mass
//! `z`. The marginal profit in `z` is strictly decreasing, so its values at
//! the interval ends decide whether `z*` is a corner or the unique root in
//! between. The boundary company's remaining non-negativity multiplier then
//! decides whether the pair is an equilibrium.
//!
//! Only the structures where company A sits on the boundary are written out;
//! the B structures are solved on the game with the companies exchanged.

use std::fmt;

use crate::equilibrium::{EquilibriumResult, Location};
use crate::error::{Error, Result};
use crate::game::{GameSpec, JointStrategy, Player, RegionParams};
use crate::interior::{interior_equilibrium, InteriorOutcome, INTERIOR_REL_TOL};
use crate::verification::{duals_from_stationarity, ne_residual};

/// Relative slack accepted on a non-negativity multiplier.
pub const CERTIFY_REL_TOL: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

/// The four ways a two-region equilibrium can touch the boundary.
///
/// Vectors below are `[x_a1, x_a2, x_b1, x_b2]`:
/// `A1 = [0, X_a, z, X_b - z]`, `A2 = [X_a, 0, z, X_b - z]`,
/// `B1 = [z, X_a - z, 0, X_b]`, `B2 = [z, X_a - z, X_b, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryFamily {
    A1,
    A2,
    B1,
    B2,
}

impl BoundaryFamily {
    pub const ALL: [BoundaryFamily; 4] = [Self::A1, Self::A2, Self::B1, Self::B2];

    /// Company whose allocation is pinned to a corner.
    pub fn boundary_player(self) -> Player {
        match self {
            Self::A1 | Self::A2 => Player::A,
            Self::B1 | Self::B2 => Player::B,
        }
    }

    /// Region (0-based) left empty by the boundary company.
    pub fn empty_region(self) -> usize {
        match self {
            Self::A1 | Self::B1 => 0,
            Self::A2 | Self::B2 => 1,
        }
    }

    /// The family with the companies' roles exchanged.
    pub fn mirrored(self) -> BoundaryFamily {
        match self {
            Self::A1 => Self::B1,
            Self::A2 => Self::B2,
            Self::B1 => Self::A1,
            Self::B2 => Self::A2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::A1 => "A1",
            Self::A2 => "A2",
            Self::B1 => "B1",
            Self::B2 => "B2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<BoundaryFamily> {
        Self::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

impl fmt::Display for BoundaryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Marginal profit of the free company at the two ends of its interval:
/// `upper` at `z = 0`, `lower` at `z = X_free`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub upper: f64,
    pub lower: f64,
}

/// Which branch of the scalar best response produced `z*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZCase {
    AtZero,
    Inside,
    AtFleet,
}

/// Raw two-region parameters. Fleets may be zero here, which the formulas
/// allow even though a [`GameSpec`] does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRegion {
    pub r1: RegionParams,
    pub r2: RegionParams,
    pub fleet_a: f64,
    pub fleet_b: f64,
}

impl TwoRegion {
    pub fn from_spec(spec: &GameSpec) -> Result<TwoRegion> {
        match spec.regions() {
            [r1, r2] => Ok(TwoRegion { r1: *r1, r2: *r2, fleet_a: spec.fleet_a(), fleet_b: spec.fleet_b() }),
            other => Err(Error::Unsupported(format!("two-region solver got {} regions", other.len()))),
        }
    }

    fn price_gap(&self) -> f64 {
        self.r2.beta_c() - self.r1.beta_c()
    }

    /// Thresholds when A holds region 2 only.
    pub fn thresholds_v(&self) -> Thresholds {
        let (m1, m2, e1, e2) = (self.r1.beta_m(), self.r2.beta_m(), self.r1.epsilon(), self.r2.epsilon());
        let (xa, xb) = (self.fleet_a, self.fleet_b);
        Thresholds {
            upper: self.price_gap() + m1 / e1 - m2 * (xa + e2) / (xa + xb + e2).powi(2),
            lower: self.price_gap() + m1 * e1 / (xb + e1).powi(2) - m2 / (xa + e2),
        }
    }

    /// Thresholds when A holds region 1 only.
    pub fn thresholds_w(&self) -> Thresholds {
        let (m1, m2, e1, e2) = (self.r1.beta_m(), self.r2.beta_m(), self.r1.epsilon(), self.r2.epsilon());
        let (xa, xb) = (self.fleet_a, self.fleet_b);
        Thresholds {
            upper: self.price_gap() + m1 / (xa + e1) - m2 * e2 / (xb + e2).powi(2),
            lower: self.price_gap() + m1 * (xa + e1) / (xa + xb + e1).powi(2) - m2 / e2,
        }
    }

    /// B's marginal profit in `z` when A sits at `[0, X_a]`.
    pub fn marginal_a_in_region2(&self, z: f64) -> f64 {
        let (m1, m2, e1, e2) = (self.r1.beta_m(), self.r2.beta_m(), self.r1.epsilon(), self.r2.epsilon());
        let (xa, xb) = (self.fleet_a, self.fleet_b);
        m1 * e1 / (z + e1).powi(2) - m2 * (xa + e2) / (xa + xb - z + e2).powi(2) + self.price_gap()
    }

    /// B's marginal profit in `z` when A sits at `[X_a, 0]`.
    pub fn marginal_a_in_region1(&self, z: f64) -> f64 {
        let (m1, m2, e1, e2) = (self.r1.beta_m(), self.r2.beta_m(), self.r1.epsilon(), self.r2.epsilon());
        let (xa, xb) = (self.fleet_a, self.fleet_b);
        m1 * (xa + e1) / (xa + z + e1).powi(2) - m2 * e2 / (xb - z + e2).powi(2) + self.price_gap()
    }

    fn thresholds(&self, family: BoundaryFamily) -> Thresholds {
        match family.empty_region() {
            0 => self.thresholds_v(),
            _ => self.thresholds_w(),
        }
    }

    fn marginal(&self, family: BoundaryFamily, z: f64) -> f64 {
        match family.empty_region() {
            0 => self.marginal_a_in_region2(z),
            _ => self.marginal_a_in_region1(z),
        }
    }

    /// B's best response `z*` to A's corner for an A-side family.
    fn best_z(&self, family: BoundaryFamily) -> (f64, ZCase) {
        let th = self.thresholds(family);
        if th.lower >= 0.0 {
            return (self.fleet_b, ZCase::AtFleet);
        }
        if th.upper <= 0.0 {
            return (0.0, ZCase::AtZero);
        }
        let (mut lo, mut hi) = (0.0, self.fleet_b);
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.marginal(family, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = if self.marginal(family, lo).abs() <= self.marginal(family, hi).abs() { lo } else { hi };
        (z, ZCase::Inside)
    }

    /// A's multiplier on its empty region, with the magnitude of the terms
    /// that produced it.
    fn boundary_multiplier(&self, family: BoundaryFamily, z: f64, case: ZCase) -> (f64, f64) {
        let (m1, m2, e1, e2) = (self.r1.beta_m(), self.r2.beta_m(), self.r1.epsilon(), self.r2.epsilon());
        let (xa, xb) = (self.fleet_a, self.fleet_b);
        let th = self.thresholds(family);
        let terms: [f64; 3] = match (family.empty_region(), case) {
            (0, ZCase::Inside) => [(xb - z - xa) * m2 / (xa + xb - z + e2).powi(2), -m1 * z / (z + e1).powi(2), 0.0],
            (0, ZCase::AtZero) => [-th.upper, (xb - xa) * m2 / (xa + xb + e2).powi(2), 0.0],
            (0, ZCase::AtFleet) => [-th.lower, -m1 * xb / (xb + e1).powi(2), -m2 * xa / (xa + e2).powi(2)],
            (_, ZCase::Inside) => [(z - xa) * m1 / (xa + z + e1).powi(2), -(xb - z) * m2 / (xb - z + e2).powi(2), 0.0],
            (_, ZCase::AtFleet) => [th.lower, (xb - xa) * m1 / (xa + xb + e1).powi(2), 0.0],
            (_, ZCase::AtZero) => [th.upper, -m1 * xa / (xa + e1).powi(2), -m2 * xb / (xb + e2).powi(2)],
        };
        let scale = terms.iter().map(|t| t.abs()).sum::<f64>() + self.r1.beta_c().abs() + self.r2.beta_c().abs();
        (terms.iter().sum(), scale)
    }

    fn swapped(&self) -> TwoRegion {
        TwoRegion { fleet_a: self.fleet_b, fleet_b: self.fleet_a, ..*self }
    }
}

/// One boundary structure evaluated on a game.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCandidate {
    pub family: BoundaryFamily,
    /// Region-1 mass of the free company.
    pub z_star: f64,
    pub z_case: ZCase,
    /// Thresholds of the game as seen with the boundary company in A's seat.
    pub thresholds: Thresholds,
    /// Boundary company's multiplier on its empty region.
    pub nu_check: f64,
    pub nu_scale: f64,
    pub certified: bool,
}

impl BoundaryCandidate {
    /// Full joint strategy of the candidate.
    pub fn strategy(&self, spec: &GameSpec) -> JointStrategy {
        let corner = |fleet: f64| -> Vec<f64> {
            match self.family.empty_region() {
                0 => vec![0.0, fleet],
                _ => vec![fleet, 0.0],
            }
        };
        let free = |fleet: f64| vec![self.z_star, fleet - self.z_star];
        match self.family.boundary_player() {
            Player::A => JointStrategy::from_vecs(corner(spec.fleet_a()), free(spec.fleet_b())),
            Player::B => JointStrategy::from_vecs(free(spec.fleet_a()), corner(spec.fleet_b())),
        }
    }
}

fn view_for(spec: &GameSpec, family: BoundaryFamily) -> Result<(TwoRegion, BoundaryFamily)> {
    let view = TwoRegion::from_spec(spec)?;
    Ok(match family.boundary_player() {
        Player::A => (view, family),
        Player::B => (view.swapped(), family.mirrored()),
    })
}

pub fn thresholds_v(spec: &GameSpec) -> Result<Thresholds> {
    Ok(TwoRegion::from_spec(spec)?.thresholds_v())
}

pub fn thresholds_w(spec: &GameSpec) -> Result<Thresholds> {
    Ok(TwoRegion::from_spec(spec)?.thresholds_w())
}

/// The free company's best response `z*` for a boundary structure.
pub fn boundary_best_response_z(spec: &GameSpec, family: BoundaryFamily) -> Result<f64> {
    let (view, a_family) = view_for(spec, family)?;
    Ok(view.best_z(a_family).0)
}

/// Builds the (uncertified) candidate for one family.
pub fn evaluate_family(spec: &GameSpec, family: BoundaryFamily) -> Result<BoundaryCandidate> {
    let (view, a_family) = view_for(spec, family)?;
    let (z_star, z_case) = view.best_z(a_family);
    Ok(BoundaryCandidate {
        family,
        z_star,
        z_case,
        thresholds: view.thresholds(a_family),
        nu_check: f64::NAN,
        nu_scale: 0.0,
        certified: false,
    })
}

/// Decides whether a candidate is an equilibrium from the sign of the
/// boundary company's multiplier on its empty region.
pub fn certify_candidate(spec: &GameSpec, candidate: &BoundaryCandidate) -> Result<BoundaryCandidate> {
    let (view, a_family) = view_for(spec, candidate.family)?;
    let (nu, scale) = view.boundary_multiplier(a_family, candidate.z_star, candidate.z_case);
    let feasible_case = match a_family.empty_region() {
        0 => candidate.z_case != ZCase::AtFleet,
        _ => candidate.z_case != ZCase::AtZero,
    };
    let certified = feasible_case && nu >= -CERTIFY_REL_TOL * (1.0 + scale);
    Ok(BoundaryCandidate { nu_check: nu, nu_scale: scale, certified, ..candidate.clone() })
}

/// Interior attempt plus every boundary family, before any selection.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRegionAnalysis {
    pub interior: InteriorOutcome,
    pub candidates: Vec<BoundaryCandidate>,
}

impl TwoRegionAnalysis {
    pub fn certified(&self) -> impl Iterator<Item = &BoundaryCandidate> {
        self.candidates.iter().filter(|c| c.certified)
    }

    /// Certified candidates with coincident strategies merged (a point with
    /// both companies in corners belongs to two families).
    pub fn distinct_certified(&self, spec: &GameSpec) -> Vec<&BoundaryCandidate> {
        let tol = 1e-9 * (spec.fleet_a() + spec.fleet_b());
        let mut out: Vec<&BoundaryCandidate> = Vec::new();
        for c in self.certified() {
            let s = c.strategy(spec);
            if !out.iter().any(|o| o.strategy(spec).max_abs_diff(&s) <= tol) {
                out.push(c);
            }
        }
        out
    }
}

pub fn analyze_two_region(spec: &GameSpec) -> Result<TwoRegionAnalysis> {
    TwoRegion::from_spec(spec)?;
    let interior = interior_equilibrium(spec)?;
    let candidates = BoundaryFamily::ALL
        .iter()
        .map(|&f| evaluate_family(spec, f).and_then(|c| certify_candidate(spec, &c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TwoRegionAnalysis { interior, candidates })
}

fn boundary_result(spec: &GameSpec, candidate: &BoundaryCandidate) -> Result<EquilibriumResult> {
    let strategy = candidate.strategy(spec);
    let duals = duals_from_stationarity(spec, &strategy, INTERIOR_REL_TOL);
    let ne_residual = ne_residual(spec, &strategy)?;
    Ok(EquilibriumResult {
        strategy,
        duals,
        location: Location::Family(candidate.family),
        ne_residual,
        solver_trace: None,
    })
}

/// Computes the equilibrium of any two-region game.
pub fn solve_two_region(spec: &GameSpec) -> Result<EquilibriumResult> {
    TwoRegion::from_spec(spec)?;
    let interior = interior_equilibrium(spec)?;
    let not_interior = match interior {
        InteriorOutcome::Interior(sol) => {
            let ne_residual = ne_residual(spec, &sol.strategy)?;
            return Ok(EquilibriumResult {
                strategy: sol.strategy,
                duals: sol.duals,
                location: Location::Interior,
                ne_residual,
                solver_trace: Some(sol.trace),
            });
        }
        InteriorOutcome::NotInterior(n) => n,
    };

    let analysis = TwoRegionAnalysis {
        interior: InteriorOutcome::NotInterior(not_interior.clone()),
        candidates: BoundaryFamily::ALL
            .iter()
            .map(|&f| evaluate_family(spec, f).and_then(|c| certify_candidate(spec, &c)))
            .collect::<Result<Vec<_>>>()?,
    };
    let distinct = analysis.distinct_certified(spec);

    if not_interior.boundary_suspect() {
        // Interior point numerically on the boundary: keep whichever
        // candidate is the better equilibrium.
        let near = &not_interior.candidate;
        let near_residual = ne_residual(spec, near)?;
        let mut best: Option<EquilibriumResult> = None;
        for c in distinct {
            let r = boundary_result(spec, c)?;
            if best.as_ref().is_none_or(|b| r.ne_residual < b.ne_residual) {
                best = Some(r);
            }
        }
        return match best {
            Some(b) if b.ne_residual <= near_residual => Ok(b),
            _ => Ok(EquilibriumResult {
                strategy: near.clone(),
                duals: duals_from_stationarity(spec, near, INTERIOR_REL_TOL),
                location: Location::classify(spec, near, INTERIOR_REL_TOL),
                ne_residual: near_residual,
                solver_trace: Some(not_interior.trace),
            }),
        };
    }

    match distinct.as_slice() {
        [only] => boundary_result(spec, only),
        [] => Err(Error::Inconsistency("no boundary structure certifies as an equilibrium".into())),
        many => Err(Error::Inconsistency(format!(
            "{} distinct boundary structures certify: {}",
            many.len(),
            many.iter().map(|c| c.family.tag()).collect::<Vec<_>>().join(", ")
        ))),
    }
}
