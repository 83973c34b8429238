//! Game model: regions, fleets, allocations and the per-company profit.
//!
//! Each region `j` carries a market value `beta_m`, a per-vehicle charging
//! cost `beta_c` and an abandonment offset `epsilon`. A company placing `own`
//! vehicles against `opponent` captures `beta_m * own / (own + opponent + epsilon)`
//! and pays `beta_c * own` for charging.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance on the fleet-sum equality of a feasible allocation.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    A,
    B,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::A, Player::B];

    pub fn other(self) -> Player {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::A => f.write_str("a"),
            Player::B => f.write_str("b"),
        }
    }
}

/// Aggregate parameters of one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams {
    beta_m: f64,
    beta_c: f64,
    epsilon: f64,
}

impl RegionParams {
    pub fn new(beta_m: f64, beta_c: f64, epsilon: f64) -> Result<Self> {
        if !(beta_m.is_finite() && beta_m > 0.0) {
            return Err(Error::Validation(format!("beta_m must be positive, got {beta_m}")));
        }
        if !(beta_c.is_finite() && beta_c >= 0.0) {
            return Err(Error::Validation(format!("beta_c must be non-negative, got {beta_c}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Validation(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { beta_m, beta_c, epsilon })
    }

    /// Builds a region from request volume, profit per vehicle, energy price
    /// and per-vehicle charging demand.
    pub fn from_raw(
        requests: f64,
        profit_per_vehicle: f64,
        energy_price: f64,
        charging_demand: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if !(requests.is_finite() && requests > 0.0) {
            return Err(Error::Validation(format!("requests must be positive, got {requests}")));
        }
        if !(profit_per_vehicle.is_finite() && profit_per_vehicle > 0.0) {
            return Err(Error::Validation(format!("profit per vehicle must be positive, got {profit_per_vehicle}")));
        }
        Self::new(requests * profit_per_vehicle, energy_price * charging_demand, epsilon)
    }

    pub fn beta_m(&self) -> f64 {
        self.beta_m
    }

    pub fn beta_c(&self) -> f64 {
        self.beta_c
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn with_beta_c(&self, beta_c: f64) -> Result<Self> {
        Self::new(self.beta_m, beta_c, self.epsilon)
    }

    /// Market value captured by a company placing `own` against `opponent`.
    pub fn market_share(&self, own: f64, opponent: f64) -> f64 {
        self.beta_m * own / (own + opponent + self.epsilon)
    }

    /// Value forfeited to abandonments given both companies' presence.
    pub fn profit_loss(&self, x_a: f64, x_b: f64) -> f64 {
        self.beta_m * self.epsilon / (x_a + x_b + self.epsilon)
    }

    pub fn charging_cost(&self, own: f64) -> f64 {
        self.beta_c * own
    }

    /// Net profit of `own` vehicles in this region.
    pub fn payoff(&self, own: f64, opponent: f64) -> f64 {
        own * (self.beta_m / (own + opponent + self.epsilon) - self.beta_c)
    }

    /// Derivative of [`RegionParams::payoff`] in `own`.
    pub fn marginal(&self, own: f64, opponent: f64) -> f64 {
        let t = own + opponent + self.epsilon;
        self.beta_m * (opponent + self.epsilon) / (t * t) - self.beta_c
    }
}

/// Free-function form of [`RegionParams::from_raw`].
pub fn region_from_raw(
    requests: f64,
    profit_per_vehicle: f64,
    energy_price: f64,
    charging_demand: f64,
    epsilon: f64,
) -> Result<RegionParams> {
    RegionParams::from_raw(requests, profit_per_vehicle, energy_price, charging_demand, epsilon)
}

/// A complete game instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    regions: Vec<RegionParams>,
    fleet_a: f64,
    fleet_b: f64,
}

impl GameSpec {
    pub fn new(regions: Vec<RegionParams>, fleet_a: f64, fleet_b: f64) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::Validation("a game needs at least one region".into()));
        }
        for (name, fleet) in [("fleet_a", fleet_a), ("fleet_b", fleet_b)] {
            if !(fleet.is_finite() && fleet > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive, got {fleet}")));
            }
        }
        Ok(Self { regions, fleet_a, fleet_b })
    }

    pub fn regions(&self) -> &[RegionParams] {
        &self.regions
    }

    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn fleet(&self, player: Player) -> f64 {
        match player {
            Player::A => self.fleet_a,
            Player::B => self.fleet_b,
        }
    }

    pub fn fleet_a(&self) -> f64 {
        self.fleet_a
    }

    pub fn fleet_b(&self) -> f64 {
        self.fleet_b
    }

    pub fn epsilon_sum(&self) -> f64 {
        self.regions.iter().map(RegionParams::epsilon).sum()
    }

    /// The same game with the companies' roles exchanged.
    pub fn swapped(&self) -> GameSpec {
        GameSpec { regions: self.regions.clone(), fleet_a: self.fleet_b, fleet_b: self.fleet_a }
    }

    pub fn with_fleets(&self, fleet_a: f64, fleet_b: f64) -> Result<GameSpec> {
        GameSpec::new(self.regions.clone(), fleet_a, fleet_b)
    }

    /// Uniform split of `player`'s fleet.
    pub fn uniform_allocation(&self, player: Player) -> Allocation {
        let m = self.num_regions();
        Allocation::new(player, vec![self.fleet(player) / m as f64; m])
    }

    pub fn uniform_strategy(&self) -> JointStrategy {
        JointStrategy::new(self.uniform_allocation(Player::A), self.uniform_allocation(Player::B))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_regions() {
            return Err(Error::Validation(format!(
                "allocation has {len} entries, game has {} regions",
                self.num_regions()
            )));
        }
        Ok(())
    }

    /// Profit of `own` against `opponent`, defined for any non-negative vectors.
    pub fn payoff(&self, own: &[f64], opponent: &[f64]) -> f64 {
        self.regions.iter().zip(own.iter().zip(opponent)).map(|(r, (&x, &y))| r.payoff(x, y)).sum()
    }

    pub fn payoff_gradient(&self, own: &[f64], opponent: &[f64]) -> Vec<f64> {
        self.regions.iter().zip(own.iter().zip(opponent)).map(|(r, (&x, &y))| r.marginal(x, y)).collect()
    }
}

/// One company's split of its fleet over the regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub owner: Player,
    pub values: Vec<f64>,
}

impl Allocation {
    pub fn new(owner: Player, values: Vec<f64>) -> Self {
        Self { owner, values }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Feasibility of `alloc` for its owner: non-negative entries summing to the
/// owner's fleet within [`FEASIBILITY_TOL`].
pub fn is_feasible(spec: &GameSpec, alloc: &Allocation) -> Result<bool> {
    spec.check_len(alloc.len())?;
    let nonneg = alloc.values.iter().all(|&v| v.is_finite() && v >= 0.0);
    let sum_ok = (alloc.total() - spec.fleet(alloc.owner)).abs() <= FEASIBILITY_TOL;
    Ok(nonneg && sum_ok)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointStrategy {
    pub alloc_a: Allocation,
    pub alloc_b: Allocation,
}

impl JointStrategy {
    pub fn new(alloc_a: Allocation, alloc_b: Allocation) -> Self {
        debug_assert_eq!(alloc_a.owner, Player::A);
        debug_assert_eq!(alloc_b.owner, Player::B);
        Self { alloc_a, alloc_b }
    }

    pub fn from_vecs(a: Vec<f64>, b: Vec<f64>) -> Self {
        Self::new(Allocation::new(Player::A, a), Allocation::new(Player::B, b))
    }

    pub fn of(&self, player: Player) -> &Allocation {
        match player {
            Player::A => &self.alloc_a,
            Player::B => &self.alloc_b,
        }
    }

    pub fn of_mut(&mut self, player: Player) -> &mut Allocation {
        match player {
            Player::A => &mut self.alloc_a,
            Player::B => &mut self.alloc_b,
        }
    }

    pub fn a(&self) -> &[f64] {
        &self.alloc_a.values
    }

    pub fn b(&self) -> &[f64] {
        &self.alloc_b.values
    }

    /// Exchanges the companies' allocations (and owner tags).
    pub fn swapped(&self) -> JointStrategy {
        JointStrategy::from_vecs(self.alloc_b.values.clone(), self.alloc_a.values.clone())
    }

    pub fn is_feasible(&self, spec: &GameSpec) -> Result<bool> {
        Ok(self.alloc_a.owner == Player::A
            && self.alloc_b.owner == Player::B
            && is_feasible(spec, &self.alloc_a)?
            && is_feasible(spec, &self.alloc_b)?)
    }

    /// Largest componentwise distance to `other`.
    pub fn max_abs_diff(&self, other: &JointStrategy) -> f64 {
        self.a()
            .iter()
            .zip(other.a())
            .chain(self.b().iter().zip(other.b()))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Lagrange multipliers of both best-response problems.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub nu_a: Vec<f64>,
    pub nu_b: Vec<f64>,
}

impl DualCertificate {
    pub fn lambda(&self, player: Player) -> f64 {
        match player {
            Player::A => self.lambda_a,
            Player::B => self.lambda_b,
        }
    }

    pub fn nu(&self, player: Player) -> &[f64] {
        match player {
            Player::A => &self.nu_a,
            Player::B => &self.nu_b,
        }
    }

    pub fn swapped(&self) -> DualCertificate {
        DualCertificate {
            lambda_a: self.lambda_b,
            lambda_b: self.lambda_a,
            nu_a: self.nu_b.clone(),
            nu_b: self.nu_a.clone(),
        }
    }
}

pub fn market_share(region: &RegionParams, own: f64, opponent: f64) -> f64 {
    region.market_share(own, opponent)
}

pub fn profit_loss(region: &RegionParams, x_a: f64, x_b: f64) -> f64 {
    region.profit_loss(x_a, x_b)
}

pub fn charging_cost(region: &RegionParams, own: f64) -> f64 {
    region.charging_cost(own)
}

/// Profit of `player` under `joint`. Rejects infeasible strategies; use
/// [`GameSpec::payoff`] to probe arbitrary non-negative points.
pub fn utility(spec: &GameSpec, player: Player, joint: &JointStrategy) -> Result<f64> {
    if !joint.is_feasible(spec)? {
        return Err(Error::Validation("joint strategy is not feasible".into()));
    }
    Ok(spec.payoff(&joint.of(player).values, &joint.of(player.other()).values))
}

pub fn utility_gradient(spec: &GameSpec, player: Player, joint: &JointStrategy) -> Vec<f64> {
    spec.payoff_gradient(&joint.of(player).values, &joint.of(player.other()).values)
}
