use crate::error::{Error, Result};
use crate::game::{Allocation, GameSpec, Player};

const MAX_BISECTIONS: usize = 400;

/// Best response of `player` against a fixed opponent allocation.
///
/// Stationarity gives each region the mass
/// `x_j(mu) = max(0, sqrt(bm_j y_j / (bc_j + mu)) - y_j)` with
/// `y_j = opponent_j + eps_j` and a common marginal `mu`. The total is strictly
/// decreasing in `mu`, so `mu` is bisected until the fleet is exactly used.
pub fn best_response(spec: &GameSpec, player: Player, opponent: &Allocation) -> Result<Allocation> {
    if opponent.owner != player.other() {
        return Err(Error::Validation(format!("opponent allocation must belong to {}", player.other())));
    }
    if opponent.len() != spec.num_regions() {
        return Err(Error::Validation("opponent allocation has the wrong length".into()));
    }
    let values = best_response_values(spec, spec.fleet(player), &opponent.values)?;
    Ok(Allocation::new(player, values))
}

pub(crate) fn best_response_values(spec: &GameSpec, fleet: f64, opponent: &[f64]) -> Result<Vec<f64>> {
    let regions = spec.regions();
    if regions.len() == 1 {
        return Ok(vec![fleet]);
    }
    let y: Vec<f64> = regions.iter().zip(opponent).map(|(r, &o)| o + r.epsilon()).collect();
    let place = |mu: f64| -> Vec<f64> {
        regions.iter().zip(&y).map(|(r, &yj)| ((r.beta_m() * yj / (r.beta_c() + mu)).sqrt() - yj).max(0.0)).collect()
    };
    let total = |mu: f64| place(mu).iter().sum::<f64>();

    let min_c = regions.iter().map(|r| r.beta_c()).fold(f64::INFINITY, f64::min);
    let mut lo = -min_c + 1e-12 * (1.0 + min_c);
    let mut hi = regions.iter().zip(&y).map(|(r, &yj)| r.beta_m() / yj - r.beta_c()).fold(f64::NEG_INFINITY, f64::max);
    if lo >= hi || total(lo) < fleet {
        return Err(Error::Numerical("best-response multiplier bracket does not contain the fleet".into()));
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) >= fleet {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = place(lo);
    let sum: f64 = x.iter().sum();
    if (sum - fleet).abs() > 1e-9 * fleet.max(1.0) {
        return Err(Error::Numerical(format!("best response misses the fleet: {sum} vs {fleet}")));
    }
    // Remove the last rounding so the result sums to the fleet exactly.
    let scale = fleet / sum;
    x.iter_mut().for_each(|v| *v *= scale);
    Ok(x)
}
