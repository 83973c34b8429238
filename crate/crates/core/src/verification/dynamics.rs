use crate::equilibrium::{EquilibriumResult, Location};
use crate::error::Result;
use crate::game::{GameSpec, JointStrategy, Player};

use super::best_response::best_response_values;
use super::residuals::{duals_from_stationarity, ne_residual};

pub const DEFAULT_DAMPING: f64 = 0.5;

/// Components below this fraction of the fleet are reported as zero.
const ZERO_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct IteratedOutcome {
    pub result: EquilibriumResult,
    pub converged: bool,
    pub iterations: usize,
    /// Joint movement in the last sweep.
    pub last_step: f64,
}

/// Damped alternating best responses from the uniform split.
///
/// Each sweep moves A toward its best response, then B toward its best
/// response to A's new allocation. Stops once a sweep moves no component by
/// `tol` or more; running out of iterations is reported, not raised.
pub fn iterated_best_response(spec: &GameSpec, damping: f64, max_iters: usize, tol: f64) -> Result<IteratedOutcome> {
    let damping = damping.clamp(f64::MIN_POSITIVE, 1.0);
    let mut joint = spec.uniform_strategy();
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;
        last_step = 0.0;
        for player in Player::BOTH {
            let target = best_response_values(spec, spec.fleet(player), &joint.of(player.other()).values)?;
            let own = &mut joint.of_mut(player).values;
            for (x, t) in own.iter_mut().zip(target) {
                let next = (1.0 - damping) * *x + damping * t;
                last_step = last_step.max((next - *x).abs());
                *x = next;
            }
        }
        if last_step < tol {
            converged = true;
            break;
        }
    }

    snap_to_fleet(spec, &mut joint);
    let ne_residual = ne_residual(spec, &joint)?;
    let location = Location::classify(spec, &joint, ZERO_REL_TOL);
    let duals = duals_from_stationarity(spec, &joint, ZERO_REL_TOL);
    Ok(IteratedOutcome {
        result: EquilibriumResult { strategy: joint, duals, location, ne_residual, solver_trace: None },
        converged,
        iterations,
        last_step,
    })
}

/// Zeroes negligible components and rescales each allocation onto its fleet.
fn snap_to_fleet(spec: &GameSpec, joint: &mut JointStrategy) {
    for player in Player::BOTH {
        let fleet = spec.fleet(player);
        let values = &mut joint.of_mut(player).values;
        for v in values.iter_mut() {
            if *v <= ZERO_REL_TOL * fleet * 1e-3 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v *= fleet / sum);
    }
}
