use crate::error::Result;
use crate::game::{DualCertificate, GameSpec, JointStrategy, Player};

use super::best_response::best_response_values;

/// Largest utility gain either company could obtain by deviating alone.
pub fn ne_residual(spec: &GameSpec, joint: &JointStrategy) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for player in Player::BOTH {
        let own = &joint.of(player).values;
        let opp = &joint.of(player.other()).values;
        let br = best_response_values(spec, spec.fleet(player), opp)?;
        worst = worst.max(spec.payoff(&br, opp) - spec.payoff(own, opp));
    }
    Ok(worst)
}

/// Largest absolute violation of stationarity, primal feasibility, dual
/// feasibility and complementary slackness for both best-response problems.
pub fn kkt_residual(spec: &GameSpec, joint: &JointStrategy, duals: &DualCertificate) -> f64 {
    let mut worst = 0.0f64;
    for player in Player::BOTH {
        let own = &joint.of(player).values;
        let opp = &joint.of(player.other()).values;
        let grad = spec.payoff_gradient(own, opp);
        let lambda = duals.lambda(player);
        let nu = duals.nu(player);
        for ((&g, &n), &x) in grad.iter().zip(nu).zip(own) {
            worst = worst.max((lambda + n + g).abs());
            worst = worst.max(-n);
            worst = worst.max(-x);
            worst = worst.max((n * x).abs());
        }
        let total: f64 = own.iter().sum();
        worst = worst.max((total - spec.fleet(player)).abs());
    }
    worst
}

/// Recovers multipliers from the stationarity conditions at a point.
///
/// `lambda` is read off the largest component (where the non-negativity
/// multiplier vanishes); the remaining `nu_j` follow from stationarity and are
/// zero wherever the allocation is positive.
pub fn duals_from_stationarity(spec: &GameSpec, joint: &JointStrategy, zero_rel_tol: f64) -> DualCertificate {
    let solve = |player: Player| -> (f64, Vec<f64>) {
        let own = &joint.of(player).values;
        let opp = &joint.of(player.other()).values;
        let grad = spec.payoff_gradient(own, opp);
        let anchor = own.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(j, _)| j).unwrap_or(0);
        let lambda = -grad[anchor];
        let thr = zero_rel_tol * spec.fleet(player);
        let scale = grad.iter().fold(lambda.abs(), |m, g| m.max(g.abs())).max(1.0);
        let nu = grad
            .iter()
            .zip(own)
            .map(|(&g, &x)| {
                if x > thr {
                    0.0
                } else {
                    let v = -lambda - g;
                    if v < 0.0 && v > -1e-9 * scale {
                        0.0
                    } else {
                        v
                    }
                }
            })
            .collect();
        (lambda, nu)
    };
    let (lambda_a, nu_a) = solve(Player::A);
    let (lambda_b, nu_b) = solve(Player::B);
    DualCertificate { lambda_a, lambda_b, nu_a, nu_b }
}
