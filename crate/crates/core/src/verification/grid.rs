use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{GameSpec, JointStrategy, RegionParams};

/// Maximum number of cells per company in the grid oracle.
pub const MAX_GRID_CELLS: usize = 100_000;

/// Discrete equilibrium of a two-region game on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOracleResult {
    pub strategy: JointStrategy,
    pub step: f64,
    /// Largest gain either company can get by moving to another grid point.
    pub eps_ne: f64,
}

/// Region-1 masses `0, step, 2 step, ...` up to and including the fleet.
fn grid_points(fleet: f64, step: f64) -> Result<Vec<f64>> {
    let cells = (fleet / step).floor();
    if !cells.is_finite() || cells > MAX_GRID_CELLS as f64 {
        return Err(Error::Resource(format!("grid of {cells} cells exceeds {MAX_GRID_CELLS}")));
    }
    let mut pts: Vec<f64> = (0..=cells as usize).map(|k| k as f64 * step).collect();
    let last = *pts.last().unwrap_or(&0.0);
    if fleet - last > 1e-9 * fleet {
        pts.push(fleet);
    } else if let Some(p) = pts.last_mut() {
        *p = fleet;
    }
    Ok(pts)
}

#[inline]
fn split_payoff(r: &[RegionParams; 2], fleet: f64, own1: f64, opp_fleet: f64, opp1: f64) -> f64 {
    r[0].payoff(own1, opp1) + r[1].payoff(fleet - own1, opp_fleet - opp1)
}

/// Brute-force equilibrium on the grid: scans every pair of grid points and
/// returns the one minimising the largest unilateral grid improvement.
pub fn grid_oracle_ne(spec: &GameSpec, step: f64) -> Result<GridOracleResult> {
    if spec.num_regions() != 2 {
        return Err(Error::Unsupported(format!("grid oracle needs 2 regions, got {}", spec.num_regions())));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Validation(format!("grid step must be positive, got {step}")));
    }
    let regions = [spec.regions()[0], spec.regions()[1]];
    let (fa, fb) = (spec.fleet_a(), spec.fleet_b());
    let ga = grid_points(fa, step)?;
    let gb = grid_points(fb, step)?;

    let ua = |ka: usize, kb: usize| split_payoff(&regions, fa, ga[ka], fb, gb[kb]);
    let ub = |ka: usize, kb: usize| split_payoff(&regions, fb, gb[kb], fa, ga[ka]);

    let best_a: Vec<f64> = (0..gb.len())
        .into_par_iter()
        .map(|kb| (0..ga.len()).map(|ka| ua(ka, kb)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let best_b: Vec<f64> = (0..ga.len())
        .into_par_iter()
        .map(|ka| (0..gb.len()).map(|kb| ub(ka, kb)).fold(f64::NEG_INFINITY, f64::max))
        .collect();

    let (eps_ne, ka, kb) = (0..ga.len())
        .into_par_iter()
        .map(|ka| {
            let mut best = (f64::INFINITY, ka, 0);
            for (kb, &best_a_kb) in best_a.iter().enumerate() {
                let gap = (best_a_kb - ua(ka, kb)).max(best_b[ka] - ub(ka, kb));
                if gap < best.0 {
                    best = (gap, ka, kb);
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX),
            |x, y| if y.0 < x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) { y } else { x },
        );

    Ok(GridOracleResult {
        strategy: JointStrategy::from_vecs(vec![ga[ka], fa - ga[ka]], vec![gb[kb], fb - gb[kb]]),
        step,
        eps_ne: eps_ne.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_fleet_endpoint() {
        assert_eq!(grid_points(1.0, 0.4).unwrap(), vec![0.0, 0.4, 0.8, 1.0]);
        assert_eq!(grid_points(1.0, 0.5).unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn too_fine_grid_is_refused() {
        let spec = GameSpec::new(
            vec![RegionParams::new(1.0, 0.0, 1.0).unwrap(), RegionParams::new(1.0, 0.0, 1.0).unwrap()],
            1.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(grid_oracle_ne(&spec, 1e-6), Err(Error::Resource(_))));
    }

    #[test]
    fn symmetric_game_lands_on_even_split() {
        let r = RegionParams::new(100.0, 1.0, 5.0).unwrap();
        let spec = GameSpec::new(vec![r, r], 10.0, 10.0).unwrap();
        let g = grid_oracle_ne(&spec, 0.5).unwrap();
        assert_eq!(g.strategy.a(), &[5.0, 5.0]);
        assert_eq!(g.strategy.b(), &[5.0, 5.0]);
        assert!(g.eps_ne <= 1e-12);
    }

    #[test]
    fn three_regions_unsupported() {
        let r = RegionParams::new(1.0, 0.0, 1.0).unwrap();
        let spec = GameSpec::new(vec![r, r, r], 1.0, 1.0).unwrap();
        assert!(matches!(grid_oracle_ne(&spec, 0.1), Err(Error::Unsupported(_))));
    }
}
