//! Interior equilibrium for any number of regions.
//!
//! Stationarity of both best-response problems reduces to a single scalar
//! equation in `t = lambda_a + lambda_b`:
//!
//! ```text
//! f(t) = sum_j [bm_j + sqrt(bm_j^2 + 4 bm_j eps_j (alpha_j - t))] / [2 (alpha_j - t)]
//!        - X_a - X_b - sum_j eps_j
//! ```
//!
//! `f` is strictly increasing on `(-inf, min_j alpha_j)`, tends to
//! `-(X_a + X_b + sum eps)` at `-inf` and to `+inf` at the first pole, so the
//! root is unique on that half-line. Everything else follows in closed form.

use crate::error::{Error, Result};
use crate::game::{DualCertificate, GameSpec, JointStrategy, Player};

/// Components at or below `INTERIOR_REL_TOL * fleet` are not treated as interior.
pub const INTERIOR_REL_TOL: f64 = 1e-9;

/// Root tolerance, relative to `X_a + X_b + sum eps`.
pub const ROOT_REL_TOL: f64 = 1e-10;

const MAX_DOUBLINGS: usize = 200;
const NEWTON_SWITCH_REL_WIDTH: f64 = 1e-6;
const MIN_REL_WIDTH: f64 = 1e-12;
const DISCRIMINANT_CLAMP: f64 = 1e-12;

fn check_alpha(spec: &GameSpec, alpha: &[f64]) -> Result<()> {
    if alpha.len() != spec.num_regions() {
        return Err(Error::Validation(format!(
            "alpha has {} entries, game has {} regions",
            alpha.len(),
            spec.num_regions()
        )));
    }
    Ok(())
}

/// Total mass `x_a + x_b + eps` a region absorbs when `alpha - t = gap`.
fn region_mass(beta_m: f64, epsilon: f64, gap: f64) -> Result<f64> {
    if gap == 0.0 {
        return Err(Error::Domain("t sits on a pole alpha_j".into()));
    }
    let mut disc = beta_m * beta_m + 4.0 * beta_m * epsilon * gap;
    if disc < 0.0 {
        if disc >= -DISCRIMINANT_CLAMP * beta_m * beta_m {
            disc = 0.0;
        } else {
            return Err(Error::Domain(format!("negative discriminant {disc}")));
        }
    }
    Ok((beta_m + disc.sqrt()) / (2.0 * gap))
}

/// The scalar equation whose root fixes `lambda_a + lambda_b`.
pub fn f_of_t(spec: &GameSpec, alpha: &[f64], t: f64) -> Result<f64> {
    check_alpha(spec, alpha)?;
    let mut total = 0.0;
    for (r, &a) in spec.regions().iter().zip(alpha) {
        total += region_mass(r.beta_m(), r.epsilon(), a - t)?;
    }
    Ok(total - spec.fleet_a() - spec.fleet_b() - spec.epsilon_sum())
}

/// Derivative of [`f_of_t`].
pub fn f_prime(spec: &GameSpec, alpha: &[f64], t: f64) -> Result<f64> {
    check_alpha(spec, alpha)?;
    let mut total = 0.0;
    for (r, &a) in spec.regions().iter().zip(alpha) {
        let gap = a - t;
        if gap == 0.0 {
            return Err(Error::Domain("t sits on a pole alpha_j".into()));
        }
        let ratio = r.epsilon() / r.beta_m();
        let root_arg = 1.0 + 4.0 * ratio * gap;
        if root_arg <= 0.0 {
            return Err(Error::Domain(format!("t = {t} is outside the open domain")));
        }
        total += r.beta_m() / (2.0 * gap * gap) * (1.0 + (1.0 + 2.0 * ratio * gap) / root_arg.sqrt());
    }
    Ok(total)
}

/// Root of [`f_of_t`] below the first pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TRoot {
    pub t: f64,
    pub f_residual: f64,
    pub iterations: usize,
}

/// Finds the unique root of `f_of_t` on `(-inf, min_j alpha_j)`.
pub fn solve_t_lambda(spec: &GameSpec, alpha: &[f64]) -> Result<TRoot> {
    check_alpha(spec, alpha)?;
    let f = |t: f64| f_of_t(spec, alpha, t);
    let mass = spec.fleet_a() + spec.fleet_b() + spec.epsilon_sum();
    let tol = ROOT_REL_TOL * mass;
    let alpha_min = alpha.iter().copied().fold(f64::INFINITY, f64::min);

    // Upper end: just below the first pole, where f blows up to +inf.
    let mut offset = 1e-9 * alpha_min.abs().max(1.0);
    let (mut hi, mut f_hi) = loop {
        let t = alpha_min - offset;
        if t >= alpha_min {
            return Err(Error::Numerical("cannot bracket the root below the first pole".into()));
        }
        let v = f(t)?;
        if v > 0.0 {
            break (t, v);
        }
        offset *= 0.1;
    };

    let mut step = 1.0;
    let mut found = None;
    for _ in 0..MAX_DOUBLINGS {
        let t = alpha_min - step;
        let v = f(t)?;
        if v < 0.0 {
            found = Some((t, v));
            break;
        }
        hi = t;
        f_hi = v;
        step *= 2.0;
    }
    let (mut lo, mut f_lo) =
        found.ok_or_else(|| Error::Numerical(format!("no sign change after {MAX_DOUBLINGS} bracket doublings")))?;

    let mut iterations = 0;
    let scale = |lo: f64, hi: f64| lo.abs().max(hi.abs()).max(1.0);

    // Bisection until the bracket is narrow enough for a safe Newton polish.
    while hi - lo > NEWTON_SWITCH_REL_WIDTH * scale(lo, hi) {
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        iterations += 1;
        if v == 0.0 {
            return Ok(TRoot { t: mid, f_residual: 0.0, iterations });
        }
        if v < 0.0 {
            lo = mid;
            f_lo = v;
        } else {
            hi = mid;
            f_hi = v;
        }
    }

    let (mut t, mut v) = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    while v.abs() > tol {
        if hi - lo <= MIN_REL_WIDTH * scale(lo, hi) {
            break;
        }
        let slope = f_prime(spec, alpha, t)?;
        let mut next = t - v / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        t = next;
        v = f(t)?;
        iterations += 1;
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
    }
    if v.abs() > tol {
        return Err(Error::Numerical(format!("root residual {v} exceeds tolerance {tol}")));
    }
    Ok(TRoot { t, f_residual: v, iterations })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSolveTrace {
    pub t_lambda_star: f64,
    /// Per-region `x_a + x_b + eps` at the root.
    pub kappa: Vec<f64>,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub f_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSolution {
    pub strategy: JointStrategy,
    pub duals: DualCertificate,
    pub trace: InteriorSolveTrace,
}

/// A component of the closed-form candidate that failed the interior test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub player: Player,
    pub region: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NotInterior {
    pub violations: Vec<Violation>,
    /// The closed-form point, which may have negative entries.
    pub candidate: JointStrategy,
    pub trace: InteriorSolveTrace,
}

impl NotInterior {
    /// True when every offending component is non-negative but tiny.
    pub fn boundary_suspect(&self) -> bool {
        self.violations.iter().all(|v| v.value >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InteriorOutcome {
    Interior(InteriorSolution),
    NotInterior(NotInterior),
}

impl InteriorOutcome {
    pub fn interior(&self) -> Option<&InteriorSolution> {
        match self {
            InteriorOutcome::Interior(s) => Some(s),
            InteriorOutcome::NotInterior(_) => None,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.interior().is_some()
    }
}

fn multipliers(spec: &GameSpec, kappa: &[f64]) -> (f64, f64) {
    let (mut weight, mut priced) = (0.0, 0.0);
    for (r, &k) in spec.regions().iter().zip(kappa) {
        let w = k * k / r.beta_m();
        weight += w;
        priced += r.beta_c() * w;
    }
    let eps_sum = spec.epsilon_sum();
    let lambda_a = (-eps_sum - spec.fleet_b() + priced) / weight;
    let lambda_b = (-eps_sum - spec.fleet_a() + priced) / weight;
    (lambda_a, lambda_b)
}

/// Multipliers of an interior solve, with all non-negativity duals at zero.
pub fn reconstruct_duals(spec: &GameSpec, trace: &InteriorSolveTrace) -> DualCertificate {
    let (lambda_a, lambda_b) = multipliers(spec, &trace.kappa);
    let m = spec.num_regions();
    DualCertificate { lambda_a, lambda_b, nu_a: vec![0.0; m], nu_b: vec![0.0; m] }
}

/// Solves for the interior equilibrium, or reports which components of the
/// closed-form candidate leave the interior.
pub fn interior_equilibrium(spec: &GameSpec) -> Result<InteriorOutcome> {
    let alpha: Vec<f64> = spec.regions().iter().map(|r| 2.0 * r.beta_c()).collect();
    let root = solve_t_lambda(spec, &alpha)?;
    let kappa = spec
        .regions()
        .iter()
        .zip(&alpha)
        .map(|(r, &a)| region_mass(r.beta_m(), r.epsilon(), a - root.t))
        .collect::<Result<Vec<_>>>()?;
    let (lambda_a, lambda_b) = multipliers(spec, &kappa);

    let place = |opp_lambda: f64| -> Vec<f64> {
        spec.regions()
            .iter()
            .zip(&kappa)
            .map(|(r, &k)| k * k * (r.beta_c() - opp_lambda) / r.beta_m() - r.epsilon())
            .collect()
    };
    let candidate = JointStrategy::from_vecs(place(lambda_b), place(lambda_a));
    let trace = InteriorSolveTrace {
        t_lambda_star: root.t,
        kappa,
        lambda_a,
        lambda_b,
        f_residual: root.f_residual,
        iterations: root.iterations,
    };

    let mut violations = Vec::new();
    for player in Player::BOTH {
        let threshold = INTERIOR_REL_TOL * spec.fleet(player);
        for (region, &value) in candidate.of(player).values.iter().enumerate() {
            if value <= threshold {
                violations.push(Violation { player, region, value });
            }
        }
    }
    if !violations.is_empty() {
        return Ok(InteriorOutcome::NotInterior(NotInterior { violations, candidate, trace }));
    }
    let duals = reconstruct_duals(spec, &trace);
    Ok(InteriorOutcome::Interior(InteriorSolution { strategy: candidate, duals, trace }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RegionParams;
    use approx::assert_relative_eq;

    fn spec(regions: &[(f64, f64, f64)], xa: f64, xb: f64) -> GameSpec {
        let regions = regions.iter().map(|&(m, c, e)| RegionParams::new(m, c, e).unwrap()).collect();
        GameSpec::new(regions, xa, xb).unwrap()
    }

    fn table_spec(alpha: f64) -> GameSpec {
        spec(&[(35000.0, 10.0, 100.0), (120000.0, 10.0 * alpha, 300.0)], 1000.0, 2000.0)
    }

    #[test]
    fn f_hand_values() {
        // f uses eps_sum of the spec; one region with eps = 1 gives sum = 1.
        let s = spec(&[(4.0, 0.0, 1.0)], 1.0, 1.0);
        let v = f_of_t(&s, &[3.0], 2.0).unwrap();
        assert_relative_eq!(v, (4.0 + 32f64.sqrt()) / 2.0 - 3.0, max_relative = 1e-14);
        assert!((v - 1.8284).abs() < 1e-4);

        // Discriminant vanishes at t = bm / (4 eps) + alpha, where the mass term is -2 eps.
        let v = f_of_t(&s, &[3.0], 4.0).unwrap();
        assert_relative_eq!(v, -2.0 - 1.0 - 1.0 - 1.0, max_relative = 1e-14);

        let d = f_prime(&s, &[3.0], 2.0).unwrap();
        assert_relative_eq!(d, 2.0 * (1.0 + 1.5 / 2f64.sqrt()), max_relative = 1e-14);
        assert!((d - 4.1213).abs() < 1e-4);
    }

    #[test]
    fn f_domain_errors() {
        let s = spec(&[(4.0, 0.0, 1.0)], 1.0, 1.0);
        assert!(matches!(f_of_t(&s, &[3.0], 3.0), Err(Error::Domain(_))));
        assert!(matches!(f_of_t(&s, &[3.0], 4.5), Err(Error::Domain(_))));
        assert!(matches!(f_prime(&s, &[3.0], 3.0), Err(Error::Domain(_))));
        assert!(matches!(f_of_t(&s, &[3.0, 1.0], 0.0), Err(Error::Validation(_))));
    }

    #[test]
    fn root_matches_reference_table_point() {
        // Delta_j = bm_j (k_j + eps_j) / k_j^2 with k = (775.6, 2624.4) gives t = 20 - Delta ~ -30.95.
        let s = table_spec(1.0);
        let alpha = [20.0, 20.0];
        let root = solve_t_lambda(&s, &alpha).unwrap();
        let from_k1 = 20.0 - 35000.0 * (775.6 + 100.0) / (775.6f64 * 775.6);
        let from_k2 = 20.0 - 120000.0 * (2624.4 + 300.0) / (2624.4f64 * 2624.4);
        assert!((root.t - from_k1).abs() < 0.02, "t = {}", root.t);
        assert!((root.t - from_k2).abs() < 0.02);
        assert!((root.t + 30.95).abs() < 0.01);
        assert!(f_of_t(&s, &alpha, root.t).unwrap().abs() <= 1e-6);
        assert!(root.f_residual.abs() <= ROOT_REL_TOL * (3000.0 + 400.0));
    }

    #[test]
    fn root_matches_quadratic_for_identical_regions() {
        // Two copies of one region: each absorbs K = (X_a + X_b)/2 + eps, and
        // Delta K^2 - bm K - bm eps = 0 gives t = alpha - bm (K + eps) / K^2.
        for &(bm, eps, alpha, xa, xb) in
            &[(50.0, 2.0, 7.0, 3.0, 3.0), (1.2e5, 300.0, 20.0, 1500.0, 1500.0), (10.0, 0.5, 0.0, 40.0, 40.0)]
        {
            let s = spec(&[(bm, alpha / 2.0, eps), (bm, alpha / 2.0, eps)], xa, xb);
            let k = (xa + xb) / 2.0 + eps;
            let expected = alpha - bm * (k + eps) / (k * k);
            let root = solve_t_lambda(&s, &[alpha, alpha]).unwrap();
            assert_relative_eq!(root.t, expected, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn reference_table_interior_rows() {
        let out = interior_equilibrium(&table_spec(1.0)).unwrap();
        let sol = out.interior().expect("interior at alpha = 1");
        let expect = [222.6, 777.4, 453.0, 1547.0];
        let got = [sol.strategy.a()[0], sol.strategy.a()[1], sol.strategy.b()[0], sol.strategy.b()[1]];
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 0.1, "{got:?}");
        }

        let out = interior_equilibrium(&table_spec(25.0)).unwrap();
        let sol = out.interior().expect("interior at alpha = 25");
        let expect = [943.6, 56.4, 1937.9, 62.1];
        let got = [sol.strategy.a()[0], sol.strategy.a()[1], sol.strategy.b()[0], sol.strategy.b()[1]];
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 0.1, "{got:?}");
        }
    }

    #[test]
    fn corner_regime_is_not_interior() {
        let out = interior_equilibrium(&table_spec(41.0)).unwrap();
        match out {
            InteriorOutcome::NotInterior(n) => {
                assert!(n.violations.iter().any(|v| v.region == 1));
                assert!(!n.boundary_suspect());
            }
            InteriorOutcome::Interior(_) => panic!("alpha = 41 must leave the interior"),
        }
    }

    #[test]
    fn symmetric_game_splits_uniformly() {
        let s = spec(&[(500.0, 3.0, 10.0); 3], 90.0, 90.0);
        let sol = interior_equilibrium(&s).unwrap();
        let sol = sol.interior().unwrap();
        for &v in sol.strategy.a().iter().chain(sol.strategy.b()) {
            assert_relative_eq!(v, 30.0, max_relative = 1e-10);
        }
        assert_relative_eq!(sol.duals.lambda_a, sol.duals.lambda_b, max_relative = 1e-12);
    }

    #[test]
    fn reconstruction_identities() {
        let s = table_spec(1.0);
        let out = interior_equilibrium(&s).unwrap();
        let sol = out.interior().unwrap();
        let tr = &sol.trace;
        assert_relative_eq!(sol.duals.lambda_a + sol.duals.lambda_b, tr.t_lambda_star, max_relative = 1e-9);
        assert!((sol.duals.lambda_a + sol.duals.lambda_b + 30.95).abs() < 0.01);
        assert!(sol.duals.nu_a.iter().chain(&sol.duals.nu_b).all(|&v| v == 0.0));
        for j in 0..2 {
            let total = sol.strategy.a()[j] + sol.strategy.b()[j] + s.regions()[j].epsilon();
            assert_relative_eq!(total, tr.kappa[j], max_relative = 1e-8);
            assert!(2.0 * s.regions()[j].beta_c() - tr.t_lambda_star > 0.0);
        }
        assert!((sol.strategy.alloc_a.total() - 1000.0).abs() <= 1e-9);
        assert!((sol.strategy.alloc_b.total() - 2000.0).abs() <= 1e-9);
        assert!(sol.strategy.is_feasible(&s).unwrap());
    }
}
