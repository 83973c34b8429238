//! Acceptance criteria. Each test prints one PASS/FAIL line to stderr,
//! bypassing output capture, then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use fleetgame::boundary::{analyze_two_region, solve_two_region};
use fleetgame::experiments::{
    detect_alpha_crit, detect_optimal_fleet, four_region_spec, linspace, two_region_spec, REFERENCE_TABLE, TABLE_ALPHAS,
};
use fleetgame::game::{market_share, profit_loss, utility, utility_gradient};
use fleetgame::interior::{f_of_t, f_prime, interior_equilibrium};
use fleetgame::verification::{
    concavity_certificate, grid_oracle_ne, iterated_best_response, ne_residual, DEFAULT_DAMPING, SCHUR_REL_TOL,
};
use fleetgame::{GameSpec, JointStrategy, Player, RegionParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_ALLOC_TOL: f64 = 0.2;
const TABLE_PROFIT_TOL: f64 = 1.0;
const TABLE_TIME: Duration = Duration::from_secs(1);
const INTERIOR_SWEEP_POINTS: usize = 100;
const INTERIOR_SWEEP_TIME: Duration = Duration::from_secs(5);
const ALPHA_CRIT_WINDOW: (f64, f64) = (40.2, 41.2);
const ALPHA_CRIT_TIME: Duration = Duration::from_secs(10);
const FLEET_OPT_WINDOW: (f64, f64) = (1733.0, 1753.0);
const FLEET_OPT_TIME: Duration = Duration::from_secs(30);
const RANDOM_SPECS: usize = 100;
const GRID_DIVISIONS: f64 = 2000.0;
const GRID_STEPS_TOL: f64 = 2.0;
const ORACLE_TIME: Duration = Duration::from_secs(120);
const CONCAVITY_SAMPLES: usize = 1000;
const GRADIENT_SAMPLES: usize = 50;
const GRADIENT_REL_TOL: f64 = 1e-6;
const CONSERVATION_SAMPLES: usize = 1000;
const CONSERVATION_REL_TOL: f64 = 1e-12;
const DYNAMICS_TOL: f64 = 1e-4;

fn report(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr().lock(),
        "\n{verdict} criterion {id:>2} {name}: {detail} [{:.3}s]",
        elapsed.as_secs_f64()
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn random_two_region(rng: &mut ChaCha8Rng) -> GameSpec {
    let mut region =
        || RegionParams::new(rng.gen_range(1e3..2e5), rng.gen_range(0.0..500.0), rng.gen_range(10.0..500.0)).unwrap();
    let regions = vec![region(), region()];
    GameSpec::new(regions, rng.gen_range(100.0..5000.0), rng.gen_range(100.0..5000.0)).unwrap()
}

fn random_specs() -> Vec<GameSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    (0..RANDOM_SPECS).map(|_| random_two_region(&mut rng)).collect()
}

fn random_simplex(rng: &mut ChaCha8Rng, m: usize, total: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0f64)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s * total).collect()
}

fn random_game(rng: &mut ChaCha8Rng) -> (GameSpec, JointStrategy) {
    let m = rng.gen_range(1..=6);
    let regions = (0..m)
        .map(|_| {
            RegionParams::new(rng.gen_range(1e2..2e5), rng.gen_range(0.0..500.0), rng.gen_range(1.0..500.0)).unwrap()
        })
        .collect();
    let spec = GameSpec::new(regions, rng.gen_range(10.0..5000.0), rng.gen_range(10.0..5000.0)).unwrap();
    let joint =
        JointStrategy::from_vecs(random_simplex(rng, m, spec.fleet_a()), random_simplex(rng, m, spec.fleet_b()));
    (spec, joint)
}

#[test]
fn criterion_01_table_reproduction() {
    let start = Instant::now();
    let mut worst_alloc: f64 = 0.0;
    let mut worst_profit: f64 = 0.0;
    let mut misses = Vec::new();
    for (alpha, reference) in TABLE_ALPHAS.iter().zip(REFERENCE_TABLE) {
        let spec = two_region_spec(*alpha).unwrap();
        let res = solve_two_region(&spec).unwrap();
        let (ua, ub) = res.utilities(&spec);
        let (a, b) = (res.strategy.a(), res.strategy.b());
        let got = [a[0], a[1], ua, b[0], b[1], ub];
        for (k, (g, w)) in got.iter().zip(&reference[1..]).enumerate() {
            let is_profit = k == 2 || k == 5;
            let err = (g - w).abs();
            if is_profit {
                worst_profit = worst_profit.max(err);
            } else {
                worst_alloc = worst_alloc.max(err);
            }
            if err > if is_profit { TABLE_PROFIT_TOL } else { TABLE_ALLOC_TOL } {
                misses.push(format!("alpha={alpha} col{k}: {g:.2} vs {w}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = misses.is_empty() && elapsed < TABLE_TIME;
    let detail = format!(
        "max alloc err {worst_alloc:.3} (tol {TABLE_ALLOC_TOL}), max profit err {worst_profit:.3} (tol {TABLE_PROFIT_TOL}); misses: [{}]",
        misses.join("; ")
    );
    report(1, "reference table", pass, &detail, elapsed);
}

#[test]
fn criterion_02_four_region_interior_everywhere() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for alpha in linspace(1.0, 20.0, INTERIOR_SWEEP_POINTS) {
        let spec = four_region_spec(alpha).unwrap();
        let Some(sol) = interior_equilibrium(&spec).unwrap().interior().cloned() else {
            failures.push(format!("alpha={alpha:.3} not interior"));
            continue;
        };
        let joint = &sol.strategy;
        if joint.a().iter().chain(joint.b()).any(|&v| v <= 0.0) {
            failures.push(format!("alpha={alpha:.3} has a zero component"));
        }
        let res = ne_residual(&spec, joint).unwrap();
        let ua = utility(&spec, Player::A, joint).unwrap();
        let ub = utility(&spec, Player::B, joint).unwrap();
        let bound = 1e-6 * (ua.abs() + ub.abs() + 1.0);
        worst_ratio = worst_ratio.max(res / bound);
        if res > bound {
            failures.push(format!("alpha={alpha:.3} residual {res:e} > {bound:e}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < INTERIOR_SWEEP_TIME;
    let detail = format!(
        "{} points, worst residual/bound {worst_ratio:.2e}; failures: [{}]",
        INTERIOR_SWEEP_POINTS,
        failures.join("; ")
    );
    report(2, "four-region interior sweep", pass, &detail, elapsed);
}

#[test]
fn criterion_03_alpha_crit() {
    let start = Instant::now();
    let found = detect_alpha_crit(1.0, 50.0, 0.1).unwrap();
    let elapsed = start.elapsed();
    let (lo, hi) = ALPHA_CRIT_WINDOW;
    let pass = found.is_some_and(|a| (lo..=hi).contains(&a)) && elapsed < ALPHA_CRIT_TIME;
    report(3, "alpha_crit", pass, &format!("{found:?} in [{lo}, {hi}]"), elapsed);
}

#[test]
fn criterion_04_optimal_opponent_fleet() {
    let start = Instant::now();
    let xb = detect_optimal_fleet(200.0, 4000.0, 1.0).unwrap();
    let elapsed = start.elapsed();
    let (lo, hi) = FLEET_OPT_WINDOW;
    let pass = (lo..=hi).contains(&xb) && elapsed < FLEET_OPT_TIME;
    report(4, "optimal opponent fleet", pass, &format!("{xb:.3} in [{lo}, {hi}]"), elapsed);
}

#[test]
fn criterion_05_grid_oracle_agreement() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst_steps: f64 = 0.0;
    for (k, spec) in random_specs().iter().enumerate() {
        let step = spec.fleet_a().max(spec.fleet_b()) / GRID_DIVISIONS;
        let solved = solve_two_region(spec).unwrap();
        let grid = grid_oracle_ne(spec, step).unwrap();
        let steps = solved.strategy.max_abs_diff(&grid.strategy) / step;
        worst_steps = worst_steps.max(steps);
        if steps > GRID_STEPS_TOL {
            failures.push(format!("spec {k}: {steps:.2} steps"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < ORACLE_TIME;
    let detail = format!("{RANDOM_SPECS} specs, worst gap {worst_steps:.3} steps; failures: [{}]", failures.join("; "));
    report(5, "grid oracle agreement", pass, &detail, elapsed);
}

#[test]
fn criterion_06_exactly_one_certificate() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut interior, mut boundary) = (0, 0);
    for (k, spec) in random_specs().iter().enumerate() {
        let analysis = analyze_two_region(spec).unwrap();
        let is_interior = analysis.interior.is_interior();
        let certified = analysis.distinct_certified(spec).len();
        match (is_interior, certified) {
            (true, 0) => interior += 1,
            (false, 1) => boundary += 1,
            _ => failures.push(format!("spec {k}: interior={is_interior}, certified={certified}")),
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{interior} interior, {boundary} single-family boundary; failures: [{}]", failures.join("; "));
    report(6, "uniqueness of certification", failures.is_empty(), &detail, elapsed);
}

#[test]
fn criterion_07_concavity_certificate() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut failures = 0;
    let (mut worst_eig, mut worst_gap) = (f64::NEG_INFINITY, 0.0f64);
    for _ in 0..CONCAVITY_SAMPLES {
        let (spec, joint) = random_game(&mut rng);
        let cert = concavity_certificate(&spec, &joint);
        worst_eig = worst_eig.max(cert.max_eigenvalue_gamma);
        worst_gap = worst_gap.max(cert.schur_gap);
        if !cert.negative_definite || cert.schur_gap > SCHUR_REL_TOL {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "{CONCAVITY_SAMPLES} samples, {failures} failures, largest eigenvalue {worst_eig:e}, largest Schur gap {worst_gap:e}"
    );
    report(7, "concavity certificate", failures == 0, &detail, elapsed);
}

#[test]
fn criterion_08_gradients_match_finite_differences() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut worst_grad: f64 = 0.0;
    for _ in 0..GRADIENT_SAMPLES {
        let (spec, joint) = random_game(&mut rng);
        for player in Player::BOTH {
            let grad = utility_gradient(&spec, player, &joint);
            let opp = joint.of(player.other()).values.clone();
            for (j, r) in spec.regions().iter().enumerate() {
                let x = joint.of(player).values[j];
                let h = 1e-4 * x.max(1.0);
                let (lo, hi) = ((x - h).max(0.0), x + h);
                let fd = (r.payoff(hi, opp[j]) - r.payoff(lo, opp[j])) / (hi - lo);
                let t = x + opp[j] + r.epsilon();
                let scale = grad[j].abs().max(r.beta_c() + r.beta_m() * (opp[j] + r.epsilon()) / (t * t));
                worst_grad = worst_grad.max((fd - grad[j]).abs() / scale);
            }
        }
    }

    let mut worst_fprime: f64 = 0.0;
    for _ in 0..GRADIENT_SAMPLES {
        let (spec, _) = random_game(&mut rng);
        let alpha: Vec<f64> = spec.regions().iter().map(|r| 2.0 * r.beta_c()).collect();
        let min_alpha = alpha.iter().cloned().fold(f64::INFINITY, f64::min);
        let t = min_alpha - rng.gen_range(0.5..1000.0);
        let h = 1e-5 * (min_alpha - t);
        let fd = (f_of_t(&spec, &alpha, t + h).unwrap() - f_of_t(&spec, &alpha, t - h).unwrap()) / (2.0 * h);
        let exact = f_prime(&spec, &alpha, t).unwrap();
        worst_fprime = worst_fprime.max((fd - exact).abs() / exact.abs());
    }
    let elapsed = start.elapsed();
    let pass = worst_grad <= GRADIENT_REL_TOL && worst_fprime <= GRADIENT_REL_TOL;
    let detail =
        format!("utility gradient rel err {worst_grad:e}, f' rel err {worst_fprime:e} (tol {GRADIENT_REL_TOL:e})");
    report(8, "gradient checks", pass, &detail, elapsed);
}

#[test]
fn criterion_09_conservation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut worst: f64 = 0.0;
    for _ in 0..CONSERVATION_SAMPLES {
        let r =
            RegionParams::new(rng.gen_range(1e-2..1e6), rng.gen_range(0.0..500.0), rng.gen_range(1e-3..1e3)).unwrap();
        let (xa, xb) = (rng.gen_range(0.0..1e4), rng.gen_range(0.0..1e4));
        let total = market_share(&r, xa, xb) + market_share(&r, xb, xa) + profit_loss(&r, xa, xb);
        worst = worst.max((total - r.beta_m()).abs() / r.beta_m());
    }
    let elapsed = start.elapsed();
    let detail = format!("{CONSERVATION_SAMPLES} points, worst rel err {worst:e} (tol {CONSERVATION_REL_TOL:e})");
    report(9, "conservation", worst <= CONSERVATION_REL_TOL, &detail, elapsed);
}

#[test]
fn criterion_10_dynamics_match_interior_solver() {
    let start = Instant::now();
    let spec = four_region_spec(1.0).unwrap();
    let closed = interior_equilibrium(&spec).unwrap().interior().cloned().expect("interior at alpha = 1");
    let dynamics = iterated_best_response(&spec, DEFAULT_DAMPING, 20_000, 1e-12).unwrap();
    let gap = closed.strategy.max_abs_diff(&dynamics.result.strategy);
    let elapsed = start.elapsed();
    let detail = format!(
        "max component gap {gap:e} (tol {DYNAMICS_TOL:e}), {} sweeps, converged {}",
        dynamics.iterations, dynamics.converged
    );
    report(10, "best-response dynamics agreement", gap <= DYNAMICS_TOL, &detail, elapsed);
}
