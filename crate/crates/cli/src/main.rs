use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fleetgame::experiments::{
    self, alpha_sweep, detect_alpha_transition, detect_optimal_fleet, fleet_study_spec, linspace, solve_general,
    table_rows_at, RecordStatus, SweepKind, SweepRecord, Transition,
};
use fleetgame::io::{csv_header, csv_row, emit_csv, fmt_real, parse_config};
use fleetgame::verification::{
    concavity_certificate, grid_oracle_ne, iterated_best_response, kkt_residual, DEFAULT_DAMPING,
};
use fleetgame::{Error, GameSpec, Player, Result};

#[derive(Parser)]
#[command(name = "fleetgame", version, about = "Equilibria of the two-company fleet allocation game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Four,
    Two,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the game in a config file; prints a CSV row, the duals and the residual.
    Solve { config: PathBuf },
    /// Sweep the charging-price scale of a reference city and print CSV.
    Sweep {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 20.0)]
        to: f64,
        #[arg(long, default_value_t = experiments::SWEEP_POINTS)]
        points: usize,
    },
    /// Price scale where both companies concentrate in the cheap region.
    AlphaCrit {
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 50.0)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Report the first price scale with any empty region instead.
        #[arg(long)]
        first_boundary: bool,
    },
    /// Opponent fleet size that maximises its own equilibrium profit.
    FleetOpt {
        #[arg(long, default_value_t = 200.0)]
        from: f64,
        #[arg(long, default_value_t = 4000.0)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// The two-region reference table.
    Table1 {
        /// Use the sweep-grid price scales nearest to the table labels.
        #[arg(long)]
        grid: bool,
    },
    /// Solve a config and check the answer independently.
    Verify { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<GameSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn solve(path: &PathBuf) -> Result<()> {
    let spec = load(path)?;
    let (result, status) = solve_general(&spec)?;
    let record = SweepRecord::from_result(f64::NAN, &spec, &result, status);
    print!("{}", emit_csv(&[record])?);
    println!();
    println!("lambda_a = {}", fmt_real(result.duals.lambda_a));
    println!("lambda_b = {}", fmt_real(result.duals.lambda_b));
    for p in Player::BOTH {
        let nu: Vec<String> = result.duals.nu(p).iter().map(|&v| fmt_real(v)).collect();
        println!("nu_{p} = {}", nu.join(","));
    }
    println!("ne_residual = {}", fmt_real(result.ne_residual));
    if let RecordStatus::Fallback { converged } = status {
        println!("solver = best-response dynamics (converged: {converged})");
    }
    Ok(())
}

fn sweep(kind: Kind, from: f64, to: f64, points: usize) -> Result<()> {
    let kind = match kind {
        Kind::Four => SweepKind::FourRegion,
        Kind::Two => SweepKind::TwoRegion,
    };
    let result = alpha_sweep(kind, &linspace(from, to, points));
    print!("{}", emit_csv(&result.records)?);
    for f in &result.failures {
        eprintln!("alpha {}: {}", f.parameter, f.error);
    }
    match result.failures.into_iter().next() {
        Some(f) => Err(f.error),
        None => Ok(()),
    }
}

fn table1(grid: bool) -> Result<()> {
    let alphas = if grid { experiments::TABLE_GRID_ALPHAS } else { experiments::TABLE_ALPHAS };
    println!("alpha,x_a_1,x_a_2,u_a,x_b_1,x_b_2,u_b,location");
    for row in table_rows_at(&alphas)? {
        let v = row.values().map(|x| format!("{x:.1}"));
        println!("{},{},{}", row.alpha, v.join(","), row.location);
    }
    Ok(())
}

fn verdict(name: &str, ok: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn verify(path: &PathBuf) -> Result<bool> {
    let spec = load(path)?;
    let (result, _) = solve_general(&spec)?;
    let joint = &result.strategy;
    println!("{}", csv_header(spec.num_regions()));
    println!("{}", csv_row(&SweepRecord::from_result(f64::NAN, &spec, &result, RecordStatus::Solved)));
    let mut ok = true;

    let bound = result.residual_bound(&spec);
    ok &= verdict("ne_residual", result.ne_residual <= bound, format!("{:e} <= {bound:e}", result.ne_residual));

    let kkt = kkt_residual(&spec, joint, &result.duals);
    let kkt_bound =
        1e-6 * (1.0 + result.duals.lambda_a.abs() + result.duals.lambda_b.abs() + spec.fleet_a() + spec.fleet_b());
    ok &= verdict("kkt_residual", kkt <= kkt_bound, format!("{kkt:e} <= {kkt_bound:e}"));

    let cert = concavity_certificate(&spec, joint);
    ok &= verdict(
        "concavity",
        cert.negative_definite && cert.schur_consistent(),
        format!("max eigenvalue {:e}, schur gap {:e}", cert.max_eigenvalue_gamma, cert.schur_gap),
    );

    if spec.num_regions() == 2 {
        let step = spec.fleet_a().max(spec.fleet_b()) / 2000.0;
        let grid = grid_oracle_ne(&spec, step)?;
        let gap = joint.max_abs_diff(&grid.strategy);
        ok &= verdict("grid_oracle", gap <= 2.0 * step, format!("max gap {gap:e} <= {:e}", 2.0 * step));
    } else {
        let dyn_out = iterated_best_response(&spec, DEFAULT_DAMPING, 20_000, 1e-10)?;
        let gap = joint.max_abs_diff(&dyn_out.result.strategy);
        ok &= verdict(
            "best_response_dynamics",
            dyn_out.converged && gap <= 1e-4,
            format!("converged {} in {} sweeps, max gap {gap:e}", dyn_out.converged, dyn_out.iterations),
        );
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve { config } => solve(&config).map(|_| true),
        Command::Sweep { kind, from, to, points } => sweep(kind, from, to, points).map(|_| true),
        Command::AlphaCrit { from, to, step, first_boundary } => {
            let kind = if first_boundary { Transition::FirstBoundary } else { Transition::FullConcentration };
            match detect_alpha_transition(from, to, step, kind)? {
                Some(a) => println!("{a:.4}"),
                None => println!("not found in [{from}, {to}]"),
            }
            Ok(true)
        }
        Command::FleetOpt { from, to, step } => {
            let xb = detect_optimal_fleet(from, to, step)?;
            let spec = fleet_study_spec(xb)?;
            let (res, _) = solve_general(&spec)?;
            println!("{xb:.4}");
            println!("u_b = {:.4}", res.utilities(&spec).1);
            Ok(true)
        }
        Command::Table1 { grid } => table1(grid).map(|_| true),
        Command::Verify { config } => verify(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
