//! Command-line front end: parse a scenario config, dispatch the library
//! operations, and emit CSV tables plus a run manifest.
//!
//! Exit codes: 0 success, 2 config error, 3 precondition refusal, 4 solver
//! or runtime failure, 1 anything else (I/O).

use clap::{Args, Parser, Subcommand};
use homog::assembly::Window;
use homog::cell;
use homog::config::{scenario_from_config, ConfigMap};
use homog::effective::{
    assemble_effective_periodic, assemble_effective_truncated, convergence_study, Reference,
};
use homog::error::Error;
use homog::experiment::{
    compare_epsilon_sweep, homogenized_problem, oscillatory_problem, preset_scenario, Preset,
    Scenario,
};
use homog::field::StructureTag;
use homog::noise::NoiseModel;
use homog::report;
use homog::wave::QGrid;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "homog", version, about = "Correctors, effective tensors, and stochastic wave experiments for oscillating media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Scenario config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV tables and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long)]
    threads: Option<usize>,
    /// Config override `section.key=value`; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one corrector problem and export the grid with its flux.
    CellSolve(RunArgs),
    /// Assemble a single effective tensor.
    Effective(RunArgs),
    /// Truncated-tensor convergence study over the radius schedule.
    #[command(name = "converge-R", alias = "converge-r")]
    ConvergeR(RunArgs),
    /// Time-step one stochastic wave trajectory.
    SpdeRun(RunArgs),
    /// Coupled Monte-Carlo epsilon sweep against the homogenized solution.
    HomogCompare(RunArgs),
    /// List the built-in scenario presets.
    PresetList,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::PresetList => cmd_preset_list(),
        Command::CellSolve(args) => with_scenario(args, cmd_cell_solve),
        Command::Effective(args) => with_scenario(args, cmd_effective),
        Command::ConvergeR(args) => with_scenario(args, cmd_converge_r),
        Command::SpdeRun(args) => with_scenario(args, cmd_spde_run),
        Command::HomogCompare(args) => with_scenario(args, cmd_homog_compare),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Argument(_) => 2,
        Error::Precondition(_) => 3,
        Error::SolverDiverged { .. } | Error::BlowUp { .. } | Error::Evaluation(_) => 4,
        Error::Io(_) => 1,
    }
}

struct Job {
    scenario: Scenario,
    cfg: ConfigMap,
    out: PathBuf,
    manifest: Vec<(String, String)>,
}

fn with_scenario(args: &RunArgs, run: fn(&mut Job) -> homog::Result<()>) -> homog::Result<()> {
    if let Some(n) = args.threads {
        homog::exec::configure_threads(n)?;
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ConfigMap::parse(&text)?;
    for ov in &args.overrides {
        cfg.apply_override(ov)?;
    }
    if let Some(seed) = args.seed {
        cfg.apply_override(&format!("scenario.seed={seed}"))?;
    }
    let scenario = scenario_from_config(&cfg)?;
    let mut manifest = vec![
        ("config".into(), args.config.display().to_string()),
        ("seed".into(), scenario.seed.to_string()),
        ("scenario".into(), scenario.name.clone()),
        ("dimension".into(), scenario.dim.to_string()),
        ("grid_n".into(), scenario.grid_n.to_string()),
        ("dt".into(), scenario.dt.to_string()),
        ("T".into(), scenario.t_final.to_string()),
        ("tol".into(), scenario.tol.to_string()),
        ("cell_n".into(), scenario.cell_n.to_string()),
        ("points_per_unit".into(), scenario.points_per_unit.to_string()),
        (
            "window".into(),
            match scenario.window {
                Window::Full => "full".into(),
                Window::Interior => "interior".into(),
            },
        ),
        ("epsilon".into(), join(&scenario.epsilons)),
        ("r_schedule".into(), join(&scenario.r_schedule)),
        ("paths".into(), scenario.paths.to_string()),
    ];
    for ov in &args.overrides {
        manifest.push(("override".into(), ov.clone()));
    }
    let mut job = Job { scenario, cfg, out: args.out.clone(), manifest };
    run(&mut job)?;
    let manifest_text = report::manifest(&job.manifest);
    report::write_file(&job.out.join("manifest.txt"), &manifest_text)?;
    Ok(())
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_preset_list() -> homog::Result<()> {
    for p in Preset::all() {
        let sc = preset_scenario(p)?;
        println!(
            "{:<10} {} (dim {}, alpha {}, {} noise mode{})",
            p.name(),
            p.describe(),
            sc.dim,
            sc.matrix.alpha(),
            sc.diffusion.mode_count(),
            if sc.diffusion.mode_count() == 1 { "" } else { "s" },
        );
    }
    Ok(())
}

fn is_periodic(sc: &Scenario) -> bool {
    matches!(sc.matrix.structure(), StructureTag::Constant | StructureTag::Periodic)
}

fn cmd_cell_solve(job: &mut Job) -> homog::Result<()> {
    let sc = &job.scenario;
    let direction = job.cfg.get_usize("cell", "direction")?.unwrap_or(1);
    if direction == 0 || direction > sc.dim {
        return Err(Error::Config(format!(
            "cell.direction must be 1..={}, got {direction}",
            sc.dim
        )));
    }
    let x_sample = vec![0.5; sc.dim];
    let sol = if is_periodic(sc) {
        cell::solve_periodic_cell(&sc.matrix, &x_sample, direction - 1, sc.cell_n, sc.tol)?
    } else {
        let r = *sc.r_schedule.last().unwrap();
        let n = (2.0 * r * sc.points_per_unit as f64).round() as usize;
        cell::solve_truncated_cell(&sc.matrix, &x_sample, direction - 1, r, n, sc.tol)?
    };
    let fl = cell::flux(&sol, &sc.matrix, &x_sample)?;
    report::write_file(&job.out.join("solution.csv"), &report::cell_solution_csv(&sol, &fl))?;
    job.manifest.push(("direction".into(), direction.to_string()));
    job.manifest.push(("residual".into(), sol.residual.to_string()));
    println!(
        "corrector: {} cells, residual {:.3e}, gradient energy {:.6}",
        sol.values.len(),
        sol.residual,
        sol.gradient_energy
    );
    Ok(())
}

fn print_tensor(label: &str, t: &homog::effective::EffectiveTensor) {
    if t.dim == 1 {
        println!("{label}: [{:.8}] residual {:.3e}", t.entry(0, 0), t.residual);
    } else {
        println!(
            "{label}: [{:.8} {:.8}; {:.8} {:.8}] residual {:.3e}",
            t.entry(0, 0),
            t.entry(0, 1),
            t.entry(1, 0),
            t.entry(1, 1),
            t.residual
        );
    }
}

fn cmd_effective(job: &mut Job) -> homog::Result<()> {
    let sc = &job.scenario;
    let x_sample = vec![0.5; sc.dim];
    let tensor = if is_periodic(sc) {
        assemble_effective_periodic(&sc.matrix, &x_sample, sc.cell_n, sc.tol)?
    } else {
        let r = *sc.r_schedule.last().unwrap();
        let n = (2.0 * r * sc.points_per_unit as f64).round() as usize;
        assemble_effective_truncated(&sc.matrix, &x_sample, r, n, sc.tol, sc.window)?
    };
    report::write_file(&job.out.join("tensor.csv"), &report::tensor_csv(&tensor))?;
    print_tensor("effective tensor", &tensor);
    println!(
        "symmetry defect {:.3e}, min rayleigh {:.6}",
        tensor.symmetry_defect(),
        tensor.min_rayleigh(64)
    );
    job.manifest.push(("tensor_a11".into(), tensor.entry(0, 0).to_string()));
    Ok(())
}

fn reference_from_config(job: &Job) -> homog::Result<Reference> {
    match job.cfg.get("cell", "reference") {
        None => Ok(if is_periodic(&job.scenario) {
            Reference::ExactPeriodic
        } else {
            Reference::LargestR
        }),
        Some("periodic") => Ok(Reference::ExactPeriodic),
        Some("largest-r") => Ok(Reference::LargestR),
        Some(other) => {
            if let Some(rest) = other.strip_prefix("oracle") {
                let vals: Vec<f64> = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::Config(format!("oracle value '{t}' not a number")))
                    })
                    .collect::<homog::Result<_>>()?;
                let mut m = [[0.0; 2]; 2];
                match (job.scenario.dim, vals.len()) {
                    (1, 1) => m[0][0] = vals[0],
                    (2, 4) => {
                        m[0][0] = vals[0];
                        m[0][1] = vals[1];
                        m[1][0] = vals[2];
                        m[1][1] = vals[3];
                    }
                    _ => {
                        return Err(Error::Config(
                            "cell.reference oracle needs 1 value (1D) or 4 values (2D)".into(),
                        ))
                    }
                }
                Ok(Reference::Oracle(m))
            } else {
                Err(Error::Config(format!(
                    "cell.reference must be periodic|largest-r|oracle <values>, got '{other}'"
                )))
            }
        }
    }
}

fn cmd_converge_r(job: &mut Job) -> homog::Result<()> {
    let reference = reference_from_config(job)?;
    let sc = &job.scenario;
    let x_sample = vec![0.5; sc.dim];
    let record = convergence_study(
        &sc.matrix,
        &x_sample,
        &sc.r_schedule,
        sc.points_per_unit,
        sc.tol,
        sc.window,
        reference,
    )?;
    report::write_file(&job.out.join("convergence.csv"), &report::convergence_csv(&record))?;
    print_tensor("largest-R tensor", record.tensors.last().unwrap());
    println!(
        "final error {:.3e}; errors decreasing: {}; cauchy decreasing: {}",
        record.errors.last().unwrap(),
        record.errors_decreasing,
        record.cauchy_decreasing
    );
    job.manifest.push(("final_error".into(), record.errors.last().unwrap().to_string()));
    Ok(())
}

fn cmd_spde_run(job: &mut Job) -> homog::Result<()> {
    let sc = &job.scenario;
    let grid = QGrid::new(sc.dim, sc.grid_n)?;
    let form = job.cfg.get("wave", "form").unwrap_or("oscillatory").to_string();
    let problem = match form.as_str() {
        "oscillatory" => {
            let eps = match job.cfg.get_f64("wave", "epsilon")? {
                Some(e) => e,
                None => *sc.epsilons.first().unwrap(),
            };
            let per_period = sc.grid_n as f64 * eps;
            if per_period < 16.0 {
                return Err(Error::Precondition(format!(
                    "epsilon {eps} under-resolved: {per_period:.1} nodes per period, need n >= {}",
                    (16.0 / eps).ceil() as usize
                )));
            }
            job.manifest.push(("epsilon_run".into(), eps.to_string()));
            oscillatory_problem(sc, grid, eps)?
        }
        "homogenized" => {
            let tensor = homog::experiment::scenario_effective_tensor(sc)?;
            let eff = homog::effective::effective_nonlinearity_exact(&sc.drift, &sc.diffusion);
            homogenized_problem(sc, grid, &tensor, &eff)?
        }
        other => {
            return Err(Error::Config(format!(
                "wave.form must be oscillatory|homogenized, got '{other}'"
            )))
        }
    };
    let steps = (sc.t_final / sc.dt).round() as usize;
    let stream = NoiseModel::new(sc.diffusion.mode_count(), sc.seed).stream(0, steps, sc.dt);
    let snapshot_stride = job.cfg.get_usize("wave", "snapshot_stride")?;
    let initial = match sc.initial {
        homog::experiment::InitialData::Zero => homog::wave::WaveState::zero(grid),
        homog::experiment::InitialData::SineMode { amplitude } => {
            homog::wave::WaveState::from_profiles(
                grid,
                |p| {
                    amplitude
                        * p.iter().map(|x| (std::f64::consts::PI * x).sin()).product::<f64>()
                },
                |_| 0.0,
            )
        }
    };
    let rec = problem.run(&initial, sc.t_final, Some(&stream), sc.record_stride, snapshot_stride)?;
    report::write_file(&job.out.join("trajectory.csv"), &report::trajectory_csv(&rec))?;
    if snapshot_stride.is_some() {
        report::write_file(&job.out.join("snapshots.csv"), &report::snapshots_csv(&rec, &grid))?;
    }
    println!(
        "trajectory: {} records, final |u|_H1 = {:.6}, |u'|_L2 = {:.6}, energy = {:.6}",
        rec.times.len(),
        rec.h1_norms.last().unwrap(),
        rec.velocity_l2.last().unwrap(),
        rec.energies.last().unwrap()
    );
    job.manifest.push(("form".into(), form));
    job.manifest.push(("steps".into(), steps.to_string()));
    Ok(())
}

fn cmd_homog_compare(job: &mut Job) -> homog::Result<()> {
    let res = compare_epsilon_sweep(&job.scenario)?;
    report::write_file(&job.out.join("paths.csv"), &report::compare_paths_csv(&res))?;
    report::write_file(&job.out.join("summary.csv"), &report::compare_summary_csv(&res))?;
    for (i, eps) in res.epsilons.iter().enumerate() {
        println!("epsilon {:>9.6}: mean e^2 = {:.6e}", eps, res.mean_sq[i]);
    }
    let pass = res.mean_sq_decreasing && res.tail_nonincreasing.iter().all(|&b| b);
    println!(
        "trend verdict: {} (mean e^2 decreasing: {}, tails non-increasing: {})",
        if pass { "PASS" } else { "FAIL" },
        res.mean_sq_decreasing,
        res.tail_nonincreasing.iter().all(|&b| b)
    );
    job.manifest.push(("deltas".into(), join(&res.deltas)));
    job.manifest.push(("verdict".into(), if pass { "PASS".into() } else { "FAIL".into() }));
    Ok(())
}
