//! `hrch` - config-driven runs of the hyperbolic-relaxation Cahn-Hilliard
//! harness with CSV and SVG artifacts.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hrch_cli::config::{build_perturbation, parse_config, ParsedConfig};
use hrch_cli::runner::ThreadedRunner;
use hrch_cli::svg::{Plot, Series};
use hrch_cli::{csv, exit_code_for, exit_codes};
use hrch_core::diagnostics::{self, DiagnosticsRecord};
use hrch_core::experiments::{
    alpha_columns, alpha_sweep, contdep_columns, continuous_dependence,
    continuous_dependence_strong, epsilon_sweep, n_refinement, SweepResult,
};
use hrch_core::galerkin::{solve, Trajectory};
use hrch_core::potentials::{check_yosida_properties, zelik_constants};
use hrch_core::vch::vch_solve;
use hrch_core::{SpectralBasis, YosidaParams};

#[derive(Parser)]
#[command(name = "hrch", about = "Spectral-Galerkin harness for the hyperbolically relaxed viscous Cahn-Hilliard system", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file (flat key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    out: PathBuf,
    /// Skip SVG plot generation.
    #[arg(long)]
    no_plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the relaxed system and emit trajectory diagnostics.
    Solve(RunArgs),
    /// Integrate the viscous Cahn-Hilliard limit system.
    Vch(RunArgs),
    /// Rate study against the limit system over a list of alphas.
    SweepAlpha(RunArgs),
    /// Continuous-dependence sweep in the weak norm bundle.
    Contdep(RunArgs),
    /// Continuous-dependence sweep in the strong norm bundle.
    ContdepStrong(RunArgs),
    /// Cauchy sweep of the Yosida regularization parameter.
    SweepEps(RunArgs),
    /// Galerkin mode-refinement study.
    RefineN(RunArgs),
    /// Verify the Moreau-Yosida property suite and coercivity constants.
    YosidaCheck(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Solve(a) => ("solve", a),
        Command::Vch(a) => ("vch", a),
        Command::SweepAlpha(a) => ("sweep-alpha", a),
        Command::Contdep(a) => ("contdep", a),
        Command::ContdepStrong(a) => ("contdep-strong", a),
        Command::SweepEps(a) => ("sweep-eps", a),
        Command::RefineN(a) => ("refine-n", a),
        Command::YosidaCheck(a) => ("yosida-check", a),
    };
    match run(name, args) {
        Ok(()) => ExitCode::from(exit_codes::OK as u8),
        Err(AppError::Core(e)) => {
            eprintln!("hrch: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
        Err(AppError::Io(e)) => {
            eprintln!("hrch: io error: {e}");
            ExitCode::from(exit_codes::IO as u8)
        }
    }
}

enum AppError {
    Core(hrch_core::Error),
    Io(std::io::Error),
}

impl From<hrch_core::Error> for AppError {
    fn from(e: hrch_core::Error) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

fn run(name: &str, args: &RunArgs) -> Result<(), AppError> {
    let text = std::fs::read_to_string(&args.config)?;
    let parsed = parse_config(&text)?;
    std::fs::create_dir_all(&args.out)?;
    let runner = ThreadedRunner::from_env();

    match name {
        "solve" => {
            let traj = solve(&parsed.sim)?;
            write(&args.out, "trajectory.csv", &csv::trajectory_csv(&traj))?;
            if !args.no_plots {
                let basis = parsed.sim.build_basis()?;
                emit_trajectory_plots(&args.out, &traj, &basis)?;
            }
            println!(
                "solve: {} steps, mass residual {:e}",
                traj.states.len() - 1,
                diagnostics::mass_invariant_residual(&traj, &parsed.sim)
            );
        }
        "vch" => {
            let traj = vch_solve(&parsed.sim)?;
            let basis = parsed.sim.build_basis()?;
            let records = diagnostics::compute_vch_records(&traj, &parsed.sim, &basis)?;
            write(&args.out, "trajectory.csv", &csv::vch_csv(&traj, &records))?;
            if !args.no_plots {
                emit_vch_plots(&args.out, &traj, &records, &basis)?;
            }
            let worst = diagnostics::vch_dissipation_residual(&traj, &parsed.sim, &basis)?;
            println!(
                "vch: {} steps, worst energy-dissipation defect {:e}",
                traj.states.len() - 1,
                worst
            );
        }
        "sweep-alpha" => {
            let res = alpha_sweep(&parsed.sim, &parsed.extras.alphas, &runner)?;
            finish_sweep(args, &res, alpha_columns::PHI_COMBINED)?;
        }
        "contdep" => {
            let pert = build_perturbation(&parsed.extras, &parsed.sim)?;
            let res =
                continuous_dependence(&parsed.sim, &pert, &parsed.extras.magnitudes, &runner)?;
            finish_sweep(args, &res, contdep_columns::LHS)?;
        }
        "contdep-strong" => {
            let pert = build_perturbation(&parsed.extras, &parsed.sim)?;
            let res = continuous_dependence_strong(
                &parsed.sim,
                &pert,
                &parsed.extras.magnitudes,
                &runner,
            )?;
            finish_sweep(args, &res, contdep_columns::LHS)?;
        }
        "sweep-eps" => {
            let res = epsilon_sweep(&parsed.sim, &parsed.extras.epsilons, &runner)?;
            finish_sweep(args, &res, hrch_core::experiments::epsilon_columns::CAUCHY_DIFF)?;
        }
        "refine-n" => {
            let res = n_refinement(&parsed.sim, &parsed.extras.ns, &runner)?;
            finish_sweep(args, &res, hrch_core::experiments::refine_columns::TERMINAL_DIFF)?;
        }
        "yosida-check" => yosida_check(args, &parsed)?,
        _ => unreachable!(),
    }
    Ok(())
}

fn write(dir: &Path, file: &str, content: &str) -> Result<(), AppError> {
    std::fs::write(dir.join(file), content)?;
    Ok(())
}

fn finish_sweep(args: &RunArgs, res: &SweepResult, plot_column: &str) -> Result<(), AppError> {
    write(&args.out, "sweep.csv", &csv::sweep_csv(res))?;
    if !args.no_plots {
        emit_sweep_plot(&args.out, res, plot_column)?;
    }
    match res.fit_for(plot_column) {
        Some(fit) => println!(
            "{}: fitted {} ~ {:.4e} * {}^{:.4} (log-rms residual {:.4})",
            res.param_name, plot_column, fit.constant, res.param_name, fit.exponent, fit.residual
        ),
        None => println!("{}: degenerate fit for {}", res.param_name, plot_column),
    }
    Ok(())
}

fn emit_trajectory_plots(
    dir: &Path,
    traj: &Trajectory,
    basis: &SpectralBasis,
) -> Result<(), AppError> {
    write_plot(dir, "phi_snapshots.svg", snapshots_plot(basis, |i| &traj.states[i].phi, traj.states.len()))?;

    let t: Vec<f64> = traj.records.iter().map(|r| r.t).collect();
    let series = |f: &dyn Fn(&DiagnosticsRecord) -> f64| -> Vec<(f64, f64)> {
        t.iter().zip(&traj.records).map(|(&t, r)| (t, f(r))).collect()
    };
    let energy = Plot::new("energy and dissipation", "t", "value")
        .with_series("energy", series(&|r| r.energy), false)
        .with_series("cumulative dissipation", series(&|r| r.cumulative_dissipation), false)
        .with_series("grad mu", series(&|r| r.grad_mu_norm), false);
    write_plot(dir, "diagnostics.svg", energy)?;

    let extrema = Plot::new("phase-field extrema", "t", "phi")
        .with_series("min", series(&|r| r.phi_min), false)
        .with_series("max", series(&|r| r.phi_max), false);
    write_plot(dir, "extrema.svg", extrema)?;
    Ok(())
}

fn emit_vch_plots(
    dir: &Path,
    traj: &hrch_core::vch::VchTrajectory,
    records: &[hrch_core::diagnostics::VchRecord],
    basis: &SpectralBasis,
) -> Result<(), AppError> {
    write_plot(dir, "phi_snapshots.svg", snapshots_plot(basis, |i| &traj.states[i].phi, traj.states.len()))?;
    let energy = Plot::new("limit-system energy", "t", "value").with_series(
        "energy",
        records.iter().map(|r| (r.t, r.energy)).collect(),
        false,
    );
    write_plot(dir, "diagnostics.svg", energy)?;
    Ok(())
}

/// Up to `min(10, states)` snapshots of `phi(x)`, evenly spaced in time.
fn snapshots_plot<'a, F>(basis: &SpectralBasis, phi_at: F, states: usize) -> Plot
where
    F: Fn(usize) -> &'a hrch_core::FieldCoeffs,
{
    let count = states.min(10);
    let mut plot = Plot::new("phi snapshots", "x", "phi");
    for k in 0..count {
        let idx = if count == 1 { 0 } else { k * (states - 1) / (count - 1) };
        let grid = basis.synth(phi_at(idx));
        let pts: Vec<(f64, f64)> = basis.grid().iter().copied().zip(grid).collect();
        let label = if k == 0 || k + 1 == count {
            format!("state {idx}")
        } else {
            String::new()
        };
        plot = plot.with_series(&label, pts, false);
    }
    plot
}

fn emit_sweep_plot(dir: &Path, res: &SweepResult, column: &str) -> Result<(), AppError> {
    let Some(col) = res.column(column) else {
        return Ok(());
    };
    let pts: Vec<(f64, f64)> = res.rows.iter().map(|r| r.param).zip(col).collect();
    let mut plot = Plot::new(
        &format!("{column} vs {}", res.param_name),
        res.param_name,
        column,
    );
    plot.log_x = true;
    plot.log_y = true;
    plot = plot.with_series(column, pts.clone(), true);
    if let Some(fit) = res.fit_for(column) {
        let guide: Vec<(f64, f64)> = pts
            .iter()
            .filter(|(x, _)| *x > 0.0)
            .map(|&(x, _)| (x, fit.constant * x.powf(fit.exponent)))
            .collect();
        plot.guides.push(Series {
            label: format!("slope {:.3}", fit.exponent),
            points: guide,
            markers: false,
        });
    }
    write_plot(dir, "sweep.svg", plot)?;
    Ok(())
}

fn write_plot(dir: &Path, file: &str, plot: Plot) -> Result<(), AppError> {
    std::fs::write(dir.join(file), plot.render())?;
    Ok(())
}

fn yosida_check(args: &RunArgs, parsed: &ParsedConfig) -> Result<(), AppError> {
    let extras = &parsed.extras;
    let p = &parsed.sim.potential;
    let (lo, hi) = extras.yosida_range;
    let count = extras.yosida_samples.max(2);
    let samples: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();

    let mut out = String::from("eps,property,pass,worst_violation\n");
    let mut all_pass = true;
    for &eps in &extras.yosida_epsilons {
        let y = YosidaParams::new(eps)?;
        let rep = check_yosida_properties(p, &y, &samples)?;
        for (name, check) in [
            ("monotone", rep.monotone),
            ("lipschitz", rep.lipschitz),
            ("zero_at_zero", rep.zero_at_zero),
            ("dominated", rep.dominated),
            ("envelope", rep.envelope),
        ] {
            use std::fmt::Write as _;
            let _ = writeln!(
                out,
                "{eps:e},{name},{},{:e}",
                u8::from(check.pass),
                check.worst_violation
            );
            all_pass &= check.pass;
        }
    }
    write(&args.out, "yosida_properties.csv", &out)?;

    let mut zk = String::from("m0,eps,delta0,c0,violations\n");
    for &m0 in &extras.zelik_m0 {
        for &eps in &extras.yosida_epsilons {
            let y = YosidaParams::new(eps)?;
            let (d0, c0) = zelik_constants(p, &y, m0, &samples)?;
            let mut violations = 0usize;
            for &r in &samples {
                let fp = p.yosida_prime(&y, r)?;
                if fp * (r - m0) < d0 * fp.abs() - c0 {
                    violations += 1;
                }
            }
            use std::fmt::Write as _;
            let _ = writeln!(zk, "{m0:e},{eps:e},{d0:e},{c0:e},{violations}");
            all_pass &= violations == 0;
        }
    }
    write(&args.out, "zelik_constants.csv", &zk)?;

    println!("yosida-check: {}", if all_pass { "all properties pass" } else { "FAILURES found" });
    if !all_pass {
        return Err(AppError::Core(hrch_core::Error::Config(
            "yosida property suite reported violations".into(),
        )));
    }
    Ok(())
}
