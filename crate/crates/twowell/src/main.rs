use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use twowell::scan::{run_scan, solve_well, WellSolution};
use twowell::{parse_config, ExperimentConfig};
use twowell_core::bogoliubov::{
    bogoliubov_energy, condensate_projections, excited_blocks, lambda_zero, variance_coefficient_bound, Side,
};
use twowell_core::oracle::{assemble_full_hamiltonian, oracle_ground_state, TruncatedFockBasis};
use twowell_core::twomode::{assemble_two_mode_hamiltonian, fock_ground_state};

/// Double-well boson ground states: mean field, two-mode, Bogoliubov and
/// many-body checks.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration
    #[arg(long, global = true, default_value = "twowell.toml")]
    config: PathBuf,
    /// output directory for scan files
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// worker threads (overrides the config)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// recorded with the run; no physical quantity depends on it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hartree minimiser per separation
    Hartree,
    /// mean-field spectrum, gap and tunneling parameter per separation
    Spectrum,
    /// two-mode ground state per scan point
    Twomode,
    /// Bogoliubov cutoff ladder and variance-coefficient bound per separation
    Bogoliubov,
    /// truncated many-body ground state per scan point
    Oracle,
    /// full scan written as CSV (plus timings and plot)
    Scan,
}

fn wells(config: &ExperimentConfig, workers: usize) -> Result<Vec<WellSolution>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    pool.install(|| {
        config
            .distinct_separations()
            .par_iter()
            .map(|&l| solve_well(config, l).with_context(|| format!("L = {l}")))
            .collect()
    })
}

fn well_for(wells: &[WellSolution], l: f64) -> &WellSolution {
    wells.iter().find(|w| w.separation == l).expect("every separation solved")
}

fn hartree(wells: &[WellSolution]) -> Value {
    wells
        .iter()
        .map(|w| {
            json!({
                "L": w.separation,
                "mu_plus": w.hartree.mu_plus,
                "E_hartree": w.hartree.e_hartree,
                "iterations": w.hartree.iterations,
                "residual": w.hartree.residual,
            })
        })
        .collect()
}

fn spectrum(wells: &[WellSolution]) -> Value {
    wells
        .iter()
        .map(|w| {
            json!({
                "L": w.separation,
                "eigenvalues": &w.basis.eigenvalues[..w.basis.len().min(8)],
                "T": w.report.tunneling,
                "gap": w.report.gap,
                "gap_over_T": w.report.gap_over_tunneling,
                "excited_gap": w.report.excited_gap,
                "parity_warnings": w.basis.warnings.len(),
            })
        })
        .collect()
}

fn twomode(config: &ExperimentConfig, wells: &[WellSolution]) -> Result<Value> {
    let mut out = Vec::new();
    for (l, n) in config.points() {
        let model = well_for(wells, l).two_mode.with_particles(n)?;
        let g = fock_ground_state(&assemble_two_mode_hamiltonian(&model)?)?;
        out.push(json!({
            "L": l,
            "N": n,
            "E_2mode": g.energy,
            "variance": g.variance,
            "variance_over_N": g.variance / n as f64,
            "U": model.constants.u,
            "degenerate": g.degenerate,
        }));
    }
    Ok(Value::Array(out))
}

fn bogoliubov(config: &ExperimentConfig, wells: &[WellSolution]) -> Result<Value> {
    let mut out = Vec::new();
    let m = config.bogoliubov.max_cutoff();
    for w in wells {
        let right = excited_blocks(&w.grid, &w.kernel, &w.basis, config.lambda, m, Side::Right)?;
        let left = excited_blocks(&w.grid, &w.kernel, &w.basis, config.lambda, m, Side::Left)?;
        let v_r = condensate_projections(&w.grid, &w.kernel, &w.basis, m, Side::Right)?;
        let v_l = condensate_projections(&w.grid, &w.kernel, &w.basis, m, Side::Left)?;
        let u = w.two_mode.constants.u;
        let bound = variance_coefficient_bound(&right, &left, &v_r, &v_l, u, config.lambda)?;
        let root = lambda_zero(&right, &left, &v_r, &v_l, u, 1e3)?;
        out.push(json!({
            "L": w.separation,
            "ladder": w.bogoliubov.entries.iter().map(|e| json!({"M": e.cutoff, "E_bog": e.e_bog})).collect::<Vec<_>>(),
            "last_increment": w.bogoliubov.last_increment(),
            "variance_coefficient_bound": bound,
            "lambda_zero": format!("{root:?}"),
        }));
    }
    Ok(Value::Array(out))
}

fn oracle(config: &ExperimentConfig, wells: &[WellSolution]) -> Result<Value> {
    let mut out = Vec::new();
    for (l, n) in config.points() {
        if n > config.oracle.max_particles {
            continue;
        }
        let w = well_for(wells, l);
        let model = w.oracle.as_ref().expect("oracle enabled");
        let fock = TruncatedFockBasis::new(model.modes, n)?;
        let g = oracle_ground_state(&assemble_full_hamiltonian(&fock, model)?, &fock)?;
        let e2 = fock_ground_state(&assemble_two_mode_hamiltonian(&w.two_mode.with_particles(n)?)?)?;
        let pairs = (model.modes - 2) / 2;
        let e_bog = if pairs > 0 {
            let method = config.bogoliubov.method.into();
            Some(bogoliubov_energy(&w.grid, &w.kernel, &w.basis, config.lambda, pairs, method)?.e_bog)
        } else {
            None
        };
        out.push(json!({
            "L": l,
            "N": n,
            "E_oracle": g.energy,
            "E_2mode": e2.energy,
            "E_bog_same_modes": e_bog,
            "N_perp": g.excited,
            "N_perp_sq": g.excited_sq,
            "variance": g.variance,
            "imbalance": g.imbalance,
            "N_minus": g.odd_occupation,
        }));
    }
    Ok(Value::Array(out))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut config = parse_config(&cli.config).with_context(|| format!("loading {}", cli.config.display()))?;
    let workers = cli.workers.or(config.workers).unwrap_or_else(rayon::current_num_threads);
    if let Command::Oracle = cli.command {
        config.oracle.enabled = true;
    }
    let result = match cli.command {
        Command::Scan => {
            let out = run_scan(&config, &cli.out, Some(workers))?;
            std::fs::write(cli.out.join("config.resolved.toml"), config.to_toml_string()?)?;
            let failed = out.records.iter().filter(|r| r.error.is_some()).count();
            json!({
                "records": out.records.len(),
                "failed": failed,
                "csv": out.csv,
                "timings": out.timings,
                "svg": out.svg,
            })
        }
        Command::Hartree => hartree(&wells(&config, workers)?),
        Command::Spectrum => spectrum(&wells(&config, workers)?),
        Command::Twomode => twomode(&config, &wells(&config, workers)?)?,
        Command::Bogoliubov => bogoliubov(&config, &wells(&config, workers)?)?,
        Command::Oracle => oracle(&config, &wells(&config, workers)?)?,
    };
    let report = json!({ "seed": cli.seed, "workers": workers, "result": result });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
