//! Parameter scans over `(L, N)`.
//!
//! Everything that depends only on `L` is solved once per separation and
//! shared read-only by the points at that separation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use twowell_core::bogoliubov::{cutoff_ladder, CutoffStudy};
use twowell_core::grid::{double_well_potential, interaction_kernel, Grid, GridFn};
use twowell_core::meanfield::{
    gap_report, mean_field_spectrum, minimize_hartree_with, tunneling_parameter, HartreeResult, ModeBasis,
    TunnelingReport,
};
use twowell_core::oracle::{assemble_full_hamiltonian, oracle_ground_state, OracleModel, TruncatedFockBasis};
use twowell_core::twomode::{
    assemble_identity_form, assemble_two_mode_hamiltonian, fock_ground_state, gaussian_trial_state, SigmaRule,
    TwoModeModel,
};

use crate::config::ExperimentConfig;
use crate::svg;

/// First line of every scan CSV.
pub const CSV_VERSION: &str = "# scan-csv v1";

pub const CSV_COLUMNS: [&str; 29] = [
    "N",
    "L",
    "s",
    "lambda",
    "T",
    "gap",
    "gap_over_T",
    "mu_plus",
    "mu_minus",
    "excited_gap",
    "E_2mode",
    "E_bog",
    "M_bog",
    "E_bog_last_increment",
    "variance",
    "variance_over_N",
    "sigma_sq_used",
    "E_trial",
    "sigma_sq_alt",
    "E_trial_alt",
    "E_reference",
    "identity_residual",
    "delta",
    "E_oracle",
    "oracle_N_perp",
    "oracle_N_perp_sq",
    "oracle_variance",
    "oracle_imbalance",
    "error",
];

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Mean-field solution and `N`-independent coefficients at one separation.
#[derive(Clone, Debug)]
pub struct WellSolution {
    pub separation: f64,
    pub grid: Grid,
    pub potential: GridFn,
    pub kernel: GridFn,
    pub hartree: HartreeResult,
    pub basis: ModeBasis,
    pub report: TunnelingReport,
    pub bogoliubov: CutoffStudy,
    /// Two-mode coefficients; rebuilt per `N` with `with_particles`.
    pub two_mode: TwoModeModel,
    pub oracle: Option<OracleModel>,
    pub runtime_ms: u128,
}

pub fn solve_well(config: &ExperimentConfig, separation: f64) -> twowell_core::Result<WellSolution> {
    let start = Instant::now();
    let spec = config.potential(separation);
    let half_width = config
        .grid
        .x_max
        .unwrap_or_else(|| Grid::default_half_width(separation, config.kernel.range));
    let grid = Grid::symmetric(half_width, config.grid.n)?;
    let potential = double_well_potential(&grid, &spec);
    let kernel = interaction_kernel(&grid, &config.kernel_spec())?;
    let hartree = minimize_hartree_with(
        &grid,
        &potential,
        &kernel,
        config.lambda,
        &config.tolerances.hartree_options(),
    )?;
    let margin = hartree.variational_margin();
    if margin < -1e-12 * hartree.e_hartree.abs() {
        return Err(twowell_core::Error::VariationalCheckFailed { margin });
    }
    let basis = mean_field_spectrum(&grid, &potential, &kernel, &hartree, config.spectrum_modes())?;
    let report = gap_report(&basis, &spec)?;
    let bogoliubov = cutoff_ladder(
        &grid,
        &kernel,
        &basis,
        config.lambda,
        &config.bogoliubov.m_ladder,
        config.bogoliubov.method.into(),
    )?;
    let two_mode = TwoModeModel::from_basis(&grid, &potential, &kernel, &basis, 2)?;
    let oracle = if config.oracle.enabled {
        Some(OracleModel::from_basis(&grid, &potential, &kernel, &basis, config.oracle.modes)?)
    } else {
        None
    };
    Ok(WellSolution {
        separation,
        grid,
        potential,
        kernel,
        hartree,
        basis,
        report,
        bogoliubov,
        two_mode,
        oracle,
        runtime_ms: start.elapsed().as_millis(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleValues {
    pub energy: f64,
    pub excited: f64,
    pub excited_sq: f64,
    pub variance: f64,
    pub imbalance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointValues {
    pub gap: f64,
    pub gap_over_t: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub excited_gap: f64,
    pub e_2mode: f64,
    pub e_bog: f64,
    pub bog_cutoff: usize,
    pub bog_last_increment: f64,
    pub variance: f64,
    pub variance_over_n: f64,
    pub sigma_sq: f64,
    pub e_trial: f64,
    pub sigma_sq_alt: f64,
    pub e_trial_alt: f64,
    /// `E_0 + E_N^w + N(μ_+ - μ_-)/2`.
    pub e_reference: f64,
    /// Relative max difference between the ladder and identity assemblies.
    pub identity_residual: f64,
    pub oracle: Option<OracleValues>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub particles: usize,
    pub separation: f64,
    pub s: f64,
    pub lambda: f64,
    pub tunneling: f64,
    /// `-ln T / ln N`.
    pub delta: f64,
    pub values: Option<PointValues>,
    pub error: Option<String>,
    pub runtime_ms: u128,
}

fn trial_energy(
    rule: SigmaRule,
    particles: usize,
    gap: f64,
    h: &twowell_core::twomode::FockMatrix,
) -> twowell_core::Result<(f64, f64)> {
    let sigma_sq = rule.sigma_sq(particles, gap);
    Ok((sigma_sq, gaussian_trial_state(particles, sigma_sq)?.energy(h)))
}

fn evaluate(config: &ExperimentConfig, well: &WellSolution, particles: usize) -> Result<PointValues, String> {
    let fail = |stage: &str, e: twowell_core::Error| format!("{stage}: {e}");
    let model = well.two_mode.with_particles(particles).map_err(|e| fail("two-mode", e))?;
    let h = assemble_two_mode_hamiltonian(&model).map_err(|e| fail("two-mode", e))?;
    let identity = assemble_identity_form(&model).map_err(|e| fail("identity form", e))?;
    let identity_residual = h.max_abs_diff(&identity) / h.max_abs().max(f64::MIN_POSITIVE);
    let ground = fock_ground_state(&h).map_err(|e| fail("two-mode ground state", e))?;
    let gap = well.report.gap;
    let (sigma_sq, e_trial) =
        trial_energy(config.trial.rule(), particles, gap, &h).map_err(|e| fail("trial", e))?;
    let (sigma_sq_alt, e_trial_alt) =
        trial_energy(config.trial.alternate_rule(), particles, gap, &h).map_err(|e| fail("trial", e))?;
    let bog = well.bogoliubov.last();
    if bog.e_bog > 0.0 {
        return Err(format!("bogoliubov: E_bog = {:e} is positive", bog.e_bog));
    }
    let oracle = match &well.oracle {
        Some(m) if particles <= config.oracle.max_particles => {
            let fock = TruncatedFockBasis::new(m.modes, particles).map_err(|e| fail("oracle", e))?;
            let full = assemble_full_hamiltonian(&fock, m).map_err(|e| fail("oracle", e))?;
            let g = oracle_ground_state(&full, &fock).map_err(|e| fail("oracle", e))?;
            Some(OracleValues {
                energy: g.energy,
                excited: g.excited,
                excited_sq: g.excited_sq,
                variance: g.variance,
                imbalance: g.imbalance,
            })
        }
        _ => None,
    };
    let n = particles as f64;
    Ok(PointValues {
        gap,
        gap_over_t: well.report.gap_over_tunneling,
        mu_plus: well.basis.mu_plus(),
        mu_minus: well.basis.mu_minus(),
        excited_gap: well.report.excited_gap,
        e_2mode: ground.energy,
        e_bog: bog.e_bog,
        bog_cutoff: bog.cutoff,
        bog_last_increment: well.bogoliubov.last_increment(),
        variance: ground.variance.max(0.0),
        variance_over_n: ground.variance.max(0.0) / n,
        sigma_sq,
        e_trial,
        sigma_sq_alt,
        e_trial_alt,
        e_reference: model.constants.e0 + model.constants.e_nw - 0.5 * n * gap,
        identity_residual,
        oracle,
    })
}

/// Solves every point with `workers` threads. The output order and content do
/// not depend on the worker count.
pub fn compute_scan(config: &ExperimentConfig, workers: usize) -> Result<Vec<ScanRecord>, ScanError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let separations = config.distinct_separations();
    let wells: Vec<Result<WellSolution, String>> = pool.install(|| {
        separations
            .par_iter()
            .map(|&l| solve_well(config, l).map_err(|e| format!("mean field: {e}")))
            .collect()
    });
    let points = config.points();
    let records = pool.install(|| {
        points
            .par_iter()
            .map(|&(l, n)| {
                let start = Instant::now();
                let well = &wells[separations.iter().position(|&x| x == l).expect("separation solved")];
                let outcome = well.as_ref().map_err(Clone::clone).and_then(|w| evaluate(config, w, n));
                let tunneling = tunneling_parameter(config.s, l);
                let (values, error) = match outcome {
                    Ok(v) => (Some(v), None),
                    Err(e) => (None, Some(e)),
                };
                ScanRecord {
                    particles: n,
                    separation: l,
                    s: config.s,
                    lambda: config.lambda,
                    tunneling,
                    delta: -tunneling.ln() / (n as f64).ln(),
                    values,
                    error,
                    runtime_ms: start.elapsed().as_millis(),
                }
            })
            .collect()
    });
    Ok(records)
}

fn e(x: f64) -> String {
    format!("{x:e}")
}

fn row(r: &ScanRecord) -> Vec<String> {
    let mut out = vec![
        r.particles.to_string(),
        r.separation.to_string(),
        r.s.to_string(),
        r.lambda.to_string(),
        e(r.tunneling),
    ];
    match &r.values {
        Some(v) => {
            out.extend([
                e(v.gap),
                e(v.gap_over_t),
                e(v.mu_plus),
                e(v.mu_minus),
                e(v.excited_gap),
                e(v.e_2mode),
                e(v.e_bog),
                v.bog_cutoff.to_string(),
                e(v.bog_last_increment),
                e(v.variance),
                e(v.variance_over_n),
                e(v.sigma_sq),
                e(v.e_trial),
                e(v.sigma_sq_alt),
                e(v.e_trial_alt),
                e(v.e_reference),
                e(v.identity_residual),
            ]);
        }
        None => out.extend(std::iter::repeat_n(String::new(), 17)),
    }
    out.push(e(r.delta));
    match r.values.as_ref().and_then(|v| v.oracle.as_ref()) {
        Some(o) => out.extend([e(o.energy), e(o.excited), e(o.excited_sq), e(o.variance), e(o.imbalance)]),
        None => out.extend(std::iter::repeat_n(String::new(), 5)),
    }
    out.push(r.error.clone().unwrap_or_default());
    debug_assert_eq!(out.len(), CSV_COLUMNS.len());
    out
}

fn create(path: &Path) -> Result<BufWriter<File>, ScanError> {
    File::create(path).map(BufWriter::new).map_err(|source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_scan_csv(path: &Path, records: &[ScanRecord]) -> Result<(), ScanError> {
    let mut file = create(path)?;
    writeln!(file, "{CSV_VERSION}").map_err(|source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush().map_err(|source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Wall-clock times, kept apart from the deterministic scan table.
pub fn write_timings_csv(path: &Path, records: &[ScanRecord]) -> Result<(), ScanError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["N", "L", "runtime_ms"])?;
    for r in records {
        w.write_record([r.particles.to_string(), r.separation.to_string(), r.runtime_ms.to_string()])?;
    }
    w.flush().map_err(|source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

#[derive(Debug)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub csv: PathBuf,
    pub timings: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Computes the scan and writes the CSV table, the timing sidecar and the
/// optional plot into `out_dir`.
pub fn run_scan(config: &ExperimentConfig, out_dir: &Path, workers: Option<usize>) -> Result<ScanOutput, ScanError> {
    let workers = workers.or(config.workers).unwrap_or_else(rayon::current_num_threads);
    let records = compute_scan(config, workers)?;
    std::fs::create_dir_all(out_dir).map_err(|source| ScanError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let csv = out_dir.join(&config.output.csv);
    write_scan_csv(&csv, &records)?;
    let timings = out_dir.join(&config.output.timings);
    write_timings_csv(&timings, &records)?;
    let svg = if config.output.svg.is_empty() {
        None
    } else {
        let path = out_dir.join(&config.output.svg);
        std::fs::write(&path, svg::variance_plot(&records)).map_err(|source| ScanError::Io {
            path: path.clone(),
            source,
        })?;
        Some(path)
    };
    Ok(ScanOutput {
        records,
        csv,
        timings,
        svg,
    })
}
