//! Hartree minimisation, the mean-field spectrum with its localized mode
//! combinations, and tunneling diagnostics.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::grid::{convolve_density, Grid, GridFn, PotentialSpec};
use crate::linalg::{solve_diagonally_dominant, SymTridiagonal};
use crate::math::{abs, exp, powf};
use crate::schrodinger::{apply_operator, energy_form, sector_modes, Parity};
use crate::{Error, Result};

/// Relative energy rise tolerated before a step is rejected.
const ENERGY_SLACK: f64 = 1e-13;
const MAX_STEP: f64 = 1e4;
const MIN_STEP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HartreeOptions {
    /// Stop once `‖(h[u] - μ)u‖ ≤ tol · |μ|`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for HartreeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 50_000,
        }
    }
}

/// Converged Hartree minimiser.
#[derive(Clone, Debug)]
pub struct HartreeResult {
    pub lambda: f64,
    /// Unit-norm, even and nonnegative.
    pub u_plus: GridFn,
    /// Lowest eigenvalue of the mean-field operator built from `u_plus`.
    pub mu_plus: f64,
    pub e_hartree: f64,
    pub iterations: usize,
    /// Final `‖(h[u] - μ)u‖`.
    pub residual: f64,
    /// Accepted energies, one per step, starting with the initial guess.
    pub energy_history: Vec<f64>,
    /// Hartree energies of a unit gaussian in the right well, in the left
    /// well, and of their normalised sum.
    pub trial_energies: [f64; 3],
}

impl HartreeResult {
    /// `min E^H[trial] - E^H[u_+]`; nonnegative for a true minimiser.
    pub fn variational_margin(&self) -> f64 {
        self.trial_energies.iter().copied().fold(f64::INFINITY, f64::min) - self.e_hartree
    }
}

/// `∬ |u(x)|² w(x - y) |u(y)|²`.
pub fn interaction_energy(grid: &Grid, kernel: &GridFn, u: &GridFn) -> Result<f64> {
    let rho = u.product(u);
    Ok(rho.inner(&convolve_density(grid, kernel, &rho)?))
}

/// `E^H[u] = ∫|u'|² + V|u|² + (λ/2)∬|u|²w|u|²`.
pub fn hartree_energy(grid: &Grid, potential: &GridFn, kernel: &GridFn, lambda: f64, u: &GridFn) -> Result<f64> {
    let one_body = energy_form(potential, u, u);
    if lambda == 0.0 {
        return Ok(one_body);
    }
    Ok(one_body + 0.5 * lambda * interaction_energy(grid, kernel, u)?)
}

/// `V + λ w∗|u|²`.
pub fn mean_field_potential(
    grid: &Grid,
    potential: &GridFn,
    kernel: &GridFn,
    lambda: f64,
    u: &GridFn,
) -> Result<GridFn> {
    if lambda == 0.0 {
        return Ok(potential.clone());
    }
    let conv = convolve_density(grid, kernel, &u.product(u))?;
    Ok(potential.zip_map(&conv, |v, c| v + lambda * c))
}

/// Minimises the Hartree functional with default iteration cap.
pub fn minimize_hartree(
    grid: &Grid,
    potential: &GridFn,
    kernel: &GridFn,
    lambda: f64,
    tol: f64,
) -> Result<HartreeResult> {
    minimize_hartree_with(
        grid,
        potential,
        kernel,
        lambda,
        &HartreeOptions {
            tol,
            ..HartreeOptions::default()
        },
    )
}

/// Normalised implicit imaginary-time descent: each step solves
/// `(I + τ h[u]) u' = u`, then normalises and symmetrises `u'`. The step
/// `τ` doubles after an accepted step and halves after a rejected one, so the
/// accepted energies never increase.
pub fn minimize_hartree_with(
    grid: &Grid,
    potential: &GridFn,
    kernel: &GridFn,
    lambda: f64,
    options: &HartreeOptions,
) -> Result<HartreeResult> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: "coupling must be ≥ 0",
        });
    }
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "tolerance must be > 0",
        });
    }
    grid.require_center()?;

    let mut u = initial_guess(grid, potential);
    let mut energy = hartree_energy(grid, potential, kernel, lambda, &u)?;
    let mut history = Vec::from([energy]);
    let mut tau = 1.0;
    let mut residual = f64::INFINITY;

    for iteration in 0..options.max_iterations {
        let veff = mean_field_potential(grid, potential, kernel, lambda, &u)?;
        let hu = apply_operator(&veff, &u);
        let mu = u.inner(&hu);
        residual = hu.zip_map(&u, |a, b| a - mu * b).norm();
        if residual <= options.tol * abs(mu) {
            return finish(grid, potential, kernel, lambda, u, energy, iteration, residual, history);
        }

        loop {
            let candidate = implicit_step(grid, &veff, &u, tau);
            let e = hartree_energy(grid, potential, kernel, lambda, &candidate)?;
            if e <= energy + ENERGY_SLACK * abs(energy) {
                u = candidate;
                energy = e;
                history.push(e);
                tau = (2.0 * tau).min(MAX_STEP);
                break;
            }
            tau *= 0.5;
            if tau < MIN_STEP {
                return Err(Error::NotConverged {
                    iterations: iteration,
                    residual,
                });
            }
        }
    }
    Err(Error::NotConverged {
        iterations: options.max_iterations,
        residual,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    grid: &Grid,
    potential: &GridFn,
    kernel: &GridFn,
    lambda: f64,
    u: GridFn,
    e_hartree: f64,
    iterations: usize,
    residual: f64,
    energy_history: Vec<f64>,
) -> Result<HartreeResult> {
    let veff = mean_field_potential(grid, potential, kernel, lambda, &u)?;
    let ground = sector_modes(grid, &veff, Parity::Even, 1)?;
    let well = right_well(grid, potential);
    let mut trial_energies = [0.0; 3];
    for (slot, (a, b)) in trial_energies.iter_mut().zip([(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]) {
        *slot = hartree_energy(grid, potential, kernel, lambda, &gaussian_pair(grid, well, a, b))?;
    }
    Ok(HartreeResult {
        lambda,
        u_plus: u,
        mu_plus: ground[0].energy,
        e_hartree,
        iterations,
        residual,
        energy_history,
        trial_energies,
    })
}

fn implicit_step(grid: &Grid, veff: &GridFn, u: &GridFn, tau: f64) -> GridFn {
    let n = grid.len();
    let h = grid.spacing();
    let k = tau / (h * h);
    let v = veff.values();
    let diag: Vec<f64> = (1..n - 1).map(|i| 1.0 + 2.0 * k + tau * v[i]).collect();
    let off = alloc::vec![-k; n - 3];
    let interior = solve_diagonally_dominant(&SymTridiagonal::new(diag, off), &u.values()[1..n - 1]);
    let mut values = alloc::vec![0.0; n];
    values[1..n - 1].copy_from_slice(&interior);
    let next = grid.from_values(values);
    let sym = next.zip_map(&next.reflect(), |a, b| 0.5 * (a + b));
    let norm = sym.norm();
    sym.map(|x| x / norm)
}

/// Grid point of the right well minimum.
fn right_well(grid: &Grid, potential: &GridFn) -> f64 {
    let c = grid.center().unwrap_or(grid.len() / 2);
    let v = &potential.values()[c..];
    let (offset, _) = v
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &x)| if x < best.1 { (i, x) } else { best });
    grid.points()[c + offset]
}

/// Normalised `a·g(x - well) + b·g(x + well)` with a unit gaussian `g`,
/// zero on the boundary.
fn gaussian_pair(grid: &Grid, well: f64, a: f64, b: f64) -> GridFn {
    let n = grid.len();
    let mut u = grid.sample(|x| a * exp(-0.5 * (x - well) * (x - well)) + b * exp(-0.5 * (x + well) * (x + well)));
    u.values_mut()[0] = 0.0;
    u.values_mut()[n - 1] = 0.0;
    let norm = u.norm();
    u.map(|x| x / norm)
}

fn initial_guess(grid: &Grid, potential: &GridFn) -> GridFn {
    gaussian_pair(grid, right_well(grid, potential), 1.0, 1.0)
}

/// Non-fatal irregularities found while building a [`ModeBasis`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeWarning {
    /// The even member of pair `pair` (0 = ground doublet) is not strictly
    /// below its odd partner, or the pair is not below the next even mode.
    ParityOrder { pair: usize, even: f64, odd: f64 },
}

/// Mean-field eigenpairs and their localized combinations.
///
/// `modes[2k]` is the `k`-th even mode and `modes[2k+1]` the `k`-th odd mode.
/// Without a [`ModeWarning`] this is also increasing order.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    pub lambda: f64,
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<GridFn>,
    pub parities: Vec<Parity>,
    /// `(u_+ + u_-)/√2`, mostly in the right well.
    pub u1: GridFn,
    /// `(u_+ - u_-)/√2`, mostly in the left well.
    pub u2: GridFn,
    /// `right[α] = (modes[2α+2] + modes[2α+3])/√2`.
    pub right: Vec<GridFn>,
    /// `left[α] = (modes[2α+2] - modes[2α+3])/√2`.
    pub left: Vec<GridFn>,
    /// `V + λ w∗|u_+|²`.
    pub mean_field_potential: GridFn,
    pub warnings: Vec<ModeWarning>,
}

impl ModeBasis {
    pub fn mu_plus(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn mu_minus(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Number of excited right/left pairs.
    pub fn pair_count(&self) -> usize {
        self.right.len()
    }

    /// `[u1, u2, r_1, l_1, r_2, l_2, ...]` truncated to `count` orbitals.
    pub fn localized_orbitals(&self, count: usize) -> Vec<GridFn> {
        let mut out = Vec::with_capacity(count);
        out.push(self.u1.clone());
        out.push(self.u2.clone());
        for (r, l) in self.right.iter().zip(&self.left) {
            out.push(r.clone());
            out.push(l.clone());
        }
        out.truncate(count);
        out
    }
}

/// Diagonalises `h_MF = -d²/dx² + V + λ w∗|u_+|²` and builds the localized
/// modes. `n_modes` must be even and at least 4.
pub fn mean_field_spectrum(
    grid: &Grid,
    potential: &GridFn,
    kernel: &GridFn,
    hartree: &HartreeResult,
    n_modes: usize,
) -> Result<ModeBasis> {
    if n_modes < 4 || !n_modes.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "n_modes",
            reason: "n_modes must be even and ≥ 4",
        });
    }
    let veff = mean_field_potential(grid, potential, kernel, hartree.lambda, &hartree.u_plus)?;
    let per_sector = n_modes / 2;
    let even = sector_modes(grid, &veff, Parity::Even, per_sector)?;
    let odd = sector_modes(grid, &veff, Parity::Odd, per_sector)?;
    if even.len() < per_sector || odd.len() < per_sector {
        return Err(Error::InsufficientModes {
            cutoff: per_sector,
            needed: n_modes,
            available: even.len() + odd.len(),
        });
    }

    let c = grid.require_center()?;
    let mut eigenvalues = Vec::with_capacity(n_modes);
    let mut modes = Vec::with_capacity(n_modes);
    let mut warnings = Vec::new();
    for (k, (e, o)) in even.into_iter().zip(odd).enumerate() {
        let ue = if k == 0 {
            orient_by_sum(e.vector)
        } else {
            orient_by_peak(e.vector, c)
        };
        let uo = orient_by_overlap(o.vector, &ue, c);
        let next_even = eigenvalues.len() >= 2 && eigenvalues[eigenvalues.len() - 1] >= e.energy;
        if e.energy >= o.energy || next_even {
            warnings.push(ModeWarning::ParityOrder {
                pair: k,
                even: e.energy,
                odd: o.energy,
            });
        }
        eigenvalues.push(e.energy);
        eigenvalues.push(o.energy);
        modes.push(ue);
        modes.push(uo);
    }

    let parities = modes
        .iter()
        .map(|m| {
            if m.inner(&m.reflect()) >= 0.0 {
                Parity::Even
            } else {
                Parity::Odd
            }
        })
        .collect();

    let plus = |a: &GridFn, b: &GridFn| a.zip_map(b, |x, y| (x + y) * FRAC_1_SQRT_2);
    let minus = |a: &GridFn, b: &GridFn| a.zip_map(b, |x, y| (x - y) * FRAC_1_SQRT_2);
    let u1 = plus(&modes[0], &modes[1]);
    let u2 = minus(&modes[0], &modes[1]);
    let (right, left) = modes[2..]
        .chunks_exact(2)
        .map(|p| (plus(&p[0], &p[1]), minus(&p[0], &p[1])))
        .unzip();

    Ok(ModeBasis {
        lambda: hartree.lambda,
        eigenvalues,
        modes,
        parities,
        u1,
        u2,
        right,
        left,
        mean_field_potential: veff,
        warnings,
    })
}

fn orient_by_sum(u: GridFn) -> GridFn {
    if u.values().iter().sum::<f64>() < 0.0 {
        u.map(|x| -x)
    } else {
        u
    }
}

/// Positive at the largest-magnitude point with `x > 0`.
fn orient_by_peak(u: GridFn, center: usize) -> GridFn {
    let peak = u.values()[center + 1..]
        .iter()
        .fold(0.0_f64, |best, &x| if abs(x) > abs(best) { x } else { best });
    if peak < 0.0 {
        u.map(|x| -x)
    } else {
        u
    }
}

/// Positive overlap with `partner` on `x > 0`, so `partner + u` lives on the
/// right.
fn orient_by_overlap(u: GridFn, partner: &GridFn, center: usize) -> GridFn {
    let overlap: f64 = u.values()[center + 1..]
        .iter()
        .zip(&partner.values()[center + 1..])
        .map(|(a, b)| a * b)
        .sum();
    if overlap < 0.0 {
        u.map(|x| -x)
    } else {
        u
    }
}

/// `∫_{x>0} |u|²`, with half weight on `x = 0`.
pub fn right_mass(grid: &Grid, u: &GridFn) -> f64 {
    grid.points()
        .iter()
        .zip(u.values())
        .enumerate()
        .map(|(i, (&x, &v))| {
            let w = grid.weight(i) * v * v;
            if x > 0.0 {
                w
            } else if x == 0.0 {
                0.5 * w
            } else {
                0.0
            }
        })
        .sum()
}

/// `exp(-(2/(1+s/2)) (L/2)^{1+s/2})`.
pub fn tunneling_parameter(exponent: f64, separation: f64) -> f64 {
    let p = 1.0 + 0.5 * exponent;
    exp(-(2.0 / p) * powf(0.5 * separation, p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunnelingReport {
    pub tunneling: f64,
    /// `μ_- - μ_+`.
    pub gap: f64,
    pub gap_over_tunneling: f64,
    /// `μ_3 - μ_-`.
    pub excited_gap: f64,
}

pub fn gap_report(basis: &ModeBasis, spec: &PotentialSpec) -> Result<TunnelingReport> {
    if basis.len() < 3 {
        return Err(Error::InsufficientModes {
            cutoff: 0,
            needed: 3,
            available: basis.len(),
        });
    }
    let gap = basis.eigenvalues[1] - basis.eigenvalues[0];
    if !(gap > 0.0) {
        return Err(Error::OrderingViolated { gap });
    }
    let tunneling = tunneling_parameter(spec.exponent, spec.separation);
    Ok(TunnelingReport {
        tunneling,
        gap,
        gap_over_tunneling: gap / tunneling,
        excited_gap: basis.eigenvalues[2] - basis.eigenvalues[1],
    })
}
