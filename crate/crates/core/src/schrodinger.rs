//! Finite-difference one-body operator `-d²/dx² + V` with Dirichlet ends and
//! its parity-resolved eigensolver.
//!
//! For a reflection-symmetric potential the operator splits into an even and
//! an odd block on the right half-grid. Solving the blocks separately keeps
//! near-degenerate tunneling doublets cleanly separated, since their members
//! never share a block.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{Grid, GridFn};
use crate::linalg::SymTridiagonal;
use core::f64::consts::SQRT_2;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Eigenpair of the one-body operator with an L²-normalised vector.
#[derive(Clone, Debug)]
pub struct Eigenmode {
    pub energy: f64,
    pub parity: Parity,
    pub vector: GridFn,
}

/// `∫ u' v'` in the forward-difference form matching the operator.
pub fn kinetic_form(u: &[f64], v: &[f64], h: f64) -> f64 {
    u.windows(2)
        .zip(v.windows(2))
        .map(|(a, b)| (a[1] - a[0]) * (b[1] - b[0]))
        .sum::<f64>()
        / h
}

/// `⟨u, (-d²/dx² + V) v⟩` for vectors vanishing at both ends.
pub fn energy_form(potential: &GridFn, u: &GridFn, v: &GridFn) -> f64 {
    let h = potential.spacing();
    let kinetic = kinetic_form(u.values(), v.values(), h);
    let pot: f64 = potential
        .values()
        .iter()
        .zip(u.values())
        .zip(v.values())
        .map(|((p, a), b)| p * a * b)
        .sum();
    kinetic + h * pot
}

/// `(-d²/dx² + V) u` at interior points, zero at the ends.
pub fn apply_operator(potential: &GridFn, u: &GridFn) -> GridFn {
    let h = potential.spacing();
    let inv_h2 = 1.0 / (h * h);
    let n = u.len();
    let (uv, pv) = (u.values(), potential.values());
    let mut out = u.map(|_| 0.0);
    let o = out.values_mut();
    for i in 1..n - 1 {
        o[i] = (2.0 * uv[i] - uv[i - 1] - uv[i + 1]) * inv_h2 + pv[i] * uv[i];
    }
    out
}

/// L² norm of `(-d²/dx² + V - energy) u`.
pub fn eigen_residual(potential: &GridFn, u: &GridFn, energy: f64) -> f64 {
    let hu = apply_operator(potential, u);
    hu.zip_map(u, |a, b| a - energy * b).norm()
}

/// The `count` lowest eigenmodes of `-d²/dx² + V` in one parity sector. The
/// potential must be even; only its right half is read.
pub fn sector_modes(grid: &Grid, potential: &GridFn, parity: Parity, count: usize) -> Result<Vec<Eigenmode>> {
    let c = grid.require_center()?;
    let n = grid.len();
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let v = potential.values();

    // even: unknowns u_c .. u_{n-2}; odd: u_{c+1} .. u_{n-2} with u_c = 0
    let first = match parity {
        Parity::Even => c,
        Parity::Odd => c + 1,
    };
    let size = (n - 1).saturating_sub(first);
    if size == 0 || count == 0 {
        return Ok(Vec::new());
    }
    let diag: Vec<f64> = (first..n - 1).map(|i| 2.0 * inv_h2 + v[i]).collect();
    let mut off = vec![-inv_h2; size - 1];
    if parity == Parity::Even && size > 1 {
        // symmetric scaling v_0 = u_c, v_k = √2 u_{c+k}
        off[0] = -SQRT_2 * inv_h2;
    }
    let block = SymTridiagonal::new(diag, off);
    let pairs = block.lowest_eigenpairs(count)?;

    let mut modes = Vec::with_capacity(pairs.len());
    for (_, w) in pairs {
        let mut full = vec![0.0; n];
        for (j, wj) in w.iter().enumerate() {
            let i = first + j;
            let value = if parity == Parity::Even && j == 0 { *wj } else { wj / SQRT_2 };
            full[i] = value;
            let mirror = n - 1 - i;
            if mirror != i {
                full[mirror] = match parity {
                    Parity::Even => value,
                    Parity::Odd => -value,
                };
            }
        }
        let mut vector = grid.from_values(full);
        let norm = vector.norm();
        vector = vector.map(|x| x / norm);
        let energy = energy_form(potential, &vector, &vector);
        modes.push(Eigenmode {
            energy,
            parity,
            vector,
        });
    }
    Ok(modes)
}

/// The `count` lowest eigenmodes across both parity sectors, sorted by energy.
pub fn lowest_modes(grid: &Grid, potential: &GridFn, count: usize) -> Result<Vec<Eigenmode>> {
    let per_sector = count / 2 + 1;
    let mut modes = sector_modes(grid, potential, Parity::Even, per_sector)?;
    modes.extend(sector_modes(grid, potential, Parity::Odd, per_sector)?);
    modes.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    modes.truncate(count);
    Ok(modes)
}

/// Normalises `u` to unit L² norm.
pub fn normalized(u: &GridFn) -> GridFn {
    let norm = u.norm();
    u.map(|x| x / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{double_well_potential, PotentialSpec};

    fn harmonic(n: usize) -> (Grid, GridFn) {
        let g = Grid::symmetric(10.0, n).unwrap();
        let v = double_well_potential(&g, &PotentialSpec::new(2.0, 0.0).unwrap());
        (g, v)
    }

    #[test]
    fn harmonic_levels_and_parities() {
        let (g, v) = harmonic(2001);
        let modes = lowest_modes(&g, &v, 6).unwrap();
        for (m, mode) in modes.iter().enumerate() {
            assert!((mode.energy - (2 * m + 1) as f64).abs() < 1e-3, "m = {m}: {}", mode.energy);
            let expected = if m % 2 == 0 { Parity::Even } else { Parity::Odd };
            assert_eq!(mode.parity, expected);
            assert!((mode.vector.norm() - 1.0).abs() < 1e-12);
            assert!(eigen_residual(&v, &mode.vector, mode.energy) < 1e-8);
        }
    }

    #[test]
    fn sector_modes_are_orthonormal() {
        let (g, v) = harmonic(801);
        let modes = lowest_modes(&g, &v, 8).unwrap();
        for i in 0..modes.len() {
            for j in 0..=i {
                let ip = modes[i].vector.inner(&modes[j].vector);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-10, "({i},{j}) {ip}");
            }
        }
    }

    #[test]
    fn energy_form_is_symmetric() {
        let (g, v) = harmonic(201);
        let a = g.sample(|x| libm::exp(-x * x) * (1.0 - x / 10.0) * (1.0 + x / 10.0));
        let b = g.sample(|x| x * libm::exp(-x * x / 2.0) * (1.0 - (x / 10.0) * (x / 10.0)));
        let ab = energy_form(&v, &a, &b);
        let ba = energy_form(&v, &b, &a);
        assert!((ab - ba).abs() < 1e-14);
    }

    #[test]
    fn tiny_grid_has_no_odd_sector() {
        let g = Grid::symmetric(1.0, 3).unwrap();
        let v = g.zeros();
        assert!(sector_modes(&g, &v, Parity::Odd, 2).unwrap().is_empty());
        assert_eq!(sector_modes(&g, &v, Parity::Even, 2).unwrap().len(), 1);
    }
}
