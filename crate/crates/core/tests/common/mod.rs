#![allow(dead_code)]

use twowell_core::grid::{double_well_potential, interaction_kernel, Grid, GridFn, KernelSpec, PotentialSpec};
use twowell_core::meanfield::{mean_field_spectrum, minimize_hartree, HartreeResult, ModeBasis};

pub struct Physical {
    pub grid: Grid,
    pub potential: GridFn,
    pub kernel: GridFn,
    pub hartree: HartreeResult,
    pub basis: ModeBasis,
}

/// `s = 2` well with the default triangle kernel.
pub fn physical(separation: f64, lambda: f64, n: usize, modes: usize) -> Physical {
    let grid = Grid::symmetric(Grid::default_half_width(separation, 1.0), n).unwrap();
    let potential = double_well_potential(&grid, &PotentialSpec::new(2.0, separation).unwrap());
    let kernel = interaction_kernel(&grid, &KernelSpec::default()).unwrap();
    let hartree = minimize_hartree(&grid, &potential, &kernel, lambda, 1e-10).unwrap();
    let basis = mean_field_spectrum(&grid, &potential, &kernel, &hartree, modes).unwrap();
    Physical {
        grid,
        potential,
        kernel,
        hartree,
        basis,
    }
}
