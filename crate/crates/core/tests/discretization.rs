use proptest::prelude::*;
use twowell_core::grid::{convolve_density, interaction_kernel, Grid, KernelSpec};
use twowell_core::meanfield::{mean_field_spectrum, minimize_hartree, right_mass};
use twowell_core::grid::{double_well_potential, PotentialSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn convolution_is_self_adjoint(
        a in prop::collection::vec(-1.0f64..1.0, 6),
        b in prop::collection::vec(-1.0f64..1.0, 6),
        range in 0.3f64..2.0,
    ) {
        let grid = Grid::symmetric(6.0, 201).unwrap();
        let kernel = interaction_kernel(&grid, &KernelSpec::triangle(1.0, range).unwrap()).unwrap();
        let bump = |c: &[f64]| grid.sample(|x| c.iter().enumerate().map(|(k, ck)| ck * (-(x - k as f64 + 2.5).powi(2)).exp()).sum());
        let (f, g) = (bump(&a), bump(&b));
        let lhs = f.inner(&convolve_density(&grid, &kernel, &g).unwrap());
        let rhs = g.inner(&convolve_density(&grid, &kernel, &f).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        // positive-type kernel
        let self_energy = f.inner(&convolve_density(&grid, &kernel, &f).unwrap());
        prop_assert!(self_energy >= -1e-12);
    }

    #[test]
    fn grid_is_symmetric(half in 1.0f64..20.0, k in 10usize..500) {
        let grid = Grid::symmetric(half, 2 * k + 1).unwrap();
        let x = grid.points();
        for i in 0..x.len() {
            prop_assert_eq!(x[i], -x[x.len() - 1 - i]);
        }
        let total: f64 = (0..x.len()).map(|i| grid.weight(i)).sum();
        prop_assert!((total - 2.0 * half).abs() <= 1e-12 * half);
    }
}

#[test]
fn hartree_minimizer_is_symmetric_and_split() {
    for l in [4.0, 8.0] {
        let grid = Grid::symmetric(Grid::default_half_width(l, 1.0), 1025).unwrap();
        let v = double_well_potential(&grid, &PotentialSpec::new(2.0, l).unwrap());
        let k = interaction_kernel(&grid, &KernelSpec::default()).unwrap();
        let r = minimize_hartree(&grid, &v, &k, 0.1, 1e-9).unwrap();
        assert!(r.u_plus.max_abs_diff(&r.u_plus.reflect()) <= 1e-12);
        assert!((r.u_plus.norm() - 1.0).abs() <= 1e-12);
        assert!((right_mass(&grid, &r.u_plus) - 0.5).abs() <= 1e-10);
        for w in r.energy_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-13 * w[0].abs());
        }
    }
}

#[test]
fn chemical_potential_converges_quadratically() {
    let mu = |n: usize| {
        let grid = Grid::symmetric(Grid::default_half_width(6.0, 1.0), n).unwrap();
        let v = double_well_potential(&grid, &PotentialSpec::new(2.0, 6.0).unwrap());
        let k = interaction_kernel(&grid, &KernelSpec::default()).unwrap();
        let r = minimize_hartree(&grid, &v, &k, 0.1, 1e-11).unwrap();
        mean_field_spectrum(&grid, &v, &k, &r, 4).unwrap().mu_plus()
    };
    let (a, b, c) = (mu(513), mu(1025), mu(2049));
    let ratio = (a - b) / (b - c);
    assert!((ratio - 4.0).abs() < 0.5, "{a} {b} {c}: ratio {ratio}");
}
