//! Uniform reflection-symmetric grids, the double-well potential, the
//! interaction kernel, trapezoid quadrature and direct-sum convolution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{abs, cos, powf};
use crate::{Error, Result};

/// Uniform grid on `[x_min, x_max]` with `x_min = -x_max`.
///
/// Points are generated as `x_max · (2i - (n-1)) / (n-1)` so that
/// `points[i] == -points[n-1-i]` holds bit for bit and, for odd `n`, the
/// middle point is exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    h: f64,
    points: Vec<f64>,
}

/// Builds a symmetric grid with `n` points.
pub fn build_grid(x_min: f64, x_max: f64, n: usize) -> Result<Grid> {
    Grid::new(x_min, x_max, n)
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 3 || !(x_max > x_min) {
            return Err(Error::DegenerateGrid { n });
        }
        if x_min != -x_max {
            return Err(Error::AsymmetricDomain { x_min, x_max });
        }
        let m = (n - 1) as f64;
        let points = (0..n)
            .map(|i| x_max * (2.0 * i as f64 - m) / m)
            .collect();
        Ok(Self {
            x_min,
            x_max,
            n,
            h: (x_max - x_min) / m,
            points,
        })
    }

    /// Grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Default half-width for a double well: `L/2 + max(8, 3R)`.
    pub fn default_half_width(separation: f64, kernel_range: f64) -> f64 {
        0.5 * separation + 8.0_f64.max(3.0 * kernel_range)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Index of the point `x = 0`, if the grid has one.
    pub fn center(&self) -> Option<usize> {
        (self.n % 2 == 1).then_some(self.n / 2)
    }

    pub fn require_center(&self) -> Result<usize> {
        self.center().ok_or(Error::NoCenterPoint { n: self.n })
    }

    /// Trapezoid weight of point `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.h
        } else {
            self.h
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFn {
        GridFn {
            x_min: self.x_min,
            h: self.h,
            values: self.points.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zeros(&self) -> GridFn {
        self.from_values(vec![0.0; self.n])
    }

    pub fn from_values(&self, values: Vec<f64>) -> GridFn {
        assert_eq!(values.len(), self.n, "sample count does not match the grid");
        GridFn {
            x_min: self.x_min,
            h: self.h,
            values,
        }
    }

    fn check(&self, f: &GridFn) -> Result<()> {
        if f.values.len() != self.n || f.h != self.h || f.x_min != self.x_min {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// A real function sampled on a [`Grid`]: densities, orbitals, potentials and
/// kernels all use this type. Integrals use the trapezoid rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    x_min: f64,
    h: f64,
    values: Vec<f64>,
}

impl GridFn {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn same_grid(&self, other: &GridFn) -> bool {
        self.values.len() == other.values.len() && self.h == other.h && self.x_min == other.x_min
    }

    #[inline]
    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.values.len() {
            0.5 * self.h
        } else {
            self.h
        }
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum()
    }

    /// Trapezoid `∫ f g`.
    pub fn inner(&self, other: &GridFn) -> f64 {
        assert!(self.same_grid(other), "inner product across different grids");
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| self.weight(i) * a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        crate::math::sqrt(self.inner(self))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFn {
        GridFn {
            x_min: self.x_min,
            h: self.h,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &GridFn, f: impl Fn(f64, f64) -> f64) -> GridFn {
        assert!(self.same_grid(other), "pointwise operation across different grids");
        GridFn {
            x_min: self.x_min,
            h: self.h,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn product(&self, other: &GridFn) -> GridFn {
        self.zip_map(other, |a, b| a * b)
    }

    /// `x ↦ f(-x)`.
    pub fn reflect(&self) -> GridFn {
        let mut values = self.values.clone();
        values.reverse();
        GridFn {
            x_min: self.x_min,
            h: self.h,
            values,
        }
    }

    pub fn max_abs_diff(&self, other: &GridFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max(abs(a - b)))
    }
}

/// Double-well potential parameters: `V(x) = min(|x - L/2|^s, |x + L/2|^s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSpec {
    pub exponent: f64,
    pub separation: f64,
}

impl PotentialSpec {
    pub fn new(exponent: f64, separation: f64) -> Result<Self> {
        if !(exponent >= 2.0) || !exponent.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: "s must be ≥ 2",
            });
        }
        if !(separation >= 0.0) || !separation.is_finite() {
            return Err(Error::InvalidParameter {
                name: "L",
                reason: "L must be ≥ 0",
            });
        }
        Ok(Self {
            exponent,
            separation,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        let a = 0.5 * self.separation;
        powf(abs(x - a), self.exponent).min(powf(abs(x + a), self.exponent))
    }
}

pub fn double_well_potential(grid: &Grid, spec: &PotentialSpec) -> GridFn {
    grid.sample(|x| spec.value(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFamily {
    /// `a · max(0, 1 - |x|/R)`, whose Fourier transform is a Fejér kernel.
    Triangle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub amplitude: f64,
    pub range: f64,
    pub family: KernelFamily,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            range: 1.0,
            family: KernelFamily::Triangle,
        }
    }
}

impl KernelSpec {
    pub fn triangle(amplitude: f64, range: f64) -> Result<Self> {
        let spec = Self {
            amplitude,
            range,
            family: KernelFamily::Triangle,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.range > 0.0) || !self.range.is_finite() {
            return Err(Error::InvalidParameter {
                name: "R",
                reason: "kernel range must be > 0",
            });
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: "kernel amplitude must be ≥ 0",
            });
        }
        Ok(())
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.family {
            KernelFamily::Triangle => self.amplitude * (1.0 - abs(x) / self.range).max(0.0),
        }
    }
}

/// Samples the kernel on the grid and checks that its discrete Fourier
/// transform is nonnegative.
pub fn interaction_kernel(grid: &Grid, spec: &KernelSpec) -> Result<GridFn> {
    spec.validate()?;
    let kernel = grid.sample(|x| spec.value(x));
    let min_transform = kernel_min_transform(grid, &kernel)?;
    let peak = kernel.values.iter().fold(0.0_f64, |m, v| m.max(abs(*v)));
    if min_transform < -1e-12 * peak {
        return Err(Error::KernelNotPositiveDefinite { min_transform });
    }
    Ok(kernel)
}

/// Minimum over the `n` DFT frequencies of the centred kernel sequence.
pub fn kernel_min_transform(grid: &Grid, kernel: &GridFn) -> Result<f64> {
    grid.check(kernel)?;
    let c = grid.require_center()?;
    let offsets = &kernel.values[c..];
    let support = offsets.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    let n = grid.len();
    let mut min = f64::INFINITY;
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let mut s = offsets[0];
        for (k, w) in offsets.iter().enumerate().take(support + 1).skip(1) {
            s += 2.0 * w * cos(k as f64 * theta);
        }
        min = min.min(s);
    }
    Ok(min)
}

/// `(w∗ρ)(x_i) = Σ_j c_j w(x_i - x_j) ρ(x_j)` with trapezoid weights `c_j`,
/// summed directly over the kernel support.
pub fn convolve_density(grid: &Grid, kernel: &GridFn, rho: &GridFn) -> Result<GridFn> {
    grid.check(kernel)?;
    grid.check(rho)?;
    let c = grid.require_center()?;
    let n = grid.len();
    if kernel.values[0] != 0.0 || kernel.values[n - 1] != 0.0 {
        return Err(Error::KernelSupportTooWide);
    }
    let offsets = &kernel.values[c..];
    let m = offsets.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    let weighted: Vec<f64> = rho
        .values
        .iter()
        .enumerate()
        .map(|(j, r)| grid.weight(j) * r)
        .collect();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(m);
        let hi = (i + m).min(n - 1);
        let mut s = 0.0;
        for (j, wr) in weighted.iter().enumerate().take(hi + 1).skip(lo) {
            s += offsets[i.abs_diff(j)] * wr;
        }
        *o = s;
    }
    Ok(grid.from_values(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_grid_spacing_and_center() {
        let g = build_grid(-10.0, 10.0, 2001).unwrap();
        assert_eq!(g.len(), 2001);
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        assert_eq!(g.points()[1000], 0.0);
        assert_eq!(g.points()[0], -10.0);
        assert_eq!(g.points()[2000], 10.0);
        for i in 0..g.len() {
            assert_eq!(g.points()[i], -g.points()[g.len() - 1 - i]);
        }
    }

    #[test]
    fn build_grid_errors() {
        assert!(matches!(
            build_grid(-10.0, 9.0, 100),
            Err(Error::AsymmetricDomain { .. })
        ));
        assert!(matches!(
            build_grid(-1.0, 1.0, 2),
            Err(Error::DegenerateGrid { .. })
        ));
        let msg = alloc::format!("{}", build_grid(-10.0, 9.0, 100).unwrap_err());
        assert!(msg.contains("asymmetric domain"));
    }

    #[test]
    fn potential_examples() {
        let v = |s, l, x| PotentialSpec::new(s, l).unwrap().value(x);
        assert_eq!(v(2.0, 0.0, 1.0), 1.0);
        assert_eq!(v(2.0, 4.0, 0.0), 4.0);
        assert_eq!(v(3.0, 2.0, 1.0), 0.0);
        assert!(PotentialSpec::new(1.5, 1.0).is_err());
    }

    #[test]
    fn potential_is_even_on_grid() {
        let g = Grid::symmetric(7.0, 701).unwrap();
        let v = double_well_potential(&g, &PotentialSpec::new(2.5, 3.0).unwrap());
        assert_eq!(v, v.reflect());
    }

    #[test]
    fn kernel_examples() {
        let spec = KernelSpec::triangle(1.0, 1.0).unwrap();
        assert_eq!(spec.value(0.0), 1.0);
        assert_eq!(spec.value(1.5), 0.0);
        let g = Grid::symmetric(5.0, 1001).unwrap();
        let k = interaction_kernel(&g, &spec).unwrap();
        let peak = 1.0;
        assert!(kernel_min_transform(&g, &k).unwrap() >= -1e-12 * peak);
    }

    #[test]
    fn box_kernel_is_rejected() {
        // indicator kernel: its transform (a Dirichlet kernel) goes negative
        let g = Grid::symmetric(5.0, 101).unwrap();
        let k = g.sample(|x| if x.abs() <= 1.0 { 1.0 } else { 0.0 });
        assert!(kernel_min_transform(&g, &k).unwrap() < -0.1);
    }

    #[test]
    fn convolution_of_zero_is_zero() {
        let g = Grid::symmetric(5.0, 201).unwrap();
        let k = interaction_kernel(&g, &KernelSpec::default()).unwrap();
        let out = convolve_density(&g, &k, &g.zeros()).unwrap();
        assert!(out.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn convolution_preserves_mass_and_parity() {
        let g = Grid::symmetric(10.0, 2001).unwrap();
        let k = interaction_kernel(&g, &KernelSpec::default()).unwrap();
        let mut rho = g.sample(|x| libm::exp(-(x - 1.0) * (x - 1.0)) + libm::exp(-(x + 1.0) * (x + 1.0)));
        let mass = rho.integral();
        rho = rho.map(|v| v / mass);
        let conv = convolve_density(&g, &k, &rho).unwrap();
        let expected = k.integral() * rho.integral();
        assert!((conv.integral() - expected).abs() <= 1e-10 * expected);
        assert!(conv.max_abs_diff(&conv.reflect()) < 1e-15);
    }

    #[test]
    fn convolution_rejects_mismatched_grids() {
        let g1 = Grid::symmetric(5.0, 201).unwrap();
        let g2 = Grid::symmetric(5.0, 203).unwrap();
        let k = interaction_kernel(&g1, &KernelSpec::default()).unwrap();
        assert_eq!(
            convolve_density(&g1, &k, &g2.zeros()),
            Err(Error::GridMismatch)
        );
    }

    #[test]
    fn trapezoid_is_second_order() {
        // ∫_{-1}^{1} (x^2 + e^x) dx; the quadratic part is integrated exactly by
        // trapezoid up to O(h^2) as well, so use a curved integrand
        let exact = 2.0 / 3.0 + (libm::exp(1.0) - libm::exp(-1.0));
        let err = |n| {
            let g = Grid::symmetric(1.0, n).unwrap();
            (g.sample(|x| x * x + libm::exp(x)).integral() - exact).abs()
        };
        let ratio = err(101) / err(201);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }
}
