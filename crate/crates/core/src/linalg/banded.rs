//! Extremal eigenpair of a symmetric banded matrix: inertia bisection on a
//! banded LDLᵀ factorisation, then shifted inverse iteration with a shift just
//! below the located eigenvalue so every solve is positive definite.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, dot, sqrt};
use crate::{Error, Result};

const BISECTION_STEPS: usize = 200;
const MAX_INVERSE_ITERATIONS: usize = 500;

/// Symmetric banded matrix stored by diagonals: `bands[j][i] = A[i][i + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymBanded {
    n: usize,
    bands: Vec<Vec<f64>>,
}

/// Lowest eigenpair with its residual and the spacing to the next level.
#[derive(Clone, Debug)]
pub struct BandedEigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Number of eigenvalues within the degeneracy window of `value`.
    pub multiplicity: usize,
}

impl SymBanded {
    /// `bands[0]` is the diagonal, `bands[j]` the `j`-th superdiagonal
    /// (length `n - j`).
    pub fn new(bands: Vec<Vec<f64>>) -> Self {
        assert!(!bands.is_empty() && !bands[0].is_empty(), "empty banded matrix");
        let n = bands[0].len();
        for (j, b) in bands.iter().enumerate() {
            assert_eq!(b.len(), n.saturating_sub(j), "band {j} has wrong length");
        }
        Self { n, bands }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let off = hi - lo;
        if off > self.bandwidth() {
            0.0
        } else {
            self.bands[off][lo]
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.bands[0].iter().zip(x).map(|(d, v)| d * v).collect();
        for (j, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &a) in band.iter().enumerate() {
                y[i] += a * x[i + j];
                y[i + j] += a * x[i];
            }
        }
        y
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut r = 0.0;
            for j in 1..self.bands.len() {
                if i + j < self.n {
                    r += abs(self.bands[j][i]);
                }
                if i >= j {
                    r += abs(self.bands[j][i - j]);
                }
            }
            lo = lo.min(self.bands[0][i] - r);
            hi = hi.max(self.bands[0][i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        abs(lo).max(abs(hi)).max(f64::MIN_POSITIVE)
    }

    /// Upper-band working copy of `A - shift I`: `w[i][j] = A[i][i + j]`.
    fn shifted_rows(&self, shift: f64) -> Vec<Vec<f64>> {
        let k = self.bandwidth();
        (0..self.n)
            .map(|i| {
                (0..=k)
                    .map(|j| {
                        if i + j >= self.n {
                            0.0
                        } else if j == 0 {
                            self.bands[0][i] - shift
                        } else {
                            self.bands[j][i]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// In-place LDLᵀ on the upper band; returns the pivots.
    fn ldlt(&self, shift: f64, pivmin: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.n;
        let k = self.bandwidth();
        let mut w = self.shifted_rows(shift);
        let mut pivots = vec![0.0; n];
        for i in 0..n {
            let mut p = w[i][0];
            if abs(p) < pivmin {
                p = -pivmin;
            }
            pivots[i] = p;
            for r in 1..=k {
                if i + r >= n {
                    break;
                }
                let f = w[i][r] / p;
                for c in r..=k {
                    if i + c >= n {
                        break;
                    }
                    w[i + r][c - r] -= f * w[i][c];
                }
            }
        }
        (w, pivots)
    }

    /// Number of eigenvalues strictly below `x` (Sylvester inertia).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::EPSILON * self.scale() * 1e-3;
        let (_, pivots) = self.ldlt(x, pivmin);
        pivots.iter().filter(|p| **p < 0.0).count()
    }

    fn kth_eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 4.0 * f64::EPSILON * self.scale();
        lo -= pad;
        hi += pad;
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * abs(lo).max(abs(hi)) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(A - shift I) x = b` assuming the shifted matrix is positive
    /// definite.
    fn solve_spd(&self, factor: &(Vec<Vec<f64>>, Vec<f64>), b: &[f64]) -> Vec<f64> {
        let (w, pivots) = factor;
        let n = self.n;
        let k = self.bandwidth();
        let mut y = b.to_vec();
        // forward: L y = b with L[i+r][i] = w[i][r] / p_i
        for i in 0..n {
            for r in 1..=k {
                if i + r >= n {
                    break;
                }
                y[i + r] -= w[i][r] / pivots[i] * y[i];
            }
        }
        for i in 0..n {
            y[i] /= pivots[i];
        }
        for i in (0..n).rev() {
            for r in 1..=k {
                if i + r >= n {
                    break;
                }
                y[i] -= w[i][r] / pivots[i] * y[i + r];
            }
        }
        y
    }
}

/// Lowest eigenpair of `a` to a residual of `tol · ‖a‖`. `start` seeds the
/// inverse iteration; a start vector that is symmetric under a symmetry of
/// `a` keeps the iterate in that symmetry sector.
pub fn lowest_banded_eigenpair(a: &SymBanded, tol: f64, start: &[f64]) -> Result<BandedEigenpair> {
    let n = a.len();
    assert_eq!(start.len(), n);
    let scale = a.scale();
    let lambda0 = a.kth_eigenvalue(0);
    let window = 1e-9 * scale.max(1.0);
    let multiplicity = a.count_below(lambda0 + window);

    let eta = (1e3 * f64::EPSILON * scale).max(1e-9 * scale);
    let shift = lambda0 - eta;
    let factor = a.ldlt(shift, 0.0);
    if factor.1.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::EigenNoConvergence);
    }

    let mut x = start.to_vec();
    let norm = sqrt(dot(&x, &x));
    if !(norm > 0.0) {
        return Err(Error::EigenNoConvergence);
    }
    x.iter_mut().for_each(|v| *v /= norm);

    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut y = a.solve_spd(&factor, &x);
        let norm = sqrt(dot(&y, &y));
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::EigenNoConvergence);
        }
        y.iter_mut().for_each(|v| *v /= norm);
        x = y;
        let ax = a.matvec(&x);
        let value = dot(&x, &ax);
        let residual = sqrt(
            ax.iter()
                .zip(&x)
                .map(|(p, q)| (p - value * q) * (p - value * q))
                .sum::<f64>(),
        );
        if residual <= tol * scale {
            return Ok(BandedEigenpair {
                value,
                vector: x,
                residual,
                multiplicity,
            });
        }
    }
    Err(Error::EigenNoConvergence)
}
