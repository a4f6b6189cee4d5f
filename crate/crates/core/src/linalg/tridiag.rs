//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
//! eigenvalues and pivoted inverse iteration for the eigenvectors. Used for
//! the finite-difference one-body operators, where only the lowest few dozen
//! of several thousand eigenpairs are needed.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, dot, sqrt};
use crate::{Error, Result};

const BISECTION_STEPS: usize = 200;
const INVERSE_ITERATIONS: usize = 4;

/// Symmetric tridiagonal matrix with `diag.len() == off.len() + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty tridiagonal matrix");
        assert_eq!(diag.len(), off.len() + 1, "off-diagonal length");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { abs(self.off[i - 1]) } else { 0.0 }
                + if i + 1 < n { abs(self.off[i]) } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        abs(lo).max(abs(hi)).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::EPSILON * self.norm_bound() * 1e-3;
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if abs(q) < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            if abs(q) < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * self.norm_bound() * 4.0;
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

    /// The `count` lowest eigenpairs with unit-norm (Euclidean) eigenvectors.
    pub fn lowest_eigenpairs(&self, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        let count = count.min(self.len());
        let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
        for k in 0..count {
            let value = self.eigenvalue(k);
            let vector = self.inverse_iteration(value, k as u64, &out)?;
            out.push((value, vector));
        }
        Ok(out)
    }

    fn inverse_iteration(
        &self,
        shift: f64,
        seed: u64,
        previous: &[(f64, Vec<f64>)],
    ) -> Result<Vec<f64>> {
        let n = self.len();
        let lu = PivotedLu::factor(self, shift);
        let mut x = start_vector(n, seed);
        normalize(&mut x)?;
        let tol = 64.0 * f64::EPSILON * self.norm_bound();
        for _ in 0..INVERSE_ITERATIONS {
            let mut y = lu.solve(&x);
            for (_, p) in previous {
                let c = dot(&y, p);
                for (yi, pi) in y.iter_mut().zip(p) {
                    *yi -= c * pi;
                }
            }
            normalize(&mut y)?;
            x = y;
            let ax = self.matvec(&x);
            let res = ax
                .iter()
                .zip(&x)
                .map(|(a, v)| (a - shift * v) * (a - shift * v))
                .sum::<f64>();
            if sqrt(res) <= tol * sqrt(n as f64) {
                break;
            }
        }
        Ok(x)
    }
}

fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    // xorshift64*; any vector with components along every eigenvector works
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ seed.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            let r = state.wrapping_mul(0x2545_F491_4F6C_DD1D);
            0.5 + (r >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

fn normalize(x: &mut [f64]) -> Result<()> {
    let norm = sqrt(dot(x, x));
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::EigenNoConvergence);
    }
    for v in x.iter_mut() {
        *v /= norm;
    }
    Ok(())
}

/// LU factorisation of `T - shift I` with partial pivoting (the upper factor
/// gains a second superdiagonal).
struct PivotedLu {
    diag: Vec<f64>,
    sup1: Vec<f64>,
    sup2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.len();
        let tiny = f64::EPSILON * t.norm_bound();
        let mut a: Vec<f64> = t.diag.iter().map(|d| d - shift).collect();
        let mut b = t.off.clone();
        let mut c = t.off.clone();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if abs(a[i]) >= abs(c[i]) {
                if a[i] == 0.0 {
                    a[i] = tiny;
                }
                let f = c[i] / a[i];
                c[i] = f;
                a[i + 1] -= f * b[i];
            } else {
                let f = a[i] / c[i];
                a[i] = c[i];
                let old = a[i + 1];
                a[i + 1] = b[i] - f * old;
                b[i] = old;
                if i + 2 < n {
                    u2[i] = b[i + 1];
                    b[i + 1] = -f * u2[i];
                }
                c[i] = f;
                swapped[i] = true;
            }
        }
        if a[n - 1] == 0.0 {
            a[n - 1] = tiny;
        }
        Self {
            diag: a,
            sup1: b,
            sup2: u2,
            mult: c,
            swapped,
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut y = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.mult[i] * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= self.sup1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.sup2[i] * x[i + 2];
            }
            x[i] = s / self.diag[i];
        }
        x
    }
}

/// Thomas algorithm for a strictly diagonally dominant symmetric tridiagonal
/// system.
pub fn solve_diagonally_dominant(t: &SymTridiagonal, rhs: &[f64]) -> Vec<f64> {
    let n = t.len();
    assert_eq!(rhs.len(), n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = t.diag[0];
    d[0] = rhs[0] / denom;
    for i in 1..n {
        c[i - 1] = t.off[i - 1] / denom;
        denom = t.diag[i] - t.off[i - 1] * c[i - 1];
        d[i] = (rhs[i] - t.off[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{symmetric_eigen, Matrix};

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn bisection_matches_closed_form() {
        let n = 50;
        let t = laplacian(n);
        for k in 0..10 {
            let exact = 2.0
                - 2.0 * libm::cos((k + 1) as f64 * core::f64::consts::PI / (n + 1) as f64);
            assert!((t.eigenvalue(k) - exact).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn eigenpairs_agree_with_dense_solver() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * (i as f64 - 20.0).powi(2)).collect();
        let t = SymTridiagonal::new(diag.clone(), vec![-1.0; n - 1]);
        let dense = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let eig = symmetric_eigen(&dense).unwrap();
        let pairs = t.lowest_eigenpairs(8).unwrap();
        for (k, (value, vector)) in pairs.iter().enumerate() {
            assert!((value - eig.values[k]).abs() < 1e-12);
            let overlap = dot(vector, &eig.vector(k)).abs();
            assert!((overlap - 1.0).abs() < 1e-10, "k = {k} overlap {overlap}");
        }
        for i in 0..pairs.len() {
            for j in 0..i {
                assert!(dot(&pairs[i].1, &pairs[j].1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn count_below_brackets_spectrum() {
        let t = laplacian(10);
        assert_eq!(t.count_below(-0.1), 0);
        assert_eq!(t.count_below(4.1), 10);
    }

    #[test]
    fn thomas_solves_dominant_system() {
        let t = SymTridiagonal::new(vec![4.0, 4.0, 4.0], vec![1.0, 1.0]);
        let x = solve_diagonally_dominant(&t, &[5.0, 6.0, 5.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}
