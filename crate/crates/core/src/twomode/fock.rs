use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{lowest_banded_eigenpair, symmetric_eigen, Matrix, SymBanded};
use crate::math::{abs, sqrt};
use crate::{Error, Result};

/// Largest `N` diagonalised densely; larger problems use banded inverse
/// iteration.
pub const DENSE_LIMIT: usize = 2000;

const BANDED_TOL: f64 = 1e-10;

/// Pentadiagonal operator on `|k⟩`, `k = 0..=N`. `bands[2 + o][k]` holds
/// entry `(k + o, k)`; both triangles are stored so asymmetry is observable.
#[derive(Clone, Debug, PartialEq)]
pub struct FockMatrix {
    particles: usize,
    bands: [Vec<f64>; 5],
}

impl FockMatrix {
    pub fn zeros(particles: usize) -> Self {
        let n = particles + 1;
        Self {
            particles,
            bands: core::array::from_fn(|_| vec![0.0; n]),
        }
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.particles + 1
    }

    /// Adds `value` to entry `(row, col)`; `|row - col| ≤ 2`.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let o = row as isize - col as isize;
        assert!(o.abs() <= 2, "entry outside the pentadiagonal band");
        self.bands[(o + 2) as usize][col] += value;
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let o = row as isize - col as isize;
        if o.abs() > 2 || row >= self.dim() || col >= self.dim() {
            0.0
        } else {
            self.bands[(o + 2) as usize][col]
        }
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.dim(), self.dim(), |i, j| self.entry(i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.bands
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(abs(*v)))
    }

    pub fn max_abs_diff(&self, other: &FockMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.bands
            .iter()
            .flatten()
            .zip(other.bands.iter().flatten())
            .fold(0.0, |m: f64, (a, b)| m.max(abs(a - b)))
    }

    /// `max |A - Aᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for o in 1..=2 {
                if k + o < n {
                    worst = worst.max(abs(self.entry(k + o, k) - self.entry(k, k + o)));
                }
            }
        }
        worst
    }

    /// `max |A(k, j) - A(N-k, N-j)|`.
    pub fn swap_asymmetry(&self) -> f64 {
        let n = self.particles;
        let mut worst: f64 = 0.0;
        for k in 0..=n {
            for j in k.saturating_sub(2)..=(k + 2).min(n) {
                worst = worst.max(abs(self.entry(k, j) - self.entry(n - k, n - j)));
            }
        }
        worst
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for (col, &xc) in x.iter().enumerate() {
            for o in -2isize..=2 {
                let row = col as isize + o;
                if row >= 0 && (row as usize) < n {
                    y[row as usize] += self.bands[(o + 2) as usize][col] * xc;
                }
            }
        }
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        crate::math::dot(x, &self.matvec(x))
    }

    /// Upper-band storage of the symmetric part.
    pub fn to_banded(&self) -> SymBanded {
        let n = self.dim();
        let bands = (0..=2usize.min(n - 1))
            .map(|o| {
                (0..n - o)
                    .map(|k| 0.5 * (self.entry(k, k + o) + self.entry(k + o, k)))
                    .collect()
            })
            .collect();
        SymBanded::new(bands)
    }
}

/// Lowest eigenpair of a [`FockMatrix`] with imbalance statistics.
#[derive(Clone, Debug)]
pub struct GroundStateRecord {
    pub energy: f64,
    /// Unit norm; largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// `⟨(n1 - n2)²⟩`.
    pub variance: f64,
    /// `⟨n1 - n2⟩`.
    pub mean_imbalance: f64,
    /// The lowest level is degenerate; `vector` is the reflection-symmetric
    /// member of the ground space.
    pub degenerate: bool,
}

pub fn fock_ground_state(matrix: &FockMatrix) -> Result<GroundStateRecord> {
    let (energy, vector, degenerate) = if matrix.particles() <= DENSE_LIMIT {
        dense_ground(matrix)?
    } else {
        let start = vec![1.0; matrix.dim()];
        let pair = lowest_banded_eigenpair(&matrix.to_banded(), BANDED_TOL, &start)?;
        (pair.value, pair.vector, pair.multiplicity > 1)
    };
    Ok(record(matrix.particles(), energy, vector, degenerate))
}

fn dense_ground(matrix: &FockMatrix) -> Result<(f64, Vec<f64>, bool)> {
    let eig = symmetric_eigen(&matrix.to_dense())?;
    let scale = matrix.max_abs().max(f64::MIN_POSITIVE);
    let degenerate = eig.values.len() > 1 && eig.values[1] - eig.values[0] <= 1e-12 * scale;
    let v0 = eig.vector(0);
    if !degenerate {
        return Ok((eig.values[0], v0, false));
    }
    // symmetric member of the ground space: v + Rv with R: k -> N - k
    let sym = |v: &[f64]| -> Vec<f64> { v.iter().zip(v.iter().rev()).map(|(a, b)| a + b).collect() };
    let mut s = sym(&v0);
    if crate::math::dot(&s, &s) < 1e-12 {
        s = sym(&eig.vector(1));
    }
    let norm = sqrt(crate::math::dot(&s, &s));
    if !(norm > 0.0) {
        return Err(Error::EigenNoConvergence);
    }
    s.iter_mut().for_each(|x| *x /= norm);
    let energy = matrix.quadratic_form(&s);
    Ok((energy, s, true))
}

fn record(particles: usize, energy: f64, mut vector: Vec<f64>, degenerate: bool) -> GroundStateRecord {
    let peak = vector
        .iter()
        .fold(0.0_f64, |best, &x| if abs(x) > abs(best) { x } else { best });
    if peak < 0.0 {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
    let n = particles as f64;
    let (mut mean, mut variance) = (0.0, 0.0);
    for (k, v) in vector.iter().enumerate() {
        let d = 2.0 * k as f64 - n;
        mean += d * v * v;
        variance += d * d * v * v;
    }
    GroundStateRecord {
        energy,
        vector,
        variance,
        mean_imbalance: mean,
        degenerate,
    }
}
