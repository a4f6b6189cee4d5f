use alloc::vec;
use alloc::vec::Vec;

use super::FockMatrix;
use crate::math::{exp, floor, sqrt};
use crate::{Error, Result};

/// How the gaussian width `σ²` follows from `N` and the gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaRule {
    /// `max(1, √gap · N)`.
    SqrtGapN,
    /// `max(1, √N)`.
    SqrtN,
    Fixed(f64),
}

impl SigmaRule {
    pub fn sigma_sq(&self, particles: usize, gap: f64) -> f64 {
        let n = particles as f64;
        match *self {
            SigmaRule::SqrtGapN => (sqrt(gap.max(0.0)) * n).max(1.0),
            SigmaRule::SqrtN => sqrt(n).max(1.0),
            SigmaRule::Fixed(v) => v,
        }
    }
}

/// Gaussian superposition of imbalances `d = n1 - n2` with
/// `c_d ∝ exp(-d²/4σ²)` on `|d| ≤ σ²`, `N + d` even, and `Σ c_d² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTrial {
    pub particles: usize,
    pub sigma_sq: f64,
    pub imbalances: Vec<i64>,
    pub weights: Vec<f64>,
    /// `Σ_d exp(-d²/2σ²)`, the square of the normalisation factor.
    pub z_sq: f64,
}

pub fn gaussian_trial_state(particles: usize, sigma_sq: f64) -> Result<GaussianTrial> {
    if !(sigma_sq >= 1.0) {
        return Err(Error::EmptySupport { sigma_sq });
    }
    let n = particles as i64;
    let reach = (floor(sigma_sq) as i64).min(n);
    let imbalances: Vec<i64> = (-reach..=reach).filter(|d| (n + d) % 2 == 0).collect();
    if imbalances.is_empty() {
        return Err(Error::EmptySupport { sigma_sq });
    }
    let raw: Vec<f64> = imbalances
        .iter()
        .map(|&d| exp(-((d * d) as f64) / (4.0 * sigma_sq)))
        .collect();
    let z_sq: f64 = raw.iter().map(|c| c * c).sum();
    let z = sqrt(z_sq);
    Ok(GaussianTrial {
        particles,
        sigma_sq,
        imbalances,
        weights: raw.iter().map(|c| c / z).collect(),
        z_sq,
    })
}

impl GaussianTrial {
    /// Coefficients over `|k⟩`, `k = (N + d)/2`.
    pub fn to_fock_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.particles + 1];
        for (&d, &c) in self.imbalances.iter().zip(&self.weights) {
            v[((self.particles as i64 + d) / 2) as usize] = c;
        }
        v
    }

    pub fn energy(&self, matrix: &FockMatrix) -> f64 {
        assert_eq!(matrix.particles(), self.particles);
        matrix.quadratic_form(&self.to_fock_vector())
    }

    /// `Σ d² c_d²`.
    pub fn mean_square_imbalance(&self) -> f64 {
        self.imbalances
            .iter()
            .zip(&self.weights)
            .map(|(&d, &c)| (d * d) as f64 * c * c)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_particles_sigma_four() {
        let t = gaussian_trial_state(4, 4.0).unwrap();
        assert_eq!(t.imbalances, vec![-4, -2, 0, 2, 4]);
        let z = 1.0 + 2.0 * libm::exp(-0.5) + 2.0 * libm::exp(-2.0);
        assert!((t.weights[2] - 1.0 / z.sqrt()).abs() < 1e-15);
        assert!((t.weights[2] - 0.6345).abs() < 1e-4);
        let msq = (8.0 * libm::exp(-0.5) + 32.0 * libm::exp(-2.0)) / z;
        assert!((t.mean_square_imbalance() - msq).abs() < 1e-13);
        assert!((t.mean_square_imbalance() - 3.697).abs() < 1e-3);
    }

    #[test]
    fn unit_sigma_is_single_weight() {
        let t = gaussian_trial_state(6, 1.0).unwrap();
        assert_eq!(t.imbalances, vec![0]);
        assert_eq!(t.weights, vec![1.0]);
        assert_eq!(t.mean_square_imbalance(), 0.0);
    }

    #[test]
    fn narrow_sigma_is_rejected() {
        let e = gaussian_trial_state(6, 0.5).unwrap_err();
        assert!(alloc::format!("{e}").contains("empty support"));
    }

    #[test]
    fn weights_are_even_and_normalised() {
        let t = gaussian_trial_state(51, 7.3).unwrap();
        let sum: f64 = t.weights.iter().map(|c| c * c).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let m = t.weights.len();
        for i in 0..m {
            assert_eq!(t.weights[i], t.weights[m - 1 - i]);
        }
    }

    #[test]
    fn sigma_rules() {
        assert_eq!(SigmaRule::SqrtGapN.sigma_sq(100, 1e-6), 1.0);
        assert!((SigmaRule::SqrtGapN.sigma_sq(100, 0.04) - 20.0).abs() < 1e-12);
        assert_eq!(SigmaRule::SqrtN.sigma_sq(100, 0.0), 10.0);
        assert_eq!(SigmaRule::Fixed(3.5).sigma_sq(100, 0.0), 3.5);
    }
}
