//! Two-mode reduction: coefficients in the localized basis `{u1, u2}`, the
//! projected Hamiltonian on occupation states `|k⟩ = |n1 = k, n2 = N - k⟩`,
//! the Bose-Hubbard dimer and gaussian trial states.

mod fock;
mod trial;

pub use fock::{fock_ground_state, FockMatrix, GroundStateRecord, DENSE_LIMIT};
pub use trial::{gaussian_trial_state, GaussianTrial, SigmaRule};

use crate::grid::{convolve_density, Grid, GridFn};
use crate::meanfield::ModeBasis;
use crate::math::sqrt;
use crate::schrodinger::energy_form;
use crate::{Error, Result};

/// `w[m][n][p][q] = ∬ u_m(x) u_n(y) w(x - y) u_p(x) u_q(y)`, 0-based.
pub type InteractionTensor = [[[[f64; 2]; 2]; 2]; 2];

/// `∬ a(x) b(y) w(x - y) c(x) d(y)`.
pub fn interaction_coefficient(
    grid: &Grid,
    kernel: &GridFn,
    a: &GridFn,
    b: &GridFn,
    c: &GridFn,
    d: &GridFn,
) -> Result<f64> {
    let conv = convolve_density(grid, kernel, &b.product(d))?;
    Ok(a.product(c).inner(&conv))
}

/// All sixteen coefficients over `{u1, u2}`, each by its own quadrature.
pub fn interaction_tensor(grid: &Grid, kernel: &GridFn, u1: &GridFn, u2: &GridFn) -> Result<InteractionTensor> {
    let modes = [u1, u2];
    let mut conv = [[None, None], [None, None]];
    for n in 0..2 {
        for q in 0..2 {
            conv[n][q] = Some(convolve_density(grid, kernel, &modes[n].product(modes[q]))?);
        }
    }
    let mut w = [[[[0.0; 2]; 2]; 2]; 2];
    for (m, wm) in w.iter_mut().enumerate() {
        for (n, wmn) in wm.iter_mut().enumerate() {
            for (p, wmnp) in wmn.iter_mut().enumerate() {
                let left = modes[m].product(modes[p]);
                for (q, entry) in wmnp.iter_mut().enumerate() {
                    *entry = left.inner(conv[n][q].as_ref().expect("filled above"));
                }
            }
        }
    }
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeConstants {
    pub e0: f64,
    pub e_nw: f64,
    pub mu: f64,
    pub u: f64,
    /// Hopping coefficient of the identity form with no excited particles.
    pub hop_constant: f64,
}

/// Constants of the identity form. `gap = μ_- - μ_+`.
pub fn two_mode_constants(
    particles: usize,
    lambda: f64,
    one_body: &[[f64; 2]; 2],
    w: &InteractionTensor,
    gap: f64,
) -> Result<TwoModeConstants> {
    if particles < 2 {
        return Err(Error::TooFewParticles { n: particles });
    }
    let n = particles as f64;
    let nm1 = n - 1.0;
    let h11 = one_body[0][0];
    let w1111 = w[0][0][0][0];
    let w1122 = w[0][0][1][1];
    let w1212 = w[0][1][0][1];
    Ok(TwoModeConstants {
        e0: n * h11 + lambda * n * n / (4.0 * nm1) * (2.0 * w1122 - w1212),
        e_nw: n
            * (lambda * n / (4.0 * nm1) * (w1111 - 4.0 * w1122 + 2.0 * w1212)
                - lambda / (2.0 * nm1) * (w1111 + w1122)),
        mu: h11 + 0.5 * lambda * w1111 + lambda * n / (2.0 * nm1) * (w1212 - 2.0 * w1122)
            - lambda / (2.0 * nm1) * w1122,
        u: 0.25 * (w1111 - w1212),
        hop_constant: -0.5 * gap + lambda * w1122 / nm1,
    })
}

/// Coefficients of the two-mode projection for `N` particles.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeModel {
    pub particles: usize,
    pub lambda: f64,
    /// Bare `-d²/dx² + V` in `{u1, u2}`.
    pub one_body: [[f64; 2]; 2],
    pub interaction: InteractionTensor,
    /// `μ_- - μ_+`.
    pub gap: f64,
    pub constants: TwoModeConstants,
}

impl TwoModeModel {
    pub fn from_coefficients(
        particles: usize,
        lambda: f64,
        one_body: [[f64; 2]; 2],
        interaction: InteractionTensor,
        gap: f64,
    ) -> Result<Self> {
        let constants = two_mode_constants(particles, lambda, &one_body, &interaction, gap)?;
        Ok(Self {
            particles,
            lambda,
            one_body,
            interaction,
            gap,
            constants,
        })
    }

    /// Coefficients from a mean-field basis; `potential` is the bare `V`.
    pub fn from_basis(
        grid: &Grid,
        potential: &GridFn,
        kernel: &GridFn,
        basis: &ModeBasis,
        particles: usize,
    ) -> Result<Self> {
        let modes = [&basis.u1, &basis.u2];
        let mut one_body = [[0.0; 2]; 2];
        for m in 0..2 {
            for n in 0..2 {
                one_body[m][n] = energy_form(potential, modes[m], modes[n]);
            }
        }
        let interaction = interaction_tensor(grid, kernel, &basis.u1, &basis.u2)?;
        Self::from_coefficients(
            particles,
            basis.lambda,
            one_body,
            interaction,
            basis.mu_minus() - basis.mu_plus(),
        )
    }

    /// Returns the same coefficients for a different particle number.
    pub fn with_particles(&self, particles: usize) -> Result<Self> {
        Self::from_coefficients(particles, self.lambda, self.one_body, self.interaction, self.gap)
    }

    pub fn w(&self, m: usize, n: usize, p: usize, q: usize) -> f64 {
        self.interaction[m][n][p][q]
    }
}

/// Reflection-symmetric tensor from its four independent classes, with the
/// index symmetries `w_mnpq = w_pnmq = w_mqpn = w_nmqp` of a real even kernel.
pub fn symmetric_interaction_tensor(w1111: f64, w1112: f64, w1122: f64, w1212: f64) -> InteractionTensor {
    let mut w = [[[[0.0; 2]; 2]; 2]; 2];
    for (i, slot) in w.iter_mut().flatten().flatten().flatten().enumerate() {
        let idx = [i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1];
        let seconds = idx.iter().sum::<usize>();
        *slot = match seconds {
            0 | 4 => w1111,
            1 | 3 => w1112,
            _ if idx[0] == idx[2] => w1212,
            _ => w1122,
        };
    }
    w
}

/// A model whose one-body block makes the identity form exact:
/// `h22 = h11` and `h12 = -gap/2 - λ(w1112 + w1122)`.
pub fn admissible_model(
    particles: usize,
    lambda: f64,
    gap: f64,
    h11: f64,
    interaction: InteractionTensor,
) -> Result<TwoModeModel> {
    let h12 = -0.5 * gap - lambda * (interaction[0][0][0][1] + interaction[0][0][1][1]);
    TwoModeModel::from_coefficients(particles, lambda, [[h11, h12], [h12, h11]], interaction, gap)
}

/// `a*_m a_n`-type words acting on `(n1, n2)`; returns the amplitude and the
/// new occupations, or `None` when a particle is removed from an empty mode.
fn apply_word(word: &[(bool, usize)], mut occ: [usize; 2]) -> Option<(f64, [usize; 2])> {
    let mut amp = 1.0;
    for &(create, mode) in word.iter().rev() {
        if create {
            occ[mode] += 1;
            amp *= sqrt(occ[mode] as f64);
        } else {
            if occ[mode] == 0 {
                return None;
            }
            amp *= sqrt(occ[mode] as f64);
            occ[mode] -= 1;
        }
    }
    Some((amp, occ))
}

/// `Σ h_mn a*_m a_n + λ/(2(N-1)) Σ w_mnpq a*_m a*_n a_p a_q` on `|k⟩`, by
/// ladder-operator action on each basis state.
pub fn assemble_two_mode_hamiltonian(model: &TwoModeModel) -> Result<FockMatrix> {
    let n = model.particles;
    if n < 2 {
        return Err(Error::TooFewParticles { n });
    }
    let coupling = model.lambda / (2.0 * (n as f64 - 1.0));
    let mut matrix = FockMatrix::zeros(n);
    for k in 0..=n {
        let occ = [k, n - k];
        for m in 0..2 {
            for q in 0..2 {
                let word = [(true, m), (false, q)];
                if let Some((amp, out)) = apply_word(&word, occ) {
                    matrix.add(out[0], k, model.one_body[m][q] * amp);
                }
            }
        }
        for m in 0..2 {
            for nn in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        let word = [(true, m), (true, nn), (false, p), (false, q)];
                        if let Some((amp, out)) = apply_word(&word, occ) {
                            matrix.add(out[0], k, coupling * model.interaction[m][nn][p][q] * amp);
                        }
                    }
                }
            }
        }
    }
    Ok(matrix)
}

/// The identity form with no excited particles:
/// `E0 + E_N^w + τ (a*1 a2 + a*2 a1) + λU/(N-1) (n1 - n2)² + 2λ w1122/(N-1) N_-²`
/// where `N_- = (N - a*1 a2 - a*2 a1)/2`.
pub fn assemble_identity_form(model: &TwoModeModel) -> Result<FockMatrix> {
    let n = model.particles;
    if n < 2 {
        return Err(Error::TooFewParticles { n });
    }
    let nf = n as f64;
    let c = &model.constants;
    let lam = model.lambda;
    let var_coeff = lam * c.u / (nf - 1.0);
    let minus_coeff = 2.0 * lam * model.w(0, 0, 1, 1) / (nf - 1.0);

    // hop|k⟩ = t_k |k+1⟩ + t_{k-1} |k-1⟩ with t_k = √((k+1)(N-k))
    let t = |k: usize| sqrt(((k + 1) * (n - k)) as f64);
    let mut m = FockMatrix::zeros(n);
    for k in 0..=n {
        let d = 2.0 * k as f64 - nf;
        // (hop²)_kk = t_k² + t_{k-1}²
        let up = if k < n { t(k) } else { 0.0 };
        let down = if k > 0 { t(k - 1) } else { 0.0 };
        let hop_sq_diag = up * up + down * down;
        let minus_sq_diag = 0.25 * (nf * nf + hop_sq_diag);
        m.add(k, k, c.e0 + c.e_nw + var_coeff * d * d + minus_coeff * minus_sq_diag);
        if k < n {
            let off = c.hop_constant * up - minus_coeff * 0.5 * nf * up;
            m.add(k + 1, k, off);
            m.add(k, k + 1, off);
        }
        if k + 1 < n {
            let off2 = minus_coeff * 0.25 * up * t(k + 1);
            m.add(k + 2, k, off2);
            m.add(k, k + 2, off2);
        }
    }
    Ok(m)
}

/// `(μ_+ - μ_-)/2 (a*1 a2 + a*2 a1) + λ w1111/(2(N-1)) (a*1 a*1 a1 a1 + a*2 a*2 a2 a2)`.
pub fn assemble_bose_hubbard(particles: usize, gap: f64, w1111: f64, lambda: f64) -> Result<FockMatrix> {
    let n = particles;
    if n < 2 {
        return Err(Error::TooFewParticles { n });
    }
    let onsite = lambda * w1111 / (2.0 * (n as f64 - 1.0));
    let mut m = FockMatrix::zeros(n);
    for k in 0..=n {
        let pairs = (k * k.saturating_sub(1) + (n - k) * (n - k).saturating_sub(1)) as f64;
        m.add(k, k, onsite * pairs);
        if k < n {
            let off = -0.5 * gap * sqrt(((k + 1) * (n - k)) as f64);
            m.add(k + 1, k, off);
            m.add(k, k + 1, off);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only_w1111(n: usize, h11: f64, w1111: f64) -> TwoModeModel {
        let mut w = [[[[0.0; 2]; 2]; 2]; 2];
        w[0][0][0][0] = w1111;
        w[1][1][1][1] = w1111;
        TwoModeModel::from_coefficients(n, 1.0, [[h11, 0.0], [0.0, h11]], w, 0.0).unwrap()
    }

    #[test]
    fn constants_examples() {
        let mut w = [[[[0.0; 2]; 2]; 2]; 2];
        w[0][0][0][0] = 1.0;
        let c = two_mode_constants(2, 1.0, &[[1.0, 0.0], [0.0, 1.0]], &w, 0.0).unwrap();
        assert!((c.e0 - 2.0).abs() < 1e-15);
        assert!(c.e_nw.abs() < 1e-15);
        assert!((c.mu - 1.5).abs() < 1e-15);
        assert!((c.u - 0.25).abs() < 1e-15);

        w[0][0][0][0] = 0.8;
        w[0][1][0][1] = 0.2;
        let c = two_mode_constants(10, 1.0, &[[0.0; 2]; 2], &w, 0.3).unwrap();
        assert!((c.u - 0.15).abs() < 1e-15);
        assert!((c.hop_constant + 0.15).abs() < 1e-15);

        assert!(matches!(
            two_mode_constants(1, 1.0, &[[0.0; 2]; 2], &w, 0.3),
            Err(Error::TooFewParticles { .. })
        ));
    }

    #[test]
    fn onsite_only_is_diagonal_closed_form() {
        let n = 7;
        let model = only_w1111(n, 0.7, 0.9);
        let m = assemble_two_mode_hamiltonian(&model).unwrap();
        assert_eq!(m.dim(), n + 1);
        let coupling = 1.0 / (2.0 * (n as f64 - 1.0)) * 0.9;
        for k in 0..=n {
            let pairs = (k * k.saturating_sub(1) + (n - k) * (n - k).saturating_sub(1)) as f64;
            let expected = n as f64 * 0.7 + coupling * pairs;
            assert!((m.entry(k, k) - expected).abs() < 1e-13);
            for j in 0..=n {
                if j != k {
                    assert_eq!(m.entry(k, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn pure_hop_identity_off_diagonal() {
        let w = [[[[0.0; 2]; 2]; 2]; 2];
        let model = TwoModeModel::from_coefficients(2, 0.0, [[0.0; 2]; 2], w, 0.4).unwrap();
        let m = assemble_identity_form(&model).unwrap();
        let expected = model.constants.hop_constant * core::f64::consts::SQRT_2;
        assert!((m.entry(0, 1) - expected).abs() < 1e-15);
        assert!((m.entry(1, 2) - expected).abs() < 1e-15);
    }

    #[test]
    fn bose_hubbard_examples() {
        let m = assemble_bose_hubbard(2, 0.6, 0.0, 1.0).unwrap();
        let g = fock_ground_state(&m).unwrap();
        assert!((g.energy + 0.6).abs() < 1e-14);

        let m = assemble_bose_hubbard(4, 0.0, 1.0, 1.0).unwrap();
        let g = fock_ground_state(&m).unwrap();
        assert!((g.energy - 2.0 / 3.0).abs() < 1e-14);
        assert!((g.vector[2] - 1.0).abs() < 1e-14);

        let m = assemble_bose_hubbard(5, 0.0, 1.0, 1.0).unwrap();
        let g = fock_ground_state(&m).unwrap();
        assert!(g.degenerate);
        assert!((g.vector[2] - g.vector[3]).abs() < 1e-14);
        assert!((g.vector[2] - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }
}
