//! Brute-force many-body diagonalization on a truncated orbital set, and the
//! excitation map onto `(excited count, imbalance)` sectors.
//!
//! Everything here is assembled from occupation tuples and generic ladder
//! words, independently of the two-mode and Bogoliubov code it checks.

mod excitation;

pub use excitation::{
    excitation_decomposition, partial_isometry_defects, verify_conjugation, ConjugationRelation,
    ExcitationDecomposition, ExcitationSpace,
};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{convolve_density, Grid, GridFn};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::math::{exp, ln, powf, sqrt};
use crate::meanfield::ModeBasis;
use crate::schrodinger::energy_form;
use crate::{Error, Result};

/// Largest many-body dimension the oracle accepts.
pub const DIMENSION_CAP: usize = 20_000;

pub type Occupation = Vec<u16>;

/// All occupation tuples `(n_1, ..., n_M)` with `Σ n_i = N`, in increasing
/// lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFockBasis {
    modes: usize,
    particles: usize,
    states: Vec<Occupation>,
    index: BTreeMap<Occupation, usize>,
}

/// `C(n + k - 1, n)` bosonic configurations, saturating.
pub fn fock_dimension(modes: usize, particles: usize) -> usize {
    if modes == 0 {
        return usize::from(particles == 0);
    }
    let mut c: u128 = 1;
    for i in 1..=particles as u128 {
        c = c * (modes as u128 - 1 + i) / i;
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

impl TruncatedFockBasis {
    pub fn new(modes: usize, particles: usize) -> Result<Self> {
        Self::with_cap(modes, particles, DIMENSION_CAP)
    }

    pub fn with_cap(modes: usize, particles: usize, cap: usize) -> Result<Self> {
        let dimension = fock_dimension(modes, particles);
        if dimension > cap {
            return Err(Error::DimensionCap { dimension, cap });
        }
        let mut states = Vec::with_capacity(dimension);
        let mut current = vec![0u16; modes];
        fill(&mut states, &mut current, 0, particles);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self {
            modes,
            particles,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Occupation {
        &self.states[i]
    }

    pub fn index_of(&self, occ: &[u16]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Matrix of the ladder word on this basis (the particle number must be
    /// conserved by the word).
    pub fn word_matrix(&self, word: &[Ladder]) -> Matrix {
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (col, state) in self.states.iter().enumerate() {
            if let Some((amp, out)) = apply_ladder(word, state) {
                let row = self.index_of(&out).expect("word conserves particle number");
                m[(row, col)] += amp;
            }
        }
        m
    }
}

fn fill(out: &mut Vec<Occupation>, current: &mut Occupation, mode: usize, left: usize) {
    if mode + 1 == current.len() {
        current[mode] = left as u16;
        out.push(current.clone());
        return;
    }
    if current.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for n in 0..=left {
        current[mode] = n as u16;
        fill(out, current, mode + 1, left - n);
    }
}

/// One ladder operator on a 0-based mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Applies a word (rightmost operator first) to an occupation tuple.
pub fn apply_ladder(word: &[Ladder], state: &[u16]) -> Option<(f64, Occupation)> {
    let mut occ = state.to_vec();
    let mut amp = 1.0;
    for op in word.iter().rev() {
        match *op {
            Ladder::Create(m) => {
                occ[m] += 1;
                amp *= sqrt(f64::from(occ[m]));
            }
            Ladder::Annihilate(m) => {
                if occ[m] == 0 {
                    return None;
                }
                amp *= sqrt(f64::from(occ[m]));
                occ[m] -= 1;
            }
        }
    }
    Some((amp, occ))
}

/// Second-quantised coefficients over `M` orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleModel {
    pub modes: usize,
    pub lambda: f64,
    /// Bare `-d²/dx² + V` matrix elements.
    pub one_body: Matrix,
    /// `w[((m M + n) M + p) M + q] = ∬ u_m(x) u_n(y) w(x - y) u_p(x) u_q(y)`.
    pub interaction: Vec<f64>,
}

impl OracleModel {
    pub fn from_orbitals(
        grid: &Grid,
        potential: &GridFn,
        kernel: &GridFn,
        orbitals: &[GridFn],
        lambda: f64,
    ) -> Result<Self> {
        let m = orbitals.len();
        let one_body = Matrix::from_fn(m, m, |i, j| energy_form(potential, &orbitals[i], &orbitals[j]));
        let mut conv = Vec::with_capacity(m * m);
        for n in 0..m {
            for q in 0..m {
                conv.push(convolve_density(grid, kernel, &orbitals[n].product(&orbitals[q]))?);
            }
        }
        let mut interaction = vec![0.0; m * m * m * m];
        for a in 0..m {
            for p in 0..m {
                let left = orbitals[a].product(&orbitals[p]);
                for n in 0..m {
                    for q in 0..m {
                        interaction[((a * m + n) * m + p) * m + q] = left.inner(&conv[n * m + q]);
                    }
                }
            }
        }
        Ok(Self {
            modes: m,
            lambda,
            one_body,
            interaction,
        })
    }

    /// Orbitals `[u1, u2, u_3, ..., u_M]` with `u_3..` the mean-field
    /// eigenmodes above the ground doublet.
    pub fn from_basis(
        grid: &Grid,
        potential: &GridFn,
        kernel: &GridFn,
        basis: &ModeBasis,
        modes: usize,
    ) -> Result<Self> {
        if modes < 2 || modes > basis.len() {
            return Err(Error::ModeIndex {
                index: modes,
                available: basis.len(),
            });
        }
        let mut orbitals = Vec::with_capacity(modes);
        orbitals.push(basis.u1.clone());
        orbitals.push(basis.u2.clone());
        orbitals.extend(basis.modes[2..modes].iter().cloned());
        Self::from_orbitals(grid, potential, kernel, &orbitals, basis.lambda)
    }

    pub fn w(&self, m: usize, n: usize, p: usize, q: usize) -> f64 {
        let k = self.modes;
        self.interaction[((m * k + n) * k + p) * k + q]
    }
}

/// `Σ h_mn a*_m a_n + λ/(2(N-1)) Σ w_mnpq a*_m a*_n a_p a_q` as a dense
/// matrix, symmetrised after assembly.
pub fn assemble_full_hamiltonian(basis: &TruncatedFockBasis, model: &OracleModel) -> Result<Matrix> {
    let mut h = assemble_raw(basis, model)?;
    h.symmetrize();
    Ok(h)
}

fn assemble_raw(basis: &TruncatedFockBasis, model: &OracleModel) -> Result<Matrix> {
    let n = basis.particles();
    if n < 2 {
        return Err(Error::TooFewParticles { n });
    }
    assert_eq!(basis.modes(), model.modes, "model and basis disagree on mode count");
    let k = model.modes;
    let coupling = model.lambda / (2.0 * (n as f64 - 1.0));
    let dim = basis.dim();
    let mut h = Matrix::zeros(dim, dim);
    for (col, state) in basis.states().iter().enumerate() {
        for m in 0..k {
            for q in 0..k {
                let c = model.one_body[(m, q)];
                if c == 0.0 {
                    continue;
                }
                if let Some((amp, out)) = apply_ladder(&[Ladder::Create(m), Ladder::Annihilate(q)], state) {
                    let row = basis.index_of(&out).expect("number conserving");
                    h[(row, col)] += c * amp;
                }
            }
        }
        if coupling == 0.0 {
            continue;
        }
        for m in 0..k {
            for nn in 0..k {
                for p in 0..k {
                    for q in 0..k {
                        let c = model.w(m, nn, p, q);
                        if c == 0.0 {
                            continue;
                        }
                        let word = [
                            Ladder::Create(m),
                            Ladder::Create(nn),
                            Ladder::Annihilate(p),
                            Ladder::Annihilate(q),
                        ];
                        if let Some((amp, out)) = apply_ladder(&word, state) {
                            let row = basis.index_of(&out).expect("number conserving");
                            h[(row, col)] += coupling * c * amp;
                        }
                    }
                }
            }
        }
    }
    Ok(h)
}

/// Ground state of a full Hamiltonian with its occupation statistics.
#[derive(Clone, Debug)]
pub struct OracleGroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// `⟨N_⊥⟩`, particles outside `{u1, u2}`.
    pub excited: f64,
    /// `⟨N_⊥²⟩`.
    pub excited_sq: f64,
    /// `⟨(n1 - n2)²⟩`.
    pub variance: f64,
    /// `⟨n1 - n2⟩`.
    pub imbalance: f64,
    /// `⟨a*_- a_-⟩` with `a_- = (a1 - a2)/√2`.
    pub odd_occupation: f64,
}

pub fn oracle_ground_state(h: &Matrix, basis: &TruncatedFockBasis) -> Result<OracleGroundState> {
    assert_eq!(h.rows(), basis.dim());
    let eig = symmetric_eigen(h)?;
    let mut vector = eig.vector(0);
    let peak = vector
        .iter()
        .fold(0.0_f64, |b, &x| if x.abs() > b.abs() { x } else { b });
    if peak < 0.0 {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
    let (mut excited, mut excited_sq, mut variance, mut imbalance) = (0.0, 0.0, 0.0, 0.0);
    for (state, &c) in basis.states().iter().zip(&vector) {
        let p = c * c;
        let s: f64 = state[2..].iter().map(|&x| f64::from(x)).sum();
        let d = f64::from(state[0]) - f64::from(state[1]);
        excited += s * p;
        excited_sq += s * s * p;
        variance += d * d * p;
        imbalance += d * p;
    }
    let odd_occupation = odd_mode_occupation(basis, &vector);
    Ok(OracleGroundState {
        energy: eig.values[0],
        vector,
        excited,
        excited_sq,
        variance,
        imbalance,
        odd_occupation,
    })
}

/// `⟨a*_- a_-⟩ = ½(γ11 + γ22 - γ12 - γ21)` with `γ_mn = ⟨a*_m a_n⟩`.
pub fn odd_mode_occupation(basis: &TruncatedFockBasis, psi: &[f64]) -> f64 {
    let (mut diagonal, mut hop) = (0.0, 0.0);
    for (state, &c) in basis.states().iter().zip(psi) {
        diagonal += (f64::from(state[0]) + f64::from(state[1])) * c * c;
        // γ12 = γ21 for real ψ
        if let Some((amp, out)) = apply_ladder(&[Ladder::Create(0), Ladder::Annihilate(1)], state) {
            let row = basis.index_of(&out).expect("number conserving");
            hop += psi[row] * amp * c;
        }
    }
    0.5 * diagonal - hop
}

/// Coefficients of `φ^{⊗N}` with `φ = Σ c_m u_m`:
/// `√(N!/Π n_m!) Π c_m^{n_m}`.
pub fn product_state(basis: &TruncatedFockBasis, orbital: &[f64]) -> Vec<f64> {
    assert_eq!(orbital.len(), basis.modes());
    let ln_fact = |n: usize| -> f64 { (1..=n).map(|k| ln(k as f64)).sum() };
    let total = ln_fact(basis.particles());
    basis
        .states()
        .iter()
        .map(|occ| {
            let mut c = 1.0;
            let mut log_multinomial = total;
            for (&n, &a) in occ.iter().zip(orbital) {
                c *= powf(a, f64::from(n));
                log_multinomial -= ln_fact(usize::from(n));
            }
            c * exp(0.5 * log_multinomial)
        })
        .collect()
}
