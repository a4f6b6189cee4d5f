use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{apply_ladder, Ladder, Occupation, TruncatedFockBasis};
use crate::linalg::Matrix;
use crate::math::sqrt;
use crate::{Error, Result};

/// Largest excitation-space dimension handled by the dense conjugation check.
pub const EXCITATION_CAP: usize = 5000;

/// States `(s, d, tail)`: `tail` occupies the excited modes with `s`
/// particles, `s ≤ N`, and `|d| ≤ N + 2` so two shifts out of any admissible
/// sector stay inside the space.
#[derive(Clone, Debug)]
pub struct ExcitationSpace {
    particles: usize,
    tail_modes: usize,
    states: Vec<(usize, i64, Occupation)>,
    index: BTreeMap<(usize, i64, Occupation), usize>,
}

impl ExcitationSpace {
    pub fn new(fock: &TruncatedFockBasis) -> Result<Self> {
        let n = fock.particles();
        let tail_modes = fock.modes().saturating_sub(2);
        let reach = n as i64 + 2;
        let mut states = Vec::new();
        for s in 0..=n {
            if tail_modes == 0 && s > 0 {
                break;
            }
            let tails = TruncatedFockBasis::with_cap(tail_modes, s, usize::MAX)?;
            for d in -reach..=reach {
                for t in tails.states() {
                    states.push((s, d, t.clone()));
                }
            }
            if states.len() > EXCITATION_CAP {
                return Err(Error::DimensionCap {
                    dimension: states.len(),
                    cap: EXCITATION_CAP,
                });
            }
        }
        let index = states.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Ok(Self {
            particles: n,
            tail_modes,
            states,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn tail_modes(&self) -> usize {
        self.tail_modes
    }

    pub fn state(&self, i: usize) -> &(usize, i64, Occupation) {
        &self.states[i]
    }

    pub fn index_of(&self, s: usize, d: i64, tail: &[u16]) -> Option<usize> {
        self.index.get(&(s, d, tail.to_vec())).copied()
    }

    /// `0 ≤ s ≤ N`, `|d| ≤ N - s`, `N - s + d` even.
    pub fn is_admissible(&self, s: usize, d: i64) -> bool {
        let free = self.particles as i64 - s as i64;
        free >= 0 && d.abs() <= free && (free + d) % 2 == 0
    }

    /// `U_N` as a `dim E × dim F` matrix: `|n1, n2, tail⟩ ↦ |s, n1 - n2, tail⟩`.
    pub fn embedding(&self, fock: &TruncatedFockBasis) -> Matrix {
        let mut u = Matrix::zeros(self.dim(), fock.dim());
        for (col, occ) in fock.states().iter().enumerate() {
            let (s, d, tail) = split(occ);
            let row = self.index_of(s, d, &tail).expect("admissible sector is in range");
            u[(row, col)] = 1.0;
        }
        u
    }

    pub fn admissible_projector(&self) -> Matrix {
        let diag: Vec<f64> = self
            .states
            .iter()
            .map(|(s, d, _)| if self.is_admissible(*s, *d) { 1.0 } else { 0.0 })
            .collect();
        Matrix::diagonal(&diag)
    }

    /// `Θ^shift`, `(ΘΦ)_{s,d} = Φ_{s,d-1}`; states pushed past the window drop.
    pub fn theta(&self, shift: i64) -> Matrix {
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (col, (s, d, tail)) in self.states.iter().enumerate() {
            if let Some(row) = self.index_of(*s, d + shift, tail) {
                m[(row, col)] = 1.0;
            }
        }
        m
    }

    /// Diagonal operator `f(N_⊥, 𝔇)`.
    pub fn sector_function(&self, f: impl Fn(f64, f64) -> f64) -> Matrix {
        let diag: Vec<f64> = self.states.iter().map(|(s, d, _)| f(*s as f64, *d as f64)).collect();
        Matrix::diagonal(&diag)
    }

    /// Ladder word on the excited modes; mode `m` here is the full-basis
    /// index, so `m ≥ 2`.
    pub fn tail_word(&self, word: &[Ladder]) -> Matrix {
        let shifted: Vec<Ladder> = word
            .iter()
            .map(|op| match *op {
                Ladder::Create(m) => Ladder::Create(m - 2),
                Ladder::Annihilate(m) => Ladder::Annihilate(m - 2),
            })
            .collect();
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (col, (_, d, tail)) in self.states.iter().enumerate() {
            if let Some((amp, out)) = apply_ladder(&shifted, tail) {
                let count: usize = out.iter().map(|&x| usize::from(x)).sum();
                if let Some(row) = self.index_of(count, *d, &out) {
                    m[(row, col)] += amp;
                }
            }
        }
        m
    }
}

fn split(occ: &[u16]) -> (usize, i64, Occupation) {
    let tail: Occupation = occ[2..].to_vec();
    let s = tail.iter().map(|&x| usize::from(x)).sum();
    (s, i64::from(occ[0]) - i64::from(occ[1]), tail)
}

/// A Fock vector sorted into admissible `(s, d)` sectors, each a vector over
/// excited-mode tails in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationDecomposition {
    pub particles: usize,
    pub modes: usize,
    pub sectors: BTreeMap<(usize, i64), Vec<f64>>,
}

pub fn excitation_decomposition(fock: &TruncatedFockBasis, psi: &[f64]) -> Result<ExcitationDecomposition> {
    assert_eq!(psi.len(), fock.dim());
    let n = fock.particles();
    let tail_modes = fock.modes().saturating_sub(2);
    let mut tail_bases = Vec::with_capacity(n + 1);
    for s in 0..=n {
        tail_bases.push(TruncatedFockBasis::with_cap(tail_modes, s, usize::MAX)?);
    }
    let mut sectors = BTreeMap::new();
    for (occ, &c) in fock.states().iter().zip(psi) {
        let (s, d, tail) = split(occ);
        let tails = &tail_bases[s];
        let slot = sectors.entry((s, d)).or_insert_with(|| vec![0.0; tails.dim()]);
        slot[tails.index_of(&tail).expect("tail in basis")] = c;
    }
    Ok(ExcitationDecomposition {
        particles: n,
        modes: fock.modes(),
        sectors,
    })
}

impl ExcitationDecomposition {
    /// Inverse map back onto `fock`.
    pub fn to_fock(&self, fock: &TruncatedFockBasis) -> Result<Vec<f64>> {
        let mut psi = vec![0.0; fock.dim()];
        let tail_modes = fock.modes().saturating_sub(2);
        for (&(s, d), coeffs) in &self.sectors {
            let tails = TruncatedFockBasis::with_cap(tail_modes, s, usize::MAX)?;
            let free = self.particles as i64 - s as i64;
            let n1 = (free + d) / 2;
            for (tail, &c) in tails.states().iter().zip(coeffs) {
                let mut occ = vec![n1 as u16, (free - n1) as u16];
                occ.extend_from_slice(tail);
                psi[fock.index_of(&occ).expect("admissible sector")] = c;
            }
        }
        Ok(psi)
    }

    /// `Σ_d ||Φ_{s,d}||²` for each `s`.
    pub fn excitation_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.particles + 1];
        for (&(s, _), v) in &self.sectors {
            w[s] += v.iter().map(|x| x * x).sum::<f64>();
        }
        w
    }
}

/// Conjugation identities `U A U* = B` for quadratic operators `A`.
/// Mode indices are 0-based full-basis indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugationRelation {
    /// `a*_1 a_1 ↦ (N - N_⊥ + 𝔇)/2`.
    FirstNumber,
    /// `a*_1 a_2 ↦ Θ √((N-N_⊥+𝔇+1)/2) √((N-N_⊥-𝔇+1)/2) Θ`.
    Hopping,
    /// `a*_2 a_2 ↦ (N - N_⊥ - 𝔇)/2`.
    SecondNumber,
    /// `a*_1 a_m ↦ Θ √((N-N_⊥+𝔇+1)/2) a_m`.
    LiftFirst { mode: usize },
    /// `a*_2 a_m ↦ Θ⁻¹ √((N-N_⊥-𝔇+1)/2) a_m`.
    LiftSecond { mode: usize },
    /// `a*_m a_n ↦ a*_m a_n`.
    Excited { create: usize, annihilate: usize },
}

impl ConjugationRelation {
    /// Every relation available on `modes` orbitals.
    pub fn all(modes: usize) -> Vec<Self> {
        let mut out = vec![Self::FirstNumber, Self::Hopping, Self::SecondNumber];
        for m in 2..modes {
            out.push(Self::LiftFirst { mode: m });
            out.push(Self::LiftSecond { mode: m });
            for n in 2..modes {
                out.push(Self::Excited {
                    create: m,
                    annihilate: n,
                });
            }
        }
        out
    }

    fn fock_word(&self) -> [Ladder; 2] {
        use Ladder::{Annihilate, Create};
        match *self {
            Self::FirstNumber => [Create(0), Annihilate(0)],
            Self::Hopping => [Create(0), Annihilate(1)],
            Self::SecondNumber => [Create(1), Annihilate(1)],
            Self::LiftFirst { mode } => [Create(0), Annihilate(mode)],
            Self::LiftSecond { mode } => [Create(1), Annihilate(mode)],
            Self::Excited { create, annihilate } => [Create(create), Annihilate(annihilate)],
        }
    }

    fn image(&self, space: &ExcitationSpace) -> Matrix {
        let n = space.particles() as f64;
        // arguments can go negative only outside the admissible sectors
        let root = |x: f64| sqrt(x.max(0.0));
        match *self {
            Self::FirstNumber => space.sector_function(|s, d| (n - s + d) / 2.0),
            Self::SecondNumber => space.sector_function(|s, d| (n - s - d) / 2.0),
            Self::Hopping => {
                let f = space.sector_function(|s, d| root((n - s + d + 1.0) / 2.0) * root((n - s - d + 1.0) / 2.0));
                let theta = space.theta(1);
                theta.matmul(&f).matmul(&theta)
            }
            Self::LiftFirst { mode } => {
                let f = space.sector_function(|s, d| root((n - s + d + 1.0) / 2.0));
                space
                    .theta(1)
                    .matmul(&f)
                    .matmul(&space.tail_word(&[Ladder::Annihilate(mode)]))
            }
            Self::LiftSecond { mode } => {
                let f = space.sector_function(|s, d| root((n - s - d + 1.0) / 2.0));
                space
                    .theta(-1)
                    .matmul(&f)
                    .matmul(&space.tail_word(&[Ladder::Annihilate(mode)]))
            }
            Self::Excited { create, annihilate } => {
                space.tail_word(&[Ladder::Create(create), Ladder::Annihilate(annihilate)])
            }
        }
    }
}

/// `max |U A U* - P B P|` with `P` the admissible projector.
pub fn verify_conjugation(fock: &TruncatedFockBasis, relation: ConjugationRelation) -> Result<f64> {
    let space = ExcitationSpace::new(fock)?;
    let u = space.embedding(fock);
    let a = fock.word_matrix(&relation.fock_word());
    let left = u.matmul(&a).matmul(&u.transpose());
    let p = space.admissible_projector();
    let right = p.matmul(&relation.image(&space)).matmul(&p);
    Ok(left.max_abs_diff(&right))
}

/// `(max |U*U - 1|, max |UU* - P|)`.
pub fn partial_isometry_defects(fock: &TruncatedFockBasis) -> Result<(f64, f64)> {
    let space = ExcitationSpace::new(fock)?;
    let u = space.embedding(fock);
    let ut = u.transpose();
    let gram = ut.matmul(&u).max_abs_diff(&Matrix::identity(fock.dim()));
    let range = u.matmul(&ut).max_abs_diff(&space.admissible_projector());
    Ok((gram, range))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_relation_holds_small() {
        let fock = TruncatedFockBasis::new(4, 3).unwrap();
        for rel in ConjugationRelation::all(4) {
            let dev = verify_conjugation(&fock, rel).unwrap();
            assert!(dev < 1e-12, "{rel:?}: {dev}");
        }
    }

    #[test]
    fn embedding_is_partial_isometry() {
        let fock = TruncatedFockBasis::new(3, 4).unwrap();
        let (gram, range) = partial_isometry_defects(&fock).unwrap();
        assert_eq!(gram, 0.0);
        assert_eq!(range, 0.0);
    }

    #[test]
    fn decomposition_round_trips() {
        let fock = TruncatedFockBasis::new(4, 3).unwrap();
        let psi: Vec<f64> = (0..fock.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let dec = excitation_decomposition(&fock, &psi).unwrap();
        for &(s, d) in dec.sectors.keys() {
            assert!(d.abs() <= 3 - s as i64 && (3 - s as i64 + d) % 2 == 0);
        }
        assert_eq!(dec.to_fock(&fock).unwrap(), psi);
        let total: f64 = dec.excitation_weights().iter().sum();
        let norm: f64 = psi.iter().map(|x| x * x).sum();
        assert!((total - norm).abs() < 1e-13);
    }

    #[test]
    fn wrong_sign_is_detected() {
        // a*_1 a_2 must not equal Θ⁻¹ ... Θ⁻¹
        let fock = TruncatedFockBasis::new(3, 3).unwrap();
        let space = ExcitationSpace::new(&fock).unwrap();
        let u = space.embedding(&fock);
        let a = fock.word_matrix(&[Ladder::Create(0), Ladder::Annihilate(1)]);
        let left = u.matmul(&a).matmul(&u.transpose());
        let t = space.theta(-1);
        let wrong = t.matmul(&t);
        assert!(left.max_abs_diff(&wrong) > 0.5);
    }
}
