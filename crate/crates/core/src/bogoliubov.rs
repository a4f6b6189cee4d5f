//! Right/left excited-sector blocks and the Bogoliubov energy.
//!
//! For one well with cutoff `M`, `D` is the diagonal of pair-averaged
//! excitation energies and `K` the exchange matrix against the localized
//! condensate mode. The energy is computed from the closed trace formula or
//! from the normal form of the quadratic Hamiltonian with `A = D + λK`,
//! `B = λK`.

use alloc::vec::Vec;

use crate::grid::{convolve_density, Grid, GridFn};
use crate::linalg::{cholesky_solve, psd_sqrt, psd_sqrt_trace, symmetric_eigen, Matrix};
use crate::math::{dot, sqrt};
use crate::meanfield::ModeBasis;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Right,
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BogoliubovMethod {
    TraceFormula,
    Symplectic,
}

/// `D` (diagonal, positive) and `K` (symmetric, PSD) for one well.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticBlocks {
    pub side: Side,
    pub cutoff: usize,
    pub lambda: f64,
    pub d: Vec<f64>,
    pub k: Matrix,
}

impl QuadraticBlocks {
    pub fn new(side: Side, lambda: f64, d: Vec<f64>, k: Matrix) -> Self {
        assert!(k.is_square() && k.rows() == d.len(), "block shapes");
        Self {
            side,
            cutoff: d.len(),
            lambda,
            d,
            k,
        }
    }

    /// `D + λK`.
    pub fn a(&self) -> Matrix {
        Matrix::diagonal(&self.d).add(&self.k.scale(self.lambda))
    }

    /// `λK`.
    pub fn b(&self) -> Matrix {
        self.k.scale(self.lambda)
    }

    /// Leading `m × m` blocks.
    pub fn truncated(&self, m: usize) -> Self {
        assert!(m <= self.cutoff);
        Self::new(
            self.side,
            self.lambda,
            self.d[..m].to_vec(),
            Matrix::from_fn(m, m, |i, j| self.k[(i, j)]),
        )
    }
}

fn side_modes(basis: &ModeBasis, side: Side) -> (&GridFn, &[GridFn]) {
    match side {
        Side::Right => (&basis.u1, &basis.right),
        Side::Left => (&basis.u2, &basis.left),
    }
}

fn check_cutoff(basis: &ModeBasis, cutoff: usize) -> Result<()> {
    if basis.pair_count() < cutoff {
        return Err(Error::InsufficientModes {
            cutoff,
            needed: 2 * cutoff + 2,
            available: basis.len(),
        });
    }
    Ok(())
}

/// `D_α = (μ_{2α+1} + μ_{2α+2})/2 - μ_+` and
/// `K_αβ = ½ ∬ e_α(x) c(y) w(x - y) c(x) e_β(y)` with `c = u1, e = r` on
/// the right and `c = u2, e = l` on the left.
pub fn excited_blocks(
    grid: &Grid,
    kernel: &GridFn,
    basis: &ModeBasis,
    lambda: f64,
    cutoff: usize,
    side: Side,
) -> Result<QuadraticBlocks> {
    check_cutoff(basis, cutoff)?;
    let mu_plus = basis.mu_plus();
    let d: Vec<f64> = (1..=cutoff)
        .map(|a| 0.5 * (basis.eigenvalues[2 * a] + basis.eigenvalues[2 * a + 1]) - mu_plus)
        .collect();
    let (condensate, excited) = side_modes(basis, side);
    let products: Vec<GridFn> = excited[..cutoff].iter().map(|e| e.product(condensate)).collect();
    let convs = products
        .iter()
        .map(|p| convolve_density(grid, kernel, p))
        .collect::<Result<Vec<_>>>()?;
    let mut k = Matrix::zeros(cutoff, cutoff);
    for a in 0..cutoff {
        for b in 0..=a {
            let v = 0.5 * products[a].inner(&convs[b]);
            k[(a, b)] = v;
            k[(b, a)] = v;
        }
    }
    Ok(QuadraticBlocks::new(side, lambda, d, k))
}

/// `-½ Tr[D + λK - √(D² + 2λ D^{1/2} K D^{1/2})]`.
pub fn bogoliubov_energy_trace(blocks: &QuadraticBlocks) -> Result<f64> {
    if blocks.lambda == 0.0 || blocks.k.max_abs() == 0.0 {
        return Ok(0.0);
    }
    if blocks.d.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::UnstableQuadraticForm {
            min_eigenvalue: blocks.d.iter().cloned().fold(f64::INFINITY, f64::min),
        });
    }
    let root_d: Vec<f64> = blocks.d.iter().map(|x| sqrt(*x)).collect();
    let lam = blocks.lambda;
    let m = blocks.cutoff;
    let arg = Matrix::from_fn(m, m, |i, j| {
        let diag = if i == j { blocks.d[i] * blocks.d[i] } else { 0.0 };
        diag + 2.0 * lam * root_d[i] * blocks.k[(i, j)] * root_d[j]
    });
    let tr_sqrt = psd_sqrt_trace(&arg)?;
    let tr = blocks.d.iter().sum::<f64>() + lam * blocks.k.trace();
    Ok(-0.5 * (tr - tr_sqrt))
}

/// Ground energy of `Σ A_αβ a*_α a_β + ½ Σ B_αβ (a*_α a*_β + a_α a_β)`:
/// `½ Tr √((A-B)^{1/2} (A+B) (A-B)^{1/2}) - ½ Tr A`.
pub fn quadratic_ground_energy(a: &Matrix, b: &Matrix) -> Result<f64> {
    if b.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let minus = a.sub(b);
    let eig = symmetric_eigen(&minus)?;
    let min = eig.values.first().copied().unwrap_or(1.0);
    if !(min > 0.0) {
        return Err(Error::UnstableQuadraticForm { min_eigenvalue: min });
    }
    let root = psd_sqrt(&minus)?;
    let arg = root.matmul(&a.add(b)).matmul(&root);
    Ok(0.5 * psd_sqrt_trace(&arg)? - 0.5 * a.trace())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovResult {
    pub e_bog: f64,
    pub e_bog_right: f64,
    pub e_bog_left: f64,
    pub cutoff: usize,
    pub method: BogoliubovMethod,
}

pub fn block_energy(blocks: &QuadraticBlocks, method: BogoliubovMethod) -> Result<f64> {
    match method {
        BogoliubovMethod::TraceFormula => bogoliubov_energy_trace(blocks),
        BogoliubovMethod::Symplectic => quadratic_ground_energy(&blocks.a(), &blocks.b()),
    }
}

pub fn bogoliubov_energy(
    grid: &Grid,
    kernel: &GridFn,
    basis: &ModeBasis,
    lambda: f64,
    cutoff: usize,
    method: BogoliubovMethod,
) -> Result<BogoliubovResult> {
    let right = excited_blocks(grid, kernel, basis, lambda, cutoff, Side::Right)?;
    let left = excited_blocks(grid, kernel, basis, lambda, cutoff, Side::Left)?;
    let e_bog_right = block_energy(&right, method)?;
    let e_bog_left = block_energy(&left, method)?;
    Ok(BogoliubovResult {
        e_bog: e_bog_right + e_bog_left,
        e_bog_right,
        e_bog_left,
        cutoff,
        method,
    })
}

/// Energies along increasing cutoffs, sharing one pair of blocks built at
/// the largest cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffStudy {
    pub entries: Vec<BogoliubovResult>,
}

impl CutoffStudy {
    pub fn last(&self) -> &BogoliubovResult {
        self.entries.last().expect("non-empty ladder")
    }

    /// Energy change between the last two cutoffs; zero for a single rung.
    pub fn last_increment(&self) -> f64 {
        match self.entries.len() {
            0 | 1 => 0.0,
            n => self.entries[n - 1].e_bog - self.entries[n - 2].e_bog,
        }
    }
}

pub fn cutoff_ladder(
    grid: &Grid,
    kernel: &GridFn,
    basis: &ModeBasis,
    lambda: f64,
    ladder: &[usize],
    method: BogoliubovMethod,
) -> Result<CutoffStudy> {
    let top = ladder.iter().copied().max().ok_or(Error::InvalidParameter {
        name: "m_ladder",
        reason: "cutoff ladder must not be empty",
    })?;
    let right = excited_blocks(grid, kernel, basis, lambda, top, Side::Right)?;
    let left = excited_blocks(grid, kernel, basis, lambda, top, Side::Left)?;
    let entries = ladder
        .iter()
        .map(|&m| {
            let e_bog_right = block_energy(&right.truncated(m), method)?;
            let e_bog_left = block_energy(&left.truncated(m), method)?;
            Ok(BogoliubovResult {
                e_bog: e_bog_right + e_bog_left,
                e_bog_right,
                e_bog_left,
                cutoff: m,
                method,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CutoffStudy { entries })
}

/// `v_α = ⟨e_α, K c⟩ = ½ ∫ e_α c (w∗c²)` for the side's condensate mode `c`.
pub fn condensate_projections(
    grid: &Grid,
    kernel: &GridFn,
    basis: &ModeBasis,
    cutoff: usize,
    side: Side,
) -> Result<Vec<f64>> {
    check_cutoff(basis, cutoff)?;
    let (c, excited) = side_modes(basis, side);
    let field = convolve_density(grid, kernel, &c.product(c))?;
    let weighted = field.product(c);
    Ok(excited[..cutoff].iter().map(|e| 0.5 * e.inner(&weighted)).collect())
}

/// `λU - (λ²/2) [vᵣᵀ (D + 2λKᵣ)⁻¹ vᵣ + vₗᵀ (D + 2λKₗ)⁻¹ vₗ]`.
pub fn variance_coefficient_bound(
    right: &QuadraticBlocks,
    left: &QuadraticBlocks,
    v_right: &[f64],
    v_left: &[f64],
    u: f64,
    lambda: f64,
) -> Result<f64> {
    let form = |blocks: &QuadraticBlocks, v: &[f64]| -> Result<f64> {
        let m = Matrix::diagonal(&blocks.d).add(&blocks.k.scale(2.0 * lambda));
        let x = cholesky_solve(&m, v)?;
        Ok(dot(v, &x))
    };
    Ok(lambda * u - 0.5 * lambda * lambda * (form(right, v_right)? + form(left, v_left)?))
}

/// Outcome of the search for the coupling where the variance-coefficient
/// bound changes sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaZero {
    /// The bound is positive below this coupling and negative above it.
    Root(f64),
    /// The bound stays positive up to the search limit.
    Beyond(f64),
}

impl LambdaZero {
    /// A coupling below which the bound is known to be positive.
    pub fn lower_bound(&self) -> f64 {
        match *self {
            LambdaZero::Root(x) | LambdaZero::Beyond(x) => x,
        }
    }
}

/// Bisection for the root of the variance-coefficient bound in `λ` with the
/// blocks held fixed. `bound(λ)/λ` is strictly decreasing, so the bound is
/// positive exactly below the root.
pub fn lambda_zero(
    right: &QuadraticBlocks,
    left: &QuadraticBlocks,
    v_right: &[f64],
    v_left: &[f64],
    u: f64,
    lambda_max: f64,
) -> Result<LambdaZero> {
    let f = |lam: f64| variance_coefficient_bound(right, left, v_right, v_left, u, lam);
    let mut hi = 1e-3_f64.min(lambda_max);
    while f(hi)? > 0.0 {
        if hi >= lambda_max {
            return Ok(LambdaZero::Beyond(lambda_max));
        }
        hi = (2.0 * hi).min(lambda_max);
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(LambdaZero::Root(lo))
}
