//! Exact diagonalization of small rings.
//!
//! States live in the `σᶻ` product basis: bit `l` of a basis index is set when
//! site `l+1` points up. A block of the first `L` sites is therefore the low
//! `L` bits; the partial trace runs over the high bits.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::entropy::{block_entropy_curve, xlog2};
use crate::error::{Error, Result};
use crate::linalg::{iterative_ground_pair, symmetric_eigen, ComplexMatrix, DenseMatrix};
use crate::model::{ground_energy, ChainParams};

/// Largest ring handled by matrix-free routines.
pub const MAX_SITES: usize = 16;
/// Largest ring handled by dense diagonalization.
pub const MAX_DENSE_SITES: usize = 10;
/// Largest ring handled by [`compare_entropies`].
pub const MAX_COMPARE_SITES: usize = 14;
/// Energy clustering tolerance for degeneracy counts.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Pass threshold of [`compare_entropies`], in bits.
pub const COMPARE_TOL: f64 = 1e-8;

const NORM_TOL: f64 = 1e-12;
const LANCZOS_TOL: f64 = 1e-11;

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Size { n_sites: n, limit })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinStateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl SpinStateVector {
    pub fn new(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_size(n_sites, MAX_SITES)?;
        if n_sites == 0 {
            return Err(Error::Parameter("state needs at least one site".into()));
        }
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::Dimension(format!("{} amplitudes for {n_sites} sites", amplitudes.len())));
        }
        Ok(Self { n_sites, amplitudes })
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_size(n_sites, MAX_SITES)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_sites];
        *amplitudes.get_mut(index).ok_or_else(|| Error::Dimension(format!("basis index {index} out of range")))? =
            Complex64::new(1.0, 0.0);
        Self::new(n_sites, amplitudes)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    /// Expectation value of `∏ σᶻ`.
    pub fn parity_expectation(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(i, z)| parity(i) * z.norm_sqr()).sum()
    }
}

/// `∏ σᶻ` on a basis state, for even ring sizes.
fn parity(index: usize) -> f64 {
    if index.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn apply_raw(p: &ChainParams, x: &[Complex64], y: &mut [Complex64]) {
    let n = p.n_sites();
    let (jx, jy, h) = (p.j_x(), p.j_y(), p.h_field());
    for (s, out) in y.iter_mut().enumerate() {
        let mut acc = x[s] * (h * (2.0 * s.count_ones() as f64 - n as f64));
        for i in 0..n {
            let j = (i + 1) % n;
            let flip = s ^ (1 << i) ^ (1 << j);
            if i % 2 == 0 {
                acc += x[flip] * jx;
            } else {
                let same = (s >> i & 1) == (s >> j & 1);
                acc += x[flip] * if same { -jy } else { jy };
            }
        }
        *out = acc;
    }
}

/// `H v`, matrix-free. Bonds `(1,2), (3,4), …` carry `J_x σˣσˣ`; bonds
/// `(2,3), …, (N,1)` carry `J_y σʸσʸ`.
pub fn apply_hamiltonian(p: &ChainParams, v: &SpinStateVector) -> Result<SpinStateVector> {
    check_size(p.n_sites(), MAX_SITES)?;
    if v.n_sites != p.n_sites() {
        return Err(Error::Dimension(format!("state has {} sites, chain has {}", v.n_sites, p.n_sites())));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); v.amplitudes.len()];
    apply_raw(p, &v.amplitudes, &mut out);
    SpinStateVector::new(v.n_sites, out)
}

/// Dense real Hamiltonian.
pub fn dense_hamiltonian(p: &ChainParams) -> Result<DenseMatrix<f64>> {
    check_size(p.n_sites(), MAX_DENSE_SITES)?;
    let dim = 1usize << p.n_sites();
    let mut m = DenseMatrix::zeros(dim, dim);
    let mut e = vec![Complex64::new(0.0, 0.0); dim];
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        e[j] = Complex64::new(1.0, 0.0);
        apply_raw(p, &e, &mut col);
        e[j] = Complex64::new(0.0, 0.0);
        for (i, z) in col.iter().enumerate() {
            m[(i, j)] = z.re;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: SpinStateVector,
    pub residual: f64,
}

pub fn ed_ground(p: &ChainParams) -> Result<GroundState> {
    check_size(p.n_sites(), MAX_SITES)?;
    let n = p.n_sites();
    let pair = iterative_ground_pair(|x, y| apply_raw(p, x, y), 1 << n, LANCZOS_TOL)?;
    Ok(GroundState { energy: pair.value, state: SpinStateVector::new(n, pair.vector)?, residual: pair.residual })
}

/// Ground-state multiplicity over the full spectrum and per parity sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degeneracy {
    pub ground_energy: f64,
    pub total: usize,
    /// States with `∏ σᶻ = +1`, i.e. an even number of fermions.
    pub even: usize,
    pub odd: usize,
}

/// Dense diagonalization of both parity sectors.
///
/// `H` commutes with `∏ σᶻ`, so each sector is diagonalized on its own and the
/// counts are exact labels rather than expectation values.
pub fn full_spectrum_degeneracy(p: &ChainParams, tol: f64) -> Result<Degeneracy> {
    check_size(p.n_sites(), MAX_DENSE_SITES)?;
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Parameter(format!("degeneracy tolerance must be non-negative, got {tol}")));
    }
    let h = dense_hamiltonian(p)?;
    let sector = |sign: f64| -> Result<Vec<f64>> {
        let idx: Vec<usize> = (0..h.rows()).filter(|&i| parity(i) == sign).collect();
        let block = DenseMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
        Ok(symmetric_eigen(&block, false)?.values)
    };
    let even = sector(1.0)?;
    let odd = sector(-1.0)?;
    let e0 = even.iter().chain(&odd).copied().fold(f64::INFINITY, f64::min);
    let count = |v: &[f64]| v.iter().filter(|&&e| e - e0 <= tol).count();
    let (even, odd) = (count(&even), count(&odd));
    Ok(Degeneracy { ground_energy: e0, total: even + odd, even, odd })
}

#[derive(Debug, Clone)]
pub struct ReducedDensity {
    block_len: usize,
    matrix: ComplexMatrix,
}

impl ReducedDensity {
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(symmetric_eigen(&self.matrix, false)?.values)
    }
}

/// `ρ_A = M M†` with `M` the amplitudes reshaped to `2^L × 2^(N−L)`.
pub fn reduced_density(state: &SpinStateVector, block_len: usize) -> Result<ReducedDensity> {
    const MAX_BLOCK: usize = 14;
    if block_len == 0 || block_len > state.n_sites || block_len > MAX_BLOCK {
        return Err(Error::Parameter(format!(
            "block length must lie in [1, {}], got {block_len}",
            state.n_sites.min(MAX_BLOCK)
        )));
    }
    if !state.is_normalized() {
        return Err(Error::Normalization { norm: state.norm() });
    }
    let da = 1usize << block_len;
    let db = 1usize << (state.n_sites - block_len);
    // index = a + da·b
    let m = DenseMatrix::from_fn(da, db, |a, b| state.amplitudes[a + da * b]);
    Ok(ReducedDensity { block_len, matrix: m.gram() })
}

/// Von Neumann entropy in bits.
pub fn vn_entropy(rho: &ReducedDensity) -> Result<f64> {
    const NEG_TOL: f64 = 1e-10;
    let values = rho.eigenvalues()?;
    if let Some(&bad) = values.iter().find(|&&v| v < -NEG_TOL) {
        return Err(Error::Validity(format!("negative eigenvalue {bad:.3e}")));
    }
    Ok(values.iter().map(|&v| xlog2(v.max(0.0))).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyComparison {
    pub block_len: usize,
    pub fast: f64,
    pub oracle: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<EntropyComparison>,
    /// Exact ground energy minus the oracle's.
    pub energy_mismatch: f64,
    /// Set at `h = 0`, where the ground state is degenerate and the oracle
    /// returns an arbitrary member of the ground space.
    pub degenerate: bool,
}

impl ComparisonReport {
    pub fn max_abs_diff(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.degenerate || self.max_abs_diff() < COMPARE_TOL
    }
}

/// Fast block entropies against the exact ground state.
pub fn compare_entropies(p: &ChainParams, block_lens: &[usize]) -> Result<ComparisonReport> {
    check_size(p.n_sites(), MAX_COMPARE_SITES)?;
    let fast = block_entropy_curve(p, block_lens)?;
    let ground = ed_ground(p)?;
    let oracle: Vec<f64> = block_lens
        .par_iter()
        .map(|&l| reduced_density(&ground.state, l).and_then(|rho| vn_entropy(&rho)))
        .collect::<Result<_>>()?;
    let rows = fast
        .into_iter()
        .zip(oracle)
        .map(|((block_len, fast), oracle)| EntropyComparison {
            block_len,
            fast,
            oracle,
            abs_diff: (fast - oracle).abs(),
        })
        .collect();
    Ok(ComparisonReport { rows, energy_mismatch: ground_energy(p) - ground.energy, degenerate: p.h_field() == 0.0 })
}
