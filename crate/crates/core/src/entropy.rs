//! Operator Schmidt numbers, block entropy and the entanglement spectrum.
//!
//! A block in the Schmidt form `∏_n (x_n + y_n A†_n B†_n)|0⟩` with
//! `x_n² = 1/(1+η_n)` and `y_n² = η_n/(1+η_n)` has reduced-density eigenvalues
//! `∏_n x_n^{2ξ_n} y_n^{2(1−ξ_n)}` over all occupations `ξ ∈ {0,1}^L`, and
//! entropy `Σ_n H(1/(1+η_n))`. All entropies are in bits.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::correlation::MajoranaCorrelation;
use crate::error::{Error, Result};
use crate::linalg::{singular_values, Scalar};
use crate::model::ChainParams;
use crate::pairing::{block_coupling, real_space_gamma, BlockCoupling};

/// Schmidt numbers below this are exact zeros.
pub const ETA_FLOOR: f64 = 1e-24;

/// Binary Shannon entropy in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&x) {
        return Err(Error::Domain { value: x, lo: 0.0, hi: 1.0 });
    }
    let x = x.clamp(0.0, 1.0);
    Ok(xlog2(x) + xlog2(1.0 - x))
}

/// `-x log₂ x` with `0 log 0 = 0`.
pub fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// `H(1/(1+η))` without forming `1 − 1/(1+η)`.
fn mode_entropy(eta: f64) -> f64 {
    if eta < ETA_FLOOR {
        return 0.0;
    }
    let p = 1.0 / (1.0 + eta);
    let q = eta / (1.0 + eta);
    xlog2(p) + xlog2(q)
}

/// Operator Schmidt numbers of one bipartition, descending, padded with zeros
/// to the block length.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    etas: Vec<f64>,
    block_len: usize,
}

impl SchmidtSpectrum {
    pub fn new(mut etas: Vec<f64>, block_len: usize) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::Parameter("block length must be positive".into()));
        }
        if etas.len() > block_len {
            return Err(Error::Parameter(format!("{} Schmidt numbers for a block of {block_len}", etas.len())));
        }
        if let Some(bad) = etas.iter().find(|e| e.is_nan() || **e < 0.0 || e.is_infinite()) {
            return Err(Error::Parameter(format!("Schmidt numbers must be finite and non-negative, got {bad}")));
        }
        for e in etas.iter_mut() {
            if *e < ETA_FLOOR {
                *e = 0.0;
            }
        }
        etas.resize(block_len, 0.0);
        etas.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { etas, block_len })
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Per-mode weights `(x_n², y_n²)`.
    pub fn mode_weights(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.etas.iter().map(|&e| (1.0 / (1.0 + e), e / (1.0 + e)))
    }
}

/// Squared singular values of the cross-block coupling `Γ`.
///
/// This is exact only when the in-block pairing vanishes; for chain ground
/// states use [`MajoranaCorrelation::schmidt_spectrum`].
pub fn schmidt_numbers<T: Scalar>(c: &BlockCoupling<T>) -> Result<SchmidtSpectrum> {
    let sv = singular_values(c.matrix())?;
    SchmidtSpectrum::new(sv.into_iter().map(|s| s * s).collect(), c.block_len())
}

pub fn block_entropy(s: &SchmidtSpectrum) -> f64 {
    s.etas.iter().map(|&e| mode_entropy(e)).sum()
}

/// Largest reduced-density eigenvalues, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSpectrum {
    pub lambdas: Vec<f64>,
    pub total_captured: f64,
}

#[derive(Debug, PartialEq)]
struct Frontier {
    log_ratio: f64,
    last: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        self.log_ratio.total_cmp(&other.log_ratio).then_with(|| other.last.cmp(&self.last))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `count` largest eigenvalues `Λ(ξ)` without enumerating all `2^L`.
///
/// Every eigenvalue is the top one `∏ max(x², y²)` times `∏_{n∈S} r_n` for a
/// subset `S` of modes, `r_n = min/max ≤ 1`. Subsets are visited best-first:
/// with the `log r_n` sorted descending, the subset ending at index `i` spawns
/// "append `i+1`" and "replace `i` by `i+1`", which reaches every subset once
/// and never increases the product. Zero eigenvalues are never returned.
pub fn entanglement_spectrum(s: &SchmidtSpectrum, count: usize) -> Result<EntanglementSpectrum> {
    if count == 0 {
        return Err(Error::Parameter("entanglement spectrum count must be positive".into()));
    }
    let mut top = 1.0;
    let mut log_ratios = Vec::new();
    for (x2, y2) in s.mode_weights() {
        let (hi, lo) = if x2 >= y2 { (x2, y2) } else { (y2, x2) };
        top *= hi;
        if lo > 0.0 {
            log_ratios.push((lo / hi).ln());
        }
    }
    log_ratios.sort_by(|a, b| b.total_cmp(a));

    let mut lambdas = vec![top];
    let mut heap = BinaryHeap::new();
    if !log_ratios.is_empty() {
        heap.push(Frontier { log_ratio: log_ratios[0], last: 0 });
    }
    while lambdas.len() < count {
        let Some(Frontier { log_ratio, last }) = heap.pop() else { break };
        lambdas.push(top * log_ratio.exp());
        if let Some(&next) = log_ratios.get(last + 1) {
            heap.push(Frontier { log_ratio: log_ratio + next, last: last + 1 });
            heap.push(Frontier { log_ratio: log_ratio + (next - log_ratios[last]), last: last + 1 });
        }
    }
    let total_captured = lambdas.iter().sum();
    Ok(EntanglementSpectrum { lambdas, total_captured })
}

/// All `2^L` eigenvalues `Λ(ξ)`, indexed by the bit pattern of `ξ`
/// (bit `n` set means mode `n` contributes `x_n²`).
pub fn enumerate_spectrum(s: &SchmidtSpectrum) -> Result<Vec<f64>> {
    const MAX_MODES: usize = 24;
    if s.block_len > MAX_MODES {
        return Err(Error::Parameter(format!("full enumeration limited to L <= {MAX_MODES}")));
    }
    let weights: Vec<(f64, f64)> = s.mode_weights().collect();
    Ok((0..1usize << s.block_len)
        .map(|pattern| {
            weights.iter().enumerate().map(|(n, &(x2, y2))| if pattern >> n & 1 == 1 { x2 } else { y2 }).product()
        })
        .collect())
}

/// Which reduction turns the pairing matrix into Schmidt numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyMethod {
    /// Majorana correlations of the full exponent; exact.
    #[default]
    Correlation,
    /// Singular values of the cross-block coupling only, dropping `Ẑ_A`, `Ẑ_B`.
    CrossBlock,
}

/// Block entropy of the first `L` sites for each requested `L`, sharing one
/// pairing matrix across the curve.
pub fn block_entropy_curve(p: &ChainParams, block_lens: &[usize]) -> Result<Vec<(usize, f64)>> {
    block_entropy_curve_with(p, block_lens, EntropyMethod::Correlation)
}

pub fn block_entropy_curve_with(
    p: &ChainParams,
    block_lens: &[usize],
    method: EntropyMethod,
) -> Result<Vec<(usize, f64)>> {
    let n = p.n_sites();
    if let Some(&bad) = block_lens.iter().find(|&&l| l == 0 || l >= n) {
        return Err(Error::Parameter(format!("block length must lie in [1, {}], got {bad}", n - 1)));
    }
    let gamma = real_space_gamma(p)?;
    match method {
        EntropyMethod::Correlation => {
            let corr = MajoranaCorrelation::from_pairing(&gamma)?;
            block_lens.par_iter().map(|&l| corr.schmidt_spectrum(l).map(|s| (l, block_entropy(&s)))).collect()
        }
        EntropyMethod::CrossBlock => block_lens
            .par_iter()
            .map(|&l| {
                let c = block_coupling(&gamma, l)?;
                schmidt_numbers(&c).map(|s| (l, block_entropy(&s)))
            })
            .collect(),
    }
}

/// Entropy of a single block.
pub fn block_entropy_at(p: &ChainParams, block_len: usize, method: EntropyMethod) -> Result<f64> {
    Ok(block_entropy_curve_with(p, &[block_len], method)?[0].1)
}

/// Schmidt spectrum of a single block.
pub fn schmidt_spectrum_at(p: &ChainParams, block_len: usize, method: EntropyMethod) -> Result<SchmidtSpectrum> {
    let n = p.n_sites();
    if block_len == 0 || block_len >= n {
        return Err(Error::Parameter(format!("block length must lie in [1, {}], got {block_len}", n - 1)));
    }
    let gamma = real_space_gamma(p)?;
    match method {
        EntropyMethod::Correlation => MajoranaCorrelation::from_pairing(&gamma)?.schmidt_spectrum(block_len),
        EntropyMethod::CrossBlock => schmidt_numbers(&block_coupling(&gamma, block_len)?),
    }
}
