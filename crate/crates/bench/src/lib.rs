//! Parameter presets shared by the benchmarks.

use kitaev_core::ChainParams;

/// Critical ring used for the large-`N` curve benchmarks.
pub fn critical(n_sites: usize) -> ChainParams {
    ChainParams::new(n_sites, 1.0, 1.0, 0.0).expect("valid preset")
}

/// Gapped ring with a unique ground state.
pub fn gapped(n_sites: usize) -> ChainParams {
    ChainParams::new(n_sites, 1.0, 0.8, 0.5).expect("valid preset")
}

/// Even block lengths `2, 4, …` up to and including `max`.
pub fn even_blocks(max: usize) -> Vec<usize> {
    (2..=max).step_by(2).collect()
}
