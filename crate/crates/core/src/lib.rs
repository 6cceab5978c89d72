//! Block entanglement of the alternating-bond Kitaev chain in a transverse field.
//!
//! The ground state of the ring is written as `e^{Ẑ}|0⟩` with a real pairing
//! matrix ([`pairing`]); block entropies and entanglement spectra follow from
//! an `L`-dimensional singular value problem ([`correlation`], [`entropy`]).
//! [`oracle`] provides exact diagonalization for cross-checks at small `N`.

pub mod correlation;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod pairing;

pub use correlation::MajoranaCorrelation;
pub use entropy::{
    binary_entropy, block_entropy, block_entropy_at, block_entropy_curve, block_entropy_curve_with,
    entanglement_spectrum, schmidt_numbers, schmidt_spectrum_at, EntanglementSpectrum, EntropyMethod, SchmidtSpectrum,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DenseMatrix};
pub use model::{ground_degeneracy, ground_energy, mode_eigenvalues, ChainParams, ModeSpectrum};
pub use oracle::{compare_entropies, ComparisonReport, Degeneracy, EntropyComparison, SpinStateVector};
pub use pairing::{block_coupling, real_space_gamma, BlockCoupling, PairingMatrix};
