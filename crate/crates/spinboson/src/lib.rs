//! A two-state system coupled to a truncated oscillator bath, evolved
//! exactly, and mined for bath states that drive the measurement to a
//! definite outcome.
//!
//! The pieces, bottom to top:
//!
//! * [`model`] builds the Hamiltonian `H = ε/2 (1+σz) + ω a†a + β σx (a†+a)`
//!   on a hard-truncated Fock space and the parity it conserves.
//! * [`eigen`] diagonalizes Hermitian matrices (cyclic Jacobi, deterministic).
//! * [`evolve`] turns the spectrum into the propagator `U(t)` and survival
//!   probabilities.
//! * [`special`] forms the effective measurement operator
//!   `B = U_uu† U_uu` on the bath space and extracts its near-0/near-1
//!   eigenvectors: the bath states for which the two-state system ends
//!   (almost) surely up or (almost) surely down.
//! * [`analysis`] packages cutoff-convergence and occupation-profile studies.
//!
//! ```
//! use spinboson::{ModelParams, build_b_effective, bath_spectrum};
//!
//! let params = ModelParams { cutoff: 40, ..ModelParams::default() };
//! let b = build_b_effective(&params).unwrap();
//! let spectrum = bath_spectrum(&b).unwrap();
//! let top = *spectrum.eigenvalues().last().unwrap();
//! assert!(top > 0.999 && top <= 1.0 + 1e-10);
//! ```

pub mod analysis;
pub mod eigen;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod model;
pub mod special;

pub use analysis::{convergence_study, figure_data, spectrum_vs_time, ConvergenceRow, FigureSeries};
pub use eigen::{hermitian_eigendecomposition, SpectralDecomposition};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianOperator};
pub use model::{
    build_hamiltonian, ladder_operators, parity_operator, BasisIndex, ModelParams, Parity, Spin,
};
pub use evolve::{
    evolve_state, propagator, survival_probability, Propagator, StateVector, SurvivalCurve,
};
pub use special::{
    bath_spectrum, build_b_effective, build_projector_up, classify_bath_spectrum,
    classify_spectrum, classify_value, extract_from_spectrum, extract_special_states, residual,
    state_at, BEffective, BathSpectrum, ClassFilter, Residual, SpecialState, SpectrumReport,
    StateClass,
};
