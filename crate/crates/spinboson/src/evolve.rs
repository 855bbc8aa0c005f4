//! Exact time evolution from the spectral decomposition of `H`.
//!
//! `U(t) = V diag(e^{-iλt/ħ}) V†` is assembled once per requested time;
//! applying it to a state goes through the eigenbasis directly and costs
//! one dense matrix-vector pass each way.

use num_complex::Complex64;

use crate::eigen::{hermitian_eigendecomposition, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::model::{build_hamiltonian, ModelParams, Spin};

/// How far a state's norm may drift from 1 before it is rejected.
pub const STATE_NORM_ATOL: f64 = 1e-10;

/// Survival probabilities may stick out of `[0, 1]` by at most this.
pub const PROBABILITY_ATOL: f64 = 1e-10;

/// A ket as a bare amplitude vector. No normalization is imposed at
/// construction; operations that require a unit state say so and check.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("state vector must be non-empty".into()));
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter("state vector has non-finite amplitudes".into()));
        }
        Ok(StateVector { amplitudes })
    }

    /// `|0⟩`: all weight on the lowest basis state.
    pub fn vacuum(len: usize) -> Result<Self> {
        Self::basis_state(len, 0)
    }

    /// The basis ket `|k⟩`.
    pub fn basis_state(len: usize, k: usize) -> Result<Self> {
        if k >= len {
            return Err(Error::InvalidParameter(format!(
                "basis index {k} out of range for length {len}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Errors unless the norm is within [`STATE_NORM_ATOL`] of 1. Nothing
    /// in this crate silently renormalizes.
    pub fn ensure_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > STATE_NORM_ATOL {
            return Err(Error::InvalidParameter(format!(
                "state is not normalized: |ψ| = {norm:.12}"
            )));
        }
        Ok(())
    }

    /// Probability of finding the two-state system in `spin`, for a state
    /// on the full spin-major basis of dimension `2 * cutoff`.
    pub fn spin_weight(&self, spin: Spin, cutoff: usize) -> Result<f64> {
        if self.len() != 2 * cutoff {
            return Err(Error::DimensionMismatch(format!(
                "state length {} does not match dimension {}",
                self.len(),
                2 * cutoff
            )));
        }
        let range = match spin {
            Spin::Up => 0..cutoff,
            Spin::Down => cutoff..2 * cutoff,
        };
        Ok(self.amplitudes[range].iter().map(|z| z.norm_sqr()).sum())
    }
}

/// The unitary `exp(-iHt/ħ)` held in spectral form, so that any time (and
/// any number of times) costs no further diagonalization.
#[derive(Debug, Clone)]
pub struct Propagator {
    decomposition: SpectralDecomposition,
    hbar: f64,
}

impl Propagator {
    pub fn new(hamiltonian: &HermitianOperator, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        let decomposition = hermitian_eigendecomposition(hamiltonian)?;
        Ok(Propagator { decomposition, hbar })
    }

    pub fn for_params(params: &ModelParams) -> Result<Self> {
        let h = build_hamiltonian(params)?;
        Propagator::new(&h, params.hbar)
    }

    pub fn dim(&self) -> usize {
        self.decomposition.dim()
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    /// Phase factors `e^{-iλ_k t/ħ}`.
    pub fn phases(&self, t: f64) -> Result<Vec<Complex64>> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
        }
        let scale = t / self.hbar;
        Ok(self
            .decomposition
            .eigenvalues()
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * scale))
            .collect())
    }

    /// Dense `U(t) = V diag(e^{-iλt/ħ}) V†`.
    pub fn matrix(&self, t: f64) -> Result<ComplexMatrix> {
        let mut scaled = self.decomposition.eigenvectors().clone();
        scaled.scale_columns(&self.phases(t)?)?;
        scaled.mul(&self.decomposition.eigenvectors().adjoint())
    }

    /// `U(t) ψ` through the eigenbasis; `ψ` must be a unit state.
    pub fn apply(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state length {} does not match propagator dimension {}",
                psi.len(),
                self.dim()
            )));
        }
        psi.ensure_normalized()?;
        let phases = self.phases(t)?;
        let v = self.decomposition.eigenvectors();
        // c = V† ψ, then ψ(t) = V (phases ∘ c)
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, &amp) in psi.amplitudes().iter().enumerate() {
            let row = v.row(i);
            for (k, cof) in coeffs.iter_mut().enumerate() {
                *cof += row[k].conj() * amp;
            }
        }
        for (cof, ph) in coeffs.iter_mut().zip(&phases) {
            *cof *= ph;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, o) in out.iter_mut().enumerate() {
            let row = v.row(i);
            for (k, cof) in coeffs.iter().enumerate() {
                *o += row[k] * cof;
            }
        }
        StateVector::from_amplitudes(out)
    }
}

/// One-shot `U(t)` for the given model.
pub fn propagator(params: &ModelParams, t: f64) -> Result<ComplexMatrix> {
    Propagator::for_params(params)?.matrix(t)
}

/// `U ψ` for an explicit unitary; `ψ` must be a unit state.
pub fn evolve_state(u: &ComplexMatrix, psi: &StateVector) -> Result<StateVector> {
    if u.cols() != psi.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot apply {}x{} to a state of length {}",
            u.rows(),
            u.cols(),
            psi.len()
        )));
    }
    psi.ensure_normalized()?;
    StateVector::from_amplitudes(u.matvec(psi.amplitudes())?)
}

/// Spin-up survival probability over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    times: Vec<f64>,
    pr_up: Vec<f64>,
}

impl SurvivalCurve {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Raw values; may poke out of `[0, 1]` by round-off (at most
    /// [`PROBABILITY_ATOL`], enforced at construction).
    pub fn pr_up(&self) -> &[f64] {
        &self.pr_up
    }

    /// Values clamped into `[0, 1]`, the form meant for export.
    pub fn pr_up_clamped(&self) -> Vec<f64> {
        self.pr_up.iter().map(|&p| p.clamp(0.0, 1.0)).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evolves `(up) ⊗ ψ_bath` and records the spin-up weight at each time.
///
/// The bath state must have length `cutoff` and unit norm; times must be
/// finite but need not be ordered.
pub fn survival_probability(
    params: &ModelParams,
    psi_bath: &StateVector,
    times: &[f64],
) -> Result<SurvivalCurve> {
    params.validate()?;
    let n = params.cutoff;
    if psi_bath.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "bath state length {} does not match cutoff {}",
            psi_bath.len(),
            n
        )));
    }
    psi_bath.ensure_normalized()?;
    for &t in times {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
        }
    }

    let prop = Propagator::for_params(params)?;
    let v = prop.decomposition().eigenvectors();
    let dim = prop.dim();

    // c = V† (ψ_bath ⊕ 0); only the up rows of V contribute.
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
    for (i, &amp) in psi_bath.amplitudes().iter().enumerate() {
        let row = v.row(i);
        for (k, cof) in coeffs.iter_mut().enumerate() {
            *cof += row[k].conj() * amp;
        }
    }

    let mut pr_up = Vec::with_capacity(times.len());
    for &t in times {
        let phases = prop.phases(t)?;
        let mut weight = 0.0;
        for i in 0..n {
            let row = v.row(i);
            let mut amp = Complex64::new(0.0, 0.0);
            for ((&vik, cof), ph) in row.iter().zip(&coeffs).zip(&phases) {
                amp += vik * cof * ph;
            }
            weight += amp.norm_sqr();
        }
        if !(-PROBABILITY_ATOL..=1.0 + PROBABILITY_ATOL).contains(&weight) {
            return Err(Error::ContractViolation(format!(
                "survival probability {weight} escapes [0, 1] at t = {t}"
            )));
        }
        pr_up.push(weight);
    }

    Ok(SurvivalCurve {
        times: times.to_vec(),
        pr_up,
    })
}
