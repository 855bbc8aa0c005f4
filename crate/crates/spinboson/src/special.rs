//! The effective measurement operator and its special eigenstates.
//!
//! Start the two-state system up with bath state `ψ`, evolve for time `t`,
//! and ask for the probability of still finding it up:
//!
//! ```text
//! Pr(up) = ⟨ψ| U_uu†(t) U_uu(t) |ψ⟩ = ⟨ψ| B |ψ⟩
//! ```
//!
//! where `U_uu` is the up-up block of the full propagator. `B` is
//! Hermitian with spectrum in `[0, 1]` (it is a compression of a
//! unitary), so its top eigenvectors are the bath states that keep the
//! system up almost surely ("non-decay") and its bottom eigenvectors the
//! ones that flip it almost surely ("decay"). Because spin flips shift
//! the occupation number by one, `B` commutes with bath parity `(-1)^n̂`
//! and is diagonalized here block by block, which makes every eigenvector
//! exactly parity-definite.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::{Propagator, StateVector};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::model::{ModelParams, Parity, Spin};

/// Largest tolerated magnitude of a `B` entry coupling even to odd
/// occupations.
pub const PARITY_CROSS_ATOL: f64 = 1e-10;

/// Eigenvalues of `B` may escape `[0, 1]` by at most this.
pub const SPECTRUM_RANGE_ATOL: f64 = 1e-10;

/// Projector onto spin up, diagonal `1` on the up sector and `0` on the
/// down sector of the spin-major basis.
pub fn build_projector_up(cutoff: usize) -> Result<HermitianOperator> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    let mut p = ComplexMatrix::zeros(2 * cutoff, 2 * cutoff);
    for k in 0..cutoff {
        p[(k, k)] = Complex64::new(1.0, 0.0);
    }
    HermitianOperator::new(p)
}

/// `B = U_uu† U_uu` on the bath space, with the propagator it came from.
#[derive(Debug, Clone)]
pub struct BEffective {
    matrix: HermitianOperator,
    time: f64,
    params: ModelParams,
    propagator: Arc<Propagator>,
}

impl BEffective {
    /// Builds `B` at time `time` from an existing propagator, which must
    /// have been constructed for the same `params`. Sharing the
    /// propagator keeps repeated times (and the later phase evolution)
    /// on bit-identical data.
    pub fn at_time(propagator: Arc<Propagator>, params: &ModelParams, time: f64) -> Result<Self> {
        params.validate()?;
        if !time.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite, got {time}")));
        }
        let n = params.cutoff;
        if propagator.dim() != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "propagator dimension {} does not match 2 * cutoff = {}",
                propagator.dim(),
                2 * n
            )));
        }

        // U_uu = V_u diag(e^{-iλt/ħ}) V_u†, V_u the up rows of V.
        let v = propagator.decomposition().eigenvectors();
        let up_rows: Vec<usize> = (0..n).collect();
        let all_cols: Vec<usize> = (0..2 * n).collect();
        let v_up = v.gather(&up_rows, &all_cols);
        let mut scaled = v_up.clone();
        scaled.scale_columns(&propagator.phases(time)?)?;
        let u_uu = scaled.mul(&v_up.adjoint())?;

        let raw = u_uu.adjoint().mul(&u_uu)?;
        // symmetrize away the last round-off before the Hermitian gate
        let b = ComplexMatrix::from_fn(n, n, |i, j| {
            (raw[(i, j)] + raw[(j, i)].conj()) * Complex64::new(0.5, 0.0)
        });

        let mut cross = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if (i + j) % 2 == 1 {
                    cross = cross.max(b[(i, j)].norm());
                }
            }
        }
        if cross > PARITY_CROSS_ATOL {
            return Err(Error::ContractViolation(format!(
                "B couples even to odd occupations with magnitude {cross:.3e}"
            )));
        }

        Ok(BEffective {
            matrix: HermitianOperator::new(b)?,
            time,
            params: *params,
            propagator,
        })
    }

    pub fn matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn cutoff(&self) -> usize {
        self.params.cutoff
    }

    pub fn propagator(&self) -> &Arc<Propagator> {
        &self.propagator
    }

    /// `⟨ψ|B|ψ⟩`, the survival probability for bath state `ψ`.
    pub fn expectation(&self, psi_bath: &StateVector) -> Result<f64> {
        if psi_bath.len() != self.cutoff() {
            return Err(Error::DimensionMismatch(format!(
                "bath state length {} does not match cutoff {}",
                psi_bath.len(),
                self.cutoff()
            )));
        }
        let bv = self.matrix.matrix().matvec(psi_bath.amplitudes())?;
        Ok(psi_bath
            .amplitudes()
            .iter()
            .zip(&bv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }
}

/// Builds the propagator and `B` at `params.time` in one call.
pub fn build_b_effective(params: &ModelParams) -> Result<BEffective> {
    params.validate()?;
    let propagator = Arc::new(Propagator::for_params(params)?);
    BEffective::at_time(propagator, params, params.time)
}

/// Full spectrum of `B`, eigenvalues ascending across both parity blocks.
///
/// Each parity block is diagonalized separately, so every eigenvector is
/// exactly zero on the opposite-parity occupations. On bit-equal
/// eigenvalues the even block sorts first.
#[derive(Debug, Clone)]
pub struct BathSpectrum {
    time: f64,
    eigenvalues: Vec<f64>,
    parities: Vec<Parity>,
    eigenvectors: ComplexMatrix,
}

impl BathSpectrum {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    /// Columns aligned with [`eigenvalues`](BathSpectrum::eigenvalues).
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Distance of the top eigenvalue from a sure outcome.
    pub fn residual(&self) -> Residual {
        let lambda_max = *self.eigenvalues.last().expect("spectrum is non-empty");
        let r_prob = 1.0 - lambda_max;
        Residual {
            r_prob,
            r_amp: r_prob.max(0.0).sqrt(),
        }
    }
}

pub fn bath_spectrum(b: &BEffective) -> Result<BathSpectrum> {
    let n = b.cutoff();
    let m = b.matrix().matrix();
    let evens: Vec<usize> = (0..n).step_by(2).collect();
    let odds: Vec<usize> = (1..n).step_by(2).collect();

    let mut merged: Vec<(f64, Parity, Vec<Complex64>)> = Vec::with_capacity(n);
    for (positions, parity) in [(&evens, Parity::Even), (&odds, Parity::Odd)] {
        let block = HermitianOperator::new(m.gather(positions, positions))?;
        let d = crate::eigen::hermitian_eigendecomposition(&block)?;
        for k in 0..d.dim() {
            let small = d.eigenvector(k);
            let mut full = vec![Complex64::new(0.0, 0.0); n];
            for (slot, amp) in positions.iter().zip(small) {
                full[*slot] = amp;
            }
            merged.push((d.eigenvalues()[k], parity, full));
        }
    }
    // stable: even block entries come first, so they win bit-equal ties
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));

    let eigenvalues: Vec<f64> = merged.iter().map(|e| e.0).collect();
    if eigenvalues[0] < -SPECTRUM_RANGE_ATOL
        || eigenvalues[n - 1] > 1.0 + SPECTRUM_RANGE_ATOL
    {
        return Err(Error::ContractViolation(format!(
            "spectrum of B escapes [0, 1]: [{:.3e}, {:.3e}]",
            eigenvalues[0],
            eigenvalues[n - 1]
        )));
    }
    let parities: Vec<Parity> = merged.iter().map(|e| e.1).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| merged[j].2[i]);

    Ok(BathSpectrum {
        time: b.time(),
        eigenvalues,
        parities,
        eigenvectors,
    })
}

/// Classification of a bath eigenstate by its survival probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    /// `λ ≥ theta_hi`: the system stays up.
    NonDecay,
    /// `λ ≤ theta_lo`: the system flips down.
    Decay,
    Intermediate,
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateClass::NonDecay => "non-decay",
            StateClass::Decay => "decay",
            StateClass::Intermediate => "intermediate",
        })
    }
}

impl FromStr for StateClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "non-decay" => Ok(StateClass::NonDecay),
            "decay" => Ok(StateClass::Decay),
            "intermediate" => Ok(StateClass::Intermediate),
            other => Err(Error::InvalidParameter(format!(
                "unknown state class \"{other}\" (expected non-decay, decay, or intermediate)"
            ))),
        }
    }
}

/// Which classes [`extract_special_states`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassFilter {
    All,
    Only(StateClass),
}

impl fmt::Display for ClassFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassFilter::All => f.write_str("all"),
            ClassFilter::Only(c) => c.fmt(f),
        }
    }
}

impl FromStr for ClassFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            Ok(ClassFilter::All)
        } else {
            Ok(ClassFilter::Only(s.parse()?))
        }
    }
}

impl ClassFilter {
    pub fn admits(&self, class: StateClass) -> bool {
        match self {
            ClassFilter::All => true,
            ClassFilter::Only(c) => *c == class,
        }
    }
}

pub fn classify_value(lambda: f64, theta_hi: f64, theta_lo: f64) -> StateClass {
    if lambda >= theta_hi {
        StateClass::NonDecay
    } else if lambda <= theta_lo {
        StateClass::Decay
    } else {
        StateClass::Intermediate
    }
}

fn check_thresholds(theta_hi: f64, theta_lo: f64) -> Result<()> {
    if !(theta_lo.is_finite() && theta_hi.is_finite())
        || theta_lo < 0.0
        || theta_hi > 1.0
        || theta_lo >= theta_hi
    {
        return Err(Error::InvalidParameter(format!(
            "thresholds must satisfy 0 ≤ theta_lo < theta_hi ≤ 1, got lo = {theta_lo}, hi = {theta_hi}"
        )));
    }
    Ok(())
}

/// Spectrum of `B` at one time, with class counts.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub time: f64,
    pub eigenvalues: Vec<f64>,
    pub count_non_decay: usize,
    pub count_decay: usize,
    pub count_intermediate: usize,
    pub theta_hi: f64,
    pub theta_lo: f64,
}

/// Counts eigenvalues of `B` per class. Thresholds may differ from the
/// ones in `b.params()`; they only need `0 ≤ lo < hi ≤ 1`.
pub fn classify_spectrum(b: &BEffective, theta_hi: f64, theta_lo: f64) -> Result<SpectrumReport> {
    let spectrum = bath_spectrum(b)?;
    classify_bath_spectrum(&spectrum, theta_hi, theta_lo)
}

/// Same as [`classify_spectrum`] for an already computed spectrum.
pub fn classify_bath_spectrum(
    spectrum: &BathSpectrum,
    theta_hi: f64,
    theta_lo: f64,
) -> Result<SpectrumReport> {
    check_thresholds(theta_hi, theta_lo)?;
    let mut counts = [0usize; 3];
    for &l in spectrum.eigenvalues() {
        let slot = match classify_value(l, theta_hi, theta_lo) {
            StateClass::NonDecay => 0,
            StateClass::Decay => 1,
            StateClass::Intermediate => 2,
        };
        counts[slot] += 1;
    }
    Ok(SpectrumReport {
        time: spectrum.time(),
        eigenvalues: spectrum.eigenvalues().to_vec(),
        count_non_decay: counts[0],
        count_decay: counts[1],
        count_intermediate: counts[2],
        theta_hi,
        theta_lo,
    })
}

/// How far the best survivor is from surviving surely: `r_prob = 1 - λ_max`
/// and its amplitude reading `r_amp = √max(r_prob, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub r_prob: f64,
    pub r_amp: f64,
}

pub fn residual(b: &BEffective) -> Result<Residual> {
    Ok(bath_spectrum(b)?.residual())
}

/// One eigenstate of `B`, fully described.
#[derive(Debug, Clone)]
pub struct SpecialState {
    /// Position in the ascending spectrum of `B` (0 = fastest decayer).
    pub index: usize,
    pub eigenvalue: f64,
    pub class: StateClass,
    /// Occupation parity; exact, because the parity blocks are
    /// diagonalized separately.
    pub parity: Parity,
    /// Bath amplitudes in the occupation basis, unit norm, phase-fixed.
    pub bath_amplitudes: Vec<Complex64>,
    /// `|amplitude|²` per occupation number.
    pub fock_probabilities: Vec<f64>,
    /// Phase (radians) of the dominant amplitude after evolving
    /// `(up) ⊗ ψ` for the operator's time: the overall phase the outcome
    /// picks up. Dominant sector is up for non-decay, down for decay, the
    /// heavier one (ties up) for intermediate.
    pub final_phase: f64,
}

/// Builds the full description of eigenstate `index` of the spectrum.
pub fn state_at(b: &BEffective, spectrum: &BathSpectrum, index: usize) -> Result<SpecialState> {
    let n = b.cutoff();
    if spectrum.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "spectrum dimension {} does not match cutoff {}",
            spectrum.dim(),
            n
        )));
    }
    if index >= n {
        return Err(Error::InvalidParameter(format!(
            "eigenstate index {index} out of range for {n} states"
        )));
    }
    let eigenvalue = spectrum.eigenvalues()[index];
    let parity = spectrum.parities()[index];
    let class = classify_value(eigenvalue, b.params().theta_hi, b.params().theta_lo);
    let bath_amplitudes = spectrum.eigenvector(index);
    let fock_probabilities: Vec<f64> = bath_amplitudes.iter().map(|z| z.norm_sqr()).collect();

    let mut full = bath_amplitudes.clone();
    full.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(n));
    let psi0 = StateVector::from_amplitudes(full)?;
    let evolved = b.propagator().apply(&psi0, b.time())?;

    let sector = match class {
        StateClass::NonDecay => Spin::Up,
        StateClass::Decay => Spin::Down,
        StateClass::Intermediate => {
            let up = evolved.spin_weight(Spin::Up, n)?;
            let down = evolved.spin_weight(Spin::Down, n)?;
            if up >= down { Spin::Up } else { Spin::Down }
        }
    };
    let amps = evolved.amplitudes();
    let slice = match sector {
        Spin::Up => &amps[..n],
        Spin::Down => &amps[n..],
    };
    let mut best = 0usize;
    for (i, z) in slice.iter().enumerate() {
        if z.norm() > slice[best].norm() {
            best = i;
        }
    }
    let final_phase = slice[best].arg();

    Ok(SpecialState {
        index,
        eigenvalue,
        class,
        parity,
        bath_amplitudes,
        fock_probabilities,
        final_phase,
    })
}

/// All eigenstates of `B` admitted by `filter`, ascending by eigenvalue.
/// Classes come from the thresholds in `b.params()`.
pub fn extract_special_states(b: &BEffective, filter: ClassFilter) -> Result<Vec<SpecialState>> {
    let spectrum = bath_spectrum(b)?;
    extract_from_spectrum(b, &spectrum, filter)
}

/// Same as [`extract_special_states`] for an already computed spectrum.
pub fn extract_from_spectrum(
    b: &BEffective,
    spectrum: &BathSpectrum,
    filter: ClassFilter,
) -> Result<Vec<SpecialState>> {
    let mut out = Vec::new();
    for (k, &l) in spectrum.eigenvalues().iter().enumerate() {
        if filter.admits(classify_value(l, b.params().theta_hi, b.params().theta_lo)) {
            out.push(state_at(b, spectrum, k)?);
        }
    }
    Ok(out)
}
