//! The model: a two-state system coupled to a single oscillator mode kept
//! to a finite number of levels.
//!
//! With `σz` acting on the two-state system and `a` on the oscillator,
//!
//! ```text
//! H = ε/2 (1 + σz) + ω a†a + β σx (a† + a)
//! ```
//!
//! on a basis ordered spin-major: index `k = fock` for spin up,
//! `k = cutoff + fock` for spin down. Every entry of `H` is real in this
//! basis. The oscillator ladder is truncated hard at `cutoff` levels
//! (occupations `0 ..= cutoff-1`), so `a† |cutoff-1⟩ = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};

/// Model and analysis parameters. All fields public; call [`validate`]
/// after hand-editing.
///
/// [`validate`]: ModelParams::validate
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Two-state splitting: spin up costs `ε`, spin down nothing.
    pub epsilon: f64,
    /// Oscillator frequency.
    pub omega: f64,
    /// Spin-oscillator coupling strength.
    pub beta: f64,
    /// Evolution time for the effective measurement operator.
    pub time: f64,
    /// Number of oscillator levels kept (occupations `0 ..= cutoff-1`).
    pub cutoff: usize,
    /// Planck constant; phases evolve as `exp(-i λ t / ħ)`.
    pub hbar: f64,
    /// Survival probability at or above this is classed non-decay.
    pub theta_hi: f64,
    /// Survival probability at or below this is classed decay.
    pub theta_lo: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            epsilon: 0.5,
            omega: 0.1,
            beta: 0.6,
            time: 0.15,
            cutoff: 250,
            hbar: 1.0,
            theta_hi: 0.99,
            theta_lo: 0.01,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("epsilon", self.epsilon),
            ("omega", self.omega),
            ("beta", self.beta),
            ("time", self.time),
            ("hbar", self.hbar),
            ("theta_hi", self.theta_hi),
            ("theta_lo", self.theta_lo),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be non-negative, got {}",
                self.omega
            )));
        }
        if self.cutoff < 2 {
            return Err(Error::InvalidParameter(format!(
                "cutoff must be at least 2, got {}",
                self.cutoff
            )));
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if !(self.theta_hi > 0.5 && self.theta_hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta_hi must lie in (0.5, 1), got {}",
                self.theta_hi
            )));
        }
        if !(self.theta_lo > 0.0 && self.theta_lo < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "theta_lo must lie in (0, 0.5), got {}",
                self.theta_lo
            )));
        }
        Ok(())
    }

    /// `omega == 0` is allowed but collapses the oscillator spectrum to a
    /// point; callers may want to warn.
    pub fn is_degenerate(&self) -> bool {
        self.omega == 0.0
    }

    /// Full Hilbert-space dimension, `2 * cutoff`.
    pub fn dim(&self) -> usize {
        2 * self.cutoff
    }

    pub fn with_cutoff(self, cutoff: usize) -> Self {
        ModelParams { cutoff, ..self }
    }

    pub fn with_time(self, time: f64) -> Self {
        ModelParams { time, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Position of `(spin, fock)` in the spin-major basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    pub spin: Spin,
    pub fock: usize,
}

impl BasisIndex {
    pub fn new(spin: Spin, fock: usize, cutoff: usize) -> Result<Self> {
        if fock >= cutoff {
            return Err(Error::InvalidParameter(format!(
                "fock level {fock} out of range for cutoff {cutoff}"
            )));
        }
        Ok(BasisIndex { spin, fock })
    }

    pub fn flat(&self, cutoff: usize) -> usize {
        match self.spin {
            Spin::Up => self.fock,
            Spin::Down => cutoff + self.fock,
        }
    }

    pub fn from_flat(k: usize, cutoff: usize) -> Result<Self> {
        if k >= 2 * cutoff {
            return Err(Error::InvalidParameter(format!(
                "flat index {k} out of range for dimension {}",
                2 * cutoff
            )));
        }
        let spin = if k < cutoff { Spin::Up } else { Spin::Down };
        Ok(BasisIndex {
            spin,
            fock: k % cutoff,
        })
    }
}

/// Parity of an oscillator occupation number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_fock(n: usize) -> Parity {
        if n % 2 == 0 { Parity::Even } else { Parity::Odd }
    }

    pub fn sign(&self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
}

/// Lowering and raising operators `(a, a†)` on `cutoff` levels.
///
/// `a[n-1][n] = √n`; the raising operator is its transpose, so
/// `a† |cutoff-1⟩ = 0` (hard truncation). Consequently `[a, a†]` is the
/// identity except for `1 - cutoff` in the last diagonal entry.
pub fn ladder_operators(cutoff: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    let mut lower = ComplexMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        lower[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let raise = lower.adjoint();
    Ok((lower, raise))
}

/// Occupation-number operator `a†a`, diagonal `0, 1, …, cutoff-1`.
pub fn number_operator(cutoff: usize) -> Result<ComplexMatrix> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    let diag: Vec<Complex64> = (0..cutoff).map(|n| Complex64::new(n as f64, 0.0)).collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Assembles `H` on the spin-major basis. All entries real.
///
/// Spin-diagonal blocks: `ε + ω n` (up), `ω n` (down). The spin-flip block
/// `β (a† + a)` couples `(up, n) ↔ (down, n±1)`, changing occupation
/// parity on every flip.
pub fn build_hamiltonian(params: &ModelParams) -> Result<HermitianOperator> {
    params.validate()?;
    let n = params.cutoff;
    let mut h = ComplexMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        h[(k, k)] = Complex64::new(params.epsilon + params.omega * k as f64, 0.0);
        h[(n + k, n + k)] = Complex64::new(params.omega * k as f64, 0.0);
    }
    for k in 0..n - 1 {
        let coupling = Complex64::new(params.beta * ((k + 1) as f64).sqrt(), 0.0);
        h[(k, n + k + 1)] = coupling;
        h[(n + k + 1, k)] = coupling;
        h[(k + 1, n + k)] = coupling;
        h[(n + k, k + 1)] = coupling;
    }
    HermitianOperator::new(h)
}

/// The conserved parity `σz ⊗ (-1)^(a†a)`, diagonal with entries `±1`.
///
/// Commutes with `H` exactly: each spin flip in `H` changes occupation by
/// one, so every nonzero entry of `H` connects equal-parity basis states.
pub fn parity_operator(cutoff: usize) -> Result<HermitianOperator> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    let mut p = ComplexMatrix::zeros(2 * cutoff, 2 * cutoff);
    for k in 0..cutoff {
        let bath = Parity::of_fock(k).sign();
        p[(k, k)] = Complex64::new(bath, 0.0);
        p[(cutoff + k, cutoff + k)] = Complex64::new(-bath, 0.0);
    }
    HermitianOperator::new(p)
}
