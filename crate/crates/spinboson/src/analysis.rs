//! Parameter studies built on the lower layers: how the special spectrum
//! depends on the truncation cutoff and on time, plus the occupation
//! profiles of the two extreme states.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evolve::Propagator;
use crate::model::{ModelParams, Parity};
use crate::special::{
    bath_spectrum, build_b_effective, classify_bath_spectrum, state_at, BEffective,
    SpectrumReport, StateClass,
};

/// Spectrum summary of `B` at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cutoff: usize,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// `1 - lambda_max`; shrinks as the cutoff grows.
    pub r_prob: f64,
    /// `√max(r_prob, 0)`.
    pub r_amp: f64,
    pub count_non_decay: usize,
    pub count_decay: usize,
}

/// Recomputes the special spectrum at each cutoff in `cutoffs`, which
/// must be strictly ascending with every entry at least 2. Thresholds and
/// all other parameters are taken from `params`; `params.cutoff` itself
/// is ignored.
pub fn convergence_study(params: &ModelParams, cutoffs: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if cutoffs.is_empty() {
        return Err(Error::InvalidParameter("cutoff list must be non-empty".into()));
    }
    for (i, &n) in cutoffs.iter().enumerate() {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("cutoff must be at least 2, got {n}")));
        }
        if i > 0 && n <= cutoffs[i - 1] {
            return Err(Error::InvalidParameter(format!(
                "cutoffs must be strictly ascending, got {} after {}",
                n,
                cutoffs[i - 1]
            )));
        }
    }
    params.with_cutoff(cutoffs[0]).validate()?;

    let mut rows = Vec::with_capacity(cutoffs.len());
    for &n in cutoffs {
        let row = (|| -> Result<ConvergenceRow> {
            let b = build_b_effective(&params.with_cutoff(n))?;
            let spectrum = bath_spectrum(&b)?;
            let residual = spectrum.residual();
            let report =
                classify_bath_spectrum(&spectrum, params.theta_hi, params.theta_lo)?;
            Ok(ConvergenceRow {
                cutoff: n,
                lambda_max: *spectrum.eigenvalues().last().unwrap(),
                lambda_min: spectrum.eigenvalues()[0],
                r_prob: residual.r_prob,
                r_amp: residual.r_amp,
                count_non_decay: report.count_non_decay,
                count_decay: report.count_decay,
            })
        })()
        .map_err(|e| e.with_context(format!("convergence study failed at cutoff {n}")))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Classifies the spectrum of `B(t)` at each requested time, reusing one
/// diagonalization of `H` for the whole scan. Times must be finite but
/// are otherwise unconstrained.
pub fn spectrum_vs_time(params: &ModelParams, times: &[f64]) -> Result<Vec<SpectrumReport>> {
    params.validate()?;
    for &t in times {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
        }
    }
    let propagator = Arc::new(Propagator::for_params(params)?);
    let mut reports = Vec::with_capacity(times.len());
    for &t in times {
        let b = BEffective::at_time(Arc::clone(&propagator), params, t)?;
        reports.push(classify_spectrum(&b, params)?);
    }
    Ok(reports)
}

fn classify_spectrum(b: &BEffective, params: &ModelParams) -> Result<SpectrumReport> {
    let spectrum = bath_spectrum(b)?;
    classify_bath_spectrum(&spectrum, params.theta_hi, params.theta_lo)
}

/// Occupation profile of one extreme eigenstate of `B`.
#[derive(Debug, Clone)]
pub struct FigureSeries {
    pub eigenvalue: f64,
    pub class: StateClass,
    pub parity: Parity,
    /// Occupation numbers, one per row of the series.
    pub fock_levels: Vec<usize>,
    /// `|amplitude|²` at each listed level.
    pub probabilities: Vec<f64>,
    /// Amplitude phase (radians) at each listed level.
    pub phases: Vec<f64>,
}

/// Occupation profiles of the top ("non-decay side") and bottom ("decay
/// side") eigenstates of `B`, in that order. With `support_only` the
/// series keeps only the state's own parity levels, dropping the
/// exactly-zero alternate ones.
pub fn figure_data(params: &ModelParams, support_only: bool) -> Result<(FigureSeries, FigureSeries)> {
    let b = build_b_effective(params)?;
    let spectrum = bath_spectrum(&b)?;
    let top = state_at(&b, &spectrum, spectrum.dim() - 1)?;
    let bottom = state_at(&b, &spectrum, 0)?;
    Ok((series_from(&top, support_only), series_from(&bottom, support_only)))
}

fn series_from(state: &crate::special::SpecialState, support_only: bool) -> FigureSeries {
    let mut fock_levels = Vec::new();
    let mut probabilities = Vec::new();
    let mut phases = Vec::new();
    for (n, amp) in state.bath_amplitudes.iter().enumerate() {
        if support_only && Parity::of_fock(n) != state.parity {
            continue;
        }
        fock_levels.push(n);
        probabilities.push(state.fock_probabilities[n]);
        phases.push(amp.arg());
    }
    FigureSeries {
        eigenvalue: state.eigenvalue,
        class: state.class,
        parity: state.parity,
        fock_levels,
        probabilities,
        phases,
    }
}
