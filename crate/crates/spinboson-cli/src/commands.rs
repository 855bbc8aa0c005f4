//! Turns a resolved [`RunConfig`] into output files.

use std::path::PathBuf;

use spinboson::{
    bath_spectrum, build_b_effective, classify_value, convergence_study, extract_from_spectrum,
    figure_data, spectrum_vs_time, survival_probability, FigureSeries,
};

use crate::config::{CommandKind, RunConfig};
use crate::output::{write_sidecar, write_table, Field};
use crate::UsageError;

pub fn run(config: &RunConfig) -> anyhow::Result<()> {
    match config.command {
        CommandKind::Spectrum => spectrum(config),
        CommandKind::Special => special(config),
        CommandKind::Survival => survival(config),
        CommandKind::Converge => converge(config),
        CommandKind::Figure => figure(config),
    }
}

fn spectrum(config: &RunConfig) -> anyhow::Result<()> {
    let params = &config.params;
    let times = match &config.time_grid {
        Some(grid) => grid.times(),
        None => vec![params.time],
    };
    let reports = spectrum_vs_time(params, &times)?;
    let mut rows = Vec::new();
    for report in &reports {
        for (index, &lambda) in report.eigenvalues.iter().enumerate() {
            rows.push(vec![
                Field::Float(report.time),
                Field::Int(index as u64),
                Field::Float(lambda),
                Field::Text(classify_value(lambda, params.theta_hi, params.theta_lo).to_string()),
            ]);
        }
    }
    write_table(
        &config.output,
        config.format,
        &["time", "index", "eigenvalue", "class"],
        &rows,
    )?;
    write_sidecar(&config.output, config)
}

fn special(config: &RunConfig) -> anyhow::Result<()> {
    let b = build_b_effective(&config.params)?;
    let spectrum = bath_spectrum(&b)?;
    let states = extract_from_spectrum(&b, &spectrum, config.class)?;
    let mut rows = Vec::new();
    for s in &states {
        for (level, amp) in s.bath_amplitudes.iter().enumerate() {
            rows.push(vec![
                Field::Int(s.index as u64),
                Field::Float(s.eigenvalue),
                Field::Text(s.class.to_string()),
                Field::Text(s.parity.to_string()),
                Field::Float(s.final_phase),
                Field::Int(level as u64),
                Field::Float(s.fock_probabilities[level]),
                Field::Float(amp.re),
                Field::Float(amp.im),
            ]);
        }
    }
    write_table(
        &config.output,
        config.format,
        &[
            "state",
            "eigenvalue",
            "class",
            "parity",
            "final-phase",
            "fock-level",
            "probability",
            "amplitude-re",
            "amplitude-im",
        ],
        &rows,
    )?;
    write_sidecar(&config.output, config)
}

fn survival(config: &RunConfig) -> anyhow::Result<()> {
    let grid = config
        .time_grid
        .as_ref()
        .ok_or_else(|| UsageError("survival requires --time-grid".into()))?;
    let bath = config.bath.load(config.params.cutoff)?;
    let curve = survival_probability(&config.params, &bath, &grid.times())?;
    let rows: Vec<Vec<Field>> = curve
        .times()
        .iter()
        .zip(curve.pr_up_clamped())
        .map(|(&t, p)| vec![Field::Float(t), Field::Float(p)])
        .collect();
    write_table(&config.output, config.format, &["time", "pr-up"], &rows)?;
    write_sidecar(&config.output, config)
}

fn converge(config: &RunConfig) -> anyhow::Result<()> {
    let rows_data = convergence_study(&config.params, &config.cutoffs)?;
    let rows: Vec<Vec<Field>> = rows_data
        .iter()
        .map(|r| {
            vec![
                Field::Int(r.cutoff as u64),
                Field::Float(r.lambda_max),
                Field::Float(r.lambda_min),
                Field::Float(r.r_prob),
                Field::Float(r.r_amp),
                Field::Int(r.count_non_decay as u64),
                Field::Int(r.count_decay as u64),
            ]
        })
        .collect();
    write_table(
        &config.output,
        config.format,
        &[
            "cutoff",
            "lambda-max",
            "lambda-min",
            "r-prob",
            "r-amp",
            "count-non-decay",
            "count-decay",
        ],
        &rows,
    )?;
    write_sidecar(&config.output, config)
}

fn figure(config: &RunConfig) -> anyhow::Result<()> {
    let (top, bottom) = figure_data(&config.params, config.support_only)?;
    for (series, tag) in [(&top, "nondecay"), (&bottom, "decay")] {
        let path = tagged_path(&config.output, tag);
        let rows: Vec<Vec<Field>> = series
            .fock_levels
            .iter()
            .zip(series.probabilities.iter().zip(&series.phases))
            .map(|(&n, (&p, &ph))| {
                vec![Field::Int(n as u64), Field::Float(p), Field::Float(ph)]
            })
            .collect();
        write_table(
            &path,
            config.format,
            &["fock-level", "probability", "phase"],
            &rows,
        )?;
        write_sidecar(&path, config)?;
        announce(series, tag);
    }
    Ok(())
}

fn announce(series: &FigureSeries, tag: &str) {
    eprintln!(
        "{tag}: eigenvalue {:.12e}, class {}, parity {}",
        series.eigenvalue, series.class, series.parity
    );
}

/// `out.csv` with tag "decay" becomes `out.decay.csv`.
fn tagged_path(output: &std::path::Path, tag: &str) -> PathBuf {
    match output.extension().and_then(|e| e.to_str()) {
        Some(ext) => output.with_extension(format!("{tag}.{ext}")),
        None => output.with_extension(tag),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn tagged_paths_insert_before_extension() {
        assert_eq!(
            tagged_path(Path::new("out/fig.csv"), "decay"),
            PathBuf::from("out/fig.decay.csv")
        );
        assert_eq!(
            tagged_path(Path::new("fig"), "nondecay"),
            PathBuf::from("fig.nondecay")
        );
    }
}
