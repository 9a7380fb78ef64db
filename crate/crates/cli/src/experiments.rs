//! One runner per experiment kind. Sweep points run in parallel; results are
//! gathered in sweep order before anything is written.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use superabsorb::dynamics::{first_crossing, peak_within, Evolver};
use superabsorb::models::{
    baseline_separable_population, baseline_single_population, battery, build_model, initial_state, lambda_rate,
    separable_initial_state, separable_model_hamiltonian,
};
use superabsorb::observables::{
    characteristic_time, charging_time_with, fill_ergotropy, leakage, scaling_fit, validity_diagnostics, ValidityFlag,
};
use superabsorb::{ChargingResult, ModelKind, ModelParams, ScalingFit, TimeGrid, TimeSeries, ValidityReport};

use crate::config::{ExperimentKind, ExperimentSpec, Sweep};
use crate::error::CliError;
use crate::output::{ensure_dir, file_label, fmt_float, fmt_opt, write_json, write_series, CsvFile};

/// Written to `<kind>_summary.json`.
#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    kind: ExperimentKind,
    spec: &'a ExperimentSpec,
    results: R,
    notes: Vec<String>,
}

/// Files produced by a run, data files first and the summary last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

pub fn run_experiment(spec: &ExperimentSpec, out: &Path) -> Result<RunOutput, CliError> {
    spec.validate()?;
    ensure_dir(out)?;
    match spec.kind {
        ExperimentKind::CompareOmega | ExperimentKind::CompareDelta => compare(spec, out),
        ExperimentKind::Populations => populations(spec, out),
        ExperimentKind::ChargingSweep => charging_sweep(spec, out),
        ExperimentKind::Baselines => baselines(spec, out),
        ExperimentKind::Validity => validity(spec, out),
    }
}

fn simulate(params: &ModelParams, kind: ModelKind, grid: &TimeGrid) -> Result<TimeSeries, CliError> {
    let model = build_model(params, kind)?;
    let psi = initial_state(params, kind)?;
    let mut series = Evolver::new(&model)?.evolve(&psi, grid, false)?;
    fill_ergotropy(&mut series, &model.h_battery)?;
    Ok(series)
}

fn flags(params: &ModelParams) -> Vec<ValidityFlag> {
    validity_diagnostics(params, characteristic_time(params)).flags
}

fn write_summary<R: Serialize>(
    spec: &ExperimentSpec,
    out: &Path,
    results: R,
    notes: Vec<String>,
    mut files: Vec<PathBuf>,
) -> Result<RunOutput, CliError> {
    for note in &notes {
        log::warn!("{note}");
    }
    let summary = Summary { kind: spec.kind, spec, results, notes };
    files.push(write_json(out.join(format!("{}_summary.json", spec.kind.name())), &summary)?);
    Ok(RunOutput { files })
}

fn file_name(path: &Path) -> String {
    path.file_name().unwrap_or_default().to_string_lossy().into_owned()
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ComparisonPoint {
    value: f64,
    file: String,
    params: ModelParams,
    lambda: f64,
    t_end: f64,
    samples: usize,
    max_deviation: f64,
    peak_p01_exact: f64,
    peak_time_exact: f64,
    leakage_exact: f64,
    flags: Vec<ValidityFlag>,
}

fn compare(spec: &ExperimentSpec, out: &Path) -> Result<RunOutput, CliError> {
    let prefix = match spec.sweep {
        Sweep::OmegaA(_) => "compare-omega_omega_a",
        _ => "compare-delta_mult",
    };
    let points = spec.points();
    let runs = points
        .par_iter()
        .map(|(value, params)| {
            let grid = spec.grid_for(params)?;
            let exact = simulate(params, ModelKind::Exact, &grid)?;
            let eff = simulate(params, ModelKind::Effective, &grid)?;
            Ok((*value, *params, grid, exact, eff))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut files = Vec::new();
    let mut results = Vec::new();
    for (value, params, grid, exact, eff) in runs {
        let p_exact = exact.channel(battery::P01);
        let p_eff = eff.channel(battery::P01);
        let path = out.join(format!("{prefix}_{}.csv", file_label(value)));
        let path = write_series(path, &["t", "p01_exact", "p01_eff"], &exact.times, &[p_exact, p_eff])?;
        let (peak_time, peak) = peak_within(&exact.times, p_exact, grid.t_end).unwrap_or((0.0, 0.0));
        results.push(ComparisonPoint {
            value,
            file: file_name(&path),
            params,
            lambda: lambda_rate(&params),
            t_end: grid.t_end,
            samples: grid.samples,
            max_deviation: p_exact.iter().zip(p_eff).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            peak_p01_exact: peak,
            peak_time_exact: peak_time,
            leakage_exact: leakage(&exact),
            flags: flags(&params),
        });
        files.push(path);
    }
    write_summary(spec, out, results, Vec::new(), files)
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PopulationsResult {
    file: String,
    params: ModelParams,
    lambda: f64,
    t_end: f64,
    samples: usize,
    leakage: f64,
    peak_p01: f64,
    peak_time: f64,
    flags: Vec<ValidityFlag>,
}

fn populations(spec: &ExperimentSpec, out: &Path) -> Result<RunOutput, CliError> {
    let (_, params) = spec.points()[0];
    let grid = spec.grid_for(&params)?;
    let s = simulate(&params, ModelKind::Exact, &grid)?;
    let path = write_series(
        out.join("populations.csv"),
        &["t", "p00", "p01", "p10", "p11"],
        &s.times,
        &[s.channel(battery::P00), s.channel(battery::P01), s.channel(battery::P10), s.channel(battery::P11)],
    )?;
    let (peak_time, peak_p01) = peak_within(&s.times, s.channel(battery::P01), grid.t_end).unwrap_or((0.0, 0.0));
    let result = PopulationsResult {
        file: file_name(&path),
        params,
        lambda: lambda_rate(&params),
        t_end: grid.t_end,
        samples: grid.samples,
        leakage: leakage(&s),
        peak_p01,
        peak_time,
        flags: flags(&params),
    };
    write_summary(spec, out, result, Vec::new(), vec![path])
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SweepRow {
    #[serde(flatten)]
    result: ChargingResult,
    /// `arcsin(√f)/λ`, the effective-model charging time.
    tau_effective: f64,
    lambda: f64,
    samples: usize,
    probe: bool,
}

/// Two readings of the breakdown size: `N = ω_A/δ(N)` solved self-consistently
/// with `δ = m g N`, and the size where the detuning `m g N` reaches `ω_A`.
#[derive(Serialize)]
struct BreakdownEstimate {
    self_consistent: f64,
    detuning_reaches_omega_a: f64,
}

#[derive(Serialize)]
struct SweepResult {
    file: String,
    rows: Vec<SweepRow>,
    fit: Option<ScalingFit>,
    not_achieved: Vec<u32>,
    n_star: BreakdownEstimate,
}

fn sweep_point(spec: &ExperimentSpec, params: &ModelParams, probe: bool) -> Result<SweepRow, CliError> {
    let grid = spec.grid_for(params)?;
    let s = simulate(params, ModelKind::Exact, &grid)?;
    let result = charging_time_with(&s, params, spec.charge_fraction, spec.ergotropy_reference)?;
    let lambda = lambda_rate(params);
    Ok(SweepRow {
        result,
        tau_effective: spec.charge_fraction.sqrt().asin() / lambda,
        lambda,
        samples: grid.samples,
        probe,
    })
}

fn charging_sweep(spec: &ExperimentSpec, out: &Path) -> Result<RunOutput, CliError> {
    let mut notes = Vec::new();
    let mut rows = spec
        .points()
        .par_iter()
        .map(|(_, params)| sweep_point(spec, params, false))
        .collect::<Result<Vec<_>, CliError>>()?;

    let n_star = if let Some(delta) = spec.delta {
        let n = spec.omega_a / delta;
        BreakdownEstimate { self_consistent: n, detuning_reaches_omega_a: n }
    } else {
        let per_n = spec.omega_a / (spec.delta_over_gn * spec.g);
        BreakdownEstimate { self_consistent: per_n.sqrt(), detuning_reaches_omega_a: per_n }
    };

    if let Some(probe) = spec.probe {
        let bound = 2.0 * n_star.detuning_reaches_omega_a;
        if (probe.max_n as f64) < bound {
            notes.push(format!("breakdown probe stops at N = {} (below 2 N* = {bound})", probe.max_n));
        }
        let mut n = rows.iter().map(|r| r.result.n).max().unwrap() + probe.step;
        while n <= probe.max_n && n as f64 <= bound {
            let row = sweep_point(spec, &spec.params_for(n), true)?;
            let reached = row.result.achieved();
            rows.push(row);
            if !reached {
                break;
            }
            n += probe.step;
        }
    }

    let not_achieved: Vec<u32> = rows.iter().filter(|r| !r.result.achieved()).map(|r| r.result.n).collect();
    if !not_achieved.is_empty() {
        notes.push(format!("charging threshold not reached for N = {not_achieved:?}"));
    }
    let points: Vec<(f64, Option<f64>)> =
        rows.iter().filter(|r| !r.probe).map(|r| (r.result.n as f64, r.result.tau)).collect();
    let fit = match scaling_fit(&points) {
        Ok(fit) => Some(fit),
        Err(e) => {
            notes.push(format!("no scaling fit: {e}"));
            None
        }
    };

    let mut csv = CsvFile::create(
        out.join("charging_sweep.csv"),
        &["n", "tau", "tau_effective", "peak_ergotropy", "max_ergotropy_ref", "leakage", "lambda", "probe"],
    )?;
    for r in &rows {
        csv.row([
            r.result.n.to_string(),
            fmt_opt(r.result.tau),
            fmt_float(r.tau_effective),
            fmt_float(r.result.peak_ergotropy),
            fmt_float(r.result.max_ergotropy_ref),
            fmt_float(r.result.leakage),
            fmt_float(r.lambda),
            u8::from(r.probe).to_string(),
        ])?;
    }
    let path = csv.finish()?;
    let result = SweepResult { file: file_name(&path), rows, fit, not_achieved, n_star };
    write_summary(spec, out, result, notes, vec![path])
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct BaselineRow {
    n: u32,
    crossing_simulated: Option<f64>,
    crossing_analytic: f64,
}

#[derive(Serialize)]
struct BaselineResult {
    file: String,
    threshold: f64,
    t_end: f64,
    samples: usize,
    rows: Vec<BaselineRow>,
    fit_simulated: Option<ScalingFit>,
    fit_analytic: Option<ScalingFit>,
}

fn baselines(spec: &ExperimentSpec, out: &Path) -> Result<RunOutput, CliError> {
    let Sweep::N(ns) = &spec.sweep else { unreachable!("baselines sweep over N") };
    let grid = spec.baseline_grid()?;
    let times = grid.times();
    let runs = ns
        .par_iter()
        .map(|&n| {
            let model = separable_model_hamiltonian(n, spec.g, spec.omega_a);
            let s = Evolver::new(&model)?.evolve(&separable_initial_state(n), &grid, false)?;
            let analytic: Vec<f64> = times.iter().map(|&t| baseline_separable_population(n, spec.g, t)).collect();
            Ok((n, s.channel(battery::EXCITED).to_vec(), analytic))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let single: Vec<f64> = times.iter().map(|&t| baseline_single_population(spec.g, t)).collect();
    let mut header = vec!["t".to_string(), "single_charger".to_string()];
    let mut columns: Vec<&[f64]> = vec![&single];
    let mut rows = Vec::new();
    for (n, sim, analytic) in &runs {
        header.push(format!("sim_n{n}"));
        header.push(format!("analytic_n{n}"));
        columns.push(sim);
        columns.push(analytic);
        rows.push(BaselineRow {
            n: *n,
            crossing_simulated: first_crossing(&times, sim, spec.threshold),
            crossing_analytic: spec.threshold.sqrt().asin() / ((*n as f64).sqrt() * spec.g),
        });
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = write_series(out.join("baselines.csv"), &header, &times, &columns)?;

    let mut notes = Vec::new();
    let mut fit = |label: &str, pts: Vec<(f64, Option<f64>)>| match scaling_fit(&pts) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("no {label} fit: {e}"));
            None
        }
    };
    let fit_simulated = fit("simulated", rows.iter().map(|r| (r.n as f64, r.crossing_simulated)).collect());
    let fit_analytic = fit("analytic", rows.iter().map(|r| (r.n as f64, Some(r.crossing_analytic))).collect());
    let result = BaselineResult {
        file: file_name(&path),
        threshold: spec.threshold,
        t_end: grid.t_end,
        samples: grid.samples,
        rows,
        fit_simulated,
        fit_analytic,
    };
    write_summary(spec, out, result, notes, vec![path])
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ValidityResult {
    params: ModelParams,
    clean: bool,
    report: ValidityReport,
}

fn validity(spec: &ExperimentSpec, out: &Path) -> Result<RunOutput, CliError> {
    let (_, params) = spec.points()[0];
    let t_char = spec.t_char.unwrap_or_else(|| characteristic_time(&params));
    let report = validity_diagnostics(&params, t_char);

    let mut csv = CsvFile::create(out.join("validity_amplitudes.csv"), &["family", "twice_m", "amplitude"])?;
    for a in &report.amplitudes {
        let family = serde_json::to_value(a.family).expect("family serializes");
        csv.row([family.as_str().unwrap_or_default().to_string(), a.twice_m.to_string(), fmt_opt(a.amplitude)])?;
    }
    let amplitudes = csv.finish()?;
    let report_path = write_json(out.join("validity.json"), &report)?;
    let notes = report.flags.iter().map(|f| format!("validity flag: {f:?}")).collect();
    let result = ValidityResult { params, clean: report.is_clean(), report };
    write_summary(spec, out, result, notes, vec![report_path, amplitudes])
}
