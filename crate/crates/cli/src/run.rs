use std::fmt;
use std::io;
use std::path::PathBuf;

use ionospec_core::fano::{fano_spectrum, FanoParams};
use ionospec_core::oracle::{compare, discretize, EvolveOptions};
use ionospec_core::spectra::{
    checked_normalization, decompose_intensity, default_window, spectrum_grid, time_resolved_intensity,
    LongTimeSpectrum, PresetKind, PresetModel, SpectralDecomposition,
};
use ionospec_core::zeros::{default_zero_range, find_dynamical_zeros, sweep_zero_traces, PairEvent, SweepOptions};
use ionospec_core::{EffectiveSystem, InitialState, NormalizedParams};
use serde::Serialize;

use crate::config::{ConfigError, Format, Mode, RunConfig};
use crate::export::{with_output, write_csv, write_json, Cell, Table};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Model(ionospec_core::Error),
    Io(io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Model(_) | RunError::Io(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Model(e) => write!(f, "{}: {e}", e.name()),
            RunError::Io(e) => write!(f, "Io: {e}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<ionospec_core::Error> for RunError {
    fn from(e: ionospec_core::Error) -> Self {
        RunError::Model(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn window(cfg: &RunConfig, params: &NormalizedParams) -> Result<(f64, f64, usize)> {
    let (lo, hi, n) = match &cfg.preset {
        Some(p) => {
            let (c, g) = match p.model {
                PresetModel::Neighbor => (params.e_a, params.gamma_a),
                PresetModel::Fano => (params.e_b, params.gamma_b),
            };
            (c + g * p.reduced_window.0, c + g * p.reduced_window.1, p.n_points)
        }
        None => default_window(params)?,
    };
    let (lo, hi) = (cfg.grid.e_min.unwrap_or(lo), cfg.grid.e_max.unwrap_or(hi));
    if lo >= hi {
        return Err(ConfigError(format!("energy window [{lo}, {hi}] is empty")).into());
    }
    Ok((lo, hi, cfg.grid.points.unwrap_or(n)))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
}

fn emit(cfg: &RunConfig, table: &Table) -> Result<()> {
    let mode = cfg.mode.name();
    with_output(cfg.out.as_deref(), |w| match cfg.format {
        Format::Csv => write_csv(w, mode, table),
        Format::Json => write_json(w, table),
    })?;
    Ok(())
}

fn spectrum(cfg: &RunConfig, params: &NormalizedParams) -> Result<SpectralDecomposition> {
    let (lo, hi, n) = window(cfg, params)?;
    let dec = spectrum_grid(params, lo, hi, n)?;
    if dec.narrow_window {
        warn(&format!(
            "window [{lo}, {hi}] holds only {:.4} of the spectrum",
            dec.window_fraction
        ));
    }
    Ok(dec)
}

fn spectrum_table(dec: &SpectralDecomposition) -> Table {
    let mut t = Table::new(&["E", "I_lt", "I_st0", "I_st1", "I_osc", "phi0", "phi1"]);
    for i in 0..dec.len() {
        t.push(
            [dec.grid[i], dec.i_lt[i], dec.i_st0[i], dec.i_st1[i], dec.i_osc[i], dec.phi0[i], dec.phi1[i]]
                .map(Cell::Num)
                .to_vec(),
        );
    }
    t
}

fn decompose(cfg: &RunConfig) -> Result<Table> {
    let p = &cfg.params;
    let (lo, hi, n) = window(cfg, p)?;
    let sys = EffectiveSystem::new(p.to_physical()?)?;
    let lt = LongTimeSpectrum::new(&sys, &InitialState::ground())?;
    let norm = checked_normalization(&lt)?;
    let mut t = Table::new(&["E_reduced", "I_st0", "I_st1", "I_osc0", "I_osc1", "phi0", "phi1"]);
    for e in linspace(lo, hi, n) {
        let d = decompose_intensity(&lt.amplitudes(e));
        t.push(
            [
                p.reduced_energy(e),
                d.i_st[0] / norm,
                d.i_st[1] / norm,
                d.i_osc_each[0] / norm,
                d.i_osc_each[1] / norm,
                d.phi[0],
                d.phi[1],
            ]
            .map(Cell::Num)
            .to_vec(),
        );
    }
    Ok(t)
}

fn time_resolved(cfg: &RunConfig) -> Result<Table> {
    let dec = spectrum(cfg, &cfg.params)?;
    let mut t = Table::new(&["t", "E", "I0", "I1"]);
    for &time in &cfg.times {
        for i in 0..dec.len() {
            let (a, b) = time_resolved_intensity(&dec, i, time)?;
            t.push(vec![Cell::Num(time), Cell::Num(dec.grid[i]), Cell::Num(a), Cell::Num(b)]);
        }
    }
    Ok(t)
}

fn indices(cfg: &RunConfig) -> Vec<usize> {
    match cfg.spectrum_index {
        Some(j) => vec![j],
        None => vec![0, 1],
    }
}

fn zeros(cfg: &RunConfig) -> Result<Table> {
    let p = &cfg.params;
    let mut t = Table::new(&["spectrum_index", "E_D", "E_reduced"]);
    for j in indices(cfg) {
        let (lo, hi) = default_zero_range(p, j)?;
        let range = (cfg.grid.e_min.unwrap_or(lo), cfg.grid.e_max.unwrap_or(hi));
        for e in find_dynamical_zeros(p, j, range)? {
            t.push(vec![Cell::Int(j), Cell::Num(e), Cell::Num(p.reduced_energy(e))]);
        }
    }
    Ok(t)
}

#[derive(Serialize)]
struct Events<'a> {
    events: &'a [PairEvent],
}

fn events_path(cfg: &RunConfig) -> Result<PathBuf> {
    if let Some(p) = &cfg.sweep.events {
        return Ok(p.clone());
    }
    match &cfg.out {
        Some(out) => Ok(out.with_extension("events.json")),
        None => Err(ConfigError("a sweep writing to standard output needs `events` for its event file".into()).into()),
    }
}

fn sweep(cfg: &RunConfig) -> Result<()> {
    let events_out = events_path(cfg)?;
    let opts = SweepOptions {
        e_range: match (cfg.grid.e_min, cfg.grid.e_max) {
            (None, None) => None,
            (a, b) => {
                let (lo, hi) = default_zero_range(&cfg.params, 0)?;
                Some((a.unwrap_or(lo), b.unwrap_or(hi)))
            }
        },
        ..SweepOptions::default()
    };
    let mut table = Table::new(&["omega", "branch_id", "E_D", "spectrum_index"]);
    let mut events = Vec::new();
    let mut next_id = 0;
    for j in indices(cfg) {
        let trace = sweep_zero_traces(&cfg.params, &cfg.sweep.omegas, j, &opts)?;
        // Branch ids are unique across both spectra.
        for b in &trace.branches {
            for (om, e) in b.omega.iter().zip(&b.e_d) {
                table.push(vec![Cell::Num(*om), Cell::Int(next_id + b.id), Cell::Num(*e), Cell::Int(j)]);
            }
        }
        next_id += trace.branches.len();
        events.extend(trace.events);
    }
    with_output(Some(&events_out), |w| write_json(w, &Events { events: &events }))?;
    emit(cfg, &table)
}

fn fano(cfg: &RunConfig, params: &NormalizedParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi, n) = window(cfg, params)?;
    let s = fano_spectrum(&FanoParams::from_normalized(params)?, &linspace(lo, hi, n))?;
    if s.narrow_window {
        warn(&format!("window [{lo}, {hi}] holds only {:.4} of the spectrum", s.window_fraction));
    }
    Ok((s.grid, s.i_lt))
}

#[derive(Serialize)]
struct OracleReport {
    max_err_c: f64,
    rms_err_d: f64,
    rms_err_spectrum: Option<f64>,
    t_final: f64,
    n_levels: usize,
    max_norm_drift: f64,
}

fn oracle_check(cfg: &RunConfig) -> Result<()> {
    let o = &cfg.oracle;
    let p = cfg.params.to_physical()?;
    let disc = discretize(&p, o.half_width, o.levels)?;
    let sys = EffectiveSystem::new(p)?;
    let opts = EvolveOptions {
        tol: o.tol,
        samples: o.samples,
        ..EvolveOptions::default()
    };
    let r = compare(&disc, &sys, &InitialState::ground(), o.t_final, &opts)?;
    let report = OracleReport {
        max_err_c: r.max_err_c,
        rms_err_d: r.rms_err_d,
        rms_err_spectrum: r.rms_err_spectrum,
        t_final: r.t_final,
        n_levels: r.n_levels,
        max_norm_drift: r.max_norm_drift,
    };
    with_output(cfg.out.as_deref(), |w| write_json(w, &report))?;
    Ok(())
}

fn preset(cfg: &RunConfig) -> Result<()> {
    let preset = cfg.preset.as_ref().expect("preset mode carries a preset");
    match preset.kind {
        PresetKind::ZeroSweep => {
            if cfg.omega_set {
                return Err(ConfigError(format!(
                    "preset {} sweeps Omega; set omega-max/omega-step instead of omega",
                    preset.name
                ))
                .into());
            }
            sweep(cfg)
        }
        PresetKind::Decomposition => emit(cfg, &spectrum_table(&spectrum(cfg, &cfg.params)?)),
        PresetKind::Spectra => {
            let omegas = if cfg.omega_set { vec![cfg.params.omega] } else { preset.omegas.clone() };
            let mut t = Table::new(&["omega", "E", "E_reduced", "I_lt"]);
            for om in omegas {
                let p = cfg.params.with_omega(om);
                let (grid, values, center, width) = match preset.model {
                    PresetModel::Neighbor => {
                        let d = spectrum(cfg, &p)?;
                        (d.grid, d.i_lt, p.e_a, p.gamma_a)
                    }
                    PresetModel::Fano => {
                        let (g, v) = fano(cfg, &p)?;
                        (g, v, p.e_b, p.gamma_b)
                    }
                };
                for (e, v) in grid.into_iter().zip(values) {
                    t.push(vec![Cell::Num(om), Cell::Num(e), Cell::Num((e - center) / width), Cell::Num(v)]);
                }
            }
            emit(cfg, &t)
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    match cfg.mode {
        Mode::Spectrum => emit(cfg, &spectrum_table(&spectrum(cfg, &cfg.params)?)),
        Mode::Decompose => emit(cfg, &decompose(cfg)?),
        Mode::TimeResolved => emit(cfg, &time_resolved(cfg)?),
        Mode::Zeros => emit(cfg, &zeros(cfg)?),
        Mode::Sweep => sweep(cfg),
        Mode::Fano => {
            let (grid, values) = fano(cfg, &cfg.params)?;
            let mut t = Table::new(&["E", "I_lt"]);
            for (e, v) in grid.into_iter().zip(values) {
                t.push(vec![Cell::Num(e), Cell::Num(v)]);
            }
            emit(cfg, &t)
        }
        Mode::OracleCheck => oracle_check(cfg),
        Mode::Preset => preset(cfg),
    }
}
