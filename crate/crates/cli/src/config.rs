//! Run configuration: a flat `key = value` file merged with command-line flags.
//!
//! Every file key has a flag of the same name (`omega = 2` ↔ `--omega 2`).
//! Flags win over the file. Keys a mode does not use are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};
use ionospec_core::spectra::{default_sweep_omegas, figure_preset, FigurePreset, PRESET_NAMES};
use ionospec_core::NormalizedParams;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Decompose,
    TimeResolved,
    Zeros,
    Sweep,
    Fano,
    OracleCheck,
    Preset,
}

impl Mode {
    pub const ALL: [Mode; 8] = [
        Mode::Spectrum,
        Mode::Decompose,
        Mode::TimeResolved,
        Mode::Zeros,
        Mode::Sweep,
        Mode::Fano,
        Mode::OracleCheck,
        Mode::Preset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Decompose => "decompose",
            Mode::TimeResolved => "time-resolved",
            Mode::Zeros => "zeros",
            Mode::Sweep => "sweep",
            Mode::Fano => "fano",
            Mode::OracleCheck => "oracle-check",
            Mode::Preset => "preset",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Mode::Spectrum => "Normalized long-time spectrum with its steady/oscillating decomposition",
            Mode::Decompose => "Per-spectrum decomposition on the reduced energy axis",
            Mode::TimeResolved => "Conditional spectra I_j(E, t) at the requested times",
            Mode::Zeros => "Dynamical zeros of the conditional spectra",
            Mode::Sweep => "Dynamical-zero branches versus pump strength",
            Mode::Fano => "Long-time spectrum of the Fano reference model",
            Mode::OracleCheck => "Compare the analytic solution with a discretized continuum",
            Mode::Preset => "Run a figure preset end to end",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Keys this mode reads, besides `mode`, `out` and `format`.
    fn keys(self) -> &'static [&'static str] {
        const NEIGHBOR: &[&str] = &["qa", "gamma-a", "omega", "ea", "el", "e-min", "e-max", "points"];
        match self {
            Mode::Spectrum | Mode::Decompose => NEIGHBOR,
            Mode::TimeResolved => &["qa", "gamma-a", "omega", "ea", "el", "e-min", "e-max", "points", "times"],
            Mode::Zeros => &["qa", "gamma-a", "omega", "ea", "el", "e-min", "e-max", "j"],
            Mode::Sweep => &["qa", "gamma-a", "ea", "el", "e-min", "e-max", "j", "omega-max", "omega-step", "events"],
            Mode::Fano => &["qb", "gamma-b", "omega", "eb", "el", "e-min", "e-max", "points"],
            Mode::OracleCheck => &["qa", "gamma-a", "omega", "ea", "el", "levels", "half-width", "t-final", "tol", "samples"],
            Mode::Preset => &[
                "preset", "qa", "gamma-a", "qb", "gamma-b", "omega", "ea", "eb", "el", "e-min", "e-max", "points", "j",
                "omega-max", "omega-step", "events",
            ],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// (key, value name, help)
pub const KEYS: &[(&str, &str, &str)] = &[
    ("mode", "MODE", "Mode; must agree with the subcommand when given in a file"),
    ("preset", "NAME", "Figure preset name"),
    ("qa", "Q", "Fano parameter q_a of the neighbor"),
    ("gamma-a", "G", "Interatomic decay width gamma_a"),
    ("qb", "Q", "Fano parameter q_b of the reference model"),
    ("gamma-b", "G", "Autoionization width gamma_b of the reference model"),
    ("omega", "W", "Rabi frequency Omega"),
    ("ea", "E", "Excitation energy E_a of the neighbor"),
    ("eb", "E", "Excitation energy E_b of the reference model"),
    ("el", "E", "Pump photon energy E_L"),
    ("e-min", "E", "Lower end of the energy window"),
    ("e-max", "E", "Upper end of the energy window"),
    ("points", "N", "Number of grid points"),
    ("times", "T,...", "Comma-separated observation times"),
    ("j", "J", "Conditional spectrum index (0 or 1); both when omitted"),
    ("omega-max", "W", "Largest |Omega| of a sweep"),
    ("omega-step", "W", "Omega spacing of a sweep"),
    ("events", "PATH", "Where a sweep writes its pair events (JSON)"),
    ("levels", "N", "Levels per discretized continuum (odd)"),
    ("half-width", "E", "Half-width of the discretized continuum"),
    ("t-final", "T", "Final time of the oracle run"),
    ("tol", "X", "Local error tolerance per unit time of the oracle integrator"),
    ("samples", "N", "Sampling intervals of the oracle run"),
    ("out", "PATH", "Output file; standard output when omitted"),
    ("format", "FMT", "csv or json"),
];

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Energy window; missing ends are filled from the default window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridSpec {
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub omegas: Vec<f64>,
    pub events: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpec {
    pub levels: usize,
    pub half_width: f64,
    pub t_final: f64,
    pub tol: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: NormalizedParams,
    pub preset: Option<FigurePreset>,
    /// Ω was given explicitly (restricts a multi-Ω preset to that value).
    pub omega_set: bool,
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub spectrum_index: Option<usize>,
    pub sweep: SweepSpec,
    pub oracle: OracleSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Configuration error with the offending line or flag in the message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Origin {
    File { path: String, line: usize },
    Flag,
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    origin: Origin,
}

impl Entry {
    fn locate(&self, key: &str) -> String {
        match &self.origin {
            Origin::File { path, line } => format!("{path}:{line}: `{key}`"),
            Origin::Flag => format!("--{key}"),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
fn parse_file(text: &str, path: &str) -> Result<BTreeMap<String, Entry>, ConfigError> {
    let mut out: BTreeMap<String, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return err(format!("{path}:{line}: expected `key = value`, got `{body}`"));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return err(format!("{path}:{line}: unknown key `{key}`"));
        }
        if value.is_empty() {
            return err(format!("{path}:{line}: `{key}` has no value"));
        }
        if let Some(prev) = out.get(key) {
            if let Origin::File { line: first, .. } = prev.origin {
                return err(format!("{path}:{line}: `{key}` already set on line {first}"));
            }
        }
        out.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                origin: Origin::File { path: path.to_string(), line },
            },
        );
    }
    Ok(out)
}

pub fn command() -> Command {
    let mut cmd = Command::new("ionospec")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Photoionization spectra of a system with a driven neighbor atom")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for mode in Mode::ALL {
        let mut sub = Command::new(mode.name()).about(mode.about()).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("Read keys from a `key = value` file; flags override it"),
        );
        if mode == Mode::Preset {
            sub = sub.arg(
                Arg::new("name")
                    .value_name("NAME")
                    .help(format!("One of {}", PRESET_NAMES.join(", "))),
            );
        }
        for (key, value_name, help) in KEYS {
            if *key == "mode" || (mode == Mode::Preset && *key == "preset") {
                continue;
            }
            sub = sub.arg(
                Arg::new(*key)
                    .long(*key)
                    .value_name(*value_name)
                    .help(*help)
                    .allow_negative_numbers(true),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

/// Builds a validated configuration from parsed command-line arguments.
pub fn from_matches(matches: &ArgMatches) -> Result<RunConfig, ConfigError> {
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let mode = Mode::parse(name).expect("subcommands mirror Mode::ALL");
    let mut entries = match sub.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|e| ConfigError(format!("cannot read config file {path}: {e}")))?;
            parse_file(&text, path)?
        }
        None => BTreeMap::new(),
    };
    if let Some(entry) = entries.get("mode") {
        if entry.value != mode.name() {
            return err(format!(
                "{} is `{}` but the command line selects `{mode}`: conflicting modes",
                entry.locate("mode"),
                entry.value
            ));
        }
        entries.remove("mode");
    }
    if mode == Mode::Preset {
        if let Some(name) = sub.get_one::<String>("name") {
            entries.insert("preset".into(), Entry { value: name.clone(), origin: Origin::Flag });
        }
    }
    for (key, _, _) in KEYS {
        if *key == "mode" || (mode == Mode::Preset && *key == "preset") {
            continue;
        }
        if let Some(v) = sub.get_one::<String>(key) {
            entries.insert((*key).into(), Entry { value: v.clone(), origin: Origin::Flag });
        }
    }
    build(mode, entries)
}

/// Parses a configuration from argument strings (without the program name).
pub fn parse_args<I, S>(args: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("ionospec")).chain(args.into_iter().map(Into::into));
    let matches = command().try_get_matches_from(argv).map_err(|e| ConfigError(e.to_string()))?;
    from_matches(&matches)
}

struct Reader {
    mode: Mode,
    entries: BTreeMap<String, Entry>,
}

impl Reader {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn num(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.raw(key) else { return Ok(None) };
        match e.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => err(format!("{} expects a finite number, got `{}`", e.locate(key), e.value)),
        }
    }

    fn required(&self, key: &str) -> Result<f64, ConfigError> {
        self.num(key)?
            .ok_or_else(|| ConfigError(format!("{} mode needs `{key}` (--{key} or `{key} = ...`)", self.mode)))
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        let Some(e) = self.raw(key) else { return Ok(None) };
        e.value
            .parse::<usize>()
            .map(Some)
            .map_err(|_| ConfigError(format!("{} expects a non-negative integer, got `{}`", e.locate(key), e.value)))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.raw(key) else { return Ok(None) };
        let mut out = Vec::new();
        for part in e.value.split(',') {
            match part.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => return err(format!("{} expects finite numbers, got `{}`", e.locate(key), part.trim())),
            }
        }
        Ok(Some(out))
    }
}

fn build(mode: Mode, entries: BTreeMap<String, Entry>) -> Result<RunConfig, ConfigError> {
    for (key, entry) in &entries {
        if key != "out" && key != "format" && !mode.keys().contains(&key.as_str()) {
            return err(format!("{} is not used by {mode} mode", entry.locate(key)));
        }
    }
    let r = Reader { mode, entries };

    let format = match r.raw("format") {
        None if mode == Mode::OracleCheck => Format::Json,
        None => Format::Csv,
        Some(e) => match e.value.as_str() {
            "csv" if mode == Mode::OracleCheck => {
                return err(format!("{}: oracle-check writes a JSON report", e.locate("format")))
            }
            "json" if matches!(mode, Mode::Sweep | Mode::Preset) => {
                return err(format!("{}: {mode} mode writes CSV", e.locate("format")))
            }
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return err(format!("{} must be `csv` or `json`, got `{other}`", e.locate("format"))),
        },
    };

    let preset = match mode {
        Mode::Preset => {
            let name = r
                .raw("preset")
                .ok_or_else(|| ConfigError(format!("preset mode needs a name: one of {}", PRESET_NAMES.join(", "))))?;
            Some(figure_preset(&name.value).map_err(|_| {
                ConfigError(format!(
                    "{}: unknown preset `{}` (expected one of {})",
                    name.locate("preset"),
                    name.value,
                    PRESET_NAMES.join(", ")
                ))
            })?)
        }
        _ => None,
    };

    let omega_set = r.raw("omega").is_some();
    let params = match &preset {
        Some(p) => {
            let mut q = p.params;
            let overrides: [(&str, &mut f64); 8] = [
                ("qa", &mut q.q_a),
                ("gamma-a", &mut q.gamma_a),
                ("qb", &mut q.q_b),
                ("gamma-b", &mut q.gamma_b),
                ("omega", &mut q.omega),
                ("ea", &mut q.e_a),
                ("eb", &mut q.e_b),
                ("el", &mut q.e_l),
            ];
            for (key, slot) in overrides {
                if let Some(v) = r.num(key)? {
                    *slot = v;
                }
            }
            q
        }
        None if mode == Mode::Fano => {
            let eb = r.num("eb")?.unwrap_or(1.0);
            NormalizedParams::fano(
                r.required("qb")?,
                r.required("gamma-b")?,
                r.required("omega")?,
                eb,
                r.num("el")?.unwrap_or(eb),
            )
        }
        None => {
            let ea = r.num("ea")?.unwrap_or(1.0);
            let omega = if mode == Mode::Sweep { 1.0 } else { r.required("omega")? };
            NormalizedParams::neighbor(r.required("qa")?, r.required("gamma-a")?, omega, ea, r.num("el")?.unwrap_or(ea))
        }
    };

    let grid = GridSpec {
        e_min: r.num("e-min")?,
        e_max: r.num("e-max")?,
        points: r.count("points")?,
    };
    if let (Some(a), Some(b)) = (grid.e_min, grid.e_max) {
        if a >= b {
            return err(format!("energy window [{a}, {b}] is empty: e-min must be below e-max"));
        }
    }
    if grid.points.is_some_and(|n| n < 2) {
        return err("`points` must be at least 2");
    }

    let times = match r.list("times")? {
        Some(t) => {
            if t.iter().any(|x| *x < 0.0) {
                return err("`times` must be non-negative");
            }
            t
        }
        None if mode == Mode::TimeResolved => return err("time-resolved mode needs `times`"),
        None => Vec::new(),
    };

    let spectrum_index = match r.count("j")? {
        Some(j) if j > 1 => return err(format!("`j` must be 0 or 1, got {j}")),
        other => other,
    };

    let omegas = {
        let max = r.num("omega-max")?;
        let step = r.num("omega-step")?;
        match (max, step) {
            (None, None) => match &preset {
                Some(p) => p.omegas.clone(),
                None => default_sweep_omegas(),
            },
            (max, step) => {
                let (max, step) = (max.unwrap_or(4.0), step.unwrap_or(0.02));
                if !(max > 0.0 && step > 0.0) {
                    return err("`omega-max` and `omega-step` must be positive");
                }
                let n = (max / step + 1e-9).floor() as usize;
                if n > 100_000 {
                    return err(format!("sweep of {n} steps is too fine"));
                }
                let pos: Vec<f64> = std::iter::once(0.001).chain((1..=n).map(|i| step * i as f64)).collect();
                let mut all: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
                all.extend(pos);
                all
            }
        }
    };

    let oracle = OracleSpec {
        levels: r.count("levels")?.unwrap_or(2001),
        half_width: r.num("half-width")?.unwrap_or(40.0),
        t_final: r.num("t-final")?.unwrap_or(8.0),
        tol: r.num("tol")?.unwrap_or(1e-6),
        samples: r.count("samples")?.unwrap_or(40),
    };
    if oracle.samples == 0 || !(oracle.tol > 0.0) || !(oracle.t_final > 0.0) {
        return err("`samples`, `tol` and `t-final` must be positive");
    }

    Ok(RunConfig {
        mode,
        params,
        preset,
        omega_set,
        grid,
        times,
        spectrum_index,
        sweep: SweepSpec {
            omegas,
            events: r.raw("events").map(|e| PathBuf::from(&e.value)),
        },
        oracle,
        out: r.raw("out").map(|e| PathBuf::from(&e.value)),
        format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let m = parse_file("# header\n\nqa = 1 # trailing\n  omega=2\n", "f.cfg").unwrap();
        assert_eq!(m["qa"].value, "1");
        assert_eq!(m["omega"].value, "2");
        assert_eq!(m["omega"].origin, Origin::File { path: "f.cfg".into(), line: 4 });
    }

    #[test]
    fn file_errors_name_the_line() {
        assert!(parse_file("qa = 1\nbogus = 3\n", "f").unwrap_err().0.starts_with("f:2: unknown key"));
        assert!(parse_file("qa 1\n", "f").unwrap_err().0.starts_with("f:1: expected"));
        assert!(parse_file("qa = 1\nqa = 2\n", "f").unwrap_err().0.contains("already set on line 1"));
    }

    #[test]
    fn every_key_has_a_flag() {
        let cmd = command();
        let sub = cmd.find_subcommand("preset").unwrap();
        for (key, _, _) in KEYS {
            if *key != "mode" && *key != "preset" {
                assert!(sub.get_arguments().any(|a| a.get_id() == *key), "{key}");
            }
        }
    }
}
