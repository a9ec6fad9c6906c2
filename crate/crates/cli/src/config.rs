//! Experiment configuration files.
//!
//! ```toml
//! [grid]
//! l = 1.0
//! n = 5000
//!
//! [time]
//! T = 0.3
//! m = 1500
//!
//! [physics]
//! alpha = 0.01
//! epsilon = 0.0005
//!
//! [init]
//! kind = "example1"        # example2 | single_mode | tabulated
//!
//! [output]                 # optional
//! stride = 5
//! dir = "out"
//! formats = ["csv", "ppm", "svg"]
//! snapshots = [0.0, 0.02]
//!
//! [probes]                 # optional
//! enabled = ["momentum", "renormalized"]
//!
//! [galerkin]               # optional
//! modes = 64
//! ```
//!
//! Unknown keys are rejected. Errors carry the line number and name the field
//! as `[section].key`.

use std::path::{Path, PathBuf};

use obstring_core::galerkin::GalerkinOptions;
use obstring_core::{Grid1D, InitialData, Physics, SimConfig, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::csv_io;
use crate::error::{CliError, ConfigError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub grid: GridSection,
    pub time: TimeSection,
    pub physics: PhysicsSection,
    pub init: InitSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<ProbeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub galerkin: Option<GalerkinSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub l: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub alpha: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSection {
    Example1 {},
    Example2 {},
    SingleMode {
        amplitude: f64,
        mode: usize,
        offset: f64,
        v0: f64,
    },
    /// CSV with `eta0` and `v0` columns, one row per node. Relative paths are
    /// resolved against the config file's directory.
    Tabulated { file: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Ppm,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Stored-level stride; absent means `max(1, m / 300)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

fn default_dir() -> String {
    "out".into()
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Ppm, Format::Svg]
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            stride: None,
            dir: default_dir(),
            formats: default_formats(),
            snapshots: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Momentum,
    Energy,
    Renormalized,
    Dissipation,
    StressJump,
    VelocityJump,
    ZeroTrace,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 7] = [
        ProbeKind::Momentum,
        ProbeKind::Energy,
        ProbeKind::Renormalized,
        ProbeKind::Dissipation,
        ProbeKind::StressJump,
        ProbeKind::VelocityJump,
        ProbeKind::ZeroTrace,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProbeKind::Momentum => "momentum",
            ProbeKind::Energy => "energy",
            ProbeKind::Renormalized => "renormalized",
            ProbeKind::Dissipation => "dissipation",
            ProbeKind::StressJump => "stress_jump",
            ProbeKind::VelocityJump => "velocity_jump",
            ProbeKind::ZeroTrace => "zero_trace",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default = "all_probes")]
    pub enabled: Vec<ProbeKind>,
    /// Accepted slack of the weak residuals, relative to their term scale.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Mollifier widths in units of `dx`.
    #[serde(default = "default_omega")]
    pub omega: Vec<f64>,
    /// Velocity-jump windows in units of `dt`.
    #[serde(default = "default_windows")]
    pub windows: Vec<f64>,
    /// Stress-jump tube half-width in units of `dx`.
    #[serde(default = "default_tube")]
    pub tube: f64,
    /// `[x0, x1]` averaged by the velocity-jump probe.
    #[serde(default = "default_segment")]
    pub segment: [f64; 2],
}

fn all_probes() -> Vec<ProbeKind> {
    ProbeKind::ALL.to_vec()
}

fn default_tolerance() -> f64 {
    1e-3
}

fn default_omega() -> Vec<f64> {
    vec![8.0, 4.0, 2.0]
}

fn default_windows() -> Vec<f64> {
    vec![8.0, 4.0, 2.0, 1.0]
}

fn default_tube() -> f64 {
    4.0
}

fn default_segment() -> [f64; 2] {
    [0.49, 0.51]
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            enabled: all_probes(),
            tolerance: default_tolerance(),
            omega: default_omega(),
            windows: default_windows(),
            tube: default_tube(),
            segment: default_segment(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalerkinSection {
    pub modes: usize,
    /// Velocity cutoff width; absent means `1 / modes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_vel: Option<f64>,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub file: ConfigFile,
    pub sim: SimConfig,
    pub galerkin: Option<GalerkinOptions>,
}

impl Experiment {
    pub fn probes(&self) -> ProbeSection {
        self.file.probes.clone().unwrap_or_default()
    }
}

/// Parse TOML text into the schema, without building the simulation.
pub fn parse_file(text: &str) -> Result<ConfigFile, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start));
        // missing top-level keys are reported with an empty span at the start
        let section = e
            .span()
            .filter(|s| !(s.start == 0 && s.end == 0))
            .and_then(|s| section_at(text, s.start));
        let message = e.message().trim().to_string();
        let key = message.split('`').nth(1).map(str::to_string);
        let field = match (section, key) {
            (Some(s), Some(k)) => format!("[{s}].{k}"),
            (None, Some(k)) => format!("[{k}]"),
            (Some(s), None) => format!("[{s}]"),
            (None, None) => "config".into(),
        };
        ConfigError {
            line,
            field,
            reason: message,
        }
    })
}

/// Parse and validate. `base` resolves relative tabulated-data paths.
pub fn parse_config(text: &str, base: &Path) -> Result<Experiment, CliError> {
    let file = parse_file(text)?;
    build(file, text, base)
}

pub fn emit(file: &ConfigFile) -> String {
    toml::to_string(file).expect("config schema is always serializable")
}

/// Read and parse a config file from disk.
pub fn load(path: &Path) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config(&text, &base)
}

/// Validate a schema value. `text` is only used to locate errors.
pub fn build(mut file: ConfigFile, text: &str, base: &Path) -> Result<Experiment, CliError> {
    let tabulated = matches!(file.init, InitSection::Tabulated { .. });
    let locate = |e: obstring_core::ConfigError| -> CliError {
        let (section, key) = e.field.split_once('.').unwrap_or((e.field.as_str(), ""));
        let (section, key) = match (section, key) {
            ("init", "eta0" | "v0") if tabulated => ("init", "file"),
            ("init", "") => ("init", "kind"),
            other => other,
        };
        ConfigError {
            line: key_line(text, section, key),
            field: format!("[{section}].{key}"),
            reason: e.reason,
        }
        .into()
    };

    let grid = Grid1D::new(file.grid.l, file.grid.n).map_err(locate)?;
    let time = TimeGrid::new(file.time.horizon, file.time.m).map_err(locate)?;
    let physics = Physics::new(file.physics.alpha, file.physics.epsilon).map_err(locate)?;
    let init = match &mut file.init {
        InitSection::Example1 {} => InitialData::Example1,
        InitSection::Example2 {} => InitialData::Example2,
        InitSection::SingleMode {
            amplitude,
            mode,
            offset,
            v0,
        } => {
            if *mode == 0 {
                return Err(invalid(text, "init", "mode", "must be >= 1"));
            }
            InitialData::SingleMode {
                amplitude: *amplitude,
                mode: *mode,
                offset: *offset,
                v0: *v0,
            }
        }
        InitSection::Tabulated { file: path } => {
            let resolved = resolve(base, path);
            let (eta0, v0) = csv_io::read_initial(&resolved)
                .map_err(|reason| invalid(text, "init", "file", &format!("{}: {reason}", resolved.display())))?;
            // keep the snapshot self-contained for later probe/render runs
            *path = resolved.to_string_lossy().into_owned();
            InitialData::Tabulated { eta0, v0 }
        }
    };
    let sim = SimConfig::new(grid, time, physics, init, file.output.stride).map_err(locate)?;

    let galerkin = match &file.galerkin {
        None => None,
        Some(g) => {
            if g.modes == 0 || grid.cells() < 4 * g.modes {
                return Err(invalid(
                    text,
                    "galerkin",
                    "modes",
                    &format!("need 1 <= modes <= n / 4 = {}", grid.cells() / 4),
                ));
            }
            if let Some(d) = g.delta_vel {
                if !(d.is_finite() && d > 0.0) {
                    return Err(invalid(text, "galerkin", "delta_vel", "must be > 0"));
                }
            }
            Some(GalerkinOptions {
                n_modes: g.modes,
                delta_vel: g.delta_vel,
                output_stride: sim.output_stride(),
            })
        }
    };

    if let Some(p) = &file.probes {
        if !(p.tolerance.is_finite() && p.tolerance >= 0.0) {
            return Err(invalid(text, "probes", "tolerance", "must be >= 0"));
        }
        if p.omega.iter().chain(&p.windows).any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid(text, "probes", "omega", "widths must be > 0"));
        }
        if !(p.tube.is_finite() && p.tube > 0.0) {
            return Err(invalid(text, "probes", "tube", "must be > 0"));
        }
        if !(p.segment[0] < p.segment[1]) {
            return Err(invalid(text, "probes", "segment", "need x0 < x1"));
        }
    }
    if file.output.snapshots.iter().any(|t| !t.is_finite()) {
        return Err(invalid(text, "output", "snapshots", "times must be finite"));
    }

    Ok(Experiment { file, sim, galerkin })
}

fn resolve(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn invalid(text: &str, section: &str, key: &str, reason: &str) -> CliError {
    ConfigError {
        line: key_line(text, section, key),
        field: format!("[{section}].{key}"),
        reason: reason.into(),
    }
    .into()
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn header(line: &str) -> Option<&str> {
    let t = line.trim();
    t.strip_prefix('[')?.split(']').next().map(str::trim)
}

/// Section whose header most recently precedes `offset`.
fn section_at(text: &str, offset: usize) -> Option<String> {
    // the line holding `offset` counts, since a table's span starts at its header
    let offset = offset.min(text.len());
    let end = text[offset..].find('\n').map_or(text.len(), |k| offset + k);
    text[..end]
        .lines()
        .rev()
        .find_map(header)
        .map(str::to_string)
}

/// Line of `key = ...` inside `[section]`, or of the header when the key is absent.
fn key_line(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = None;
    let mut header_line = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(h) = header(line) {
            current = Some(h.to_string());
            if h == section {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current.as_deref() == Some(section) {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}

/// Preset configuration files shipped with the binary.
pub mod presets {
    pub const EXAMPLE1: &str = include_str!("../presets/example1.toml");
    pub const EXAMPLE2: &str = include_str!("../presets/example2.toml");
    pub const SINGLE_MODE: &str = include_str!("../presets/single_mode.toml");

    pub const ALL: [(&str, &str); 3] = [("example1", EXAMPLE1), ("example2", EXAMPLE2), ("single_mode", SINGLE_MODE)];
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\nl = 1.0\nn = 10\n\n[time]\nT = 0.1\nm = 10\n\n[physics]\nalpha = 0.01\nepsilon = 0.001\n\n[init]\nkind = \"example1\"\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let exp = parse_config(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(exp.file.output, OutputSection::default());
        assert_eq!(exp.sim.output_stride(), 1);
        assert!(exp.galerkin.is_none());
    }

    #[test]
    fn missing_epsilon_named_with_line() {
        let text = MINIMAL.replace("epsilon = 0.001\n", "");
        let err = parse_file(&text).unwrap_err();
        assert_eq!(err.field, "[physics].epsilon");
        assert!(err.line.is_some());
    }

    #[test]
    fn unknown_key_rejected_at_its_line() {
        let text = MINIMAL.replace("alpha = 0.01", "alpha = 0.01\nbeta = 2.0");
        let err = parse_file(&text).unwrap_err();
        assert_eq!(err.field, "[physics].beta");
        assert_eq!(err.line, Some(11));
    }

    #[test]
    fn unknown_init_field_rejected() {
        let text = MINIMAL.replace("kind = \"example1\"", "kind = \"example1\"\nspeed = 3");
        assert!(parse_file(&text).is_err());
    }

    #[test]
    fn missing_section_named() {
        let text = MINIMAL.replace("[physics]\nalpha = 0.01\nepsilon = 0.001\n", "");
        assert_eq!(parse_file(&text).unwrap_err().field, "[physics]");
    }

    #[test]
    fn validation_error_points_at_key() {
        let text = MINIMAL.replace("epsilon = 0.001", "epsilon = -1.0");
        let Err(CliError::Config(err)) = parse_config(&text, Path::new(".")) else {
            panic!("expected a config error");
        };
        assert_eq!(err.field, "[physics].epsilon");
        assert_eq!(err.line, Some(11));
    }

    #[test]
    fn galerkin_needs_enough_cells() {
        let text = format!("{MINIMAL}\n[galerkin]\nmodes = 4\n");
        let Err(CliError::Config(err)) = parse_config(&text, Path::new(".")) else {
            panic!("expected a config error");
        };
        assert_eq!(err.field, "[galerkin].modes");
    }

    #[test]
    fn presets_round_trip() {
        for (name, text) in presets::ALL {
            let file = parse_file(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(parse_file(&emit(&file)).unwrap(), file, "{name}");
        }
    }

    #[test]
    fn example_presets_match_the_experiments() {
        let e1 = parse_config(presets::EXAMPLE1, Path::new(".")).unwrap().sim;
        assert_eq!(e1.grid().cells(), 5000);
        assert_eq!(e1.time().steps(), 1500);
        assert!((e1.time().horizon() - 0.3).abs() < 1e-15);
        assert_eq!((e1.physics().alpha(), e1.physics().epsilon()), (0.01, 0.0005));
        assert!((e1.time().dt() - e1.grid().dx()).abs() < 1e-18);
        let e2 = parse_config(presets::EXAMPLE2, Path::new(".")).unwrap().sim;
        assert!((e2.time().horizon() - 0.5).abs() < 1e-15);
        assert_eq!(e2.init(), &InitialData::Example2);
    }
}
