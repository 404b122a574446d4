//! Run configuration shared by every subcommand, serialisable as TOML.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use mirrorcut::experiments::{SweepParameter, DEFAULT_CUTOFF, DEFAULT_HEATMAP_SIZE, DEFAULT_NBARS};
use mirrorcut::{CavityGeometry, LogBase, TruncationConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Sweep,
    Validate,
    Converge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    #[default]
    Vacuum,
    Tms,
    Stripped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    #[default]
    VacuumNegativity,
    VacuumParticles,
    CoherentParticles,
    TotalParticles,
    Defect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ParameterKind {
    Nbar,
    #[default]
    S,
    Theta,
    Rho,
    Phi,
}

impl ParameterKind {
    pub fn to_core(self) -> SweepParameter {
        match self {
            ParameterKind::Nbar => SweepParameter::Nbar,
            ParameterKind::S => SweepParameter::S,
            ParameterKind::Theta => SweepParameter::Theta,
            ParameterKind::Rho => SweepParameter::Rho,
            ParameterKind::Phi => SweepParameter::Phi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    /// Cavity length `R`.
    pub length: f64,
    /// Mirror position as a fraction of `R`, written `p/q`.
    pub mirror: String,
}

/// Closed grid `start..=stop` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        mirrorcut::experiments::linspace(self.start, self.stop, self.count)
    }

    fn check(&self, field: &str, min: Option<f64>) -> Result<(), CliError> {
        if self.count == 0 {
            return Err(CliError::config(format!("{field}.count"), "must be >= 1"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::config(field, "bounds must be finite"));
        }
        if self.start > self.stop {
            return Err(CliError::config(field, format!("start {} exceeds stop {}", self.start, self.stop)));
        }
        if let Some(min) = min {
            if self.start < min {
                return Err(CliError::config(format!("{field}.start"), format!("must be >= {min}")));
            }
        }
        Ok(())
    }
}

/// Parameters of the input state. Angles are radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateParams {
    pub k: usize,
    pub k2: usize,
    pub rho: f64,
    #[serde(deserialize_with = "de_angle")]
    pub phi: f64,
    pub nbar: f64,
    pub s: f64,
    #[serde(deserialize_with = "de_angle")]
    pub theta: f64,
    pub initial: InitialKind,
}

impl Default for StateParams {
    fn default() -> Self {
        Self { k: 1, k2: 2, rho: 1.0, phi: 0.0, nbar: 0.0, s: 0.0, theta: 0.0, initial: InitialKind::Vacuum }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Mirror-insertion phase for the coherent phase sweep.
    pub phi: Grid,
    /// Initial particle number for the single-mode family comparison.
    pub particles: Grid,
    /// Squeezing for the temperature scan.
    pub squeezing: Grid,
    /// Values of `options.parameter` for the generic sweep.
    pub sweep: Grid,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            phi: Grid::new(0.0, PI, 97),
            particles: Grid::new(0.0, 1.0, 41),
            squeezing: Grid::new(0.0, 3.0, 61),
            sweep: Grid::new(0.0, 1.0, 11),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Highest output mode reported by the coherent sweeps.
    pub n_max: usize,
    /// Heatmap extent per side.
    pub size: usize,
    pub nbars: Vec<f64>,
    pub lambdas: Vec<usize>,
    pub observable: ObservableKind,
    pub parameter: ParameterKind,
    /// Left output mode of the reported pair.
    pub n: usize,
    /// Right output mode of the reported pair.
    pub m: usize,
    /// Restrict validation to the lowest modes per side.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// State file to validate instead of the transformed vacuum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Where to write the validated state as JSON.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub save_state: Option<PathBuf>,
    /// Separate file for the squeezing thresholds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<PathBuf>,
    /// Treat a physicality violation as a runtime failure.
    pub strict: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            n_max: 3,
            size: DEFAULT_HEATMAP_SIZE,
            nbars: DEFAULT_NBARS.to_vec(),
            lambdas: vec![16, 32, 64, 128],
            observable: ObservableKind::VacuumNegativity,
            parameter: ParameterKind::S,
            n: 1,
            m: 1,
            modes: None,
            input: None,
            save_state: None,
            thresholds: None,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub lambda: usize,
    pub log_base: LogBase,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub geometry: Geometry,
    #[serde(default)]
    pub state: StateParams,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub options: Options,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            lambda: DEFAULT_CUTOFF,
            log_base: LogBase::E,
            format: Format::Csv,
            output: None,
            geometry: Geometry { length: 2.0, mirror: "1/2".into() },
            state: StateParams::default(),
            grids: Grids::default(),
            options: Options::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config("config", e.to_string().trim_end()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::io(path, source))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration is always representable as TOML")
    }

    pub fn geometry(&self) -> Result<CavityGeometry, CliError> {
        let (p, q) = parse_fraction(&self.geometry.mirror)
            .ok_or_else(|| CliError::config("geometry.mirror", format!("expected p/q, got {:?}", self.geometry.mirror)))?;
        CavityGeometry::new(self.geometry.length, p, q).map_err(|e| {
            let field = if self.geometry.length > 0.0 && self.geometry.length.is_finite() {
                "geometry.mirror"
            } else {
                "geometry.length"
            };
            CliError::config(field, e.to_string())
        })
    }

    pub fn truncation(&self) -> Result<TruncationConfig, CliError> {
        TruncationConfig::new(self.lambda).map_err(|e| CliError::config("lambda", e.to_string()))
    }

    /// Check every field the selected experiment reads.
    pub fn validate(&self) -> Result<(), CliError> {
        self.geometry()?;
        self.truncation()?;
        let lambda = self.lambda;
        let st = &self.state;
        let opt = &self.options;

        if let Some(out) = &self.output {
            check_parent("output", out)?;
        }
        for (name, x) in [("state.rho", st.rho), ("state.nbar", st.nbar)] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(CliError::config(name, format!("must be finite and >= 0, got {x}")));
            }
        }
        for (name, x) in [("state.phi", st.phi), ("state.s", st.s), ("state.theta", st.theta)] {
            if !x.is_finite() {
                return Err(CliError::config(name, "must be finite"));
            }
        }
        let in_range = |field: &str, v: usize, hi: usize| {
            if v == 0 || v > hi {
                Err(CliError::config(field, format!("must lie in 1..={hi}, got {v}")))
            } else {
                Ok(())
            }
        };

        match self.experiment {
            Experiment::Fig2 => {
                in_range("state.k", st.k, 2 * lambda)?;
                in_range("options.n_max", opt.n_max, lambda)?;
                self.grids.phi.check("grids.phi", None)?;
            }
            Experiment::Fig3 => {
                in_range("state.k", st.k, 2 * lambda)?;
                in_range("options.n_max", opt.n_max, lambda)?;
                if st.rho <= 0.0 {
                    return Err(CliError::config("state.rho", "must be > 0 to normalise percentages"));
                }
            }
            Experiment::Fig4 => self.grids.particles.check("grids.particles", Some(0.0))?,
            Experiment::Fig5 => {
                self.grids.squeezing.check("grids.squeezing", None)?;
                if opt.nbars.is_empty() {
                    return Err(CliError::config("options.nbars", "must not be empty"));
                }
                if let Some(x) = opt.nbars.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
                    return Err(CliError::config("options.nbars", format!("entries must be >= 0, got {x}")));
                }
                if let Some(path) = &opt.thresholds {
                    check_parent("options.thresholds", path)?;
                }
            }
            Experiment::Fig6 => in_range("options.size", opt.size, lambda)?,
            Experiment::Sweep => {
                in_range("state.k", st.k, 2 * lambda)?;
                in_range("options.n", opt.n, lambda)?;
                in_range("options.m", opt.m, lambda)?;
                let min = matches!(opt.parameter, ParameterKind::Nbar | ParameterKind::Rho).then_some(0.0);
                self.grids.sweep.check("grids.sweep", min)?;
            }
            Experiment::Validate => {
                if let Some(k) = opt.modes {
                    in_range("options.modes", k, lambda)?;
                    if opt.input.is_some() {
                        return Err(CliError::config("options.modes", "applies to the transformed vacuum, not to an input file"));
                    }
                }
                if let Some(path) = &opt.save_state {
                    check_parent("options.save_state", path)?;
                }
            }
            Experiment::Converge => {
                if opt.lambdas.is_empty() || opt.lambdas.contains(&0) {
                    return Err(CliError::config("options.lambdas", "must be a non-empty list of cutoffs >= 1"));
                }
                if opt.lambdas.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CliError::config("options.lambdas", "must be strictly ascending"));
                }
                let smallest = opt.lambdas[0];
                match opt.observable {
                    ObservableKind::VacuumNegativity => {
                        in_range("options.n", opt.n, smallest)?;
                        in_range("options.m", opt.m, smallest)?;
                    }
                    ObservableKind::VacuumParticles => in_range("options.n", opt.n, smallest)?,
                    ObservableKind::CoherentParticles => {
                        in_range("options.n", opt.n, smallest)?;
                        in_range("state.k", st.k, 2 * smallest)?;
                    }
                    ObservableKind::TotalParticles | ObservableKind::Defect => {}
                }
            }
        }
        Ok(())
    }
}

fn check_parent(field: &str, path: &Path) -> Result<(), CliError> {
    if path.as_os_str().is_empty() {
        return Err(CliError::config(field, "path is empty"));
    }
    if path.is_dir() {
        return Err(CliError::config(field, format!("{} is a directory", path.display())));
    }
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(CliError::config(field, format!("directory {} does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

/// Parse `p/q` into a pair of positive integers.
pub fn parse_fraction(text: &str) -> Option<(u64, u64)> {
    let (p, q) = text.trim().split_once('/')?;
    Some((p.trim().parse().ok()?, q.trim().parse().ok()?))
}

/// Angles in radians, or as multiples of π: `pi`, `0.5pi`, `-pi`, `pi/2`, `3pi/4`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let bad = || format!("invalid angle {text:?}; use radians or multiples of pi such as 0.5pi or pi/2");
    let value = if let Some(idx) = t.find("pi") {
        let (coef, rest) = (&t[..idx], &t[idx + 2..]);
        let coef = match coef.trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let div = match rest {
            "" => 1.0,
            r => r.strip_prefix('/').and_then(|d| d.parse::<f64>().ok()).ok_or_else(bad)?,
        };
        coef * PI / div
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn de_angle<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Angle {
        Number(f64),
        Text(String),
    }
    match Angle::deserialize(d)? {
        Angle::Number(x) => Ok(x),
        Angle::Text(s) => parse_angle(&s).map_err(serde::de::Error::custom),
    }
}
