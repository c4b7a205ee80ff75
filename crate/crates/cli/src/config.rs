//! Run configuration: JSON schema, loading and validation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hodgemetric_core::prepotential::LogTerm;
use hodgemetric_core::{MultiIndex, Prepotential, C64};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CalibratePoincare,
    ConstantMultiple,
    Curvature,
    DegenerationProbe,
    HodgeRiemann,
    ProjectSiegel,
    VerifyBounds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CalibratePoincare => "calibrate-poincare",
            Command::ConstantMultiple => "constant-multiple",
            Command::Curvature => "curvature",
            Command::DegenerationProbe => "degeneration-probe",
            Command::HodgeRiemann => "hodge-riemann",
            Command::ProjectSiegel => "project-siegel",
            Command::VerifyBounds => "verify-bounds",
        }
    }

    /// Commands evaluated at the configured base points.
    pub fn uses_points(self) -> bool {
        matches!(
            self,
            Command::Curvature | Command::HodgeRiemann | Command::ProjectSiegel | Command::VerifyBounds
        )
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `c · z^monomial`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub monomial: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// `c · z^monomial · (log z)^log_power`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogTermSpec {
    pub monomial: Vec<u32>,
    pub log_power: u32,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepotentialSpec {
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log_terms: Vec<LogTermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPoints {
    pub count: usize,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Closed-form curvature against the A + B split, relative to the tensor scale.
    pub curvature: f64,
    /// Closed-form curvature against finite differences, relative to the tensor scale.
    pub curvature_fd: f64,
    /// Slack in the curvature inequalities.
    pub bounds: f64,
    pub siegel: f64,
    pub constant_multiple: f64,
    pub hodge_riemann: f64,
    /// Largest admissible fitted slope of `log λ` against `log(1/r)`.
    pub slope: f64,
    pub schwarz: f64,
    pub poincare: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            curvature: 1e-10,
            curvature_fd: 1e-6,
            bounds: 1e-9,
            siegel: 1e-10,
            constant_multiple: 1e-6,
            hodge_riemann: 1e-10,
            slope: 0.05,
            schwarz: 1e-3,
            poincare: 1e-8,
        }
    }
}

impl Tolerances {
    /// The tolerance that `--tol` overrides for a given command.
    pub fn primary_mut(&mut self, c: Command) -> &mut f64 {
        match c {
            Command::CalibratePoincare => &mut self.poincare,
            Command::ConstantMultiple => &mut self.constant_multiple,
            Command::Curvature => &mut self.curvature_fd,
            Command::DegenerationProbe => &mut self.schwarz,
            Command::HodgeRiemann => &mut self.hodge_riemann,
            Command::ProjectSiegel => &mut self.siegel,
            Command::VerifyBounds => &mut self.bounds,
        }
    }

    fn all(&self) -> [(&'static str, f64); 9] {
        [
            ("curvature", self.curvature),
            ("curvature_fd", self.curvature_fd),
            ("bounds", self.bounds),
            ("siegel", self.siegel),
            ("constant_multiple", self.constant_multiple),
            ("hodge_riemann", self.hodge_riemann),
            ("slope", self.slope),
            ("schwarz", self.schwarz),
            ("poincare", self.poincare),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    /// Random directions per point for the holomorphic sectional search.
    pub directions: usize,
    /// Random orthogonal pairs per point for the Riemannian sectional check.
    pub pairs: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep { directions: 64, pairs: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantMultipleSpec {
    /// Random normalized prepotentials of dimension `n` added to the sample set.
    pub random_samples: usize,
    /// Whether the configured prepotential is itself a sample.
    pub include_config: bool,
}

impl Default for ConstantMultipleSpec {
    fn default() -> Self {
        ConstantMultipleSpec { random_samples: 20, include_config: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegenerationSpec {
    pub angle: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
}

impl Default for DegenerationSpec {
    fn default() -> Self {
        DegenerationSpec { angle: 0.7, r_min: 1e-6, r_max: 0.5, samples: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub report: String,
    pub profile_csv: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("hodgemetric-out"),
            report: "report.json".into(),
            profile_csv: "degeneration_profile.csv".into(),
        }
    }
}

fn default_fd_step() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub prepotential: PrepotentialSpec,
    /// Explicit base points, each a list of `[re, im]` coordinates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_points: Option<RandomPoints>,
    pub commands: Vec<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub constant_multiple: ConstantMultipleSpec,
    #[serde(default)]
    pub degeneration: DegenerationSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn invalid(path: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: msg.into() }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Whether any selected command draws random numbers.
    pub fn is_randomized(&self) -> bool {
        self.commands.iter().any(|&c| match c {
            Command::VerifyBounds => true,
            Command::ConstantMultiple => self.constant_multiple.random_samples > 0,
            c => c.uses_points() && self.random_points.as_ref().is_some_and(|r| r.count > 0),
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if self.commands.is_empty() {
            return Err(invalid("commands", "command list is empty"));
        }
        for (k, t) in self.prepotential.terms.iter().enumerate() {
            if t.monomial.len() != self.n {
                return Err(invalid(
                    format!("prepotential.terms[{k}].monomial"),
                    format!("has length {}, expected n = {}", t.monomial.len(), self.n),
                ));
            }
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(invalid(format!("prepotential.terms[{k}]"), "coefficient is not finite"));
            }
        }
        for (k, t) in self.prepotential.log_terms.iter().enumerate() {
            if self.n != 1 {
                return Err(invalid(format!("prepotential.log_terms[{k}]"), "log terms need n = 1"));
            }
            if t.monomial.len() != 1 {
                return Err(invalid(format!("prepotential.log_terms[{k}].monomial"), "must have length 1"));
            }
            if t.log_power == 0 {
                return Err(invalid(format!("prepotential.log_terms[{k}].log_power"), "must be at least 1"));
            }
        }
        for (k, p) in self.points.iter().enumerate() {
            if p.len() != self.n {
                return Err(invalid(format!("points[{k}]"), format!("has {} coordinates, expected {}", p.len(), self.n)));
            }
            if p.iter().flatten().any(|x| !x.is_finite()) {
                return Err(invalid(format!("points[{k}]"), "coordinate is not finite"));
            }
        }
        if let Some(r) = &self.random_points {
            if !(r.radius > 0.0 && r.radius.is_finite()) {
                return Err(invalid("random_points.radius", "must be positive"));
            }
        }
        for (name, v) in self.tolerances.all() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("tolerances.{name}"), "must be positive"));
            }
        }
        if !(self.fd_step > 0.0 && self.fd_step < 1.0) {
            return Err(invalid("fd_step", "must lie in (0, 1)"));
        }
        let d = &self.degeneration;
        if !(d.r_min > 0.0 && d.r_max > d.r_min && d.samples >= 2 && d.angle.is_finite()) {
            return Err(invalid("degeneration", "need 0 < r_min < r_max, samples >= 2 and a finite angle"));
        }
        if self.commands.contains(&Command::DegenerationProbe) && self.n != 1 {
            return Err(invalid("commands", "degeneration-probe needs n = 1"));
        }
        if self.seed.is_none() && self.is_randomized() {
            let which: Vec<&str> = self.commands.iter().map(|c| c.name()).collect();
            return Err(invalid("seed", format!("required by randomized commands ({})", which.join(", "))));
        }
        self.prepotential()?;
        Ok(())
    }

    pub fn prepotential(&self) -> Result<Prepotential, CliError> {
        let terms = self
            .prepotential
            .terms
            .iter()
            .map(|t| (MultiIndex::new(t.monomial.clone()), C64::new(t.re, t.im)))
            .collect();
        let log_terms = self
            .prepotential
            .log_terms
            .iter()
            .map(|t| LogTerm {
                monomial: MultiIndex::new(t.monomial.clone()),
                log_power: t.log_power,
                coeff: C64::new(t.re, t.im),
            })
            .collect();
        Prepotential::new(self.n, terms, log_terms).map_err(|e| invalid("prepotential", e.to_string()))
    }

    /// Explicit points, or the origin when none are given and no random points are requested.
    pub fn explicit_points(&self) -> Vec<Vec<C64>> {
        if self.points.is_empty() && self.random_points.is_none() {
            return vec![vec![C64::new(0.0, 0.0); self.n]];
        }
        self.points.iter().map(|p| p.iter().map(|x| C64::new(x[0], x[1])).collect()).collect()
    }

    /// Commands sorted by name with duplicates removed.
    pub fn command_order(&self) -> Vec<Command> {
        let mut cmds = self.commands.clone();
        cmds.sort_by_key(|c| c.name());
        cmds.dedup();
        cmds
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    RunConfig::from_json(&text)
}
