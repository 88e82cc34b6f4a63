//! Experiment configuration: command-line flags merged with an optional JSON
//! file whose keys take precedence.

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::fmt;
use std::path::PathBuf;

pub const DEFAULT_SEED: u64 = 2024;

/// Keys accepted by every command.
const COMMON_KEYS: [&str; 5] = ["seed", "assert", "timing", "out", "plot"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "hpbem",
    version,
    about = "Experiment harness for hp boundary elements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON file whose keys override the flags
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,
    /// Seed for randomized sweeps [default: 2024]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exit with status 2 when a threshold is violated
    #[arg(long, global = true)]
    pub assert: bool,
    /// Report wall-clock timings (output is then not reproducible)
    #[arg(long, global = true)]
    pub timing: bool,
    /// CSV output file [default: stdout]
    #[arg(long, global = true, value_name = "CSV")]
    pub out: Option<PathBuf>,
    /// Two-column plot data file
    #[arg(long, global = true, value_name = "FILE")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Discrete inf-sup constant against its closed form
    Infsup(InfsupArgs),
    /// Commuting diagrams, reproduction and extension independence
    CommuteCheck(CommuteArgs),
    /// Growth of the interpolant norm on corner-singular fields
    InterpStability(StabilityArgs),
    /// Spectral inner products against the finite-difference oracle
    FracformCheck(FracformArgs),
    /// Piola pairing and flux identities on bilinear charts
    PiolaCheck(PiolaArgs),
    /// Solve the EFIE for a plane wave on one mesh
    EfieSolve(EfieArgs),
    /// Convergence study against a reference discretization
    Convergence(ConvergenceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Infsup(_) => "infsup",
            Command::CommuteCheck(_) => "commute-check",
            Command::InterpStability(_) => "interp-stability",
            Command::FracformCheck(_) => "fracform-check",
            Command::PiolaCheck(_) => "piola-check",
            Command::EfieSolve(_) => "efie-solve",
            Command::Convergence(_) => "convergence",
        }
    }

    fn to_map(&self) -> Map<String, Value> {
        let value = match self {
            Command::Infsup(a) => serde_json::to_value(a),
            Command::CommuteCheck(a) => serde_json::to_value(a),
            Command::InterpStability(a) => serde_json::to_value(a),
            Command::FracformCheck(a) => serde_json::to_value(a),
            Command::PiolaCheck(a) => serde_json::to_value(a),
            Command::EfieSolve(a) => serde_json::to_value(a),
            Command::Convergence(a) => serde_json::to_value(a),
        };
        match value {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        }
    }

    fn from_parts(name: &str, params: Map<String, Value>) -> Result<Self, ConfigError> {
        let mut outer = Map::new();
        outer.insert(name.to_string(), Value::Object(params));
        serde_json::from_value(Value::Object(outer)).map_err(|e| invalid(format!("{name}: {e}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfsupArgs {
    /// Lowest order [default: 2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmin: Option<usize>,
    /// Highest order [default: 10]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmax: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommuteArgs {
    /// Lowest order [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmin: Option<usize>,
    /// Highest order [default: 6]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmax: Option<usize>,
    /// Number of random smooth fields [default: 20]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<usize>,
    /// Mode truncation M of the fractional forms [default: 64]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityArgs {
    /// Lowest order [default: 2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmin: Option<usize>,
    /// Highest order [default: 10]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmax: Option<usize>,
    /// Distance of the singularity outside the corner [default: 0.05]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Exponent of the radial gradient family [default: 0.666…]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Gauss points per direction [default: 64]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracformArgs {
    /// Mode truncation M of the spectral values [default: 32]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Random polynomials for the mean-reduction identity [default: 50]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomials: Option<usize>,
    /// Highest polynomial degree [default: 10]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiolaArgs {
    /// Random samples per chart [default: 5]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// RT order of the sampled fields [default: 3]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfieArgs {
    /// Surface file in the patch format
    #[arg(long, conflicts_with = "surface")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    /// Built-in surface: screen or cube [default: screen]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
    /// Uniform refinement level L [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
    /// Polynomial degree p [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Wavenumber k [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    /// Gauss points per variable for pair integrals [default: p+3]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceArgs {
    /// Surface file in the patch format
    #[arg(long, conflicts_with = "surface")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    /// Built-in surface: screen or cube [default: screen]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
    /// Comma-separated L:p pairs [default: 1:1,2:1,3:1,1:2,2:2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub configs: Option<String>,
    /// Reference L:p [default: 3:2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    /// Wavenumber k [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    /// Gauss points per variable for pair integrals [default: p+3]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    pub seed: u64,
    pub assert: bool,
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            seed: DEFAULT_SEED,
            assert: false,
            timing: false,
            out: None,
            plot: None,
        }
    }
}

/// A fully merged and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub common: Common,
}

impl ExperimentConfig {
    /// Parses a standalone JSON configuration. The `command` key is required.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let map = parse_object(text)?;
        let name = match map.get("command") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(invalid("`command` must be a string")),
            None => return Err(invalid("missing `command`")),
        };
        let (common, params) = split(map, Common::default())?;
        let config = ExperimentConfig {
            command: Command::from_parts(&name, params)?,
            common,
        };
        config.validate()?;
        Ok(config)
    }

    /// Merges parsed flags with the optional JSON file they name.
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let g = cli.global;
        let mut common = Common {
            seed: g.seed.unwrap_or(DEFAULT_SEED),
            assert: g.assert,
            timing: g.timing,
            out: g.out,
            plot: g.plot,
        };
        let mut command = cli.command;
        if let Some(path) = g.config {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            let map = parse_object(&text)?;
            match map.get("command") {
                None => {}
                Some(Value::String(s)) if s == command.name() => {}
                Some(other) => {
                    return Err(invalid(format!(
                        "config is for command {other} but `{}` was requested",
                        command.name()
                    )))
                }
            }
            let (merged_common, overrides) = split(map, common)?;
            common = merged_common;
            let mut params = command.to_map();
            params.extend(overrides);
            command = Command::from_parts(command.name(), params)?;
        }
        let config = ExperimentConfig { command, common };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.command {
            Command::Infsup(a) => a.resolve().map(drop),
            Command::CommuteCheck(a) => a.resolve().map(drop),
            Command::InterpStability(a) => a.resolve().map(drop),
            Command::FracformCheck(a) => a.resolve().map(drop),
            Command::PiolaCheck(a) => a.resolve().map(drop),
            Command::EfieSolve(a) => a.resolve().map(drop),
            Command::Convergence(a) => a.resolve().map(drop),
        }
    }
}

fn parse_object(text: &str) -> Result<Map<String, Value>, ConfigError> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(invalid("config must be a JSON object")),
        Err(e) => Err(invalid(format!("config: {e}"))),
    }
}

/// Separates common keys from command keys, applying the former to `base`.
fn split(
    map: Map<String, Value>,
    base: Common,
) -> Result<(Common, Map<String, Value>), ConfigError> {
    let mut common = match serde_json::to_value(&base) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    let mut params = Map::new();
    for (k, v) in map {
        if k == "command" {
            continue;
        }
        if COMMON_KEYS.contains(&k.as_str()) {
            common.insert(k, v);
        } else {
            params.insert(k, v);
        }
    }
    let common = serde_json::from_value(Value::Object(common))
        .map_err(|e| invalid(format!("config: {e}")))?;
    Ok((common, params))
}

fn range(name: &str, v: usize, lo: usize, hi: usize) -> Result<usize, ConfigError> {
    if v < lo || v > hi {
        Err(invalid(format!("{name} = {v} is outside {lo}..={hi}")))
    } else {
        Ok(v)
    }
}

fn positive(name: &str, v: f64, hi: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 && v <= hi {
        Ok(v)
    } else {
        Err(invalid(format!("{name} = {v} must lie in (0, {hi}]")))
    }
}

fn order_range(
    pmin: usize,
    pmax: usize,
    lo: usize,
    hi: usize,
) -> Result<(usize, usize), ConfigError> {
    let pmax = range("pmax", pmax, lo, hi)?;
    let pmin = range("pmin", pmin, lo, pmax)?;
    Ok((pmin, pmax))
}

/// Where the surface comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSource {
    Screen,
    Cube,
    File(PathBuf),
}

fn surface_source(
    mesh: &Option<PathBuf>,
    surface: &Option<String>,
) -> Result<SurfaceSource, ConfigError> {
    match (mesh, surface.as_deref()) {
        (Some(_), Some(_)) => Err(invalid("give either mesh or surface, not both")),
        (Some(path), None) => Ok(SurfaceSource::File(path.clone())),
        (None, None) | (None, Some("screen")) => Ok(SurfaceSource::Screen),
        (None, Some("cube")) => Ok(SurfaceSource::Cube),
        (None, Some(other)) => Err(invalid(format!(
            "unknown surface `{other}` (screen or cube)"
        ))),
    }
}

/// Parses `L:p`.
pub fn parse_pair(s: &str) -> Result<(usize, usize), ConfigError> {
    let bad = || invalid(format!("`{s}` is not of the form L:p"));
    let (l, p) = s.trim().split_once(':').ok_or_else(bad)?;
    let l = l.trim().parse().map_err(|_| bad())?;
    let p = p.trim().parse().map_err(|_| bad())?;
    Ok((
        range("refinement level", l, 0, 6)?,
        range("degree", p, 1, 6)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infsup {
    pub pmin: usize,
    pub pmax: usize,
}

impl InfsupArgs {
    pub fn resolve(&self) -> Result<Infsup, ConfigError> {
        let (pmin, pmax) = order_range(self.pmin.unwrap_or(2), self.pmax.unwrap_or(10), 1, 16)?;
        Ok(Infsup { pmin, pmax })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commute {
    pub pmin: usize,
    pub pmax: usize,
    pub fields: usize,
    pub truncation: usize,
}

impl CommuteArgs {
    pub fn resolve(&self) -> Result<Commute, ConfigError> {
        let (pmin, pmax) = order_range(self.pmin.unwrap_or(1), self.pmax.unwrap_or(6), 1, 10)?;
        Ok(Commute {
            pmin,
            pmax,
            fields: range("fields", self.fields.unwrap_or(20), 1, 500)?,
            truncation: range("truncation", self.truncation.unwrap_or(64), 16, 256)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub pmin: usize,
    pub pmax: usize,
    pub delta: f64,
    pub alpha: f64,
    pub quadrature_points: usize,
}

impl StabilityArgs {
    pub fn resolve(&self) -> Result<Stability, ConfigError> {
        let (pmin, pmax) = order_range(self.pmin.unwrap_or(2), self.pmax.unwrap_or(10), 1, 16)?;
        if pmin == pmax {
            return Err(invalid("a slope needs at least two orders"));
        }
        Ok(Stability {
            pmin,
            pmax,
            delta: positive("delta", self.delta.unwrap_or(0.05), 1.0)?,
            alpha: positive("alpha", self.alpha.unwrap_or(2.0 / 3.0), 2.0)?,
            quadrature_points: range(
                "quadrature_points",
                self.quadrature_points.unwrap_or(64),
                2 * pmax + 2,
                256,
            )?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fracform {
    pub truncation: usize,
    pub polynomials: usize,
    pub max_degree: usize,
}

impl FracformArgs {
    pub fn resolve(&self) -> Result<Fracform, ConfigError> {
        Ok(Fracform {
            truncation: range("truncation", self.truncation.unwrap_or(32), 8, 128)?,
            polynomials: range("polynomials", self.polynomials.unwrap_or(50), 0, 1000)?,
            max_degree: range("max_degree", self.max_degree.unwrap_or(10), 0, 16)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piola {
    pub samples: usize,
    pub degree: usize,
}

impl PiolaArgs {
    pub fn resolve(&self) -> Result<Piola, ConfigError> {
        Ok(Piola {
            samples: range("samples", self.samples.unwrap_or(5), 1, 200)?,
            degree: range("degree", self.degree.unwrap_or(3), 1, 8)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfieSolve {
    pub source: SurfaceSource,
    pub level: usize,
    pub degree: usize,
    pub wavenumber: f64,
    pub quad_order: Option<usize>,
}

impl EfieArgs {
    pub fn resolve(&self) -> Result<EfieSolve, ConfigError> {
        Ok(EfieSolve {
            source: surface_source(&self.mesh, &self.surface)?,
            level: range("refine", self.refine.unwrap_or(1), 0, 6)?,
            degree: range("degree", self.degree.unwrap_or(1), 1, 6)?,
            wavenumber: positive("wavenumber", self.wavenumber.unwrap_or(1.0), 100.0)?,
            quad_order: self
                .quad_order
                .map(|q| range("quad_order", q, 1, 40))
                .transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub source: SurfaceSource,
    pub configs: Vec<(usize, usize)>,
    pub reference: (usize, usize),
    pub wavenumber: f64,
    pub quad_order: Option<usize>,
}

impl ConvergenceArgs {
    pub fn resolve(&self) -> Result<Convergence, ConfigError> {
        let configs = self
            .configs
            .as_deref()
            .unwrap_or("1:1,2:1,3:1,1:2,2:2")
            .split(',')
            .map(parse_pair)
            .collect::<Result<Vec<_>, _>>()?;
        let reference = parse_pair(self.reference.as_deref().unwrap_or("3:2"))?;
        if let Some(&(l, p)) = configs
            .iter()
            .find(|&&(l, p)| l > reference.0 || p > reference.1)
        {
            return Err(invalid(format!(
                "{l}:{p} is not contained in the reference {}:{}",
                reference.0, reference.1
            )));
        }
        Ok(Convergence {
            source: surface_source(&self.mesh, &self.surface)?,
            configs,
            reference,
            wavenumber: positive("wavenumber", self.wavenumber.unwrap_or(1.0), 100.0)?,
            quad_order: self
                .quad_order
                .map(|q| range("quad_order", q, 1, 40))
                .transpose()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hpbem").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_resolve_with_defaults() {
        let c = ExperimentConfig::from_cli(cli(&["infsup", "--pmax", "4"])).unwrap();
        let Command::Infsup(a) = &c.command else {
            panic!()
        };
        assert_eq!(a.resolve().unwrap(), Infsup { pmin: 2, pmax: 4 });
        assert_eq!(c.common.seed, DEFAULT_SEED);
    }

    #[test]
    fn json_overrides_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"pmax": 3, "seed": 5, "assert": true}"#).unwrap();
        let c = ExperimentConfig::from_cli(cli(&[
            "infsup",
            "--pmax",
            "8",
            "--config",
            path.to_str().unwrap(),
        ]))
        .unwrap();
        assert_eq!(
            c.command,
            Command::Infsup(InfsupArgs {
                pmin: None,
                pmax: Some(3)
            })
        );
        assert_eq!(c.common.seed, 5);
        assert!(c.common.assert);
    }

    #[test]
    fn unknown_and_inapplicable_keys_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"command": "infsup", "pmax": 3}"#).is_ok());
        assert!(ExperimentConfig::from_json(r#"{"command": "infsup", "refine": 3}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command": "infsup", "colour": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command": "nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"pmax": 3}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"[1]"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command": "infsup", "seed": -1}"#).is_err());
    }

    #[test]
    fn ranges_are_validated() {
        assert!(ExperimentConfig::from_json(r#"{"command": "infsup", "pmax": 0}"#).is_err());
        assert!(
            ExperimentConfig::from_json(r#"{"command": "infsup", "pmin": 5, "pmax": 4}"#).is_err()
        );
        assert!(
            ExperimentConfig::from_json(r#"{"command": "efie-solve", "wavenumber": 0}"#).is_err()
        );
        assert!(
            ExperimentConfig::from_json(r#"{"command": "efie-solve", "surface": "torus"}"#)
                .is_err()
        );
        assert!(ExperimentConfig::from_json(
            r#"{"command": "convergence", "configs": "4:1", "reference": "3:2"}"#
        )
        .is_err());
        assert!(
            ExperimentConfig::from_json(r#"{"command": "convergence", "configs": "1-1"}"#).is_err()
        );
        assert!(ExperimentConfig::from_json(
            r#"{"command": "interp-stability", "pmin": 3, "pmax": 3}"#
        )
        .is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair(" 2:3 ").unwrap(), (2, 3));
        assert!(parse_pair("2:0").is_err());
        assert!(parse_pair("2").is_err());
    }
}
