//! Run configuration: one TOML file with `[scenario]`, `[basis]`, `[audit]`,
//! `[sweep]` and `[output]` sections. Only `[scenario]` is required.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use whichpath_core::audit::AuditConfig;
use whichpath_core::radiation::SpectralSettings;
use whichpath_core::scenario::Scenario;
use whichpath_core::sweep::{Axis, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
    /// One JSON object per line; sweeps only, other commands fall back to JSON.
    Jsonl,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format {other:?}, expected csv, json or jsonl")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Destination file; standard output when absent. Not embedded in outputs,
    /// so the same run written to two places produces identical bytes.
    #[serde(skip_serializing)]
    pub path: Option<PathBuf>,
    pub format: Format,
    /// `report` only: two-column CSV `t,moment` of the branch difference.
    #[serde(skip_serializing)]
    pub history: Option<PathBuf>,
    /// `report` only: CSV `omega,alpha_sq,de_domega` of the entangling spectrum.
    #[serde(skip_serializing)]
    pub spectrum: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSpec {
    #[serde(default = "snr")]
    pub quantity: Quantity,
    /// Defaults to the which-path threshold.
    pub level: Option<f64>,
}

fn snr() -> Quantity {
    Quantity::Snr
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<Axis>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Quantity>,
    pub contour: Option<ContourSpec>,
}

pub fn default_outputs() -> Vec<Quantity> {
    vec![
        Quantity::DAlice,
        Quantity::DBob,
        Quantity::NEntangling,
        Quantity::Snr,
        Quantity::Regime,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub basis: SpectralSettings,
    #[serde(default)]
    pub audit: AuditConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parses `text`, then applies `key.path=value` overrides. Values are read as
/// TOML and fall back to plain strings.
pub fn parse(text: &str, origin: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    // Strict pass on the raw text so diagnostics point at lines and columns.
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}")))?;
    if overrides.is_empty() {
        return Ok(cfg);
    }
    let mut table: toml::Table = toml::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}")))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| ConfigError(format!("after overrides: {e}")))
}

pub fn load(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, &path.display().to_string(), overrides)
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("override {spec:?} is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(ConfigError(format!("override {spec:?} has an empty key segment")));
    }
    let value = match toml::from_str::<toml::Table>(&format!("v = {}", raw.trim())) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError(format!("override {spec:?}: {p} is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// The resolved configuration as TOML text.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
field = "electromagnetic"
q_a = 1.0
separation = 1.0
distance = 100.0
t_a = 10.0
t_b = 10.0
"#;

    #[test]
    fn minimal_config_is_complete() {
        let cfg = parse(MINIMAL, "test", &[]).unwrap();
        assert_eq!(cfg.basis, SpectralSettings::default());
        assert_eq!(cfg.audit, AuditConfig::default());
        assert_eq!(cfg.scenario.split_factor, 16.0);
        assert!(cfg.sweep.is_none());
    }

    #[test]
    fn unknown_key_reports_location() {
        let text = MINIMAL.replace("t_b = 10.0", "t_b = 10.0\nt_c = 3");
        let err = parse(&text, "bad.toml", &[]).unwrap_err().0;
        assert!(err.contains("line 9"), "{err}");
        assert!(err.contains("t_c"), "{err}");
    }

    #[test]
    fn overrides_apply() {
        let cfg = parse(
            MINIMAL,
            "test",
            &["scenario.t_a=20".into(), "audit.seed=9".into(), "output.format=json".into()],
        )
        .unwrap();
        assert_eq!(cfg.scenario.t_a, 20.0);
        assert_eq!(cfg.audit.seed, 9);
        assert_eq!(cfg.output.format, Format::Json);
        assert!(parse(MINIMAL, "test", &["scenario.nope=1".into()]).is_err());
        assert!(parse(MINIMAL, "test", &["novalue".into()]).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = parse(MINIMAL, "test", &[]).unwrap();
        let again = parse(&cfg.to_toml(), "again", &[]).unwrap();
        assert_eq!(cfg, again);
    }
}
