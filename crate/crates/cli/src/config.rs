//! Run configuration: defaults for every field, a TOML file merged on top,
//! then `key.path=value` overrides.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use majorant_core::experiments::{
    default_cutoffs, AnyRateOptions, CurveSpec, RateSpec, RnotlipOptions, SharpMaxfOptions,
};
use majorant_core::grid::DiskGrid;
use majorant_core::kernels::MajorantOptions;
use majorant_core::reduction::ReduceOptions;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub d_rho: f64,
    pub n_rho: usize,
    pub n_theta: usize,
    /// When set, `n_rho` is chosen so the grid reaches this radius.
    pub r_max: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            d_rho: 0.05,
            n_rho: 60,
            n_theta: 256,
            r_max: None,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<DiskGrid> {
        Ok(match self.r_max {
            Some(r) => DiskGrid::covering(r, self.d_rho, self.n_theta)?,
            None => DiskGrid::new(self.d_rho, self.n_rho, self.n_theta)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    /// Log-Lipschitz constant of the envelope.
    pub c: f64,
    /// Capping radius around each zero of a zero-set input.
    pub delta: f64,
    /// Boundary nodes used to compute each cap.
    pub cap_nodes: usize,
    pub reduce: ReduceOptions,
    pub majorant: MajorantOptions,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            c: 2.0,
            delta: 0.25,
            cap_nodes: 512,
            reduce: ReduceOptions::default(),
            majorant: MajorantOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RnotlipConfig {
    pub gamma: f64,
    pub delta: f64,
    pub eps: f64,
    pub options: RnotlipOptions,
}

impl Default for RnotlipConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            delta: 0.1,
            eps: 0.01,
            options: RnotlipOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpMaxfConfig {
    pub s: RateSpec,
    pub curve: CurveSpec,
    pub cutoffs: Vec<f64>,
    pub options: SharpMaxfOptions,
}

impl Default for SharpMaxfConfig {
    fn default() -> Self {
        Self {
            s: RateSpec::Power {
                scale: 1.0,
                exponent: -1.0,
            },
            curve: CurveSpec::power(2.0).expect("valid default curve"),
            cutoffs: default_cutoffs(),
            options: SharpMaxfOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnyRateConfig {
    pub s: RateSpec,
    pub options: AnyRateOptions,
}

impl Default for AnyRateConfig {
    fn default() -> Self {
        Self {
            s: RateSpec::Power {
                scale: 1.0,
                exponent: -1.0,
            },
            options: AnyRateOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub output: PathBuf,
    pub grid: GridConfig,
    pub operator: OperatorConfig,
    pub rnotlip: RnotlipConfig,
    pub sharpmaxf: SharpMaxfConfig,
    pub anyrate: AnyRateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output: PathBuf::from("majorant-out"),
            grid: GridConfig::default(),
            operator: OperatorConfig::default(),
            rnotlip: RnotlipConfig::default(),
            sharpmaxf: SharpMaxfConfig::default(),
            anyrate: AnyRateConfig::default(),
        }
    }
}

/// Builds the effective configuration from optional TOML text and ordered
/// `(dotted key, raw value)` overrides. Unknown keys are rejected.
pub fn resolve(toml_text: Option<&str>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut tree = serde_json::to_value(RunConfig::default())?;
    if let Some(text) = toml_text {
        let file: toml::Value = toml::from_str(text).context("parsing the config file")?;
        merge(&mut tree, serde_json::to_value(file)?, "")?;
    }
    for (key, raw) in overrides {
        set_path(&mut tree, key, parse_scalar(raw)?)?;
    }
    serde_json::from_value(tree).context("config does not match the expected shape")
}

/// Parses `key=value`.
pub fn split_assignment(text: &str) -> Result<(String, String)> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| anyhow!("expected key=value, got `{text}`"))?;
    Ok((key.trim().to_string(), value.trim().to_string()))
}

/// A TOML literal (number, boolean, array, inline table); anything else is
/// taken as a bare string.
fn parse_scalar(raw: &str) -> Result<Value> {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut table) => Ok(serde_json::to_value(table.remove("v").expect("parsed key"))?),
        Err(_) => Ok(Value::String(raw.to_string())),
    }
}

fn merge(base: &mut Value, incoming: Value, path: &str) -> Result<()> {
    match (base, incoming) {
        (Value::Object(b), Value::Object(i)) => {
            for (key, value) in i {
                let child = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                match b.get_mut(&key) {
                    Some(slot) if slot.is_object() => merge(slot, value, &child)?,
                    Some(slot) => *slot = value,
                    None => bail!("unknown config key `{child}`"),
                }
            }
            Ok(())
        }
        (slot, value) => {
            *slot = value;
            Ok(())
        }
    }
}

fn set_path(tree: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = tree;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| anyhow!("`{}` is not a table", parts[..i].join(".")))?;
        let slot = map
            .get_mut(*part)
            .ok_or_else(|| anyhow!("unknown config key `{key}`"))?;
        if i + 1 == parts.len() {
            *slot = value;
            return Ok(());
        }
        node = slot;
    }
    bail!("empty config key")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_survive_a_round_trip() {
        assert_eq!(resolve(None, &[]).unwrap(), RunConfig::default());
    }

    #[test]
    fn file_then_overrides() {
        let text = "output = \"x\"\n[grid]\nd_rho = 0.1\nr_max = 3.0\n[operator.reduce]\nmax_iter = 7\n";
        let config = resolve(
            Some(text),
            &[
                ("grid.d_rho".into(), "0.02".into()),
                ("rnotlip.eps".into(), "0.005".into()),
            ],
        )
        .unwrap();
        assert_eq!(config.output, PathBuf::from("x"));
        assert_eq!(config.grid.d_rho, 0.02);
        assert_eq!(config.grid.r_max, Some(3.0));
        assert_eq!(config.operator.reduce.max_iter, 7);
        assert_eq!(config.operator.reduce.tol, 1e-4);
        assert_eq!(config.rnotlip.eps, 0.005);
    }

    #[test]
    fn unknown_keys_and_bad_types_are_errors() {
        assert!(resolve(Some("[grid]\nd_roh = 0.1\n"), &[]).is_err());
        assert!(resolve(None, &[("operator.cc".into(), "3".into())]).is_err());
        assert!(resolve(None, &[("grid.n_rho".into(), "many".into())]).is_err());
        assert!(split_assignment("grid.d_rho").is_err());
    }
}
