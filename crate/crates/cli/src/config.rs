//! Run configuration: command-line flags layered over an optional JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fuzzyds_core::ds2::{self, Ds2Params, TimeConvention};
use fuzzyds_core::ds4::{self, Ds4Params, ModelProvider, SpectrumTable};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_TRUNCATION: usize = 20;
pub const DEFAULT_L_MAX: usize = 2;
pub const DEFAULT_SPIN: f64 = 0.5;
pub const DEFAULT_H_INV: f64 = 1.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    #[default]
    Ds2,
    Ds4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    CsQuantized,
    GroupGenerator,
}

impl From<Convention> for TimeConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::CsQuantized => TimeConvention::CsQuantized,
            Convention::GroupGenerator => TimeConvention::GroupGenerator,
        }
    }
}

/// Every field is optional; unset fields fall back to the config file and
/// then to the documented defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// de Sitter length H⁻¹; fixes ρ (ds2) or ν (ds4) when those are absent.
    #[arg(long)]
    pub hinv: Option<f64>,
    /// ds2 truncation: labels run over −M..=M.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub truncation: Option<usize>,
    /// ds4 model provider: harmonics with L ≤ L_max.
    #[arg(long = "L-max")]
    #[serde(rename = "L_max")]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub convention: Option<Convention>,
    #[arg(long)]
    pub nodes_per_unit: Option<usize>,
    #[arg(long)]
    pub theta_count: Option<usize>,
    /// Three comma-separated counts for the χ, θ, φ grids.
    #[arg(long, value_delimiter = ',')]
    pub s3_counts: Option<Vec<usize>>,
    /// JSON spectrum table overriding τ for selected ds4 labels.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Comma-separated r values for limit scans.
    #[arg(long, value_delimiter = ',')]
    pub r_list: Option<Vec<f64>>,
    /// Output directory (build) or file (other commands).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Matrix-file metadata keys that double as configuration fields.
const META_KEYS: [&str; 9] = ["model", "r", "rho", "nu", "s", "epsilon", "M", "L_max", "convention"];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Recovers the parameters recorded in a matrix file.
    pub fn from_meta(meta: &Map<String, Value>) -> Result<Self, CliError> {
        let known: Map<String, Value> = meta
            .iter()
            .filter(|(k, _)| META_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        serde_json::from_value(Value::Object(known))
            .map_err(|e| CliError::Config(format!("matrix metadata: {e}")))
    }

    /// Fields set in `self` win; the rest come from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            model: self.model.or(base.model),
            r: self.r.or(base.r),
            rho: self.rho.or(base.rho),
            nu: self.nu.or(base.nu),
            s: self.s.or(base.s),
            epsilon: self.epsilon.or(base.epsilon),
            hinv: self.hinv.or(base.hinv),
            truncation: self.truncation.or(base.truncation),
            l_max: self.l_max.or(base.l_max),
            convention: self.convention.or(base.convention),
            nodes_per_unit: self.nodes_per_unit.or(base.nodes_per_unit),
            theta_count: self.theta_count.or(base.theta_count),
            s3_counts: self.s3_counts.or(base.s3_counts),
            spectrum: self.spectrum.or(base.spectrum),
            r_list: self.r_list.or(base.r_list),
            out: self.out.or(base.out),
        }
    }

    pub fn model(&self) -> Model {
        self.model.unwrap_or_default()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    pub fn l_max(&self) -> usize {
        self.l_max.unwrap_or(DEFAULT_L_MAX)
    }

    pub fn spin(&self) -> f64 {
        self.s.unwrap_or(DEFAULT_SPIN)
    }

    pub fn h_inv(&self) -> f64 {
        self.hinv.unwrap_or(DEFAULT_H_INV)
    }

    fn require(value: Option<f64>, field: &str, hint: &str) -> Result<f64, CliError> {
        value.ok_or_else(|| CliError::Config(format!("missing required field `{field}` ({hint})")))
    }

    pub fn ds2_params(&self) -> Result<Ds2Params, CliError> {
        self.reject_ds4_only()?;
        let r = Self::require(self.r, "r", "--r")?;
        let params = match (self.rho, self.hinv) {
            (Some(rho), _) => Ds2Params::new(r, rho, self.epsilon(), self.truncation())?,
            (None, Some(h)) => Ds2Params::on_limit_path(h, r, self.epsilon(), self.truncation())?,
            (None, None) => {
                return Err(CliError::Config(
                    "missing required field `rho` (--rho, or --hinv to derive it)".into(),
                ))
            }
        };
        Ok(match self.convention {
            Some(c) => params.with_convention(c.into()),
            None => params,
        })
    }

    pub fn ds2_grid(&self) -> ds2::GridOptions {
        ds2::GridOptions {
            nodes_per_unit: self.nodes_per_unit,
            theta_count: self.theta_count,
        }
    }

    pub fn ds4_params(&self) -> Result<Ds4Params, CliError> {
        self.reject_ds2_only()?;
        let r = Self::require(self.r, "r", "--r")?;
        Ok(match (self.nu, self.hinv) {
            (Some(nu), _) => Ds4Params::new(r, nu, self.spin(), self.epsilon())?,
            (None, Some(h)) => Ds4Params::on_limit_path(h, r, self.spin(), self.epsilon())?,
            (None, None) => {
                return Err(CliError::Config(
                    "missing required field `nu` (--nu, or --hinv to derive it)".into(),
                ))
            }
        })
    }

    pub fn ds4_grid(&self) -> Result<ds4::GridOptions, CliError> {
        let s3_counts = match &self.s3_counts {
            None => None,
            Some(v) => Some(<[usize; 3]>::try_from(v.as_slice()).map_err(|_| {
                CliError::Config(format!("`s3_counts` needs exactly 3 values, got {}", v.len()))
            })?),
        };
        Ok(ds4::GridOptions {
            nodes_per_unit: self.nodes_per_unit,
            s3_counts,
        })
    }

    /// Model provider with the optional spectrum table applied.
    pub fn ds4_provider(&self, params: &Ds4Params) -> Result<ModelProvider, CliError> {
        let provider = ds4::model_provider(params, self.l_max());
        match &self.spectrum {
            None => Ok(provider),
            Some(path) => Ok(provider.with_spectrum(&load_spectrum(path)?)?),
        }
    }

    pub fn r_list(&self) -> Result<&[f64], CliError> {
        match self.r_list.as_deref() {
            Some(list) if !list.is_empty() => Ok(list),
            _ => Err(CliError::Config("`r_list` must contain at least one value".into())),
        }
    }

    fn reject_ds4_only(&self) -> Result<(), CliError> {
        let stray = [
            ("nu", self.nu.is_some()),
            ("s", self.s.is_some()),
            ("L_max", self.l_max.is_some()),
            ("s3_counts", self.s3_counts.is_some()),
            ("spectrum", self.spectrum.is_some()),
        ];
        reject(&stray, "ds2")
    }

    fn reject_ds2_only(&self) -> Result<(), CliError> {
        let stray = [
            ("rho", self.rho.is_some()),
            ("M", self.truncation.is_some()),
            ("theta_count", self.theta_count.is_some()),
            ("convention", self.convention.is_some()),
        ];
        reject(&stray, "ds4")
    }
}

fn reject(stray: &[(&str, bool)], model: &str) -> Result<(), CliError> {
    match stray.iter().find(|(_, set)| *set) {
        Some((name, _)) => Err(CliError::Config(format!(
            "field `{name}` does not apply to model {model}"
        ))),
        None => Ok(()),
    }
}

pub fn load_spectrum(path: &Path) -> Result<SpectrumTable, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: invalid spectrum table: {e}", path.display())))
}
