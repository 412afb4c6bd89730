use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use minmotion::{MdtRequest, MotionSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Mtt,
    Mdt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    #[default]
    Summary,
    Csv,
    Both,
}

impl Output {
    pub fn summary(self) -> bool {
        matches!(self, Self::Summary | Self::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    order: usize,
    distance: f64,
    #[serde(default)]
    unit: Option<String>,
    bounds: Vec<f64>,
    mode: ModeKind,
    #[serde(default)]
    horizon: Option<f64>,
    #[serde(default)]
    target_order: Option<usize>,
    #[serde(default)]
    output: Output,
    #[serde(default)]
    sample_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Mtt,
    Mdt { horizon: f64, target_order: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mtt => f.write_str("mtt"),
            Self::Mdt { .. } => f.write_str("mdt"),
        }
    }
}

/// Validated problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub spec: MotionSpec,
    pub unit: String,
    pub mode: Mode,
    pub output: Output,
    pub sample_step: Option<f64>,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        if raw.bounds.len() != raw.order {
            bail!(
                "bounds: expected {} entries for order {}, got {}",
                raw.order,
                raw.order,
                raw.bounds.len()
            );
        }
        let spec = MotionSpec::new(raw.distance, raw.bounds).context("bounds or distance")?;
        let mode = match raw.mode {
            ModeKind::Mtt => {
                if raw.horizon.is_some() {
                    bail!("horizon: only allowed with mode = \"mdt\"");
                }
                if raw.target_order.is_some() {
                    bail!("target_order: only allowed with mode = \"mdt\"");
                }
                Mode::Mtt
            }
            ModeKind::Mdt => {
                let horizon = raw
                    .horizon
                    .context("horizon: required with mode = \"mdt\"")?;
                let target_order = raw
                    .target_order
                    .context("target_order: required with mode = \"mdt\"")?;
                // validates both fields
                MdtRequest::new(spec.clone(), horizon, target_order)
                    .context("horizon or target_order")?;
                Mode::Mdt {
                    horizon,
                    target_order,
                }
            }
        };
        if let Some(step) = raw.sample_step {
            if !(step.is_finite() && step > 0.0) {
                bail!("sample_step: must be positive, got {step}");
            }
        }
        Ok(Self {
            spec,
            unit: raw.unit.unwrap_or_else(|| "m".to_string()),
            mode,
            output: raw.output,
            sample_step: raw.sample_step,
        })
    }

    pub fn order(&self) -> usize {
        self.spec.order()
    }
}
