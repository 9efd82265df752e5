//! Run configuration: built-in defaults, then the `--config` file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use memfir::device::{build_grid, GridSpacing, MemristanceGrid, DEFAULT_R_MAX, DEFAULT_R_MIN};
use memfir::synthesis::{ObjectiveNorm, RfCandidates, SearchConfig};
use memfir::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingArg {
    Linres,
    Lincond,
}

impl From<SpacingArg> for GridSpacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Linres => GridSpacing::LinearResistance,
            SpacingArg::Lincond => GridSpacing::LinearConductance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Simple,
    Advanced,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    SumRelative,
    SumAbs,
    SumSquared,
    MaxAbs,
}

impl From<NormArg> for ObjectiveNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::SumRelative => ObjectiveNorm::SumRelative,
            NormArg::SumAbs => ObjectiveNorm::SumAbs,
            NormArg::SumSquared => ObjectiveNorm::SumSquared,
            NormArg::MaxAbs => ObjectiveNorm::MaxAbs,
        }
    }
}

/// Input attenuation: a fixed value or the largest that respects the dead-zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleArg {
    Value(f64),
    Auto,
}

impl FromStr for ScaleArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ScaleArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(a) if a > 0.0 && a <= 1.0 => Ok(ScaleArg::Value(a)),
            _ => Err(format!("expected a number in (0, 1] or `auto`, got `{s}`")),
        }
    }
}

impl Serialize for ScaleArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScaleArg::Value(a) => s.serialize_f64(*a),
            ScaleArg::Auto => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for ScaleArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) => ScaleArg::from_str(&a.to_string()),
            Raw::Text(t) => ScaleArg::from_str(&t),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfSweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Every setting shared by the subcommands. Fields left out of a config
/// file keep their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    pub bits: Vec<u32>,
    pub grid_min_ohms: f64,
    pub grid_max_ohms: f64,
    pub grid_spacing: SpacingArg,
    pub method: MethodArg,
    /// Fixed R_f; the advanced search then evaluates only this value.
    pub rf_ohms: Option<f64>,
    pub rf_sweep: RfSweep,
    pub rf_on_grid: bool,
    pub objective: NormArg,
    pub scale_a: ScaleArg,
    pub dead_zone_v: f64,
    pub serial: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("out"),
            bits: vec![7],
            grid_min_ohms: DEFAULT_R_MIN,
            grid_max_ohms: DEFAULT_R_MAX,
            grid_spacing: SpacingArg::Linres,
            method: MethodArg::Advanced,
            rf_ohms: None,
            rf_sweep: RfSweep {
                start: 1e3,
                stop: 1e6,
                step: 1e3,
            },
            rf_on_grid: false,
            objective: NormArg::SumRelative,
            scale_a: ScaleArg::Value(0.1),
            dead_zone_v: 0.1,
            serial: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one --bits value is required".into(),
            ));
        }
        if let Some(&b) = self.bits.iter().find(|&&b| !(1..=16).contains(&b)) {
            return Err(Error::InvalidBits(b));
        }
        if let Some(r) = self.rf_ohms {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "--rf-ohms {r} must be a positive resistance"
                )));
            }
        }
        if !(self.dead_zone_v >= 0.0) {
            return Err(Error::InvalidConfig(
                "dead-zone voltage must be non-negative".into(),
            ));
        }
        self.grid(self.bits[0]).map(|_| ())
    }

    pub fn grid(&self, bits: u32) -> Result<MemristanceGrid<f64>> {
        build_grid(
            self.grid_min_ohms,
            self.grid_max_ohms,
            bits,
            self.grid_spacing.into(),
        )
    }

    pub fn search(&self, bits: u32) -> Result<SearchConfig<f64>> {
        let candidates = match self.rf_ohms {
            Some(r) => RfCandidates::List(vec![r]),
            None => RfCandidates::Sweep {
                start: self.rf_sweep.start,
                stop: self.rf_sweep.stop,
                step: self.rf_sweep.step,
            },
        };
        let mut cfg = SearchConfig::new(self.grid(bits)?)
            .with_candidates(candidates)
            .with_norm(self.objective.into());
        cfg.rf_on_grid = self.rf_on_grid;
        if self.serial {
            cfg = cfg.serial();
        }
        Ok(cfg)
    }
}
