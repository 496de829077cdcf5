//! The JSON run configuration.
//!
//! Every field is optional; command-line flags take precedence over the
//! file, and the file over built-in defaults. Unknown keys are rejected.
//!
//! ```json
//! {
//!   "preset": "schottky-demo",
//!   "group": {
//!     "generators": [[[5, 12], [2, 5]], [[3, 2], [4, 3]]],
//!     "generator_form": "sl2",
//!     "base_point": [3, 4, 5],
//!     "label": "my-group"
//!   },
//!   "enumeration": { "radius": 1e6, "slack": 2, "max_word_length": 64, "node_budget": 50000000 },
//!   "radii": [1e3, 1e4, 1e5],
//!   "polynomial": "FC",
//!   "prime_bound": 50,
//!   "sieve": { "delta": "fit", "theta": 0.8333333333, "mode": "any", "r_targets": [14] },
//!   "outputs": { "dir": "out" }
//! }
//! ```

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use thinsieve::dhr::HorocycleMode;
use thinsieve::lattice::{Mat2, Mat3, Triple};
use thinsieve::presets::{self, Preset};
use thinsieve::{GroupPresentation, SievePolynomial};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub enumeration: EnumerationSpec,
    pub radii: Option<Vec<f64>>,
    pub polynomial: Option<SievePolynomial>,
    pub prime_bound: Option<u64>,
    #[serde(default)]
    pub sieve: SieveSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorForm {
    #[default]
    Sl2,
    Soq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    /// 2×2 matrices for `sl2`, 3×3 for `soq`.
    pub generators: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    pub generator_form: GeneratorForm,
    #[serde(default = "default_base")]
    pub base_point: [i64; 3],
    pub label: Option<String>,
    pub max_word_length: Option<usize>,
}

fn default_base() -> [i64; 3] {
    [3, 4, 5]
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationSpec {
    pub radius: Option<f64>,
    pub slack: Option<f64>,
    pub max_word_length: Option<usize>,
    pub node_budget: Option<usize>,
}

/// `δ` as a number or the string `"fit"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Value(f64),
    Fit(FitTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitTag {
    Fit,
}

impl std::str::FromStr for DeltaSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("fit") {
            return Ok(Self::Fit(FitTag::Fit));
        }
        s.parse().map(Self::Value).map_err(|_| format!("expected a number or \"fit\", got {s:?}"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveSpec {
    pub delta: Option<DeltaSpec>,
    pub theta: Option<f64>,
    pub mode: Option<HorocycleMode>,
    pub r_targets: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Debug)]
pub enum ConfigError {
    Read(String),
    Schema(String),
    Group(thinsieve::Error),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Read(m) | Self::Schema(m) => f.write_str(m),
            Self::Group(e) => write!(f, "{e}"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))
    }

    /// The group to run on: `preset_flag`, else the config's `group`, else
    /// its `preset`, else `full-orbit`.
    pub fn resolve_group(&self, preset_flag: Option<&str>) -> Result<Preset, ConfigError> {
        if let Some(name) = preset_flag {
            return named(name);
        }
        match (&self.group, &self.preset) {
            (Some(g), _) => g.build(),
            (None, Some(name)) => named(name),
            (None, None) => Ok(presets::full_orbit()),
        }
    }
}

fn named(name: &str) -> Result<Preset, ConfigError> {
    presets::by_name(name).ok_or_else(|| {
        ConfigError::Schema(format!("unknown preset {name:?}; known: {}", presets::NAMES.join(", ")))
    })
}

impl GroupSpec {
    pub fn build(&self) -> Result<Preset, ConfigError> {
        let [x, y, z] = self.base_point;
        let base = Triple::<BigInt>::from_i64(x, y, z);
        let label = self.label.clone().unwrap_or_else(|| "custom".into());
        let presentation = match self.generator_form {
            GeneratorForm::Sl2 => {
                let mats = self
                    .generators
                    .iter()
                    .map(|m| match m.as_slice() {
                        [r0, r1] if r0.len() == 2 && r1.len() == 2 => {
                            Ok(Mat2::from_i64(r0[0], r0[1], r1[0], r1[1]))
                        }
                        _ => Err(ConfigError::Schema("sl2 generators must be 2×2".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GroupPresentation::from_sl2(&mats, base, label)
            }
            GeneratorForm::Soq => {
                let mats = self
                    .generators
                    .iter()
                    .map(|m| match m.as_slice() {
                        [r0, r1, r2] if [r0, r1, r2].iter().all(|r| r.len() == 3) => Ok(Mat3::from_i64([
                            [r0[0], r0[1], r0[2]],
                            [r1[0], r1[1], r1[2]],
                            [r2[0], r2[1], r2[2]],
                        ])),
                        _ => Err(ConfigError::Schema("soq generators must be 3×3".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GroupPresentation::new(mats, base, label)
            }
        }
        .map_err(ConfigError::Group)?;
        Ok(Preset { name: "custom", presentation, max_word_length: self.max_word_length.unwrap_or(64) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_valid() {
        assert_eq!(RunConfig::parse("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::parse(r#"{"radius": 3}"#), Err(ConfigError::Schema(_))));
    }

    #[test]
    fn delta_accepts_fit() {
        let c = RunConfig::parse(r#"{"sieve": {"delta": "fit", "mode": "finite"}}"#).unwrap();
        assert_eq!(c.sieve.delta, Some(DeltaSpec::Fit(FitTag::Fit)));
        assert_eq!(c.sieve.mode, Some(HorocycleMode::Finite));
        let c = RunConfig::parse(r#"{"sieve": {"delta": 0.99}}"#).unwrap();
        assert_eq!(c.sieve.delta, Some(DeltaSpec::Value(0.99)));
    }

    #[test]
    fn parity_is_checked_for_sl2() {
        let c = RunConfig::parse(r#"{"group": {"generators": [[[1, 1], [0, 1]]]}}"#).unwrap();
        assert!(matches!(
            c.resolve_group(None),
            Err(ConfigError::Group(thinsieve::Error::Parity(_)))
        ));
    }

    #[test]
    fn trivial_and_soq_groups() {
        let c = RunConfig::parse(r#"{"group": {"generators": [], "label": "trivial"}}"#).unwrap();
        assert!(c.resolve_group(None).unwrap().presentation.generators().is_empty());
        let c = RunConfig::parse(
            r#"{"group": {"generators": [[[-1, 0, 0], [0, -1, 0], [0, 0, 1]]], "generator_form": "soq"}}"#,
        )
        .unwrap();
        assert_eq!(c.resolve_group(None).unwrap().presentation.generators().len(), 1);
    }

    #[test]
    fn round_trip() {
        let c = RunConfig {
            preset: Some("schottky-demo".into()),
            radii: Some(vec![10.0, 100.0]),
            polynomial: Some(SievePolynomial::Coordinates),
            ..Default::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
    }
}
