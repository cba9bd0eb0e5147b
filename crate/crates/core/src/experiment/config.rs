//! Experiment configuration: JSON file, CLI overrides, per-experiment
//! defaults, and validation into an [`ExperimentConfig`].

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{FamilyTag, LatticeFamily};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("config file is for `{file}` but the subcommand is `{cli}`")]
    ExperimentMismatch { file: Experiment, cli: Experiment },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VerifyCardy,
    Coupling,
    Violation,
    Sweep,
    Predict,
    ValidateLattice,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::VerifyCardy => "verify-cardy",
            Experiment::Coupling => "coupling",
            Experiment::Violation => "violation",
            Experiment::Sweep => "sweep",
            Experiment::Predict => "predict",
            Experiment::ValidateLattice => "validate-lattice",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A number or a list of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reals {
    One(f64),
    Many(Vec<f64>),
}

impl Reals {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            Reals::One(v) => vec![v],
            Reals::Many(v) => v,
        }
    }
}

impl From<Vec<f64>> for Reals {
    fn from(v: Vec<f64>) -> Self {
        Reals::Many(v)
    }
}

/// Every field optional: used both for the JSON config file and for CLI
/// overrides. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub experiment: Option<Experiment>,
    pub family: Option<FamilyTag>,
    pub k: Option<Reals>,
    pub delta: Option<Reals>,
    /// Mesh of the reference lattice in `coupling` and `violation`
    /// (defaults to `delta`).
    pub pair_delta: Option<f64>,
    pub x_params: Option<Vec<f64>>,
    pub p: Option<Reals>,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub window_radius: Option<i64>,
    pub periods: Option<Vec<[f64; 2]>>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            experiment: over.experiment.or(self.experiment),
            family: over.family.or(self.family),
            k: over.k.or(self.k),
            delta: over.delta.or(self.delta),
            pair_delta: over.pair_delta.or(self.pair_delta),
            x_params: over.x_params.or(self.x_params),
            p: over.p.or(self.p),
            n_samples: over.n_samples.or(self.n_samples),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            window_radius: over.window_radius.or(self.window_radius),
            periods: over.periods.or(self.periods),
        }
    }
}

pub const DEFAULT_SEED: u64 = 1;

/// 0.01, 0.02, ..., 0.99.
pub fn unit_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// Built-in settings for each experiment; the bottom configuration layer.
pub fn defaults(experiment: Experiment) -> ConfigLayer {
    let base = ConfigLayer {
        experiment: Some(experiment),
        family: Some(FamilyTag::Triangular),
        seed: Some(DEFAULT_SEED),
        format: Some(OutputFormat::Csv),
        ..ConfigLayer::default()
    };
    match experiment {
        Experiment::VerifyCardy => ConfigLayer {
            k: Some(Reals::One(1.0)),
            delta: Some(Reals::One(0.01)),
            x_params: Some(vec![0.25, 0.5, 0.75]),
            n_samples: Some(100_000),
            ..base
        },
        Experiment::Coupling => ConfigLayer {
            k: Some(Reals::One(2.0)),
            delta: Some(Reals::One(1.0 / 64.0)),
            x_params: Some(vec![0.25]),
            n_samples: Some(1_000),
            ..base
        },
        Experiment::Violation => ConfigLayer {
            k: Some(Reals::One(2.0)),
            delta: Some(Reals::One(0.01)),
            x_params: Some(vec![0.25]),
            n_samples: Some(100_000),
            ..base
        },
        Experiment::Sweep => ConfigLayer {
            k: Some(Reals::One(1.0)),
            delta: Some(Reals::Many(vec![0.1, 0.05, 0.025])),
            p: Some(Reals::Many(vec![0.4, 0.5, 0.6])),
            x_params: Some(vec![0.5]),
            n_samples: Some(10_000),
            ..base
        },
        Experiment::Predict => ConfigLayer {
            k: Some(Reals::Many(vec![1.0, 2.0, std::f64::consts::FRAC_1_SQRT_2])),
            x_params: Some(unit_grid()),
            ..base
        },
        Experiment::ValidateLattice => ConfigLayer {
            k: Some(Reals::One(1.0)),
            delta: Some(Reals::One(1.0)),
            window_radius: Some(16),
            periods: Some(vec![[1.0, 0.0], [0.0, 1.0]]),
            ..base
        },
    }
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: FamilyTag,
    pub k: Vec<f64>,
    pub delta: Vec<f64>,
    pub pair_delta: Option<f64>,
    pub x_params: Vec<f64>,
    pub p: Vec<f64>,
    pub n_samples: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub window_radius: i64,
    pub periods: Vec<[f64; 2]>,
}

impl ExperimentConfig {
    /// Layers, lowest precedence first: defaults, config file, CLI flags.
    pub fn resolve(
        experiment: Experiment,
        file: Option<ConfigLayer>,
        cli: ConfigLayer,
    ) -> Result<Self, ConfigError> {
        let file = file.unwrap_or_default();
        if let Some(fe) = file.experiment {
            if fe != experiment {
                return Err(ConfigError::ExperimentMismatch { file: fe, cli: experiment });
            }
        }
        let defaults = defaults(experiment);
        let user = file.overridden_by(cli);
        let family = user.family.or(defaults.family).unwrap_or(FamilyTag::Triangular);

        // Shape defaults only make sense for the triangular family.
        let k = match (&user.k, family) {
            (Some(k), _) => k.clone().into_vec(),
            (None, FamilyTag::Triangular) => defaults.k.clone().map(Reals::into_vec).unwrap_or_default(),
            (None, _) => vec![1.0],
        };
        let p_c = LatticeFamily::from_parts(family, None)
            .ok()
            .and_then(|f| f.critical_probability());
        let p = match (&user.p, &defaults.p) {
            (Some(p), _) => p.clone().into_vec(),
            (None, Some(d)) if p_c.is_some() => d.clone().into_vec(),
            (None, _) => p_c.map(|pc| vec![pc]).unwrap_or_default(),
        };

        let merged = defaults.overridden_by(user);
        let cfg = ExperimentConfig {
            experiment,
            family,
            k,
            delta: merged.delta.map(Reals::into_vec).unwrap_or_default(),
            pair_delta: merged.pair_delta,
            x_params: merged.x_params.unwrap_or_default(),
            p,
            n_samples: merged.n_samples.unwrap_or(1),
            seed: merged.seed.unwrap_or(DEFAULT_SEED),
            out: merged.out,
            format: merged.format.unwrap_or_default(),
            window_radius: merged.window_radius.unwrap_or(16),
            periods: merged.periods.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        use Experiment::*;
        let exp = self.experiment;
        let needs_sampling = matches!(exp, VerifyCardy | Coupling | Violation | Sweep);

        for &k in &self.k {
            if !(k.is_finite() && k > 0.5) {
                return Err(invalid(format!("k = {k} must be > 1/2")));
            }
        }
        if self.family != FamilyTag::Triangular && self.k.iter().any(|&k| k != 1.0) {
            return Err(invalid(format!("family {} takes no shape parameter k", self.family)));
        }
        if self.k.len() != 1 && exp != Predict {
            return Err(invalid(format!("{exp} takes exactly one k value")));
        }
        if exp != Predict {
            if self.delta.is_empty() {
                return Err(invalid("delta is required"));
            }
            if self.delta.len() != 1 && exp != Sweep {
                return Err(invalid(format!("{exp} takes exactly one delta value")));
            }
            for &d in self.delta.iter().chain(&self.pair_delta) {
                if !(d.is_finite() && d > 0.0) {
                    return Err(invalid(format!("delta = {d} must be > 0")));
                }
            }
        }
        if exp != ValidateLattice {
            if self.x_params.is_empty() {
                return Err(invalid("x_params must not be empty"));
            }
            for &x in &self.x_params {
                if !(x > 0.0 && x < 1.0) {
                    return Err(invalid(format!("x = {x} is outside (0, 1)")));
                }
            }
        }
        if needs_sampling {
            if self.p.is_empty() {
                return Err(invalid(format!(
                    "p is required: the critical probability of {} is not known",
                    self.family
                )));
            }
            if self.p.len() != 1 && exp != Sweep {
                return Err(invalid(format!("{exp} takes exactly one p value")));
            }
            for &p in &self.p {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("p = {p} is outside [0, 1]")));
                }
            }
            if self.n_samples == 0 {
                return Err(invalid("n_samples must be at least 1"));
            }
            if self.family == FamilyTag::Square {
                return Err(invalid("crossing experiments need a triangular-type or square-ne family"));
            }
        }

        let k0 = self.k.first().copied().unwrap_or(1.0);
        match exp {
            VerifyCardy => {
                if self.family != FamilyTag::Triangular || k0 != 1.0 {
                    return Err(invalid("verify-cardy runs on the equilateral lattice (triangular, k = 1)"));
                }
                if self.p != [0.5] {
                    return Err(invalid("verify-cardy runs at the critical point p = 1/2"));
                }
            }
            Coupling | Violation => {
                let ok = match self.family {
                    FamilyTag::Triangular => exp == Violation || k0 != 1.0,
                    FamilyTag::SquareNe => true,
                    _ => false,
                };
                if !ok {
                    return Err(invalid(format!(
                        "{exp} needs family triangular with k != 1, or square-ne"
                    )));
                }
            }
            Predict => {
                if !matches!(self.family, FamilyTag::Triangular | FamilyTag::SquareNe) {
                    return Err(invalid("predict needs family triangular or square-ne"));
                }
            }
            ValidateLattice => {
                if self.window_radius < 2 {
                    return Err(invalid("window_radius must be at least 2"));
                }
            }
            Sweep => {}
        }
        Ok(())
    }

    /// Key/value echo of the effective configuration (the output path is
    /// left out so identical runs produce identical files anywhere).
    pub fn provenance(&self) -> Vec<(String, String)> {
        use super::output::format_sig;
        let list = |v: &[f64]| v.iter().map(|&x| format_sig(x)).collect::<Vec<_>>().join(",");
        let mut out = vec![
            ("experiment".to_owned(), self.experiment.to_string()),
            ("family".to_owned(), self.family.to_string()),
            ("k".to_owned(), list(&self.k)),
        ];
        if self.experiment != Experiment::Predict {
            out.push(("delta".to_owned(), list(&self.delta)));
        }
        if let Some(pd) = self.pair_delta {
            out.push(("pair_delta".to_owned(), format_sig(pd)));
        }
        match self.experiment {
            Experiment::ValidateLattice => {
                out.push(("window_radius".to_owned(), self.window_radius.to_string()));
                let periods = self
                    .periods
                    .iter()
                    .map(|[a, b]| format!("({} {})", format_sig(*a), format_sig(*b)))
                    .collect::<Vec<_>>()
                    .join(",");
                out.push(("periods".to_owned(), periods));
            }
            Experiment::Predict => {
                out.push(("x_params".to_owned(), list(&self.x_params)));
            }
            _ => {
                out.push(("x_params".to_owned(), list(&self.x_params)));
                out.push(("p".to_owned(), list(&self.p)));
                out.push(("n_samples".to_owned(), self.n_samples.to_string()));
                out.push(("seed".to_owned(), self.seed.to_string()));
                out.push((
                    "site_stream".to_owned(),
                    format!("v{}", crate::engine::rng::SITE_STREAM_VERSION),
                ));
            }
        }
        out.push((
            "format".to_owned(),
            match self.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }
            .to_owned(),
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(json: &str) -> ConfigLayer {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn defaults_are_valid() {
        for exp in [
            Experiment::VerifyCardy,
            Experiment::Coupling,
            Experiment::Violation,
            Experiment::Sweep,
            Experiment::Predict,
            Experiment::ValidateLattice,
        ] {
            ExperimentConfig::resolve(exp, None, ConfigLayer::default())
                .unwrap_or_else(|e| panic!("{exp}: {e}"));
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ConfigLayer>(r#"{"delta": 0.1, "colour": "red"}"#).is_err());
    }

    #[test]
    fn scalar_or_list() {
        let l = layer(r#"{"delta": [0.1, 0.05], "p": 0.4}"#);
        assert_eq!(l.delta.unwrap().into_vec(), vec![0.1, 0.05]);
        assert_eq!(l.p.unwrap().into_vec(), vec![0.4]);
    }

    #[test]
    fn cli_overrides_file() {
        let file = layer(r#"{"delta": 0.05, "seed": 9, "n_samples": 10}"#);
        let cli = ConfigLayer {
            seed: Some(11),
            ..ConfigLayer::default()
        };
        let cfg = ExperimentConfig::resolve(Experiment::VerifyCardy, Some(file), cli).unwrap();
        assert_eq!((cfg.delta[0], cfg.seed, cfg.n_samples), (0.05, 11, 10));
    }

    #[test]
    fn invalid_configs() {
        let bad = |exp, json: &str| ExperimentConfig::resolve(exp, Some(layer(json)), ConfigLayer::default());
        assert!(bad(Experiment::VerifyCardy, r#"{"x_params": [1.5]}"#).is_err());
        assert!(bad(Experiment::VerifyCardy, r#"{"x_params": [0.0]}"#).is_err());
        assert!(bad(Experiment::VerifyCardy, r#"{"k": 2}"#).is_err());
        assert!(bad(Experiment::Coupling, r#"{"k": 1}"#).is_err());
        assert!(bad(Experiment::Coupling, r#"{"family": "tri-ne"}"#).is_err());
        assert!(bad(Experiment::Violation, r#"{"k": 0.4}"#).is_err());
        assert!(bad(Experiment::Sweep, r#"{"family": "tri-ne"}"#).is_err());
        assert!(bad(Experiment::Sweep, r#"{"family": "square", "p": 0.6}"#).is_err());
        assert!(bad(Experiment::Violation, r#"{"experiment": "sweep"}"#).is_err());
        assert!(bad(Experiment::Coupling, r#"{"family": "square-ne", "k": 2}"#).is_err());
        assert!(bad(Experiment::ValidateLattice, r#"{"window_radius": 1}"#).is_err());
    }

    #[test]
    fn family_change_drops_triangular_shape_default() {
        let cfg = ExperimentConfig::resolve(
            Experiment::Violation,
            Some(layer(r#"{"family": "square-ne"}"#)),
            ConfigLayer::default(),
        )
        .unwrap();
        assert_eq!(cfg.k, vec![1.0]);
        assert_eq!(cfg.p, vec![0.5]);
    }

    #[test]
    fn unknown_critical_point_requires_p() {
        let ok = ExperimentConfig::resolve(
            Experiment::Sweep,
            Some(layer(r#"{"family": "tri-ne", "p": [0.55, 0.6]}"#)),
            ConfigLayer::default(),
        )
        .unwrap();
        assert_eq!(ok.p, vec![0.55, 0.6]);
    }
}
