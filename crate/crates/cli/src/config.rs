//! Config files and the distribution flags shared by most subcommands.
//!
//! A config file is a JSON object holding one command's parameters. Flags
//! given on the command line take precedence over the file.

use std::fmt;
use std::path::Path;

use clap::Args;
use netperc::{DegreeDistribution, DistributionSpec, Family, FamilyKind};
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Bad input: exit code 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

/// Reads `path` as the config block `T`; unknown keys are rejected.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> anyhow::Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))
}

#[derive(Args, Debug, Default, Clone)]
pub struct DistFlags {
    /// constant, poisson, geometric, powerlaw or custom
    #[arg(long)]
    pub family: Option<String>,
    /// Poisson rate
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Geometric decay, p_k ∝ exp(-alpha (k - k_min))
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Power-law exponent
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Degree of the constant family
    #[arg(long)]
    pub k: Option<usize>,
    /// Custom pmf p_0,p_1,... (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub pmf: Option<Vec<f64>>,
    /// Maximum degree
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Treat delta as part of the distribution (skip the tail-mass check)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub bounded: Option<bool>,
    /// Tune the family parameter to this mean degree instead
    #[arg(long)]
    pub mean: Option<f64>,
}

/// `{"family", "mean", "delta", "k_min"}`: a family tuned to a mean.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TunedSpec {
    family: FamilyKind,
    mean: f64,
    delta: usize,
    #[serde(default = "one")]
    k_min: usize,
}

fn one() -> usize {
    1
}

impl DistFlags {
    /// Reads the `distribution` entry of a config: either the library's
    /// distribution spec or a tuned family.
    pub fn from_config(value: &serde_json::Value) -> anyhow::Result<Self> {
        let bad = |e: serde_json::Error| invalid(format!("distribution: {e}"));
        if value.get("mean").is_some() {
            let t: TunedSpec = serde_json::from_value(value.clone()).map_err(bad)?;
            let family = match t.family {
                FamilyKind::Poisson => "poisson",
                FamilyKind::Geometric => "geometric",
                FamilyKind::PowerLaw => "powerlaw",
            };
            return Ok(Self {
                family: Some(family.into()),
                mean: Some(t.mean),
                delta: Some(t.delta),
                k_min: Some(t.k_min),
                ..Default::default()
            });
        }
        let spec: DistributionSpec = serde_json::from_value(value.clone()).map_err(bad)?;
        let mut flags = Self {
            family: Some(spec.family.name().into()),
            delta: Some(spec.delta),
            k_min: Some(spec.k_min),
            bounded: Some(spec.bounded),
            ..Default::default()
        };
        match spec.family {
            Family::Constant { k } => flags.k = Some(k),
            Family::Poisson { lambda } => flags.lambda = Some(lambda),
            Family::Geometric { alpha } => flags.alpha = Some(alpha),
            Family::PowerLaw { gamma } => flags.exponent = Some(gamma),
            Family::Custom { pmf } => flags.pmf = Some(pmf),
        }
        Ok(flags)
    }

    /// Flags over config. A `--family` flag replaces the configured
    /// distribution; otherwise individual flags patch it.
    pub fn overlay(self, config: Option<&serde_json::Value>) -> anyhow::Result<Self> {
        let Some(value) = config else {
            return Ok(self);
        };
        if self.family.is_some() {
            return Ok(self);
        }
        let base = Self::from_config(value)?;
        Ok(Self {
            family: base.family,
            lambda: self.lambda.or(base.lambda),
            alpha: self.alpha.or(base.alpha),
            exponent: self.exponent.or(base.exponent),
            k: self.k.or(base.k),
            pmf: self.pmf.or(base.pmf),
            delta: self.delta.or(base.delta),
            k_min: self.k_min.or(base.k_min),
            bounded: self.bounded.or(base.bounded),
            mean: self.mean.or(base.mean),
        })
    }

    pub fn build(&self) -> anyhow::Result<DegreeDistribution> {
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| invalid("no distribution given: pass --family or a config with \"distribution\""))?;
        let k_min = self.k_min.unwrap_or(1);
        let bounded = self.bounded.unwrap_or(false);
        let given: Vec<&str> = [
            ("--lambda", self.lambda.is_some()),
            ("--alpha", self.alpha.is_some()),
            ("--exponent", self.exponent.is_some()),
            ("--k", self.k.is_some()),
            ("--pmf", self.pmf.is_some()),
            ("--mean", self.mean.is_some()),
        ]
        .iter()
        .filter(|g| g.1)
        .map(|g| g.0)
        .collect();
        let only = |allowed: &[&str]| -> anyhow::Result<()> {
            match given.iter().find(|g| !allowed.contains(g)) {
                Some(extra) => Err(invalid(format!("{extra} does not apply to the {family} family"))),
                None => Ok(()),
            }
        };
        let need_delta = || self.delta.ok_or_else(|| invalid(format!("--delta is required for the {family} family")));
        let tunable = |kind: FamilyKind, param: Option<f64>, flag: &str| -> anyhow::Result<DegreeDistribution> {
            let delta = need_delta()?;
            match (param, self.mean) {
                (Some(_), Some(_)) => Err(invalid(format!("give either {flag} or --mean, not both"))),
                (None, None) => Err(invalid(format!("the {family} family needs {flag} or --mean"))),
                (None, Some(mean)) => Ok(DegreeDistribution::with_mean(kind, mean, delta, k_min)?),
                (Some(x), None) => {
                    let f = match kind {
                        FamilyKind::Poisson => Family::Poisson { lambda: x },
                        FamilyKind::Geometric => Family::Geometric { alpha: x },
                        FamilyKind::PowerLaw => Family::PowerLaw { gamma: x },
                    };
                    Ok(DegreeDistribution::build(f, delta, k_min, bounded)?)
                }
            }
        };
        match family {
            "constant" => {
                only(&["--k"])?;
                let k = self.k.ok_or_else(|| invalid("the constant family needs --k"))?;
                let delta = self.delta.unwrap_or(k);
                Ok(DegreeDistribution::build(Family::Constant { k }, delta, k_min, bounded)?)
            }
            "poisson" => {
                only(&["--lambda", "--mean"])?;
                tunable(FamilyKind::Poisson, self.lambda, "--lambda")
            }
            "geometric" => {
                only(&["--alpha", "--mean"])?;
                tunable(FamilyKind::Geometric, self.alpha, "--alpha")
            }
            "powerlaw" => {
                only(&["--exponent", "--mean"])?;
                tunable(FamilyKind::PowerLaw, self.exponent, "--exponent")
            }
            "custom" => {
                only(&["--pmf"])?;
                let pmf = self.pmf.clone().ok_or_else(|| invalid("the custom family needs --pmf"))?;
                let delta = self.delta.unwrap_or(pmf.len().saturating_sub(1));
                Ok(DegreeDistribution::build(Family::Custom { pmf }, delta, k_min, bounded)?)
            }
            other => Err(invalid(format!(
                "unknown family {other:?}; expected constant, poisson, geometric, powerlaw or custom"
            ))),
        }
    }
}

pub fn pick<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}
