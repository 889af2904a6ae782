use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use spherical_core::ensembles::MRule;

use crate::checks::Group;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "spherical",
    version,
    about = "Products of spherical random matrices: sampling and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw spectra and write spectra.csv plus manifest.json.
    Sample(Flags),
    /// Run a verification suite and write report.json; exits 1 on failure.
    Verify(Flags),
    /// Tabulate w_m and the normalized Y_j densities.
    Weights(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Fixed,
    EqualN,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    Matrix,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Limits,
    Paths,
    Moments,
    Ordering,
    Weights,
    Concentration,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Limits => "limits",
            Suite::Paths => "paths",
            Suite::Moments => "moments",
            Suite::Ordering => "ordering",
            Suite::Weights => "weights",
            Suite::Concentration => "concentration",
        }
    }

    pub fn groups(self) -> Vec<Group> {
        use Group::*;
        match self {
            Suite::All => Group::ALL.to_vec(),
            Suite::Limits => vec![ScalarOracle, LimitLaw, FixedMLaw, GnSymmetry],
            Suite::Paths => vec![PathEquivalence, Eigensolver, AngleUniformity],
            Suite::Moments => vec![Moments, EtaDecay],
            Suite::Ordering => vec![Ordering],
            Suite::Weights => vec![Weights],
            Suite::Concentration => vec![Concentration],
        }
    }
}

/// Every option, as given on the command line or in a `--config` file.
/// Command-line values win.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    #[arg(long)]
    pub n: Option<usize>,
    /// Fixed number of factors (implies --m-rule fixed).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub m_rule: Option<RuleKind>,
    /// Exponent of the pow rule, m = ceil(n^alpha).
    #[arg(long)]
    pub alpha_exp: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub path: Option<PathKind>,
    /// KS significance level.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Indices written to y_density.csv (comma separated; default all).
    #[arg(long, value_delimiter = ',')]
    pub j: Option<Vec<usize>>,
    /// Smallest y of the weights grid.
    #[arg(long)]
    pub y_min: Option<f64>,
    /// Largest y of the weights grid.
    #[arg(long)]
    pub y_max: Option<f64>,
    /// Number of log-spaced grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

impl Flags {
    /// Fills unset options from the `--config` file, if any.
    pub fn with_config_file(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        Ok(self.or(file))
    }

    fn or(self, other: Flags) -> Flags {
        Flags {
            n: self.n.or(other.n),
            m: self.m.or(other.m),
            m_rule: self.m_rule.or(other.m_rule),
            alpha_exp: self.alpha_exp.or(other.alpha_exp),
            trials: self.trials.or(other.trials),
            seed: self.seed.or(other.seed),
            path: self.path.or(other.path),
            alpha: self.alpha.or(other.alpha),
            out: self.out.or(other.out),
            jobs: self.jobs.or(other.jobs),
            config: self.config,
            suite: self.suite.or(other.suite),
            j: self.j.or(other.j),
            y_min: self.y_min.or(other.y_min),
            y_max: self.y_max.or(other.y_max),
            points: self.points.or(other.points),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Resolves `--m` / `--m-rule` / `--alpha-exp` into a rule.
    pub fn m_rule(&self) -> Result<MRule, CliError> {
        match (self.m_rule, self.m) {
            (None | Some(RuleKind::Fixed), Some(m)) => Ok(MRule::Fixed(m)),
            (None, None) => Ok(MRule::Fixed(1)),
            (Some(RuleKind::Fixed), None) => {
                Err(CliError::Config("--m-rule fixed needs --m".into()))
            }
            (Some(RuleKind::EqualN), None) => Ok(MRule::EqualN),
            (Some(RuleKind::Pow), None) => match self.alpha_exp {
                Some(a) => Ok(MRule::CeilPow(a)),
                None => Err(CliError::Config("--m-rule pow needs --alpha-exp".into())),
            },
            (Some(_), Some(_)) => Err(CliError::Config(
                "--m only combines with --m-rule fixed".into(),
            )),
        }
    }
}

fn read_config(path: &Path) -> Result<Flags, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
