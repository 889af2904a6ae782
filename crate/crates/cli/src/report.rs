use serde::{Deserialize, Serialize};
use spherical_core::KsResult;

/// How a numeric check compares `value` with `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value - target| <= tolerance`
    Within,
    /// `value <= target`
    AtMost,
    /// `value < target`
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Ks {
        statistic: f64,
        threshold: f64,
        alpha: f64,
        passed: bool,
        sample_size: f64,
    },
    Numeric {
        value: f64,
        target: f64,
        tolerance: f64,
        relation: Relation,
        passed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl Check {
    pub fn ks(name: impl Into<String>, r: &KsResult) -> Self {
        Self {
            name: name.into(),
            outcome: Outcome::Ks {
                statistic: r.statistic,
                threshold: r.threshold,
                alpha: r.alpha,
                passed: r.passed,
                sample_size: r.sample_size,
            },
        }
    }

    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let passed = (value - target).abs() <= tolerance;
        Self::numeric(name, value, target, tolerance, Relation::Within, passed)
    }

    pub fn at_most(name: impl Into<String>, value: f64, target: f64) -> Self {
        Self::numeric(name, value, target, 0.0, Relation::AtMost, value <= target)
    }

    pub fn below(name: impl Into<String>, value: f64, target: f64) -> Self {
        Self::numeric(name, value, target, 0.0, Relation::Below, value < target)
    }

    fn numeric(
        name: impl Into<String>,
        value: f64,
        target: f64,
        tolerance: f64,
        relation: Relation,
        passed: bool,
    ) -> Self {
        Self {
            name: name.into(),
            outcome: Outcome::Numeric {
                value,
                target,
                tolerance,
                relation,
                passed,
            },
        }
    }

    pub fn passed(&self) -> bool {
        match self.outcome {
            Outcome::Ks { passed, .. } | Outcome::Numeric { passed, .. } => passed,
        }
    }
}

/// Counters accumulated while a suite runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Redraws of ill-conditioned or singular denominators on the matrix path.
    pub resamples: usize,
    /// Checks that could not be evaluated; each also appears as a failed check.
    pub errors: usize,
}

/// Contents of `report.json`.
///
/// Wall-clock time and the worker count are deliberately left out so that
/// reruns with the same seed are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<C> {
    pub suite: String,
    pub config: C,
    pub checks: Vec<Check>,
    pub counters: Counters,
    pub passed: bool,
}

impl<C> Report<C> {
    pub fn new(
        suite: impl Into<String>,
        config: C,
        checks: Vec<Check>,
        counters: Counters,
    ) -> Self {
        let passed = checks.iter().all(Check::passed);
        Self {
            suite: suite.into(),
            config,
            checks,
            counters,
            passed,
        }
    }
}
