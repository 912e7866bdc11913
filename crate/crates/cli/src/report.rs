//! Reports: a task echo, results, one entry per checked assertion and the
//! effective configuration. Nothing time- or host-dependent goes in, so equal
//! inputs give equal bytes.

use serde::Serialize;
use serde_json::{Map, Value};
use symtangle_core::Config;

use crate::scenario::ScenarioFile;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TaskEcho {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    pub brute_force: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Assertion {
    /// `value <= bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.into(),
            pass: value <= bound,
            value: Some(value.into()),
            bound: Some(bound.into()),
            detail: None,
        }
    }

    pub fn holds(name: &str, pass: bool) -> Self {
        Assertion {
            name: name.into(),
            pass,
            value: None,
            bound: None,
            detail: None,
        }
    }

    pub fn equal<T: Serialize + PartialEq>(name: &str, found: &T, expected: &T) -> Self {
        Assertion {
            name: name.into(),
            pass: found == expected,
            value: serde_json::to_value(found).ok(),
            bound: serde_json::to_value(expected).ok(),
            detail: None,
        }
    }

    pub fn failure(name: &str, err: &anyhow::Error) -> Self {
        Assertion {
            name: name.into(),
            pass: false,
            value: None,
            bound: None,
            detail: Some(format!("{err:#}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub seed: u64,
    pub max_dense_dim: usize,
    pub intertwiner_retries: usize,
    pub tolerances: Map<String, Value>,
}

impl Environment {
    pub fn of(cfg: &Config) -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            max_dense_dim: cfg.max_dense_dim,
            intertwiner_retries: cfg.intertwiner_retries,
            tolerances: cfg
                .tol
                .entries()
                .iter()
                .map(|&(k, v)| (k.to_string(), v.into()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub task: TaskEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioFile>,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub environment: Environment,
    pub status: &'static str,
}

impl Report {
    pub fn new(
        task: TaskEcho,
        scenario: Option<ScenarioFile>,
        results: Value,
        assertions: Vec<Assertion>,
        cfg: &Config,
    ) -> Self {
        let pass = !assertions.is_empty() && assertions.iter().all(|a| a.pass);
        Report {
            task,
            scenario,
            results,
            assertions,
            environment: Environment::of(cfg),
            status: if pass { "pass" } else { "fail" },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_reports_fail() {
        let r = Report::new(TaskEcho::default(), None, Value::Null, vec![], &Config::default());
        assert!(!r.passed());
    }

    #[test]
    fn tolerances_are_recorded() {
        let mut cfg = Config::default();
        cfg.tol.span = 1e-3;
        let env = Environment::of(&cfg);
        assert_eq!(env.tolerances["span"], Value::from(1e-3));
        assert_eq!(env.tolerances.len(), 12);
    }
}
