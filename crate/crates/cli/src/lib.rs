//! Command line front end: scenario files, subcommand dispatch and reports.

pub mod report;
pub mod scenario;
pub mod tasks;

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use serde_json::{json, Value};
use symtangle_core::Config;

use report::{Assertion, Report, TaskEcho};
use scenario::ScenarioFile;
use tasks::Params;

/// Scenarios bundled with the binary, addressable by name.
pub const SHIPPED: &[(&str, &str)] = &[
    ("shift_pauli", include_str!("../scenarios/shift_pauli.toml")),
    ("shift_pair", include_str!("../scenarios/shift_pair.toml")),
    ("shift_zero_z2", include_str!("../scenarios/shift_zero_z2.toml")),
    ("brickwork_z2", include_str!("../scenarios/brickwork_z2.toml")),
    ("onsite_z2", include_str!("../scenarios/onsite_z2.toml")),
    ("identity", include_str!("../scenarios/identity.toml")),
    ("swap_bonds", include_str!("../scenarios/swap_bonds.toml")),
    ("shift_pauli_2d", include_str!("../scenarios/shift_pauli_2d.toml")),
];

/// Group-level checks run by `verify-suite --all`.
const GROUP_TASKS: &[(&str, &str, usize)] = &[
    ("cohomology", "Z2", 1),
    ("cohomology", "Z2", 2),
    ("cohomology", "Z2xZ2", 2),
    ("cohomology", "Z4", 2),
    ("cohomology", "Z2", 3),
    ("index0d", "Z2xZ2", 1),
    ("lps0d", "Z2xZ2", 2),
    ("disentangle0d", "Z4", 1),
    ("swindle", "Z2xZ2", 1),
    ("swindle", "S3", 3),
];

pub const COMMANDS: &[&str] = &[
    "cohomology",
    "index0d",
    "index1d",
    "lps0d",
    "boundary",
    "boundary2d",
    "blend",
    "factorize",
    "swindle",
    "disentangle0d",
    "verify-suite",
];

/// One invocation as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub command: String,
    pub scenario: Option<String>,
    pub group: Option<String>,
    pub degree: Option<usize>,
    pub cut: Option<i64>,
    pub width: Option<usize>,
    pub seed: Option<u64>,
    pub brute_force: bool,
    pub tol_overrides: Vec<String>,
    pub all: bool,
}

/// Reads a scenario from a path, or from the shipped set when no such file
/// exists.
pub fn resolve_scenario(name: &str) -> Result<ScenarioFile> {
    let path = Path::new(name);
    if path.exists() {
        return ScenarioFile::read(path);
    }
    let stem = name.trim_end_matches(".toml");
    match SHIPPED.iter().find(|(n, _)| *n == stem) {
        Some((_, text)) => ScenarioFile::parse(text),
        None => bail!("no scenario file or shipped scenario named `{name}`"),
    }
}

fn config(inv: &Invocation, task_seed: Option<u64>) -> Result<Config> {
    let mut cfg = Config::default();
    if let Some(s) = inv.seed.or(task_seed) {
        cfg.seed = s;
    }
    for kv in &inv.tol_overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("--tol-override expects KEY=VAL, got `{kv}`"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| anyhow!("--tol-override {k}: `{v}` is not a number"))?;
        match k.trim() {
            "max_dense_dim" => cfg.max_dense_dim = v as usize,
            "intertwiner_retries" => cfg.intertwiner_retries = v as usize,
            key if cfg.tol.set(key, v) => {}
            key => bail!("--tol-override: unknown key `{key}`"),
        }
    }
    Ok(cfg)
}

/// Runs an invocation. Every error ends up as a failed assertion.
pub fn run(inv: &Invocation) -> Report {
    if inv.command == "verify-suite" {
        return verify_suite(inv);
    }
    let mut echo = TaskEcho {
        command: inv.command.clone(),
        scenario: inv.scenario.clone(),
        group: inv.group.clone(),
        degree: inv.degree,
        cut: inv.cut,
        width: inv.width,
        brute_force: inv.brute_force,
    };
    let needs_scenario = matches!(
        inv.command.as_str(),
        "index1d" | "boundary" | "boundary2d" | "blend" | "factorize"
    );
    let file = match (&inv.scenario, needs_scenario) {
        (Some(s), true) => match resolve_scenario(s) {
            Ok(f) => Some(f),
            Err(e) => return failed(echo, None, &e, &Config::default()),
        },
        (None, true) => return failed(echo, None, &anyhow!("--scenario is required"), &Config::default()),
        _ => None,
    };
    let task = file.as_ref().and_then(|f| f.task.clone()).unwrap_or_default();
    let cfg = match config(inv, task.seed) {
        Ok(c) => c,
        Err(e) => return failed(echo, file, &e, &Config::default()),
    };
    let params = Params {
        cfg,
        group: inv.group.clone(),
        degree: inv.degree,
        cut: inv.cut.or(task.cut),
        width: inv.width.or(task.width),
        brute_force: inv.brute_force || task.brute_force.unwrap_or(false),
    };
    echo.cut = params.cut;
    echo.width = params.width;
    echo.brute_force = params.brute_force;
    let outcome = match inv.command.as_str() {
        "cohomology" => tasks::cohomology(&params),
        "index0d" => tasks::index0d(&params),
        "lps0d" => tasks::lps0d(&params),
        "disentangle0d" => tasks::disentangle0d(&params),
        "swindle" => tasks::swindle(&params),
        cmd if needs_scenario => {
            tasks::load(file.as_ref().unwrap(), &params).and_then(|sc| tasks::run_on(cmd, &sc, &params))
        }
        other => Err(anyhow!("unknown command `{other}`")),
    };
    match outcome {
        Ok((results, asserts)) => Report::new(echo, file, results, asserts, &params.cfg),
        Err(e) => failed(echo, file, &e, &params.cfg),
    }
}

fn failed(echo: TaskEcho, file: Option<ScenarioFile>, err: &anyhow::Error, cfg: &Config) -> Report {
    Report::new(echo, file, Value::Null, vec![Assertion::failure("run", err)], cfg)
}

fn summary(r: &Report) -> Value {
    let failed: Vec<&str> = r
        .assertions
        .iter()
        .filter(|a| !a.pass)
        .map(|a| a.name.as_str())
        .collect();
    json!({
        "command": r.task.command,
        "scenario": r.task.scenario,
        "group": r.task.group,
        "degree": r.task.degree,
        "status": r.status,
        "assertions": r.assertions.len(),
        "failed": failed,
        "details": r.assertions.iter().filter_map(|a| a.detail.clone()).collect::<Vec<_>>(),
    })
}

fn verify_suite(inv: &Invocation) -> Report {
    let echo = TaskEcho {
        command: "verify-suite".into(),
        scenario: inv.scenario.clone(),
        group: inv.group.clone(),
        brute_force: inv.brute_force,
        ..TaskEcho::default()
    };
    let cfg = match config(inv, None) {
        Ok(c) => c,
        Err(e) => return failed(echo, None, &e, &Config::default()),
    };
    let mut subs = Vec::new();
    let scenarios: Vec<String> = match (&inv.scenario, inv.all) {
        (Some(s), _) => vec![s.clone()],
        (None, true) => SHIPPED.iter().map(|(n, _)| n.to_string()).collect(),
        (None, false) => {
            return failed(echo, None, &anyhow!("verify-suite needs --all or --scenario"), &cfg);
        }
    };
    if inv.all {
        for &(command, group, degree) in GROUP_TASKS {
            subs.push(run(&Invocation {
                command: command.into(),
                group: Some(group.into()),
                degree: Some(degree),
                brute_force: command == "cohomology",
                ..inv.clone()
            }));
        }
    }
    for name in scenarios {
        let command = resolve_scenario(&name)
            .ok()
            .and_then(|f| f.task.and_then(|t| t.command))
            .unwrap_or_else(|| "index1d".into());
        subs.push(run(&Invocation {
            command,
            scenario: Some(name),
            all: false,
            ..inv.clone()
        }));
    }
    let asserts = subs
        .iter()
        .map(|r| {
            let what = r
                .task
                .scenario
                .clone()
                .or_else(|| r.task.group.clone())
                .unwrap_or_default();
            let name = match r.task.degree {
                Some(n) if r.task.scenario.is_none() => format!("{} {what} degree {n}", r.task.command),
                _ => format!("{} {what}", r.task.command),
            };
            Assertion::holds(&name, r.passed())
        })
        .collect();
    let results = Value::Array(subs.iter().map(summary).collect());
    Report::new(echo, None, results, asserts, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenarios_parse_and_name_themselves() {
        for (name, text) in SHIPPED {
            let f = ScenarioFile::parse(text).unwrap();
            assert_eq!(&f.name, name);
            assert!(f
                .task
                .and_then(|t| t.command)
                .is_some_and(|c| COMMANDS.contains(&c.as_str())));
        }
    }

    #[test]
    fn overrides_are_applied_and_unknown_keys_rejected() {
        let inv = Invocation {
            tol_overrides: vec!["span=0.5".into(), "max_dense_dim=64".into()],
            ..Invocation::default()
        };
        let cfg = config(&inv, None).unwrap();
        assert_eq!((cfg.tol.span, cfg.max_dense_dim), (0.5, 64));
        let bad = Invocation {
            tol_overrides: vec!["nonsense=1".into()],
            ..Invocation::default()
        };
        assert!(config(&bad, None).is_err());
    }

    #[test]
    fn narrow_rings_fail_the_width_precondition() {
        let text = "name = \"small\"\ngroup = \"Z2\"\n[ring]\nsites = 4\nlegs = [2]\n[generator]\nkind = \"identity\"\n[task]\ncommand = \"index1d\"\nwidth = 4\n";
        let f = ScenarioFile::parse(text).unwrap();
        let p = Params {
            cfg: Config::default(),
            group: None,
            degree: None,
            cut: None,
            width: Some(4),
            brute_force: false,
        };
        let msg = format!("{:#}", tasks::load(&f, &p).unwrap_err());
        assert!(msg.contains("N >= 6r"), "{msg}");
    }
}
