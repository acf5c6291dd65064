//! Experiment configuration: a TOML file with top-level run settings and a
//! `[params]` table checked against the experiment's parameter list.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use toml::Table;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VerifyBrownianBridge,
    VerifyGcMoments,
    VerifyArcsine,
    VerifySubordinator,
    VerifyBesselBridge,
    VerifyWindowConvergence,
    ProbeResolvent,
    VerifyDensities,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::VerifyBrownianBridge,
        Experiment::VerifyGcMoments,
        Experiment::VerifyArcsine,
        Experiment::VerifySubordinator,
        Experiment::VerifyBesselBridge,
        Experiment::VerifyWindowConvergence,
        Experiment::ProbeResolvent,
        Experiment::VerifyDensities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifyBrownianBridge => "verify-brownian-bridge",
            Experiment::VerifyGcMoments => "verify-gc-moments",
            Experiment::VerifyArcsine => "verify-arcsine",
            Experiment::VerifySubordinator => "verify-subordinator",
            Experiment::VerifyBesselBridge => "verify-bessel-bridge",
            Experiment::VerifyWindowConvergence => "verify-window-convergence",
            Experiment::ProbeResolvent => "probe-resolvent",
            Experiment::VerifyDensities => "verify-densities",
        }
    }

    /// The result the experiment checks.
    pub fn anchor(self) -> &'static str {
        match self {
            Experiment::VerifyBrownianBridge => "pathwise bridge at the last passage under c·t^(1/γ)",
            Experiment::VerifyGcMoments => "Hermite-function moments of g_c",
            Experiment::VerifyArcsine => "Lévy and generalized arcsine laws",
            Experiment::VerifySubordinator => "stable subordinator conditioned to die at b",
            Experiment::VerifyBesselBridge => "Bessel bridge by time inversion",
            Experiment::VerifyWindowConvergence => "bridge as weak limit of thin-window conditioning",
            Experiment::ProbeResolvent => "small-time exponents of the stable OU kernel",
            Experiment::VerifyDensities => "special-function and kernel identities",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::VerifyBrownianBridge => "KS of pathwise-bridge marginals against the exact Brownian bridge",
            Experiment::VerifyGcMoments => "E g_c^q for Brownian motion against the Hermite formula",
            Experiment::VerifyArcsine => "g_0 for Brownian motion and g for stable subordinators against arcsine laws",
            Experiment::VerifySubordinator => "death time, bridge property and scaling of the conditioned subordinator",
            Experiment::VerifyBesselBridge => "time-inversion Bessel bridge marginals and Bessel simulator marginals",
            Experiment::VerifyWindowConvergence => "window-conditioned means, acceptance rate and bridge weights",
            Experiment::ProbeResolvent => "fitted small-t slopes of log q_t(x,x)",
            Experiment::VerifyDensities => "Hermite identities, kernel normalization and Chapman-Kolmogorov, Laplace transform",
        }
    }

    /// Run-setting defaults: `(n_paths, grid_steps)`.
    pub fn default_sizes(self) -> (usize, usize) {
        match self {
            Experiment::VerifyWindowConvergence => (10_000, 64),
            Experiment::VerifyBesselBridge => (100_000, 64),
            Experiment::ProbeResolvent => (1, 2),
            _ => (100_000, 16_384),
        }
    }

    pub fn params(self) -> Vec<ParamSpec> {
        use Constraint::*;
        use ParamValue::{Bool, List, Number, Pairs};
        let p = ParamSpec::new;
        match self {
            Experiment::VerifyBrownianBridge => vec![
                p("c", List(vec![0.0, 1.0]), Finite, "terminal values of the unit bridges"),
                p("s", List(vec![0.25, 0.5, 0.75]), UnitOpen, "times at which marginals are compared"),
                p("exact_steps", Number(4.0), Steps, "grid steps of the exact bridge (s must lie on it)"),
            ],
            Experiment::VerifyGcMoments => vec![
                p("c", List(vec![0.0, 1.0]), Finite, "curve levels"),
                p("q", List(vec![1.0, 2.0]), Positive, "moment orders"),
                p("asymptotic_q", List(vec![25.0, 100.0, 400.0]), Positive, "orders for the large-q check (max ≥ 100)"),
            ],
            Experiment::VerifyArcsine => vec![
                p("brownian", Bool(true), Finite, "include the Brownian g_0 check"),
                p("alpha", List(vec![0.3, 0.5, 0.7]), SubordinatorIndex, "subordinator indices"),
                p("b", Number(1.0), Positive, "passage level"),
                p("joint_alpha", Number(0.5), SubordinatorIndex, "index for the joint (L, g) check"),
                p("joint_bins", Number(10.0), Steps, "bins per axis of the joint check"),
            ],
            Experiment::VerifySubordinator => vec![
                p("alpha", Number(0.5), SubordinatorIndex, "subordinator index"),
                p("b", Number(1.0), Positive, "death level"),
                p("scaled_b", Number(2.0), Positive, "second level for the scaling check"),
                p("bridge_samples", Number(20_000.0), Steps, "paths used in the bridge-property test"),
            ],
            Experiment::VerifyBesselBridge => vec![
                p("delta", List(vec![3.0, 1.5]), Positive, "dimensions of the bridges"),
                p("y", Number(1.0), Positive, "end point"),
                p("t", Number(1.0), Positive, "bridge length"),
                p("u", List(vec![0.25, 0.5, 0.75]), UnitOpen, "times (fractions of t) at which marginals are tested"),
                p("sim_delta", List(vec![2.0, 3.0, 0.6]), Positive, "dimensions for the simulator marginal check"),
            ],
            Experiment::VerifyWindowConvergence => vec![
                p("x", Number(0.0), Finite, "start point"),
                p("y", Number(1.0), Finite, "target point"),
                p("t", Number(1.0), Positive, "conditioning time"),
                p("s", Number(0.5), UnitOpen, "observation time (fraction of t)"),
                p("deltas", List(vec![0.2, 0.1, 0.05]), Positive, "window half-widths"),
                p("rate_delta", Number(0.05), Positive, "window whose acceptance rate is checked"),
                p("rn_delta", Number(0.02), Positive, "window for the bridge-weight histogram"),
                p("rn_samples", Number(20_000.0), Steps, "accepted paths for the bridge-weight histogram"),
                p("rn_bins", Number(20.0), Steps, "bins of the bridge-weight histogram"),
                p("max_attempts", Number(1e8), Positive, "attempt budget per window"),
            ],
            Experiment::ProbeResolvent => vec![
                p(
                    "cases",
                    Pairs(vec![[2.0, 0.0], [1.5, 0.0], [1.0, 0.0], [0.5, 0.0], [1.0, 0.5], [0.5, 1.0]]),
                    StablePairs,
                    "(alpha, x) pairs",
                ),
                p("t_max", Number(1e-2), Positive, "largest time of the fit"),
                p("t_min", Number(1e-6), Positive, "smallest time of the fit"),
                p("points", Number(12.0), Steps, "number of geometric time points (≥ 8)"),
                p("tolerance", Number(0.05), Positive, "allowed |fitted - predicted|"),
            ],
            Experiment::VerifyDensities => vec![
                p("laplace_alpha", Number(0.5), SubordinatorIndex, "subordinator index of the Laplace check"),
                p("laplace_q", Number(1.0), Positive, "Laplace argument"),
                p("bessel_delta", List(vec![3.0, 1.5]), Positive, "Bessel dimensions for kernel checks"),
                p("stable_alpha", List(vec![0.5, 1.5]), StableIndex, "symmetric stable indices for density checks"),
                p("subordinator_alpha", List(vec![0.3, 0.5, 0.7]), SubordinatorIndex, "one-sided indices for density checks"),
            ],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(vec![format!("unknown experiment '{s}'")]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Number(f64),
    List(Vec<f64>),
    Pairs(Vec<[f64; 2]>),
}

impl ParamValue {
    fn kind(&self) -> &'static str {
        match self {
            ParamValue::Bool(_) => "a boolean",
            ParamValue::Number(_) => "a number",
            ParamValue::List(_) => "a non-empty array of numbers",
            ParamValue::Pairs(_) => "a non-empty array of [number, number] pairs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Finite,
    Positive,
    /// Strictly between 0 and 1.
    UnitOpen,
    /// Integer ≥ 1.
    Steps,
    SubordinatorIndex,
    StableIndex,
    /// `[alpha, x]` with alpha ∈ (0, 2] and finite x.
    StablePairs,
}

impl Constraint {
    fn check(self, v: f64) -> Option<&'static str> {
        let ok = match self {
            Constraint::Finite | Constraint::StablePairs => v.is_finite(),
            Constraint::Positive => v > 0.0 && v.is_finite(),
            Constraint::UnitOpen => v > 0.0 && v < 1.0,
            Constraint::Steps => v >= 1.0 && v.fract() == 0.0 && v <= 1e12,
            Constraint::SubordinatorIndex => v > 0.0 && v < 1.0,
            Constraint::StableIndex => v > 0.0 && v <= 2.0,
        };
        (!ok).then_some(match self {
            Constraint::Finite | Constraint::StablePairs => "must be finite",
            Constraint::Positive => "must be > 0",
            Constraint::UnitOpen => "must lie in (0, 1)",
            Constraint::Steps => "must be a positive integer",
            Constraint::SubordinatorIndex => "must lie in (0, 1)",
            Constraint::StableIndex => "must lie in (0, 2]",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: ParamValue,
    pub constraint: Constraint,
    pub help: &'static str,
}

impl ParamSpec {
    fn new(name: &'static str, default: ParamValue, constraint: Constraint, help: &'static str) -> Self {
        ParamSpec {
            name,
            default,
            constraint,
            help,
        }
    }
}

/// Resolved parameters in declaration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params(Vec<(String, ParamValue)>);

impl Params {
    pub fn defaults(experiment: Experiment) -> Self {
        Params(experiment.params().into_iter().map(|p| (p.name.to_string(), p.default)).collect())
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn set(&mut self, name: &str, value: ParamValue) {
        match self.0.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name.to_string(), value)),
        }
    }

    /// Panics on a missing or mistyped name; experiments only read
    /// parameters they declare, after validation.
    pub fn number(&self, name: &str) -> f64 {
        match self.get(name) {
            Some(ParamValue::Number(v)) => *v,
            other => panic!("parameter {name}: expected a number, found {other:?}"),
        }
    }

    pub fn count(&self, name: &str) -> usize {
        self.number(name) as usize
    }

    pub fn list(&self, name: &str) -> &[f64] {
        match self.get(name) {
            Some(ParamValue::List(v)) => v,
            other => panic!("parameter {name}: expected a list, found {other:?}"),
        }
    }

    pub fn pairs(&self, name: &str) -> &[[f64; 2]] {
        match self.get(name) {
            Some(ParamValue::Pairs(v)) => v,
            other => panic!("parameter {name}: expected pairs, found {other:?}"),
        }
    }

    pub fn flag(&self, name: &str) -> bool {
        match self.get(name) {
            Some(ParamValue::Bool(v)) => *v,
            other => panic!("parameter {name}: expected a boolean, found {other:?}"),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.0 {
            m.insert(k.clone(), serde_json::to_value(v).unwrap_or(Value::Null));
        }
        Value::Object(m)
    }
}

/// Rows written per CSV series unless the config says otherwise.
pub const DEFAULT_CSV_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub n_paths: usize,
    pub grid_steps: usize,
    pub jump_cutoff: f64,
    /// Worker threads; never changes the output. Defaults to the number of
    /// available cores.
    pub parallelism: usize,
    /// Rows kept per CSV series.
    pub csv_limit: usize,
    pub params: Params,
}

const TOP_KEYS: [&str; 8] = [
    "experiment",
    "seed",
    "n_paths",
    "grid_steps",
    "jump_cutoff",
    "parallelism",
    "csv_limit",
    "params",
];

impl ExperimentConfig {
    /// Defaults for `experiment`.
    pub fn new(experiment: Experiment) -> Self {
        let (n_paths, grid_steps) = experiment.default_sizes();
        ExperimentConfig {
            experiment,
            seed: 1,
            n_paths,
            grid_steps,
            jump_cutoff: crate::bridges::DEFAULT_JUMP_CUTOFF,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            csv_limit: DEFAULT_CSV_LIMIT,
            params: Params::defaults(experiment),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Parses and validates; every problem found is reported together.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(vec![format!("not valid TOML: {}", e.message())]))?;
        let mut errors = Vec::new();
        for key in table.keys() {
            if !TOP_KEYS.contains(&key.as_str()) {
                errors.push(format!("unknown key '{key}'"));
            }
        }
        let experiment = match table.get("experiment") {
            None => {
                errors.push("missing key 'experiment'".to_string());
                None
            }
            Some(toml::Value::String(s)) => match s.parse::<Experiment>() {
                Ok(e) => Some(e),
                Err(_) => {
                    let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                    errors.push(format!("unknown experiment '{s}' (expected one of {})", names.join(", ")));
                    None
                }
            },
            Some(_) => {
                errors.push("'experiment' must be a string".to_string());
                None
            }
        };
        let mut cfg = ExperimentConfig::new(experiment.unwrap_or(Experiment::VerifyGcMoments));
        if let Some(v) = int_field(&table, "seed", 0, &mut errors) {
            cfg.seed = v as u64;
        }
        if let Some(v) = int_field(&table, "n_paths", 1, &mut errors) {
            cfg.n_paths = v as usize;
        }
        if let Some(v) = int_field(&table, "grid_steps", 1, &mut errors) {
            cfg.grid_steps = v as usize;
        }
        if let Some(v) = int_field(&table, "parallelism", 1, &mut errors) {
            cfg.parallelism = v as usize;
        }
        if let Some(v) = int_field(&table, "csv_limit", 0, &mut errors) {
            cfg.csv_limit = v as usize;
        }
        match table.get("jump_cutoff").map(as_number) {
            None => {}
            Some(Some(v)) => cfg.jump_cutoff = v,
            Some(None) => errors.push("'jump_cutoff' must be a number".to_string()),
        }
        match (experiment, table.get("params")) {
            (_, None) => {}
            (Some(e), Some(toml::Value::Table(t))) => parse_params(e, t, &mut cfg.params, &mut errors),
            (None, Some(toml::Value::Table(_))) => {}
            (_, Some(_)) => errors.push("'params' must be a table".to_string()),
        }
        if experiment.is_some() {
            errors.extend(cfg.problems());
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(errors))
        }
    }

    pub fn validate(&self) -> Result<()> {
        let errors = self.problems();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    /// Every constraint violation, including cross-parameter ones.
    pub fn problems(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.n_paths < 1 {
            errors.push("n_paths must be ≥ 1".to_string());
        }
        if self.grid_steps < 2 {
            errors.push("grid_steps must be ≥ 2".to_string());
        }
        if !(self.jump_cutoff > 0.0 && self.jump_cutoff.is_finite()) {
            errors.push(format!("jump_cutoff must be > 0, got {}", self.jump_cutoff));
        }
        if self.parallelism < 1 {
            errors.push("parallelism must be ≥ 1".to_string());
        }
        let specs = self.experiment.params();
        for spec in &specs {
            match self.params.get(spec.name) {
                None => errors.push(format!("params.{}: missing", spec.name)),
                Some(v) => check_value(spec, v, &mut errors),
            }
        }
        for (name, _) in &self.params.0 {
            if !specs.iter().any(|s| s.name == name) {
                errors.push(format!("params.{name}: not a parameter of {}", self.experiment));
            }
        }
        if errors.is_empty() {
            self.cross_checks(&mut errors);
        }
        errors
    }

    fn cross_checks(&self, errors: &mut Vec<String>) {
        let p = &self.params;
        let on_grid = |x: f64, steps: usize| ((x * steps as f64) - (x * steps as f64).round()).abs() < 1e-9;
        match self.experiment {
            Experiment::VerifyBrownianBridge => {
                for &s in p.list("s") {
                    if !on_grid(s, p.count("exact_steps")) {
                        errors.push(format!("params.s: {s} is not a point of the exact grid with {} steps", p.count("exact_steps")));
                    }
                }
                for &s in p.list("s") {
                    if !on_grid(s, self.grid_steps) {
                        errors.push(format!("params.s: {s} is not a point of the grid with {} steps", self.grid_steps));
                    }
                }
            }
            Experiment::VerifyGcMoments => {
                if p.list("asymptotic_q").iter().copied().fold(0.0, f64::max) < 100.0 {
                    errors.push("params.asymptotic_q: largest order must be ≥ 100".to_string());
                }
                if self.grid_steps % 2 != 0 {
                    errors.push("grid_steps must be even (the coarse grid takes every other point)".to_string());
                }
            }
            Experiment::VerifyArcsine => {
                if self.grid_steps % 2 != 0 {
                    errors.push("grid_steps must be even".to_string());
                }
                self.cutoff_checks(p.list("alpha").iter().copied().chain([p.number("joint_alpha")]), errors);
            }
            Experiment::VerifySubordinator => {
                self.cutoff_checks([p.number("alpha")].into_iter(), errors);
                if p.count("bridge_samples") > self.n_paths {
                    errors.push("params.bridge_samples must not exceed n_paths".to_string());
                }
            }
            Experiment::VerifyBesselBridge => {
                for &u in p.list("u") {
                    if !on_grid(u, self.grid_steps) {
                        errors.push(format!("params.u: {u} is not a point of the grid with {} steps", self.grid_steps));
                    }
                }
            }
            Experiment::VerifyWindowConvergence => {
                if !on_grid(p.number("s"), self.grid_steps) {
                    errors.push(format!("params.s: {} is not a point of the grid", p.number("s")));
                }
                if !p.list("deltas").contains(&p.number("rate_delta")) {
                    errors.push("params.rate_delta must be one of params.deltas".to_string());
                }
                if p.count("rn_bins") < 2 {
                    errors.push("params.rn_bins must be ≥ 2".to_string());
                }
            }
            Experiment::ProbeResolvent => {
                if p.count("points") < 8 {
                    errors.push("params.points must be ≥ 8".to_string());
                }
                if !(p.number("t_min") < p.number("t_max")) || p.number("t_max") > 0.1 {
                    errors.push("params: need t_min < t_max ≤ 0.1".to_string());
                }
            }
            Experiment::VerifyDensities => {
                self.cutoff_checks([p.number("laplace_alpha")].into_iter(), errors);
            }
        }
    }

    fn cutoff_checks(&self, alphas: impl Iterator<Item = f64>, errors: &mut Vec<String>) {
        for a in alphas {
            if let Err(e) = crate::pathsim::Subordinator::new(a, self.jump_cutoff) {
                errors.push(format!("jump_cutoff: {e}"));
            }
        }
    }

    /// The effective configuration as echoed in reports; parallelism is
    /// left out because it cannot change the results.
    pub fn echo(&self) -> Value {
        let mut m = Map::new();
        m.insert("experiment".into(), Value::from(self.experiment.name()));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("n_paths".into(), Value::from(self.n_paths));
        m.insert("grid_steps".into(), Value::from(self.grid_steps));
        m.insert("jump_cutoff".into(), Value::from(self.jump_cutoff));
        m.insert("csv_limit".into(), Value::from(self.csv_limit));
        m.insert("params".into(), self.params.to_json());
        Value::Object(m)
    }
}

fn as_number(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        _ => None,
    }
}

fn int_field(table: &Table, key: &str, min: i64, errors: &mut Vec<String>) -> Option<i64> {
    match table.get(key) {
        None => None,
        Some(toml::Value::Integer(i)) if *i >= min => Some(*i),
        Some(toml::Value::Integer(i)) => {
            errors.push(format!("'{key}' must be ≥ {min}, got {i}"));
            None
        }
        Some(_) => {
            errors.push(format!("'{key}' must be an integer"));
            None
        }
    }
}

fn parse_params(experiment: Experiment, table: &Table, params: &mut Params, errors: &mut Vec<String>) {
    let specs = experiment.params();
    for (key, raw) in table {
        let Some(spec) = specs.iter().find(|s| s.name == key) else {
            let known: Vec<&str> = specs.iter().map(|s| s.name).collect();
            errors.push(format!("params.{key}: not a parameter of {experiment} (known: {})", known.join(", ")));
            continue;
        };
        match convert(&spec.default, raw) {
            Some(v) => params.set(key, v),
            None => errors.push(format!("params.{key}: must be {}", spec.default.kind())),
        }
    }
}

fn convert(like: &ParamValue, raw: &toml::Value) -> Option<ParamValue> {
    match like {
        ParamValue::Bool(_) => raw.as_bool().map(ParamValue::Bool),
        ParamValue::Number(_) => as_number(raw).map(ParamValue::Number),
        ParamValue::List(_) => {
            let items = raw.as_array()?;
            let v: Option<Vec<f64>> = items.iter().map(as_number).collect();
            v.filter(|v| !v.is_empty()).map(ParamValue::List)
        }
        ParamValue::Pairs(_) => {
            let items = raw.as_array()?;
            let v: Option<Vec<[f64; 2]>> = items
                .iter()
                .map(|p| {
                    let a = p.as_array()?;
                    (a.len() == 2).then_some(())?;
                    Some([as_number(&a[0])?, as_number(&a[1])?])
                })
                .collect();
            v.filter(|v| !v.is_empty()).map(ParamValue::Pairs)
        }
    }
}

fn check_value(spec: &ParamSpec, v: &ParamValue, errors: &mut Vec<String>) {
    let mut bad = |x: f64, why: &str| errors.push(format!("params.{}: {x} {why}", spec.name));
    match (v, spec.constraint) {
        (ParamValue::Bool(_), _) => {}
        (ParamValue::Number(x), c) => {
            if let Some(why) = c.check(*x) {
                bad(*x, why);
            }
        }
        (ParamValue::List(xs), c) => {
            for &x in xs {
                if let Some(why) = c.check(x) {
                    bad(x, why);
                }
            }
        }
        (ParamValue::Pairs(ps), _) => {
            for &[a, x] in ps {
                if let Some(why) = Constraint::StableIndex.check(a) {
                    bad(a, why);
                }
                if let Some(why) = Constraint::Finite.check(x) {
                    bad(x, why);
                }
            }
        }
    }
}
