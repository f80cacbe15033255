//! Config parsing and the `sample`, `validate` and `bench` commands.
//!
//! A config is one flat JSON object. Flags override file values, unknown
//! keys are rejected, and `length`, `range`, `lambda` (and the other real
//! parameters) are kept as decimal strings so a config file parses to the
//! same doubles everywhere. Every output embeds the resolved config and its
//! SHA-256.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bayes_filter::{recommended_radius, FilterMode, FilterParams};
use crate::geometry::BoxLattice;
use crate::harness::{
    baseline_batch, gof_test, invariance_checks, run_batch_each, scaling_benchmark, two_sample_test,
    TwoSampleStatistic, BASELINE_ACCEPTANCE_FLOOR,
};
use crate::model::{count_pmf_oracle, Activity, GibbsModel, OracleRegion, PairPotential, QuadratureSpec};
use crate::sampler::SamplerConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("config field `{field}`: {msg}")]
    Field { field: &'static str, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn field(field: &'static str, msg: impl Into<String>) -> CliError {
    CliError::Field { field, msg: msg.into() }
}

/// A real number kept as the decimal text it was written as.
#[derive(Debug, Clone, PartialEq)]
pub struct Decimal(pub String);

impl Decimal {
    pub fn value(&self) -> Result<f64, String> {
        let v: f64 = self.0.trim().parse().map_err(|_| format!("`{}` is not a decimal number", self.0))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{}` is not finite", self.0))
        }
    }
}

impl From<&str> for Decimal {
    fn from(s: &str) -> Self {
        Decimal(s.to_string())
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => Ok(Decimal(s)),
            Value::Number(n) => Ok(Decimal(n.to_string())),
            other => Err(serde::de::Error::custom(format!("expected a decimal string, got {other}"))),
        }
    }
}

/// Update radius: a number of boxes, or `auto` in ssm mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Radius {
    Fixed(usize),
    Auto,
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Radius::Fixed(l) => s.serialize_u64(*l as u64),
            Radius::Auto => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "auto" => Ok(Radius::Auto),
            Value::String(s) => {
                s.parse().map(Radius::Fixed).map_err(|_| serde::de::Error::custom(format!("bad radius `{s}`")))
            }
            Value::Number(n) => n
                .as_u64()
                .map(|l| Radius::Fixed(l as usize))
                .ok_or_else(|| serde::de::Error::custom(format!("bad radius {n}"))),
            other => Err(serde::de::Error::custom(format!("bad radius {other}"))),
        }
    }
}

fn default_potential() -> String {
    "hard-sphere".into()
}
fn default_samples() -> usize {
    1
}
fn default_budget() -> usize {
    crate::bayes_filter::DEFAULT_ENUMERATION_BUDGET
}
fn default_alpha() -> Decimal {
    "0.001".into()
}
fn default_runs() -> usize {
    20
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub length: Decimal,
    pub range: Decimal,
    pub lambda: Decimal,
    /// `hard-sphere` or `strauss:<beta>`.
    #[serde(default = "default_potential")]
    pub potential: String,
    /// `hs:<epsilon>` or `ssm:<a>,<b>`.
    pub mode: String,
    pub radius: Radius,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seed: u64,
    /// Enumeration budget of the hard-sphere correction.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub unsafe_delta: Option<Decimal>,
    #[serde(default)]
    pub iteration_cap: Option<u64>,
    /// Record wall time per sample; off keeps outputs byte-identical.
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "default_alpha")]
    pub alpha: Decimal,
    /// Domain lengths for `bench`.
    #[serde(default)]
    pub lengths: Vec<Decimal>,
    /// Runs per length for `bench`.
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Largest allowed time-per-volume ratio for `bench`.
    #[serde(default)]
    pub bound: Option<Decimal>,
    #[serde(default)]
    pub out: Option<String>,
    /// Test hook: correction that peeks at correct boxes.
    #[serde(default)]
    pub inject_bias: bool,
    /// Test hook: bench a quadratic-time stand-in.
    #[serde(default)]
    pub quadratic_stub: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    HardSphere,
    Strauss(f64),
}

pub fn parse_potential(s: &str) -> Result<PotentialSpec, CliError> {
    match s.split_once(':') {
        None if s == "hard-sphere" || s == "hs" => Ok(PotentialSpec::HardSphere),
        Some(("strauss", beta)) => {
            let b = Decimal(beta.into()).value().map_err(|e| field("potential", e))?;
            if b < 0.0 {
                return Err(field("potential", "strauss beta must be non-negative"));
            }
            Ok(PotentialSpec::Strauss(b))
        }
        _ => Err(field("potential", format!("`{s}` is not `hard-sphere` or `strauss:<beta>`"))),
    }
}

pub fn parse_mode(s: &str) -> Result<FilterMode, CliError> {
    let num = |t: &str| Decimal(t.into()).value().map_err(|e| field("mode", e));
    match s.split_once(':') {
        Some(("hs", eps)) => {
            let epsilon = num(eps)?;
            if !(epsilon > 0.0) {
                return Err(field("mode", "epsilon must be positive"));
            }
            Ok(FilterMode::HardSphere { epsilon })
        }
        Some(("ssm", ab)) => {
            let (a, b) = ab.split_once(',').ok_or_else(|| field("mode", "ssm mode needs `ssm:<a>,<b>`"))?;
            let (a, b) = (num(a)?, num(b)?);
            if !(a > 0.0 && b > 0.0) {
                return Err(field("mode", "mixing constants must be positive"));
            }
            Ok(FilterMode::Ssm { a, b })
        }
        _ => Err(field("mode", format!("`{s}` is not `hs:<epsilon>` or `ssm:<a>,<b>`"))),
    }
}

/// Volume of the radius-`r` ball in `d` dimensions.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    // v_d = 2 pi / d * v_{d-2}, v_0 = 1, v_1 = 2
    let mut v = if d.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v * r.powi(d as i32)
}

impl RunConfig {
    fn num(&self, name: &'static str, d: &Decimal) -> Result<f64, CliError> {
        d.value().map_err(|e| field(name, e))
    }

    pub fn alpha(&self) -> Result<f64, CliError> {
        let a = self.num("alpha", &self.alpha)?;
        if a == 0.01 || a == 0.001 {
            Ok(a)
        } else {
            Err(field("alpha", "must be 0.01 or 0.001"))
        }
    }

    pub fn model(&self) -> Result<GibbsModel, CliError> {
        let length = self.num("length", &self.length)?;
        let range = self.num("range", &self.range)?;
        let lambda = self.num("lambda", &self.lambda)?;
        if self.dim == 0 {
            return Err(field("dim", "must be at least 1"));
        }
        if !(length > 0.0) {
            return Err(field("length", "must be positive"));
        }
        if !(range > 0.0) {
            return Err(field("range", "must be positive"));
        }
        if !(lambda >= 0.0) {
            return Err(field("lambda", "must be non-negative"));
        }
        let lattice = BoxLattice::new(self.dim, length, range).map_err(|e| CliError::Config(e.to_string()))?;
        let phi = match parse_potential(&self.potential)? {
            PotentialSpec::HardSphere => PairPotential::hard_sphere(range),
            PotentialSpec::Strauss(beta) => PairPotential::strauss(range, beta),
        };
        GibbsModel::new(lattice, phi, lambda).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn sampler_config(&self) -> Result<SamplerConfig, CliError> {
        let model = self.model()?;
        let mode = parse_mode(&self.mode)?;
        let radius = match (&self.radius, mode) {
            (Radius::Fixed(l), _) => *l,
            (Radius::Auto, FilterMode::Ssm { a, b }) => {
                recommended_radius(a, b, model.range(), model.lambda, model.dim())
            }
            (Radius::Auto, FilterMode::HardSphere { .. }) => {
                return Err(field("radius", "`auto` needs ssm mode"));
            }
        };
        if radius < 2 {
            return Err(field("radius", "must be at least 2"));
        }
        if matches!(mode, FilterMode::HardSphere { .. }) && !model.potential.is_hard_sphere() {
            return Err(field("mode", "hs mode needs the hard-sphere potential"));
        }
        let unsafe_delta = match &self.unsafe_delta {
            Some(d) => {
                let h = self.num("unsafe_delta", d)?;
                if !(h > 0.0) {
                    return Err(field("unsafe_delta", "must be positive"));
                }
                Some(h)
            }
            None => None,
        };
        let filter =
            FilterParams { mode, radius, enumeration_budget: self.budget, unsafe_delta, bias_hook: self.inject_bias };
        Ok(SamplerConfig { model, filter, iteration_cap: self.iteration_cap, record_step_times: false })
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }

    pub fn efficiency_warning(&self) -> Option<String> {
        let model = self.model().ok()?;
        let threshold = std::f64::consts::E / ball_volume(model.dim(), model.range());
        (model.potential.is_hard_sphere() && model.lambda >= threshold).then(|| {
            format!(
                "warning: lambda = {} is at or above e / v_d(r) = {threshold:.6}; the sampler is exact but may be slow",
                model.lambda
            )
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "gibbs-perfect", about = "Perfect samples of hard-sphere and repulsive Gibbs point processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples and write them as JSON Lines.
    Sample(ConfigArgs),
    /// Check the sampler against the oracle, a rejection baseline and invariants.
    Validate(ConfigArgs),
    /// Time runs over several domain lengths.
    Bench(ConfigArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub length: Option<String>,
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    /// `hard-sphere` or `strauss:<beta>`.
    #[arg(long)]
    pub potential: Option<String>,
    /// `hs:<epsilon>`, `hs` with --epsilon, or `ssm:<a>,<b>`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Update radius in boxes, or `auto` in ssm mode.
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<String>,
    /// Enumeration budget of the hard-sphere correction.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Grid pitch override; outputs are marked non-exact.
    #[arg(long)]
    pub unsafe_delta: Option<String>,
    #[arg(long)]
    pub iteration_cap: Option<u64>,
    /// Record per-sample wall time (outputs then differ between reruns).
    #[arg(long)]
    pub timing: bool,
    /// Significance level, 0.01 or 0.001.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Comma-separated domain lengths for bench.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<String>>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub bound: Option<String>,
    #[arg(long, hide = true)]
    pub inject_bias: bool,
    #[arg(long, hide = true)]
    pub quadratic_stub: bool,
}

/// Merges the config file and flags into a resolved [`RunConfig`].
pub fn parse_config(args: &ConfigArgs) -> Result<RunConfig, CliError> {
    let mut map: Map<String, Value> = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            match serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))? {
                Value::Object(m) => m,
                _ => return Err(CliError::Config("config file must hold one JSON object".into())),
            }
        }
        None => Map::new(),
    };
    let mut set = |k: &str, v: Value| {
        map.insert(k.to_string(), v);
    };
    if let Some(x) = args.dim {
        set("dim", json!(x));
    }
    for (k, v) in [
        ("length", &args.length),
        ("range", &args.range),
        ("lambda", &args.lambda),
        ("potential", &args.potential),
        ("mode", &args.mode),
        ("radius", &args.radius),
        ("epsilon", &args.epsilon),
        ("out", &args.out),
        ("unsafe_delta", &args.unsafe_delta),
        ("alpha", &args.alpha),
        ("bound", &args.bound),
    ] {
        if let Some(v) = v {
            set(k, json!(v));
        }
    }
    if let Some(x) = args.samples {
        set("samples", json!(x));
    }
    if let Some(x) = args.seed {
        set("seed", json!(x));
    }
    if let Some(x) = args.budget {
        set("budget", json!(x));
    }
    if let Some(x) = args.iteration_cap {
        set("iteration_cap", json!(x));
    }
    if let Some(x) = &args.lengths {
        set("lengths", json!(x));
    }
    if let Some(x) = args.runs {
        set("runs", json!(x));
    }
    if args.timing {
        set("timing", json!(true));
    }
    if args.inject_bias {
        set("inject_bias", json!(true));
    }
    if args.quadratic_stub {
        set("quadratic_stub", json!(true));
    }
    // `epsilon` folds into the mode string
    if let Some(eps) = map.remove("epsilon") {
        let eps = match eps {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            other => return Err(field("epsilon", format!("bad value {other}"))),
        };
        match map.get("mode").and_then(Value::as_str) {
            Some(m) if m == "hs" || m.starts_with("hs:") => {
                map.insert("mode".into(), json!(format!("hs:{eps}")));
            }
            None => {
                map.insert("mode".into(), json!(format!("hs:{eps}")));
            }
            Some(_) => return Err(field("epsilon", "only applies to hs mode")),
        }
    }
    let config: RunConfig = serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))?;
    config.sampler_config()?;
    config.alpha()?;
    Ok(config)
}

fn open_out(path: &Option<String>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) if p != "-" => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct SampleRecord<'a> {
    seed: u64,
    points: Vec<Vec<f64>>,
    iterations: u64,
    accepts: u64,
    rejects: u64,
    coin_draws: u64,
    wall_ms: Option<f64>,
    exact: bool,
    config_hash: &'a str,
    config: &'a RunConfig,
}

/// Writes one JSON Lines record per sample. Exit code 0 on success, 2 when
/// a run aborts (records so far are kept and an abort record closes the
/// file).
pub fn cmd_sample(config: &RunConfig) -> Result<i32, CliError> {
    let sc = config.sampler_config()?;
    let hash = config.hash();
    let results = run_batch_each(&sc, config.samples, config.seed);
    let mut out = open_out(&config.out)?;
    let mut code = 0;
    for (i, res) in results.into_iter().enumerate() {
        let seed = config.seed.wrapping_add(i as u64);
        match res {
            Ok((x, d)) => {
                let rec = SampleRecord {
                    seed,
                    points: x.to_vecs(),
                    iterations: d.iterations,
                    accepts: d.accepts,
                    rejects: d.rejects,
                    coin_draws: d.coin_draws,
                    wall_ms: config.timing.then_some(d.wall_seconds * 1e3),
                    exact: sc.filter.is_exact(),
                    config_hash: &hash,
                    config,
                };
                serde_json::to_writer(&mut out, &rec).map_err(io::Error::from)?;
                out.write_all(b"\n")?;
            }
            Err(e) => {
                let rec = json!({"seed": seed, "aborted": true, "error": e.to_string(), "config_hash": hash});
                serde_json::to_writer(&mut out, &rec).map_err(io::Error::from)?;
                out.write_all(b"\n")?;
                eprintln!("sample with seed {seed} aborted: {e}");
                code = 2;
                break;
            }
        }
    }
    out.flush()?;
    Ok(code)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    skipped: Option<String>,
    report: Value,
}

fn check(name: &'static str, pass: bool, report: impl Serialize) -> Check {
    Check { name, pass, skipped: None, report: serde_json::to_value(report).expect("report serializes") }
}

fn skipped(name: &'static str, why: String) -> Check {
    Check { name, pass: true, skipped: Some(why), report: Value::Null }
}

/// Runs the oracle fit, the baseline comparison and the invariant checks;
/// exit code 0 iff every check that ran passed.
pub fn cmd_validate(config: &RunConfig) -> Result<i32, CliError> {
    let sc = config.sampler_config()?;
    let alpha = config.alpha()?;
    let model = &sc.model;
    let n = config.samples;
    let mut checks = Vec::new();

    let outs = match run_batch_each(&sc, n, config.seed).into_iter().collect::<Result<Vec<_>, _>>() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("failed: sampler ({e})");
            return Ok(1);
        }
    };
    let samples: Vec<_> = outs.into_iter().map(|(x, _)| x).collect();

    if model.dim() == 1 {
        let region = OracleRegion::from_boxes(&model.lattice, &model.lattice.all_boxes());
        match oracle_pmf(model, &region) {
            Ok(pmf) => checks.push(match gof_test(&samples, &pmf, alpha) {
                Ok(r) => check("oracle_gof", r.pass, json!({"pmf": pmf, "test": r})),
                Err(e) => check("oracle_gof", false, e.to_string()),
            }),
            Err(e) => checks.push(skipped("oracle_gof", e.to_string())),
        }
    } else {
        checks.push(skipped("oracle_gof", "oracle runs in one dimension only".into()));
    }

    let floor = (-model.lambda * model.lattice.volume()).exp();
    if floor >= BASELINE_ACCEPTANCE_FLOOR {
        // disjoint seeds so the two batches share no random stream
        let base =
            baseline_batch(model, n, config.seed.wrapping_add(1 << 40)).map_err(|e| CliError::Config(e.to_string()))?;
        for (name, stat) in [
            ("baseline_count", TwoSampleStatistic::CountPmf),
            ("baseline_min_distance", TwoSampleStatistic::MinPairDistance),
        ] {
            checks.push(match two_sample_test(&samples, &base, stat, alpha) {
                Ok(r) => check(name, r.pass, r),
                Err(e) => check(name, false, e.to_string()),
            });
        }
    } else {
        checks.push(skipped("baseline", format!("rejection acceptance {floor:e} below the floor")));
    }

    match invariance_checks(&sc, n.min(1000), config.seed.wrapping_add(1 << 41)) {
        Ok(r) => checks.push(check("invariants", r.pass, r)),
        Err(e) => checks.push(check("invariants", false, e.to_string())),
    }

    let pass = checks.iter().all(|c| c.pass);
    let report = json!({"pass": pass, "checks": checks, "config_hash": config.hash(), "config": config});
    let mut out = open_out(&config.out)?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    for c in checks.iter().filter(|c| !c.pass) {
        eprintln!("failed: {}", c.name);
    }
    Ok(if pass { 0 } else { 1 })
}

/// Scaling benchmark; exit code 0 iff the time-per-volume ratio is within
/// the bound.
pub fn cmd_bench(config: &RunConfig) -> Result<i32, CliError> {
    let sc = config.sampler_config()?;
    let lengths: Vec<f64> = if config.lengths.is_empty() {
        vec![sc.model.lattice.length()]
    } else {
        config.lengths.iter().map(|d| d.value().map_err(|e| field("lengths", e))).collect::<Result<_, _>>()?
    };
    let bound = match &config.bound {
        Some(b) => b.value().map_err(|e| field("bound", e))?,
        None => match sc.filter.mode {
            FilterMode::HardSphere { .. } => 2.0,
            FilterMode::Ssm { .. } => 3.0,
        },
    };
    let report = scaling_benchmark(&sc, &lengths, config.runs, config.seed, bound, config.quadratic_stub)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let doc = json!({"pass": report.pass, "report": report, "config_hash": config.hash(), "config": config});
    let mut out = open_out(&config.out)?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    if !report.pass {
        eprintln!("failed: time-per-volume ratio {:.3} above {bound}", report.ratio);
    }
    Ok(if report.pass { 0 } else { 1 })
}

/// Count pmf from the oracle at the tightest tolerance it reaches; soft
/// potentials need more panels than the default allows.
fn oracle_pmf(model: &GibbsModel, region: &OracleRegion) -> Result<Vec<f64>, crate::model::OracleError> {
    let mut last = None;
    for tolerance in [1e-3, 5e-3, 1e-2] {
        let spec = QuadratureSpec { tolerance, ..Default::default() };
        match count_pmf_oracle(&model.potential, &Activity::new(model.lambda, 1), region, &spec) {
            Ok(p) => return Ok(p),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one tolerance tried"))
}

/// Entry point of the binary; returns the process exit code.
pub fn run_cli(cli: Cli) -> i32 {
    let (args, cmd): (&ConfigArgs, fn(&RunConfig) -> Result<i32, CliError>) = match &cli.command {
        Command::Sample(a) => (a, cmd_sample),
        Command::Validate(a) => (a, cmd_validate),
        Command::Bench(a) => (a, cmd_bench),
    };
    let config = match parse_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(w) = config.efficiency_warning() {
        eprintln!("{w}");
    }
    match cmd(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
