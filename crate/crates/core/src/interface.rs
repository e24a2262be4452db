//! Operational surface: TOML run configs, weight snapshot files, CSV export
//! and the command implementations behind the `pcircuit` binary.
//!
//! All outputs are pure functions of their inputs and seed. Nothing written
//! depends on wall-clock time or thread scheduling.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{
    index_to_config, kl_divergence, BipolarVector, Distribution, TrainingSet, WeightSet,
};
use crate::dynamics::{run_free, ClampSpec, NeuronTiming, UpdateLaw};
use crate::error::{Error, Result};
use crate::experiments::{
    run_completion, run_sweep_point, sweep, CompletionReport, DigitSet, Study, SweepMetrics,
    SweepPoint, SweepRow,
};
use crate::learning::{
    map_circuit, CircuitParams, Domain, FeedMode, FeedSchedule, TrainOptions, TrainOutcome,
    Variation, MIN_TIMESCALE_RATIO,
};
use crate::oracle::{boltzmann_exact, AnnealFactor};

/// Environment variable naming the default output root.
pub const OUT_ROOT_ENV: &str = "PCIRCUIT_OUT_ROOT";

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    out_dir: Option<PathBuf>,
    #[serde(default)]
    strict_timescales: bool,
    circuit: CircuitParams,
    #[serde(default)]
    feed: RawFeed,
    run: RawRun,
    #[serde(default)]
    variation: Variation,
    training: Option<RawTraining>,
    sweep: Option<RawSweep>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    FullAdder,
    Digits,
    Custom,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::FullAdder => "full_adder",
            ExperimentKind::Digits => "digits",
            ExperimentKind::Custom => "custom",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "full_adder" => Some(Self::FullAdder),
            "digits" => Some(Self::Digits),
            "custom" => Some(Self::Custom),
            _ => None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeed {
    #[serde(default)]
    mode: RawFeedMode,
    dwell_ns: Option<f64>,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawFeedMode {
    #[default]
    Averaged,
    Sequential,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    duration_ns: f64,
    #[serde(default = "default_snapshot_every")]
    snapshot_every_ns: f64,
    #[serde(default = "default_window")]
    kl_window_ns: f64,
    kl_stride_ns: Option<f64>,
    #[serde(default = "default_pseudocount")]
    kl_pseudocount: f64,
    #[serde(default)]
    timing: RawTiming,
    #[serde(default)]
    domain: RawDomain,
    learn_biases: Option<bool>,
    #[serde(default)]
    synapse_delay_ns: f64,
}

fn default_snapshot_every() -> f64 {
    10.0
}

fn default_window() -> f64 {
    crate::dynamics::DEFAULT_WINDOW_NS
}

fn default_pseudocount() -> f64 {
    0.5
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawTiming {
    #[default]
    Exponential,
    Fixed,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawDomain {
    #[default]
    Dimensionless,
    Circuit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTraining {
    vectors: Vec<Vec<i64>>,
    frequencies: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    tau_n_ns: Option<Vec<f64>>,
    r_sigma: Option<Vec<f64>>,
    tau_n_sigma: Option<Vec<f64>>,
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub study: Study,
    pub seeds: Vec<u64>,
    pub out_dir: Option<PathBuf>,
    pub strict_timescales: bool,
    pub sweep_grid: Vec<SweepPoint>,
    /// Hex SHA-256 of the config text.
    pub digest: String,
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: cannot read config: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses and validates `text`; `origin` prefixes error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(text, s.start));
            Error::Config(anchor(origin, line, e.message()))
        })?;
        build_config(raw, text).map_err(|e| match e {
            Error::InvalidParameter { ref name, .. } => {
                Error::Config(anchor(origin, locate_key(text, name), &e.to_string()))
            }
            Error::Config(msg) => Error::Config(anchor(origin, None, &msg)),
            other => Error::Config(anchor(origin, None, &other.to_string())),
        })
    }
}

fn anchor(origin: &str, line: Option<usize>, msg: &str) -> String {
    match line {
        Some(l) => format!("{origin}:{l}: {}", msg.trim_end()),
        None => format!("{origin}: {}", msg.trim_end()),
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn locate_key(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|line| {
            let line = line.trim_start();
            line.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

fn build_config(raw: RawConfig, text: &str) -> Result<RunConfig> {
    raw.circuit.validate()?;
    if raw.seeds.is_empty() {
        return Err(Error::param("seeds", "at least one seed is required"));
    }

    let (base, training) = match raw.experiment {
        ExperimentKind::FullAdder => {
            if raw.training.is_some() {
                return Err(Error::Config(
                    "[training] is only allowed with experiment = \"custom\"".into(),
                ));
            }
            let s = Study::full_adder();
            let ts = s.schedule.training().clone();
            (s, ts)
        }
        ExperimentKind::Digits => {
            if raw.training.is_some() {
                return Err(Error::Config(
                    "[training] is only allowed with experiment = \"custom\"".into(),
                ));
            }
            let s = Study::digits();
            let ts = s.schedule.training().clone();
            (s, ts)
        }
        ExperimentKind::Custom => {
            let t = raw.training.ok_or_else(|| {
                Error::Config("experiment = \"custom\" requires a [training] table".into())
            })?;
            let vectors = t
                .vectors
                .iter()
                .map(|v| BipolarVector::from_ints(v))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::param("vectors", e.to_string()))?;
            let ts = match t.frequencies {
                Some(f) => TrainingSet::with_frequencies(vectors, f),
                None => TrainingSet::new(vectors),
            }
            .map_err(|e| Error::param("vectors", e.to_string()))?;
            let mut s = Study::full_adder();
            s.name = "custom";
            s.options.learn_biases = true;
            (s, ts)
        }
    };

    let mode = match raw.feed.mode {
        RawFeedMode::Averaged => {
            if raw.feed.dwell_ns.is_some() {
                return Err(Error::param(
                    "dwell_ns",
                    "only valid with mode = \"sequential\"",
                ));
            }
            FeedMode::Averaged
        }
        RawFeedMode::Sequential => FeedMode::Sequential {
            dwell_ns: raw
                .feed
                .dwell_ns
                .ok_or_else(|| Error::param("mode", "sequential feeding requires dwell_ns"))?,
        },
    };
    let schedule = FeedSchedule::new(mode, training)?;

    let r = raw.run;
    let options = TrainOptions {
        duration_ns: r.duration_ns,
        snapshot_every_ns: r.snapshot_every_ns,
        kl_window_ns: r.kl_window_ns,
        kl_stride_ns: r.kl_stride_ns.unwrap_or(r.kl_window_ns),
        kl_pseudocount: r.kl_pseudocount,
        law: match r.timing {
            RawTiming::Exponential => UpdateLaw::Exponential,
            RawTiming::Fixed => UpdateLaw::Fixed,
        },
        learn_biases: r.learn_biases.unwrap_or(base.options.learn_biases),
        domain: match r.domain {
            RawDomain::Dimensionless => Domain::Dimensionless,
            RawDomain::Circuit => Domain::Circuit,
        },
        variation: raw.variation,
        synapse_delay_ns: r.synapse_delay_ns,
        ..TrainOptions::default()
    };
    options.validate()?;
    if options.kl_window_ns > options.duration_ns {
        return Err(Error::param(
            "kl_window_ns",
            "window is longer than the run",
        ));
    }
    if !(options.synapse_delay_ns.is_finite() && options.synapse_delay_ns >= 0.0) {
        return Err(Error::param("synapse_delay_ns", "must be non-negative"));
    }

    let strict = raw.strict_timescales;
    let mut warnings = Vec::new();
    let mut check_ratio = |tau_n: f64| -> Result<()> {
        let ratio = map_circuit(&CircuitParams {
            tau_n_ns: tau_n,
            ..raw.circuit
        })?
        .timescale_ratio(tau_n);
        if ratio < MIN_TIMESCALE_RATIO {
            let msg = format!(
                "tau_L / tau_N = {ratio:.3} is below {MIN_TIMESCALE_RATIO} for tau_n_ns = {tau_n}"
            );
            if strict {
                return Err(Error::param("tau_n_ns", msg));
            }
            warnings.push(msg);
        }
        Ok(())
    };
    check_ratio(raw.circuit.tau_n_ns)?;

    let sweep_grid = match &raw.sweep {
        None => vec![SweepPoint {
            tau_n_ns: raw.circuit.tau_n_ns,
            variation: raw.variation,
        }],
        Some(s) => {
            let taus = s
                .tau_n_ns
                .clone()
                .unwrap_or_else(|| vec![raw.circuit.tau_n_ns]);
            let r_sigmas = s
                .r_sigma
                .clone()
                .unwrap_or_else(|| vec![raw.variation.r_sigma]);
            let tau_sigmas = s
                .tau_n_sigma
                .clone()
                .unwrap_or_else(|| vec![raw.variation.tau_n_sigma]);
            if taus.is_empty() || r_sigmas.is_empty() || tau_sigmas.is_empty() {
                return Err(Error::param("sweep", "grid axes must not be empty"));
            }
            let mut grid = Vec::new();
            for &tau in &taus {
                if !(tau.is_finite() && tau > 0.0) {
                    return Err(Error::param(
                        "tau_n_ns",
                        format!("sweep value must be positive, got {tau}"),
                    ));
                }
                check_ratio(tau)?;
                for &r_sigma in &r_sigmas {
                    for &tau_n_sigma in &tau_sigmas {
                        let variation = Variation {
                            r_sigma,
                            tau_n_sigma,
                        };
                        variation.validate()?;
                        grid.push(SweepPoint {
                            tau_n_ns: tau,
                            variation,
                        });
                    }
                }
            }
            grid
        }
    };

    let study = Study {
        name: base.name,
        schedule,
        params: raw.circuit,
        options,
    };

    Ok(RunConfig {
        experiment: raw.experiment,
        study,
        seeds: raw.seeds,
        out_dir: raw.out_dir,
        strict_timescales: strict,
        sweep_grid,
        digest: hex::encode(Sha256::digest(text.as_bytes())),
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Weight snapshot files
// ---------------------------------------------------------------------------

/// On-disk form of a learned weight set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSnapshotFile {
    pub schema_version: u32,
    pub n: usize,
    pub experiment: String,
    pub config_digest: String,
    /// Simulation time of the snapshot, ns.
    pub time_ns: f64,
    /// Row-major upper triangle, pairs (0,1), (0,2), ..., dimensionless.
    pub upper: Vec<f64>,
    /// Dimensionless.
    pub biases: Vec<f64>,
}

impl WeightSnapshotFile {
    pub fn new(w: &WeightSet, experiment: &str, config_digest: &str, time_ns: f64) -> Self {
        Self {
            schema_version: SNAPSHOT_SCHEMA_VERSION,
            n: w.n(),
            experiment: experiment.to_string(),
            config_digest: config_digest.to_string(),
            time_ns,
            upper: w.upper_triangle(),
            biases: w.biases().to_vec(),
        }
    }

    pub fn weights(&self) -> Result<WeightSet> {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        if self.n == 0 || self.upper.len() != pairs {
            return Err(Error::CorruptSnapshot(format!(
                "upper triangle holds {} values, expected {pairs} for n = {}",
                self.upper.len(),
                self.n
            )));
        }
        if self.biases.len() != self.n {
            return Err(Error::CorruptSnapshot(format!(
                "{} biases for n = {}",
                self.biases.len(),
                self.n
            )));
        }
        if self
            .upper
            .iter()
            .chain(&self.biases)
            .any(|v| !v.is_finite())
        {
            return Err(Error::CorruptSnapshot("non-finite weight".into()));
        }
        WeightSet::from_upper(self.n, &self.upper, &self.biases)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("snapshot fields serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::CorruptSnapshot(e.message().to_string()))?;
        let version = table
            .get("schema_version")
            .and_then(toml::Value::as_integer)
            .ok_or_else(|| Error::CorruptSnapshot("missing schema_version".into()))?;
        if version != i64::from(SNAPSHOT_SCHEMA_VERSION) {
            return Err(Error::SchemaVersion {
                found: u32::try_from(version).unwrap_or(u32::MAX),
                supported: SNAPSHOT_SCHEMA_VERSION,
            });
        }
        let snap: Self =
            toml::from_str(text).map_err(|e| Error::CorruptSnapshot(e.message().to_string()))?;
        snap.weights()?;
        Ok(snap)
    }
}

pub fn save_weights(path: &Path, snapshot: &WeightSnapshotFile) -> Result<()> {
    fs::write(path, snapshot.to_toml())?;
    Ok(())
}

pub fn load_weights(path: &Path) -> Result<WeightSnapshotFile> {
    WeightSnapshotFile::from_toml(&fs::read_to_string(path)?)
}

/// Loads a snapshot and checks its unit count.
pub fn load_weights_for(path: &Path, n: usize) -> Result<WeightSet> {
    let w = load_weights(path)?.weights()?;
    if w.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: w.n(),
        });
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

pub fn kl_csv(outcome: &TrainOutcome) -> String {
    let mut s = String::from("t_start_ns,t_end_ns,kl_nats\n");
    for p in &outcome.trajectory.kl_series {
        let _ = writeln!(s, "{},{},{}", p.t_start_ns, p.t_end_ns, p.kl);
    }
    s
}

pub fn weights_csv(outcome: &TrainOutcome, with_biases: bool) -> String {
    let Some((_, first)) = outcome.trajectory.snapshots.first() else {
        return String::new();
    };
    let n = first.n();
    let mut s = String::from("time_ns");
    for (i, j) in crate::domain::pair_indices(n) {
        let _ = write!(s, ",w_{i}_{j}_dimensionless");
    }
    if with_biases {
        for i in 0..n {
            let _ = write!(s, ",b_{i}_dimensionless");
        }
    }
    s.push('\n');
    for (t, w) in &outcome.trajectory.snapshots {
        let _ = write!(s, "{t}");
        for v in w.upper_triangle() {
            let _ = write!(s, ",{v}");
        }
        if with_biases {
            for v in w.biases() {
                let _ = write!(s, ",{v}");
            }
        }
        s.push('\n');
    }
    s
}

/// Non-zero rows of a distribution, most probable first.
pub fn histogram_csv(d: &Distribution, column: &str) -> String {
    let mut s = format!("index,config,{column}\n");
    for k in d.ranked() {
        let p = d.prob(k);
        if p == 0.0 {
            break;
        }
        let _ = writeln!(s, "{k},{},{p}", index_to_config(k, d.n()));
    }
    s
}

/// Every configuration in index order.
pub fn distribution_csv(d: &Distribution) -> String {
    let mut s = String::from("index,config,probability\n");
    for (k, p) in d.probs().iter().enumerate() {
        let _ = writeln!(s, "{k},{},{p}", index_to_config(k, d.n()));
    }
    s
}

pub fn completion_csv(report: &CompletionReport) -> String {
    let mut s =
        String::from("digit,matched,correct_occupancy_fraction,free_pixels,majority_config\n");
    for r in &report.rows {
        let free: String = r
            .free_pixels
            .iter()
            .map(|&v| if v > 0 { '1' } else { '0' })
            .collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.digit, r.matched, r.correct_occupancy, free, r.majority
        );
    }
    s
}

pub fn sweep_csv(rows: &[SweepRow<SweepPoint, SweepMetrics>]) -> String {
    let mut s = String::from(
        "tau_n_ns,r_sigma_dimensionless,tau_n_sigma_dimensionless,seed,final_kl_nats,target_occupancy_fraction,status\n",
    );
    for row in rows {
        let p = row.point;
        match &row.result {
            Ok(m) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},ok",
                    p.tau_n_ns,
                    p.variation.r_sigma,
                    p.variation.tau_n_sigma,
                    row.seed,
                    m.final_kl,
                    m.target_mass
                );
            }
            Err(e) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},,,error: {}",
                    p.tau_n_ns,
                    p.variation.r_sigma,
                    p.variation.tau_n_sigma,
                    row.seed,
                    e.replace([',', '\n'], ";")
                );
            }
        }
    }
    s
}

fn summary_csv(outcome: &TrainOutcome, final_kl: f64) -> String {
    let m = &outcome.mapping;
    let mut s = String::from("quantity,value,unit\n");
    let _ = writeln!(s, "final_kl,{final_kl},nats");
    let _ = writeln!(s, "duration,{},ns", outcome.trace.duration_ns());
    let _ = writeln!(s, "flip_events,{},count", outcome.trace.events().len());
    let _ = writeln!(s, "lambda,{},dimensionless", m.lambda);
    let _ = writeln!(s, "tau_l,{},ns", m.tau_l_ns);
    let _ = writeln!(s, "rc,{},ns", m.rc_ns);
    let _ = writeln!(s, "weight_scale,{},1/V", m.weight_scale);
    let _ = writeln!(
        s,
        "max_abs_weight,{},dimensionless",
        outcome.final_weights().max_abs()
    );
    s
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Output directory: explicit flag, then config, then `$PCIRCUIT_OUT_ROOT/<name>`,
/// then `runs/<name>`.
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>, name: &str) -> PathBuf {
    if let Some(p) = flag.or(config) {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_ROOT_ENV) {
        Some(root) => PathBuf::from(root).join(name),
        None => PathBuf::from("runs").join(name),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub seed: u64,
    pub final_kl: f64,
    pub dir: PathBuf,
}

/// Trains every configured seed (or just `seed`) and writes per-seed output
/// directories `seed_<k>/` holding `weights.toml`, `kl.csv`, `weights.csv`,
/// `final_histogram.csv` and `summary.csv`.
pub fn cmd_train(config: &RunConfig, seed: Option<u64>, out: &Path) -> Result<Vec<TrainSummary>> {
    let seeds = seed.map_or_else(|| config.seeds.clone(), |s| vec![s]);
    let mut summaries = Vec::new();
    for seed in seeds {
        let run = config.study.run(seed)?;
        let dir = out.join(format!("seed_{seed}"));
        fs::create_dir_all(&dir)?;
        let w = run.outcome.final_weights();
        let snapshot = WeightSnapshotFile::new(
            w,
            config.experiment.name(),
            &config.digest,
            run.outcome.trajectory.final_time(),
        );
        save_weights(&dir.join("weights.toml"), &snapshot)?;
        fs::write(dir.join("kl.csv"), kl_csv(&run.outcome))?;
        fs::write(
            dir.join("weights.csv"),
            weights_csv(&run.outcome, config.study.options.learn_biases),
        )?;
        let hist = run.outcome.trace.final_window_histogram()?;
        fs::write(
            dir.join("final_histogram.csv"),
            histogram_csv(&hist, "occupancy_fraction"),
        )?;
        fs::write(
            dir.join("summary.csv"),
            summary_csv(&run.outcome, run.final_kl),
        )?;
        summaries.push(TrainSummary {
            seed,
            final_kl: run.final_kl,
            dir,
        });
    }
    Ok(summaries)
}

#[derive(Debug, Clone)]
pub struct InferRequest {
    pub weights: PathBuf,
    pub clamp: ClampSpec,
    pub i0: f64,
    pub duration_ns: f64,
    pub seed: u64,
    pub tau_n_ns: f64,
}

#[derive(Debug, Clone)]
pub struct InferSummary {
    pub histogram: Distribution,
    pub completion: Option<CompletionReport>,
}

/// Runs the frozen network and writes `histogram.csv`; digit snapshots also
/// get `completion.csv`.
pub fn cmd_infer(req: &InferRequest, out: &Path) -> Result<InferSummary> {
    let snapshot = load_weights(&req.weights)?;
    let w = snapshot.weights()?;
    req.clamp.validate_for(w.n())?;
    let i0 = AnnealFactor::new(req.i0)?;
    let timing = NeuronTiming::exponential(req.tau_n_ns)?;
    let trace = run_free(&w, &req.clamp, i0, req.duration_ns, timing, req.seed)?;
    let histogram = trace.histogram(0.0, req.duration_ns)?;
    fs::create_dir_all(out)?;
    fs::write(
        out.join("histogram.csv"),
        histogram_csv(&histogram, "occupancy_fraction"),
    )?;

    let completion =
        if ExperimentKind::from_name(&snapshot.experiment) == Some(ExperimentKind::Digits) {
            let digits = DigitSet::canonical();
            let report = run_completion(
                &load_weights_for(&req.weights, digits.images[0].len())?,
                &digits,
                i0,
                req.duration_ns,
                req.seed,
            )?;
            fs::write(out.join("completion.csv"), completion_csv(&report))?;
            Some(report)
        } else {
            None
        };
    Ok(InferSummary {
        histogram,
        completion,
    })
}

/// Named target distributions for the oracle command.
pub fn named_ideal(name: &str) -> Result<Distribution> {
    match ExperimentKind::from_name(name) {
        Some(ExperimentKind::FullAdder) => {
            Ok(crate::experiments::full_adder_set().ideal_distribution())
        }
        Some(ExperimentKind::Digits) => Ok(DigitSet::canonical().ideal_distribution()),
        _ if name.starts_with("uniform") => {
            let n = name
                .strip_prefix("uniform")
                .and_then(|s| s.strip_prefix(':'))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::param("ideal", "use uniform:<n>"))?;
            Ok(Distribution::uniform(n))
        }
        _ => Err(Error::param(
            "ideal",
            format!("unknown ideal distribution `{name}`"),
        )),
    }
}

#[derive(Debug, Clone)]
pub struct OracleSummary {
    pub distribution: Distribution,
    pub entropy: f64,
    pub kl: Option<f64>,
}

/// Writes the exact Boltzmann distribution to `exact.csv` and reports KL
/// against `ideal` (defaulting to the snapshot's experiment when it has one).
pub fn cmd_oracle(
    weights: &Path,
    i0: f64,
    ideal: Option<&str>,
    out: &Path,
) -> Result<OracleSummary> {
    let snapshot = load_weights(weights)?;
    let w = snapshot.weights()?;
    let distribution = boltzmann_exact(&w, AnnealFactor::new(i0)?)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("exact.csv"), distribution_csv(&distribution))?;
    let ideal_name = ideal.map(str::to_string).or_else(|| {
        match ExperimentKind::from_name(&snapshot.experiment) {
            Some(ExperimentKind::Custom) | None => None,
            Some(k) => Some(k.name().to_string()),
        }
    });
    let kl = match ideal_name {
        Some(name) => {
            let target = named_ideal(&name)?;
            Some(kl_divergence(&target, &distribution, 0.0)?)
        }
        None => None,
    };
    Ok(OracleSummary {
        entropy: distribution.entropy(),
        distribution,
        kl,
    })
}

/// Runs the config's sweep grid over its seeds and writes `sweep.csv`.
pub fn cmd_sweep(
    config: &RunConfig,
    seed: Option<u64>,
    out: &Path,
) -> Result<Vec<SweepRow<SweepPoint, SweepMetrics>>> {
    let seeds = seed.map_or_else(|| config.seeds.clone(), |s| vec![s]);
    let rows = sweep(&config.sweep_grid, &seeds, |p, s| {
        run_sweep_point(&config.study, p, s)
    })?;
    fs::create_dir_all(out)?;
    fs::write(out.join("sweep.csv"), sweep_csv(&rows))?;
    Ok(rows)
}
