//! Continuous-time weight learning on RC cells.
//!
//! Each unordered pair (i, j) owns one capacitor whose voltage relaxes through
//! R towards `V_v,ij - V_m,ij`: the fed data correlation minus the XNOR of
//! the two live neuron outputs, both scaled by V_DD/2. Biases get one more
//! cell per neuron, correlated against a constant +1 unit. Between two
//! consecutive events (neuron update, feed boundary, snapshot) every drive is
//! constant, so each cell is advanced with the exact exponential solution.

use log::warn;
use rand::Rng;
use rand_distr::{Distribution as _, LogNormal};

use crate::domain::{
    average_correlations, kl_divergence, pair_indices, pseudocount_smoothing, Correlations,
    Distribution, TrainingSet, WeightSet,
};
use crate::dynamics::{ClampSpec, Network, SimTrace, UpdateLaw, DEFAULT_WINDOW_NS};
use crate::error::{Error, Result};
use crate::rng;

/// Smallest tau_L / tau_N ratio accepted without a warning.
pub const MIN_TIMESCALE_RATIO: f64 = 100.0;

/// Circuit element values of the learning cell and neuron.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    pub r_ohm: f64,
    pub c_farad: f64,
    /// Feedback resistance of the summing amplifiers. Carried for
    /// completeness; it has no effect on the behavioral model.
    pub r_f_ohm: f64,
    pub a_v: f64,
    pub v0_volt: f64,
    pub v_dd_volt: f64,
    pub tau_n_ns: f64,
}

impl Default for CircuitParams {
    /// C = 1 nF, R = 5 kOhm, R_F = 1 MOhm, A_v = 10, V_0 = 50 mV,
    /// V_DD = 0.8 V, tau_N = 0.1 ns; gives lambda = 0.0125, tau_L = 62.5 ns.
    fn default() -> Self {
        Self {
            r_ohm: 5e3,
            c_farad: 1e-9,
            r_f_ohm: 1e6,
            a_v: 10.0,
            v0_volt: 0.05,
            v_dd_volt: 0.8,
            tau_n_ns: 0.1,
        }
    }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("r_ohm", self.r_ohm),
            ("c_farad", self.c_farad),
            ("r_f_ohm", self.r_f_ohm),
            ("a_v", self.a_v),
            ("v0_volt", self.v0_volt),
            ("v_dd_volt", self.v_dd_volt),
            ("tau_n_ns", self.tau_n_ns),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::param(
                    name,
                    format!("must be strictly positive, got {value}"),
                ));
            }
        }
        let lambda = self.v0_volt / (self.a_v * self.v_dd_volt / 2.0);
        if lambda >= 1.0 {
            return Err(Error::param(
                "v0_volt",
                format!("regularization V_0/(A_v V_DD/2) = {lambda} must be below 1"),
            ));
        }
        Ok(())
    }
}

/// Dimensionless learning parameters implied by a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitMapping {
    /// Regularization V_0 / (A_v V_DD / 2).
    pub lambda: f64,
    /// Learning time constant lambda R C, ns.
    pub tau_l_ns: f64,
    /// W = weight_scale * V, 1/V.
    pub weight_scale: f64,
    /// R C, ns.
    pub rc_ns: f64,
    /// Voltage of a unit correlation, V_DD / 2.
    pub unit_volts: f64,
}

impl CircuitMapping {
    pub fn timescale_ratio(&self, tau_n_ns: f64) -> f64 {
        self.tau_l_ns / tau_n_ns
    }
}

pub fn map_circuit(p: &CircuitParams) -> Result<CircuitMapping> {
    p.validate()?;
    let lambda = p.v0_volt / (p.a_v * p.v_dd_volt / 2.0);
    let rc_ns = p.r_ohm * p.c_farad * 1e9;
    Ok(CircuitMapping {
        lambda,
        tau_l_ns: lambda * rc_ns,
        weight_scale: p.a_v / p.v0_volt,
        rc_ns,
        unit_volts: p.v_dd_volt / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeedMode {
    /// The mean correlation over the set, held constant.
    Averaged,
    /// One vector at a time, cycling in order, each shown for `dwell_ns`.
    Sequential { dwell_ns: f64 },
}

/// How training data drives the V_v inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedSchedule {
    mode: FeedMode,
    training: TrainingSet,
    averages: Correlations,
}

impl FeedSchedule {
    pub fn new(mode: FeedMode, training: TrainingSet) -> Result<Self> {
        if let FeedMode::Sequential { dwell_ns } = mode {
            if !(dwell_ns.is_finite() && dwell_ns > 0.0) {
                return Err(Error::param(
                    "dwell_ns",
                    format!("must be positive, got {dwell_ns}"),
                ));
            }
        }
        let averages = average_correlations(&training);
        Ok(Self {
            mode,
            training,
            averages,
        })
    }

    pub fn averaged(training: TrainingSet) -> Self {
        Self::new(FeedMode::Averaged, training).expect("averaged feed has no parameters")
    }

    pub fn mode(&self) -> FeedMode {
        self.mode
    }

    pub fn training(&self) -> &TrainingSet {
        &self.training
    }

    /// Index of the vector shown during segment `segment`.
    fn vector_of_segment(&self, segment: u64) -> usize {
        (segment % self.training.len() as u64) as usize
    }

    fn segment_at(&self, t: f64) -> u64 {
        match self.mode {
            FeedMode::Averaged => 0,
            FeedMode::Sequential { dwell_ns } => (t.max(0.0) / dwell_ns).floor() as u64,
        }
    }

    fn pair_in_segment(&self, segment: u64, i: usize, j: usize) -> f64 {
        match self.mode {
            FeedMode::Averaged => self.averages.pair(i, j),
            FeedMode::Sequential { .. } => {
                let v = &self.training.vectors()[self.vector_of_segment(segment)];
                f64::from(v.get(i) * v.get(j))
            }
        }
    }

    fn bias_in_segment(&self, segment: u64, i: usize) -> f64 {
        match self.mode {
            FeedMode::Averaged => self.averages.mean(i),
            FeedMode::Sequential { .. } => {
                f64::from(self.training.vectors()[self.vector_of_segment(segment)].get(i))
            }
        }
    }

    /// Fed correlation v_i v_j at time `t`.
    pub fn value(&self, i: usize, j: usize, t: f64) -> f64 {
        self.pair_in_segment(self.segment_at(t), i, j)
    }

    /// Fed bias signal v_i at time `t`.
    pub fn bias_value(&self, i: usize, t: f64) -> f64 {
        self.bias_in_segment(self.segment_at(t), i)
    }
}

/// Fed value of channel (i, j) at time `t`.
pub fn feed_value(s: &FeedSchedule, i: usize, j: usize, t: f64) -> f64 {
    s.value(i, j, t)
}

/// Exact solution of `rc dv/dt = drive - v` after `dt` with constant drive.
#[inline]
pub fn rc_advance(v_now: f64, drive: f64, rc_ns: f64, dt: f64) -> f64 {
    if dt == f64::INFINITY {
        return drive;
    }
    v_now + (drive - v_now) * -(-dt / rc_ns).exp_m1()
}

/// dW/dt = (v_corr - m_corr - lambda w) / tau_L.
#[inline]
pub fn weight_derivative(v_corr: f64, m_corr: f64, w: f64, lambda: f64, tau_l_ns: f64) -> f64 {
    (v_corr - m_corr - lambda * w) / tau_l_ns
}

/// Units the RC cell state is integrated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    /// Dimensionless weights W relaxing towards (v v - m m) / lambda.
    #[default]
    Dimensionless,
    /// Capacitor voltages V relaxing towards (v v - m m) V_DD / 2.
    Circuit,
}

/// Multiplicative log-normal component spread.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Variation {
    /// sigma of ln R, per RC cell.
    pub r_sigma: f64,
    /// sigma of ln tau_N, per neuron.
    pub tau_n_sigma: f64,
}

impl Variation {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r_sigma", self.r_sigma), ("tau_n_sigma", self.tau_n_sigma)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, "must be non-negative"));
            }
        }
        Ok(())
    }

    fn factors<R: Rng>(sigma: f64, count: usize, rng: &mut R) -> Vec<f64> {
        if sigma == 0.0 {
            return vec![1.0; count];
        }
        let law = LogNormal::new(0.0, sigma).expect("sigma validated");
        (0..count).map(|_| law.sample(rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub duration_ns: f64,
    pub snapshot_every_ns: f64,
    pub kl_window_ns: f64,
    pub kl_stride_ns: f64,
    /// Jeffreys-style pseudocount per configuration for windowed KL.
    pub kl_pseudocount: f64,
    pub law: UpdateLaw,
    pub learn_biases: bool,
    pub domain: Domain,
    pub variation: Variation,
    pub synapse_delay_ns: f64,
    pub clamp: ClampSpec,
    /// Target for KL monitoring; defaults to the training set's distribution.
    pub ideal: Option<Distribution>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            duration_ns: 5500.0,
            snapshot_every_ns: 10.0,
            kl_window_ns: DEFAULT_WINDOW_NS,
            kl_stride_ns: DEFAULT_WINDOW_NS,
            kl_pseudocount: 0.5,
            law: UpdateLaw::Exponential,
            learn_biases: true,
            domain: Domain::Dimensionless,
            variation: Variation::default(),
            synapse_delay_ns: 0.0,
            clamp: ClampSpec::none(),
            ideal: None,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("duration_ns", self.duration_ns),
            ("snapshot_every_ns", self.snapshot_every_ns),
            ("kl_window_ns", self.kl_window_ns),
            ("kl_stride_ns", self.kl_stride_ns),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.kl_pseudocount.is_finite() && self.kl_pseudocount >= 0.0) {
            return Err(Error::param("kl_pseudocount", "must be non-negative"));
        }
        self.variation.validate()
    }
}

/// KL of one monitoring window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlPoint {
    pub t_start_ns: f64,
    pub t_end_ns: f64,
    pub kl: f64,
}

/// Weight snapshots and the windowed KL series of a training run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightTrajectory {
    pub snapshots: Vec<(f64, WeightSet)>,
    pub kl_series: Vec<KlPoint>,
}

impl WeightTrajectory {
    pub fn final_weights(&self) -> &WeightSet {
        &self
            .snapshots
            .last()
            .expect("trajectory holds the initial snapshot")
            .1
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.0)
    }

    pub fn final_kl(&self) -> Option<f64> {
        self.kl_series.last().map(|p| p.kl)
    }

    /// KL of the window starting at `t_start_ns`, if monitored.
    pub fn kl_at(&self, t_start_ns: f64) -> Option<f64> {
        self.kl_series
            .iter()
            .find(|p| (p.t_start_ns - t_start_ns).abs() < 1e-9)
            .map(|p| p.kl)
    }
}

/// Latest snapshot at or before `t`.
pub fn freeze_for_inference(traj: &WeightTrajectory, t: f64) -> Result<WeightSet> {
    let first = traj.snapshots.first().map_or(f64::INFINITY, |s| s.0);
    let idx = traj.snapshots.partition_point(|s| s.0 <= t);
    if idx == 0 {
        return Err(Error::BeforeFirstSnapshot { t, first });
    }
    Ok(traj.snapshots[idx - 1].1.clone())
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub trajectory: WeightTrajectory,
    pub trace: SimTrace,
    pub mapping: CircuitMapping,
    pub warnings: Vec<String>,
}

impl TrainOutcome {
    pub fn final_weights(&self) -> &WeightSet {
        self.trajectory.final_weights()
    }
}

/// Bank of RC cells: one per pair, plus one per neuron when learning biases.
struct RcBank {
    n: usize,
    pairs: Vec<(usize, usize)>,
    /// Cell states in the integration domain; layout matches `pairs` then biases.
    cells: Vec<f64>,
    rc_ns: Vec<f64>,
    uniform_rc: Option<f64>,
    learn_biases: bool,
    /// Steady-state value per unit of drive.
    drive_gain: f64,
    /// Dimensionless weight per unit of cell state.
    to_weight: f64,
    weights: WeightSet,
}

impl RcBank {
    fn advance(&mut self, dt: f64, feed: &FeedSchedule, segment: u64, m: &[i8]) {
        if dt <= 0.0 {
            return;
        }
        let shared = self.uniform_rc.map(|rc| -(-dt / rc).exp_m1());
        let pair_count = self.pairs.len();
        for (c, &(i, j)) in self.pairs.iter().enumerate() {
            let drive =
                self.drive_gain * (feed.pair_in_segment(segment, i, j) - f64::from(m[i] * m[j]));
            let x = self.cells[c];
            self.cells[c] = match shared {
                Some(k) => x + (drive - x) * k,
                None => rc_advance(x, drive, self.rc_ns[c], dt),
            };
            self.weights.set(i, j, self.cells[c] * self.to_weight);
        }
        if self.learn_biases {
            for i in 0..self.n {
                let c = pair_count + i;
                let drive = self.drive_gain * (feed.bias_in_segment(segment, i) - f64::from(m[i]));
                let x = self.cells[c];
                self.cells[c] = match shared {
                    Some(k) => x + (drive - x) * k,
                    None => rc_advance(x, drive, self.rc_ns[c], dt),
                };
                self.weights.set_bias(i, self.cells[c] * self.to_weight);
            }
        }
    }
}

/// Co-simulates the asynchronous network and the RC learning cells.
pub fn train(
    w0: &WeightSet,
    schedule: &FeedSchedule,
    params: &CircuitParams,
    options: &TrainOptions,
    seed: u64,
) -> Result<TrainOutcome> {
    options.validate()?;
    let mapping = map_circuit(params)?;
    let n = schedule.training().n();
    if w0.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: w0.n(),
        });
    }

    let mut warnings = Vec::new();
    let ratio = mapping.timescale_ratio(params.tau_n_ns);
    if ratio < MIN_TIMESCALE_RATIO {
        let msg = format!(
            "tau_L / tau_N = {ratio:.3} is below {MIN_TIMESCALE_RATIO}; learning may not separate from sampling"
        );
        warn!("{msg}");
        warnings.push(msg);
    }

    let pairs: Vec<(usize, usize)> = pair_indices(n).collect();
    let cell_count = pairs.len() + if options.learn_biases { n } else { 0 };
    let mut variation_rng = rng::stream(seed, 1);
    let r_factors = Variation::factors(options.variation.r_sigma, cell_count, &mut variation_rng);
    let tau_factors = Variation::factors(options.variation.tau_n_sigma, n, &mut variation_rng);
    let rc_ns: Vec<f64> = r_factors.iter().map(|f| mapping.rc_ns * f).collect();
    let taus: Vec<f64> = tau_factors.iter().map(|f| params.tau_n_ns * f).collect();

    let (drive_gain, to_weight) = match options.domain {
        Domain::Dimensionless => (1.0 / mapping.lambda, 1.0),
        Domain::Circuit => (mapping.unit_volts, mapping.weight_scale),
    };
    let mut cells: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| w0.get(i, j) / to_weight)
        .collect();
    if options.learn_biases {
        cells.extend(w0.biases().iter().map(|b| b / to_weight));
    }
    let mut bank = RcBank {
        n,
        pairs,
        cells,
        uniform_rc: (options.variation.r_sigma == 0.0).then_some(mapping.rc_ns),
        rc_ns,
        learn_biases: options.learn_biases,
        drive_gain,
        to_weight,
        weights: w0.clone(),
    };

    let mut net = Network::new(
        &options.clamp,
        taus,
        options.law,
        options.synapse_delay_ns,
        seed,
    )?;
    let duration = options.duration_ns;
    let mut snapshots = vec![(0.0, w0.clone())];
    let mut next_snapshot: u64 = 1;
    let mut segment: u64 = 0;
    let mut t = 0.0;

    loop {
        let t_neuron = net.next_update().map_or(f64::INFINITY, |(tn, _)| tn);
        let t_snap = (next_snapshot as f64 * options.snapshot_every_ns).min(duration);
        let t_feed = match schedule.mode() {
            FeedMode::Averaged => f64::INFINITY,
            FeedMode::Sequential { dwell_ns } => (segment + 1) as f64 * dwell_ns,
        };
        let t_next = t_neuron.min(t_snap).min(t_feed);
        bank.advance(t_next - t, schedule, segment, net.state());
        t = t_next;

        if t_neuron < t_snap && t_neuron < t_feed {
            let (_, i) = net.next_update().expect("pending update");
            let input = bank.weights.local_field(i, net.input_view(t));
            net.resolve(i, t, input);
        } else if t_feed <= t_snap {
            segment += 1;
        } else {
            snapshots.push((t, bank.weights.clone()));
            if t >= duration {
                break;
            }
            next_snapshot += 1;
        }
    }

    let trace = net.into_trace(duration, options.kl_window_ns);
    let ideal = options
        .ideal
        .clone()
        .unwrap_or_else(|| schedule.training().ideal_distribution());
    let kl_series = windowed_kl(
        &trace,
        &ideal,
        options.kl_window_ns,
        options.kl_stride_ns,
        options.kl_pseudocount,
    )?;

    Ok(TrainOutcome {
        trajectory: WeightTrajectory {
            snapshots,
            kl_series,
        },
        trace,
        mapping,
        warnings,
    })
}

/// KL(ideal || occupancy over [t, t + window]) for t = 0, stride, 2 stride, ...
/// while the window fits in the trace.
pub fn windowed_kl(
    trace: &SimTrace,
    ideal: &Distribution,
    window_ns: f64,
    stride_ns: f64,
    pseudocount: f64,
) -> Result<Vec<KlPoint>> {
    let duration = trace.duration_ns();
    let mut series = Vec::new();
    let mut k: u64 = 0;
    loop {
        let t0 = k as f64 * stride_ns;
        let t1 = t0 + window_ns;
        if t1 > duration * (1.0 + 1e-12) {
            break;
        }
        let t1 = t1.min(duration);
        let hist = trace.histogram(t0, t1)?;
        let smoothing = pseudocount_smoothing(pseudocount, trace.expected_updates(t0, t1));
        let kl = kl_divergence(ideal, &hist, smoothing)?;
        series.push(KlPoint {
            t_start_ns: t0,
            t_end_ns: t1,
            kl,
        });
        k += 1;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BipolarVector;
    use crate::experiments::full_adder_set;

    #[test]
    fn reference_circuit_mapping() {
        let m = map_circuit(&CircuitParams::default()).unwrap();
        assert!((m.lambda - 0.0125).abs() < 1e-15);
        assert!((m.tau_l_ns - 62.5).abs() < 1e-9);
        assert!((m.rc_ns - 5000.0).abs() < 1e-9);
        assert!((m.weight_scale - 200.0).abs() < 1e-12);
        // lambda R C reproduces tau_L
        assert!((m.lambda * m.rc_ns - m.tau_l_ns).abs() < 1e-12);
    }

    #[test]
    fn lambda_invariant_under_joint_voltage_scaling() {
        let p = CircuitParams::default();
        let doubled = CircuitParams {
            v0_volt: 2.0 * p.v0_volt,
            v_dd_volt: 2.0 * p.v_dd_volt,
            ..p
        };
        let a = map_circuit(&p).unwrap().lambda;
        let b = map_circuit(&doubled).unwrap().lambda;
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_parameters_rejected() {
        let bad = CircuitParams {
            c_farad: -1e-9,
            ..CircuitParams::default()
        };
        match map_circuit(&bad) {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "c_farad"),
            other => panic!("unexpected {other:?}"),
        }
        let weak = CircuitParams {
            a_v: 0.1,
            ..CircuitParams::default()
        };
        assert!(map_circuit(&weak).is_err());
    }

    #[test]
    fn feed_examples() {
        let avg = FeedSchedule::averaged(full_adder_set());
        for t in [0.0, 1.3, 1e4] {
            assert!((feed_value(&avg, 0, 4, t) - 0.5).abs() < 1e-15);
        }
        let seq =
            FeedSchedule::new(FeedMode::Sequential { dwell_ns: 1.0 }, full_adder_set()).unwrap();
        assert_eq!(feed_value(&seq, 0, 4, 3.5), -1.0);
        assert_eq!(feed_value(&seq, 0, 4, 0.5), 1.0);
        assert_eq!(feed_value(&seq, 0, 4, 11.5), -1.0);
        assert_eq!(seq.bias_value(2, 1.5), 1.0);

        let single =
            TrainingSet::new(vec![BipolarVector::from_ints(&[1, -1, 1]).unwrap()]).unwrap();
        let a = FeedSchedule::averaged(single.clone());
        let s = FeedSchedule::new(FeedMode::Sequential { dwell_ns: 0.7 }, single).unwrap();
        for t in [0.0, 0.3, 2.9, 100.0] {
            for (i, j) in pair_indices(3) {
                assert_eq!(a.value(i, j, t), s.value(i, j, t));
            }
            assert_eq!(a.bias_value(1, t), s.bias_value(1, t));
        }
        assert!(
            FeedSchedule::new(FeedMode::Sequential { dwell_ns: 0.0 }, full_adder_set()).is_err()
        );
    }

    #[test]
    fn rc_advance_examples() {
        assert_eq!(rc_advance(0.3, 0.4, 5000.0, 0.0), 0.3);
        assert_eq!(rc_advance(0.3, 0.4, 5000.0, f64::INFINITY), 0.4);
        assert!((rc_advance(0.3, 0.4, 5000.0, 1e9) - 0.4).abs() < 1e-15);
        let v = rc_advance(0.0, 0.4, 5000.0, 5000.0);
        assert!((v - 0.4 * (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!((v - 0.252848).abs() < 1e-6);
    }

    #[test]
    fn rc_advance_composes() {
        let once = rc_advance(0.1, -0.3, 50.0, 7.0);
        let twice = rc_advance(rc_advance(0.1, -0.3, 50.0, 3.0), -0.3, 50.0, 4.0);
        assert!((once - twice).abs() < 1e-15);
    }

    #[test]
    fn weight_derivative_examples() {
        assert_eq!(weight_derivative(0.3, 0.3, 0.0, 0.0125, 62.5), 0.0);
        assert!((weight_derivative(1.0, -1.0, 0.0, 0.0125, 62.5) - 0.032).abs() < 1e-15);
        let (v, m, lambda) = (0.5, 0.2, 0.0125);
        let w_star = (v - m) / lambda;
        assert!(weight_derivative(v, m, w_star, lambda, 62.5).abs() < 1e-15);
    }

    #[test]
    fn freeze_examples() {
        let mut w1 = WeightSet::zeros(3);
        w1.set(0, 2, 0.7);
        let traj = WeightTrajectory {
            snapshots: vec![(0.0, WeightSet::zeros(3)), (10.0, w1.clone())],
            kl_series: vec![],
        };
        assert_eq!(
            freeze_for_inference(&traj, 0.0).unwrap(),
            WeightSet::zeros(3)
        );
        assert_eq!(
            freeze_for_inference(&traj, 9.9).unwrap(),
            WeightSet::zeros(3)
        );
        assert_eq!(freeze_for_inference(&traj, 10.0).unwrap(), w1);
        assert!(matches!(
            freeze_for_inference(&traj, -1.0),
            Err(Error::BeforeFirstSnapshot { .. })
        ));
    }

    #[test]
    fn empty_drive_decays_with_rc() {
        // Clamping every neuron to the only training vector makes v v = m m,
        // so the cells see zero drive and simply discharge through R.
        let v = BipolarVector::from_ints(&[1, -1, 1, 1]).unwrap();
        let ts = TrainingSet::new(vec![v.clone()]).unwrap();
        let mut w0 = WeightSet::zeros(4);
        for (k, (i, j)) in pair_indices(4).enumerate() {
            w0.set(i, j, 0.5 + 0.1 * k as f64);
        }
        for i in 0..4 {
            w0.set_bias(i, -0.2 * i as f64);
        }
        let options = TrainOptions {
            duration_ns: 2000.0,
            snapshot_every_ns: 100.0,
            kl_window_ns: 100.0,
            kl_stride_ns: 100.0,
            clamp: ClampSpec::all(&v),
            ..TrainOptions::default()
        };
        let out = train(
            &w0,
            &FeedSchedule::averaged(ts),
            &CircuitParams::default(),
            &options,
            1,
        )
        .unwrap();
        let rc = out.mapping.rc_ns;
        for (t, w) in &out.trajectory.snapshots {
            let decay = (-t / rc).exp();
            for (i, j) in pair_indices(4) {
                assert!((w.get(i, j) - w0.get(i, j) * decay).abs() < 1e-12);
            }
            for i in 0..4 {
                assert!((w.bias(i) - w0.bias(i) * decay).abs() < 1e-12);
            }
        }
        assert!(out.trace.events().is_empty());
    }

    #[test]
    fn snapshot_times_are_increasing_and_end_at_duration() {
        let options = TrainOptions {
            duration_ns: 105.0,
            snapshot_every_ns: 10.0,
            kl_window_ns: 50.0,
            kl_stride_ns: 50.0,
            learn_biases: false,
            ..TrainOptions::default()
        };
        let out = train(
            &WeightSet::zeros(5),
            &FeedSchedule::averaged(full_adder_set()),
            &CircuitParams::default(),
            &options,
            3,
        )
        .unwrap();
        let times: Vec<f64> = out.trajectory.snapshots.iter().map(|s| s.0).collect();
        assert!(times.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(times.first(), Some(&0.0));
        assert_eq!(times.last(), Some(&105.0));
        assert_eq!(times.len(), 12);
        assert_eq!(out.trajectory.kl_series.len(), 2);
        assert!(out
            .trajectory
            .snapshots
            .iter()
            .all(|(_, w)| w.is_symmetric()));
    }

    #[test]
    fn weak_timescale_separation_warns() {
        let params = CircuitParams {
            tau_n_ns: 10.0,
            ..CircuitParams::default()
        };
        let options = TrainOptions {
            duration_ns: 100.0,
            kl_window_ns: 50.0,
            kl_stride_ns: 50.0,
            ..TrainOptions::default()
        };
        let out = train(
            &WeightSet::zeros(5),
            &FeedSchedule::averaged(full_adder_set()),
            &params,
            &options,
            0,
        )
        .unwrap();
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn stronger_regularization_shrinks_single_pair_weight() {
        // Two units fed a perfectly correlated pair. The steady state weight
        // depends only on lambda, so sweep A_v (lambda ~ 1 / A_v).
        let ts = TrainingSet::new(vec![
            BipolarVector::from_ints(&[1, 1]).unwrap(),
            BipolarVector::from_ints(&[-1, -1]).unwrap(),
        ])
        .unwrap();
        let mut last = f64::INFINITY;
        for a_v in [40.0, 20.0, 10.0, 5.0] {
            let params = CircuitParams {
                a_v,
                ..CircuitParams::default()
            };
            let options = TrainOptions {
                duration_ns: 3000.0,
                learn_biases: false,
                ..TrainOptions::default()
            };
            let out = train(
                &WeightSet::zeros(2),
                &FeedSchedule::averaged(ts.clone()),
                &params,
                &options,
                5,
            )
            .unwrap();
            // mean weight over the second half
            let tail: Vec<f64> = out
                .trajectory
                .snapshots
                .iter()
                .filter(|(t, _)| *t >= 1500.0)
                .map(|(_, w)| w.get(0, 1))
                .collect();
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            assert!(mean < last, "A_v = {a_v}: {mean} !< {last}");
            last = mean;
        }
    }
}
