//! Clockless network simulation.
//!
//! Every free neuron owns its own update clock. At each of its update times it
//! resamples its output from the current synaptic input, and the synapse is
//! recomputed from the outputs at that instant (optionally delayed). There is
//! no global sweep order and no shared tick.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand_distr::{Distribution as _, Exp1};

use crate::domain::{slice_to_index, BipolarVector, Distribution, WeightSet};
use crate::error::{Error, Result};
use crate::oracle::AnnealFactor;
use crate::rng::{self, SimRng};

/// Default histogram window, ns.
pub const DEFAULT_WINDOW_NS: f64 = 500.0;

/// Binary stochastic neuron: sgn(tanh(input) - r), with sgn(0) = +1.
#[inline]
pub fn bsn_decide(input: f64, r: f64) -> i8 {
    if input.tanh() - r >= 0.0 {
        1
    } else {
        -1
    }
}

/// Samples a neuron with r uniform on [-1, 1]; P(+1) = (1 + tanh(input)) / 2.
#[inline]
pub fn bsn_sample<R: Rng + ?Sized>(input: f64, rng: &mut R) -> i8 {
    let r = rng.random_range(-1.0..=1.0);
    bsn_decide(input, r)
}

/// I_i = i0 (sum_j W_ij m_j + b_i) for every unit.
pub fn synapse_eval(w: &WeightSet, m: &BipolarVector, i0: AnnealFactor) -> Result<Vec<f64>> {
    if m.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            actual: m.len(),
        });
    }
    Ok((0..w.n())
        .map(|i| i0.value() * w.local_field(i, m.as_slice()))
        .collect())
}

/// Statistical law of the interval between two updates of one neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateLaw {
    /// Memoryless retention: gaps are exponential with mean tau_n.
    #[default]
    Exponential,
    /// Gaps are exactly tau_n, with an independent random phase per neuron.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronTiming {
    pub tau_n_ns: f64,
    pub law: UpdateLaw,
}

impl NeuronTiming {
    pub fn new(tau_n_ns: f64, law: UpdateLaw) -> Result<Self> {
        if !(tau_n_ns.is_finite() && tau_n_ns > 0.0) {
            return Err(Error::param(
                "tau_n_ns",
                format!("must be positive, got {tau_n_ns}"),
            ));
        }
        Ok(Self { tau_n_ns, law })
    }

    pub fn exponential(tau_n_ns: f64) -> Result<Self> {
        Self::new(tau_n_ns, UpdateLaw::Exponential)
    }
}

impl Default for NeuronTiming {
    fn default() -> Self {
        Self {
            tau_n_ns: 0.1,
            law: UpdateLaw::Exponential,
        }
    }
}

/// Next update time after `t_now` for a neuron with mean interval `tau_ns`.
pub fn schedule_next<R: Rng + ?Sized>(t_now: f64, tau_ns: f64, law: UpdateLaw, rng: &mut R) -> f64 {
    match law {
        UpdateLaw::Exponential => {
            let gap: f64 = Exp1.sample(rng);
            t_now + tau_ns * gap
        }
        UpdateLaw::Fixed => t_now + tau_ns,
    }
}

fn first_update<R: Rng + ?Sized>(tau_ns: f64, law: UpdateLaw, rng: &mut R) -> f64 {
    match law {
        UpdateLaw::Exponential => schedule_next(0.0, tau_ns, law, rng),
        UpdateLaw::Fixed => tau_ns * rng.random::<f64>(),
    }
}

/// Neurons pinned to fixed outputs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClampSpec {
    pinned: BTreeMap<usize, i8>,
}

impl ClampSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(pairs: impl IntoIterator<Item = (usize, i8)>) -> Result<Self> {
        let mut pinned = BTreeMap::new();
        for (i, v) in pairs {
            if v != 1 && v != -1 {
                return Err(Error::InvalidBipolar {
                    index: i,
                    value: v as i64,
                });
            }
            if pinned.insert(i, v).is_some() {
                return Err(Error::param("clamp", format!("neuron {i} is pinned twice")));
            }
        }
        Ok(Self { pinned })
    }

    /// Pins every unit to `v`.
    pub fn all(v: &BipolarVector) -> Self {
        Self {
            pinned: v.iter().enumerate().collect(),
        }
    }

    /// Parses `index=+1,index=-1,...`. An empty string pins nothing.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (idx, val) = item
                .split_once('=')
                .ok_or_else(|| Error::param("clamp", format!("`{item}` is not index=value")))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::param("clamp", format!("bad neuron index in `{item}`")))?;
            let val: i64 = val
                .trim()
                .trim_start_matches('+')
                .parse()
                .map_err(|_| Error::param("clamp", format!("bad value in `{item}`")))?;
            if val != 1 && val != -1 {
                return Err(Error::InvalidBipolar {
                    index: idx,
                    value: val,
                });
            }
            pairs.push((idx, val as i8));
        }
        Self::new(pairs)
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        match self.pinned.keys().next_back() {
            Some(&i) if i >= n => Err(Error::param(
                "clamp",
                format!("neuron {i} out of range for {n} units"),
            )),
            _ => Ok(()),
        }
    }

    pub fn get(&self, i: usize) -> Option<i8> {
        self.pinned.get(&i).copied()
    }

    pub fn len(&self) -> usize {
        self.pinned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pinned.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.pinned.iter().map(|(&i, &v)| (i, v))
    }
}

impl std::fmt::Display for ClampSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self.iter().map(|(i, v)| format!("{i}={v:+}")).collect();
        f.write_str(&items.join(","))
    }
}

/// One output change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipEvent {
    pub time_ns: f64,
    pub neuron: usize,
    pub value: i8,
}

/// Recorded output history of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    n: usize,
    initial: Vec<i8>,
    events: Vec<FlipEvent>,
    t_end_ns: f64,
    /// Sum of 1/tau over free neurons, updates per ns.
    update_rate: f64,
    pub window_ns: f64,
}

impl SimTrace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> &[i8] {
        &self.initial
    }

    pub fn events(&self) -> &[FlipEvent] {
        &self.events
    }

    pub fn duration_ns(&self) -> f64 {
        self.t_end_ns
    }

    /// Expected number of neuron updates in `[t0, t1]`.
    pub fn expected_updates(&self, t0: f64, t1: f64) -> f64 {
        (t1 - t0).max(0.0) * self.update_rate
    }

    pub fn state_at(&self, t: f64) -> Vec<i8> {
        let mut state = self.initial.clone();
        for e in self.events.iter().take_while(|e| e.time_ns <= t) {
            state[e.neuron] = e.value;
        }
        state
    }

    /// Fraction of `[t0, t1]` spent in each configuration.
    pub fn histogram(&self, t0: f64, t1: f64) -> Result<Distribution> {
        let mut occupancy = vec![0.0; 1usize << self.n];
        self.occupancy_into(t0, t1, |k, dt| occupancy[k] += dt)?;
        Distribution::from_masses(self.n, occupancy)
    }

    /// Histogram over the last `window_ns` of the run.
    pub fn final_window_histogram(&self) -> Result<Distribution> {
        let t0 = (self.t_end_ns - self.window_ns).max(0.0);
        self.histogram(t0, self.t_end_ns)
    }

    /// Calls `sink(config_index, dwell)` for every constant stretch of the
    /// window.
    pub(crate) fn occupancy_into(
        &self,
        t0: f64,
        t1: f64,
        mut sink: impl FnMut(usize, f64),
    ) -> Result<()> {
        if !(t0 < t1) || t0 < 0.0 || t1 > self.t_end_ns * (1.0 + 1e-12) {
            return Err(Error::EmptyInterval { start: t0, end: t1 });
        }
        let first = self.events.partition_point(|e| e.time_ns <= t0);
        let mut state = self.initial.clone();
        for e in &self.events[..first] {
            state[e.neuron] = e.value;
        }
        let mut k = slice_to_index(&state);
        let mut t = t0;
        for e in &self.events[first..] {
            if e.time_ns >= t1 {
                break;
            }
            sink(k, e.time_ns - t);
            state[e.neuron] = e.value;
            k = slice_to_index(&state);
            t = e.time_ns;
        }
        sink(k, t1 - t);
        Ok(())
    }
}

/// The asynchronous network state machine shared by free runs and training.
///
/// Callers pop the next update with [`Network::next_update`], compute the
/// input of that neuron from [`Network::input_view`], and hand it back to
/// [`Network::resolve`].
#[derive(Debug, Clone)]
pub struct Network {
    state: Vec<i8>,
    initial: Vec<i8>,
    delayed: Vec<i8>,
    pending: VecDeque<FlipEvent>,
    delay_ns: f64,
    next_time: Vec<f64>,
    taus: Vec<f64>,
    law: UpdateLaw,
    rng: SimRng,
    events: Vec<FlipEvent>,
}

impl Network {
    /// `taus` holds the mean update interval of each neuron in ns.
    pub fn new(
        clamp: &ClampSpec,
        taus: Vec<f64>,
        law: UpdateLaw,
        synapse_delay_ns: f64,
        seed: u64,
    ) -> Result<Self> {
        let n = taus.len();
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        clamp.validate_for(n)?;
        if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::param(
                "tau_n_ns",
                format!("must be positive, got {t}"),
            ));
        }
        if !(synapse_delay_ns.is_finite() && synapse_delay_ns >= 0.0) {
            return Err(Error::param("synapse_delay_ns", "must be non-negative"));
        }
        let mut rng = rng::seeded(seed);
        let state: Vec<i8> = (0..n)
            .map(|i| {
                let coin = if rng.random::<bool>() { 1 } else { -1 };
                clamp.get(i).unwrap_or(coin)
            })
            .collect();
        let next_time = (0..n)
            .map(|i| match clamp.get(i) {
                Some(_) => f64::INFINITY,
                None => first_update(taus[i], law, &mut rng),
            })
            .collect();
        Ok(Self {
            initial: state.clone(),
            delayed: state.clone(),
            state,
            pending: VecDeque::new(),
            delay_ns: synapse_delay_ns,
            next_time,
            taus,
            law,
            rng,
            events: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.state.len()
    }

    /// Earliest pending neuron update; `None` when every neuron is clamped.
    pub fn next_update(&self) -> Option<(f64, usize)> {
        let (i, &t) = self
            .next_time
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        t.is_finite().then_some((t, i))
    }

    /// Current outputs.
    pub fn state(&self) -> &[i8] {
        &self.state
    }

    /// Outputs as seen by the synapse at time `t`.
    pub fn input_view(&mut self, t: f64) -> &[i8] {
        if self.delay_ns == 0.0 {
            return &self.state;
        }
        while let Some(e) = self.pending.front() {
            if e.time_ns + self.delay_ns > t {
                break;
            }
            self.delayed[e.neuron] = e.value;
            self.pending.pop_front();
        }
        &self.delayed
    }

    /// Resamples neuron `i` at time `t` from `input` and reschedules it.
    pub fn resolve(&mut self, i: usize, t: f64, input: f64) -> i8 {
        let value = bsn_sample(input, &mut self.rng);
        if value != self.state[i] {
            self.state[i] = value;
            let e = FlipEvent {
                time_ns: t,
                neuron: i,
                value,
            };
            self.events.push(e);
            if self.delay_ns > 0.0 {
                self.pending.push_back(e);
            }
        }
        self.next_time[i] = schedule_next(t, self.taus[i], self.law, &mut self.rng);
        value
    }

    pub fn into_trace(self, t_end_ns: f64, window_ns: f64) -> SimTrace {
        let update_rate = self
            .next_time
            .iter()
            .zip(&self.taus)
            .filter(|(t, _)| t.is_finite())
            .map(|(_, tau)| 1.0 / tau)
            .sum();
        SimTrace {
            n: self.state.len(),
            initial: self.initial,
            events: self.events,
            t_end_ns,
            update_rate,
            window_ns,
        }
    }
}

/// Options beyond the basic free-run contract.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeRunOptions {
    pub synapse_delay_ns: f64,
    /// Per-neuron mean update interval; overrides `timing.tau_n_ns`.
    pub taus_ns: Option<Vec<f64>>,
    pub window_ns: f64,
}

impl Default for FreeRunOptions {
    fn default() -> Self {
        Self {
            synapse_delay_ns: 0.0,
            taus_ns: None,
            window_ns: DEFAULT_WINDOW_NS,
        }
    }
}

/// Runs the network with frozen weights for `duration_ns`.
pub fn run_free(
    w: &WeightSet,
    clamp: &ClampSpec,
    i0: AnnealFactor,
    duration_ns: f64,
    timing: NeuronTiming,
    seed: u64,
) -> Result<SimTrace> {
    run_free_with(
        w,
        clamp,
        i0,
        duration_ns,
        timing,
        &FreeRunOptions::default(),
        seed,
    )
}

pub fn run_free_with(
    w: &WeightSet,
    clamp: &ClampSpec,
    i0: AnnealFactor,
    duration_ns: f64,
    timing: NeuronTiming,
    options: &FreeRunOptions,
    seed: u64,
) -> Result<SimTrace> {
    if !(duration_ns.is_finite() && duration_ns > 0.0) {
        return Err(Error::param("duration_ns", "must be positive"));
    }
    let n = w.n();
    let taus = match &options.taus_ns {
        Some(t) if t.len() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: t.len(),
            })
        }
        Some(t) => t.clone(),
        None => vec![timing.tau_n_ns; n],
    };
    let mut net = Network::new(clamp, taus, timing.law, options.synapse_delay_ns, seed)?;
    let scale = i0.value();
    while let Some((t, i)) = net.next_update() {
        if t >= duration_ns {
            break;
        }
        let input = scale * w.local_field(i, net.input_view(t));
        net.resolve(i, t, input);
    }
    Ok(net.into_trace(duration_ns, options.window_ns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{index_to_config, pair_indices};
    use crate::oracle::boltzmann_exact;

    fn random_weights(n: usize, seed: u64) -> WeightSet {
        let mut r = rng::seeded(seed);
        let mut w = WeightSet::zeros(n);
        for (i, j) in pair_indices(n) {
            w.set(i, j, r.random_range(-1.0..1.0));
        }
        for i in 0..n {
            w.set_bias(i, r.random_range(-1.0..1.0));
        }
        w
    }

    #[test]
    fn bsn_examples() {
        assert_eq!(bsn_decide(0.0, 0.5), -1);
        assert_eq!(bsn_decide(0.0, 0.0), 1);
        for r in [-0.999, -0.5, 0.0, 0.5, 0.999] {
            assert_eq!(bsn_decide(100.0, r), 1);
        }
    }

    #[test]
    fn bsn_sample_rate() {
        let mut r = rng::seeded(1);
        let draws = 1_000_000;
        let ups = (0..draws).filter(|_| bsn_sample(1.0, &mut r) > 0).count();
        let frac = ups as f64 / draws as f64;
        assert!((frac - 0.880797).abs() < 0.001, "frac = {frac}");
    }

    #[test]
    fn synapse_examples() {
        let m = BipolarVector::from_ints(&[1, -1]).unwrap();
        assert_eq!(
            synapse_eval(&WeightSet::zeros(2), &m, AnnealFactor::UNIT).unwrap(),
            vec![0.0, 0.0]
        );
        let mut w = WeightSet::zeros(2);
        w.set(0, 1, 0.5);
        assert_eq!(
            synapse_eval(&w, &m, AnnealFactor::UNIT).unwrap(),
            vec![-0.5, 0.5]
        );
        let doubled = synapse_eval(&w, &m, AnnealFactor::new(2.0).unwrap()).unwrap();
        assert_eq!(doubled, vec![-1.0, 1.0]);
    }

    #[test]
    fn schedule_examples() {
        let mut r = rng::seeded(3);
        assert!((schedule_next(1.0, 0.1, UpdateLaw::Fixed, &mut r) - 1.1).abs() < 1e-15);
        let samples = 100_000;
        let mean = (0..samples)
            .map(|_| schedule_next(0.0, 0.1, UpdateLaw::Exponential, &mut r))
            .sum::<f64>()
            / samples as f64;
        assert!((mean - 0.1).abs() < 0.002, "mean = {mean}");
    }

    #[test]
    fn exponential_clocks_never_collide() {
        let trace = run_free(
            &WeightSet::zeros(5),
            &ClampSpec::none(),
            AnnealFactor::UNIT,
            200.0,
            NeuronTiming::default(),
            4,
        )
        .unwrap();
        let times: Vec<f64> = trace.events().iter().map(|e| e.time_ns).collect();
        assert!(times.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn clamp_parsing() {
        let c = ClampSpec::parse("0=1, 3=-1,4=+1").unwrap();
        assert_eq!(c.get(0), Some(1));
        assert_eq!(c.get(3), Some(-1));
        assert_eq!(c.get(4), Some(1));
        assert_eq!(c.to_string(), "0=+1,3=-1,4=+1");
        assert!(ClampSpec::parse("0=2").is_err());
        assert!(ClampSpec::parse("0=1,0=-1").is_err());
        assert!(ClampSpec::parse("x=1").is_err());
        assert!(ClampSpec::parse("").unwrap().is_empty());
        assert!(ClampSpec::parse("7=1").unwrap().validate_for(5).is_err());
    }

    #[test]
    fn fully_clamped_network_never_flips() {
        let v = index_to_config(13, 5);
        let trace = run_free(
            &random_weights(5, 1),
            &ClampSpec::all(&v),
            AnnealFactor::UNIT,
            100.0,
            NeuronTiming::default(),
            0,
        )
        .unwrap();
        assert!(trace.events().is_empty());
        let h = trace.histogram(0.0, 100.0).unwrap();
        assert_eq!(h.prob(13), 1.0);
    }

    #[test]
    fn clamped_neurons_never_appear_in_events() {
        let clamp = ClampSpec::parse("1=-1,3=1").unwrap();
        let trace = run_free(
            &random_weights(5, 2),
            &clamp,
            AnnealFactor::UNIT,
            500.0,
            NeuronTiming::default(),
            7,
        )
        .unwrap();
        assert!(!trace.events().is_empty());
        assert!(trace
            .events()
            .iter()
            .all(|e| e.neuron != 1 && e.neuron != 3));
        assert_eq!(trace.initial()[1], -1);
        assert_eq!(trace.initial()[3], 1);
    }

    #[test]
    fn zero_weights_give_uniform_occupancy() {
        let trace = run_free(
            &WeightSet::zeros(5),
            &ClampSpec::none(),
            AnnealFactor::UNIT,
            10_000.0,
            NeuronTiming::default(),
            5,
        )
        .unwrap();
        let h = trace.histogram(0.0, 10_000.0).unwrap();
        assert!(h.total_variation(&Distribution::uniform(5)).unwrap() < 0.02);
    }

    #[test]
    fn free_run_matches_boltzmann_fixed_law_too() {
        let w = random_weights(4, 21);
        let exact = boltzmann_exact(&w, AnnealFactor::UNIT).unwrap();
        let timing = NeuronTiming::new(0.1, UpdateLaw::Fixed).unwrap();
        let trace = run_free(
            &w,
            &ClampSpec::none(),
            AnnealFactor::UNIT,
            20_000.0,
            timing,
            3,
        )
        .unwrap();
        let tv = trace
            .histogram(0.0, 20_000.0)
            .unwrap()
            .total_variation(&exact)
            .unwrap();
        assert!(tv < 0.02, "tv = {tv}");
    }

    #[test]
    fn histogram_occupancy_weighting() {
        let trace = SimTrace {
            n: 1,
            initial: vec![-1],
            events: vec![FlipEvent {
                time_ns: 2.0,
                neuron: 0,
                value: 1,
            }],
            t_end_ns: 4.0,
            update_rate: 1.0,
            window_ns: 4.0,
        };
        let h = trace.histogram(0.0, 4.0).unwrap();
        assert_eq!(h.probs(), &[0.5, 0.5]);
        assert_eq!(trace.histogram(0.0, 1.0).unwrap().probs(), &[1.0, 0.0]);
        assert_eq!(trace.histogram(3.0, 4.0).unwrap().probs(), &[0.0, 1.0]);
        assert!(matches!(
            trace.histogram(2.0, 2.0),
            Err(Error::EmptyInterval { .. })
        ));
        assert!(trace.histogram(0.0, 9.0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let w = random_weights(5, 9);
        let run = |seed| {
            run_free(
                &w,
                &ClampSpec::none(),
                AnnealFactor::UNIT,
                300.0,
                NeuronTiming::default(),
                seed,
            )
            .unwrap()
        };
        assert_eq!(run(12), run(12));
        assert_ne!(run(12).events(), run(13).events());
    }

    #[test]
    fn conditional_flip_statistics_follow_tanh() {
        // Two units with one coupling: unit 0 sees input W*m_1 + b_0, which
        // takes exactly two values. Count outcomes per input value.
        let mut w = WeightSet::zeros(2);
        w.set(0, 1, 0.8);
        w.set_bias(0, 0.3);
        w.set_bias(1, -0.2);
        let mut net = Network::new(
            &ClampSpec::none(),
            vec![0.1, 0.1],
            UpdateLaw::Exponential,
            0.0,
            17,
        )
        .unwrap();
        let mut tally = std::collections::HashMap::<i8, (u64, u64)>::new();
        for _ in 0..400_000 {
            let (t, i) = net.next_update().unwrap();
            let view = net.input_view(t).to_vec();
            let input = w.local_field(i, &view);
            let out = net.resolve(i, t, input);
            if i == 0 {
                let entry = tally.entry(view[1]).or_default();
                entry.0 += 1;
                entry.1 += u64::from(out > 0);
            }
        }
        for (m1, (count, ups)) in tally {
            let p = 0.5 * (1.0 + (0.8 * f64::from(m1) + 0.3).tanh());
            let sigma = (p * (1.0 - p) / count as f64).sqrt();
            let frac = ups as f64 / count as f64;
            assert!(
                (frac - p).abs() < 3.0 * sigma + 1e-12,
                "m1={m1}: {frac} vs {p}"
            );
        }
    }

    #[test]
    fn synapse_delay_uses_stale_outputs() {
        // Strong ferromagnetic pair: with a delay far longer than the run the
        // synapse only ever sees the initial state.
        let mut w = WeightSet::zeros(2);
        w.set(0, 1, 50.0);
        let options = FreeRunOptions {
            synapse_delay_ns: 1e9,
            ..FreeRunOptions::default()
        };
        let trace = run_free_with(
            &w,
            &ClampSpec::none(),
            AnnealFactor::UNIT,
            50.0,
            NeuronTiming::default(),
            &options,
            2,
        )
        .unwrap();
        let init = trace.initial().to_vec();
        // each unit locks onto the other's initial value
        let end = trace.state_at(50.0);
        assert_eq!(end, vec![init[1], init[0]]);
    }
}
