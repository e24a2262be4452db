//! Exact references for validating the autonomous simulator: the Boltzmann
//! distribution by enumeration, a sequential Gibbs sampler, and the
//! discrete-time learning rule driven either by exact model moments or by a
//! persistent chain.

use rand::Rng;

use crate::domain::{
    average_correlations, fill_spins, pair_indices, BipolarVector, Correlations, Distribution,
    TrainingSet, WeightSet,
};
use crate::error::{Error, Result};
use crate::rng;

/// Largest network that [`boltzmann_exact`] will enumerate.
pub const MAX_ENUMERATION_N: usize = 20;

/// Uniform multiplier on all weights and biases; acts as inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealFactor(f64);

impl AnnealFactor {
    pub const UNIT: AnnealFactor = AnnealFactor(1.0);

    pub fn new(i0: f64) -> Result<Self> {
        if !(i0.is_finite() && i0 > 0.0) {
            return Err(Error::param("i0", format!("must be positive, got {i0}")));
        }
        Ok(Self(i0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for AnnealFactor {
    fn default() -> Self {
        Self::UNIT
    }
}

/// p(m) proportional to exp(-i0 E(m)) over all 2^N configurations.
pub fn boltzmann_exact(w: &WeightSet, i0: AnnealFactor) -> Result<Distribution> {
    let n = w.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    let mut spins = vec![0i8; n];
    let log_weights: Vec<f64> = (0..1usize << n)
        .map(|k| {
            fill_spins(k, &mut spins);
            -i0.value() * w.energy_of(&spins)
        })
        .collect();
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let masses = log_weights.iter().map(|l| (l - max).exp()).collect();
    Distribution::from_masses(n, masses)
}

/// Exact <m_i m_j> and <m_i> of the model at unit temperature.
pub fn model_correlations(w: &WeightSet) -> Result<Correlations> {
    Ok(boltzmann_exact(w, AnnealFactor::UNIT)?.correlations())
}

/// One sequential sweep of heat-bath updates, sites in index order.
pub fn gibbs_chain_step<R: Rng + ?Sized>(
    w: &WeightSet,
    m: &BipolarVector,
    i0: AnnealFactor,
    rng: &mut R,
) -> Result<BipolarVector> {
    if m.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            actual: m.len(),
        });
    }
    let mut state = m.as_slice().to_vec();
    sweep_in_place(w, &mut state, i0.value(), rng);
    BipolarVector::new(state)
}

fn sweep_in_place<R: Rng + ?Sized>(w: &WeightSet, state: &mut [i8], i0: f64, rng: &mut R) {
    for i in 0..state.len() {
        let p_up = 0.5 * (1.0 + (i0 * w.local_field(i, state)).tanh());
        let u: f64 = rng.random();
        state[i] = if u < p_up { 1 } else { -1 };
    }
}

/// A persistent Gibbs chain.
#[derive(Debug, Clone)]
pub struct GibbsChain {
    state: Vec<i8>,
    i0: f64,
}

impl GibbsChain {
    pub fn random<R: Rng + ?Sized>(n: usize, i0: AnnealFactor, rng: &mut R) -> Self {
        let state = (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        Self {
            state,
            i0: i0.value(),
        }
    }

    pub fn sweep<R: Rng + ?Sized>(&mut self, w: &WeightSet, rng: &mut R) {
        sweep_in_place(w, &mut self.state, self.i0, rng);
    }

    pub fn state(&self) -> &[i8] {
        &self.state
    }

    /// Visit-count histogram over `sweeps` sweeps.
    pub fn histogram<R: Rng + ?Sized>(
        &mut self,
        w: &WeightSet,
        sweeps: usize,
        rng: &mut R,
    ) -> Result<Distribution> {
        let mut counts = vec![0.0; 1usize << self.state.len()];
        for _ in 0..sweeps {
            self.sweep(w, rng);
            counts[crate::domain::slice_to_index(&self.state)] += 1.0;
        }
        Distribution::from_masses(self.state.len(), counts)
    }
}

/// Source of model correlations for the reference learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientEstimate {
    /// Moments of the exact Boltzmann distribution.
    Exact,
    /// Moments averaged over a few sweeps of a chain that is never reset.
    Persistent { sweeps_per_step: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLearner {
    pub epsilon: f64,
    pub lambda: f64,
    pub steps: usize,
    pub estimate: GradientEstimate,
    pub learn_biases: bool,
    /// Any |W| above this aborts with [`Error::Diverged`].
    pub divergence_bound: f64,
}

impl Default for ReferenceLearner {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            lambda: 0.0125,
            steps: 50_000,
            estimate: GradientEstimate::Exact,
            learn_biases: false,
            divergence_bound: 1e3,
        }
    }
}

impl ReferenceLearner {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::param("epsilon", "must be positive"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::param("lambda", "must be non-negative"));
        }
        if let GradientEstimate::Persistent { sweeps_per_step: 0 } = self.estimate {
            return Err(Error::param("sweeps_per_step", "must be at least 1"));
        }
        Ok(())
    }
}

/// Runs W <- W + eps (<v_i v_j> - <m_i m_j> - lambda W) from zero weights.
pub fn discrete_learn_reference(
    ts: &TrainingSet,
    cfg: &ReferenceLearner,
    seed: u64,
) -> Result<WeightSet> {
    discrete_learn_from(WeightSet::zeros(ts.n()), ts, cfg, seed)
}

pub fn discrete_learn_from(
    mut w: WeightSet,
    ts: &TrainingSet,
    cfg: &ReferenceLearner,
    seed: u64,
) -> Result<WeightSet> {
    cfg.validate()?;
    if w.n() != ts.n() {
        return Err(Error::DimensionMismatch {
            expected: ts.n(),
            actual: w.n(),
        });
    }
    let n = ts.n();
    let data = average_correlations(ts);
    let mut rng = rng::seeded(seed);
    let mut chain = GibbsChain::random(n, AnnealFactor::UNIT, &mut rng);

    for step in 0..cfg.steps {
        let model = match cfg.estimate {
            GradientEstimate::Exact => model_correlations(&w)?,
            GradientEstimate::Persistent { sweeps_per_step } => {
                let mut c = Correlations::zeros(n);
                let weight = 1.0 / sweeps_per_step as f64;
                for _ in 0..sweeps_per_step {
                    chain.sweep(&w, &mut rng);
                    c.accumulate(chain.state(), weight);
                }
                c.finish_diagonal();
                c
            }
        };
        let mut next = w.clone();
        for (i, j) in pair_indices(n) {
            let g = data.pair(i, j) - model.pair(i, j) - cfg.lambda * w.get(i, j);
            next.set(i, j, w.get(i, j) + cfg.epsilon * g);
        }
        if cfg.learn_biases {
            for i in 0..n {
                let g = data.mean(i) - model.mean(i) - cfg.lambda * w.bias(i);
                next.set_bias(i, w.bias(i) + cfg.epsilon * g);
            }
        }
        w = next;
        let magnitude = w.max_abs();
        if !magnitude.is_finite() || magnitude > cfg.divergence_bound {
            return Err(Error::Diverged { step, magnitude });
        }
    }
    Ok(w)
}

/// Largest |<v_i v_j> - <m_i m_j> - lambda W_ij| over pairs, using exact
/// model moments. Bias channels are included when `with_biases` is set.
pub fn moment_residual(
    ts: &TrainingSet,
    w: &WeightSet,
    lambda: f64,
    with_biases: bool,
) -> Result<f64> {
    let data = average_correlations(ts);
    let model = model_correlations(w)?;
    let mut worst = pair_indices(ts.n())
        .map(|(i, j)| (data.pair(i, j) - model.pair(i, j) - lambda * w.get(i, j)).abs())
        .fold(0.0f64, f64::max);
    if with_biases {
        for i in 0..ts.n() {
            worst = worst.max((data.mean(i) - model.mean(i) - lambda * w.bias(i)).abs());
        }
    }
    Ok(worst)
}
