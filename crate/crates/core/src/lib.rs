//! Behavioral simulator for clockless, autonomous probabilistic learning
//! circuits.
//!
//! A network of binary stochastic neurons (p-bits) samples a fully visible
//! Boltzmann machine without any clock: each neuron refreshes on its own
//! timescale and the synapse recomputes its inputs instantly. Weights live
//! on RC cells whose capacitor voltages relax towards the difference between
//! data correlations and sampled model correlations, so learning happens in
//! continuous time alongside sampling.
//!
//! Modules, bottom-up:
//!
//! - [`domain`]: bipolar states, weights, distributions, correlations, KL.
//! - [`oracle`]: exact enumeration and discrete-time reference learners.
//! - [`dynamics`]: event-driven asynchronous network simulation.
//! - [`learning`]: circuit mapping, feeding schedules and the coupled trainer.
//! - [`experiments`]: full adder and 5x3 digit studies, sweep driver.
//! - [`interface`]: run configs, weight snapshots, CSV export, commands.

pub mod domain;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod interface;
pub mod learning;
pub mod oracle;
pub mod rng;

pub use domain::{
    average_correlations, config_to_index, energy, index_to_config, kl_divergence, BipolarVector,
    Correlations, Distribution, TrainingSet, WeightSet,
};
pub use dynamics::{run_free, ClampSpec, NeuronTiming, SimTrace, UpdateLaw};
pub use error::{Error, Result};
pub use learning::{map_circuit, train, CircuitMapping, CircuitParams, FeedMode, FeedSchedule};
pub use oracle::{boltzmann_exact, AnnealFactor};
