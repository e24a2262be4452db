//! Canned studies: learning the full-adder truth table, learning ten 5x3
//! digit glyphs and completing them from partial clamps, and a parallel
//! parameter sweep driver.

use rayon::prelude::*;

use crate::domain::{BipolarVector, Distribution, TrainingSet, WeightSet};
use crate::dynamics::{run_free, ClampSpec, NeuronTiming, UpdateLaw};
use crate::error::{Error, Result};
use crate::learning::{train, CircuitParams, FeedSchedule, TrainOptions, TrainOutcome, Variation};
use crate::oracle::AnnealFactor;

/// Full-adder truth table rows (A, B, C_in, S, C_out) in bipolar form.
pub const FULL_ADDER_ROWS: [[i8; 5]; 8] = [
    [-1, -1, -1, -1, -1],
    [-1, -1, 1, 1, -1],
    [-1, 1, -1, 1, -1],
    [-1, 1, 1, -1, 1],
    [1, -1, -1, 1, -1],
    [1, -1, 1, -1, 1],
    [1, 1, -1, -1, 1],
    [1, 1, 1, 1, 1],
];

/// Configuration indices of the full-adder rows.
pub const FULL_ADDER_STATES: [usize; 8] = [0, 6, 10, 13, 18, 21, 25, 31];

pub fn full_adder_set() -> TrainingSet {
    let vectors = FULL_ADDER_ROWS
        .iter()
        .map(|row| BipolarVector::new(row.to_vec()).expect("truth table is bipolar"))
        .collect();
    TrainingSet::new(vectors).expect("non-empty truth table")
}

pub const DIGIT_ROWS: usize = 5;
pub const DIGIT_COLS: usize = 3;
pub const DIGIT_PIXELS: usize = DIGIT_ROWS * DIGIT_COLS;

/// Seven-segment style 5x3 glyphs, row-major, '#' on and '.' off.
pub const DIGIT_GLYPHS: [&str; 10] = [
    "###\
     #.#\
     #.#\
     #.#\
     ###",
    "..#\
     ..#\
     ..#\
     ..#\
     ..#",
    "###\
     ..#\
     ###\
     #..\
     ###",
    "###\
     ..#\
     ###\
     ..#\
     ###",
    "#.#\
     #.#\
     ###\
     ..#\
     ..#",
    "###\
     #..\
     ###\
     ..#\
     ###",
    "###\
     #..\
     ###\
     #.#\
     ###",
    "###\
     ..#\
     ..#\
     ..#\
     ..#",
    "###\
     #.#\
     ###\
     #.#\
     ###",
    "###\
     #.#\
     ###\
     ..#\
     ###",
];

/// Six clamped pixels per digit. Each set maximizes, over all 6-subsets, the
/// smallest number of clamped pixels on which any other glyph disagrees,
/// then the total disagreement, with ties going to the lexicographically
/// first subset.
pub const DIGIT_CLAMP_PIXELS: [[usize; 6]; 10] = [
    [1, 3, 7, 9, 12, 13],
    [0, 1, 6, 7, 12, 13],
    [3, 7, 9, 11, 12, 13],
    [1, 3, 7, 9, 12, 13],
    [1, 3, 6, 7, 12, 13],
    [3, 5, 7, 9, 12, 13],
    [3, 5, 7, 9, 12, 13],
    [0, 1, 6, 7, 12, 13],
    [3, 5, 7, 9, 12, 13],
    [3, 5, 7, 9, 12, 13],
];

/// The 10 digit images and the clamp pattern used to recall each.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitSet {
    pub images: Vec<BipolarVector>,
    pub clamp_patterns: Vec<ClampSpec>,
}

impl DigitSet {
    pub fn canonical() -> Self {
        let images: Vec<BipolarVector> = DIGIT_GLYPHS
            .iter()
            .map(|g| {
                let values = g
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| if c == '#' { 1 } else { -1 })
                    .collect();
                BipolarVector::new(values).expect("glyph pixels are bipolar")
            })
            .collect();
        let clamp_patterns = images
            .iter()
            .zip(DIGIT_CLAMP_PIXELS.iter())
            .map(|(img, pixels)| {
                ClampSpec::new(pixels.iter().map(|&p| (p, img.get(p))))
                    .expect("distinct clamp pixels")
            })
            .collect();
        Self {
            images,
            clamp_patterns,
        }
    }

    pub fn training_set(&self) -> TrainingSet {
        TrainingSet::new(self.images.clone()).expect("ten images")
    }

    pub fn ideal_distribution(&self) -> Distribution {
        self.training_set().ideal_distribution()
    }

    pub fn image_index(&self, digit: usize) -> usize {
        self.images[digit].index()
    }

    /// True when no image other than the clamp's own digit agrees with it on
    /// every clamped pixel.
    pub fn clamps_are_discriminating(&self) -> bool {
        self.clamp_patterns.iter().enumerate().all(|(d, clamp)| {
            self.images
                .iter()
                .enumerate()
                .filter(|(other, _)| *other != d)
                .all(|(_, img)| clamp.iter().any(|(p, v)| img.get(p) != v))
        })
    }
}

/// Renders a 15-unit state as a 5x3 block of '#' and '.'.
pub fn render_digit(image: &[i8]) -> String {
    image
        .chunks(DIGIT_COLS)
        .map(|row| {
            row.iter()
                .map(|&v| if v > 0 { '#' } else { '.' })
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// A training study: what is fed, on which circuit, for how long.
#[derive(Debug, Clone)]
pub struct Study {
    pub name: &'static str,
    pub schedule: FeedSchedule,
    pub params: CircuitParams,
    pub options: TrainOptions,
}

impl Study {
    /// N = 5, 10 weights and no biases, averaged feed, 5500 ns.
    pub fn full_adder() -> Self {
        Self {
            name: "full_adder",
            schedule: FeedSchedule::averaged(full_adder_set()),
            params: CircuitParams::default(),
            options: TrainOptions {
                duration_ns: 5500.0,
                learn_biases: false,
                ..TrainOptions::default()
            },
        }
    }

    /// N = 15, 105 weights and 15 biases, averaged feed, 3000 ns.
    pub fn digits() -> Self {
        Self {
            name: "digits",
            schedule: FeedSchedule::averaged(DigitSet::canonical().training_set()),
            params: CircuitParams::default(),
            options: TrainOptions {
                duration_ns: 3000.0,
                learn_biases: true,
                ..TrainOptions::default()
            },
        }
    }

    pub fn n(&self) -> usize {
        self.schedule.training().n()
    }

    pub fn run(&self, seed: u64) -> Result<StudyRun> {
        let outcome = train(
            &WeightSet::zeros(self.n()),
            &self.schedule,
            &self.params,
            &self.options,
            seed,
        )?;
        let final_kl = outcome
            .trajectory
            .final_kl()
            .ok_or_else(|| Error::param("duration_ns", "run is shorter than one KL window"))?;
        Ok(StudyRun { outcome, final_kl })
    }
}

#[derive(Debug, Clone)]
pub struct StudyRun {
    pub outcome: TrainOutcome,
    /// KL over the last monitoring window.
    pub final_kl: f64,
}

pub fn run_full_adder(seed: u64) -> Result<StudyRun> {
    Study::full_adder().run(seed)
}

pub fn run_digits(seed: u64) -> Result<StudyRun> {
    Study::digits().run(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRow {
    pub digit: usize,
    /// Highest-occupancy configuration of all 15 pixels.
    pub majority: BipolarVector,
    /// The majority configuration restricted to the unclamped pixels.
    pub free_pixels: Vec<i8>,
    pub matched: bool,
    /// Fraction of the run spent in the trained image.
    pub correct_occupancy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompletionReport {
    pub rows: Vec<CompletionRow>,
}

impl CompletionReport {
    pub fn matches(&self) -> usize {
        self.rows.iter().filter(|r| r.matched).count()
    }
}

/// Inference timing used for completion runs.
pub fn inference_timing() -> NeuronTiming {
    NeuronTiming {
        tau_n_ns: CircuitParams::default().tau_n_ns,
        law: UpdateLaw::Exponential,
    }
}

/// Clamps `clamp`, runs the network and decodes the majority configuration.
pub fn complete_digit(
    w: &WeightSet,
    digits: &DigitSet,
    digit: usize,
    clamp: &ClampSpec,
    i0: AnnealFactor,
    duration_ns: f64,
    seed: u64,
) -> Result<CompletionRow> {
    if w.n() != DIGIT_PIXELS {
        return Err(Error::DimensionMismatch {
            expected: DIGIT_PIXELS,
            actual: w.n(),
        });
    }
    let trace = run_free(w, clamp, i0, duration_ns, inference_timing(), seed)?;
    let hist = trace.histogram(0.0, duration_ns)?;
    let best = hist.ranked()[0];
    let majority = crate::domain::index_to_config(best, DIGIT_PIXELS);
    let free_pixels = (0..DIGIT_PIXELS)
        .filter(|&p| clamp.get(p).is_none())
        .map(|p| majority.get(p))
        .collect();
    let target = digits.image_index(digit);
    Ok(CompletionRow {
        digit,
        matched: best == target,
        correct_occupancy: hist.prob(target),
        majority,
        free_pixels,
    })
}

/// One completion run per digit with its own clamp pattern and RNG stream.
pub fn run_completion(
    w: &WeightSet,
    digits: &DigitSet,
    i0: AnnealFactor,
    duration_ns: f64,
    seed: u64,
) -> Result<CompletionReport> {
    let rows = (0..digits.images.len())
        .into_par_iter()
        .map(|d| {
            let run_seed = seed.wrapping_mul(1000).wrapping_add(d as u64);
            complete_digit(
                w,
                digits,
                d,
                &digits.clamp_patterns[d],
                i0,
                duration_ns,
                run_seed,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CompletionReport { rows })
}

/// One grid point result; failures are kept per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<P, M> {
    pub point: P,
    pub seed: u64,
    pub result: std::result::Result<M, String>,
}

/// Runs every grid point for every seed in parallel; rows come back in
/// grid-major, seed-minor order.
pub fn sweep<P, M, F>(grid: &[P], seeds: &[u64], runner: F) -> Result<Vec<SweepRow<P, M>>>
where
    P: Clone + Send + Sync,
    M: Send,
    F: Fn(&P, u64) -> Result<M> + Sync,
{
    if grid.is_empty() {
        return Err(Error::param("grid", "sweep grid is empty"));
    }
    if seeds.is_empty() {
        return Err(Error::param("seeds", "no seeds given"));
    }
    let jobs: Vec<(&P, u64)> = grid
        .iter()
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(p, seed)| SweepRow {
            point: p.clone(),
            seed,
            result: runner(p, seed).map_err(|e| e.to_string()),
        })
        .collect())
}

/// Grid point for full-adder robustness and timescale studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub tau_n_ns: f64,
    pub variation: Variation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepMetrics {
    pub final_kl: f64,
    /// Final-window occupancy of the training configurations.
    pub target_mass: f64,
}

/// Runs `study` with the point's tau_N and variation applied.
pub fn run_sweep_point(study: &Study, point: &SweepPoint, seed: u64) -> Result<SweepMetrics> {
    let mut s = study.clone();
    s.params.tau_n_ns = point.tau_n_ns;
    s.options.variation = point.variation;
    let run = s.run(seed)?;
    let ideal = s
        .options
        .ideal
        .clone()
        .unwrap_or_else(|| s.schedule.training().ideal_distribution());
    let targets: Vec<usize> = (0..ideal.probs().len())
        .filter(|&k| ideal.prob(k) > 0.0)
        .collect();
    let target_mass = run
        .outcome
        .trace
        .final_window_histogram()?
        .mass_on(&targets);
    Ok(SweepMetrics {
        final_kl: run.final_kl,
        target_mass,
    })
}
