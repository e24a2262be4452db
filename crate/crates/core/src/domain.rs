//! Shared value types and the math on them: bipolar configurations and their
//! integer encoding, symmetric weight sets, energies, probability vectors over
//! all 2^N configurations, data correlations, and KL divergence.

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`Distribution`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A configuration of N bipolar units, each -1 or +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipolarVector(Vec<i8>);

impl BipolarVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(Error::InvalidBipolar {
                index,
                value: value as i64,
            });
        }
        Ok(Self(values))
    }

    /// Parses a slice of integers, mostly for configs and tests.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(Error::InvalidBipolar { index, value });
        }
        Self::new(values.iter().map(|&v| v as i8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().copied()
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }

    pub fn index(&self) -> usize {
        config_to_index(self)
    }
}

impl std::fmt::Display for BipolarVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for v in &self.0 {
            f.write_str(if *v > 0 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Encodes a configuration as an integer: -1 is bit 0, +1 is bit 1, and the
/// first unit is the most significant bit.
pub fn config_to_index(v: &BipolarVector) -> usize {
    slice_to_index(v.as_slice())
}

pub(crate) fn slice_to_index(values: &[i8]) -> usize {
    values
        .iter()
        .fold(0usize, |acc, &s| (acc << 1) | usize::from(s > 0))
}

/// Inverse of [`config_to_index`] for `n` units.
pub fn index_to_config(k: usize, n: usize) -> BipolarVector {
    assert!(
        n >= 1 && n < usize::BITS as usize,
        "unit count out of range"
    );
    assert!(k < (1usize << n), "index {k} out of range for {n} units");
    BipolarVector(
        (0..n)
            .map(|i| if (k >> (n - 1 - i)) & 1 == 1 { 1 } else { -1 })
            .collect(),
    )
}

/// Symmetric, zero-diagonal couplings plus one bias per unit.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    n: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl WeightSet {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "weight set needs at least one unit");
        Self {
            n,
            weights: vec![0.0; n * n],
            biases: vec![0.0; n],
        }
    }

    /// Builds from the row-major upper triangle (pairs (0,1), (0,2), ...).
    pub fn from_upper(n: usize, upper: &[f64], biases: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        let pairs = n * (n - 1) / 2;
        if upper.len() != pairs {
            return Err(Error::DimensionMismatch {
                expected: pairs,
                actual: upper.len(),
            });
        }
        if biases.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: biases.len(),
            });
        }
        let mut w = Self::zeros(n);
        for ((i, j), &value) in pair_indices(n).zip(upper) {
            w.set(i, j, value);
        }
        w.biases.copy_from_slice(biases);
        Ok(w)
    }

    /// Builds from a full matrix, checking symmetry and the zero diagonal.
    pub fn from_matrix(matrix: &[Vec<f64>], biases: &[f64]) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        for row in matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
        }
        for i in 0..n {
            if matrix[i][i] != 0.0 {
                return Err(Error::param(
                    "weights",
                    format!("diagonal entry ({i},{i}) is not zero"),
                ));
            }
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::param(
                        "weights",
                        format!("entries ({i},{j}) and ({j},{i}) differ"),
                    ));
                }
            }
        }
        let upper: Vec<f64> = pair_indices(n).map(|(i, j)| matrix[i][j]).collect();
        Self::from_upper(n, &upper, biases)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Sets W_ij and W_ji together. Diagonal writes are rejected.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert_ne!(i, j, "self-coupling is not allowed");
        self.weights[i * self.n + j] = value;
        self.weights[j * self.n + i] = value;
    }

    #[inline]
    pub fn bias(&self, i: usize) -> f64 {
        self.biases[i]
    }

    pub fn set_bias(&mut self, i: usize, value: f64) {
        self.biases[i] = value;
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn upper_triangle(&self) -> Vec<f64> {
        pair_indices(self.n).map(|(i, j)| self.get(i, j)).collect()
    }

    /// Every weight and bias multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            weights: self.weights.iter().map(|w| w * factor).collect(),
            biases: self.biases.iter().map(|b| b * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .chain(&self.biases)
            .fold(0.0f64, |acc, w| acc.max(w.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n)
            .all(|i| self.get(i, i) == 0.0 && (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Local field sum_j W_ij m_j + b_i.
    #[inline]
    pub fn local_field(&self, i: usize, m: &[i8]) -> f64 {
        self.row(i)
            .iter()
            .zip(m)
            .map(|(w, &s)| w * f64::from(s))
            .sum::<f64>()
            + self.biases[i]
    }

    pub(crate) fn energy_of(&self, m: &[i8]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n {
            let si = f64::from(m[i]);
            let row = self.row(i);
            for j in (i + 1)..self.n {
                e -= row[j] * si * f64::from(m[j]);
            }
            e -= self.biases[i] * si;
        }
        e
    }
}

/// Unordered pairs (i, j), i < j, in row-major order.
pub fn pair_indices(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

/// E(m) = -sum_{i<j} W_ij m_i m_j - sum_i b_i m_i.
pub fn energy(m: &BipolarVector, w: &WeightSet) -> Result<f64> {
    if m.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            actual: m.len(),
        });
    }
    Ok(w.energy_of(m.as_slice()))
}

/// Probability vector over all 2^N configurations, indexed by
/// [`config_to_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        check_len(n, probs.len())?;
        if let Some(k) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {k} is {} (must be finite and non-negative)",
                probs[k]
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}"
            )));
        }
        Ok(Self { n, probs })
    }

    /// Normalizes non-negative masses.
    pub fn from_masses(n: usize, masses: Vec<f64>) -> Result<Self> {
        check_len(n, masses.len())?;
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidDistribution(
                "masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero".into()));
        }
        Ok(Self {
            n,
            probs: masses.into_iter().map(|m| m / total).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        let size = 1usize << n;
        Self {
            n,
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn point(n: usize, k: usize) -> Self {
        let mut probs = vec![0.0; 1usize << n];
        probs[k] = 1.0;
        Self { n, probs }
    }

    /// Uniform over the listed configurations.
    pub fn uniform_over(n: usize, indices: &[usize]) -> Result<Self> {
        let mut masses = vec![0.0; 1usize << n];
        for &k in indices {
            if k >= masses.len() {
                return Err(Error::InvalidDistribution(format!(
                    "index {k} out of range"
                )));
            }
            masses[k] += 1.0;
        }
        Self::from_masses(n, masses)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k]
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }

    pub fn total_variation(&self, other: &Distribution) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    /// Configuration indices by decreasing probability; ties keep index order.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.probs.len()).collect();
        idx.sort_by(|&a, &b| self.probs[b].total_cmp(&self.probs[a]).then(a.cmp(&b)));
        idx
    }

    pub fn mass_on(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&k| self.probs[k]).sum()
    }

    /// Pair correlations <m_i m_j> and means <m_i> under this distribution.
    pub fn correlations(&self) -> Correlations {
        let n = self.n;
        let mut c = Correlations::zeros(n);
        let mut spins = vec![0i8; n];
        for (k, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            fill_spins(k, &mut spins);
            c.accumulate(&spins, p);
        }
        c.finish_diagonal();
        c
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n == 0 || n >= usize::BITS as usize || len != 1usize << n {
        return Err(Error::InvalidDistribution(format!(
            "length {len} does not match 2^{n} configurations"
        )));
    }
    Ok(())
}

pub(crate) fn fill_spins(k: usize, spins: &mut [i8]) {
    let n = spins.len();
    for (i, s) in spins.iter_mut().enumerate() {
        *s = if (k >> (n - 1 - i)) & 1 == 1 { 1 } else { -1 };
    }
}

/// Second and first moments of a set of configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlations {
    n: usize,
    pair: Vec<f64>,
    mean: Vec<f64>,
}

impl Correlations {
    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            n,
            pair: vec![0.0; n * n],
            mean: vec![0.0; n],
        }
    }

    pub(crate) fn accumulate(&mut self, spins: &[i8], weight: f64) {
        let n = self.n;
        for i in 0..n {
            let si = f64::from(spins[i]);
            self.mean[i] += weight * si;
            for j in (i + 1)..n {
                let v = weight * si * f64::from(spins[j]);
                self.pair[i * n + j] += v;
                self.pair[j * n + i] += v;
            }
        }
    }

    pub(crate) fn finish_diagonal(&mut self) {
        for i in 0..self.n {
            self.pair[i * self.n + i] = 1.0;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.pair[i * self.n + j]
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }
}

/// A list of equally long training patterns with frequency weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    vectors: Vec<BipolarVector>,
    frequencies: Vec<f64>,
}

impl TrainingSet {
    /// Uniform frequencies.
    pub fn new(vectors: Vec<BipolarVector>) -> Result<Self> {
        let count = vectors.len();
        Self::with_frequencies(vectors, vec![1.0 / count.max(1) as f64; count])
    }

    pub fn with_frequencies(vectors: Vec<BipolarVector>, frequencies: Vec<f64>) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyVector)?;
        let n = first.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
        if frequencies.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                actual: frequencies.len(),
            });
        }
        if frequencies.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::param(
                "frequencies",
                "must be finite and non-negative",
            ));
        }
        let total: f64 = frequencies.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(
                "frequencies",
                format!("sum to {total}, expected 1"),
            ));
        }
        Ok(Self {
            vectors,
            frequencies,
        })
    }

    pub fn n(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[BipolarVector] {
        &self.vectors
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Data distribution: each pattern's frequency placed on its configuration.
    pub fn ideal_distribution(&self) -> Distribution {
        let n = self.n();
        let mut masses = vec![0.0; 1usize << n];
        for (v, f) in self.vectors.iter().zip(&self.frequencies) {
            masses[v.index()] += f;
        }
        Distribution::from_masses(n, masses).expect("training frequencies are normalized")
    }
}

/// Frequency-weighted <v_i v_j> (unit diagonal) and <v_i> over a training set.
pub fn average_correlations(ts: &TrainingSet) -> Correlations {
    let mut c = Correlations::zeros(ts.n());
    for (v, &f) in ts.vectors.iter().zip(&ts.frequencies) {
        c.accumulate(v.as_slice(), f);
    }
    c.finish_diagonal();
    c
}

/// KL(ideal || empirical) in nats.
///
/// `smoothing` is an additive probability mass put on every configuration of
/// the empirical distribution before renormalizing. Configurations with no
/// ideal mass contribute nothing. With zero smoothing, a configuration that
/// has ideal mass but no empirical mass yields [`Error::InfiniteDivergence`].
pub fn kl_divergence(
    ideal: &Distribution,
    empirical: &Distribution,
    smoothing: f64,
) -> Result<f64> {
    if ideal.n != empirical.n {
        return Err(Error::DimensionMismatch {
            expected: ideal.n,
            actual: empirical.n,
        });
    }
    if !smoothing.is_finite() || smoothing < 0.0 {
        return Err(Error::param("smoothing", "must be finite and non-negative"));
    }
    let norm = 1.0 + smoothing * ideal.probs.len() as f64;
    let mut kl = 0.0;
    for (k, (&p, &q)) in ideal.probs.iter().zip(&empirical.probs).enumerate() {
        if p == 0.0 {
            continue;
        }
        let q = (q + smoothing) / norm;
        if q == 0.0 {
            return Err(Error::InfiniteDivergence { index: k });
        }
        kl += p * (p / q).ln();
    }
    Ok(kl.max(0.0))
}

/// Additive probability smoothing equivalent to `pseudocount` extra
/// observations per configuration in a histogram of `samples` observations.
/// A pseudocount of 0.5 is the Jeffreys prior.
pub fn pseudocount_smoothing(pseudocount: f64, samples: f64) -> f64 {
    if samples > 0.0 {
        pseudocount / samples
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(values: &[i64]) -> BipolarVector {
        BipolarVector::from_ints(values).unwrap()
    }

    #[test]
    fn encoding_matches_truth_table_rows() {
        assert_eq!(config_to_index(&bv(&[-1, -1, 1, 1, -1])), 6);
        assert_eq!(config_to_index(&bv(&[-1, -1, -1, -1, -1])), 0);
        assert_eq!(config_to_index(&bv(&[1, 1, 1, 1, 1])), 31);
    }

    #[test]
    fn rejects_non_bipolar_entries() {
        assert!(matches!(
            BipolarVector::from_ints(&[1, 0, -1]),
            Err(Error::InvalidBipolar { index: 1, value: 0 })
        ));
        assert!(matches!(
            BipolarVector::new(vec![]),
            Err(Error::EmptyVector)
        ));
    }

    #[test]
    fn energy_examples() {
        let zero = WeightSet::zeros(3);
        assert_eq!(energy(&bv(&[1, -1, 1]), &zero).unwrap(), 0.0);

        let mut w = WeightSet::zeros(2);
        w.set(0, 1, 1.0);
        assert_eq!(energy(&bv(&[1, 1]), &w).unwrap(), -1.0);
        w.set_bias(0, 0.5);
        assert!((energy(&bv(&[-1, 1]), &w).unwrap() - 1.5).abs() < 1e-15);

        assert!(matches!(
            energy(&bv(&[1, 1, 1]), &w),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 3
            })
        ));
    }

    #[test]
    fn weight_set_from_matrix_validates() {
        let ok = vec![vec![0.0, 0.3], vec![0.3, 0.0]];
        assert_eq!(
            WeightSet::from_matrix(&ok, &[0.0, 0.0]).unwrap().get(1, 0),
            0.3
        );
        let asym = vec![vec![0.0, 0.3], vec![0.2, 0.0]];
        assert!(WeightSet::from_matrix(&asym, &[0.0, 0.0]).is_err());
        let diag = vec![vec![1.0, 0.3], vec![0.3, 0.0]];
        assert!(WeightSet::from_matrix(&diag, &[0.0, 0.0]).is_err());
    }

    fn full_adder_rows() -> TrainingSet {
        let rows = [
            [-1, -1, -1, -1, -1],
            [-1, -1, 1, 1, -1],
            [-1, 1, -1, 1, -1],
            [-1, 1, 1, -1, 1],
            [1, -1, -1, 1, -1],
            [1, -1, 1, -1, 1],
            [1, 1, -1, -1, 1],
            [1, 1, 1, 1, 1],
        ];
        TrainingSet::new(rows.iter().map(|r| bv(r)).collect()).unwrap()
    }

    #[test]
    fn full_adder_correlations() {
        let c = average_correlations(&full_adder_rows());
        assert!((c.pair(0, 4) - 0.5).abs() < 1e-15);
        assert_eq!(c.pair(0, 0), 1.0);
    }

    #[test]
    fn single_vector_correlations_are_exact_products() {
        let v = bv(&[1, -1, -1, 1]);
        let c = average_correlations(&TrainingSet::new(vec![v.clone()]).unwrap());
        for i in 0..4 {
            assert_eq!(c.mean(i), f64::from(v.get(i)));
            for j in 0..4 {
                assert_eq!(c.pair(i, j), f64::from(v.get(i) * v.get(j)));
            }
        }
    }

    #[test]
    fn kl_examples() {
        let fa = full_adder_rows().ideal_distribution();
        assert_eq!(kl_divergence(&fa, &fa, 0.0).unwrap(), 0.0);

        let kl = kl_divergence(&fa, &Distribution::uniform(5), 0.0).unwrap();
        let oracle: f64 = (0..8).map(|_| 0.125 * (0.125f64 / 0.03125).ln()).sum();
        assert!((kl - oracle).abs() < 1e-12);
        assert!((kl - 4f64.ln()).abs() < 1e-12);

        let mut masses = fa.probs().to_vec();
        masses[6] = 0.0;
        let missing = Distribution::from_masses(5, masses).unwrap();
        assert!(matches!(
            kl_divergence(&fa, &missing, 0.0),
            Err(Error::InfiniteDivergence { index: 6 })
        ));
        assert!(kl_divergence(&fa, &missing, 1e-3).unwrap().is_finite());
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(1, vec![0.5, 0.5]).is_ok());
        assert!(Distribution::new(1, vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(1, vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(2, vec![0.5, 0.5]).is_err());
        assert!((full_adder_rows().ideal_distribution().entropy() - 8f64.ln()).abs() < 1e-12);
    }

    fn arb_dist(n: usize) -> impl Strategy<Value = Distribution> {
        prop::collection::vec(0.0f64..1.0, 1 << n)
            .prop_filter("non-zero mass", |m| m.iter().sum::<f64>() > 1e-6)
            .prop_map(move |m| Distribution::from_masses(n, m).unwrap())
    }

    proptest! {
        #[test]
        fn index_round_trip(n in 1usize..=10, seed in any::<u64>()) {
            let k = (seed as usize) % (1 << n);
            prop_assert_eq!(config_to_index(&index_to_config(k, n)), k);
        }

        #[test]
        fn energy_flip_symmetry_without_biases(
            upper in prop::collection::vec(-2.0f64..2.0, 10),
            k in 0usize..32,
        ) {
            let w = WeightSet::from_upper(5, &upper, &[0.0; 5]).unwrap();
            let m = index_to_config(k, 5);
            let a = energy(&m, &w).unwrap();
            let b = energy(&m.flipped(), &w).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn kl_is_non_negative(p in arb_dist(3), q in arb_dist(3), s in 0.0f64..0.1) {
            let kl = kl_divergence(&p, &q, s.max(1e-9)).unwrap();
            prop_assert!(kl >= 0.0);
            prop_assert!(kl_divergence(&p, &p, 0.0).unwrap() < 1e-12);
        }

        #[test]
        fn correlation_matrix_shape(
            rows in prop::collection::vec(prop::collection::vec(prop::bool::ANY, 4), 1..12)
        ) {
            let vectors = rows
                .iter()
                .map(|r| BipolarVector::new(r.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap())
                .collect();
            let c = average_correlations(&TrainingSet::new(vectors).unwrap());
            for i in 0..4 {
                prop_assert_eq!(c.pair(i, i), 1.0);
                for j in 0..4 {
                    prop_assert_eq!(c.pair(i, j), c.pair(j, i));
                    prop_assert!(c.pair(i, j).abs() <= 1.0 + 1e-12);
                }
            }
        }
    }
}
