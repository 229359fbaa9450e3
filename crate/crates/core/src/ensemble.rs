//! Periodic random band matrices: support pattern, variance profile, entry
//! laws and diagonal perturbations.

use std::fmt;
use std::str::FromStr;

use num_traits::Num;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::rng::{Domain, StreamKey};
use crate::scalar::Real;

/// Entry law. Each is centred with variance exactly `s_ij` and a subgaussian tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryDistribution {
    /// `N(0, s)`.
    Gaussian,
    /// `±√s` with equal probability.
    Rademacher,
    /// Uniform on `[-√(3s), √(3s)]`.
    Uniform,
}

impl EntryDistribution {
    /// One draw with variance `s`.
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R, s: f64) -> f64 {
        match self {
            Self::Gaussian => rng.sample::<f64, _>(StandardNormal) * s.sqrt(),
            Self::Rademacher => {
                if rng.random::<bool>() {
                    s.sqrt()
                } else {
                    -s.sqrt()
                }
            }
            Self::Uniform => (2.0 * rng.random::<f64>() - 1.0) * (3.0 * s).sqrt(),
        }
    }
}

impl FromStr for EntryDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform" => Ok(Self::Uniform),
            other => Err(invalid(format!("unknown entry distribution `{other}` (expected gaussian | rademacher | uniform)"))),
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::Uniform => "uniform",
        })
    }
}

/// Parameters of the band ensemble, `N = 2 p W`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandEnsembleSpec {
    pub n: usize,
    pub w: usize,
    pub p: usize,
    pub dist: EntryDistribution,
    pub seed: u64,
}

impl BandEnsembleSpec {
    /// Builds a spec with `N = 2 p W` and validates it.
    pub fn new(w: usize, p: usize, dist: EntryDistribution, seed: u64) -> Result<Self> {
        let spec = Self { n: 2 * p * w, w, p, dist, seed };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks `N = 2pW`, `p, W ≥ 1` and that the `4W − 1` band fits inside `N`.
    pub fn validate(&self) -> Result<()> {
        if self.w < 1 {
            return Err(invalid("band parameter W must be at least 1"));
        }
        if self.p < 1 {
            return Err(invalid("p must be at least 1"));
        }
        if self.n != 2 * self.p * self.w {
            return Err(invalid(format!("N = {} must equal 2pW = {}", self.n, 2 * self.p * self.w)));
        }
        if self.bandwidth() >= self.n {
            return Err(invalid(format!(
                "band width 4W-1 = {} does not fit in N = {} (need p >= 2)",
                self.bandwidth(),
                self.n
            )));
        }
        Ok(())
    }

    /// Number of nonzero entries per row, `4W − 1`.
    pub fn bandwidth(&self) -> usize {
        4 * self.w - 1
    }

    /// Largest periodic distance inside the band, `2W − 1`.
    pub fn max_distance(&self) -> usize {
        2 * self.w - 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        cyclic_distance(i, j, self.n) <= self.max_distance()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn with_dist(&self, dist: EntryDistribution) -> Self {
        Self { dist, ..self.clone() }
    }

    pub fn profile<T: Num + Clone>(&self) -> Result<VarianceProfile<T>> {
        variance_profile(self)
    }
}

/// Periodic distance between 0-based indices.
#[inline]
pub fn cyclic_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Periodic distance `min(|i−j|, N−|i−j|)` between 1-based indices.
pub fn band_distance(i: usize, j: usize, n: usize) -> Result<usize> {
    if i < 1 || j < 1 || i > n || j > n {
        return Err(invalid(format!("indices ({i}, {j}) out of range 1..={n}")));
    }
    Ok(cyclic_distance(i - 1, j - 1, n))
}

/// Entry variances `s_ij`, generic over any numeric field so the row
/// normalisation can be checked in exact rational arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceProfile<T> {
    matrix: Matrix<T>,
    support: Vec<Vec<usize>>,
}

/// The identical-variance band profile `s_ij = 1/(4W−1)` on `dist ≤ 2W−1`.
pub fn variance_profile<T: Num + Clone>(spec: &BandEnsembleSpec) -> Result<VarianceProfile<T>> {
    spec.validate()?;
    let mut width = T::zero();
    for _ in 0..spec.bandwidth() {
        width = width + T::one();
    }
    let value = T::one() / width;
    let n = spec.n;
    let matrix = Matrix::from_fn(n, n, |i, j| if spec.in_band(i, j) { value.clone() } else { T::zero() });
    Ok(VarianceProfile::from_matrix_unchecked(matrix))
}

impl<T: Num + Clone> VarianceProfile<T> {
    fn from_matrix_unchecked(matrix: Matrix<T>) -> Self {
        let n = matrix.rows();
        let support = (0..n).map(|i| (0..n).filter(|&j| !matrix[(i, j)].is_zero()).collect()).collect();
        Self { matrix, support }
    }

    /// Accepts a general (non-identical) profile: square and symmetric.
    /// Nonnegativity is checked by the caller-facing [`VarianceProfile::from_real_matrix`].
    pub fn from_matrix(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), actual: matrix.cols() });
        }
        let n = matrix.rows();
        for i in 0..n {
            for j in 0..i {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(invalid(format!("variance profile not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn s(&self, i: usize, j: usize) -> T {
        self.matrix[(i, j)].clone()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    /// Column indices with `s_ij ≠ 0`.
    pub fn support(&self, i: usize) -> &[usize] {
        &self.support[i]
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.support[i].iter().fold(T::zero(), |acc, &j| acc + self.matrix[(i, j)].clone())
    }
}

impl<T: Real> VarianceProfile<T> {
    pub fn from_real_matrix(matrix: Matrix<T>) -> Result<Self> {
        if matrix.as_slice().iter().any(|&x| x < T::zero() || !x.is_finite()) {
            return Err(invalid("variance profile must be finite and nonnegative"));
        }
        Self::from_matrix(matrix)
    }

    /// `(S x)_i = Σ_j s_ij x_j` over the support.
    pub fn apply<V>(&self, x: &[V]) -> Vec<V>
    where
        V: Copy + std::ops::Add<Output = V> + std::ops::Mul<T, Output = V> + num_traits::Zero,
    {
        (0..self.dim())
            .map(|i| self.support[i].iter().fold(V::zero(), |acc, &j| acc + x[j] * self.matrix[(i, j)]))
            .collect()
    }

    pub fn min_positive(&self) -> T {
        self.matrix.as_slice().iter().copied().filter(|&x| x > T::zero()).fold(T::infinity(), T::min)
    }
}

/// Diagonal perturbation vector `g`; `H^g = H − diag(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalShift<T> {
    g: Vec<T>,
}

impl<T: Real> DiagonalShift<T> {
    pub fn new(g: Vec<T>) -> Result<Self> {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(invalid("diagonal shift entries must be finite"));
        }
        Ok(Self { g })
    }

    pub fn zero(n: usize) -> Self {
        Self { g: vec![T::zero(); n] }
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self { g: vec![c; n] }
    }

    /// `g_i = g · 1_{i ≥ W}` (0-based): shifts only the lower-right block.
    pub fn lower_block(n: usize, w: usize, g: T) -> Self {
        Self { g: (0..n).map(|i| if i >= w { g } else { T::zero() }).collect() }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn norm_inf(&self) -> T {
        self.g.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

/// Samples `H` for sample index 0.
pub fn sample_band_matrix<T: Real>(spec: &BandEnsembleSpec) -> Result<Matrix<T>> {
    sample_band_matrix_indexed(spec, 0)
}

/// Samples the `sample`-th independent band matrix of the ensemble. Entry
/// `(i, j)` depends only on `(seed, sample, i, j)`.
pub fn sample_band_matrix_indexed<T: Real>(spec: &BandEnsembleSpec, sample: u64) -> Result<Matrix<T>> {
    spec.validate()?;
    let n = spec.n;
    let s = 1.0 / spec.bandwidth() as f64;
    let key = StreamKey::new(spec.seed);
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if !spec.in_band(i, j) {
                continue;
            }
            let mut rng = key.stream(Domain::BandEntry, sample, i, j);
            let x = T::lit(spec.dist.draw(&mut rng, s));
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    Ok(h)
}

/// `H − diag(g)`.
pub fn apply_diagonal_shift<T: Real>(h: &Matrix<T>, g: &DiagonalShift<T>) -> Result<Matrix<T>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), actual: h.cols() });
    }
    if g.len() != h.rows() {
        return Err(Error::DimensionMismatch { expected: h.rows(), actual: g.len() });
    }
    let mut out = h.clone();
    for (i, &gi) in g.as_slice().iter().enumerate() {
        out[(i, i)] -= gi;
    }
    Ok(out)
}

/// True when `h` vanishes exactly off the profile's support.
pub fn respects_support<T: Real, S: Num + Clone>(h: &Matrix<T>, profile: &VarianceProfile<S>) -> bool {
    let n = profile.dim();
    h.rows() == n
        && (0..n).all(|i| (0..n).all(|j| !profile.s(i, j).is_zero() || h[(i, j)] == T::zero()))
}
