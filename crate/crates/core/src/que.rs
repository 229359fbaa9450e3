//! Eigenvector flatness (QUE) statistics and uncertainty-principle checks.

use serde::{Deserialize, Serialize};

use crate::ensemble::{sample_band_matrix_indexed, BandEnsembleSpec, EntryDistribution};
use crate::error::{invalid, precondition, Error, Result};
use crate::linalg::Matrix;
use crate::reduction::Reducer;
use crate::report::{DiagnosticsReport, SampleRecord};
use crate::scalar::Real;
use crate::spectral::{eigh, eigvalsh};
use crate::stats::{bulk_window, mean, wilson_interval};

/// `Σ_{i<d} a_i (|ψ_i|² − 1/N)` with `d = a.len()`.
pub fn que_statistic<T: Real>(psi: &[T], a: &[f64], n: usize) -> Result<f64> {
    if psi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: psi.len() });
    }
    if a.len() > n {
        return Err(Error::DimensionMismatch { expected: n, actual: a.len() });
    }
    if a.iter().any(|x| !(x.abs() <= 1.0)) {
        return Err(invalid("test vector entries must lie in [-1, 1]"));
    }
    let norm: f64 = psi.iter().map(|x| x.as_f64().powi(2)).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("vector is not normalised (|psi|^2 = {norm})")));
    }
    let inv_n = 1.0 / n as f64;
    Ok(a.iter().zip(psi).map(|(&ai, &p)| ai * (p.as_f64().powi(2) - inv_n)).sum())
}

/// Masses of consecutive blocks of length `window`.
pub fn block_mass_profile<T: Real>(psi: &[T], window: usize) -> Result<Vec<f64>> {
    let n = psi.len();
    if window == 0 || n % window != 0 {
        return Err(invalid(format!("block length {window} does not divide N = {n}")));
    }
    Ok(psi.chunks(window).map(|c| c.iter().map(|x| x.as_f64().powi(2)).sum()).collect())
}

/// `max_ℓ |mass_ℓ − window/N|`.
pub fn block_flatness(masses: &[f64], window: usize, n: usize) -> f64 {
    let target = window as f64 / n as f64;
    masses.iter().map(|m| (m - target).abs()).fold(0.0, f64::max)
}

/// Test vectors used by the ensemble test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestVector {
    Zero,
    Constant,
    /// `+1` on even half-blocks of length `W/2`, `−1` on odd ones.
    AlternatingHalfBlocks,
}

impl TestVector {
    pub fn build(self, n: usize, w: usize) -> Vec<f64> {
        match self {
            Self::Zero => vec![0.0; n],
            Self::Constant => vec![1.0; n],
            Self::AlternatingHalfBlocks => {
                let half = (w / 2).max(1);
                (0..n).map(|i| if (i / half) % 2 == 0 { 1.0 } else { -1.0 }).collect()
            }
        }
    }
}

/// QUE ladder parameters: one level per `W`, `N = 2pW`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueConfig {
    pub ws: Vec<usize>,
    pub p: usize,
    pub dist: EntryDistribution,
    pub seed: u64,
    pub n_samples: usize,
    pub kappa: f64,
    pub deltas: Vec<f64>,
    pub test_vector: TestVector,
    /// Bulk eigenvectors examined per sample (evenly spaced in the bulk window).
    pub vectors_per_sample: usize,
    /// Require strictly decreasing mean statistic and flatness along the ladder.
    pub require_decay: bool,
}

impl Default for QueConfig {
    fn default() -> Self {
        Self {
            ws: vec![32, 64, 128],
            p: 2,
            dist: EntryDistribution::Gaussian,
            seed: 1,
            n_samples: 100,
            kappa: 0.1,
            deltas: vec![0.3, 0.1, 0.03],
            test_vector: TestVector::AlternatingHalfBlocks,
            vectors_per_sample: 8,
            require_decay: true,
        }
    }
}

/// Evenly spaced picks from a range.
pub fn spread(range: std::ops::Range<usize>, count: usize) -> Vec<usize> {
    let len = range.len();
    if count == 0 || len == 0 {
        return Vec::new();
    }
    let count = count.min(len);
    (0..count).map(|i| range.start + (2 * i + 1) * len / (2 * count)).collect()
}

/// Empirical `P(|que_statistic| ≥ δ)` per ladder level with Wilson 95% intervals,
/// mean `|que_statistic|` and mean block-mass flatness (blocks of `W/2`).
pub fn que_ensemble_test(cfg: &QueConfig) -> Result<DiagnosticsReport> {
    if cfg.n_samples == 0 {
        return Err(invalid("n_samples must be positive"));
    }
    if cfg.ws.is_empty() || cfg.vectors_per_sample == 0 {
        return Err(invalid("empty ladder or eigenvector range"));
    }
    let mut rep = DiagnosticsReport::new("que")
        .param("ws", cfg.ws.clone())
        .param("p", cfg.p)
        .param("dist", cfg.dist.to_string())
        .param("seed", cfg.seed)
        .param("n_samples", cfg.n_samples)
        .param("kappa", cfg.kappa)
        .param("deltas", cfg.deltas.clone())
        .param("test_vector", serde_json::to_value(cfg.test_vector)?);
    let mut means = Vec::new();
    let mut flats = Vec::new();
    for &w in &cfg.ws {
        let spec = BandEnsembleSpec::new(w, cfg.p, cfg.dist, cfg.seed)?;
        let n = spec.n;
        let ks = spread(bulk_window(n, cfg.kappa)?, cfg.vectors_per_sample);
        let a = cfg.test_vector.build(n, w);
        let half = (w / 2).max(1);
        let mut stats = Vec::new();
        let mut flat = Vec::new();
        for s in 0..cfg.n_samples {
            let h = sample_band_matrix_indexed::<f64>(&spec, s as u64)?;
            let sp = eigh(&h)?;
            for &k in &ks {
                let psi = sp.vector(k);
                stats.push(que_statistic(psi, &a, n)?.abs());
                flat.push(block_flatness(&block_mass_profile(psi, half)?, half, n));
            }
        }
        let m = mean(&stats);
        let f = mean(&flat);
        means.push(m);
        flats.push(f);
        let mut rec = SampleRecord::new(n as u64, true, None)
            .with("n", n)
            .with("w", w)
            .with("mean_abs_stat", m)
            .with("mean_flatness", f)
            .with("count", stats.len());
        for &d in &cfg.deltas {
            let hits = stats.iter().filter(|&&x| x >= d).count();
            let (lo, hi) = wilson_interval(hits, stats.len(), 1.96);
            rec = rec
                .with(&format!("p_exceed_{d}"), hits as f64 / stats.len() as f64)
                .with(&format!("ci_{d}"), vec![lo, hi]);
        }
        rep.push(rec);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|p| p[1] < p[0]);
    let (md, fd) = (decreasing(&means), decreasing(&flats));
    if cfg.require_decay {
        rep.require("require_mean_decreasing", md);
        rep.require("require_flatness_decreasing", fd);
    } else {
        rep.extra("mean_decreasing", md);
        rep.extra("flatness_decreasing", fd);
    }
    Ok(rep)
}

/// Outcome of the uncertainty-principle checks at one energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyCheck {
    pub mu: f64,
    pub e: f64,
    /// Minimum of `Σ_{i<W} |u_i|²` over unit vectors `u` in the span of the
    /// eigenvectors of `D^g` with `|δ_ℓ − e| ≤ μ`. `None` when that set is empty.
    pub worst_mass: Option<f64>,
    /// Same minimum restricted to the eigenvectors themselves.
    pub worst_single_mass: Option<f64>,
    pub n_tested: usize,
    pub quad_margin: Option<f64>,
}

impl UncertaintyCheck {
    pub fn vacuous(&self) -> bool {
        self.n_tested == 0
    }

    pub fn vector_passed(&self) -> bool {
        self.worst_mass.is_none_or(|m| m > self.mu * self.mu)
    }

    pub fn quad_passed(&self) -> bool {
        self.quad_margin.is_none_or(|q| q >= 0.0)
    }

    pub fn passed(&self) -> bool {
        self.vector_passed() && self.quad_passed()
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0 && mu < 1.0) {
        return Err(invalid(format!("mu = {mu} must lie in [0, 1)")));
    }
    Ok(())
}

/// Mass test over the eigenvectors of `D^g` within `μ` of `e`. Coordinates are
/// those of the `D` block, so "first `W`" are the `W` indices adjacent to `A`.
pub fn uncertainty_vector_check<T: Real>(reducer: &Reducer<T>, e: f64, mu: f64) -> Result<UncertaintyCheck> {
    check_mu(mu)?;
    let w = reducer.w();
    let d = reducer.d_spectrum();
    let sel: Vec<usize> = (0..d.len()).filter(|&l| (d.values[l].as_f64() - e).abs() <= mu).collect();
    let mut out = UncertaintyCheck { mu, e, worst_mass: None, worst_single_mass: None, n_tested: sel.len(), quad_margin: None };
    if sel.is_empty() {
        return Ok(out);
    }
    let head = w.min(d.len());
    let p = Matrix::from_fn(sel.len(), head, |r, c| d.vector(sel[r])[c].as_f64());
    let gram = p.matmul(&p.transpose())?;
    let single = gram.diagonal().into_iter().fold(f64::INFINITY, f64::min);
    let span = eigvalsh(&gram)?[0].max(0.0);
    out.worst_mass = Some(span.min(single));
    out.worst_single_mass = Some(single);
    Ok(out)
}

/// `λ_min((BᵀRB)² + I − μ² BᵀR²B)` with `R = (D^g − e)⁻¹`.
pub fn uncertainty_quadratic_margin<T: Real>(reducer: &Reducer<T>, e: f64, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let et = T::lit(e);
    let k = reducer.schur_term(et)?;
    let k2 = reducer.schur_term_sq(et)?;
    let w = reducer.w();
    let mut m = k.matmul(&k)?.add(&Matrix::identity(w))?.sub(&k2.scale(T::lit(mu * mu)))?;
    for i in 0..w {
        for j in i + 1..w {
            let v = (m[(i, j)] + m[(j, i)]) * T::lit(0.5);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(eigvalsh(&m)?[0].as_f64())
}

/// Both checks at one energy.
pub fn uncertainty_check<T: Real>(reducer: &Reducer<T>, e: f64, mu: f64) -> Result<UncertaintyCheck> {
    let mut out = uncertainty_vector_check(reducer, e, mu)?;
    out.quad_margin = Some(uncertainty_quadratic_margin(reducer, e, mu)?);
    Ok(out)
}

/// Slope constant `C_μ = 2/μ² + 1/μ²`.
pub fn slope_constant(mu: f64) -> f64 {
    3.0 / (mu * mu)
}

/// `‖(D^g − e)⁻¹ B u_{k′}(e)‖² ≤ C_μ (1 + C_k(e)²)` for label `k` at `e`.
pub fn slope_bound_check<T: Real>(reducer: &Reducer<T>, e: f64, k: usize, big_k: f64, mu: f64) -> Result<SampleRecord> {
    if !(mu > 0.0) {
        return Err(invalid("mu must be positive"));
    }
    let (c, _, lhs) = reducer.curve_point(T::lit(e), k)?;
    let c = c.as_f64();
    if c.abs() > big_k {
        return Err(precondition(format!("|C_k(e)| = {} exceeds K = {big_k}", c.abs())));
    }
    let rhs = slope_constant(mu) * (1.0 + c * c);
    let lhs = lhs.as_f64();
    Ok(SampleRecord::upper_bound(k as u64, lhs, rhs).with("e", e).with("c_k", c))
}

/// Slope-bound report over an energy grid (every label defined at each energy
/// with `|C_k(e)| ≤ K` is checked; energies on `σ(D^g)` are skipped).
pub fn slope_bound_report<T: Real>(reducer: &Reducer<T>, energies: &[f64], big_k: f64, mu: f64) -> Result<DiagnosticsReport> {
    let mut rep = DiagnosticsReport::new("slope_bound").param("mu", mu).param("k_bound", big_k).param("c_mu", slope_constant(mu));
    let mut skipped = 0usize;
    for &e in energies {
        let et = T::lit(e);
        if reducer.is_singular(et) {
            skipped += 1;
            continue;
        }
        let xi = reducer.xi(et)?;
        for (kp, k) in reducer.labels_at(et).enumerate() {
            if xi[kp].as_f64().abs() <= big_k {
                rep.push(slope_bound_check(reducer, e, k, big_k, mu)?);
            }
        }
    }
    rep.extra("skipped_energies", skipped);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::DiagonalShift;
    use crate::reduction::block_split;

    #[test]
    fn que_trivial_cases() {
        let n = 8;
        let flat = vec![1.0 / (n as f64).sqrt(); n];
        let a: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { 0.7 } else { -0.2 }).collect();
        assert!(que_statistic(&flat, &a, n).unwrap().abs() < 1e-15);
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        assert!(que_statistic(&e1, &vec![1.0; n], n).unwrap().abs() < 1e-15);
        assert!((que_statistic(&e1, &[1.0], n).unwrap() - (1.0 - 1.0 / n as f64)).abs() < 1e-15);
        assert!(que_statistic(&e1, &vec![1.0; n + 1], n).is_err());
        assert!(que_statistic(&e1, &[2.0], n).is_err());
    }

    #[test]
    fn block_masses() {
        let n = 8;
        let flat = vec![1.0 / (n as f64).sqrt(); n];
        for m in block_mass_profile(&flat, 2).unwrap() {
            assert!((m - 0.25).abs() < 1e-15);
        }
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        assert_eq!(block_mass_profile(&e1, 2).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(block_mass_profile(&e1, 3).is_err());
    }

    #[test]
    fn trivial_test_vectors_never_exceed() {
        for tv in [TestVector::Zero, TestVector::Constant] {
            let cfg = QueConfig { ws: vec![4], n_samples: 3, test_vector: tv, require_decay: false, ..QueConfig::default() };
            let rep = que_ensemble_test(&cfg).unwrap();
            for d in &cfg.deltas {
                assert_eq!(rep.column(&format!("p_exceed_{d}")), vec![0.0]);
            }
        }
    }

    /// `H` with diagonal `D` block; `D[2][2] = 0.4` sits off the first `W` coordinates.
    fn engineered() -> Matrix<f64> {
        let mut h = Matrix::from_diagonal(&[0.1, -0.2, -1.0, 1.0, 0.4, 2.0, -2.0, 3.0]);
        h[(0, 2)] = 0.3;
        h[(2, 0)] = 0.3;
        h
    }

    #[test]
    fn vector_check_negative_control_and_vacuous() {
        let dec = block_split(&engineered(), 2, 0).unwrap();
        let red = Reducer::new(&dec, &DiagonalShift::zero(8)).unwrap();
        let c = uncertainty_vector_check(&red, 0.4, 0.05).unwrap();
        assert_eq!(c.worst_mass, Some(0.0));
        assert!(!c.vector_passed());
        let c = uncertainty_vector_check(&red, 5.0, 0.05).unwrap();
        assert!(c.vacuous() && c.vector_passed());
    }

    #[test]
    fn quadratic_margin_controls() {
        let dec = block_split(&engineered(), 2, 0).unwrap();
        let red = Reducer::new(&dec, &DiagonalShift::zero(8)).unwrap();
        assert!(uncertainty_quadratic_margin(&red, 0.7, 0.0).unwrap() >= 1.0 - 1e-14);
        // Symmetric pair e ± d with identical coupling cancels BᵀRB and leaves −μ²BᵀR²B.
        let mut h = Matrix::from_diagonal(&[0.0, 0.0, 0.49, 0.51, 3.0, -3.0, 4.0, -4.0]);
        for r in [2, 3] {
            h[(0, r)] = 0.5;
            h[(r, 0)] = 0.5;
        }
        let dec = block_split(&h, 2, 0).unwrap();
        let red = Reducer::new(&dec, &DiagonalShift::zero(8)).unwrap();
        assert!(uncertainty_quadratic_margin(&red, 0.5, 0.05).unwrap() < 0.0);
    }

    #[test]
    fn decoupled_slope_bound_is_trivial() {
        let h = Matrix::from_diagonal(&[0.1, -0.2, -1.0, 1.0, 0.4, 2.0, -2.0, 3.0]);
        let dec = block_split(&h, 2, 0).unwrap();
        let red = Reducer::new(&dec, &DiagonalShift::zero(8)).unwrap();
        let rec = slope_bound_check(&red, 0.0, red.count_below(0.0), 10.0, 0.05).unwrap();
        assert!(rec.passed);
        assert_eq!(rec.get_f64("value"), Some(0.0));
    }
}
