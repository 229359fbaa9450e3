//! Spectral statistics: normalized gaps, KS distances, rigidity, local laws,
//! level repulsion, the self-consistent vector equation and operator bounds.

use std::ops::Range;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::{DiagonalShift, VarianceProfile};
use crate::error::{invalid, precondition, Error, Result};
use crate::linalg::Matrix;
use crate::reduction::Reducer;
use crate::report::{DiagnosticsReport, SampleRecord};
use crate::scalar::Real;
use crate::spectral::{
    classical_locations, eigh, eigvalsh, empirical_stieltjes, generalized_pencil, semicircle_density,
    semicircle_stieltjes,
};

/// Constant policy for bounds of the form `A ≺ B`, tested as `A ≤ c · N^ε · B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationPolicy {
    pub c: f64,
    pub eps: f64,
}

impl Default for DominationPolicy {
    fn default() -> Self {
        Self { c: 20.0, eps: 0.1 }
    }
}

impl DominationPolicy {
    pub fn factor(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(self.eps)
    }
}

/// 0-based eigenvalue indices `⌈κN⌉−1 .. ⌈(1−κ)N⌉−1` (1-based `k ∈ [⌈κN⌉, ⌈(1−κ)N⌉)`).
pub fn bulk_window(n: usize, kappa: f64) -> Result<Range<usize>> {
    if !(kappa > 0.0 && kappa < 0.5) {
        return Err(invalid(format!("bulk parameter kappa = {kappa} must lie in (0, 1/2)")));
    }
    let a = (kappa * n as f64).ceil() as usize;
    let b = ((1.0 - kappa) * n as f64).ceil() as usize;
    if a < 1 || b <= a + 1 {
        return Err(invalid(format!("bulk window of N = {n}, kappa = {kappa} is empty")));
    }
    Ok(a - 1..b - 1)
}

/// Normalized bulk gaps `N ρ_sc(γ_k)(λ_{k+1} − λ_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub gaps: Vec<f64>,
    /// Lower eigenvalue index (0-based) of each gap.
    pub k: Vec<usize>,
    pub source: String,
    pub k_window: (usize, usize),
}

impl GapSample {
    pub fn empty(source: &str, k_window: Range<usize>) -> Self {
        Self { gaps: Vec::new(), k: Vec::new(), source: source.to_owned(), k_window: (k_window.start, k_window.end) }
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Pool another sample's gaps into this one.
    pub fn extend(&mut self, other: &GapSample) {
        self.gaps.extend_from_slice(&other.gaps);
        self.k.extend_from_slice(&other.k);
    }
}

/// Gaps for consecutive pairs inside `window` (eigenvalues ascending). `ρ_sc` is
/// evaluated at the classical location `γ_k`.
pub fn normalized_gaps<T: Real>(eigenvalues: &[T], window: Range<usize>, source: &str) -> Result<GapSample> {
    let n = eigenvalues.len();
    if window.start == 0 || window.end >= n || window.len() < 2 {
        return Err(invalid(format!("gap window {window:?} touches the spectral edge of N = {n}")));
    }
    let gamma: Vec<f64> = classical_locations(n);
    let nf = n as f64;
    let mut out = GapSample::empty(source, window.clone());
    for k in window.start..window.end - 1 {
        let gap = (eigenvalues[k + 1] - eigenvalues[k]).as_f64();
        out.gaps.push(nf * semicircle_density(gamma[k]) * gap);
        out.k.push(k);
    }
    Ok(out)
}

fn sorted(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|v| v.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("KS distance needs two nonempty samples"));
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid("KS distance needs a nonempty sample"));
    }
    let x = sorted(sample)?;
    let n = x.len() as f64;
    Ok(x.iter().enumerate().fold(0.0f64, |d, (i, &v)| {
        let f = cdf(v);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    }))
}

pub fn gap_cdf_distance(a: &GapSample, b: &GapSample) -> Result<f64> {
    ks_two_sample(&a.gaps, &b.gaps)
}

/// `|λ_j − γ_j| · min(j, N+1−j)^{1/3} · N^{2/3}` (1-based `j`).
pub fn rigidity_deviations<T: Real>(eigenvalues: &[T]) -> Vec<f64> {
    let n = eigenvalues.len();
    let gamma: Vec<f64> = classical_locations(n);
    let scale = (n as f64).powf(2.0 / 3.0);
    eigenvalues
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let j = i + 1;
            let jt = j.min(n + 1 - j) as f64;
            (l.as_f64() - gamma[i]).abs() * jt.cbrt() * scale
        })
        .collect()
}

/// Rigidity report; rows are bulk indices (`bulk_window(N, κ)`) checked against `bound`.
pub fn rigidity_profile<T: Real>(eigenvalues: &[T], kappa: f64, bound: f64) -> Result<DiagnosticsReport> {
    let n = eigenvalues.len();
    let dev = rigidity_deviations(eigenvalues);
    let bulk = bulk_window(n, kappa)?;
    let mut rep = DiagnosticsReport::new("rigidity").param("n", n).param("kappa", kappa).param("bound", bound);
    let mut max_bulk = 0.0f64;
    for j in bulk.clone() {
        max_bulk = max_bulk.max(dev[j]);
        rep.push(SampleRecord::upper_bound(j as u64, dev[j], bound));
    }
    let max_edge = (0..n).filter(|j| !bulk.contains(j)).map(|j| dev[j]).fold(0.0f64, f64::max);
    rep.extra("max_bulk", max_bulk);
    rep.extra("max_edge", max_edge);
    Ok(rep)
}

/// `max_ij |G_ij − δ_ij m| ` for a dense complex matrix.
fn entrywise_deviation<T: Real>(g: &Matrix<Complex<T>>, m: Complex<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..g.rows() {
        for (j, x) in g.row(i).iter().enumerate() {
            let v = Complex::new(x.re.as_f64(), x.im.as_f64());
            let d = if i == j { (v - m).norm() } else { v.norm() };
            worst = worst.max(d);
        }
    }
    worst
}

/// Local semicircle law for `H`: per `z`, the entrywise ratio
/// `max_ij |G_ij − δ_ij m| / (√(Im m/(Wη)) + 1/(Wη))` and the trace ratio
/// `|m_N − m| · Wη`, both tested against `policy.factor(N)`.
pub fn local_law_residual<T: Real>(
    h: &Matrix<T>,
    w: usize,
    z_grid: &[Complex<f64>],
    omega: f64,
    policy: DominationPolicy,
) -> Result<DiagnosticsReport> {
    let n = h.rows();
    let eta_min = (n as f64).powf(-1.0 + omega);
    for z in z_grid {
        if z.im < eta_min || z.im > 1.0 {
            return Err(precondition(format!("eta = {} outside [N^(-1+omega) = {eta_min}, 1]", z.im)));
        }
    }
    let spec = eigh(h)?;
    let bound = policy.factor(n);
    let wf = w as f64;
    let mut rep = DiagnosticsReport::new("local_law")
        .param("n", n)
        .param("w", w)
        .param("omega", omega)
        .param("bound", bound);
    for (idx, &z) in z_grid.iter().enumerate() {
        let zt = Complex::new(T::lit(z.re), T::lit(z.im));
        let g = spec.resolvent(zt);
        let m = semicircle_stieltjes(z)?;
        let eta = z.im;
        let control = (m.im / (wf * eta)).sqrt() + 1.0 / (wf * eta);
        let entry = entrywise_deviation(&g, m) / control;
        let mn = empirical_stieltjes(&spec.values, zt)?;
        let trace = (Complex::new(mn.re.as_f64(), mn.im.as_f64()) - m).norm() * wf * eta;
        let worst = entry.max(trace);
        rep.push(
            SampleRecord::new(idx as u64, worst <= bound, Some(bound - worst))
                .with("e", z.re)
                .with("eta", eta)
                .with("entry_ratio", entry)
                .with("trace_ratio", trace)
                .with("im_mn", mn.im.as_f64()),
        );
    }
    Ok(rep)
}

/// Local law for `Q_e`. Grid points must satisfy `|E − e| ≤ N^{−ω}` and
/// `N^{−1+ω} ≤ η ≤ 1`. On points with `η ≤ N^{−ω}` the entrywise ratio
/// `max |(Q−z)⁻¹_ij − m δ_ij| / ((Nη)^{−1/2} + |z−e|)` is tested against the
/// domination bound; on every point `(1/W) Im tr (Q−z)⁻¹` must lie in `[c, 1/c]`.
pub fn q_local_law_residual<T: Real>(
    reducer: &Reducer<T>,
    e: f64,
    z_grid: &[Complex<f64>],
    omega: f64,
    c: f64,
    policy: DominationPolicy,
) -> Result<DiagnosticsReport> {
    let (n, w) = (reducer.n(), reducer.w());
    let nf = n as f64;
    let (eta_min, radius) = (nf.powf(-1.0 + omega), nf.powf(-omega));
    for z in z_grid {
        if z.im < eta_min || z.im > 1.0 || (z.re - e).abs() > radius {
            return Err(precondition(format!("grid point {z} outside the admissible window around e = {e}")));
        }
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid("trace window constant must lie in (0, 1]"));
    }
    let q = eigh(&reducer.qmatrix(T::lit(e))?)?;
    let bound = policy.factor(n);
    let mut rep = DiagnosticsReport::new("q_local_law")
        .param("n", n)
        .param("w", w)
        .param("e", e)
        .param("omega", omega)
        .param("c", c)
        .param("bound", bound);
    for (idx, &z) in z_grid.iter().enumerate() {
        let zt = Complex::new(T::lit(z.re), T::lit(z.im));
        let g = q.resolvent(zt);
        let m = semicircle_stieltjes(z)?;
        let im_tr = g.trace().im.as_f64() / w as f64;
        let trace_ok = im_tr >= c && im_tr <= 1.0 / c;
        let trace_margin = (im_tr - c).min(1.0 / c - im_tr);
        let in_s = z.im <= radius;
        let mut rec = SampleRecord::new(idx as u64, trace_ok, Some(trace_margin))
            .with("e", z.re)
            .with("eta", z.im)
            .with("im_trace", im_tr)
            .with("in_s", in_s);
        if in_s {
            let control = (nf * z.im).powf(-0.5) + (z - Complex::new(e, 0.0)).norm();
            let ratio = entrywise_deviation(&g, m) / control;
            rec.passed &= ratio <= bound;
            rec = rec.with("entry_ratio", ratio);
        }
        rep.push(rec);
    }
    Ok(rep)
}

/// Pairs `(k, ℓ)` with `|k−ℓ| ≥ N^{2ω}` and `|ξ_k − ξ_ℓ| ≤ |ℓ−k|/N^{1+ω} − N^{−1+ω}`.
pub fn spacing_floor_violations(xi: &[f64], n: usize, omega: f64) -> Vec<(usize, usize)> {
    let nf = n as f64;
    let min_sep = nf.powf(2.0 * omega);
    let mut out = Vec::new();
    for k in 0..xi.len() {
        for l in k + 1..xi.len() {
            let d = (l - k) as f64;
            if d < min_sep {
                continue;
            }
            if (xi[k] - xi[l]).abs() <= d / nf.powf(1.0 + omega) - nf.powf(-1.0 + omega) {
                out.push((k, l));
            }
        }
    }
    out
}

/// Empirical `P(gap ≤ x)` on `x_grid` with the log-log slope fitted over
/// points with positive probability and the constant `C` of `C·x^{2−δ}`, `δ = 0.1`.
pub fn level_repulsion_curve(gaps: &GapSample, x_grid: &[f64]) -> Result<DiagnosticsReport> {
    if gaps.is_empty() {
        return Err(invalid("level repulsion needs a nonempty gap sample"));
    }
    let g = sorted(&gaps.gaps)?;
    let n = g.len() as f64;
    let exponent = 1.9;
    let mut rep = DiagnosticsReport::new("level_repulsion").param("exponent", exponent).param("n_gaps", g.len());
    let mut pts = Vec::new();
    for (i, &x) in x_grid.iter().enumerate() {
        let p = g.partition_point(|&v| v <= x) as f64 / n;
        if p > 0.0 && x > 0.0 {
            pts.push((x.ln(), p.ln()));
        }
        rep.push(SampleRecord::new(i as u64, true, None).with("x", x).with("p", p));
    }
    if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        rep.extra("loglog_slope", sxy / sxx);
    }
    if !pts.is_empty() {
        let log_c = pts.iter().map(|(lx, lp)| lp - exponent * lx).sum::<f64>() / pts.len() as f64;
        rep.extra("fitted_c", log_c.exp());
    }
    Ok(rep)
}

/// Options of the damped fixed-point solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    /// Consecutive non-improving damped steps tolerated before giving up.
    pub patience: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 10_000, damping: 0.5, patience: 50 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfConsistentSolution {
    pub m: Vec<Complex<f64>>,
    pub z: Complex<f64>,
    pub zprime: Complex<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// `max_i |M_i − m(z)|`.
    pub band_deviation: f64,
}

fn sce_residual(
    profile: &VarianceProfile<f64>,
    g: &[f64],
    w: usize,
    z: Complex<f64>,
    zp: Complex<f64>,
    m: &[Complex<f64>],
) -> (f64, Vec<Complex<f64>>) {
    let sm = profile.apply(m);
    let mut res = 0.0f64;
    let next = (0..m.len())
        .map(|i| {
            let shift = if i >= w { zp - z } else { Complex::new(0.0, 0.0) };
            let rhs = -shift - g[i] - z - sm[i];
            res = res.max((Complex::new(1.0, 0.0) / m[i] - rhs).norm());
            Complex::new(1.0, 0.0) / rhs
        })
        .collect();
    (res, next)
}

/// Solves `1/M_i = −(z′−z)1_{i≥W} − g_i − z − Σ_j s_ij M_j` (0-based `i`) by
/// fixed-point iteration from `M ≡ m(z)`, halving the step whenever the raw
/// update fails to reduce the residual.
pub fn solve_self_consistent_m(
    profile: &VarianceProfile<f64>,
    g: &DiagonalShift<f64>,
    w: usize,
    z: Complex<f64>,
    zprime: Complex<f64>,
    opts: SolverOptions,
) -> Result<SelfConsistentSolution> {
    let m0 = semicircle_stieltjes(z)?;
    solve_self_consistent_m_from(profile, g, w, z, zprime, vec![m0; profile.dim()], opts)
}

/// Same as [`solve_self_consistent_m`] from an explicit starting vector.
pub fn solve_self_consistent_m_from(
    profile: &VarianceProfile<f64>,
    g: &DiagonalShift<f64>,
    w: usize,
    z: Complex<f64>,
    zprime: Complex<f64>,
    start: Vec<Complex<f64>>,
    opts: SolverOptions,
) -> Result<SelfConsistentSolution> {
    let n = profile.dim();
    if g.len() != n || start.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: g.len().min(start.len()) });
    }
    if z.im <= 0.0 {
        return Err(invalid("self-consistent equation needs Im z > 0"));
    }
    if w > n {
        return Err(invalid(format!("block size W = {w} exceeds N = {n}")));
    }
    let mz = semicircle_stieltjes(z)?;
    let gs = g.as_slice();
    let mut m = start;
    let (mut res, mut next) = sce_residual(profile, gs, w, z, zprime, &m);
    let mut stalled = 0;
    let mut iterations = 0;
    while res > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let (r_raw, n_raw) = sce_residual(profile, gs, w, z, zprime, &next);
        if r_raw < res {
            m = next;
            res = r_raw;
            next = n_raw;
            stalled = 0;
            continue;
        }
        let damped: Vec<Complex<f64>> = m.iter().zip(&next).map(|(a, b)| a + (b - a) * opts.damping).collect();
        let (r_d, n_d) = sce_residual(profile, gs, w, z, zprime, &damped);
        if r_d < res {
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= opts.patience {
                return Err(Error::Divergence(format!(
                    "residual {res:e} did not decrease for {stalled} consecutive damped steps"
                )));
            }
        }
        m = damped;
        res = r_d;
        next = n_d;
    }
    if res > opts.tol {
        return Err(Error::Divergence(format!("residual {res:e} after {iterations} iterations")));
    }
    let band_deviation = m.iter().map(|x| (x - mz).norm()).fold(0.0f64, f64::max);
    let band = 1.0 / (n as f64).ln();
    if band_deviation > band {
        return Err(Error::Divergence(format!(
            "solution left the constraint band: max |M_i - m(z)| = {band_deviation} > 1/log N = {band}"
        )));
    }
    Ok(SelfConsistentSolution { m, z, zprime, iterations, residual: res, band_deviation })
}

/// `‖G(z, z′)‖ · Im z` with the operator norm from the smallest singular value
/// of the pencil (via the real embedding of `P*P`); passes when `≤ c_prime`.
pub fn operator_bound_check<T: Real>(
    h: &Matrix<T>,
    g: &DiagonalShift<T>,
    w: usize,
    z: Complex<T>,
    zprime: Complex<T>,
    c_prime: f64,
) -> Result<DiagnosticsReport> {
    let p = generalized_pencil(h, g, w, z, zprime)?;
    let n = p.rows();
    let ph = Matrix::from_fn(n, n, |i, j| p[(j, i)].conj());
    let pp = ph.matmul_c(&p)?;
    let emb = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let x = pp[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => x.re,
            (true, false) => -x.im,
            (false, true) => x.im,
        }
    });
    let mut emb = emb;
    for i in 0..2 * n {
        for j in i + 1..2 * n {
            let v = (emb[(i, j)] + emb[(j, i)]) * T::lit(0.5);
            emb[(i, j)] = v;
            emb[(j, i)] = v;
        }
    }
    let smin2 = eigvalsh(&emb)?[0].as_f64().max(0.0);
    let norm = if smin2 > 0.0 { 1.0 / smin2.sqrt() } else { f64::INFINITY };
    let product = norm * z.im.as_f64();
    let mut rep = DiagnosticsReport::new("operator_bound")
        .param("n", n)
        .param("w", w)
        .param("c_prime", c_prime)
        .param("z_re", z.re.as_f64())
        .param("z_im", z.im.as_f64())
        .param("zprime_re", zprime.re.as_f64())
        .param("zprime_im", zprime.im.as_f64());
    let rec = if product.is_finite() {
        SampleRecord::upper_bound(0, product, c_prime)
    } else {
        SampleRecord::new(0, false, None).with("value", "inf")
    };
    rep.push(rec.with("norm", if norm.is_finite() { norm } else { f64::MAX }));
    Ok(rep)
}

/// Wilson score interval for `k` successes out of `n` at normal quantile `zq`.
pub fn wilson_interval(k: usize, n: usize, zq: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = zq * zq;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = zq * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_edge_cases() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&[1.0], &[1.0, 2.0]).unwrap(), 0.5);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
        let d = ks_one_sample(&[0.5], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bulk_window_count() {
        let w = bulk_window(500, 0.1).unwrap();
        assert_eq!(w.len(), 400);
        let lam: Vec<f64> = (0..500).map(|i| i as f64).collect();
        assert_eq!(normalized_gaps(&lam, w, "t").unwrap().len(), 399);
        assert!(normalized_gaps(&lam, 0..10, "t").is_err());
    }

    #[test]
    fn duplicate_eigenvalue_gives_zero_gap() {
        let mut lam: Vec<f64> = classical_locations(100);
        lam[50] = lam[49];
        let gs = normalized_gaps(&lam, 10..90, "t").unwrap();
        assert!(gs.gaps.contains(&0.0));
    }

    #[test]
    fn rigidity_of_classical_locations_is_zero() {
        let lam: Vec<f64> = classical_locations(64);
        assert!(rigidity_deviations(&lam).iter().all(|&d| d == 0.0));
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo, hi) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn repulsion_limits() {
        let gs = GapSample { gaps: vec![0.5, 1.0, 1.5], k: vec![0, 1, 2], source: "t".into(), k_window: (0, 4) };
        let rep = level_repulsion_curve(&gs, &[0.0, 100.0]).unwrap();
        assert_eq!(rep.column("p"), vec![0.0, 1.0]);
    }
}
