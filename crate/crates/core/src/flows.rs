//! Band-adapted Dyson Brownian motion, its exact Ornstein–Uhlenbeck law,
//! Gaussian-divisible and deformed GOE ensembles, and the regularity check.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ensemble::BandEnsembleSpec;
use crate::error::{invalid, precondition, Error, Result};
use crate::linalg::Matrix;
use crate::report::{DiagnosticsReport, SampleRecord};
use crate::rng::{Domain, StreamKey};
use crate::scalar::Real;
use crate::spectral::eigvalsh;

/// Band matrix at flow time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState<T> {
    pub h: Matrix<T>,
    pub t: f64,
    pub spec: BandEnsembleSpec,
    pub step_count: u64,
}

impl<T: Real> FlowState<T> {
    pub fn new(spec: BandEnsembleSpec, h: Matrix<T>) -> Result<Self> {
        spec.validate()?;
        if h.rows() != spec.n || !h.is_square() {
            return Err(Error::DimensionMismatch { expected: spec.n, actual: h.rows() });
        }
        if !support_matches(&h, &spec) {
            return Err(invalid("matrix does not vanish off the band"));
        }
        Ok(Self { h, t: 0.0, spec, step_count: 0 })
    }
}

fn support_matches<T: Real>(h: &Matrix<T>, spec: &BandEnsembleSpec) -> bool {
    (0..spec.n).all(|i| (0..spec.n).all(|j| spec.in_band(i, j) || h[(i, j)] == T::zero()))
}

/// Largest admissible Euler step, `0.1 · N · min s_ij`.
pub fn max_stable_dt(spec: &BandEnsembleSpec) -> f64 {
    0.1 * spec.n as f64 / spec.bandwidth() as f64
}

/// One Euler–Maruyama step of `dX = dB/√N − X/(2Ns) dt` given a standard normal `xi`.
#[inline]
pub fn ou_euler_step(x: f64, n: f64, s: f64, dt: f64, xi: f64) -> f64 {
    x - x / (2.0 * n * s) * dt + (dt / n).sqrt() * xi
}

/// Exact transition of the same OU process over time `t` given a standard normal `xi`.
#[inline]
pub fn ou_exact_step(x0: f64, n: f64, s: f64, t: f64, xi: f64) -> f64 {
    (-t / (2.0 * n * s)).exp() * x0 + (s * (1.0 - (-t / (n * s)).exp())).sqrt() * xi
}

/// Mean and standard deviation of the exact law of an entry at time `t` started from `x0`.
pub fn ou_law(x0: f64, n: f64, s: f64, t: f64) -> (f64, f64) {
    ((-t / (2.0 * n * s)).exp() * x0, (s * (1.0 - (-t / (n * s)).exp())).sqrt())
}

/// Euler–Maruyama path of a single entry, returning the endpoint.
pub fn ou_euler_path<R: Rng + ?Sized>(x0: f64, n: f64, s: f64, dt: f64, n_steps: usize, rng: &mut R) -> f64 {
    let mut x = x0;
    for _ in 0..n_steps {
        let xi: f64 = rng.sample(StandardNormal);
        x = ou_euler_step(x, n, s, dt, xi);
    }
    x
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn evolve<T: Real>(state: &FlowState<T>, dt: f64, n_steps: usize, seed: u64, noise: bool) -> Result<FlowState<T>> {
    let bound = max_stable_dt(&state.spec);
    if !(dt > 0.0) || dt > bound {
        return Err(precondition(format!("time step dt = {dt} must lie in (0, 0.1*N*min s_ij = {bound}]")));
    }
    let spec = &state.spec;
    let n = spec.n as f64;
    let s = 1.0 / spec.bandwidth() as f64;
    // Continuations of a path draw from fresh streams keyed by the step counter.
    let key = StreamKey::new(seed ^ splitmix(state.step_count));
    let mut h = state.h.clone();
    for i in 0..spec.n {
        for j in i..spec.n {
            if !spec.in_band(i, j) {
                continue;
            }
            let mut x = h[(i, j)].as_f64();
            if noise {
                let mut rng = key.stream(Domain::FlowNoise, 0, i, j);
                x = ou_euler_path(x, n, s, dt, n_steps, &mut rng);
            } else {
                for _ in 0..n_steps {
                    x = ou_euler_step(x, n, s, dt, 0.0);
                }
            }
            let x = T::lit(x);
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    Ok(FlowState { h, t: state.t + dt * n_steps as f64, spec: spec.clone(), step_count: state.step_count + n_steps as u64 })
}

/// Euler–Maruyama evolution of the band DBM on the band support.
pub fn dbm_evolve<T: Real>(state: &FlowState<T>, dt: f64, n_steps: usize, seed: u64) -> Result<FlowState<T>> {
    evolve(state, dt, n_steps, seed, true)
}

/// Same integrator with the noise switched off (pure deterministic decay).
pub fn dbm_drift_only<T: Real>(state: &FlowState<T>, dt: f64, n_steps: usize) -> Result<FlowState<T>> {
    evolve(state, dt, n_steps, 0, false)
}

/// One-shot draw from the exact OU law at time `t`.
pub fn ou_exact_sample<T: Real>(h0: &Matrix<T>, t: f64, spec: &BandEnsembleSpec, seed: u64, sample: u64) -> Result<Matrix<T>> {
    spec.validate()?;
    if !(t >= 0.0) {
        return Err(invalid("flow time must be nonnegative"));
    }
    if h0.rows() != spec.n || !h0.is_square() {
        return Err(Error::DimensionMismatch { expected: spec.n, actual: h0.rows() });
    }
    if t == 0.0 {
        return Ok(h0.clone());
    }
    let n = spec.n as f64;
    let s = 1.0 / spec.bandwidth() as f64;
    let key = StreamKey::new(seed);
    let mut h = Matrix::zeros(spec.n, spec.n);
    for i in 0..spec.n {
        for j in i..spec.n {
            if !spec.in_band(i, j) {
                continue;
            }
            let xi: f64 = key.stream(Domain::OuNoise, sample, i, j).sample(StandardNormal);
            let x = T::lit(ou_exact_step(h0[(i, j)].as_f64(), n, s, t, xi));
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    Ok(h)
}

/// `√q·H1 + √(1−q)·H2`.
pub fn gaussian_divisible<T: Real>(h1: &Matrix<T>, h2: &Matrix<T>, q: T) -> Result<Matrix<T>> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(invalid(format!("mixing weight q = {q} must lie in [0, 1]")));
    }
    if h1.rows() != h2.rows() || h1.cols() != h2.cols() {
        return Err(Error::DimensionMismatch { expected: h1.rows(), actual: h2.rows() });
    }
    let same_support = h1.as_slice().iter().zip(h2.as_slice()).all(|(a, b)| (*a == T::zero()) == (*b == T::zero()));
    if !same_support {
        return Err(invalid("H1 and H2 have different supports"));
    }
    let (a, b) = (q.sqrt(), (T::one() - q).sqrt());
    Ok(Matrix::from_fn(h1.rows(), h1.cols(), |i, j| a * h1[(i, j)] + b * h2[(i, j)]))
}

/// GOE normalised to spectrum `[−2, 2]`: off-diagonal variance `1/n`, diagonal `2/n`.
pub fn sample_goe<T: Real>(n: usize, seed: u64, sample: u64) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(invalid("GOE dimension must be positive"));
    }
    let key = StreamKey::new(seed);
    let sd = (1.0 / n as f64).sqrt();
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z: f64 = key.stream(Domain::GoeEntry, sample, i, j).sample(StandardNormal);
            let x = T::lit(if i == j { z * sd * 2f64.sqrt() } else { z * sd });
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    Ok(h)
}

/// `V + √T·Z` with `Z` a GOE of the same dimension.
pub fn deformed_goe<T: Real>(v: &Matrix<T>, t: T, seed: u64, sample: u64) -> Result<Matrix<T>> {
    if !(t >= T::zero()) {
        return Err(invalid("deformation time must be nonnegative"));
    }
    if !v.is_square() {
        return Err(Error::DimensionMismatch { expected: v.rows(), actual: v.cols() });
    }
    if t == T::zero() {
        return Ok(v.clone());
    }
    let z = sample_goe::<T>(v.rows(), seed, sample)?;
    v.add(&z.scale(t.sqrt()))
}

/// Parameters of the `(η*, r)`-regularity check around `E0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityWindow {
    pub e0: f64,
    pub eta_star: f64,
    pub r: f64,
    pub t: f64,
    /// Block size entering `φ = W^𝔞`.
    pub w: usize,
    pub phi: f64,
    pub c1: f64,
    pub c2: f64,
}

impl RegularityWindow {
    pub const DEFAULT_PHI_EXPONENT: f64 = 0.1;
    pub const DEFAULT_C1: f64 = 5.0;
    pub const DEFAULT_C2: f64 = 100.0;
    pub const DEFAULT_THETA: f64 = 0.5;

    /// `T = N^{−1+θ}`, `η* = N^{−1+θ/2}`, `r = N^{−1/2+θ}`, `φ = W^𝔞`.
    pub fn defaults(n: usize, w: usize, e0: f64, theta: f64) -> Self {
        let nf = n as f64;
        Self {
            e0,
            eta_star: nf.powf(-1.0 + theta / 2.0),
            r: nf.powf(-0.5 + theta),
            t: nf.powf(-1.0 + theta),
            w,
            phi: (w as f64).powf(Self::DEFAULT_PHI_EXPONENT),
            c1: Self::DEFAULT_C1,
            c2: Self::DEFAULT_C2,
        }
    }

    /// `φ/W ≤ η* ≤ r/φ ≤ 1` and `η*φ ≤ T ≤ r²/φ`.
    pub fn validate(&self) -> Result<()> {
        let w = self.w as f64;
        let checks = [
            (self.phi / w <= self.eta_star, "phi/W <= eta_star"),
            (self.eta_star <= self.r / self.phi, "eta_star <= r/phi"),
            (self.r / self.phi <= 1.0, "r/phi <= 1"),
            (self.eta_star * self.phi <= self.t, "eta_star*phi <= T"),
            (self.t <= self.r * self.r / self.phi, "T <= r^2/phi"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(precondition(format!("regularity window violates {what}")));
            }
        }
        if !(self.c2 > 0.0 && self.w > 0) {
            return Err(precondition("regularity constants must be positive"));
        }
        Ok(())
    }
}

/// Checks `‖V‖ ≤ W^{C1}` and `C2⁻¹ ≤ Im m_V(E + iη) ≤ C2` on a grid with
/// `|E − E0| ≤ r` and `η* ≤ η ≤ 1`, where `m_V(z) = (1/n) tr (V − z)⁻¹`.
pub fn check_regularity<T: Real>(v: &Matrix<T>, win: &RegularityWindow) -> Result<DiagnosticsReport> {
    win.validate()?;
    let lambda: Vec<f64> = eigvalsh(v)?.into_iter().map(Real::as_f64).collect();
    let n = lambda.len() as f64;
    let norm = lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let norm_bound = (win.w as f64).powf(win.c1);
    let mut rep = DiagnosticsReport::new("regularity")
        .param("e0", win.e0)
        .param("eta_star", win.eta_star)
        .param("r", win.r)
        .param("t", win.t)
        .param("phi", win.phi)
        .param("c1", win.c1)
        .param("c2", win.c2);
    rep.push(SampleRecord::upper_bound(0, norm, norm_bound).with("kind", "norm"));
    const N_E: usize = 21;
    const N_ETA: usize = 9;
    let mut idx = 1;
    for a in 0..N_E {
        let e = win.e0 - win.r + 2.0 * win.r * a as f64 / (N_E - 1) as f64;
        for b in 0..N_ETA {
            let eta = win.eta_star * (1.0 / win.eta_star).powf(b as f64 / (N_ETA - 1) as f64);
            let z = Complex::new(e, eta);
            let im = lambda.iter().map(|&l| (1.0 / (Complex::new(l, 0.0) - z)).im).sum::<f64>() / n;
            let margin = (im - 1.0 / win.c2).min(win.c2 - im);
            rep.push(SampleRecord::new(idx, margin >= 0.0, Some(margin)).with("e", e).with("eta", eta).with("im_m", im));
            idx += 1;
        }
    }
    Ok(rep)
}
