//! Block reduction `Q_e = A^g − Bᵀ(D^g − e)⁻¹B` and the curve family `C_k(e)`.
//!
//! Labels are 0-based: label `k ∈ 0..N` is defined at `e` iff
//! `N_D(e) ≤ k < N_D(e) + W`, where `N_D(e) = #{ℓ : δ_ℓ < e}`, and then
//! `C_k(e) = ξ_{k − N_D(e)}(e)` (eigenvalues of `Q_e` in ascending order).
//! Equivalently the domain of `C_k` is `(δ_{k−W}, δ_k)` with out-of-range
//! eigenvalues of `D` read as `∓∞`.

use std::ops::Range;

use crate::ensemble::{apply_diagonal_shift, DiagonalShift};
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, Matrix};
use crate::report::{DiagnosticsReport, SampleRecord};
use crate::scalar::Real;
use crate::spectral::{eigh, eigh_selected, eigvalsh, Spectrum};

/// Distance to `σ(D^g)` below which an energy is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-10;
/// Bisection cap for fixed points.
pub const MAX_BISECTIONS: usize = 200;

/// `H` (after cyclic rotation by `offset·W/2`) split as `[[A, Bᵀ], [B, D]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition<T> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub d: Matrix<T>,
    pub offset: usize,
    pub w: usize,
}

impl<T: Real> BlockDecomposition<T> {
    pub fn n(&self) -> usize {
        self.w + self.d.rows()
    }

    /// Rotation applied to the indices of `H`.
    pub fn shift(&self) -> usize {
        self.offset * self.w / 2
    }

    /// The rotated matrix `[[A, Bᵀ], [B, D]]`.
    pub fn rotated(&self) -> Matrix<T> {
        let (n, w) = (self.n(), self.w);
        Matrix::from_fn(n, n, |i, j| match (i < w, j < w) {
            (true, true) => self.a[(i, j)],
            (true, false) => self.b[(j - w, i)],
            (false, true) => self.b[(i - w, j)],
            (false, false) => self.d[(i - w, j - w)],
        })
    }

    /// Undo the rotation; reproduces the original `H` exactly.
    pub fn reassemble(&self) -> Matrix<T> {
        let (n, r) = (self.n(), self.shift());
        let rot = self.rotated();
        Matrix::from_fn(n, n, |i, j| rot[((i + n - r) % n, (j + n - r) % n)])
    }

    /// Rotate a shift vector given in original coordinates into block coordinates.
    pub fn rotate_shift(&self, g: &DiagonalShift<T>) -> Result<DiagonalShift<T>> {
        let n = self.n();
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: g.len() });
        }
        let r = self.shift();
        DiagonalShift::new((0..n).map(|i| g.as_slice()[(i + r) % n]).collect())
    }
}

/// Split `H` into blocks after rotating indices by `offset·W/2`.
pub fn block_split<T: Real>(h: &Matrix<T>, w: usize, offset: usize) -> Result<BlockDecomposition<T>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), actual: h.cols() });
    }
    let n = h.rows();
    if w == 0 || w > n {
        return Err(invalid(format!("block size W = {w} must lie in 1..={n}")));
    }
    if offset > 0 {
        if w % 2 != 0 {
            return Err(invalid("window offsets need an even block size W"));
        }
        if offset >= 2 * n / w {
            return Err(invalid(format!("offset {offset} out of range 0..{}", 2 * n / w)));
        }
    }
    let r = offset * w / 2;
    let at = |i: usize, j: usize| h[((i + r) % n, (j + r) % n)];
    let m = n - w;
    Ok(BlockDecomposition {
        a: Matrix::from_fn(w, w, |i, j| at(i, j)),
        b: Matrix::from_fn(m, w, |i, j| at(w + i, j)),
        d: Matrix::from_fn(m, m, |i, j| at(w + i, w + j)),
        offset,
        w,
    })
}

/// Precomputed data for repeated evaluation of `Q_e^g`: the eigendecomposition
/// `D^g = Vᵀ diag(δ) V` and `C = V B`, so that `Q_e = A^g − Cᵀ diag(1/(δ−e)) C`.
#[derive(Clone, Debug)]
pub struct Reducer<T> {
    w: usize,
    a_g: Matrix<T>,
    b: Matrix<T>,
    d_spec: Spectrum<T>,
    c: Matrix<T>,
    /// All eigenvalues of `H^g` lie in `[−bound, bound]`.
    bound: T,
}

impl<T: Real> Reducer<T> {
    /// `g` is given in block coordinates (length `N`, first `W` entries shift `A`).
    pub fn new(dec: &BlockDecomposition<T>, g: &DiagonalShift<T>) -> Result<Self> {
        let (n, w) = (dec.n(), dec.w);
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: g.len() });
        }
        let (ga, gd) = g.as_slice().split_at(w);
        let a_g = apply_diagonal_shift(&dec.a, &DiagonalShift::new(ga.to_vec())?)?;
        let d_g = apply_diagonal_shift(&dec.d, &DiagonalShift::new(gd.to_vec())?)?;
        let d_spec = eigh(&d_g)?;
        let c = d_spec.vectors.matmul(&dec.b)?;
        let mut bound = T::zero();
        for i in 0..w {
            let s = a_g.row(i).iter().map(|x| x.abs()).sum::<T>() + (0..n - w).map(|l| dec.b[(l, i)].abs()).sum::<T>();
            bound = bound.max(s);
        }
        for l in 0..n - w {
            let s = d_g.row(l).iter().map(|x| x.abs()).sum::<T>() + dec.b.row(l).iter().map(|x| x.abs()).sum::<T>();
            bound = bound.max(s);
        }
        Ok(Self { w, a_g, b: dec.b.clone(), d_spec, c, bound })
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn n(&self) -> usize {
        self.w + self.d_spec.len()
    }

    pub fn a_g(&self) -> &Matrix<T> {
        &self.a_g
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    /// Ascending eigenvalues `δ` of `D^g`.
    pub fn sigma_d(&self) -> &[T] {
        &self.d_spec.values
    }

    pub fn d_spectrum(&self) -> &Spectrum<T> {
        &self.d_spec
    }

    /// Gershgorin bound on the spectrum of `H^g`.
    pub fn spectral_bound(&self) -> T {
        self.bound
    }

    /// `N_D(e) = #{ℓ : δ_ℓ < e}`.
    pub fn count_below(&self, e: T) -> usize {
        self.sigma_d().partition_point(|&d| d < e)
    }

    /// Labels defined at `e`.
    pub fn labels_at(&self, e: T) -> Range<usize> {
        let nd = self.count_below(e);
        nd..nd + self.w
    }

    /// Open domain `(δ_{k−W}, δ_k)` of label `k`, with infinite ends where `D` has no eigenvalue.
    pub fn domain(&self, k: usize) -> Result<(T, T)> {
        if k >= self.n() {
            return Err(invalid(format!("label {k} out of range 0..{}", self.n())));
        }
        let s = self.sigma_d();
        let lo = if k >= self.w { s[k - self.w] } else { T::neg_infinity() };
        let hi = if k < s.len() { s[k] } else { T::infinity() };
        Ok((lo, hi))
    }

    /// Nearest eigenvalue of `D^g` to `e` and its distance.
    pub fn nearest_delta(&self, e: T) -> Option<(T, T)> {
        let s = self.sigma_d();
        let i = s.partition_point(|&d| d < e);
        [i.checked_sub(1), (i < s.len()).then_some(i)]
            .into_iter()
            .flatten()
            .map(|j| (s[j], (s[j] - e).abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
    }

    pub fn is_singular(&self, e: T) -> bool {
        self.nearest_delta(e).is_some_and(|(_, d)| d <= T::lit(SINGULAR_TOL))
    }

    fn check_energy(&self, e: T) -> Result<()> {
        if !e.is_finite() {
            return Err(invalid("energy must be finite"));
        }
        match self.nearest_delta(e) {
            Some((nearest, d)) if d <= T::lit(SINGULAR_TOL) => Err(Error::SingularEnergy {
                energy: e.as_f64(),
                nearest: nearest.as_f64(),
                tolerance: SINGULAR_TOL,
            }),
            _ => Ok(()),
        }
    }

    /// `Cᵀ diag(f(δ_ℓ − e)) C`.
    fn weighted_gram(&self, e: T, f: impl Fn(T) -> T) -> Matrix<T> {
        let mut scaled = self.c.clone();
        for (l, &d) in self.sigma_d().iter().enumerate() {
            let wgt = f(d - e);
            scaled.row_mut(l).iter_mut().for_each(|x| *x *= wgt);
        }
        let mut m = self.c.tr_matmul(&scaled).expect("conforming");
        symmetrize(&mut m);
        m
    }

    /// `Bᵀ(D^g − e)⁻¹B`.
    pub fn schur_term(&self, e: T) -> Result<Matrix<T>> {
        self.check_energy(e)?;
        Ok(self.weighted_gram(e, |x| T::one() / x))
    }

    /// `Bᵀ(D^g − e)⁻²B`.
    pub fn schur_term_sq(&self, e: T) -> Result<Matrix<T>> {
        self.check_energy(e)?;
        Ok(self.weighted_gram(e, |x| T::one() / (x * x)))
    }

    pub fn qmatrix(&self, e: T) -> Result<Matrix<T>> {
        let s = self.schur_term(e)?;
        let mut q = self.a_g.sub(&s)?;
        symmetrize(&mut q);
        Ok(q)
    }

    /// Ascending eigenvalues `ξ_1(e) ≤ … ≤ ξ_W(e)` of `Q_e`.
    pub fn xi(&self, e: T) -> Result<Vec<T>> {
        eigvalsh(&self.qmatrix(e)?)
    }

    pub fn q_spectrum(&self, e: T) -> Result<Spectrum<T>> {
        eigh(&self.qmatrix(e)?)
    }

    fn local_index(&self, e: T, k: usize) -> Result<usize> {
        let labels = self.labels_at(e);
        if !labels.contains(&k) {
            return Err(invalid(format!("label {k} is undefined at e = {e} (defined: {labels:?})")));
        }
        Ok(k - labels.start)
    }

    /// `C_k(e)`.
    pub fn curve_value(&self, e: T, k: usize) -> Result<T> {
        let kp = self.local_index(e, k)?;
        Ok(self.xi(e)?[kp])
    }

    /// `‖(D^g − e)⁻¹ B u‖²`.
    pub fn resolvent_image_norm_sqr(&self, e: T, u: &[T]) -> Result<T> {
        self.check_energy(e)?;
        if u.len() != self.w {
            return Err(Error::DimensionMismatch { expected: self.w, actual: u.len() });
        }
        let cu = self.c.matvec(u)?;
        Ok(cu.iter().zip(self.sigma_d()).map(|(&x, &d)| (x / (d - e)).powi(2)).sum())
    }

    /// `(C_k(e), u_{k′}(e), ‖(D^g−e)⁻¹Bu‖²)`.
    pub fn curve_point(&self, e: T, k: usize) -> Result<(T, Vec<T>, T)> {
        let kp = self.local_index(e, k)?;
        let q = self.q_spectrum(e)?;
        let u = q.vector(kp).to_vec();
        let r = self.resolvent_image_norm_sqr(e, &u)?;
        Ok((q.values[kp], u, r))
    }

    /// `dC_k/de = −‖(D^g − e)⁻¹ B u_{k′}(e)‖²`.
    pub fn curve_slope(&self, e: T, k: usize) -> Result<T> {
        self.curve_point(e, k).map(|(_, _, r)| -r)
    }

    /// Root of `C_k(e) − e` in the open interval `(lo, hi)`, assuming
    /// `C_k(lo⁺) > lo` and `C_k(hi⁻) < hi` (endpoints are never evaluated).
    /// Midpoints falling within the singular tolerance of `σ(D^g)` are nudged off it.
    fn bisect(&self, k: usize, mut lo: T, mut hi: T) -> Result<T> {
        let two = T::lit(2.0);
        let nudge = T::lit(4.0 * SINGULAR_TOL);
        for _ in 0..MAX_BISECTIONS {
            let mut mid = lo + (hi - lo) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if let Some((d, dist)) = self.nearest_delta(mid) {
                if dist <= T::lit(SINGULAR_TOL) {
                    let cand = if mid < d { d - nudge } else { d + nudge };
                    let alt = if mid < d { d + nudge } else { d - nudge };
                    mid = if cand > lo && cand < hi {
                        cand
                    } else if alt > lo && alt < hi {
                        alt
                    } else {
                        // The bracket has collapsed onto an eigenvalue of D.
                        return Ok(d);
                    };
                }
            }
            let f = self.curve_value(mid, k)? - mid;
            if f > T::zero() {
                lo = mid;
            } else if f < T::zero() {
                hi = mid;
            } else {
                return Ok(mid);
            }
        }
        Ok(lo + (hi - lo) / two)
    }

    /// Fixed point of `C_k` inside a bracket free of `σ(D^g)`.
    pub fn fixed_point_in(&self, k: usize, lo: T, hi: T) -> Result<T> {
        if !(lo < hi) {
            return Err(invalid("bracket must satisfy lo < hi"));
        }
        if let Some(&d) = self.sigma_d().iter().find(|&&d| d >= lo && d <= hi) {
            return Err(Error::SingularEnergy { energy: lo.as_f64(), nearest: d.as_f64(), tolerance: SINGULAR_TOL });
        }
        let flo = self.curve_value(lo, k)? - lo;
        let fhi = self.curve_value(hi, k)? - hi;
        if flo == T::zero() {
            return Ok(lo);
        }
        if fhi == T::zero() {
            return Ok(hi);
        }
        if !(flo > T::zero() && fhi < T::zero()) {
            return Err(Error::NoSignChange { lo: lo.as_f64(), hi: hi.as_f64() });
        }
        self.bisect(k, lo, hi)
    }

    /// Fixed point of `C_k` over its whole domain (continuous across interior
    /// points of `σ(D^g)`); always exists and is an eigenvalue of `H^g`.
    pub fn fixed_point(&self, k: usize) -> Result<T> {
        let (lo, hi) = self.domain(k)?;
        let pad = self.bound + T::one();
        self.bisect(k, lo.max(-pad), hi.min(pad))
    }

    /// Fixed point of `C_k` given points `a < b` in its domain with `F(a) > 0 > F(b)`
    /// (either may be replaced by a domain end).
    pub fn refine_crossing(&self, k: usize, a: T, b: T) -> Result<T> {
        self.bisect(k, a, b)
    }

    /// Fixed points of every label, ordered by label.
    pub fn all_fixed_points(&self) -> Result<Vec<T>> {
        (0..self.n()).map(|k| self.fixed_point(k)).collect()
    }
}

fn symmetrize<T: Real>(m: &mut Matrix<T>) {
    let half = T::lit(0.5);
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            let v = (m[(i, j)] + m[(j, i)]) * half;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// `Q_e^g` for a single energy; prefer [`Reducer`] for repeated evaluation.
pub fn qmatrix<T: Real>(dec: &BlockDecomposition<T>, g: &DiagonalShift<T>, e: T) -> Result<Matrix<T>> {
    Reducer::new(dec, g)?.qmatrix(e)
}

/// `dC_k/de` at a single energy.
pub fn curve_slope_resolvent<T: Real>(dec: &BlockDecomposition<T>, g: &DiagonalShift<T>, e: T, k: usize) -> Result<T> {
    Reducer::new(dec, g)?.curve_slope(e, k)
}

/// Fixed point of `C_k` in `bracket`.
pub fn fixed_point_eigenvalue<T: Real>(
    dec: &BlockDecomposition<T>,
    g: &DiagonalShift<T>,
    k: usize,
    bracket: (T, T),
) -> Result<T> {
    Reducer::new(dec, g)?.fixed_point_in(k, bracket.0, bracket.1)
}

/// Sampled curve family on an energy grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveFamily<T> {
    pub w: usize,
    pub n: usize,
    /// Retained grid points (strictly increasing).
    pub e_grid: Vec<T>,
    /// Grid points dropped for lying within the singular tolerance of `σ(D^g)`.
    pub dropped: Vec<T>,
    pub sigma_d: Vec<T>,
    /// `N_D(e)` per retained grid point.
    pub counts: Vec<usize>,
    /// `ξ_1(e) … ξ_W(e)` per retained grid point; entry `k′` carries label `counts[i] + k′`.
    pub values: Vec<Vec<T>>,
}

/// A diagonal crossing `C_k(e) = e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing<T> {
    pub k: usize,
    pub e: T,
}

impl<T: Real> CurveFamily<T> {
    pub fn len(&self) -> usize {
        self.e_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_grid.is_empty()
    }

    pub fn labels_at(&self, i: usize) -> Range<usize> {
        self.counts[i]..self.counts[i] + self.w
    }

    pub fn value(&self, i: usize, k: usize) -> Option<T> {
        self.labels_at(i).contains(&k).then(|| self.values[i][k - self.counts[i]])
    }

    /// `(e, C_k(e))` over the grid points where `k` is defined.
    pub fn curve(&self, k: usize) -> Vec<(T, T)> {
        (0..self.len()).filter_map(|i| self.value(i, k).map(|v| (self.e_grid[i], v))).collect()
    }

    /// Labels present at some grid point, ascending.
    pub fn labels(&self) -> Range<usize> {
        match (self.counts.first(), self.counts.last()) {
            (Some(&a), Some(&b)) => a..b + self.w,
            _ => 0..0,
        }
    }

    /// `(e, k, C_k(e))` rows, grid-major.
    pub fn long_rows(&self) -> Vec<(T, usize, T)> {
        let mut rows = Vec::with_capacity(self.len() * self.w);
        for i in 0..self.len() {
            for (kp, &v) in self.values[i].iter().enumerate() {
                rows.push((self.e_grid[i], self.counts[i] + kp, v));
            }
        }
        rows
    }

    /// Diagonal crossings of every label seen on the grid: bracketed by grid
    /// sign changes of `C_k(e) − e` (or a domain end when the sign never
    /// changes on the grid) and refined by bisection.
    pub fn crossings(&self, reducer: &Reducer<T>) -> Result<Vec<Crossing<T>>> {
        let pad = reducer.spectral_bound() + T::one();
        let mut out = Vec::new();
        for k in self.labels() {
            let pts = self.curve(k);
            let (dlo, dhi) = reducer.domain(k)?;
            let (dlo, dhi) = (dlo.max(-pad), dhi.min(pad));
            let mut lo = dlo;
            let mut hi = dhi;
            for &(e, v) in &pts {
                if v - e > T::zero() {
                    lo = e;
                } else {
                    hi = e;
                    break;
                }
            }
            if lo >= hi {
                continue;
            }
            let e = reducer.refine_crossing(k, lo, hi)?;
            out.push(Crossing { k, e });
        }
        Ok(out)
    }
}

/// Evaluate all curves on `e_grid`; grid points too close to `σ(D^g)` are dropped and listed.
pub fn curve_family<T: Real>(reducer: &Reducer<T>, e_grid: &[T]) -> Result<CurveFamily<T>> {
    if e_grid.is_empty() {
        return Err(invalid("empty energy grid"));
    }
    if e_grid.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(invalid("energy grid must be strictly increasing"));
    }
    let mut fam = CurveFamily {
        w: reducer.w(),
        n: reducer.n(),
        e_grid: Vec::new(),
        dropped: Vec::new(),
        sigma_d: reducer.sigma_d().to_vec(),
        counts: Vec::new(),
        values: Vec::new(),
    };
    for &e in e_grid {
        if reducer.is_singular(e) {
            fam.dropped.push(e);
            continue;
        }
        fam.values.push(reducer.xi(e)?);
        fam.counts.push(reducer.count_below(e));
        fam.e_grid.push(e);
    }
    Ok(fam)
}

/// `n` equally spaced points on `[a, b]`.
pub fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * T::from_count(i) / T::from_count(n - 1)).collect(),
    }
}

/// Residuals `r_j = |C_j(e0) − e0 − (N/W)(λ_j − e0)|` for labels `j` in `window`,
/// plus the spacing ratios `(C_{j+1}(e0) − C_j(e0)) / (λ_{j+1} − λ_j)`.
pub fn affine_rescaling_residual<T: Real>(h: &Matrix<T>, w: usize, e0: T, window: Range<usize>) -> Result<DiagnosticsReport> {
    let n = h.rows();
    let dec = block_split(h, w, 0)?;
    let red = Reducer::new(&dec, &DiagonalShift::zero(n))?;
    let lambda = eigvalsh(h)?;
    let xi = red.xi(e0)?;
    let labels = red.labels_at(e0);
    let ratio = T::from_count(n) / T::from_count(w);
    let mut rep = DiagnosticsReport::new("affine_rescaling")
        .param("n", n)
        .param("w", w)
        .param("e0", e0.as_f64());
    let mut ratios = Vec::new();
    for j in window {
        if !labels.contains(&j) {
            return Err(invalid(format!("label {j} undefined at e0 (defined: {labels:?})")));
        }
        let c = xi[j - labels.start];
        let r = (c - e0 - ratio * (lambda[j] - e0)).abs();
        let mut rec = SampleRecord::new(j as u64, true, None).with("residual", r.as_f64()).with("c", c.as_f64());
        if labels.contains(&(j + 1)) && j + 1 < n {
            let s = (xi[j + 1 - labels.start] - c) / (lambda[j + 1] - lambda[j]);
            ratios.push(s.as_f64());
            rec = rec.with("spacing_ratio", s.as_f64());
        }
        rep.push(rec);
    }
    if !ratios.is_empty() {
        rep.extra("mean_spacing_ratio", ratios.iter().sum::<f64>() / ratios.len() as f64);
    }
    rep.extra("n_over_w", ratio.as_f64());
    Ok(rep)
}

/// One point of a `g`-sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint<T> {
    pub g: T,
    /// `λ_k^g`.
    pub lambda: T,
    /// `Σ_{i<W} |ψ_k^g(i)|²`.
    pub mass: T,
}

impl<T: Real> SweepPoint<T> {
    /// `λ_k^g + g`, the energy at which `C_k` of the unshifted matrix equals `λ_k^g`.
    pub fn energy(&self) -> T {
        self.lambda + self.g
    }

    /// First-order perturbation `∂λ_k^g/∂g = −1 + mass`.
    pub fn dlambda_dg(&self) -> T {
        self.mass - T::one()
    }

    /// `dC_k/de` at [`Self::energy`]: `1 − 1/mass`.
    pub fn curve_slope(&self) -> T {
        T::one() - T::one() / self.mass
    }
}

/// Track `λ_k` of `H − g·J′` (shift on the lower block only) as `g` varies.
/// Labels are the ascending eigenvalue index, which is continuous in `g`.
pub fn g_sweep<T: Real>(h: &Matrix<T>, w: usize, k: usize, g_values: &[T]) -> Result<Vec<SweepPoint<T>>> {
    let n = h.rows();
    if k >= n {
        return Err(invalid(format!("index {k} out of range 0..{n}")));
    }
    if w > n {
        return Err(invalid(format!("block size W = {w} exceeds N = {n}")));
    }
    g_values
        .iter()
        .map(|&g| {
            let hg = apply_diagonal_shift(h, &DiagonalShift::lower_block(n, w, g))?;
            let (vals, vecs) = eigh_selected(&hg, &[k])?;
            let mass = vecs[0][..w].iter().map(|x| *x * *x).sum();
            Ok(SweepPoint { g, lambda: vals[k], mass })
        })
        .collect()
}

/// Large-`|g|` limit of `λ_k^g` (0-based `k`): for `g → +∞` the lowest `N−W`
/// eigenvalues follow `δ_j − g` and the top `W` tend to `α`; for `g → −∞` the
/// lowest `W` tend to `α` and the rest follow `δ_j − g`.
pub fn large_shift_asymptote<T: Real>(alpha: &[T], delta: &[T], k: usize, g: T) -> T {
    let m = delta.len();
    if g > T::zero() {
        if k < m {
            delta[k] - g
        } else {
            alpha[k - m]
        }
    } else if k < alpha.len() {
        alpha[k]
    } else {
        delta[k - alpha.len()] - g
    }
}

/// Mass of `v` on its first `w` coordinates.
pub fn head_mass<T: Real>(v: &[T], w: usize) -> T {
    dot(&v[..w], &v[..w])
}
