//! Spectra, resolvents and semicircle reference quantities.

use num_complex::Complex;
use num_traits::Zero;

use crate::ensemble::{apply_diagonal_shift, DiagonalShift};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Real;

/// Ordered eigenvalues `λ_1 ≤ … ≤ λ_N` with orthonormal eigenvectors.
///
/// Eigenvector `k` is stored as row `k` of `vectors`; each is normalised so
/// that its first entry of largest magnitude is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> &[T] {
        self.vectors.row(k)
    }

    /// `max_k ‖M ψ_k − λ_k ψ_k‖`.
    pub fn max_residual(&self, m: &Matrix<T>) -> T {
        (0..self.len())
            .map(|k| {
                let v = self.vector(k);
                let mv = m.matvec(v).expect("dimension checked at construction");
                mv.iter().zip(v).map(|(&a, &b)| (a - self.values[k] * b).powi(2)).sum::<T>().sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// `max |ΨᵀΨ − I|` entrywise.
    pub fn orthonormality_error(&self) -> T {
        let g = self.vectors.matmul(&self.vectors.transpose()).expect("square");
        g.max_abs_diff(&Matrix::identity(self.len()))
    }

    /// `Ψ Λ Ψᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let mut scaled = self.vectors.clone();
        for k in 0..self.len() {
            let l = self.values[k];
            scaled.row_mut(k).iter_mut().for_each(|x| *x *= l);
        }
        self.vectors.tr_matmul(&scaled).expect("square")
    }

    /// Resolvent `(M − z)⁻¹ = Ψ (Λ − z)⁻¹ Ψᵀ`.
    pub fn resolvent(&self, z: Complex<T>) -> Matrix<Complex<T>> {
        let n = self.len();
        let mut re = self.vectors.clone();
        let mut im = self.vectors.clone();
        for k in 0..n {
            let d = Complex::new(T::one(), T::zero()) / (Complex::new(self.values[k], T::zero()) - z);
            re.row_mut(k).iter_mut().for_each(|x| *x *= d.re);
            im.row_mut(k).iter_mut().for_each(|x| *x *= d.im);
        }
        let gr = self.vectors.tr_matmul(&re).expect("square");
        let gi = self.vectors.tr_matmul(&im).expect("square");
        Matrix::from_fn(n, n, |i, j| Complex::new(gr[(i, j)], gi[(i, j)]))
    }
}

fn check_symmetric<T: Real>(m: &Matrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), actual: m.cols() });
    }
    if !m.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    let tol = T::lit(1e-12) * m.max_abs().max(T::one());
    if !m.is_symmetric(tol) {
        return Err(invalid("matrix is not symmetric"));
    }
    Ok(())
}

fn fix_sign<T: Real>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < T::zero()) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Full symmetric eigendecomposition.
pub fn eigh<T: Real>(m: &Matrix<T>) -> Result<Spectrum<T>> {
    check_symmetric(m)?;
    let (values, mut vectors) = linalg::symmetric_eigen(m)?;
    for k in 0..values.len() {
        fix_sign(vectors.row_mut(k));
    }
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh<T: Real>(m: &Matrix<T>) -> Result<Vec<T>> {
    check_symmetric(m)?;
    linalg::symmetric_eigenvalues(m)
}

/// All eigenvalues and the eigenvectors for `indices` (0-based, ascending order).
pub fn eigh_selected<T: Real>(m: &Matrix<T>, indices: &[usize]) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    check_symmetric(m)?;
    let (values, mut vecs) = linalg::symmetric_eigen_selected(m, indices)?;
    vecs.iter_mut().for_each(|v| fix_sign(v));
    Ok((values, vecs))
}

/// `ρ_sc(x) = (1/2π) √((4 − x²)₊)`.
pub fn semicircle_density<T: Real>(x: T) -> T {
    let r = T::lit(4.0) - x * x;
    if r <= T::zero() {
        T::zero()
    } else {
        r.sqrt() / (T::lit(2.0) * T::PI())
    }
}

/// `∫_{-∞}^x ρ_sc`.
pub fn semicircle_cdf<T: Real>(x: T) -> T {
    let two = T::lit(2.0);
    if x <= -two {
        return T::zero();
    }
    if x >= two {
        return T::one();
    }
    let pi = T::PI();
    T::lit(0.5) + x * (T::lit(4.0) - x * x).sqrt() / (T::lit(4.0) * pi) + (x / two).asin() / pi
}

/// Stieltjes transform `m(z) = ∫ ρ_sc(s)/(s − z) ds`, the root of
/// `m² + z m + 1 = 0` that is holomorphic off `[−2, 2]` and vanishes at infinity.
pub fn semicircle_stieltjes<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let two = T::lit(2.0);
    if z.im == T::zero() {
        let x = z.re;
        if x.abs() <= two {
            return Err(invalid(format!("z = {x} lies on the branch cut [-2, 2]")));
        }
        let r = (x * x - T::lit(4.0)).sqrt();
        let m = -two / (x + x.signum() * r);
        return Ok(Complex::new(m, T::zero()));
    }
    if z.im < T::zero() {
        return semicircle_stieltjes(z.conj()).map(|m| m.conj());
    }
    let c2 = Complex::new(two, T::zero());
    let r = (z - c2).sqrt() * (z + c2).sqrt();
    // m = (−z + r)/2 = −2/(z + r); the second form avoids cancellation.
    Ok(-c2 / (z + r))
}

/// Classical locations `γ_j`, `j/N = ∫_{-∞}^{γ_j} ρ_sc`, for `j = 1..=N`.
pub fn classical_locations<T: Real>(n: usize) -> Vec<T> {
    let two = T::lit(2.0);
    (1..=n)
        .map(|j| {
            if j == n {
                return two;
            }
            let target = T::from_count(j) / T::from_count(n);
            let (mut lo, mut hi) = (-two, two);
            for _ in 0..200 {
                let mid = (lo + hi) / two;
                if mid <= lo || mid >= hi {
                    break;
                }
                if semicircle_cdf(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo + hi) / two
        })
        .collect()
}

/// `m_N(z) = (1/N) Σ_k 1/(λ_k − z)`.
pub fn empirical_stieltjes<T: Real>(eigenvalues: &[T], z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() {
        return Err(invalid("empirical Stieltjes transform needs Im z != 0"));
    }
    if eigenvalues.is_empty() {
        return Err(invalid("empty spectrum"));
    }
    let s = eigenvalues
        .iter()
        .fold(Complex::zero(), |acc, &l| acc + Complex::new(T::one(), T::zero()) / (Complex::new(l, T::zero()) - z));
    Ok(s / T::from_count(eigenvalues.len()))
}

/// `(H − z)⁻¹` by dense complex LU.
pub fn resolvent_dense<T: Real>(h: &Matrix<T>, z: Complex<T>) -> Result<Matrix<Complex<T>>> {
    let mut m = h.to_complex();
    for i in 0..h.rows() {
        m[(i, i)] -= z;
    }
    linalg::complex_inverse(&m).map(|(g, _)| g)
}

/// `G(z, z′) = (H^g − zJ − z′J′)⁻¹` with `J` the projection on the first `W` coordinates.
#[derive(Clone, Debug)]
pub struct GeneralizedGreen<T> {
    pub z: Complex<T>,
    pub zprime: Complex<T>,
    pub w: usize,
    pub g: Matrix<Complex<T>>,
    pub condition: T,
}

impl<T: Real> GeneralizedGreen<T> {
    /// Top-left `W × W` block.
    pub fn top_block(&self) -> Matrix<Complex<T>> {
        self.g.submatrix(0, 0, self.w, self.w)
    }
}

/// The pencil `H^g − zJ − z′J′`.
pub fn generalized_pencil<T: Real>(
    h: &Matrix<T>,
    g: &DiagonalShift<T>,
    w: usize,
    z: Complex<T>,
    zprime: Complex<T>,
) -> Result<Matrix<Complex<T>>> {
    if w > h.rows() {
        return Err(invalid(format!("block size W = {w} exceeds N = {}", h.rows())));
    }
    let hg = apply_diagonal_shift(h, g)?;
    let mut m = hg.to_complex();
    for i in 0..h.rows() {
        m[(i, i)] -= if i < w { z } else { zprime };
    }
    Ok(m)
}

pub fn generalized_green<T: Real>(
    h: &Matrix<T>,
    g: &DiagonalShift<T>,
    w: usize,
    z: Complex<T>,
    zprime: Complex<T>,
) -> Result<GeneralizedGreen<T>> {
    let m = generalized_pencil(h, g, w, z, zprime)?;
    let (inv, condition) = linalg::complex_inverse(&m)?;
    Ok(GeneralizedGreen { z, zprime, w, g: inv, condition })
}

/// `| ‖G‖²_HS − η⁻¹ Im tr G |` for a resolvent `G = G(z)`, `η = Im z > 0`.
///
/// Only meaningful for true resolvents (`z = z′`); for generalized Green
/// functions with `z ≠ z′` the identity does not hold.
pub fn ward_residual<T: Real>(g: &Matrix<Complex<T>>, z: Complex<T>) -> Result<T> {
    if z.im <= T::zero() {
        return Err(invalid("Ward identity requires Im z > 0"));
    }
    Ok((g.hs_norm_sqr() - g.trace().im / z.im).abs())
}

/// Same quantity evaluated on a spectrum: `Σ 1/|λ−z|²` versus `η⁻¹ Σ Im 1/(λ−z)`.
pub fn ward_residual_spectral<T: Real>(eigenvalues: &[T], z: Complex<T>) -> Result<T> {
    if z.im <= T::zero() {
        return Err(invalid("Ward identity requires Im z > 0"));
    }
    let (mut hs, mut imtr) = (T::zero(), T::zero());
    for &l in eigenvalues {
        let d = Complex::new(l, T::zero()) - z;
        hs += T::one() / d.norm_sqr();
        imtr += (Complex::new(T::one(), T::zero()) / d).im;
    }
    Ok((hs - imtr / z.im).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x() {
        let m = Matrix::from_rows(&[vec![0.0f64, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = eigh(&m).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-15 && (s.values[1] - 1.0).abs() < 1e-15);
        assert!(s.max_residual(&m) < 1e-14);
    }

    #[test]
    fn identity_gives_standard_basis() {
        let s = eigh(&Matrix::<f64>::identity(5)).unwrap();
        assert!(s.values.iter().all(|&v| v == 1.0));
        for k in 0..5 {
            let nonzero: Vec<usize> = (0..5).filter(|&i| s.vector(k)[i] != 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(s.vector(k)[nonzero[0]], 1.0);
        }
    }

    #[test]
    fn rejects_asymmetric_and_nonfinite() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(eigh(&m).is_err());
        let m = Matrix::from_rows(&[vec![f64::NAN, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(eigvalsh(&m).is_err());
    }

    #[test]
    fn density_values() {
        assert!((semicircle_density(0.0f64) - 1.0 / std::f64::consts::PI).abs() < 1e-16);
        assert_eq!(semicircle_density(2.0f64), 0.0);
        assert_eq!(semicircle_density(-2.0f64), 0.0);
        assert_eq!(semicircle_density(3.0f64), 0.0);
    }

    #[test]
    fn stieltjes_at_i_is_golden() {
        let m = semicircle_stieltjes(Complex::new(0.0f64, 1.0)).unwrap();
        assert!(m.re.abs() < 1e-15);
        assert!((m.im - 0.618_033_988_749_894_8).abs() < 1e-12);
    }

    #[test]
    fn stieltjes_branch_cut_and_real_axis() {
        assert!(semicircle_stieltjes(Complex::new(1.0f64, 0.0)).is_err());
        let m = semicircle_stieltjes(Complex::new(3.0f64, 0.0)).unwrap();
        assert!((m.re - (-3.0 + 5.0f64.sqrt()) / 2.0).abs() < 1e-15);
        let m = semicircle_stieltjes(Complex::new(-3.0f64, 0.0)).unwrap();
        assert!((m.re - (3.0 - 5.0f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn stieltjes_reflection() {
        let z = Complex::new(0.7f64, -0.2);
        let a = semicircle_stieltjes(z).unwrap();
        let b = semicircle_stieltjes(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
        assert!(a.im < 0.0);
    }

    #[test]
    fn classical_location_symmetry_and_edge() {
        let g: Vec<f64> = classical_locations(10);
        assert_eq!(g[9], 2.0);
        assert!(g[4].abs() < 1e-14);
        for w in g.windows(2) {
            assert!(w[0] < w[1]);
        }
        let g: Vec<f64> = classical_locations(11);
        for j in 0..10 {
            // γ_j = −γ_{N−j} for j < N
            assert!((g[j] + g[9 - j]).abs() < 1e-13);
        }
    }

    #[test]
    fn one_point_spectrum_stieltjes() {
        let m = empirical_stieltjes(&[0.0f64], Complex::new(0.0, 1.0)).unwrap();
        assert!((m - Complex::new(0.0, 1.0)).norm() < 1e-16);
        assert!(empirical_stieltjes(&[0.0f64], Complex::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn ward_on_diagonal_matrix() {
        let vals = [-1.0, 0.25, 2.0];
        let h = Matrix::from_diagonal(&vals);
        let z = Complex::new(0.1, 0.3);
        let g = resolvent_dense(&h, z).unwrap();
        for (i, &l) in vals.iter().enumerate() {
            let expected = Complex::new(1.0, 0.0) / (Complex::new(l, 0.0) - z);
            assert!((g[(i, i)] - expected).norm() < 1e-15);
        }
        assert!(ward_residual(&g, z).unwrap() < 1e-14);
        assert!(ward_residual(&g, z.conj()).is_err());
    }
}
