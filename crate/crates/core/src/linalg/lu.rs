//! Complex LU with partial pivoting, used for resolvents of non-Hermitian pencils.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::scalar::Real;

/// Condition-number cap above which inversions are refused.
pub const CONDITION_CAP: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct ComplexLu<T> {
    lu: Matrix<Complex<T>>,
    perm: Vec<usize>,
    norm1: T,
}

impl<T: Real> ComplexLu<T> {
    pub fn factor(a: &Matrix<Complex<T>>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), actual: a.cols() });
        }
        let n = a.rows();
        let norm1 = (0..n)
            .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max);
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (mut piv, mut best) = (k, T::zero());
            for i in k..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == T::zero() {
                return Err(Error::SingularMatrix { condition: f64::INFINITY });
            }
            if piv != k {
                let (r1, r2) = lu.row_pair_mut(k, piv);
                r1.swap_with_slice(r2);
                perm.swap(k, piv);
            }
            let inv = Complex::<T>::one() / lu[(k, k)];
            let pivot_row: Vec<Complex<T>> = lu.row(k)[k + 1..].to_vec();
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                let row = &mut lu.row_mut(i)[k + 1..];
                for (r, &p) in row.iter_mut().zip(&pivot_row) {
                    *r -= f * p;
                }
            }
        }
        Ok(Self { lu, perm, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Full inverse together with the 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
    pub fn inverse(&self) -> (Matrix<Complex<T>>, T) {
        let n = self.dim();
        let mut inv_t = Matrix::zeros(n, n);
        let mut e = vec![Complex::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex::zero());
            e[j] = Complex::one();
            let col = self.solve(&e);
            inv_t.row_mut(j).copy_from_slice(&col);
        }
        let inv_norm1 = (0..n).map(|j| inv_t.row(j).iter().map(|z| z.norm()).sum::<T>()).fold(T::zero(), T::max);
        (inv_t.transpose(), self.norm1 * inv_norm1)
    }
}

/// Inverse of a complex matrix; refuses when the condition estimate exceeds [`CONDITION_CAP`].
pub fn complex_inverse<T: Real>(a: &Matrix<Complex<T>>) -> Result<(Matrix<Complex<T>>, T)> {
    let lu = ComplexLu::factor(a)?;
    let (inv, cond) = lu.inverse();
    if !cond.is_finite() || cond > T::lit(CONDITION_CAP) {
        return Err(Error::SingularMatrix { condition: cond.as_f64() });
    }
    Ok((inv, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = Matrix::from_fn(5, 5, |i, j| {
            Complex::new(((i * 3 + j * 7) % 5) as f64 - 2.0, if i == j { 0.5 } else { 0.1 * (i as f64 - j as f64) })
        });
        let (inv, cond) = complex_inverse(&a).unwrap();
        assert!(cond.is_finite());
        let prod = a.matmul_c(&inv).unwrap();
        let id = Matrix::<f64>::identity(5).to_complex();
        assert!(prod.max_abs_diff_c(&id) < 1e-12);
    }

    #[test]
    fn singular_is_refused() {
        let a = Matrix::from_fn(3, 3, |i, _| Complex::new(i as f64, 0.0));
        assert!(matches!(complex_inverse(&a), Err(Error::SingularMatrix { .. })));
    }
}
