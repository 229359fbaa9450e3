//! Dense symmetric eigensolver: Householder tridiagonalisation followed by
//! implicitly shifted QL iterations (EISPACK `tql2` shift strategy).

use crate::error::{Error, Result};
use crate::linalg::matrix::{axpy, dot, Matrix};
use crate::scalar::Real;

/// Sweep cap per eigenvalue in the QL iteration.
pub const MAX_QL_SWEEPS: usize = 50;

/// Relative off-diagonal decay tolerance for deflation (never below machine epsilon).
pub fn deflation_tol<T: Real>() -> T {
    T::lit(1e-14).max(T::epsilon())
}

/// Symmetric tridiagonal form `A = Q T Qᵀ`.
#[derive(Clone, Debug)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    /// `offdiag[i] = T[i+1][i]`.
    pub offdiag: Vec<T>,
    /// Rows of this matrix are the columns of `Q`.
    pub q_t: Option<Matrix<T>>,
}

/// Householder reduction of a symmetric matrix. Only the lower triangle is
/// assumed consistent with the upper one; callers check symmetry.
pub fn tridiagonalize<T: Real>(a: &Matrix<T>, want_q: bool) -> Tridiagonal<T> {
    let n = a.rows();
    let mut w = a.clone();
    let mut offdiag = vec![T::zero(); n.saturating_sub(1)];
    let mut reflectors: Vec<(Vec<T>, T)> = Vec::with_capacity(n.saturating_sub(2));

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<T> = w.row(k)[k + 1..].to_vec();
        let xnorm = x.iter().fold(T::zero(), |s, &v| s.hypot(v));
        if xnorm == T::zero() {
            offdiag[k] = T::zero();
            reflectors.push((vec![T::zero(); m], T::zero()));
            continue;
        }
        let alpha = if x[0] > T::zero() { -xnorm } else { xnorm };
        let mut v = x;
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        let beta = T::lit(2.0) / vtv;
        offdiag[k] = alpha;

        // p = beta * A22 v
        let mut p = vec![T::zero(); m];
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = beta * dot(&w.row(k + 1 + i)[k + 1..], &v);
        }
        let kk = beta * dot(&p, &v) / T::lit(2.0);
        let q: Vec<T> = p.iter().zip(&v).map(|(&pi, &vi)| pi - kk * vi).collect();
        for i in 0..m {
            let row = &mut w.row_mut(k + 1 + i)[k + 1..];
            let (vi, qi) = (v[i], q[i]);
            for j in 0..m {
                row[j] -= vi * q[j] + qi * v[j];
            }
        }
        // Row/column k now carry (alpha, 0, ..., 0).
        for j in k + 1..n {
            let val = if j == k + 1 { alpha } else { T::zero() };
            w[(k, j)] = val;
            w[(j, k)] = val;
        }
        reflectors.push((v, beta));
    }
    if n >= 2 {
        offdiag[n - 2] = w[(n - 1, n - 2)];
    }
    let diag = w.diagonal();

    let q_t = want_q.then(|| {
        let mut q = Matrix::identity(n);
        for (k, (v, beta)) in reflectors.iter().enumerate().rev() {
            if *beta == T::zero() {
                continue;
            }
            let off = k + 1;
            let m = n - off;
            let mut wrow = vec![T::zero(); m];
            for (i, &vi) in v.iter().enumerate() {
                if vi != T::zero() {
                    axpy(vi, &q.row(off + i)[off..], &mut wrow);
                }
            }
            for (i, &vi) in v.iter().enumerate() {
                let c = -*beta * vi;
                if c != T::zero() {
                    axpy(c, &wrow, &mut q.row_mut(off + i)[off..]);
                }
            }
        }
        q.transpose()
    });

    Tridiagonal { diag, offdiag, q_t }
}

/// Implicit QL on a symmetric tridiagonal matrix. On success `d` holds the
/// eigenvalues (unsorted) and, when given, the rows of `vt` are rotated so
/// that row `i` is the eigenvector of `d[i]`.
pub fn tridiagonal_ql<T: Real>(d: &mut [T], offdiag: &[T], mut vt: Option<&mut Matrix<T>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let mut e: Vec<T> = offdiag.to_vec();
    e.push(T::zero());
    let tol = deflation_tol::<T>();
    let two = T::lit(2.0);

    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= tol * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence { iterations: MAX_QL_SWEEPS, index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = vt.as_deref_mut() {
                        let (ri, ri1) = v.row_pair_mut(i, i + 1);
                        for (a, b) in ri.iter_mut().zip(ri1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= tol * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

/// Ascending permutation of `values` (NaN-free input assumed).
pub(crate) fn ascending_order<T: Real>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

/// Eigenvalues (ascending) and eigenvectors stored as rows.
pub fn symmetric_eigen<T: Real>(a: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    let n = a.rows();
    let tri = tridiagonalize(a, true);
    let mut d = tri.diag;
    let mut vt = tri.q_t.expect("requested Q");
    tridiagonal_ql(&mut d, &tri.offdiag, Some(&mut vt))?;
    let order = ascending_order(&d);
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.row_mut(dst).copy_from_slice(vt.row(src));
    }
    Ok((values, vectors))
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    let tri = tridiagonalize(a, false);
    let mut d = tri.diag;
    tridiagonal_ql(&mut d, &tri.offdiag, None)?;
    let order = ascending_order(&d);
    Ok(order.iter().map(|&i| d[i]).collect())
}

/// All eigenvalues plus eigenvectors for the requested (0-based, ascending)
/// indices only, via inverse iteration on the tridiagonal form.
pub fn symmetric_eigen_selected<T: Real>(a: &Matrix<T>, indices: &[usize]) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = a.rows();
    let tri = tridiagonalize(a, true);
    let mut d = tri.diag.clone();
    tridiagonal_ql(&mut d, &tri.offdiag, None)?;
    let order = ascending_order(&d);
    let values: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let scale = tri
        .diag
        .iter()
        .chain(tri.offdiag.iter())
        .fold(T::zero(), |m, x| m.max(x.abs()))
        .max(T::min_positive_value());
    let cluster_gap = T::lit(1e-3) * scale;

    let q_t = tri.q_t.as_ref().expect("requested Q");
    let mut tri_vecs: Vec<(usize, Vec<T>)> = Vec::with_capacity(indices.len());
    let mut out = Vec::with_capacity(indices.len());
    for &k in indices {
        if k >= n {
            return Err(Error::InvalidArgument(format!("eigen index {k} out of range for n = {n}")));
        }
        let lambda = values[k];
        let neighbours: Vec<&Vec<T>> = tri_vecs
            .iter()
            .filter(|(j, _)| (values[*j] - lambda).abs() < cluster_gap)
            .map(|(_, v)| v)
            .collect();
        let z = inverse_iteration(&tri.diag, &tri.offdiag, lambda, scale, k, &neighbours);
        // Back-transform: ψ = Q z = Σ z_i (row i of Qᵀ).
        let mut psi = vec![T::zero(); n];
        for (i, &zi) in z.iter().enumerate() {
            if zi != T::zero() {
                axpy(zi, q_t.row(i), &mut psi);
            }
        }
        tri_vecs.push((k, z));
        out.push(psi);
    }
    Ok((values, out))
}

fn inverse_iteration<T: Real>(diag: &[T], off: &[T], lambda: T, scale: T, seed: usize, ortho: &[&Vec<T>]) -> Vec<T> {
    let n = diag.len();
    if n == 1 {
        return vec![T::one()];
    }
    let shift = lambda + T::lit(4.0) * T::epsilon() * scale;
    let lu = TridiagLu::factor(diag, off, shift, scale);
    // Deterministic, index-dependent start vector.
    let mut x: Vec<T> = (0..n)
        .map(|i| T::one() + T::lit(0.37) * T::from_count((i * 7919 + seed * 104_729) % 1009) / T::lit(1009.0))
        .collect();
    for _ in 0..4 {
        for v in ortho {
            let c = dot(&x, v);
            axpy(-c, v, &mut x);
        }
        let nrm = dot(&x, &x).sqrt();
        for xi in x.iter_mut() {
            *xi /= nrm;
        }
        lu.solve_in_place(&mut x);
    }
    for v in ortho {
        let c = dot(&x, v);
        axpy(-c, v, &mut x);
    }
    let nrm = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|xi| *xi /= nrm);
    x
}

/// LU with partial pivoting of `T - shift·I` for symmetric tridiagonal `T`.
struct TridiagLu<T> {
    l: Vec<T>,
    u0: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Real> TridiagLu<T> {
    fn factor(diag: &[T], off: &[T], shift: T, scale: T) -> Self {
        let n = diag.len();
        let tiny = T::epsilon() * scale;
        let mut b: Vec<T> = diag.iter().map(|&x| x - shift).collect();
        let mut a: Vec<T> = off.to_vec();
        let mut c: Vec<T> = off.to_vec();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if b[i].abs() >= a[i].abs() {
                if b[i] == T::zero() {
                    b[i] = tiny;
                }
                let fact = a[i] / b[i];
                a[i] = fact;
                b[i + 1] -= fact * c[i];
            } else {
                let fact = b[i] / a[i];
                b[i] = a[i];
                a[i] = fact;
                let temp = c[i];
                c[i] = b[i + 1];
                b[i + 1] = temp - fact * b[i + 1];
                if i + 2 < n {
                    du2[i] = c[i + 1];
                    c[i + 1] = -fact * c[i + 1];
                }
                swapped[i] = true;
            }
        }
        if b[n - 1] == T::zero() {
            b[n - 1] = tiny;
        }
        Self { l: a, u0: b, u1: c, u2: du2, swapped }
    }

    fn solve_in_place(&self, x: &mut [T]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let t = x[i];
                x[i] = x[i + 1];
                x[i + 1] = t - self.l[i] * x[i];
            } else {
                x[i + 1] -= self.l[i] * x[i];
            }
        }
        x[n - 1] /= self.u0[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.u1[n - 2] * x[n - 1]) / self.u0[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.u1[i] * x[i + 1] - self.u2[i] * x[i + 2]) / self.u0[i];
        }
        // Rescale to keep the iteration away from overflow.
        let m = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if m > T::zero() && m.is_finite() {
            x.iter_mut().for_each(|v| *v /= m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn tridiagonal_similarity_reconstructs() {
        let a = sym(9, 3);
        let t = tridiagonalize(&a, true);
        let n = 9;
        let mut tm = Matrix::zeros(n, n);
        for i in 0..n {
            tm[(i, i)] = t.diag[i];
            if i + 1 < n {
                tm[(i + 1, i)] = t.offdiag[i];
                tm[(i, i + 1)] = t.offdiag[i];
            }
        }
        let q = t.q_t.unwrap().transpose();
        let back = q.matmul(&tm).unwrap().matmul(&q.transpose()).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn selected_vectors_match_full() {
        let a = sym(40, 11);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        let (vals2, sel) = symmetric_eigen_selected(&a, &[0, 17, 18, 39]).unwrap();
        for (x, y) in vals.iter().zip(&vals2) {
            assert!((x - y).abs() < 1e-12);
        }
        for (v, &k) in sel.iter().zip(&[0usize, 17, 18, 39]) {
            let overlap = dot(v, vecs.row(k)).abs();
            assert!((overlap - 1.0).abs() < 1e-10, "k={k} overlap={overlap}");
        }
    }

    #[test]
    fn values_only_matches_full() {
        let a = sym(25, 5);
        let (vals, _) = symmetric_eigen(&a).unwrap();
        let vals2 = symmetric_eigenvalues(&a).unwrap();
        for (x, y) in vals.iter().zip(&vals2) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn works_in_f32() {
        let a = sym(12, 8).map(|&x| x as f32);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        for k in 0..12 {
            let av = a.matvec(vecs.row(k)).unwrap();
            let res: f32 = av.iter().zip(vecs.row(k)).map(|(x, v)| (x - vals[k] * v).powi(2)).sum::<f32>().sqrt();
            assert!(res < 1e-5);
        }
    }
}
