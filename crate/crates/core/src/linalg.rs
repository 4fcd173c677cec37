//! Small dense kernels used by the solvers. Matrices here are at most
//! `m x L` (least squares on an OMP support) so nothing is blocked.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

/// `||a - b||^2`
#[inline]
pub fn dist_sq<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Thin SVD `A = U diag(s) V^T` of an `rows x cols` column-major matrix by
/// one-sided Jacobi rotations. Returns `(U, s, V)` with `U` column major
/// `rows x cols` and `V` column major `cols x cols`.
pub fn jacobi_svd<T: Real>(a: &[T], rows: usize, cols: usize) -> (Vec<T>, Vec<T>, Vec<T>) {
    debug_assert_eq!(a.len(), rows * cols);
    let mut u = a.to_vec();
    let mut v = vec![T::zero(); cols * cols];
    for k in 0..cols {
        v[k * cols + k] = T::one();
    }
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (alpha, beta, gamma) = {
                    let up = &u[p * rows..(p + 1) * rows];
                    let uq = &u[q * rows..(q + 1) * rows];
                    (norm_sq(up), norm_sq(uq), dot(up, uq))
                };
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let two = T::of(2.0);
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut u, rows, p, q, c, s);
                rotate_columns(&mut v, cols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = Vec::with_capacity(cols);
    for k in 0..cols {
        let col = &mut u[k * rows..(k + 1) * rows];
        let n = norm(col);
        if n > T::zero() {
            col.iter_mut().for_each(|x| *x = *x / n);
        }
        sigma.push(n);
    }
    (u, sigma, v)
}

fn rotate_columns<T: Real>(m: &mut [T], rows: usize, p: usize, q: usize, c: T, s: T) {
    for i in 0..rows {
        let xp = m[p * rows + i];
        let xq = m[q * rows + i];
        m[p * rows + i] = c * xp - s * xq;
        m[q * rows + i] = s * xp + c * xq;
    }
}

/// Minimum-norm least squares `argmin ||A x - b||` through the
/// pseudoinverse. Singular values below `rcond * s_max` are dropped.
pub fn lstsq_min_norm<T: Real>(a: &[T], rows: usize, cols: usize, b: &[T], rcond: T) -> Vec<T> {
    let (u, s, v) = jacobi_svd(a, rows, cols);
    let smax = s.iter().fold(T::zero(), |m, &x| m.max(x));
    let mut x = vec![T::zero(); cols];
    if smax == T::zero() {
        return x;
    }
    for k in 0..cols {
        if s[k] <= rcond * smax {
            continue;
        }
        let coef = dot(&u[k * rows..(k + 1) * rows], b) / s[k];
        axpy(coef, &v[k * cols..(k + 1) * cols], &mut x);
    }
    x
}

/// Largest eigenvalue of `A^T A` (the squared spectral norm of `A`) by
/// power iteration from the all-ones vector.
pub fn spectral_norm_sq<T: Real>(apply: impl Fn(&[T]) -> Vec<T>, apply_t: impl Fn(&[T]) -> Vec<T>, n: usize) -> T {
    if n == 0 {
        return T::zero();
    }
    let mut x = vec![T::one() / T::of(n as f64).sqrt(); n];
    let mut lambda = T::zero();
    let tol = T::of(1e-13).max(T::epsilon() * T::of(8.0));
    for _ in 0..5000 {
        let y = apply_t(&apply(&x));
        let ny = norm(&y);
        if ny == T::zero() {
            return T::zero();
        }
        let next = ny;
        x = y.into_iter().map(|v| v / ny).collect();
        if (next - lambda).abs() <= tol * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda
}
