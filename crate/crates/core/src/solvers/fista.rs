use crate::dictionary::EmbeddingDictionary;
use crate::error::Result;
use crate::linalg;
use crate::scalar::Real;
use crate::signal::EmbeddingSum;

use super::{check_dims, round_to_bow, Candidate, SolverConfig};

#[derive(Debug, Clone)]
pub struct FistaOutcome<T> {
    /// Rounded solution, rescored on the integer vector.
    pub candidate: Candidate<T>,
    /// Best real iterate (lowest objective seen).
    pub coefficients: Vec<T>,
    /// `0.5 ||y - Dx||^2 + tau ||x||_1` at `coefficients`.
    pub objective: T,
    pub tau: T,
    pub iterations: usize,
    /// False when `fista_max_iter` ran out before the tolerance was met.
    pub converged: bool,
}

/// `sign(v) max(|v| - t, 0)`, or `max(v - t, 0)` when `nonnegative`.
#[inline]
pub fn soft_threshold<T: Real>(v: T, t: T, nonnegative: bool) -> T {
    if nonnegative {
        (v - t).max(T::zero())
    } else if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

/// Basis pursuit denoising by FISTA on
/// `F(x) = 0.5 ||y - Dx||^2 + tau ||x||_1`, `tau = 1 / (2 lambda)`.
///
/// Step size is `1 / ||D||_2^2` (power iteration). Iterates stop when the
/// relative change of `F` falls below `fista_tol` or after
/// `fista_max_iter` steps; the best iterate is rounded with
/// [`round_to_bow`] (negatives clipped).
pub fn fista_bpdn<T: Real>(
    dict: &EmbeddingDictionary<T>,
    y: &EmbeddingSum<T>,
    cfg: &SolverConfig,
) -> Result<FistaOutcome<T>> {
    cfg.validate()?;
    check_dims(dict, y)?;
    let d = dict.len();
    let tau = T::of(cfg.fista_tau());
    let tol = T::of(cfg.fista_tol);
    let half = T::of(0.5);

    let objective = |x: &[T]| -> T {
        let fit = dict.apply(x);
        let l1 = x.iter().fold(T::zero(), |acc, v| acc + v.abs());
        half * linalg::dist_sq(y.values(), &fit) + tau * l1
    };

    let lipschitz = linalg::spectral_norm_sq(|x| dict.apply(x), |r| dict.apply_transpose(r), d);
    let step = T::one() / lipschitz;
    let shrink = tau * step;

    let mut x = vec![T::zero(); d];
    let mut z = x.clone();
    let mut t = T::one();
    let mut f_prev = objective(&x);
    let mut best = x.clone();
    let mut f_best = f_prev;
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=cfg.fista_max_iter {
        iterations = k;
        let fit = dict.apply(&z);
        let r: Vec<T> = fit.iter().zip(y.values()).map(|(&a, &b)| a - b).collect();
        let grad = dict.apply_transpose(&r);
        let x_next: Vec<T> = z
            .iter()
            .zip(&grad)
            .map(|(&zi, &gi)| soft_threshold(zi - step * gi, shrink, cfg.fista_nonnegative))
            .collect();
        let t_next = (T::one() + (T::one() + T::of(4.0) * t * t).sqrt()) * half;
        let momentum = (t - T::one()) / t_next;
        z = x_next.iter().zip(&x).map(|(&xn, &xo)| xn + momentum * (xn - xo)).collect();
        x = x_next;
        t = t_next;

        let f = objective(&x);
        if f < f_best {
            f_best = f;
            best.clone_from(&x);
        }
        let scale = f_prev.abs().max(T::min_positive_value());
        if (f - f_prev).abs() <= tol * scale {
            converged = true;
            break;
        }
        f_prev = f;
    }

    let candidate = Candidate::score(dict, y, round_to_bow(&best, cfg.max_words))?;
    Ok(FistaOutcome { candidate, coefficients: best, objective: f_best, tau, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> EmbeddingDictionary<f64> {
        let words = (0..n).map(|i| format!("w{i}")).collect();
        let cols = (0..n).map(|i| (0..n).map(|k| (k == i) as u8 as f64).collect()).collect();
        EmbeddingDictionary::from_columns(words, n, cols).unwrap()
    }

    #[test]
    fn thresholding() {
        assert_eq!(soft_threshold(5.0, 0.1, false), 4.9);
        assert_eq!(soft_threshold(-5.0, 0.1, false), -4.9);
        assert_eq!(soft_threshold(0.05, 0.1, false), 0.0);
        assert_eq!(soft_threshold(-5.0, 0.1, true), 0.0);
    }

    #[test]
    fn zero_measurement() {
        let out = fista_bpdn(&identity(3), &EmbeddingSum::zeros(3), &SolverConfig::default()).unwrap();
        assert!(out.coefficients.iter().all(|&v| v == 0.0));
        assert!(out.candidate.bow.is_empty());
        assert!(out.converged);
    }

    #[test]
    fn orthogonal_closed_form() {
        let cfg = SolverConfig { max_words: 6, ..Default::default() }.with_fista_tau(0.1);
        let y = EmbeddingSum::new(vec![5.0, 0.0]).unwrap();
        let out = fista_bpdn(&identity(2), &y, &cfg).unwrap();
        assert!((out.coefficients[0] - 4.9).abs() < 1e-6);
        assert!(out.coefficients[1].abs() < 1e-6);
        assert_eq!(out.candidate.bow.key(), &[(0, 5)]);
    }

    #[test]
    fn negative_entries_are_clipped_only_at_rounding() {
        let cfg = SolverConfig::default().with_fista_tau(0.1);
        let y = EmbeddingSum::new(vec![2.0, -3.0]).unwrap();
        let out = fista_bpdn(&identity(2), &y, &cfg).unwrap();
        assert!((out.coefficients[1] + 2.9).abs() < 1e-6);
        assert_eq!(out.candidate.bow.key(), &[(0, 2)]);

        let cfg = SolverConfig { fista_nonnegative: true, ..cfg };
        let out = fista_bpdn(&identity(2), &y, &cfg).unwrap();
        assert_eq!(out.coefficients[1], 0.0);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let words = vec!["a".to_string(), "b".to_string()];
        let dict = EmbeddingDictionary::from_columns(words, 2, vec![vec![1.0, 0.0], vec![0.9, 0.4]]).unwrap();
        let y = EmbeddingSum::new(vec![1.9, 0.4]).unwrap();
        let cfg = SolverConfig { fista_max_iter: 2, ..Default::default() };
        let out = fista_bpdn(&dict, &y, &cfg).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
    }
}
