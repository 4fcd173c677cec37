use crate::dictionary::EmbeddingDictionary;
use crate::error::Result;
use crate::linalg;
use crate::scalar::Real;
use crate::signal::EmbeddingSum;

use super::{check_dims, round_to_bow, Candidate, SolverConfig};

const RANK_TOL: f64 = 1e-10;

/// Real-valued OMP coefficients (length `d`).
///
/// Each iteration adds the unused column maximizing `|d_j^T r| / ||d_j||`
/// and refits all selected coefficients by least squares. Stops when
/// `||r|| <= omp_residual_threshold` or `L` columns are selected.
pub fn omp_coefficients<T: Real>(
    dict: &EmbeddingDictionary<T>,
    y: &EmbeddingSum<T>,
    cfg: &SolverConfig,
) -> Result<Vec<T>> {
    cfg.validate()?;
    check_dims(dict, y)?;
    let (m, d) = (dict.dim(), dict.len());
    let threshold = T::of(cfg.omp_residual_threshold);
    let mut support: Vec<usize> = Vec::with_capacity(cfg.max_words);
    let mut coef: Vec<T> = Vec::new();
    let mut residual = y.values().to_vec();

    while support.len() < cfg.max_words.min(d) && linalg::norm(&residual) > threshold {
        let mut pick: Option<(usize, T)> = None;
        for j in 0..d {
            if support.contains(&j) {
                continue;
            }
            let corr = linalg::dot(dict.column(j), &residual).abs() / dict.column_norm(j);
            if pick.is_none_or(|(_, c)| corr > c) {
                pick = Some((j, corr));
            }
        }
        let Some((j, corr)) = pick else { break };
        if corr == T::zero() {
            break;
        }
        support.push(j);

        let mut a = Vec::with_capacity(m * support.len());
        for &s in &support {
            a.extend_from_slice(dict.column(s));
        }
        coef = linalg::lstsq_min_norm(&a, m, support.len(), y.values(), T::of(RANK_TOL));
        residual = y.values().to_vec();
        for (&s, &c) in support.iter().zip(&coef) {
            linalg::axpy(-c, dict.column(s), &mut residual);
        }
    }

    let mut x = vec![T::zero(); d];
    for (&s, &c) in support.iter().zip(&coef) {
        x[s] = c;
    }
    Ok(x)
}

/// Classical OMP followed by [`round_to_bow`]; the residual is rescored on
/// the rounded integer vector.
pub fn omp<T: Real>(dict: &EmbeddingDictionary<T>, y: &EmbeddingSum<T>, cfg: &SolverConfig) -> Result<Candidate<T>> {
    let x = omp_coefficients(dict, y, cfg)?;
    Candidate::score(dict, y, round_to_bow(&x, cfg.max_words))
}
