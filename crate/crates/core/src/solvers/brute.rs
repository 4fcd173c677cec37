use std::cmp::Ordering;

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::signal::{BagOfWords, EmbeddingSum};

use super::{check_dims, Candidate, SolverConfig};

/// Largest number of multisets [`brute_force`] will score.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Number of count vectors over `d` words with total at most `l`: `C(d + l, l)`.
pub fn multiset_count(d: usize, l: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=l as u128 {
        acc = acc.saturating_mul(d as u128 + i) / i;
    }
    acc
}

/// Global minimizer of `||y - D x||^2` over every count vector with total at
/// most `L`, by enumeration. Ties go to fewer words, then the smaller key.
pub fn brute_force<T: Real>(
    dict: &EmbeddingDictionary<T>,
    y: &EmbeddingSum<T>,
    cfg: &SolverConfig,
) -> Result<Candidate<T>> {
    cfg.validate()?;
    check_dims(dict, y)?;
    let d = dict.len();
    let count = multiset_count(d, cfg.max_words);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { count, limit: BRUTE_FORCE_LIMIT });
    }

    let mut best: Option<Candidate<T>> = None;
    let mut indices = Vec::with_capacity(cfg.max_words);
    enumerate(d, cfg.max_words, 0, &mut indices, &mut |idx| {
        let bow = BagOfWords::from_indices(d, idx.iter().copied()).expect("indices are in range");
        let fit = dict.apply(&bow.to_dense::<T>());
        let cand = Candidate { residual_norm_sq: linalg::dist_sq(y.values(), &fit), bow };
        if best.as_ref().is_none_or(|b| cand.rank_cmp(b) == Ordering::Less) {
            best = Some(cand);
        }
    });
    Ok(best.expect("the empty bag is always enumerated"))
}

// Visits every nondecreasing index sequence of length <= max_len.
fn enumerate(d: usize, max_len: usize, start: usize, current: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    visit(current);
    if current.len() == max_len {
        return;
    }
    for j in start..d {
        current.push(j);
        enumerate(d, max_len, j, current, visit);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_multisets() {
        assert_eq!(multiset_count(2, 2), 6);
        assert_eq!(multiset_count(10, 3), 286);
        assert_eq!(multiset_count(112, 4), 7_160_245);
        let mut n = 0;
        enumerate(10, 3, 0, &mut Vec::new(), &mut |_| n += 1);
        assert_eq!(n, 286);
    }

    #[test]
    fn identity_pair() {
        let dict =
            EmbeddingDictionary::from_columns(vec!["a".into(), "b".into()], 2, vec![vec![1.0, 0.0], vec![0.0, 1.0]])
                .unwrap();
        let y = EmbeddingSum::new(vec![1.0, 1.0]).unwrap();
        let cfg = SolverConfig { max_words: 2, ..Default::default() };
        let c = brute_force(&dict, &y, &cfg).unwrap();
        assert_eq!(c.bow.key(), &[(0, 1), (1, 1)]);
        assert_eq!(c.residual_norm_sq, 0.0);
    }

    #[test]
    fn refuses_large_instances() {
        let words: Vec<String> = (0..112).map(|i| format!("w{i}")).collect();
        let cols = (0..112).map(|i| vec![1.0, i as f64]).collect();
        let dict = EmbeddingDictionary::from_columns(words, 2, cols).unwrap();
        let y = EmbeddingSum::zeros(2);
        match brute_force(&dict, &y, &SolverConfig::default()) {
            Err(Error::TooLarge { count, .. }) => assert_eq!(count, 7_160_245),
            other => panic!("unexpected {other:?}"),
        }
    }
}
