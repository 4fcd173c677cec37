use crate::scalar::Real;
use crate::signal::BagOfWords;

/// Projects real coefficients onto bags of at most `max_words` words.
///
/// Negatives are clipped to zero and every entry is rounded half away from
/// zero. When the rounded total exceeds `max_words`, only the `max_words`
/// largest coefficients (lower index first on ties) are kept and rounded
/// again; if that still overshoots, units are removed from the most
/// over-rounded entry until the total fits.
pub fn round_to_bow<T: Real>(coefficients: &[T], max_words: usize) -> BagOfWords {
    let d = coefficients.len();
    let cap = max_words as f64;
    let clipped: Vec<f64> = coefficients
        .iter()
        .map(|c| {
            let v = c.as_f64();
            if v > 0.0 {
                v.min(cap)
            } else {
                0.0
            }
        })
        .collect();
    let mut counts: Vec<u32> = clipped.iter().map(|&v| v.round() as u32).collect();
    let total = |counts: &[u32]| counts.iter().map(|&c| c as usize).sum::<usize>();

    if total(&counts) > max_words {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| clipped[b].total_cmp(&clipped[a]).then(a.cmp(&b)));
        let mut keep = vec![false; d];
        for &j in order.iter().take(max_words) {
            keep[j] = true;
        }
        for j in 0..d {
            counts[j] = if keep[j] { clipped[j].round() as u32 } else { 0 };
        }
        while total(&counts) > max_words {
            let j = (0..d)
                .filter(|&j| counts[j] > 0)
                .max_by(|&a, &b| {
                    let sa = counts[a] as f64 - clipped[a];
                    let sb = counts[b] as f64 - clipped[b];
                    sa.total_cmp(&sb).then(counts[a].cmp(&counts[b])).then(a.cmp(&b))
                })
                .expect("total is positive");
            counts[j] -= 1;
        }
    }

    BagOfWords::from_counts(d, counts.into_iter().enumerate().filter(|&(_, c)| c > 0)).expect("indices are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn elementwise_rounding() {
        let b = round_to_bow(&[0.9, -0.3, 1.6], 4);
        assert_eq!(b.key(), &[(0, 1), (2, 2)]);
    }

    #[test]
    fn small_entries_vanish() {
        assert!(round_to_bow(&[0.49, 0.2, -7.0, 0.0], 4).is_empty());
    }

    #[test]
    fn half_rounds_up() {
        assert_eq!(round_to_bow(&[0.5, 2.5], 4).key(), &[(0, 1), (1, 3)]);
    }

    #[test]
    fn overflow_keeps_largest_then_lowest_index() {
        assert_eq!(round_to_bow(&[1.4, 1.4, 1.4], 2).key(), &[(0, 1), (1, 1)]);
        assert_eq!(round_to_bow(&[0.6, 1.4, 0.7], 2).key(), &[(1, 1), (2, 1)]);
    }

    #[test]
    fn overflow_within_kept_entries() {
        assert_eq!(round_to_bow(&[3.0, 2.0], 4).key(), &[(0, 2), (1, 2)]);
        assert_eq!(round_to_bow(&[9.0], 4).key(), &[(0, 4)]);
        assert_eq!(round_to_bow(&[f64::INFINITY, 0.0], 3).key(), &[(0, 3)]);
    }

    proptest! {
        #[test]
        fn never_exceeds_max_words(
            coefs in proptest::collection::vec(-5.0f64..8.0, 1..20),
            l in 1usize..6,
        ) {
            let b = round_to_bow(&coefs, l);
            prop_assert!(b.total() as usize <= l);
            prop_assert_eq!(b.dict_size(), coefs.len());
        }
    }
}
