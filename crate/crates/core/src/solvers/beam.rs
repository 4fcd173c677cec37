use std::cmp::Ordering;
use std::collections::HashSet;

use crate::dictionary::EmbeddingDictionary;
use crate::error::Result;
use crate::linalg;
use crate::scalar::Real;
use crate::signal::{synthesize, BagOfWords, EmbeddingSum};

use super::{check_dims, Candidate, SolverConfig};

/// Integer K-OMP: beam search over integer count vectors.
///
/// Each of the `L` rounds extends every surviving candidate by every word,
/// merges identical multisets and keeps the `K` smallest residuals. The best
/// candidate seen in any round (the empty bag included) is returned first
/// when it beats every round-`L` survivor, so actions shorter than `L` words
/// are recovered without padding. The list is sorted best first and holds at
/// most `K` entries.
pub fn ik_omp<T: Real>(
    dict: &EmbeddingDictionary<T>,
    y: &EmbeddingSum<T>,
    cfg: &SolverConfig,
) -> Result<Vec<Candidate<T>>> {
    run(dict, y, cfg, true)
}

/// IK-OMP returning only the survivors of the last round.
pub fn ik_omp_strict<T: Real>(
    dict: &EmbeddingDictionary<T>,
    y: &EmbeddingSum<T>,
    cfg: &SolverConfig,
) -> Result<Vec<Candidate<T>>> {
    run(dict, y, cfg, false)
}

fn run<T: Real>(
    dict: &EmbeddingDictionary<T>,
    y: &EmbeddingSum<T>,
    cfg: &SolverConfig,
    keep_best_of_all_rounds: bool,
) -> Result<Vec<Candidate<T>>> {
    cfg.validate()?;
    check_dims(dict, y)?;
    let d = dict.len();
    let k = cfg.beam_width;

    let empty = Candidate { bow: BagOfWords::empty(d), residual_norm_sq: linalg::norm_sq(y.values()) };
    let mut best = empty.clone();
    let mut beam = vec![empty];

    for _round in 0..cfg.max_words {
        // score every (parent, word) pair before building any bag
        let mut scored: Vec<(T, usize, usize)> = Vec::with_capacity(beam.len() * d);
        for (p, parent) in beam.iter().enumerate() {
            let fit = synthesize(dict, &parent.bow)?;
            let residual: Vec<T> = y.values().iter().zip(fit.values()).map(|(&a, &b)| a - b).collect();
            for j in 0..d {
                scored.push((linalg::dist_sq(&residual, dict.column(j)), p, j));
            }
        }
        scored.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

        // walk in score order; children of one round all have the same
        // length, so equal scores are resolved by the multiset key
        let mut seen: HashSet<BagOfWords> = HashSet::with_capacity(2 * k);
        let mut extended: Vec<Candidate<T>> = Vec::with_capacity(k);
        let mut i = 0;
        while i < scored.len() && extended.len() < k {
            let score = scored[i].0;
            let mut group = Vec::new();
            while i < scored.len() && scored[i].0 == score {
                let (_, p, j) = scored[i];
                let child = beam[p].bow.with_added(j)?;
                if seen.insert(child.clone()) {
                    group.push(Candidate { bow: child, residual_norm_sq: score });
                }
                i += 1;
            }
            group.sort_by(|a, b| a.bow.key().cmp(b.bow.key()));
            extended.extend(group);
        }
        extended.truncate(k);
        if extended[0].rank_cmp(&best) == Ordering::Less {
            best = extended[0].clone();
        }
        beam = extended;
    }

    if keep_best_of_all_rounds && best.rank_cmp(&beam[0]) == Ordering::Less {
        beam.insert(0, best);
        beam.truncate(k);
    }
    Ok(beam)
}
