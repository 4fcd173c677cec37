#![allow(dead_code)]

use std::path::PathBuf;

use bowsense::{load_dictionary, read_word_list, Dictionary, QuestTrace, SynonymTable, WordLexicon};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn game_dictionary() -> Dictionary {
    let dir = data_dir();
    let words = read_word_list(dir.join("game_words.txt")).unwrap();
    load_dictionary(dir.join("game_glove50.txt"), Some(&words)).unwrap()
}

pub fn game_lexicon() -> WordLexicon {
    WordLexicon::load(data_dir().join("game_lexicon.txt")).unwrap()
}

pub fn game_synonyms() -> SynonymTable {
    SynonymTable::load(data_dir().join("synonyms.json")).unwrap()
}

pub fn trace(name: &str) -> QuestTrace {
    QuestTrace::load(data_dir().join(format!("{name}.jsonl"))).unwrap()
}

pub fn words(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("w{i}")).collect()
}

pub fn gaussian_columns(rng: &mut impl Rng, m: usize, d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|_| (0..m).map(|_| rng.sample(StandardNormal)).collect()).collect()
}

pub fn gaussian_dict(rng: &mut impl Rng, m: usize, d: usize) -> Dictionary {
    Dictionary::from_columns(words(d), m, gaussian_columns(rng, m, d)).unwrap()
}

/// `d <= m` orthonormal columns by modified Gram-Schmidt.
pub fn orthonormal_dict(rng: &mut impl Rng, m: usize, d: usize) -> Dictionary {
    assert!(d <= m);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    Dictionary::from_columns(words(d), m, basis).unwrap()
}

/// Residual `||y - D x||^2` computed column by column.
pub fn residual(dict: &Dictionary, y: &[f64], x: &[f64]) -> f64 {
    let mut r = y.to_vec();
    for (j, &c) in x.iter().enumerate() {
        for (ri, dj) in r.iter_mut().zip(dict.column(j)) {
            *ri -= c * dj;
        }
    }
    r.iter().map(|v| v * v).sum()
}

/// `0.5 ||y - D x||^2 + tau ||x||_1`.
pub fn lasso_objective(dict: &Dictionary, y: &[f64], x: &[f64], tau: f64) -> f64 {
    0.5 * residual(dict, y, x) + tau * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// Smallest residual over every bag of at most `l` words, by explicit
/// enumeration of count vectors.
pub fn exhaustive_min(dict: &Dictionary, y: &[f64], l: usize) -> f64 {
    fn go(dict: &Dictionary, y: &[f64], x: &mut Vec<f64>, j: usize, left: usize, best: &mut f64) {
        if j == x.len() {
            *best = best.min(residual(dict, y, x));
            return;
        }
        for c in 0..=left {
            x[j] = c as f64;
            go(dict, y, x, j + 1, left - c, best);
        }
        x[j] = 0.0;
    }
    let mut best = f64::INFINITY;
    go(dict, y, &mut vec![0.0; dict.len()], 0, l, &mut best);
    best
}
