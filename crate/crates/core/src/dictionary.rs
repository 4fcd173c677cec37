//! Embedding dictionaries: loading GloVe-style text files and coherence
//! analysis.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// An `m x d` matrix whose column `j` is the embedding of `words[j]`.
///
/// Columns are kept exactly as loaded (not normalized), so `D x` is the
/// plain sum of the word vectors of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDictionary<T> {
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    // column major, `dim * words.len()` entries
    data: Vec<T>,
    norms: Vec<T>,
}

impl<T: Real> EmbeddingDictionary<T> {
    /// Builds a dictionary from per-word columns of length `dim`.
    pub fn from_columns(words: Vec<String>, dim: usize, columns: Vec<Vec<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("embedding dimension must be at least 1"));
        }
        if words.len() != columns.len() {
            return Err(Error::domain(format!("{} words but {} columns", words.len(), columns.len())));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (j, w) in words.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::domain(format!("word {j} is empty")));
            }
            if index.insert(w.clone(), j).is_some() {
                return Err(Error::DuplicateToken { token: w.clone(), line: j + 1 });
            }
        }
        let mut data = Vec::with_capacity(dim * words.len());
        let mut norms = Vec::with_capacity(words.len());
        for (w, col) in words.iter().zip(&columns) {
            if col.len() != dim {
                return Err(Error::domain(format!("column for {w:?} has length {}, expected {dim}", col.len())));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("column for {w:?} has a non-finite entry")));
            }
            let n = linalg::norm(col);
            if n == T::zero() {
                return Err(Error::ZeroColumn(w.clone()));
            }
            norms.push(n);
            data.extend_from_slice(col);
        }
        Ok(Self { words, index, dim, data, norms })
    }

    /// Embedding dimension `m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of words `d`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, j: usize) -> &str {
        &self.words[j]
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    /// Euclidean norm of column `j`, cached at construction.
    #[inline]
    pub fn column_norm(&self, j: usize) -> T {
        self.norms[j]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim)
    }

    /// `D x` for a dense coefficient vector of length `d`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.len());
        let mut out = vec![T::zero(); self.dim];
        for (col, &c) in self.columns().zip(x) {
            if c != T::zero() {
                linalg::axpy(c, col, &mut out);
            }
        }
        out
    }

    /// `D^T r` for a vector of length `m`.
    pub fn apply_transpose(&self, r: &[T]) -> Vec<T> {
        debug_assert_eq!(r.len(), self.dim);
        self.columns().map(|col| linalg::dot(col, r)).collect()
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Real>(&self) -> EmbeddingDictionary<U> {
        let columns = self.columns().map(|c| c.iter().map(|v| U::of(v.as_f64())).collect()).collect();
        EmbeddingDictionary::from_columns(self.words.clone(), self.dim, columns)
            .expect("casting preserves the dictionary invariants")
    }
}

/// Reads a word list: one token per line, blank lines ignored.
pub fn read_word_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty()).collect())
}

/// Loads a GloVe text file (`<token> <v1> ... <vm>` per line).
///
/// With a `word_filter` the dictionary holds exactly those tokens in filter
/// order; otherwise every token in file order.
pub fn load_dictionary<T: Real>(
    path: impl AsRef<Path>,
    word_filter: Option<&[String]>,
) -> Result<EmbeddingDictionary<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dictionary(BufReader::new(file), path, word_filter)
}

pub(crate) fn parse_dictionary<T: Real, R: BufRead>(
    reader: R,
    path: &Path,
    word_filter: Option<&[String]>,
) -> Result<EmbeddingDictionary<T>> {
    let load_err = |line: usize, message: String| Error::Load { path: path.to_path_buf(), line, message };

    let wanted: Option<HashMap<String, usize>> =
        word_filter.map(|f| f.iter().enumerate().map(|(i, w)| (w.trim().to_lowercase(), i)).collect());
    if let (Some(filter), Some(wanted)) = (word_filter, &wanted) {
        if wanted.len() != filter.len() {
            return Err(Error::config("word filter contains duplicate tokens"));
        }
    }

    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut entries: Vec<(String, Vec<T>)> = Vec::new();
    let mut dim: Option<usize> = None;

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else { continue };
        let token = token.to_lowercase();
        let values = fields
            .map(|f| f.parse::<f64>().map_err(|_| load_err(lineno, format!("cannot parse {f:?} as a number"))))
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None if values.is_empty() => return Err(load_err(lineno, "token without a vector".into())),
            None => dim = Some(values.len()),
            Some(m) if m != values.len() => {
                return Err(load_err(lineno, format!("expected {} fields, found {}", m + 1, values.len() + 1)))
            }
            Some(_) => {}
        }
        if let Some(&first) = seen.get(&token) {
            return Err(Error::DuplicateToken { token: format!("{token} (first on line {first})"), line: lineno });
        }
        seen.insert(token.clone(), lineno);
        let keep = wanted.as_ref().is_none_or(|w| w.contains_key(&token));
        if keep {
            entries.push((token, values.into_iter().map(T::of).collect()));
        }
    }

    let dim = dim.ok_or_else(|| load_err(0, "no embeddings in file".into()))?;
    if let Some(filter) = word_filter {
        let mut by_token: HashMap<String, Vec<T>> = entries.into_iter().collect();
        let mut words = Vec::with_capacity(filter.len());
        let mut columns = Vec::with_capacity(filter.len());
        for w in filter {
            let w = w.trim().to_lowercase();
            let col = by_token.remove(&w).ok_or_else(|| Error::UnknownToken(w.clone()))?;
            words.push(w);
            columns.push(col);
        }
        EmbeddingDictionary::from_columns(words, dim, columns)
    } else {
        let (words, columns) = entries.into_iter().unzip();
        EmbeddingDictionary::from_columns(words, dim, columns)
    }
}

/// Mutual coherence of a dictionary and the sparsity level it certifies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    /// Largest absolute cosine between two distinct columns.
    pub mu: f64,
    /// Column pair attaining `mu` (smallest `(i, j)` among ties).
    pub argmax_pair: (usize, usize),
    pub argmax_words: (String, String),
    /// `(1 + 1/mu) / 2`, absent when `mu == 0`.
    pub bound: Option<f64>,
    /// Set when `mu == 0` and every sparsity level is certified.
    pub unbounded: bool,
    /// Largest integer `p` strictly below `bound`; capped at `d` when unbounded.
    pub sparsity_guarantee: usize,
}

impl CoherenceReport {
    /// Certified sparsity for sentences of at most `max_words` words.
    pub fn guarantee_for(&self, max_words: usize) -> usize {
        self.sparsity_guarantee.min(max_words)
    }
}

/// Largest integer strictly below `(1 + 1/mu) / 2`; `None` for `mu == 0`.
pub fn uniqueness_sparsity(mu: f64) -> Option<usize> {
    if mu <= 0.0 {
        return None;
    }
    let bound = 0.5 * (1.0 + 1.0 / mu);
    if bound <= 1.0 {
        return Some(0);
    }
    Some(bound.ceil() as usize - 1)
}

pub fn mutual_coherence<T: Real>(dict: &EmbeddingDictionary<T>) -> Result<CoherenceReport> {
    let d = dict.len();
    if d < 2 {
        return Err(Error::domain("mutual coherence needs at least two columns"));
    }
    let mut unit: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (j, col) in dict.columns().enumerate() {
        let n = dict.column_norm(j).as_f64();
        if n == 0.0 {
            return Err(Error::ZeroColumn(dict.word(j).to_owned()));
        }
        unit.push(col.iter().map(|v| v.as_f64() / n).collect());
    }

    let mut mu = -1.0;
    let mut pair = (0, 1);
    for i in 0..d {
        for j in (i + 1)..d {
            let c = linalg::dot(&unit[i], &unit[j]).abs().min(1.0);
            if c > mu {
                mu = c;
                pair = (i, j);
            }
        }
    }

    let guarantee = uniqueness_sparsity(mu);
    Ok(CoherenceReport {
        mu,
        argmax_pair: pair,
        argmax_words: (dict.word(pair.0).to_owned(), dict.word(pair.1).to_owned()),
        bound: (mu > 0.0).then(|| 0.5 * (1.0 + 1.0 / mu)),
        unbounded: guarantee.is_none(),
        sparsity_guarantee: guarantee.unwrap_or(d),
    })
}
