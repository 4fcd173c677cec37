//! Integer bag-of-words vectors, their embedding sums, and the measurement
//! noise model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Sparse vector of positive word counts over a dictionary of `dict_size`
/// words. Absent indices are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BagOfWords {
    // sorted by index, every count >= 1
    counts: Vec<(usize, u32)>,
    dict_size: usize,
}

impl BagOfWords {
    pub fn empty(dict_size: usize) -> Self {
        Self { counts: Vec::new(), dict_size }
    }

    /// One count per listed index; repeated indices accumulate.
    pub fn from_indices(dict_size: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bow = Self::empty(dict_size);
        for j in indices {
            bow = bow.with_added(j)?;
        }
        Ok(bow)
    }

    /// Builds from `(index, count)` pairs; zero counts are dropped.
    pub fn from_counts(dict_size: usize, counts: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (j, c) in counts {
            if j >= dict_size {
                return Err(Error::domain(format!("index {j} out of range for dictionary of {dict_size}")));
            }
            *map.entry(j).or_insert(0u32) += c;
        }
        Ok(Self { counts: map.into_iter().filter(|&(_, c)| c > 0).collect(), dict_size })
    }

    /// Copy with one more occurrence of word `j`.
    pub fn with_added(&self, j: usize) -> Result<Self> {
        if j >= self.dict_size {
            return Err(Error::domain(format!("index {j} out of range for dictionary of {}", self.dict_size)));
        }
        let mut counts = self.counts.clone();
        match counts.binary_search_by_key(&j, |&(i, _)| i) {
            Ok(pos) => counts[pos].1 += 1,
            Err(pos) => counts.insert(pos, (j, 1)),
        }
        Ok(Self { counts, dict_size: self.dict_size })
    }

    /// Multiset union: counts are added.
    pub fn merged(&self, other: &Self) -> Result<Self> {
        if self.dict_size != other.dict_size {
            return Err(Error::domain("bags of words over different dictionaries"));
        }
        Self::from_counts(self.dict_size, self.iter().chain(other.iter()))
    }

    pub fn dict_size(&self) -> usize {
        self.dict_size
    }

    pub fn get(&self, j: usize) -> u32 {
        self.counts.binary_search_by_key(&j, |&(i, _)| i).map_or(0, |pos| self.counts[pos].1)
    }

    /// `(index, count)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts.iter().copied()
    }

    /// Total number of words, `sum of counts`.
    pub fn total(&self) -> u32 {
        self.counts.iter().map(|&(_, c)| c).sum()
    }

    /// Number of distinct words, `||x||_0`.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Canonical `(index, count)` key used for deduplication and tie-breaks.
    pub fn key(&self) -> &[(usize, u32)] {
        &self.counts
    }

    pub fn to_dense<T: Real>(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.dict_size];
        for (j, c) in self.iter() {
            x[j] = T::of(c as f64);
        }
        x
    }

    /// Token -> count map for reports.
    pub fn to_token_counts<T: Real>(&self, dict: &EmbeddingDictionary<T>) -> BTreeMap<String, u32> {
        self.iter().map(|(j, c)| (dict.word(j).to_owned(), c)).collect()
    }

    /// Tokens in index order, each repeated by its count.
    pub fn tokens<'d, T: Real>(&self, dict: &'d EmbeddingDictionary<T>) -> Vec<&'d str> {
        self.iter().flat_map(|(j, c)| std::iter::repeat_n(dict.word(j), c as usize)).collect()
    }
}

/// Order-insensitive equality of two bags over the same dictionary.
pub fn bow_equal(a: &BagOfWords, b: &BagOfWords) -> Result<bool> {
    if a.dict_size != b.dict_size {
        return Err(Error::domain(format!(
            "comparing bags over dictionaries of size {} and {}",
            a.dict_size, b.dict_size
        )));
    }
    Ok(a.counts == b.counts)
}

/// Dense measurement vector of length `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSum<T> {
    values: Vec<T>,
}

impl<T: Real> EmbeddingSum<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("embedding sum has a non-finite entry"));
        }
        Ok(Self { values })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { values: vec![T::zero(); dim] }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> T {
        linalg::norm(&self.values)
    }

    pub fn into_inner(self) -> Vec<T> {
        self.values
    }
}

/// `D x`: the sum of the embeddings of every word in `bow`, with multiplicity.
pub fn synthesize<T: Real>(dict: &EmbeddingDictionary<T>, bow: &BagOfWords) -> Result<EmbeddingSum<T>> {
    if bow.dict_size() != dict.len() {
        return Err(Error::domain(format!(
            "bag of words over {} words, dictionary has {}",
            bow.dict_size(),
            dict.len()
        )));
    }
    let mut out = vec![T::zero(); dict.dim()];
    for (j, c) in bow.iter() {
        linalg::axpy(T::of(c as f64), dict.column(j), &mut out);
    }
    Ok(EmbeddingSum { values: out })
}

/// Signal-to-noise ratio `||signal|| / ||noise||`; infinity means no noise.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Snr(f64);

impl Snr {
    pub const INFINITE: Snr = Snr(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::config(format!("snr must be positive, got {value}")));
        }
        Ok(Snr(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Snr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "none" => Ok(Snr::INFINITE),
            other => {
                let v: f64 = other.parse().map_err(|_| Error::config(format!("cannot parse snr {s:?}")))?;
                Snr::new(v)
            }
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Snr::new(v).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// SplitMix64 finalizer; mixes `parts` into `seed` to derive independent
/// stream seeds.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)))
}

/// Seeded generator used for every random draw in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adds Gaussian noise scaled so that `||signal|| / ||noise|| == snr`
/// exactly for this draw.
///
/// Noise entries are standard normal draws (ziggurat sampler from
/// `rand_distr`) from a ChaCha8 stream seeded with `rng_seed`, then rescaled.
pub fn add_noise<T: Real>(signal: &EmbeddingSum<T>, snr: Snr, rng_seed: u64) -> Result<EmbeddingSum<T>> {
    if snr.is_infinite() {
        return Ok(signal.clone());
    }
    let signal_norm = linalg::norm(&signal.values).as_f64();
    if signal_norm == 0.0 {
        return Err(Error::domain("cannot scale noise to a zero-norm signal"));
    }
    let mut rng = rng_from_seed(rng_seed);
    let mut eps: Vec<f64> = Vec::with_capacity(signal.len());
    let mut eps_norm = 0.0;
    // a zero draw has probability 0, but the loop keeps the scale well defined
    while eps_norm == 0.0 {
        eps = (0..signal.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        eps_norm = linalg::norm(&eps);
    }
    let scale = signal_norm / (snr.value() * eps_norm);
    let values = signal.values.iter().zip(&eps).map(|(&s, &e)| s + T::of(e * scale)).collect();
    EmbeddingSum::new(values)
}
