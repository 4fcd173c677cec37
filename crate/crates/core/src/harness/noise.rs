use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::harness::trace::QuestTrace;
use crate::language::sentence_to_bow;
use crate::scalar::Real;
use crate::signal::{add_noise, derive_seed, rng_from_seed, synthesize, BagOfWords, EmbeddingSum, Snr};

/// Demonstration noise: Gaussian embedding noise at a given SnR, random
/// wrong actions with probability `wrong_action_prob`, and synonym
/// rewording with probability `synonym_prob`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr: Snr,
    pub wrong_action_prob: f64,
    pub synonym_prob: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn noiseless(seed: u64) -> Self {
        Self { snr: Snr::INFINITE, wrong_action_prob: 0.0, synonym_prob: 0.0, seed }
    }

    pub fn gaussian(snr: Snr, seed: u64) -> Self {
        Self { snr, ..Self::noiseless(seed) }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("wrong_action_prob", self.wrong_action_prob), ("synonym_prob", self.synonym_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Snr::new(self.snr.value()).map(|_| ())
    }
}

/// Token -> interchangeable replacement tokens.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SynonymTable {
    map: BTreeMap<String, Vec<String>>,
}

impl SynonymTable {
    pub fn new(map: BTreeMap<String, Vec<String>>) -> Self {
        let map = map
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v.into_iter().map(|s| s.to_lowercase()).collect()))
            .collect();
        Self { map }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(serde_json::from_str(&text)?))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn synonyms(&self, token: &str) -> Option<&[String]> {
        self.map.get(token).map(Vec::as_slice)
    }

    /// Every key and replacement must be a dictionary word and every list
    /// nonempty.
    pub fn check_against<T: Real>(&self, dict: &EmbeddingDictionary<T>) -> Result<()> {
        for (tok, syns) in &self.map {
            if syns.is_empty() {
                return Err(Error::config(format!("synonym list for {tok:?} is empty")));
            }
            for w in std::iter::once(tok).chain(syns) {
                if dict.index_of(w).is_none() {
                    return Err(Error::config(format!("synonym {w:?} is not in the dictionary")));
                }
            }
        }
        Ok(())
    }

    /// Maps each dictionary index to the smallest index of its synonym class.
    pub fn canonical_indices<T: Real>(&self, dict: &EmbeddingDictionary<T>) -> Result<Vec<usize>> {
        self.check_against(dict)?;
        let mut parent: Vec<usize> = (0..dict.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (tok, syns) in &self.map {
            let a = dict.index_of(tok).expect("checked");
            for s in syns {
                let b = dict.index_of(s).expect("checked");
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        Ok((0..dict.len()).map(|j| find(&mut parent, j)).collect())
    }

    /// Replaces every replaceable token with a uniformly chosen synonym.
    pub fn reword(&self, sentence: &str, rng: &mut impl Rng) -> String {
        sentence
            .to_lowercase()
            .split_whitespace()
            .map(|tok| match self.synonyms(tok) {
                Some(syns) if !syns.is_empty() => syns[rng.random_range(0..syns.len())].clone(),
                _ => tok.to_owned(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Where a step's demonstrated action came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoSource {
    Gold,
    WrongAction,
    Synonym,
}

#[derive(Debug, Clone)]
pub struct Demonstration<T> {
    pub source: DemoSource,
    /// Bag of words that was actually demonstrated.
    pub bow: BagOfWords,
    /// Its embedding sum after Gaussian noise.
    pub measurement: EmbeddingSum<T>,
}

/// Per-step demonstrations under `noise`.
///
/// Each step draws from its own stream seeded by `(noise.seed, step)`: with
/// probability `wrong_action_prob` a different action from the trace's pool
/// replaces the gold one, otherwise with probability `synonym_prob` the gold
/// sentence is reworded through `synonyms`. The result is synthesized and
/// passed through [`add_noise`].
pub fn simulate_demonstrations<T: Real>(
    trace: &QuestTrace,
    dict: &EmbeddingDictionary<T>,
    noise: &NoiseSpec,
    synonyms: &SynonymTable,
) -> Result<Vec<Demonstration<T>>> {
    noise.validate()?;
    synonyms.check_against(dict)?;
    let gold = trace.gold_bows(dict)?;
    let pool = trace.action_pool(dict)?;
    if noise.wrong_action_prob > 0.0 && pool.len() < 2 {
        return Err(Error::config(format!(
            "trace {:?} has a single distinct action; wrong-action noise is undefined",
            trace.name
        )));
    }

    let mut out = Vec::with_capacity(trace.len());
    for (i, (step, gold_bow)) in trace.steps.iter().zip(&gold).enumerate() {
        let mut rng = rng_from_seed(derive_seed(noise.seed, &[i as u64]));
        let wrong_draw: f64 = rng.random();
        let synonym_draw: f64 = rng.random();

        let (source, bow) = if wrong_draw < noise.wrong_action_prob {
            let others: Vec<&BagOfWords> = pool.iter().filter(|b| *b != gold_bow).collect();
            (DemoSource::WrongAction, others[rng.random_range(0..others.len())].clone())
        } else if synonym_draw < noise.synonym_prob {
            let reworded = synonyms.reword(&step.action, &mut rng);
            (DemoSource::Synonym, sentence_to_bow(&reworded, dict)?)
        } else {
            (DemoSource::Gold, gold_bow.clone())
        };

        let clean = synthesize(dict, &bow)?;
        let measurement = add_noise(&clean, noise.snr, rng.next_u64())?;
        out.push(Demonstration { source, bow, measurement });
    }
    Ok(out)
}

/// Simulated encoder output for every step of `trace`.
pub fn simulate_encoder<T: Real>(
    trace: &QuestTrace,
    dict: &EmbeddingDictionary<T>,
    noise: &NoiseSpec,
    synonyms: &SynonymTable,
) -> Result<Vec<EmbeddingSum<T>>> {
    Ok(simulate_demonstrations(trace, dict, noise, synonyms)?.into_iter().map(|d| d.measurement).collect())
}
