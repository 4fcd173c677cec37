use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::dictionary::EmbeddingDictionary;
use crate::error::Result;
use crate::harness::noise::{simulate_encoder, NoiseSpec, SynonymTable};
use crate::harness::trace::QuestTrace;
use crate::language::{order_words, WordLexicon};
use crate::scalar::Real;
use crate::signal::{bow_equal, BagOfWords};
use crate::solvers::{SolverConfig, SolverKind};

#[derive(Debug, Clone, Serialize)]
pub struct StepOutcome {
    pub step: usize,
    #[serde(skip)]
    pub bow: BagOfWords,
    /// Recovered words with counts.
    pub recovered: BTreeMap<String, u32>,
    /// Recovered words ordered into a command, when a lexicon covers them.
    pub sentence: Option<String>,
    pub gold: String,
    pub correct: bool,
    /// `||y - D x||^2` of the selected candidate against the noisy measurement.
    pub residual: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub trace: String,
    pub solver: SolverKind,
    pub config: SolverConfig,
    /// L1 weight actually used by FISTA.
    pub fista_tau: f64,
    pub noise: NoiseSpec,
    pub steps: usize,
    pub accuracy: f64,
    /// Reward collected before the first incorrect step.
    pub reward: f64,
    pub total_reward: f64,
    pub mean_step_ms: f64,
    pub per_step: Vec<StepOutcome>,
}

/// Sum of rewards over the longest prefix of correct steps.
pub fn prefix_reward(rewards: &[f64], correct: &[bool]) -> f64 {
    rewards.iter().zip(correct).take_while(|(_, &ok)| ok).map(|(r, _)| r).sum()
}

fn canonicalize(bow: &BagOfWords, canon: &[usize]) -> BagOfWords {
    BagOfWords::from_counts(bow.dict_size(), bow.iter().map(|(j, c)| (canon[j], c)))
        .expect("canonical indices are in range")
}

/// Replays `trace` through the simulated encoder and `solver`.
///
/// A step is correct when the recovered bag equals the gold bag (after
/// mapping synonyms to one representative), even when the demonstration
/// itself was replaced by noise. The first incorrect step ends reward
/// collection. Wall time covers only the solver call.
pub fn evaluate<T: Real>(
    trace: &QuestTrace,
    dict: &EmbeddingDictionary<T>,
    lexicon: Option<&WordLexicon>,
    solver: SolverKind,
    cfg: &SolverConfig,
    noise: &NoiseSpec,
    synonyms: &SynonymTable,
) -> Result<EvaluationReport> {
    cfg.validate()?;
    let gold = trace.gold_bows(dict)?;
    let measurements = simulate_encoder(trace, dict, noise, synonyms)?;
    let canon = synonyms.canonical_indices(dict)?;

    let mut per_step = Vec::with_capacity(trace.len());
    for (i, (y, gold_bow)) in measurements.iter().zip(&gold).enumerate() {
        let start = Instant::now();
        let candidates = solver.solve(dict, y, cfg)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let best = candidates.into_iter().next().expect("solvers return at least one candidate");

        let correct = bow_equal(&canonicalize(&best.bow, &canon), &canonicalize(gold_bow, &canon))?;
        let sentence = match lexicon {
            Some(lex) if !best.bow.is_empty() => order_words(&best.bow, lex, dict).ok(),
            _ => None,
        };
        per_step.push(StepOutcome {
            step: i,
            recovered: best.bow.to_token_counts(dict),
            bow: best.bow,
            sentence,
            gold: trace.steps[i].action.clone(),
            correct,
            residual: best.residual_norm_sq.as_f64(),
            wall_ms,
        });
    }

    let n = per_step.len() as f64;
    let correct: Vec<bool> = per_step.iter().map(|s| s.correct).collect();
    Ok(EvaluationReport {
        trace: trace.name.clone(),
        solver,
        config: cfg.clone(),
        fista_tau: cfg.fista_tau(),
        noise: *noise,
        steps: per_step.len(),
        accuracy: correct.iter().filter(|&&c| c).count() as f64 / n,
        reward: prefix_reward(&trace.rewards(), &correct),
        total_reward: trace.total_reward(),
        mean_step_ms: per_step.iter().map(|s| s.wall_ms).sum::<f64>() / n,
        per_step,
    })
}
