use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::harness::evaluate::evaluate;
use crate::harness::noise::{NoiseSpec, SynonymTable};
use crate::harness::trace::QuestTrace;
use crate::language::WordLexicon;
use crate::scalar::Real;
use crate::signal::{derive_seed, Snr};
use crate::solvers::{SolverConfig, SolverKind};

/// Column order of the sweep CSV.
pub const CSV_HEADER: [&str; 12] = [
    "trace",
    "solver",
    "K",
    "L",
    "snr",
    "wrong_p",
    "synonym_p",
    "seed",
    "repeat",
    "accuracy",
    "reward",
    "mean_step_ms",
];

/// One CSV line: a single repeat, or the mean over repeats (`repeat` is
/// `None`, written as `mean`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub trace: String,
    pub solver: SolverKind,
    pub k: usize,
    pub l: usize,
    pub snr: Snr,
    pub wrong_p: f64,
    pub synonym_p: f64,
    /// Seed of the noise realization; for the mean row, the grid seed.
    pub seed: u64,
    pub repeat: Option<usize>,
    pub accuracy: f64,
    pub reward: f64,
    pub mean_step_ms: f64,
}

impl SweepRow {
    fn record(&self) -> [String; 12] {
        [
            self.trace.clone(),
            self.solver.to_string(),
            self.k.to_string(),
            self.l.to_string(),
            self.snr.to_string(),
            self.wrong_p.to_string(),
            self.synonym_p.to_string(),
            self.seed.to_string(),
            self.repeat.map_or_else(|| "mean".to_owned(), |r| r.to_string()),
            self.accuracy.to_string(),
            self.reward.to_string(),
            format!("{:.4}", self.mean_step_ms),
        ]
    }
}

/// Noise seed used for `repeat` of a grid point seeded with `seed`.
pub fn repeat_seed(seed: u64, repeat: usize) -> u64 {
    derive_seed(seed, &[0x5eed, repeat as u64])
}

/// Cross product of a grid of SnR values and demonstration-noise
/// probabilities, all sharing `seed`.
pub fn noise_grid(snrs: &[Snr], wrong_ps: &[f64], synonym_ps: &[f64], seed: u64) -> Vec<NoiseSpec> {
    let mut out = Vec::with_capacity(snrs.len() * wrong_ps.len() * synonym_ps.len());
    for &snr in snrs {
        for &wrong_action_prob in wrong_ps {
            for &synonym_prob in synonym_ps {
                out.push(NoiseSpec { snr, wrong_action_prob, synonym_prob, seed });
            }
        }
    }
    out
}

/// Evaluates every solver at every grid point `repeats` times.
///
/// Repeat `r` of a grid point uses the noise seed `repeat_seed(seed, r)`,
/// independent of the solver, so solvers are compared on identical noise.
/// Cells run in parallel; rows come back in (solver, grid point, repeat)
/// order, each group followed by its mean row.
#[allow(clippy::too_many_arguments)]
pub fn sweep<T: Real>(
    trace: &QuestTrace,
    dict: &EmbeddingDictionary<T>,
    lexicon: Option<&WordLexicon>,
    solvers: &[SolverKind],
    cfg: &SolverConfig,
    noise_grid: &[NoiseSpec],
    repeats: usize,
    synonyms: &SynonymTable,
) -> Result<Vec<SweepRow>> {
    if repeats == 0 {
        return Err(Error::config("repeats must be at least 1"));
    }
    let cells: Vec<(SolverKind, usize, usize)> = solvers
        .iter()
        .flat_map(|&s| (0..noise_grid.len()).flat_map(move |g| (0..repeats).map(move |r| (s, g, r))))
        .collect();

    let rows = cells
        .par_iter()
        .map(|&(solver, g, r)| {
            let base = &noise_grid[g];
            let noise = NoiseSpec { seed: repeat_seed(base.seed, r), ..*base };
            let rep = evaluate(trace, dict, lexicon, solver, cfg, &noise, synonyms)?;
            Ok(SweepRow {
                trace: trace.name.clone(),
                solver,
                k: solver.beam_width(cfg),
                l: cfg.max_words,
                snr: noise.snr,
                wrong_p: noise.wrong_action_prob,
                synonym_p: noise.synonym_prob,
                seed: noise.seed,
                repeat: Some(r),
                accuracy: rep.accuracy,
                reward: rep.reward,
                mean_step_ms: rep.mean_step_ms,
            })
        })
        .collect::<Result<Vec<SweepRow>>>()?;

    let mut out = Vec::with_capacity(rows.len() + rows.len() / repeats);
    for (group, base) in rows.chunks(repeats).zip(solvers.iter().flat_map(|_| noise_grid.iter())) {
        out.extend_from_slice(group);
        let n = group.len() as f64;
        let mean = |f: fn(&SweepRow) -> f64| group.iter().map(f).sum::<f64>() / n;
        out.push(SweepRow {
            seed: base.seed,
            repeat: None,
            accuracy: mean(|r| r.accuracy),
            reward: mean(|r| r.reward),
            mean_step_ms: mean(|r| r.mean_step_ms),
            ..group[0].clone()
        });
    }
    Ok(out)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
