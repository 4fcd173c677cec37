use std::io::Write;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{derive_seed, rng_from_seed, synthesize, BagOfWords, EmbeddingSum};
use crate::solvers::{SolverConfig, SolverKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeRow {
    pub solver: SolverKind,
    pub k: usize,
    pub l: usize,
    pub samples: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub total_ms: f64,
}

/// Random bags of 1..=`max_words` words (uniform length, uniform words).
pub fn random_bows(d: usize, max_words: usize, samples: usize, seed: u64) -> Vec<BagOfWords> {
    let mut rng = rng_from_seed(derive_seed(seed, &[max_words as u64]));
    (0..samples)
        .map(|_| {
            let len = rng.random_range(1..=max_words);
            BagOfWords::from_indices(d, (0..len).map(|_| rng.random_range(0..d))).expect("indices in range")
        })
        .collect()
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Times each solver configuration on the same `samples` noiseless
/// measurements of random bags.
pub fn bench_runtime<T: Real>(
    dict: &EmbeddingDictionary<T>,
    variants: &[(SolverKind, SolverConfig)],
    samples: usize,
    seed: u64,
) -> Result<Vec<RuntimeRow>> {
    if samples < 10 {
        return Err(Error::config("bench needs at least 10 samples"));
    }
    let mut rows = Vec::with_capacity(variants.len());
    for (solver, cfg) in variants {
        cfg.validate()?;
        let ys: Vec<EmbeddingSum<T>> = random_bows(dict.len(), cfg.max_words, samples, seed)
            .iter()
            .map(|b| synthesize(dict, b))
            .collect::<Result<_>>()?;
        // warm-up
        solver.solve(dict, &ys[0], cfg)?;
        let mut times = Vec::with_capacity(samples);
        for y in &ys {
            let start = Instant::now();
            let out = solver.solve(dict, y, cfg)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            std::hint::black_box(out);
        }
        let total: f64 = times.iter().sum();
        times.sort_by(f64::total_cmp);
        rows.push(RuntimeRow {
            solver: *solver,
            k: solver.beam_width(cfg),
            l: cfg.max_words,
            samples,
            mean_ms: total / samples as f64,
            median_ms: nearest_rank(&times, 0.5),
            p95_ms: nearest_rank(&times, 0.95),
            total_ms: total,
        });
    }
    Ok(rows)
}

pub fn write_runtime_csv<W: Write>(rows: &[RuntimeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["solver", "K", "L", "samples", "mean_ms", "median_ms", "p95_ms", "total_ms"])?;
    for r in rows {
        w.write_record([
            r.solver.to_string(),
            r.k.to_string(),
            r.l.to_string(),
            r.samples.to_string(),
            format!("{:.4}", r.mean_ms),
            format!("{:.4}", r.median_ms),
            format!("{:.4}", r.p95_ms),
            format!("{:.3}", r.total_ms),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict() -> EmbeddingDictionary<f64> {
        let words = (0..8).map(|i| format!("w{i}")).collect();
        let cols = (0..8).map(|i| (0..4).map(|k| ((i * 7 + k * 3) % 5) as f64 - 1.5).collect()).collect();
        EmbeddingDictionary::from_columns(words, 4, cols).unwrap()
    }

    #[test]
    fn random_bags_respect_length() {
        let bows = random_bows(8, 3, 200, 1);
        assert!(bows.iter().all(|b| (1..=3).contains(&b.total())));
        assert_eq!(bows, random_bows(8, 3, 200, 1));
    }

    #[test]
    fn percentiles() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(nearest_rank(&v, 0.5), 10.0);
        assert_eq!(nearest_rank(&v, 0.95), 19.0);
    }

    #[test]
    fn reports_each_variant() {
        let variants = vec![
            (SolverKind::Omp, SolverConfig::default()),
            (SolverKind::Ikomp, SolverConfig { beam_width: 3, ..Default::default() }),
        ];
        let rows = bench_runtime(&dict(), &variants, 10, 0).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].k, 3);
        assert!(rows.iter().all(|r| r.mean_ms >= 0.0 && r.p95_ms >= r.median_ms));
        assert!(bench_runtime(&dict(), &variants, 9, 0).is_err());
    }
}
