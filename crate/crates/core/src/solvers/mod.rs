//! Sparse recovery of integer bags of words from embedding sums.

mod beam;
mod brute;
mod fista;
mod omp;
mod rounding;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::signal::{BagOfWords, EmbeddingSum};

pub use beam::{ik_omp, ik_omp_strict};
pub use brute::{brute_force, multiset_count, BRUTE_FORCE_LIMIT};
pub use fista::{fista_bpdn, soft_threshold, FistaOutcome};
pub use omp::{omp, omp_coefficients};
pub use rounding::round_to_bow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Maximum total word count `L` of a recovered action.
    pub max_words: usize,
    /// Beam width `K` for the IK-OMP family.
    pub beam_width: usize,
    /// Weight `lambda` on the residual in `||x||_1 + lambda ||y - Dx||`.
    /// FISTA minimizes `0.5 ||y - Dx||^2 + tau ||x||_1` with `tau = 1 / (2 lambda)`.
    pub fista_lambda: f64,
    pub fista_max_iter: usize,
    /// Stop once the relative objective change drops below this.
    pub fista_tol: f64,
    /// Project onto `x >= 0` inside the proximal step.
    pub fista_nonnegative: bool,
    /// OMP stops once `||r||` is at or below this.
    pub omp_residual_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_words: 4,
            beam_width: 20,
            fista_lambda: 5.0,
            fista_max_iter: 20_000,
            fista_tol: 1e-10,
            fista_nonnegative: false,
            omp_residual_threshold: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_words == 0 {
            return Err(Error::config("max_words must be at least 1"));
        }
        if self.beam_width == 0 {
            return Err(Error::config("beam_width must be at least 1"));
        }
        if !(self.fista_lambda > 0.0 && self.fista_lambda.is_finite()) {
            return Err(Error::config("fista_lambda must be positive and finite"));
        }
        if self.fista_tol.is_nan() || self.fista_tol <= 0.0 {
            return Err(Error::config("fista_tol must be positive"));
        }
        if self.omp_residual_threshold.is_nan() || self.omp_residual_threshold < 0.0 {
            return Err(Error::config("omp_residual_threshold must be non-negative"));
        }
        Ok(())
    }

    /// L1 weight of the squared-residual objective.
    pub fn fista_tau(&self) -> f64 {
        1.0 / (2.0 * self.fista_lambda)
    }

    /// Config with the L1 weight `tau` given directly.
    pub fn with_fista_tau(mut self, tau: f64) -> Self {
        self.fista_lambda = 1.0 / (2.0 * tau);
        self
    }
}

/// A recovered bag of words scored against the measurement it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T> {
    pub bow: BagOfWords,
    /// `||y - D bow||^2`
    pub residual_norm_sq: T,
}

impl<T: Real> Candidate<T> {
    /// Scores `bow` from scratch.
    pub fn score(dict: &EmbeddingDictionary<T>, y: &EmbeddingSum<T>, bow: BagOfWords) -> Result<Self> {
        let residual_norm_sq = residual_norm_sq(dict, y, &bow)?;
        Ok(Self { bow, residual_norm_sq })
    }

    /// Residual, then fewer words, then canonical key.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.residual_norm_sq
            .partial_cmp(&other.residual_norm_sq)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.bow.total().cmp(&other.bow.total()))
            .then_with(|| self.bow.key().cmp(other.bow.key()))
    }
}

/// `||y - D bow||^2`
pub fn residual_norm_sq<T: Real>(dict: &EmbeddingDictionary<T>, y: &EmbeddingSum<T>, bow: &BagOfWords) -> Result<T> {
    let fit = crate::signal::synthesize(dict, bow)?;
    check_dims(dict, y)?;
    Ok(linalg::dist_sq(y.values(), fit.values()))
}

pub(crate) fn check_dims<T: Real>(dict: &EmbeddingDictionary<T>, y: &EmbeddingSum<T>) -> Result<()> {
    if y.len() != dict.dim() {
        return Err(Error::domain(format!(
            "measurement has length {}, dictionary embeddings have {}",
            y.len(),
            dict.dim()
        )));
    }
    Ok(())
}

/// Solvers selectable from the harness and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Classical OMP with least-squares refits, rounded at the end.
    Omp,
    /// IK-OMP with a beam of one.
    Iomp,
    /// IK-OMP keeping the best candidate from every round.
    Ikomp,
    /// IK-OMP returning round-`L` candidates only.
    IkompPaper,
    Fista,
    /// Exhaustive search, small instances only.
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::Omp,
        SolverKind::Iomp,
        SolverKind::Ikomp,
        SolverKind::IkompPaper,
        SolverKind::Fista,
        SolverKind::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Omp => "omp",
            SolverKind::Iomp => "iomp",
            SolverKind::Ikomp => "ikomp",
            SolverKind::IkompPaper => "ikomp-paper",
            SolverKind::Fista => "fista",
            SolverKind::Oracle => "oracle",
        }
    }

    /// Beam width actually used under `cfg` (1 for the non-beam solvers).
    pub fn beam_width(self, cfg: &SolverConfig) -> usize {
        match self {
            SolverKind::Ikomp | SolverKind::IkompPaper => cfg.beam_width,
            _ => 1,
        }
    }

    /// Runs the solver; candidates come back best first.
    pub fn solve<T: Real>(
        self,
        dict: &EmbeddingDictionary<T>,
        y: &EmbeddingSum<T>,
        cfg: &SolverConfig,
    ) -> Result<Vec<Candidate<T>>> {
        match self {
            SolverKind::Omp => Ok(vec![omp(dict, y, cfg)?]),
            SolverKind::Iomp => ik_omp(dict, y, &SolverConfig { beam_width: 1, ..cfg.clone() }),
            SolverKind::Ikomp => ik_omp(dict, y, cfg),
            SolverKind::IkompPaper => ik_omp_strict(dict, y, cfg),
            SolverKind::Fista => Ok(vec![fista_bpdn(dict, y, cfg)?.candidate]),
            SolverKind::Oracle => Ok(vec![brute_force(dict, y, cfg)?]),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL.into_iter().find(|k| k.as_str() == s.trim()).ok_or_else(|| Error::UnknownSolver(s.to_owned()))
    }
}
