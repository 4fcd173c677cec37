//! Recovery of integer bag-of-words vectors from (noisy) sums of word
//! embeddings.
//!
//! The numeric core is generic over the floating point type through
//! [`Real`]; the aliases below pin the common `f64` and `f32` instantiations.
//!
//! ```
//! use bowsense::{BagOfWords, Dictionary, SolverConfig, ik_omp, synthesize};
//!
//! let dict = Dictionary::from_columns(
//!     vec!["take".into(), "egg".into(), "north".into()],
//!     3,
//!     vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
//! )
//! .unwrap();
//! let gold = BagOfWords::from_indices(3, [0, 1]).unwrap();
//! let y = synthesize(&dict, &gold).unwrap();
//! let cfg = SolverConfig { beam_width: 3, ..SolverConfig::default() };
//! let best = &ik_omp(&dict, &y, &cfg).unwrap()[0];
//! assert_eq!(best.bow, gold);
//! ```

pub mod dictionary;
pub mod error;
pub mod harness;
pub mod language;
pub mod linalg;
pub mod scalar;
pub mod signal;
pub mod solvers;

pub use dictionary::{load_dictionary, mutual_coherence, read_word_list, CoherenceReport, EmbeddingDictionary};
pub use error::{Error, Result};
pub use harness::bench::{bench_runtime, RuntimeRow};
pub use harness::evaluate::{evaluate, prefix_reward, EvaluationReport, StepOutcome};
pub use harness::noise::{simulate_encoder, NoiseSpec, SynonymTable};
pub use harness::sweep::{sweep, SweepRow};
pub use harness::trace::{QuestTrace, TraceStep};
pub use language::{order_words, sentence_to_bow, Tag, WordLexicon};
pub use scalar::Real;
pub use signal::{add_noise, bow_equal, synthesize, BagOfWords, EmbeddingSum, Snr};
pub use solvers::{
    brute_force, fista_bpdn, ik_omp, ik_omp_strict, omp, round_to_bow, Candidate, FistaOutcome, SolverConfig,
    SolverKind,
};

/// Double precision dictionary, the default throughout the harness and CLI.
pub type Dictionary = EmbeddingDictionary<f64>;
/// Single precision dictionary.
pub type Dictionary32 = EmbeddingDictionary<f32>;
pub type Measurement = EmbeddingSum<f64>;
pub type Measurement32 = EmbeddingSum<f32>;
pub type Scored = Candidate<f64>;
pub type Scored32 = Candidate<f32>;
