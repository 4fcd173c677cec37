//! Walkthrough replay: simulated encoder noise, per-step recovery scoring,
//! parameter sweeps and runtime benchmarks.

pub mod bench;
pub mod evaluate;
pub mod noise;
pub mod sweep;
pub mod trace;
