//! Estimators of algorithmic (Kolmogorov-Chaitin) complexity for short binary
//! strings and small binary grids, built around two pillars:
//!
//! * the Coding Theorem Method (CTM): exhaustively run every small Turing
//!   machine in a (states, 2)-symbol formalism, tally the halting outputs, and
//!   read off `-log2` of each output's frequency as a complexity estimate;
//! * the Block Decomposition Method (BDM): cover a larger object with small
//!   blocks whose CTM values are known and charge `log2(multiplicity)` for
//!   repeats, giving a complexity measure that degrades gracefully toward
//!   entropy as objects outgrow the table.
//!
//! On top of these the crate provides elementary cellular automaton tooling
//! (rule evolution, wildcard rule simplification, rule interaction), an
//! algorithmic-information-dynamics perturbation calculus, classical baselines
//! (Shannon block entropy, bit-exact LZW, Langton's lambda), and a benchmark
//! harness that scores all 256 elementary rules against the Wolfram class
//! taxonomy.
//!
//! Everything is deterministic: randomness always flows from an explicit seed
//! through a fixed ChaCha8 stream, table files have a canonical byte form, and
//! parallel table construction merges worker shards in index order so thread
//! count never changes results.

pub mod aid;
pub mod bench;
pub mod bits;
pub mod complexity;
pub mod eca;
pub mod io;
pub mod stats;
pub mod turing;

pub use bits::{BitGrid, BitString};
