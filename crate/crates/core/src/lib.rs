//! Dynamic approximate effective resistances.
//!
//! The engine keeps an unweighted multigraph `G` together with a sampled
//! terminal set `T` and a collection of short random walks. Each walk
//! starts on an edge of `G`, runs in both directions until it reaches `T`
//! (or a step cap), and contributes one weighted edge between the two
//! terminals it reached. The resulting sketch `H` approximates the Schur
//! complement of `G` onto `T`, which preserves effective resistances
//! between terminals. Updates to `G` only re-route the walks they touch,
//! and queries promote their endpoints to terminals before solving on `H`.
//!
//! Module map:
//!
//! - [`graph`]: the dynamic multigraph with O(1) incident-edge sampling.
//! - [`numerics`]: Laplacians, solvers, the dense pseudoinverse oracle and
//!   leverage-score sparsification.
//! - [`schur`]: exact Schur complements, the static walk sampler and the
//!   terminal-free walk expansion.
//! - [`walks`]: the walk collection with rank/select occurrence indexes.
//! - [`dynamic`]: the dynamic Schur complement sketch.
//! - [`engine`]: the two-level engine with rebuilds and the query path.
//! - [`io`]: text formats shared by the CLI and tests.

pub mod dynamic;
pub mod engine;
pub mod graph;
pub mod io;
pub mod numerics;
pub mod ostree;
pub mod schur;
pub mod sketch;
pub mod unionfind;
pub mod walks;

pub use dynamic::{ChangeEvent, DeleteRule, DynamicSc, DynamicScParams, UpdateStats};
pub use engine::{EngineConfig, EngineError, ErEngine, TerminalMode};
pub use graph::{DynamicMultigraph, EdgeId, GraphError, VertexId};
pub use numerics::{LaplacianSystem, NumericsError, SolveOptions, SolverKind, WeightedGraphView};
pub use schur::{ExactSchur, SchurError, TerminalSet};
pub use sketch::{HEdge, SchurSketch};
pub use walks::{EndStatus, Occurrence, Side, Walk, WalkId, WalkStore, WalkStoreError};

/// Seedable generator used wherever the crate draws randomness.
pub type RandomStream = rand_chacha::ChaCha8Rng;

/// Builds a [`RandomStream`] from a 64-bit seed.
pub fn stream_from_seed(seed: u64) -> RandomStream {
    use rand::SeedableRng;
    RandomStream::seed_from_u64(seed)
}
