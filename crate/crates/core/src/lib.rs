//! A desk-scale laboratory for the Thresholding Greedy Algorithm (TGA).
//!
//! The crate evaluates explicit sequence-space norms on finitely supported
//! vectors, implements greedy and `f`-greedy set machinery, provides
//! brute-force approximation oracles, and packages numerical checks of the
//! greedy-basis theory for the class `𝓕` of concave threshold functions.
//!
//! Modules:
//! - [`funcf`]: the function class `𝓕` (`FuncF`).
//! - [`vector`]: `SparseVector` and indicator vectors.
//! - [`space`]: norm evaluators (`Space`), the weight recursion and the Haar system.
//! - [`greedy`]: greedy sets, `f`-greedy sets, projections, truncation, TGA traces.
//! - [`oracle`]: σ̃/σ oracles, democracy profiles and constant estimators.
//! - [`propcheck`]: the catalog of named checks and the suite runner.

pub mod error;
pub mod funcf;
pub mod greedy;
pub mod numeric;
pub mod oracle;
pub mod propcheck;
pub mod report;
pub mod schema;
pub mod space;
pub mod vector;

pub use error::{Error, Result};
pub use funcf::{Dichotomy, FuncF, FuncKind};
pub use greedy::{GreedyDecomposition, FGreedyVerdict, IndexSet, TiePolicy, TraceRow};
pub use oracle::{ConstantEstimate, ConstantName, Sampler};
pub use propcheck::{run_check, run_suite, Tier};
pub use report::{CheckReport, CheckStatus};
pub use space::{HaarSystem, Space, SpaceKind, WeightSequence};
pub use vector::SparseVector;
