//! Lebesgue decomposition of positive non-commutative measures on the free
//! disk operator system, computed on truncated Fock spaces.
//!
//! A measure is a table of moments `μ(L^γ)` indexed by words in `d` letters
//! ([`words`], [`measures`]). Its GNS space is realized degree by degree
//! ([`gns`]); the decomposition against a splitting measure `λ` is computed
//! from the co-embedding of `H²(μ+λ)` into `H²(λ)` ([`decompose`]). Herglotz,
//! Cauchy and kernel transforms live in [`transforms`]; [`classical`] is the
//! one-variable closed-form reference used to check the engine.

pub mod classical;
pub mod decompose;
pub mod error;
pub mod gns;
pub mod linalg;
pub mod measures;
pub mod specfile;
pub mod transforms;
pub mod words;

pub use classical::{oracle_decompose, oracle_moments, Atom, ClassicalSpec, DensityPiece};
pub use decompose::{
    ac_detect, decompose_report, simon_decompose, simon_decompose_with, DecomposeConfig,
    DecompositionReport, DecompositionResult, SimonState, Verdict,
};
pub use error::{Error, Result};
pub use gns::{coembed, cuntz_distance, GnsTruncation};
pub use linalg::{CMat, CVec, C64};
pub use measures::{GramMatrix, NcMeasure};
pub use specfile::MeasureSpec;
pub use transforms::{cauchy, herglotz, mu_kernel, szego_kernel, MatrixPoint, TransformValue};
pub use words::{Word, WordIndex};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
