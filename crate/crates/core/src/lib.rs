//! Leftmost-outermost useful normalization of λ-terms in the linear
//! substitution calculus.
//!
//! Pure λ-terms are normalized with explicit substitutions so that the
//! number of steps is a reasonable cost model: only β-steps that matter are
//! performed, and the result stays compact. [`engine::normalize`] runs the
//! strategy, [`unfold::unfold`] recovers the ordinary normal form, and
//! [`analysis::compact_equal`] compares results without unfolding them.

pub mod analysis;
pub mod beta;
pub mod check;
pub mod engine;
pub mod family;
pub mod gen;
pub mod position;
pub mod syntax;
pub mod term;
pub mod unfold;

pub use analysis::{analyze_compact, analyze_explicit, analyze_relative, compact_equal, AnalysisTuple, Nature};
pub use engine::{
    apply_redex, is_useful, is_useful_oracle, next_redex, normalize, verify_trace, DerivationTrace, Strategy,
};
pub use position::{Position, RedexInfo, RedexKind, Step};
pub use syntax::{parse, ParseError};
pub use term::{Measure, Name, Term};
pub use unfold::{relative_unfold, unfold, unfold_context, DEFAULT_UNFOLD_CAP};
