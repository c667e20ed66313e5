//! A desk-scale laboratory for posterior prediction bounds in algorithmic
//! information theory.
//!
//! The crate provides a small concrete family of reference machines (prefix,
//! monotone, twice-prefix and length-aware conditional), exhaustive witness
//! enumeration with snapshots, budgeted estimators for `K`, `K(y|x)`, `Km`,
//! `M` and the condition-monotone complexity `K_*`, a zoo of computable
//! measures with a dominant mixture predictor, and exact verifiers for the
//! machine-exact inequalities of the theory (Kraft, semimeasure, dominance,
//! divergence bounds, the `ν` construction and its antichain claim).
//!
//! Everything probabilistic is an exact rational; only logarithms and square
//! roots are evaluated in floating point.
//!
//! Quantities that depend on universal-machine constants are never asserted:
//! their [`report::BoundReport`] carries [`report::Verdict::MeasuredOnly`].

pub mod bounds;
pub mod cli;
pub mod complexity;
pub mod enumeration;
pub mod error;
pub mod kstar;
pub mod machine;
pub mod measures;
pub mod nu;
pub mod rational;
pub mod report;
pub mod strings;

pub use complexity::{Complexity, ComplexityEstimate, Estimator, MassEstimate, SearchBudget};
pub use enumeration::{Witness, WitnessSet};
pub use error::{LabError, Result};
pub use machine::{Budget, MachineKind, Program, RunOutcome, RunStatus};
pub use measures::{MeasureRegistry, MeasureSpec, Predictor, Semimeasure};
pub use rational::Rational;
pub use report::{BoundReport, Value, Verdict};
