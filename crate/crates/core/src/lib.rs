//! Concept-wise multipreference reasoning for weighted defeasible EL⊥
//! knowledge bases.
//!
//! The pipeline is: [`parser`] → [`normalize`] → [`saturation`] →
//! [`engine`] (candidate enumeration + [`preference`] minima). [`oracle`]
//! is an independent brute-force decision procedure used for testing.

mod bits;
pub mod engine;
pub mod error;
pub mod examples;
pub mod explain;
pub mod gen;
pub mod model;
pub mod normalize;
pub mod oracle;
pub mod parser;
pub mod preference;
pub mod saturation;

pub use engine::{decide_entailment, decide_entailment_with, EntailmentVerdict, Options};
pub use error::{Error, Result};
pub use model::{ConceptExpr, KnowledgeBase, Query};
