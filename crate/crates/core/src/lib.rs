//! Cylinder-set algebras of one-sided subshifts: exact set operations,
//! K-groups through the map `χ_A ↦ χ_A − Σ_a χ_{r(A,a)}`, condition (L), the
//! OTW compactification, isometric conjugacies and a pointwise operator
//! model of the defining relations.

pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod ktheory;
pub mod operator;
pub mod presentations;
pub mod setalg;
pub mod symbolic;
pub mod syntax;

pub use error::{Error, Result};
pub use presentations::Presentation;
pub use setalg::{Term, USet};
pub use symbolic::{Index, Letter, PointTemplate, Word};
