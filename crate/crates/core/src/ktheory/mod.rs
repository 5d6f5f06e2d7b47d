//! K-theory of the unital subshift algebra through the kernel and cokernel
//! of `1 − Φ`, `χ_A ↦ χ_A − Σ_{a ∈ ℒ(A)} χ_{r(A,a)}` on regular sets.

pub mod flat;
pub mod graph;
pub mod groups;
pub mod snf;
pub mod sofic;

pub use flat::{assemble_one_minus_phi, build_chi_basis, ChiBasis, FlatKTheory, KernelBasis, ParametricIntMatrix};
pub use graph::{graph_algebra_k_reference, graph_k_oracle, GraphK};
pub use groups::AbGroupInvariants;
pub use snf::{smith_normal_form, Matrix, Snf};
pub use sofic::{truncated_k, StageK, TruncatedK};

use crate::error::Result;
use crate::presentations::Presentation;

#[derive(Clone, Debug)]
pub enum KOutcome {
    /// Closed form for a flat presentation.
    Flat(Box<FlatKTheory>),
    /// Stage sequence for an automaton presentation.
    Stages(TruncatedK),
}

impl KOutcome {
    /// `(K₀, K₁)` when decided.
    pub fn groups(&self) -> Option<(AbGroupInvariants, AbGroupInvariants)> {
        match self {
            KOutcome::Flat(k) => Some((k.k0.clone(), k.k1.clone())),
            KOutcome::Stages(t) => t.stable().map(|s| (s.k0.clone(), s.k1.clone())),
        }
    }
}

pub fn k_groups(p: &Presentation, max_stage: usize, max_atoms: usize) -> Result<KOutcome> {
    match p {
        Presentation::Flat(f) => Ok(KOutcome::Flat(Box::new(flat::k_groups(f)?))),
        Presentation::Sofic(s) => Ok(KOutcome::Stages(truncated_k(s, max_stage, max_atoms)?)),
    }
}
