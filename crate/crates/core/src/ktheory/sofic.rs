//! `(1 − Φ)` on the finite stages of an automaton presentation.
//!
//! Stage `n` is the Boolean algebra of depth-`n` sets: its atoms are pairs
//! `(w, S)` with `w ∈ L_n` and `S` a tail pattern containing `δ(w)`. Every
//! atom has the single letter `w₀`, and `r((w,S), w₀)` is the depth-`(n−1)`
//! atom `(w', S)` re-expanded at depth `n`, so `1 − Φ` maps the stage to
//! itself.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ktheory::groups::AbGroupInvariants;
use crate::ktheory::snf::{smith_normal_form, Matrix};
use crate::presentations::sofic::{bits128, SoficPresentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageK {
    pub stage: usize,
    pub atoms: usize,
    pub k0: AbGroupInvariants,
    pub k1: AbGroupInvariants,
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncatedK {
    pub stages: Vec<StageK>,
    /// First stage from which all later computed stages agree, if at least
    /// two stages agree at the end of the sequence.
    pub stable_from: Option<usize>,
}

impl TruncatedK {
    pub fn stable(&self) -> Option<&StageK> {
        self.stable_from.map(|_| self.stages.last().expect("nonempty when stable"))
    }
}

/// Atoms of stage `n` in (word, pattern) order.
fn stage_atoms(p: &SoficPresentation, n: usize) -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for w in p.words(n) {
        let q = p.state_after(&w).expect("language word");
        for s in bits128(p.atoms_containing(q)) {
            out.push((w.clone(), s));
        }
    }
    out
}

pub fn stage_matrix(p: &SoficPresentation, n: usize) -> Result<(Matrix, usize)> {
    if n == 0 {
        return Err(Error::Invalid("stages start at 1".into()));
    }
    let atoms = stage_atoms(p, n);
    let index: HashMap<(Vec<usize>, usize), usize> =
        atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let mut cols = Vec::with_capacity(atoms.len());
    for (w, s) in &atoms {
        let mut c = vec![0i128; atoms.len()];
        c[index[&(w.clone(), *s)]] += 1;
        let tail = &w[1..];
        let q = p.state_after(tail).expect("suffix of a language word");
        for a in 0..p.alphabet().len() {
            let Some(r) = p.step(q, a) else { continue };
            let mut child = tail.to_vec();
            child.push(a);
            for t in bits128(p.atoms_containing(r)) {
                if p.pre_atom(a, t) == *s {
                    c[index[&(child.clone(), t)]] -= 1;
                }
            }
        }
        cols.push(c);
    }
    Ok((Matrix::from_cols(atoms.len(), &cols), atoms.len()))
}

pub fn stage_k(p: &SoficPresentation, n: usize) -> Result<StageK> {
    let (m, atoms) = stage_matrix(p, n)?;
    let s = smith_normal_form(&m)?;
    Ok(StageK {
        stage: n,
        atoms,
        k0: AbGroupInvariants::finite(s.coker_free_rank() as u64, s.invariant_factors()),
        k1: AbGroupInvariants::free(s.kernel_rank() as u64),
    })
}

/// Stages `1..=max_stage`; a stage with more than `max_atoms` atoms ends the
/// sequence early.
pub fn truncated_k(p: &SoficPresentation, max_stage: usize, max_atoms: usize) -> Result<TruncatedK> {
    let mut stages: Vec<StageK> = Vec::new();
    for n in 1..=max_stage {
        if stage_atoms(p, n).len() > max_atoms {
            break;
        }
        stages.push(stage_k(p, n)?);
    }
    let same = |a: &StageK, b: &StageK| a.k0 == b.k0 && a.k1 == b.k1;
    let stable_from = match stages.last() {
        Some(last) if stages.len() >= 2 => {
            let from = stages.iter().rposition(|s| !same(s, last)).map_or(0, |i| i + 1);
            (from + 1 < stages.len()).then(|| stages[from].stage)
        }
        _ => None,
    };
    Ok(TruncatedK { stages, stable_from })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::presentations::Presentation;

    fn sofic(p: Presentation) -> SoficPresentation {
        match p {
            Presentation::Sofic(s) => s,
            Presentation::Flat(_) => unreachable!(),
        }
    }

    #[test]
    fn full_shift_is_trivial() {
        let t = truncated_k(&sofic(corpus::full_shift(2)), 4, 500).unwrap();
        let s = t.stable().unwrap();
        assert!(s.k0.is_trivial() && s.k1.is_trivial());
    }

    #[test]
    fn golden_mean_is_trivial() {
        let t = truncated_k(&sofic(corpus::golden_mean()), 5, 500).unwrap();
        let s = t.stable().unwrap();
        assert!(s.k0.is_trivial() && s.k1.is_trivial());
    }

    #[test]
    fn fixed_point_every_stage() {
        let t = truncated_k(&sofic(corpus::fixed_point()), 4, 500).unwrap();
        assert_eq!(t.stable_from, Some(1));
        for s in &t.stages {
            assert_eq!((s.k0.clone(), s.k1.clone()), (AbGroupInvariants::free(1), AbGroupInvariants::free(1)));
        }
    }
}
