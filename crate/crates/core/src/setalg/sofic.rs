//! Sets of the cylinder algebra over an automaton presentation.
//!
//! A set at depth `N` is a map from words `w ∈ L_N(X)` to a set of tail
//! atoms: it contains `wy` exactly when the tail pattern of `y` is one of the
//! listed atoms. Canonical form is the least depth at which the set is
//! expressible, which makes equality structural.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::presentations::sofic::{bits128, SoficPresentation};
use crate::symbolic::{PointTemplate, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SoficSet {
    depth: usize,
    entries: BTreeMap<Vec<usize>, u128>,
}

impl SoficSet {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, u128> {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl SoficPresentation {
    pub fn set_empty(&self) -> SoficSet {
        SoficSet { depth: 0, entries: BTreeMap::new() }
    }

    pub fn set_full(&self) -> SoficSet {
        let mut entries = BTreeMap::new();
        if let Some(q0) = self.initial() {
            entries.insert(Vec::new(), self.atoms_containing(q0));
        }
        SoficSet { depth: 0, entries }
    }

    /// `C(α,β) = β · (F_α ∩ F_β)`.
    pub fn set_c(&self, alpha: &Word, beta: &Word) -> Result<SoficSet> {
        let a = self.ids(alpha)?;
        let b = self.ids(beta)?;
        let (Some(qa), Some(qb)) = (self.state_after(&a), self.state_after(&b)) else {
            return Ok(self.set_empty());
        };
        let mask = self.atoms_containing(qa) & self.atoms_containing(qb);
        let mut entries = BTreeMap::new();
        entries.insert(b.clone(), mask);
        Ok(self.canon(SoficSet { depth: b.len(), entries }))
    }

    fn lift1(&self, s: &SoficSet) -> SoficSet {
        let mut entries = BTreeMap::new();
        for (w, &m) in &s.entries {
            let q = self.state_after(w).expect("entries are language words");
            for a in 0..self.alphabet().len() {
                if let Some(r) = self.step(q, a) {
                    let lifted = self.lift_mask(m, a, r);
                    if lifted != 0 {
                        let mut v = w.clone();
                        v.push(a);
                        entries.insert(v, lifted);
                    }
                }
            }
        }
        SoficSet { depth: s.depth + 1, entries }
    }

    /// Atoms `S'` at the child state `r` with `pre_a(S')` among `m`.
    fn lift_mask(&self, m: u128, a: usize, r: usize) -> u128 {
        bits128(self.atoms_containing(r))
            .filter(|&s| m >> self.pre_atom(a, s) & 1 == 1)
            .fold(0u128, |acc, s| acc | 1 << s)
    }

    pub fn lift(&self, s: &SoficSet, depth: usize) -> SoficSet {
        let mut s = s.clone();
        while s.depth < depth {
            s = self.lift1(&s);
        }
        s
    }

    fn reduce_once(&self, s: &SoficSet) -> Option<SoficSet> {
        if s.depth == 0 {
            return None;
        }
        let mut parents: BTreeMap<Vec<usize>, u128> = BTreeMap::new();
        for (w, &m) in &s.entries {
            let (a, u) = w.split_last().expect("positive depth");
            let c = parents.entry(u.to_vec()).or_insert(0);
            for t in bits128(m) {
                *c |= 1 << self.pre_atom(*a, t);
            }
        }
        for (u, &c) in &parents {
            let q = self.state_after(u).expect("language word");
            for a in 0..self.alphabet().len() {
                let Some(r) = self.step(q, a) else { continue };
                let mut v = u.clone();
                v.push(a);
                let have = s.entries.get(&v).copied().unwrap_or(0);
                if self.lift_mask(c, a, r) != have {
                    return None;
                }
            }
        }
        Some(SoficSet { depth: s.depth - 1, entries: parents })
    }

    pub fn canon(&self, mut s: SoficSet) -> SoficSet {
        s.entries.retain(|_, m| *m != 0);
        if s.entries.is_empty() {
            return self.set_empty();
        }
        while let Some(t) = self.reduce_once(&s) {
            s = t;
        }
        s
    }

    pub fn set_complement(&self, s: &SoficSet) -> SoficSet {
        let mut entries = BTreeMap::new();
        for w in self.words(s.depth) {
            let q = self.state_after(&w).expect("language word");
            let m = self.atoms_containing(q) & !s.entries.get(&w).copied().unwrap_or(0);
            entries.insert(w, m);
        }
        self.canon(SoficSet { depth: s.depth, entries })
    }

    pub fn set_combine(&self, x: &SoficSet, y: &SoficSet, op: impl Fn(u128, u128) -> u128) -> SoficSet {
        let d = x.depth.max(y.depth);
        let (x, y) = (self.lift(x, d), self.lift(y, d));
        let mut entries = BTreeMap::new();
        for w in x.entries.keys().chain(y.entries.keys()) {
            if entries.contains_key(w) {
                continue;
            }
            let m = op(
                x.entries.get(w).copied().unwrap_or(0),
                y.entries.get(w).copied().unwrap_or(0),
            );
            entries.insert(w.clone(), m);
        }
        self.canon(SoficSet { depth: d, entries })
    }

    pub fn set_contains(&self, s: &SoficSet, x: &PointTemplate) -> bool {
        if !self.member(x) {
            return false;
        }
        let Ok(w) = self.ids(&x.prefix(s.depth)) else { return false };
        let Some(m) = s.entries.get(&w) else { return false };
        let tail = x.shift_by(s.depth);
        let Some((tp, tq)) = self.template_ids(&tail) else { return false };
        match self.atom_index(self.pattern(&tp, &tq)) {
            Some(i) => m >> i & 1 == 1,
            None => false,
        }
    }

    /// `r(A, α) = {x : αx ∈ A}`.
    pub fn set_relative_range(&self, s: &SoficSet, alpha: &Word) -> Result<SoficSet> {
        let a = self.ids(alpha)?;
        if self.state_after(&a).is_none() {
            return Ok(self.set_empty());
        }
        let lifted = self.lift(s, a.len());
        let entries = lifted
            .entries
            .iter()
            .filter(|(w, _)| w.starts_with(&a))
            .map(|(w, &m)| (w[a.len()..].to_vec(), m))
            .collect();
        Ok(self.canon(SoficSet { depth: lifted.depth - a.len(), entries }))
    }

    /// First letters of points in the set, as letter ids.
    pub fn set_letters(&self, s: &SoficSet) -> Vec<usize> {
        let lifted = self.lift(s, s.depth.max(1));
        let mut out: Vec<usize> = lifted.entries.keys().map(|w| w[0]).collect();
        out.dedup();
        out
    }

    /// Renders the canonical form as `prefix:[state lists]` items.
    pub fn set_describe(&self, s: &SoficSet) -> String {
        if s.entries.is_empty() {
            return "∅".into();
        }
        let items: Vec<String> = s
            .entries
            .iter()
            .map(|(w, &m)| {
                let atoms: Vec<String> = bits128(m)
                    .map(|i| {
                        let st: Vec<String> = (0..64)
                            .filter(|q| self.atoms()[i] >> q & 1 == 1)
                            .map(|q| format!("q{q}"))
                            .collect();
                        format!("{{{}}}", st.join(","))
                    })
                    .collect();
                format!("{}:[{}]", self.word(w), atoms.join("|"))
            })
            .collect();
        format!("depth {}; {}", s.depth, items.join("; "))
    }
}
