//! Deterministic follower-set automata for subshifts over a finite alphabet.
//!
//! `X` is the set of labels of infinite paths from the initial state. Every
//! state is reachable and has an infinite future, so the finite path labels
//! from the initial state are exactly `L_X`, and the follower set `F_α` is
//! the path set of the state reached by `α`.
//!
//! A *tail pattern* of a sequence `y` is the set of states from which `y` can
//! be followed. The realizable patterns are the atoms the set algebra works
//! with.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Letter, PointTemplate, Word};

const MAX_STATES: usize = 64;
const MAX_ATOMS: usize = 128;

/// The serializable part of a presentation; everything else is derived.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoficData {
    pub alphabet: Vec<Letter>,
    pub delta: Vec<Vec<Option<usize>>>,
    pub initial: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SoficPresentation {
    alphabet: Vec<Letter>,
    lookup: HashMap<Letter, usize>,
    delta: Vec<Vec<Option<usize>>>,
    initial: Option<usize>,
    atoms: Vec<u64>,
    atoms_of_state: Vec<u128>,
    pre: Vec<Vec<u8>>,
}

impl SoficPresentation {
    /// The subshift `X_F` avoiding `forbidden`.
    pub fn from_forbidden(alphabet: Vec<Letter>, forbidden: &[Word]) -> Result<Self> {
        let lookup = index_alphabet(&alphabet)?;
        let mut bad = Vec::new();
        for f in forbidden {
            let ids = f
                .letters()
                .iter()
                .map(|a| lookup.get(a).copied().ok_or_else(|| Error::UnknownLetter(a.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if ids.is_empty() {
                return Self::from_automaton(alphabet, Vec::new(), None);
            }
            bad.push(ids);
        }
        let keep = bad.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1);
        let mut ctx_id: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut ctxs: Vec<Vec<usize>> = vec![Vec::new()];
        ctx_id.insert(Vec::new(), 0);
        let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
        let mut i = 0;
        while i < ctxs.len() {
            let ctx = ctxs[i].clone();
            let mut row = vec![None; alphabet.len()];
            for (a, slot) in row.iter_mut().enumerate() {
                let mut s = ctx.clone();
                s.push(a);
                if bad.iter().any(|f| s.ends_with(f)) {
                    continue;
                }
                let next = s[s.len().saturating_sub(keep)..].to_vec();
                let id = *ctx_id.entry(next.clone()).or_insert_with(|| {
                    ctxs.push(next);
                    ctxs.len() - 1
                });
                *slot = Some(id);
            }
            delta.push(row);
            i += 1;
        }
        Self::from_automaton(alphabet, delta, Some(0))
    }

    /// Trims, minimizes and renumbers an arbitrary deterministic automaton.
    pub fn from_automaton(
        alphabet: Vec<Letter>,
        delta: Vec<Vec<Option<usize>>>,
        initial: Option<usize>,
    ) -> Result<Self> {
        let lookup = index_alphabet(&alphabet)?;
        let k = alphabet.len();
        if delta.iter().any(|r| r.len() != k || r.iter().flatten().any(|&t| t >= delta.len())) {
            return Err(Error::Invalid("malformed transition table".into()));
        }
        let (delta, initial) = match initial {
            Some(q0) if q0 < delta.len() => trim_and_minimize(&delta, q0, k),
            Some(_) => return Err(Error::Invalid("initial state out of range".into())),
            None => (Vec::new(), None),
        };
        if delta.len() > MAX_STATES {
            return Err(Error::Unsupported(format!(
                "{} states after minimization (limit {MAX_STATES})",
                delta.len()
            )));
        }
        let mut p = SoficPresentation {
            alphabet,
            lookup,
            delta,
            initial,
            atoms: Vec::new(),
            atoms_of_state: Vec::new(),
            pre: Vec::new(),
        };
        p.derive_atoms()?;
        Ok(p)
    }

    pub fn from_data(data: SoficData) -> Result<Self> {
        Self::from_automaton(data.alphabet, data.delta, data.initial)
    }

    pub fn data(&self) -> SoficData {
        SoficData {
            alphabet: self.alphabet.clone(),
            delta: self.delta.clone(),
            initial: self.initial,
        }
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_none()
    }

    pub fn initial(&self) -> Option<usize> {
        self.initial
    }

    pub fn step(&self, q: usize, a: usize) -> Option<usize> {
        self.delta[q][a]
    }

    pub fn letter_id(&self, a: &Letter) -> Option<usize> {
        self.lookup.get(a).copied()
    }

    pub fn ids(&self, w: &Word) -> Result<Vec<usize>> {
        w.letters()
            .iter()
            .map(|a| self.letter_id(a).ok_or_else(|| Error::UnknownLetter(a.to_string())))
            .collect()
    }

    pub fn word(&self, ids: &[usize]) -> Word {
        Word(ids.iter().map(|&i| self.alphabet[i].clone()).collect())
    }

    pub fn run_from(&self, q: usize, ids: &[usize]) -> Option<usize> {
        ids.iter().try_fold(q, |q, &a| self.delta[q][a])
    }

    /// The state reached from the initial state, i.e. the state whose path
    /// set is `F_w`; `None` iff `w ∉ L_X`.
    pub fn state_after(&self, ids: &[usize]) -> Option<usize> {
        self.run_from(self.initial?, ids)
    }

    /// `L_n(X)` in lexicographic order of letter ids.
    pub fn words(&self, n: usize) -> Vec<Vec<usize>> {
        let Some(q0) = self.initial else { return Vec::new() };
        let mut out = Vec::new();
        let mut stack = vec![(q0, Vec::new())];
        while let Some((q, w)) = stack.pop() {
            if w.len() == n {
                out.push(w);
                continue;
            }
            for a in (0..self.alphabet.len()).rev() {
                if let Some(r) = self.delta[q][a] {
                    let mut v = w.clone();
                    v.push(a);
                    stack.push((r, v));
                }
            }
        }
        out
    }

    /// Whether the eventually periodic sequence `pre · per^∞` labels an
    /// infinite path from `q`.
    pub fn follows(&self, q: usize, pre: &[usize], per: &[usize]) -> bool {
        let Some(mut q) = self.run_from(q, pre) else { return false };
        let mut seen = vec![false; self.delta.len()];
        loop {
            if seen[q] {
                return true;
            }
            seen[q] = true;
            match self.run_from(q, per) {
                Some(r) => q = r,
                None => return false,
            }
        }
    }

    pub fn template_ids(&self, x: &PointTemplate) -> Option<(Vec<usize>, Vec<usize>)> {
        let pre = self.ids(x.pre()).ok()?;
        let per = self.ids(x.per()).ok()?;
        Some((pre, per))
    }

    pub fn member(&self, x: &PointTemplate) -> bool {
        match (self.initial, self.template_ids(x)) {
            (Some(q0), Some((pre, per))) => self.follows(q0, &pre, &per),
            _ => false,
        }
    }

    /// Tail pattern of an eventually periodic sequence, as a state mask.
    pub fn pattern(&self, pre: &[usize], per: &[usize]) -> u64 {
        (0..self.delta.len())
            .filter(|&q| self.follows(q, pre, per))
            .fold(0, |m, q| m | 1 << q)
    }

    pub fn atoms(&self) -> &[u64] {
        &self.atoms
    }

    pub fn atom_index(&self, mask: u64) -> Option<usize> {
        self.atoms.binary_search(&mask).ok()
    }

    /// Atoms (as a bitmask over atom indices) whose pattern contains `q`.
    pub fn atoms_containing(&self, q: usize) -> u128 {
        self.atoms_of_state[q]
    }

    /// Index of the pattern of `a·y` given the pattern index of `y`.
    pub fn pre_atom(&self, a: usize, atom: usize) -> usize {
        self.pre[a][atom] as usize
    }

    /// Common successor of every state in `mask` on letter `a`.
    pub fn subset_step(&self, mask: u64, a: usize) -> Option<u64> {
        let mut out = 0u64;
        for q in bits(mask) {
            out |= 1 << self.delta[q][a]?;
        }
        Some(out)
    }

    /// Whether `⋂_{q ∈ mask} PathSet(q)` is nonempty; the empty intersection
    /// is the full sequence space.
    pub fn live_subset(&self, mask: u64) -> bool {
        if mask == 0 {
            return !self.alphabet.is_empty();
        }
        let (_, succ) = self.subset_graph(mask);
        infinite_path_nodes(&succ)[0]
    }

    /// Reachable part of the subset automaton from `mask`; node 0 is `mask`.
    pub fn subset_graph(&self, mask: u64) -> (Vec<u64>, Vec<Vec<(usize, usize)>>) {
        let mut nodes = vec![mask];
        let mut index: HashMap<u64, usize> = HashMap::from([(mask, 0)]);
        let mut succ: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let m = nodes[i];
            let mut out = Vec::new();
            for a in 0..self.alphabet.len() {
                if let Some(t) = self.subset_step(m, a) {
                    let j = *index.entry(t).or_insert_with(|| {
                        nodes.push(t);
                        nodes.len() - 1
                    });
                    out.push((a, j));
                }
            }
            succ.push(out);
            i += 1;
        }
        (nodes, succ)
    }

    fn derive_atoms(&mut self) -> Result<()> {
        let n = self.delta.len();
        if n == 0 {
            return Ok(());
        }
        let mut found: BTreeSet<u64> = BTreeSet::new();
        let mut live_cache: HashMap<u64, bool> = HashMap::new();
        let start: Vec<u8> = (0..n as u8).collect();
        let mut seen: BTreeSet<Vec<u8>> = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(m) = queue.pop_front() {
            let (mut dom, mut img) = (0u64, 0u64);
            for (q, &t) in m.iter().enumerate() {
                if t != u8::MAX {
                    dom |= 1 << q;
                    img |= 1 << t;
                }
            }
            let live = *live_cache.entry(img).or_insert_with(|| self.live_subset(img));
            if live {
                found.insert(dom);
            }
            for a in 0..self.alphabet.len() {
                let next: Vec<u8> = m
                    .iter()
                    .map(|&t| {
                        if t == u8::MAX {
                            u8::MAX
                        } else {
                            self.delta[t as usize][a].map_or(u8::MAX, |r| r as u8)
                        }
                    })
                    .collect();
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        if found.len() > MAX_ATOMS {
            return Err(Error::Unsupported(format!(
                "{} tail patterns (limit {MAX_ATOMS})",
                found.len()
            )));
        }
        self.atoms = found.into_iter().collect();
        self.atoms_of_state = (0..n)
            .map(|q| {
                self.atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s >> q & 1 == 1)
                    .fold(0u128, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let mut pre = Vec::with_capacity(self.alphabet.len());
        for a in 0..self.alphabet.len() {
            let mut row = Vec::with_capacity(self.atoms.len());
            for &s in &self.atoms {
                let p = (0..n)
                    .filter(|&q| self.delta[q][a].is_some_and(|r| s >> r & 1 == 1))
                    .fold(0u64, |m, q| m | 1 << q);
                let idx = self
                    .atom_index(p)
                    .ok_or_else(|| Error::Invalid("tail patterns not closed under prefixing".into()))?;
                row.push(idx as u8);
            }
            pre.push(row);
        }
        self.pre = pre;
        Ok(())
    }
}

pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

pub fn bits128(mask: u128) -> impl Iterator<Item = usize> {
    (0..128).filter(move |i| mask >> i & 1 == 1)
}

/// Nodes of a finite graph from which an infinite path starts.
pub fn infinite_path_nodes(succ: &[Vec<(usize, usize)>]) -> Vec<bool> {
    let mut alive = vec![true; succ.len()];
    loop {
        let mut changed = false;
        for v in 0..succ.len() {
            if alive[v] && !succ[v].iter().any(|&(_, w)| alive[w]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

fn index_alphabet(alphabet: &[Letter]) -> Result<HashMap<Letter, usize>> {
    let mut lookup = HashMap::new();
    for (i, a) in alphabet.iter().enumerate() {
        if a.is_param() {
            return Err(Error::Symbolic);
        }
        if lookup.insert(a.clone(), i).is_some() {
            return Err(Error::Invalid(format!("letter `{a}` listed twice")));
        }
    }
    Ok(lookup)
}

fn trim_and_minimize(
    delta: &[Vec<Option<usize>>],
    q0: usize,
    k: usize,
) -> (Vec<Vec<Option<usize>>>, Option<usize>) {
    let succ: Vec<Vec<(usize, usize)>> = delta
        .iter()
        .map(|r| r.iter().enumerate().filter_map(|(a, t)| t.map(|t| (a, t))).collect())
        .collect();
    let live = infinite_path_nodes(&succ);
    if !live[q0] {
        return (Vec::new(), None);
    }
    let step = |q: usize, a: usize| delta[q][a].filter(|&t| live[t]);

    // Moore refinement over the live states; all states accept.
    let live_states: Vec<usize> = (0..delta.len()).filter(|&q| live[q]).collect();
    let mut class = vec![0usize; delta.len()];
    let mut count = 1;
    loop {
        let mut sig_id: HashMap<(usize, Vec<Option<usize>>), usize> = HashMap::new();
        let mut next = vec![0usize; delta.len()];
        for &q in &live_states {
            let sig = (class[q], (0..k).map(|a| step(q, a).map(|t| class[t])).collect());
            let n = sig_id.len();
            next[q] = *sig_id.entry(sig).or_insert(n);
        }
        let n = sig_id.len();
        class = next;
        if n == count {
            break;
        }
        count = n;
    }

    // Renumber classes breadth-first from the initial state.
    let mut order: HashMap<usize, usize> = HashMap::from([(class[q0], 0)]);
    let mut reps = vec![q0];
    let mut i = 0;
    while i < reps.len() {
        let q = reps[i];
        for a in 0..k {
            if let Some(t) = step(q, a) {
                if !order.contains_key(&class[t]) {
                    order.insert(class[t], reps.len());
                    reps.push(t);
                }
            }
        }
        i += 1;
    }
    let out = reps
        .iter()
        .map(|&q| (0..k).map(|a| step(q, a).map(|t| order[&class[t]])).collect())
        .collect();
    (out, Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(s: &str) -> Vec<Letter> {
        s.chars().map(|c| Letter::concrete(c.to_string())).collect()
    }

    fn word(s: &str) -> Word {
        Word(letters(s))
    }

    fn brute_count(forbidden: &[&str], n: usize) -> usize {
        (0..1usize << n)
            .filter(|m| {
                let s: String = (0..n).map(|i| if m >> i & 1 == 1 { '1' } else { '0' }).collect();
                !forbidden.iter().any(|f| s.contains(f))
            })
            .count()
    }

    #[test]
    fn golden_mean_has_two_states() {
        let p = SoficPresentation::from_forbidden(letters("01"), &[word("11")]).unwrap();
        assert_eq!(p.num_states(), 2);
        for n in 0..=10 {
            assert_eq!(p.words(n).len(), brute_count(&["11"], n), "n = {n}");
        }
        assert_eq!(p.words(5).len(), 13);
    }

    #[test]
    fn full_shift_has_one_state() {
        let p = SoficPresentation::from_forbidden(letters("01"), &[]).unwrap();
        assert_eq!(p.num_states(), 1);
        assert_eq!(p.words(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn everything_forbidden_is_empty() {
        let p = SoficPresentation::from_forbidden(letters("01"), &[word("0"), word("1")]).unwrap();
        assert!(p.is_empty());
        assert!(p.words(3).is_empty());
    }

    #[test]
    fn non_extendable_words_are_trimmed() {
        // 01, 11 and 10 forbidden: a 1 can never be followed.
        let p = SoficPresentation::from_forbidden(letters("01"), &[word("01"), word("11"), word("10")])
            .unwrap();
        assert_eq!(p.words(3).len(), 1);
        assert_eq!(p.num_states(), 1);
    }

    #[test]
    fn golden_mean_atoms() {
        let p = SoficPresentation::from_forbidden(letters("01"), &[word("11")]).unwrap();
        // Patterns: ∅ (starts with 11), {q0} (starts with 1 then 0), {q0,q1}.
        assert_eq!(p.atoms(), &[0b00, 0b01, 0b11]);
        assert!(p.live_subset(0b11));
    }
}
