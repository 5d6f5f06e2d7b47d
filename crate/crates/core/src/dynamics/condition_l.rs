//! Condition (L) and eventually periodic singletons of the set algebra.
//!
//! The two deciders take different routes on purpose. Condition (L) looks for
//! a finite intersection of follower sets equal to a single periodic point.
//! The detector looks for singletons `{x}` among the sets of the algebra: for
//! automaton presentations through exact tail patterns, for flat ones
//! through cylinders. Every witness is re-checked with the set algebra.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentations::sofic::{bits, infinite_path_nodes, SoficPresentation};
use crate::presentations::Presentation;
use crate::setalg::{Term, USet};
use crate::symbolic::{PointTemplate, Word};

/// Subset enumeration for automaton presentations is capped at this many states.
pub const MAX_SUBSET_STATES: usize = 16;

/// `F_P = {γ^∞}` with `P` a finite set of words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionLWitness {
    pub words: Vec<Word>,
    pub gamma: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LVerdict {
    Holds,
    Fails(ConditionLWitness),
    Undecided(String),
}

impl LVerdict {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            LVerdict::Holds => Some(true),
            LVerdict::Fails(_) => Some(false),
            LVerdict::Undecided(_) => None,
        }
    }
}

/// Whether `a = {x}`, decided inside the algebra: with `x = pre · per^∞`,
/// `a ⊆ Z_pre`, `b = r(a, pre) ⊆ Z_per` and `r(b, per) = b` force
/// `b ⊆ {per^∞}`.
pub fn is_singleton_at(p: &Presentation, a: &USet, x: &PointTemplate) -> Result<bool> {
    if !p.contains_point(a, x)? {
        return Ok(false);
    }
    if !p.is_empty(&p.difference(a, &p.cylinder(x.pre())?)?) {
        return Ok(false);
    }
    let b = p.relative_range(a, x.pre())?;
    if !p.is_empty(&p.difference(&b, &p.cylinder(x.per())?)?) {
        return Ok(false);
    }
    p.equals(&p.relative_range(&b, x.per())?, &b)
}

/// `F_P` as a set; the empty intersection is `X`.
pub fn follower_intersection(p: &Presentation, words: &[Word]) -> Result<USet> {
    let mut acc = p.full();
    for w in words {
        acc = p.intersect(&acc, &p.follower(w)?)?;
    }
    Ok(acc)
}

pub fn verify_l_witness(p: &Presentation, w: &ConditionLWitness) -> Result<bool> {
    let Some(x) = PointTemplate::periodic(w.gamma.clone()) else { return Ok(false) };
    if !w.words.iter().all(|a| p.in_language(a)) {
        return Ok(false);
    }
    is_singleton_at(p, &follower_intersection(p, &w.words)?, &x)
}

pub fn satisfies_condition_l(p: &Presentation, max_sets: usize) -> Result<LVerdict> {
    let verdict = match p {
        Presentation::Sofic(s) => sofic_condition_l(s),
        Presentation::Flat(_) => flat_condition_l(p, max_sets)?,
    };
    if let LVerdict::Fails(w) = &verdict {
        if !verify_l_witness(p, w)? {
            return Err(Error::Invalid(format!("condition (L) witness for γ = {} failed re-check", w.gamma)));
        }
    }
    Ok(verdict)
}

/// Shortest nonempty word reaching each state, falling back to `ω` for a
/// state reached only by the empty word.
fn nonempty_access_words(p: &SoficPresentation) -> Vec<Option<Vec<usize>>> {
    let mut out: Vec<Option<Vec<usize>>> = vec![None; p.num_states()];
    let Some(q0) = p.initial() else { return out };
    let mut queue = VecDeque::new();
    for a in 0..p.alphabet().len() {
        if let Some(r) = p.step(q0, a) {
            if out[r].is_none() {
                out[r] = Some(vec![a]);
                queue.push_back(r);
            }
        }
    }
    while let Some(q) = queue.pop_front() {
        for a in 0..p.alphabet().len() {
            if let Some(r) = p.step(q, a) {
                if out[r].is_none() {
                    let mut w = out[q].clone().expect("visited");
                    w.push(a);
                    out[r] = Some(w);
                    queue.push_back(r);
                }
            }
        }
    }
    if out[q0].is_none() {
        out[q0] = Some(Vec::new());
    }
    out
}

/// The label of a cycle through `mask` when the live part of the subset
/// automaton from `mask` is exactly that cycle.
fn pure_cycle(p: &SoficPresentation, mask: u64) -> Option<Vec<usize>> {
    let (_, succ) = p.subset_graph(mask);
    let alive = infinite_path_nodes(&succ);
    if !alive[0] {
        return None;
    }
    let mut seen = vec![false; succ.len()];
    let mut cur = 0;
    let mut labels = Vec::new();
    loop {
        seen[cur] = true;
        let mut live = succ[cur].iter().filter(|&&(_, w)| alive[w]);
        let (a, next) = *live.next()?;
        if live.next().is_some() {
            return None;
        }
        labels.push(a);
        if next == 0 {
            return Some(labels);
        }
        if seen[next] {
            return None;
        }
        cur = next;
    }
}

fn sofic_condition_l(p: &SoficPresentation) -> LVerdict {
    let n = p.num_states();
    if n == 0 {
        return LVerdict::Holds;
    }
    if n > MAX_SUBSET_STATES {
        return LVerdict::Undecided(format!("{n} states exceed the subset limit {MAX_SUBSET_STATES}"));
    }
    let access = nonempty_access_words(p);
    let mut masks: Vec<u64> = (1..1u64 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        if let Some(cycle) = pure_cycle(p, mask) {
            let mut words: Vec<Word> = bits(mask)
                .map(|q| p.word(access[q].as_deref().expect("trimmed automaton")))
                .collect();
            words.sort_by_key(|w| (w.len(), w.to_string()));
            words.dedup();
            return LVerdict::Fails(ConditionLWitness { words, gamma: p.word(&cycle) });
        }
    }
    LVerdict::Holds
}

/// The single point of a finite flat set.
fn sole_point(p: &Presentation, s: &USet) -> Option<PointTemplate> {
    let (Presentation::Flat(f), USet::Flat(s)) = (p, s) else { return None };
    if !s.is_finite() {
        return None;
    }
    match s.points().as_slice() {
        [id] => Some(f.point(*id)),
        _ => None,
    }
}

/// Follower sets satisfy `F_{wa} = r(F_w, a)`, so the orbit of `X` under
/// the maps `r(·, a)` over representative letters lists every `F_w`. The
/// orbit and then its intersection closure are computed to a fixpoint.
fn flat_condition_l(p: &Presentation, max_sets: usize) -> Result<LVerdict> {
    let mut letters: Vec<Word> = p.language(1);
    letters.sort_by_key(|w| w.to_string());
    let full = p.full();
    let mut sets: Vec<(USet, Vec<Word>)> = Vec::new();
    let mut index: HashMap<USet, usize> = HashMap::new();
    let mut queue: VecDeque<(USet, Word)> = VecDeque::new();
    for a in &letters {
        queue.push_back((p.relative_range(&full, a)?, a.clone()));
    }
    while let Some((s, w)) = queue.pop_front() {
        if p.is_empty(&s) || index.contains_key(&s) {
            continue;
        }
        if sets.len() >= max_sets {
            return Ok(LVerdict::Undecided(format!("more than {max_sets} follower sets")));
        }
        index.insert(s.clone(), sets.len());
        sets.push((s.clone(), vec![w.clone()]));
        for a in &letters {
            queue.push_back((p.relative_range(&s, a)?, w.concat(a)));
        }
    }
    let mut i = 0;
    while i < sets.len() {
        for j in 0..i {
            let s = p.intersect(&sets[i].0, &sets[j].0)?;
            if p.is_empty(&s) || index.contains_key(&s) {
                continue;
            }
            if sets.len() >= max_sets {
                return Ok(LVerdict::Undecided(format!("more than {max_sets} follower intersections")));
            }
            let words: BTreeSet<Word> = sets[i].1.iter().chain(&sets[j].1).cloned().collect();
            index.insert(s.clone(), sets.len());
            sets.push((s, words.into_iter().collect()));
        }
        i += 1;
    }
    for (s, words) in &sets {
        if let Some(x) = sole_point(p, s) {
            if x.is_periodic() {
                return Ok(LVerdict::Fails(ConditionLWitness { words: words.clone(), gamma: x.per().clone() }));
            }
        }
    }
    Ok(LVerdict::Holds)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Singleton {
    pub point: PointTemplate,
    /// A term of the algebra whose value is `{point}`.
    #[serde(serialize_with = "display")]
    pub term: Term,
}

fn display<S: serde::Serializer>(t: &Term, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectorReport {
    pub singletons: Vec<Singleton>,
    /// Whether emptiness of the list is decided: always for automaton
    /// presentations, and for flat ones when every point was classified.
    pub decided: bool,
}

/// Eventually periodic singletons of the algebra; `max_len` bounds the
/// listed prefixes (automaton) or the searched cylinder lengths (flat).
pub fn singleton_detector(p: &Presentation, max_len: usize) -> Result<DetectorReport> {
    let report = match p {
        Presentation::Sofic(s) => sofic_detector(s, max_len)?,
        Presentation::Flat(_) => flat_detector(p, max_len)?,
    };
    for s in &report.singletons {
        if !is_singleton_at(p, &p.eval(&s.term)?, &s.point)? {
            return Err(Error::Invalid(format!("singleton witness for {} failed re-check", s.point)));
        }
    }
    Ok(report)
}

fn flat_detector(p: &Presentation, max_len: usize) -> Result<DetectorReport> {
    let mut singletons = Vec::new();
    let mut unresolved = 0;
    for x in p.sample_points(0) {
        let mut found = false;
        for n in 1..=max_len {
            let beta = x.prefix(n);
            if is_singleton_at(p, &p.cylinder(&beta)?, &x)? {
                singletons.push(Singleton { point: x.clone(), term: Term::cylinder(beta) });
                found = true;
                break;
            }
        }
        if !found {
            unresolved += 1;
        }
    }
    let decided = !singletons.is_empty() || unresolved == 0;
    Ok(DetectorReport { singletons, decided })
}

/// Number (capped at 2) of infinite paths from `mask` in the subset automaton.
fn intersection_size(p: &SoficPresentation, mask: u64) -> u8 {
    let (_, succ) = p.subset_graph(mask);
    let alive = infinite_path_nodes(&succ);
    if !alive[0] {
        return 0;
    }
    let mut stack = vec![0];
    let mut seen = vec![false; succ.len()];
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let live: Vec<usize> = succ[v].iter().filter(|&&(_, w)| alive[w]).map(|&(_, w)| w).collect();
        if live.len() > 1 {
            return 2;
        }
        stack.extend(live);
    }
    1
}

/// Sequences with tail pattern exactly `S`: runs that stay alive from every
/// state of `S` and eventually die from every state outside `S`. Nodes are
/// pairs `(T, U)` of the two subset runs; once `U` is empty the remaining
/// choices are the paths of `⋂_{q ∈ T} PathSet(q)`.
struct ExactPattern<'a> {
    p: &'a SoficPresentation,
    nodes: Vec<(u64, u64)>,
    succ: Vec<Vec<(usize, usize)>>,
    count: Vec<u8>,
}

impl<'a> ExactPattern<'a> {
    fn new(p: &'a SoficPresentation, s: u64) -> ExactPattern<'a> {
        let all = (1u64 << p.num_states()) - 1;
        let start = (s, all & !s);
        let mut nodes = vec![start];
        let mut index = HashMap::from([(start, 0usize)]);
        let mut succ = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let (t, u) = nodes[i];
            let mut out = Vec::new();
            if u != 0 {
                for a in 0..p.alphabet().len() {
                    let Some(t2) = p.subset_step(t, a) else { continue };
                    let u2 = bits(u).filter_map(|q| p.step(q, a)).fold(0u64, |m, r| m | 1 << r);
                    let j = *index.entry((t2, u2)).or_insert_with(|| {
                        nodes.push((t2, u2));
                        nodes.len() - 1
                    });
                    out.push((a, j));
                }
            }
            succ.push(out);
            i += 1;
        }
        let mut count: Vec<u8> = nodes
            .iter()
            .map(|&(t, u)| if u == 0 { intersection_size(p, t) } else { 0 })
            .collect();
        // Least fixpoint of the capped path count.
        loop {
            let mut changed = false;
            for v in 0..nodes.len() {
                if nodes[v].1 == 0 {
                    continue;
                }
                let c = succ[v].iter().map(|&(_, w)| count[w] as u32).sum::<u32>().min(2) as u8;
                if c != count[v] {
                    count[v] = c;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        ExactPattern { p, nodes, succ, count }
    }

    /// The unique sequence when there is exactly one.
    fn sole_sequence(&self) -> Option<PointTemplate> {
        if self.count[0] != 1 {
            return None;
        }
        let mut labels = Vec::new();
        let mut v = 0;
        while self.nodes[v].1 != 0 {
            let &(a, w) = self.succ[v].iter().find(|&&(_, w)| self.count[w] == 1)?;
            labels.push(a);
            v = w;
        }
        let (sub, succ) = self.p.subset_graph(self.nodes[v].0);
        let alive = infinite_path_nodes(&succ);
        let mut pos: HashMap<u64, usize> = HashMap::new();
        let mut cur = 0;
        loop {
            if let Some(&start) = pos.get(&sub[cur]) {
                let pre = self.p.word(&labels[..start]);
                let per = self.p.word(&labels[start..]);
                return PointTemplate::new(pre, per);
            }
            pos.insert(sub[cur], labels.len());
            let &(a, w) = succ[cur].iter().find(|&&(_, w)| alive[w])?;
            labels.push(a);
            cur = w;
        }
    }
}

fn sofic_detector(p: &SoficPresentation, max_len: usize) -> Result<DetectorReport> {
    let n = p.num_states();
    if n > 63 {
        return Err(Error::Unsupported("pattern products need at most 63 states".into()));
    }
    let shortest = shortest_access(p);
    let mut found: BTreeMap<PointTemplate, Term> = BTreeMap::new();
    for &s in p.atoms() {
        if s == 0 {
            continue;
        }
        let Some(y) = ExactPattern::new(p, s).sole_sequence() else { continue };
        for len in 0..=max_len {
            for w in p.words(len) {
                let q = p.state_after(&w).expect("language word");
                if s >> q & 1 == 0 {
                    continue;
                }
                let w = p.word(&w);
                let x = y.prepend(&w);
                if found.contains_key(&x) {
                    continue;
                }
                let term = pattern_term(&w, s, n, &shortest);
                found.insert(x, term);
            }
        }
    }
    let singletons = found.into_iter().map(|(point, term)| Singleton { point, term }).collect();
    Ok(DetectorReport { singletons, decided: true })
}

/// Shortest words (possibly `ω`) reaching each state.
fn shortest_access(p: &SoficPresentation) -> Vec<Word> {
    let mut out: Vec<Option<Vec<usize>>> = vec![None; p.num_states()];
    let Some(q0) = p.initial() else { return Vec::new() };
    out[q0] = Some(Vec::new());
    let mut queue = VecDeque::from([q0]);
    while let Some(q) = queue.pop_front() {
        for a in 0..p.alphabet().len() {
            if let Some(r) = p.step(q, a) {
                if out[r].is_none() {
                    let mut w = out[q].clone().expect("visited");
                    w.push(a);
                    out[r] = Some(w);
                    queue.push_back(r);
                }
            }
        }
    }
    out.into_iter().map(|w| p.word(&w.unwrap_or_default())).collect()
}

/// `Z_w ∩ ⋂_{q ∈ S} C(α_q, w) ∩ ⋂_{q ∉ S} ¬C(α_q, w)` with `α_q` reaching `q`;
/// its value is `w · {y : pattern(y) = S}`.
fn pattern_term(w: &Word, s: u64, n: usize, access: &[Word]) -> Term {
    let mut t = Term::cylinder(w.clone());
    for q in 0..n {
        let c = Term::c(access[q].clone(), w.clone());
        t = Term::and(t, if s >> q & 1 == 1 { c } else { Term::not(c) });
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn words(p: &Presentation, ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|w| crate::syntax::parse_word(p, w).unwrap()).collect()
    }

    #[test]
    fn fixed_point_fails_with_zero() {
        let p = corpus::fixed_point();
        let LVerdict::Fails(w) = satisfies_condition_l(&p, 100).unwrap() else { panic!() };
        assert_eq!(w.words, words(&p, &["0"]));
        assert_eq!(w.gamma, words(&p, &["0"])[0]);
        let d = singleton_detector(&p, 2).unwrap();
        assert_eq!(d.singletons.len(), 1);
        assert_eq!(d.singletons[0].point, corpus::point(&p, "(0)"));
    }

    #[test]
    fn full_shift_holds() {
        let p = corpus::full_shift(2);
        assert_eq!(satisfies_condition_l(&p, 100).unwrap(), LVerdict::Holds);
        let d = singleton_detector(&p, 3).unwrap();
        assert!(d.singletons.is_empty() && d.decided);
    }

    #[test]
    fn golden_mean_holds() {
        let p = corpus::golden_mean();
        assert_eq!(satisfies_condition_l(&p, 100).unwrap(), LVerdict::Holds);
        assert!(singleton_detector(&p, 3).unwrap().singletons.is_empty());
    }

    #[test]
    fn even_shift_isolates_the_ones() {
        // An odd and an even run of 1s after a 0 leave only 1^∞.
        let p = corpus::even_shift();
        let LVerdict::Fails(w) = satisfies_condition_l(&p, 100).unwrap() else { panic!() };
        assert_eq!(w.words, words(&p, &["0", "01"]));
        assert_eq!(w.gamma.to_string(), "1");
        let d = singleton_detector(&p, 2).unwrap();
        assert!(d.singletons.iter().any(|s| s.point.to_string() == "(1)"));
    }

    #[test]
    fn chuva_fails_with_a0() {
        let p = corpus::chuva();
        let LVerdict::Fails(w) = satisfies_condition_l(&p, 100).unwrap() else { panic!() };
        assert_eq!(w.words, words(&p, &["a_0"]));
        assert_eq!(w.gamma.to_string(), "c");
        let d = singleton_detector(&p, 6).unwrap();
        let pts: Vec<String> = d.singletons.iter().map(|s| s.point.to_string()).collect();
        for x in ["(c)", "a_0 (c)", "a_1 (c)", "b_0 (c)", "b_1 (c)"] {
            assert!(pts.contains(&x.to_string()), "{x} missing from {pts:?}");
        }
        assert!(d.decided);
    }

    #[test]
    fn tripla_fails() {
        let p = corpus::tripla();
        let LVerdict::Fails(w) = satisfies_condition_l(&p, 200).unwrap() else { panic!() };
        assert!(verify_l_witness(&p, &w).unwrap());
        assert!(!singleton_detector(&p, 6).unwrap().singletons.is_empty());
    }

    #[test]
    fn singleton_test_rejects_larger_sets() {
        let p = corpus::golden_mean();
        let z = p.cylinder(&words(&p, &["0"])[0]).unwrap();
        assert!(!is_singleton_at(&p, &z, &corpus::point(&p, "(0)")).unwrap());
        let q = corpus::fixed_point();
        assert!(is_singleton_at(&q, &q.full(), &corpus::point(&q, "(0)")).unwrap());
    }

    #[test]
    fn lasso_point_is_singleton_but_not_periodic_witness() {
        // X = {0^∞, 1 0^∞}: F_1 = {0^∞}, and {1 0^∞} = Z_1.
        let p = Presentation::Sofic(
            SoficPresentation::from_automaton(
                vec![crate::symbolic::Letter::concrete("0"), crate::symbolic::Letter::concrete("1")],
                vec![vec![Some(1), Some(1)], vec![Some(1), None]],
                Some(0),
            )
            .unwrap(),
        );
        let LVerdict::Fails(w) = satisfies_condition_l(&p, 10).unwrap() else { panic!() };
        assert_eq!(w.gamma.to_string(), "0");
        let d = singleton_detector(&p, 2).unwrap();
        let pts: Vec<String> = d.singletons.iter().map(|s| s.point.to_string()).collect();
        assert_eq!(pts, vec!["(0)", "1 (0)"]);
    }
}
