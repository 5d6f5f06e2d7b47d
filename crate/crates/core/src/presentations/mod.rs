//! Subshift presentations: automaton-backed over finite alphabets, and flat
//! parametric for the countable examples over indexed alphabets.

pub mod flat;
pub mod graphs;
pub mod sofic;

use std::collections::BTreeSet;

use crate::symbolic::{GroupElementWord, Letter, PointTemplate, Word};

pub use flat::{FlatPresentation, LetterFamily, PointFamily, PointId, SchemaLetter};
pub use graphs::{Edge, EdgeFamily, ExelLacaMatrix, GraphHypotheses, ParametricGraph, UltraEdge, Ultragraph};
pub use sofic::{SoficData, SoficPresentation};

#[derive(Clone, Debug)]
pub enum Presentation {
    Sofic(SoficPresentation),
    Flat(FlatPresentation),
}

impl Presentation {
    pub fn backend(&self) -> &'static str {
        match self {
            Presentation::Sofic(_) => "sofic",
            Presentation::Flat(_) => "flat",
        }
    }

    pub fn member(&self, x: &PointTemplate) -> bool {
        if x.has_param() {
            return false;
        }
        match self {
            Presentation::Sofic(p) => p.member(x),
            Presentation::Flat(p) => p.member(x),
        }
    }

    pub fn finite_alphabet(&self) -> bool {
        match self {
            Presentation::Sofic(_) => true,
            Presentation::Flat(p) => p.letter_families().is_empty(),
        }
    }

    /// `L_n(X)`; for the flat backend, restricted to representative indices.
    pub fn language(&self, n: usize) -> Vec<Word> {
        match self {
            Presentation::Sofic(p) => p.words(n).iter().map(|w| p.word(w)).collect(),
            Presentation::Flat(p) => p.language_words(n),
        }
    }

    pub fn in_language(&self, w: &Word) -> bool {
        match self {
            Presentation::Sofic(p) => p.ids(w).ok().and_then(|ids| p.state_after(&ids)).is_some(),
            Presentation::Flat(p) => p.check_word(w).is_ok() && flat_in_language(p, w),
        }
    }

    /// Letters occurring in representative words.
    pub fn letters(&self) -> Vec<Letter> {
        match self {
            Presentation::Sofic(p) => p.alphabet().to_vec(),
            Presentation::Flat(p) => {
                let set: BTreeSet<Letter> = p.language_words(1).into_iter().flat_map(|w| w.0).collect();
                set.into_iter().collect()
            }
        }
    }

    /// Eventually periodic points of `X`: for the sofic backend all with
    /// `|pre| + |per| ≤ depth`, for the flat backend all representative
    /// points.
    pub fn sample_points(&self, depth: usize) -> Vec<PointTemplate> {
        match self {
            Presentation::Sofic(p) => {
                let mut set = BTreeSet::new();
                let k = p.alphabet().len();
                for total in 1..=depth {
                    for plen in 0..total {
                        let qlen = total - plen;
                        for code in 0..k.pow(total as u32) {
                            let mut c = code;
                            let mut ids = Vec::with_capacity(total);
                            for _ in 0..total {
                                ids.push(c % k);
                                c /= k;
                            }
                            let pre = p.word(&ids[..plen]);
                            let per = p.word(&ids[plen..plen + qlen]);
                            let x = PointTemplate::new(pre, per).expect("nonempty period");
                            if p.member(&x) {
                                set.insert(x);
                            }
                        }
                    }
                }
                set.into_iter().collect()
            }
            Presentation::Flat(p) => {
                let set: BTreeSet<PointTemplate> = p.rep_points().into_iter().collect();
                set.into_iter().collect()
            }
        }
    }

    /// The point-level partial action of `t = num · den⁻¹`; `None` means
    /// undefined at `x`.
    pub fn partial_action(&self, t: &GroupElementWord, x: &PointTemplate) -> Option<PointTemplate> {
        if !self.member(x) {
            return None;
        }
        t.apply(x, |z| self.member(z))
    }
}

fn flat_in_language(p: &FlatPresentation, w: &Word) -> bool {
    // A concrete word lies in L_X iff it is a prefix of some point; points
    // are explicit or family members, and a member prefix fixes its index
    // unless the parameter lies beyond the word.
    p.explicit().iter().any(|x| x.starts_with(w))
        || p.families().iter().any(|f| {
            let mut idx: Option<u64> = None;
            for (i, a) in w.letters().iter().enumerate() {
                let t = f.template.letter_at(i);
                if t.is_param() {
                    match (a, t) {
                        (
                            Letter::Member { family, index: crate::symbolic::Index::Nat(c) },
                            Letter::Member { family: tf, .. },
                        ) if family == tf => {
                            if *idx.get_or_insert(*c) != *c {
                                return false;
                            }
                        }
                        _ => return false,
                    }
                }
            }
            match idx {
                Some(c) => c >= f.start && f.template.instantiate(c).starts_with(w),
                None => f.template.instantiate(f.start).starts_with(w),
            }
        })
}
