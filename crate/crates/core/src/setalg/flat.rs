//! Sets of the cylinder algebra over a flat presentation: explicit points
//! plus, per family, a finite or cofinite set of indices.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::presentations::flat::{FlatPresentation, PointId};
use crate::symbolic::{Index, Letter, PointTemplate, Word};

/// `ex` if finite, `{j ≥ start} \ ex` if cofinite.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdxSet {
    pub cofinite: bool,
    pub ex: BTreeSet<u64>,
}

impl IdxSet {
    pub fn contains(&self, c: u64) -> bool {
        self.cofinite != self.ex.contains(&c)
    }

    pub fn contains_index(&self, i: Index) -> bool {
        match i {
            Index::Param => self.cofinite,
            Index::Nat(c) => self.contains(c),
        }
    }

    pub fn complement(&self) -> IdxSet {
        IdxSet { cofinite: !self.cofinite, ex: self.ex.clone() }
    }

    pub fn intersect(&self, o: &IdxSet) -> IdxSet {
        match (self.cofinite, o.cofinite) {
            (false, false) => IdxSet { cofinite: false, ex: &self.ex & &o.ex },
            (false, true) => IdxSet { cofinite: false, ex: &self.ex - &o.ex },
            (true, false) => IdxSet { cofinite: false, ex: &o.ex - &self.ex },
            (true, true) => IdxSet { cofinite: true, ex: &self.ex | &o.ex },
        }
    }

    pub fn union(&self, o: &IdxSet) -> IdxSet {
        self.complement().intersect(&o.complement()).complement()
    }

    pub fn is_empty(&self) -> bool {
        !self.cofinite && self.ex.is_empty()
    }

    pub fn max_mentioned(&self) -> Option<u64> {
        self.ex.iter().next_back().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatSet {
    pub explicit: BTreeSet<usize>,
    pub fams: Vec<IdxSet>,
}

impl FlatSet {
    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.fams.iter().all(IdxSet::is_empty)
    }

    pub fn is_finite(&self) -> bool {
        self.fams.iter().all(|f| !f.cofinite)
    }

    /// Families the set contains cofinitely.
    pub fn signature(&self) -> Vec<usize> {
        (0..self.fams.len()).filter(|&f| self.fams[f].cofinite).collect()
    }

    pub fn contains_id(&self, id: PointId) -> bool {
        match id {
            PointId::Explicit(i) => self.explicit.contains(&i),
            PointId::Member(f, i) => self.fams[f].contains_index(i),
        }
    }

    pub fn max_mentioned(&self) -> Option<u64> {
        self.fams.iter().filter_map(IdxSet::max_mentioned).max()
    }

    /// Listed points of a finite set, in id order.
    pub fn points(&self) -> Vec<PointId> {
        let mut out: Vec<PointId> = self.explicit.iter().map(|&i| PointId::Explicit(i)).collect();
        for (f, s) in self.fams.iter().enumerate() {
            if !s.cofinite {
                out.extend(s.ex.iter().map(|&c| PointId::Member(f, Index::Nat(c))));
            }
        }
        out
    }
}

/// `ℒ(Aℰ¹)`: finitely many listed letters plus, per letter family, a
/// cofinite tail given by its exceptions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LetterSet {
    pub finite: BTreeSet<Letter>,
    pub tails: BTreeMap<String, BTreeSet<u64>>,
}

impl LetterSet {
    pub fn is_finite(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn is_regular(&self) -> bool {
        self.is_finite() && !self.finite.is_empty()
    }
}

impl FlatPresentation {
    fn point_pred(&self, bound: u64, pred: impl Fn(&PointTemplate) -> bool) -> FlatSet {
        let k = self.bound().max(bound);
        let explicit = (0..self.explicit().len()).filter(|&i| pred(&self.explicit()[i])).collect();
        let fams = self
            .families()
            .iter()
            .map(|f| {
                let generic = pred(&f.template);
                let ex = (f.start..k).filter(|&c| pred(&f.template.instantiate(c)) != generic).collect();
                IdxSet { cofinite: generic, ex }
            })
            .collect();
        FlatSet { explicit, fams }
    }

    pub fn set_empty(&self) -> FlatSet {
        FlatSet {
            explicit: BTreeSet::new(),
            fams: vec![IdxSet::default(); self.families().len()],
        }
    }

    pub fn set_full(&self) -> FlatSet {
        FlatSet {
            explicit: (0..self.explicit().len()).collect(),
            fams: vec![IdxSet { cofinite: true, ex: BTreeSet::new() }; self.families().len()],
        }
    }

    pub fn set_singleton(&self, id: PointId) -> Result<FlatSet> {
        let mut s = self.set_empty();
        match id {
            PointId::Explicit(i) => {
                s.explicit.insert(i);
            }
            PointId::Member(f, Index::Nat(c)) => {
                s.fams[f].ex.insert(c);
            }
            PointId::Member(_, Index::Param) => return Err(Error::Symbolic),
        }
        Ok(s)
    }

    /// `C(α,β) = {βx ∈ X : αx ∈ X}`.
    pub fn set_c(&self, alpha: &Word, beta: &Word) -> Result<FlatSet> {
        self.check_word(alpha)?;
        self.check_word(beta)?;
        let k = alpha.max_index().max(beta.max_index()).map_or(0, |m| m + 1);
        Ok(self.point_pred(k, |x| match x.strip(beta) {
            Some(y) => self.member(&y.prepend(alpha)),
            None => false,
        }))
    }

    pub fn set_complement(&self, s: &FlatSet) -> FlatSet {
        FlatSet {
            explicit: (0..self.explicit().len()).filter(|i| !s.explicit.contains(i)).collect(),
            fams: s.fams.iter().map(IdxSet::complement).collect(),
        }
    }

    pub fn set_intersect(&self, a: &FlatSet, b: &FlatSet) -> FlatSet {
        FlatSet {
            explicit: &a.explicit & &b.explicit,
            fams: a.fams.iter().zip(&b.fams).map(|(x, y)| x.intersect(y)).collect(),
        }
    }

    pub fn set_union(&self, a: &FlatSet, b: &FlatSet) -> FlatSet {
        FlatSet {
            explicit: &a.explicit | &b.explicit,
            fams: a.fams.iter().zip(&b.fams).map(|(x, y)| x.union(y)).collect(),
        }
    }

    pub fn set_contains(&self, s: &FlatSet, x: &PointTemplate) -> bool {
        if x.has_param() {
            return false;
        }
        self.locate(x).is_some_and(|id| s.contains_id(id))
    }

    /// `r(A, α) = {x ∈ X : αx ∈ A}`.
    pub fn set_relative_range(&self, s: &FlatSet, alpha: &Word) -> Result<FlatSet> {
        self.check_word(alpha)?;
        let k = alpha.max_index().max(s.max_mentioned()).map_or(0, |m| m + 1);
        Ok(self.point_pred(k, |x| {
            self.locate(&x.prepend(alpha)).is_some_and(|id| s.contains_id(id))
        }))
    }

    pub fn set_letters(&self, s: &FlatSet) -> LetterSet {
        let mut out = LetterSet::default();
        for &i in &s.explicit {
            out.finite.insert(self.explicit()[i].first().clone());
        }
        let mut tails: BTreeMap<String, IdxSet> = BTreeMap::new();
        for (f, idx) in s.fams.iter().enumerate() {
            if idx.is_empty() {
                continue;
            }
            let t = &self.families()[f].template;
            match t.first() {
                Letter::Member { family, index: Index::Param } => {
                    let e = tails.entry(family.clone()).or_default();
                    *e = e.union(idx);
                }
                _ => {
                    if idx.cofinite {
                        out.finite.insert(t.first().clone());
                    } else {
                        for &c in &idx.ex {
                            out.finite.insert(t.instantiate(c).first().clone());
                        }
                    }
                }
            }
        }
        for (family, idx) in tails {
            if idx.cofinite {
                let mut ex = idx.ex;
                out.finite.retain(|a| {
                    if a.family() != Some(family.as_str()) {
                        return true;
                    }
                    if let Some(c) = a.concrete_index() {
                        ex.remove(&c);
                    }
                    false
                });
                out.tails.insert(family, ex);
            } else {
                for c in idx.ex {
                    out.finite.insert(Letter::member(family.clone(), c));
                }
            }
        }
        out
    }

    pub fn set_describe(&self, s: &FlatSet) -> String {
        let mut items: Vec<String> = s.explicit.iter().map(|&i| self.explicit()[i].to_string()).collect();
        for (f, idx) in s.fams.iter().enumerate() {
            let fam = &self.families()[f];
            if idx.cofinite {
                let ex: Vec<String> = idx.ex.iter().map(u64::to_string).collect();
                if ex.is_empty() {
                    items.push(format!("{} for all j≥{}", fam.template, fam.start));
                } else {
                    items.push(format!("{} for j≥{} except j∈{{{}}}", fam.template, fam.start, ex.join(",")));
                }
            } else {
                items.extend(idx.ex.iter().map(|&c| fam.template.instantiate(c).to_string()));
            }
        }
        if items.is_empty() {
            "∅".into()
        } else {
            format!("{{{}}}", items.join(", "))
        }
    }
}
