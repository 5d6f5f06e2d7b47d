//! Explicitly countable subshifts over indexed letter families.
//!
//! `X` is a finite list of explicit points together with finitely many point
//! families `f(j)`, each an eventually periodic template in one symbolic
//! index `j` ranging over `j ≥ start`. Templates are validated against the
//! allowed block schemas, for pairwise distinctness and for shift closure.
//!
//! Every index at or above `bound` behaves generically: no concrete index
//! `≥ bound` is mentioned anywhere in the presentation, so any predicate built
//! from the presentation's data is constant on `j ≥ bound` and is evaluated
//! once with the symbolic parameter.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::symbolic::{Index, Letter, PointTemplate, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterFamily {
    pub name: String,
    pub start: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemaLetter {
    Concrete(String),
    /// Family member at the schema's shared index variable.
    Var(String),
    Fixed(String, u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFamily {
    pub name: String,
    pub template: PointTemplate,
    pub start: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointId {
    Explicit(usize),
    Member(usize, Index),
}

#[derive(Clone, Debug)]
pub struct FlatPresentation {
    concrete: Vec<String>,
    letter_families: Vec<LetterFamily>,
    schemas: Vec<Vec<SchemaLetter>>,
    explicit: Vec<PointTemplate>,
    families: Vec<PointFamily>,
    param_pos: Vec<(usize, String)>,
    bound: u64,
}

impl FlatPresentation {
    pub fn new(
        concrete: Vec<String>,
        letter_families: Vec<LetterFamily>,
        schemas: Vec<Vec<SchemaLetter>>,
        explicit: Vec<PointTemplate>,
        families: Vec<PointFamily>,
    ) -> Result<Self> {
        let mut bound = 0u64;
        let mut note = |i: Option<u64>| {
            if let Some(i) = i {
                bound = bound.max(i + 1);
            }
        };
        for e in &explicit {
            note(e.max_index());
        }
        for f in &families {
            note(f.template.max_index());
        }
        for s in &schemas {
            for l in s {
                if let SchemaLetter::Fixed(_, i) = l {
                    note(Some(*i));
                }
            }
        }
        let mut param_pos = Vec::new();
        for f in &families {
            let t = &f.template;
            let n = t.pre().len() + t.per().len();
            let p = (0..n)
                .find(|&i| t.letter_at(i).is_param())
                .ok_or_else(|| Error::Invalid(format!("family `{}` has no parameter", f.name)))?;
            param_pos.push((p, t.letter_at(p).family().unwrap_or_default().to_string()));
        }
        let p = FlatPresentation {
            concrete,
            letter_families,
            schemas,
            explicit,
            families,
            param_pos,
            bound,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn explicit(&self) -> &[PointTemplate] {
        &self.explicit
    }

    pub fn families(&self) -> &[PointFamily] {
        &self.families
    }

    pub fn concrete_letters(&self) -> &[String] {
        &self.concrete
    }

    pub fn letter_families(&self) -> &[LetterFamily] {
        &self.letter_families
    }

    pub fn schemas(&self) -> &[Vec<SchemaLetter>] {
        &self.schemas
    }

    /// Upper end (exclusive) of the representative index range.
    pub fn rep_limit(&self) -> u64 {
        let starts = self
            .families
            .iter()
            .map(|f| f.start)
            .chain(self.letter_families.iter().map(|l| l.start))
            .max()
            .unwrap_or(0);
        self.bound.max(starts) + 2
    }

    pub fn rep_indices(&self, f: usize) -> Vec<u64> {
        (self.families[f].start..self.rep_limit()).collect()
    }

    pub fn point(&self, id: PointId) -> PointTemplate {
        match id {
            PointId::Explicit(i) => self.explicit[i].clone(),
            PointId::Member(f, Index::Param) => self.families[f].template.clone(),
            PointId::Member(f, Index::Nat(c)) => self.families[f].template.instantiate(c),
        }
    }

    /// Explicit points and family members at representative indices.
    pub fn rep_points(&self) -> Vec<PointTemplate> {
        let mut out = self.explicit.clone();
        for f in 0..self.families.len() {
            for c in self.rep_indices(f) {
                out.push(self.families[f].template.instantiate(c));
            }
        }
        out
    }

    pub fn letter_known(&self, a: &Letter) -> bool {
        match a {
            Letter::Concrete(n) => self.concrete.contains(n),
            Letter::Member { family, index } => self.letter_families.iter().any(|lf| {
                &lf.name == family
                    && match index {
                        Index::Nat(c) => *c >= lf.start,
                        Index::Param => true,
                    }
            }),
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        for a in w.letters() {
            if a.is_param() {
                return Err(Error::Symbolic);
            }
            if !self.letter_known(a) {
                return Err(Error::UnknownLetter(a.to_string()));
            }
        }
        Ok(())
    }

    /// Identifies which point of `X` the template denotes, if any. A
    /// template containing the parameter can only match a family at the
    /// parameter itself.
    pub fn locate(&self, t: &PointTemplate) -> Option<PointId> {
        if !t.has_param() {
            if let Some(i) = self.explicit.iter().position(|e| e == t) {
                return Some(PointId::Explicit(i));
            }
        }
        for (fi, f) in self.families.iter().enumerate() {
            let (pos, lf) = &self.param_pos[fi];
            let Letter::Member { family, index } = t.letter_at(*pos) else { continue };
            if family != lf {
                continue;
            }
            match index {
                Index::Param if f.template == *t => return Some(PointId::Member(fi, Index::Param)),
                Index::Nat(c) if *c >= f.start && f.template.instantiate(*c) == *t => {
                    return Some(PointId::Member(fi, Index::Nat(*c)))
                }
                _ => {}
            }
        }
        None
    }

    pub fn member(&self, x: &PointTemplate) -> bool {
        self.locate(x).is_some()
    }

    fn validate(&self) -> Result<()> {
        for e in &self.explicit {
            if e.has_param() {
                return Err(Error::Invalid(format!("explicit point {e} contains the parameter")));
            }
        }
        for f in &self.families {
            for lf in &self.letter_families {
                let uses = f.template.pre().letters().iter().chain(f.template.per().letters()).any(
                    |a| a.is_param() && a.family() == Some(lf.name.as_str()),
                );
                if uses && f.start < lf.start {
                    return Err(Error::Invalid(format!(
                        "family `{}` starts below the domain of letter family `{}`",
                        f.name, lf.name
                    )));
                }
            }
        }
        let all: Vec<&PointTemplate> =
            self.explicit.iter().chain(self.families.iter().map(|f| &f.template)).collect();
        for t in &all {
            for a in t.pre().letters().iter().chain(t.per().letters()) {
                if !self.letter_known(a) {
                    return Err(Error::UnknownLetter(a.to_string()));
                }
            }
        }
        for (i, e) in self.explicit.iter().enumerate() {
            if self.locate(e) != Some(PointId::Explicit(i)) {
                return Err(Error::Invalid(format!("point {e} is declared twice")));
            }
        }
        for (fi, f) in self.families.iter().enumerate() {
            if self.locate(&f.template) != Some(PointId::Member(fi, Index::Param)) {
                return Err(Error::Invalid(format!("family `{}` overlaps another family", f.name)));
            }
            for c in f.start..self.rep_limit() {
                let x = f.template.instantiate(c);
                if self.locate(&x) != Some(PointId::Member(fi, Index::Nat(c))) {
                    return Err(Error::Invalid(format!("point {x} is declared twice")));
                }
            }
        }
        let mut probes: Vec<PointTemplate> = self.rep_points();
        probes.extend(self.families.iter().map(|f| f.template.clone()));
        for x in &probes {
            let y = x.shift();
            if !self.member(&y) {
                return Err(Error::Invalid(format!(
                    "declared points are not shift-closed: σ({x}) = {y} is missing"
                )));
            }
        }
        if let Some(k) = self.schema_len() {
            if self.schemas.iter().any(|s| s.len() != k) {
                return Err(Error::Invalid("block schemas must share one length".into()));
            }
            for x in &probes {
                let n = x.pre().len() + x.per().len() + k;
                let w = x.prefix(n);
                for i in 0..=n - k {
                    let win = &w.letters()[i..i + k];
                    if !self.window_allowed(win) {
                        return Err(Error::Invalid(format!(
                            "block {} of {x} matches no schema",
                            Word(win.to_vec())
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn schema_len(&self) -> Option<usize> {
        self.schemas.first().map(Vec::len)
    }

    pub fn window_allowed(&self, win: &[Letter]) -> bool {
        self.schemas.iter().any(|s| schema_matches(s, win))
    }

    /// Length-`n` prefixes of the representative points; these are the
    /// length-`n` words with indices in the representative range.
    pub fn language_words(&self, n: usize) -> Vec<Word> {
        let set: BTreeSet<Word> = self.rep_points().iter().map(|x| x.prefix(n)).collect();
        set.into_iter().collect()
    }

    /// `L_n(X)` with generic indices written as `j`.
    pub fn language_schemas(&self, n: usize) -> Vec<Word> {
        let mut set: BTreeSet<Word> = self.explicit.iter().map(|x| x.prefix(n)).collect();
        for f in &self.families {
            set.insert(f.template.prefix(n));
            for c in f.start..self.bound {
                set.insert(f.template.instantiate(c).prefix(n));
            }
        }
        set.into_iter().collect()
    }

    /// Compares generated words against schema-allowed words of length `n`
    /// over the representative letters. Returns the words in exactly one of
    /// the two sets.
    pub fn completeness_probe(&self, n: usize) -> Result<(Vec<Word>, Vec<Word>)> {
        let k = self
            .schema_len()
            .ok_or_else(|| Error::Invalid("no block schemas declared".into()))?;
        if n < k {
            return Err(Error::Invalid(format!("probe length {n} below schema length {k}")));
        }
        let limit = self.rep_limit();
        let mut universe: Vec<Letter> = self.concrete.iter().map(|c| Letter::concrete(c.clone())).collect();
        for lf in &self.letter_families {
            for c in lf.start..limit {
                universe.push(Letter::member(lf.name.clone(), c));
            }
        }
        let mut allowed = BTreeSet::new();
        let mut stack: Vec<Vec<Letter>> = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() >= k && !self.window_allowed(&w[w.len() - k..]) {
                continue;
            }
            if w.len() == n {
                allowed.insert(Word(w));
                continue;
            }
            for a in &universe {
                let mut v = w.clone();
                v.push(a.clone());
                stack.push(v);
            }
        }
        let generated: BTreeSet<Word> = self.language_words(n).into_iter().collect();
        let missing = allowed.difference(&generated).cloned().collect();
        let extra = generated.difference(&allowed).cloned().collect();
        Ok((missing, extra))
    }
}

fn schema_matches(s: &[SchemaLetter], win: &[Letter]) -> bool {
    if s.len() != win.len() {
        return false;
    }
    let mut j: Option<Index> = None;
    for (sl, a) in s.iter().zip(win) {
        let ok = match (sl, a) {
            (SchemaLetter::Concrete(n), Letter::Concrete(m)) => n == m,
            (SchemaLetter::Fixed(f, c), Letter::Member { family, index }) => {
                f == family && *index == Index::Nat(*c)
            }
            (SchemaLetter::Var(f), Letter::Member { family, index }) => {
                f == family && *j.get_or_insert(*index) == *index
            }
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn tripla_language_of_length_two() {
        let p = corpus::tripla_flat();
        let words: Vec<String> = p.language_schemas(2).iter().map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["0 0", "0 j", "j 0"]);
    }

    #[test]
    fn completeness_probe_passes_for_examples() {
        for p in [corpus::tripla_flat(), corpus::chuva_flat()] {
            let (missing, extra) = p.completeness_probe(6).unwrap();
            assert!(missing.is_empty() && extra.is_empty(), "{missing:?} {extra:?}");
        }
    }

    #[test]
    fn locate_resolves_family_members() {
        let p = corpus::chuva_flat();
        let x = p.families()[0].template.instantiate(5);
        assert_eq!(p.locate(&x), Some(PointId::Member(0, Index::Nat(5))));
        assert_eq!(p.locate(&p.families()[1].template), Some(PointId::Member(1, Index::Param)));
    }

    #[test]
    fn shift_closure_is_enforced() {
        let zero = Letter::concrete("0");
        let one = Letter::concrete("1");
        let bad = FlatPresentation::new(
            vec!["0".into(), "1".into()],
            vec![],
            vec![],
            vec![PointTemplate::new(Word(vec![one]), Word(vec![zero])).unwrap()],
            vec![],
        );
        assert!(matches!(bad, Err(Error::Invalid(_))));
    }
}
