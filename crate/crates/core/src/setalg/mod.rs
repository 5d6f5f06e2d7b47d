//! The Boolean algebra generated by the sets `C(α,β)`, relative ranges,
//! letter sets and regularity.

pub mod flat;
pub mod sofic;

use std::fmt;

use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::symbolic::{PointTemplate, Word};

pub use flat::{FlatSet, IdxSet, LetterSet};
pub use sofic::SoficSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum USet {
    Sofic(SoficSet),
    Flat(FlatSet),
}

impl USet {
    pub fn as_flat(&self) -> Option<&FlatSet> {
        match self {
            USet::Flat(s) => Some(s),
            USet::Sofic(_) => None,
        }
    }

    pub fn as_sofic(&self) -> Option<&SoficSet> {
        match self {
            USet::Sofic(s) => Some(s),
            USet::Flat(_) => None,
        }
    }
}

/// Boolean terms over the generators `C(α,β)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Full,
    Empty,
    C(Word, Word),
    Not(Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
}

impl Term {
    pub fn c(alpha: Word, beta: Word) -> Term {
        Term::C(alpha, beta)
    }

    pub fn cylinder(beta: Word) -> Term {
        Term::C(Word::empty(), beta)
    }

    pub fn follower(alpha: Word) -> Term {
        Term::C(alpha, Word::empty())
    }

    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Or(Box::new(a), Box::new(b))
    }

    /// Membership of `x` decided straight from the definitions, without
    /// building any set: `x ∈ C(α,β)` iff `x = βy` and `αy ∈ X`.
    pub fn holds_at(&self, p: &Presentation, x: &PointTemplate) -> bool {
        match self {
            Term::Full => p.member(x),
            Term::Empty => false,
            Term::C(a, b) => {
                p.member(x) && x.strip(b).is_some_and(|y| p.member(&y.prepend(a)))
            }
            Term::Not(t) => p.member(x) && !t.holds_at(p, x),
            Term::And(s, t) => s.holds_at(p, x) && t.holds_at(p, x),
            Term::Or(s, t) => s.holds_at(p, x) || t.holds_at(p, x),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |w: &Word| if w.is_empty() { String::new() } else { w.to_string() };
        match self {
            Term::Full => write!(f, "X"),
            Term::Empty => write!(f, "0"),
            Term::C(a, b) if a.is_empty() => write!(f, "Z({})", w(b)),
            Term::C(a, b) if b.is_empty() => write!(f, "F({})", w(a)),
            Term::C(a, b) => write!(f, "C({},{})", w(a), w(b)),
            Term::Not(t) => write!(f, "!{t}"),
            Term::And(s, t) => write!(f, "({s} & {t})"),
            Term::Or(s, t) => write!(f, "({s} | {t})"),
        }
    }
}

impl Presentation {
    pub fn full(&self) -> USet {
        match self {
            Presentation::Sofic(p) => USet::Sofic(p.set_full()),
            Presentation::Flat(p) => USet::Flat(p.set_full()),
        }
    }

    pub fn empty(&self) -> USet {
        match self {
            Presentation::Sofic(p) => USet::Sofic(p.set_empty()),
            Presentation::Flat(p) => USet::Flat(p.set_empty()),
        }
    }

    pub fn make_c(&self, alpha: &Word, beta: &Word) -> Result<USet> {
        if alpha.has_param() || beta.has_param() {
            return Err(Error::Symbolic);
        }
        Ok(match self {
            Presentation::Sofic(p) => USet::Sofic(p.set_c(alpha, beta)?),
            Presentation::Flat(p) => USet::Flat(p.set_c(alpha, beta)?),
        })
    }

    pub fn cylinder(&self, beta: &Word) -> Result<USet> {
        self.make_c(&Word::empty(), beta)
    }

    pub fn follower(&self, alpha: &Word) -> Result<USet> {
        self.make_c(alpha, &Word::empty())
    }

    pub fn complement(&self, a: &USet) -> Result<USet> {
        match (self, a) {
            (Presentation::Sofic(p), USet::Sofic(s)) => Ok(USet::Sofic(p.set_complement(s))),
            (Presentation::Flat(p), USet::Flat(s)) => Ok(USet::Flat(p.set_complement(s))),
            _ => Err(Error::MixedBackends),
        }
    }

    pub fn intersect(&self, a: &USet, b: &USet) -> Result<USet> {
        match (self, a, b) {
            (Presentation::Sofic(p), USet::Sofic(x), USet::Sofic(y)) => {
                Ok(USet::Sofic(p.set_combine(x, y, |m, n| m & n)))
            }
            (Presentation::Flat(p), USet::Flat(x), USet::Flat(y)) => Ok(USet::Flat(p.set_intersect(x, y))),
            _ => Err(Error::MixedBackends),
        }
    }

    pub fn union(&self, a: &USet, b: &USet) -> Result<USet> {
        match (self, a, b) {
            (Presentation::Sofic(p), USet::Sofic(x), USet::Sofic(y)) => {
                Ok(USet::Sofic(p.set_combine(x, y, |m, n| m | n)))
            }
            (Presentation::Flat(p), USet::Flat(x), USet::Flat(y)) => Ok(USet::Flat(p.set_union(x, y))),
            _ => Err(Error::MixedBackends),
        }
    }

    pub fn difference(&self, a: &USet, b: &USet) -> Result<USet> {
        self.intersect(a, &self.complement(b)?)
    }

    pub fn sym_diff(&self, a: &USet, b: &USet) -> Result<USet> {
        self.union(&self.difference(a, b)?, &self.difference(b, a)?)
    }

    pub fn is_empty(&self, a: &USet) -> bool {
        match a {
            USet::Sofic(s) => s.is_empty(),
            USet::Flat(s) => s.is_empty(),
        }
    }

    /// Canonical forms are unique, so equality is structural.
    pub fn equals(&self, a: &USet, b: &USet) -> Result<bool> {
        match (a, b) {
            (USet::Sofic(_), USet::Sofic(_)) | (USet::Flat(_), USet::Flat(_)) => Ok(a == b),
            _ => Err(Error::MixedBackends),
        }
    }

    pub fn contains_point(&self, a: &USet, x: &PointTemplate) -> Result<bool> {
        if x.has_param() {
            return Err(Error::Symbolic);
        }
        match (self, a) {
            (Presentation::Sofic(p), USet::Sofic(s)) => Ok(p.set_contains(s, x)),
            (Presentation::Flat(p), USet::Flat(s)) => Ok(p.set_contains(s, x)),
            _ => Err(Error::MixedBackends),
        }
    }

    pub fn relative_range(&self, a: &USet, alpha: &Word) -> Result<USet> {
        if alpha.has_param() {
            return Err(Error::Symbolic);
        }
        match (self, a) {
            (Presentation::Sofic(p), USet::Sofic(s)) => Ok(USet::Sofic(p.set_relative_range(s, alpha)?)),
            (Presentation::Flat(p), USet::Flat(s)) => Ok(USet::Flat(p.set_relative_range(s, alpha)?)),
            _ => Err(Error::MixedBackends),
        }
    }

    /// `ℒ(Aℰ¹) = {a : Z_a ∩ A ≠ ∅}`.
    pub fn letters_from(&self, a: &USet) -> Result<LetterSet> {
        match (self, a) {
            (Presentation::Sofic(p), USet::Sofic(s)) => Ok(LetterSet {
                finite: p.set_letters(s).into_iter().map(|i| p.alphabet()[i].clone()).collect(),
                tails: Default::default(),
            }),
            (Presentation::Flat(p), USet::Flat(s)) => Ok(p.set_letters(s)),
            _ => Err(Error::MixedBackends),
        }
    }

    /// `0 < |ℒ(Aℰ¹)| < ∞`.
    pub fn is_regular(&self, a: &USet) -> Result<bool> {
        Ok(self.letters_from(a)?.is_regular())
    }

    /// Checks `A = ⊔_{a ∈ ℒ(Aℰ¹)} Z_a ∩ A` for a regular set.
    pub fn check_letter_decomposition(&self, a: &USet) -> Result<bool> {
        let letters = self.letters_from(a)?;
        if !letters.is_finite() {
            return Ok(false);
        }
        let mut acc = self.empty();
        for l in &letters.finite {
            let piece = self.intersect(&self.cylinder(&Word(vec![l.clone()]))?, a)?;
            if self.is_empty(&piece) {
                return Ok(false);
            }
            acc = self.union(&acc, &piece)?;
        }
        self.equals(&acc, a)
    }

    pub fn eval(&self, t: &Term) -> Result<USet> {
        match t {
            Term::Full => Ok(self.full()),
            Term::Empty => Ok(self.empty()),
            Term::C(a, b) => self.make_c(a, b),
            Term::Not(s) => self.complement(&self.eval(s)?),
            Term::And(s, u) => self.intersect(&self.eval(s)?, &self.eval(u)?),
            Term::Or(s, u) => self.union(&self.eval(s)?, &self.eval(u)?),
        }
    }

    pub fn describe(&self, a: &USet) -> String {
        match (self, a) {
            (Presentation::Sofic(p), USet::Sofic(s)) => p.set_describe(s),
            (Presentation::Flat(p), USet::Flat(s)) => p.set_describe(s),
            _ => "<mixed backends>".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::symbolic::Letter;

    fn w(s: &str) -> Word {
        Word(s.chars().map(|c| Letter::concrete(c.to_string())).collect())
    }

    #[test]
    fn omega_omega_is_everything() {
        for p in [corpus::golden_mean(), corpus::chuva(), corpus::tripla()] {
            let x = p.make_c(&Word::empty(), &Word::empty()).unwrap();
            assert_eq!(x, p.full());
        }
    }

    #[test]
    fn golden_mean_follower_of_one_is_cylinder_of_zero() {
        let p = corpus::golden_mean();
        assert!(p.equals(&p.follower(&w("1")).unwrap(), &p.cylinder(&w("0")).unwrap()).unwrap());
    }

    #[test]
    fn complement_and_union_laws() {
        let p = corpus::full_shift(2);
        let a = p.cylinder(&w("01")).unwrap();
        let i = p.intersect(&a, &p.complement(&a).unwrap()).unwrap();
        assert!(p.is_empty(&i));
        let u = p.union(&p.cylinder(&w("0")).unwrap(), &p.cylinder(&w("1")).unwrap()).unwrap();
        assert_eq!(u, p.full());
    }

    #[test]
    fn chuva_generator_is_a_singleton() {
        let p = corpus::chuva();
        let s = p.make_c(&Word(vec![Letter::member("a", 5)]), &Word(vec![Letter::member("b", 3)])).unwrap();
        assert_eq!(p.describe(&s), "{b_3 (c)}");
        let f = p.follower(&Word(vec![Letter::member("a", 0)])).unwrap();
        assert!(p.contains_point(&f, &corpus::point(&p, "(c)")).unwrap());
    }

    #[test]
    fn tripla_named_sets() {
        let p = corpus::tripla();
        let z0 = p.cylinder(&Word(vec![Letter::concrete("0")])).unwrap();
        let a = p.cylinder(&Word(vec![Letter::concrete("0"), Letter::concrete("0")])).unwrap();
        let u = p.intersect(&z0, &p.complement(&a).unwrap()).unwrap();
        assert_eq!(p.describe(&u), "{(0 j) for all j≥1}");
        let v = p.relative_range(&u, &Word(vec![Letter::concrete("0")])).unwrap();
        assert_eq!(p.describe(&v), "{(j 0) for all j≥1}");
        assert!(p.is_regular(&u).unwrap());
        assert!(!p.is_regular(&v).unwrap());
        assert!(!p.is_regular(&p.empty()).unwrap());
        assert!(p.check_letter_decomposition(&u).unwrap());
    }

    #[test]
    fn relative_range_rules() {
        let p = corpus::golden_mean();
        let f0 = p.follower(&w("0")).unwrap();
        assert_eq!(p.relative_range(&f0, &Word::empty()).unwrap(), f0);
        // r(F_0, 1) = F_01
        assert_eq!(p.relative_range(&f0, &w("1")).unwrap(), p.follower(&w("01")).unwrap());
        // r(F_1, 1) = ∅ since 11 ∉ L
        let f1 = p.follower(&w("1")).unwrap();
        assert!(p.is_empty(&p.relative_range(&f1, &w("1")).unwrap()));
        // r(X, α) = F_α
        assert_eq!(p.relative_range(&p.full(), &w("01")).unwrap(), p.follower(&w("01")).unwrap());
    }

    #[test]
    fn finite_alphabet_nonempty_sets_are_regular() {
        let p = corpus::golden_mean();
        for t in ["0", "1", "01", "10"] {
            assert!(p.is_regular(&p.cylinder(&w(t)).unwrap()).unwrap());
        }
    }
}
