//! Letters, words and eventually periodic points.
//!
//! A point is stored as `pre · per^∞` in canonical form: `per` is primitive
//! and `pre` cannot be shortened by rotating `per`. Equality of points is
//! therefore structural equality of templates.
//!
//! Letters drawn from an indexed family carry either a concrete index or the
//! single symbolic parameter `j` of the template they belong to.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Index {
    Nat(u64),
    Param,
}

impl Index {
    pub fn instantiate(self, j: u64) -> Index {
        match self {
            Index::Param => Index::Nat(j),
            n => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    Concrete(String),
    Member { family: String, index: Index },
}

impl Letter {
    pub fn concrete(name: impl Into<String>) -> Letter {
        Letter::Concrete(name.into())
    }

    pub fn member(family: impl Into<String>, index: u64) -> Letter {
        Letter::Member { family: family.into(), index: Index::Nat(index) }
    }

    pub fn param(family: impl Into<String>) -> Letter {
        Letter::Member { family: family.into(), index: Index::Param }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Letter::Member { index: Index::Param, .. })
    }

    pub fn concrete_index(&self) -> Option<u64> {
        match self {
            Letter::Member { index: Index::Nat(n), .. } => Some(*n),
            _ => None,
        }
    }

    pub fn family(&self) -> Option<&str> {
        match self {
            Letter::Member { family, .. } => Some(family),
            Letter::Concrete(_) => None,
        }
    }

    pub fn instantiate(&self, j: u64) -> Letter {
        match self {
            Letter::Member { family, index } => {
                Letter::Member { family: family.clone(), index: index.instantiate(j) }
            }
            c => c.clone(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Concrete(n) => write!(f, "{n}"),
            Letter::Member { family, index } => {
                let idx = match index {
                    Index::Nat(n) => n.to_string(),
                    Index::Param => "j".to_string(),
                };
                if family.is_empty() {
                    write!(f, "{idx}")
                } else {
                    write!(f, "{family}_{idx}")
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    pub fn has_param(&self) -> bool {
        self.0.iter().any(Letter::is_param)
    }

    pub fn instantiate(&self, j: u64) -> Word {
        Word(self.0.iter().map(|a| a.instantiate(j)).collect())
    }

    pub fn max_index(&self) -> Option<u64> {
        self.0.iter().filter_map(Letter::concrete_index).max()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ω");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// An eventually periodic right-infinite sequence `pre · per^∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointTemplate {
    pre: Word,
    per: Word,
}

impl PointTemplate {
    pub fn new(pre: Word, per: Word) -> Option<PointTemplate> {
        if per.is_empty() {
            return None;
        }
        Some(canonicalize(pre, per))
    }

    pub fn periodic(per: Word) -> Option<PointTemplate> {
        PointTemplate::new(Word::empty(), per)
    }

    pub fn pre(&self) -> &Word {
        &self.pre
    }

    pub fn per(&self) -> &Word {
        &self.per
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    pub fn has_param(&self) -> bool {
        self.pre.has_param() || self.per.has_param()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.pre.max_index().max(self.per.max_index())
    }

    pub fn letter_at(&self, i: usize) -> &Letter {
        let p = self.pre.len();
        if i < p {
            &self.pre.0[i]
        } else {
            &self.per.0[(i - p) % self.per.len()]
        }
    }

    pub fn first(&self) -> &Letter {
        self.letter_at(0)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.letter_at(i).clone()).collect())
    }

    pub fn starts_with(&self, w: &Word) -> bool {
        w.0.iter().enumerate().all(|(i, a)| self.letter_at(i) == a)
    }

    /// `w · self`.
    pub fn prepend(&self, w: &Word) -> PointTemplate {
        canonicalize(w.concat(&self.pre), self.per.clone())
    }

    /// The tail after `w`, if `self` starts with `w`.
    pub fn strip(&self, w: &Word) -> Option<PointTemplate> {
        if !self.starts_with(w) {
            return None;
        }
        Some(self.shift_by(w.len()))
    }

    pub fn shift(&self) -> PointTemplate {
        if self.pre.is_empty() {
            let mut per = self.per.0.clone();
            per.rotate_left(1);
            PointTemplate { pre: Word::empty(), per: Word(per) }
        } else {
            canonicalize(Word(self.pre.0[1..].to_vec()), self.per.clone())
        }
    }

    pub fn shift_by(&self, n: usize) -> PointTemplate {
        if n <= self.pre.len() {
            return canonicalize(Word(self.pre.0[n..].to_vec()), self.per.clone());
        }
        let k = (n - self.pre.len()) % self.per.len();
        let mut per = self.per.0.clone();
        per.rotate_left(k);
        PointTemplate { pre: Word::empty(), per: Word(per) }
    }

    pub fn instantiate(&self, j: u64) -> PointTemplate {
        canonicalize(self.pre.instantiate(j), self.per.instantiate(j))
    }

    pub fn map_letters(&self, f: impl Fn(&Letter) -> Letter) -> PointTemplate {
        let m = |w: &Word| Word(w.0.iter().map(&f).collect());
        canonicalize(m(&self.pre), m(&self.per))
    }

    /// Length of a prefix on which two distinct templates must disagree.
    pub fn separation_length(&self, other: &PointTemplate) -> usize {
        self.pre.len().max(other.pre.len()) + self.per.len().lcm(&other.per.len())
    }
}

impl fmt::Display for PointTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.pre.is_empty() {
            write!(f, "{} ", self.pre)?;
        }
        write!(f, "({})", self.per)
    }
}

fn canonicalize(pre: Word, per: Word) -> PointTemplate {
    let n = per.len();
    let d = (1..=n)
        .find(|d| n % d == 0 && (0..n).all(|i| per.0[i] == per.0[i % d]))
        .unwrap_or(n);
    let mut per = per.0[..d].to_vec();
    let mut pre = pre.0;
    while let (Some(a), Some(b)) = (pre.last(), per.last()) {
        if a != b {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    PointTemplate { pre: Word(pre), per: Word(per) }
}

/// `d(x, y) = 2^{-k}` with `k` the common prefix length; `None` encodes 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dyadic(pub Option<u32>);

impl Dyadic {
    pub fn as_f64(self) -> f64 {
        match self.0 {
            None => 0.0,
            Some(k) => 0.5f64.powi(k as i32),
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(k) => write!(f, "1/2^{k}"),
        }
    }
}

pub fn common_prefix_len(x: &PointTemplate, y: &PointTemplate) -> Option<usize> {
    if x == y {
        return None;
    }
    let bound = x.separation_length(y);
    (0..bound).find(|&i| x.letter_at(i) != y.letter_at(i))
}

pub fn metric_distance(x: &PointTemplate, y: &PointTemplate) -> Dyadic {
    Dyadic(common_prefix_len(x, y).map(|k| k as u32))
}

/// The reduced group element `num · den⁻¹` of the free group on the alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElementWord {
    num: Word,
    den: Word,
}

impl GroupElementWord {
    pub fn new(num: Word, den: Word) -> GroupElementWord {
        let (mut n, mut d) = (num.0, den.0);
        while let (Some(a), Some(b)) = (n.last(), d.last()) {
            if a != b {
                break;
            }
            n.pop();
            d.pop();
        }
        GroupElementWord { num: Word(n), den: Word(d) }
    }

    pub fn identity() -> GroupElementWord {
        GroupElementWord::new(Word::empty(), Word::empty())
    }

    pub fn num(&self) -> &Word {
        &self.num
    }

    pub fn den(&self) -> &Word {
        &self.den
    }

    pub fn inverse(&self) -> GroupElementWord {
        GroupElementWord { num: self.den.clone(), den: self.num.clone() }
    }

    /// `x = den · y ↦ num · y` when `num · y ∈ X`; membership is supplied.
    pub fn apply(
        &self,
        x: &PointTemplate,
        member: impl Fn(&PointTemplate) -> bool,
    ) -> Option<PointTemplate> {
        let y = x.strip(&self.den)?;
        let z = y.prepend(&self.num);
        member(&z).then_some(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word(s.chars().map(|c| Letter::concrete(c.to_string())).collect())
    }

    fn pt(pre: &str, per: &str) -> PointTemplate {
        PointTemplate::new(w(pre), w(per)).unwrap()
    }

    #[test]
    fn canonical_form_is_minimal() {
        let p = pt("0101", "0101");
        assert_eq!(p.pre(), &Word::empty());
        assert_eq!(p.per(), &w("01"));
        let q = pt("ab", "cb");
        assert_eq!(q, pt("a", "bc"));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(pt("", "0").shift(), pt("", "0"));
        let a = Letter::param("a");
        let c = Letter::concrete("c");
        let x = PointTemplate::new(Word(vec![a]), Word(vec![c.clone()])).unwrap();
        assert_eq!(x.shift(), PointTemplate::periodic(Word(vec![c])).unwrap());
        let j = Letter::param("");
        let zero = Letter::concrete("0");
        let y = PointTemplate::periodic(Word(vec![zero.clone(), j.clone()])).unwrap();
        assert_eq!(y.shift().per(), &Word(vec![j, zero]));
    }

    #[test]
    fn metric_examples() {
        assert_eq!(metric_distance(&pt("", "0"), &pt("", "0")), Dyadic(None));
        assert_eq!(metric_distance(&pt("", "0"), &pt("", "1")), Dyadic(Some(0)));
        assert_eq!(metric_distance(&pt("0", "1"), &pt("00", "1")), Dyadic(Some(1)));
    }

    #[test]
    fn group_element_reduces_and_acts() {
        let t = GroupElementWord::new(w("01"), w("1"));
        assert_eq!(t.num(), &w("0"));
        assert_eq!(t.den(), &Word::empty());
        let e = GroupElementWord::identity();
        assert_eq!(e.apply(&pt("", "01"), |_| true), Some(pt("", "01")));
        let s = GroupElementWord::new(w("0"), w("1"));
        assert_eq!(s.apply(&pt("", "10"), |_| true), Some(pt("0", "01")));
        assert_eq!(s.apply(&pt("", "0"), |_| true), None);
    }

    #[test]
    fn param_display() {
        assert_eq!(Letter::param("a").to_string(), "a_j");
        assert_eq!(Letter::member("", 3).to_string(), "3");
        assert_eq!(pt("1", "0").to_string(), "1 (0)");
    }
}
