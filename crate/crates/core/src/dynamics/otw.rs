//! Points of the compactification `X^OTW = X^inf ∪ X^fin ∪ {⃗0}`.
//!
//! A finite word `w` lies in `X^fin` when infinitely many letters `a` extend
//! it to an infinite point `w a y`; over a finite alphabet there are none.
//! `⃗0` is present exactly when the empty word has that property.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::symbolic::{Letter, PointTemplate, Word};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum OTWPoint {
    Infinite(PointTemplate),
    Finite(Word),
    ZeroTail,
}

impl OTWPoint {
    pub fn infinite(p: &Presentation, x: PointTemplate) -> Result<OTWPoint> {
        if !p.member(&x) {
            return Err(Error::Invalid(format!("{x} is not a point of X")));
        }
        Ok(OTWPoint::Infinite(x))
    }

    pub fn finite(p: &Presentation, w: Word) -> Result<OTWPoint> {
        if w.is_empty() {
            return OTWPoint::zero_tail(p);
        }
        if !otw_membership_fin(p, &w)? {
            return Err(Error::Invalid(format!("{w} has finitely many infinite continuations")));
        }
        Ok(OTWPoint::Finite(w))
    }

    pub fn zero_tail(p: &Presentation) -> Result<OTWPoint> {
        if !otw_membership_fin(p, &Word::empty())? {
            return Err(Error::Invalid("the zero tail is not in X^OTW".into()));
        }
        Ok(OTWPoint::ZeroTail)
    }

    /// Letters available to cylinder tests: for an infinite point enough to
    /// decide `n` coordinates, for a finite one the whole word.
    fn view(&self, n: usize) -> (Word, bool) {
        match self {
            OTWPoint::Infinite(x) => (x.prefix(n), false),
            OTWPoint::Finite(w) => (w.clone(), true),
            OTWPoint::ZeroTail => (Word::empty(), true),
        }
    }
}

impl fmt::Display for OTWPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OTWPoint::Infinite(x) => write!(f, "{x}"),
            OTWPoint::Finite(w) => write!(f, "{w} ."),
            OTWPoint::ZeroTail => write!(f, "0->"),
        }
    }
}

/// Whether `w ∈ L_X` has infinitely many one-letter infinite continuations.
pub fn otw_membership_fin(p: &Presentation, w: &Word) -> Result<bool> {
    if !p.in_language(w) {
        return Err(Error::Invalid(format!("{w} is not in the language")));
    }
    if p.finite_alphabet() {
        return Ok(false);
    }
    Ok(!p.letters_from(&p.follower(w)?)?.tails.is_empty())
}

pub fn otw_shift(x: &OTWPoint) -> OTWPoint {
    match x {
        OTWPoint::Infinite(x) => OTWPoint::Infinite(x.shift()),
        OTWPoint::Finite(w) if w.len() >= 2 => OTWPoint::Finite(w.slice(1, w.len())),
        OTWPoint::Finite(_) | OTWPoint::ZeroTail => OTWPoint::ZeroTail,
    }
}

/// `𝒵(α, F)`: points agreeing with `α` on `|α|` coordinates whose next
/// coordinate avoids `F`; a finite point ending right after `α` has no next
/// coordinate and is included.
pub fn generalized_cylinder_contains(alpha: &Word, f: &BTreeSet<Letter>, x: &OTWPoint) -> bool {
    let (w, ended) = x.view(alpha.len() + 1);
    cylinder_view_contains(alpha, f, &w, ended)
}

/// Cylinder membership from a prefix view: `w` holds at least `|α| + 1`
/// letters unless `ended` marks it as the whole (finite) point.
pub(crate) fn cylinder_view_contains(alpha: &Word, f: &BTreeSet<Letter>, w: &Word, ended: bool) -> bool {
    if !w.starts_with(alpha) || w.len() < alpha.len() {
        return false;
    }
    match w.letters().get(alpha.len()) {
        Some(a) => !f.contains(a),
        None => ended,
    }
}

/// Sample of `X^OTW`: representative infinite points, finite words of length
/// at most `max_len` in `X^fin`, and `⃗0` when present.
pub fn otw_sample(p: &Presentation, depth: usize, max_len: usize) -> Result<Vec<OTWPoint>> {
    let mut out: Vec<OTWPoint> = p.sample_points(depth).into_iter().map(OTWPoint::Infinite).collect();
    if p.finite_alphabet() {
        return Ok(out);
    }
    if otw_membership_fin(p, &Word::empty())? {
        out.push(OTWPoint::ZeroTail);
    }
    for n in 1..=max_len {
        for w in p.language(n) {
            if otw_membership_fin(p, &w)? {
                out.push(OTWPoint::Finite(w));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::syntax::parse_word;

    #[test]
    fn chuva_fin_membership() {
        let p = corpus::chuva();
        assert!(otw_membership_fin(&p, &Word::empty()).unwrap());
        assert!(!otw_membership_fin(&p, &parse_word(&p, "a_3").unwrap()).unwrap());
        assert!(OTWPoint::zero_tail(&p).is_ok());
        assert!(OTWPoint::finite(&p, parse_word(&p, "a_3").unwrap()).is_err());
    }

    #[test]
    fn tripla_has_finite_points() {
        let p = corpus::tripla();
        let zero = parse_word(&p, "0").unwrap();
        assert!(otw_membership_fin(&p, &zero).unwrap());
        assert!(!otw_membership_fin(&p, &parse_word(&p, "0 5").unwrap()).unwrap());
        let x = OTWPoint::finite(&p, zero).unwrap();
        assert_eq!(otw_shift(&x), OTWPoint::ZeroTail);
    }

    #[test]
    fn finite_alphabets_have_no_finite_points() {
        let p = corpus::golden_mean();
        for w in ["", "0", "01", "010"] {
            assert!(!otw_membership_fin(&p, &parse_word(&p, w).unwrap()).unwrap());
        }
        assert!(OTWPoint::zero_tail(&p).is_err());
    }

    #[test]
    fn shift_rules() {
        let p = corpus::tripla();
        assert_eq!(otw_shift(&OTWPoint::ZeroTail), OTWPoint::ZeroTail);
        let w = parse_word(&p, "0 3 0").unwrap();
        assert_eq!(otw_shift(&OTWPoint::Finite(w)), OTWPoint::Finite(parse_word(&p, "3 0").unwrap()));
        let z = corpus::point(&p, "(0)");
        assert_eq!(otw_shift(&OTWPoint::Infinite(z.clone())), OTWPoint::Infinite(z));
    }

    #[test]
    fn generalized_cylinders() {
        let p = corpus::chuva();
        let a0 = parse_word(&p, "a_0").unwrap().0[0].clone();
        let f = BTreeSet::from([a0]);
        let x = OTWPoint::Infinite(corpus::point(&p, "a_0 (c)"));
        let y = OTWPoint::Infinite(corpus::point(&p, "b_0 (c)"));
        assert!(!generalized_cylinder_contains(&Word::empty(), &f, &x));
        assert!(generalized_cylinder_contains(&Word::empty(), &f, &y));
        assert!(generalized_cylinder_contains(&Word::empty(), &f, &OTWPoint::ZeroTail));
        let q = corpus::tripla();
        let alpha = parse_word(&q, "0").unwrap();
        let any: BTreeSet<Letter> = q.language(1).into_iter().flat_map(|w| w.0).collect();
        assert!(generalized_cylinder_contains(&alpha, &any, &OTWPoint::Finite(alpha.clone())));
        assert!(!generalized_cylinder_contains(&alpha, &any, &OTWPoint::ZeroTail));
    }
}
