//! Prefix codes `h_k: L_k(X₁) → L_k(X₂)` and their depth-bounded checks.
//!
//! An isometric conjugacy is determined by its action on prefixes: the first
//! `k` letters of `h(x)` depend only on the first `k` letters of `x`. The
//! extension to `X^OTW` sends a finite word `w` to `h_{|w|}(w)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dynamics::otw::{cylinder_view_contains, otw_membership_fin, otw_sample, OTWPoint};
use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::symbolic::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixCode {
    /// Letter-by-letter renaming: listed letters map as given, members of a
    /// listed family move to the target family with the same index, and
    /// every other letter is fixed. Defined at every depth.
    LetterMap { letters: BTreeMap<Letter, Letter>, families: BTreeMap<String, String> },
    /// `maps[k - 1]` is `h_k`; defined up to depth `maps.len()`.
    Table { maps: Vec<BTreeMap<Word, Word>> },
}

impl PrefixCode {
    pub fn identity() -> PrefixCode {
        PrefixCode::LetterMap { letters: BTreeMap::new(), families: BTreeMap::new() }
    }

    pub fn depth(&self) -> Option<usize> {
        match self {
            PrefixCode::LetterMap { .. } => None,
            PrefixCode::Table { maps } => Some(maps.len()),
        }
    }

    fn map_letter(letters: &BTreeMap<Letter, Letter>, families: &BTreeMap<String, String>, a: &Letter) -> Letter {
        if let Some(b) = letters.get(a) {
            return b.clone();
        }
        match a {
            Letter::Member { family, index } => match families.get(family) {
                Some(t) => Letter::Member { family: t.clone(), index: *index },
                None => a.clone(),
            },
            Letter::Concrete(_) => a.clone(),
        }
    }

    /// `h_{|w|}(w)`; `None` beyond the declared depth or off the table.
    pub fn image(&self, w: &Word) -> Option<Word> {
        if w.is_empty() {
            return Some(Word::empty());
        }
        match self {
            PrefixCode::LetterMap { letters, families } => {
                Some(Word(w.letters().iter().map(|a| Self::map_letter(letters, families, a)).collect()))
            }
            PrefixCode::Table { maps } => maps.get(w.len() - 1)?.get(w).cloned(),
        }
    }

    /// The inverse code, when the data is injective.
    pub fn inverse(&self) -> Option<PrefixCode> {
        match self {
            PrefixCode::LetterMap { letters, families } => {
                let inv_l: BTreeMap<Letter, Letter> = letters.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
                let inv_f: BTreeMap<String, String> =
                    families.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
                if inv_l.len() != letters.len() || inv_f.len() != families.len() {
                    return None;
                }
                let inv = PrefixCode::LetterMap { letters: inv_l, families: inv_f };
                // Fixed letters stay fixed only if no listed letter lands on them.
                let moved: BTreeSet<&Letter> = letters.keys().collect();
                let hit: BTreeSet<&Letter> = letters.values().collect();
                let moved_f: BTreeSet<&String> = families.keys().collect();
                let hit_f: BTreeSet<&String> = families.values().collect();
                (moved == hit && moved_f == hit_f).then_some(inv)
            }
            PrefixCode::Table { maps } => {
                let mut inv = Vec::with_capacity(maps.len());
                for m in maps {
                    let i: BTreeMap<Word, Word> = m.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
                    if i.len() != m.len() {
                        return None;
                    }
                    inv.push(i);
                }
                Some(PrefixCode::Table { maps: inv })
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DepthCheck {
    pub depth: usize,
    pub words: usize,
    pub bijective: bool,
    pub coherent: bool,
    pub shift_commuting: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConjugacyReport {
    pub depth: usize,
    pub levels: Vec<DepthCheck>,
    pub failures: Vec<String>,
}

impl ConjugacyReport {
    /// All checks passed to the stated depth; not a claim about deeper levels.
    pub fn verified(&self) -> bool {
        self.failures.is_empty() && self.levels.len() == self.depth
    }
}

/// Checks levels `1..=depth`: each `h_k` is a bijection `L_k(X₁) → L_k(X₂)`
/// (over representative words), `h_k` is the `k`-prefix of `h_{k+1}`, and
/// `h_k(w_2…w_{k+1})` is `h_{k+1}(w)` with its first letter dropped.
pub fn verify_isometric_conjugacy(
    h: &PrefixCode,
    x1: &Presentation,
    x2: &Presentation,
    depth: usize,
) -> Result<ConjugacyReport> {
    if let Some(d) = h.depth() {
        if d < depth {
            return Err(Error::Invalid(format!("code declared to depth {d}, asked for {depth}")));
        }
    }
    let inv = h.inverse();
    let mut report = ConjugacyReport { depth, ..Default::default() };
    for k in 1..=depth {
        let words = x1.language(k);
        let mut level = DepthCheck { depth: k, words: words.len(), bijective: true, coherent: true, shift_commuting: true };
        let mut images: BTreeSet<Word> = BTreeSet::new();
        for w in &words {
            let Some(v) = h.image(w) else {
                report.failures.push(format!("h_{k} undefined at {w}"));
                level.bijective = false;
                continue;
            };
            if v.len() != k || !x2.in_language(&v) {
                report.failures.push(format!("h_{k}({w}) = {v} is not in L_{k}(X2)"));
                level.bijective = false;
            }
            if !images.insert(v.clone()) {
                report.failures.push(format!("h_{k} is not injective at {v}"));
                level.bijective = false;
            }
            if k >= 2 {
                let pre = w.slice(0, k - 1);
                if h.image(&pre).is_none_or(|u| u != v.slice(0, k - 1)) {
                    report.failures.push(format!("h_{} of the prefix of {w} is not the prefix of {v}", k - 1));
                    level.coherent = false;
                }
                let tail = w.slice(1, k);
                if h.image(&tail).is_none_or(|u| u != v.slice(1, k)) {
                    report.failures.push(format!("h_{}({tail}) is not the shift of {v}", k - 1));
                    level.shift_commuting = false;
                }
            }
        }
        for v in x2.language(k) {
            if images.contains(&v) {
                continue;
            }
            let pre = inv.as_ref().and_then(|i| i.image(&v));
            let ok = pre.is_some_and(|u| x1.in_language(&u) && h.image(&u).as_ref() == Some(&v));
            if !ok {
                report.failures.push(format!("{v} in L_{k}(X2) has no preimage"));
                level.bijective = false;
            }
        }
        report.levels.push(level);
    }
    Ok(report)
}

/// `h^OTW(w) = h_{|w|}(w)` for `w ∈ L_{X₁}`, recomputed as the first `|w|`
/// letters of the images of every one-letter continuation `w a` when the code
/// reaches depth `|w| + 1`. Disagreement means `h` is not isometric.
pub fn extend_to_otw(h: &PrefixCode, x1: &Presentation, x2: &Presentation, w: &Word) -> Result<Word> {
    if !x1.in_language(w) {
        return Err(Error::Invalid(format!("{w} is not in the language of the source")));
    }
    let v = h.image(w).ok_or_else(|| Error::Invalid(format!("code undefined at {w}")))?;
    if v.len() != w.len() {
        return Err(Error::Invalid(format!("h({w}) = {v} changes length")));
    }
    if h.depth().is_none_or(|d| d > w.len()) {
        let n = w.len();
        let continuations: Vec<Word> = if x1.finite_alphabet() {
            x1.letters()
                .into_iter()
                .map(|a| {
                    let mut u = w.clone();
                    u.push(a);
                    u
                })
                .filter(|u| x1.in_language(u))
                .collect()
        } else {
            x1.language(n + 1).into_iter().filter(|u| u.starts_with(w)).collect()
        };
        for u in &continuations {
            let img = h.image(u).ok_or_else(|| Error::Invalid(format!("code undefined at {u}")))?;
            if img.slice(0, n) != v {
                return Err(Error::Invalid(format!("extensions of {w} disagree: {img} against {v}")));
            }
        }
    }
    if otw_membership_fin(x1, w)? && !otw_membership_fin(x2, &v)? {
        return Err(Error::Invalid(format!("h({w}) = {v} leaves the finite part")));
    }
    Ok(v)
}

/// Image of an OTW point, to the precision needed for cylinders of length
/// `n`: infinite points through `h_{n+1}` of their prefix.
fn image_view(h: &PrefixCode, x1: &Presentation, x2: &Presentation, p: &OTWPoint, n: usize) -> Result<(Word, bool)> {
    Ok(match p {
        OTWPoint::Infinite(x) => {
            let w = x.prefix(n + 1);
            (h.image(&w).ok_or_else(|| Error::Invalid(format!("code undefined at {w}")))?, false)
        }
        OTWPoint::Finite(w) => (extend_to_otw(h, x1, x2, w)?, true),
        OTWPoint::ZeroTail => (Word::empty(), true),
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CylinderReport {
    pub cylinders: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

/// For `α ∈ L(X₁)` with `|α| ≤ max_len` and `F` of size at most one among the
/// continuations of `α`, checks on sampled OTW points that `p ∈ 𝒵(α, F)` iff
/// `h(p) ∈ 𝒵(h(α), G)` with `G` the last letters of `h(α a)`, `a ∈ F`.
pub fn check_cylinder_images(
    h: &PrefixCode,
    x1: &Presentation,
    x2: &Presentation,
    max_len: usize,
    sample_depth: usize,
) -> Result<CylinderReport> {
    let sample = otw_sample(x1, sample_depth, max_len)?;
    let mut report = CylinderReport::default();
    for n in 0..=max_len {
        for alpha in x1.language(n) {
            let beta = h.image(&alpha).ok_or_else(|| Error::Invalid(format!("code undefined at {alpha}")))?;
            let next: Vec<Letter> = x1
                .language(n + 1)
                .into_iter()
                .filter(|u| u.starts_with(&alpha))
                .map(|u| u.0[n].clone())
                .collect();
            let mut choices: Vec<BTreeSet<Letter>> = vec![BTreeSet::new()];
            choices.extend(next.iter().map(|a| BTreeSet::from([a.clone()])));
            for f in choices {
                let mut g = BTreeSet::new();
                for a in &f {
                    let mut u = alpha.clone();
                    u.push(a.clone());
                    let img = h.image(&u).ok_or_else(|| Error::Invalid(format!("code undefined at {u}")))?;
                    g.insert(img.0[n].clone());
                }
                report.cylinders += 1;
                for p in &sample {
                    let (w, ended) = match p {
                        OTWPoint::Infinite(x) => (x.prefix(n + 1), false),
                        OTWPoint::Finite(w) => (w.clone(), true),
                        OTWPoint::ZeroTail => (Word::empty(), true),
                    };
                    let before = cylinder_view_contains(&alpha, &f, &w, ended);
                    let (v, ended2) = image_view(h, x1, x2, p, n)?;
                    let after = cylinder_view_contains(&beta, &g, &v, ended2);
                    report.checks += 1;
                    if before != after {
                        report.failures.push(format!("{p}: membership in Z({alpha}, F) and its image differ"));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::syntax::parse_word;

    fn swap_families() -> PrefixCode {
        PrefixCode::LetterMap {
            letters: BTreeMap::new(),
            families: BTreeMap::from([("a".into(), "b".into()), ("b".into(), "a".into())]),
        }
    }

    #[test]
    fn identity_verifies() {
        for (_, p) in corpus::named() {
            let r = verify_isometric_conjugacy(&PrefixCode::identity(), &p, &p, 4).unwrap();
            assert!(r.verified(), "{:?}", r.failures);
        }
    }

    #[test]
    fn full_shift_swap_verifies() {
        let p = corpus::full_shift(2);
        let swap = PrefixCode::LetterMap {
            letters: BTreeMap::from([
                (Letter::concrete("0"), Letter::concrete("1")),
                (Letter::concrete("1"), Letter::concrete("0")),
            ]),
            families: BTreeMap::new(),
        };
        assert!(verify_isometric_conjugacy(&swap, &p, &p, 6).unwrap().verified());
        assert!(check_cylinder_images(&swap, &p, &p, 3, 4).unwrap().failures.is_empty());
    }

    #[test]
    fn golden_mean_swap_fails() {
        let p = corpus::golden_mean();
        let swap = PrefixCode::LetterMap {
            letters: BTreeMap::from([
                (Letter::concrete("0"), Letter::concrete("1")),
                (Letter::concrete("1"), Letter::concrete("0")),
            ]),
            families: BTreeMap::new(),
        };
        assert!(!verify_isometric_conjugacy(&swap, &p, &p, 3).unwrap().verified());
    }

    #[test]
    fn two_block_code_breaks_coherence() {
        let p = corpus::golden_mean();
        let w = |s: &str| parse_word(&p, s).unwrap();
        // h_2(10) = 01 while h_1(1) = 1.
        let h1 = BTreeMap::from([(w("0"), w("0")), (w("1"), w("1"))]);
        let h2 = BTreeMap::from([(w("00"), w("00")), (w("01"), w("10")), (w("10"), w("01"))]);
        let code = PrefixCode::Table { maps: vec![h1, h2] };
        let r = verify_isometric_conjugacy(&code, &p, &p, 2).unwrap();
        assert!(!r.verified());
        assert!(!r.levels[1].coherent);
    }

    #[test]
    fn chuva_swap_extends() {
        let p = corpus::chuva();
        let h = swap_families();
        let r = verify_isometric_conjugacy(&h, &p, &p, 5).unwrap();
        assert!(r.verified(), "{:?}", r.failures);
        let a3 = parse_word(&p, "a_3").unwrap();
        assert_eq!(extend_to_otw(&h, &p, &p, &a3).unwrap().to_string(), "b_3");
        assert_eq!(extend_to_otw(&h, &p, &p, &Word::empty()).unwrap(), Word::empty());
        let c = check_cylinder_images(&h, &p, &p, 3, 0).unwrap();
        assert!(c.failures.is_empty() && c.checks > 0);
    }

    #[test]
    fn non_isometric_table_is_caught() {
        let p = corpus::full_shift(2);
        let w = |s: &str| parse_word(&p, s).unwrap();
        let h1 = BTreeMap::from([(w("0"), w("0")), (w("1"), w("1"))]);
        let h2 = BTreeMap::from([(w("00"), w("00")), (w("01"), w("11")), (w("10"), w("10")), (w("11"), w("01"))]);
        let code = PrefixCode::Table { maps: vec![h1, h2] };
        assert!(extend_to_otw(&code, &p, &p, &w("0")).is_err());
    }
}
