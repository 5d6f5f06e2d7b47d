//! The representation on `ℓ²(X)`: `S_a δ_x = δ_{ax}` when `ax ∈ X`,
//! `P_A δ_x = [x ∈ A] δ_x`, on finitely supported vectors over `ℤ[i]`.
//!
//! `P_A` is evaluated from the definition of the generators (`Term::holds_at`),
//! not through the set algebra, so agreement between the two is a check.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::presentations::Presentation;
use crate::setalg::Term;
use crate::symbolic::{Letter, PointTemplate, Word};

pub type Coeff = Complex<i64>;

/// Finite `ℤ[i]`-combination of basis vectors; zero coefficients are pruned.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalVector(BTreeMap<PointTemplate, Coeff>);

impl FormalVector {
    pub fn zero() -> FormalVector {
        FormalVector::default()
    }

    pub fn basis(x: PointTemplate) -> FormalVector {
        FormalVector(BTreeMap::from([(x, Complex::new(1, 0))]))
    }

    pub fn add_term(&mut self, x: PointTemplate, c: Coeff) {
        let e = self.0.entry(x.clone()).or_insert(Complex::new(0, 0));
        *e += c;
        if *e == Complex::new(0, 0) {
            self.0.remove(&x);
        }
    }

    pub fn add(&self, other: &FormalVector) -> FormalVector {
        let mut out = self.clone();
        for (x, c) in &other.0 {
            out.add_term(x.clone(), *c);
        }
        out
    }

    pub fn scale(&self, c: Coeff) -> FormalVector {
        let mut out = FormalVector::zero();
        for (x, d) in &self.0 {
            out.add_term(x.clone(), c * d);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, x: &PointTemplate) -> Coeff {
        self.0.get(x).copied().unwrap_or(Complex::new(0, 0))
    }

    pub fn support(&self) -> impl Iterator<Item = &PointTemplate> {
        self.0.keys()
    }

    /// `⟨u, v⟩ = Σ u_x · conj(v_x)`.
    pub fn inner(&self, other: &FormalVector) -> Coeff {
        self.0.iter().map(|(x, c)| c * other.coeff(x).conj()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gen {
    S(Letter),
    SStar(Letter),
    P(Term),
    One,
}

/// A formal product; the rightmost generator acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpWord(pub Vec<Gen>);

impl OpWord {
    pub fn s(alpha: &Word) -> OpWord {
        OpWord(alpha.letters().iter().map(|a| Gen::S(a.clone())).collect())
    }

    /// `s_α* = s_{α_n}* ⋯ s_{α_1}*`.
    pub fn s_star(alpha: &Word) -> OpWord {
        OpWord(alpha.letters().iter().rev().map(|a| Gen::SStar(a.clone())).collect())
    }

    pub fn p(t: Term) -> OpWord {
        OpWord(vec![Gen::P(t)])
    }

    pub fn then(mut self, other: OpWord) -> OpWord {
        self.0.extend(other.0);
        self
    }

    /// `#s − #s*`.
    pub fn gauge_degree(&self) -> i64 {
        self.0
            .iter()
            .map(|g| match g {
                Gen::S(_) => 1,
                Gen::SStar(_) => -1,
                _ => 0,
            })
            .sum()
    }
}

pub struct OperatorModel<'a> {
    p: &'a Presentation,
}

impl<'a> OperatorModel<'a> {
    pub fn new(p: &'a Presentation) -> OperatorModel<'a> {
        OperatorModel { p }
    }

    fn gen_at(&self, g: &Gen, x: &PointTemplate) -> Option<PointTemplate> {
        match g {
            Gen::S(a) => {
                let y = x.prepend(&Word(vec![a.clone()]));
                self.p.member(&y).then_some(y)
            }
            Gen::SStar(a) => x.strip(&Word(vec![a.clone()])),
            Gen::P(t) => t.holds_at(self.p, x).then(|| x.clone()),
            Gen::One => Some(x.clone()),
        }
    }

    /// Image of `δ_x`, which is a basis vector or zero.
    pub fn apply_basis(&self, w: &OpWord, x: &PointTemplate) -> Option<PointTemplate> {
        if !self.p.member(x) {
            return None;
        }
        w.0.iter().rev().try_fold(x.clone(), |y, g| self.gen_at(g, &y))
    }

    pub fn apply(&self, w: &OpWord, v: &FormalVector) -> FormalVector {
        let mut out = FormalVector::zero();
        for (x, c) in &v.0 {
            if let Some(y) = self.apply_basis(w, x) {
                out.add_term(y, *c);
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckReport {
    pub checks: usize,
    pub failed: usize,
    /// The first few counterexamples.
    pub failures: Vec<String>,
}

impl CheckReport {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 20 {
                self.failures.push(what());
            }
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < 20 {
                self.failures.push(f);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

fn sum(m: &OperatorModel, words: &[&OpWord], x: &PointTemplate) -> FormalVector {
    let d = FormalVector::basis(x.clone());
    words.iter().fold(FormalVector::zero(), |acc, w| acc.add(&m.apply(w, &d)))
}

/// Relations (i) on pairs of terms and relation (ii) on pairs of words, at
/// every sample point.
pub fn check_defining_relations(
    p: &Presentation,
    points: &[PointTemplate],
    words: &[Word],
    terms: &[Term],
) -> CheckReport {
    let m = OperatorModel::new(p);
    let mut r = CheckReport::default();
    for x in points {
        let d = FormalVector::basis(x.clone());
        r.record(m.apply(&OpWord::p(Term::Full), &d) == d, || format!("P_X δ_{x} ≠ δ_{x}"));
        r.record(m.apply(&OpWord::p(Term::Empty), &d).is_zero(), || format!("P_∅ δ_{x} ≠ 0"));
        for (i, a) in terms.iter().enumerate() {
            for b in &terms[i..] {
                let pa = OpWord::p(a.clone());
                let pb = OpWord::p(b.clone());
                let meet = OpWord::p(Term::and(a.clone(), b.clone()));
                let join = OpWord::p(Term::or(a.clone(), b.clone()));
                r.record(m.apply(&meet, &d) == m.apply(&pa.clone().then(pb.clone()), &d), || {
                    format!("P_(A∩B) ≠ P_A P_B at {x} for A = {a}, B = {b}")
                });
                r.record(sum(&m, &[&join, &meet], x) == sum(&m, &[&pa, &pb], x), || {
                    format!("P_(A∪B) + P_(A∩B) ≠ P_A + P_B at {x} for A = {a}, B = {b}")
                });
            }
        }
        for alpha in words {
            for beta in words {
                let lhs = OpWord::s(beta)
                    .then(OpWord::s_star(alpha))
                    .then(OpWord::s(alpha))
                    .then(OpWord::s_star(beta));
                let rhs = OpWord::p(Term::c(alpha.clone(), beta.clone()));
                r.record(m.apply(&lhs, &d) == m.apply(&rhs, &d), || {
                    format!("s_β s_α* s_α s_β* ≠ p_C(α,β) at x = {x}, α = {alpha}, β = {beta}")
                });
            }
        }
    }
    r
}

/// `s_a* s_b = δ_{a,b} p_{F_a}`, the two commutations, `s_α s_β = 0` for
/// `αβ ∉ L_X`, and `S_a S_a* S_a = S_a`.
pub fn check_identities(p: &Presentation, points: &[PointTemplate], words: &[Word]) -> CheckReport {
    let m = OperatorModel::new(p);
    let mut r = CheckReport::default();
    let letters = p.letters();
    for x in points {
        let d = FormalVector::basis(x.clone());
        for a in &letters {
            let wa = Word(vec![a.clone()]);
            for b in &letters {
                let lhs = m.apply(&OpWord::s_star(&wa).then(OpWord::s(&Word(vec![b.clone()]))), &d);
                let rhs = if a == b { m.apply(&OpWord::p(Term::follower(wa.clone())), &d) } else { FormalVector::zero() };
                r.record(lhs == rhs, || format!("s_{a}* s_{b} δ_{x} wrong"));
            }
            let sa = OpWord::s(&wa);
            let pi = sa.clone().then(OpWord::s_star(&wa)).then(sa.clone());
            r.record(m.apply(&pi, &d) == m.apply(&sa, &d), || format!("S_{a} S_{a}* S_{a} ≠ S_{a} at {x}"));
        }
        for alpha in words {
            let src = OpWord::s_star(alpha).then(OpWord::s(alpha));
            for beta in words {
                let src_b = OpWord::s_star(beta).then(OpWord::s(beta));
                let rng_b = OpWord::s(beta).then(OpWord::s_star(beta));
                r.record(
                    m.apply(&src.clone().then(src_b.clone()), &d) == m.apply(&src_b.clone().then(src.clone()), &d),
                    || format!("s_α*s_α and s_β*s_β do not commute at {x}, α = {alpha}, β = {beta}"),
                );
                r.record(
                    m.apply(&src.clone().then(rng_b.clone()), &d) == m.apply(&rng_b.then(src.clone()), &d),
                    || format!("s_α*s_α and s_β s_β* do not commute at {x}, α = {alpha}, β = {beta}"),
                );
                if !p.in_language(&alpha.concat(beta)) {
                    r.record(m.apply(&OpWord::s(alpha).then(OpWord::s(beta)), &d).is_zero(), || {
                        format!("s_α s_β ≠ 0 at {x} with αβ = {} outside the language", alpha.concat(beta))
                    });
                }
            }
        }
    }
    r
}

/// `⟨S_a u, v⟩ = ⟨u, S_a* v⟩` for Gaussian-integer vectors supported on the
/// sample.
pub fn check_adjoints(p: &Presentation, points: &[PointTemplate], rng: &mut ChaCha8Rng, trials: usize) -> CheckReport {
    let m = OperatorModel::new(p);
    let mut r = CheckReport::default();
    if points.is_empty() {
        return r;
    }
    let random_vector = |rng: &mut ChaCha8Rng| {
        let mut v = FormalVector::zero();
        for _ in 0..rng.gen_range(1..=6) {
            let x = points[rng.gen_range(0..points.len())].clone();
            v.add_term(x, Complex::new(rng.gen_range(-5..=5), rng.gen_range(-5..=5)));
        }
        v
    };
    let letters = p.letters();
    for _ in 0..trials {
        let u = random_vector(rng);
        let v = random_vector(rng);
        for a in &letters {
            let w = Word(vec![a.clone()]);
            let lhs = m.apply(&OpWord::s(&w), &u).inner(&v);
            let rhs = u.inner(&m.apply(&OpWord::s_star(&w), &v));
            r.record(lhs == rhs, || format!("adjoint mismatch for s_{a}"));
        }
    }
    r
}

/// For monomials `s_α p_A s_β*`: degree `|α| − |β|`, and every nonzero image
/// of `δ_{βy}` is `δ_{αy}`.
pub fn check_gauge(p: &Presentation, points: &[PointTemplate], words: &[Word], terms: &[Term]) -> CheckReport {
    let m = OperatorModel::new(p);
    let mut r = CheckReport::default();
    for alpha in words {
        for beta in words {
            for t in terms {
                let w = OpWord::s(alpha).then(OpWord::p(t.clone())).then(OpWord::s_star(beta));
                let deg = alpha.len() as i64 - beta.len() as i64;
                r.record(w.gauge_degree() == deg, || format!("degree of s_{alpha} p s_{beta}* ≠ {deg}"));
                for x in points {
                    if let Some(z) = m.apply_basis(&w, x) {
                        r.record(z.strip(alpha).is_some() && z.strip(alpha) == x.strip(beta), || {
                            format!("s_{alpha} p_{t} s_{beta}* moves {x} to {z}")
                        });
                    }
                }
            }
        }
    }
    r
}

/// `P_{eval(T)} δ_x = [x ∈ eval(T)] δ_x` with the left side from the
/// operator model and the right from the set algebra.
pub fn check_term_agreement(p: &Presentation, points: &[PointTemplate], terms: &[Term]) -> Result<CheckReport> {
    let m = OperatorModel::new(p);
    let mut r = CheckReport::default();
    for t in terms {
        let set = p.eval(t)?;
        for x in points {
            let d = FormalVector::basis(x.clone());
            let lhs = m.apply(&OpWord::p(t.clone()), &d);
            let rhs = if p.contains_point(&set, x)? { d } else { FormalVector::zero() };
            r.record(lhs == rhs, || format!("P_{t} δ_{x} disagrees with the set algebra"));
        }
    }
    Ok(r)
}

/// Every nonempty term has a sample point `x` with `P_A δ_x = δ_x`; the
/// sample is deepened up to `max_depth` for terms it misses.
pub fn check_nonvanishing(p: &Presentation, terms: &[Term], depth: usize, max_depth: usize) -> Result<CheckReport> {
    let m = OperatorModel::new(p);
    let mut r = CheckReport::default();
    let mut samples: BTreeMap<usize, Vec<PointTemplate>> = BTreeMap::new();
    for t in terms {
        if p.is_empty(&p.eval(t)?) {
            continue;
        }
        let w = OpWord::p(t.clone());
        let mut found = false;
        for d in depth..=max_depth {
            let pts = samples.entry(d).or_insert_with(|| p.sample_points(d));
            if pts.iter().any(|x| m.apply_basis(&w, x).as_ref() == Some(x)) {
                found = true;
                break;
            }
            if !p.finite_alphabet() {
                break;
            }
        }
        r.record(found, || format!("no sample point witnesses P_{t} ≠ 0"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::syntax::parse_word;
    use rand::SeedableRng;

    #[test]
    fn chuva_examples() {
        let p = corpus::chuva();
        let m = OperatorModel::new(&p);
        let cinf = corpus::point(&p, "(c)");
        let c = parse_word(&p, "c").unwrap();
        assert_eq!(m.apply_basis(&OpWord::s(&c), &cinf), Some(cinf.clone()));
        let a3 = parse_word(&p, "a_3").unwrap();
        assert_eq!(m.apply_basis(&OpWord::s_star(&a3), &corpus::point(&p, "b_3 (c)")), None);
        assert!(m.apply(&OpWord::p(Term::Empty), &FormalVector::basis(cinf)).is_zero());
    }

    #[test]
    fn golden_mean_forbidden_product_vanishes() {
        let p = corpus::golden_mean();
        let m = OperatorModel::new(&p);
        let one = parse_word(&p, "1").unwrap();
        for x in p.sample_points(4) {
            assert!(m.apply_basis(&OpWord::s(&one).then(OpWord::s(&one)), &x).is_none());
        }
    }

    #[test]
    fn degrees_add() {
        let p = corpus::full_shift(3);
        let w = |s: &str| parse_word(&p, s).unwrap();
        assert_eq!(OpWord::s(&w("01")).then(OpWord::s_star(&w("2"))).gauge_degree(), 1);
        assert_eq!(OpWord::p(Term::Full).gauge_degree(), 0);
    }

    #[test]
    fn relations_hold_on_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (name, p) in corpus::named() {
            let pts = p.sample_points(3);
            let words: Vec<Word> = (0..=2).flat_map(|n| p.language(n)).take(12).collect();
            let terms: Vec<Term> = (0..6).map(|_| corpus::random_term(&p, &mut rng, 2)).collect();
            let mut r = check_defining_relations(&p, &pts, &words, &terms);
            r.merge(check_identities(&p, &pts, &words));
            r.merge(check_adjoints(&p, &pts, &mut rng, 10));
            r.merge(check_gauge(&p, &pts, &words[..4.min(words.len())], &terms));
            r.merge(check_term_agreement(&p, &pts, &terms).unwrap());
            r.merge(check_nonvanishing(&p, &terms, 3, 6).unwrap());
            assert!(r.passed(), "{name}: {:?}", r.failures);
            assert!(r.checks > 100);
        }
    }
}
