//! Built-in presentations and random generators used by tests and suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::presentations::{
    EdgeFamily, FlatPresentation, LetterFamily, ParametricGraph, PointFamily, Presentation, SchemaLetter,
    SoficPresentation,
};
use crate::setalg::Term;
use crate::symbolic::{Letter, PointTemplate, Word};
use crate::syntax;

fn letters(names: &[&str]) -> Vec<Letter> {
    names.iter().map(|n| Letter::concrete(*n)).collect()
}

fn word(names: &[&str]) -> Word {
    Word(letters(names))
}

pub fn point(p: &Presentation, s: &str) -> PointTemplate {
    syntax::parse_point(p, s).expect("corpus point")
}

pub fn full_shift(n: usize) -> Presentation {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let alphabet = names.iter().map(|s| Letter::concrete(s.clone())).collect();
    Presentation::Sofic(SoficPresentation::from_forbidden(alphabet, &[]).expect("full shift"))
}

pub fn golden_mean() -> Presentation {
    Presentation::Sofic(
        SoficPresentation::from_forbidden(letters(&["0", "1"]), &[word(&["1", "1"])]).expect("golden mean"),
    )
}

/// `X = {0^∞}`.
pub fn fixed_point() -> Presentation {
    Presentation::Sofic(SoficPresentation::from_forbidden(letters(&["0"]), &[]).expect("fixed point"))
}

/// Blocks of 1s between 0s have even length; strictly sofic.
pub fn even_shift() -> Presentation {
    let delta = vec![
        vec![Some(1), Some(0)],
        vec![Some(1), Some(2)],
        vec![None, Some(1)],
    ];
    Presentation::Sofic(
        SoficPresentation::from_automaton(letters(&["0", "1"]), delta, Some(0)).expect("even shift"),
    )
}

/// Vertices `v1, v2, v3`; families `a_n: v1 → v3`, `b_n: v2 → v3`; loop `c` at `v3`.
pub fn chuva_graph() -> ParametricGraph {
    ParametricGraph::new(
        vec!["v1".into(), "v2".into(), "v3".into()],
        vec![crate::presentations::Edge { name: "c".into(), src: 2, dst: 2 }],
        vec![
            EdgeFamily { name: "a".into(), src: 0, dst: 2, start: 0 },
            EdgeFamily { name: "b".into(), src: 1, dst: 2, start: 0 },
        ],
    )
    .expect("chuva graph")
}

pub fn chuva_flat() -> FlatPresentation {
    match chuva_graph().to_edge_subshift().expect("chuva subshift") {
        Presentation::Flat(p) => p,
        Presentation::Sofic(_) => unreachable!("edge families give a flat presentation"),
    }
}

pub fn chuva() -> Presentation {
    Presentation::Flat(chuva_flat())
}

/// Alphabet `ℕ`, allowed 3-blocks `(0,j,0)` and `(j,0,j)` for `j ≥ 0`
/// (the block `000` is the case `j = 0`):
/// `X = {0^∞} ∪ {(0j)^∞} ∪ {(j0)^∞}`, `j ≥ 1`.
pub fn tripla_flat() -> FlatPresentation {
    let zero = Letter::concrete("0");
    let j = Letter::param("");
    let sc = || SchemaLetter::Concrete("0".into());
    let sv = || SchemaLetter::Var(String::new());
    FlatPresentation::new(
        vec!["0".into()],
        vec![LetterFamily { name: String::new(), start: 1 }],
        vec![vec![sc(), sc(), sc()], vec![sc(), sv(), sc()], vec![sv(), sc(), sv()]],
        vec![PointTemplate::periodic(Word(vec![zero.clone()])).expect("0^∞")],
        vec![
            PointFamily {
                name: "B".into(),
                template: PointTemplate::periodic(Word(vec![zero.clone(), j.clone()])).expect("(0j)^∞"),
                start: 1,
            },
            PointFamily {
                name: "C".into(),
                template: PointTemplate::periodic(Word(vec![j, zero])).expect("(j0)^∞"),
                start: 1,
            },
        ],
    )
    .expect("tripla")
}

pub fn tripla() -> Presentation {
    Presentation::Flat(tripla_flat())
}

/// A nonempty subshift over 2–3 letters with 1–3 forbidden words of length
/// at most 3.
pub fn random_sft(rng: &mut ChaCha8Rng) -> Presentation {
    loop {
        let k = rng.gen_range(2..=3);
        let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        let alphabet: Vec<Letter> = names.iter().map(|s| Letter::concrete(s.clone())).collect();
        let nf = rng.gen_range(1..=3);
        let forbidden: Vec<Word> = (0..nf)
            .map(|_| {
                let len = rng.gen_range(1..=3);
                Word((0..len).map(|_| alphabet[rng.gen_range(0..k)].clone()).collect())
            })
            .collect();
        let p = SoficPresentation::from_forbidden(alphabet, &forbidden).expect("random sft");
        if !p.is_empty() {
            return Presentation::Sofic(p);
        }
    }
}

/// A random Boolean term over generators `C(α,β)` with `|α|, |β| ≤ 2`.
pub fn random_term(p: &Presentation, rng: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        let pick = |rng: &mut ChaCha8Rng| {
            let words = p.language(rng.gen_range(0..=2));
            if words.is_empty() {
                Word::empty()
            } else {
                words[rng.gen_range(0..words.len())].clone()
            }
        };
        return match rng.gen_range(0..20) {
            0 => Term::Full,
            1 => Term::Empty,
            _ => Term::c(pick(rng), pick(rng)),
        };
    }
    match rng.gen_range(0..3) {
        0 => Term::not(random_term(p, rng, depth - 1)),
        1 => Term::and(random_term(p, rng, depth - 1), random_term(p, rng, depth - 1)),
        _ => Term::or(random_term(p, rng, depth - 1), random_term(p, rng, depth - 1)),
    }
}

/// A finite graph on 1–5 vertices without sinks; every vertex emits one or
/// two edges and parallel multiplicity stays at most 3.
pub fn random_graph(rng: &mut ChaCha8Rng) -> ParametricGraph {
    let n = rng.gen_range(1..=5);
    let mut edges = Vec::new();
    for v in 0..n {
        let out = rng.gen_range(1..=2);
        for _ in 0..out {
            edges.push((v, rng.gen_range(0..n)));
        }
    }
    ParametricGraph::finite(n, &edges).expect("random graph")
}

/// Named presentations used throughout the suites.
pub fn named() -> Vec<(&'static str, Presentation)> {
    vec![
        ("fixed-point", fixed_point()),
        ("full-2-shift", full_shift(2)),
        ("full-3-shift", full_shift(3)),
        ("golden-mean", golden_mean()),
        ("even-shift", even_shift()),
        ("chuva", chuva()),
        ("tripla", tripla()),
    ]
}
