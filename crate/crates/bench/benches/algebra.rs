use criterion::{black_box, criterion_group, criterion_main, Criterion};
use subshift_core::dynamics::{satisfies_condition_l, singleton_detector};
use subshift_core::ktheory::{flat, smith_normal_form, truncated_k, Matrix};
use subshift_core::presentations::SoficPresentation;
use subshift_core::syntax::parse_word;
use subshift_core::{corpus, Presentation, Term};

fn snf(c: &mut Criterion) {
    // I − Aᵗ of a 12-cycle with chords: dense enough to exercise pivoting.
    let n = 12;
    let rows: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i128::from(i == j) - i128::from((j + 1) % n == i) - i128::from((j * 5 + 3) % n == i))
                .collect()
        })
        .collect();
    let m = Matrix::from_rows(&rows);
    c.bench_function("snf_12x12", |b| b.iter(|| smith_normal_form(black_box(&m)).unwrap()));
}

fn sofic_sets(c: &mut Criterion) {
    let p = corpus::even_shift();
    let w = |s: &str| parse_word(&p, s).unwrap();
    let t = Term::and(
        Term::or(Term::follower(w("1")), Term::c(w("0 1"), w("1 1"))),
        Term::not(Term::cylinder(w("1 0"))),
    );
    c.bench_function("sofic_eval_term", |b| b.iter(|| p.eval(black_box(&t)).unwrap()));
    let Presentation::Sofic(s) = &p else { unreachable!() };
    c.bench_function("sofic_truncated_k", |b| b.iter(|| truncated_k(black_box(s), 5, 4000).unwrap()));
}

fn flat_k(c: &mut Criterion) {
    let p = corpus::tripla_flat();
    c.bench_function("flat_k_groups_tripla", |b| b.iter(|| flat::k_groups(black_box(&p)).unwrap()));
    let q = corpus::chuva_flat();
    c.bench_function("flat_k_groups_chuva", |b| b.iter(|| flat::k_groups(black_box(&q)).unwrap()));
}

fn condition_l(c: &mut Criterion) {
    let p = corpus::chuva();
    c.bench_function("condition_l_chuva", |b| b.iter(|| satisfies_condition_l(black_box(&p), 4096).unwrap()));
    let g = corpus::golden_mean();
    c.bench_function("detector_golden_mean", |b| b.iter(|| singleton_detector(black_box(&g), 3).unwrap()));
}

fn minimization(c: &mut Criterion) {
    let data = match corpus::full_shift(3) {
        Presentation::Sofic(s) => s.data(),
        Presentation::Flat(_) => unreachable!(),
    };
    c.bench_function("automaton_from_data", |b| b.iter(|| SoficPresentation::from_data(black_box(data.clone())).unwrap()));
}

criterion_group!(benches, snf, sofic_sets, flat_k, condition_l, minimization);
criterion_main!(benches);
