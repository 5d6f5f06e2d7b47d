//! Algebraic invariants over random presentations, terms and matrices.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subshift_core::dynamics::{satisfies_condition_l, singleton_detector, verify_l_witness, LVerdict};
use subshift_core::ktheory::{smith_normal_form, AbGroupInvariants, Matrix};
use subshift_core::{corpus, PointTemplate, Presentation, Term, Word};

fn presentation(seed: u64) -> Presentation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let named = corpus::named();
    let i = rng.gen_range(0..named.len() + 4);
    match named.into_iter().nth(i) {
        Some((_, p)) => p,
        None => corpus::random_sft(&mut rng),
    }
}

fn sample(p: &Presentation) -> Vec<PointTemplate> {
    p.sample_points(4)
}

fn words(p: &Presentation) -> Vec<Word> {
    (0..=2).flat_map(|n| p.language(n)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_is_a_boolean_homomorphism(seed in any::<u64>(), tseed in any::<u64>()) {
        let p = presentation(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(tseed);
        let t = corpus::random_term(&p, &mut rng, 3);
        let a = p.eval(&t).unwrap();
        for x in sample(&p) {
            prop_assert_eq!(p.contains_point(&a, &x).unwrap(), t.holds_at(&p, &x), "{} at {}", t, x);
        }
    }

    #[test]
    fn equality_is_empty_symmetric_difference(seed in any::<u64>(), tseed in any::<u64>()) {
        let p = presentation(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(tseed);
        let s = corpus::random_term(&p, &mut rng, 2);
        let t = corpus::random_term(&p, &mut rng, 2);
        let (a, b) = (p.eval(&s).unwrap(), p.eval(&t).unwrap());
        let eq = p.equals(&a, &b).unwrap();
        prop_assert_eq!(eq, p.is_empty(&p.sym_diff(&a, &b).unwrap()));
        // De Morgan rewriting lands on the same normal form.
        let dm = p.eval(&Term::not(Term::or(Term::not(s.clone()), Term::not(t.clone())))).unwrap();
        prop_assert!(p.equals(&dm, &p.intersect(&a, &b).unwrap()).unwrap());
        prop_assert_eq!(p.union(&a, &p.complement(&a).unwrap()).unwrap(), p.full());
    }

    #[test]
    fn relative_ranges_compose(seed in any::<u64>(), tseed in any::<u64>()) {
        let p = presentation(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(tseed);
        let a = p.eval(&corpus::random_term(&p, &mut rng, 3)).unwrap();
        let ws = words(&p);
        let alpha = &ws[rng.gen_range(0..ws.len())];
        let beta = &ws[rng.gen_range(0..ws.len())];
        let lhs = p.relative_range(&p.relative_range(&a, alpha).unwrap(), beta).unwrap();
        let rhs = p.relative_range(&a, &alpha.concat(beta)).unwrap();
        prop_assert!(p.equals(&lhs, &rhs).unwrap());
        // Pointwise: y ∈ r(A, α) iff αy ∈ A.
        let r = p.relative_range(&a, alpha).unwrap();
        for y in sample(&p) {
            let ay = y.prepend(alpha);
            let inside = p.member(&ay) && p.contains_point(&a, &ay).unwrap();
            prop_assert_eq!(p.contains_point(&r, &y).unwrap(), inside);
        }
    }

    #[test]
    fn condition_l_matches_the_detector(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = corpus::random_sft(&mut rng);
        let det = singleton_detector(&p, 3).unwrap();
        prop_assert!(det.decided);
        match satisfies_condition_l(&p, 4096).unwrap() {
            LVerdict::Holds => prop_assert!(det.singletons.is_empty()),
            LVerdict::Fails(w) => {
                prop_assert!(!det.singletons.is_empty());
                prop_assert!(verify_l_witness(&p, &w).unwrap());
            }
            LVerdict::Undecided(why) => prop_assert!(false, "undecided: {}", why),
        }
    }

    #[test]
    fn smith_diagonal_matches_determinantal_divisors(entries in prop::collection::vec(-6i128..=6, 9)) {
        let rows: Vec<Vec<i128>> = entries.chunks(3).map(<[i128]>::to_vec).collect();
        let m = Matrix::from_rows(&rows);
        let s = smith_normal_form(&m).unwrap();
        let mut prefix = 1i128;
        for k in 1..=3 {
            prefix *= s.diag[k - 1];
            prop_assert_eq!(prefix.abs(), determinantal_divisor(&rows, k));
        }
        prop_assert_eq!(s.left.mul(&m).unwrap().mul(&s.right).unwrap(), s.d_matrix());
    }

    #[test]
    fn canonical_groups_are_idempotent(r in 0u64..4, t in prop::collection::vec(2u64..40, 0..3), fam in 0u64..3) {
        let g = AbGroupInvariants { free_rank: r, torsion: t, family_free_mult: fam, family_torsion: vec![] };
        let c = g.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(g.iso(&c));
        prop_assert!(g.sum(&AbGroupInvariants::default()).iso(&g));
    }

    #[test]
    fn point_templates_are_canonical(pre in prop::collection::vec(0u8..2, 0..4), per in prop::collection::vec(0u8..2, 1..4), k in 1usize..4) {
        let p = corpus::full_shift(2);
        let w = |v: &[u8]| subshift_core::syntax::parse_word(&p, &v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")).unwrap();
        let x = PointTemplate::new(w(&pre), w(&per)).unwrap();
        let rep: Vec<u8> = per.iter().copied().cycle().take(per.len() * k).collect();
        let y = PointTemplate::new(w(&pre), w(&rep)).unwrap();
        prop_assert_eq!(&x, &y);
        let mut longer = pre.clone();
        longer.extend(&per);
        let z = PointTemplate::new(w(&longer), w(&per)).unwrap();
        prop_assert_eq!(&x, &z);
        for n in 0..8 {
            prop_assert_eq!(x.prefix(n), y.prefix(n));
        }
    }
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| *v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// gcd of all `k × k` minors.
fn determinantal_divisor(m: &[Vec<i128>], k: usize) -> i128 {
    let mut g = 0i128;
    for rs in subsets(m.len(), k) {
        for cs in subsets(m[0].len(), k) {
            let minor: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
            g = num_integer::Integer::gcd(&g, &det(&minor));
        }
    }
    g
}
