use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subshift_core::corpus;
use subshift_core::ktheory::{graph_k_oracle, smith_normal_form, truncated_k, Matrix};
use subshift_core::Presentation;

#[test]
fn random_graphs_match_vertex_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..25 {
        let g = corpus::random_graph(&mut rng);
        let oracle = graph_k_oracle(&g).unwrap();
        let Presentation::Sofic(s) = g.to_edge_subshift().unwrap() else { panic!("finite graph") };
        let t = truncated_k(&s, 4, 400).unwrap();
        let stable = t.stable().unwrap_or_else(|| panic!("graph {i} did not stabilize: {:?}", t.stages));
        assert!(
            stable.k0.iso(&oracle.k0) && stable.k1.iso(&oracle.k1),
            "graph {i} {:?}: stages {:?} oracle {:?}",
            g,
            t.stages,
            oracle
        );
    }
}

#[test]
fn frozen_smith_forms() {
    // Values computed by hand: gcd of entries, then det / d1.
    let m = Matrix::from_rows(&[vec![4, 6], vec![6, 9]]);
    assert_eq!(smith_normal_form(&m).unwrap().diag, vec![1, 0]);
    let m = Matrix::from_rows(&[vec![6, 0, 0], vec![0, 10, 0], vec![0, 0, 15]]);
    assert_eq!(smith_normal_form(&m).unwrap().diag, vec![1, 30, 30]);
}
