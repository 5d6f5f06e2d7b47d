//! Vertex-matrix K-theory of graphs, used only as an independent oracle.
//!
//! For a graph with regular vertices `R` (finitely and positively many
//! outgoing edges) the groups are the cokernel and kernel of
//! `ℤ^R → ℤ^V, e_v ↦ e_v − Σ_{s(e)=v} e_{r(e)}`. For finite graphs without
//! sinks every vertex is regular and this is `I − Aᵗ`.

use crate::error::{Error, Result};
use crate::ktheory::groups::AbGroupInvariants;
use crate::ktheory::snf::{smith_normal_form, Matrix};
use crate::presentations::graphs::ParametricGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphK {
    pub k0: AbGroupInvariants,
    pub k1: AbGroupInvariants,
}

fn vertex_map(g: &ParametricGraph) -> (Matrix, Vec<usize>) {
    let n = g.vertices.len();
    let mut out_deg = vec![0usize; n];
    let mut infinite = vec![false; n];
    for e in &g.edges {
        out_deg[e.src] += 1;
    }
    for f in &g.families {
        infinite[f.src] = true;
    }
    let regular: Vec<usize> = (0..n).filter(|&v| out_deg[v] > 0 && !infinite[v]).collect();
    let cols: Vec<Vec<i128>> = regular
        .iter()
        .map(|&v| {
            let mut c = vec![0i128; n];
            c[v] += 1;
            for e in g.edges.iter().filter(|e| e.src == v) {
                c[e.dst] -= 1;
            }
            c
        })
        .collect();
    (Matrix::from_cols(n, &cols), regular)
}

fn groups_of(m: &Matrix) -> Result<GraphK> {
    let s = smith_normal_form(m)?;
    Ok(GraphK {
        k0: AbGroupInvariants::finite(s.coker_free_rank() as u64, s.invariant_factors()),
        k1: AbGroupInvariants::free(s.kernel_rank() as u64),
    })
}

/// Oracle for finite graphs without sinks.
pub fn graph_k_oracle(g: &ParametricGraph) -> Result<GraphK> {
    if !g.is_finite() {
        return Err(Error::Unsupported("graph oracle applies to finite graphs only".into()));
    }
    let sinks = g.check_hypotheses().sinks;
    if !sinks.is_empty() {
        return Err(Error::Invalid(format!("graph has sinks: {}", sinks.join(", "))));
    }
    groups_of(&vertex_map(g).0)
}

/// The graph-algebra groups of a graph with edge families (infinite
/// emitters are singular), reported next to the subshift groups.
pub fn graph_algebra_k_reference(g: &ParametricGraph) -> Result<GraphK> {
    groups_of(&vertex_map(g).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn calibration_graphs() {
        let two_loops = ParametricGraph::finite(1, &[(0, 0), (0, 0)]).unwrap();
        let k = graph_k_oracle(&two_loops).unwrap();
        assert!(k.k0.is_trivial() && k.k1.is_trivial());
        let one_loop = ParametricGraph::finite(1, &[(0, 0)]).unwrap();
        let k = graph_k_oracle(&one_loop).unwrap();
        assert_eq!((k.k0.free_rank, k.k1.free_rank), (1, 1));
        let cycle = ParametricGraph::finite(2, &[(0, 1), (1, 0)]).unwrap();
        let k = graph_k_oracle(&cycle).unwrap();
        assert_eq!((k.k0.free_rank, k.k1.free_rank), (1, 1));
        let three = ParametricGraph::finite(1, &[(0, 0), (0, 0), (0, 0), (0, 0)]).unwrap();
        assert_eq!(graph_k_oracle(&three).unwrap().k0.torsion, vec![3]);
    }

    #[test]
    fn rejects_sinks_and_families() {
        let sink = ParametricGraph::finite(2, &[(0, 1)]).unwrap();
        assert!(graph_k_oracle(&sink).is_err());
        assert!(graph_k_oracle(&corpus::chuva_graph()).is_err());
    }

    #[test]
    fn chuva_graph_algebra_reference() {
        let k = graph_algebra_k_reference(&corpus::chuva_graph()).unwrap();
        assert_eq!(k.k0, AbGroupInvariants::free(3));
        assert_eq!(k.k1, AbGroupInvariants::free(1));
    }
}
