//! Edge subshifts of graphs, ultragraphs and Exel–Laca matrices.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::presentations::flat::{FlatPresentation, LetterFamily, PointFamily, SchemaLetter};
use crate::presentations::sofic::SoficPresentation;
use crate::presentations::Presentation;
use crate::symbolic::{Letter, PointTemplate, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// `ℕ`-indexed parallel edges `name_n`, `n ≥ start`, all from `src` to `dst`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFamily {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub start: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub families: Vec<EdgeFamily>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphHypotheses {
    pub sinks: Vec<String>,
    pub infinite_emitting_sources: Vec<String>,
}

impl GraphHypotheses {
    pub fn holds(&self) -> bool {
        self.sinks.is_empty() && self.infinite_emitting_sources.is_empty()
    }
}

impl ParametricGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>, families: Vec<EdgeFamily>) -> Result<Self> {
        let n = vertices.len();
        let mut names = BTreeSet::new();
        for (name, s, d) in edges
            .iter()
            .map(|e| (&e.name, e.src, e.dst))
            .chain(families.iter().map(|f| (&f.name, f.src, f.dst)))
        {
            if s >= n || d >= n {
                return Err(Error::Invalid(format!("edge `{name}` uses an unknown vertex")));
            }
            if !names.insert(name.clone()) {
                return Err(Error::Invalid(format!("edge name `{name}` used twice")));
            }
        }
        Ok(ParametricGraph { vertices, edges, families })
    }

    /// A finite graph given by source/range pairs, edges named `e0, e1, …`.
    pub fn finite(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let vertices = (0..num_vertices).map(|v| format!("v{v}")).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(src, dst))| Edge { name: format!("e{i}"), src, dst })
            .collect();
        ParametricGraph::new(vertices, edges, Vec::new())
    }

    pub fn is_finite(&self) -> bool {
        self.families.is_empty()
    }

    pub fn check_hypotheses(&self) -> GraphHypotheses {
        let n = self.vertices.len();
        let mut out_deg = vec![0usize; n];
        let mut in_deg = vec![0usize; n];
        let mut infinite = vec![false; n];
        for e in &self.edges {
            out_deg[e.src] += 1;
            in_deg[e.dst] += 1;
        }
        for f in &self.families {
            infinite[f.src] = true;
            in_deg[f.dst] += 1;
        }
        let pick = |pred: &dyn Fn(usize) -> bool| -> Vec<String> {
            (0..n).filter(|&v| pred(v)).map(|v| self.vertices[v].clone()).collect()
        };
        GraphHypotheses {
            sinks: pick(&|v| out_deg[v] == 0 && !infinite[v]),
            infinite_emitting_sources: pick(&|v| infinite[v] && in_deg[v] == 0),
        }
    }

    /// Vertex adjacency counts `A[v][w] = |{e : s(e) = v, r(e) = w}|`.
    pub fn adjacency(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_finite() {
            return Err(Error::Unsupported("adjacency matrix of a graph with edge families".into()));
        }
        let n = self.vertices.len();
        let mut a = vec![vec![0i64; n]; n];
        for e in &self.edges {
            a[e.src][e.dst] += 1;
        }
        Ok(a)
    }

    pub fn to_edge_subshift(&self) -> Result<Presentation> {
        if self.is_finite() {
            let alphabet: Vec<Letter> = self.edges.iter().map(|e| Letter::concrete(e.name.clone())).collect();
            let mut forbidden = Vec::new();
            for e in &self.edges {
                for f in &self.edges {
                    if e.dst != f.src {
                        forbidden.push(Word(vec![
                            Letter::concrete(e.name.clone()),
                            Letter::concrete(f.name.clone()),
                        ]));
                    }
                }
            }
            return Ok(Presentation::Sofic(SoficPresentation::from_forbidden(alphabet, &forbidden)?));
        }
        self.to_flat().map(Presentation::Flat)
    }

    fn to_flat(&self) -> Result<FlatPresentation> {
        let n = self.vertices.len();
        // (letter, src, dst, is_family)
        let mut arcs: Vec<(Letter, usize, usize, bool)> = self
            .edges
            .iter()
            .map(|e| (Letter::concrete(e.name.clone()), e.src, e.dst, false))
            .collect();
        arcs.extend(self.families.iter().map(|f| (Letter::param(f.name.clone()), f.src, f.dst, true)));

        let reach = reachability(n, &arcs);
        let on_cycle: Vec<bool> = (0..n).map(|v| reach[v][v]).collect();
        for v in 0..n {
            if !on_cycle[v] {
                continue;
            }
            let out: Vec<_> = arcs.iter().filter(|a| a.1 == v).collect();
            let internal: Vec<_> = out.iter().filter(|a| reach[a.2][v]).collect();
            if internal.iter().any(|a| a.3) {
                return Err(Error::Unsupported(format!(
                    "an edge family lies on a cycle through `{}`; the edge subshift is uncountable",
                    self.vertices[v]
                )));
            }
            if internal.len() != 1 {
                return Err(Error::Unsupported(format!(
                    "vertex `{}` lies on two distinct cycles; the edge subshift is uncountable",
                    self.vertices[v]
                )));
            }
            if out.len() != 1 {
                return Err(Error::Unsupported(format!(
                    "cycle through `{}` has an exit; tails are not single-parameter families",
                    self.vertices[v]
                )));
            }
        }
        let live: Vec<bool> = (0..n).map(|v| (0..n).any(|w| on_cycle[w] && (v == w || reach[v][w]))).collect();

        let cycle_word = |v: usize| -> Word {
            let mut w = Vec::new();
            let mut u = v;
            loop {
                let a = arcs.iter().find(|a| a.1 == u).expect("cycle vertex has an out-edge");
                w.push(a.0.clone());
                u = a.2;
                if u == v {
                    return Word(w);
                }
            }
        };

        let mut explicit = BTreeSet::new();
        let mut families: Vec<PointFamily> = Vec::new();
        for v in (0..n).filter(|&v| live[v]) {
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(v, Vec::new())];
            while let Some((u, path)) = stack.pop() {
                if on_cycle[u] {
                    let pre = Word(path.iter().map(|&i| arcs[i].0.clone()).collect());
                    let t = PointTemplate::new(pre, cycle_word(u)).expect("nonempty cycle");
                    let fam: Vec<usize> = path.iter().copied().filter(|&i| arcs[i].3).collect();
                    match fam.as_slice() {
                        [] => {
                            explicit.insert(t);
                        }
                        [i] => {
                            let start = self.families[*i - self.edges.len()].start;
                            if !families.iter().any(|f| f.template == t) {
                                families.push(PointFamily { name: t.to_string(), template: t, start });
                            }
                        }
                        _ => {
                            return Err(Error::Unsupported(
                                "a path crosses two edge families; points need two parameters".into(),
                            ))
                        }
                    }
                    continue;
                }
                for (i, a) in arcs.iter().enumerate() {
                    if a.1 == u && live[a.2] {
                        let mut p = path.clone();
                        p.push(i);
                        stack.push((a.2, p));
                    }
                }
            }
        }
        families.sort_by(|a, b| a.template.cmp(&b.template));

        let mut schemas = Vec::new();
        for e in arcs.iter().filter(|a| live[a.2]) {
            for f in arcs.iter().filter(|a| live[a.2] && a.1 == e.2) {
                if e.3 && f.3 {
                    return Err(Error::Unsupported(
                        "consecutive edge families need two parameters".into(),
                    ));
                }
                schemas.push(vec![schema_letter(&e.0), schema_letter(&f.0)]);
            }
        }
        let concrete = self.edges.iter().map(|e| e.name.clone()).collect();
        let letter_families = self
            .families
            .iter()
            .map(|f| LetterFamily { name: f.name.clone(), start: f.start })
            .collect();
        FlatPresentation::new(concrete, letter_families, schemas, explicit.into_iter().collect(), families)
    }
}

fn schema_letter(a: &Letter) -> SchemaLetter {
    match a {
        Letter::Concrete(n) => SchemaLetter::Concrete(n.clone()),
        Letter::Member { family, .. } => SchemaLetter::Var(family.clone()),
    }
}

/// `reach[v][w]`: a path of length ≥ 1 leads from `v` to `w`.
fn reachability(n: usize, arcs: &[(Letter, usize, usize, bool)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for a in arcs {
        reach[a.1][a.2] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltraEdge {
    pub name: String,
    pub src: usize,
    pub range: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ultragraph {
    pub vertices: Vec<String>,
    pub edges: Vec<UltraEdge>,
}

impl Ultragraph {
    pub fn new(vertices: Vec<String>, edges: Vec<UltraEdge>) -> Result<Self> {
        for e in &edges {
            if e.src >= vertices.len() || e.range.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Invalid(format!("edge `{}` uses an unknown vertex", e.name)));
            }
            if e.range.is_empty() {
                return Err(Error::Invalid(format!("edge `{}` has an empty range", e.name)));
            }
        }
        Ok(Ultragraph { vertices, edges })
    }

    /// Vertices emitting no edge; a regular vertex emits finitely many and at
    /// least one, and with finite data only emptiness can fail.
    pub fn irregular_vertices(&self) -> Vec<String> {
        (0..self.vertices.len())
            .filter(|&v| !self.edges.iter().any(|e| e.src == v))
            .map(|v| self.vertices[v].clone())
            .collect()
    }

    pub fn forbidden(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for e in &self.edges {
            for f in &self.edges {
                if !e.range.contains(&f.src) {
                    out.push(Word(vec![
                        Letter::concrete(e.name.clone()),
                        Letter::concrete(f.name.clone()),
                    ]));
                }
            }
        }
        out
    }

    pub fn to_edge_subshift(&self) -> Result<SoficPresentation> {
        let alphabet = self.edges.iter().map(|e| Letter::concrete(e.name.clone())).collect();
        SoficPresentation::from_forbidden(alphabet, &self.forbidden())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExelLacaMatrix {
    pub index: Vec<String>,
    pub rows: Vec<Vec<u8>>,
}

impl ExelLacaMatrix {
    pub fn new(index: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = index.len();
        if rows.len() != n {
            return Err(Error::Invalid(format!("expected {n} rows, found {}", rows.len())));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n || r.iter().any(|&x| x > 1) {
                return Err(Error::Invalid(format!("row {i} is not a 0/1 row of length {n}")));
            }
            if r.iter().all(|&x| x == 0) {
                return Err(Error::Invalid(format!(
                    "row {i} (`{}`) is identically zero; no rows identically zero is required",
                    index[i]
                )));
            }
        }
        Ok(ExelLacaMatrix { index, rows })
    }

    pub fn letter(&self, i: usize) -> Letter {
        Letter::concrete(self.index[i].clone())
    }

    pub fn to_subshift(&self) -> Result<SoficPresentation> {
        let n = self.index.len();
        let mut forbidden = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.rows[i][j] == 0 {
                    forbidden.push(Word(vec![self.letter(i), self.letter(j)]));
                }
            }
        }
        SoficPresentation::from_forbidden((0..n).map(|i| self.letter(i)).collect(), &forbidden)
    }

    /// `A(X,Y,j) = ∏_{x∈X} A(x,j) ∏_{y∈Y} (1 − A(y,j))`.
    pub fn product(&self, xs: &[usize], ys: &[usize], j: usize) -> u8 {
        let p = xs.iter().all(|&x| self.rows[x][j] == 1) && ys.iter().all(|&y| self.rows[y][j] == 0);
        p as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn chuva_graph_gives_three_kinds_of_points() {
        let g = corpus::chuva_graph();
        let Presentation::Flat(p) = g.to_edge_subshift().unwrap() else { panic!("expected flat") };
        assert_eq!(p.explicit().len(), 1);
        assert_eq!(p.explicit()[0].to_string(), "(c)");
        let fams: Vec<String> = p.families().iter().map(|f| f.template.to_string()).collect();
        assert_eq!(fams, vec!["a_j (c)", "b_j (c)"]);
    }

    #[test]
    fn chuva_hypotheses_fail() {
        let h = corpus::chuva_graph().check_hypotheses();
        assert!(!h.holds());
        assert_eq!(h.infinite_emitting_sources, vec!["v1", "v2"]);
    }

    #[test]
    fn sink_fails_hypotheses() {
        let g = ParametricGraph::finite(2, &[(0, 1), (0, 0)]).unwrap();
        assert_eq!(g.check_hypotheses().sinks, vec!["v1"]);
        let loop1 = ParametricGraph::finite(1, &[(0, 0)]).unwrap();
        assert!(loop1.check_hypotheses().holds());
    }

    #[test]
    fn two_loops_give_full_shift() {
        let g = ParametricGraph::finite(1, &[(0, 0), (0, 0)]).unwrap();
        let Presentation::Sofic(p) = g.to_edge_subshift().unwrap() else { panic!() };
        assert_eq!(p.num_states(), 1);
        assert_eq!(p.words(4).len(), 16);
    }

    #[test]
    fn ultragraph_range_allows_both_successors() {
        let u = Ultragraph::new(
            vec!["u".into(), "v".into(), "w".into()],
            vec![
                UltraEdge { name: "e".into(), src: 0, range: vec![1, 2] },
                UltraEdge { name: "f".into(), src: 1, range: vec![0] },
                UltraEdge { name: "g".into(), src: 2, range: vec![0] },
            ],
        )
        .unwrap();
        let fb: Vec<String> = u.forbidden().iter().map(|w| w.to_string()).collect();
        assert!(!fb.contains(&"e f".to_string()) && !fb.contains(&"e g".to_string()));
        assert!(u.irregular_vertices().is_empty());
    }

    #[test]
    fn exel_laca_examples() {
        let gm = ExelLacaMatrix::new(vec!["1".into(), "2".into()], vec![vec![1, 1], vec![1, 0]]).unwrap();
        let p = gm.to_subshift().unwrap();
        assert_eq!(p.words(2).len(), 3);
        let id = ExelLacaMatrix::new(vec!["1".into(), "2".into()], vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.to_subshift().unwrap().words(5).len(), 2);
        let zero = ExelLacaMatrix::new(vec!["1".into(), "2".into()], vec![vec![1, 1], vec![0, 0]]);
        assert!(zero.unwrap_err().to_string().contains("no rows identically zero"));
    }
}
