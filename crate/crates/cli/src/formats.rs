//! Input documents. Each file is one JSON object tagged by `"type"`:
//!
//! - `sft`: `{"alphabet": [...], "forbidden": [word, ...]}`
//! - `automaton`: `{"alphabet": [...], "delta": [[state|null, ...], ...], "initial": 0}`
//! - `graph`: `{"vertices": [...], "edges": [{"name", "src", "dst"}],
//!   "edge_families": [{"name", "src", "dst", "index_domain": {"from": n}}]}`
//! - `ultragraph`: `{"vertices": [...], "edges": [{"name", "src", "range": [...]}]}`
//! - `matrix`: `{"index_set": [...], "rows": [[0|1, ...], ...]}`
//! - `flat`: `{"concrete": [...], "letter_families": [{"name", "from"}],
//!   "schemas": [[...], ...], "explicit": ["pre (per)"], "families":
//!   [{"name", "template", "from"}]}`
//!
//! Letters may be strings or numbers. A word is a list of letters or a string
//! of whitespace-separated letters (single-character letters may run together).
//! In flat documents `name_n` is a family member, `name_j` (or `j` for the
//! unnamed family) the template index, and bare numbers members of the
//! unnamed family.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use subshift_core::presentations::{
    Edge, EdgeFamily, ExelLacaMatrix, FlatPresentation, LetterFamily, ParametricGraph, PointFamily, SchemaLetter,
    SoficData, UltraEdge, Ultragraph,
};
use subshift_core::symbolic::{Letter, PointTemplate, Word};

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Sym {
    Text(String),
    Num(u64),
}

impl Sym {
    pub fn text(&self) -> String {
        match self {
            Sym::Text(s) => s.clone(),
            Sym::Num(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum WordDoc {
    Letters(Vec<Sym>),
    Text(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    #[serde(default)]
    pub name: Option<String>,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexDomain {
    #[serde(default)]
    pub from: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFamilyDoc {
    pub name: String,
    pub src: String,
    pub dst: String,
    #[serde(default)]
    pub index_domain: Option<IndexDomain>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UltraEdgeDoc {
    #[serde(default)]
    pub name: Option<String>,
    pub src: String,
    pub range: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LetterFamilyDoc {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub from: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFamilyDoc {
    pub name: String,
    pub template: String,
    #[serde(default)]
    pub from: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Document {
    Sft {
        alphabet: Vec<Sym>,
        #[serde(default)]
        forbidden: Vec<WordDoc>,
    },
    Automaton {
        alphabet: Vec<Sym>,
        delta: Vec<Vec<Option<usize>>>,
        initial: Option<usize>,
    },
    Graph {
        vertices: Vec<String>,
        #[serde(default)]
        edges: Vec<EdgeDoc>,
        #[serde(default)]
        edge_families: Vec<EdgeFamilyDoc>,
    },
    Ultragraph {
        vertices: Vec<String>,
        edges: Vec<UltraEdgeDoc>,
    },
    Matrix {
        index_set: Vec<Sym>,
        rows: Vec<Vec<u8>>,
    },
    Flat {
        #[serde(default)]
        concrete: Vec<Sym>,
        #[serde(default)]
        letter_families: Vec<LetterFamilyDoc>,
        schemas: Vec<Vec<Sym>>,
        #[serde(default)]
        explicit: Vec<String>,
        #[serde(default)]
        families: Vec<PointFamilyDoc>,
    },
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        serde_json::from_str(text).context("document does not match any presentation schema")
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Sft { .. } => "sft",
            Document::Automaton { .. } => "automaton",
            Document::Graph { .. } => "graph",
            Document::Ultragraph { .. } => "ultragraph",
            Document::Matrix { .. } => "matrix",
            Document::Flat { .. } => "flat",
        }
    }
}

fn alphabet(syms: &[Sym]) -> Vec<Letter> {
    syms.iter().map(|s| Letter::concrete(s.text())).collect()
}

/// Reads a word over a finite alphabet.
fn finite_word(alphabet: &[Letter], doc: &WordDoc, at: &str) -> Result<Word> {
    let known = |t: &str| alphabet.iter().find(|a| a.to_string() == t).cloned();
    let tokens: Vec<String> = match doc {
        WordDoc::Letters(v) => v.iter().map(Sym::text).collect(),
        WordDoc::Text(s) => {
            let mut out = Vec::new();
            for tok in s.split_whitespace() {
                if known(tok).is_some() {
                    out.push(tok.to_string());
                } else {
                    out.extend(tok.chars().map(|c| c.to_string()));
                }
            }
            out
        }
    };
    tokens
        .iter()
        .map(|t| known(t).ok_or_else(|| anyhow!("{at}: letter `{t}` is not in the alphabet")))
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

pub fn sft_automaton(alphabet_syms: &[Sym], forbidden: &[WordDoc]) -> Result<(Vec<Letter>, Vec<Word>)> {
    let a = alphabet(alphabet_syms);
    let words = forbidden
        .iter()
        .enumerate()
        .map(|(i, w)| finite_word(&a, w, &format!("forbidden[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, words))
}

pub fn automaton_data(alphabet_syms: &[Sym], delta: &[Vec<Option<usize>>], initial: Option<usize>) -> SoficData {
    SoficData { alphabet: alphabet(alphabet_syms), delta: delta.to_vec(), initial }
}

fn vertex_index(vertices: &[String], v: &str, at: &str) -> Result<usize> {
    vertices.iter().position(|x| x == v).ok_or_else(|| anyhow!("{at}: unknown vertex `{v}`"))
}

pub fn graph(vertices: &[String], edges: &[EdgeDoc], families: &[EdgeFamilyDoc]) -> Result<ParametricGraph> {
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let at = format!("edges[{i}]");
            Ok(Edge {
                name: e.name.clone().unwrap_or_else(|| format!("e{i}")),
                src: vertex_index(vertices, &e.src, &at)?,
                dst: vertex_index(vertices, &e.dst, &at)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let families = families
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let at = format!("edge_families[{i}]");
            Ok(EdgeFamily {
                name: f.name.clone(),
                src: vertex_index(vertices, &f.src, &at)?,
                dst: vertex_index(vertices, &f.dst, &at)?,
                start: f.index_domain.as_ref().map_or(0, |d| d.from),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParametricGraph::new(vertices.to_vec(), edges, families)?)
}

pub fn ultragraph(vertices: &[String], edges: &[UltraEdgeDoc]) -> Result<Ultragraph> {
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let at = format!("edges[{i}]");
            Ok(UltraEdge {
                name: e.name.clone().unwrap_or_else(|| format!("e{i}")),
                src: vertex_index(vertices, &e.src, &at)?,
                range: e.range.iter().map(|v| vertex_index(vertices, v, &at)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ultragraph::new(vertices.to_vec(), edges)?)
}

pub fn matrix(index: &[Sym], rows: &[Vec<u8>]) -> Result<ExelLacaMatrix> {
    Ok(ExelLacaMatrix::new(index.iter().map(Sym::text).collect(), rows.to_vec())?)
}

/// Letter resolution for flat documents.
struct FlatLetters<'a> {
    concrete: &'a [String],
    families: &'a [LetterFamily],
}

enum Tok {
    Concrete(String),
    Member(String, u64),
    Param(String),
}

impl FlatLetters<'_> {
    fn classify(&self, tok: &str) -> Result<Tok> {
        if self.concrete.iter().any(|c| c == tok) {
            return Ok(Tok::Concrete(tok.to_string()));
        }
        let has = |n: &str| self.families.iter().any(|f| f.name == n);
        let (family, idx) = match tok.rsplit_once('_') {
            Some((name, idx)) if has(name) => (name, idx),
            _ if has("") => ("", tok),
            _ => bail!("unknown letter `{tok}`"),
        };
        if idx == "j" {
            return Ok(Tok::Param(family.to_string()));
        }
        let n: u64 = idx.parse().map_err(|_| anyhow!("unknown letter `{tok}`"))?;
        Ok(Tok::Member(family.to_string(), n))
    }

    fn letter(&self, tok: &str) -> Result<Letter> {
        Ok(match self.classify(tok)? {
            Tok::Concrete(c) => Letter::concrete(c),
            Tok::Member(f, n) => Letter::member(f, n),
            Tok::Param(f) => Letter::param(f),
        })
    }

    fn schema(&self, tok: &str) -> Result<SchemaLetter> {
        Ok(match self.classify(tok)? {
            Tok::Concrete(c) => SchemaLetter::Concrete(c),
            Tok::Member(f, n) => SchemaLetter::Fixed(f, n),
            Tok::Param(f) => SchemaLetter::Var(f),
        })
    }

    fn word(&self, s: &str) -> Result<Word> {
        s.split_whitespace().map(|t| self.letter(t)).collect::<Result<Vec<_>>>().map(Word)
    }

    fn point(&self, s: &str) -> Result<PointTemplate> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| anyhow!("point `{s}` lacks a `(period)`"))?;
        let close = s.rfind(')').filter(|&c| c > open).ok_or_else(|| anyhow!("point `{s}` is unclosed"))?;
        if !s[close + 1..].trim().is_empty() {
            bail!("point `{s}` has text after the period");
        }
        let pre = self.word(&s[..open])?;
        let per = self.word(&s[open + 1..close])?;
        PointTemplate::new(pre, per).ok_or_else(|| anyhow!("point `{s}` has an empty period"))
    }
}

pub fn flat(
    concrete: &[Sym],
    letter_families: &[LetterFamilyDoc],
    schemas: &[Vec<Sym>],
    explicit: &[String],
    families: &[PointFamilyDoc],
) -> Result<FlatPresentation> {
    let concrete: Vec<String> = concrete.iter().map(Sym::text).collect();
    let lfs: Vec<LetterFamily> =
        letter_families.iter().map(|f| LetterFamily { name: f.name.clone(), start: f.from }).collect();
    let r = FlatLetters { concrete: &concrete, families: &lfs };
    let schemas = schemas
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.iter().map(|t| r.schema(&t.text())).collect::<Result<Vec<_>>>().with_context(|| format!("schemas[{i}]"))
        })
        .collect::<Result<Vec<_>>>()?;
    let explicit = explicit
        .iter()
        .enumerate()
        .map(|(i, s)| r.point(s).with_context(|| format!("explicit[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let families = families
        .iter()
        .enumerate()
        .map(|(i, f)| {
            Ok(PointFamily {
                name: f.name.clone(),
                template: r.point(&f.template).with_context(|| format!("families[{i}]"))?,
                start: f.from,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlatPresentation::new(concrete, lfs, schemas, explicit, families)?)
}

/// A prefix code file: `{"type": "letter_map", "letters": {...}, "families": {...}}`
/// or `{"type": "table", "maps": [{word: word, ...}, ...]}` with `maps[k-1]`
/// holding `h_k`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeDocument {
    LetterMap {
        #[serde(default)]
        letters: BTreeMap<String, String>,
        #[serde(default)]
        families: BTreeMap<String, String>,
    },
    Table {
        maps: Vec<BTreeMap<String, String>>,
    },
}

impl CodeDocument {
    pub fn parse(text: &str) -> Result<CodeDocument> {
        serde_json::from_str(text).context("code file does not match the prefix-code schema")
    }
}
