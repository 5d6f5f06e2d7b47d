//! Loading presentation files, with an optional content-addressed cache of
//! minimized automata.
//!
//! The cache key is the SHA-256 of the file bytes; an entry holds the
//! minimized transition table, so a warm load skips construction and
//! minimization but yields the same automaton, state numbering included.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use subshift_core::presentations::{ParametricGraph, SoficData, SoficPresentation};
use subshift_core::Presentation;

use crate::formats::{self, Document};

const CACHE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheUse {
    Disabled,
    Hit,
    Miss,
    /// Flat presentations are not cached.
    NotApplicable,
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub kind: &'static str,
    pub sha256: String,
    pub presentation: Presentation,
    /// The source graph when the file is a graph.
    pub graph: Option<ParametricGraph>,
    pub cache: CacheUse,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    version: u32,
    sha256: String,
    data: SoficData,
}

fn cache_path(dir: &Path, sha: &str) -> PathBuf {
    dir.join(format!("sofic-{sha}.json"))
}

fn read_cache(dir: &Path, sha: &str) -> Option<SoficPresentation> {
    let text = fs::read_to_string(cache_path(dir, sha)).ok()?;
    let entry: CacheEntry = serde_json::from_str(&text).ok()?;
    if entry.version != CACHE_VERSION || entry.sha256 != sha {
        return None;
    }
    SoficPresentation::from_data(entry.data).ok()
}

fn write_cache(dir: &Path, sha: &str, p: &SoficPresentation) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
    let entry = CacheEntry { version: CACHE_VERSION, sha256: sha.to_string(), data: p.data() };
    let target = cache_path(dir, sha);
    let tmp = target.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, serde_json::to_vec(&entry)?).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, &target).with_context(|| format!("writing {}", target.display()))?;
    Ok(())
}

/// Builds the automaton for a document with a finite alphabet, or `None`
/// for documents that yield flat presentations.
fn build_sofic(doc: &Document) -> Result<Option<SoficPresentation>> {
    Ok(Some(match doc {
        Document::Sft { alphabet, forbidden } => {
            let (a, words) = formats::sft_automaton(alphabet, forbidden)?;
            SoficPresentation::from_forbidden(a, &words)?
        }
        Document::Automaton { alphabet, delta, initial } => {
            SoficPresentation::from_data(formats::automaton_data(alphabet, delta, *initial))?
        }
        Document::Ultragraph { vertices, edges } => formats::ultragraph(vertices, edges)?.to_edge_subshift()?,
        Document::Matrix { index_set, rows } => formats::matrix(index_set, rows)?.to_subshift()?,
        Document::Graph { vertices, edges, edge_families } if edge_families.is_empty() => {
            match formats::graph(vertices, edges, edge_families)?.to_edge_subshift()? {
                Presentation::Sofic(s) => s,
                Presentation::Flat(_) => unreachable!("finite graphs give automata"),
            }
        }
        Document::Graph { .. } | Document::Flat { .. } => return Ok(None),
    }))
}

/// Parses and validates presentation text; `probe` is the word length up to
/// which a flat presentation's points are checked against its block schemas.
pub fn load_text(text: &str, cache_dir: Option<&Path>, probe: usize) -> Result<Loaded> {
    let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
    let doc = Document::parse(text)?;
    let kind = doc.kind();
    let graph = match &doc {
        Document::Graph { vertices, edges, edge_families } => Some(formats::graph(vertices, edges, edge_families)?),
        _ => None,
    };

    if let Some(dir) = cache_dir {
        if let Some(p) = read_cache(dir, &sha256) {
            return Ok(Loaded { kind, sha256, presentation: Presentation::Sofic(p), graph, cache: CacheUse::Hit });
        }
    }
    if let Some(p) = build_sofic(&doc)? {
        let cache = match cache_dir {
            Some(dir) => {
                write_cache(dir, &sha256, &p)?;
                CacheUse::Miss
            }
            None => CacheUse::Disabled,
        };
        return Ok(Loaded { kind, sha256, presentation: Presentation::Sofic(p), graph, cache });
    }

    let flat = match (&doc, &graph) {
        (_, Some(g)) => match g.to_edge_subshift()? {
            Presentation::Flat(f) => f,
            Presentation::Sofic(_) => unreachable!("graphs with edge families give flat presentations"),
        },
        (Document::Flat { concrete, letter_families, schemas, explicit, families }, None) => {
            formats::flat(concrete, letter_families, schemas, explicit, families)?
        }
        _ => unreachable!("automaton documents are handled above"),
    };
    let n = flat.schema_len().unwrap_or(1).max(probe);
    let (missing, extra) = flat.completeness_probe(n)?;
    if let Some(w) = missing.first() {
        anyhow::bail!("block schemas allow `{w}` (length {n}) but no listed point contains it");
    }
    if let Some(w) = extra.first() {
        anyhow::bail!("a listed point contains `{w}`, which the block schemas forbid");
    }
    Ok(Loaded { kind, sha256, presentation: Presentation::Flat(flat), graph, cache: CacheUse::NotApplicable })
}

pub fn load_file(path: &Path, cache_dir: Option<&Path>, probe: usize) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_text(&text, cache_dir, probe).with_context(|| format!("invalid presentation in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"{"type": "sft", "alphabet": [0, 1], "forbidden": ["11"]}"#;

    #[test]
    fn cache_round_trip_preserves_the_automaton() {
        let dir = tempfile::tempdir().unwrap();
        let cold = load_text(GOLDEN, Some(dir.path()), 4).unwrap();
        assert_eq!(cold.cache, CacheUse::Miss);
        let warm = load_text(GOLDEN, Some(dir.path()), 4).unwrap();
        assert_eq!(warm.cache, CacheUse::Hit);
        match (&cold.presentation, &warm.presentation) {
            (Presentation::Sofic(a), Presentation::Sofic(b)) => assert_eq!(a.data(), b.data()),
            _ => panic!("expected automata"),
        }
    }

    #[test]
    fn corrupt_cache_entries_are_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cold = load_text(GOLDEN, Some(dir.path()), 4).unwrap();
        fs::write(cache_path(dir.path(), &cold.sha256), "not json").unwrap();
        let again = load_text(GOLDEN, Some(dir.path()), 4).unwrap();
        assert_eq!(again.cache, CacheUse::Miss);
    }

    #[test]
    fn zero_rows_are_rejected() {
        let text = r#"{"type": "matrix", "index_set": ["1", "2"], "rows": [[1, 1], [0, 0]]}"#;
        let e = format!("{:#}", load_text(text, None, 4).unwrap_err());
        assert!(e.contains("no rows identically zero"), "{e}");
    }

    #[test]
    fn unknown_letters_are_located() {
        let text = r#"{"type": "sft", "alphabet": ["a", "b"], "forbidden": [["a"], ["c"]]}"#;
        let e = format!("{:#}", load_text(text, None, 4).unwrap_err());
        assert!(e.contains("forbidden[1]") && e.contains("`c`"), "{e}");
    }

    #[test]
    fn malformed_json_reports_a_position() {
        let e = format!("{:#}", load_text("{\"type\": \"sft\", \"alphabet\": [0,", None, 4).unwrap_err());
        assert!(e.contains("line 1"), "{e}");
    }
}
