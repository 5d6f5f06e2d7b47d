//! One function per subcommand; each returns a report or an error.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subshift_core::dynamics::{
    check_cylinder_images, extend_to_otw, generalized_cylinder_contains, otw_membership_fin, otw_shift,
    satisfies_condition_l, singleton_detector, verify_isometric_conjugacy, verify_l_witness, LVerdict, OTWPoint,
    PrefixCode,
};
use subshift_core::ktheory::{self, graph_algebra_k_reference, graph_k_oracle, KOutcome};
use subshift_core::operator::{
    check_adjoints, check_defining_relations, check_gauge, check_identities, check_nonvanishing,
    check_term_agreement, CheckReport,
};
use subshift_core::presentations::ParametricGraph;
use subshift_core::setalg::LetterSet;
use subshift_core::syntax::{parse_letter, parse_point, parse_word};
use subshift_core::{corpus, Letter, Presentation, Word};

use crate::formats::CodeDocument;
use crate::load::{load_file, Loaded};
use crate::report::{join, yes_no, Report};
use crate::term::parse_term;

/// Search and sampling bounds shared by all commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Word length for generators, detector prefixes and relation samples.
    pub length: usize,
    /// Word length of the schema completeness probe for flat files.
    pub probe: usize,
    /// Last stage of the automaton K-theory sequence.
    pub stages: usize,
    /// Atom budget per K-theory stage.
    pub atoms: usize,
    /// Depth of conjugacy checks and of point samples.
    pub depth: usize,
    /// Set budget of the condition (L) orbit search.
    pub sets: usize,
    /// Number of random terms in relation checks.
    pub terms: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { length: 3, probe: 4, stages: 6, atoms: 4000, depth: 6, sets: 4096, terms: 12 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Ctx {
    pub bounds: Bounds,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Ctx {
    pub fn load(&self, path: &Path) -> Result<Loaded> {
        load_file(path, self.cache_dir.as_deref(), self.bounds.probe)
    }
}

pub fn letters_display(ls: &LetterSet) -> String {
    let mut parts: Vec<String> = ls.finite.iter().map(Letter::to_string).collect();
    for (family, ex) in &ls.tails {
        let name = if family.is_empty() { "n".to_string() } else { format!("{family}_n") };
        if ex.is_empty() {
            parts.push(format!("{name} for almost all n"));
        } else {
            parts.push(format!("{name} for n outside {{{}}}", join(ex, ",")));
        }
    }
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(", ")
    }
}

fn graph_entries(r: &mut Report, g: &ParametricGraph) {
    let h = g.check_hypotheses();
    r.push("graph.vertices", g.vertices.len());
    r.push("graph.edges", g.edges.len());
    r.push("graph.edge_families", g.families.len());
    r.push("graph.sinks", if h.sinks.is_empty() { "none".into() } else { h.sinks.join(",") });
    r.push(
        "graph.infinite_emitting_sources",
        if h.infinite_emitting_sources.is_empty() { "none".into() } else { h.infinite_emitting_sources.join(",") },
    );
    r.push("graph.hypotheses", if h.holds() { "hold" } else { "fail" });
}

pub fn cmd_load(ctx: &Ctx, path: &Path) -> Result<Report> {
    let l = ctx.load(path)?;
    let mut r = Report::new();
    r.push("kind", l.kind);
    r.push("backend", l.presentation.backend());
    r.push("sha256", &l.sha256);
    match &l.presentation {
        Presentation::Sofic(s) => {
            r.push("letters", join(s.alphabet(), ","));
            r.push("states", s.num_states());
            r.push("atoms", s.atoms().len());
            r.push("empty", yes_no(s.is_empty()));
        }
        Presentation::Flat(f) => {
            let mut letters: Vec<String> = f.concrete_letters().to_vec();
            for lf in f.letter_families() {
                let name = if lf.name.is_empty() { "n".to_string() } else { format!("{}_n", lf.name) };
                letters.push(format!("{name} (n>={})", lf.start));
            }
            r.push("letters", letters.join(","));
            r.push("explicit_points", join(f.explicit(), ", "));
            r.push(
                "point_families",
                join(f.families().iter().map(|pf| format!("{} (j>={})", pf.template, pf.start)), ", "),
            );
            r.push("schema_length", f.schema_len().map_or("none".into(), |k| k.to_string()));
            r.push("probe_length", f.schema_len().unwrap_or(1).max(ctx.bounds.probe));
        }
    }
    if let Some(g) = &l.graph {
        graph_entries(&mut r, g);
    }
    Ok(r)
}

pub fn cmd_set(ctx: &Ctx, path: &Path, term: &str, ranges: &[String]) -> Result<Report> {
    let l = ctx.load(path)?;
    let p = &l.presentation;
    let t = parse_term(p, term)?;
    let a = p.eval(&t)?;
    let mut r = Report::new();
    r.push("term", &t);
    r.push("set", p.describe(&a));
    r.push("empty", yes_no(p.is_empty(&a)));
    r.push("full", yes_no(p.equals(&a, &p.full())?));
    if let Some(f) = a.as_flat() {
        r.push("finite", yes_no(f.is_finite()));
        let size = f.explicit.len() + f.fams.iter().map(|i| i.ex.len()).sum::<usize>();
        if f.is_finite() {
            r.push("size", size);
        }
    }
    let letters = p.letters_from(&a)?;
    r.push("letters", letters_display(&letters));
    let regular = p.is_regular(&a)?;
    r.push("regular", yes_no(regular));
    if regular {
        r.push("letter_decomposition", if p.check_letter_decomposition(&a)? { "verified" } else { "FAILED" });
    }
    for w in ranges {
        let alpha = parse_word(p, w).with_context(|| format!("range word `{w}`"))?;
        let b = p.relative_range(&a, &alpha)?;
        r.push(format!("range[{alpha}]"), p.describe(&b));
    }
    Ok(r)
}

/// Report lines for a K-theory computation, shared with the acceptance suite.
pub fn ktheory_report(ctx: &Ctx, p: &Presentation, graph: Option<&ParametricGraph>) -> Result<Report> {
    let mut r = Report::new();
    r.push("backend", p.backend());
    match ktheory::k_groups(p, ctx.bounds.stages, ctx.bounds.atoms)? {
        KOutcome::Flat(k) => {
            r.push("k0", &k.k0);
            r.push("k1", &k.k1);
            r.push("k0.canonical", k.k0.canonical());
            r.push("k1.canonical", k.k1.canonical());
            r.push("basis.explicit", join(k.basis.explicit.iter().map(|g| &g.label), "; "));
            r.push(
                "basis.regular",
                join(k.basis.explicit.iter().map(|g| if g.regular { "1" } else { "0" }), ""),
            );
            r.push("basis.families", join(&k.basis.family_labels, "; "));
            r.push("basis.uniform_from", k.basis.uniform_from);
            r.push("matrix.P", &k.matrix.p);
            r.push("matrix.M", &k.matrix.m);
            r.push("matrix.N", &k.matrix.n);
            let comb = |c: &ktheory::flat::Combination| {
                join(c.iter().map(|(l, v)| format!("{v}*chi{l}")), " + ")
            };
            r.push("kernel.finite", join(k.kernel.finite.iter().map(comb), "; "));
            r.push("kernel.per_index", join(k.kernel.per_index.iter().map(comb), "; "));
            r.push("kernel.per_index_from", k.kernel.per_index_from);
            for (name, ok) in &k.checks {
                r.push(format!("check.{}", name.replace(' ', "_")), if *ok { "pass" } else { "FAIL" });
            }
        }
        KOutcome::Stages(t) => {
            for s in &t.stages {
                r.push(format!("stage.{}", s.stage), format!("atoms={} k0={} k1={}", s.atoms, s.k0, s.k1));
            }
            match t.stable() {
                Some(s) => {
                    r.push("stable_from", t.stable_from.expect("stable"));
                    r.push("k0", &s.k0);
                    r.push("k1", &s.k1);
                }
                None => r.undecided(format!(
                    "stage sequence did not stabilize within {} stages and {} atoms",
                    ctx.bounds.stages, ctx.bounds.atoms
                )),
            }
        }
    }
    if let Some(g) = graph {
        graph_entries(&mut r, g);
        let h = g.check_hypotheses();
        if g.is_finite() && h.sinks.is_empty() {
            let o = graph_k_oracle(g)?;
            r.push("graph.oracle", "applicable");
            r.push("graph.oracle_k0", &o.k0);
            r.push("graph.oracle_k1", &o.k1);
            if let (Some(k0), Some(k1)) = (r.get("k0").map(str::to_owned), r.get("k1").map(str::to_owned)) {
                let agree = k0 == o.k0.to_string() && k1 == o.k1.to_string();
                r.push("graph.oracle_agrees", yes_no(agree));
            }
        } else {
            let why = if !g.is_finite() {
                "graph has infinite emitters"
            } else {
                "graph has sinks"
            };
            r.push("graph.oracle", format!("inapplicable ({why})"));
            if !g.is_finite() {
                let reference = graph_algebra_k_reference(g)?;
                r.push("graph.algebra_k0", &reference.k0);
                r.push("graph.algebra_k1", &reference.k1);
                if let (Some(k0), Some(k1)) = (r.get("k0").map(str::to_owned), r.get("k1").map(str::to_owned)) {
                    let same = k0 == reference.k0.to_string() && k1 == reference.k1.to_string();
                    r.push("graph.algebra_agrees", yes_no(same));
                    if !same {
                        r.push(
                            "note",
                            format!(
                                "subshift algebra groups ({k0}, {k1}) differ from graph algebra groups ({}, {}); infinite emitters are singular vertices of the graph algebra",
                                reference.k0, reference.k1
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(r)
}

pub fn cmd_ktheory(ctx: &Ctx, path: &Path) -> Result<Report> {
    let l = ctx.load(path)?;
    ktheory_report(ctx, &l.presentation, l.graph.as_ref())
}

pub fn condition_l_report(ctx: &Ctx, p: &Presentation) -> Result<Report> {
    let mut r = Report::new();
    let verdict = satisfies_condition_l(p, ctx.bounds.sets)?;
    let detector = singleton_detector(p, ctx.bounds.length)?;
    match &verdict {
        LVerdict::Holds => r.push("condition_l", "true"),
        LVerdict::Fails(w) => {
            r.push("condition_l", "false");
            r.push("witness.P", join(&w.words, "; "));
            r.push("witness.gamma", &w.gamma);
            r.push("witness.verified", yes_no(verify_l_witness(p, w)?));
        }
        LVerdict::Undecided(why) => {
            r.push("condition_l", "undecided");
            r.undecided(why);
        }
    }
    r.push("detector.singletons", detector.singletons.len());
    r.push("detector.decided", yes_no(detector.decided));
    for (i, s) in detector.singletons.iter().enumerate() {
        r.push(format!("detector.{i}.point"), &s.point);
        r.push(format!("detector.{i}.term"), &s.term);
    }
    if let (Some(l), true) = (verdict.as_bool(), detector.decided) {
        r.push("detector.agrees", yes_no(l == detector.singletons.is_empty()));
    }
    Ok(r)
}

pub fn cmd_condition_l(ctx: &Ctx, path: &Path) -> Result<Report> {
    let l = ctx.load(path)?;
    condition_l_report(ctx, &l.presentation)
}

pub fn cmd_otw(
    ctx: &Ctx,
    path: &Path,
    words: &[String],
    point: Option<&str>,
    alpha: Option<&str>,
    exclude: &[String],
) -> Result<Report> {
    let l = ctx.load(path)?;
    let p = &l.presentation;
    let mut r = Report::new();
    r.push("zero_tail", yes_no(otw_membership_fin(p, &Word::empty())?));
    for w in words {
        let w = parse_word(p, w)?;
        r.push(format!("fin[{w}]"), yes_no(otw_membership_fin(p, &w)?));
    }
    if let Some(s) = point {
        let x = parse_otw_point(p, s)?;
        r.push("point", &x);
        r.push("point.shift", otw_shift(&x));
        let alpha = parse_word(p, alpha.unwrap_or(""))?;
        let f: BTreeSet<Letter> = exclude.iter().map(|a| parse_letter(p, a)).collect::<Result<_, _>>()?;
        r.push(
            format!("point.in_cylinder[{alpha}; {{{}}}]", join(&f, ",")),
            yes_no(generalized_cylinder_contains(&alpha, &f, &x)),
        );
    }
    Ok(r)
}

/// `pre (per)` is an infinite point, `w .` a finite one, `0->` the zero tail.
pub fn parse_otw_point(p: &Presentation, s: &str) -> Result<OTWPoint> {
    let s = s.trim();
    if s == "0->" {
        return Ok(OTWPoint::zero_tail(p)?);
    }
    if let Some(w) = s.strip_suffix('.') {
        return Ok(OTWPoint::finite(p, parse_word(p, w)?)?);
    }
    Ok(OTWPoint::infinite(p, parse_point(p, s)?)?)
}

/// Runs every operator-model check on the sample; `pairs` counts term/point
/// agreement comparisons.
pub fn relations_check(ctx: &Ctx, p: &Presentation) -> Result<(CheckReport, Vec<(&'static str, CheckReport)>)> {
    let b = &ctx.bounds;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let points = p.sample_points(b.depth.min(4));
    let words: Vec<Word> = (0..=b.length.min(2)).flat_map(|n| p.language(n)).collect();
    let mut terms: Vec<subshift_core::Term> = (0..b.terms).map(|_| corpus::random_term(p, &mut rng, 3)).collect();
    for w in &words {
        terms.push(subshift_core::Term::follower(w.clone()));
        terms.push(subshift_core::Term::cylinder(w.clone()));
    }
    let parts = vec![
        ("relations", check_defining_relations(p, &points, &words, &terms)),
        ("identities", check_identities(p, &points, &words)),
        ("adjoints", check_adjoints(p, &points, &mut rng, 20)),
        ("gauge", check_gauge(p, &points, &words, &terms)),
        ("agreement", check_term_agreement(p, &points, &terms)?),
        ("nonvanishing", check_nonvanishing(p, &terms, b.depth.min(4), b.depth)?),
    ];
    let mut total = CheckReport::default();
    for (_, c) in &parts {
        total.merge(c.clone());
    }
    Ok((total, parts))
}

pub fn cmd_relations(ctx: &Ctx, path: &Path) -> Result<Report> {
    let l = ctx.load(path)?;
    let (total, parts) = relations_check(ctx, &l.presentation)?;
    let mut r = Report::new();
    for (name, c) in &parts {
        r.push(format!("{name}.checks"), c.checks);
        r.push(format!("{name}.failed"), c.failed);
    }
    r.push("checks", total.checks);
    r.push("failed", total.failed);
    for (i, f) in total.failures.iter().enumerate() {
        r.push(format!("failure.{i}"), f);
    }
    r.push("verified", yes_no(total.passed()));
    Ok(r)
}

pub fn parse_code(p1: &Presentation, p2: &Presentation, doc: &CodeDocument) -> Result<PrefixCode> {
    Ok(match doc {
        CodeDocument::LetterMap { letters, families } => {
            let mut map = BTreeMap::new();
            for (a, b) in letters {
                map.insert(parse_letter(p1, a)?, parse_letter(p2, b)?);
            }
            PrefixCode::LetterMap { letters: map, families: families.clone() }
        }
        CodeDocument::Table { maps } => {
            let mut out = Vec::with_capacity(maps.len());
            for (k, m) in maps.iter().enumerate() {
                let mut level = BTreeMap::new();
                for (u, v) in m {
                    let (u, v) = (parse_word(p1, u)?, parse_word(p2, v)?);
                    if u.len() != k + 1 || v.len() != k + 1 {
                        bail!("maps[{k}] sends `{u}` to `{v}`; both must have length {}", k + 1);
                    }
                    level.insert(u, v);
                }
                out.push(level);
            }
            PrefixCode::Table { maps: out }
        }
    })
}

/// Verification of `h: X₁ → X₂` to `depth`, its extension to finite words,
/// and cylinder images for `|α| ≤ min(depth, 4)`.
pub fn conjugacy_report(ctx: &Ctx, h: &PrefixCode, x1: &Presentation, x2: &Presentation) -> Result<Report> {
    let depth = ctx.bounds.depth;
    let mut r = Report::new();
    let rep = verify_isometric_conjugacy(h, x1, x2, depth)?;
    for level in &rep.levels {
        r.push(
            format!("depth.{}", level.depth),
            format!(
                "words={} bijective={} coherent={} shift_commuting={}",
                level.words,
                yes_no(level.bijective),
                yes_no(level.coherent),
                yes_no(level.shift_commuting)
            ),
        );
    }
    let ext_depth = depth.saturating_sub(1).max(1);
    let mut ext_checks = 0usize;
    let mut ext_failures = Vec::new();
    if rep.verified() {
        for n in 1..=ext_depth {
            for w in x1.language(n) {
                ext_checks += 1;
                match extend_to_otw(h, x1, x2, &w) {
                    Ok(v) if v.len() == w.len() => {
                        if n >= 2 {
                            let tail = extend_to_otw(h, x1, x2, &w.slice(1, n));
                            if tail.as_ref().ok() != Some(&v.slice(1, n)) {
                                ext_failures.push(format!("extension does not commute with the shift at {w}"));
                            }
                        }
                    }
                    Ok(v) => ext_failures.push(format!("h({w}) = {v} changes length")),
                    Err(e) => ext_failures.push(e.to_string()),
                }
            }
        }
        let cyl = check_cylinder_images(h, x1, x2, depth.min(4), depth.min(4))?;
        r.push("cylinders", cyl.cylinders);
        r.push("cylinder_checks", cyl.checks);
        r.push("cylinder_failures", cyl.failures.len());
        ext_failures.extend(cyl.failures);
    }
    r.push("extension_depth", ext_depth);
    r.push("extension_checks", ext_checks);
    let all: Vec<&String> = rep.failures.iter().chain(&ext_failures).collect();
    for (i, f) in all.iter().take(20).enumerate() {
        r.push(format!("failure.{i}"), f);
    }
    r.push("verified", yes_no(all.is_empty()));
    Ok(r)
}

pub fn cmd_conjugacy(ctx: &Ctx, source: &Path, target: &Path, code: &Path) -> Result<Report> {
    let x1 = ctx.load(source)?.presentation;
    let x2 = ctx.load(target)?.presentation;
    let text = std::fs::read_to_string(code).with_context(|| format!("reading {}", code.display()))?;
    let doc = CodeDocument::parse(&text).with_context(|| format!("invalid code in {}", code.display()))?;
    let h = parse_code(&x1, &x2, &doc).with_context(|| format!("invalid code in {}", code.display()))?;
    if let Some(d) = h.depth() {
        if d < ctx.bounds.depth {
            return Err(anyhow!("code table reaches depth {d}; --bound-depth asks for {}", ctx.bounds.depth));
        }
    }
    conjugacy_report(ctx, &h, &x1, &x2)
}
