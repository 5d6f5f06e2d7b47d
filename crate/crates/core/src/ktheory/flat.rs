//! `(1 − Φ)` for flat presentations as an index-uniform integer matrix, with
//! a closed form for its kernel and cokernel.
//!
//! Every singleton lies in `𝒰` (a long enough prefix isolates a point), and
//! the tail signature of a set in `𝒰` (the families it contains cofinitely)
//! is a union of *blocks*: the atoms of the Boolean algebra generated by the
//! signatures of the sets `C(α,β)`. The χ-basis is therefore the singletons
//! plus one lift per block.
//!
//! Family members at indices `j ≥ K` (the uniform bound) have columns
//! `χ_{f(j)} − χ_{σ f(j)}` that depend on `j` only through the index, which
//! gives the block shape `[[P, N, N, …], [0, M, 0, …], [0, 0, M, …], …]`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ktheory::groups::{elementary_divisors, AbGroupInvariants};
use crate::ktheory::snf::{smith_normal_form, Matrix};
use crate::presentations::flat::{FlatPresentation, PointId};
use crate::setalg::flat::{FlatSet, IdxSet};
use crate::symbolic::{Index, PointTemplate, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Singleton of an explicit point or of a family member below `K`.
    Point(PointId),
    /// The union of a block's families, or all of `X` when the block holds
    /// every family.
    Lift { families: Vec<usize>, whole_space: bool },
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub label: String,
    pub set: FlatSet,
    pub regular: bool,
}

#[derive(Clone, Debug)]
pub struct ChiBasis {
    /// Finitely many generators; their order is the row order of the
    /// assembled matrix.
    pub explicit: Vec<Generator>,
    /// Family `f` contributes `χ_{f(j)}` for each `j ≥ uniform_from`; all of
    /// these are regular.
    pub family_labels: Vec<String>,
    pub uniform_from: u64,
    pub blocks: Vec<Vec<usize>>,
}

impl ChiBasis {
    pub fn regular_explicit(&self) -> Vec<usize> {
        (0..self.explicit.len()).filter(|&i| self.explicit[i].regular).collect()
    }

    fn point_row(&self, id: PointId) -> Option<usize> {
        self.explicit.iter().position(|g| g.kind == GeneratorKind::Point(id))
    }
}

/// Coordinates of a set in the χ-basis: finitely many explicit coordinates
/// and finitely many uniform family members `(f, j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expansion {
    pub explicit: Vec<i128>,
    pub members: BTreeMap<(usize, u64), i128>,
}

impl Expansion {
    fn add(&mut self, other: &Expansion, c: i128) {
        for (a, b) in self.explicit.iter_mut().zip(&other.explicit) {
            *a += c * b;
        }
        for (k, v) in &other.members {
            *self.members.entry(*k).or_insert(0) += c * v;
        }
        self.members.retain(|_, v| *v != 0);
    }

    /// Value at a point of the function this expansion denotes.
    fn value_at(&self, basis: &ChiBasis, id: PointId) -> i128 {
        let mut v: i128 = basis
            .explicit
            .iter()
            .zip(&self.explicit)
            .filter(|(g, _)| g.set.contains_id(id))
            .map(|(_, c)| *c)
            .sum();
        if let PointId::Member(f, Index::Nat(c)) = id {
            v += self.members.get(&(f, c)).copied().unwrap_or(0);
        }
        v
    }
}

/// Uniform bound: at and above it, family members are generic and no family
/// is still below its start.
pub fn uniform_bound(p: &FlatPresentation) -> u64 {
    p.families().iter().map(|f| f.start).max().unwrap_or(0).max(p.bound())
}

fn words_up_to(p: &FlatPresentation, len: usize) -> Vec<Word> {
    (0..=len).flat_map(|n| p.language_words(n)).collect()
}

fn refine(blocks: &mut Vec<Vec<usize>>, sig: &[usize]) -> bool {
    let mut changed = false;
    let mut out = Vec::new();
    for b in blocks.drain(..) {
        let (inside, outside): (Vec<usize>, Vec<usize>) = b.iter().partition(|f| sig.contains(f));
        if !inside.is_empty() && !outside.is_empty() {
            changed = true;
            out.push(inside);
            out.push(outside);
        } else {
            out.push(b);
        }
    }
    out.sort();
    *blocks = out;
    changed
}

/// Blocks of families from the signatures of `C(α,β)` with `|α|, |β| ≤ L`,
/// where `L` is one past the longest template; the partition must not change
/// at `L + 1` and `L + 2`.
pub fn closure_blocks(p: &FlatPresentation) -> Result<Vec<Vec<usize>>> {
    let nf = p.families().len();
    if nf == 0 {
        return Ok(Vec::new());
    }
    let longest = p
        .explicit()
        .iter()
        .chain(p.families().iter().map(|f| &f.template))
        .map(|t| t.pre().len() + t.per().len())
        .max()
        .unwrap_or(1);
    let base = longest + 1;
    let mut blocks = vec![(0..nf).collect::<Vec<_>>()];
    let ws = words_up_to(p, base);
    for a in &ws {
        for b in &ws {
            let s = p.set_c(a, b)?;
            refine(&mut blocks, &s.signature());
        }
    }
    for extra in [base + 1, base + 2] {
        let ws = words_up_to(p, extra);
        for a in &ws {
            for b in ws.iter().filter(|w| w.len() == extra).chain(ws.iter().filter(|_| a.len() == extra)) {
                let s = p.set_c(a, b)?;
                let mut probe = blocks.clone();
                if refine(&mut probe, &s.signature()) {
                    return Err(Error::Closure(format!(
                        "C({a}, {b}) = {} splits the family partition first seen at word length {extra}",
                        p.set_describe(&s)
                    )));
                }
            }
        }
    }
    Ok(blocks)
}

pub fn build_chi_basis(p: &FlatPresentation) -> Result<ChiBasis> {
    let k = uniform_bound(p);
    let blocks = closure_blocks(p)?;
    let mut explicit = Vec::new();
    let singleton = |id: PointId| -> Result<Generator> {
        let set = p.set_singleton(id)?;
        Ok(Generator {
            kind: GeneratorKind::Point(id),
            label: p.set_describe(&set),
            regular: p.set_letters(&set).is_regular(),
            set,
        })
    };
    for i in 0..p.explicit().len() {
        explicit.push(singleton(PointId::Explicit(i))?);
    }
    for (f, fam) in p.families().iter().enumerate() {
        for c in fam.start..k {
            explicit.push(singleton(PointId::Member(f, Index::Nat(c)))?);
        }
    }
    let nf = p.families().len();
    for b in &blocks {
        let whole_space = b.len() == nf;
        let mut set = if whole_space { p.set_full() } else { p.set_empty() };
        for &f in b {
            set.fams[f] = IdxSet { cofinite: true, ex: Default::default() };
        }
        let label = if whole_space { "X".to_string() } else { p.set_describe(&set) };
        explicit.push(Generator {
            kind: GeneratorKind::Lift { families: b.clone(), whole_space },
            label,
            regular: p.set_letters(&set).is_regular(),
            set,
        });
    }
    let family_labels = p.families().iter().map(|f| format!("{{{}}}", f.template)).collect();
    Ok(ChiBasis { explicit, family_labels, uniform_from: k, blocks })
}

/// Coordinates of `s ∈ 𝒰`; fails when the tail signature is not a union of
/// blocks, i.e. when `s` lies outside the algebra the basis spans.
pub fn expand(p: &FlatPresentation, basis: &ChiBasis, s: &FlatSet) -> Result<Expansion> {
    let mut out = Expansion { explicit: vec![0; basis.explicit.len()], members: BTreeMap::new() };
    let sig = s.signature();
    let mut covered = vec![false; p.families().len()];
    for (gi, g) in basis.explicit.iter().enumerate() {
        let GeneratorKind::Lift { families, .. } = &g.kind else { continue };
        let hits = families.iter().filter(|f| sig.contains(f)).count();
        if hits == families.len() {
            out.explicit[gi] = 1;
            for &f in families {
                covered[f] = true;
            }
        } else if hits > 0 {
            return Err(Error::Closure(format!("{} is not in the generated algebra", p.set_describe(s))));
        }
    }
    let lift_cover = |id: PointId| -> i128 {
        basis
            .explicit
            .iter()
            .zip(&out.explicit)
            .filter(|(g, _)| matches!(g.kind, GeneratorKind::Lift { .. }) && g.set.contains_id(id))
            .map(|(_, c)| *c)
            .sum()
    };
    let mut residual: Vec<(PointId, i128)> = Vec::new();
    for i in 0..p.explicit().len() {
        let id = PointId::Explicit(i);
        let d = i128::from(s.contains_id(id)) - lift_cover(id);
        if d != 0 {
            residual.push((id, d));
        }
    }
    for (f, idx) in s.fams.iter().enumerate() {
        // Only the exceptions differ from the lift coverage of family `f`.
        for &c in &idx.ex {
            let id = PointId::Member(f, Index::Nat(c));
            let d = i128::from(idx.contains(c)) - i128::from(covered[f]);
            if d != 0 {
                residual.push((id, d));
            }
        }
    }
    for (id, d) in residual {
        match (basis.point_row(id), id) {
            (Some(row), _) => out.explicit[row] += d,
            (None, PointId::Member(f, Index::Nat(c))) => {
                *out.members.entry((f, c)).or_insert(0) += d;
            }
            _ => return Err(Error::Invalid(format!("no basis element for {}", p.point(id)))),
        }
    }
    Ok(out)
}

/// `χ_A − Σ_{a ∈ ℒ(A)} χ_{r(A,a)}` through the set algebra.
pub fn column_of(p: &FlatPresentation, basis: &ChiBasis, a: &FlatSet) -> Result<Expansion> {
    let letters = p.set_letters(a);
    if !letters.is_regular() {
        return Err(Error::Invalid(format!("{} is not regular", p.set_describe(a))));
    }
    let mut col = expand(p, basis, a)?;
    for l in &letters.finite {
        let r = p.set_relative_range(a, &Word(vec![l.clone()]))?;
        col.add(&expand(p, basis, &r)?, -1);
    }
    Ok(col)
}

/// The same column read pointwise: at `x` it is `[x ∈ A] − |{a : ax ∈ A}|`.
fn column_value_direct(p: &FlatPresentation, a: &FlatSet, x: &PointTemplate) -> i128 {
    let inside = |t: &PointTemplate| p.locate(t).is_some_and(|id| a.contains_id(id));
    let letters = p.set_letters(a);
    let hits = letters.finite.iter().filter(|l| inside(&x.prepend(&Word(vec![(*l).clone()])))).count();
    i128::from(inside(x)) - hits as i128
}

#[derive(Clone, Debug)]
pub struct ParametricIntMatrix {
    /// Row labels of the explicit generators.
    pub rows: Vec<String>,
    /// Explicit generators with a column (the regular ones), as row indices.
    pub cols: Vec<usize>,
    pub family_labels: Vec<String>,
    /// Explicit columns, all rows explicit.
    pub p: Matrix,
    /// Family-to-family block at each index `j ≥ uniform_from`.
    pub m: Matrix,
    /// Family-to-explicit leak, the same at every index.
    pub n: Matrix,
    pub uniform_from: u64,
}

impl ParametricIntMatrix {
    /// The full matrix restricted to family indices `uniform_from ..
    /// uniform_from + count`.
    pub fn truncated(&self, count: usize) -> Matrix {
        let (e, c, f) = (self.rows.len(), self.cols.len(), self.family_labels.len());
        let mut t = Matrix::zeros(e + f * count, c + f * count);
        for i in 0..e {
            for j in 0..c {
                t.set(i, j, self.p.get(i, j));
            }
        }
        for k in 0..count {
            for g in 0..f {
                let col = c + k * f + g;
                for i in 0..e {
                    t.set(i, col, self.n.get(i, g));
                }
                for h in 0..f {
                    t.set(e + k * f + h, col, self.m.get(h, g));
                }
            }
        }
        t
    }
}

/// Assembles `1 − Φ`, probing the family columns at three consecutive
/// indices and cross-checking every probed column pointwise.
pub fn assemble_one_minus_phi(p: &FlatPresentation, basis: &ChiBasis) -> Result<ParametricIntMatrix> {
    let e = basis.explicit.len();
    let nf = p.families().len();
    let k = basis.uniform_from;
    let cols = basis.regular_explicit();
    let mut probes: Vec<PointTemplate> = p.rep_points();
    for f in p.families() {
        for c in k..k + 4 {
            probes.push(f.template.instantiate(c));
        }
    }

    let mut pcols = Vec::new();
    for &gi in &cols {
        let g = &basis.explicit[gi];
        let col = column_of(p, basis, &g.set)?;
        if !col.members.is_empty() {
            return Err(Error::NonUniform(format!("column of {} reaches uniform family members", g.label)));
        }
        check_pointwise(p, basis, &g.set, &col, &probes, &g.label)?;
        pcols.push(col.explicit);
    }

    let mut m = Matrix::identity(nf);
    let mut n = Matrix::zeros(e, nf);
    for (f, fam) in p.families().iter().enumerate() {
        let image = fam.template.shift();
        match p.locate(&image) {
            Some(PointId::Member(g, Index::Param)) => m.set(g, f, m.get(g, f) - 1),
            Some(id) => {
                let row = basis
                    .point_row(id)
                    .ok_or_else(|| Error::NonUniform(format!("shift of {} leaves the basis", fam.template)))?;
                n.set(row, f, n.get(row, f) - 1);
            }
            None => return Err(Error::Invalid(format!("σ({}) is not a point of X", fam.template))),
        }
        for c in k..k + 3 {
            let s = p.set_singleton(PointId::Member(f, Index::Nat(c)))?;
            let col = column_of(p, basis, &s)?;
            let mut predicted = Expansion { explicit: n.col(f), members: BTreeMap::new() };
            for g in 0..nf {
                if m.get(g, f) != 0 {
                    predicted.members.insert((g, c), m.get(g, f));
                }
            }
            if col != predicted {
                return Err(Error::NonUniform(format!(
                    "column of {{{}}} differs from the uniform family column",
                    fam.template.instantiate(c)
                )));
            }
            check_pointwise(p, basis, &s, &col, &probes, &fam.name)?;
        }
    }

    Ok(ParametricIntMatrix {
        rows: basis.explicit.iter().map(|g| g.label.clone()).collect(),
        p: Matrix::from_cols(e, &pcols),
        cols,
        family_labels: basis.family_labels.clone(),
        m,
        n,
        uniform_from: k,
    })
}

fn check_pointwise(
    p: &FlatPresentation,
    basis: &ChiBasis,
    a: &FlatSet,
    col: &Expansion,
    probes: &[PointTemplate],
    label: &str,
) -> Result<()> {
    for x in probes {
        let Some(id) = p.locate(x) else { continue };
        if col.value_at(basis, id) != column_value_direct(p, a, x) {
            return Err(Error::Invalid(format!("column of {label} disagrees pointwise at {x}")));
        }
    }
    Ok(())
}

/// A kernel element as labelled coefficients.
pub type Combination = Vec<(String, i128)>;

#[derive(Clone, Debug, Serialize)]
pub struct KernelBasis {
    /// Finitely many basis vectors over the explicit generators (and, when
    /// the leak is nonzero, family members at index `per_index_from - 1`).
    pub finite: Vec<Combination>,
    /// For every `j ≥ per_index_from` one vector per entry, over the family
    /// generators at index `j` (minus the same vector at `per_index_from - 1`
    /// when `relative` is set).
    pub per_index: Vec<Combination>,
    pub per_index_from: u64,
    pub relative: bool,
}

#[derive(Clone, Debug)]
pub struct FlatKTheory {
    pub basis: ChiBasis,
    pub matrix: ParametricIntMatrix,
    pub k0: AbGroupInvariants,
    pub k1: AbGroupInvariants,
    pub kernel: KernelBasis,
    pub checks: Vec<(String, bool)>,
}

fn normalize_sign(v: &mut [i128]) {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn combination(labels: &[String], v: &[i128]) -> Combination {
    labels.iter().zip(v).filter(|(_, &c)| c != 0).map(|(l, &c)| (l.clone(), c)).collect()
}

/// Multiset of elementary divisors.
fn elementary(ds: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = ds.iter().flat_map(|&d| elementary_divisors(d)).collect();
    v.sort_unstable();
    v
}

pub fn k_groups(p: &FlatPresentation) -> Result<FlatKTheory> {
    let basis = build_chi_basis(p)?;
    let matrix = assemble_one_minus_phi(p, &basis)?;
    let (e, c, f) = (matrix.rows.len(), matrix.cols.len(), matrix.family_labels.len());

    let ms = smith_normal_form(&matrix.m)?;
    let r = ms.rank();
    let kprime = f - r;
    let n_prime = matrix.n.mul(&ms.right)?;

    // Cokernel: one representative copy of each nondegenerate family row
    // joins the finite part; the rest is torsion or free per index.
    let mut tcols: Vec<Vec<i128>> = (0..c).map(|j| {
        let mut v = matrix.p.col(j);
        v.resize(e + r, 0);
        v
    }).collect();
    for i in 0..f {
        let mut v = n_prime.col(i);
        v.resize(e + r, 0);
        if i < r {
            v[e + i] = ms.diag[i];
        }
        tcols.push(v);
    }
    let fin = smith_normal_form(&Matrix::from_cols(e + r, &tcols))?;
    let family_torsion: Vec<u64> = ms.invariant_factors();
    let k0 = AbGroupInvariants {
        free_rank: fin.coker_free_rank() as u64,
        torsion: fin.invariant_factors(),
        family_free_mult: kprime as u64,
        family_torsion: family_torsion.clone(),
    };

    // Kernel: per-index vectors lie in ker M; their sum must be balanced
    // against the explicit part through the leak.
    let ker_m: Vec<Vec<i128>> = ms.kernel_basis();
    let n2 = Matrix::from_cols(e, &ker_m.iter().map(|v| matrix.n.mul_vec(v)).collect::<Result<Vec<_>>>()?);
    let joined = matrix.p.hcat(&n2);
    let js = smith_normal_form(&joined)?;
    let intercept = c as i64 - js.rank() as i64;
    let k1 = AbGroupInvariants {
        free_rank: intercept.max(0) as u64,
        torsion: Vec::new(),
        family_free_mult: kprime as u64,
        family_torsion: Vec::new(),
    };

    let mut checks = Vec::new();
    let n0 = 2usize;
    for count in [n0, n0 + 1, n0 + 2] {
        let t = matrix.truncated(count);
        let s = smith_normal_form(&t)?;
        let ker_ok = s.kernel_rank() as i64 == intercept + (count * kprime) as i64;
        let mut torsion = fin.invariant_factors();
        for _ in 1..count {
            torsion.extend(&family_torsion);
        }
        let coker_ok = s.coker_free_rank() == fin.coker_free_rank() + kprime * count
            && elementary(&s.invariant_factors()) == elementary(&torsion);
        let cutoff = matrix.uniform_from + count as u64;
        checks.push((format!("truncation below index {cutoff} matches closed form"), ker_ok && coker_ok));
        if !(ker_ok && coker_ok) {
            return Err(Error::NonUniform(format!(
                "truncated invariants below index {cutoff} do not follow the per-index progression"
            )));
        }
    }

    let labels: Vec<String> = matrix.cols.iter().map(|&i| matrix.rows[i].clone()).collect();
    let fam_labels: Vec<String> = matrix.family_labels.clone();
    let kernel = if n2.is_zero() {
        let ps = smith_normal_form(&matrix.p)?;
        let finite = ps
            .kernel_basis()
            .into_iter()
            .map(|mut v| {
                normalize_sign(&mut v);
                combination(&labels, &v)
            })
            .collect();
        let per_index = ker_m
            .iter()
            .map(|v| {
                let mut v = v.clone();
                normalize_sign(&mut v);
                combination(&fam_labels, &v)
            })
            .collect();
        KernelBasis { finite, per_index, per_index_from: matrix.uniform_from, relative: false }
    } else {
        let at_k: Vec<String> =
            p.families().iter().map(|fam| format!("{{{}}}", fam.template.instantiate(matrix.uniform_from))).collect();
        let finite = js
            .kernel_basis()
            .into_iter()
            .map(|mut v| {
                normalize_sign(&mut v);
                let mut comb = combination(&labels, &v[..c]);
                let mut fam = vec![0i128; f];
                for (w, coeff) in ker_m.iter().zip(&v[c..]) {
                    for (acc, x) in fam.iter_mut().zip(w) {
                        *acc += coeff * x;
                    }
                }
                comb.extend(combination(&at_k, &fam));
                comb
            })
            .collect();
        let per_index = ker_m
            .iter()
            .map(|v| {
                let mut v = v.clone();
                normalize_sign(&mut v);
                combination(&fam_labels, &v)
            })
            .collect();
        KernelBasis { finite, per_index, per_index_from: matrix.uniform_from + 1, relative: true }
    };

    Ok(FlatKTheory { basis, matrix, k0, k1, kernel, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn chuva_basis_and_groups() {
        let p = corpus::chuva_flat();
        let kt = k_groups(&p).unwrap();
        let labels: Vec<&str> = kt.basis.explicit.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(labels, vec!["{(c)}", "X"]);
        assert!(kt.basis.explicit[0].regular);
        assert!(!kt.basis.explicit[1].regular);
        assert_eq!(kt.basis.family_labels.len(), 2);
        assert_eq!(kt.k0, AbGroupInvariants::free(2));
        assert_eq!(kt.k1, AbGroupInvariants::free(1));
    }

    #[test]
    fn tripla_groups_raw_and_canonical() {
        let p = corpus::tripla_flat();
        let kt = k_groups(&p).unwrap();
        assert_eq!(kt.k1.to_string(), "Z + sum_N Z");
        assert_eq!(kt.k1.canonical(), AbGroupInvariants::countable_free());
        assert_eq!(kt.k0.canonical(), AbGroupInvariants::countable_free());
        let regular: Vec<bool> = kt.basis.explicit.iter().map(|g| g.regular).collect();
        assert_eq!(regular, vec![true, true, false]);
        assert_eq!(kt.kernel.finite, vec![vec![("{(0)}".to_string(), 1)]]);
        assert_eq!(kt.kernel.per_index, vec![vec![("{(0 j)}".to_string(), 1), ("{(j 0)}".to_string(), 1)]]);
    }

    #[test]
    fn leak_only_family_has_no_kernel() {
        // A single family f(j) = j (0) leaking to 0^∞.
        use crate::presentations::{LetterFamily, PointFamily, SchemaLetter};
        use crate::symbolic::Letter;
        let zero = Letter::concrete("0");
        let p = FlatPresentation::new(
            vec!["0".into()],
            vec![LetterFamily { name: "a".into(), start: 0 }],
            vec![vec![SchemaLetter::Concrete("0".into()), SchemaLetter::Concrete("0".into())], vec![
                SchemaLetter::Var("a".into()),
                SchemaLetter::Concrete("0".into()),
            ]],
            vec![PointTemplate::periodic(Word(vec![zero.clone()])).unwrap()],
            vec![PointFamily {
                name: "f".into(),
                template: PointTemplate::new(Word(vec![Letter::param("a")]), Word(vec![zero])).unwrap(),
                start: 0,
            }],
        )
        .unwrap();
        let kt = k_groups(&p).unwrap();
        // Basis {0^∞}, X and the singletons {a_j 0^∞}: coker ℤ², ker ℤ.
        assert_eq!(kt.k0, AbGroupInvariants::free(2));
        assert_eq!(kt.k1, AbGroupInvariants::free(1));
    }
}
