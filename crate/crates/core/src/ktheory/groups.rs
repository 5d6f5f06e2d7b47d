//! Finitely described abelian groups of the form
//! `ℤ^r ⊕ T ⊕ (⊕_ℕ ℤ)^m ⊕ ⊕_ℕ T'`, stored raw and compared canonically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AbGroupInvariants {
    pub free_rank: u64,
    /// Invariant factors `d > 1` of the finite torsion part.
    pub torsion: Vec<u64>,
    /// Number of `⊕_ℕ ℤ` summands.
    pub family_free_mult: u64,
    /// Divisors `d > 1` whose cyclic groups each occur countably often.
    pub family_torsion: Vec<u64>,
}

impl AbGroupInvariants {
    pub fn finite(free_rank: u64, torsion: Vec<u64>) -> AbGroupInvariants {
        AbGroupInvariants { free_rank, torsion: invariant_factors(&torsion), ..Default::default() }
    }

    pub fn free(rank: u64) -> AbGroupInvariants {
        AbGroupInvariants::finite(rank, Vec::new())
    }

    pub fn countable_free() -> AbGroupInvariants {
        AbGroupInvariants { family_free_mult: 1, ..Default::default() }
    }

    pub fn is_trivial(&self) -> bool {
        self.canonical() == AbGroupInvariants::default()
    }

    /// Absorbs finite pieces into the countable ones: `ℤ^r ⊕ ⊕_ℕ ℤ ≅ ⊕_ℕ ℤ`,
    /// `(⊕_ℕ ℤ)^m ≅ ⊕_ℕ ℤ`, and `ℤ/p^k ⊕ ⊕_ℕ ℤ/p^k ≅ ⊕_ℕ ℤ/p^k`. Torsion is
    /// normalized through elementary divisors.
    pub fn canonical(&self) -> AbGroupInvariants {
        let fam: BTreeSet<u64> = self.family_torsion.iter().flat_map(|&d| elementary_divisors(d)).collect();
        let fin: Vec<u64> = self
            .torsion
            .iter()
            .flat_map(|&d| elementary_divisors(d))
            .filter(|q| !fam.contains(q))
            .collect();
        let countable = self.family_free_mult > 0;
        AbGroupInvariants {
            free_rank: if countable { 0 } else { self.free_rank },
            torsion: invariant_factors(&fin),
            family_free_mult: u64::from(countable),
            family_torsion: fam.into_iter().collect(),
        }
    }

    pub fn iso(&self, other: &AbGroupInvariants) -> bool {
        self.canonical() == other.canonical()
    }

    /// Direct sum.
    pub fn sum(&self, other: &AbGroupInvariants) -> AbGroupInvariants {
        let mut t = self.torsion.clone();
        t.extend(&other.torsion);
        let mut ft = self.family_torsion.clone();
        ft.extend(&other.family_torsion);
        ft.sort_unstable();
        AbGroupInvariants {
            free_rank: self.free_rank + other.free_rank,
            torsion: invariant_factors(&t),
            family_free_mult: self.family_free_mult + other.family_free_mult,
            family_torsion: ft,
        }
    }
}

impl fmt::Display for AbGroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        match self.family_free_mult {
            0 => {}
            1 => parts.push("sum_N Z".to_string()),
            m => parts.push(format!("(sum_N Z)^{m}")),
        }
        parts.extend(self.family_torsion.iter().map(|d| format!("sum_N Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Prime-power factors of `d` (empty for `d ≤ 1`).
pub fn elementary_divisors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d % p == 0 {
            let mut q = 1;
            while d % p == 0 {
                d /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// The invariant-factor chain `d₁ | d₂ | …` (all `> 1`) of `⊕ ℤ/dᵢ`.
pub fn invariant_factors(ds: &[u64]) -> Vec<u64> {
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &d in ds {
        for q in elementary_divisors(d) {
            by_prime.entry(smallest_prime(q)).or_default().push(q);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for qs in by_prime.values_mut() {
        qs.sort_unstable();
        let off = len - qs.len();
        for (i, q) in qs.iter().enumerate() {
            out[off + i] *= q;
        }
    }
    out
}

fn smallest_prime(q: u64) -> u64 {
    (2..=q).find(|p| q % p == 0).unwrap_or(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displays() {
        assert_eq!(AbGroupInvariants::free(2).to_string(), "Z^2");
        assert_eq!(AbGroupInvariants::default().to_string(), "0");
        let g = AbGroupInvariants { free_rank: 1, family_free_mult: 1, ..Default::default() };
        assert_eq!(g.to_string(), "Z + sum_N Z");
        assert_eq!(g.canonical().to_string(), "sum_N Z");
    }

    #[test]
    fn torsion_normalizes() {
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[6, 4]), vec![2, 12]);
        assert_eq!(invariant_factors(&[]), Vec::<u64>::new());
        let a = AbGroupInvariants::finite(0, vec![2, 3]);
        let b = AbGroupInvariants::finite(0, vec![6]);
        assert!(a.iso(&b));
        let c = AbGroupInvariants { torsion: vec![4], family_torsion: vec![4], ..Default::default() };
        assert_eq!(c.canonical().torsion, Vec::<u64>::new());
        let d = AbGroupInvariants { torsion: vec![4], family_torsion: vec![2], ..Default::default() };
        assert_eq!(d.canonical().torsion, vec![4]);
    }
}
