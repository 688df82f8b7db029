//! Small posets, topologies, Heyting algebras and interior algebras up to
//! isomorphism, and the JSON catalog file that stores them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Limits;
use crate::error::{Error, Result};
use crate::finlat::{downset_heyting_sets, FinitePoset, HeytingAlgebra};
use crate::io::{Object, Record};
use crate::modal::{interior_from_preorder, validate_modal, ModalAlgebra};

pub const MAX_POSET_POINTS: usize = 7;
pub const MAX_TOPOLOGY_POINTS: usize = 4;
pub const CATALOG_VERSION: u32 = 1;

/// Calls `f` on every permutation of `0..n`, in lexicographic order.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// The lexicographically least relation matrix (row-major, `false < true`)
/// over all relabellings of `leq`.
pub fn canonical_relation(leq: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = leq.len();
    let mut best: Vec<bool> = leq.iter().flatten().copied().collect();
    for_each_permutation(n, |p| {
        let mut better = false;
        for i in 0..n {
            for j in 0..n {
                let bit = leq[p[i]][p[j]];
                let cell = &mut best[i * n + j];
                if better {
                    *cell = bit;
                } else if bit != *cell {
                    if bit {
                        return;
                    }
                    better = true;
                    *cell = bit;
                }
            }
        }
    });
    best.chunks(n.max(1)).take(n).map(<[bool]>::to_vec).collect()
}

fn check_points(n: usize, max: usize, what: &'static str) -> Result<()> {
    if n > max {
        return Err(Error::cap(what, n as u128, max as u128));
    }
    Ok(())
}

/// One poset per isomorphism class on `n` points, each in canonical form,
/// sorted by relation matrix.
pub fn enumerate_posets(n: usize) -> Result<Vec<FinitePoset>> {
    check_points(n, MAX_POSET_POINTS, "poset points")?;
    // every poset is a smaller one plus a maximal point above some downset
    let mut level: Vec<Vec<Vec<bool>>> = vec![vec![]];
    for m in 0..n {
        let candidates: Vec<Vec<Vec<bool>>> = level
            .iter()
            .flat_map(|leq| {
                let p = FinitePoset::new(leq.clone()).expect("catalog posets are valid");
                let downsets = p.downsets(usize::MAX).expect("uncapped");
                downsets.into_iter().map(move |d| {
                    let mut next: Vec<Vec<bool>> = leq
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            let mut row = row.clone();
                            row.push(d & (1 << i) != 0);
                            row
                        })
                        .collect();
                    let mut last = vec![false; m + 1];
                    last[m] = true;
                    next.push(last);
                    next
                })
            })
            .collect();
        level = candidates
            .par_iter()
            .map(|leq| canonical_relation(leq))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
    }
    level.into_iter().map(FinitePoset::new).collect()
}

/// All preorders on `k` labelled points, by increasing relation code.
pub fn labeled_preorders(k: usize) -> Result<Vec<Vec<Vec<bool>>>> {
    check_points(k, MAX_TOPOLOGY_POINTS, "topology points")?;
    let off: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let out = (0u32..1 << off.len())
        .into_par_iter()
        .filter_map(|code| {
            let mut leq = vec![vec![false; k]; k];
            for i in 0..k {
                leq[i][i] = true;
            }
            for (b, &(i, j)) in off.iter().enumerate() {
                leq[i][j] = code & (1 << b) != 0;
            }
            let transitive = (0..k).all(|i| {
                (0..k).all(|j| !leq[i][j] || (0..k).all(|l| !leq[j][l] || leq[i][l]))
            });
            transitive.then_some(leq)
        })
        .collect();
    Ok(out)
}

/// The interior algebras of all topologies on `k` labelled points.
pub fn labeled_interior(k: usize) -> Result<Vec<ModalAlgebra>> {
    Ok(labeled_preorders(k)?
        .iter()
        .map(|leq| interior_from_preorder(leq))
        .collect())
}

/// Relabelling of `m` with the lexicographically least box table.
pub fn canonical_interior(m: &ModalAlgebra) -> ModalAlgebra {
    let mut best = m.clone();
    for_each_permutation(m.atoms(), |p| {
        let c = m.permute(p);
        if c.box_table() < best.box_table() {
            best = c;
        }
    });
    best
}

/// One interior algebra per topology on `k` points up to homeomorphism,
/// each in canonical form, sorted by box table.
pub fn enumerate_interior(k: usize) -> Result<Vec<ModalAlgebra>> {
    let canon: BTreeMap<Vec<u32>, ModalAlgebra> = labeled_interior(k)?
        .par_iter()
        .map(|m| {
            let c = canonical_interior(m);
            (c.box_table().to_vec(), c)
        })
        .collect();
    Ok(canon.into_values().collect())
}

/// Interior algebras on at most `k` atoms, smallest first.
pub fn interior_up_to(k: usize) -> Result<Vec<ModalAlgebra>> {
    let mut out = Vec::new();
    for j in 0..=k {
        out.extend(enumerate_interior(j)?);
    }
    Ok(out)
}

/// The Grzegorczyk algebras among [`interior_up_to`].
pub fn grz_up_to(k: usize) -> Result<Vec<ModalAlgebra>> {
    Ok(interior_up_to(k)?
        .into_iter()
        .filter(|m| validate_modal(m).grz)
        .collect())
}

/// Heyting algebras with at most `max_size` elements, one per isomorphism
/// class, ordered by size and then by the canonical form of their poset of
/// join-irreducibles.
pub fn enumerate_heyting(max_size: usize) -> Result<Vec<HeytingAlgebra>> {
    Ok(enumerate_heyting_with_posets(max_size)?
        .into_iter()
        .map(|(h, _)| h)
        .collect())
}

pub fn enumerate_heyting_with_posets(max_size: usize) -> Result<Vec<(HeytingAlgebra, FinitePoset)>> {
    if max_size == 0 {
        return Ok(Vec::new());
    }
    // n points give at least n + 1 downsets
    check_points(max_size - 1, MAX_POSET_POINTS, "poset points")?;
    let limits = Limits {
        max_size,
        ..Limits::default()
    };
    let mut out = Vec::new();
    for n in 0..max_size {
        for p in enumerate_posets(n)? {
            if p.downsets(max_size).is_ok() {
                let (h, _) = downset_heyting_sets(&p, &limits)?;
                out.push((h, p));
            }
        }
    }
    out.sort_by_key(|(h, _)| h.size());
    Ok(out)
}

/// `{"version":1,"entries":{name: record}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogFile {
    pub version: u32,
    pub entries: BTreeMap<String, Record>,
}

impl Default for CatalogFile {
    fn default() -> Self {
        CatalogFile {
            version: CATALOG_VERSION,
            entries: BTreeMap::new(),
        }
    }
}

#[derive(Deserialize)]
struct RawCatalog {
    version: u32,
    #[serde(default)]
    entries: BTreeMap<String, serde_json::Value>,
}

impl CatalogFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, record: impl Into<Record>) {
        self.entries.insert(name.into(), record.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records always serialize");
        s.push('\n');
        s
    }

    /// Parses and re-validates every entry.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCatalog = serde_json::from_str(text)?;
        if raw.version != CATALOG_VERSION {
            return Err(Error::Version {
                found: raw.version,
                expected: CATALOG_VERSION,
            });
        }
        let mut entries = BTreeMap::new();
        for (name, value) in raw.entries {
            let invalid = |reason: String| Error::InvalidEntry {
                name: name.clone(),
                reason,
            };
            let record: Record = serde_json::from_value(value).map_err(|e| invalid(e.to_string()))?;
            record.decode().map_err(|e| invalid(e.to_string()))?;
            entries.insert(name, record);
        }
        Ok(CatalogFile {
            version: raw.version,
            entries,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Decoded entries, in name order.
    pub fn objects(&self) -> Result<Vec<(String, Object)>> {
        self.entries
            .iter()
            .map(|(name, r)| Ok((name.clone(), r.decode()?)))
            .collect()
    }
}

/// Posets on `0..=max_n` points, named `poset-{n}-{i}`.
pub fn poset_catalog(max_n: usize) -> Result<CatalogFile> {
    let mut file = CatalogFile::new();
    for n in 0..=max_n {
        for (i, p) in enumerate_posets(n)?.iter().enumerate() {
            file.insert(format!("poset-{n}-{i:03}"), p);
        }
    }
    Ok(file)
}

/// Interior algebras on `0..=max_k` atoms, named `interior-{k}-{i}`.
pub fn interior_catalog(max_k: usize) -> Result<CatalogFile> {
    let mut file = CatalogFile::new();
    for k in 0..=max_k {
        for (i, m) in enumerate_interior(k)?.iter().enumerate() {
            file.insert(format!("interior-{k}-{i:03}"), m);
        }
    }
    Ok(file)
}

/// Heyting algebras of size at most `max_size`, named `heyting-{size}-{i}`.
pub fn heyting_catalog(max_size: usize) -> Result<CatalogFile> {
    let mut file = CatalogFile::new();
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for h in enumerate_heyting(max_size)? {
        let i = seen.entry(h.size()).or_default();
        file.insert(format!("heyting-{}-{:03}", h.size(), i), &h);
        *i += 1;
    }
    Ok(file)
}
