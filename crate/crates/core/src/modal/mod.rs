//! Finite modal algebras on the powerset of an atom set.
//!
//! An element is the `u32` bitmask of the atoms below it, so the Boolean
//! operations are bit operations and only `□` needs a table.

mod filter;
mod grz;
mod subalg;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, Limits, Signature};
use crate::error::{Error, Result};
use crate::finlat::FinitePoset;
use crate::hom::{preserves, HomKind, HomSearch, Homomorphism, Preserve, SearchMode};

pub use filter::{
    classify_structure, open_filter_generated, open_filters, principal_filter, quotient, Filter,
    FilterKind, Structure,
};
pub use grz::{
    blok_characterization, maximal_open_filter, stable_witness_construct, BlokCharacterization,
    BlokWitness, StableWitness,
};
pub use subalg::{generated_subalgebra, BooleanSubalgebra, SubalgebraKind};

/// Atom index of the open atom `c` of S₁,₂.
pub const S12_OPEN_ATOM: usize = 2;

/// Hard limit from the `u32` element encoding.
pub const MAX_ATOMS: usize = 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModalAlgebra {
    atoms: usize,
    boxt: Vec<u32>,
}

impl fmt::Debug for ModalAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModalAlgebra")
            .field("atoms", &self.atoms)
            .field("box", &self.boxt)
            .finish()
    }
}

impl ModalAlgebra {
    /// Builds an algebra from its box table, checking shape and ranges only.
    pub fn new(atoms: usize, boxt: Vec<u32>) -> Result<Self> {
        Self::with_limits(atoms, boxt, &Limits::default())
    }

    pub fn with_limits(atoms: usize, boxt: Vec<u32>, limits: &Limits) -> Result<Self> {
        let cap = limits.max_atoms.min(MAX_ATOMS);
        if atoms > cap {
            return Err(Error::cap("atoms", atoms as u128, cap as u128));
        }
        let size = 1usize << atoms;
        if boxt.len() != size {
            return Err(Error::Malformed(format!(
                "box table has {} entries, expected 2^{atoms} = {size}",
                boxt.len()
            )));
        }
        if let Some(i) = boxt.iter().position(|&b| b as usize >= size) {
            return Err(Error::Malformed(format!(
                "box[{i}] = {} is not an element of a {atoms}-atom algebra",
                boxt[i]
            )));
        }
        Ok(ModalAlgebra { atoms, boxt })
    }

    pub(crate) fn from_fn(atoms: usize, f: impl Fn(u32) -> u32) -> Self {
        let boxt = (0..1u32 << atoms).map(f).collect();
        ModalAlgebra { atoms, boxt }
    }

    /// Two-element algebra with `□` the identity.
    pub fn two() -> Self {
        ModalAlgebra::from_fn(1, |a| a)
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn top_elem(&self) -> u32 {
        ((1u64 << self.atoms) - 1) as u32
    }

    pub fn box_of(&self, a: u32) -> u32 {
        self.boxt[a as usize]
    }

    pub fn box_table(&self) -> &[u32] {
        &self.boxt
    }

    pub fn not(&self, a: u32) -> u32 {
        !a & self.top_elem()
    }

    pub fn implies(&self, a: u32, b: u32) -> u32 {
        self.not(a) | b
    }

    pub fn is_open(&self, a: u32) -> bool {
        self.box_of(a) == a
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.atoms)
    }

    /// Does (Grz) `□(□(a→□a)→a) ≤ a` hold at `a`?
    pub fn grz_holds_at(&self, a: u32) -> bool {
        let t = self.grz_term(a);
        self.box_of(t) & !a == 0
    }

    /// `t(a) = □(a→□a)→a`.
    pub fn grz_term(&self, a: u32) -> u32 {
        let inner = self.box_of(self.implies(a, self.box_of(a)));
        self.implies(inner, a)
    }

    /// Atom-wise relabelling: atom `i` becomes atom `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> ModalAlgebra {
        let map = |s: u32| permute_mask(s, perm);
        let mut boxt = vec![0; self.boxt.len()];
        for s in self.elements() {
            boxt[map(s) as usize] = map(self.box_of(s));
        }
        ModalAlgebra {
            atoms: self.atoms,
            boxt,
        }
    }
}

pub(crate) fn permute_mask(s: u32, perm: &[usize]) -> u32 {
    perm.iter()
        .enumerate()
        .filter(|&(i, _)| s & (1 << i) != 0)
        .fold(0, |m, (_, &j)| m | (1 << j))
}

/// Packs the bits of `x` selected by `within` into the low bits.
pub(crate) fn compress(x: u32, within: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    for i in 0..32 {
        if within & (1 << i) != 0 {
            if x & (1 << i) != 0 {
                out |= 1 << k;
            }
            k += 1;
        }
    }
    out
}

/// Inverse of [`compress`]: spreads the low bits of `x` over `within`.
pub(crate) fn expand(x: u32, within: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    for i in 0..32 {
        if within & (1 << i) != 0 {
            if x & (1 << k) != 0 {
                out |= 1 << i;
            }
            k += 1;
        }
    }
    out
}

impl FiniteAlgebra for ModalAlgebra {
    fn signature(&self) -> Signature {
        Signature::Modal
    }
    fn size(&self) -> usize {
        1 << self.atoms
    }
    fn bot(&self) -> usize {
        0
    }
    fn top(&self) -> usize {
        self.top_elem() as usize
    }
    fn meet(&self, a: usize, b: usize) -> usize {
        a & b
    }
    fn join(&self, a: usize, b: usize) -> usize {
        a | b
    }
    fn imp(&self, a: usize, b: usize) -> usize {
        self.implies(a as u32, b as u32) as usize
    }
    fn neg(&self, a: usize) -> usize {
        self.not(a as u32) as usize
    }
    fn boxed(&self, a: usize) -> usize {
        self.boxt[a] as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModalClassification {
    #[serde(rename = "K")]
    pub k: bool,
    pub interior: bool,
    pub grz: bool,
    pub grz_witness: Option<u32>,
}

/// Classifies `m`: normal (K), interior (S4), Grzegorczyk. When `m` is
/// interior but not Grzegorczyk the least element violating (Grz) is given.
pub fn validate_modal(m: &ModalAlgebra) -> ModalClassification {
    let top = m.top_elem();
    let k = m.box_of(top) == top
        && m
            .elements()
            .all(|a| m.elements().all(|b| m.box_of(a & b) == m.box_of(a) & m.box_of(b)));
    let interior = k
        && m.elements().all(|a| {
            let b = m.box_of(a);
            m.box_of(b) == b && b & !a == 0
        });
    let grz_witness = if interior {
        m.elements().find(|&a| !m.grz_holds_at(a))
    } else {
        None
    };
    ModalClassification {
        k,
        interior,
        grz: interior && grz_witness.is_none(),
        grz_witness,
    }
}

/// Interior algebra of a finite preorder: `□S` is the set of points whose
/// whole down-set lies in `S`.
pub fn interior_from_preorder(leq: &[Vec<bool>]) -> ModalAlgebra {
    let n = leq.len();
    let downs: Vec<u32> = (0..n)
        .map(|j| (0..n).filter(|&i| leq[i][j]).fold(0, |m, i| m | (1 << i)))
        .collect();
    ModalAlgebra::from_fn(n, |s| {
        (0..n)
            .filter(|&j| downs[j] & !s == 0)
            .fold(0, |m, j| m | (1 << j))
    })
}

/// Complex algebra of a poset with `□S` = largest downset inside `S`.
pub fn complex_algebra(p: &FinitePoset) -> Result<ModalAlgebra> {
    complex_algebra_with_limits(p, &Limits::default())
}

pub fn complex_algebra_with_limits(p: &FinitePoset, limits: &Limits) -> Result<ModalAlgebra> {
    let cap = limits.max_atoms.min(MAX_ATOMS);
    if p.size() > cap {
        return Err(Error::cap("atoms", p.size() as u128, cap as u128));
    }
    Ok(interior_from_preorder(p.relation()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Standard {
    S2,
    S12,
}

impl Standard {
    pub fn algebra(self) -> ModalAlgebra {
        match self {
            Standard::S2 => ModalAlgebra::from_fn(2, |a| if a == 0b11 { a } else { 0 }),
            Standard::S12 => {
                let c = 1u32 << S12_OPEN_ATOM;
                ModalAlgebra::from_fn(3, move |a| match a {
                    0b111 => 0b111,
                    a if a & c != 0 => c,
                    _ => 0,
                })
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Standard::S2 => "S2",
            Standard::S12 => "S12",
        }
    }
}

impl FromStr for Standard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S2" => Ok(Standard::S2),
            "S12" => Ok(Standard::S12),
            other => Err(Error::Precondition(format!(
                "unknown standard algebra {other:?} (expected S2 or S12)"
            ))),
        }
    }
}

pub fn make_standard(name: &str) -> Result<ModalAlgebra> {
    name.parse::<Standard>().map(Standard::algebra)
}

/// Open elements `{a : □a = a}` in increasing order.
pub fn open_elements(m: &ModalAlgebra) -> Vec<u32> {
    m.elements().filter(|&a| m.is_open(a)).collect()
}

/// Product with atoms laid out as a disjoint union, first factor lowest.
pub fn modal_product(ms: &[ModalAlgebra], limits: &Limits) -> Result<ModalAlgebra> {
    let atoms: usize = ms.iter().map(|m| m.atoms).sum();
    let cap = limits.max_atoms.min(MAX_ATOMS);
    if atoms > cap {
        return Err(Error::cap("atoms", atoms as u128, cap as u128));
    }
    let mut offsets = Vec::with_capacity(ms.len());
    let mut off = 0;
    for m in ms {
        offsets.push(off);
        off += m.atoms;
    }
    Ok(ModalAlgebra::from_fn(atoms, |s| {
        ms.iter()
            .zip(&offsets)
            .map(|(m, &o)| {
                let part = (s >> o) & m.top_elem();
                m.box_of(part) << o
            })
            .fold(0, |acc, x| acc | x)
    }))
}

/// Does `map` (a table over `m`) satisfy the invariant of `kind`?
pub fn is_hom_of_kind(m: &ModalAlgebra, n: &ModalAlgebra, map: &[usize], kind: HomKind) -> bool {
    match kind {
        HomKind::Boolean => preserves(m, n, map, Preserve::BOOLEAN),
        HomKind::Stable => preserves(m, n, map, Preserve::BOOLEAN) && is_stable(m, n, map),
        HomKind::Modal | HomKind::BoxPartial => preserves(m, n, map, Preserve::MODAL),
        HomKind::Heyting => false,
    }
}

fn is_stable(m: &ModalAlgebra, n: &ModalAlgebra, map: &[usize]) -> bool {
    m.elements().all(|a| {
        let lhs = map[m.box_of(a) as usize] as u32;
        lhs & !n.box_of(map[a as usize] as u32) == 0
    })
}

/// Homomorphisms `m → n` of the requested kind extending `constraints`, in
/// lexicographic order of their tables. `BoxPartial` over a whole algebra
/// coincides with `Modal`.
pub fn hom_search(
    m: &ModalAlgebra,
    n: &ModalAlgebra,
    kind: HomKind,
    constraints: &[(u32, u32)],
    mode: SearchMode,
) -> Result<Vec<Homomorphism>> {
    hom_search_limited(m, n, kind, constraints, mode, None)
}

pub fn hom_search_limited(
    m: &ModalAlgebra,
    n: &ModalAlgebra,
    kind: HomKind,
    constraints: &[(u32, u32)],
    mode: SearchMode,
    limit: Option<usize>,
) -> Result<Vec<Homomorphism>> {
    let fixed: Vec<(usize, usize)> = constraints
        .iter()
        .map(|&(a, b)| (a as usize, b as usize))
        .collect();
    let top = n.top_elem() as usize;
    let simple_target = open_elements(n).len() == 2;
    // into a simple algebra stability reduces to f(□a) ∈ {0, 1}
    let stable_simple = |map: &[usize]| {
        m.elements()
            .all(|a| matches!(map[m.box_of(a) as usize], v if v == 0 || v == top))
    };
    let stable_general = |map: &[usize]| is_stable(m, n, map);
    let (ops, accept): (Preserve, Option<&(dyn Fn(&[usize]) -> bool + Sync)>) = match kind {
        HomKind::Boolean => (Preserve::BOOLEAN, None),
        HomKind::Modal | HomKind::BoxPartial => (Preserve::MODAL, None),
        HomKind::Stable if simple_target => (Preserve::BOOLEAN, Some(&stable_simple)),
        HomKind::Stable => (Preserve::BOOLEAN, Some(&stable_general)),
        HomKind::Heyting => {
            return Err(Error::Signature(
                "Heyting homomorphisms are not searched between modal algebras".into(),
            ))
        }
    };
    let mut search = HomSearch::new(m, n, ops).fix(&fixed).mode(mode);
    if let Some(pred) = accept {
        search = search.accept(pred);
    }
    if let Some(l) = limit {
        search = search.limit(l);
    }
    let out_kind = if kind == HomKind::BoxPartial {
        HomKind::Modal
    } else {
        kind
    };
    Ok(search
        .run()
        .into_iter()
        .map(|map| Homomorphism::new(out_kind, map))
        .collect())
}

/// The lexicographically least modal isomorphism, if any.
pub fn modal_isomorphism(m: &ModalAlgebra, n: &ModalAlgebra) -> Option<Homomorphism> {
    hom_search_limited(m, n, HomKind::Modal, &[], SearchMode::Iso, Some(1))
        .ok()
        .and_then(|v| v.into_iter().next())
}
