use serde::Serialize;

use super::{compress, expand, open_elements, ModalAlgebra};
use crate::error::{Error, Result};
use crate::hom::{HomKind, Homomorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Boolean,
    Open,
}

/// A filter of a finite modal algebra, as its sorted member set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Filter {
    pub kind: FilterKind,
    members: Vec<u32>,
}

impl Filter {
    /// Builds a filter from a member set; returns `None` unless the set is a
    /// filter of `m` of the requested kind.
    pub fn new(m: &ModalAlgebra, kind: FilterKind, mut members: Vec<u32>) -> Option<Self> {
        members.sort_unstable();
        members.dedup();
        let f = Filter { kind, members };
        f.is_valid_in(m).then_some(f)
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, a: u32) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    /// Meet of all members; a finite filter is the principal filter of it.
    pub fn least(&self) -> u32 {
        self.members.iter().fold(u32::MAX, |acc, &x| acc & x)
    }

    pub fn is_valid_in(&self, m: &ModalAlgebra) -> bool {
        let top = m.top_elem();
        if !self.contains(top) || self.members.iter().any(|&x| x > top) {
            return false;
        }
        let upward = self
            .members
            .iter()
            .all(|&x| m.elements().filter(|&y| y & x == x).all(|y| self.contains(y)));
        let meets = self
            .members
            .iter()
            .all(|&x| self.members.iter().all(|&y| self.contains(x & y)));
        let open = match self.kind {
            FilterKind::Boolean => true,
            FilterKind::Open => self.members.iter().all(|&x| self.contains(m.box_of(x))),
        };
        upward && meets && open
    }
}

/// `↑d`, tagged with the given kind (not re-validated).
pub fn principal_filter(m: &ModalAlgebra, d: u32, kind: FilterKind) -> Filter {
    let members = m.elements().filter(|&y| y & d == d).collect();
    Filter { kind, members }
}

/// The open filter generated by `a`, i.e. `{b : □a ≤ b}`.
pub fn open_filter_generated(m: &ModalAlgebra, a: u32) -> Filter {
    principal_filter(m, m.box_of(a), FilterKind::Open)
}

/// All open filters of an interior algebra, one per open element, in
/// increasing order of the generating open element.
pub fn open_filters(m: &ModalAlgebra) -> Vec<Filter> {
    open_elements(m)
        .into_iter()
        .map(|d| principal_filter(m, d, FilterKind::Open))
        .collect()
}

/// Quotient by an open filter `F = ↑d`. The quotient lives on the atoms of
/// `d`; the projection is `a ↦ a ∧ d` (compressed).
pub fn quotient(m: &ModalAlgebra, f: &Filter) -> Result<(ModalAlgebra, Homomorphism)> {
    if f.kind != FilterKind::Open || !f.is_valid_in(m) {
        return Err(Error::Precondition(
            "quotients are only taken by open filters".into(),
        ));
    }
    let d = f.least();
    let atoms = d.count_ones() as usize;
    let q = ModalAlgebra::from_fn(atoms, |t| compress(m.box_of(expand(t, d)), d));
    let proj = m.elements().map(|a| compress(a & d, d) as usize).collect();
    Ok((q, Homomorphism::new(HomKind::Modal, proj)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Structure {
    pub subdirectly_irreducible: bool,
    pub simple: bool,
}

/// Subdirectly irreducible iff there is a largest non-top open element;
/// simple iff there are exactly two open elements.
pub fn classify_structure(m: &ModalAlgebra) -> Structure {
    let top = m.top_elem();
    let opens = open_elements(m);
    let proper: Vec<u32> = opens.iter().copied().filter(|&o| o != top).collect();
    let si = proper
        .iter()
        .any(|&o| proper.iter().all(|&x| x & !o == 0));
    Structure {
        subdirectly_irreducible: si,
        simple: opens.len() == 2,
    }
}
