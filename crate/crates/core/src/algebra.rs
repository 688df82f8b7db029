//! Common interface over the two kinds of finite algebra in the crate.
//!
//! Elements are plain indices `0..size()`. For modal algebras the index of an
//! element is its atom bitmask, so `size()` is `2^atoms`.

use serde::{Deserialize, Serialize};

use crate::finlat::HeytingAlgebra;
use crate::modal::ModalAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Heyting,
    Modal,
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Signature::Heyting => f.write_str("heyting"),
            Signature::Modal => f.write_str("modal"),
        }
    }
}

pub trait FiniteAlgebra: Sync {
    fn signature(&self) -> Signature;
    fn size(&self) -> usize;
    fn bot(&self) -> usize;
    fn top(&self) -> usize;
    fn meet(&self, a: usize, b: usize) -> usize;
    fn join(&self, a: usize, b: usize) -> usize;
    fn imp(&self, a: usize, b: usize) -> usize;

    fn neg(&self, a: usize) -> usize {
        self.imp(a, self.bot())
    }

    /// Interior operator. Heyting algebras have none; formulas over the
    /// Heyting signature never reach this.
    fn boxed(&self, a: usize) -> usize {
        a
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }
}

/// A finite algebra of either signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algebra {
    Heyting(HeytingAlgebra),
    Modal(ModalAlgebra),
}

impl Algebra {
    pub fn as_heyting(&self) -> Option<&HeytingAlgebra> {
        match self {
            Algebra::Heyting(h) => Some(h),
            Algebra::Modal(_) => None,
        }
    }

    pub fn as_modal(&self) -> Option<&ModalAlgebra> {
        match self {
            Algebra::Modal(m) => Some(m),
            Algebra::Heyting(_) => None,
        }
    }

    pub fn as_dyn(&self) -> &dyn FiniteAlgebra {
        match self {
            Algebra::Heyting(h) => h,
            Algebra::Modal(m) => m,
        }
    }
}

impl From<HeytingAlgebra> for Algebra {
    fn from(h: HeytingAlgebra) -> Self {
        Algebra::Heyting(h)
    }
}

impl From<ModalAlgebra> for Algebra {
    fn from(m: ModalAlgebra) -> Self {
        Algebra::Modal(m)
    }
}

impl FiniteAlgebra for Algebra {
    fn signature(&self) -> Signature {
        self.as_dyn().signature()
    }
    fn size(&self) -> usize {
        self.as_dyn().size()
    }
    fn bot(&self) -> usize {
        self.as_dyn().bot()
    }
    fn top(&self) -> usize {
        self.as_dyn().top()
    }
    fn meet(&self, a: usize, b: usize) -> usize {
        self.as_dyn().meet(a, b)
    }
    fn join(&self, a: usize, b: usize) -> usize {
        self.as_dyn().join(a, b)
    }
    fn imp(&self, a: usize, b: usize) -> usize {
        self.as_dyn().imp(a, b)
    }
    fn neg(&self, a: usize) -> usize {
        self.as_dyn().neg(a)
    }
    fn boxed(&self, a: usize) -> usize {
        self.as_dyn().boxed(a)
    }
}

/// Size caps for the brute-force layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest atom count of a modal algebra (carrier `2^max_atoms`).
    pub max_atoms: usize,
    /// Largest Heyting carrier, and largest generated free-algebra carrier.
    pub max_size: usize,
    /// Largest number of assignments a sentence evaluation may visit.
    pub max_evaluations: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: 12,
            max_size: 4096,
            max_evaluations: 10_000_000,
        }
    }
}

/// Least subset containing `seed` and the constants, closed under every
/// operation of the signature. Sorted.
pub fn subuniverse(a: &dyn FiniteAlgebra, seed: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; a.size()];
    let mut members = Vec::new();
    let mut frontier = 0;
    for x in [a.bot(), a.top()].into_iter().chain(seed.iter().copied()) {
        if !inside[x] {
            inside[x] = true;
            members.push(x);
        }
    }
    while frontier < members.len() {
        let x = members[frontier];
        frontier += 1;
        let mut found = vec![a.boxed(x)];
        for &y in &members[..frontier] {
            found.extend([a.meet(x, y), a.join(x, y), a.imp(x, y), a.imp(y, x)]);
        }
        for z in found {
            if !inside[z] {
                inside[z] = true;
                members.push(z);
            }
        }
    }
    members.sort_unstable();
    members
}
