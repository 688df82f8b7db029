use serde::{Deserialize, Serialize};

use super::ModalAlgebra;
use crate::error::{Error, Result};
use crate::hom::{HomKind, Homomorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubalgebraKind {
    Boolean,
    Modal,
}

/// A Boolean subalgebra of a powerset algebra, stored as the partition of
/// the atom set into the atoms of the subalgebra. Blocks are ordered by
/// their lowest atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BooleanSubalgebra {
    blocks: Vec<u32>,
}

impl BooleanSubalgebra {
    pub fn from_blocks(mut blocks: Vec<u32>) -> Self {
        blocks.retain(|&b| b != 0);
        blocks.sort_by_key(|b| b.trailing_zeros());
        BooleanSubalgebra { blocks }
    }

    /// The two-element subalgebra `{⊥, ⊤}`.
    pub fn trivial(m: &ModalAlgebra) -> Self {
        BooleanSubalgebra::from_blocks(vec![m.top_elem()])
    }

    pub fn full(m: &ModalAlgebra) -> Self {
        BooleanSubalgebra::from_blocks((0..m.atoms()).map(|i| 1 << i).collect())
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        1 << self.blocks.len()
    }

    /// Is `a` a union of blocks?
    pub fn contains(&self, a: u32) -> bool {
        self.blocks.iter().all(|&b| a & b == 0 || a & b == b)
    }

    /// Element of `M` for a mask over the blocks.
    pub fn decode(&self, mask: u32) -> u32 {
        self.blocks
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .fold(0, |acc, (_, &b)| acc | b)
    }

    /// Mask over the blocks of an element of the subalgebra.
    pub fn encode(&self, a: u32) -> u32 {
        self.blocks
            .iter()
            .enumerate()
            .filter(|&(_, &b)| a & b != 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    /// Members in increasing order.
    pub fn elements(&self) -> Vec<u32> {
        let mut v: Vec<u32> = (0..1u32 << self.blocks.len())
            .map(|x| self.decode(x))
            .collect();
        v.sort_unstable();
        v
    }

    pub fn is_subset_of(&self, other: &BooleanSubalgebra) -> bool {
        self.blocks.iter().all(|&b| other.contains(b))
    }

    pub fn is_modal_closed(&self, m: &ModalAlgebra) -> bool {
        (0..1u32 << self.blocks.len()).all(|x| self.contains(m.box_of(self.decode(x))))
    }

    /// Splits blocks so that `a` becomes a member.
    fn refine(&mut self, a: u32) -> bool {
        let mut changed = false;
        let mut next = Vec::with_capacity(self.blocks.len() + 1);
        for &b in &self.blocks {
            let (i, o) = (b & a, b & !a);
            if i != 0 && o != 0 {
                changed = true;
                next.push(i);
                next.push(o);
            } else {
                next.push(b);
            }
        }
        if changed {
            *self = BooleanSubalgebra::from_blocks(next);
        }
        changed
    }

    /// The subalgebra as a modal algebra on its blocks, with the inclusion
    /// into `m`. Fails unless the subalgebra is closed under `□`.
    pub fn as_algebra(&self, m: &ModalAlgebra) -> Result<(ModalAlgebra, Homomorphism)> {
        if !self.is_modal_closed(m) {
            return Err(Error::Precondition(
                "Boolean subalgebra is not closed under box".into(),
            ));
        }
        let n = self.blocks.len();
        let alg = ModalAlgebra::from_fn(n, |x| self.encode(m.box_of(self.decode(x))));
        let incl = (0..1u32 << n).map(|x| self.decode(x) as usize).collect();
        Ok((alg, Homomorphism::new(HomKind::Modal, incl)))
    }
}

/// Least subalgebra containing `seed`, closed under the Boolean operations
/// and, for `Modal`, under `□`.
pub fn generated_subalgebra(
    m: &ModalAlgebra,
    seed: &[u32],
    kind: SubalgebraKind,
) -> BooleanSubalgebra {
    let mut sub = BooleanSubalgebra::trivial(m);
    for &s in seed {
        sub.refine(s);
    }
    if kind == SubalgebraKind::Modal {
        loop {
            let mut changed = false;
            for x in 0..1u32 << sub.blocks.len() {
                let b = m.box_of(sub.decode(x));
                if sub.refine(b) {
                    changed = true;
                    break;
                }
            }
            if !changed {
                break;
            }
        }
    }
    sub
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finlat::FinitePoset;
    use crate::modal::{complex_algebra, Standard};

    #[test]
    fn empty_seed_gives_bounds() {
        let m = Standard::S12.algebra();
        let sub = generated_subalgebra(&m, &[], SubalgebraKind::Boolean);
        assert_eq!(sub.elements(), vec![0, 7]);
    }

    #[test]
    fn boolean_closure_in_three_chain() {
        let m = complex_algebra(&FinitePoset::chain(3)).unwrap();
        let sub = generated_subalgebra(&m, &[0b010], SubalgebraKind::Boolean);
        assert_eq!(sub.elements(), vec![0, 0b010, 0b101, 0b111]);
    }

    #[test]
    fn modal_closure_of_open_atom_in_s12() {
        let m = Standard::S12.algebra();
        let sub = generated_subalgebra(&m, &[0b100], SubalgebraKind::Modal);
        assert_eq!(sub.elements(), vec![0, 0b011, 0b100, 0b111]);
        let (alg, incl) = sub.as_algebra(&m).unwrap();
        assert_eq!(alg.atoms(), 2);
        assert!(crate::hom::preserves(
            &alg,
            &m,
            &incl.map,
            crate::hom::Preserve::MODAL
        ));
    }

    #[test]
    fn modal_closure_adds_boxes() {
        let m = complex_algebra(&FinitePoset::chain(3)).unwrap();
        // □{p, r} = {p}
        let sub = generated_subalgebra(&m, &[0b101], SubalgebraKind::Modal);
        assert!(sub.contains(0b001));
        assert_eq!(sub.size(), 8);
    }
}
