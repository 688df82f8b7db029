//! Constructive side of the Grzegorczyk characterizations: the stable
//! surjection onto S₂ built from a failure of (Grz), and the S₂ / S₁,₂
//! witness for non-Grzegorczyk interior algebras.

use serde::Serialize;

use super::filter::{principal_filter, quotient, Filter, FilterKind};
use super::subalg::{generated_subalgebra, BooleanSubalgebra, SubalgebraKind};
use super::{
    compress, expand, hom_search_limited, is_hom_of_kind, open_elements, validate_modal,
    ModalAlgebra, Standard,
};
use crate::error::{Error, Result};
use crate::hom::{HomKind, Homomorphism, SearchMode};

/// The maximal open filter `G` with `a ∉ G` and `t(a) ∈ G`, where
/// `t(x) = □(x→□x)→x`. Open filters are `↑d` for open `d`, so maximal
/// filters correspond to minimal admissible `d`; ties go to the
/// lexicographically least member set.
pub fn maximal_open_filter(m: &ModalAlgebra, a: u32) -> Result<Filter> {
    let t = m.grz_term(a);
    let cands: Vec<u32> = open_elements(m)
        .into_iter()
        .filter(|&d| d & !t == 0 && d & !a != 0)
        .collect();
    let minimal = cands
        .iter()
        .copied()
        .filter(|&d| !cands.iter().any(|&e| e != d && e & !d == 0));
    minimal
        .map(|d| principal_filter(m, d, FilterKind::Open))
        .min_by(|x, y| x.members().cmp(y.members()))
        .ok_or_else(|| {
            Error::Precondition(format!("(Grz) holds at {a}; no open filter separates it"))
        })
}

/// The pieces of the composite `h = k ∘ f ∘ g`.
#[derive(Clone, Debug, Serialize)]
pub struct StableWitness {
    /// Stable surjection from `M` onto S₂.
    pub h: Homomorphism,
    /// Open filter `G` and the projection `g : M → M/G`.
    pub open_filter: Filter,
    pub g: Homomorphism,
    /// `a' = g(a)` in `M/G`.
    pub a_prime: u32,
    /// Boolean quotient of `M/G` by the filter generated by `¬□a'`.
    pub f: Homomorphism,
    /// Boolean surjection onto the reduct of S₂.
    pub k: Homomorphism,
}

/// Builds a stable surjection `M → S₂` mapping `a` to a coatom, for an
/// element `a` at which (Grz) fails.
pub fn stable_witness_construct(m: &ModalAlgebra, a: u32) -> Result<StableWitness> {
    if !validate_modal(m).interior {
        return Err(Error::Precondition("algebra is not interior".into()));
    }
    if a > m.top_elem() {
        return Err(Error::Precondition(format!("{a} is not an element")));
    }
    if m.grz_holds_at(a) {
        return Err(Error::Precondition(format!(
            "(Grz) holds at {a}: □(□(a→□a)→a) ≤ a, so no witness is constructed"
        )));
    }
    let open_filter = maximal_open_filter(m, a)?;
    let (mq, g) = quotient(m, &open_filter)?;
    let a_prime = g.apply(a as usize) as u32;

    // Boolean quotient of M' by ↑¬□a' keeps the atoms outside □a'
    let keep = mq.not(mq.box_of(a_prime));
    let s_atoms = keep.count_ones() as usize;
    if s_atoms < 2 {
        return Err(Error::Internal(format!(
            "Boolean quotient has {} elements, expected at least 4",
            1 << s_atoms
        )));
    }
    let s = ModalAlgebra::from_fn(s_atoms, |x| {
        if x == (1 << s_atoms) - 1 {
            x
        } else {
            0
        }
    });
    let f = Homomorphism::new(
        HomKind::Stable,
        mq.elements().map(|x| compress(x & keep, keep) as usize).collect(),
    );
    let x = f.apply(a_prime as usize) as u32;

    // k(T) = {y : φ(y) ∈ T} for an injective φ from the atoms of S₂ into those of S
    let mut best: Option<Vec<usize>> = None;
    for p0 in 0..s_atoms {
        for p1 in (0..s_atoms).filter(|&p| p != p0) {
            let table: Vec<usize> = s
                .elements()
                .map(|t| ((t >> p0) & 1 | ((t >> p1) & 1) << 1) as usize)
                .collect();
            let image = table[x as usize];
            if (image == 0b01 || image == 0b10) && best.as_ref().is_none_or(|b| &table < b) {
                best = Some(table);
            }
        }
    }
    let k = Homomorphism::new(
        HomKind::Stable,
        best.ok_or_else(|| Error::Internal("no Boolean surjection onto S2".into()))?,
    );
    let h = g.then(&f, HomKind::Stable).then(&k, HomKind::Stable);

    let s2 = Standard::S2.algebra();
    let coatom = matches!(h.apply(a as usize), 0b01 | 0b10);
    if !(is_hom_of_kind(m, &s2, &h.map, HomKind::Stable) && h.is_surjective_onto(4) && coatom) {
        return Err(Error::Internal(
            "composite map is not a stable surjection with coatom image".into(),
        ));
    }
    Ok(StableWitness {
        h,
        open_filter,
        g,
        a_prime,
        f,
        k,
    })
}

/// A subalgebra of `M` with an open filter whose quotient is S₂ or S₁,₂.
#[derive(Clone, Debug, Serialize)]
pub struct BlokWitness {
    pub subalgebra: BooleanSubalgebra,
    pub filter: Filter,
    /// From the subalgebra (as an algebra on its blocks) onto the target.
    pub hom: Homomorphism,
    pub target: Standard,
}

impl BlokWitness {
    /// Independent re-check of every claimed property.
    pub fn verify(&self, m: &ModalAlgebra) -> bool {
        let Ok((sub, _)) = self.subalgebra.as_algebra(m) else {
            return false;
        };
        let target = self.target.algebra();
        let top = target.top_elem() as usize;
        let hom_ok = is_hom_of_kind(&sub, &target, &self.hom.map, HomKind::Modal)
            && self.hom.is_surjective_onto(target.size_usize());
        let filter_ok = self.filter.kind == FilterKind::Open
            && self.filter.is_valid_in(m)
            && self.filter.members().iter().all(|&x| self.subalgebra.contains(x));
        let kernel_ok = sub.elements().all(|x| {
            (self.hom.apply(x as usize) == top) == self.filter.contains(self.subalgebra.decode(x))
        });
        hom_ok && filter_ok && kernel_ok
    }
}

impl ModalAlgebra {
    pub(crate) fn size_usize(&self) -> usize {
        1 << self.atoms()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlokCharacterization {
    pub is_grz: bool,
    pub witness: Option<BlokWitness>,
}

/// Decides (Grz) through the S₂ / S₁,₂ characterization. For a non-Grz
/// algebra the witness follows the constructive proof: quotient by the
/// maximal open filter for the least failing element `a`, then take the
/// subalgebra generated by `a'`.
pub fn blok_characterization(m: &ModalAlgebra) -> Result<BlokCharacterization> {
    let cls = validate_modal(m);
    if !cls.interior {
        return Err(Error::Precondition("algebra is not interior".into()));
    }
    let Some(a) = cls.grz_witness else {
        return Ok(BlokCharacterization {
            is_grz: true,
            witness: None,
        });
    };
    let open_filter = maximal_open_filter(m, a)?;
    let d = open_filter.least();
    let (mq, g) = quotient(m, &open_filter)?;
    let a_prime = g.apply(a as usize) as u32;
    let n = generated_subalgebra(&mq, &[a_prime], SubalgebraKind::Modal);
    let (n_alg, _) = n.as_algebra(&mq)?;
    let target = if mq.box_of(a_prime) == 0 {
        Standard::S2
    } else {
        Standard::S12
    };
    let iso = hom_search_limited(
        &n_alg,
        &target.algebra(),
        HomKind::Modal,
        &[],
        SearchMode::Iso,
        Some(1),
    )?
    .into_iter()
    .next()
    .ok_or_else(|| {
        Error::Internal(format!(
            "subalgebra generated by a' is not isomorphic to {}",
            target.name()
        ))
    })?;

    // pull N back along g: blocks of N spread over d, atoms outside d stay free
    let mut blocks: Vec<u32> = n.blocks().iter().map(|&b| expand(b, d)).collect();
    blocks.extend((0..m.atoms()).map(|i| 1u32 << i).filter(|&x| x & d == 0));
    let subalgebra = BooleanSubalgebra::from_blocks(blocks);
    let (p_alg, _) = subalgebra.as_algebra(m)?;
    let hom = Homomorphism::new(
        HomKind::Modal,
        p_alg
            .elements()
            .map(|x| {
                let e = subalgebra.decode(x);
                let in_quotient = g.apply(e as usize) as u32;
                iso.apply(n.encode(in_quotient) as usize)
            })
            .collect(),
    );
    let witness = BlokWitness {
        subalgebra,
        filter: open_filter,
        hom,
        target,
    };
    if !witness.verify(m) {
        return Err(Error::Internal("Blok witness failed verification".into()));
    }
    Ok(BlokCharacterization {
        is_grz: false,
        witness: Some(witness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finlat::FinitePoset;
    use crate::modal::complex_algebra;

    #[test]
    fn stable_witness_for_s2_atom() {
        let s2 = Standard::S2.algebra();
        let w = stable_witness_construct(&s2, 0b01).unwrap();
        assert_eq!(w.h.map, vec![0, 1, 2, 3]);
        assert_eq!(w.open_filter.members(), &[3]);
    }

    #[test]
    fn stable_witness_for_s12_coatom() {
        let s12 = Standard::S12.algebra();
        let w = stable_witness_construct(&s12, 0b101).unwrap();
        assert!(matches!(w.h.apply(0b101), 1 | 2));
        assert!(is_hom_of_kind(
            &s12,
            &Standard::S2.algebra(),
            &w.h.map,
            HomKind::Stable
        ));
    }

    #[test]
    fn stable_witness_rejects_grz_element() {
        let m = complex_algebra(&FinitePoset::chain(2)).unwrap();
        for a in m.elements() {
            assert!(matches!(
                stable_witness_construct(&m, a),
                Err(Error::Precondition(_))
            ));
        }
    }

    #[test]
    fn blok_characterization_of_standard_algebras() {
        let s2 = Standard::S2.algebra();
        let c = blok_characterization(&s2).unwrap();
        assert!(!c.is_grz);
        let w = c.witness.unwrap();
        assert_eq!(w.target, Standard::S2);
        assert_eq!(w.subalgebra, BooleanSubalgebra::full(&s2));
        assert_eq!(w.filter.members(), &[3]);
        assert_eq!(w.hom.map, vec![0, 1, 2, 3]);

        let c = blok_characterization(&Standard::S12.algebra()).unwrap();
        assert_eq!(c.witness.unwrap().target, Standard::S12);
    }

    #[test]
    fn blok_characterization_rejects_non_interior() {
        let k = ModalAlgebra::new(1, vec![1, 1]).unwrap();
        assert!(blok_characterization(&k).is_err());
    }
}
