//! The functors between Heyting and interior algebras and the results that
//! tie them together on finite data.
//!
//! `O(M)` is the Heyting algebra of open elements of an interior algebra and
//! `B(H)` the free Boolean extension of a Heyting algebra, realised as the
//! complex algebra of the join-irreducibles of `H`.

mod appendix;
mod classes;

use serde::Serialize;

use crate::algebra::{Algebra, FiniteAlgebra, Limits, Signature};
use crate::error::{Error, Result};
use crate::finlat::{
    is_heyting_hom, join_irreducible_poset, join_irreducibles, validate_heyting, HeytingAlgebra,
};
use crate::hom::{HomKind, Homomorphism, SearchMode};
use crate::modal::{
    complex_algebra_with_limits, hom_search_limited, is_hom_of_kind, modal_isomorphism,
    open_elements, validate_modal, ModalAlgebra,
};

pub use appendix::{
    box_hom_extension, box_hom_to_bo, is_box_partial, open_generated, BoxExtension,
    ExtensionTrace, OpenReduction, PartialHom,
};
pub use classes::{
    blok_esakia_catalog_check, class_membership, BlokEsakiaReport, Certificate, ClassMode,
    Membership,
};

/// `O(M)` with the correspondence between its indices and the opens of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenAlgebra {
    pub heyting: HeytingAlgebra,
    /// `opens[i]` is the element of `M` behind index `i`; increasing.
    pub opens: Vec<u32>,
}

impl OpenAlgebra {
    pub fn index_of(&self, open: u32) -> Option<usize> {
        self.opens.binary_search(&open).ok()
    }
}

/// The Heyting algebra of open elements. Meet and join are inherited and
/// `a → b` is `□(¬a ∨ b)`.
pub fn open_algebra(m: &ModalAlgebra) -> Result<OpenAlgebra> {
    if !validate_modal(m).interior {
        return Err(Error::Precondition(
            "O is defined on interior algebras only".into(),
        ));
    }
    let opens = open_elements(m);
    let idx = |x: u32| opens.binary_search(&x).expect("opens are closed under the operations");
    let table = |f: &dyn Fn(u32, u32) -> u32| -> Vec<Vec<usize>> {
        opens
            .iter()
            .map(|&a| opens.iter().map(|&b| idx(f(a, b))).collect())
            .collect()
    };
    let meet = table(&|a, b| a & b);
    let join = table(&|a, b| a | b);
    let imp = table(&|a, b| m.box_of(m.not(a) | b));
    let heyting = HeytingAlgebra::from_tables(&meet, &join, &imp, 0, opens.len() - 1)?;
    debug_assert!(validate_heyting(&heyting).is_ok());
    Ok(OpenAlgebra { heyting, opens })
}

/// `B(H)` with the embedding of `H` onto its opens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanExtension {
    pub algebra: ModalAlgebra,
    /// Join-irreducible of `H` behind each atom.
    pub points: Vec<usize>,
    /// `embedding[a]` is the set of atoms (join-irreducibles) below `a`.
    pub embedding: Vec<u32>,
}

impl BooleanExtension {
    pub fn embedding_hom(&self) -> Homomorphism {
        Homomorphism::new(
            HomKind::Heyting,
            self.embedding.iter().map(|&x| x as usize).collect(),
        )
    }
}

pub fn boolean_extension(h: &HeytingAlgebra) -> Result<BooleanExtension> {
    boolean_extension_with_limits(h, &Limits::default())
}

pub fn boolean_extension_with_limits(
    h: &HeytingAlgebra,
    limits: &Limits,
) -> Result<BooleanExtension> {
    let points = join_irreducibles(h);
    let algebra = complex_algebra_with_limits(&join_irreducible_poset(h), limits)?;
    let embedding = (0..h.size())
        .map(|a| {
            points
                .iter()
                .enumerate()
                .filter(|&(_, &j)| h.leq(j, a))
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    Ok(BooleanExtension {
        algebra,
        points,
        embedding,
    })
}

/// A modal homomorphism `B(H) → M` extending a Heyting homomorphism
/// `H → O(M)`.
#[derive(Clone, Debug, Serialize)]
pub struct Extension {
    pub hom: Homomorphism,
    /// Number of modal homomorphisms extending `f`, counted up to two.
    pub extensions_found: usize,
}

impl Extension {
    pub fn is_unique(&self) -> bool {
        self.extensions_found == 1
    }
}

/// Extends `f : H → O(M)` (given on the indices of [`open_algebra`]) to
/// `B(H) → M` by sending the atom of a join-irreducible `j` to
/// `f(j) ∧ ¬f(j₋)`, `j₋` the lower cover of `j`. Uniqueness is then checked
/// by searching for every modal map that agrees with `f` on the opens.
pub fn extend_hom(h: &HeytingAlgebra, m: &ModalAlgebra, f: &Homomorphism) -> Result<Extension> {
    let o = open_algebra(m)?;
    if !is_heyting_hom(h, &o.heyting, &f.map) {
        return Err(Error::Precondition(
            "f is not a Heyting homomorphism into O(M)".into(),
        ));
    }
    let b = boolean_extension(h)?;
    let image = |a: usize| o.opens[f.apply(a)];
    let atom_images: Vec<u32> = b
        .points
        .iter()
        .map(|&j| {
            let below = (0..h.size())
                .filter(|&x| x != j && h.leq(x, j))
                .fold(h.bot(), |acc, x| h.join(acc, x));
            image(j) & m.not(image(below))
        })
        .collect();
    let map: Vec<usize> = b
        .algebra
        .elements()
        .map(|s| {
            atom_images
                .iter()
                .enumerate()
                .filter(|&(i, _)| s & (1 << i) != 0)
                .fold(0u32, |acc, (_, &x)| acc | x) as usize
        })
        .collect();
    let extends = (0..h.size()).all(|a| map[b.embedding[a] as usize] == image(a) as usize);
    if !extends || !is_hom_of_kind(&b.algebra, m, &map, HomKind::Modal) {
        return Err(Error::Internal(
            "the atom-wise extension is not a modal homomorphism extending f".into(),
        ));
    }
    let constraints: Vec<(u32, u32)> = (0..h.size())
        .map(|a| (b.embedding[a], image(a)))
        .collect();
    let found = hom_search_limited(
        &b.algebra,
        m,
        HomKind::Modal,
        &constraints,
        SearchMode::Any,
        Some(2),
    )?;
    Ok(Extension {
        hom: Homomorphism::new(HomKind::Modal, map),
        extensions_found: found.len(),
    })
}

/// Witness for `M ≅ BO(M)`.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteBlok {
    /// Isomorphism `M → BO(M)`.
    pub iso: Homomorphism,
    /// A maximal chain of `M` made of open elements, one atom per step.
    pub open_chain: Vec<u32>,
}

pub fn finite_blok_check(m: &ModalAlgebra) -> Result<FiniteBlok> {
    if !validate_modal(m).grz {
        return Err(Error::Precondition(
            "the finite Blok lemma needs a Grzegorczyk algebra".into(),
        ));
    }
    let o = open_algebra(m)?;
    let bo = boolean_extension(&o.heyting)?;
    let iso = modal_isomorphism(m, &bo.algebra)
        .ok_or_else(|| Error::Internal("no isomorphism between M and BO(M)".into()))?;

    let mut chain = vec![0u32];
    let mut cur = 0u32;
    while cur != m.top_elem() {
        let next = (0..m.atoms())
            .map(|i| cur | 1 << i)
            .find(|&x| x != cur && m.is_open(x))
            .ok_or_else(|| Error::Internal(format!("open {cur} has no open cover")))?;
        chain.push(next);
        cur = next;
    }
    Ok(FiniteBlok {
        iso,
        open_chain: chain,
    })
}

/// A finite generating family of algebras of one signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraCatalog {
    pub name: String,
    members: Vec<Algebra>,
}

impl AlgebraCatalog {
    /// Checks that the members share a signature and are valid: Heyting
    /// members must satisfy the axioms, modal members must be normal.
    pub fn new(name: impl Into<String>, members: Vec<Algebra>) -> Result<Self> {
        let name = name.into();
        if let Some(first) = members.first() {
            let sig = signature_of(first);
            if members.iter().any(|a| signature_of(a) != sig) {
                return Err(Error::Signature(format!(
                    "catalog {name:?} mixes Heyting and modal members"
                )));
            }
        }
        for (i, a) in members.iter().enumerate() {
            let ok = match a {
                Algebra::Heyting(h) => validate_heyting(h).is_ok(),
                Algebra::Modal(m) => validate_modal(m).k,
            };
            if !ok {
                return Err(Error::InvalidEntry {
                    name: format!("{name}[{i}]"),
                    reason: "member fails its axioms".into(),
                });
            }
        }
        Ok(AlgebraCatalog { name, members })
    }

    pub fn heyting(name: impl Into<String>, hs: Vec<HeytingAlgebra>) -> Result<Self> {
        Self::new(name, hs.into_iter().map(Algebra::Heyting).collect())
    }

    pub fn modal(name: impl Into<String>, ms: Vec<ModalAlgebra>) -> Result<Self> {
        Self::new(name, ms.into_iter().map(Algebra::Modal).collect())
    }

    pub fn members(&self) -> &[Algebra] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `None` for the empty catalog.
    pub fn signature(&self) -> Option<Signature> {
        self.members.first().map(signature_of)
    }

    pub fn filter(&self, name: impl Into<String>, keep: impl Fn(&Algebra) -> bool) -> Self {
        AlgebraCatalog {
            name: name.into(),
            members: self.members.iter().filter(|a| keep(a)).cloned().collect(),
        }
    }
}

fn signature_of(a: &Algebra) -> Signature {
    match a {
        Algebra::Heyting(_) => Signature::Heyting,
        Algebra::Modal(_) => Signature::Modal,
    }
}

/// Member-wise `B`.
pub fn sigma_catalog(k: &AlgebraCatalog) -> Result<AlgebraCatalog> {
    let ms = k
        .members()
        .iter()
        .map(|a| match a {
            Algebra::Heyting(h) => boolean_extension(h).map(|b| b.algebra),
            Algebra::Modal(_) => Err(Error::Signature("sigma expects a Heyting catalog".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraCatalog::modal(format!("sigma({})", k.name), ms)
}

/// Member-wise `O`.
pub fn rho_catalog(y: &AlgebraCatalog) -> Result<AlgebraCatalog> {
    let hs = y
        .members()
        .iter()
        .map(|a| match a {
            Algebra::Modal(m) => open_algebra(m).map(|o| o.heyting),
            Algebra::Heyting(_) => Err(Error::Signature("rho expects a modal catalog".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraCatalog::heyting(format!("rho({})", y.name), hs)
}
