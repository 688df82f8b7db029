//! Membership in the universal class, quasivariety or variety generated by a
//! finite catalog of finite algebras.
//!
//! An ultraproduct of finitely many finite algebras is isomorphic to one of
//! them, so on this data `U(K) = IS(K)` and `Q(K) = ISP(K)`.

use serde::{Deserialize, Serialize};

use super::{
    boolean_extension, extend_hom, finite_blok_check, open_algebra, sigma_catalog,
    AlgebraCatalog,
};
use crate::algebra::{subuniverse, Algebra, FiniteAlgebra, Limits};
use crate::error::{Error, Result};
use crate::freealg::free_algebra;
use crate::hom::{HomKind, HomSearch, Homomorphism, Preserve, SearchMode};
use crate::modal::{is_hom_of_kind, validate_modal, ModalAlgebra};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassMode {
    Universal,
    Quasivariety,
    Variety,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatingHom {
    pub member: usize,
    pub hom: Homomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// `F` embeds into a member.
    Embedding { member: usize, hom: Homomorphism },
    /// Homomorphisms into members that together separate all points of `F`.
    Separating { family: Vec<SeparatingHom> },
    /// A surjection from the free algebra on `generators.len()` generators.
    Surjection {
        generators: Vec<usize>,
        free_size: usize,
        hom: Homomorphism,
    },
    /// Why the answer is negative.
    Refuted { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub mode: ClassMode,
    pub member: bool,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn preserve_for(a: &Algebra) -> Preserve {
    match a {
        Algebra::Heyting(_) => Preserve::HEYTING,
        Algebra::Modal(_) => Preserve::MODAL,
    }
}

fn kind_for(a: &Algebra) -> HomKind {
    match a {
        Algebra::Heyting(_) => HomKind::Heyting,
        Algebra::Modal(_) => HomKind::Modal,
    }
}

fn search<'a>(f: &'a Algebra, a: &'a Algebra) -> HomSearch<'a> {
    HomSearch::new(f.as_dyn(), a.as_dyn(), preserve_for(f))
}

/// Decides `F ∈ U(K)`, `F ∈ Q(K)` or `F ∈ V(K)` with a certificate.
pub fn class_membership(
    f: &Algebra,
    k: &AlgebraCatalog,
    mode: ClassMode,
    limits: &Limits,
) -> Result<Membership> {
    if let Some(sig) = k.signature() {
        if sig != f.signature() {
            return Err(Error::Signature(format!(
                "algebra is {} but catalog {:?} is {sig}",
                f.signature(),
                k.name
            )));
        }
    }
    match mode {
        ClassMode::Universal => Ok(universal(f, k)),
        ClassMode::Quasivariety => Ok(quasivariety(f, k)),
        ClassMode::Variety => variety(f, k, limits),
    }
}

fn universal(f: &Algebra, k: &AlgebraCatalog) -> Membership {
    for (i, a) in k.members().iter().enumerate() {
        if let Some(map) = search(f, a).mode(SearchMode::Injective).first() {
            return Membership {
                mode: ClassMode::Universal,
                member: true,
                certificate: Certificate::Embedding {
                    member: i,
                    hom: Homomorphism::new(kind_for(f), map),
                },
                warning: None,
            };
        }
    }
    Membership {
        mode: ClassMode::Universal,
        member: false,
        certificate: Certificate::Refuted {
            reason: "no member admits an embedding".into(),
        },
        warning: None,
    }
}

fn quasivariety(f: &Algebra, k: &AlgebraCatalog) -> Membership {
    let all: Vec<(usize, Vec<usize>)> = k
        .members()
        .iter()
        .enumerate()
        .flat_map(|(i, a)| search(f, a).run().into_iter().map(move |h| (i, h)))
        .collect();
    let n = f.size();
    let mut family: Vec<usize> = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if family.iter().any(|&h| all[h].1[x] != all[h].1[y]) {
                continue;
            }
            match all.iter().position(|(_, h)| h[x] != h[y]) {
                Some(h) => family.push(h),
                None => {
                    return Membership {
                        mode: ClassMode::Quasivariety,
                        member: false,
                        certificate: Certificate::Refuted {
                            reason: format!("no homomorphism into a member separates {x} and {y}"),
                        },
                        warning: None,
                    }
                }
            }
        }
    }
    Membership {
        mode: ClassMode::Quasivariety,
        member: true,
        certificate: Certificate::Separating {
            family: family
                .into_iter()
                .map(|h| SeparatingHom {
                    member: all[h].0,
                    hom: Homomorphism::new(kind_for(f), all[h].1.clone()),
                })
                .collect(),
        },
        warning: None,
    }
}

/// A generating set of `F`, chosen greedily by increasing index.
pub fn greedy_generators(f: &dyn FiniteAlgebra) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = subuniverse(f, &gens);
    for x in 0..f.size() {
        if span.binary_search(&x).is_err() {
            gens.push(x);
            span = subuniverse(f, &gens);
        }
    }
    gens
}

fn variety(f: &Algebra, k: &AlgebraCatalog, limits: &Limits) -> Result<Membership> {
    let gens = greedy_generators(f.as_dyn());
    let free = free_algebra(k, gens.len(), limits)?;
    let constraints: Vec<(usize, usize)> = free
        .generators
        .iter()
        .copied()
        .zip(gens.iter().copied())
        .collect();
    let hom = HomSearch::new(free.carrier.as_dyn(), f.as_dyn(), preserve_for(f))
        .fix(&constraints)
        .first();
    let warning = Some(format!(
        "variety membership built a free algebra with {} elements on {} generators",
        free.carrier.size(),
        gens.len()
    ));
    Ok(match hom {
        Some(map) => Membership {
            mode: ClassMode::Variety,
            member: true,
            certificate: Certificate::Surjection {
                generators: gens,
                free_size: free.carrier.size(),
                hom: Homomorphism::new(kind_for(f), map),
            },
            warning,
        },
        None => Membership {
            mode: ClassMode::Variety,
            member: false,
            certificate: Certificate::Refuted {
                reason: "the generators of F do not satisfy the identities of K".into(),
            },
            warning,
        },
    })
}

/// The three readings of "`M` lies in the class matching `K`".
#[derive(Clone, Debug, Serialize)]
pub struct BlokEsakiaReport {
    /// `M ∈ U(σK)`, by direct embedding search.
    pub direct: Membership,
    /// `O(M) ∈ U(K)`.
    pub open_side: Membership,
    /// Embedding `M → B(H)` assembled from `M ≅ BO(M)` and the extension of
    /// an embedding `O(M) → H`.
    pub constructive: Option<SeparatingHom>,
    pub agree: bool,
}

impl BlokEsakiaReport {
    pub fn member(&self) -> bool {
        self.direct.member
    }
}

pub fn blok_esakia_catalog_check(k: &AlgebraCatalog, m: &ModalAlgebra) -> Result<BlokEsakiaReport> {
    if !validate_modal(m).grz {
        return Err(Error::Precondition(
            "the Blok-Esakia check needs a Grzegorczyk algebra".into(),
        ));
    }
    let limits = Limits::default();
    let sigma = sigma_catalog(k)?;
    let direct = class_membership(&Algebra::Modal(m.clone()), &sigma, ClassMode::Universal, &limits)?;
    let o = open_algebra(m)?;
    let open_side = class_membership(
        &Algebra::Heyting(o.heyting.clone()),
        k,
        ClassMode::Universal,
        &limits,
    )?;

    let constructive = match &open_side.certificate {
        Certificate::Embedding { member, hom } => {
            let h = k.members()[*member]
                .as_heyting()
                .ok_or_else(|| Error::Signature("Blok-Esakia check expects a Heyting catalog".into()))?;
            let bh = boolean_extension(h)?;
            let obh = open_algebra(&bh.algebra)?;
            let f = Homomorphism::new(
                HomKind::Heyting,
                hom.map
                    .iter()
                    .map(|&x| obh.index_of(bh.embedding[x]).expect("embedding lands on opens"))
                    .collect(),
            );
            let ext = extend_hom(&o.heyting, &bh.algebra, &f)?;
            let blok = finite_blok_check(m)?;
            let emb = blok.iso.then(&ext.hom, HomKind::Modal);
            let ok = is_hom_of_kind(m, &bh.algebra, &emb.map, HomKind::Modal) && emb.is_injective();
            ok.then_some(SeparatingHom {
                member: *member,
                hom: emb,
            })
        }
        _ => None,
    };
    let agree = direct.member == open_side.member && open_side.member == constructive.is_some();
    Ok(BlokEsakiaReport {
        direct,
        open_side,
        constructive,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finlat::{downset_heyting, FinitePoset, HeytingAlgebra};
    use crate::modal::complex_algebra;

    fn diamond() -> HeytingAlgebra {
        downset_heyting(&FinitePoset::antichain(2)).unwrap()
    }

    fn k_of(hs: Vec<HeytingAlgebra>) -> AlgebraCatalog {
        AlgebraCatalog::heyting("k", hs).unwrap()
    }

    #[test]
    fn member_embeds_into_itself() {
        let k = k_of(vec![HeytingAlgebra::chain(3)]);
        let r = class_membership(
            &Algebra::Heyting(HeytingAlgebra::chain(3)),
            &k,
            ClassMode::Universal,
            &Limits::default(),
        )
        .unwrap();
        assert!(r.member);
        assert_eq!(
            r.certificate,
            Certificate::Embedding {
                member: 0,
                hom: Homomorphism::new(HomKind::Heyting, vec![0, 1, 2])
            }
        );
    }

    #[test]
    fn diamond_in_quasivariety_of_two_chain() {
        let k = k_of(vec![HeytingAlgebra::chain(2)]);
        let d = Algebra::Heyting(diamond());
        let q = class_membership(&d, &k, ClassMode::Quasivariety, &Limits::default()).unwrap();
        assert!(q.member);
        let Certificate::Separating { family } = q.certificate else {
            panic!("expected a separating family")
        };
        assert_eq!(family.len(), 2);
        let u = class_membership(&d, &k, ClassMode::Universal, &Limits::default()).unwrap();
        assert!(!u.member);
    }

    #[test]
    fn three_chain_not_in_universal_class_of_two_chain() {
        let k = k_of(vec![HeytingAlgebra::chain(2)]);
        let c3 = Algebra::Heyting(HeytingAlgebra::chain(3));
        for mode in [ClassMode::Universal, ClassMode::Quasivariety, ClassMode::Variety] {
            let r = class_membership(&c3, &k, mode, &Limits::default()).unwrap();
            assert!(!r.member, "{mode:?}");
        }
    }

    #[test]
    fn variety_of_three_chain_contains_two_chain_and_diamond() {
        let k = k_of(vec![HeytingAlgebra::chain(3)]);
        for f in [HeytingAlgebra::chain(2), diamond()] {
            let r = class_membership(&Algebra::Heyting(f), &k, ClassMode::Variety, &Limits::default())
                .unwrap();
            assert!(r.member);
        }
    }

    #[test]
    fn signature_mismatch() {
        let k = k_of(vec![HeytingAlgebra::chain(2)]);
        let m = Algebra::Modal(ModalAlgebra::two());
        assert!(class_membership(&m, &k, ClassMode::Universal, &Limits::default()).is_err());
    }

    #[test]
    fn blok_esakia_examples() {
        let k = k_of(vec![HeytingAlgebra::chain(3)]);
        let m = complex_algebra(&FinitePoset::antichain(2)).unwrap();
        let r = blok_esakia_catalog_check(&k, &m).unwrap();
        assert!(r.agree && !r.member());

        let h = diamond();
        let k = k_of(vec![HeytingAlgebra::chain(3), h.clone()]);
        let m = boolean_extension(&h).unwrap().algebra;
        let r = blok_esakia_catalog_check(&k, &m).unwrap();
        assert!(r.agree && r.member());
        assert_eq!(r.constructive.unwrap().member, 1);
    }
}
