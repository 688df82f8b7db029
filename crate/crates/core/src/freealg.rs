//! Free algebras on finitely many generators for the variety of a finite
//! catalog, and the admissibility checks built on them.
//!
//! Everything here is bounded by the generator count `k`: the free algebra
//! on `k` generators sees exactly the identities and quasi-identities in at
//! most `k` variables, so every report is a `k`-bounded instance.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{subuniverse, Algebra, FiniteAlgebra, Limits, Signature};
use crate::bridge::{
    boolean_extension, class_membership, extend_hom, open_algebra, sigma_catalog,
    AlgebraCatalog, ClassMode, Membership,
};
use crate::error::{Error, Result};
use crate::finlat::{heyting_hom_search, HeytingAlgebra, MAX_TABLE_SIZE};
use crate::hom::{HomKind, HomSearch, Homomorphism, Preserve, SearchMode};
use crate::modal::{
    generated_subalgebra, is_hom_of_kind, ModalAlgebra, SubalgebraKind, MAX_ATOMS,
};
use crate::ulogic::{catalog_validates, eval_sentence, UniversalSentence};

/// Largest number of product coordinates the closure will track.
pub const MAX_COORDINATES: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAlgebra {
    pub carrier: Algebra,
    /// Carrier indices of the free generators.
    pub generators: Vec<usize>,
    /// Number of coordinates `Σ |A|^k` of the ambient product.
    pub coordinates: usize,
}

/// The subalgebra of `∏_{A ∈ K} A^{A^k}` generated by the `k` projection
/// tuples. Elements are numbered in lexicographic order of their tuples;
/// modal carriers are then re-encoded on their atoms.
pub fn free_algebra(k: &AlgebraCatalog, gens: usize, limits: &Limits) -> Result<FreeAlgebra> {
    let sig = k
        .signature()
        .ok_or_else(|| Error::Precondition("the free algebra of an empty catalog is undefined".into()))?;
    let mut coords: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, a) in k.members().iter().enumerate() {
        let n = a.size();
        let count = (n as u128).checked_pow(gens as u32).unwrap_or(u128::MAX);
        if coords.len() as u128 + count > MAX_COORDINATES as u128 {
            return Err(Error::cap("product coordinates", coords.len() as u128 + count, MAX_COORDINATES as u128));
        }
        for idx in 0..count as usize {
            let mut env = vec![0; gens];
            let mut r = idx;
            for slot in env.iter_mut().rev() {
                *slot = r % n;
                r /= n;
            }
            coords.push((i, env));
        }
    }
    let members: Vec<&dyn FiniteAlgebra> = k.members().iter().map(|a| a.as_dyn()).collect();
    let alg = |c: usize| members[coords[c].0];
    let width = coords.len();
    let pointwise = |f: &dyn Fn(&dyn FiniteAlgebra, usize, usize) -> usize, x: &[u16], y: &[u16]| {
        (0..width)
            .map(|c| f(alg(c), x[c] as usize, y[c] as usize) as u16)
            .collect::<Vec<u16>>()
    };

    let mut tuples: Vec<Vec<u16>> = Vec::new();
    let mut index: HashMap<Vec<u16>, usize> = HashMap::new();
    let cap = limits.max_size.min(MAX_TABLE_SIZE);
    let mut push = |t: Vec<u16>, tuples: &mut Vec<Vec<u16>>| -> Result<()> {
        if !index.contains_key(&t) {
            if tuples.len() >= cap {
                return Err(Error::cap("free algebra carrier", tuples.len() as u128 + 1, cap as u128));
            }
            index.insert(t.clone(), tuples.len());
            tuples.push(t);
        }
        Ok(())
    };
    let bot: Vec<u16> = (0..width).map(|c| alg(c).bot() as u16).collect();
    let top: Vec<u16> = (0..width).map(|c| alg(c).top() as u16).collect();
    let gen_tuples: Vec<Vec<u16>> = (0..gens)
        .map(|g| (0..width).map(|c| coords[c].1[g] as u16).collect())
        .collect();
    push(bot, &mut tuples)?;
    push(top, &mut tuples)?;
    for t in &gen_tuples {
        push(t.clone(), &mut tuples)?;
    }
    let mut frontier = 0;
    while frontier < tuples.len() {
        let x = tuples[frontier].clone();
        frontier += 1;
        let mut found = vec![];
        if sig == Signature::Modal {
            found.push((0..width).map(|c| alg(c).boxed(x[c] as usize) as u16).collect());
        }
        for j in 0..frontier {
            let y = &tuples[j];
            found.push(pointwise(&|a, p, q| a.meet(p, q), &x, y));
            found.push(pointwise(&|a, p, q| a.join(p, q), &x, y));
            found.push(pointwise(&|a, p, q| a.imp(p, q), &x, y));
            found.push(pointwise(&|a, p, q| a.imp(p, q), y, &x));
        }
        for t in found {
            push(t, &mut tuples)?;
        }
    }

    tuples.sort_unstable();
    let index: HashMap<&[u16], usize> = tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let n = tuples.len();
    let op_table = |f: &dyn Fn(&dyn FiniteAlgebra, usize, usize) -> usize| -> Vec<u16> {
        let mut out = Vec::with_capacity(n * n);
        for x in &tuples {
            for y in &tuples {
                out.push(index[pointwise(f, x, y).as_slice()] as u16);
            }
        }
        out
    };
    let find = |t: Vec<u16>| index[t.as_slice()];
    let bot_i = find((0..width).map(|c| alg(c).bot() as u16).collect());
    let top_i = find((0..width).map(|c| alg(c).top() as u16).collect());
    let gen_i: Vec<usize> = gen_tuples.into_iter().map(find).collect();

    let (carrier, generators) = match sig {
        Signature::Heyting => {
            let h = HeytingAlgebra::from_flat(
                n,
                op_table(&|a, p, q| a.meet(p, q)),
                op_table(&|a, p, q| a.join(p, q)),
                op_table(&|a, p, q| a.imp(p, q)),
                bot_i,
                top_i,
            );
            (Algebra::Heyting(h), gen_i)
        }
        Signature::Modal => {
            // a finite Boolean algebra: re-encode each element by its atoms
            let leq = |x: &[u16], y: &[u16]| (0..width).all(|c| alg(c).leq(x[c] as usize, y[c] as usize));
            let atoms: Vec<usize> = (0..n)
                .filter(|&x| {
                    x != bot_i
                        && (0..n).all(|y| y == x || y == bot_i || !leq(&tuples[y], &tuples[x]))
                })
                .collect();
            let natoms = atoms.len();
            if 1usize.checked_shl(natoms as u32) != Some(n) {
                return Err(Error::Internal("free modal algebra is not a powerset".into()));
            }
            let cap = limits.max_atoms.min(MAX_ATOMS);
            if natoms > cap {
                return Err(Error::cap("atoms", natoms as u128, cap as u128));
            }
            let mask: Vec<u32> = tuples
                .iter()
                .map(|t| {
                    atoms
                        .iter()
                        .enumerate()
                        .filter(|&(_, &a)| leq(&tuples[a], t))
                        .fold(0u32, |m, (i, _)| m | 1 << i)
                })
                .collect();
            let mut boxt = vec![0u32; n];
            for (i, t) in tuples.iter().enumerate() {
                let b: Vec<u16> = (0..width).map(|c| alg(c).boxed(t[c] as usize) as u16).collect();
                boxt[mask[i] as usize] = mask[find(b)];
            }
            let m = ModalAlgebra::with_limits(natoms, boxt, limits)?;
            (
                Algebra::Modal(m),
                gen_i.into_iter().map(|g| mask[g] as usize).collect(),
            )
        }
    };
    Ok(FreeAlgebra {
        carrier,
        generators,
        coordinates: width,
    })
}

fn preserve_for(sig: Signature) -> Preserve {
    match sig {
        Signature::Heyting => Preserve::HEYTING,
        Signature::Modal => Preserve::MODAL,
    }
}

/// Number of homomorphisms `F → A` with prescribed generator images,
/// counted up to two, for every member `A` and every assignment. The
/// universal mapping property holds iff every count is one.
pub fn verify_ump(f: &FreeAlgebra, k: &AlgebraCatalog) -> bool {
    let ops = preserve_for(f.carrier.signature());
    k.members().iter().all(|a| {
        let n = a.size();
        let total = n.pow(f.generators.len() as u32);
        (0..total).all(|idx| {
            let mut r = idx;
            let mut fix = Vec::with_capacity(f.generators.len());
            for &g in f.generators.iter().rev() {
                fix.push((g, r % n));
                r /= n;
            }
            HomSearch::new(f.carrier.as_dyn(), a.as_dyn(), ops)
                .fix(&fix)
                .limit(2)
                .count()
                == 1
        })
    })
}

/// Every subalgebra (as a sorted subuniverse) of `a`.
pub fn subuniverses(a: &dyn FiniteAlgebra) -> Vec<Vec<usize>> {
    let mut found = vec![subuniverse(a, &[])];
    let mut i = 0;
    while i < found.len() {
        let s = found[i].clone();
        i += 1;
        for x in 0..a.size() {
            if s.binary_search(&x).is_err() {
                let mut seed = s.clone();
                seed.push(x);
                let t = subuniverse(a, &seed);
                if !found.contains(&t) {
                    found.push(t);
                }
            }
        }
    }
    found.sort();
    found
}

/// The subalgebra of `a` on a subuniverse, as a standalone algebra.
pub fn subalgebra_on(a: &Algebra, elems: &[usize]) -> Result<Algebra> {
    match a {
        Algebra::Heyting(h) => h.subalgebra(elems).map(|(s, _)| Algebra::Heyting(s)),
        Algebra::Modal(m) => {
            let seed: Vec<u32> = elems.iter().map(|&x| x as u32).collect();
            let b = generated_subalgebra(m, &seed, SubalgebraKind::Modal);
            b.as_algebra(m).map(|(s, _)| Algebra::Modal(s))
        }
    }
}

/// All subalgebras of all members, each with the index of its member.
/// `U(K) ∩ Mod(v)` is the set of those satisfying `v`, up to isomorphism.
pub fn subalgebra_pool(k: &AlgebraCatalog) -> Result<Vec<(usize, Algebra)>> {
    let mut out = Vec::new();
    for (i, a) in k.members().iter().enumerate() {
        for s in subuniverses(a.as_dyn()) {
            out.push((i, subalgebra_on(a, &s)?));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Admissibility {
    pub k: usize,
    pub admissible: bool,
    pub free_size: usize,
    /// Subalgebras of members kept by the restriction.
    pub restricted: usize,
    pub certificate: Option<Membership>,
    pub bounded: &'static str,
}

const BOUNDED_NOTE: &str = "k-bounded: exact for identities in at most k variables";

fn admissible_against(
    free: &FreeAlgebra,
    kept: Vec<Algebra>,
    limits: &Limits,
) -> Result<(bool, Option<Membership>)> {
    if kept.is_empty() {
        // Q of the empty family holds only trivial algebras
        return Ok((free.carrier.size() == 1, None));
    }
    let r = AlgebraCatalog::new("restricted", kept)?;
    let m = class_membership(&free.carrier, &r, ClassMode::Quasivariety, limits)?;
    Ok((m.member, Some(m)))
}

/// `F_k ∈ Q(U(K) ∩ Mod(v))`, the `k`-bounded form of weak admissibility.
pub fn weakly_admissible_k(
    k: &AlgebraCatalog,
    v: &UniversalSentence,
    gens: usize,
    limits: &Limits,
) -> Result<Admissibility> {
    let free = free_algebra(k, gens, limits)?;
    let pool = subalgebra_pool(k)?;
    let mut kept = Vec::new();
    for (_, a) in pool {
        if eval_sentence(&a, v, limits)?.valid {
            kept.push(a);
        }
    }
    let restricted = kept.len();
    let (admissible, certificate) = admissible_against(&free, kept, limits)?;
    Ok(Admissibility {
        k: gens,
        admissible,
        free_size: free.carrier.size(),
        restricted,
        certificate,
        bounded: BOUNDED_NOTE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletenessMode {
    Structural,
    Universal,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessViolation {
    pub index: usize,
    pub sentence: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub mode: CompletenessMode,
    pub k: usize,
    pub checked: usize,
    pub admissible: usize,
    pub valid: usize,
    pub violations: Vec<CompletenessViolation>,
    pub bounded: &'static str,
}

/// Flags every candidate that is admissible at level `k` but not valid in
/// `K`. A falsifier over the supplied list, not a decision procedure.
pub fn completeness_report_k(
    k: &AlgebraCatalog,
    candidates: &[UniversalSentence],
    gens: usize,
    mode: CompletenessMode,
    limits: &Limits,
) -> Result<CompletenessReport> {
    if mode == CompletenessMode::Structural {
        if let Some(i) = candidates.iter().position(|v| !v.is_quasi_identity()) {
            return Err(Error::Precondition(format!(
                "structural mode takes quasi-identities only; candidate {i} has {} conclusions",
                candidates[i].conclusions.len()
            )));
        }
    }
    let mut report = CompletenessReport {
        mode,
        k: gens,
        checked: candidates.len(),
        admissible: 0,
        valid: 0,
        violations: Vec::new(),
        bounded: BOUNDED_NOTE,
    };
    if candidates.is_empty() {
        return Ok(report);
    }
    let free = free_algebra(k, gens, limits)?;
    let pool = subalgebra_pool(k)?;
    let mut memo: HashMap<Vec<bool>, bool> = HashMap::new();
    for (i, v) in candidates.iter().enumerate() {
        let key = pool
            .iter()
            .map(|(_, a)| eval_sentence(a, v, limits).map(|e| e.valid))
            .collect::<Result<Vec<bool>>>()?;
        let admissible = match memo.get(&key) {
            Some(&b) => b,
            None => {
                let kept = pool
                    .iter()
                    .zip(&key)
                    .filter(|(_, &keep)| keep)
                    .map(|((_, a), _)| a.clone())
                    .collect();
                let b = admissible_against(&free, kept, limits)?.0;
                memo.insert(key, b);
                b
            }
        };
        let valid = catalog_validates(k, v, limits)?.valid;
        report.admissible += admissible as usize;
        report.valid += valid as usize;
        if admissible && !valid {
            report.violations.push(CompletenessViolation {
                index: i,
                sentence: v.to_string(),
            });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaFreeReport {
    pub k: usize,
    pub free_size: usize,
    pub free_sigma_size: usize,
    /// Modal embedding `B(F) → F_σ` extending `v ↦ □v`.
    pub embedding: Homomorphism,
    pub embedding_verified: bool,
    /// `F_σ ∈ SP(B(F))`.
    pub membership: Membership,
    pub passed: bool,
    pub bounded: &'static str,
}

/// Builds `F = F_K(k)` and `F_σ = F_{σK}(k)`, embeds `B(F)` into `F_σ`
/// through the extension of `v ↦ □v`, and checks `F_σ ∈ Q(B(F))`.
pub fn sigma_free_checks(k: &AlgebraCatalog, gens: usize, limits: &Limits) -> Result<SigmaFreeReport> {
    if k.signature() != Some(Signature::Heyting) {
        return Err(Error::Signature("sigma_free_checks needs a nonempty Heyting catalog".into()));
    }
    let free = free_algebra(k, gens, limits)?;
    let free_sigma = free_algebra(&sigma_catalog(k)?, gens, limits)?;
    let (Algebra::Heyting(f), Algebra::Modal(fs)) = (&free.carrier, &free_sigma.carrier) else {
        return Err(Error::Internal("free algebras have the wrong signature".into()));
    };
    let o = open_algebra(fs)?;
    let constraints: Vec<(usize, usize)> = free
        .generators
        .iter()
        .zip(&free_sigma.generators)
        .map(|(&g, &gs)| {
            let b = fs.box_of(gs as u32);
            (g, o.index_of(b).expect("boxes are open"))
        })
        .collect();
    let hom = heyting_hom_search(f, &o.heyting, &constraints, SearchMode::Any)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal("v ↦ □v does not extend to a Heyting homomorphism".into()))?;
    let ext = extend_hom(f, fs, &hom)?;
    let bf = boolean_extension(f)?;
    let embedding_verified = ext.is_unique()
        && ext.hom.is_injective()
        && is_hom_of_kind(&bf.algebra, fs, &ext.hom.map, HomKind::Modal);
    let target = AlgebraCatalog::modal("B(F)", vec![bf.algebra])?;
    let membership = class_membership(&free_sigma.carrier, &target, ClassMode::Quasivariety, limits)?;
    let passed = embedding_verified && membership.member;
    Ok(SigmaFreeReport {
        k: gens,
        free_size: f.size(),
        free_sigma_size: fs.size(),
        embedding: ext.hom,
        embedding_verified,
        membership,
        passed,
        bounded: BOUNDED_NOTE,
    })
}
