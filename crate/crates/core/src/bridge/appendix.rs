//! Executable form of the two lemmas behind the Blok lemma: extending the
//! identity of a Boolean subalgebra `C` to a □-homomorphism on `⟨C ∪ {g}⟩`,
//! and iterating that step until every non-open generator is eliminated.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hom::{HomKind, Homomorphism};
use crate::modal::{generated_subalgebra, open_elements, validate_modal, BooleanSubalgebra};
use crate::modal::{ModalAlgebra, SubalgebraKind};

/// Every intermediate value of one extension step. The per-`c` vectors are
/// aligned with `c`, the elements of `C` in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionTrace {
    pub g: u32,
    pub p_star: u32,
    pub p_upper: u32,
    pub c: Vec<u32>,
    pub p_c: Vec<u32>,
    pub u_c: Vec<u32>,
    pub p_prime_c: Vec<u32>,
    pub p: u32,
    /// The open elements `X` adjoined to `C` to form the target.
    pub opens_used: Vec<u32>,
}

impl ExtensionTrace {
    /// `p_* ≤ p ≤ p^*` and every `p_c`, `p′_c` below `g`.
    pub fn bounds_hold(&self) -> bool {
        let le = |a: u32, b: u32| a & !b == 0;
        le(self.p_star, self.p)
            && le(self.p, self.p_upper)
            && self.p_c.iter().all(|&x| le(x, self.g))
            && self.p_prime_c.iter().all(|&x| le(x, self.g))
    }

    /// (P): `□(p_c ∨ c) = □(g ∨ c)` for every `c`.
    pub fn p_holds(&self, m: &ModalAlgebra) -> bool {
        self.c
            .iter()
            .zip(&self.p_c)
            .all(|(&c, &pc)| m.box_of(pc | c) == m.box_of(self.g | c))
    }

    /// (P′): `□(¬p′_c ∨ c) = □(¬g ∨ c)` for every `c`.
    pub fn p_prime_holds(&self, m: &ModalAlgebra) -> bool {
        self.c.iter().zip(&self.p_prime_c).all(|(&c, &pc)| {
            m.box_of(m.not(pc) | c) == m.box_of(m.not(self.g) | c)
        })
    }

    pub fn check(&self, m: &ModalAlgebra) -> bool {
        self.bounds_hold() && self.p_holds(m) && self.p_prime_holds(m)
    }
}

/// A map defined on a Boolean subalgebra of `M` with values in `M`. The
/// table is indexed by the block encoding of the domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialHom {
    pub domain: BooleanSubalgebra,
    pub hom: Homomorphism,
}

impl PartialHom {
    pub fn identity(domain: BooleanSubalgebra) -> Self {
        let map = (0..domain.size() as u32)
            .map(|x| domain.decode(x) as usize)
            .collect();
        PartialHom {
            domain,
            hom: Homomorphism::new(HomKind::BoxPartial, map),
        }
    }

    /// Image of an element of `M`, if it lies in the domain.
    pub fn image(&self, a: u32) -> Option<u32> {
        self.domain
            .contains(a)
            .then(|| self.hom.apply(self.domain.encode(a) as usize) as u32)
    }

    /// `(a, f(a))` over the domain, by increasing `a`.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = (0..self.domain.size() as u32)
            .map(|x| (self.domain.decode(x), self.hom.apply(x as usize) as u32))
            .collect();
        v.sort_unstable();
        v
    }
}

/// Boolean homomorphism on the domain with `f(□a) = □f(a)` whenever `a`
/// and `□a` both lie in the domain.
pub fn is_box_partial(m: &ModalAlgebra, f: &PartialHom) -> bool {
    let top = m.top_elem();
    let covers = f.domain.decode(f.domain.size() as u32 - 1) == top;
    if !covers || f.hom.map.len() != f.domain.size() {
        return false;
    }
    let pairs = f.pairs();
    if pairs.iter().any(|&(_, v)| v > top) {
        return false;
    }
    let img = |a: u32| f.image(a).expect("closed under the Boolean operations");
    let boolean = img(0) == 0
        && img(top) == top
        && pairs.iter().all(|&(a, fa)| {
            img(m.not(a)) == m.not(fa) && pairs.iter().all(|&(b, fb)| img(a & b) == fa & fb)
        });
    boolean
        && pairs.iter().all(|&(a, fa)| {
            let ba = m.box_of(a);
            !f.domain.contains(ba) || img(ba) == m.box_of(fa)
        })
}

/// Output of one extension step: `f : ⟨C ∪ {g}⟩ → D` fixing `C`.
#[derive(Clone, Debug, Serialize)]
pub struct BoxExtension {
    pub f: PartialHom,
    pub target: BooleanSubalgebra,
    pub trace: ExtensionTrace,
}

fn opens_in(m: &ModalAlgebra, s: &BooleanSubalgebra) -> Vec<u32> {
    s.elements().into_iter().filter(|&x| m.is_open(x)).collect()
}

fn covers_atoms(m: &ModalAlgebra, s: &BooleanSubalgebra) -> bool {
    let mut acc = 0u32;
    for &b in s.blocks() {
        if acc & b != 0 {
            return false;
        }
        acc |= b;
    }
    acc == m.top_elem()
}

/// Extends the identity on `C` to a □-homomorphism on `⟨C ∪ {g}⟩` by
/// choosing `f(g) = p = p_* ∨ ⋁ p_c ∨ ⋁ p′_c`.
pub fn box_hom_extension(
    m: &ModalAlgebra,
    c: &BooleanSubalgebra,
    g: u32,
) -> Result<BoxExtension> {
    if !validate_modal(m).grz {
        return Err(Error::Precondition(
            "the extension step needs a Grzegorczyk algebra".into(),
        ));
    }
    if !covers_atoms(m, c) || g > m.top_elem() {
        return Err(Error::Precondition(
            "C is not a Boolean subalgebra of M or g is not an element".into(),
        ));
    }
    let c_elems = c.elements();
    let mut seed = c_elems.clone();
    seed.push(g);
    let b = generated_subalgebra(m, &seed, SubalgebraKind::Boolean);
    if opens_in(m, &b) != opens_in(m, c) {
        return Err(Error::Precondition(
            "⟨C ∪ {g}⟩ has open elements outside C".into(),
        ));
    }

    let le = |a: u32, b: u32| a & !b == 0;
    let p_star = c_elems.iter().filter(|&&x| le(x, g)).fold(0, |a, &x| a | x);
    let p_upper = c_elems
        .iter()
        .filter(|&&x| le(g, x))
        .fold(m.top_elem(), |a, &x| a & x);
    let p_c: Vec<u32> = c_elems
        .iter()
        .map(|&x| m.box_of(g | x) & m.not(x))
        .collect();
    let u_c: Vec<u32> = c_elems.iter().map(|&x| m.not(g) | x).collect();
    let p_prime_c: Vec<u32> = u_c
        .iter()
        .map(|&u| {
            let bu = m.box_of(u);
            m.not(m.implies(m.box_of(m.implies(u, bu)), bu))
        })
        .collect();
    let p = p_c
        .iter()
        .chain(&p_prime_c)
        .fold(p_star, |a, &x| a | x);

    let mut opens_used: Vec<u32> = c_elems
        .iter()
        .zip(&u_c)
        .flat_map(|(&x, &u)| [m.box_of(g | x), m.box_of(u), m.box_of(m.implies(u, m.box_of(u)))])
        .collect();
    opens_used.sort_unstable();
    opens_used.dedup();
    let mut seed = c_elems.clone();
    seed.extend(&opens_used);
    let target = generated_subalgebra(m, &seed, SubalgebraKind::Boolean);

    // a block of B is γ ∧ g or γ ∧ ¬g for the block γ of C above it
    let images: Vec<u32> = b
        .blocks()
        .iter()
        .map(|&beta| {
            let gamma = c
                .blocks()
                .iter()
                .copied()
                .find(|&x| le(beta, x))
                .expect("B refines C");
            if le(beta, g) {
                gamma & p
            } else {
                gamma & m.not(p)
            }
        })
        .collect();
    let map = (0..b.size() as u32)
        .map(|x| {
            images
                .iter()
                .enumerate()
                .filter(|&(i, _)| x & (1 << i) != 0)
                .fold(0, |a, (_, &v)| a | v) as usize
        })
        .collect();
    let f = PartialHom {
        domain: b,
        hom: Homomorphism::new(HomKind::BoxPartial, map),
    };
    let trace = ExtensionTrace {
        g,
        p_star,
        p_upper,
        c: c_elems,
        p_c,
        u_c,
        p_prime_c,
        p,
        opens_used,
    };
    Ok(BoxExtension { f, target, trace })
}

/// The composite `f = f_n ⋯ f_1` together with the generators it removed.
#[derive(Clone, Debug, Serialize)]
pub struct OpenReduction {
    pub f: PartialHom,
    /// Non-open generators `g_1, …, g_n` of the domain, eliminated last first.
    pub generators: Vec<u32>,
    pub steps: Vec<BoxExtension>,
}

/// A □-homomorphism from `A` into `⟨opens⟩` fixing every open element of `A`.
pub fn box_hom_to_bo(m: &ModalAlgebra, a: &BooleanSubalgebra) -> Result<OpenReduction> {
    if !validate_modal(m).grz {
        return Err(Error::Precondition(
            "the reduction to BO(M) needs a Grzegorczyk algebra".into(),
        ));
    }
    if !covers_atoms(m, a) {
        return Err(Error::Precondition("A is not a Boolean subalgebra of M".into()));
    }
    let a_opens = opens_in(m, a);
    let mut generators = Vec::new();
    let mut span = generated_subalgebra(m, &a_opens, SubalgebraKind::Boolean);
    for x in a.elements() {
        if !span.contains(x) {
            generators.push(x);
            let mut seed = a_opens.clone();
            seed.extend(&generators);
            span = generated_subalgebra(m, &seed, SubalgebraKind::Boolean);
        }
    }
    if &span != a {
        return Err(Error::Internal("greedy generators do not span A".into()));
    }

    let mut values: Vec<u32> = (0..a.size() as u32).map(|x| a.decode(x)).collect();
    let mut current = a.clone();
    let mut remaining = generators.clone();
    let mut steps = Vec::with_capacity(generators.len());
    while let Some(g) = remaining.pop() {
        let mut seed = opens_in(m, &current);
        seed.extend(&remaining);
        let c = generated_subalgebra(m, &seed, SubalgebraKind::Boolean);
        let step = box_hom_extension(m, &c, g)?;
        if step.f.domain != current {
            return Err(Error::Internal(
                "extension domain differs from the current subalgebra".into(),
            ));
        }
        for v in &mut values {
            *v = step.f.image(*v).expect("values stay in the current subalgebra");
        }
        current = step.target.clone();
        steps.push(step);
    }
    let f = PartialHom {
        domain: a.clone(),
        hom: Homomorphism::new(
            HomKind::BoxPartial,
            values.into_iter().map(|v| v as usize).collect(),
        ),
    };
    Ok(OpenReduction {
        f,
        generators,
        steps,
    })
}

/// The modal subalgebra generated by the open elements, i.e. `BO(M)` inside `M`.
pub fn open_generated(m: &ModalAlgebra) -> BooleanSubalgebra {
    generated_subalgebra(m, &open_elements(m), SubalgebraKind::Modal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finlat::FinitePoset;
    use crate::modal::{complex_algebra, Standard};

    fn three_chain() -> ModalAlgebra {
        complex_algebra(&FinitePoset::chain(3)).unwrap()
    }

    #[test]
    fn golden_three_chain_step() {
        let m = three_chain();
        let c = BooleanSubalgebra::trivial(&m);
        let ext = box_hom_extension(&m, &c, 0b010).unwrap();
        let t = &ext.trace;
        assert_eq!((t.p_star, t.p_upper), (0, 0b111));
        assert_eq!(t.c, vec![0, 0b111]);
        assert_eq!(t.p_c, vec![0, 0]);
        assert_eq!(t.p_prime_c, vec![0b010, 0]);
        assert_eq!(t.p, 0b010);
        assert_eq!(t.opens_used, vec![0, 0b001, 0b011, 0b111]);
        assert!(t.check(&m));
        assert_eq!(ext.f.pairs(), vec![(0, 0), (2, 2), (5, 5), (7, 7)]);
        assert!(is_box_partial(&m, &ext.f));
        assert_eq!(ext.target, BooleanSubalgebra::full(&m));
    }

    #[test]
    fn generator_inside_c_is_fixed() {
        let m = three_chain();
        let c = generated_subalgebra(&m, &[0b010], SubalgebraKind::Boolean);
        let ext = box_hom_extension(&m, &c, 0b010).unwrap();
        assert_eq!(ext.trace.p, 0b010);
        assert!(ext.f.pairs().iter().all(|&(a, b)| a == b));
    }

    #[test]
    fn shared_opens_precondition() {
        let m = three_chain();
        let c = BooleanSubalgebra::trivial(&m);
        // ⟨{p}⟩ contains the open {p}, which C lacks
        assert!(matches!(
            box_hom_extension(&m, &c, 0b001),
            Err(Error::Precondition(_))
        ));
        assert!(box_hom_extension(&Standard::S2.algebra(), &c, 0).is_err());
    }

    #[test]
    fn reduction_of_q_in_three_chain() {
        let m = three_chain();
        let a = generated_subalgebra(&m, &[0b010], SubalgebraKind::Boolean);
        let r = box_hom_to_bo(&m, &a).unwrap();
        assert_eq!(r.generators, vec![0b010]);
        assert!(is_box_partial(&m, &r.f));
        let bo = open_generated(&m);
        assert!(r.f.pairs().iter().all(|&(_, v)| bo.contains(v)));
        assert_eq!(r.f.image(0b010), Some(0b010));
    }

    #[test]
    fn reduction_of_opens_is_identity() {
        let m = three_chain();
        let a = generated_subalgebra(&m, &open_elements(&m), SubalgebraKind::Boolean);
        let r = box_hom_to_bo(&m, &a).unwrap();
        assert!(r.generators.is_empty());
        assert_eq!(r.f, PartialHom::identity(a));
    }
}
