use proptest::prelude::*;

use grzlab::bridge::{
    box_hom_extension, box_hom_to_bo, boolean_extension, extend_hom, is_box_partial, open_algebra,
    open_generated,
};
use grzlab::catalog::grz_up_to;
use grzlab::finlat::{downset_heyting, heyting_isomorphism, is_heyting_hom, validate_heyting};
use grzlab::hom::{preserves, HomSearch, Preserve};
use grzlab::modal::{
    blok_characterization, interior_from_preorder, open_filters, quotient, validate_modal,
    BooleanSubalgebra,
};
use grzlab::ulogic::{default_vars, parse_formula_with, Formula};
use grzlab::{FiniteAlgebra, FinitePoset, HomKind, Signature};

/// A poset on `n` points from the upper triangle of `bits`, closed transitively.
fn poset(n: usize, bits: u64) -> FinitePoset {
    let mut r = vec![vec![false; n]; n];
    let mut b = 0;
    for i in 0..n {
        r[i][i] = true;
        for j in i + 1..n {
            r[i][j] = bits & (1 << b) != 0;
            b += 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    FinitePoset::new(r).unwrap()
}

/// A preorder on `n` points: reflexive-transitive closure of `bits`.
fn preorder(n: usize, bits: u64) -> Vec<Vec<bool>> {
    let mut r: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || bits & (1 << (i * n + j)) != 0).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

fn formula(sig: Signature) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(Formula::Var),
        Just(Formula::Bot),
        Just(Formula::Top),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let mut ops = vec![
            inner.clone().prop_map(Formula::not).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)).boxed(),
        ];
        if sig == Signature::Modal {
            ops.push(inner.prop_map(Formula::boxed).boxed());
        }
        proptest::strategy::Union::new(ops)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn downsets_form_heyting_algebras(n in 0usize..6, bits in any::<u64>()) {
        let h = downset_heyting(&poset(n, bits)).unwrap();
        prop_assert!(validate_heyting(&h).is_ok());
    }

    #[test]
    fn boolean_extension_is_grz_with_opens_h(n in 0usize..5, bits in any::<u64>()) {
        let h = downset_heyting(&poset(n, bits)).unwrap();
        let b = boolean_extension(&h).unwrap();
        prop_assert!(validate_modal(&b.algebra).grz);
        let o = open_algebra(&b.algebra).unwrap();
        prop_assert!(heyting_isomorphism(&h, &o.heyting).is_some());
        // every element of B(H) is a Boolean combination of opens
        prop_assert_eq!(open_generated(&b.algebra), BooleanSubalgebra::full(&b.algebra));
    }

    #[test]
    fn grz_iff_partial_order(n in 0usize..5, bits in any::<u64>()) {
        let r = preorder(n, bits);
        let m = interior_from_preorder(&r);
        let c = validate_modal(&m);
        let antisym = (0..n).all(|i| (0..n).all(|j| i == j || !(r[i][j] && r[j][i])));
        prop_assert!(c.interior);
        prop_assert_eq!(c.grz, antisym);
        prop_assert_eq!(blok_characterization(&m).unwrap().is_grz, antisym);
    }

    #[test]
    fn open_algebra_satisfies_heyting_axioms(n in 0usize..5, bits in any::<u64>()) {
        let m = interior_from_preorder(&preorder(n, bits));
        prop_assert!(validate_heyting(&open_algebra(&m).unwrap().heyting).is_ok());
    }

    #[test]
    fn quotients_are_modal_homomorphisms(n in 1usize..5, bits in any::<u64>()) {
        let m = interior_from_preorder(&preorder(n, bits));
        for f in open_filters(&m) {
            let (q, h) = quotient(&m, &f).unwrap();
            prop_assert!(preserves(&m, &q, &h.map, Preserve::MODAL));
            let kernel: Vec<u32> = m.elements().filter(|&x| h.apply(x as usize) as u32 == q.top_elem()).collect();
            prop_assert_eq!(kernel, f.members().to_vec());
        }
    }

    #[test]
    fn hom_search_results_are_homomorphisms(n in 0usize..4, a in any::<u64>(), k in 0usize..4, b in any::<u64>()) {
        let h1 = downset_heyting(&poset(n, a)).unwrap();
        let h2 = downset_heyting(&poset(k, b)).unwrap();
        for map in HomSearch::new(&h1, &h2, Preserve::HEYTING).limit(50).run() {
            prop_assert!(is_heyting_hom(&h1, &h2, &map));
        }
    }

    #[test]
    fn extensions_are_unique(n in 0usize..4, a in any::<u64>(), k in 0usize..4, b in any::<u64>()) {
        // every Heyting map H → O(M) extends uniquely to a modal map B(H) → M
        let h = downset_heyting(&poset(n, a)).unwrap();
        let m = interior_from_preorder(poset(k, b).relation());
        let o = open_algebra(&m).unwrap();
        for f in grzlab::finlat::heyting_hom_search(&h, &o.heyting, &[], grzlab::SearchMode::Any).into_iter().take(8) {
            let e = extend_hom(&h, &m, &f).unwrap();
            prop_assert!(e.is_unique());
            let bh = boolean_extension(&h).unwrap();
            prop_assert!(grzlab::modal::is_hom_of_kind(&bh.algebra, &m, &e.hom.map, HomKind::Modal));
        }
    }

    #[test]
    fn heyting_formulas_round_trip(f in formula(Signature::Heyting)) {
        let mut vars = default_vars(3);
        let text = f.display(&vars).to_string();
        let g = parse_formula_with(&text, Signature::Heyting, &mut vars).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn modal_formulas_round_trip(f in formula(Signature::Modal)) {
        let mut vars = default_vars(3);
        let text = f.display(&vars).to_string();
        let g = parse_formula_with(&text, Signature::Modal, &mut vars).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn evaluation_commutes_with_homomorphisms(f in formula(Signature::Modal), n in 1usize..4, bits in any::<u64>(), env in any::<[u8; 3]>()) {
        let m = interior_from_preorder(&preorder(n, bits));
        let env: Vec<usize> = env.iter().map(|&x| x as usize % m.size()).collect();
        for filt in open_filters(&m) {
            let (q, h) = quotient(&m, &filt).unwrap();
            let image: Vec<usize> = env.iter().map(|&x| h.apply(x)).collect();
            prop_assert_eq!(h.apply(f.eval(&m, &env)), f.eval(&q, &image));
        }
    }
}

fn partitions(n: usize) -> Vec<Vec<u32>> {
    fn go(i: usize, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b] |= 1 << i;
            go(i + 1, n, cur, out);
            cur[b] &= !(1 << i);
        }
        cur.push(1 << i);
        go(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = vec![];
    go(0, n, &mut vec![], &mut out);
    out
}

#[test]
fn extension_steps_on_every_boolean_subalgebra() {
    let mut admissible = 0;
    for m in grz_up_to(4).unwrap() {
        let bo = open_generated(&m);
        for blocks in partitions(m.atoms()) {
            let c = BooleanSubalgebra::from_blocks(blocks);
            for g in m.elements().filter(|&g| !m.is_open(g)) {
                if let Ok(e) = box_hom_extension(&m, &c, g) {
                    admissible += 1;
                    assert!(is_box_partial(&m, &e.f));
                    assert!(e.trace.check(&m));
                    assert!(c.elements().iter().all(|&x| e.f.image(x) == Some(x)));
                }
            }
            let r = box_hom_to_bo(&m, &c).unwrap();
            assert!(is_box_partial(&m, &r.f));
            assert!(r.f.pairs().iter().all(|&(a, v)| bo.contains(v) && (!m.is_open(a) || v == a)));
        }
    }
    assert_eq!(admissible, 681);
}

#[test]
fn non_grz_inputs_are_rejected() {
    let s2 = grzlab::Standard::S2.algebra();
    assert!(box_hom_extension(&s2, &BooleanSubalgebra::trivial(&s2), 1).is_err());
    assert!(box_hom_to_bo(&s2, &BooleanSubalgebra::full(&s2)).is_err());
    assert!(grzlab::bridge::finite_blok_check(&s2).is_err());
}
