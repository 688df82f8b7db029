//! The acceptance suite as library code, so that both the test harness and
//! `grzlab verify-all` run the same checks.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::algebra::{Algebra, FiniteAlgebra, Limits};
use crate::bridge::{
    blok_esakia_catalog_check, box_hom_extension, box_hom_to_bo, boolean_extension,
    finite_blok_check, is_box_partial, open_algebra, open_generated, AlgebraCatalog,
};
use crate::catalog::{enumerate_heyting, grz_up_to, interior_up_to, labeled_interior};
use crate::error::{Error, Result};
use crate::finlat::{heyting_isomorphism, heyting_product, HeytingAlgebra};
use crate::freealg::{
    completeness_report_k, free_algebra, sigma_free_checks, subuniverses, verify_ump,
    weakly_admissible_k, CompletenessMode,
};
use crate::hom::HomKind;
use crate::modal::{
    blok_characterization, generated_subalgebra, is_hom_of_kind, modal_isomorphism,
    modal_product, open_elements, open_filters, principal_filter, quotient,
    stable_witness_construct, validate_modal, BooleanSubalgebra, FilterKind, ModalAlgebra,
    Standard, SubalgebraKind,
};
use crate::ulogic::{
    catalog_validates, enumerate_rules, eval_sentence, parse_rule, translate, Formula,
    UniversalSentence,
};
use crate::Signature;

/// Sizes of the built-in catalogs the suite runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    /// Largest number of points for topology catalogs (at most 4).
    pub max_atoms: usize,
    /// Largest Heyting algebra in Heyting catalogs (at most 8).
    pub max_size: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_atoms: 4,
            max_size: 8,
        }
    }
}

impl SuiteConfig {
    fn atoms(&self, k: usize) -> usize {
        k.min(self.max_atoms)
    }

    fn size(&self, n: usize) -> usize {
        n.min(self.max_size)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Number of instances examined.
    pub cases: usize,
    pub detail: String,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
    #[serde(serialize_with = "secs")]
    pub budget: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl CheckReport {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    /// `PASS [ 2] name  (cases, time / budget)`
    pub fn line(&self) -> String {
        let verdict = if self.passed && self.within_budget() {
            "PASS"
        } else {
            "FAIL"
        };
        format!(
            "{verdict} [{:>2}] {:<32} {:>6} cases  {:>9.3}s / {}s  {}",
            self.id,
            self.name,
            self.cases,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

/// Collects failures without stopping at the first one.
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.case(ok, what),
            Err(e) => {
                let w = what();
                self.case(false, || format!("{w}: {e}"));
            }
        }
    }

    fn finish(self, id: u8, name: &'static str, budget: u64, start: Instant) -> CheckReport {
        let passed = self.failures.is_empty();
        let detail = match self.failures.first() {
            None => String::new(),
            Some(f) => format!("{} failures, first: {f}", self.failures.len()),
        };
        CheckReport {
            id,
            name,
            passed,
            cases: self.cases,
            detail,
            elapsed: start.elapsed(),
            budget: Duration::from_secs(budget),
        }
    }
}

fn catalog_error(id: u8, name: &'static str, budget: u64, start: Instant, e: Error) -> CheckReport {
    let mut t = Tally::new();
    t.case(false, || format!("catalog construction failed: {e}"));
    t.finish(id, name, budget, start)
}

macro_rules! try_catalog {
    ($e:expr, $id:expr, $name:expr, $budget:expr, $start:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return catalog_error($id, $name, $budget, $start, e),
        }
    };
}

pub fn standard_algebras(_: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for (std, size, opens) in [(Standard::S2, 4, vec![0, 3]), (Standard::S12, 8, vec![0, 4, 7])] {
        let m = std.algebra();
        t.case(m.size() == size, || format!("{} has {} elements", std.name(), m.size()));
        t.case(open_elements(&m) == opens, || format!("{} opens", std.name()));
        let c = validate_modal(&m);
        let witness_fails = c.grz_witness.is_some_and(|w| !m.grz_holds_at(w));
        t.case(c.interior && !c.grz && witness_fails, || {
            format!("{} classification {c:?}", std.name())
        });
    }
    t.finish(1, "standard algebras", 1, start)
}

pub fn blok_characterization_agrees(cfg: &SuiteConfig) -> CheckReport {
    const NAME: &str = "Blok characterization";
    let start = Instant::now();
    let mut t = Tally::new();
    for k in 0..=cfg.atoms(4) {
        let all = try_catalog!(labeled_interior(k), 2, NAME, 60, start);
        for (i, m) in all.iter().enumerate() {
            let grz = validate_modal(m).grz;
            t.result(
                blok_characterization(m).map(|b| {
                    b.is_grz == grz
                        && (grz || b.witness.as_ref().is_some_and(|w| w.verify(m)))
                }),
                || format!("labelled topology {i} on {k} points"),
            );
        }
    }
    t.finish(2, NAME, 60, start)
}

pub fn stable_witnesses(cfg: &SuiteConfig) -> CheckReport {
    const NAME: &str = "stable surjections onto S2";
    let start = Instant::now();
    let mut t = Tally::new();
    let s2 = Standard::S2.algebra();
    let all = try_catalog!(interior_up_to(cfg.atoms(3)), 3, NAME, 60, start);
    for (i, m) in all.iter().enumerate() {
        for a in m.elements().filter(|&a| !m.grz_holds_at(a)) {
            t.result(
                stable_witness_construct(m, a).map(|w| {
                    is_hom_of_kind(m, &s2, &w.h.map, HomKind::Stable)
                        && w.h.is_surjective_onto(4)
                        && matches!(w.h.apply(a as usize), 0b01 | 0b10)
                }),
                || format!("catalog algebra {i}, element {a}"),
            );
        }
    }
    t.finish(3, NAME, 60, start)
}

/// `B(H)` is Grz and `O(B(H)) ≅ H` through the canonical embedding.
fn b_then_o(h: &HeytingAlgebra) -> Result<bool> {
    let b = boolean_extension(h)?;
    if !validate_modal(&b.algebra).grz {
        return Ok(false);
    }
    let o = open_algebra(&b.algebra)?;
    // e is a bijection onto the opens, and an isomorphism H ≅ O(B(H))
    let e: Vec<usize> = b.embedding.iter().map(|&x| o.index_of(x).unwrap_or(usize::MAX)).collect();
    let mut sorted = e.clone();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted.len() == h.size()
        && o.heyting.size() == h.size()
        && crate::finlat::is_heyting_hom(h, &o.heyting, &e))
}

pub fn boolean_extension_roundtrip(cfg: &SuiteConfig) -> CheckReport {
    const NAME: &str = "B(H) is Grz and OB(H) = H";
    let start = Instant::now();
    let mut t = Tally::new();
    let hs = try_catalog!(enumerate_heyting(cfg.size(8)), 4, NAME, 60, start);
    for (i, h) in hs.iter().enumerate() {
        t.result(b_then_o(h), || format!("Heyting algebra {i} of size {}", h.size()));
    }
    t.finish(4, NAME, 60, start)
}

fn blok_lemma_holds(m: &ModalAlgebra) -> Result<bool> {
    let w = finite_blok_check(m)?;
    let o = open_algebra(m)?;
    let bo = boolean_extension(&o.heyting)?;
    let chain_ok = w.open_chain.first() == Some(&0)
        && w.open_chain.last() == Some(&m.top_elem())
        && w.open_chain.len() == m.atoms() + 1
        && w.open_chain.iter().all(|&x| m.is_open(x))
        && w.open_chain
            .windows(2)
            .all(|p| p[0] & !p[1] == 0 && (p[1] & !p[0]).count_ones() == 1);
    Ok(chain_ok
        && w.iso.is_injective()
        && w.iso.is_surjective_onto(bo.algebra.size())
        && is_hom_of_kind(m, &bo.algebra, &w.iso.map, HomKind::Modal))
}

pub fn finite_blok_lemma(cfg: &SuiteConfig) -> CheckReport {
    const NAME: &str = "M = BO(M) for finite Grz";
    let start = Instant::now();
    let mut t = Tally::new();
    let all = try_catalog!(grz_up_to(cfg.atoms(4)), 5, NAME, 300, start);
    for (i, m) in all.iter().enumerate() {
        t.result(blok_lemma_holds(m), || format!("Grz algebra {i} on {} atoms", m.atoms()));
    }
    t.finish(5, NAME, 300, start)
}

/// Every Boolean subalgebra of `m` with at most `max` elements.
fn small_boolean_subalgebras(m: &ModalAlgebra, max: usize) -> Vec<BooleanSubalgebra> {
    let mut out: Vec<BooleanSubalgebra> = Vec::new();
    for a in m.elements() {
        let s = generated_subalgebra(m, &[a], SubalgebraKind::Boolean);
        if s.size() <= max && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn extension_step_holds(m: &ModalAlgebra, c: &BooleanSubalgebra, g: u32) -> Result<Option<bool>> {
    let ext = match box_hom_extension(m, c, g) {
        Ok(e) => e,
        Err(Error::Precondition(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let fixes_c = c.elements().iter().all(|&x| ext.f.image(x) == Some(x));
    let lands = ext.f.pairs().iter().all(|&(_, v)| ext.target.contains(v));
    Ok(Some(
        fixes_c && lands && is_box_partial(m, &ext.f) && ext.trace.check(m),
    ))
}

fn reduction_holds(m: &ModalAlgebra, a: &BooleanSubalgebra, bo: &BooleanSubalgebra) -> Result<bool> {
    let r = box_hom_to_bo(m, a)?;
    let fixes_opens = a
        .elements()
        .iter()
        .filter(|&&x| m.is_open(x))
        .all(|&x| r.f.image(x) == Some(x));
    let lands = r.f.pairs().iter().all(|&(_, v)| bo.contains(v));
    Ok(fixes_opens && lands && is_box_partial(m, &r.f))
}

pub fn appendix_algorithms(cfg: &SuiteConfig) -> CheckReport {
    const NAME: &str = "box-homomorphism extension";
    let start = Instant::now();
    let mut t = Tally::new();

    // the worked example on the 3-chain with p = {q}
    let chain = crate::modal::complex_algebra(&crate::finlat::FinitePoset::chain(3))
        .expect("3 atoms");
    t.result(
        box_hom_extension(&chain, &BooleanSubalgebra::trivial(&chain), 0b010).map(|e| {
            e.trace.p == 0b010
                && e.trace.p_prime_c == [0b010, 0]
                && e.trace.opens_used == [0, 0b001, 0b011, 0b111]
                && e.target == BooleanSubalgebra::full(&chain)
        }),
        || "golden 3-chain example".into(),
    );

    let all = try_catalog!(grz_up_to(cfg.atoms(3)), 6, NAME, 300, start);
    for (i, m) in all.iter().enumerate() {
        let bo = open_generated(m);
        for c in small_boolean_subalgebras(m, 4) {
            for g in m.elements().filter(|&g| !m.is_open(g)) {
                match extension_step_holds(m, &c, g) {
                    Ok(None) => {}
                    Ok(Some(ok)) => t.case(ok, || format!("algebra {i}, C = {:?}, g = {g}", c.blocks())),
                    Err(e) => t.case(false, || format!("algebra {i}, g = {g}: {e}")),
                }
            }
        }
        let mut domains = small_boolean_subalgebras(m, usize::MAX);
        domains.push(BooleanSubalgebra::full(m));
        for a in domains {
            t.result(reduction_holds(m, &a, &bo), || {
                format!("algebra {i}, reduction of {:?}", a.blocks())
            });
        }
    }
    t.finish(6, NAME, 300, start)
}

fn o_of_product(m1: &ModalAlgebra, m2: &ModalAlgebra, limits: &Limits) -> Result<bool> {
    let p = modal_product(&[m1.clone(), m2.clone()], limits)?;
    let lhs = open_algebra(&p)?.heyting;
    let rhs = heyting_product(&[open_algebra(m1)?.heyting, open_algebra(m2)?.heyting], limits)?;
    Ok(heyting_isomorphism(&lhs, &rhs).is_some())
}

/// `O(M/F) ≅ O(M)/(F ∩ opens)` for every open filter, and `O(S)` is the
/// subalgebra of `O(M)` on the opens of `S` for every modal subalgebra.
fn o_commutes(m: &ModalAlgebra) -> Result<bool> {
    let o = open_algebra(m)?;
    for f in open_filters(m) {
        let (q, _) = quotient(m, &f)?;
        let d = o.index_of(f.least()).ok_or_else(|| Error::Internal("filter of opens".into()))?;
        let (oq, _) = o.heyting.quotient_by_filter(d);
        if heyting_isomorphism(&open_algebra(&q)?.heyting, &oq).is_none() {
            return Ok(false);
        }
    }
    for s in subuniverses(m) {
        let seed: Vec<u32> = s.iter().map(|&x| x as u32).collect();
        let sub = generated_subalgebra(m, &seed, SubalgebraKind::Modal);
        let (sa, _) = sub.as_algebra(m)?;
        let idx: Vec<usize> = sub
            .elements()
            .into_iter()
            .filter(|&x| m.is_open(x))
            .map(|x| o.index_of(x).expect("open"))
            .collect();
        let (os, _) = o.heyting.subalgebra(&idx)?;
        if heyting_isomorphism(&open_algebra(&sa)?.heyting, &os).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `B(H/↑a) ≅ B(H)/↑e(a)` for every congruence of `H`.
fn b_commutes(h: &HeytingAlgebra) -> Result<bool> {
    let b = boolean_extension(h)?;
    for a in 0..h.size() {
        let (hq, _) = h.quotient_by_filter(a);
        let f = principal_filter(&b.algebra, b.embedding[a], FilterKind::Open);
        let (bq, _) = quotient(&b.algebra, &f)?;
        if modal_isomorphism(&boolean_extension(&hq)?.algebra, &bq).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn functor_commutation(cfg: &SuiteConfig) -> CheckReport {
    const NAME: &str = "O and B commute with H, S, P";
    let start = Instant::now();
    let mut t = Tally::new();
    let limits = Limits::default();
    let ms = try_catalog!(interior_up_to(cfg.atoms(3)), 7, NAME, 300, start);
    for (i, m1) in ms.iter().enumerate() {
        for (j, m2) in ms.iter().enumerate() {
            t.result(o_of_product(m1, m2, &limits), || format!("O(M{i} x M{j})"));
        }
        t.result(o_commutes(m1), || format!("quotients and subalgebras of M{i}"));
    }
    let hs = try_catalog!(enumerate_heyting(cfg.size(6)), 7, NAME, 300, start);
    for (i, h) in hs.iter().enumerate() {
        t.result(b_commutes(h), || format!("congruences of H{i}"));
    }
    t.finish(7, NAME, 300, start)
}

pub fn blok_esakia_finite(cfg: &SuiteConfig) -> CheckReport {
    const NAME: &str = "Blok-Esakia three-way agreement";
    let start = Instant::now();
    let mut t = Tally::new();
    let ms = try_catalog!(grz_up_to(cfg.atoms(3)), 8, NAME, 300, start);
    let hs = try_catalog!(enumerate_heyting(cfg.size(5)), 8, NAME, 300, start);
    // every nonempty subfamily of the Heyting catalog
    for bits in 1u32..1 << hs.len() {
        let members: Vec<HeytingAlgebra> = hs
            .iter()
            .enumerate()
            .filter(|&(i, _)| bits & (1 << i) != 0)
            .map(|(_, h)| h.clone())
            .collect();
        let k = try_catalog!(AlgebraCatalog::heyting(format!("K{bits}"), members), 8, NAME, 300, start);
        for (i, m) in ms.iter().enumerate() {
            t.result(blok_esakia_catalog_check(&k, m).map(|r| r.agree), || {
                format!("M{i} against catalog {bits:#b}")
            });
        }
    }
    t.finish(8, NAME, 300, start)
}

fn rule(text: &str) -> Result<UniversalSentence> {
    translate(&parse_rule(text, Signature::Heyting)?)
}

fn identity(f: Formula) -> Result<UniversalSentence> {
    UniversalSentence::new(
        Signature::Modal,
        vec!["p".into()],
        vec![],
        vec![crate::ulogic::Equation { lhs: f, rhs: Formula::Top }],
    )
}

fn translation_checks(cfg: &SuiteConfig, t: &mut Tally) -> Result<()> {
    let limits = Limits::default();
    let hs = enumerate_heyting(cfg.size(8))?;
    let mp = rule("p, p -> q / q")?;
    for (i, h) in hs.iter().enumerate() {
        let a = Algebra::Heyting(h.clone());
        t.case(eval_sentence(&a, &mp, &limits)?.valid, || format!("modus ponens in H{i}"));
    }
    let lem = rule("/ p | ~p")?;
    let two = Algebra::Heyting(HeytingAlgebra::chain(2));
    let three = Algebra::Heyting(HeytingAlgebra::chain(3));
    t.case(eval_sentence(&two, &lem, &limits)?.valid, || "excluded middle in the 2-chain".into());
    let e = eval_sentence(&three, &lem, &limits)?;
    t.case(!e.valid && e.counterexample == Some(vec![1]), || {
        format!("excluded middle in the 3-chain: {:?}", e.counterexample)
    });

    let grz = identity(Formula::grz(0))?;
    for (i, h) in hs.iter().enumerate() {
        let b = Algebra::Modal(boolean_extension(h)?.algebra);
        t.case(eval_sentence(&b, &grz, &limits)?.valid, || format!("grz in B(H{i})"));
    }
    for std in [Standard::S2, Standard::S12] {
        let e = eval_sentence(&Algebra::Modal(std.algebra()), &grz, &limits)?;
        t.case(!e.valid, || format!("grz in {}", std.name()));
    }
    Ok(())
}

pub fn translation_evaluation(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::new();
    if let Err(e) = translation_checks(cfg, &mut t) {
        t.case(false, || e.to_string());
    }
    t.finish(9, "translation and evaluation", 10, start)
}

/// Quasi-identities from rules in `p, q` of depth at most 1 with at most
/// two premises and one conclusion.
pub fn candidate_quasi_identities() -> Result<Vec<UniversalSentence>> {
    enumerate_rules(2, 1, 2, 1, Signature::Heyting)
        .iter()
        .map(translate)
        .collect()
}

fn free_checks(t: &mut Tally) -> Result<()> {
    let limits = Limits::default();
    let two = AlgebraCatalog::heyting("2-chain", vec![HeytingAlgebra::chain(2)])?;
    let f = free_algebra(&two, 1, &limits)?;
    t.case(f.carrier.size() == 4 && verify_ump(&f, &two), || {
        format!("free algebra on one generator has {} elements", f.carrier.size())
    });

    let candidates = candidate_quasi_identities()?;
    for mode in [CompletenessMode::Structural, CompletenessMode::Universal] {
        let r = completeness_report_k(&two, &candidates, 2, mode, &limits)?;
        t.case(r.violations.is_empty() && r.checked == candidates.len(), || {
            format!("{mode:?} report: {} violations", r.violations.len())
        });
    }
    // spot checks of the single-sentence entry point against plain validity
    for v in candidates.iter().step_by(997) {
        let adm = weakly_admissible_k(&two, v, 2, &limits)?.admissible;
        let valid = catalog_validates(&two, v, &limits)?.valid;
        t.case(!adm || valid, || format!("admissible but invalid: {v}"));
    }
    for k in 0..=1 {
        let r = sigma_free_checks(&two, k, &limits)?;
        t.case(r.passed, || format!("sigma-free checks at k = {k}"));
    }
    Ok(())
}

pub fn free_algebras(_: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::new();
    if let Err(e) = free_checks(&mut t) {
        t.case(false, || e.to_string());
    }
    t.finish(10, "free algebras and admissibility", 300, start)
}

pub type Check = fn(&SuiteConfig) -> CheckReport;

pub const CHECKS: [Check; 10] = [
    standard_algebras,
    blok_characterization_agrees,
    stable_witnesses,
    boolean_extension_roundtrip,
    finite_blok_lemma,
    appendix_algorithms,
    functor_commutation,
    blok_esakia_finite,
    translation_evaluation,
    free_algebras,
];

pub fn run_all(cfg: &SuiteConfig) -> Vec<CheckReport> {
    CHECKS.iter().map(|c| c(cfg)).collect()
}
