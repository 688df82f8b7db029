//! Formulas, multiple-conclusion rules and the disjunctive universal
//! sentences they translate to, with brute-force evaluation.

mod parse;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, FiniteAlgebra, Limits, Signature};
use crate::bridge::AlgebraCatalog;
use crate::error::{Error, Result};

pub use parse::{parse, parse_formula, parse_formula_with, parse_rule, parse_sentence, Parsed};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(usize),
    Bot,
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn var(i: usize) -> Self {
        Formula::Var(i)
    }
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn boxed(a: Formula) -> Self {
        Formula::Box(Box::new(a))
    }

    /// `□(□(p → □p) → p) → p`.
    pub fn grz(p: usize) -> Self {
        let p = || Formula::var(p);
        Formula::imp(
            Formula::boxed(Formula::imp(
                Formula::boxed(Formula::imp(p(), Formula::boxed(p()))),
                p(),
            )),
            p(),
        )
    }

    pub fn uses_box(&self) -> bool {
        match self {
            Formula::Box(_) => true,
            Formula::Var(_) | Formula::Bot | Formula::Top => false,
            Formula::Not(a) => a.uses_box(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.uses_box() || b.uses_box()
            }
        }
    }

    /// One more than the largest variable index, 0 for closed formulas.
    pub fn var_bound(&self) -> usize {
        match self {
            Formula::Var(i) => i + 1,
            Formula::Bot | Formula::Top => 0,
            Formula::Not(a) | Formula::Box(a) => a.var_bound(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.var_bound().max(b.var_bound())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => 0,
            Formula::Not(a) | Formula::Box(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Replaces variable `i` by `sigma[i]`.
    pub fn substitute(&self, sigma: &[Formula]) -> Formula {
        let s = |a: &Formula| Box::new(a.substitute(sigma));
        match self {
            Formula::Var(i) => sigma[*i].clone(),
            Formula::Bot => Formula::Bot,
            Formula::Top => Formula::Top,
            Formula::Not(a) => Formula::Not(s(a)),
            Formula::Box(a) => Formula::Box(s(a)),
            Formula::And(a, b) => Formula::And(s(a), s(b)),
            Formula::Or(a, b) => Formula::Or(s(a), s(b)),
            Formula::Imp(a, b) => Formula::Imp(s(a), s(b)),
        }
    }

    pub fn eval(&self, a: &dyn FiniteAlgebra, env: &[usize]) -> usize {
        match self {
            Formula::Var(i) => env[*i],
            Formula::Bot => a.bot(),
            Formula::Top => a.top(),
            Formula::Not(x) => a.neg(x.eval(a, env)),
            Formula::Box(x) => a.boxed(x.eval(a, env)),
            Formula::And(x, y) => a.meet(x.eval(a, env), y.eval(a, env)),
            Formula::Or(x, y) => a.join(x.eval(a, env), y.eval(a, env)),
            Formula::Imp(x, y) => a.imp(x.eval(a, env), y.eval(a, env)),
        }
    }

    pub fn display<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        Shown { f: self, vars }
    }
}

struct Shown<'a> {
    f: &'a Formula,
    vars: &'a [String],
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(_) | Formula::Box(_) => 4,
        _ => 5,
    }
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |g: &'_ Formula, need: u8, out: &mut fmt::Formatter<'_>| -> fmt::Result {
            let s = Shown { f: g, vars: self.vars };
            if prec(g) < need {
                write!(out, "({s})")
            } else {
                write!(out, "{s}")
            }
        };
        match self.f {
            Formula::Var(i) => match self.vars.get(*i) {
                Some(name) => out.write_str(name),
                None => write!(out, "x{i}"),
            },
            Formula::Bot => out.write_str("bot"),
            Formula::Top => out.write_str("top"),
            Formula::Not(a) => {
                out.write_str("~")?;
                sub(a, 4, out)
            }
            Formula::Box(a) => {
                out.write_str("box ")?;
                sub(a, 4, out)
            }
            Formula::And(a, b) => {
                sub(a, 3, out)?;
                out.write_str(" & ")?;
                sub(b, 4, out)
            }
            Formula::Or(a, b) => {
                sub(a, 2, out)?;
                out.write_str(" | ")?;
                sub(b, 3, out)
            }
            Formula::Imp(a, b) => {
                sub(a, 2, out)?;
                out.write_str(" -> ")?;
                sub(b, 1, out)
            }
        }
    }
}

fn check_signature<'a>(sig: Signature, mut fs: impl Iterator<Item = &'a Formula>) -> Result<()> {
    if sig == Signature::Heyting && fs.any(Formula::uses_box) {
        return Err(Error::Signature(
            "box occurs in a Heyting-signature formula".into(),
        ));
    }
    Ok(())
}

/// Fresh names `p, q, r, s, t, …` for generated formulas.
pub fn default_vars(n: usize) -> Vec<String> {
    const BASE: [&str; 5] = ["p", "q", "r", "s", "t"];
    (0..n)
        .map(|i| match BASE.get(i) {
            Some(s) => s.to_string(),
            None => format!("x{i}"),
        })
        .collect()
}

/// A multiple-conclusion rule `Γ / Δ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub signature: Signature,
    pub vars: Vec<String>,
    pub premises: Vec<Formula>,
    pub conclusions: Vec<Formula>,
}

impl Rule {
    pub fn new(
        signature: Signature,
        vars: Vec<String>,
        premises: Vec<Formula>,
        conclusions: Vec<Formula>,
    ) -> Result<Self> {
        let all = || premises.iter().chain(&conclusions);
        check_signature(signature, &mut all())?;
        if all().any(|f| f.var_bound() > vars.len()) {
            return Err(Error::Precondition("formula uses an undeclared variable".into()));
        }
        Ok(Rule {
            signature,
            vars,
            premises,
            conclusions,
        })
    }

    /// `σ(Γ) / σ(Δ)`; `sigma` is over the old variables, `vars` names the new ones.
    pub fn substitute(&self, sigma: &[Formula], vars: Vec<String>) -> Result<Rule> {
        let sub = |fs: &[Formula]| fs.iter().map(|f| f.substitute(sigma)).collect();
        Rule::new(self.signature, vars, sub(&self.premises), sub(&self.conclusions))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |fs: &[Formula]| {
            fs.iter()
                .map(|f| f.display(&self.vars).to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let (l, r) = (side(&self.premises), side(&self.conclusions));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => write!(out, "/"),
            (true, false) => write!(out, "/ {r}"),
            (false, true) => write!(out, "{l} /"),
            (false, false) => write!(out, "{l} / {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Formula,
    pub rhs: Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceClass {
    /// No premises, one conclusion.
    Identity,
    /// One conclusion.
    QuasiIdentity,
    /// No premises, several (or no) conclusions.
    Positive,
    Disjunctive,
}

/// `(∀x̄)[s₁ = s′₁ ∧ … ⇒ t₁ = t′₁ ∨ …]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniversalSentence {
    pub signature: Signature,
    pub vars: Vec<String>,
    pub premises: Vec<Equation>,
    pub conclusions: Vec<Equation>,
}

impl UniversalSentence {
    pub fn new(
        signature: Signature,
        vars: Vec<String>,
        premises: Vec<Equation>,
        conclusions: Vec<Equation>,
    ) -> Result<Self> {
        if premises.is_empty() && conclusions.is_empty() {
            return Err(Error::Precondition(
                "a sentence needs at least one premise or conclusion".into(),
            ));
        }
        check_signature(
            signature,
            premises
                .iter()
                .chain(&conclusions)
                .flat_map(|e| [&e.lhs, &e.rhs]),
        )?;
        let bound = premises
            .iter()
            .chain(&conclusions)
            .map(|e| e.lhs.var_bound().max(e.rhs.var_bound()))
            .max()
            .unwrap_or(0);
        if bound > vars.len() {
            return Err(Error::Precondition("equation uses an undeclared variable".into()));
        }
        Ok(UniversalSentence {
            signature,
            vars,
            premises,
            conclusions,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.premises.is_empty() && self.conclusions.len() == 1
    }

    pub fn is_quasi_identity(&self) -> bool {
        self.conclusions.len() == 1
    }

    pub fn is_positive(&self) -> bool {
        self.premises.is_empty()
    }

    /// The most specific class the sentence belongs to.
    pub fn class(&self) -> SentenceClass {
        if self.is_identity() {
            SentenceClass::Identity
        } else if self.is_quasi_identity() {
            SentenceClass::QuasiIdentity
        } else if self.is_positive() {
            SentenceClass::Positive
        } else {
            SentenceClass::Disjunctive
        }
    }

    pub fn to_file(&self) -> SentenceFile {
        let side = |es: &[Equation]| {
            es.iter()
                .map(|e| {
                    [
                        e.lhs.display(&self.vars).to_string(),
                        e.rhs.display(&self.vars).to_string(),
                    ]
                })
                .collect()
        };
        SentenceFile {
            premises: side(&self.premises),
            conclusions: side(&self.conclusions),
        }
    }
}

impl fmt::Display for UniversalSentence {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |es: &[Equation]| {
            es.iter()
                .map(|e| format!("{} = {}", e.lhs.display(&self.vars), e.rhs.display(&self.vars)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        if self.premises.is_empty() {
            write!(out, "=> {}", side(&self.conclusions))
        } else if self.conclusions.is_empty() {
            write!(out, "{} =>", side(&self.premises))
        } else {
            write!(out, "{} => {}", side(&self.premises), side(&self.conclusions))
        }
    }
}

/// On-disk form: `{"premises":[["t1","t2"],…],"conclusions":[…]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceFile {
    #[serde(default)]
    pub premises: Vec<[String; 2]>,
    #[serde(default)]
    pub conclusions: Vec<[String; 2]>,
}

impl SentenceFile {
    pub fn to_sentence(&self, sig: Signature) -> Result<UniversalSentence> {
        let mut vars = Vec::new();
        let mut side = |pairs: &[[String; 2]]| -> Result<Vec<Equation>> {
            pairs
                .iter()
                .map(|[l, r]| {
                    Ok(Equation {
                        lhs: parse_formula_with(l, sig, &mut vars)?,
                        rhs: parse_formula_with(r, sig, &mut vars)?,
                    })
                })
                .collect()
        };
        let premises = side(&self.premises)?;
        let conclusions = side(&self.conclusions)?;
        UniversalSentence::new(sig, vars, premises, conclusions)
    }
}

/// `T(Γ/Δ) = [φ₁ = ⊤ ∧ … ⇒ ψ₁ = ⊤ ∨ …]`.
pub fn translate(r: &Rule) -> Result<UniversalSentence> {
    if r.premises.is_empty() && r.conclusions.is_empty() {
        return Err(Error::Precondition("the empty rule has no translation".into()));
    }
    let eq = |f: &Formula| Equation {
        lhs: f.clone(),
        rhs: Formula::Top,
    };
    UniversalSentence::new(
        r.signature,
        r.vars.clone(),
        r.premises.iter().map(eq).collect(),
        r.conclusions.iter().map(eq).collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub valid: bool,
    /// Least violating assignment, first variable most significant.
    pub counterexample: Option<Vec<usize>>,
}

fn signature_matches(a: &Algebra, sig: Signature) -> Result<()> {
    if a.signature() != sig {
        return Err(Error::Signature(format!(
            "{sig} sentence evaluated in a {} algebra",
            a.signature()
        )));
    }
    Ok(())
}

fn holds_at(a: &dyn FiniteAlgebra, v: &UniversalSentence, env: &[usize]) -> bool {
    let sat = |e: &Equation| e.lhs.eval(a, env) == e.rhs.eval(a, env);
    !v.premises.iter().all(sat) || v.conclusions.iter().any(sat)
}

/// Checks `A ⊨ v` over all `|A|^n` assignments.
pub fn eval_sentence(a: &Algebra, v: &UniversalSentence, limits: &Limits) -> Result<Evaluation> {
    signature_matches(a, v.signature)?;
    let size = a.size() as u128;
    let n = v.vars.len() as u32;
    let total = size
        .checked_pow(n)
        .filter(|&t| t <= limits.max_evaluations)
        .ok_or_else(|| {
            Error::cap(
                "assignments",
                size.checked_pow(n).unwrap_or(u128::MAX),
                limits.max_evaluations,
            )
        })? as u64;
    let alg = a.as_dyn();
    let decode = |mut idx: u64| {
        let mut env = vec![0usize; n as usize];
        for slot in env.iter_mut().rev() {
            *slot = (idx % size as u64) as usize;
            idx /= size as u64;
        }
        env
    };
    let bad = (0..total)
        .into_par_iter()
        .find_first(|&idx| !holds_at(alg, v, &decode(idx)));
    Ok(Evaluation {
        valid: bad.is_none(),
        counterexample: bad.map(decode),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEvaluation {
    pub valid: bool,
    pub failing_member: Option<usize>,
    pub counterexample: Option<Vec<usize>>,
}

/// Valid iff valid in every member; reports the first failing member.
pub fn catalog_validates(
    k: &AlgebraCatalog,
    v: &UniversalSentence,
    limits: &Limits,
) -> Result<CatalogEvaluation> {
    for (i, a) in k.members().iter().enumerate() {
        let e = eval_sentence(a, v, limits)?;
        if !e.valid {
            return Ok(CatalogEvaluation {
                valid: false,
                failing_member: Some(i),
                counterexample: e.counterexample,
            });
        }
    }
    Ok(CatalogEvaluation {
        valid: true,
        failing_member: None,
        counterexample: None,
    })
}

/// Every formula over `nvars` variables of depth at most `depth`, built from
/// the variables, `⊥`, `⊤` and the connectives of `sig`. Deterministic order.
pub fn enumerate_formulas(nvars: usize, depth: usize, sig: Signature) -> Vec<Formula> {
    let mut levels: Vec<Vec<Formula>> = vec![(0..nvars)
        .map(Formula::Var)
        .chain([Formula::Bot, Formula::Top])
        .collect()];
    for d in 1..=depth {
        let below: Vec<&Formula> = levels.iter().flatten().collect();
        let mut next = Vec::new();
        for a in &below {
            if a.depth() + 1 == d {
                next.push(Formula::not((*a).clone()));
                if sig == Signature::Modal {
                    next.push(Formula::boxed((*a).clone()));
                }
            }
        }
        for a in &below {
            for b in &below {
                if a.depth().max(b.depth()) + 1 == d {
                    next.push(Formula::and((*a).clone(), (*b).clone()));
                    next.push(Formula::or((*a).clone(), (*b).clone()));
                    next.push(Formula::imp((*a).clone(), (*b).clone()));
                }
            }
        }
        levels.push(next);
    }
    levels.into_iter().flatten().collect()
}

/// Rules with premise sets of size at most `max_premises` (no repeats,
/// increasing positions) and exactly `conclusions` conclusions.
pub fn enumerate_rules(
    nvars: usize,
    depth: usize,
    max_premises: usize,
    conclusions: usize,
    sig: Signature,
) -> Vec<Rule> {
    let fs = enumerate_formulas(nvars, depth, sig);
    let vars = default_vars(nvars);
    let premise_sets = subsets_up_to(fs.len(), max_premises);
    let conclusion_sets = subsets_exactly(fs.len(), conclusions);
    let mut out = Vec::with_capacity(premise_sets.len() * conclusion_sets.len());
    for ps in &premise_sets {
        for cs in &conclusion_sets {
            out.push(Rule {
                signature: sig,
                vars: vars.clone(),
                premises: ps.iter().map(|&i| fs[i].clone()).collect(),
                conclusions: cs.iter().map(|&i| fs[i].clone()).collect(),
            });
        }
    }
    out
}

fn subsets_exactly(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..=k).flat_map(|j| subsets_exactly(n, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finlat::HeytingAlgebra;
    use crate::modal::Standard;

    fn h(n: usize) -> Algebra {
        Algebra::Heyting(HeytingAlgebra::chain(n))
    }

    #[test]
    fn modus_ponens_rule() {
        let r = parse_rule("p, p -> q / q", Signature::Heyting).unwrap();
        assert_eq!(r.vars, vec!["p", "q"]);
        assert_eq!(
            r.premises,
            vec![
                Formula::var(0),
                Formula::imp(Formula::var(0), Formula::var(1))
            ]
        );
        assert_eq!(r.conclusions, vec![Formula::var(1)]);
        assert_eq!(r.to_string(), "p, p -> q / q");
        let t = translate(&r).unwrap();
        assert_eq!(t.to_string(), "p = top, p -> q = top => q = top");
        assert_eq!(t.class(), SentenceClass::QuasiIdentity);
    }

    #[test]
    fn grz_formula_parses() {
        let (f, vars) =
            parse_formula("box(box(p -> box p) -> p) -> p", Signature::Modal).unwrap();
        assert_eq!(vars, vec!["p"]);
        assert_eq!(f, Formula::grz(0));
        assert_eq!(f.display(&vars).to_string(), "box (box (p -> box p) -> p) -> p");
        assert!(parse_formula("box p", Signature::Heyting).is_err());
    }

    #[test]
    fn theorem_rule() {
        let r = parse_rule("/ p | ~p", Signature::Heyting).unwrap();
        assert!(r.premises.is_empty());
        assert_eq!(
            r.conclusions,
            vec![Formula::or(Formula::var(0), Formula::not(Formula::var(0)))]
        );
        assert_eq!(translate(&r).unwrap().class(), SentenceClass::Identity);
        let r = parse_rule("/ p, ~p", Signature::Heyting).unwrap();
        assert_eq!(translate(&r).unwrap().class(), SentenceClass::Positive);
        let empty = parse_rule("/", Signature::Heyting).unwrap();
        assert!(translate(&empty).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_formula("p & (q | ", Signature::Heyting) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("{other:?}"),
        }
        match parse_formula("p $ q", Signature::Heyting) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn excluded_middle_in_chains() {
        let v = translate(&parse_rule("/ p | ~p", Signature::Heyting).unwrap()).unwrap();
        let lim = Limits::default();
        assert!(eval_sentence(&h(2), &v, &lim).unwrap().valid);
        let e = eval_sentence(&h(3), &v, &lim).unwrap();
        assert_eq!(e.counterexample, Some(vec![1]));
        let k = AlgebraCatalog::new("k", vec![h(2), h(3)]).unwrap();
        let c = catalog_validates(&k, &v, &lim).unwrap();
        assert_eq!(c.failing_member, Some(1));
        let empty = AlgebraCatalog::new("none", vec![]).unwrap();
        assert!(catalog_validates(&empty, &v, &lim).unwrap().valid);
    }

    #[test]
    fn grz_identity_in_standard_algebras() {
        let v = translate(&parse_rule("/ box(box(p -> box p) -> p) -> p", Signature::Modal).unwrap())
            .unwrap();
        let lim = Limits::default();
        let s2 = Algebra::Modal(Standard::S2.algebra());
        assert_eq!(eval_sentence(&s2, &v, &lim).unwrap().counterexample, Some(vec![1]));
        let s12 = Algebra::Modal(Standard::S12.algebra());
        assert!(!eval_sentence(&s12, &v, &lim).unwrap().valid);
        assert!(eval_sentence(&h(2), &v, &lim).is_err());
    }

    #[test]
    fn sentence_text_and_json() {
        let s = parse_sentence("x & y = x, y = top => x = top", Signature::Heyting).unwrap();
        assert_eq!(s.class(), SentenceClass::QuasiIdentity);
        let file = s.to_file();
        let json = serde_json::to_string(&file).unwrap();
        assert_eq!(
            json,
            r#"{"premises":[["x & y","x"],["y","top"]],"conclusions":[["x","top"]]}"#
        );
        let back: SentenceFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_sentence(Signature::Heyting).unwrap(), s);
    }

    #[test]
    fn evaluation_cap() {
        let vars: Vec<String> = (0..30).map(|i| format!("x{i}")).collect();
        let s = UniversalSentence::new(
            Signature::Heyting,
            vars,
            vec![],
            vec![Equation {
                lhs: Formula::Var(29),
                rhs: Formula::Var(29),
            }],
        )
        .unwrap();
        assert!(matches!(
            eval_sentence(&h(2), &s, &Limits::default()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn formula_counts() {
        assert_eq!(enumerate_formulas(2, 0, Signature::Heyting).len(), 4);
        assert_eq!(enumerate_formulas(2, 1, Signature::Heyting).len(), 56);
        assert_eq!(enumerate_formulas(1, 1, Signature::Modal).len(), 3 + 6 + 27);
        assert_eq!(enumerate_rules(2, 1, 2, 1, Signature::Heyting).len(), 1597 * 56);
    }
}
