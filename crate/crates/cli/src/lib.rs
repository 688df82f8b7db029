//! Argument parsing and dispatch for the `grzlab` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use grzlab::bridge::{
    blok_esakia_catalog_check, box_hom_extension, box_hom_to_bo, boolean_extension,
    finite_blok_check, open_algebra,
};
use grzlab::catalog::{heyting_catalog, interior_catalog, poset_catalog, CatalogFile};
use grzlab::freealg::{
    completeness_report_k, free_algebra, sigma_free_checks, verify_ump, weakly_admissible_k,
    CompletenessMode,
};
use grzlab::io::{MapRecord, Object, Record};
use grzlab::modal::{
    blok_characterization, stable_witness_construct, validate_modal, BooleanSubalgebra,
};
use grzlab::ulogic::{
    catalog_validates, eval_sentence, parse, parse_rule, translate, Equation, Formula, Parsed,
};
use grzlab::verify::{candidate_quasi_identities, run_all, SuiteConfig};
use grzlab::{
    Algebra, AlgebraCatalog, Error, FiniteAlgebra, Limits, ModalAlgebra, Signature, Standard,
    UniversalSentence,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "grzlab", version, about = "Finite Heyting, interior and Grzegorczyk algebra workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Algebra file (JSON record).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Use a standard algebra instead of --input.
    #[arg(long = "std", global = true, value_parser = parse_std)]
    pub standard: Option<Standard>,
    /// Catalog file, or a single algebra record.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Number of generators / variables / points, depending on the verb.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub max_atoms: Option<usize>,
    #[arg(long, global = true)]
    pub max_size: Option<usize>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Compact single-line JSON (and JSON instead of a table for verify-all).
    #[arg(long, global = true)]
    pub json: bool,
}

fn parse_std(s: &str) -> Result<Standard, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a modal algebra (K, interior, Grz) with a failing element.
    GrzCheck,
    /// Grz test through subalgebras and quotients onto S2 or S12.
    BlokChar,
    /// Stable surjection onto S2 at an element where Grz fails.
    StableWitness {
        #[arg(long)]
        element: Option<u32>,
    },
    /// Free Boolean extension of a Heyting algebra.
    #[command(name = "build-B")]
    BuildB,
    /// Heyting algebra of open elements.
    #[command(name = "build-O")]
    BuildO,
    /// Isomorphism M -> BO(M) and a maximal chain of opens.
    FiniteBlok,
    /// Extend the identity on C to <C + g>, or reduce M onto BO(M) without --g.
    BoxExtend {
        #[arg(long)]
        g: Option<u32>,
        /// Atom masks of the blocks of C (default: the two-element subalgebra).
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<u32>,
    },
    /// Three-way Blok-Esakia comparison of --input against --catalog.
    BeCheck,
    /// Translate a rule into a universal sentence.
    Translate { text: String },
    /// Evaluate a formula, rule or sentence in --input.
    Eval { text: String },
    /// Evaluate a formula, rule or sentence in every member of --catalog.
    CatalogEval { text: String },
    /// Free algebra of the catalog variety on --k generators.
    Free,
    /// k-bounded weak admissibility of a rule or sentence.
    Admissible { text: String },
    /// Admissible-but-invalid candidates over the built-in candidate list.
    CompletenessReport {
        #[arg(long, value_enum, default_value_t = ModeArg::Structural)]
        mode: ModeArg,
    },
    /// Embedding B(F) -> F_sigma and F_sigma in SP(B(F)).
    SigmaFree,
    /// Enumerate a catalog up to isomorphism.
    Enumerate {
        #[arg(value_enum)]
        what: What,
    },
    /// Run the acceptance suite over the built-in catalogs.
    VerifyAll,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Structural,
    Universal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum What {
    Posets,
    Interior,
    Heyting,
}

/// Exit code, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    ok: bool,
    body: Value,
}

fn report(ok: bool, body: Value) -> Result<Report, Error> {
    Ok(Report { ok, body })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Internal(_) => EXIT_VIOLATED,
        _ => EXIT_USAGE,
    }
}

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CommandResult { code, stdout: text, stderr: String::new() }
            } else {
                CommandResult { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let go = || dispatch(&cli);
    let outcome = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Err(Error::Precondition(format!("thread pool: {e}"))),
        },
        None => go(),
    };
    match outcome {
        Ok(Output::Report(r)) => {
            let code = if r.ok { EXIT_OK } else { EXIT_VIOLATED };
            let text = if cli.global.json {
                serde_json::to_string(&r.body)
            } else {
                serde_json::to_string_pretty(&r.body)
            }
            .expect("reports serialize");
            CommandResult { code, stdout: text + "\n", stderr: String::new() }
        }
        Ok(Output::Text { ok, text }) => CommandResult {
            code: if ok { EXIT_OK } else { EXIT_VIOLATED },
            stdout: text,
            stderr: String::new(),
        },
        Err(e) => CommandResult {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

enum Output {
    Report(Report),
    Text { ok: bool, text: String },
}

fn limits(g: &Global) -> Limits {
    let d = Limits::default();
    Limits {
        max_atoms: g.max_atoms.unwrap_or(d.max_atoms),
        max_size: g.max_size.unwrap_or(d.max_size),
        ..d
    }
}

fn load_algebra(g: &Global) -> Result<Algebra, Error> {
    match (&g.input, g.standard) {
        (Some(_), Some(_)) => Err(Error::Precondition("give either --input or --std".into())),
        (Some(p), None) => {
            let a = grzlab::io::read_algebra(p)?;
            check_limits(&a, &limits(g))?;
            Ok(a)
        }
        (None, Some(s)) => Ok(Algebra::Modal(s.algebra())),
        (None, None) => Err(Error::Precondition("missing --input or --std".into())),
    }
}

fn check_limits(a: &Algebra, l: &Limits) -> Result<(), Error> {
    match a {
        Algebra::Modal(m) if m.atoms() > l.max_atoms => Err(Error::CapExceeded {
            what: "atoms",
            required: m.atoms() as u128,
            limit: l.max_atoms as u128,
        }),
        a if a.size() > l.max_size => Err(Error::CapExceeded {
            what: "carrier size",
            required: a.size() as u128,
            limit: l.max_size as u128,
        }),
        _ => Ok(()),
    }
}

fn load_modal(g: &Global) -> Result<ModalAlgebra, Error> {
    match load_algebra(g)? {
        Algebra::Modal(m) => Ok(m),
        Algebra::Heyting(_) => Err(Error::Signature("expected a modal algebra".into())),
    }
}

fn load_heyting(g: &Global) -> Result<grzlab::HeytingAlgebra, Error> {
    match load_algebra(g)? {
        Algebra::Heyting(h) => Ok(h),
        Algebra::Modal(_) => Err(Error::Signature("expected a Heyting algebra".into())),
    }
}

/// A catalog file, or a single algebra record as a one-member catalog.
pub fn load_catalog(path: &Path) -> Result<AlgebraCatalog, Error> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let name = path.display().to_string();
    if value.get("version").is_some() {
        let file = CatalogFile::from_json(&text)?;
        let mut members = Vec::new();
        for (entry, obj) in file.objects()? {
            match obj {
                Object::Algebra(a) => members.push(a),
                Object::Poset(_) => {
                    return Err(Error::InvalidEntry {
                        name: entry,
                        reason: "posets cannot be catalog members".into(),
                    })
                }
            }
        }
        AlgebraCatalog::new(name, members)
    } else {
        let r: Record = serde_json::from_value(value)?;
        AlgebraCatalog::new(name, vec![r.decode_algebra()?])
    }
}

fn catalog(g: &Global) -> Result<AlgebraCatalog, Error> {
    let path = g
        .catalog
        .as_ref()
        .ok_or_else(|| Error::Precondition("missing --catalog".into()))?;
    let k = load_catalog(path)?;
    let l = limits(g);
    for a in k.members() {
        check_limits(a, &l)?;
    }
    Ok(k)
}

fn map_json(h: &grzlab::Homomorphism) -> Value {
    json!(MapRecord { map: h.map.clone() })
}

fn record(a: impl Into<Record>) -> Value {
    json!(a.into())
}

/// A formula `φ` as the identity `φ = top`; rules are translated.
fn sentence(text: &str, sig: Signature) -> Result<UniversalSentence, Error> {
    match parse(text, sig)? {
        Parsed::Formula { formula, vars } => UniversalSentence::new(
            sig,
            vars,
            vec![],
            vec![Equation { lhs: formula, rhs: Formula::Top }],
        ),
        Parsed::Rule(r) => translate(&r),
        Parsed::Sentence(s) => Ok(s),
    }
}

fn gens(g: &Global, default: usize) -> usize {
    g.k.unwrap_or(default)
}

fn dispatch(cli: &Cli) -> Result<Output, Error> {
    let g = &cli.global;
    let r = match &cli.command {
        Command::GrzCheck => {
            let m = load_modal(g)?;
            let c = validate_modal(&m);
            report(
                c.grz,
                json!({"grz": c.grz, "witness": c.grz_witness, "K": c.k, "interior": c.interior}),
            )
        }
        Command::BlokChar => {
            let m = load_modal(g)?;
            let b = blok_characterization(&m)?;
            let witness = b.witness.as_ref().map(|w| {
                json!({
                    "subalgebra": w.subalgebra.blocks(),
                    "filter": w.filter.members(),
                    "target": w.target.name(),
                    "hom": map_json(&w.hom),
                    "verified": w.verify(&m),
                })
            });
            report(b.is_grz, json!({"grz": b.is_grz, "witness": witness}))
        }
        Command::StableWitness { element } => {
            let m = load_modal(g)?;
            let a = match element.or(validate_modal(&m).grz_witness) {
                Some(a) => a,
                None => return Ok(Output::Report(Report {
                    ok: false,
                    body: json!({"grz": true, "witness": null}),
                })),
            };
            let w = stable_witness_construct(&m, a)?;
            report(
                true,
                json!({
                    "element": a,
                    "h": map_json(&w.h),
                    "open_filter": w.open_filter.members(),
                    "a_prime": w.a_prime,
                    "g": map_json(&w.g),
                    "f": map_json(&w.f),
                    "k": map_json(&w.k),
                }),
            )
        }
        Command::BuildB => {
            let h = load_heyting(g)?;
            let b = boolean_extension(&h)?;
            report(
                true,
                json!({
                    "algebra": record(&b.algebra),
                    "points": b.points,
                    "embedding": {"map": b.embedding},
                }),
            )
        }
        Command::BuildO => {
            let m = load_modal(g)?;
            let o = open_algebra(&m)?;
            report(true, json!({"algebra": record(&o.heyting), "opens": o.opens}))
        }
        Command::FiniteBlok => {
            let m = load_modal(g)?;
            if !validate_modal(&m).grz {
                return Ok(Output::Report(Report { ok: false, body: json!({"grz": false}) }));
            }
            let w = finite_blok_check(&m)?;
            report(true, json!({"grz": true, "iso": map_json(&w.iso), "open_chain": w.open_chain}))
        }
        Command::BoxExtend { g: gen, blocks } => {
            let m = load_modal(g)?;
            match gen {
                Some(x) => {
                    let c = if blocks.is_empty() {
                        BooleanSubalgebra::trivial(&m)
                    } else {
                        BooleanSubalgebra::from_blocks(blocks.clone())
                    };
                    let e = box_hom_extension(&m, &c, *x)?;
                    let pairs: Vec<[u32; 2]> = e.f.pairs().into_iter().map(|(a, b)| [a, b]).collect();
                    report(
                        true,
                        json!({
                            "domain": e.f.domain.blocks(),
                            "target": e.target.blocks(),
                            "pairs": pairs,
                            "trace": e.trace,
                            "trace_checked": e.trace.check(&m),
                        }),
                    )
                }
                None => {
                    let a = if blocks.is_empty() {
                        BooleanSubalgebra::full(&m)
                    } else {
                        BooleanSubalgebra::from_blocks(blocks.clone())
                    };
                    let r = box_hom_to_bo(&m, &a)?;
                    let pairs: Vec<[u32; 2]> = r.f.pairs().into_iter().map(|(a, b)| [a, b]).collect();
                    report(true, json!({"generators": r.generators, "pairs": pairs, "steps": r.steps.len()}))
                }
            }
        }
        Command::BeCheck => {
            let m = load_modal(g)?;
            let k = catalog(g)?;
            let r = blok_esakia_catalog_check(&k, &m)?;
            report(r.agree, json!({"member": r.member(), "agree": r.agree, "report": r}))
        }
        Command::Translate { text } => {
            let sig = if text.contains("box") { Signature::Modal } else { Signature::Heyting };
            let rule = parse_rule(text, sig)?;
            let s = translate(&rule)?;
            report(
                true,
                json!({"rule": rule.to_string(), "sentence": s.to_string(), "file": s.to_file()}),
            )
        }
        Command::Eval { text } => {
            let a = load_algebra(g)?;
            let v = sentence(text, a.signature())?;
            let e = eval_sentence(&a, &v, &limits(g))?;
            report(e.valid, json!({"sentence": v.to_string(), "valid": e.valid, "counterexample": e.counterexample}))
        }
        Command::CatalogEval { text } => {
            let k = catalog(g)?;
            let sig = k.signature().ok_or_else(|| Error::Precondition("empty catalog".into()))?;
            let v = sentence(text, sig)?;
            let e = catalog_validates(&k, &v, &limits(g))?;
            report(e.valid, json!({"sentence": v.to_string(), "evaluation": e}))
        }
        Command::Free => {
            let k = catalog(g)?;
            let f = free_algebra(&k, gens(g, 1), &limits(g))?;
            let ump = verify_ump(&f, &k);
            report(
                ump,
                json!({
                    "k": gens(g, 1),
                    "size": f.carrier.size(),
                    "generators": f.generators,
                    "ump_verified": ump,
                    "algebra": record(&f.carrier),
                }),
            )
        }
        Command::Admissible { text } => {
            let k = catalog(g)?;
            let sig = k.signature().ok_or_else(|| Error::Precondition("empty catalog".into()))?;
            let v = sentence(text, sig)?;
            let a = weakly_admissible_k(&k, &v, gens(g, v.vars.len()), &limits(g))?;
            report(a.admissible, json!({"sentence": v.to_string(), "report": a}))
        }
        Command::CompletenessReport { mode } => {
            let k = catalog(g)?;
            let mode = match mode {
                ModeArg::Structural => CompletenessMode::Structural,
                ModeArg::Universal => CompletenessMode::Universal,
            };
            let candidates = candidate_quasi_identities()?;
            let r = completeness_report_k(&k, &candidates, gens(g, 2), mode, &limits(g))?;
            report(r.violations.is_empty(), json!(r))
        }
        Command::SigmaFree => {
            let k = catalog(g)?;
            let r = sigma_free_checks(&k, gens(g, 1), &limits(g))?;
            report(r.passed, json!(r))
        }
        Command::Enumerate { what } => {
            let file = match what {
                What::Posets => poset_catalog(gens(g, 3))?,
                What::Interior => interior_catalog(gens(g, 3))?,
                What::Heyting => heyting_catalog(g.max_size.unwrap_or(5))?,
            };
            let text = if g.json {
                serde_json::to_string(&file)? + "\n"
            } else {
                file.to_json()
            };
            return Ok(Output::Text { ok: true, text });
        }
        Command::VerifyAll => {
            let d = SuiteConfig::default();
            let cfg = SuiteConfig {
                max_atoms: g.max_atoms.unwrap_or(d.max_atoms).min(d.max_atoms),
                max_size: g.max_size.unwrap_or(d.max_size).min(d.max_size),
            };
            let start = Instant::now();
            let reports = run_all(&cfg);
            let ok = reports.iter().all(|r| r.passed && r.within_budget());
            if g.json {
                report(ok, json!({"config": cfg, "passed": ok, "checks": reports}))
            } else {
                let mut text: String = reports.iter().map(|r| r.line() + "\n").collect();
                text += &format!(
                    "{} in {:.3}s\n",
                    if ok { "all checks passed" } else { "some checks FAILED" },
                    start.elapsed().as_secs_f64()
                );
                return Ok(Output::Text { ok, text });
            }
        }
    };
    r.map(Output::Report)
}
