//! JSON records for algebras, posets and homomorphisms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::finlat::{validate_heyting, FinitePoset, HeytingAlgebra};
use crate::modal::{validate_modal, ModalAlgebra};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Record {
    Heyting {
        size: usize,
        meet: Vec<Vec<usize>>,
        join: Vec<Vec<usize>>,
        imp: Vec<Vec<usize>>,
        bot: usize,
        top: usize,
    },
    Poset {
        size: usize,
        leq: Vec<Vec<bool>>,
    },
    Modal {
        atoms: usize,
        #[serde(rename = "box")]
        boxt: Vec<u32>,
    },
}

/// A decoded record. Axioms are checked, not just shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Algebra(Algebra),
    Poset(FinitePoset),
}

impl Record {
    pub fn kind(&self) -> &'static str {
        match self {
            Record::Heyting { .. } => "heyting",
            Record::Poset { .. } => "poset",
            Record::Modal { .. } => "modal",
        }
    }

    pub fn decode(&self) -> Result<Object> {
        match self {
            Record::Heyting {
                size,
                meet,
                join,
                imp,
                bot,
                top,
            } => {
                if meet.len() != *size {
                    return Err(Error::Malformed(format!(
                        "size is {size} but meet has {} rows",
                        meet.len()
                    )));
                }
                let h = HeytingAlgebra::from_tables(meet, join, imp, *bot, *top)?;
                let report = validate_heyting(&h);
                if let Some(v) = report.violations.first() {
                    return Err(Error::Precondition(format!("not a Heyting algebra: {v}")));
                }
                Ok(Object::Algebra(Algebra::Heyting(h)))
            }
            Record::Poset { size, leq } => {
                if leq.len() != *size {
                    return Err(Error::Malformed(format!(
                        "size is {size} but leq has {} rows",
                        leq.len()
                    )));
                }
                Ok(Object::Poset(FinitePoset::new(leq.clone())?))
            }
            Record::Modal { atoms, boxt } => {
                let m = ModalAlgebra::new(*atoms, boxt.clone())?;
                if !validate_modal(&m).k {
                    return Err(Error::Precondition(
                        "box does not preserve top and binary meets".into(),
                    ));
                }
                Ok(Object::Algebra(Algebra::Modal(m)))
            }
        }
    }

    pub fn decode_algebra(&self) -> Result<Algebra> {
        match self.decode()? {
            Object::Algebra(a) => Ok(a),
            Object::Poset(_) => Err(Error::Signature("expected an algebra, found a poset".into())),
        }
    }
}

impl From<&HeytingAlgebra> for Record {
    fn from(h: &HeytingAlgebra) -> Self {
        let [meet, join, imp] = h.tables();
        Record::Heyting {
            size: h.size(),
            meet,
            join,
            imp,
            bot: crate::FiniteAlgebra::bot(h),
            top: crate::FiniteAlgebra::top(h),
        }
    }
}

impl From<&ModalAlgebra> for Record {
    fn from(m: &ModalAlgebra) -> Self {
        Record::Modal {
            atoms: m.atoms(),
            boxt: m.box_table().to_vec(),
        }
    }
}

impl From<&FinitePoset> for Record {
    fn from(p: &FinitePoset) -> Self {
        Record::Poset {
            size: p.size(),
            leq: p.relation().to_vec(),
        }
    }
}

impl From<&Algebra> for Record {
    fn from(a: &Algebra) -> Self {
        match a {
            Algebra::Heyting(h) => h.into(),
            Algebra::Modal(m) => m.into(),
        }
    }
}

impl From<&Object> for Record {
    fn from(o: &Object) -> Self {
        match o {
            Object::Algebra(a) => a.into(),
            Object::Poset(p) => p.into(),
        }
    }
}

/// `{"map":[...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub map: Vec<usize>,
}

pub fn parse_record(text: &str) -> Result<Record> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_record(path: &Path) -> Result<Record> {
    parse_record(&std::fs::read_to_string(path)?)
}

pub fn read_algebra(path: &Path) -> Result<Algebra> {
    read_record(path)?.decode_algebra()
}

pub fn to_json(record: &Record) -> String {
    serde_json::to_string(record).expect("records always serialize")
}
