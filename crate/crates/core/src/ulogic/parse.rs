//! Recursive-descent parser for formulas, rules and universal sentences.
//!
//! ```text
//! formula  := disj ( "->" formula )?
//! disj     := conj ( "|" conj )*
//! conj     := unary ( "&" unary )*
//! unary    := "~" unary | "box" unary | atom
//! atom     := var | "bot" | "top" | "(" formula ")"
//! rule     := list? "/" list?
//! sentence := ( eqs "=>" )? eqs       eqs := ( formula "=" formula ),*
//! ```

use crate::algebra::Signature;
use crate::error::{Error, Result};

use super::{Equation, Formula, Rule, UniversalSentence};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    And,
    Or,
    Arrow,
    Not,
    Comma,
    Slash,
    Eq,
    Implies,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'~' => Tok::Not,
            b',' => Tok::Comma,
            b'/' => Tok::Slash,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'=' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'=' => Tok::Eq,
            b'a'..=b'z' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_lowercase() || bytes[i + 1].is_ascii_digit())
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'v> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    sig: Signature,
    vars: &'v mut Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::Or) {
            acc = Formula::Or(Box::new(acc), Box::new(self.conj()?));
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            acc = Formula::And(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if let Some(Tok::Ident(name)) = self.peek() {
            if name == "box" {
                if self.sig == Signature::Heyting {
                    return self.err("box is not part of the Heyting signature");
                }
                self.pos += 1;
                return Ok(Formula::Box(Box::new(self.unary()?)));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "bot" => Formula::Bot,
                    "top" => Formula::Top,
                    _ => {
                        let i = match self.vars.iter().position(|v| *v == name) {
                            Some(i) => i,
                            None => {
                                self.vars.push(name);
                                self.vars.len() - 1
                            }
                        };
                        Formula::Var(i)
                    }
                })
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }

    /// Comma-separated formulas, possibly none, up to `stop` or the end.
    fn list(&mut self, stop: Option<&Tok>) -> Result<Vec<Formula>> {
        let mut out = Vec::new();
        if self.peek().is_none() || (stop.is_some() && self.peek() == stop) {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn equations(&mut self, stop: Option<&Tok>) -> Result<Vec<Equation>> {
        let mut out = Vec::new();
        if self.peek().is_none() || (stop.is_some() && self.peek() == stop) {
            return Ok(out);
        }
        loop {
            let lhs = self.formula()?;
            if !self.eat(&Tok::Eq) {
                return self.err("expected '='");
            }
            let rhs = self.formula()?;
            out.push(Equation { lhs, rhs });
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(format!("unexpected trailing token {t:?}")),
        }
    }
}

fn parser<'v>(text: &str, sig: Signature, vars: &'v mut Vec<String>) -> Result<Parser<'v>> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
        sig,
        vars,
    })
}

/// Parses one formula, numbering new variables after those in `vars`.
pub fn parse_formula_with(text: &str, sig: Signature, vars: &mut Vec<String>) -> Result<Formula> {
    let mut p = parser(text, sig, vars)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses one formula; variables are numbered by first occurrence.
pub fn parse_formula(text: &str, sig: Signature) -> Result<(Formula, Vec<String>)> {
    let mut vars = Vec::new();
    let f = parse_formula_with(text, sig, &mut vars)?;
    Ok((f, vars))
}

pub fn parse_rule(text: &str, sig: Signature) -> Result<Rule> {
    let mut vars = Vec::new();
    let mut p = parser(text, sig, &mut vars)?;
    let premises = p.list(Some(&Tok::Slash))?;
    if !p.eat(&Tok::Slash) {
        return p.err("expected '/' between premises and conclusions");
    }
    let conclusions = p.list(None)?;
    p.finish()?;
    Ok(Rule {
        signature: sig,
        vars,
        premises,
        conclusions,
    })
}

pub fn parse_sentence(text: &str, sig: Signature) -> Result<UniversalSentence> {
    let mut vars = Vec::new();
    let mut p = parser(text, sig, &mut vars)?;
    let has_arrow = p.toks.iter().any(|(_, t)| *t == Tok::Implies);
    let premises = if has_arrow {
        let eqs = p.equations(Some(&Tok::Implies))?;
        if !p.eat(&Tok::Implies) {
            return p.err("expected '=>'");
        }
        eqs
    } else {
        Vec::new()
    };
    let conclusions = p.equations(None)?;
    p.finish()?;
    UniversalSentence::new(sig, vars, premises, conclusions)
}

/// A formula, rule or sentence, told apart by `/` and `=`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Formula { formula: Formula, vars: Vec<String> },
    Rule(Rule),
    Sentence(UniversalSentence),
}

pub fn parse(text: &str, sig: Signature) -> Result<Parsed> {
    let toks = lex(text)?;
    if toks.iter().any(|(_, t)| *t == Tok::Slash) {
        parse_rule(text, sig).map(Parsed::Rule)
    } else if toks.iter().any(|(_, t)| matches!(t, Tok::Eq | Tok::Implies)) {
        parse_sentence(text, sig).map(Parsed::Sentence)
    } else {
        parse_formula(text, sig).map(|(formula, vars)| Parsed::Formula { formula, vars })
    }
}
