//! Recursive-descent parser for the concrete formula syntax:
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*            left-associative
//! imp     := or ("->" imp)?              right-associative
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "K" "[" IDENT "]" unary | primary
//! primary := "top" | "bot" | "has" "(" IDENT "," NAT ")" | "(" formula ")"
//! ```

use std::fmt;

use thiserror::Error;

use super::Formula;
use crate::kripke::{AgentId, Proposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: found {found}, expected {}", .expected.join(" or "))]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Nat(s) => write!(f, "{s:?}"),
            Tok::LParen => f.write_str("\"(\""),
            Tok::RParen => f.write_str("\")\""),
            Tok::LBracket => f.write_str("\"[\""),
            Tok::RBracket => f.write_str("\"]\""),
            Tok::Comma => f.write_str("\",\""),
            Tok::Tilde => f.write_str("\"~\""),
            Tok::Amp => f.write_str("\"&\""),
            Tok::Bar => f.write_str("\"|\""),
            Tok::Arrow => f.write_str("\"->\""),
            Tok::DArrow => f.write_str("\"<->\""),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
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
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if text[i..].starts_with("<->") => {
                i += 2;
                Tok::DArrow
            }
            c if c.is_ascii_digit() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                Tok::Nat(text[start..=i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or_default();
                return Err(ParseError { position: i, found: format!("{ch:?}"), expected: vec!["a token"] });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

const UNARY_START: &[&str] = &["\"~\"", "\"K\"", "\"top\"", "\"bot\"", "\"has\"", "\"(\""];

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let (position, tok) = &self.toks[self.pos];
        ParseError { position: *position, found: tok.to_string(), expected: expected.to_vec() }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn agent(&mut self) -> Result<AgentId, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(AgentId::new(name).expect("lexer only yields identifiers"))
            }
            _ => Err(self.error(&["agent name"])),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(w) if w == "K" => {
                self.bump();
                self.expect(Tok::LBracket, "\"[\"")?;
                let x = self.agent()?;
                self.expect(Tok::RBracket, "\"]\"")?;
                Ok(Formula::knows(&x, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(w) if w == "top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(w) if w == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(w) if w == "has" => {
                self.bump();
                self.expect(Tok::LParen, "\"(\"")?;
                let x = self.agent()?;
                self.expect(Tok::Comma, "\",\"")?;
                let card = match self.peek().clone() {
                    Tok::Nat(n) => n.parse::<u32>().map_err(|_| self.error(&["card number below 2^32"]))?,
                    _ => return Err(self.error(&["card number"])),
                };
                self.bump();
                self.expect(Tok::RParen, "\")\"")?;
                Ok(Formula::Atom(Proposition::new(x, card)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "\")\"")?;
                Ok(f)
            }
            _ => Err(self.error(UNARY_START)),
        }
    }
}

/// Parses a formula. `~` and `K[x]` bind tightest, then `&`, `|`, `->`, `<->`.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["\"&\"", "\"|\"", "\"->\"", "\"<->\"", "end of input"]));
    }
    Ok(f)
}
