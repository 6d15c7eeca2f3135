//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := impl
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | atom
//! atom    := ident | "true" | "false" | "(" formula ")" | dilemma
//! dilemma := "[" agents ":" formula ("," formula)* "@" sac "]"
//!          | "[[" agents ":" formula ("," formula)* "@" sac "]]"
//! agents  := ident ("," ident)*
//! sac     := entry ("," entry)*
//! entry   := (ident | "*") ":" rational
//! ```

use std::collections::BTreeMap;

use super::{Coalition, Dilemma, Formula, FormulaError, FormulaSet, SacrificeMap};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Digits(String),
    Arrow,
    Minus,
    Slash,
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LWeak,
    RWeak,
    Comma,
    Colon,
    At,
    Star,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Digits(s) => format!("number `{s}`"),
            Tok::Arrow => "`->`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LWeak => "`[[`".into(),
            Tok::RWeak => "`]]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::At => "`@`".into(),
            Tok::Star => "`*`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, column);
        let next = chars.get(i + 1).copied();
        let mut width = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                column += 1;
                i += 1;
                continue;
            }
            '-' if next == Some('>') => {
                width = 2;
                Tok::Arrow
            }
            '[' if next == Some('[') => {
                width = 2;
                Tok::LWeak
            }
            ']' if next == Some(']') => {
                width = 2;
                Tok::RWeak
            }
            '-' => Tok::Minus,
            '/' => Tok::Slash,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '@' => Tok::At,
            '*' => Tok::Star,
            c if c.is_ascii_digit() => {
                let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                width = s.len();
                Tok::Digits(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let s: String = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .collect();
                width = s.len();
                Tok::Ident(s)
            }
            other => {
                return Err(syntax(line, column, format!("unexpected character `{other}`")));
            }
        };
        out.push(Spanned {
            tok,
            line: start.0,
            column: start.1,
        });
        i += width;
        column += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, FormulaError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> FormulaError {
        let t = &self.toks[self.pos];
        syntax(t.line, t.column, message)
    }

    fn unexpected(&self, wanted: &str) -> FormulaError {
        self.error_here(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn finish(&mut self) -> Result<(), FormulaError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.and()?;
        while self.eat(&Tok::Pipe) {
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Amp) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(match name.as_str() {
                    "true" => Formula::Top,
                    "false" => Formula::Bottom,
                    _ => Formula::Prop(name),
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBrack => {
                self.bump();
                let d = self.dilemma_body()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::StrictDilemma(d))
            }
            Tok::LWeak => {
                self.bump();
                let d = self.dilemma_body()?;
                self.expect(Tok::RWeak)?;
                Ok(Formula::WeakDilemma(d))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn dilemma_body(&mut self) -> Result<Dilemma, FormulaError> {
        let coalition = self.agents()?;
        self.expect(Tok::Colon)?;
        if *self.peek() == Tok::At {
            return Err(FormulaError::EmptyMembers);
        }
        let members = self.formula_list()?;
        self.expect(Tok::At)?;
        let sacrifice = self.sacrifice()?;
        Dilemma::new(coalition, FormulaSet::new(members), sacrifice)
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(name) if name != "true" && name != "false" => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn agents(&mut self) -> Result<Coalition, FormulaError> {
        if *self.peek() == Tok::Colon {
            return Err(FormulaError::EmptyCoalition);
        }
        let mut agents = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            agents.push(self.ident()?);
        }
        Coalition::new(agents)
    }

    fn formula_list(&mut self) -> Result<Vec<Formula>, FormulaError> {
        let mut out = vec![self.formula()?];
        while self.eat(&Tok::Comma) {
            out.push(self.formula()?);
        }
        Ok(out)
    }

    fn sacrifice(&mut self) -> Result<SacrificeMap, FormulaError> {
        let mut bounds = BTreeMap::new();
        let mut wildcard = None;
        loop {
            let agent = if self.eat(&Tok::Star) {
                None
            } else {
                Some(self.ident()?)
            };
            self.expect(Tok::Colon)?;
            let value = self.rational()?;
            match agent {
                None if wildcard.is_some() => {
                    return Err(FormulaError::DuplicateSacrifice("*".into()));
                }
                None => wildcard = Some(value),
                Some(a) => {
                    if bounds.contains_key(&a) {
                        return Err(FormulaError::DuplicateSacrifice(a));
                    }
                    bounds.insert(a, value);
                }
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(SacrificeMap::new(bounds, wildcard))
    }

    fn rational(&mut self) -> Result<Rational, FormulaError> {
        let start = self.toks[self.pos].clone();
        let mut text = String::new();
        if self.eat(&Tok::Minus) {
            text.push('-');
        }
        let Tok::Digits(n) = self.peek().clone() else {
            return Err(syntax(
                start.line,
                start.column,
                format!("sacrifice value must be a rational, found {}", self.peek().describe()),
            ));
        };
        self.bump();
        text.push_str(&n);
        if self.eat(&Tok::Slash) {
            let Tok::Digits(d) = self.peek().clone() else {
                return Err(self.unexpected("denominator digits"));
            };
            self.bump();
            text.push('/');
            text.push_str(&d);
        }
        parse_rational(&text).map_err(|e| syntax(start.line, start.column, e.to_string()))
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Comma-separated formulas; commas nested inside dilemmas do not split.
pub fn parse_formula_list(text: &str) -> Result<Vec<Formula>, FormulaError> {
    let mut p = Parser::new(text)?;
    if *p.peek() == Tok::Eof {
        return Err(FormulaError::EmptyMembers);
    }
    let fs = p.formula_list()?;
    p.finish()?;
    Ok(fs)
}

/// `a:2, b:1/2, *:0`
pub fn parse_sacrifice(text: &str) -> Result<SacrificeMap, FormulaError> {
    let mut p = Parser::new(text)?;
    let s = p.sacrifice()?;
    p.finish()?;
    Ok(s)
}

/// `a, b`
pub fn parse_coalition(text: &str) -> Result<Coalition, FormulaError> {
    let mut p = Parser::new(text)?;
    if *p.peek() == Tok::Eof {
        return Err(FormulaError::EmptyCoalition);
    }
    let c = p.agents()?;
    p.finish()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::format_formula;
    use crate::rational::int;

    fn prop(s: &str) -> Formula {
        Formula::prop(s)
    }

    #[test]
    fn implication_with_negation() {
        assert_eq!(
            parse_formula("p -> !q").unwrap(),
            Formula::implies(prop("p"), Formula::not(prop("q")))
        );
    }

    #[test]
    fn village_dilemma() {
        let f = parse_formula("[m_a : d1, d2, d3 @ m_a:2, m_b:2]").unwrap();
        let Formula::StrictDilemma(d) = f else {
            panic!("not a strict dilemma")
        };
        assert_eq!(d.coalition, Coalition::new(["m_a"]).unwrap());
        assert_eq!(
            d.members,
            FormulaSet::new([prop("d1"), prop("d2"), prop("d3")])
        );
        assert_eq!(d.sacrifice.get("m_a"), Some(&int(2)));
        assert_eq!(d.sacrifice.get("m_b"), Some(&int(2)));
        assert_eq!(d.sacrifice.wildcard(), None);
    }

    #[test]
    fn weak_dilemma_with_wildcard() {
        let f = parse_formula("[[m_b : d2, d3 | d4 @ *:2]]").unwrap();
        let Formula::WeakDilemma(d) = f else {
            panic!("not a weak dilemma")
        };
        assert_eq!(d.coalition, Coalition::new(["m_b"]).unwrap());
        assert_eq!(
            d.members,
            FormulaSet::new([prop("d2"), Formula::or(prop("d3"), prop("d4"))])
        );
        assert_eq!(d.sacrifice.wildcard(), Some(&int(2)));
        assert!(d.sacrifice.bounds().is_empty());
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("!p & q | r -> s -> t").unwrap();
        assert_eq!(format_formula(&f), "(((!p & q) | r) -> (s -> t))");
    }

    #[test]
    fn constants() {
        assert_eq!(parse_formula("true").unwrap(), Formula::Top);
        assert_eq!(parse_formula("!false").unwrap(), Formula::not(Formula::Bottom));
    }

    #[test]
    fn nested_dilemma_members() {
        let f = parse_formula("[a : [b : p, q @ *:1], r @ a:-1/2, *:0]").unwrap();
        let Formula::StrictDilemma(d) = &f else {
            panic!()
        };
        assert_eq!(d.members.len(), 2);
        assert_eq!(format_formula(&f), "[a : [b : p, q @ *:1], r @ a:-1/2, *:0]");
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_formula("p ->\n  & q").unwrap_err();
        assert!(
            matches!(err, FormulaError::Syntax { line: 2, column: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn empty_coalition_and_members() {
        assert_eq!(
            parse_formula("[ : p @ *:1]"),
            Err(FormulaError::EmptyCoalition)
        );
        assert_eq!(
            parse_formula("[a : @ *:1]"),
            Err(FormulaError::EmptyMembers)
        );
    }

    #[test]
    fn non_rational_sacrifice() {
        let err = parse_formula("[a : p @ a:two]").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { .. }), "{err:?}");
        let err = parse_formula("[a : p @ a:1.5]").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { .. }), "{err:?}");
        let err = parse_formula("[a : p @ a:1/0]").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { .. }), "{err:?}");
    }

    #[test]
    fn duplicate_sacrifice_entries() {
        assert_eq!(
            parse_formula("[a : p @ a:1, a:2]"),
            Err(FormulaError::DuplicateSacrifice("a".into()))
        );
    }

    #[test]
    fn formula_lists() {
        let fs = parse_formula_list("d1, [a : p, q @ *:1], d3").unwrap();
        assert_eq!(fs.len(), 3);
        assert!(parse_formula_list("").is_err());
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        assert!(parse_formula("p q").is_err());
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("p $").is_err());
    }
}
