//! Text format for bases: one rule per line.
//!
//! ```text
//! # level 1
//! => p
//! p, q => c
//! # level 2: hypotheses before `>`
//! (p, q > r), (> s) => c
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{AtomicRule, Base, Level, Premise};
use crate::syntax::Atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct BaseFormatError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Comma,
    Open,
    Close,
    Gt,
    Arrow,
}

fn tokenize(line: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            ',' => out.push(Tok::Comma),
            '(' => out.push(Tok::Open),
            ')' => out.push(Tok::Close),
            '>' => out.push(Tok::Gt),
            '=' => match chars.next() {
                Some((_, '>')) => out.push(Tok::Arrow),
                _ => return Err(format!("expected `=>` at column {}", i + 1)),
            },
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut name = c.to_string();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(name));
            }
            other => return Err(format!("unexpected `{other}` at column {}", i + 1)),
        }
    }
    Ok(out)
}

fn atom(name: &str) -> Result<Atom, String> {
    if name == "bot" {
        return Err("`bot` cannot occur in an atomic rule".into());
    }
    Atom::new(name).map_err(|_| format!("invalid atom name `{name}`"))
}

struct RuleParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl RuleParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn ident(&mut self, what: &str) -> Result<Atom, String> {
        match self.bump() {
            Some(Tok::Ident(n)) => atom(&n),
            _ => Err(format!("expected {what}")),
        }
    }

    fn premise(&mut self) -> Result<Premise, String> {
        if self.peek() != Some(&Tok::Open) {
            return Ok(Premise::flat(self.ident("premise atom")?));
        }
        self.bump();
        let mut hyps = BTreeSet::new();
        if self.peek() != Some(&Tok::Gt) {
            loop {
                hyps.insert(self.ident("hypothesis atom")?);
                match self.peek() {
                    Some(Tok::Comma) => {
                        self.bump();
                    }
                    _ => break,
                }
            }
        }
        if self.bump() != Some(Tok::Gt) {
            return Err("expected `>` inside premise".into());
        }
        let p = self.ident("premise atom after `>`")?;
        if self.bump() != Some(Tok::Close) {
            return Err("expected `)`".into());
        }
        Ok(Premise::with_hypotheses(p, hyps))
    }

    fn rule(&mut self) -> Result<AtomicRule, String> {
        let mut premises = Vec::new();
        if self.peek() != Some(&Tok::Arrow) {
            loop {
                premises.push(self.premise()?);
                match self.peek() {
                    Some(Tok::Comma) => {
                        self.bump();
                    }
                    _ => break,
                }
            }
        }
        if self.bump() != Some(Tok::Arrow) {
            return Err("expected `=>`".into());
        }
        let c = self.ident("conclusion atom")?;
        if self.pos != self.toks.len() {
            return Err("trailing input after conclusion".into());
        }
        Ok(AtomicRule::new(premises, c))
    }
}

fn parse_rule_line(line: &str) -> Result<AtomicRule, String> {
    let toks = tokenize(line)?;
    RuleParser { toks, pos: 0 }.rule()
}

pub fn parse_rule(text: &str) -> Result<AtomicRule, BaseFormatError> {
    parse_rule_line(text).map_err(|message| BaseFormatError { line: 1, message })
}

/// Parses a base file. With `level = None` the level is 2 iff some rule
/// discharges hypotheses.
pub fn parse_base(text: &str, level: Option<Level>) -> Result<Base, BaseFormatError> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rule = parse_rule_line(line).map_err(|message| BaseFormatError {
            line: i + 1,
            message,
        })?;
        if level == Some(Level::One) && rule.level() == Level::Two {
            return Err(BaseFormatError {
                line: i + 1,
                message: "level-2 rule in a level-1 base".into(),
            });
        }
        rules.push(rule);
    }
    let level = level.unwrap_or_else(|| {
        rules
            .iter()
            .map(AtomicRule::level)
            .max()
            .unwrap_or(Level::One)
    });
    Ok(Base::new(level, rules).expect("levels checked above"))
}

/// Canonical rendering: one rule per line in sorted order.
pub fn print_base(base: &Base) -> String {
    base.rules().map(|r| format!("{r}\n")).collect()
}

impl fmt::Display for AtomicRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level2 = self.level() == Level::Two;
        let parts: Vec<String> = self
            .premises()
            .iter()
            .map(|p| {
                if level2 {
                    let hyps: Vec<&str> = p.hypotheses.iter().map(Atom::name).collect();
                    if hyps.is_empty() {
                        format!("(> {})", p.atom)
                    } else {
                        format!("({} > {})", hyps.join(", "), p.atom)
                    }
                } else {
                    p.atom.to_string()
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "=> {}", self.conclusion())
        } else {
            write!(f, "{} => {}", parts.join(", "), self.conclusion())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_round_trip() {
        let text = "=> p\np, q => c\n";
        let b = parse_base(text, None).unwrap();
        assert_eq!(b.level(), Level::One);
        assert_eq!(print_base(&b), text);
    }

    #[test]
    fn level_two_round_trip() {
        let text = "(p1, p2 > q), (> r) => c\n";
        let b = parse_base(text, None).unwrap();
        assert_eq!(b.level(), Level::Two);
        assert_eq!(print_base(&b), text);
        // bare atoms are accepted for flat premises
        let b2 = parse_base("r, (p2, p1 > q) => c", None).unwrap();
        assert_eq!(b, b2);
    }

    #[test]
    fn comments_and_canonical_order() {
        let b = parse_base("# axioms\nq => p  # chained\n\n=> q\n", None).unwrap();
        assert_eq!(print_base(&b), "=> q\nq => p\n");
        let again = parse_base(&print_base(&b), None).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn errors_are_located() {
        let e = parse_base("=> p\np => bot\n", None).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_base("p, => q", None).unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_base("(p > q) => c", Some(Level::One)).is_err());
        assert!(parse_base("p q => c", None).is_err());
        assert!(parse_base("p = c", None).is_err());
        assert!(parse_base("=> P", None).is_err());
    }

    #[test]
    fn empty_file_is_empty_base() {
        let b = parse_base("# nothing\n", None).unwrap();
        assert!(b.is_empty());
        assert_eq!(print_base(&b), "");
    }
}
