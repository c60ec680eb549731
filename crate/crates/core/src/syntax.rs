//! Formulas, sequents and their concrete ASCII syntax.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! formula := disj ( "->" formula )?        right-associative
//! disj    := conj ( "|" conj )*            left-associative
//! conj    := unary ( "&" unary )*          left-associative
//! unary   := "~" unary | primary
//! primary := atom | "bot" | "(" formula ")"
//! ```
//!
//! `~a` is sugar for `a -> bot`; there is no negation constructor. `&&` and
//! `||` are accepted as spellings of `&` and `|`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unknown token {found:?} at offset {offset}")]
    UnknownToken { offset: usize, found: char },
    #[error("unexpected {found} at offset {offset}, expected {expected}")]
    Unexpected {
        offset: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unexpected end of input at offset {offset}, expected {expected}")]
    UnexpectedEnd {
        offset: usize,
        expected: &'static str,
    },
    #[error("invalid atom name {0:?}")]
    InvalidAtom(String),
    #[error("empty input")]
    Empty,
}

impl SyntaxError {
    /// Byte offset of the error, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            SyntaxError::UnknownToken { offset, .. }
            | SyntaxError::Unexpected { offset, .. }
            | SyntaxError::UnexpectedEnd { offset, .. } => Some(*offset),
            SyntaxError::InvalidAtom(_) => None,
            SyntaxError::Empty => Some(0),
        }
    }

    fn shifted(self, by: usize) -> Self {
        match self {
            SyntaxError::UnknownToken { offset, found } => SyntaxError::UnknownToken {
                offset: offset + by,
                found,
            },
            SyntaxError::Unexpected {
                offset,
                found,
                expected,
            } => SyntaxError::Unexpected {
                offset: offset + by,
                found,
                expected,
            },
            SyntaxError::UnexpectedEnd { offset, expected } => SyntaxError::UnexpectedEnd {
                offset: offset + by,
                expected,
            },
            SyntaxError::Empty => SyntaxError::UnexpectedEnd {
                offset: by,
                expected: "a formula",
            },
            other => other,
        }
    }
}

/// An atomic proposition. Names match `[a-z][a-zA-Z0-9_]*`; `bot` is reserved.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Self, SyntaxError> {
        if is_atom_name(name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(SyntaxError::InvalidAtom(name.to_string()))
        }
    }

    /// Like [`Atom::new`] but panics on an invalid name. Meant for literals.
    pub fn named(name: &str) -> Self {
        Self::new(name).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl serde::Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> serde::Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Atom::new(&name).map_err(serde::de::Error::custom)
    }
}

pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    name != "bot" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Bot,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Atom::named(name))
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Formula::And(Arc::new(left), Arc::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Self {
        Formula::Or(Arc::new(left), Arc::new(right))
    }

    pub fn imp(left: Formula, right: Formula) -> Self {
        Formula::Imp(Arc::new(left), Arc::new(right))
    }

    /// `~f`, stored as `f -> bot`.
    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::imp(inner, Formula::Bot)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Neither an atom nor `bot`.
    pub fn is_compound(&self) -> bool {
        matches!(
            self,
            Formula::And(..) | Formula::Or(..) | Formula::Imp(..)
        )
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Connective nesting depth; atoms and `bot` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    /// Number of nodes in the formula tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot => 1,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    pub fn contains_bot(&self) -> bool {
        match self {
            Formula::Bot => true,
            Formula::Atom(_) => false,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.contains_bot() || r.contains_bot()
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Bot => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Replaces every occurrence of `bot` by `with`.
    pub fn replace_bot(&self, with: &Formula) -> Formula {
        match self {
            Formula::Bot => with.clone(),
            Formula::Atom(_) => self.clone(),
            Formula::And(l, r) => Formula::and(l.replace_bot(with), r.replace_bot(with)),
            Formula::Or(l, r) => Formula::or(l.replace_bot(with), r.replace_bot(with)),
            Formula::Imp(l, r) => Formula::imp(l.replace_bot(with), r.replace_bot(with)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, 0, f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl std::str::FromStr for Formula {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

// Binding strength of the outermost construct.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) | Formula::Bot => PREC_ATOM,
        Formula::And(..) => PREC_AND,
        Formula::Or(..) => PREC_OR,
        Formula::Imp(_, r) if **r == Formula::Bot => PREC_NOT,
        Formula::Imp(..) => PREC_IMP,
    }
}

fn write_formula(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = precedence(f);
    if prec < min {
        out.write_str("(")?;
    }
    match f {
        Formula::Atom(a) => out.write_str(a.name())?,
        Formula::Bot => out.write_str("bot")?,
        Formula::And(l, r) => {
            write_formula(l, PREC_AND, out)?;
            out.write_str(" & ")?;
            write_formula(r, PREC_AND + 1, out)?;
        }
        Formula::Or(l, r) => {
            write_formula(l, PREC_OR, out)?;
            out.write_str(" | ")?;
            write_formula(r, PREC_OR + 1, out)?;
        }
        Formula::Imp(l, r) if **r == Formula::Bot => {
            out.write_str("~")?;
            write_formula(l, PREC_NOT, out)?;
        }
        Formula::Imp(l, r) => {
            write_formula(l, PREC_OR, out)?;
            out.write_str(" -> ")?;
            write_formula(r, PREC_IMP, out)?;
        }
    }
    if prec < min {
        out.write_str(")")?;
    }
    Ok(())
}

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bot,
    And,
    Or,
    Arrow,
    Tilde,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("atom {name:?}"),
            Token::Bot => "`bot`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Arrow => "`->`".into(),
            Token::Tilde => "`~`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, SyntaxError> {
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
            b'&' => {
                i += if bytes.get(i + 1) == Some(&b'&') { 2 } else { 1 };
                Token::And
            }
            b'|' => {
                i += if bytes.get(i + 1) == Some(&b'|') { 2 } else { 1 };
                Token::Or
            }
            b'~' => {
                i += 1;
                Token::Tilde
            }
            b'(' => {
                i += 1;
                Token::LParen
            }
            b')' => {
                i += 1;
                Token::RParen
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Token::Arrow
            }
            c if c.is_ascii_lowercase() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                if word == "bot" {
                    Token::Bot
                } else {
                    Token::Ident(word.to_string())
                }
            }
            _ => {
                let found = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::UnknownToken { offset: i, found });
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn unexpected(&self, expected: &'static str) -> SyntaxError {
        match self.tokens.get(self.pos) {
            Some((offset, tok)) => SyntaxError::Unexpected {
                offset: *offset,
                found: tok.describe(),
                expected,
            },
            None => SyntaxError::UnexpectedEnd {
                offset: self.end,
                expected,
            },
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.disjunction()?;
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let right = self.formula()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let right = self.conjunction()?;
            acc = Formula::or(acc, right);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let right = self.unary()?;
            acc = Formula::and(acc, right);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.peek() == Some(&Token::Tilde) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Formula::not(inner));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Atom(Atom::new(&name)?))
            }
            Some(Token::Bot) => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.formula()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.unexpected("an atom, `bot`, `~` or `(`")),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(SyntaxError::Empty);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let f = parser.formula()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.unexpected("an operator or end of input"));
    }
    debug_assert_eq!(parser.offset(), text.len());
    Ok(f)
}

/// `Γ : φ` with `Γ` a set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub context: BTreeSet<Formula>,
    pub extract: Formula,
}

impl Sequent {
    pub fn new(context: impl IntoIterator<Item = Formula>, extract: Formula) -> Self {
        Sequent {
            context: context.into_iter().collect(),
            extract,
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = self.extract.atoms();
        for f in &self.context {
            f.collect_atoms(&mut out);
        }
        out
    }

    pub fn contains_bot(&self) -> bool {
        self.extract.contains_bot() || self.context.iter().any(Formula::contains_bot)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.context {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        if first {
            write!(f, ": {}", self.extract)
        } else {
            write!(f, " : {}", self.extract)
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl std::str::FromStr for Sequent {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequent(s)
    }
}

/// Parses `f1, f2 : g`. The left side may be empty.
pub fn parse_sequent(text: &str) -> Result<Sequent, SyntaxError> {
    let colon = match text.find(':') {
        Some(i) => i,
        None => {
            return Err(SyntaxError::UnexpectedEnd {
                offset: text.len(),
                expected: "`:` separating context and extract",
            })
        }
    };
    let (left, right) = (&text[..colon], &text[colon + 1..]);
    if let Some(extra) = right.find(':') {
        return Err(SyntaxError::Unexpected {
            offset: colon + 1 + extra,
            found: "`:`".into(),
            expected: "a single `:`",
        });
    }
    let mut context = BTreeSet::new();
    if !left.trim().is_empty() {
        let mut start = 0;
        for piece in left.split(',') {
            context.insert(parse_formula(piece).map_err(|e| e.shifted(start))?);
            start += piece.len() + 1;
        }
    }
    let extract = parse_formula(right).map_err(|e| e.shifted(colon + 1))?;
    Ok(Sequent { context, extract })
}

/// Right-nested conjunction of `gamma` in the order of the printed formulas.
/// The empty conjunction is `bot -> bot`.
pub fn conjoin<'a>(gamma: impl IntoIterator<Item = &'a Formula>) -> Formula {
    let mut items: Vec<(String, &Formula)> =
        gamma.into_iter().map(|f| (f.to_string(), f)).collect();
    items.sort();
    items.dedup_by(|a, b| a.1 == b.1);
    let mut iter = items.into_iter().rev();
    match iter.next() {
        None => Formula::imp(Formula::Bot, Formula::Bot),
        Some((_, last)) => iter.fold(last.clone(), |acc, (_, f)| Formula::and(f.clone(), acc)),
    }
}

/// Every formula over `atoms` (plus `bot` when asked) of depth at most `depth`,
/// ordered by depth and then structurally.
pub fn formulas_up_to_depth(atoms: &[Atom], with_bot: bool, depth: usize) -> Vec<Formula> {
    let mut layers: Vec<Vec<Formula>> = Vec::new();
    let mut base: Vec<Formula> = atoms.iter().cloned().map(Formula::Atom).collect();
    if with_bot {
        base.push(Formula::Bot);
    }
    layers.push(base);
    for d in 1..=depth {
        let below: Vec<Formula> = layers.iter().flatten().cloned().collect();
        let shallower: Vec<Formula> = layers[..d - 1].iter().flatten().cloned().collect();
        let mut layer = Vec::new();
        for l in &below {
            for r in &below {
                // at least one side must sit exactly one level down
                if shallower.contains(l) && shallower.contains(r) {
                    continue;
                }
                layer.push(Formula::and(l.clone(), r.clone()));
                layer.push(Formula::or(l.clone(), r.clone()));
                layer.push(Formula::imp(l.clone(), r.clone()));
            }
        }
        layers.push(layer);
    }
    layers.into_iter().flatten().collect()
}
