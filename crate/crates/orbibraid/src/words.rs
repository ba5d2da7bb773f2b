//! Free group words over typed generators.
//!
//! A [`Word`] is always freely reduced. Words do not carry a reference to a
//! presentation; alphabet checks happen where a word meets a presentation.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which torsion generator a conjugate `h` generator was conjugated by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Conj {
    /// The first cone generator (`u`, or `ubar` in the punctured presentations).
    U,
    /// `u'`.
    UPrime,
}

/// Generator identity. The derived ordering (family first, then indices) is
/// the letter order used by shortlex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GeneratorId {
    /// Half twist `h_j` between strands `j` and `j+1`.
    H(u16),
    /// Loop around cone point `nu`; `U(1)` is written `u`.
    U(u16),
    /// `u'`, the second cone loop seen from the last strand.
    UPrime,
    /// `ubar`, the first cone loop seen from the last strand.
    UBar,
    /// Loop around puncture `lambda`; `T(1)` is written `t`.
    T(u16),
    /// Pure generator `a(j,i)`, `i < j`.
    A(u16, u16),
    /// Pure generator `b(k,lambda)`.
    B(u16, u16),
    /// Pure generator `c(k,nu)`.
    C(u16, u16),
    /// Conjugated half twist: `hu1` is `u h1 u^-1`, `hu'2` is `u' h2 u'^-1`.
    HConj(Conj, u16),
    /// Free-form name, used for graph vertices and user presentations.
    Named(String),
}

impl GeneratorId {
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// True for the torsion generators that span the finite quotient of the
    /// semidirect presentations.
    pub fn is_torsion_quotient(&self) -> bool {
        matches!(self, GeneratorId::U(_) | GeneratorId::UPrime | GeneratorId::UBar)
    }

    pub fn is_h_like(&self) -> bool {
        matches!(self, GeneratorId::H(_) | GeneratorId::HConj(..) | GeneratorId::Named(_))
    }

    pub fn parse(s: &str) -> Result<GeneratorId, WordError> {
        let mut p = Parser::new(s);
        let g = p.ident()?;
        p.skip_ws();
        if !p.done() {
            return Err(p.err("trailing input after generator"));
        }
        Ok(g)
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorId::H(j) => write!(f, "h{j}"),
            GeneratorId::U(1) => write!(f, "u"),
            GeneratorId::U(v) => write!(f, "u{v}"),
            GeneratorId::UPrime => write!(f, "u'"),
            GeneratorId::UBar => write!(f, "ubar"),
            GeneratorId::T(1) => write!(f, "t"),
            GeneratorId::T(l) => write!(f, "t{l}"),
            GeneratorId::A(j, i) => write!(f, "a({j},{i})"),
            GeneratorId::B(k, l) => write!(f, "b({k},{l})"),
            GeneratorId::C(k, v) => write!(f, "c({k},{v})"),
            GeneratorId::HConj(Conj::U, j) => write!(f, "hu{j}"),
            GeneratorId::HConj(Conj::UPrime, j) => write!(f, "hu'{j}"),
            GeneratorId::Named(s) => write!(f, "{s}"),
        }
    }
}

/// A generator or its inverse. `inv == false` sorts before `inv == true`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: GeneratorId,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: GeneratorId, inv: bool) -> Letter {
        Letter { gen, inv }
    }

    pub fn inverse(&self) -> Letter {
        Letter { gen: self.gen.clone(), inv: !self.inv }
    }

    pub fn sign(&self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("generator {0} is not in the alphabet")]
    NotInAlphabet(String),
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn gen(g: GeneratorId) -> Word {
        Word(vec![Letter::new(g, false)])
    }

    pub fn gen_inv(g: GeneratorId) -> Word {
        Word(vec![Letter::new(g, true)])
    }

    /// Builds a word from arbitrary letters, freely reducing them.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|top| top.cancels(&l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn parse(s: &str) -> Result<Word, WordError> {
        let mut p = Parser::new(s);
        let w = p.word()?;
        p.skip_ws();
        if !p.done() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverse).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `self * x * self^-1`.
    pub fn conjugate(&self, x: &Word) -> Word {
        self.concat(x).concat(&self.inverse())
    }

    pub fn generators(&self) -> impl Iterator<Item = &GeneratorId> {
        self.0.iter().map(|l| &l.gen)
    }

    /// Signed number of occurrences of `g`.
    pub fn exponent_sum(&self, g: &GeneratorId) -> i64 {
        self.0.iter().filter(|l| &l.gen == g).map(Letter::sign).sum()
    }

    /// Replaces every generator by a word.
    pub fn substitute<F>(&self, mut image: F) -> Word
    where
        F: FnMut(&GeneratorId) -> Word,
    {
        let mut out = Vec::new();
        for l in &self.0 {
            let w = image(&l.gen);
            if l.inv {
                out.extend(w.inverse().0);
            } else {
                out.extend(w.0);
            }
        }
        Word::from_letters(out)
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl std::ops::Mul for Word {
    type Output = Word;
    fn mul(self, rhs: Word) -> Word {
        self.concat(&rhs)
    }
}

impl From<GeneratorId> for Word {
    fn from(g: GeneratorId) -> Word {
        Word::gen(g)
    }
}

impl std::str::FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Word, WordError> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    /// Runs of a repeated letter are printed as powers: `h1^2*u^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.0.len() {
            let l = &self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == *l {
                run += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let e = if l.inv { -(run as i64) } else { run as i64 };
            if e == 1 {
                write!(f, "{}", l.gen)?;
            } else {
                write!(f, "{}^{}", l.gen, e)?;
            }
            i += run;
        }
        Ok(())
    }
}

/// `<a,b>_k`: the alternating product `a b a b ...` with `k` factors.
pub fn alternating_word(a: &Word, b: &Word, k: usize) -> Word {
    let mut out = Word::identity();
    for i in 0..k {
        out = out.concat(if i % 2 == 0 { a } else { b });
    }
    out
}

/// Product of the given words, left to right.
pub fn product<'a, I: IntoIterator<Item = &'a Word>>(ws: I) -> Word {
    let mut out = Vec::new();
    for w in ws {
        out.extend(w.0.iter().cloned());
    }
    Word::from_letters(out)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: &str) -> WordError {
        WordError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn done(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> Result<Word, WordError> {
        let mut out = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                let f = self.factor()?;
                out = out.concat(&f);
            } else {
                return Ok(out);
            }
        }
    }

    fn factor(&mut self) -> Result<Word, WordError> {
        self.skip_ws();
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                w
            }
            Some(b'1') => {
                self.pos += 1;
                Word::identity()
            }
            Some(c) if c.is_ascii_alphabetic() => Word::gen(self.ident()?),
            _ => return Err(self.err("expected a generator, '1' or '('")),
        };
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.int()?;
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn int(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        txt.parse().map_err(|_| WordError::Parse { pos: start, msg: "expected an integer".into() })
    }

    fn index_pair(&mut self) -> Result<(u16, u16), WordError> {
        // already consumed '('
        let a = self.int()?;
        self.skip_ws();
        if self.peek() != Some(b',') {
            return Err(self.err("expected ','"));
        }
        self.pos += 1;
        self.skip_ws();
        let b = self.int()?;
        self.skip_ws();
        if self.peek() != Some(b')') {
            return Err(self.err("expected ')'"));
        }
        self.pos += 1;
        let conv =
            |x: i64| u16::try_from(x).map_err(|_| WordError::Parse { pos: self.pos, msg: "index out of range".into() });
        Ok((conv(a)?, conv(b)?))
    }

    fn ident(&mut self) -> Result<GeneratorId, WordError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a generator name"));
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        if matches!(name, "a" | "b" | "c") && self.peek() == Some(b'(') {
            self.pos += 1;
            let (x, y) = self.index_pair()?;
            return Ok(match name {
                "a" => GeneratorId::A(x, y),
                "b" => GeneratorId::B(x, y),
                _ => GeneratorId::C(x, y),
            });
        }
        classify(name).ok_or_else(|| WordError::Parse { pos: start, msg: format!("bad generator name '{name}'") })
    }
}

fn idx(s: &str) -> Option<u16> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) || s.starts_with('0') {
        return None;
    }
    s.parse().ok()
}

fn classify(name: &str) -> Option<GeneratorId> {
    use GeneratorId::*;
    match name {
        "u" => return Some(U(1)),
        "u'" => return Some(UPrime),
        "ubar" => return Some(UBar),
        "t" => return Some(T(1)),
        _ => {}
    }
    if let Some(r) = name.strip_prefix("hu'") {
        return idx(r).map(|j| HConj(Conj::UPrime, j));
    }
    if let Some(r) = name.strip_prefix("hu") {
        if let Some(j) = idx(r) {
            return Some(HConj(Conj::U, j));
        }
    }
    for (p, f) in [("h", H as fn(u16) -> GeneratorId), ("u", U), ("t", T)] {
        if let Some(r) = name.strip_prefix(p) {
            if let Some(j) = idx(r) {
                return Some(f(j));
            }
        }
    }
    let ok = name.bytes().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'_');
    ok.then(|| Named(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(w("h1*u*h1*u^-1").to_string(), "h1*u*h1*u^-1");
        assert_eq!(w("1").len(), 0);
        assert_eq!(w("(h1*u)^2").to_string(), "h1*u*h1*u");
        assert_eq!(w("a(3,1)*c(2,1)^-1").to_string(), "a(3,1)*c(2,1)^-1");
        assert_eq!(w("hu1*hu'2*u'*ubar*t*t2*u2").len(), 7);
        assert_eq!(w("h1^3").to_string(), "h1^3");
        assert!(Word::parse("h1**h2").is_err());
        assert!(Word::parse("h1^").is_err());
    }

    #[test]
    fn free_reduction() {
        assert_eq!(w("h1*u*u^-1*h1^-1"), Word::identity());
        assert_eq!(w("h1*h2").concat(&w("h2^-1*h1")).to_string(), "h1^2");
        assert_eq!(w("h1*u").inverse().to_string(), "u^-1*h1^-1");
    }

    #[test]
    fn alternating() {
        let a = w("h1");
        let b = w("hu1");
        assert_eq!(alternating_word(&a, &b, 3).to_string(), "h1*hu1*h1");
        assert_eq!(alternating_word(&a, &b, 0), Word::identity());
    }

    #[test]
    fn shortlex() {
        assert!(w("h2") < w("h1*h1"));
        assert!(w("h1") < w("h2"));
        assert!(w("h1") < w("h1^-1"));
        assert!(w("h1") < w("u"));
        assert!(w("u") < w("u'"));
    }
}
