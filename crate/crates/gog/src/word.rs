//! Freely reduced words over named generators, the common currency for
//! group elements throughout the crate.

use crate::error::GogError;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// An interned generator symbol. Symbols match `[a-z][a-z0-9_]*`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(name: &str) -> Result<Self, GogError> {
        if !is_valid_symbol(name) {
            return Err(GogError::BadSymbol(name.to_string()));
        }
        Ok(Sym(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub fn is_valid_symbol(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Sym {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Sym {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Sym::new(&s).map_err(serde::de::Error::custom)
    }
}

/// One signed occurrence of a generator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub sym: Sym,
    /// `true` for the inverse generator.
    pub inv: bool,
}

impl Letter {
    pub fn inverse(&self) -> Letter {
        Letter { sym: self.sym.clone(), inv: !self.inv }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.sym == other.sym && self.inv != other.inv
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sym, if self.inv { "⁻" } else { "" })
    }
}

/// A freely reduced word. The reduction invariant is maintained by every
/// constructor; raw letter sequences exist only at parse boundaries.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word { letters: Vec::new() }
    }

    pub fn gen(sym: Sym) -> Word {
        Word { letters: vec![Letter { sym, inv: false }] }
    }

    /// Free reduction of a raw letter sequence: cancels all adjacent
    /// inverse pairs. Idempotent and length-nonincreasing.
    pub fn reduce(raw: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            if out.last().is_some_and(|last| last.cancels(&l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(Letter::inverse).collect() }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for l in &other.letters {
            if out.last().is_some_and(|last| last.cancels(l)) {
                out.pop();
            } else {
                out.push(l.clone());
            }
        }
        Word { letters: out }
    }

    pub fn pow(&self, exp: i64) -> Word {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..exp.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.mul(self).mul(&c.inverse())
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Cyclic reduction: returns `(prefix, core)` with `self = prefix core prefix⁻¹`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut letters = self.letters.clone();
        let mut prefix = Vec::new();
        while letters.len() >= 2 && letters.first().unwrap().cancels(letters.last().unwrap()) {
            prefix.push(letters.remove(0));
            letters.pop();
        }
        (Word { letters: prefix }, Word { letters })
    }

    /// All distinct symbols occurring in the word.
    pub fn support(&self) -> Vec<Sym> {
        let mut syms: Vec<Sym> = self.letters.iter().map(|l| l.sym.clone()).collect();
        syms.sort();
        syms.dedup();
        syms
    }

    /// Exponent sum of `sym` in the word.
    pub fn exponent_sum(&self, sym: &Sym) -> i64 {
        self.letters.iter().map(|l| if l.sym == *sym { if l.inv { -1 } else { 1 } } else { 0 }).sum()
    }

    /// Rewrites each generator through `image` and reduces. Generators
    /// without an image are an error.
    pub fn substitute(&self, image: &dyn Fn(&Sym) -> Option<Word>) -> Result<Word, GogError> {
        let mut out = Word::identity();
        for l in &self.letters {
            let w = image(&l.sym).ok_or_else(|| GogError::UnknownGenerator(l.sym.to_string()))?;
            out = out.mul(&if l.inv { w.inverse() } else { w });
        }
        Ok(out)
    }

    /// Parses the shared word syntax: whitespace separated letters `a`,
    /// `a^-1`, with power sugar `a^3`; the empty word is spelled `1`.
    pub fn parse(text: &str) -> Result<Word, GogError> {
        let text = text.trim();
        if text == "1" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                None => (tok, 1i64),
                Some((name, e)) => {
                    let exp: i64 = e
                        .parse()
                        .map_err(|_| GogError::Parse(format!("bad exponent in `{tok}`")))?;
                    (name, exp)
                }
            };
            let sym = Sym::new(name)?;
            let inv = exp < 0;
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter { sym: sym.clone(), inv });
            }
        }
        Ok(Word::reduce(letters))
    }

    /// Canonical text form, parseable by [`Word::parse`]. Runs of one
    /// generator print with power sugar.
    pub fn display(&self) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = &self.letters[i];
            let mut run = 1usize;
            while i + run < self.letters.len() && self.letters[i + run] == *l {
                run += 1;
            }
            let exp = if l.inv { -(run as i64) } else { run as i64 };
            if exp == 1 {
                parts.push(l.sym.to_string());
            } else {
                parts.push(format!("{}^{}", l.sym, exp));
            }
            i += run;
        }
        parts.join(" ")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self.display())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Shorthand used pervasively in tests and builders: parse or panic.
pub fn word(text: &str) -> Word {
    Word::parse(text).expect("bad word literal")
}

/// Shorthand symbol constructor; panics on invalid names.
pub fn sym(name: &str) -> Sym {
    Sym::new(name).expect("bad symbol literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_cancels_adjacent_pairs() {
        assert_eq!(word("x x^-1 y"), word("y"));
        assert_eq!(Word::parse("1").unwrap(), Word::identity());
        assert_eq!(word("x y y^-1 x"), word("x^2"));
    }

    #[test]
    fn reduce_is_idempotent_and_shortening() {
        let w = word("a b b^-1 a a^-1 c");
        let again = Word::reduce(w.letters().to_vec());
        assert_eq!(w, again);
        assert!(w.len() <= 6);
    }

    #[test]
    fn word_times_inverse_is_identity() {
        let w = word("x y^-2 z x");
        assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn parse_rejects_bad_symbols() {
        assert!(Word::parse("X").is_err());
        assert!(Word::parse("2a").is_err());
        assert!(Word::parse("a^b").is_err());
        assert!(Word::parse("a_1 b2").is_ok());
    }

    #[test]
    fn display_round_trips() {
        for text in ["1", "x", "x^-1", "x^3 y^-2 x", "a b a^-1 b^-1"] {
            let w = word(text);
            assert_eq!(Word::parse(&w.display()).unwrap(), w);
        }
    }

    #[test]
    fn cyclic_reduction_splits_conjugation() {
        let w = word("a b c b^-1 a^-1");
        let (p, core) = w.cyclic_reduce();
        assert_eq!(p, word("a b"));
        assert_eq!(core, word("c"));
        assert_eq!(p.mul(&core).mul(&p.inverse()), w);
    }

    #[test]
    fn substitution_applies_images() {
        let w = word("x y^-1");
        let img = |s: &Sym| -> Option<Word> {
            match s.as_str() {
                "x" => Some(word("u^2")),
                "y" => Some(word("v")),
                _ => None,
            }
        };
        assert_eq!(w.substitute(&img).unwrap(), word("u^2 v^-1"));
    }
}
