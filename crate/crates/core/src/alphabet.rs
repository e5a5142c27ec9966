//! Finite alphabets of opaque tokens and strings over them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Reserved token standing for the empty string in edit pairs.
pub const EPSILON_TOKEN: &str = "<eps>";
/// Reserved token standing for the termination event.
pub const END_TOKEN: &str = "#";

/// Index of a symbol inside its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl Symbol {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, PartialEq, Eq)]
struct Inner {
    tokens: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

/// An ordered set of distinct tokens. Tokens may be multi-character
/// (phoneme names, for instance) but never contain whitespace.
///
/// Cloning is cheap; the token table is shared.
#[derive(Clone)]
pub struct Alphabet {
    inner: Arc<Inner>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list = Vec::new();
        let mut lookup = HashMap::new();
        for token in tokens {
            let token = token.into();
            if token.is_empty() || token.chars().any(char::is_whitespace) {
                return Err(Error::Config(format!("invalid symbol {token:?}")));
            }
            if token == EPSILON_TOKEN || token == END_TOKEN {
                return Err(Error::Config(format!("symbol {token:?} is reserved")));
            }
            let sym = Symbol(list.len() as u32);
            if lookup.insert(token.clone(), sym).is_some() {
                return Err(Error::Config(format!("duplicate symbol {token:?}")));
            }
            list.push(token);
        }
        if list.is_empty() {
            return Err(Error::Config("alphabet must not be empty".into()));
        }
        Ok(Alphabet {
            inner: Arc::new(Inner {
                tokens: list,
                lookup,
            }),
        })
    }

    /// One symbol per character of `chars`, e.g. `Alphabet::from_chars("abc")`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(String::from))
    }

    pub fn len(&self) -> usize {
        self.inner.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.tokens.is_empty()
    }

    pub fn token(&self, sym: Symbol) -> &str {
        &self.inner.tokens[sym.index()]
    }

    pub fn tokens(&self) -> &[String] {
        &self.inner.tokens
    }

    pub fn symbol(&self, token: &str) -> Option<Symbol> {
        self.inner.lookup.get(token).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.len() as u32).map(Symbol)
    }

    /// Parses whitespace-separated tokens into a string over this alphabet.
    pub fn parse(&self, text: &str) -> Result<SymbolString> {
        text.split_whitespace()
            .map(|tok| {
                self.symbol(tok)
                    .ok_or_else(|| Error::Input(format!("unknown symbol {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(SymbolString)
    }

    /// Renders a string as space-separated tokens.
    pub fn render(&self, s: &SymbolString) -> String {
        let toks: Vec<&str> = s.iter().map(|&sym| self.token(sym)).collect();
        toks.join(" ")
    }

    /// Re-expresses a string over `other` in this alphabet by token identity.
    pub fn translate(&self, other: &Alphabet, s: &SymbolString) -> Result<SymbolString> {
        s.iter()
            .map(|&sym| {
                let tok = other.token(sym);
                self.symbol(tok)
                    .ok_or_else(|| Error::Input(format!("symbol {tok:?} is not in the target alphabet")))
            })
            .collect::<Result<Vec<_>>>()
            .map(SymbolString)
    }

    pub(crate) fn contains_all(&self, s: &SymbolString) -> bool {
        s.iter().all(|sym| sym.index() < self.len())
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.tokens == other.inner.tokens
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.inner.tokens.iter()).finish()
    }
}

/// A sequence of symbols drawn from one alphabet.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolString(pub Vec<Symbol>);

impl SymbolString {
    pub fn empty() -> Self {
        SymbolString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }
}

impl std::ops::Index<usize> for SymbolString {
    type Output = Symbol;

    fn index(&self, i: usize) -> &Symbol {
        &self.0[i]
    }
}

impl FromIterator<Symbol> for SymbolString {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        SymbolString(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_duplicate_and_reserved() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", "#"]).is_err());
        assert!(Alphabet::new(["<eps>"]).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
    }

    #[test]
    fn multi_character_tokens() {
        let a = Alphabet::new(["aa", "ae", "ah"]).unwrap();
        let s = a.parse("ah aa  ae").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(a.render(&s), "ah aa ae");
        assert!(a.parse("ah zz").is_err());
    }

    #[test]
    fn translate_by_token() {
        let a = Alphabet::from_chars("abc").unwrap();
        let b = Alphabet::from_chars("cb").unwrap();
        let s = b.parse("c b").unwrap();
        assert_eq!(a.render(&a.translate(&b, &s).unwrap()), "c b");
        let d = Alphabet::from_chars("xy").unwrap();
        assert!(d.translate(&b, &s).is_err());
    }
}
