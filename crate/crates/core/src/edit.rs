//! Primitive edit operations and terminated edit sequences.

use crate::alphabet::{Alphabet, Symbol, SymbolString, END_TOKEN, EPSILON_TOKEN};
use crate::error::{Error, Result};

/// A primitive edit operation or the termination event.
///
/// The null pair `<eps, eps>` has no representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EditOp {
    Sub(Symbol, Symbol),
    Del(Symbol),
    Ins(Symbol),
    End,
}

/// The three families of primitive edits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditKind {
    Deletion,
    Insertion,
    Substitution,
}

impl EditOp {
    pub fn kind(self) -> Option<EditKind> {
        match self {
            EditOp::Sub(..) => Some(EditKind::Substitution),
            EditOp::Del(_) => Some(EditKind::Deletion),
            EditOp::Ins(_) => Some(EditKind::Insertion),
            EditOp::End => None,
        }
    }
}

/// Dense indexing of `E ∪ {#}` for a pair of alphabets.
///
/// Layout: substitutions row-major over `A × B`, then deletions over `A`,
/// then insertions over `B`, then termination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditSpace {
    a: Alphabet,
    b: Alphabet,
}

impl EditSpace {
    pub fn new(a: Alphabet, b: Alphabet) -> Self {
        EditSpace { a, b }
    }

    pub fn source(&self) -> &Alphabet {
        &self.a
    }

    pub fn target(&self) -> &Alphabet {
        &self.b
    }

    /// `|E| = |A||B| + |A| + |B|`.
    pub fn num_edits(&self) -> usize {
        let (na, nb) = (self.a.len(), self.b.len());
        na * nb + na + nb
    }

    /// `|E| + 1`.
    pub fn len(&self) -> usize {
        self.num_edits() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn sub_index(&self, a: Symbol, b: Symbol) -> usize {
        a.index() * self.b.len() + b.index()
    }

    #[inline]
    pub fn del_index(&self, a: Symbol) -> usize {
        self.a.len() * self.b.len() + a.index()
    }

    #[inline]
    pub fn ins_index(&self, b: Symbol) -> usize {
        let na = self.a.len();
        na * self.b.len() + na + b.index()
    }

    #[inline]
    pub fn end_index(&self) -> usize {
        self.num_edits()
    }

    pub fn index(&self, op: EditOp) -> usize {
        match op {
            EditOp::Sub(a, b) => self.sub_index(a, b),
            EditOp::Del(a) => self.del_index(a),
            EditOp::Ins(b) => self.ins_index(b),
            EditOp::End => self.end_index(),
        }
    }

    pub fn op(&self, index: usize) -> EditOp {
        let (na, nb) = (self.a.len(), self.b.len());
        if index < na * nb {
            EditOp::Sub(Symbol((index / nb) as u32), Symbol((index % nb) as u32))
        } else if index < na * nb + na {
            EditOp::Del(Symbol((index - na * nb) as u32))
        } else if index < na * nb + na + nb {
            EditOp::Ins(Symbol((index - na * nb - na) as u32))
        } else {
            EditOp::End
        }
    }

    /// All of `E ∪ {#}` in index order.
    pub fn ops(&self) -> impl Iterator<Item = EditOp> + '_ {
        (0..self.len()).map(|i| self.op(i))
    }

    /// Human-readable form, e.g. `<a,c>`, `<a,<eps>>`, `#`.
    pub fn describe(&self, op: EditOp) -> String {
        match op {
            EditOp::Sub(a, b) => format!("<{},{}>", self.a.token(a), self.b.token(b)),
            EditOp::Del(a) => format!("<{},{}>", self.a.token(a), EPSILON_TOKEN),
            EditOp::Ins(b) => format!("<{},{}>", EPSILON_TOKEN, self.b.token(b)),
            EditOp::End => END_TOKEN.to_string(),
        }
    }

    pub(crate) fn check_pair(&self, x: &SymbolString, y: &SymbolString) -> Result<()> {
        if !self.a.contains_all(x) {
            return Err(Error::Input("source string has a symbol outside alphabet A".into()));
        }
        if !self.b.contains_all(y) {
            return Err(Error::Input("target string has a symbol outside alphabet B".into()));
        }
        Ok(())
    }
}

/// A terminated edit sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub ops: Vec<EditOp>,
}

impl Alignment {
    pub fn new(ops: Vec<EditOp>) -> Self {
        Alignment { ops }
    }

    /// The string pair produced by reading the left and right components.
    pub fn yield_pair(&self) -> (SymbolString, SymbolString) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for op in &self.ops {
            match *op {
                EditOp::Sub(a, b) => {
                    x.push(a);
                    y.push(b);
                }
                EditOp::Del(a) => x.push(a),
                EditOp::Ins(b) => y.push(b),
                EditOp::End => break,
            }
        }
        (SymbolString(x), SymbolString(y))
    }

    /// Number of edit operations, not counting termination.
    pub fn num_edits(&self) -> usize {
        self.ops.iter().filter(|op| **op != EditOp::End).count()
    }

    pub fn is_terminated(&self) -> bool {
        self.ops.last() == Some(&EditOp::End)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let space = EditSpace::new(
            Alphabet::from_chars("ab").unwrap(),
            Alphabet::from_chars("xyz").unwrap(),
        );
        assert_eq!(space.num_edits(), 2 * 3 + 2 + 3);
        for i in 0..space.len() {
            assert_eq!(space.index(space.op(i)), i);
        }
        assert_eq!(space.op(space.end_index()), EditOp::End);
    }

    #[test]
    fn yield_of_alignment() {
        let a = Alphabet::from_chars("ab").unwrap();
        let b = Alphabet::from_chars("c").unwrap();
        let (sa, sb, c) = (a.symbol("a").unwrap(), a.symbol("b").unwrap(), b.symbol("c").unwrap());
        let al = Alignment::new(vec![EditOp::Del(sa), EditOp::Sub(sb, c), EditOp::Sub(sb, c), EditOp::End]);
        let (x, y) = al.yield_pair();
        assert_eq!(a.render(&x), "a b b");
        assert_eq!(b.render(&y), "c c");
        assert_eq!(al.num_edits(), 3);
        assert!(al.is_terminated());
    }
}
