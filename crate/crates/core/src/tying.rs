//! Parameter tying: edits in one equivalence class share their total
//! probability uniformly.

use std::collections::HashMap;

use crate::edit::{EditOp, EditSpace};
use crate::error::{Error, Result};
use crate::transducer::Transducer;

/// A partition of `E` into equivalence classes. Termination is never tied.
#[derive(Debug, Clone, PartialEq)]
pub struct TyingScheme {
    space: EditSpace,
    class_of: Vec<usize>,
    sizes: Vec<usize>,
}

impl TyingScheme {
    /// `assign` labels every edit with a class; any edit left unlabeled is a
    /// configuration error.
    pub fn new(space: EditSpace, assign: impl Fn(EditOp) -> Option<usize>) -> Result<Self> {
        let mut dense: HashMap<usize, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(space.num_edits());
        let mut sizes = Vec::new();
        for i in 0..space.num_edits() {
            let op = space.op(i);
            let label = assign(op).ok_or_else(|| {
                Error::Config(format!("edit {} has no tying class", space.describe(op)))
            })?;
            let next = dense.len();
            let id = *dense.entry(label).or_insert(next);
            if id == sizes.len() {
                sizes.push(0);
            }
            sizes[id] += 1;
            class_of.push(id);
        }
        Ok(TyingScheme {
            space,
            class_of,
            sizes,
        })
    }

    /// Every edit in its own class: tying is the identity.
    pub fn singletons(space: EditSpace) -> Self {
        let index = space.clone();
        Self::new(space, move |op| Some(index.index(op))).expect("total assignment")
    }

    /// The four-cost scheme: identity substitutions, other substitutions,
    /// deletions and insertions.
    pub fn four_class(space: EditSpace) -> Self {
        let (a, b) = (space.source().clone(), space.target().clone());
        Self::new(space, |op| {
            Some(match op {
                EditOp::Sub(x, y) if a.token(x) == b.token(y) => 0,
                EditOp::Sub(..) => 1,
                EditOp::Del(_) => 2,
                EditOp::Ins(_) => 3,
                EditOp::End => unreachable!(),
            })
        })
        .expect("total assignment")
    }

    pub fn space(&self) -> &EditSpace {
        &self.space
    }

    pub fn num_classes(&self) -> usize {
        self.sizes.len()
    }

    /// Dense class id of an edit.
    pub fn class_of(&self, op: EditOp) -> Option<usize> {
        match op {
            EditOp::End => None,
            op => Some(self.class_of[self.space.index(op)]),
        }
    }

    /// `|τ(z)|` for a class id.
    pub fn class_size(&self, class: usize) -> usize {
        self.sizes[class]
    }

    pub(crate) fn tie_table(&self, probs: &mut [f64]) {
        let mut totals = vec![0.0; self.sizes.len()];
        for (i, &c) in self.class_of.iter().enumerate() {
            totals[c] += probs[i];
        }
        for (i, &c) in self.class_of.iter().enumerate() {
            probs[i] = totals[c] / self.sizes[c] as f64;
        }
    }
}

/// `δ(z) := δ(τ(z)) / |τ(z)|` for every edit; termination is untouched.
pub fn apply_tying(t: &Transducer, scheme: &TyingScheme) -> Result<Transducer> {
    if t.space() != scheme.space() {
        return Err(Error::Config("tying scheme was built for different alphabets".into()));
    }
    let mut probs = t.probs();
    scheme.tie_table(&mut probs[..t.space().num_edits()]);
    Transducer::from_probs(t.source().clone(), t.target().clone(), &probs)
}
