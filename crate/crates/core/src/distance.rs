//! String distances: the classic cost-based edit distance and the two
//! transduction distances (Viterbi and stochastic), all reported in bits
//! except for the classic distance, which is in the cost function's units.

use crate::alphabet::{Alphabet, SymbolString};
use crate::edit::{Alignment, EditOp, EditSpace};
use crate::error::Result;
use crate::lattice::forward_unchecked;
use crate::logspace::{nats_to_bits, LOG_ZERO};
use crate::transducer::Transducer;

/// `p(x, y | φ)`: total probability of every terminated edit sequence whose
/// yield is `(x, y)`.
pub fn joint_probability(x: &SymbolString, y: &SymbolString, t: &Transducer) -> Result<f64> {
    Ok(log_joint_probability(x, y, t)?.exp())
}

/// Natural log of [`joint_probability`].
pub fn log_joint_probability(x: &SymbolString, y: &SymbolString, t: &Transducer) -> Result<f64> {
    t.space().check_pair(x, y)?;
    Ok(forward_unchecked(x, y, t).last())
}

/// `-log2 p(x, y | φ)`; infinite when the pair is unreachable.
pub fn stochastic_distance(x: &SymbolString, y: &SymbolString, t: &Transducer) -> Result<f64> {
    Ok(nats_to_bits(log_joint_probability(x, y, t)?))
}

/// Result of a most-likely-alignment search.
#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiPath {
    /// `-log2` of the best terminated edit sequence's probability.
    pub bits: f64,
    /// The maximizing sequence, ending with `#`; `None` when no sequence has
    /// positive probability.
    pub alignment: Option<Alignment>,
}

#[derive(Clone, Copy)]
enum Back {
    Start,
    Sub,
    Del,
    Ins,
}

/// Generic min-cost alignment over `costs` in [`EditSpace`] order (edits only).
///
/// Ties prefer substitution, then deletion, then insertion.
fn best_alignment(
    x: &SymbolString,
    y: &SymbolString,
    space: &EditSpace,
    cost: impl Fn(usize) -> f64,
) -> (f64, Vec<EditOp>) {
    let (tt, vv) = (x.len(), y.len());
    let cols = vv + 1;
    let mut score = vec![f64::INFINITY; (tt + 1) * cols];
    let mut back = vec![Back::Start; (tt + 1) * cols];
    score[0] = 0.0;
    for t in 0..=tt {
        for v in 0..=vv {
            if t == 0 && v == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut arg = Back::Start;
            if t > 0 && v > 0 {
                let c = score[(t - 1) * cols + v - 1] + cost(space.sub_index(x[t - 1], y[v - 1]));
                if c < best {
                    best = c;
                    arg = Back::Sub;
                }
            }
            if t > 0 {
                let c = score[(t - 1) * cols + v] + cost(space.del_index(x[t - 1]));
                if c < best {
                    best = c;
                    arg = Back::Del;
                }
            }
            if v > 0 {
                let c = score[t * cols + v - 1] + cost(space.ins_index(y[v - 1]));
                if c < best {
                    best = c;
                    arg = Back::Ins;
                }
            }
            score[t * cols + v] = best;
            back[t * cols + v] = arg;
        }
    }
    let total = score[tt * cols + vv];
    let mut ops = vec![EditOp::End];
    if total.is_finite() {
        let (mut t, mut v) = (tt, vv);
        while t > 0 || v > 0 {
            match back[t * cols + v] {
                Back::Sub => {
                    ops.push(EditOp::Sub(x[t - 1], y[v - 1]));
                    t -= 1;
                    v -= 1;
                }
                Back::Del => {
                    ops.push(EditOp::Del(x[t - 1]));
                    t -= 1;
                }
                Back::Ins => {
                    ops.push(EditOp::Ins(y[v - 1]));
                    v -= 1;
                }
                Back::Start => unreachable!("finite cell without a predecessor"),
            }
        }
        ops.reverse();
    }
    (total, ops)
}

/// `-log2` of the single most likely terminated edit sequence for `(x, y)`.
pub fn viterbi_distance(x: &SymbolString, y: &SymbolString, t: &Transducer) -> Result<ViterbiPath> {
    t.space().check_pair(x, y)?;
    Ok(viterbi_unchecked(x, y, t))
}

pub(crate) fn viterbi_unchecked(x: &SymbolString, y: &SymbolString, t: &Transducer) -> ViterbiPath {
    let delta = t.log_probs();
    let (neg_log, ops) = best_alignment(x, y, t.space(), |i| -delta[i]);
    let log_p = -neg_log + t.log_termination();
    if log_p == LOG_ZERO || log_p.is_nan() {
        ViterbiPath {
            bits: f64::INFINITY,
            alignment: None,
        }
    } else {
        ViterbiPath {
            bits: nats_to_bits(log_p),
            alignment: Some(Alignment::new(ops)),
        }
    }
}

/// Nonnegative costs for every primitive edit (termination excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    space: EditSpace,
    costs: Vec<f64>,
}

impl CostFunction {
    /// `costs` in [`EditSpace`] order over `E`; `+inf` is allowed.
    pub fn new(a: Alphabet, b: Alphabet, costs: Vec<f64>) -> Result<Self> {
        let space = EditSpace::new(a, b);
        if costs.len() != space.num_edits() {
            return Err(crate::Error::Config(format!(
                "expected {} edit costs, got {}",
                space.num_edits(),
                costs.len()
            )));
        }
        if costs.iter().any(|c| !(*c >= 0.0)) {
            return Err(crate::Error::Config("edit costs must be nonnegative".into()));
        }
        Ok(CostFunction { space, costs })
    }

    /// Identity substitutions (same token on both sides) cost zero; every
    /// other edit costs one.
    pub fn levenshtein(a: Alphabet, b: Alphabet) -> Self {
        let space = EditSpace::new(a, b);
        let costs = (0..space.num_edits())
            .map(|i| match space.op(i) {
                EditOp::Sub(s, t) if space.source().token(s) == space.target().token(t) => 0.0,
                _ => 1.0,
            })
            .collect();
        CostFunction { space, costs }
    }

    /// `c(z) = -log2 δ(z)`.
    pub fn from_transducer(t: &Transducer) -> Self {
        let costs = t.log_probs()[..t.space().num_edits()]
            .iter()
            .map(|&l| nats_to_bits(l))
            .collect();
        CostFunction {
            space: t.space().clone(),
            costs,
        }
    }

    pub fn space(&self) -> &EditSpace {
        &self.space
    }

    pub fn cost(&self, op: EditOp) -> f64 {
        match op {
            EditOp::End => 0.0,
            op => self.costs[self.space.index(op)],
        }
    }
}

/// Builds the Levenshtein cost function for `A` and `B`.
pub fn levenshtein_costs(a: Alphabet, b: Alphabet) -> CostFunction {
    CostFunction::levenshtein(a, b)
}

/// The classic edit distance `d_c(x, y)` and one minimizing alignment.
pub fn classic_edit_distance(
    x: &SymbolString,
    y: &SymbolString,
    c: &CostFunction,
) -> Result<(f64, Alignment)> {
    c.space.check_pair(x, y)?;
    let (cost, ops) = best_alignment(x, y, &c.space, |i| c.costs[i]);
    Ok((cost, Alignment::new(ops)))
}

/// Anything that scores a prototype `x` against an observation `y`; smaller
/// is closer.
pub trait StringDistance: Sync {
    fn distance(&self, x: &SymbolString, y: &SymbolString) -> f64;
}

/// The untrained Levenshtein distance.
#[derive(Debug, Clone)]
pub struct Levenshtein(pub CostFunction);

impl Levenshtein {
    pub fn new(a: Alphabet, b: Alphabet) -> Self {
        Levenshtein(CostFunction::levenshtein(a, b))
    }
}

impl StringDistance for Levenshtein {
    fn distance(&self, x: &SymbolString, y: &SymbolString) -> f64 {
        best_alignment(x, y, &self.0.space, |i| self.0.costs[i]).0
    }
}

/// Viterbi edit distance under a transducer.
#[derive(Debug, Clone, Copy)]
pub struct ViterbiDistance<'a>(pub &'a Transducer);

impl StringDistance for ViterbiDistance<'_> {
    fn distance(&self, x: &SymbolString, y: &SymbolString) -> f64 {
        viterbi_unchecked(x, y, self.0).bits
    }
}

/// Stochastic edit distance under a transducer.
#[derive(Debug, Clone, Copy)]
pub struct StochasticDistance<'a>(pub &'a Transducer);

impl StringDistance for StochasticDistance<'_> {
    fn distance(&self, x: &SymbolString, y: &SymbolString) -> f64 {
        nats_to_bits(forward_unchecked(x, y, self.0).last())
    }
}
