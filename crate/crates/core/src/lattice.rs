//! Forward and backward lattices for the memoryless transducer.
//!
//! All cells hold natural-log probabilities.

use crate::alphabet::SymbolString;
use crate::error::Result;
use crate::logspace::{log_add, LOG_ZERO};
use crate::transducer::Transducer;

/// A `(T+1) × (V+1)` table of log-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DPMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl DPMatrix {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        DPMatrix {
            rows,
            cols,
            cells: vec![LOG_ZERO; rows * cols],
        }
    }

    /// `T + 1`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `V + 1`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn log(&self, t: usize, v: usize) -> f64 {
        self.cells[t * self.cols + v]
    }

    pub fn prob(&self, t: usize, v: usize) -> f64 {
        self.log(t, v).exp()
    }

    #[inline]
    pub(crate) fn set(&mut self, t: usize, v: usize, value: f64) {
        self.cells[t * self.cols + v] = value;
    }

    /// The bottom-right cell.
    pub fn last(&self) -> f64 {
        self.log(self.rows - 1, self.cols - 1)
    }
}

/// `α[t][v] = p(x^t, y^v | φ)`; the final cell also carries `δ(#)`, so
/// `α[T][V] = p(x, y | φ)`.
pub fn forward_evaluate(x: &SymbolString, y: &SymbolString, t: &Transducer) -> Result<DPMatrix> {
    t.space().check_pair(x, y)?;
    Ok(forward_unchecked(x, y, t))
}

/// `β[t][v] = p(x_{t+1..T}, y_{v+1..V} | φ, <t,v>)`, including termination;
/// `β[0][0] = α[T][V]`.
pub fn backward_evaluate(x: &SymbolString, y: &SymbolString, t: &Transducer) -> Result<DPMatrix> {
    t.space().check_pair(x, y)?;
    Ok(backward_unchecked(x, y, t))
}

pub(crate) fn forward_unchecked(x: &SymbolString, y: &SymbolString, phi: &Transducer) -> DPMatrix {
    let space = phi.space();
    let delta = phi.log_probs();
    let (tt, vv) = (x.len(), y.len());
    let mut alpha = DPMatrix::new(tt + 1, vv + 1);
    alpha.set(0, 0, 0.0);
    for t in 0..=tt {
        for v in 0..=vv {
            if t == 0 && v == 0 {
                continue;
            }
            let mut acc = LOG_ZERO;
            if v > 0 {
                acc = log_add(acc, delta[space.ins_index(y[v - 1])] + alpha.log(t, v - 1));
            }
            if t > 0 {
                acc = log_add(acc, delta[space.del_index(x[t - 1])] + alpha.log(t - 1, v));
            }
            if t > 0 && v > 0 {
                acc = log_add(
                    acc,
                    delta[space.sub_index(x[t - 1], y[v - 1])] + alpha.log(t - 1, v - 1),
                );
            }
            alpha.set(t, v, acc);
        }
    }
    let last = alpha.log(tt, vv) + phi.log_termination();
    alpha.set(tt, vv, last);
    alpha
}

pub(crate) fn backward_unchecked(x: &SymbolString, y: &SymbolString, phi: &Transducer) -> DPMatrix {
    let space = phi.space();
    let delta = phi.log_probs();
    let (tt, vv) = (x.len(), y.len());
    let mut beta = DPMatrix::new(tt + 1, vv + 1);
    beta.set(tt, vv, phi.log_termination());
    for t in (0..=tt).rev() {
        for v in (0..=vv).rev() {
            if t == tt && v == vv {
                continue;
            }
            let mut acc = LOG_ZERO;
            if v < vv {
                acc = log_add(acc, delta[space.ins_index(y[v])] + beta.log(t, v + 1));
            }
            if t < tt {
                acc = log_add(acc, delta[space.del_index(x[t])] + beta.log(t + 1, v));
            }
            if t < tt && v < vv {
                acc = log_add(acc, delta[space.sub_index(x[t], y[v])] + beta.log(t + 1, v + 1));
            }
            beta.set(t, v, acc);
        }
    }
    beta
}
