//! Brute-force reference computations by explicit enumeration of edit
//! sequences. Exponential, so only for tiny instances.
#![allow(dead_code)]

use rand::Rng;
use stedit::{Alphabet, EditKind, EditOp, FactoredTransducer, Symbol, SymbolString, Transducer};

/// Every edit sequence (without the final termination) yielding `(x, y)`.
pub fn alignments(x: &SymbolString, y: &SymbolString) -> Vec<Vec<EditOp>> {
    fn go(x: &[Symbol], y: &[Symbol], t: usize, v: usize, cur: &mut Vec<EditOp>, out: &mut Vec<Vec<EditOp>>) {
        if t == x.len() && v == y.len() {
            out.push(cur.clone());
            return;
        }
        if t < x.len() {
            cur.push(EditOp::Del(x[t]));
            go(x, y, t + 1, v, cur, out);
            cur.pop();
        }
        if v < y.len() {
            cur.push(EditOp::Ins(y[v]));
            go(x, y, t, v + 1, cur, out);
            cur.pop();
        }
        if t < x.len() && v < y.len() {
            cur.push(EditOp::Sub(x[t], y[v]));
            go(x, y, t + 1, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(x.as_slice(), y.as_slice(), 0, 0, &mut Vec::new(), &mut out);
    out
}

pub struct Enumerated {
    pub total: f64,
    pub best: f64,
    /// Posterior expected counts in edit-space order (termination included).
    pub counts: Vec<f64>,
}

/// Sum, max and posterior counts over terminated edit sequences.
pub fn enumerate(x: &SymbolString, y: &SymbolString, t: &Transducer) -> Enumerated {
    let space = t.space();
    let end = t.termination();
    let paths: Vec<(Vec<EditOp>, f64)> = alignments(x, y)
        .into_iter()
        .map(|ops| {
            let p = ops.iter().map(|&op| t.prob(op)).product::<f64>() * end;
            (ops, p)
        })
        .collect();
    let total: f64 = paths.iter().map(|p| p.1).sum();
    let best = paths.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut counts = vec![0.0; space.len()];
    if total > 0.0 {
        for (ops, p) in &paths {
            for &op in ops {
                counts[space.index(op)] += p / total;
            }
            counts[space.end_index()] += p / total;
        }
    }
    Enumerated { total, best, counts }
}

pub struct FactoredEnumerated {
    pub total: f64,
    pub best: f64,
    pub chi: [f64; 3],
    pub gamma_d: Vec<f64>,
    pub gamma_i: Vec<f64>,
    pub gamma_s: Vec<f64>,
}

fn slot(kind: EditKind) -> usize {
    match kind {
        EditKind::Deletion => 0,
        EditKind::Insertion => 1,
        EditKind::Substitution => 2,
    }
}

/// Length-conditioned sum, max and expected counts by enumeration. A move is
/// free while both strings are incomplete; free moves carry `ω`.
pub fn enumerate_factored(x: &SymbolString, y: &SymbolString, f: &FactoredTransducer) -> FactoredEnumerated {
    let nb = f.target().len();
    let mut paths = Vec::new();
    for ops in alignments(x, y) {
        let (mut t, mut v) = (0, 0);
        let mut p = 1.0;
        let mut moves = Vec::new();
        for &op in &ops {
            let free = t < x.len() && v < y.len();
            let kind = op.kind().unwrap();
            p *= f.observation(op) * if free { f.omega(kind) } else { 1.0 };
            moves.push((op, free));
            match kind {
                EditKind::Deletion => t += 1,
                EditKind::Insertion => v += 1,
                EditKind::Substitution => {
                    t += 1;
                    v += 1
                }
            }
        }
        paths.push((moves, p));
    }
    let total: f64 = paths.iter().map(|p| p.1).sum();
    let best = paths.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut out = FactoredEnumerated {
        total,
        best,
        chi: [0.0; 3],
        gamma_d: vec![0.0; f.source().len()],
        gamma_i: vec![0.0; nb],
        gamma_s: vec![0.0; f.source().len() * nb],
    };
    if total > 0.0 {
        for (moves, p) in &paths {
            let w = p / total;
            for &(op, free) in moves {
                if free {
                    out.chi[slot(op.kind().unwrap())] += w;
                }
                match op {
                    EditOp::Del(a) => out.gamma_d[a.index()] += w,
                    EditOp::Ins(b) => out.gamma_i[b.index()] += w,
                    EditOp::Sub(a, b) => out.gamma_s[a.index() * nb + b.index()] += w,
                    EditOp::End => unreachable!(),
                }
            }
        }
    }
    out
}

/// All strings of length `n` over `a`.
pub fn all_strings(a: &Alphabet, n: usize) -> Vec<SymbolString> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                a.symbols().map(move |c| {
                    let mut s2 = s.clone();
                    s2.push(c);
                    s2
                })
            })
            .collect();
    }
    out.into_iter().map(SymbolString).collect()
}

/// An alphabet of `n` single-letter tokens starting at `first`.
pub fn letters(first: char, n: usize) -> Alphabet {
    let s: String = (0..n as u8).map(|i| (first as u8 + i) as char).collect();
    Alphabet::from_chars(&s).unwrap()
}

pub fn random_string<R: Rng>(a: &Alphabet, max_len: usize, rng: &mut R) -> SymbolString {
    let n = rng.random_range(0..=max_len);
    SymbolString((0..n).map(|_| Symbol(rng.random_range(0..a.len()) as u32)).collect())
}

/// `|a - b| <= tol * max(|a|, |b|)`; equal values (including zeros) pass.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
