//! A memoryless transducer conditioned on the lengths of both strings.
//!
//! A transition distribution `ω = (ω_d, ω_i, ω_s)` picks the kind of each
//! edit and three observation distributions `δ_d`, `δ_i`, `δ_s` pick its
//! symbols. Once one string is complete the remaining edits are forced
//! (deletions or insertions) and only the observation distribution applies,
//! so every edit sequence yields strings of exactly the requested lengths.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Gamma;
use rayon::prelude::*;

use crate::alphabet::{Alphabet, Symbol, SymbolString};
use crate::edit::{EditKind, EditOp, EditSpace};
use crate::em::{relative_change, PairCorpus, CHUNK};
use crate::error::{Error, Result};
use crate::lattice::DPMatrix;
use crate::logspace::{ln, log_add, nats_to_bits, LOG_ZERO};
use crate::transducer::{Transducer, NORMALIZATION_TOLERANCE};

const KINDS: [EditKind; 3] = [EditKind::Deletion, EditKind::Insertion, EditKind::Substitution];

fn kind_slot(kind: EditKind) -> usize {
    match kind {
        EditKind::Deletion => 0,
        EditKind::Insertion => 1,
        EditKind::Substitution => 2,
    }
}

fn check_distribution(name: &str, probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::Config(format!("{name} has a negative or non-finite entry")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Config(format!("{name} sums to {total}, not 1")));
    }
    Ok(())
}

/// Transition and observation parameters `θ = (ω, δ_d, δ_i, δ_s)`, held as
/// natural logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredTransducer {
    space: EditSpace,
    /// Indexed deletion, insertion, substitution.
    log_omega: [f64; 3],
    log_d: Vec<f64>,
    log_i: Vec<f64>,
    /// Row-major over `A × B`.
    log_s: Vec<f64>,
}

fn logs(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&p| ln(p)).collect()
}

fn exps(v: &[f64]) -> Vec<f64> {
    v.iter().map(|l| l.exp()).collect()
}

impl FactoredTransducer {
    /// `omega` is `(ω_d, ω_i, ω_s)`; `delta_s` is row-major over `A × B`.
    pub fn new(
        a: Alphabet,
        b: Alphabet,
        omega: [f64; 3],
        delta_d: Vec<f64>,
        delta_i: Vec<f64>,
        delta_s: Vec<f64>,
    ) -> Result<Self> {
        if delta_d.len() != a.len() || delta_i.len() != b.len() || delta_s.len() != a.len() * b.len() {
            return Err(Error::Config("observation tables do not match the alphabets".into()));
        }
        check_distribution("ω", &omega)?;
        check_distribution("δ_d", &delta_d)?;
        check_distribution("δ_i", &delta_i)?;
        check_distribution("δ_s", &delta_s)?;
        Ok(Self::build(EditSpace::new(a, b), omega, &delta_d, &delta_i, &delta_s))
    }

    /// Bit-exact construction from natural-log parameters.
    pub fn from_log_params(
        a: Alphabet,
        b: Alphabet,
        log_omega: [f64; 3],
        log_d: Vec<f64>,
        log_i: Vec<f64>,
        log_s: Vec<f64>,
    ) -> Result<Self> {
        let bad = |v: &[f64]| v.iter().any(|l| l.is_nan() || *l == f64::INFINITY);
        if bad(&log_omega) || bad(&log_d) || bad(&log_i) || bad(&log_s) {
            return Err(Error::Config("log-probabilities must be finite or -inf".into()));
        }
        let f = Self::new(a, b, log_omega.map(f64::exp), exps(&log_d), exps(&log_i), exps(&log_s))?;
        Ok(FactoredTransducer {
            log_omega,
            log_d,
            log_i,
            log_s,
            ..f
        })
    }

    fn build(space: EditSpace, omega: [f64; 3], delta_d: &[f64], delta_i: &[f64], delta_s: &[f64]) -> Self {
        FactoredTransducer {
            log_omega: omega.map(ln),
            log_d: logs(delta_d),
            log_i: logs(delta_i),
            log_s: logs(delta_s),
            space,
        }
    }

    /// Every distribution uniform.
    pub fn uniform(a: Alphabet, b: Alphabet) -> Self {
        let (na, nb) = (a.len(), b.len());
        Self::build(
            EditSpace::new(a, b),
            [1.0 / 3.0; 3],
            &vec![1.0 / na as f64; na],
            &vec![1.0 / nb as f64; nb],
            &vec![1.0 / (na * nb) as f64; na * nb],
        )
    }

    /// Independent flat Dirichlet draws for every distribution.
    pub fn random<R: Rng + ?Sized>(a: Alphabet, b: Alphabet, rng: &mut R) -> Self {
        let gamma = Gamma::new(1.0, 1.0).expect("valid gamma parameters");
        let mut draw = |n: usize| {
            let g: Vec<f64> = (0..n)
                .map(|_| loop {
                    let s: f64 = gamma.sample(rng);
                    if s > 0.0 {
                        break s;
                    }
                })
                .collect();
            let total: f64 = g.iter().sum();
            g.into_iter().map(|s| s / total).collect::<Vec<_>>()
        };
        let w = draw(3);
        let (na, nb) = (a.len(), b.len());
        let (dd, di, ds) = (draw(na), draw(nb), draw(na * nb));
        Self::build(EditSpace::new(a, b), [w[0], w[1], w[2]], &dd, &di, &ds)
    }

    /// `(ln ω_d, ln ω_i, ln ω_s)`.
    pub fn log_omega(&self) -> [f64; 3] {
        self.log_omega
    }

    pub fn log_delta_d(&self) -> &[f64] {
        &self.log_d
    }

    pub fn log_delta_i(&self) -> &[f64] {
        &self.log_i
    }

    /// Row-major over `A × B`.
    pub fn log_delta_s(&self) -> &[f64] {
        &self.log_s
    }

    pub fn space(&self) -> &EditSpace {
        &self.space
    }

    pub fn source(&self) -> &Alphabet {
        self.space.source()
    }

    pub fn target(&self) -> &Alphabet {
        self.space.target()
    }

    /// `ω` for an edit kind.
    pub fn omega(&self, kind: EditKind) -> f64 {
        self.log_omega[kind_slot(kind)].exp()
    }

    pub fn delta_d(&self, a: Symbol) -> f64 {
        self.log_d[a.index()].exp()
    }

    pub fn delta_i(&self, b: Symbol) -> f64 {
        self.log_i[b.index()].exp()
    }

    pub fn delta_s(&self, a: Symbol, b: Symbol) -> f64 {
        self.log_s[a.index() * self.target().len() + b.index()].exp()
    }

    /// Observation probability of an edit, without the transition factor.
    pub fn observation(&self, op: EditOp) -> f64 {
        match op {
            EditOp::Del(a) => self.delta_d(a),
            EditOp::Ins(b) => self.delta_i(b),
            EditOp::Sub(a, b) => self.delta_s(a, b),
            EditOp::End => 0.0,
        }
    }

    fn log_obs_d(&self, a: Symbol) -> f64 {
        self.log_d[a.index()]
    }

    fn log_obs_i(&self, b: Symbol) -> f64 {
        self.log_i[b.index()]
    }

    fn log_obs_s(&self, a: Symbol, b: Symbol) -> f64 {
        self.log_s[a.index() * self.target().len() + b.index()]
    }

    fn check_pair(&self, x: &SymbolString, y: &SymbolString) -> Result<()> {
        self.space.check_pair(x, y)
    }
}

/// Translates a transducer to factored form. Termination is dropped and the
/// edit distribution renormalized over `E`.
pub fn factor(t: &Transducer) -> Result<FactoredTransducer> {
    let space = t.space().clone();
    let (a, b) = (space.source().clone(), space.target().clone());
    let e = t.edit_distribution();
    let mut omega = [0.0; 3];
    for (i, &p) in e.iter().enumerate() {
        if let Some(k) = space.op(i).kind() {
            omega[kind_slot(k)] += p;
        }
    }
    for k in KINDS {
        if !(omega[kind_slot(k)] > 0.0) {
            return Err(Error::Degenerate(format!("the model has no {k:?} mass to factor")));
        }
    }
    let dd: Vec<f64> = a.symbols().map(|s| e[space.del_index(s)] / omega[0]).collect();
    let di: Vec<f64> = b.symbols().map(|s| e[space.ins_index(s)] / omega[1]).collect();
    let ds: Vec<f64> = a
        .symbols()
        .flat_map(|x| b.symbols().map(move |y| (x, y)))
        .map(|(x, y)| e[space.sub_index(x, y)] / omega[2])
        .collect();
    Ok(FactoredTransducer::build(space, omega, &dd, &di, &ds))
}

/// The unfactored edit distribution `δ(e) = ω_kind · δ_kind(e)`, with no
/// termination mass.
pub fn unfactor(f: &FactoredTransducer) -> Transducer {
    let (a, b) = (f.source().clone(), f.target().clone());
    Transducer::from_fn(a, b, |op| match op.kind() {
        Some(k) => f.omega(k) * f.observation(op),
        None => 0.0,
    })
    .expect("products of probabilities are valid")
}

/// A joint distribution `p(T, V)` over string lengths with finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthPrior {
    table: BTreeMap<(usize, usize), f64>,
}

impl LengthPrior {
    pub fn new(table: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        let probs: Vec<f64> = table.values().copied().collect();
        check_distribution("length prior", &probs)?;
        Ok(LengthPrior { table })
    }

    pub fn point_mass(t: usize, v: usize) -> Self {
        LengthPrior {
            table: BTreeMap::from([((t, v), 1.0)]),
        }
    }

    /// Relative frequencies of the pair lengths in a corpus.
    pub fn from_corpus(c: &PairCorpus) -> Self {
        let mut table = BTreeMap::new();
        for (x, y) in c.pairs() {
            *table.entry((x.len(), y.len())).or_insert(0.0) += 1.0;
        }
        let n = c.len() as f64;
        table.values_mut().for_each(|p| *p /= n);
        LengthPrior { table }
    }

    pub fn prob(&self, t: usize, v: usize) -> f64 {
        self.table.get(&(t, v)).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.table.iter().map(|(&k, &p)| (k, p))
    }
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    WeightedIndex::new(weights)
        .expect("a normalized distribution has positive mass")
        .sample(rng)
}

/// Draws a pair of strings of exactly the given lengths.
pub fn generate_strings<R: Rng + ?Sized>(
    t_len: usize,
    v_len: usize,
    f: &FactoredTransducer,
    rng: &mut R,
) -> (SymbolString, SymbolString) {
    let nb = f.target().len();
    let omega = f.log_omega.map(f64::exp);
    let (dd, di, ds) = (exps(&f.log_d), exps(&f.log_i), exps(&f.log_s));
    let (mut x, mut y) = (Vec::with_capacity(t_len), Vec::with_capacity(v_len));
    while x.len() < t_len && y.len() < v_len {
        match KINDS[sample_index(&omega, rng)] {
            EditKind::Deletion => x.push(Symbol(sample_index(&dd, rng) as u32)),
            EditKind::Insertion => y.push(Symbol(sample_index(&di, rng) as u32)),
            EditKind::Substitution => {
                let k = sample_index(&ds, rng);
                x.push(Symbol((k / nb) as u32));
                y.push(Symbol((k % nb) as u32));
            }
        }
    }
    while x.len() < t_len {
        x.push(Symbol(sample_index(&dd, rng) as u32));
    }
    while y.len() < v_len {
        y.push(Symbol(sample_index(&di, rng) as u32));
    }
    (SymbolString(x), SymbolString(y))
}

/// Log-factor of leaving `<t, v>` by an edit of `kind`, or `None` when the
/// move is unavailable. The second value is whether the move was free.
#[inline]
fn move_factor(
    f: &FactoredTransducer,
    x: &SymbolString,
    y: &SymbolString,
    t: usize,
    v: usize,
    kind: EditKind,
) -> Option<(f64, bool)> {
    let (tt, vv) = (x.len(), y.len());
    let free = t < tt && v < vv;
    let w = |k: EditKind| if free { f.log_omega[kind_slot(k)] } else { 0.0 };
    match kind {
        EditKind::Deletion if t < tt => Some((w(kind) + f.log_obs_d(x[t]), free)),
        EditKind::Insertion if v < vv => Some((w(kind) + f.log_obs_i(y[v]), free)),
        EditKind::Substitution if free => Some((w(kind) + f.log_obs_s(x[t], y[v]), free)),
        _ => None,
    }
}

fn successor(t: usize, v: usize, kind: EditKind) -> (usize, usize) {
    match kind {
        EditKind::Deletion => (t + 1, v),
        EditKind::Insertion => (t, v + 1),
        EditKind::Substitution => (t + 1, v + 1),
    }
}

fn forward_unchecked(x: &SymbolString, y: &SymbolString, f: &FactoredTransducer) -> DPMatrix {
    let mut alpha = DPMatrix::new(x.len() + 1, y.len() + 1);
    alpha.set(0, 0, 0.0);
    for t in 0..=x.len() {
        for v in 0..=y.len() {
            let here = alpha.log(t, v);
            if here == LOG_ZERO {
                continue;
            }
            for k in KINDS {
                if let Some((lf, _)) = move_factor(f, x, y, t, v, k) {
                    let (nt, nv) = successor(t, v, k);
                    alpha.set(nt, nv, log_add(alpha.log(nt, nv), here + lf));
                }
            }
        }
    }
    alpha
}

fn backward_unchecked(x: &SymbolString, y: &SymbolString, f: &FactoredTransducer) -> DPMatrix {
    let mut beta = DPMatrix::new(x.len() + 1, y.len() + 1);
    for t in (0..=x.len()).rev() {
        for v in (0..=y.len()).rev() {
            if t == x.len() && v == y.len() {
                beta.set(t, v, 0.0);
                continue;
            }
            let mut acc = LOG_ZERO;
            for k in KINDS {
                if let Some((lf, _)) = move_factor(f, x, y, t, v, k) {
                    let (nt, nv) = successor(t, v, k);
                    acc = log_add(acc, lf + beta.log(nt, nv));
                }
            }
            beta.set(t, v, acc);
        }
    }
    beta
}

/// `α[t][v] = p(x^t, y^v, <t, v> | θ, T, V)`, in natural logs.
pub fn forward_evaluate_strings(x: &SymbolString, y: &SymbolString, f: &FactoredTransducer) -> Result<DPMatrix> {
    f.check_pair(x, y)?;
    Ok(forward_unchecked(x, y, f))
}

/// `β[t][v]`: probability of the remaining suffixes from `<t, v>`.
pub fn backward_evaluate_strings(x: &SymbolString, y: &SymbolString, f: &FactoredTransducer) -> Result<DPMatrix> {
    f.check_pair(x, y)?;
    Ok(backward_unchecked(x, y, f))
}

/// `p(x, y | θ, |x|, |y|)`.
pub fn conditional_probability(x: &SymbolString, y: &SymbolString, f: &FactoredTransducer) -> Result<f64> {
    Ok(forward_evaluate_strings(x, y, f)?.last().exp())
}

/// `p(x, y | θ, T, V) · p(T, V)`.
pub fn joint_with_length_prior(
    x: &SymbolString,
    y: &SymbolString,
    f: &FactoredTransducer,
    prior: &LengthPrior,
) -> Result<f64> {
    let p = prior.prob(x.len(), y.len());
    if p == 0.0 {
        f.check_pair(x, y)?;
        return Ok(0.0);
    }
    Ok(conditional_probability(x, y, f)? * p)
}

/// `(Viterbi, stochastic)` length-conditioned distances in bits.
pub fn conditional_distances(x: &SymbolString, y: &SymbolString, f: &FactoredTransducer) -> Result<(f64, f64)> {
    f.check_pair(x, y)?;
    let mut best = DPMatrix::new(x.len() + 1, y.len() + 1);
    best.set(0, 0, 0.0);
    for t in 0..=x.len() {
        for v in 0..=y.len() {
            let here = best.log(t, v);
            if here == LOG_ZERO {
                continue;
            }
            for k in KINDS {
                if let Some((lf, _)) = move_factor(f, x, y, t, v, k) {
                    let (nt, nv) = successor(t, v, k);
                    best.set(nt, nv, best.log(nt, nv).max(here + lf));
                }
            }
        }
    }
    let stochastic = nats_to_bits(forward_unchecked(x, y, f).last());
    Ok((nats_to_bits(best.last()), stochastic))
}

/// Expected transition counts `χ` (free moves only) and observation counts
/// `γ` (every move).
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredAccumulator {
    /// Indexed deletion, insertion, substitution.
    pub chi: [f64; 3],
    pub gamma_d: Vec<f64>,
    pub gamma_i: Vec<f64>,
    pub gamma_s: Vec<f64>,
    pub processed: usize,
    pub skipped: usize,
}

impl FactoredAccumulator {
    pub fn new(f: &FactoredTransducer) -> Self {
        let (na, nb) = (f.source().len(), f.target().len());
        FactoredAccumulator {
            chi: [0.0; 3],
            gamma_d: vec![0.0; na],
            gamma_i: vec![0.0; nb],
            gamma_s: vec![0.0; na * nb],
            processed: 0,
            skipped: 0,
        }
    }

    pub fn merge(&mut self, other: &FactoredAccumulator) {
        for (a, b) in self.chi.iter_mut().zip(&other.chi) {
            *a += b;
        }
        for (mine, theirs) in [
            (&mut self.gamma_d, &other.gamma_d),
            (&mut self.gamma_i, &other.gamma_i),
            (&mut self.gamma_s, &other.gamma_s),
        ] {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
        self.processed += other.processed;
        self.skipped += other.skipped;
    }

    fn matches(&self, f: &FactoredTransducer) -> bool {
        self.gamma_d.len() == f.source().len()
            && self.gamma_i.len() == f.target().len()
            && self.gamma_s.len() == f.log_s.len()
    }
}

fn expectation_unchecked(
    x: &SymbolString,
    y: &SymbolString,
    f: &FactoredTransducer,
    acc: &mut FactoredAccumulator,
) -> Option<f64> {
    let alpha = forward_unchecked(x, y, f);
    let z = alpha.last();
    if z == LOG_ZERO {
        acc.skipped += 1;
        return None;
    }
    let beta = backward_unchecked(x, y, f);
    let nb = f.target().len();
    for t in 0..=x.len() {
        for v in 0..=y.len() {
            let here = alpha.log(t, v);
            if here == LOG_ZERO {
                continue;
            }
            for k in KINDS {
                let Some((lf, free)) = move_factor(f, x, y, t, v, k) else {
                    continue;
                };
                let (nt, nv) = successor(t, v, k);
                let post = (here + lf + beta.log(nt, nv) - z).exp();
                if post == 0.0 {
                    continue;
                }
                if free {
                    acc.chi[kind_slot(k)] += post;
                }
                match k {
                    EditKind::Deletion => acc.gamma_d[x[t].index()] += post,
                    EditKind::Insertion => acc.gamma_i[y[v].index()] += post,
                    EditKind::Substitution => acc.gamma_s[x[t].index() * nb + y[v].index()] += post,
                }
            }
        }
    }
    acc.processed += 1;
    Some(z)
}

/// Adds posterior expected counts for one pair. Returns the log conditional
/// probability, or `None` (with a skip tallied) when it is zero.
pub fn expectation_step_strings(
    x: &SymbolString,
    y: &SymbolString,
    f: &FactoredTransducer,
    acc: &mut FactoredAccumulator,
) -> Result<Option<f64>> {
    f.check_pair(x, y)?;
    if !acc.matches(f) {
        return Err(Error::Config("accumulator was built for different alphabets".into()));
    }
    Ok(expectation_unchecked(x, y, f, acc))
}

fn renormalized(counts: &[f64], old: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        counts.iter().map(|c| c / total).collect()
    } else {
        old.to_vec()
    }
}

/// Renormalizes `ω` and each observation distribution independently. A
/// distribution without counts keeps its old values.
pub fn maximization_step_strings(f: &FactoredTransducer, acc: &FactoredAccumulator) -> Result<FactoredTransducer> {
    if !acc.matches(f) {
        return Err(Error::Config("accumulator was built for different alphabets".into()));
    }
    let total: f64 = acc.chi.iter().sum::<f64>()
        + acc.gamma_d.iter().sum::<f64>()
        + acc.gamma_i.iter().sum::<f64>()
        + acc.gamma_s.iter().sum::<f64>();
    if !(total > 0.0) {
        return Err(Error::Training("factored accumulator is empty".into()));
    }
    let w = renormalized(&acc.chi, &f.log_omega.map(f64::exp));
    Ok(FactoredTransducer::build(
        f.space.clone(),
        [w[0], w[1], w[2]],
        &renormalized(&acc.gamma_d, &exps(&f.log_d)),
        &renormalized(&acc.gamma_i, &exps(&f.log_i)),
        &renormalized(&acc.gamma_s, &exps(&f.log_s)),
    ))
}

/// Options for [`train_strings`].
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredTrainOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for FactoredTrainOptions {
    fn default() -> Self {
        FactoredTrainOptions {
            max_iterations: 10,
            tolerance: 1e-6,
        }
    }
}

/// Result of [`train_strings`].
#[derive(Debug, Clone)]
pub struct FactoredOutcome {
    pub model: FactoredTransducer,
    /// `Σ_i ln p(x_i, y_i | θ, T_i, V_i)` for the initial model and after
    /// each iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub skipped: usize,
}

fn expectation_pass(f: &FactoredTransducer, corpus: &PairCorpus) -> (FactoredAccumulator, f64) {
    let seed = FactoredAccumulator::new(f);
    let parts: Vec<(FactoredAccumulator, f64)> = corpus
        .pairs()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = seed.clone();
            let mut ll = 0.0;
            for (x, y) in chunk {
                if let Some(l) = expectation_unchecked(x, y, f, &mut acc) {
                    ll += l;
                }
            }
            (acc, ll)
        })
        .collect();
    let mut acc = seed;
    let mut ll = 0.0;
    for (part, l) in &parts {
        acc.merge(part);
        ll += l;
    }
    (acc, ll)
}

/// EM for the factored model on the length-conditioned likelihood.
pub fn train_strings(
    init: &FactoredTransducer,
    corpus: &PairCorpus,
    opts: &FactoredTrainOptions,
) -> Result<FactoredOutcome> {
    if !(opts.tolerance >= 0.0) {
        return Err(Error::Config("convergence tolerance must be nonnegative".into()));
    }
    if corpus.space() != init.space() {
        return Err(Error::Config("corpus and model alphabets differ".into()));
    }
    let mut model = init.clone();
    let mut trace: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut skipped;
    loop {
        let (acc, ll) = expectation_pass(&model, corpus);
        skipped = acc.skipped;
        if acc.processed == 0 {
            return Err(Error::Training(
                "every training pair has zero probability under the model".into(),
            ));
        }
        if let Some(&prev) = trace.last() {
            if relative_change(prev, ll) < opts.tolerance {
                converged = true;
            }
        }
        trace.push(ll);
        if converged || iterations == opts.max_iterations {
            break;
        }
        model = maximization_step_strings(&model, &acc)?;
        iterations += 1;
    }
    Ok(FactoredOutcome {
        model,
        trace,
        iterations,
        converged,
        skipped,
    })
}
