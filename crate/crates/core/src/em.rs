//! Expectation-maximization for transducer parameters on a corpus of
//! string pairs.

use rayon::prelude::*;

use crate::alphabet::SymbolString;
use crate::distance::viterbi_unchecked;
use crate::edit::{EditOp, EditSpace};
use crate::error::{Error, Result};
use crate::lattice::{backward_unchecked, forward_unchecked, DPMatrix};
use crate::logspace::LOG_ZERO;
use crate::transducer::Transducer;
use crate::tying::{apply_tying, TyingScheme};

/// Pairs per parallel work unit. Fixed so that reductions happen in the
/// same order regardless of thread count.
pub(crate) const CHUNK: usize = 64;

/// A corpus of `(x, y)` training pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorpus {
    space: EditSpace,
    pairs: Vec<(SymbolString, SymbolString)>,
}

impl PairCorpus {
    pub fn new(space: EditSpace, pairs: Vec<(SymbolString, SymbolString)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Training("pair corpus is empty".into()));
        }
        for (x, y) in &pairs {
            space.check_pair(x, y)?;
        }
        Ok(PairCorpus { space, pairs })
    }

    pub fn space(&self) -> &EditSpace {
        &self.space
    }

    pub fn pairs(&self) -> &[(SymbolString, SymbolString)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Expected edit counts `γ` over `E ∪ {#}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EditAccumulator {
    space: EditSpace,
    gamma: Vec<f64>,
    /// Pairs that contributed counts.
    pub processed: usize,
    /// Pairs skipped because they had zero probability.
    pub skipped: usize,
}

impl EditAccumulator {
    pub fn new(space: EditSpace) -> Self {
        Self::with_smoothing(space, 0.0)
    }

    /// Seeds every edit (not termination) with `smoothing`.
    pub fn with_smoothing(space: EditSpace, smoothing: f64) -> Self {
        let mut gamma = vec![smoothing; space.len()];
        gamma[space.end_index()] = 0.0;
        EditAccumulator {
            space,
            gamma,
            processed: 0,
            skipped: 0,
        }
    }

    pub fn space(&self) -> &EditSpace {
        &self.space
    }

    pub fn count(&self, op: EditOp) -> f64 {
        self.gamma[self.space.index(op)]
    }

    /// Counts in [`EditSpace`] order.
    pub fn counts(&self) -> &[f64] {
        &self.gamma
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }

    /// Adds another accumulator's counts; expectations are additive.
    pub fn merge(&mut self, other: &EditAccumulator) {
        for (g, o) in self.gamma.iter_mut().zip(&other.gamma) {
            *g += o;
        }
        self.processed += other.processed;
        self.skipped += other.skipped;
    }

    pub(crate) fn zeroed(&self) -> Self {
        EditAccumulator {
            space: self.space.clone(),
            gamma: vec![0.0; self.gamma.len()],
            processed: 0,
            skipped: 0,
        }
    }
}

/// How hidden edit sequences are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpectationMode {
    /// Posterior expectations over every edit sequence.
    #[default]
    Full,
    /// Counts of the single most likely edit sequence.
    Viterbi,
}

/// Options for [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub max_iterations: usize,
    /// Stop once the relative change in corpus log-likelihood drops below this.
    pub tolerance: f64,
    /// Constant added to every edit count before each expectation pass.
    pub smoothing: f64,
    pub mode: ExpectationMode,
    /// Tying applied after every maximization step.
    pub tying: Option<TyingScheme>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            max_iterations: 10,
            tolerance: 1e-6,
            smoothing: 0.0,
            mode: ExpectationMode::Full,
            tying: None,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 0.0) {
            return Err(Error::Config("convergence tolerance must be nonnegative".into()));
        }
        if !(self.smoothing >= 0.0) {
            return Err(Error::Config("smoothing must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Result of [`train`].
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub transducer: Transducer,
    /// Corpus log-likelihood (natural log) of the initial model and of the
    /// model after each completed iteration. In Viterbi mode the
    /// likelihood of each pair is that of its best edit sequence.
    pub trace: Vec<f64>,
    /// Maximization steps performed.
    pub iterations: usize,
    pub converged: bool,
    /// Zero-probability pairs skipped in the last expectation pass.
    pub skipped: usize,
}

pub(crate) fn accumulate_posteriors(
    x: &SymbolString,
    y: &SymbolString,
    phi: &Transducer,
    alpha: &DPMatrix,
    beta: &DPMatrix,
    acc: &mut EditAccumulator,
    lambda: f64,
) {
    let space = phi.space();
    let delta = phi.log_probs();
    let log_z = alpha.last();
    acc.gamma[space.end_index()] += lambda;
    for t in 0..=x.len() {
        for v in 0..=y.len() {
            let b = beta.log(t, v);
            if b == LOG_ZERO {
                continue;
            }
            if t > 0 {
                let i = space.del_index(x[t - 1]);
                acc.gamma[i] += lambda * (alpha.log(t - 1, v) + delta[i] + b - log_z).exp();
            }
            if v > 0 {
                let i = space.ins_index(y[v - 1]);
                acc.gamma[i] += lambda * (alpha.log(t, v - 1) + delta[i] + b - log_z).exp();
            }
            if t > 0 && v > 0 {
                let i = space.sub_index(x[t - 1], y[v - 1]);
                acc.gamma[i] += lambda * (alpha.log(t - 1, v - 1) + delta[i] + b - log_z).exp();
            }
        }
    }
}

/// Adds `λ`-weighted posterior edit counts for one pair. Returns the pair's
/// log-probability, or `None` (and tallies a skip) when it is zero.
pub fn expectation_step(
    x: &SymbolString,
    y: &SymbolString,
    t: &Transducer,
    acc: &mut EditAccumulator,
    lambda: f64,
) -> Result<Option<f64>> {
    check_accumulator(t, acc)?;
    t.space().check_pair(x, y)?;
    Ok(expectation_unchecked(x, y, t, acc, lambda))
}

pub(crate) fn expectation_unchecked(
    x: &SymbolString,
    y: &SymbolString,
    t: &Transducer,
    acc: &mut EditAccumulator,
    lambda: f64,
) -> Option<f64> {
    let alpha = forward_unchecked(x, y, t);
    let log_z = alpha.last();
    if log_z == LOG_ZERO {
        acc.skipped += 1;
        return None;
    }
    let beta = backward_unchecked(x, y, t);
    accumulate_posteriors(x, y, t, &alpha, &beta, acc, lambda);
    acc.processed += 1;
    Some(log_z)
}

/// Adds `λ` times the edit counts of the single most likely edit sequence.
/// Returns that sequence's log-probability.
pub fn viterbi_expectation_step(
    x: &SymbolString,
    y: &SymbolString,
    t: &Transducer,
    acc: &mut EditAccumulator,
    lambda: f64,
) -> Result<Option<f64>> {
    check_accumulator(t, acc)?;
    t.space().check_pair(x, y)?;
    Ok(viterbi_expectation_unchecked(x, y, t, acc, lambda))
}

pub(crate) fn viterbi_expectation_unchecked(
    x: &SymbolString,
    y: &SymbolString,
    t: &Transducer,
    acc: &mut EditAccumulator,
    lambda: f64,
) -> Option<f64> {
    let path = viterbi_unchecked(x, y, t);
    match path.alignment {
        None => {
            acc.skipped += 1;
            None
        }
        Some(al) => {
            for op in al.ops {
                acc.gamma[t.space().index(op)] += lambda;
            }
            acc.processed += 1;
            Some(-path.bits * std::f64::consts::LN_2)
        }
    }
}

fn check_accumulator(t: &Transducer, acc: &EditAccumulator) -> Result<()> {
    if t.space() != acc.space() {
        return Err(Error::Config("accumulator was built for different alphabets".into()));
    }
    Ok(())
}

/// `δ(z) := γ(z) / N` with `N` the total count, termination included.
pub fn maximization_step(t: &Transducer, acc: &EditAccumulator) -> Result<Transducer> {
    check_accumulator(t, acc)?;
    Transducer::from_counts(t.space(), acc.counts())
}

/// One expectation pass over a corpus; returns counts and log-likelihood.
pub(crate) fn expectation_pass(
    t: &Transducer,
    corpus: &PairCorpus,
    opts: &TrainOptions,
) -> (EditAccumulator, f64) {
    let seed = EditAccumulator::with_smoothing(t.space().clone(), opts.smoothing);
    let parts: Vec<(EditAccumulator, f64)> = corpus
        .pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = seed.zeroed();
            let mut ll = 0.0;
            for (x, y) in chunk {
                let r = match opts.mode {
                    ExpectationMode::Full => expectation_unchecked(x, y, t, &mut acc, 1.0),
                    ExpectationMode::Viterbi => viterbi_expectation_unchecked(x, y, t, &mut acc, 1.0),
                };
                if let Some(l) = r {
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

pub(crate) fn relative_change(prev: f64, cur: f64) -> f64 {
    let delta = (cur - prev).abs();
    if prev == 0.0 {
        delta
    } else {
        delta / prev.abs()
    }
}

/// Runs EM from `init` until the relative log-likelihood change falls below
/// `opts.tolerance` or `opts.max_iterations` maximization steps are done.
pub fn train(init: &Transducer, corpus: &PairCorpus, opts: &TrainOptions) -> Result<TrainOutcome> {
    opts.validate()?;
    init.require_pair_model()?;
    if init.space() != corpus.space() {
        return Err(Error::Config("corpus and transducer alphabets differ".into()));
    }
    let mut model = init.clone();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut skipped;
    loop {
        let (acc, ll) = expectation_pass(&model, corpus, opts);
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
        model = maximization_step(&model, &acc)?;
        if let Some(scheme) = &opts.tying {
            model = apply_tying(&model, scheme)?;
        }
        iterations += 1;
    }
    Ok(TrainOutcome {
        transducer: model,
        trace,
        iterations,
        converged,
        skipped,
    })
}

/// Corpus log-likelihood under `t` (natural log); zero-probability pairs
/// contribute `-inf`.
pub fn corpus_log_likelihood(t: &Transducer, corpus: &PairCorpus) -> f64 {
    corpus
        .pairs
        .par_iter()
        .map(|(x, y)| forward_unchecked(x, y, t).last())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}
