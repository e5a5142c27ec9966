use rayon::prelude::*;

use crate::alphabet::SymbolString;
use crate::em::{
    accumulate_posteriors, maximization_step, train, EditAccumulator, PairCorpus, TrainOptions,
    TrainOutcome, CHUNK,
};
use crate::error::{Error, Result};
use crate::lattice::{backward_unchecked, forward_unchecked};
use crate::logspace::{log_sum_exp, LOG_ZERO};
use crate::transducer::Transducer;
use crate::tying::{apply_tying, TyingScheme};

use super::lexicon::Lexicon;
use super::model::{Channel, ClassifierModel, LabeledCorpus};

/// Default pseudo-count seeded into every lexicon entry.
pub const LEXICON_SMOOTHING: f64 = 0.1;

/// Expected counts for both the transducer and the lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierAccumulator {
    pub edits: EditAccumulator,
    /// `γ(w, x)` in lexicon entry order.
    pub entries: Vec<f64>,
    pub processed: usize,
    pub skipped: usize,
}

impl ClassifierAccumulator {
    pub fn new(m: &ClassifierModel, lexicon_smoothing: f64, edit_smoothing: f64) -> Self {
        ClassifierAccumulator {
            edits: EditAccumulator::with_smoothing(m.channel().space().clone(), edit_smoothing),
            entries: vec![lexicon_smoothing; m.lexicon().len()],
            processed: 0,
            skipped: 0,
        }
    }

    fn zeroed(&self) -> Self {
        ClassifierAccumulator {
            edits: self.edits.zeroed(),
            entries: vec![0.0; self.entries.len()],
            processed: 0,
            skipped: 0,
        }
    }

    pub fn merge(&mut self, other: &ClassifierAccumulator) {
        self.edits.merge(&other.edits);
        for (g, o) in self.entries.iter_mut().zip(&other.entries) {
            *g += o;
        }
        self.processed += other.processed;
        self.skipped += other.skipped;
    }
}

fn single(m: &ClassifierModel) -> Result<&Transducer> {
    m.transducer()
        .ok_or_else(|| Error::Config("training needs a single-transducer classifier".into()))
}

fn class_id(m: &ClassifierModel, w: &str) -> Result<usize> {
    m.lexicon()
        .class_id(w)
        .ok_or_else(|| Error::Input(format!("class {w:?} has no lexicon entries")))
}

/// Adds the posterior `p(x | w, y)` of every prototype of `w` to the lexicon
/// counts, and the matching `λ`-weighted edit counts. Returns
/// `ln p(w, y | φ, L)`, or `None` (with a skip tallied) when it is zero.
pub fn mixture_expectation_step(
    w: &str,
    y: &SymbolString,
    m: &ClassifierModel,
    acc: &mut ClassifierAccumulator,
) -> Result<Option<f64>> {
    let t = single(m)?;
    if acc.entries.len() != m.lexicon().len() || acc.edits.space() != t.space() {
        return Err(Error::Config("accumulator does not match the model".into()));
    }
    if !t.target().contains_all(y) {
        return Err(Error::Input("observation uses a symbol outside the surface alphabet".into()));
    }
    let c = class_id(m, w)?;
    Ok(expectation_unchecked(c, y, t, m.lexicon(), acc))
}

fn expectation_unchecked(
    class: usize,
    y: &SymbolString,
    t: &Transducer,
    lex: &Lexicon,
    acc: &mut ClassifierAccumulator,
) -> Option<f64> {
    let ids = lex.class_entries(class);
    let mut lattices = Vec::with_capacity(ids.len());
    let mut alpha = Vec::with_capacity(ids.len());
    for &i in ids {
        let prior = lex.log_class_given_form(i);
        if prior == LOG_ZERO {
            lattices.push(None);
            alpha.push(LOG_ZERO);
            continue;
        }
        let fwd = forward_unchecked(&lex.entries()[i].form, y, t);
        alpha.push(prior + fwd.last());
        lattices.push(Some(fwd));
    }
    let z = log_sum_exp(&alpha);
    if z == LOG_ZERO {
        acc.skipped += 1;
        return None;
    }
    for ((&i, a), fwd) in ids.iter().zip(&alpha).zip(&lattices) {
        let post = (a - z).exp();
        if post <= 0.0 {
            continue;
        }
        acc.entries[i] += post;
        let x = &lex.entries()[i].form;
        let fwd = fwd.as_ref().expect("nonzero posterior has a lattice");
        let bwd = backward_unchecked(x, y, t);
        accumulate_posteriors(x, y, t, fwd, &bwd, &mut acc.edits, post);
    }
    acc.processed += 1;
    Some(z)
}

/// Reestimates the lexicon as `γ(w, x) / N` and the transducer from its
/// counts. A switched-off word model `p(w | L)` or entry model `p(x | w, L)`
/// is restored from `m` after reestimation.
pub fn mixture_maximization_step(
    m: &ClassifierModel,
    acc: &ClassifierAccumulator,
    tying: Option<&TyingScheme>,
) -> Result<ClassifierModel> {
    let t = single(m)?;
    let lex = m.lexicon();
    if acc.entries.len() != lex.len() {
        return Err(Error::Config("accumulator does not match the lexicon".into()));
    }
    let n: f64 = acc.entries.iter().sum();
    if !(n > 0.0) {
        return Err(Error::Training("lexicon counts sum to zero".into()));
    }
    let fresh: Vec<f64> = acc.entries.iter().map(|g| g / n).collect();
    let classes = lex.classes().len();
    let fresh_word: Vec<f64> = (0..classes)
        .map(|c| lex.class_entries(c).iter().map(|&i| fresh[i]).sum())
        .collect();
    let probs: Vec<f64> = (0..lex.len())
        .map(|i| {
            let c = lex.entry_class(i);
            let word = if m.adapt_word {
                fresh_word[c]
            } else {
                lex.word_marginal(c)
            };
            // an unseen class keeps its old conditional
            let cond = if m.adapt_entry && fresh_word[c] > 0.0 {
                fresh[i] / fresh_word[c]
            } else {
                lex.entry_conditional(i)
            };
            word * cond
        })
        .collect();
    // restoration can leave mass on classes whose fresh total vanished
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Training("reestimated lexicon has no mass".into()));
    }
    let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();

    let mut phi = maximization_step(t, &acc.edits)?;
    if let Some(scheme) = tying {
        phi = apply_tying(&phi, scheme)?;
    }
    let mut next = m.clone();
    let (channel, lexicon) = next.parts_mut();
    *channel = Channel::Single(phi);
    lexicon.set_probs(&probs);
    Ok(next)
}

/// Options for [`train_classifier`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierTrainOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub lexicon_smoothing: f64,
    pub edit_smoothing: f64,
    pub tying: Option<TyingScheme>,
}

impl Default for ClassifierTrainOptions {
    fn default() -> Self {
        ClassifierTrainOptions {
            max_iterations: 10,
            tolerance: 1e-6,
            lexicon_smoothing: LEXICON_SMOOTHING,
            edit_smoothing: 0.0,
            tying: None,
        }
    }
}

/// Result of [`train_classifier`].
#[derive(Debug, Clone)]
pub struct ClassifierOutcome {
    pub model: ClassifierModel,
    /// `Σ_i ln p(w_i, y_i | φ, L)` for the initial model and after each
    /// iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub skipped: usize,
}

fn expectation_pass(
    m: &ClassifierModel,
    samples: &[(usize, SymbolString)],
    opts: &ClassifierTrainOptions,
) -> Result<(ClassifierAccumulator, f64)> {
    let t = single(m)?;
    let seed = ClassifierAccumulator::new(m, opts.lexicon_smoothing, opts.edit_smoothing);
    let parts: Vec<(ClassifierAccumulator, f64)> = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = seed.zeroed();
            let mut ll = 0.0;
            for (c, y) in chunk {
                if let Some(l) = expectation_unchecked(*c, y, t, m.lexicon(), &mut acc) {
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
    Ok((acc, ll))
}

/// Mixture EM on the joint likelihood of labeled observations.
pub fn train_classifier(
    m: &ClassifierModel,
    c: &LabeledCorpus,
    opts: &ClassifierTrainOptions,
) -> Result<ClassifierOutcome> {
    let t = single(m)?;
    if !(opts.tolerance >= 0.0) || !(opts.lexicon_smoothing >= 0.0) || !(opts.edit_smoothing >= 0.0) {
        return Err(Error::Config("tolerance and smoothing must be nonnegative".into()));
    }
    if c.is_empty() {
        return Err(Error::Training("training corpus is empty".into()));
    }
    if c.alphabet() != t.target() {
        return Err(Error::Config("corpus alphabet differs from the surface alphabet".into()));
    }
    let samples: Vec<(usize, SymbolString)> = c
        .samples()
        .iter()
        .map(|(w, y)| Ok((class_id(m, w)?, y.clone())))
        .collect::<Result<_>>()?;

    let mut model = m.clone();
    let mut trace: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut skipped;
    loop {
        let (acc, ll) = expectation_pass(&model, &samples, opts)?;
        skipped = acc.skipped;
        if acc.processed == 0 {
            return Err(Error::Training(
                "every training sample has zero probability under the model".into(),
            ));
        }
        if let Some(&prev) = trace.last() {
            if crate::em::relative_change(prev, ll) < opts.tolerance {
                converged = true;
            }
        }
        trace.push(ll);
        if converged || iterations == opts.max_iterations {
            break;
        }
        model = mixture_maximization_step(&model, &acc, opts.tying.as_ref())?;
        iterations += 1;
    }
    Ok(ClassifierOutcome {
        model,
        trace,
        iterations,
        converged,
        skipped,
    })
}

/// Adds `<w, x>` at probability `p_new`; the transducer is untouched.
pub fn add_word(m: &ClassifierModel, w: &str, x: SymbolString, p_new: f64) -> Result<ClassifierModel> {
    let mut next = m.clone();
    next.parts_mut().1.add_word(w, x, p_new)?;
    Ok(next)
}

/// Baseline training: every prototype of `w_i` is paired with `y_i` and the
/// pairs are fed to plain EM. Samples whose class is not in `lexicon` are
/// ignored.
pub fn adhoc_train(
    t: &Transducer,
    c: &LabeledCorpus,
    lexicon: &Lexicon,
    opts: &TrainOptions,
) -> Result<TrainOutcome> {
    if lexicon.alphabet() != t.source() {
        return Err(Error::Config("lexicon alphabet differs from the transducer's".into()));
    }
    let mut pairs = Vec::new();
    for (w, y) in c.samples() {
        if let Some(cid) = lexicon.class_id(w) {
            for &i in lexicon.class_entries(cid) {
                pairs.push((lexicon.entries()[i].form.clone(), y.clone()));
            }
        }
    }
    let corpus = PairCorpus::new(t.space().clone(), pairs)?;
    train(t, &corpus, opts)
}
