use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::alphabet::{Alphabet, SymbolString};
use crate::distance::viterbi_unchecked;
use crate::edit::EditSpace;
use crate::error::{Error, Result};
use crate::lattice::forward_unchecked;
use crate::logspace::{log_sum_exp, LOG_ZERO};
use crate::mixture::{uniform_mixture, MixtureTransducer};
use crate::transducer::Transducer;

use super::lexicon::{Lexicon, LexiconEntry};

/// Default relative tolerance, in the log domain, for tied decisions.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Labeled observations `(w, y)` over the surface alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    alphabet: Alphabet,
    samples: Vec<(String, SymbolString)>,
}

impl LabeledCorpus {
    pub fn new(alphabet: Alphabet, samples: Vec<(String, SymbolString)>) -> Result<Self> {
        for (w, y) in &samples {
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(Error::Input(format!("invalid class label {w:?}")));
            }
            if !alphabet.contains_all(y) {
                return Err(Error::Input(format!("observation for {w:?} uses an unknown symbol")));
            }
        }
        Ok(LabeledCorpus { alphabet, samples })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn samples(&self) -> &[(String, SymbolString)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Both corpora back to back; alphabets must match.
    pub fn concat(&self, other: &LabeledCorpus) -> Result<LabeledCorpus> {
        if self.alphabet != other.alphabet {
            return Err(Error::Config("cannot join corpora over different alphabets".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend(other.samples.iter().cloned());
        Ok(LabeledCorpus {
            alphabet: self.alphabet.clone(),
            samples,
        })
    }
}

/// A lexicon whose entries are the distinct `(w, y)` pairs of a corpus,
/// weighted by frequency plus `smoothing`. Observations are re-read over the
/// lexicon alphabet `a` token by token.
pub fn build_lexicon_from_corpus(c: &LabeledCorpus, a: &Alphabet, smoothing: f64) -> Result<Lexicon> {
    if c.is_empty() {
        return Err(Error::Input("cannot build a lexicon from an empty corpus".into()));
    }
    if !(smoothing >= 0.0) {
        return Err(Error::Config("smoothing must be nonnegative".into()));
    }
    let mut order = Vec::new();
    let mut counts: HashMap<(String, SymbolString), f64> = HashMap::new();
    for (w, y) in &c.samples {
        let x = a.translate(&c.alphabet, y)?;
        let key = (w.clone(), x);
        let n = counts.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            smoothing
        });
        *n += 1.0;
    }
    let total: f64 = counts.values().sum();
    let entries = order
        .into_iter()
        .map(|key| {
            let p = counts[&key] / total;
            (key.0, key.1, p)
        })
        .collect();
    Lexicon::new(a.clone(), entries)
}

/// How `p(x, y)` is computed when scoring a prototype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scoring {
    /// Sum over all edit sequences.
    #[default]
    Stochastic,
    /// Probability of the single best edit sequence.
    Viterbi,
}

impl fmt::Display for Scoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scoring::Stochastic => "stochastic",
            Scoring::Viterbi => "viterbi",
        })
    }
}

impl FromStr for Scoring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stochastic" => Ok(Scoring::Stochastic),
            "viterbi" => Ok(Scoring::Viterbi),
            _ => Err(Error::Config(format!("unknown scoring {s:?} (expected stochastic or viterbi)"))),
        }
    }
}

/// The string channel of a classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Single(Transducer),
    Mixture(MixtureTransducer),
}

impl Channel {
    pub fn space(&self) -> &EditSpace {
        match self {
            Channel::Single(t) => t.space(),
            Channel::Mixture(m) => m.space(),
        }
    }

    pub(crate) fn log_pair(&self, x: &SymbolString, y: &SymbolString, scoring: Scoring) -> f64 {
        match (self, scoring) {
            (Channel::Single(t), Scoring::Stochastic) => forward_unchecked(x, y, t).last(),
            (Channel::Single(t), Scoring::Viterbi) => {
                -viterbi_unchecked(x, y, t).bits * std::f64::consts::LN_2
            }
            (Channel::Mixture(m), Scoring::Stochastic) => m.log_probability_unchecked(x, y),
            (Channel::Mixture(m), Scoring::Viterbi) => m.log_viterbi_unchecked(x, y),
        }
    }
}

/// Transducer, lexicon, and the credit-assignment switches used in training.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    channel: Channel,
    lexicon: Lexicon,
    /// Reestimate `p(w | L)` during training.
    pub adapt_word: bool,
    /// Reestimate `p(x | w, L)` during training.
    pub adapt_entry: bool,
    pub scoring: Scoring,
}

impl ClassifierModel {
    /// Both switches on, stochastic scoring.
    pub fn new(transducer: Transducer, lexicon: Lexicon) -> Result<Self> {
        Self::with_channel(Channel::Single(transducer), lexicon)
    }

    pub fn with_channel(channel: Channel, lexicon: Lexicon) -> Result<Self> {
        if channel.space().source() != lexicon.alphabet() {
            return Err(Error::Config(
                "lexicon alphabet differs from the transducer's underlying alphabet".into(),
            ));
        }
        if let Channel::Single(t) = &channel {
            t.require_pair_model()?;
        }
        Ok(ClassifierModel {
            channel,
            lexicon,
            adapt_word: true,
            adapt_entry: true,
            scoring: Scoring::Stochastic,
        })
    }

    /// The uniform mixture of two classifiers' transducers, paired with the
    /// entrywise mean of their lexicons. Lexicons must list the same entries
    /// in the same order; switches and scoring come from `first`.
    pub fn mixed(first: &ClassifierModel, second: &ClassifierModel) -> Result<Self> {
        let (Channel::Single(t1), Channel::Single(t2)) = (&first.channel, &second.channel) else {
            return Err(Error::Config("only single-transducer classifiers can be mixed".into()));
        };
        let (l1, l2) = (&first.lexicon, &second.lexicon);
        if l1.len() != l2.len()
            || l1
                .entries()
                .iter()
                .zip(l2.entries())
                .any(|(a, b)| a.class != b.class || a.form != b.form)
        {
            return Err(Error::Config("mixed classifiers need identical lexicon entries".into()));
        }
        let entries = l1
            .entries()
            .iter()
            .zip(l2.entries())
            .map(|(a, b)| LexiconEntry {
                log_prob: log_sum_exp(&[a.log_prob, b.log_prob]) - std::f64::consts::LN_2,
                ..a.clone()
            })
            .collect();
        let lexicon = Lexicon::from_entries(l1.alphabet().clone(), entries)?;
        let channel = Channel::Mixture(uniform_mixture(vec![t1.clone(), t2.clone()])?);
        let mut m = Self::with_channel(channel, lexicon)?;
        m.adapt_word = first.adapt_word;
        m.adapt_entry = first.adapt_entry;
        m.scoring = first.scoring;
        Ok(m)
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    /// The single transducer, if the channel is not a mixture.
    pub fn transducer(&self) -> Option<&Transducer> {
        match &self.channel {
            Channel::Single(t) => Some(t),
            Channel::Mixture(_) => None,
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Channel, &mut Lexicon) {
        (&mut self.channel, &mut self.lexicon)
    }

    pub fn with_scoring(mut self, scoring: Scoring) -> Self {
        self.scoring = scoring;
        self
    }

    pub fn with_switches(mut self, adapt_word: bool, adapt_entry: bool) -> Self {
        self.adapt_word = adapt_word;
        self.adapt_entry = adapt_entry;
        self
    }

    fn check_observation(&self, y: &SymbolString) -> Result<()> {
        if !self.channel.space().target().contains_all(y) {
            return Err(Error::Input("observation uses a symbol outside the surface alphabet".into()));
        }
        Ok(())
    }

    /// Per-entry terms `ln p(w | x, L) + ln p(x, y)`, computing each distinct
    /// form once.
    pub(crate) fn entry_log_terms(&self, y: &SymbolString) -> Vec<f64> {
        let lex = &self.lexicon;
        let pair: Vec<f64> = lex
            .forms()
            .iter()
            .map(|x| self.channel.log_pair(x, y, self.scoring))
            .collect();
        (0..lex.len())
            .map(|i| {
                let c = lex.log_class_given_form(i);
                let p = pair[lex.entry_form(i)];
                if c == LOG_ZERO || p == LOG_ZERO {
                    LOG_ZERO
                } else {
                    c + p
                }
            })
            .collect()
    }

    /// `ln p(w, y | φ, L)` for every class, in lexicon class order.
    pub(crate) fn class_log_joints(&self, terms: &[f64]) -> Vec<f64> {
        let lex = &self.lexicon;
        (0..lex.classes().len())
            .map(|c| {
                let t: Vec<f64> = lex.class_entries(c).iter().map(|&i| terms[i]).collect();
                log_sum_exp(&t)
            })
            .collect()
    }
}

/// A set of lexicon entries chosen for an observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// Indices into the lexicon, ascending.
    pub entries: Vec<usize>,
    /// Maximal class posterior (or expected utility, or minimal distance for
    /// nearest-neighbor decisions).
    pub score: f64,
}

impl Decision {
    /// Distinct class labels of the chosen entries.
    pub fn classes<'a>(&self, lexicon: &'a Lexicon) -> Vec<&'a str> {
        let mut out: Vec<&str> = Vec::new();
        for &i in &self.entries {
            let c = lexicon.entries()[i].class.as_str();
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

/// Utilities `μ(u | w)` of deciding `u` when the truth is `w`. Pairs
/// without an override take `matched` when `u == w` and `mismatched`
/// otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFunction {
    matched: f64,
    mismatched: f64,
    overrides: HashMap<(String, String), f64>,
}

impl UtilityFunction {
    pub fn new(matched: f64, mismatched: f64, overrides: HashMap<(String, String), f64>) -> Result<Self> {
        if !matched.is_finite() || !mismatched.is_finite() || overrides.values().any(|v| !v.is_finite()) {
            return Err(Error::Config("utilities must be finite".into()));
        }
        Ok(UtilityFunction {
            matched,
            mismatched,
            overrides,
        })
    }

    /// One for a correct decision, zero otherwise.
    pub fn identity() -> Self {
        UtilityFunction {
            matched: 1.0,
            mismatched: 0.0,
            overrides: HashMap::new(),
        }
    }

    pub fn utility(&self, decided: &str, truth: &str) -> f64 {
        if let Some(&v) = self.overrides.get(&(decided.to_string(), truth.to_string())) {
            return v;
        }
        if decided == truth {
            self.matched
        } else {
            self.mismatched
        }
    }
}

fn near(a: f64, best: f64, tol: f64) -> bool {
    a == best || (a - best).abs() <= tol * best.abs().max(1.0)
}

/// `p(w | y, φ, L)` for every class, in lexicon class order.
pub fn class_posteriors(y: &SymbolString, m: &ClassifierModel) -> Result<Vec<(String, f64)>> {
    m.check_observation(y)?;
    let joints = m.class_log_joints(&m.entry_log_terms(y));
    let z = log_sum_exp(&joints);
    Ok(m.lexicon
        .classes()
        .iter()
        .zip(&joints)
        .map(|(w, &l)| (w.clone(), if z == LOG_ZERO { 0.0 } else { (l - z).exp() }))
        .collect())
}

/// Entries of `class` whose term ties the class's best term.
fn representatives(m: &ClassifierModel, class: usize, terms: &[f64], tol: f64) -> Vec<usize> {
    let ids = m.lexicon.class_entries(class);
    let best = ids.iter().map(|&i| terms[i]).fold(LOG_ZERO, f64::max);
    ids.iter().copied().filter(|&i| near(terms[i], best, tol)).collect()
}

/// The minimum-error decision: every class attaining the maximal posterior
/// (within `tie_tolerance`, relative, in the log domain), each represented
/// by its best-scoring entries. `None` when every class has zero posterior.
pub fn classify(y: &SymbolString, m: &ClassifierModel, tie_tolerance: f64) -> Result<Option<Decision>> {
    m.check_observation(y)?;
    let terms = m.entry_log_terms(y);
    let joints = m.class_log_joints(&terms);
    let best = joints.iter().copied().fold(LOG_ZERO, f64::max);
    if best == LOG_ZERO {
        return Ok(None);
    }
    let z = log_sum_exp(&joints);
    let mut entries: Vec<usize> = joints
        .iter()
        .enumerate()
        .filter(|&(_, &l)| near(l, best, tie_tolerance))
        .flat_map(|(c, _)| representatives(m, c, &terms, tie_tolerance))
        .collect();
    entries.sort_unstable();
    Ok(Some(Decision {
        entries,
        score: (best - z).exp(),
    }))
}

/// The decision maximizing expected utility `Σ_w μ(u | w) p(w | y)` over
/// classes `u` of the lexicon.
pub fn classify_with_utility(
    y: &SymbolString,
    m: &ClassifierModel,
    utility: &UtilityFunction,
    tie_tolerance: f64,
) -> Result<Option<Decision>> {
    m.check_observation(y)?;
    let terms = m.entry_log_terms(y);
    let joints = m.class_log_joints(&terms);
    let z = log_sum_exp(&joints);
    if z == LOG_ZERO {
        return Ok(None);
    }
    let classes = m.lexicon.classes();
    let post: Vec<f64> = joints.iter().map(|&l| (l - z).exp()).collect();
    let eu: Vec<f64> = classes
        .iter()
        .map(|u| classes.iter().zip(&post).map(|(w, p)| utility.utility(u, w) * p).sum())
        .collect();
    let best = eu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut entries: Vec<usize> = eu
        .iter()
        .enumerate()
        .filter(|&(_, &v)| (v - best).abs() <= tie_tolerance * best.abs().max(1.0))
        .flat_map(|(c, _)| representatives(m, c, &terms, tie_tolerance))
        .collect();
    entries.sort_unstable();
    Ok(Some(Decision { entries, score: best }))
}
