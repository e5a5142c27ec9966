use std::collections::HashMap;

use crate::alphabet::{Alphabet, SymbolString};
use crate::error::{Error, Result};
use crate::logspace::{ln, log_sum_exp, LOG_ZERO};
use crate::transducer::NORMALIZATION_TOLERANCE;

/// One labeled prototype `<w, x>` with its probability `p(w, x | L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub class: String,
    pub form: SymbolString,
    pub log_prob: f64,
}

impl LexiconEntry {
    pub fn prob(&self) -> f64 {
        self.log_prob.exp()
    }
}

/// A weighted set of labeled prototypes over the underlying alphabet.
///
/// Entries keep their insertion order; classes are indexed in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    alphabet: Alphabet,
    entries: Vec<LexiconEntry>,
    classes: Vec<String>,
    class_index: HashMap<String, usize>,
    entry_class: Vec<usize>,
    by_class: Vec<Vec<usize>>,
    forms: Vec<SymbolString>,
    entry_form: Vec<usize>,
    by_form: Vec<Vec<usize>>,
}

impl Lexicon {
    /// Entries with probabilities; they must be nonnegative, sum to one, and
    /// contain no duplicate `(class, form)` pair.
    pub fn new(alphabet: Alphabet, entries: Vec<(String, SymbolString, f64)>) -> Result<Self> {
        if entries.iter().any(|e| !(e.2 >= 0.0) || !e.2.is_finite()) {
            return Err(Error::Config("lexicon probabilities must be nonnegative".into()));
        }
        let total: f64 = entries.iter().map(|e| e.2).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Config(format!("lexicon probabilities sum to {total}, not 1")));
        }
        let entries = entries
            .into_iter()
            .map(|(class, form, p)| LexiconEntry {
                class,
                form,
                log_prob: ln(p),
            })
            .collect();
        Self::build(alphabet, entries)
    }

    /// Bit-exact construction from log-probabilities.
    pub fn from_entries(alphabet: Alphabet, entries: Vec<LexiconEntry>) -> Result<Self> {
        if entries.iter().any(|e| e.log_prob.is_nan() || e.log_prob == f64::INFINITY) {
            return Err(Error::Config("lexicon log-probabilities must be finite or -inf".into()));
        }
        let total: f64 = entries.iter().map(LexiconEntry::prob).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Config(format!("lexicon probabilities sum to {total}, not 1")));
        }
        Self::build(alphabet, entries)
    }

    /// Uniform word model `p(w | L)` and uniform entry model `p(x | w, L)`.
    /// Duplicate `(class, form)` pairs are collapsed.
    pub fn uniform(alphabet: Alphabet, pairs: Vec<(String, SymbolString)>) -> Result<Self> {
        let mut seen = HashMap::new();
        let mut unique = Vec::new();
        for (w, x) in pairs {
            if seen.insert((w.clone(), x.clone()), ()).is_none() {
                unique.push((w, x));
            }
        }
        let mut per_class: HashMap<&str, usize> = HashMap::new();
        for (w, _) in &unique {
            *per_class.entry(w.as_str()).or_default() += 1;
        }
        let n_classes = per_class.len() as f64;
        let entries: Vec<(String, SymbolString, f64)> = unique
            .iter()
            .map(|(w, x)| (w.clone(), x.clone(), 1.0 / (n_classes * per_class[w.as_str()] as f64)))
            .collect();
        if entries.is_empty() {
            return Err(Error::Config("lexicon must not be empty".into()));
        }
        Self::new(alphabet, entries)
    }

    fn build(alphabet: Alphabet, entries: Vec<LexiconEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("lexicon must not be empty".into()));
        }
        let mut classes = Vec::new();
        let mut class_index = HashMap::new();
        let mut entry_class = Vec::with_capacity(entries.len());
        let mut by_class: Vec<Vec<usize>> = Vec::new();
        let mut forms = Vec::new();
        let mut form_index: HashMap<SymbolString, usize> = HashMap::new();
        let mut entry_form = Vec::with_capacity(entries.len());
        let mut by_form: Vec<Vec<usize>> = Vec::new();
        let mut pairs = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.class.is_empty() || e.class.chars().any(char::is_whitespace) {
                return Err(Error::Config(format!("invalid class label {:?}", e.class)));
            }
            if !alphabet.contains_all(&e.form) {
                return Err(Error::Config(format!(
                    "prototype for {:?} uses a symbol outside the lexicon alphabet",
                    e.class
                )));
            }
            if pairs.insert((e.class.as_str(), &e.form), ()).is_some() {
                return Err(Error::Config(format!(
                    "duplicate lexicon entry {} {}",
                    e.class,
                    alphabet.render(&e.form)
                )));
            }
            let c = *class_index.entry(e.class.clone()).or_insert_with(|| {
                classes.push(e.class.clone());
                by_class.push(Vec::new());
                classes.len() - 1
            });
            by_class[c].push(i);
            entry_class.push(c);
            let f = *form_index.entry(e.form.clone()).or_insert_with(|| {
                forms.push(e.form.clone());
                by_form.push(Vec::new());
                forms.len() - 1
            });
            by_form[f].push(i);
            entry_form.push(f);
        }
        Ok(Lexicon {
            alphabet,
            entries,
            classes,
            class_index,
            entry_class,
            by_class,
            forms,
            entry_form,
            by_form,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Class labels in order of first appearance.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_id(&self, class: &str) -> Option<usize> {
        self.class_index.get(class).copied()
    }

    /// Entry indices of `L(w)`.
    pub fn class_entries(&self, class_id: usize) -> &[usize] {
        &self.by_class[class_id]
    }

    pub fn entry_class(&self, entry: usize) -> usize {
        self.entry_class[entry]
    }

    /// Distinct prototype forms.
    pub fn forms(&self) -> &[SymbolString] {
        &self.forms
    }

    pub fn entry_form(&self, entry: usize) -> usize {
        self.entry_form[entry]
    }

    /// Entries sharing a form (homophones).
    pub fn form_entries(&self, form_id: usize) -> &[usize] {
        &self.by_form[form_id]
    }

    /// `ln p(x | L)` for a form id.
    pub fn log_form_marginal(&self, form_id: usize) -> f64 {
        let terms: Vec<f64> = self.by_form[form_id]
            .iter()
            .map(|&i| self.entries[i].log_prob)
            .collect();
        log_sum_exp(&terms)
    }

    /// `ln p(w | x, L) = ln L(w, x) - ln L(x)` for an entry.
    pub fn log_class_given_form(&self, entry: usize) -> f64 {
        let lp = self.entries[entry].log_prob;
        if lp == LOG_ZERO {
            return LOG_ZERO;
        }
        lp - self.log_form_marginal(self.entry_form[entry])
    }

    /// `p(w | L)`.
    pub fn word_marginal(&self, class_id: usize) -> f64 {
        self.by_class[class_id].iter().map(|&i| self.entries[i].prob()).sum()
    }

    /// `p(x | w, L)` for an entry; zero when its class has no mass.
    pub fn entry_conditional(&self, entry: usize) -> f64 {
        let w = self.word_marginal(self.entry_class[entry]);
        if w > 0.0 {
            self.entries[entry].prob() / w
        } else {
            0.0
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(LexiconEntry::prob).sum()
    }

    /// Replaces every entry probability; the caller guarantees normalization.
    pub(crate) fn set_probs(&mut self, probs: &[f64]) {
        for (e, &p) in self.entries.iter_mut().zip(probs) {
            e.log_prob = ln(p);
        }
    }

    /// Adds `<w, x>` at probability `p_new`, scaling every other entry by
    /// `1 - p_new`. An existing identical entry absorbs the new mass.
    pub fn add_word(&mut self, class: &str, form: SymbolString, p_new: f64) -> Result<()> {
        if !(p_new > 0.0 && p_new < 1.0) {
            return Err(Error::Config(format!("new entry probability {p_new} is not in (0, 1)")));
        }
        if !self.alphabet.contains_all(&form) {
            return Err(Error::Input("new prototype uses a symbol outside the lexicon alphabet".into()));
        }
        let scale = (1.0 - p_new).ln();
        let mut entries: Vec<LexiconEntry> = self
            .entries
            .iter()
            .map(|e| LexiconEntry {
                log_prob: e.log_prob + scale,
                ..e.clone()
            })
            .collect();
        match entries.iter_mut().find(|e| e.class == class && e.form == form) {
            Some(e) => e.log_prob = ln(e.prob() + p_new),
            None => entries.push(LexiconEntry {
                class: class.to_string(),
                form,
                log_prob: p_new.ln(),
            }),
        }
        *self = Self::build(self.alphabet.clone(), entries)?;
        Ok(())
    }
}
