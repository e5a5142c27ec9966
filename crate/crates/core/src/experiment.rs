//! The word-recognition protocol: pick a lexicon, train tied, untied and
//! mixed classifiers, and tabulate word error rates next to a Levenshtein
//! nearest-neighbor baseline.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::alphabet::Alphabet;
use crate::classifier::{
    adhoc_train, score, score_nearest, train_classifier, ClassifierModel, ClassifierTrainOptions,
    LabeledCorpus, Lexicon, Scoring, LEXICON_SMOOTHING, TIE_TOLERANCE,
};
use crate::distance::{Levenshtein, StochasticDistance, ViterbiDistance};
use crate::em::TrainOptions;
use crate::error::{Error, Result};
use crate::transducer::Transducer;
use crate::tying::TyingScheme;

/// Where the lexicon comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconMode {
    /// A lexicon supplied with the data.
    External,
    /// The distinct labeled forms of the training corpus.
    FromTrain,
    /// The distinct labeled forms of training and test corpora together.
    FromAll,
}

impl FromStr for LexiconMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "external" => Ok(LexiconMode::External),
            "from-train" => Ok(LexiconMode::FromTrain),
            "from-all" => Ok(LexiconMode::FromAll),
            _ => Err(Error::Config(format!(
                "unknown lexicon mode {s:?} (expected external, from-train or from-all)"
            ))),
        }
    }
}

impl fmt::Display for LexiconMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LexiconMode::External => "external",
            LexiconMode::FromTrain => "from-train",
            LexiconMode::FromAll => "from-all",
        })
    }
}

/// Transducer parameterization of a classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelType {
    /// Four tied classes: identity, substitution, deletion, insertion.
    Tied,
    Untied,
    /// Uniform mixture of the tied and untied models.
    Mixed,
}

impl FromStr for ModelType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tied" => Ok(ModelType::Tied),
            "untied" => Ok(ModelType::Untied),
            "mixed" => Ok(ModelType::Mixed),
            _ => Err(Error::Config(format!("unknown model type {s:?} (expected tied, untied or mixed)"))),
        }
    }
}

impl fmt::Display for ModelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelType::Tied => "tied",
            ModelType::Untied => "untied",
            ModelType::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lexicon_mode: LexiconMode,
    pub models: Vec<(ModelType, Scoring)>,
    pub adapt_word: bool,
    pub adapt_entry: bool,
    pub iterations: usize,
    pub lexicon_smoothing: f64,
    /// Also run the ad-hoc pairing baseline.
    pub adhoc: bool,
    /// Seed for generated data when no data files are given.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mut models = Vec::new();
        for m in [ModelType::Tied, ModelType::Untied, ModelType::Mixed] {
            for s in [Scoring::Stochastic, Scoring::Viterbi] {
                models.push((m, s));
            }
        }
        ExperimentConfig {
            lexicon_mode: LexiconMode::External,
            models,
            adapt_word: true,
            adapt_entry: true,
            iterations: 10,
            lexicon_smoothing: LEXICON_SMOOTHING,
            adhoc: false,
            seed: 1996,
        }
    }
}

/// Corpora and an optional external lexicon.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    /// Underlying alphabet of the prototypes.
    pub underlying: Alphabet,
    pub lexicon: Option<Lexicon>,
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub mode: LexiconMode,
    pub entries: usize,
    /// Test samples whose class is missing from the lexicon.
    pub unseen_classes: usize,
    /// Test samples whose `(class, form)` pair is not a lexicon entry.
    pub novel_forms: usize,
    pub test_samples: usize,
    pub rows: Vec<ReportRow>,
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "lexicon {}: {} entries; {} test samples, {} unseen classes, {} novel forms",
            self.mode, self.entries, self.test_samples, self.unseen_classes, self.novel_forms
        )?;
        writeln!(f, "{:<24} {:>8}", "model", "error %")?;
        for r in &self.rows {
            writeln!(f, "{:<24} {:>8.2}", r.model, 100.0 * r.error)?;
        }
        Ok(())
    }
}

fn experiment_lexicon(cfg: &ExperimentConfig, data: &ExperimentData) -> Result<Lexicon> {
    let a = &data.underlying;
    let pairs_of = |c: &LabeledCorpus| -> Result<Vec<(String, crate::alphabet::SymbolString)>> {
        c.samples()
            .iter()
            .map(|(w, y)| Ok((w.clone(), a.translate(c.alphabet(), y)?)))
            .collect()
    };
    // every mode starts from uniform word and entry models
    let pairs = match cfg.lexicon_mode {
        LexiconMode::External => {
            let lex = data
                .lexicon
                .as_ref()
                .ok_or_else(|| Error::Config("external lexicon mode needs a lexicon".into()))?;
            lex.entries().iter().map(|e| (e.class.clone(), e.form.clone())).collect()
        }
        LexiconMode::FromTrain => pairs_of(&data.train)?,
        LexiconMode::FromAll => {
            let mut p = pairs_of(&data.train)?;
            p.extend(pairs_of(&data.test)?);
            p
        }
    };
    Lexicon::uniform(a.clone(), pairs)
}

/// Runs the full grid and returns the error table.
pub fn run_experiment(cfg: &ExperimentConfig, data: &ExperimentData) -> Result<ExperimentReport> {
    let lexicon = experiment_lexicon(cfg, data)?;
    let a = data.underlying.clone();
    let b = data.train.alphabet().clone();
    if data.test.alphabet() != &b {
        return Err(Error::Config("training and test corpora use different alphabets".into()));
    }

    let known: HashSet<(&str, Vec<u32>)> = lexicon
        .entries()
        .iter()
        .map(|e| (e.class.as_str(), e.form.iter().map(|s| s.0).collect()))
        .collect();
    let mut unseen = 0;
    let mut novel = 0;
    for (w, y) in data.test.samples() {
        if lexicon.class_id(w).is_none() {
            unseen += 1;
        }
        let form = a.translate(&b, y).ok().map(|x| x.iter().map(|s| s.0).collect());
        if form.is_none_or(|f| !known.contains(&(w.as_str(), f))) {
            novel += 1;
        }
    }

    let mut rows = vec![ReportRow {
        model: "levenshtein".into(),
        error: score_nearest(&lexicon, &Levenshtein::new(a.clone(), b.clone()), &data.test, TIE_TOLERANCE)?,
    }];

    let init = Transducer::new_uniform(a.clone(), b.clone());
    let base = ClassifierModel::new(init.clone(), lexicon.clone())?.with_switches(cfg.adapt_word, cfg.adapt_entry);
    let opts = |tying: Option<TyingScheme>| ClassifierTrainOptions {
        max_iterations: cfg.iterations,
        tolerance: 0.0,
        lexicon_smoothing: cfg.lexicon_smoothing,
        tying,
        ..ClassifierTrainOptions::default()
    };
    let needs = |t: ModelType| cfg.models.iter().any(|(m, _)| *m == t || *m == ModelType::Mixed);
    let tied = if needs(ModelType::Tied) {
        let scheme = TyingScheme::four_class(init.space().clone());
        Some(train_classifier(&base, &data.train, &opts(Some(scheme)))?.model)
    } else {
        None
    };
    let untied = if needs(ModelType::Untied) {
        Some(train_classifier(&base, &data.train, &opts(None))?.model)
    } else {
        None
    };
    for &(kind, scoring) in &cfg.models {
        let model = match kind {
            ModelType::Tied => tied.clone().expect("trained"),
            ModelType::Untied => untied.clone().expect("trained"),
            ModelType::Mixed => ClassifierModel::mixed(
                tied.as_ref().expect("trained"),
                untied.as_ref().expect("trained"),
            )?,
        };
        rows.push(ReportRow {
            model: format!("{kind} {scoring}"),
            error: score(&model.with_scoring(scoring), &data.test, TIE_TOLERANCE)?,
        });
    }

    if cfg.adhoc {
        let topts = TrainOptions {
            max_iterations: cfg.iterations,
            tolerance: 0.0,
            ..TrainOptions::default()
        };
        let t = adhoc_train(&init, &data.train, &lexicon, &topts)?.transducer;
        rows.push(ReportRow {
            model: "adhoc stochastic".into(),
            error: score_nearest(&lexicon, &StochasticDistance(&t), &data.test, TIE_TOLERANCE)?,
        });
        rows.push(ReportRow {
            model: "adhoc viterbi".into(),
            error: score_nearest(&lexicon, &ViterbiDistance(&t), &data.test, TIE_TOLERANCE)?,
        });
    }

    Ok(ExperimentReport {
        mode: cfg.lexicon_mode,
        entries: lexicon.len(),
        unseen_classes: unseen,
        novel_forms: novel,
        test_samples: data.test.len(),
        rows,
    })
}
