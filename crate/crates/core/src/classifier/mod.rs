//! Hidden-prototype classification: a lexicon of labeled prototypes over
//! the underlying alphabet, a transducer from prototypes to observations,
//! and the decision rules and training procedures built on them.

mod evaluate;
mod lexicon;
mod model;
mod train;

pub use evaluate::{decide_all, nearest_neighbor_classify, score, score_nearest, word_error_rate};
pub use lexicon::{Lexicon, LexiconEntry};
pub use model::{
    build_lexicon_from_corpus, class_posteriors, classify, classify_with_utility, Channel,
    ClassifierModel, Decision, LabeledCorpus, Scoring, UtilityFunction, TIE_TOLERANCE,
};
pub use train::{
    add_word, adhoc_train, mixture_expectation_step, mixture_maximization_step, train_classifier,
    ClassifierAccumulator, ClassifierOutcome, ClassifierTrainOptions, LEXICON_SMOOTHING,
};
