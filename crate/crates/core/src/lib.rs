//! Learned string edit distances.
//!
//! A memoryless stochastic transducer assigns a probability to every
//! terminated sequence of edit operations (substitutions, deletions,
//! insertions, and a termination event). Summing over the edit sequences
//! that yield a string pair gives a joint probability for the pair, and its
//! negative logarithm is the *stochastic edit distance*; the most likely
//! single sequence gives the *Viterbi edit distance*. Both are learned from
//! examples by expectation-maximization.
//!
//! On top of the distance sits a hidden-prototype classifier: a lexicon of
//! labeled prototype strings plus a transducer, trained jointly from labeled
//! observations.
//!
//! ```
//! use stedit::{Alphabet, Transducer, stochastic_distance, viterbi_distance};
//!
//! let a = Alphabet::from_chars("a").unwrap();
//! let b = Alphabet::from_chars("b").unwrap();
//! let phi = Transducer::new_uniform(a.clone(), b.clone());
//! let (x, y) = (a.parse("a").unwrap(), b.parse("b").unwrap());
//!
//! let ds = stochastic_distance(&x, &y, &phi).unwrap();
//! let dv = viterbi_distance(&x, &y, &phi).unwrap();
//! assert!((dv.bits - 4.0).abs() < 1e-12);
//! assert!(ds < dv.bits);
//! ```

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alphabet;
pub mod classifier;
pub mod cli;
pub mod distance;
pub mod edit;
pub mod em;
pub mod error;
pub mod experiment;
pub mod factored;
pub mod io;
pub mod lattice;
pub mod logspace;
pub mod mixture;
pub mod synth;
pub mod transducer;
pub mod tying;

pub use alphabet::{Alphabet, Symbol, SymbolString};
pub use classifier::{
    add_word, adhoc_train, build_lexicon_from_corpus, class_posteriors, classify,
    classify_with_utility, nearest_neighbor_classify, score, score_nearest, train_classifier,
    word_error_rate, Channel, ClassifierModel, ClassifierTrainOptions, Decision, LabeledCorpus,
    Lexicon, LexiconEntry, Scoring, UtilityFunction,
};
pub use distance::{
    classic_edit_distance, joint_probability, levenshtein_costs, log_joint_probability,
    stochastic_distance, viterbi_distance, CostFunction, Levenshtein, StochasticDistance,
    StringDistance, ViterbiDistance, ViterbiPath,
};
pub use edit::{Alignment, EditKind, EditOp, EditSpace};
pub use em::{
    corpus_log_likelihood, expectation_step, maximization_step, train, viterbi_expectation_step,
    EditAccumulator, ExpectationMode, PairCorpus, TrainOptions, TrainOutcome,
};
pub use error::{Error, Result};
pub use factored::{
    backward_evaluate_strings, conditional_distances, conditional_probability, expectation_step_strings,
    factor, forward_evaluate_strings, generate_strings, joint_with_length_prior,
    maximization_step_strings, train_strings, unfactor, FactoredAccumulator, FactoredOutcome,
    FactoredTrainOptions, FactoredTransducer, LengthPrior,
};
pub use io::{load_model, read_model, save_model, write_model, Model};
pub use lattice::{backward_evaluate, forward_evaluate, DPMatrix};
pub use mixture::{
    mixture_probability, mixture_stochastic_distance, tied_untied_mixture, uniform_mixture,
    MixtureDistance, MixtureTransducer, MixtureViterbiDistance,
};
pub use transducer::{validate_probabilities, Transducer, ValidityReport};
pub use tying::{apply_tying, TyingScheme};
