//! The `stedit` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::classifier::{
    build_lexicon_from_corpus, classify, score, score_nearest, train_classifier, ClassifierModel,
    ClassifierTrainOptions, Lexicon, Scoring, TIE_TOLERANCE,
};
use crate::distance::{viterbi_distance, CostFunction, Levenshtein, StringDistance};
use crate::em::{train, ExpectationMode, PairCorpus, TrainOptions};
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentData, LexiconMode, ModelType};
use crate::factored::{conditional_distances, factor, generate_strings, unfactor};
use crate::io::{
    load_alphabet, load_labeled_corpus, load_model, load_pair_corpus,
    save_model, save_text, write_alphabet, write_labeled_corpus, write_pair_corpus, Model,
};
use crate::logspace::nats_to_bits;
use crate::mixture::{mixture_stochastic_distance, MixtureViterbiDistance};
use crate::synth::{generate_benchmark, SynthConfig};
use crate::transducer::Transducer;
use crate::tying::TyingScheme;
use crate::{classic_edit_distance, stochastic_distance};

#[derive(Debug, Parser)]
#[command(name = "stedit", version, about = "Learned string edit distances and prototype classifiers")]
pub struct Cli {
    /// Worker threads for training and evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TyingArg {
    None,
    FourClass,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Uniform,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DistanceKind {
    Stochastic,
    Viterbi,
    Levenshtein,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScoringArg {
    Stochastic,
    Viterbi,
}

impl From<ScoringArg> for Scoring {
    fn from(s: ScoringArg) -> Self {
        match s {
            ScoringArg::Stochastic => Scoring::Stochastic,
            ScoringArg::Viterbi => Scoring::Viterbi,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BuildLexicon {
    FromTrain,
    FromAll,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a transducer on a corpus of string pairs.
    TrainDistance {
        /// Pair corpus: `x-tokens TAB y-tokens` per line.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        alphabet_a: PathBuf,
        /// Defaults to the source alphabet.
        #[arg(long)]
        alphabet_b: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 0.0)]
        smoothing: f64,
        #[arg(long, value_enum, default_value = "none")]
        tying: TyingArg,
        /// Count only the best edit sequence of each pair.
        #[arg(long)]
        viterbi: bool,
        #[arg(long, value_enum, default_value = "uniform")]
        init: InitArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Distance between two strings, in bits (unit costs for levenshtein).
    Distance {
        /// Transducer, mixture or factored model.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        alphabet_a: Option<PathBuf>,
        #[arg(long)]
        alphabet_b: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "stochastic")]
        kind: DistanceKind,
        /// Also print the best alignment.
        #[arg(long)]
        alignment: bool,
        /// Space-separated source tokens.
        x: String,
        /// Space-separated target tokens.
        y: String,
    },
    /// Train a hidden-prototype classifier from labeled observations.
    TrainClassifier {
        /// Labeled corpus: `class TAB y-tokens` per line.
        #[arg(long)]
        train: PathBuf,
        /// Surface alphabet of the observations.
        #[arg(long)]
        alphabet_b: PathBuf,
        /// Underlying alphabet; defaults to the lexicon's, else the surface one.
        #[arg(long)]
        alphabet_a: Option<PathBuf>,
        /// Lexicon model file.
        #[arg(long, conflicts_with = "build_lexicon")]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum)]
        build_lexicon: Option<BuildLexicon>,
        /// Test corpus, needed for `--build-lexicon from-all`.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "none")]
        tying: TyingArg,
        /// Hold p(w) fixed during training.
        #[arg(long)]
        fix_word: bool,
        /// Hold p(x | w) fixed during training.
        #[arg(long)]
        fix_entry: bool,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = crate::classifier::LEXICON_SMOOTHING)]
        lexicon_smoothing: f64,
        #[arg(long, value_enum, default_value = "stochastic")]
        scoring: ScoringArg,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Classify observations, one per line (an optional `label TAB` prefix is echoed).
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Word error rates of classifiers on a labeled test corpus.
    Eval {
        /// Classifier model files.
        #[arg(long = "model", required = true)]
        models: Vec<PathBuf>,
        #[arg(long)]
        test: PathBuf,
        /// Add a Levenshtein nearest-neighbor row using the first model's lexicon.
        #[arg(long)]
        levenshtein: bool,
    },
    /// Sample string pairs from a model.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// String lengths `T V`, required for factored models.
        #[arg(long, num_args = 2, value_names = ["T", "V"])]
        lengths: Option<Vec<usize>>,
        /// Output file (default: standard output).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic lexicon, corpora and the channel that produced them.
    SynthBenchmark {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1996)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        classes: usize,
        #[arg(long, default_value_t = 5000)]
        train: usize,
        #[arg(long, default_value_t = 500)]
        test: usize,
        /// Scale every channel rate (0 gives a noiseless channel).
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
    },
    /// Train and score the tied/untied/mixed × stochastic/viterbi grid.
    Experiment {
        /// Directory written by `synth-benchmark`; generated from `--seed` if absent.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value = "external")]
        lexicon_mode: String,
        /// Grid cells such as `tied-stochastic`, `mixed-viterbi` (default: all six).
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
        #[arg(long)]
        fix_word: bool,
        #[arg(long)]
        fix_entry: bool,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        #[arg(long, default_value_t = crate::classifier::LEXICON_SMOOTHING)]
        lexicon_smoothing: f64,
        /// Include the ad-hoc pairing baseline.
        #[arg(long)]
        adhoc: bool,
        #[arg(long, default_value_t = 1996)]
        seed: u64,
    },
    /// Convert a transducer to length-conditioned form, or back with `--unfactor`.
    Factor {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        unfactor: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut out = String::new();
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
            .and_then(|pool| pool.install(|| run(&cli.command, &mut out))),
        None => run(&cli.command, &mut out),
    };
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("stedit: {e}");
            e.exit_code()
        }
    }
}

fn model_kind_error(path: &Path, m: &Model, wanted: &str) -> Error {
    Error::Input(format!("{} holds a {} model, expected {wanted}", path.display(), m.kind()))
}

fn load_classifier(path: &Path) -> Result<ClassifierModel> {
    match load_model(path)? {
        Model::Classifier(c) => Ok(c),
        other => Err(model_kind_error(path, &other, "a classifier")),
    }
}

fn tying_scheme(t: TyingArg, tr: &Transducer) -> Option<TyingScheme> {
    match t {
        TyingArg::None => None,
        TyingArg::FourClass => Some(TyingScheme::four_class(tr.space().clone())),
    }
}

/// Runs one command, appending its standard output to `out`.
pub fn run(cmd: &Command, out: &mut String) -> Result<()> {
    match cmd {
        Command::TrainDistance {
            pairs,
            alphabet_a,
            alphabet_b,
            iterations,
            tolerance,
            smoothing,
            tying,
            viterbi,
            init,
            seed,
            out: path,
        } => {
            let a = load_alphabet(alphabet_a)?;
            let b = match alphabet_b {
                Some(p) => load_alphabet(p)?,
                None => a.clone(),
            };
            let corpus = load_pair_corpus(pairs, &a, &b)?;
            let start = match init {
                InitArg::Uniform => Transducer::new_uniform(a, b),
                InitArg::Random => Transducer::random(a, b, &mut ChaCha8Rng::seed_from_u64(*seed)),
            };
            let opts = TrainOptions {
                max_iterations: *iterations,
                tolerance: *tolerance,
                smoothing: *smoothing,
                mode: if *viterbi {
                    ExpectationMode::Viterbi
                } else {
                    ExpectationMode::Full
                },
                tying: tying_scheme(*tying, &start),
            };
            let start = match &opts.tying {
                Some(s) => crate::tying::apply_tying(&start, s)?,
                None => start,
            };
            let outcome = train(&start, &corpus, &opts)?;
            trace_lines(out, &outcome.trace);
            let _ = writeln!(
                out,
                "# {} iterations, {}, {} pairs skipped",
                outcome.iterations,
                if outcome.converged { "converged" } else { "not converged" },
                outcome.skipped
            );
            save_model(path, &Model::Transducer(outcome.transducer))
        }
        Command::Distance {
            model,
            alphabet_a,
            alphabet_b,
            kind,
            alignment,
            x,
            y,
        } => distance_command(model.as_deref(), alphabet_a.as_deref(), alphabet_b.as_deref(), *kind, *alignment, x, y, out),
        Command::TrainClassifier {
            train: train_path,
            alphabet_b,
            alphabet_a,
            lexicon,
            build_lexicon,
            test,
            tying,
            fix_word,
            fix_entry,
            iterations,
            tolerance,
            lexicon_smoothing,
            scoring,
            out: path,
        } => {
            let b = load_alphabet(alphabet_b)?;
            let corpus = load_labeled_corpus(train_path, &b)?;
            let lex = match (lexicon, build_lexicon) {
                (Some(p), None) => match load_model(p)? {
                    Model::Lexicon(l) => l,
                    other => return Err(model_kind_error(p, &other, "a lexicon")),
                },
                (None, Some(mode)) => {
                    let a = match alphabet_a {
                        Some(p) => load_alphabet(p)?,
                        None => b.clone(),
                    };
                    let source = match mode {
                        BuildLexicon::FromTrain => corpus.clone(),
                        BuildLexicon::FromAll => {
                            let t = test.as_ref().ok_or_else(|| {
                                Error::Config("--build-lexicon from-all needs --test".into())
                            })?;
                            corpus.concat(&load_labeled_corpus(t, &b)?)?
                        }
                    };
                    let built = build_lexicon_from_corpus(&source, &a, 0.0)?;
                    let pairs = built.entries().iter().map(|e| (e.class.clone(), e.form.clone())).collect();
                    Lexicon::uniform(a, pairs)?
                }
                _ => return Err(Error::Config("give exactly one of --lexicon or --build-lexicon".into())),
            };
            if let Some(p) = alphabet_a {
                if &load_alphabet(p)? != lex.alphabet() {
                    return Err(Error::Config("--alphabet-a differs from the lexicon's alphabet".into()));
                }
            }
            let init = Transducer::new_uniform(lex.alphabet().clone(), b);
            let opts = ClassifierTrainOptions {
                max_iterations: *iterations,
                tolerance: *tolerance,
                lexicon_smoothing: *lexicon_smoothing,
                tying: tying_scheme(*tying, &init),
                ..ClassifierTrainOptions::default()
            };
            let model = ClassifierModel::new(init, lex)?.with_switches(!fix_word, !fix_entry);
            let outcome = train_classifier(&model, &corpus, &opts)?;
            trace_lines(out, &outcome.trace);
            let _ = writeln!(
                out,
                "# {} iterations, {}, {} samples skipped",
                outcome.iterations,
                if outcome.converged { "converged" } else { "not converged" },
                outcome.skipped
            );
            save_model(path, &Model::Classifier(outcome.model.with_scoring((*scoring).into())))
        }
        Command::Classify { model, input } => {
            let m = load_classifier(model)?;
            let b = m.channel().space().target().clone();
            let text = fs::read_to_string(input)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", input.display())))?;
            let origin = input.display().to_string();
            for (n, line) in text.lines().enumerate() {
                let line = line.trim_end_matches('\r');
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                let (label, obs) = line.split_once('\t').unwrap_or(("", line));
                let y = b.parse(obs).map_err(|e| Error::Parse {
                    path: origin.clone(),
                    line: n + 1,
                    message: e.to_string(),
                })?;
                match classify(&y, &m, TIE_TOLERANCE)? {
                    Some(d) => {
                        let _ = writeln!(out, "{label}\t{}\t{}", d.classes(m.lexicon()).join(","), d.score);
                    }
                    None => {
                        let _ = writeln!(out, "{label}\t-\t0");
                    }
                }
            }
            Ok(())
        }
        Command::Eval {
            models,
            test,
            levenshtein,
        } => {
            let loaded = models
                .iter()
                .map(|p| load_classifier(p))
                .collect::<Result<Vec<_>>>()?;
            let b = loaded[0].channel().space().target().clone();
            let corpus = load_labeled_corpus(test, &b)?;
            let _ = writeln!(out, "{:<40} {:>8}", "model", "error %");
            if *levenshtein {
                let lex = loaded[0].lexicon();
                let lev = Levenshtein::new(lex.alphabet().clone(), b.clone());
                let e = score_nearest(lex, &lev, &corpus, TIE_TOLERANCE)?;
                let _ = writeln!(out, "{:<40} {:>8.2}", "levenshtein", 100.0 * e);
            }
            for (p, m) in models.iter().zip(&loaded) {
                let e = score(m, &corpus, TIE_TOLERANCE)?;
                let _ = writeln!(out, "{:<40} {:>8.2}", p.display(), 100.0 * e);
            }
            Ok(())
        }
        Command::Generate {
            model,
            count,
            seed,
            lengths,
            out: path,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let m = load_model(model)?;
            let (space, pairs) = match (&m, lengths) {
                (Model::Factored(f), Some(l)) => {
                    let pairs = (0..*count).map(|_| generate_strings(l[0], l[1], f, &mut rng)).collect();
                    (f.space().clone(), pairs)
                }
                (Model::Factored(_), None) => {
                    return Err(Error::Config("factored models need --lengths T V".into()))
                }
                (Model::Transducer(t), _) => {
                    let pairs = (0..*count)
                        .map(|_| t.generate(&mut rng).map(|al| al.yield_pair()))
                        .collect::<Result<_>>()?;
                    (t.space().clone(), pairs)
                }
                (Model::Mixture(mx), _) => {
                    let weights = mx.weights();
                    let pick = rand::distr::weighted::WeightedIndex::new(&weights)
                        .map_err(|e| Error::Config(e.to_string()))?;
                    let pairs = (0..*count)
                        .map(|_| {
                            let k = rand::distr::Distribution::sample(&pick, &mut rng);
                            mx.components()[k].generate(&mut rng).map(|al| al.yield_pair())
                        })
                        .collect::<Result<_>>()?;
                    (mx.space().clone(), pairs)
                }
                (other, _) => return Err(model_kind_error(model, other, "a transducer, mixture or factored model")),
            };
            let corpus = PairCorpus::new(space, pairs)?;
            let text = write_pair_corpus(&corpus);
            match path {
                Some(p) => save_text(p, &text)?,
                None => out.push_str(&text),
            }
            Ok(())
        }
        Command::SynthBenchmark {
            out_dir,
            seed,
            classes,
            train: n_train,
            test: n_test,
            noise,
        } => {
            let d = SynthConfig::default();
            let cfg = SynthConfig {
                seed: *seed,
                classes: *classes,
                train: *n_train,
                test: *n_test,
                sub_rate: d.sub_rate * noise,
                ins_rate: d.ins_rate * noise,
                del_rate: d.del_rate * noise,
                ..d
            };
            let bench = generate_benchmark(&cfg)?;
            fs::create_dir_all(out_dir)?;
            save_text(out_dir.join("alphabet.txt"), &write_alphabet(&bench.alphabet))?;
            save_model(out_dir.join("lexicon.model"), &Model::Lexicon(bench.lexicon.clone()))?;
            save_text(out_dir.join("train.tsv"), &write_labeled_corpus(&bench.train))?;
            save_text(out_dir.join("test.tsv"), &write_labeled_corpus(&bench.test))?;
            save_model(out_dir.join("channel.model"), &Model::Transducer(bench.channel.clone()))?;
            let _ = writeln!(
                out,
                "{} classes, {} lexicon entries, {} train, {} test samples written to {}",
                bench.lexicon.classes().len(),
                bench.lexicon.len(),
                bench.train.len(),
                bench.test.len(),
                out_dir.display()
            );
            Ok(())
        }
        Command::Experiment {
            data,
            lexicon_mode,
            models,
            fix_word,
            fix_entry,
            iterations,
            lexicon_smoothing,
            adhoc,
            seed,
        } => {
            let mut cfg = ExperimentConfig {
                lexicon_mode: lexicon_mode.parse::<LexiconMode>()?,
                adapt_word: !fix_word,
                adapt_entry: !fix_entry,
                iterations: *iterations,
                lexicon_smoothing: *lexicon_smoothing,
                adhoc: *adhoc,
                seed: *seed,
                ..ExperimentConfig::default()
            };
            if !models.is_empty() {
                cfg.models = models.iter().map(|s| parse_cell(s)).collect::<Result<_>>()?;
            }
            let data = match data {
                Some(dir) => load_experiment_data(dir)?,
                None => {
                    let bench = generate_benchmark(&SynthConfig {
                        seed: *seed,
                        ..SynthConfig::default()
                    })?;
                    ExperimentData {
                        underlying: bench.alphabet,
                        lexicon: Some(bench.lexicon),
                        train: bench.train,
                        test: bench.test,
                    }
                }
            };
            let report = run_experiment(&cfg, &data)?;
            let _ = write!(out, "{report}");
            Ok(())
        }
        Command::Factor {
            model,
            unfactor: back,
            out: path,
        } => {
            let converted = match (load_model(model)?, back) {
                (Model::Transducer(t), false) => Model::Factored(factor(&t)?),
                (Model::Factored(f), true) => Model::Transducer(unfactor(&f)),
                (other, false) => return Err(model_kind_error(model, &other, "a transducer")),
                (other, true) => return Err(model_kind_error(model, &other, "a factored model")),
            };
            save_model(path, &converted)
        }
    }
}

fn trace_lines(out: &mut String, trace: &[f64]) {
    let _ = writeln!(out, "# iteration\tlog-likelihood (nats)\t-log2 p (bits)");
    for (i, ll) in trace.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{ll:.6}\t{:.6}", nats_to_bits(*ll));
    }
}

fn parse_cell(s: &str) -> Result<(ModelType, Scoring)> {
    let (m, sc) = s
        .split_once('-')
        .ok_or_else(|| Error::Config(format!("model cell {s:?} should look like tied-stochastic")))?;
    Ok((m.parse()?, sc.parse()?))
}

fn load_experiment_data(dir: &Path) -> Result<ExperimentData> {
    let alphabet = load_alphabet(dir.join("alphabet.txt"))?;
    let lex_path = dir.join("lexicon.model");
    let lexicon = if lex_path.exists() {
        match load_model(&lex_path)? {
            Model::Lexicon(l) => Some(l),
            other => return Err(model_kind_error(&lex_path, &other, "a lexicon")),
        }
    } else {
        None
    };
    let underlying = lexicon.as_ref().map_or_else(|| alphabet.clone(), |l| l.alphabet().clone());
    Ok(ExperimentData {
        underlying,
        lexicon,
        train: load_labeled_corpus(dir.join("train.tsv"), &alphabet)?,
        test: load_labeled_corpus(dir.join("test.tsv"), &alphabet)?,
    })
}

#[allow(clippy::too_many_arguments)]
fn distance_command(
    model: Option<&Path>,
    alphabet_a: Option<&Path>,
    alphabet_b: Option<&Path>,
    kind: DistanceKind,
    show_alignment: bool,
    x: &str,
    y: &str,
    out: &mut String,
) -> Result<()> {
    let loaded = model.map(load_model).transpose()?;
    let (a, b) = match (&loaded, alphabet_a) {
        (Some(m), _) => match m {
            Model::Transducer(t) => (t.source().clone(), t.target().clone()),
            Model::Mixture(mx) => (mx.space().source().clone(), mx.space().target().clone()),
            Model::Factored(f) => (f.source().clone(), f.target().clone()),
            other => {
                return Err(model_kind_error(
                    model.expect("loaded"),
                    other,
                    "a transducer, mixture or factored model",
                ))
            }
        },
        (None, Some(pa)) => {
            let a = load_alphabet(pa)?;
            let b = alphabet_b.map(load_alphabet).transpose()?.unwrap_or_else(|| a.clone());
            (a, b)
        }
        (None, None) => return Err(Error::Config("give --model or --alphabet-a".into())),
    };
    let xs = a.parse(x)?;
    let ys = b.parse(y)?;
    let mut alignment = None;
    let value = match (kind, &loaded) {
        (DistanceKind::Levenshtein, _) => {
            let (d, al) = classic_edit_distance(&xs, &ys, &CostFunction::levenshtein(a.clone(), b.clone()))?;
            alignment = Some(al);
            d
        }
        (DistanceKind::Stochastic, Some(Model::Transducer(t))) => stochastic_distance(&xs, &ys, t)?,
        (DistanceKind::Viterbi, Some(Model::Transducer(t))) => {
            let path = viterbi_distance(&xs, &ys, t)?;
            alignment = path.alignment;
            path.bits
        }
        (DistanceKind::Stochastic, Some(Model::Mixture(mx))) => mixture_stochastic_distance(&xs, &ys, mx)?,
        (DistanceKind::Viterbi, Some(Model::Mixture(mx))) => MixtureViterbiDistance(mx).distance(&xs, &ys),
        (DistanceKind::Stochastic, Some(Model::Factored(f))) => conditional_distances(&xs, &ys, f)?.1,
        (DistanceKind::Viterbi, Some(Model::Factored(f))) => conditional_distances(&xs, &ys, f)?.0,
        _ => return Err(Error::Config("stochastic and viterbi distances need --model".into())),
    };
    let _ = writeln!(out, "{value}");
    if let (true, Some(al)) = (show_alignment, alignment) {
        alignment_line(out, &a, &b, &al.ops);
    }
    Ok(())
}

fn alignment_line(out: &mut String, a: &Alphabet, b: &Alphabet, ops: &[crate::edit::EditOp]) {
    let space = crate::edit::EditSpace::new(a.clone(), b.clone());
    let parts: Vec<String> = ops.iter().map(|&op| space.describe(op)).collect();
    let _ = writeln!(out, "{}", parts.join(" "));
}
