mod common;

use std::collections::HashMap;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{enumerate, letters, random_string};
use stedit::classifier::{
    mixture_expectation_step, mixture_maximization_step, ClassifierAccumulator, TIE_TOLERANCE,
};
use stedit::synth::{generate_benchmark, SynthConfig};
use stedit::{
    add_word, build_lexicon_from_corpus, class_posteriors, classify, classify_with_utility,
    nearest_neighbor_classify, score, score_nearest, train_classifier, word_error_rate, Alphabet,
    ClassifierModel, ClassifierTrainOptions, Decision, LabeledCorpus, Levenshtein, Lexicon,
    StochasticDistance, SymbolString, Transducer, UtilityFunction,
};

/// A random lexicon over `a` whose classes may share forms.
fn random_lexicon(a: &Alphabet, rng: &mut ChaCha8Rng) -> Lexicon {
    let forms: Vec<SymbolString> = (0..rng.random_range(1..=3)).map(|_| random_string(a, 3, rng)).collect();
    let mut entries: Vec<(String, SymbolString, f64)> = Vec::new();
    for w in ["w0", "w1", "w2"] {
        for f in &forms {
            if rng.random_bool(0.6) && !entries.iter().any(|(c, x, _)| c == w && x == f) {
                entries.push((w.to_string(), f.clone(), rng.random_range(0.1..1.0)));
            }
        }
    }
    if entries.is_empty() {
        entries.push(("w0".into(), forms[0].clone(), 1.0));
    }
    let total: f64 = entries.iter().map(|e| e.2).sum();
    for e in &mut entries {
        e.2 /= total;
    }
    Lexicon::new(a.clone(), entries).unwrap()
}

/// `p(w, y) = Σ_x p(w | x, L) p(x, y | φ)` with the channel term enumerated.
fn brute_joints(m: &ClassifierModel, y: &SymbolString) -> HashMap<String, f64> {
    let lex = m.lexicon();
    let t = m.transducer().unwrap();
    let mut form_mass: HashMap<&SymbolString, f64> = HashMap::new();
    for e in lex.entries() {
        *form_mass.entry(&e.form).or_default() += e.prob();
    }
    let mut out: HashMap<String, f64> = HashMap::new();
    for e in lex.entries() {
        let pxy = enumerate(&e.form, y, t).total;
        *out.entry(e.class.clone()).or_default() += e.prob() / form_mass[&e.form] * pxy;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn class_joint_is_the_sum_over_prototypes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = letters('a', 2);
        let b = letters('p', 2);
        let lex = random_lexicon(&a, &mut rng);
        let m = ClassifierModel::new(Transducer::random(a.clone(), b.clone(), &mut rng), lex).unwrap();
        let y = random_string(&b, 3, &mut rng);
        let brute = brute_joints(&m, &y);
        for (w, want) in &brute {
            let mut acc = ClassifierAccumulator::new(&m, 0.0, 0.0);
            let got = mixture_expectation_step(w, &y, &m, &mut acc).unwrap().unwrap().exp();
            prop_assert!((got - want).abs() <= 1e-10 * want);
            // the class's prototype posteriors sum to one
            prop_assert!((acc.entries.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn posteriors_match_bayes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = letters('a', 2);
        let b = letters('p', 3);
        let lex = random_lexicon(&a, &mut rng);
        let m = ClassifierModel::new(Transducer::random(a.clone(), b.clone(), &mut rng), lex).unwrap();
        let y = random_string(&b, 3, &mut rng);
        let brute = brute_joints(&m, &y);
        let z: f64 = brute.values().sum();
        let post = class_posteriors(&y, &m).unwrap();
        prop_assert!((post.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-12);
        for (w, p) in post {
            prop_assert!((p - brute[&w] / z).abs() < 1e-10);
        }
    }

    #[test]
    fn maximization_keeps_everything_normalized(seed in any::<u64>(), adapt_word: bool, adapt_entry: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = letters('a', 2);
        let lex = random_lexicon(&a, &mut rng);
        let m = ClassifierModel::new(Transducer::random(a.clone(), a.clone(), &mut rng), lex)
            .unwrap()
            .with_switches(adapt_word, adapt_entry);
        let mut acc = ClassifierAccumulator::new(&m, 0.1, 0.0);
        for _ in 0..5 {
            let c = rng.random_range(0..m.lexicon().classes().len());
            let w = m.lexicon().classes()[c].clone();
            mixture_expectation_step(&w, &random_string(&a, 3, &mut rng), &m, &mut acc).unwrap();
        }
        let next = mixture_maximization_step(&m, &acc, None).unwrap();
        prop_assert!((next.lexicon().total() - 1.0).abs() < 1e-9);
        prop_assert!((next.transducer().unwrap().probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let lex = m.lexicon();
        for c in 0..lex.classes().len() {
            if !adapt_word {
                prop_assert!((lex.word_marginal(c) - next.lexicon().word_marginal(c)).abs() < 1e-12);
            }
        }
        if !adapt_entry {
            for i in 0..lex.len() {
                prop_assert!((lex.entry_conditional(i) - next.lexicon().entry_conditional(i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nearest_neighbor_agrees_with_classify_on_single_prototypes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = letters('a', 2);
        let b = letters('p', 2);
        let mut forms: Vec<SymbolString> = Vec::new();
        while forms.len() < 3 {
            let f = random_string(&a, 3, &mut rng);
            if !forms.contains(&f) {
                forms.push(f);
            }
        }
        let lex = Lexicon::uniform(
            a.clone(),
            forms.iter().enumerate().map(|(i, f)| (format!("w{i}"), f.clone())).collect(),
        )
        .unwrap();
        let t = Transducer::random(a, b.clone(), &mut rng);
        let m = ClassifierModel::new(t.clone(), lex.clone()).unwrap();
        let y = random_string(&b, 3, &mut rng);
        let by_model = classify(&y, &m, TIE_TOLERANCE).unwrap().unwrap();
        let by_distance = nearest_neighbor_classify(&y, &lex, &StochasticDistance(&t), TIE_TOLERANCE)
            .unwrap()
            .unwrap();
        prop_assert_eq!(by_model.entries, by_distance.entries);
    }
}

fn homophones() -> (Alphabet, Lexicon) {
    let a = Alphabet::from_chars("ab").unwrap();
    let lex = Lexicon::new(
        a.clone(),
        vec![
            ("to".into(), a.parse("a b").unwrap(), 0.3),
            ("two".into(), a.parse("a b").unwrap(), 0.3),
            ("bee".into(), a.parse("b").unwrap(), 0.4),
        ],
    )
    .unwrap();
    (a, lex)
}

/// Copies each symbol with high probability.
fn faithful(a: &Alphabet) -> Transducer {
    Transducer::from_fn(a.clone(), a.clone(), |op| match op {
        stedit::EditOp::Sub(x, y) if x == y => 0.35,
        stedit::EditOp::End => 0.12,
        _ => 0.03,
    })
    .unwrap()
}

#[test]
fn homophones_share_credit_and_unknown_classes_are_errors() {
    let (a, lex) = homophones();
    let m = ClassifierModel::new(faithful(&a), lex.clone()).unwrap();
    let y = a.parse("a b").unwrap();
    let d = classify(&y, &m, TIE_TOLERANCE).unwrap().unwrap();
    let mut classes = d.classes(&lex);
    classes.sort();
    assert_eq!(classes, vec!["to", "two"]);

    let err = word_error_rate(&lex, [("to", Some(&d)), ("three", Some(&d)), ("bee", None)]).unwrap();
    assert_relative_eq!(err, 1.0 - 0.5 / 3.0, max_relative = 1e-12);
    assert!(word_error_rate(&lex, std::iter::empty::<(&str, Option<&Decision>)>()).is_err());
}

#[test]
fn utility_can_prefer_a_less_likely_class() {
    let (a, lex) = homophones();
    let m = ClassifierModel::new(faithful(&a), lex.clone()).unwrap();
    let y = a.parse("a b").unwrap();
    let identity = classify_with_utility(&y, &m, &UtilityFunction::identity(), TIE_TOLERANCE)
        .unwrap()
        .unwrap();
    assert_eq!(identity.entries, classify(&y, &m, TIE_TOLERANCE).unwrap().unwrap().entries);

    let mut overrides = HashMap::new();
    overrides.insert(("bee".to_string(), "bee".to_string()), 100.0);
    let u = UtilityFunction::new(1.0, 0.0, overrides).unwrap();
    let d = classify_with_utility(&y, &m, &u, TIE_TOLERANCE).unwrap().unwrap();
    assert_eq!(d.classes(&lex), vec!["bee"]);
}

#[test]
fn adding_a_word_makes_its_exact_copy_a_candidate() {
    let bench = generate_benchmark(&SynthConfig {
        classes: 10,
        train: 10,
        test: 10,
        ..Default::default()
    })
    .unwrap();
    let m = ClassifierModel::new(bench.channel.clone(), bench.lexicon.clone()).unwrap();
    let a = &bench.alphabet;
    let x: SymbolString = a.symbols().collect();
    assert!(!bench.lexicon.forms().contains(&x));
    let before = classify(&x, &m, TIE_TOLERANCE).unwrap().unwrap();
    assert!(!before.classes(m.lexicon()).contains(&"novel"));

    let grown = add_word(&m, "novel", x.clone(), 0.01).unwrap();
    assert_relative_eq!(grown.lexicon().total(), 1.0, max_relative = 1e-12);
    let after = classify(&x, &grown, TIE_TOLERANCE).unwrap().unwrap();
    assert!(after.classes(grown.lexicon()).contains(&"novel"));
}

#[test]
fn noiseless_channel_leaves_only_homophone_ambiguity() {
    let bench = generate_benchmark(&SynthConfig {
        sub_rate: 0.0,
        ins_rate: 0.0,
        del_rate: 0.0,
        train: 10,
        test: 300,
        ..Default::default()
    })
    .unwrap();
    let lex = &bench.lexicon;
    // expected error when an observed form is shared by k classes: 1 - 1/k
    let bound: f64 = bench
        .test
        .samples()
        .iter()
        .map(|(_, y)| {
            let f = lex.forms().iter().position(|x| x == y).expect("noiseless samples are prototypes");
            let k = lex.form_entries(f).len() as f64;
            1.0 - 1.0 / k
        })
        .sum::<f64>()
        / bench.test.len() as f64;
    let a = bench.alphabet.clone();
    let err = score_nearest(lex, &Levenshtein::new(a.clone(), a), &bench.test, TIE_TOLERANCE).unwrap();
    assert!(err <= bound + 1e-12, "{err} > {bound}");
}

#[test]
fn benchmark_is_seed_deterministic() {
    let cfg = SynthConfig {
        classes: 10,
        train: 50,
        test: 20,
        ..Default::default()
    };
    let one = generate_benchmark(&cfg).unwrap();
    let two = generate_benchmark(&cfg).unwrap();
    assert_eq!(one.lexicon, two.lexicon);
    assert_eq!(one.train.samples(), two.train.samples());
    assert_eq!(one.test.samples(), two.test.samples());
    let other = generate_benchmark(&SynthConfig { seed: 7, ..cfg }).unwrap();
    assert_ne!(one.train.samples(), other.train.samples());
}

#[test]
fn training_beats_levenshtein_on_a_small_benchmark() {
    let bench = generate_benchmark(&SynthConfig {
        train: 1500,
        test: 300,
        ..Default::default()
    })
    .unwrap();
    let a = bench.alphabet.clone();
    let lev = score_nearest(&bench.lexicon, &Levenshtein::new(a.clone(), a.clone()), &bench.test, TIE_TOLERANCE).unwrap();
    let m = ClassifierModel::new(Transducer::new_uniform(a.clone(), a), bench.lexicon.clone()).unwrap();
    let out = train_classifier(&m, &bench.train, &ClassifierTrainOptions::default()).unwrap();
    let err = score(&out.model, &bench.test, TIE_TOLERANCE).unwrap();
    assert!((0.0..=1.0).contains(&err));
    assert!(err < lev, "{err} vs {lev}");
}

#[test]
fn lexicon_from_corpus_counts_forms() {
    let a = Alphabet::from_chars("ab").unwrap();
    let c = LabeledCorpus::new(
        a.clone(),
        vec![
            ("x".into(), a.parse("a").unwrap()),
            ("x".into(), a.parse("a").unwrap()),
            ("y".into(), a.parse("b").unwrap()),
        ],
    )
    .unwrap();
    let lex = build_lexicon_from_corpus(&c, &a, 0.0).unwrap();
    assert_eq!(lex.len(), 2);
    let x = lex.class_id("x").unwrap();
    assert_relative_eq!(lex.word_marginal(x), 2.0 / 3.0, max_relative = 1e-12);
    assert!(build_lexicon_from_corpus(&LabeledCorpus::new(a.clone(), vec![]).unwrap(), &a, 0.0).is_err());
}
