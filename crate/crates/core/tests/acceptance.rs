//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{enumerate, enumerate_factored, letters, random_string, rel_close};
use stedit::classifier::{
    mixture_expectation_step, mixture_maximization_step, score, score_nearest, ClassifierAccumulator,
    TIE_TOLERANCE,
};
use stedit::synth::{generate_benchmark, SynthConfig};
use stedit::{
    adhoc_train, backward_evaluate, backward_evaluate_strings, classic_edit_distance, conditional_distances,
    conditional_probability, expectation_step, expectation_step_strings, forward_evaluate,
    forward_evaluate_strings, generate_strings, joint_probability, maximization_step,
    maximization_step_strings, read_model, stochastic_distance, train, train_classifier, train_strings,
    uniform_mixture, viterbi_distance, write_model, Alphabet, ClassifierModel, ClassifierTrainOptions,
    CostFunction, EditAccumulator, EditOp, FactoredAccumulator, FactoredTrainOptions, FactoredTransducer,
    Levenshtein, Model, PairCorpus, StochasticDistance, SymbolString, TrainOptions, Transducer,
    TyingScheme,
};

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 local maxima of EM on <abb,cc>", local_maxima),
        ("2 agreement with exhaustive enumeration", oracle_equivalence),
        ("3 viterbi distance equals classic edit distance", viterbi_classic_identity),
        ("4 lattice and EM consistency", consistency),
        ("5 length-conditioned normalization", length_conditioned_normalization),
        ("6 mixture EM halves the levenshtein error", synthetic_classification),
        ("7 ad-hoc training trails mixture EM", adhoc_direction),
        ("8 geometric sequence-length law", geometric_lengths),
        ("9 bit-exact model round trips", round_trips),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.2}s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn bits_of(ll: f64) -> f64 {
    -ll / LN_2
}

// ---------------------------------------------------------------- 1

fn local_maxima() -> Verdict {
    let start = Instant::now();
    let a = letters('a', 2);
    let c = letters('c', 1);
    let x = a.parse("a b b").unwrap();
    let y = c.parse("c c").unwrap();
    let space = Transducer::new_uniform(a.clone(), c.clone()).space().clone();
    let corpus = PairCorpus::new(space.clone(), vec![(x, y)]).unwrap();
    let (sa, sb, sc) = (a.symbol("a").unwrap(), a.symbol("b").unwrap(), c.symbol("c").unwrap());

    // normalized edit distributions of the three fixed points and their bits
    let point = |pairs: &[(EditOp, f64)]| {
        let mut v = vec![0.0; space.num_edits()];
        for &(op, p) in pairs {
            v[space.index(op)] = p;
        }
        v
    };
    let targets = [
        (point(&[(EditOp::Del(sa), 1.0 / 3.0), (EditOp::Sub(sb, sc), 2.0 / 3.0)]), 6.0),
        (
            point(&[
                (EditOp::Sub(sa, sc), 1.0 / 3.0),
                (EditOp::Sub(sb, sc), 1.0 / 3.0),
                (EditOp::Del(sb), 1.0 / 3.0),
            ]),
            7.0,
        ),
        (
            point(&[
                (EditOp::Sub(sa, sc), 2.0 / 9.0),
                (EditOp::Sub(sb, sc), 4.0 / 9.0),
                (EditOp::Del(sa), 1.0 / 9.0),
                (EditOp::Del(sb), 2.0 / 9.0),
            ]),
            7.170,
        ),
    ];
    let matches = |dist: &[f64], target: &[f64]| dist.iter().zip(target).all(|(p, q)| (p - q).abs() <= 1e-6);

    let opts = TrainOptions {
        max_iterations: 20_000,
        tolerance: 1e-15,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1996);
    let mut hits = [0usize; 3];
    let mut strays = 0;
    for _ in 0..100 {
        let init = Transducer::random(a.clone(), c.clone(), &mut rng);
        let out = train(&init, &corpus, &opts).unwrap();
        let dist = out.transducer.edit_distribution();
        let bits = bits_of(*out.trace.last().unwrap());
        match targets
            .iter()
            .position(|(t, b)| matches(&dist, t) && (bits - b).abs() <= 0.01)
        {
            Some(i) => hits[i] += 1,
            None => strays += 1,
        }
    }

    // the third point is reached from no random start; check it is fixed
    let (third, third_bits) = &targets[2];
    let mut probs: Vec<f64> = third.iter().map(|p| 0.75 * p).collect();
    probs.push(0.25);
    let phi = Transducer::from_probs(a.clone(), c.clone(), &probs).unwrap();
    let mut acc = EditAccumulator::new(space.clone());
    let ll = expectation_step(&corpus.pairs()[0].0, &corpus.pairs()[0].1, &phi, &mut acc, 1.0)
        .unwrap()
        .unwrap();
    let next = maximization_step(&phi, &acc).unwrap();
    let fixed = matches(&next.edit_distribution(), third) && (next.termination() - 0.25).abs() <= 1e-12;
    let third_ok = (bits_of(ll) - third_bits).abs() <= 0.01;

    let elapsed = start.elapsed();
    let ok = strays == 0 && fixed && third_ok && elapsed < Duration::from_secs(5);
    (
        ok,
        format!(
            "runs at 6.000/7.000/7.170 bits = {}/{}/{}, unmatched {strays}; third point fixed: {fixed}, {:.3} bits; {:.2}s < 5s",
            hits[0],
            hits[1],
            hits[2],
            bits_of(ll),
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 2

fn oracle_equivalence() -> Verdict {
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    let mut note = |what: &str, a: f64, b: f64, bad: &mut Vec<String>| {
        if !rel_close(a, b, TOL) {
            bad.push(format!("{what}: {a} vs {b}"));
        } else if a != b {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
        }
    };
    for _ in 0..500 {
        let a = letters('a', rng.random_range(1..=3));
        let b = letters('p', rng.random_range(1..=3));
        let x = random_string(&a, 4, &mut rng);
        let y = random_string(&b, 4, &mut rng);

        let t = Transducer::random(a.clone(), b.clone(), &mut rng);
        let e = enumerate(&x, &y, &t);
        note("joint", joint_probability(&x, &y, &t).unwrap(), e.total, &mut bad);
        note("viterbi", (-viterbi_distance(&x, &y, &t).unwrap().bits).exp2(), e.best, &mut bad);
        let mut acc = EditAccumulator::new(t.space().clone());
        expectation_step(&x, &y, &t, &mut acc, 1.0).unwrap();
        for (got, want) in acc.counts().iter().zip(&e.counts) {
            note("edit count", *got, *want, &mut bad);
        }

        let f = FactoredTransducer::random(a.clone(), b.clone(), &mut rng);
        let fe = enumerate_factored(&x, &y, &f);
        note("conditional", conditional_probability(&x, &y, &f).unwrap(), fe.total, &mut bad);
        let (vit, sto) = conditional_distances(&x, &y, &f).unwrap();
        note("conditional viterbi", (-vit).exp2(), fe.best, &mut bad);
        note("conditional stochastic", (-sto).exp2(), fe.total, &mut bad);
        let mut facc = FactoredAccumulator::new(&f);
        expectation_step_strings(&x, &y, &f, &mut facc).unwrap();
        for (got, want) in facc.chi.iter().zip(&fe.chi) {
            note("chi", *got, *want, &mut bad);
        }
        for (got, want) in facc
            .gamma_d
            .iter()
            .chain(&facc.gamma_i)
            .chain(&facc.gamma_s)
            .zip(fe.gamma_d.iter().chain(&fe.gamma_i).chain(&fe.gamma_s))
        {
            note("gamma", *got, *want, &mut bad);
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(60);
    let detail = match bad.first() {
        Some(first) => format!("{} mismatches, first {first}", bad.len()),
        None => format!("500 instances, worst relative deviation {worst:.1e} <= 1e-10; {:.2}s < 60s", elapsed.as_secs_f64()),
    };
    (ok, detail)
}

// ---------------------------------------------------------------- 3

fn viterbi_classic_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = letters('a', rng.random_range(1..=4));
        let b = letters('p', rng.random_range(1..=4));
        let t = Transducer::random(a.clone(), b.clone(), &mut rng);
        let x = random_string(&a, 8, &mut rng);
        let y = random_string(&b, 8, &mut rng);
        let vit = viterbi_distance(&x, &y, &t).unwrap().bits + t.termination().log2();
        let (classic, _) = classic_edit_distance(&x, &y, &CostFunction::from_transducer(&t)).unwrap();
        worst = worst.max((vit - classic).abs());
    }
    (worst <= 1e-9, format!("1000 instances, max |difference| {worst:.1e} <= 1e-9"))
}

// ---------------------------------------------------------------- 4

fn monotone(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0))
}

fn normalized(probs: &[f64]) -> bool {
    (probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9
}

/// Log-probabilities agree to 1e-12 relative in probability.
fn same_log(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn consistency() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures: Vec<String> = Vec::new();

    // lattices
    for _ in 0..200 {
        let a = letters('a', rng.random_range(1..=4));
        let b = letters('p', rng.random_range(1..=4));
        let x = random_string(&a, 12, &mut rng);
        let y = random_string(&b, 12, &mut rng);
        let t = Transducer::random(a.clone(), b.clone(), &mut rng);
        let (al, be) = (forward_evaluate(&x, &y, &t).unwrap(), backward_evaluate(&x, &y, &t).unwrap());
        if !same_log(al.last(), be.log(0, 0)) {
            failures.push("beta00 != alphaTV".into());
        }
        if stochastic_distance(&x, &y, &t).unwrap() > viterbi_distance(&x, &y, &t).unwrap().bits + 1e-9 {
            failures.push("stochastic > viterbi".into());
        }
        let f = FactoredTransducer::random(a, b, &mut rng);
        let (al, be) = (
            forward_evaluate_strings(&x, &y, &f).unwrap(),
            backward_evaluate_strings(&x, &y, &f).unwrap(),
        );
        if !same_log(al.last(), be.log(0, 0)) {
            failures.push("length-conditioned beta00 != alphaTV".into());
        }
        let (vit, sto) = conditional_distances(&x, &y, &f).unwrap();
        if sto > vit + 1e-9 {
            failures.push("length-conditioned stochastic > viterbi".into());
        }
    }

    // plain EM, stepping by hand to see every M-step
    let a = letters('a', 4);
    let b = letters('p', 3);
    // pin termination so generated pairs stay short
    let raw = Transducer::random(a.clone(), b.clone(), &mut rng).edit_distribution();
    let mut probs: Vec<f64> = raw.iter().map(|p| 0.9 * p).collect();
    probs.push(0.1);
    let truth = Transducer::from_probs(a.clone(), b.clone(), &probs).unwrap();
    let pairs: Vec<(SymbolString, SymbolString)> =
        (0..300).map(|_| truth.generate(&mut rng).unwrap().yield_pair()).collect();
    let corpus = PairCorpus::new(truth.space().clone(), pairs).unwrap();
    let mut phi = Transducer::random(a.clone(), b.clone(), &mut rng);
    let mut trace = Vec::new();
    for _ in 0..10 {
        let mut acc = EditAccumulator::new(phi.space().clone());
        let mut ll = 0.0;
        for (x, y) in corpus.pairs() {
            ll += expectation_step(x, y, &phi, &mut acc, 1.0).unwrap().unwrap();
        }
        trace.push(ll);
        phi = maximization_step(&phi, &acc).unwrap();
        if !normalized(&phi.probs()) {
            failures.push("transducer not normalized after M-step".into());
        }
    }
    let out = train(
        &Transducer::random(a.clone(), b.clone(), &mut rng),
        &corpus,
        &TrainOptions {
            tolerance: 0.0,
            ..Default::default()
        },
    )
    .unwrap();
    if !monotone(&trace) || !monotone(&out.trace) || out.trace.len() != 11 {
        failures.push("train likelihood not monotone".into());
    }
    let tied = train(
        &Transducer::random(a.clone(), b.clone(), &mut rng),
        &corpus,
        &TrainOptions {
            tolerance: 0.0,
            tying: Some(TyingScheme::four_class(corpus.space().clone())),
            ..Default::default()
        },
    )
    .unwrap();
    if !monotone(&tied.trace) || !normalized(&tied.transducer.probs()) {
        failures.push("tied train not monotone or not normalized".into());
    }

    // classifier EM; exact maximizer only without lexicon smoothing
    let bench = generate_benchmark(&SynthConfig {
        classes: 10,
        train: 300,
        test: 10,
        seed: 4,
        ..Default::default()
    })
    .unwrap();
    let sa = bench.alphabet.clone();
    let mut model = ClassifierModel::new(Transducer::random(sa.clone(), sa.clone(), &mut rng), bench.lexicon.clone()).unwrap();
    let mut ctrace = Vec::new();
    for _ in 0..10 {
        let mut acc = ClassifierAccumulator::new(&model, 0.0, 0.0);
        let mut ll = 0.0;
        for (w, y) in bench.train.samples() {
            ll += mixture_expectation_step(w, y, &model, &mut acc).unwrap().unwrap();
        }
        ctrace.push(ll);
        model = mixture_maximization_step(&model, &acc, None).unwrap();
        let lex: Vec<f64> = model.lexicon().entries().iter().map(|e| e.prob()).collect();
        if !normalized(&model.transducer().unwrap().probs()) || !normalized(&lex) {
            failures.push("classifier not normalized after M-step".into());
        }
    }
    let cout = train_classifier(
        &ClassifierModel::new(Transducer::new_uniform(sa.clone(), sa.clone()), bench.lexicon.clone()).unwrap(),
        &bench.train,
        &ClassifierTrainOptions {
            tolerance: 0.0,
            lexicon_smoothing: 0.0,
            ..Default::default()
        },
    )
    .unwrap();
    if !monotone(&ctrace) || !monotone(&cout.trace) || cout.trace.len() != 11 {
        failures.push("train_classifier likelihood not monotone".into());
    }

    // length-conditioned EM
    let ftruth = FactoredTransducer::random(a.clone(), b.clone(), &mut rng);
    let fpairs: Vec<(SymbolString, SymbolString)> = (0..300)
        .map(|_| {
            let (t, v) = (rng.random_range(0..=6), rng.random_range(0..=6));
            generate_strings(t, v, &ftruth, &mut rng)
        })
        .collect();
    let fcorpus = PairCorpus::new(ftruth.space().clone(), fpairs).unwrap();
    let mut f = FactoredTransducer::random(a.clone(), b.clone(), &mut rng);
    let mut ftrace = Vec::new();
    for _ in 0..10 {
        let mut acc = FactoredAccumulator::new(&f);
        let mut ll = 0.0;
        for (x, y) in fcorpus.pairs() {
            ll += expectation_step_strings(x, y, &f, &mut acc).unwrap().unwrap();
        }
        ftrace.push(ll);
        f = maximization_step_strings(&f, &acc).unwrap();
        let exps = |l: &[f64]| l.iter().map(|v| v.exp()).collect::<Vec<_>>();
        if !normalized(&exps(&f.log_omega()))
            || !normalized(&exps(f.log_delta_d()))
            || !normalized(&exps(f.log_delta_i()))
            || !normalized(&exps(f.log_delta_s()))
        {
            failures.push("factored model not normalized after M-step".into());
        }
    }
    let fout = train_strings(
        &FactoredTransducer::uniform(a, b),
        &fcorpus,
        &FactoredTrainOptions {
            tolerance: 0.0,
            ..Default::default()
        },
    )
    .unwrap();
    if !monotone(&ftrace) || !monotone(&fout.trace) || fout.trace.len() != 11 {
        failures.push("train_strings likelihood not monotone".into());
    }

    failures.dedup();
    if failures.is_empty() {
        (
            true,
            "lattices agree and bound, every M-step normalized, 10-iteration traces monotone for train, train_classifier, train_strings".into(),
        )
    } else {
        (false, failures.join("; "))
    }
}

// ---------------------------------------------------------------- 5

fn length_conditioned_normalization() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for na in 1..=3 {
        for nb in 1..=3 {
            let a = letters('a', na);
            let b = letters('p', nb);
            let xs: Vec<Vec<SymbolString>> = (0..=3).map(|n| common::all_strings(&a, n)).collect();
            let ys: Vec<Vec<SymbolString>> = (0..=3).map(|n| common::all_strings(&b, n)).collect();
            for _ in 0..50 {
                let f = FactoredTransducer::random(a.clone(), b.clone(), &mut rng);
                for xs_t in &xs {
                    for ys_v in &ys {
                        let mut total = 0.0;
                        for x in xs_t {
                            for y in ys_v {
                                total += conditional_probability(x, y, &f).unwrap();
                            }
                        }
                        worst = worst.max((total - 1.0).abs());
                        cases += 1;
                    }
                }
            }
        }
    }
    (worst <= 1e-9, format!("{cases} (theta, T, V) cases, max |sum - 1| {worst:.1e} <= 1e-9"))
}

// ---------------------------------------------------------------- 6, 7

struct BenchmarkResult {
    levenshtein: f64,
    mixture_em: f64,
    adhoc: f64,
    elapsed: Duration,
}

fn run_benchmark() -> BenchmarkResult {
    let start = Instant::now();
    let bench = generate_benchmark(&SynthConfig::default()).unwrap();
    let a = bench.alphabet.clone();
    let lex = &bench.lexicon;
    let levenshtein = score_nearest(lex, &Levenshtein::new(a.clone(), a.clone()), &bench.test, TIE_TOLERANCE).unwrap();
    let init = Transducer::new_uniform(a.clone(), a.clone());
    let model = ClassifierModel::new(init.clone(), lex.clone()).unwrap();
    let trained = train_classifier(&model, &bench.train, &ClassifierTrainOptions::default()).unwrap();
    let mixture_em = score(&trained.model, &bench.test, TIE_TOLERANCE).unwrap();
    let adhoc_t = adhoc_train(&init, &bench.train, lex, &TrainOptions::default()).unwrap();
    let adhoc = score_nearest(lex, &StochasticDistance(&adhoc_t.transducer), &bench.test, TIE_TOLERANCE).unwrap();
    BenchmarkResult {
        levenshtein,
        mixture_em,
        adhoc,
        elapsed: start.elapsed(),
    }
}

static BENCHMARK: OnceLock<BenchmarkResult> = OnceLock::new();

fn synthetic_classification() -> Verdict {
    let r = BENCHMARK.get_or_init(run_benchmark);
    let ok = r.mixture_em <= 0.5 * r.levenshtein && r.elapsed < Duration::from_secs(300);
    (
        ok,
        format!(
            "mixture EM {:.2}% <= half of levenshtein {:.2}%; benchmark {:.1}s < 300s",
            100.0 * r.mixture_em,
            100.0 * r.levenshtein,
            r.elapsed.as_secs_f64()
        ),
    )
}

fn adhoc_direction() -> Verdict {
    let r = BENCHMARK.get_or_init(run_benchmark);
    (
        r.adhoc > r.mixture_em,
        format!(
            "ad-hoc {:.2}% > mixture EM {:.2}% (levenshtein {:.2}%)",
            100.0 * r.adhoc,
            100.0 * r.mixture_em,
            100.0 * r.levenshtein
        ),
    )
}

// ---------------------------------------------------------------- 8

fn geometric_lengths() -> Verdict {
    let a = letters('a', 2);
    let b = letters('p', 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t = Transducer::random(a, b, &mut rng);
    const DRAWS: usize = 100_000;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..DRAWS {
        *counts.entry(t.generate(&mut rng).unwrap().num_edits()).or_default() += 1;
    }
    // bins 0..k-1 each expecting at least 5 draws, plus a tail bin
    let mut k = 0;
    while DRAWS as f64 * t.sequence_length_prob(k as u64) >= 5.0 {
        k += 1;
    }
    let mut stat = 0.0;
    let mut head = 0.0;
    let mut seen = 0;
    for n in 0..k {
        let expected = DRAWS as f64 * t.sequence_length_prob(n as u64);
        let observed = *counts.get(&n).unwrap_or(&0) as f64;
        stat += (observed - expected).powi(2) / expected;
        head += expected;
        seen += observed as usize;
    }
    let tail_expected = DRAWS as f64 - head;
    let tail_observed = (DRAWS - seen) as f64;
    stat += (tail_observed - tail_expected).powi(2) / tail_expected;
    let p = 1.0 - ChiSquared::new(k as f64).unwrap().cdf(stat);
    (
        p > 0.001,
        format!(
            "delta(#) = {:.3}, chi-square {stat:.2} on {k} dof, p = {p:.3} > 0.001",
            t.termination()
        ),
    )
}

// ---------------------------------------------------------------- 9

fn round_trips() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = Alphabet::new(["aa", "ae", "k", "t"]).unwrap();
    let b = letters('p', 3);
    let t = Transducer::random(a.clone(), b.clone(), &mut rng);
    let f = FactoredTransducer::random(a.clone(), b.clone(), &mut rng);
    let m = uniform_mixture(vec![t.clone(), Transducer::random(a.clone(), b.clone(), &mut rng)]).unwrap();
    let bench = generate_benchmark(&SynthConfig {
        classes: 10,
        train: 100,
        test: 10,
        seed: 9,
        ..Default::default()
    })
    .unwrap();
    let sa = bench.alphabet.clone();
    let trained = train_classifier(
        &ClassifierModel::new(Transducer::new_uniform(sa.clone(), sa), bench.lexicon.clone()).unwrap(),
        &bench.train,
        &ClassifierTrainOptions {
            max_iterations: 2,
            ..Default::default()
        },
    )
    .unwrap()
    .model;
    let models = [
        Model::Transducer(t),
        Model::Factored(f),
        Model::Mixture(m),
        Model::Lexicon(bench.lexicon.clone()),
        Model::Classifier(trained),
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    for model in &models {
        let text = write_model(model);
        let back = read_model(&text, "memory").unwrap();
        let path = dir.path().join(format!("{}.model", model.kind()));
        stedit::save_model(&path, model).unwrap();
        let loaded = stedit::load_model(&path).unwrap();
        if &back != model || &loaded != model || write_model(&loaded) != text {
            bad.push(model.kind());
        }
    }
    (
        bad.is_empty(),
        if bad.is_empty() {
            "transducer, factored, mixture, lexicon and classifier identical after save/load".into()
        } else {
            format!("round trip changed: {}", bad.join(", "))
        },
    )
}
