//! Levenshtein nearest neighbor versus a trained hidden-prototype
//! classifier and the ad-hoc pairing baseline on the synthetic benchmark.

use std::time::Instant;

use stedit::classifier::{score, score_nearest, TIE_TOLERANCE};
use stedit::synth::{generate_benchmark, SynthConfig};
use stedit::{
    adhoc_train, train_classifier, ClassifierModel, ClassifierTrainOptions, Levenshtein,
    StochasticDistance, TrainOptions, Transducer,
};

fn main() -> stedit::Result<()> {
    let start = Instant::now();
    let bench = generate_benchmark(&SynthConfig::default())?;
    let a = bench.alphabet.clone();
    let lex = &bench.lexicon;
    println!(
        "{} classes, {} prototypes, {} train / {} test samples",
        lex.classes().len(),
        lex.len(),
        bench.train.len(),
        bench.test.len()
    );

    let lev = score_nearest(lex, &Levenshtein::new(a.clone(), a.clone()), &bench.test, TIE_TOLERANCE)?;
    println!("levenshtein nearest neighbor   {:6.2}%", 100.0 * lev);

    let truth = ClassifierModel::new(bench.channel.clone(), lex.clone())?;
    println!("true channel, hidden prototype {:6.2}%", 100.0 * score(&truth, &bench.test, TIE_TOLERANCE)?);

    let init = Transducer::new_uniform(a.clone(), a.clone());
    let adhoc = adhoc_train(&init, &bench.train, lex, &TrainOptions::default())?;
    let adhoc_err = score_nearest(lex, &StochasticDistance(&adhoc.transducer), &bench.test, TIE_TOLERANCE)?;
    println!("ad-hoc pairs, nearest neighbor {:6.2}%", 100.0 * adhoc_err);

    let model = ClassifierModel::new(init, lex.clone())?;
    let trained = train_classifier(&model, &bench.train, &ClassifierTrainOptions::default())?;
    let em = score(&trained.model, &bench.test, TIE_TOLERANCE)?;
    println!("mixture EM, hidden prototype   {:6.2}%", 100.0 * em);
    println!("({:.1}s)", start.elapsed().as_secs_f64());
    Ok(())
}
