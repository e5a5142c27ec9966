//! Adding a word to a trained classifier from a single spelling, without
//! retraining the channel.

use stedit::classifier::TIE_TOLERANCE;
use stedit::synth::{generate_benchmark, SynthConfig};
use stedit::{add_word, classify, train_classifier, ClassifierModel, ClassifierTrainOptions, Transducer};

fn main() -> stedit::Result<()> {
    let bench = generate_benchmark(&SynthConfig {
        classes: 20,
        train: 1000,
        test: 10,
        ..Default::default()
    })?;
    let a = bench.alphabet.clone();
    let model = ClassifierModel::new(Transducer::new_uniform(a.clone(), a.clone()), bench.lexicon.clone())?;
    let trained = train_classifier(&model, &bench.train, &ClassifierTrainOptions::default())?.model;

    let novel = a.parse("j i h g f e d")?;
    let before = classify(&novel, &trained, TIE_TOLERANCE)?.expect("reachable");
    println!("before: {}", before.classes(trained.lexicon()).join("|"));

    let grown = add_word(&trained, "novel", novel.clone(), 1.0 / 21.0)?;
    for obs in ["j i h g f e d", "j i h f e d", "j i h g f e e d"] {
        let y = a.parse(obs)?;
        let d = classify(&y, &grown, TIE_TOLERANCE)?.expect("reachable");
        println!("{obs:>16} -> {} (posterior {:.3})", d.classes(grown.lexicon()).join("|"), d.score);
    }
    Ok(())
}
