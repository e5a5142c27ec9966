//! Learns a string edit distance from pairs drawn from a known channel, with
//! and without tying, and with Viterbi counting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stedit::{
    corpus_log_likelihood, train, Alphabet, ExpectationMode, PairCorpus, TrainOptions, Transducer, TyingScheme,
};

fn main() -> stedit::Result<()> {
    let a = Alphabet::from_chars("abcd")?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // random edits, with termination pinned so pairs average nine edits
    let edits = Transducer::random(a.clone(), a.clone(), &mut rng).edit_distribution();
    let mut probs: Vec<f64> = edits.iter().map(|p| 0.9 * p).collect();
    probs.push(0.1);
    let truth = Transducer::from_probs(a.clone(), a.clone(), &probs)?;
    let pairs = (0..2000)
        .map(|_| truth.generate(&mut rng).map(|al| al.yield_pair()))
        .collect::<stedit::Result<Vec<_>>>()?;
    let corpus = PairCorpus::new(truth.space().clone(), pairs)?;
    println!("true model: {:.4} nats/pair", corpus_log_likelihood(&truth, &corpus) / corpus.len() as f64);

    let init = Transducer::new_uniform(a.clone(), a.clone());
    let runs = [
        ("full", TrainOptions { max_iterations: 50, ..Default::default() }),
        (
            "viterbi",
            TrainOptions {
                max_iterations: 50,
                mode: ExpectationMode::Viterbi,
                ..Default::default()
            },
        ),
        (
            "four-class tied",
            TrainOptions {
                max_iterations: 50,
                tying: Some(TyingScheme::four_class(corpus.space().clone())),
                ..Default::default()
            },
        ),
    ];
    for (name, opts) in runs {
        let out = train(&init, &corpus, &opts)?;
        println!(
            "{name:>16}: {:.4} nats/pair after {} iterations{}",
            corpus_log_likelihood(&out.transducer, &corpus) / corpus.len() as f64,
            out.iterations,
            if out.converged { " (converged)" } else { "" }
        );
    }
    Ok(())
}
