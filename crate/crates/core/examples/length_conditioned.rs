//! The length-conditioned model: translate a transducer, sample strings of
//! fixed lengths, and reestimate from them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stedit::{
    conditional_distances, conditional_probability, factor, generate_strings, train_strings, unfactor,
    Alphabet, EditKind, FactoredTrainOptions, FactoredTransducer, PairCorpus, Transducer,
};

fn main() -> stedit::Result<()> {
    let a = Alphabet::from_chars("ab")?;
    let b = Alphabet::from_chars("xyz")?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = Transducer::random(a.clone(), b.clone(), &mut rng);
    let f = factor(&t)?;
    println!(
        "omega: del {:.3} ins {:.3} sub {:.3}",
        f.omega(EditKind::Deletion),
        f.omega(EditKind::Insertion),
        f.omega(EditKind::Substitution)
    );
    let back = unfactor(&f);
    let drift = t
        .edit_distribution()
        .iter()
        .zip(back.edit_distribution())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    println!("factor/unfactor drift over edits: {drift:.1e}");

    // conditioned on the lengths, every string pair of those lengths has mass
    let (x, y) = (a.parse("a b b")?, b.parse("x z")?);
    let (vit, sto) = conditional_distances(&x, &y, &f)?;
    println!("p(abb, xz | T=3, V=2) = {:.4}; {sto:.3} bits, best path {vit:.3} bits", conditional_probability(&x, &y, &f)?);

    let pairs = (0..3000)
        .map(|i| generate_strings(2 + i % 5, 1 + i % 4, &f, &mut rng))
        .collect();
    let corpus = PairCorpus::new(f.space().clone(), pairs)?;
    let out = train_strings(
        &FactoredTransducer::uniform(a, b),
        &corpus,
        &FactoredTrainOptions {
            max_iterations: 100,
            tolerance: 1e-9,
        },
    )?;
    let m = out.model;
    println!(
        "reestimated omega after {} iterations: del {:.3} ins {:.3} sub {:.3}",
        out.iterations,
        m.omega(EditKind::Deletion),
        m.omega(EditKind::Insertion),
        m.omega(EditKind::Substitution)
    );
    Ok(())
}
