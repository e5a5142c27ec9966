//! A uniform mixture of a tied and an untied transducer, and the distances
//! it induces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stedit::{
    apply_tying, mixture_stochastic_distance, stochastic_distance, tied_untied_mixture, Alphabet,
    MixtureViterbiDistance, StringDistance, Transducer, TyingScheme,
};

fn main() -> stedit::Result<()> {
    let a = Alphabet::from_chars("xyz")?;
    let untied = Transducer::random(a.clone(), a.clone(), &mut ChaCha8Rng::seed_from_u64(3));
    let tied = apply_tying(&untied, &TyingScheme::four_class(untied.space().clone()))?;
    let mix = tied_untied_mixture(tied.clone(), untied.clone())?;

    for (x, y) in [("x y z", "x y z"), ("x y z", "z y x"), ("x x", "y")] {
        let (xs, ys) = (a.parse(x)?, a.parse(y)?);
        println!(
            "{x:>6} -> {y:<6} tied {:7.3}  untied {:7.3}  mixture {:7.3}  mixture viterbi {:7.3}",
            stochastic_distance(&xs, &ys, &tied)?,
            stochastic_distance(&xs, &ys, &untied)?,
            mixture_stochastic_distance(&xs, &ys, &mix)?,
            MixtureViterbiDistance(&mix).distance(&xs, &ys),
        );
    }
    Ok(())
}
