//! EM on the single pair `<abb, cc>` lands in different local maxima
//! depending on the (strictly positive) random initialization.
//!
//! ```bash
//! cargo run -p stedit --example local_maxima
//! ```

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stedit::{train, Alphabet, EditOp, PairCorpus, TrainOptions, Transducer};

fn main() -> stedit::Result<()> {
    let a = Alphabet::from_chars("ab")?;
    let b = Alphabet::from_chars("c")?;
    let x = a.parse("a b b")?;
    let y = b.parse("c c")?;
    let space = Transducer::new_uniform(a.clone(), b.clone()).space().clone();
    let corpus = PairCorpus::new(space.clone(), vec![(x, y)])?;

    let opts = TrainOptions {
        max_iterations: 20_000,
        tolerance: 1e-15,
        ..Default::default()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(1996);
    let mut found: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for _ in 0..100 {
        let init = Transducer::random(a.clone(), b.clone(), &mut rng);
        let out = train(&init, &corpus, &opts)?;
        let phi = &out.transducer;
        let edits = phi.edit_distribution();
        let label: Vec<String> = space
            .ops()
            .filter(|op| *op != EditOp::End)
            .zip(&edits)
            .filter(|(_, p)| **p > 1e-4)
            .map(|(op, p)| format!("{}={:.4}", space.describe(op), p))
            .collect();
        let bits = -out.trace.last().unwrap() / std::f64::consts::LN_2;
        let entry = found.entry(label.join(" ")).or_insert((0, bits));
        entry.0 += 1;
    }

    println!("{:>5}  {:>8}  edit distribution", "runs", "-log2 p");
    for (label, (runs, bits)) in &found {
        println!("{runs:>5}  {bits:>8.3}  {label}");
    }
    Ok(())
}
