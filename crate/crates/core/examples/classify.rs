//! Hidden-prototype classification with homophones, pronunciation variants
//! and a utility function.

use std::collections::HashMap;

use stedit::classifier::TIE_TOLERANCE;
use stedit::{
    class_posteriors, classify, classify_with_utility, Alphabet, ClassifierModel, EditOp, Lexicon, Transducer,
    UtilityFunction,
};

fn main() -> stedit::Result<()> {
    // phoneme-like tokens
    let a = Alphabet::new(["t", "uw", "ax", "f", "ow", "r"])?;
    let lexicon = Lexicon::new(
        a.clone(),
        vec![
            ("to".into(), a.parse("t uw")?, 0.25),
            ("to".into(), a.parse("t ax")?, 0.15),
            ("two".into(), a.parse("t uw")?, 0.2),
            ("four".into(), a.parse("f ow r")?, 0.3),
            ("for".into(), a.parse("f ax r")?, 0.1),
        ],
    )?;
    let channel = Transducer::from_fn(a.clone(), a.clone(), |op| match op {
        EditOp::Sub(x, y) if x == y => 0.13,
        EditOp::End => 0.1,
        // 30 confusions, 6 deletions, 6 insertions share the rest
        _ => 0.12 / 42.0,
    })?;
    let model = ClassifierModel::new(channel, lexicon)?;

    for obs in ["t uw", "t ax", "f ax r", "f ow"] {
        let y = a.parse(obs)?;
        let post = class_posteriors(&y, &model)?;
        let shown: Vec<String> = post.iter().map(|(w, p)| format!("{w}={p:.3}")).collect();
        let decision = classify(&y, &model, TIE_TOLERANCE)?.expect("every class is reachable");
        println!("{obs:>8}: {:<12} {}", decision.classes(model.lexicon()).join("|"), shown.join(" "));
    }

    // mistaking "four" for anything else costs ten times as much
    let mut overrides = HashMap::new();
    for w in ["to", "two", "for"] {
        overrides.insert((w.to_string(), "four".to_string()), -10.0);
    }
    let utility = UtilityFunction::new(1.0, 0.0, overrides)?;
    let y = a.parse("f ax r")?;
    let d = classify_with_utility(&y, &model, &utility, TIE_TOLERANCE)?.expect("nonzero posterior");
    println!("with utilities, \"f ax r\" -> {}", d.classes(model.lexicon()).join("|"));
    Ok(())
}
