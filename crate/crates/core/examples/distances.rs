//! Stochastic, Viterbi and classic edit distances for one pair of strings.
//!
//! ```bash
//! cargo run -p stedit --example distances
//! ```

use stedit::{
    classic_edit_distance, levenshtein_costs, stochastic_distance, viterbi_distance, Alphabet, CostFunction,
    EditOp, Transducer,
};

fn main() -> stedit::Result<()> {
    let a = Alphabet::from_chars("acgt")?;
    // mostly faithful copying, with a/g and c/t confusions cheaper than the rest
    let t = Transducer::from_fn(a.clone(), a.clone(), |op| match op {
        EditOp::Sub(x, y) if x == y => 0.2,
        EditOp::Sub(x, y) if (x.0 + 2) % 4 == y.0 => 0.03,
        EditOp::Sub(..) => 0.005,
        EditOp::Del(_) | EditOp::Ins(_) => 0.004,
        EditOp::End => 0.076,
    })?;

    let x = a.parse("g a t t a c a")?;
    let y = a.parse("g a c t a c")?;
    let space = t.space();

    let sto = stochastic_distance(&x, &y, &t)?;
    let vit = viterbi_distance(&x, &y, &t)?;
    println!("stochastic  {sto:.3} bits  (every alignment)");
    println!("viterbi     {:.3} bits  (best alignment)", vit.bits);
    if let Some(al) = &vit.alignment {
        let ops: Vec<String> = al.ops.iter().map(|&op| space.describe(op)).collect();
        println!("            {}", ops.join(" "));
    }

    // the Viterbi distance is a classic edit distance under -log2 costs
    let (classic, _) = classic_edit_distance(&x, &y, &CostFunction::from_transducer(&t))?;
    println!("classic     {classic:.3} + {:.3} for termination", -t.termination().log2());

    let (lev, _) = classic_edit_distance(&x, &y, &levenshtein_costs(a.clone(), a.clone()))?;
    println!("levenshtein {lev}");
    Ok(())
}
