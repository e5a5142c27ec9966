//! Writing and reading the text model format.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stedit::{factor, read_model, write_model, Alphabet, Model, Transducer};

fn main() -> stedit::Result<()> {
    let a = Alphabet::new(["aa", "ae", "k"])?;
    let b = Alphabet::from_chars("xy")?;
    let t = Transducer::random(a, b, &mut ChaCha8Rng::seed_from_u64(1));

    let text = write_model(&Model::Transducer(t.clone()));
    print!("{text}");
    match read_model(&text, "<memory>")? {
        Model::Transducer(back) => assert_eq!(back, t),
        other => unreachable!("read back a {}", other.kind()),
    }

    let f = Model::Factored(factor(&t)?);
    let text = write_model(&f);
    assert_eq!(read_model(&text, "<memory>")?, f);
    println!("\n{} lines for the factored form; both read back unchanged", text.lines().count());
    Ok(())
}
