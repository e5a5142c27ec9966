use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn stedit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stedit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = stedit(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn train_distance_reaches_a_fixed_point() {
    let dir = TempDir::new().unwrap();
    let pairs = write(dir.path(), "pairs.tsv", "a b b\tc c\n");
    let a = write(dir.path(), "a.txt", "a b\n");
    let b = write(dir.path(), "b.txt", "c\n");
    let model = dir.path().join("t.model");
    let out = ok(&[
        "train-distance", "--pairs", s(&pairs), "--alphabet-a", s(&a), "--alphabet-b", s(&b),
        "--iterations", "2000", "--tolerance", "1e-14", "--init", "random", "--seed", "3", "-o", s(&model),
    ]);
    assert!(!out.is_empty());
    let d = ok(&["distance", "--model", s(&model), "a b b", "c c"]);
    let bits: f64 = d.split_whitespace().next().unwrap().parse().unwrap();
    assert!([6.0, 7.0, 7.170].iter().any(|v| (bits - v).abs() < 0.01), "{d}");

    let tied = dir.path().join("tied.model");
    ok(&[
        "train-distance", "--pairs", s(&pairs), "--alphabet-a", s(&a), "--alphabet-b", s(&b),
        "--tying", "four-class", "-o", s(&tied),
    ]);
    assert!(fs::read_to_string(&tied).unwrap().starts_with("stedit-model 1"));
}

#[test]
fn distances_end_to_end() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.txt", "a\n");
    let b = write(dir.path(), "b.txt", "b\n");
    let model = dir.path().join("u.model");
    // zero iterations leaves the uniform model
    let pairs = write(dir.path(), "p.tsv", "a\tb\n");
    ok(&[
        "train-distance", "--pairs", s(&pairs), "--alphabet-a", s(&a), "--alphabet-b", s(&b),
        "--iterations", "0", "-o", s(&model),
    ]);
    let sto: f64 = ok(&["distance", "--model", s(&model), "a", "b"]).trim().parse().unwrap();
    assert!((sto - (-(3.0f64 / 32.0).log2())).abs() < 1e-9);
    let vit = ok(&["distance", "--model", s(&model), "--kind", "viterbi", "--alignment", "a", "b"]);
    let bits: f64 = vit.split_whitespace().next().unwrap().parse().unwrap();
    assert!((bits - 4.0).abs() < 1e-9);

    let ab = write(dir.path(), "ab.txt", "a b\n");
    let c = write(dir.path(), "c.txt", "c\n");
    let lev = ok(&[
        "distance", "--kind", "levenshtein", "--alphabet-a", s(&ab), "--alphabet-b", s(&c), "a b b", "c c",
    ]);
    assert_eq!(lev.split_whitespace().next().unwrap().parse::<f64>().unwrap(), 3.0);
}

#[test]
fn classifier_pipeline() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data");
    ok(&[
        "synth-benchmark", "--out-dir", s(&data), "--classes", "10", "--train", "200", "--test", "40", "--seed", "5",
    ]);
    for f in ["alphabet.txt", "lexicon.model", "train.tsv", "test.tsv", "channel.model"] {
        assert!(data.join(f).exists(), "{f}");
    }
    // byte-identical regeneration
    let again = dir.path().join("again");
    ok(&[
        "synth-benchmark", "--out-dir", s(&again), "--classes", "10", "--train", "200", "--test", "40", "--seed", "5",
    ]);
    for f in ["lexicon.model", "train.tsv", "test.tsv", "channel.model"] {
        assert_eq!(fs::read(data.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }

    let model = dir.path().join("clf.model");
    ok(&[
        "train-classifier", "--train", s(&data.join("train.tsv")), "--alphabet-b", s(&data.join("alphabet.txt")),
        "--lexicon", s(&data.join("lexicon.model")), "--iterations", "3", "-o", s(&model),
    ]);
    let built = dir.path().join("built.model");
    ok(&[
        "train-classifier", "--train", s(&data.join("train.tsv")), "--alphabet-b", s(&data.join("alphabet.txt")),
        "--build-lexicon", "from-all", "--test", s(&data.join("test.tsv")), "--fix-word", "--iterations", "2",
        "--scoring", "viterbi", "-o", s(&built),
    ]);

    let table = ok(&["eval", "--model", s(&model), "--model", s(&built), "--test", s(&data.join("test.tsv")), "--levenshtein"]);
    let rates: Vec<f64> = table
        .lines()
        .filter_map(|l| l.split_whitespace().last()?.trim_end_matches('%').parse().ok())
        .collect();
    assert_eq!(rates.len(), 3, "{table}");
    assert!(rates.iter().all(|r| (0.0..=100.0).contains(r)));

    let decisions = ok(&["classify", "--model", s(&model), "--input", s(&data.join("test.tsv"))]);
    assert_eq!(decisions.lines().count(), 40);
    for line in decisions.lines() {
        assert_eq!(line.split('\t').count(), 3, "{line}");
    }
}

#[test]
fn generation_is_seed_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.txt", "a b\n");
    let model = dir.path().join("u.model");
    let pairs = write(dir.path(), "p.tsv", "a b\tb\n");
    ok(&[
        "train-distance", "--pairs", s(&pairs), "--alphabet-a", s(&a), "--iterations", "1", "-o", s(&model),
    ]);
    let one = ok(&["generate", "--model", s(&model), "--count", "50", "--seed", "9"]);
    let two = ok(&["generate", "--model", s(&model), "--count", "50", "--seed", "9"]);
    assert_eq!(one, two);
    assert_eq!(one.lines().count(), 50);

    let factored = dir.path().join("f.model");
    ok(&["factor", "--model", s(&model), "-o", s(&factored)]);
    let pairs = ok(&["generate", "--model", s(&factored), "--count", "20", "--lengths", "3", "2"]);
    for line in pairs.lines() {
        let (x, y) = line.split_once('\t').unwrap();
        assert_eq!((x.split_whitespace().count(), y.split_whitespace().count()), (3, 2));
    }
    let back = dir.path().join("back.model");
    ok(&["factor", "--model", s(&factored), "--unfactor", "-o", s(&back)]);
    assert!(fs::read_to_string(back).unwrap().contains("kind transducer"));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.txt", "a b\n");
    let bad = write(dir.path(), "bad.tsv", "a b\tb\na z\tb\n");
    let out = stedit(&[
        "train-distance", "--pairs", s(&bad), "--alphabet-a", s(&a), "-o", s(&dir.path().join("x.model")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":2:"), "{err}");

    let out = stedit(&["distance", "--model", s(&dir.path().join("missing.model")), "a", "b"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stedit(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn degenerate_models_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.model");
    // only deletions and termination: no insertion or substitution mass
    fs::write(
        &model,
        "stedit-model 1\nkind transducer\nalphabet-a a\nalphabet-b b\ndel a -0.6931471805599453\nend -0.6931471805599453\n",
    )
    .unwrap();
    let out = stedit(&["distance", "--model", s(&model), "a", "b"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "inf");
    let out = stedit(&["factor", "--model", s(&model), "-o", s(&dir.path().join("f.model"))]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
