//! Text formats for models, corpora and alphabets.
//!
//! Model files are line oriented: a `stedit-model 1` header, a `kind`
//! line, the alphabets, then one record per parameter. Parameters are
//! written as natural-log probabilities using the shortest decimal that
//! reads back to the same `f64`, so a save/load round trip is exact.
//!
//! ```text
//! stedit-model 1
//! kind transducer
//! alphabet-a a b
//! alphabet-b c
//! sub a c -1.6094379124341003
//! del a -1.6094379124341003
//! ...
//! end -1.6094379124341003
//! ```
//!
//! Corpus files hold one sample per line with a TAB between the two
//! fields (`x-tokens TAB y-tokens`, or `class TAB y-tokens`); tokens are
//! separated by spaces. Blank lines and lines starting with `#` are
//! ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::alphabet::{Alphabet, SymbolString};
use crate::classifier::{Channel, ClassifierModel, LabeledCorpus, Lexicon, LexiconEntry, Scoring};
use crate::edit::{EditOp, EditSpace};
use crate::em::PairCorpus;
use crate::error::{Error, Result};
use crate::factored::FactoredTransducer;
use crate::mixture::MixtureTransducer;
use crate::transducer::Transducer;

const MAGIC: &str = "stedit-model";
const VERSION: &str = "1";

/// Any model that can be stored in a model file.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Transducer(Transducer),
    Factored(FactoredTransducer),
    Mixture(MixtureTransducer),
    Lexicon(Lexicon),
    Classifier(ClassifierModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Transducer(_) => "transducer",
            Model::Factored(_) => "factored",
            Model::Mixture(_) => "mixture",
            Model::Lexicon(_) => "lexicon",
            Model::Classifier(_) => "classifier",
        }
    }
}

fn header(out: &mut String, kind: &str) {
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "kind {kind}");
}

fn alphabet_line(out: &mut String, key: &str, a: &Alphabet) {
    let _ = writeln!(out, "{key} {}", a.tokens().join(" "));
}

fn transducer_records(out: &mut String, t: &Transducer) {
    let space = t.space();
    let (a, b) = (space.source(), space.target());
    for (i, &lp) in t.log_probs().iter().enumerate() {
        let _ = match space.op(i) {
            EditOp::Sub(x, y) => writeln!(out, "sub {} {} {lp}", a.token(x), b.token(y)),
            EditOp::Del(x) => writeln!(out, "del {} {lp}", a.token(x)),
            EditOp::Ins(y) => writeln!(out, "ins {} {lp}", b.token(y)),
            EditOp::End => writeln!(out, "end {lp}"),
        };
    }
}

fn mixture_records(out: &mut String, m: &MixtureTransducer) {
    for (c, lw) in m.components().iter().zip(m.log_weights()) {
        let _ = writeln!(out, "component {lw}");
        transducer_records(out, c);
    }
}

fn lexicon_records(out: &mut String, l: &Lexicon) {
    let a = l.alphabet();
    for e in l.entries() {
        let _ = if e.form.is_empty() {
            writeln!(out, "entry {} {}", e.class, e.log_prob)
        } else {
            writeln!(out, "entry {} {} {}", e.class, a.render(&e.form), e.log_prob)
        };
    }
}

/// Serializes a model.
pub fn write_model(m: &Model) -> String {
    let mut out = String::new();
    header(&mut out, m.kind());
    match m {
        Model::Transducer(t) => {
            alphabet_line(&mut out, "alphabet-a", t.source());
            alphabet_line(&mut out, "alphabet-b", t.target());
            transducer_records(&mut out, t);
        }
        Model::Mixture(mx) => {
            alphabet_line(&mut out, "alphabet-a", mx.space().source());
            alphabet_line(&mut out, "alphabet-b", mx.space().target());
            mixture_records(&mut out, mx);
        }
        Model::Factored(f) => {
            let (a, b) = (f.source(), f.target());
            alphabet_line(&mut out, "alphabet-a", a);
            alphabet_line(&mut out, "alphabet-b", b);
            let [d, i, s] = f.log_omega();
            let _ = writeln!(out, "omega {d} {i} {s}");
            for (x, lp) in a.symbols().zip(f.log_delta_d()) {
                let _ = writeln!(out, "ddel {} {lp}", a.token(x));
            }
            for (y, lp) in b.symbols().zip(f.log_delta_i()) {
                let _ = writeln!(out, "dins {} {lp}", b.token(y));
            }
            let pairs = a.symbols().flat_map(|x| b.symbols().map(move |y| (x, y)));
            for ((x, y), lp) in pairs.zip(f.log_delta_s()) {
                let _ = writeln!(out, "dsub {} {} {lp}", a.token(x), b.token(y));
            }
        }
        Model::Lexicon(l) => {
            alphabet_line(&mut out, "alphabet-a", l.alphabet());
            lexicon_records(&mut out, l);
        }
        Model::Classifier(c) => {
            let space = c.channel().space();
            alphabet_line(&mut out, "alphabet-a", space.source());
            alphabet_line(&mut out, "alphabet-b", space.target());
            let scoring = match c.scoring {
                Scoring::Stochastic => "stochastic",
                Scoring::Viterbi => "viterbi",
            };
            let _ = writeln!(out, "scoring {scoring}");
            let _ = writeln!(out, "adapt-word {}", c.adapt_word);
            let _ = writeln!(out, "adapt-entry {}", c.adapt_entry);
            match c.channel() {
                Channel::Single(t) => {
                    let _ = writeln!(out, "channel single");
                    transducer_records(&mut out, t);
                }
                Channel::Mixture(mx) => {
                    let _ = writeln!(out, "channel mixture");
                    mixture_records(&mut out, mx);
                }
            }
            lexicon_records(&mut out, c.lexicon());
        }
    }
    out
}

/// Significant lines of a text file with their 1-based numbers.
struct Lines<'a> {
    origin: &'a str,
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, origin: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.trim();
                (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
            })
            .collect();
        Lines { origin, lines, pos: 0 }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::parse(self.origin, line, msg)
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }

    fn peek_key(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|l| l.1[0])
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let l = self.lines.get(self.pos).cloned();
        self.pos += 1;
        l
    }

    /// The next line, which must start with `key`; returns its arguments.
    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.next() {
            Some((n, toks)) if toks[0] == key => Ok((n, toks[1..].to_vec())),
            Some((n, toks)) => Err(self.err(n, format!("expected `{key}`, found `{}`", toks[0]))),
            None => Err(self.err(self.last_line(), format!("missing `{key}` line"))),
        }
    }

    fn number(&self, line: usize, tok: &str) -> Result<f64> {
        let v: f64 = tok
            .parse()
            .map_err(|_| self.err(line, format!("invalid number {tok:?}")))?;
        if v.is_nan() || v == f64::INFINITY {
            return Err(self.err(line, format!("invalid log-probability {tok}")));
        }
        Ok(v)
    }

    fn symbol(&self, line: usize, a: &Alphabet, tok: &str) -> Result<crate::alphabet::Symbol> {
        a.symbol(tok)
            .ok_or_else(|| self.err(line, format!("unknown symbol {tok:?}")))
    }

    fn alphabet(&mut self, key: &str) -> Result<Alphabet> {
        let (n, toks) = self.expect(key)?;
        Alphabet::new(toks).map_err(|e| self.err(n, e.to_string()))
    }

    fn boolean(&mut self, key: &str) -> Result<bool> {
        let (n, args) = self.expect(key)?;
        match args.as_slice() {
            ["true"] => Ok(true),
            ["false"] => Ok(false),
            _ => Err(self.err(n, format!("`{key}` takes true or false"))),
        }
    }

    fn arity(&self, line: usize, args: &[&str], n: usize, key: &str) -> Result<()> {
        if args.len() != n {
            return Err(self.err(line, format!("`{key}` takes {n} fields, found {}", args.len())));
        }
        Ok(())
    }

    /// Consecutive `sub`/`del`/`ins`/`end` records; absent events get
    /// probability zero.
    fn transducer(&mut self, space: &EditSpace) -> Result<Transducer> {
        let (a, b) = (space.source(), space.target());
        let mut logs = vec![f64::NEG_INFINITY; space.len()];
        let mut seen = vec![false; space.len()];
        while let Some(key @ ("sub" | "del" | "ins" | "end")) = self.peek_key() {
            let (n, toks) = self.next().expect("peeked");
            let args = &toks[1..];
            let (op, lp) = match key {
                "sub" => {
                    self.arity(n, args, 3, key)?;
                    let op = EditOp::Sub(self.symbol(n, a, args[0])?, self.symbol(n, b, args[1])?);
                    (op, args[2])
                }
                "del" => {
                    self.arity(n, args, 2, key)?;
                    (EditOp::Del(self.symbol(n, a, args[0])?), args[1])
                }
                "ins" => {
                    self.arity(n, args, 2, key)?;
                    (EditOp::Ins(self.symbol(n, b, args[0])?), args[1])
                }
                _ => {
                    self.arity(n, args, 1, key)?;
                    (EditOp::End, args[0])
                }
            };
            let i = space.index(op);
            if seen[i] {
                return Err(self.err(n, format!("duplicate record for {}", space.describe(op))));
            }
            seen[i] = true;
            logs[i] = self.number(n, lp)?;
        }
        Transducer::from_log_probs(a.clone(), b.clone(), logs)
    }

    fn mixture(&mut self, space: &EditSpace) -> Result<MixtureTransducer> {
        let mut comps = Vec::new();
        let mut weights = Vec::new();
        let start = self.lines.get(self.pos).map_or(self.last_line(), |l| l.0);
        while self.peek_key() == Some("component") {
            let (n, args) = self.expect("component")?;
            self.arity(n, &args, 1, "component")?;
            weights.push(self.number(n, args[0])?);
            comps.push(self.transducer(space)?);
        }
        MixtureTransducer::from_log_weights(comps, weights).map_err(|e| self.err(start, e.to_string()))
    }

    fn lexicon(&mut self, a: &Alphabet) -> Result<Lexicon> {
        let mut entries = Vec::new();
        let start = self.lines.get(self.pos).map_or(self.last_line(), |l| l.0);
        while self.peek_key() == Some("entry") {
            let (n, args) = self.expect("entry")?;
            if args.len() < 2 {
                return Err(self.err(n, "`entry` needs a class and a log-probability"));
            }
            let form = args[1..args.len() - 1]
                .iter()
                .map(|t| self.symbol(n, a, t))
                .collect::<Result<Vec<_>>>()?;
            entries.push(LexiconEntry {
                class: args[0].to_string(),
                form: SymbolString(form),
                log_prob: self.number(n, args[args.len() - 1])?,
            });
        }
        Lexicon::from_entries(a.clone(), entries).map_err(|e| self.err(start, e.to_string()))
    }

    fn factored(&mut self, a: &Alphabet, b: &Alphabet) -> Result<FactoredTransducer> {
        let (n, args) = self.expect("omega")?;
        self.arity(n, &args, 3, "omega")?;
        let omega = [
            self.number(n, args[0])?,
            self.number(n, args[1])?,
            self.number(n, args[2])?,
        ];
        let mut dd = vec![f64::NEG_INFINITY; a.len()];
        let mut di = vec![f64::NEG_INFINITY; b.len()];
        let mut ds = vec![f64::NEG_INFINITY; a.len() * b.len()];
        while let Some(key @ ("ddel" | "dins" | "dsub")) = self.peek_key() {
            let (n, toks) = self.next().expect("peeked");
            let args = &toks[1..];
            match key {
                "ddel" => {
                    self.arity(n, args, 2, key)?;
                    dd[self.symbol(n, a, args[0])?.index()] = self.number(n, args[1])?;
                }
                "dins" => {
                    self.arity(n, args, 2, key)?;
                    di[self.symbol(n, b, args[0])?.index()] = self.number(n, args[1])?;
                }
                _ => {
                    self.arity(n, args, 3, key)?;
                    let i = self.symbol(n, a, args[0])?.index() * b.len() + self.symbol(n, b, args[1])?.index();
                    ds[i] = self.number(n, args[2])?;
                }
            }
        }
        FactoredTransducer::from_log_params(a.clone(), b.clone(), omega, dd, di, ds)
            .map_err(|e| self.err(n, e.to_string()))
    }

    fn finish(&mut self) -> Result<()> {
        match self.next() {
            None => Ok(()),
            Some((n, toks)) => Err(self.err(n, format!("unexpected record `{}`", toks[0]))),
        }
    }
}

/// Parses a model file; `origin` names the source in error messages.
pub fn read_model(text: &str, origin: &str) -> Result<Model> {
    let mut r = Lines::new(text, origin);
    match r.next() {
        Some((_, toks)) if toks.len() == 2 && toks[0] == MAGIC && toks[1] == VERSION => {}
        Some((n, _)) => return Err(r.err(n, format!("expected `{MAGIC} {VERSION}` header"))),
        None => return Err(r.err(0, "empty model file")),
    }
    let (n, args) = r.expect("kind")?;
    let kind = args.first().copied().unwrap_or("");
    let model = match kind {
        "transducer" | "mixture" | "factored" => {
            let a = r.alphabet("alphabet-a")?;
            let b = r.alphabet("alphabet-b")?;
            let space = EditSpace::new(a.clone(), b.clone());
            match kind {
                "transducer" => Model::Transducer(r.transducer(&space)?),
                "mixture" => Model::Mixture(r.mixture(&space)?),
                _ => Model::Factored(r.factored(&a, &b)?),
            }
        }
        "lexicon" => {
            let a = r.alphabet("alphabet-a")?;
            Model::Lexicon(r.lexicon(&a)?)
        }
        "classifier" => {
            let a = r.alphabet("alphabet-a")?;
            let b = r.alphabet("alphabet-b")?;
            let space = EditSpace::new(a.clone(), b);
            let (sn, sargs) = r.expect("scoring")?;
            let scoring = match sargs.as_slice() {
                ["stochastic"] => Scoring::Stochastic,
                ["viterbi"] => Scoring::Viterbi,
                _ => return Err(r.err(sn, "`scoring` takes stochastic or viterbi")),
            };
            let adapt_word = r.boolean("adapt-word")?;
            let adapt_entry = r.boolean("adapt-entry")?;
            let (cn, cargs) = r.expect("channel")?;
            let channel = match cargs.as_slice() {
                ["single"] => Channel::Single(r.transducer(&space)?),
                ["mixture"] => Channel::Mixture(r.mixture(&space)?),
                _ => return Err(r.err(cn, "`channel` takes single or mixture")),
            };
            let lexicon = r.lexicon(&a)?;
            let m = ClassifierModel::with_channel(channel, lexicon).map_err(|e| r.err(cn, e.to_string()))?;
            Model::Classifier(m.with_scoring(scoring).with_switches(adapt_word, adapt_entry))
        }
        other => return Err(r.err(n, format!("unknown model kind {other:?}"))),
    };
    r.finish()?;
    Ok(model)
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn save_model(path: impl AsRef<Path>, m: &Model) -> Result<()> {
    write_file(path.as_ref(), &write_model(m))
}

/// Writes a text file, naming the path in any error.
pub fn save_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    write_file(path.as_ref(), text)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = read_file(path)?;
    read_model(&text, &path.display().to_string())
}

/// Whitespace-separated tokens; `#` lines are comments.
pub fn read_alphabet(text: &str, origin: &str) -> Result<Alphabet> {
    let r = Lines::new(text, origin);
    let toks: Vec<&str> = r.lines.iter().flat_map(|l| l.1.iter().copied()).collect();
    Alphabet::new(toks).map_err(|e| r.err(r.lines.first().map_or(0, |l| l.0), e.to_string()))
}

pub fn write_alphabet(a: &Alphabet) -> String {
    format!("{}\n", a.tokens().join(" "))
}

pub fn load_alphabet(path: impl AsRef<Path>) -> Result<Alphabet> {
    let path = path.as_ref();
    read_alphabet(&read_file(path)?, &path.display().to_string())
}

/// Splits corpus lines into their two TAB-separated fields.
fn corpus_fields<'a>(text: &'a str, origin: &str) -> Result<Vec<(usize, &'a str, &'a str)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((left, right)) = line.split_once('\t') else {
            return Err(Error::parse(origin, i + 1, "expected two TAB-separated fields"));
        };
        if right.contains('\t') {
            return Err(Error::parse(origin, i + 1, "more than two TAB-separated fields"));
        }
        out.push((i + 1, left, right));
    }
    Ok(out)
}

fn parse_string(a: &Alphabet, text: &str, origin: &str, line: usize) -> Result<SymbolString> {
    a.parse(text).map_err(|e| match e {
        Error::Input(m) => Error::parse(origin, line, m),
        other => other,
    })
}

/// `x-tokens TAB y-tokens` per line.
pub fn read_pair_corpus(text: &str, origin: &str, a: &Alphabet, b: &Alphabet) -> Result<PairCorpus> {
    let pairs = corpus_fields(text, origin)?
        .into_iter()
        .map(|(n, x, y)| Ok((parse_string(a, x, origin, n)?, parse_string(b, y, origin, n)?)))
        .collect::<Result<Vec<_>>>()?;
    PairCorpus::new(EditSpace::new(a.clone(), b.clone()), pairs)
}

/// `class TAB y-tokens` per line.
pub fn read_labeled_corpus(text: &str, origin: &str, b: &Alphabet) -> Result<LabeledCorpus> {
    let samples = corpus_fields(text, origin)?
        .into_iter()
        .map(|(n, w, y)| {
            let w = w.trim();
            if w.is_empty() || w.contains(char::is_whitespace) {
                return Err(Error::parse(origin, n, format!("invalid class label {w:?}")));
            }
            Ok((w.to_string(), parse_string(b, y, origin, n)?))
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledCorpus::new(b.clone(), samples)
}

pub fn write_pair_corpus(c: &PairCorpus) -> String {
    let (a, b) = (c.space().source(), c.space().target());
    let mut out = String::new();
    for (x, y) in c.pairs() {
        let _ = writeln!(out, "{}\t{}", a.render(x), b.render(y));
    }
    out
}

pub fn write_labeled_corpus(c: &LabeledCorpus) -> String {
    let mut out = String::new();
    for (w, y) in c.samples() {
        let _ = writeln!(out, "{w}\t{}", c.alphabet().render(y));
    }
    out
}

pub fn load_pair_corpus(path: impl AsRef<Path>, a: &Alphabet, b: &Alphabet) -> Result<PairCorpus> {
    let path = path.as_ref();
    read_pair_corpus(&read_file(path)?, &path.display().to_string(), a, b)
}

pub fn load_labeled_corpus(path: impl AsRef<Path>, b: &Alphabet) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    read_labeled_corpus(&read_file(path)?, &path.display().to_string(), b)
}
