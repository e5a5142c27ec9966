//! A synthetic word-recognition benchmark with a known noisy channel.
//!
//! Classes come in families that share a root string everywhere except at
//! one pivot position, where each member has its own symbol; no two of those
//! symbols are substitution partners. Members are therefore one edit apart,
//! and a single confusion at the pivot leaves unit-cost distances tied. Some
//! classes carry extra prototypes: the base form with a short span (never
//! the pivot) removed. Observations are made by passing a
//! prototype through a channel that, independently for each underlying
//! symbol, may first insert symbols (drawn mostly from a few favored ones),
//! then deletes it (at a symbol-dependent rate), replaces it by a
//! confusable symbol (mostly its fixed partner, the next symbol), or copies
//! it.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Symbol, SymbolString};
use crate::classifier::{LabeledCorpus, Lexicon};
use crate::edit::EditSpace;
use crate::error::{Error, Result};
use crate::transducer::Transducer;

/// Generator settings. The defaults describe the standard benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub classes: usize,
    pub family_size: usize,
    pub alphabet_size: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Upper bound on prototypes per class.
    pub max_prototypes: usize,
    /// Per-symbol substitution probability.
    pub sub_rate: f64,
    /// Per-slot insertion probability.
    pub ins_rate: f64,
    /// Mean per-symbol deletion probability; individual symbols range from
    /// 0.2 to 1.8 times this.
    pub del_rate: f64,
    /// Share of substitutions that go to the symbol's fixed partner.
    pub partner_share: f64,
    pub train: usize,
    pub test: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            classes: 50,
            family_size: 5,
            alphabet_size: 10,
            min_len: 5,
            max_len: 10,
            max_prototypes: 3,
            sub_rate: 0.10,
            ins_rate: 0.05,
            del_rate: 0.05,
            partner_share: 1.0,
            train: 5000,
            test: 500,
            seed: 1996,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.classes == 0 || self.family_size == 0 || self.max_prototypes == 0 {
            return bad("classes, family size and prototypes must be positive");
        }
        if !(2..=26).contains(&self.alphabet_size) {
            return bad("alphabet size must be between 2 and 26");
        }
        if 2 * self.family_size > self.alphabet_size {
            return bad("family size must be at most half the alphabet size");
        }
        if self.min_len < 3 || self.min_len > self.max_len {
            return bad("lengths must satisfy 3 <= min <= max");
        }
        let rates = [self.sub_rate, self.ins_rate, self.del_rate, self.partner_share];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) || self.sub_rate + 1.8 * self.del_rate > 1.0 || self.ins_rate >= 1.0 {
            return bad("channel rates must be probabilities with sub + 1.8 del <= 1 and ins < 1");
        }
        Ok(())
    }
}

/// Generated lexicon, corpora and the channel's expected edit frequencies.
#[derive(Debug, Clone)]
pub struct SyntheticBenchmark {
    pub alphabet: Alphabet,
    pub lexicon: Lexicon,
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
    /// A memoryless transducer proportional to the channel's expected edit
    /// counts per sample, with one termination per sample.
    pub channel: Transducer,
}

struct Channel {
    n: usize,
    sub: f64,
    ins: f64,
    del: Vec<f64>,
    /// `confusion[s][t]`: where a substituted `s` goes.
    confusion: Vec<Vec<f64>>,
    insertion: Vec<f64>,
}

impl Channel {
    fn new(cfg: &SynthConfig) -> Self {
        let n = cfg.alphabet_size;
        let confusion = (0..n)
            .map(|s| {
                let partner = (s + 1) % n;
                (0..n)
                    .map(|t| {
                        if t == s {
                            0.0
                        } else if n == 2 || t == partner {
                            cfg.partner_share + if n == 2 { 1.0 - cfg.partner_share } else { 0.0 }
                        } else {
                            (1.0 - cfg.partner_share) / (n - 2) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        // favored insertions: the first two symbols take most of the mass
        let mut insertion: Vec<f64> = (0..n).map(|t| if t < 2 { 0.4 } else { 0.2 / (n - 2) as f64 }).collect();
        let z: f64 = insertion.iter().sum();
        insertion.iter_mut().for_each(|p| *p /= z);
        Channel {
            n,
            sub: cfg.sub_rate,
            ins: cfg.ins_rate,
            del: (0..n)
                .map(|s| cfg.del_rate * (0.2 + 1.6 * s as f64 / (n - 1) as f64))
                .collect(),
            confusion,
            insertion,
        }
    }

    fn corrupt<R: Rng + ?Sized>(&self, x: &SymbolString, rng: &mut R) -> SymbolString {
        let ins = WeightedIndex::new(&self.insertion).expect("positive weights");
        let mut y = Vec::with_capacity(x.len() + 2);
        let inserts = |y: &mut Vec<Symbol>, rng: &mut R| {
            while rng.random::<f64>() < self.ins {
                y.push(Symbol(ins.sample(rng) as u32));
            }
        };
        for &s in x.iter() {
            inserts(&mut y, rng);
            let r: f64 = rng.random();
            let del = self.del[s.index()];
            if r < del {
                continue;
            }
            if r < del + self.sub {
                let conf = WeightedIndex::new(&self.confusion[s.index()]).expect("positive weights");
                y.push(Symbol(conf.sample(rng) as u32));
            } else {
                y.push(s);
            }
        }
        inserts(&mut y, rng);
        SymbolString(y)
    }

    /// Expected edit counts of one pass over `x`, weighted by `w`.
    fn expected_counts(&self, space: &EditSpace, x: &SymbolString, w: f64, counts: &mut [f64]) {
        let per_slot = self.ins / (1.0 - self.ins);
        for t in 0..self.n {
            counts[space.ins_index(Symbol(t as u32))] += w * per_slot * (x.len() + 1) as f64 * self.insertion[t];
        }
        for &s in x.iter() {
            let del = self.del[s.index()];
            counts[space.del_index(s)] += w * del;
            counts[space.sub_index(s, s)] += w * (1.0 - del - self.sub);
            for t in 0..self.n {
                counts[space.sub_index(s, Symbol(t as u32))] += w * self.sub * self.confusion[s.index()][t];
            }
        }
        counts[space.end_index()] += w;
    }
}

fn random_string<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Vec<Symbol> {
    (0..len).map(|_| Symbol(rng.random_range(0..n) as u32)).collect()
}

/// `k` distinct symbols, no two of which are substitution partners.
fn spread_symbols<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut out: Vec<usize> = Vec::with_capacity(k);
    for s in order {
        if out.len() == k {
            break;
        }
        if out.iter().all(|&t| (t + 1) % n != s && (s + 1) % n != t) {
            out.push(s);
        }
    }
    out
}

/// Builds the benchmark deterministically from `cfg.seed`.
pub fn generate_benchmark(cfg: &SynthConfig) -> Result<SyntheticBenchmark> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.alphabet_size;
    let letters: String = (b'a'..b'a' + n as u8).map(char::from).collect();
    let alphabet = Alphabet::from_chars(&letters)?;

    let mut used = std::collections::HashSet::new();
    let mut classes: Vec<Vec<SymbolString>> = Vec::with_capacity(cfg.classes);
    let mut attempts = 0usize;
    while classes.len() < cfg.classes {
        attempts += 1;
        if attempts > 1000 * cfg.classes {
            return Err(Error::Config("could not generate enough distinct prototypes".into()));
        }
        let len = rng.random_range(cfg.min_len..=cfg.max_len);
        let root = random_string(n, len, &mut rng);
        let pivot = rng.random_range(0..len);
        let members = cfg.family_size.min(cfg.classes - classes.len());
        let mut family = Vec::with_capacity(members);
        for &sym in &spread_symbols(n, members, &mut rng) {
            let mut base = root.clone();
            base[pivot] = Symbol(sym as u32);
            let mut forms = vec![SymbolString(base.clone())];
            for _ in 0..rng.random_range(0..cfg.max_prototypes) {
                let span = rng.random_range(1..=2);
                if len - span < cfg.min_len {
                    continue;
                }
                let at = rng.random_range(0..=len - span);
                if (at..at + span).contains(&pivot) {
                    continue;
                }
                let mut v = base.clone();
                v.drain(at..at + span);
                let v = SymbolString(v);
                if !forms.contains(&v) {
                    forms.push(v);
                }
            }
            family.push(forms);
        }
        let fresh = family.iter().flatten().all(|f| !used.contains(f));
        if fresh {
            used.extend(family.iter().flatten().cloned());
            classes.extend(family);
        }
    }

    let width = (cfg.classes - 1).to_string().len().max(2);
    let names: Vec<String> = (0..cfg.classes).map(|i| format!("w{i:0width$}")).collect();
    let pw = 1.0 / cfg.classes as f64;
    let entries: Vec<(String, SymbolString, f64)> = classes
        .iter()
        .zip(&names)
        .flat_map(|(forms, w)| {
            let p = pw / forms.len() as f64;
            forms.iter().map(move |x| (w.clone(), x.clone(), p))
        })
        .collect();
    let lexicon = Lexicon::new(alphabet.clone(), entries.clone())?;

    let channel = Channel::new(cfg);
    let space = EditSpace::new(alphabet.clone(), alphabet.clone());
    let mut counts = vec![0.0; space.len()];
    for (_, x, p) in &entries {
        channel.expected_counts(&space, x, *p, &mut counts);
    }
    let truth = Transducer::from_counts(&space, &counts)?;

    let draw = |count: usize, rng: &mut ChaCha8Rng| {
        (0..count)
            .map(|_| {
                let c = rng.random_range(0..cfg.classes);
                let x = classes[c].choose(rng).expect("nonempty");
                (names[c].clone(), channel.corrupt(x, rng))
            })
            .collect::<Vec<_>>()
    };
    let train = LabeledCorpus::new(alphabet.clone(), draw(cfg.train, &mut rng))?;
    let test = LabeledCorpus::new(alphabet.clone(), draw(cfg.test, &mut rng))?;
    Ok(SyntheticBenchmark {
        alphabet,
        lexicon,
        train,
        test,
        channel: truth,
    })
}
