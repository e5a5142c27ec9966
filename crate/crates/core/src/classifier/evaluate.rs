use rayon::prelude::*;

use crate::alphabet::SymbolString;
use crate::distance::StringDistance;
use crate::error::{Error, Result};

use super::lexicon::Lexicon;
use super::model::{classify, ClassifierModel, Decision, LabeledCorpus};

/// Every lexicon entry at minimal distance from `y` (ties within
/// `tie_tolerance`, relative). `None` when every distance is infinite.
pub fn nearest_neighbor_classify(
    y: &SymbolString,
    lexicon: &Lexicon,
    distance: &dyn StringDistance,
    tie_tolerance: f64,
) -> Result<Option<Decision>> {
    if lexicon.is_empty() {
        return Err(Error::Config("lexicon is empty".into()));
    }
    let per_form: Vec<f64> = lexicon.forms().iter().map(|x| distance.distance(x, y)).collect();
    let best = per_form.iter().copied().fold(f64::INFINITY, f64::min);
    if best == f64::INFINITY {
        return Ok(None);
    }
    let entries = (0..lexicon.len())
        .filter(|&i| {
            let d = per_form[lexicon.entry_form(i)];
            d == best || (d - best).abs() <= tie_tolerance * best.abs().max(1.0)
        })
        .collect();
    Ok(Some(Decision { entries, score: best }))
}

/// One minus the mean fraction of correct entries per decision. Missing
/// decisions count as wholly wrong.
pub fn word_error_rate<'a, I>(lexicon: &Lexicon, decisions: I) -> Result<f64>
where
    I: IntoIterator<Item = (&'a str, Option<&'a Decision>)>,
{
    let mut n = 0usize;
    let mut correct = 0.0;
    for (truth, d) in decisions {
        n += 1;
        if let Some(d) = d {
            if d.entries.is_empty() {
                continue;
            }
            let hits = d
                .entries
                .iter()
                .filter(|&&i| lexicon.entries()[i].class == truth)
                .count();
            correct += hits as f64 / d.entries.len() as f64;
        }
    }
    if n == 0 {
        return Err(Error::Input("cannot score an empty test corpus".into()));
    }
    Ok(1.0 - correct / n as f64)
}

/// Decisions of the model for every test observation, in corpus order.
pub fn decide_all(m: &ClassifierModel, test: &LabeledCorpus, tie_tolerance: f64) -> Result<Vec<Option<Decision>>> {
    test.samples()
        .par_iter()
        .map(|(_, y)| classify(y, m, tie_tolerance))
        .collect()
}

/// Word error rate of the model on a test corpus. Classes absent from the
/// lexicon can never be decided correctly.
pub fn score(m: &ClassifierModel, test: &LabeledCorpus, tie_tolerance: f64) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Input("cannot score an empty test corpus".into()));
    }
    let ds = decide_all(m, test, tie_tolerance)?;
    word_error_rate(
        m.lexicon(),
        test.samples().iter().zip(&ds).map(|((w, _), d)| (w.as_str(), d.as_ref())),
    )
}

/// Word error rate of the nearest-neighbor rule under `distance`.
pub fn score_nearest(
    lexicon: &Lexicon,
    distance: &dyn StringDistance,
    test: &LabeledCorpus,
    tie_tolerance: f64,
) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Input("cannot score an empty test corpus".into()));
    }
    let ds: Vec<Option<Decision>> = test
        .samples()
        .par_iter()
        .map(|(_, y)| nearest_neighbor_classify(y, lexicon, distance, tie_tolerance))
        .collect::<Result<_>>()?;
    word_error_rate(
        lexicon,
        test.samples().iter().zip(&ds).map(|((w, _), d)| (w.as_str(), d.as_ref())),
    )
}
