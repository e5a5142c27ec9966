//! The memoryless stochastic transducer: one distribution over `E ∪ {#}`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Gamma;

use crate::alphabet::Alphabet;
use crate::edit::{Alignment, EditKind, EditOp, EditSpace};
use crate::error::{Error, Result};
use crate::logspace::ln;

/// Normalization tolerance for edit distributions.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Outcome of checking an edit probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// Sum of all entries including termination.
    pub total: f64,
    /// Indices of entries that are negative or not finite.
    pub negative: Vec<usize>,
    /// Indices of entries greater than one.
    pub above_one: Vec<usize>,
    /// Probability of the termination event.
    pub termination: f64,
}

impl ValidityReport {
    /// Entries in `[0, 1]` summing to one.
    pub fn is_distribution(&self) -> bool {
        self.negative.is_empty()
            && self.above_one.is_empty()
            && (self.total - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    /// A valid distribution whose termination probability is positive, i.e.
    /// one that induces a probability function on string pairs.
    pub fn is_pair_model(&self) -> bool {
        self.is_distribution() && self.termination > 0.0
    }
}

/// Checks a raw probability table laid out as in [`EditSpace`].
pub fn validate_probabilities(probs: &[f64]) -> ValidityReport {
    let mut negative = Vec::new();
    let mut above_one = Vec::new();
    for (i, &p) in probs.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            negative.push(i);
        } else if p > 1.0 {
            above_one.push(i);
        }
    }
    ValidityReport {
        total: probs.iter().sum(),
        negative,
        above_one,
        termination: probs.last().copied().unwrap_or(0.0),
    }
}

/// A memoryless stochastic transducer `<A, B, δ>`.
///
/// Probabilities are held as natural logarithms. Instances are immutable;
/// estimation produces new transducers.
#[derive(Debug, Clone, PartialEq)]
pub struct Transducer {
    space: EditSpace,
    log_delta: Vec<f64>,
}

impl Transducer {
    /// Every event in `E ∪ {#}` gets probability `1 / (|E| + 1)`.
    pub fn new_uniform(a: Alphabet, b: Alphabet) -> Self {
        let space = EditSpace::new(a, b);
        let p = 1.0 / space.len() as f64;
        let log_delta = vec![p.ln(); space.len()];
        Transducer { space, log_delta }
    }

    /// Builds a transducer from a probability table in [`EditSpace`] order.
    ///
    /// Negative or non-finite entries are rejected; normalization is not
    /// enforced here (see [`Transducer::validate`]).
    pub fn from_probs(a: Alphabet, b: Alphabet, probs: &[f64]) -> Result<Self> {
        let space = EditSpace::new(a, b);
        if probs.len() != space.len() {
            return Err(Error::Config(format!(
                "expected {} edit probabilities, got {}",
                space.len(),
                probs.len()
            )));
        }
        if let Some(i) = probs.iter().position(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::Config(format!(
                "probability of {} is {}",
                space.describe(space.op(i)),
                probs[i]
            )));
        }
        let log_delta = probs.iter().map(|&p| ln(p)).collect();
        Ok(Transducer { space, log_delta })
    }

    /// Builds a transducer by evaluating `f` on every event.
    pub fn from_fn(a: Alphabet, b: Alphabet, f: impl Fn(EditOp) -> f64) -> Result<Self> {
        let space = EditSpace::new(a.clone(), b.clone());
        let probs: Vec<f64> = space.ops().map(f).collect();
        Self::from_probs(a, b, &probs)
    }

    /// Builds a transducer from natural-log probabilities, bit for bit.
    pub fn from_log_probs(a: Alphabet, b: Alphabet, log_probs: Vec<f64>) -> Result<Self> {
        let space = EditSpace::new(a, b);
        if log_probs.len() != space.len() {
            return Err(Error::Config(format!(
                "expected {} edit log-probabilities, got {}",
                space.len(),
                log_probs.len()
            )));
        }
        if log_probs.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::Config("log-probabilities must be finite or -inf".into()));
        }
        Ok(Transducer {
            space,
            log_delta: log_probs,
        })
    }

    /// Relative frequencies of a count table. Fails when the counts sum to zero.
    pub fn from_counts(space: &EditSpace, counts: &[f64]) -> Result<Self> {
        let total: f64 = counts.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Training(format!("total expected count is {total}")));
        }
        let probs: Vec<f64> = counts.iter().map(|c| c / total).collect();
        Self::from_probs(space.source().clone(), space.target().clone(), &probs)
    }

    /// Strictly positive random parameters: a flat Dirichlet draw over `E ∪ {#}`.
    pub fn random<R: Rng + ?Sized>(a: Alphabet, b: Alphabet, rng: &mut R) -> Self {
        let space = EditSpace::new(a.clone(), b.clone());
        let gamma = Gamma::new(1.0, 1.0).expect("valid gamma parameters");
        let draws: Vec<f64> = (0..space.len())
            .map(|_| loop {
                let g: f64 = gamma.sample(rng);
                if g > 0.0 {
                    break g;
                }
            })
            .collect();
        Self::from_counts(&space, &draws).expect("positive draws")
    }

    pub fn space(&self) -> &EditSpace {
        &self.space
    }

    pub fn source(&self) -> &Alphabet {
        self.space.source()
    }

    pub fn target(&self) -> &Alphabet {
        self.space.target()
    }

    #[inline]
    pub fn log_prob(&self, op: EditOp) -> f64 {
        self.log_delta[self.space.index(op)]
    }

    pub fn prob(&self, op: EditOp) -> f64 {
        self.log_prob(op).exp()
    }

    /// Log-probabilities in [`EditSpace`] order.
    pub fn log_probs(&self) -> &[f64] {
        &self.log_delta
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_delta.iter().map(|l| l.exp()).collect()
    }

    pub fn log_termination(&self) -> f64 {
        self.log_delta[self.space.end_index()]
    }

    pub fn termination(&self) -> f64 {
        self.log_termination().exp()
    }

    /// Edit probabilities renormalized over `E`, termination excluded.
    pub fn edit_distribution(&self) -> Vec<f64> {
        let probs = self.probs();
        let edits = &probs[..self.space.num_edits()];
        let total: f64 = edits.iter().sum();
        edits.iter().map(|p| if total > 0.0 { p / total } else { 0.0 }).collect()
    }

    /// Total probability of each family of edits.
    pub fn kind_total(&self, kind: EditKind) -> f64 {
        self.space
            .ops()
            .filter(|op| op.kind() == Some(kind))
            .map(|op| self.prob(op))
            .sum()
    }

    pub fn validate(&self) -> ValidityReport {
        validate_probabilities(&self.probs())
    }

    pub(crate) fn require_pair_model(&self) -> Result<()> {
        let report = self.validate();
        if !report.is_distribution() {
            return Err(Error::Config(format!(
                "edit probabilities sum to {}, not 1",
                report.total
            )));
        }
        if report.termination <= 0.0 {
            return Err(Error::Config(
                "termination probability is zero; the generation process never halts".into(),
            ));
        }
        Ok(())
    }

    /// `p(n | φ) = (1 - δ(#))^n δ(#)`: the probability that a generated
    /// edit sequence holds exactly `n` edits before termination.
    pub fn sequence_length_prob(&self, n: u64) -> f64 {
        let end = self.termination();
        (1.0 - end).powf(n as f64) * end
    }

    /// Draws edit operations i.i.d. from δ until termination.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Alignment> {
        self.require_pair_model()?;
        let dist = WeightedIndex::new(self.probs()).map_err(|e| Error::Config(e.to_string()))?;
        let mut ops = Vec::new();
        loop {
            let op = self.space.op(dist.sample(rng));
            ops.push(op);
            if op == EditOp::End {
                return Ok(Alignment::new(ops));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab() -> (Alphabet, Alphabet) {
        (Alphabet::from_chars("a").unwrap(), Alphabet::from_chars("b").unwrap())
    }

    #[test]
    fn uniform_over_four_events() {
        let (a, b) = ab();
        let t = Transducer::new_uniform(a, b);
        assert_eq!(t.space().len(), 4);
        for p in t.probs() {
            assert_relative_eq!(p, 0.25, epsilon = 1e-15);
        }
        assert!(t.validate().is_pair_model());
    }

    #[test]
    fn uniform_over_six_events() {
        let t = Transducer::new_uniform(
            Alphabet::from_chars("ab").unwrap(),
            Alphabet::from_chars("c").unwrap(),
        );
        assert_eq!(t.probs().len(), 6);
        for p in t.probs() {
            assert_relative_eq!(p, 1.0 / 6.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_termination_is_a_distribution_but_not_a_pair_model() {
        let (a, b) = ab();
        let t = Transducer::from_probs(a, b, &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]).unwrap();
        let r = t.validate();
        assert!(r.is_distribution());
        assert!(!r.is_pair_model());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(t.generate(&mut rng).is_err());
    }

    #[test]
    fn deficient_mass_is_invalid() {
        let (a, b) = ab();
        let t = Transducer::from_probs(a, b, &[0.3, 0.2, 0.2, 0.2]).unwrap();
        let r = t.validate();
        assert!(!r.is_distribution());
        assert_relative_eq!(r.total, 0.9, epsilon = 1e-12);
    }

    #[test]
    fn negative_entries_reported_and_rejected() {
        let r = validate_probabilities(&[0.5, -0.1, 0.3, 0.3]);
        assert_eq!(r.negative, vec![1]);
        assert!(!r.is_distribution());
        let (a, b) = ab();
        assert!(Transducer::from_probs(a, b, &[0.5, -0.1, 0.3, 0.3]).is_err());
    }

    #[test]
    fn certain_termination_yields_empty_pair() {
        let (a, b) = ab();
        let t = Transducer::from_probs(a, b, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let al = t.generate(&mut rng).unwrap();
            assert_eq!(al.ops, vec![EditOp::End]);
        }
    }

    #[test]
    fn sequence_length_law() {
        let (a, b) = ab();
        let t = Transducer::new_uniform(a, b);
        assert_relative_eq!(t.sequence_length_prob(0), 0.25, epsilon = 1e-15);
        assert_relative_eq!(t.sequence_length_prob(1), 3.0 / 16.0, epsilon = 1e-15);
        // tail after N terms is 0.75^N; stop once below 1e-12
        let mut sum = 0.0;
        let mut n = 0;
        while 0.75f64.powi(n as i32) > 1e-12 {
            sum += t.sequence_length_prob(n);
            n += 1;
        }
        assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn random_init_is_strictly_positive_and_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = Transducer::random(
            Alphabet::from_chars("ab").unwrap(),
            Alphabet::from_chars("c").unwrap(),
            &mut rng,
        );
        assert!(t.probs().iter().all(|&p| p > 0.0));
        assert!(t.validate().is_pair_model());
    }
}
