//! Finite mixtures of memoryless transducers over shared alphabets.

use crate::alphabet::SymbolString;
use crate::distance::{viterbi_unchecked, StringDistance};
use crate::edit::EditSpace;
use crate::error::{Error, Result};
use crate::lattice::forward_unchecked;
use crate::logspace::{ln, log_sum_exp, nats_to_bits};
use crate::transducer::{Transducer, NORMALIZATION_TOLERANCE};

/// `p(x, y) = Σ_i μ_i p(x, y | φ_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureTransducer {
    components: Vec<Transducer>,
    log_weights: Vec<f64>,
}

impl MixtureTransducer {
    pub fn new(components: Vec<Transducer>, weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Config("mixing weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Config(format!("mixing weights sum to {total}, not 1")));
        }
        Self::from_log_weights(components, weights.iter().map(|&w| ln(w)).collect())
    }

    /// Bit-exact construction from log-weights.
    pub fn from_log_weights(components: Vec<Transducer>, log_weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("a mixture needs at least one component".into()));
        }
        if components.len() != log_weights.len() {
            return Err(Error::Config("one mixing weight per component is required".into()));
        }
        let space = components[0].space();
        if components.iter().any(|c| c.space() != space) {
            return Err(Error::Config("mixture components must share alphabets".into()));
        }
        Ok(MixtureTransducer {
            components,
            log_weights,
        })
    }

    pub fn components(&self) -> &[Transducer] {
        &self.components
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|l| l.exp()).collect()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn space(&self) -> &EditSpace {
        self.components[0].space()
    }

    pub(crate) fn log_probability_unchecked(&self, x: &SymbolString, y: &SymbolString) -> f64 {
        let terms: Vec<f64> = self
            .components
            .iter()
            .zip(&self.log_weights)
            .map(|(c, w)| w + forward_unchecked(x, y, c).last())
            .collect();
        log_sum_exp(&terms)
    }

    pub(crate) fn log_viterbi_unchecked(&self, x: &SymbolString, y: &SymbolString) -> f64 {
        let terms: Vec<f64> = self
            .components
            .iter()
            .zip(&self.log_weights)
            .map(|(c, w)| w - viterbi_unchecked(x, y, c).bits * std::f64::consts::LN_2)
            .collect();
        log_sum_exp(&terms)
    }
}

/// Equal weights `1/k`.
pub fn uniform_mixture(components: Vec<Transducer>) -> Result<MixtureTransducer> {
    let k = components.len();
    if k == 0 {
        return Err(Error::Config("a mixture needs at least one component".into()));
    }
    MixtureTransducer::new(components, vec![1.0 / k as f64; k])
}

/// The uniform two-way mixture of a tied and an untied model.
pub fn tied_untied_mixture(tied: Transducer, untied: Transducer) -> Result<MixtureTransducer> {
    uniform_mixture(vec![tied, untied])
}

pub fn mixture_probability(x: &SymbolString, y: &SymbolString, m: &MixtureTransducer) -> Result<f64> {
    m.space().check_pair(x, y)?;
    Ok(m.log_probability_unchecked(x, y).exp())
}

/// `-log2` of the mixture probability.
pub fn mixture_stochastic_distance(
    x: &SymbolString,
    y: &SymbolString,
    m: &MixtureTransducer,
) -> Result<f64> {
    m.space().check_pair(x, y)?;
    Ok(nats_to_bits(m.log_probability_unchecked(x, y)))
}

/// Stochastic distance under a mixture.
#[derive(Debug, Clone, Copy)]
pub struct MixtureDistance<'a>(pub &'a MixtureTransducer);

impl StringDistance for MixtureDistance<'_> {
    fn distance(&self, x: &SymbolString, y: &SymbolString) -> f64 {
        nats_to_bits(self.0.log_probability_unchecked(x, y))
    }
}

/// `-log2 Σ_i μ_i p^v(x, y | φ_i)`, mixing each component's best edit sequence.
#[derive(Debug, Clone, Copy)]
pub struct MixtureViterbiDistance<'a>(pub &'a MixtureTransducer);

impl StringDistance for MixtureViterbiDistance<'_> {
    fn distance(&self, x: &SymbolString, y: &SymbolString) -> f64 {
        nats_to_bits(self.0.log_viterbi_unchecked(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::distance::{joint_probability, stochastic_distance};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair() -> (Alphabet, Alphabet) {
        (Alphabet::from_chars("a").unwrap(), Alphabet::from_chars("b").unwrap())
    }

    #[test]
    fn uniform_weights() {
        let (a, b) = pair();
        let t = Transducer::new_uniform(a, b);
        assert_eq!(uniform_mixture(vec![t.clone()]).unwrap().weights(), vec![1.0]);
        assert_eq!(uniform_mixture(vec![t.clone(), t]).unwrap().weights(), vec![0.5, 0.5]);
        assert!(uniform_mixture(vec![]).is_err());
    }

    #[test]
    fn single_and_duplicate_components_match_the_component() {
        let (a, b) = pair();
        let t = Transducer::new_uniform(a.clone(), b.clone());
        let x = a.parse("a").unwrap();
        let y = b.parse("b").unwrap();
        let p = joint_probability(&x, &y, &t).unwrap();
        let one = uniform_mixture(vec![t.clone()]).unwrap();
        assert_relative_eq!(mixture_probability(&x, &y, &one).unwrap(), p, max_relative = 1e-14);
        assert_relative_eq!(
            mixture_stochastic_distance(&x, &y, &one).unwrap(),
            stochastic_distance(&x, &y, &t).unwrap(),
            max_relative = 1e-14
        );
        let two = uniform_mixture(vec![t.clone(), t]).unwrap();
        assert_relative_eq!(mixture_probability(&x, &y, &two).unwrap(), p, max_relative = 1e-14);
    }

    #[test]
    fn zero_weight_component_is_ignored() {
        let (a, b) = pair();
        let t = Transducer::new_uniform(a.clone(), b.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let other = Transducer::random(a.clone(), b.clone(), &mut rng);
        let m = MixtureTransducer::new(vec![t.clone(), other], vec![1.0, 0.0]).unwrap();
        let x = a.parse("a a").unwrap();
        let y = b.parse("b").unwrap();
        assert_relative_eq!(
            mixture_stochastic_distance(&x, &y, &m).unwrap(),
            stochastic_distance(&x, &y, &t).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn rejects_bad_weights_and_mismatched_alphabets() {
        let (a, b) = pair();
        let t = Transducer::new_uniform(a.clone(), b.clone());
        assert!(MixtureTransducer::new(vec![t.clone()], vec![0.9]).is_err());
        assert!(MixtureTransducer::new(vec![t.clone(), t.clone()], vec![1.5, -0.5]).is_err());
        let u = Transducer::new_uniform(a, Alphabet::from_chars("bc").unwrap());
        assert!(uniform_mixture(vec![t, u]).is_err());
    }
}
