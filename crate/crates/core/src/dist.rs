use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::rational::Rational;

/// A finite probability distribution with exact rational weights.
///
/// Entries with weight zero are dropped on construction, so the key set is the
/// support. A distribution built through [`Distribution::from_weights`] may be
/// malformed (negative weights, wrong total); [`Distribution::check`] reports
/// that, and the validators of the game types call it for every row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution<X: Ord> {
    entries: BTreeMap<X, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistError {
    #[error("weight {0} outside [0,1]")]
    OutOfRange(Rational),
    #[error("distribution sum {0} != 1")]
    BadSum(Rational),
}

impl<X: Ord + Clone> Distribution<X> {
    /// Builds a distribution without checking it. Duplicate keys accumulate.
    pub fn from_weights<I: IntoIterator<Item = (X, Rational)>>(weights: I) -> Self {
        let mut entries: BTreeMap<X, Rational> = BTreeMap::new();
        for (x, w) in weights {
            *entries.entry(x).or_insert_with(Rational::zero) += w;
        }
        entries.retain(|_, w| !w.is_zero());
        Distribution { entries }
    }

    /// Builds and checks a distribution.
    pub fn new<I: IntoIterator<Item = (X, Rational)>>(weights: I) -> Result<Self, DistError> {
        let d = Self::from_weights(weights);
        d.check()?;
        Ok(d)
    }

    pub fn dirac(x: X) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(x, Rational::one());
        Distribution { entries }
    }

    /// Uniform over `xs` (duplicates counted once). Panics on an empty set.
    pub fn uniform<I: IntoIterator<Item = X>>(xs: I) -> Self {
        let keys: Vec<X> = {
            let mut v: Vec<X> = xs.into_iter().collect();
            v.sort();
            v.dedup();
            v
        };
        assert!(!keys.is_empty(), "uniform distribution over an empty set");
        let w = Rational::new(1, keys.len() as i64);
        Distribution {
            entries: keys.into_iter().map(|k| (k, w.clone())).collect(),
        }
    }

    pub fn check(&self) -> Result<(), DistError> {
        for w in self.entries.values() {
            if !w.is_probability() {
                return Err(DistError::OutOfRange(w.clone()));
            }
        }
        let total = self.total();
        if !total.is_one() {
            return Err(DistError::BadSum(total));
        }
        Ok(())
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    /// Probability of `x`; zero outside the support.
    pub fn prob(&self, x: &X) -> Rational {
        self.entries.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn prob_ref(&self, x: &X) -> Option<&Rational> {
        self.entries.get(x)
    }

    pub fn contains(&self, x: &X) -> bool {
        self.entries.contains_key(x)
    }

    pub fn support(&self) -> impl Iterator<Item = &X> + '_ {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&X, &Rational)> + '_ {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Pushes the distribution through `f`, merging colliding images.
    pub fn map<Y: Ord + Clone>(&self, mut f: impl FnMut(&X) -> Y) -> Distribution<Y> {
        Distribution::from_weights(self.entries.iter().map(|(x, w)| (f(x), w.clone())))
    }

    /// Convex combination `sum_i w_i * d_i`. Weights are not required to sum to 1.
    pub fn mixture<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = (Rational, &'a Distribution<X>)>,
        X: 'a,
    {
        let mut acc: BTreeMap<X, Rational> = BTreeMap::new();
        for (w, d) in parts {
            if w.is_zero() {
                continue;
            }
            for (x, p) in d.iter() {
                *acc.entry(x.clone()).or_insert_with(Rational::zero) += &w * p;
            }
        }
        acc.retain(|_, w| !w.is_zero());
        Distribution { entries: acc }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_leave_support() {
        let d = Distribution::new([(0u8, Rational::one()), (1u8, Rational::zero())]).unwrap();
        assert_eq!(d.len(), 1);
        assert!(!d.contains(&1));
        assert_eq!(d.prob(&1), Rational::zero());
    }

    #[test]
    fn bad_sum_is_reported() {
        let d = Distribution::from_weights([(0u8, Rational::new(1, 2)), (1, Rational::new(1, 4))]);
        assert_eq!(d.check(), Err(DistError::BadSum(Rational::new(3, 4))));
        let d = Distribution::from_weights([(0u8, Rational::new(3, 2)), (1, Rational::new(-1, 2))]);
        assert!(matches!(d.check(), Err(DistError::OutOfRange(_))));
    }

    #[test]
    fn mixture_of_distributions_is_a_distribution() {
        let a = Distribution::uniform([0u8, 1]);
        let b = Distribution::dirac(2u8);
        let m = Distribution::mixture([(Rational::new(1, 3), &a), (Rational::new(2, 3), &b)]);
        assert!(m.check().is_ok());
        assert_eq!(m.prob(&0), Rational::new(1, 6));
        assert_eq!(m.prob(&2), Rational::new(2, 3));
    }
}
