//! Finitely supported probability laws with exact rational masses.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// A finitely supported law; keys with zero mass are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLaw<K: Ord> {
    masses: BTreeMap<K, BigRational>,
}

impl<K: Ord> Default for FiniteLaw<K> {
    fn default() -> Self {
        FiniteLaw {
            masses: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> FiniteLaw<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point_mass(key: K) -> Self {
        let mut law = Self::new();
        law.add(key, BigRational::from_integer(1.into()));
        law
    }

    /// Normalizes integer counts into a law. Empty input yields an empty law.
    pub fn from_counts<I, C>(counts: I) -> Self
    where
        I: IntoIterator<Item = (K, C)>,
        C: Into<BigInt>,
    {
        let counts: Vec<(K, BigInt)> = counts.into_iter().map(|(k, c)| (k, c.into())).collect();
        let total: BigInt = counts.iter().map(|(_, c)| c.clone()).sum();
        let mut law = Self::new();
        if total.is_zero() {
            return law;
        }
        for (k, c) in counts {
            law.add(k, BigRational::new(c, total.clone()));
        }
        law
    }

    pub fn add(&mut self, key: K, mass: BigRational) {
        if mass.is_zero() {
            return;
        }
        let slot = self.masses.entry(key.clone()).or_insert_with(BigRational::zero);
        *slot += mass;
        if slot.is_zero() {
            self.masses.remove(&key);
        }
    }

    pub fn get(&self, key: &K) -> BigRational {
        self.masses.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_mass(&self) -> BigRational {
        self.masses.values().cloned().sum()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.masses.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.masses.keys()
    }

    /// Push-forward under `f`.
    pub fn map<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> FiniteLaw<J> {
        let mut out = FiniteLaw::new();
        for (k, m) in &self.masses {
            out.add(f(k), m.clone());
        }
        out
    }

    /// `E[f(X)]`.
    pub fn expectation(&self, mut f: impl FnMut(&K) -> BigRational) -> BigRational {
        self.masses.iter().map(|(k, m)| f(k) * m).sum()
    }

    /// `P(pred(X))`.
    pub fn probability(&self, mut pred: impl FnMut(&K) -> bool) -> BigRational {
        self.masses
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(_, m)| m.clone())
            .sum()
    }
}

/// Total variation distance `1/2 sum |a(v) - b(v)|` over the union support.
pub fn tv_discrete<K: Ord + Clone>(a: &FiniteLaw<K>, b: &FiniteLaw<K>) -> BigRational {
    let mut acc = BigRational::zero();
    for (k, ma) in a.iter() {
        acc += (ma - b.get(k)).abs();
    }
    for (k, mb) in b.iter() {
        if !a.masses.contains_key(k) {
            acc += mb.clone();
        }
    }
    acc / BigRational::from_integer(2.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn tv_basic_cases() {
        let a = FiniteLaw::from_counts([("x", 1), ("y", 2)]);
        let b = FiniteLaw::from_counts([("x", 2), ("y", 1)]);
        assert_eq!(tv_discrete(&a, &b), q(1, 3));
        assert_eq!(tv_discrete(&a, &a), q(0, 1));
        let c = FiniteLaw::point_mass("z");
        assert_eq!(tv_discrete(&a, &c), q(1, 1));
    }

    #[test]
    fn counts_normalize_to_one() {
        let law = FiniteLaw::from_counts([(1u8, 3u32), (2, 5), (3, 0)]);
        assert_eq!(law.total_mass(), q(1, 1));
        assert_eq!(law.len(), 2);
        assert_eq!(law.get(&2), q(5, 8));
    }

    #[test]
    fn map_merges_keys() {
        let law = FiniteLaw::from_counts([((0, 1), 1u32), ((0, 2), 1), ((1, 1), 2)]);
        let first = law.map(|&(a, _)| a);
        assert_eq!(first.get(&0), q(1, 2));
        assert_eq!(law.expectation(|&(_, b)| BigRational::from_integer(b.into())), q(5, 4));
    }
}
