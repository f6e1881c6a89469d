//! Finite sets and matchings: the category **Mch**.
//!
//! A matching is a partial injection between finite sets of tokens.  These
//! are the fibers of stratified diagrams and the combinatorial half of
//! overlap matchings.  Every matching has a generalized inverse (its
//! transpose), kernels and cokernels are the unmatched elements, and the
//! matched elements form the image.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// A partial injection between finite sets of string tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    source: BTreeSet<String>,
    target: BTreeSet<String>,
    pairs: BTreeMap<String, String>,
}

impl Matching {
    /// Validates that `pairs` is a partial injection between the two sets.
    pub fn new<I, S>(source: BTreeSet<String>, target: BTreeSet<String>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        let mut hit = BTreeSet::new();
        for (s, t) in pairs {
            let (s, t) = (s.into(), t.into());
            if !source.contains(&s) {
                return Err(Error::InvalidMatching(format!("unknown source `{s}`")));
            }
            if !target.contains(&t) {
                return Err(Error::InvalidMatching(format!("unknown target `{t}`")));
            }
            if !hit.insert(t.clone()) {
                return Err(Error::InvalidMatching(format!(
                    "target `{t}` matched twice"
                )));
            }
            if map.insert(s.clone(), t).is_some() {
                return Err(Error::InvalidMatching(format!(
                    "source `{s}` matched twice"
                )));
            }
        }
        Ok(Matching {
            source,
            target,
            pairs: map,
        })
    }

    pub fn empty(source: BTreeSet<String>, target: BTreeSet<String>) -> Self {
        Matching {
            source,
            target,
            pairs: BTreeMap::new(),
        }
    }

    pub fn identity(set: &BTreeSet<String>) -> Self {
        Matching {
            source: set.clone(),
            target: set.clone(),
            pairs: set.iter().map(|x| (x.clone(), x.clone())).collect(),
        }
    }

    pub fn source(&self) -> &BTreeSet<String> {
        &self.source
    }

    pub fn target(&self) -> &BTreeSet<String> {
        &self.target
    }

    /// The matched pairs, source-sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (&String, &String)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn apply(&self, s: &str) -> Option<&String> {
        self.pairs.get(s)
    }

    /// `self ∘ earlier`: relation composition, which stays a matching.
    pub fn compose(&self, earlier: &Matching) -> Result<Matching> {
        if earlier.target != self.source {
            return Err(Error::Mismatch(
                "matching composition: middle sets differ".into(),
            ));
        }
        let pairs = earlier
            .pairs
            .iter()
            .filter_map(|(s, t)| self.apply(t).map(|u| (s.clone(), u.clone())));
        Matching::new(earlier.source.clone(), self.target.clone(), pairs)
    }

    /// The transpose matching; a generalized inverse in the sense that
    /// σ∘σ†∘σ = σ and σ†∘σ∘σ† = σ†.
    pub fn generalized_inverse(&self) -> Matching {
        Matching {
            source: self.target.clone(),
            target: self.source.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|(s, t)| (t.clone(), s.clone()))
                .collect(),
        }
    }

    /// Unmatched source elements: the kernel object in Mch.
    pub fn kernel_set(&self) -> BTreeSet<String> {
        self.source
            .iter()
            .filter(|s| !self.pairs.contains_key(*s))
            .cloned()
            .collect()
    }

    /// Unmatched target elements: the cokernel object in Mch.
    pub fn cokernel_set(&self) -> BTreeSet<String> {
        let hit: BTreeSet<&String> = self.pairs.values().collect();
        self.target
            .iter()
            .filter(|t| !hit.contains(*t))
            .cloned()
            .collect()
    }

    /// Matched target elements: the image object in Mch.
    pub fn image_set(&self) -> BTreeSet<String> {
        self.pairs.values().cloned().collect()
    }

    /// Every source element is matched (monomorphism in Mch).
    pub fn is_injection(&self) -> bool {
        self.pairs.len() == self.source.len()
    }

    /// Every target element is matched (epimorphism in Mch).
    pub fn is_coinjection(&self) -> bool {
        self.pairs.len() == self.target.len()
    }

    /// Restriction to subsets of the endpoint sets, keeping pairs whose two
    /// elements both survive.
    pub fn restrict(&self, source: BTreeSet<String>, target: BTreeSet<String>) -> Matching {
        debug_assert!(source.is_subset(&self.source) && target.is_subset(&self.target));
        let pairs: BTreeMap<String, String> = self
            .pairs
            .iter()
            .filter(|(s, t)| source.contains(*s) && target.contains(*t))
            .map(|(s, t)| (s.clone(), t.clone()))
            .collect();
        Matching {
            source,
            target,
            pairs,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn m(source: &[&str], target: &[&str], pairs: &[(&str, &str)]) -> Matching {
        Matching::new(set(source), set(target), pairs.iter().map(|&(a, b)| (a, b))).unwrap()
    }

    /// Random matching between subsets of a fixed token universe.
    pub(crate) fn arb_matching() -> impl Strategy<Value = Matching> {
        (0usize..5, 0usize..5, any::<u64>()).prop_map(|(ns, nt, seed)| {
            let source: BTreeSet<String> = (0..ns).map(|i| format!("s{i}")).collect();
            let target: BTreeSet<String> = (0..nt).map(|i| format!("t{i}")).collect();
            let mut pairs = Vec::new();
            let mut used = BTreeSet::new();
            let mut state = seed;
            for s in &source {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let pick = (state >> 33) as usize % (nt + 2);
                if pick < nt {
                    let t = target.iter().nth(pick).unwrap();
                    if used.insert(t.clone()) {
                        pairs.push((s.clone(), t.clone()));
                    }
                }
            }
            Matching::new(source, target, pairs).unwrap()
        })
    }

    #[test]
    fn rejects_non_injections() {
        assert!(Matching::new(set(&["a", "b"]), set(&["x"]), [("a", "x"), ("b", "x")]).is_err());
        assert!(Matching::new(set(&["a"]), set(&["x", "y"]), [("a", "x"), ("a", "y")]).is_err());
        assert!(Matching::new(set(&["a"]), set(&["x"]), [("b", "x")]).is_err());
        assert!(Matching::new(set(&["a"]), set(&["x"]), [("a", "z")]).is_err());
    }

    #[test]
    fn compose_chains_and_drops() {
        let sigma = m(&["p"], &["a", "b"], &[("p", "a")]);
        let tau = m(&["a", "b"], &["x"], &[("a", "x")]);
        let composite = tau.compose(&sigma).unwrap();
        assert_eq!(composite.apply("p"), Some(&"x".to_string()));

        let sigma2 = m(&["p"], &["a", "b"], &[("p", "b")]);
        assert!(tau.compose(&sigma2).unwrap().is_empty());

        let wrong = m(&["q"], &["x"], &[]);
        assert!(wrong.compose(&sigma).is_err());
    }

    #[test]
    fn inverse_examples() {
        let sigma = m(&["a", "b"], &["x", "y"], &[("a", "x"), ("b", "y")]);
        let tau = sigma.generalized_inverse();
        assert_eq!(tau.apply("x"), Some(&"a".to_string()));
        assert_eq!(tau.apply("y"), Some(&"b".to_string()));
        let zero = Matching::empty(set(&[]), set(&[]));
        assert_eq!(zero.generalized_inverse(), zero);
    }

    #[test]
    fn kernel_cokernel_image_are_unmatched_and_matched_elements() {
        let sigma = m(&["a", "b"], &["x", "y", "z"], &[("a", "y")]);
        assert_eq!(sigma.kernel_set(), set(&["b"]));
        assert_eq!(sigma.cokernel_set(), set(&["x", "z"]));
        assert_eq!(sigma.image_set(), set(&["y"]));
        assert!(!sigma.is_injection());
        assert!(!sigma.is_coinjection());
        let id = Matching::identity(&set(&["a", "b"]));
        assert!(id.is_injection() && id.is_coinjection());
        assert!(id.kernel_set().is_empty() && id.cokernel_set().is_empty());
    }

    proptest! {
        /// Transposition is an involution and a generalized inverse.
        #[test]
        fn generalized_inverse_laws(sigma in arb_matching()) {
            let tau = sigma.generalized_inverse();
            prop_assert_eq!(tau.generalized_inverse(), sigma.clone());
            let back = sigma.compose(&tau.compose(&sigma).unwrap()).unwrap();
            prop_assert_eq!(back, sigma.clone());
            let fwd = tau.compose(&sigma.compose(&tau).unwrap()).unwrap();
            prop_assert_eq!(fwd, tau);
        }

        /// Composition with identities is trivial; kernel and image split
        /// the source and target element counts.
        #[test]
        fn unit_laws_and_counts(sigma in arb_matching()) {
            let ids = Matching::identity(sigma.source());
            let idt = Matching::identity(sigma.target());
            prop_assert_eq!(sigma.compose(&ids).unwrap(), sigma.clone());
            prop_assert_eq!(idt.compose(&sigma).unwrap(), sigma.clone());
            prop_assert_eq!(sigma.kernel_set().len() + sigma.len(), sigma.source().len());
            prop_assert_eq!(sigma.cokernel_set().len() + sigma.image_set().len(), sigma.target().len());
        }
    }
}
