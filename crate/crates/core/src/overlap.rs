//! The category Barc: barcodes and overlap matchings.
//!
//! Morphisms are partial injections of entries that only match an interval
//! to one it overlaps above.  Plain relational composition can produce pairs
//! whose ends no longer overlap, so composition here drops those pairs; with
//! that convention barcodes form a category with a zero object (the empty
//! barcode), kernels, cokernels, and epi-mono factorizations.

use std::collections::BTreeMap;

use crate::barcode::{Barcode, Index};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An overlap matching between two barcodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapMatching<Q> {
    source: Barcode<Q>,
    target: Barcode<Q>,
    pairs: BTreeMap<Index, Index>,
}

impl<Q: Scalar> OverlapMatching<Q> {
    /// Validates partial injectivity and the overlap-above condition on
    /// every pair.
    pub fn new(
        source: Barcode<Q>,
        target: Barcode<Q>,
        pairs: impl IntoIterator<Item = (Index, Index)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut hit = std::collections::BTreeSet::new();
        for (x, y) in pairs {
            let i = source
                .get(&x)
                .ok_or_else(|| Error::InvalidMatching(format!("unknown source index `{x}`")))?;
            let j = target
                .get(&y)
                .ok_or_else(|| Error::InvalidMatching(format!("unknown target index `{y}`")))?;
            if !i.overlaps_above(j) {
                return Err(Error::NotOverlap(format!(
                    "{i} (index {x}) does not overlap {j} (index {y}) above"
                )));
            }
            if !hit.insert(y.clone()) {
                return Err(Error::InvalidMatching(format!(
                    "target `{y}` matched twice"
                )));
            }
            if map.insert(x.clone(), y).is_some() {
                return Err(Error::InvalidMatching(format!(
                    "source `{x}` matched twice"
                )));
            }
        }
        Ok(OverlapMatching {
            source,
            target,
            pairs: map,
        })
    }

    pub fn empty(source: Barcode<Q>, target: Barcode<Q>) -> Self {
        OverlapMatching {
            source,
            target,
            pairs: BTreeMap::new(),
        }
    }

    /// The identity morphism of `c`.
    pub fn identity(c: &Barcode<Q>) -> Self {
        OverlapMatching {
            source: c.clone(),
            target: c.clone(),
            pairs: c.indices().map(|x| (x.clone(), x.clone())).collect(),
        }
    }

    pub fn source(&self) -> &Barcode<Q> {
        &self.source
    }

    pub fn target(&self) -> &Barcode<Q> {
        &self.target
    }

    /// Matched index pairs, source-sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (&Index, &Index)> {
        self.pairs.iter()
    }

    pub fn apply(&self, x: &str) -> Option<&Index> {
        self.pairs.get(x)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The matched interval pairs as a sorted multiset: equality of two
    /// matchings up to reindexing both ends.
    pub fn interval_pairs(
        &self,
    ) -> Vec<(crate::interval::Interval<Q>, crate::interval::Interval<Q>)> {
        let mut v: Vec<_> = self
            .pairs
            .iter()
            .map(|(x, y)| {
                (
                    self.source.get(x).expect("validated index").clone(),
                    self.target.get(y).expect("validated index").clone(),
                )
            })
            .collect();
        v.sort();
        v
    }

    /// Overlap composition `self ⊛ earlier`: relation composition keeping
    /// only pairs whose ends still overlap above.
    pub fn compose(&self, earlier: &Self) -> Result<Self> {
        if !earlier.target.same_presentation(&self.source) {
            return Err(Error::Mismatch(
                "overlap composition: middle barcodes differ".into(),
            ));
        }
        let mut pairs = Vec::new();
        for (x, y) in earlier.pairs() {
            if let Some(z) = self.apply(y) {
                let i = earlier.source.get(x).expect("validated index");
                let k = self.target.get(z).expect("validated index");
                if i.overlaps_above(k) {
                    pairs.push((x.clone(), z.clone()));
                }
            }
        }
        OverlapMatching::new(earlier.source.clone(), self.target.clone(), pairs)
    }

    /// The kernel barcode `{ker(σ,I) ≠ ∅}` and the canonical matching
    /// `ker σ ⇸ C`.
    ///
    /// `ker(σ,I)` is `I` for unmatched entries and the upper difference
    /// `I∖σ(I)` otherwise; empty differences are dropped.  Kernel entries
    /// reuse the index of the originating entry.
    pub fn kernel(&self) -> (Barcode<Q>, OverlapMatching<Q>) {
        let mut entries = Vec::new();
        let mut pairs = Vec::new();
        for (x, i) in self.source.iter() {
            let piece = match self.pairs.get(x) {
                None => Some(i.clone()),
                Some(y) => i.upper_difference(self.target.get(y).expect("validated index")),
            };
            if let Some(k) = piece {
                entries.push((x.clone(), k));
                pairs.push((x.clone(), x.clone()));
            }
        }
        let ker = Barcode::new(entries).expect("source indices are distinct");
        let into = OverlapMatching::new(ker.clone(), self.source.clone(), pairs)
            .expect("kernel intervals coincide with their originals above");
        (ker, into)
    }

    /// The cokernel barcode `{coker(σ,J) ≠ ∅}` and the canonical matching
    /// `D ⇸ coker σ`.
    pub fn cokernel(&self) -> (Barcode<Q>, OverlapMatching<Q>) {
        let matched_to: BTreeMap<&Index, &Index> = self.pairs.iter().map(|(x, y)| (y, x)).collect();
        let mut entries = Vec::new();
        let mut pairs = Vec::new();
        for (y, j) in self.target.iter() {
            let piece = match matched_to.get(y) {
                None => Some(j.clone()),
                Some(x) => j.lower_difference(self.source.get(*x).expect("validated index")),
            };
            if let Some(c) = piece {
                entries.push((y.clone(), c));
                pairs.push((y.clone(), y.clone()));
            }
        }
        let coker = Barcode::new(entries).expect("target indices are distinct");
        let onto = OverlapMatching::new(self.target.clone(), coker.clone(), pairs)
            .expect("target intervals coincide with their cokernel pieces below");
        (coker, onto)
    }

    /// The epi-mono factorization through the image barcode `{I∩J}`.
    ///
    /// Returns `(im σ, epi: C ⇸ im σ, mono: im σ ⇸ D)` with
    /// `mono ⊛ epi = σ`.  Image entries reuse the source entry's index.
    pub fn image(&self) -> (Barcode<Q>, OverlapMatching<Q>, OverlapMatching<Q>) {
        let mut entries = Vec::new();
        let mut epi_pairs = Vec::new();
        let mut mono_pairs = Vec::new();
        for (x, i) in self.source.iter() {
            if let Some(y) = self.pairs.get(x) {
                let j = self.target.get(y).expect("validated index");
                let meet = i.intersection(j).expect("overlapping intervals intersect");
                entries.push((x.clone(), meet));
                epi_pairs.push((x.clone(), x.clone()));
                mono_pairs.push((x.clone(), y.clone()));
            }
        }
        let im = Barcode::new(entries).expect("source indices are distinct");
        let epi = OverlapMatching::new(self.source.clone(), im.clone(), epi_pairs)
            .expect("each interval overlaps its intersection above");
        let mono = OverlapMatching::new(im.clone(), self.target.clone(), mono_pairs)
            .expect("each intersection overlaps the target above");
        (im, epi, mono)
    }

    /// Monomorphisms are exactly the morphisms with empty kernel.
    pub fn is_mono(&self) -> bool {
        self.kernel().0.is_empty()
    }

    /// Epimorphisms are exactly the morphisms with empty cokernel.
    pub fn is_epi(&self) -> bool {
        self.cokernel().0.is_empty()
    }
}
