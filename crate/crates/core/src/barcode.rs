//! Barcodes: indexed multisets of intervals.
//!
//! A barcode is a finite sequence of entries `(index, interval)` with
//! pairwise distinct opaque indices.  Two barcodes are *reindexings* of one
//! another when their interval multisets agree; that is exactly isomorphism
//! in the category of barcodes.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::overlap::OverlapMatching;
use crate::scalar::{Scalar, Threshold};

/// Opaque entry label.
pub type Index = String;

/// A finite multiset of intervals represented with explicit indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barcode<Q> {
    entries: Vec<(Index, Interval<Q>)>,
}

impl<Q: Scalar> Barcode<Q> {
    /// Validates that indices are pairwise distinct.
    pub fn new(entries: Vec<(Index, Interval<Q>)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (index, _) in &entries {
            if !seen.insert(index.clone()) {
                return Err(Error::InvalidMatching(format!(
                    "duplicate barcode index `{index}`"
                )));
            }
        }
        Ok(Barcode { entries })
    }

    pub fn empty() -> Self {
        Barcode {
            entries: Vec::new(),
        }
    }

    /// Auto-indexes the intervals as `i1`, `i2`, … in order.
    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval<Q>>) -> Self {
        Barcode {
            entries: intervals
                .into_iter()
                .enumerate()
                .map(|(k, i)| (format!("i{}", k + 1), i))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(Index, Interval<Q>)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Index, Interval<Q>)> {
        self.entries.iter()
    }

    pub fn intervals(&self) -> impl Iterator<Item = &Interval<Q>> {
        self.entries.iter().map(|(_, i)| i)
    }

    pub fn indices(&self) -> impl Iterator<Item = &Index> {
        self.entries.iter().map(|(x, _)| x)
    }

    pub fn index_set(&self) -> std::collections::BTreeSet<Index> {
        self.indices().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: &str) -> Option<&Interval<Q>> {
        self.entries
            .iter()
            .find(|(x, _)| x == index)
            .map(|(_, i)| i)
    }

    /// Number of entries whose interval equals `interval` exactly
    /// (values and decorations).
    pub fn multiplicity(&self, interval: &Interval<Q>) -> usize {
        self.intervals().filter(|i| *i == interval).count()
    }

    /// Same index-to-interval assignment, order-insensitively: the
    /// precondition for gluing matchings end to end.
    pub fn same_presentation(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|(x, i)| other.get(x) == Some(i))
    }

    /// True iff the interval multisets agree; this is isomorphism in Barc.
    pub fn reindexes(&self, other: &Self) -> bool {
        let mut left: Vec<&Interval<Q>> = self.intervals().collect();
        let mut right: Vec<&Interval<Q>> = other.intervals().collect();
        left.sort();
        right.sort();
        left == right
    }

    /// `C(δ)`: every interval shifted down by δ, indices preserved.
    pub fn shift(&self, delta: &Q) -> Self {
        Barcode {
            entries: self
                .entries
                .iter()
                .map(|(x, i)| (x.clone(), i.shift(delta)))
                .collect(),
        }
    }

    /// True iff every interval is δ-trivial.
    pub fn is_delta_trivial(&self, delta: &Q) -> bool {
        self.intervals().all(|i| i.is_delta_trivial(delta))
    }

    /// The infimum of the δ for which the whole barcode is δ-trivial:
    /// the largest interval threshold, `(0, attained)` when empty.
    pub fn triviality_threshold(&self) -> Threshold<Q> {
        self.intervals()
            .map(|i| i.triviality_threshold())
            .max()
            .unwrap_or_else(Threshold::zero)
    }
}

/// `φ^C(δ)`: the comparison morphism from `C` to `C(δ)` matching `I` to
/// `I(δ)` exactly when `I` is not δ-trivial.
pub fn phi<Q: Scalar>(c: &Barcode<Q>, delta: &Q) -> OverlapMatching<Q> {
    let pairs: Vec<(Index, Index)> = c
        .iter()
        .filter(|(_, i)| !i.is_delta_trivial(delta))
        .map(|(x, _)| (x.clone(), x.clone()))
        .collect();
    OverlapMatching::new(c.clone(), c.shift(delta), pairs)
        .expect("phi pairs non-trivial intervals with their shifts, which overlap above")
}
