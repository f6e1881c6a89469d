//! Decorated intervals of the extended real line.
//!
//! An interval carries explicit open/closed decorations on both endpoints.
//! The decorations matter everywhere: the overlap relation, set differences,
//! and δ-triviality all distinguish `[a,b)` from `[a,b]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{half, ExtReal, Scalar, Threshold};

/// A nonempty interval with explicit endpoint decorations.
///
/// Nonemptiness means `lo < hi`, or `lo = hi` finite with both flags closed
/// (a singleton).  Infinite endpoints are always open.  The derived order is
/// structural (lexicographic on the fields) and is used only to keep
/// collections deterministic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval<Q> {
    lo: ExtReal<Q>,
    lo_closed: bool,
    hi: ExtReal<Q>,
    hi_closed: bool,
}

impl<Q: Scalar> Interval<Q> {
    pub fn new(lo: ExtReal<Q>, lo_closed: bool, hi: ExtReal<Q>, hi_closed: bool) -> Result<Self> {
        if lo_closed && !lo.is_finite() || hi_closed && !hi.is_finite() {
            return Err(Error::InvalidInterval(format!(
                "infinite endpoint must be open: {}",
                render(&lo, lo_closed, &hi, hi_closed)
            )));
        }
        let text = render(&lo, lo_closed, &hi, hi_closed);
        Self::make(lo, lo_closed, hi, hi_closed)
            .ok_or(Error::InvalidInterval(format!("empty: {text}")))
    }

    /// Build if nonempty, `None` otherwise.  Decorations on infinite
    /// endpoints are normalized to open, so set-operation results that land
    /// on an infinity stay well formed.
    fn make(lo: ExtReal<Q>, lo_closed: bool, hi: ExtReal<Q>, hi_closed: bool) -> Option<Self> {
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        let nonempty = lo < hi || (lo == hi && lo_closed && hi_closed);
        nonempty.then_some(Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        })
    }

    /// The half-open interval `[a,b)`, the shape of a persistence bar.
    pub fn closed_open(a: Q, b: ExtReal<Q>) -> Result<Self> {
        Self::new(ExtReal::Finite(a), true, b, false)
    }

    /// The singleton `[a,a]`.
    pub fn singleton(a: Q) -> Self {
        Interval {
            lo: ExtReal::Finite(a.clone()),
            lo_closed: true,
            hi: ExtReal::Finite(a),
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> &ExtReal<Q> {
        &self.lo
    }

    pub fn hi(&self) -> &ExtReal<Q> {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    /// Membership of a finite point under the decoration semantics.
    pub fn contains(&self, t: &Q) -> bool {
        let t = ExtReal::Finite(t.clone());
        let above_lo = self.lo < t || (self.lo == t && self.lo_closed);
        let below_hi = t < self.hi || (t == self.hi && self.hi_closed);
        above_lo && below_hi
    }

    /// `self ∩ other`, `None` when disjoint.
    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Self::make(lo, lo_closed, hi, hi_closed)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.intersection(other).is_some()
    }

    /// `self ⊆ other` under the decoration semantics.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intersection(other).as_ref() == Some(self)
    }

    /// True iff every point of `other` has a point of `self` at or above it:
    /// ∀s∈other ∃t∈self with s ≤ t.
    pub fn bounds_above(&self, other: &Self) -> bool {
        match other.hi.cmp(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => !other.hi_closed || self.hi_closed,
        }
    }

    /// True iff every point of `other` has a point of `self` at or below it:
    /// ∀t∈other ∃s∈self with s ≤ t.
    pub fn bounds_below(&self, other: &Self) -> bool {
        match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.lo_closed || !other.lo_closed,
        }
    }

    /// `self` overlaps `other` above: they intersect, `self` bounds `other`
    /// above, and `other` bounds `self` below.
    pub fn overlaps_above(&self, other: &Self) -> bool {
        self.intersects(other) && self.bounds_above(other) && other.bounds_below(self)
    }

    /// `I(δ) = {t | t+δ ∈ I}`: both endpoints move down by δ.
    pub fn shift(&self, delta: &Q) -> Self {
        debug_assert!(!delta.is_negative());
        Interval {
            lo: self.lo.minus(delta),
            lo_closed: self.lo_closed,
            hi: self.hi.minus(delta),
            hi_closed: self.hi_closed,
        }
    }

    /// `{t | ∃s∈I, |s−t| ≤ δ}`: endpoints move outward by δ, decorations kept.
    pub fn thicken(&self, delta: &Q) -> Self {
        debug_assert!(!delta.is_negative());
        Interval {
            lo: self.lo.minus(delta),
            lo_closed: self.lo_closed,
            hi: self.hi.plus(delta),
            hi_closed: self.hi_closed,
        }
    }

    /// True iff no t has both t and t+δ in the interval.
    ///
    /// Closed form: finite length < δ, or = δ with at least one open
    /// endpoint; intervals with an infinite endpoint are never δ-trivial,
    /// and nothing is 0-trivial (intervals are nonempty).
    pub fn is_delta_trivial(&self, delta: &Q) -> bool {
        debug_assert!(!delta.is_negative());
        self.triviality_threshold().holds_at(delta)
    }

    /// The infimum of the δ for which the interval is δ-trivial.
    ///
    /// The value is the interval's length; it is attained unless both
    /// endpoints are closed.  Infinite intervals are never trivial: (+∞, not
    /// attained).
    pub fn triviality_threshold(&self) -> Threshold<Q> {
        match (&self.lo, &self.hi) {
            (ExtReal::Finite(lo), ExtReal::Finite(hi)) => {
                let length = hi.clone() - lo.clone();
                Threshold {
                    value: ExtReal::Finite(length),
                    attained: !(self.lo_closed && self.hi_closed),
                }
            }
            _ => Threshold::infinite(),
        }
    }

    /// `self ∖ other` for `self` overlapping `other` above: the part of
    /// `self` above `other`, or `None` when `self ⊆ other`.
    ///
    /// The precondition `overlaps_above(self, other)` is a contract error.
    pub fn upper_difference(&self, other: &Self) -> Option<Self> {
        assert!(
            self.overlaps_above(other),
            "upper_difference requires overlap above: {self} vs {other}"
        );
        Self::make(
            other.hi.clone(),
            !other.hi_closed,
            self.hi.clone(),
            self.hi_closed,
        )
    }

    /// `self ∖ other` for `other` overlapping `self` above: the part of
    /// `self` below `other`, or `None` when `self ⊆ other`.
    ///
    /// The precondition `overlaps_above(other, self)` is a contract error.
    pub fn lower_difference(&self, other: &Self) -> Option<Self> {
        assert!(
            other.overlaps_above(self),
            "lower_difference requires overlap above: {other} vs {self}"
        );
        Self::make(
            self.lo.clone(),
            self.lo_closed,
            other.lo.clone(),
            !other.lo_closed,
        )
    }

    /// A point guaranteed to lie in the interval.
    pub fn inner_point(&self) -> Q {
        match (&self.lo, &self.hi) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => half(&(a.clone() + b.clone())),
            (ExtReal::Finite(a), _) => a.clone() + Q::one(),
            (_, ExtReal::Finite(b)) => b.clone() - Q::one(),
            _ => Q::zero(),
        }
    }
}

fn render<Q: fmt::Display>(
    lo: &ExtReal<Q>,
    lo_closed: bool,
    hi: &ExtReal<Q>,
    hi_closed: bool,
) -> String {
    format!(
        "{}{},{}{}",
        if lo_closed { '[' } else { '(' },
        lo,
        hi,
        if hi_closed { ']' } else { ')' }
    )
}

impl<Q: Scalar> fmt::Display for Interval<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            render(&self.lo, self.lo_closed, &self.hi, self.hi_closed)
        )
    }
}

impl<Q: Scalar> FromStr for Interval<Q> {
    type Err = Error;

    /// Parse `[0,4)`, `(-inf,2]`, `[3/2,5/2]`, `[1.5,2.5)`, …
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let invalid = |msg: &str| Error::InvalidInterval(format!("{msg}: `{s}`"));
        let mut chars = s.chars();
        let lo_closed = match chars.next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(invalid("expected `[` or `(`")),
        };
        let hi_closed = match chars.next_back() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(invalid("expected `]` or `)`")),
        };
        let body = chars.as_str();
        let (lo_text, hi_text) = body
            .split_once(',')
            .ok_or_else(|| invalid("expected `lo,hi`"))?;
        if hi_text.contains(',') {
            return Err(invalid("expected exactly one `,`"));
        }
        let lo = ExtReal::parse(lo_text).map_err(|e| invalid(&e))?;
        let hi = ExtReal::parse(hi_text).map_err(|e| invalid(&e))?;
        Interval::new(lo, lo_closed, hi, hi_closed)
    }
}
