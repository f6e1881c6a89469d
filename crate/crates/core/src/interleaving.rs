//! δ-interleavings, δ-matchings, and the exact bottleneck distance.
//!
//! A δ-interleaving between barcodes `C` and `D` is a pair of overlap
//! matchings `f: C ⇸ D(δ)`, `g: D ⇸ C(δ)` whose shifted composites equal the
//! comparison morphisms `φ(2δ)`.  A δ-matching is a plain matching covering
//! every non-2δ-trivial interval, with matched pairs mutually contained in
//! each other's δ-thickenings.  The two notions determine each other
//! (`r^δ ∘ f` turns one into the other), so the interleaving distance and
//! the bottleneck distance agree; both are computed exactly here by scanning
//! a finite candidate set and testing feasibility with maximum bipartite
//! matching.

use std::collections::BTreeSet;

use crate::barcode::{phi, Barcode, Index};
use crate::bipartite::BipartiteGraph;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::matching::Matching;
use crate::overlap::OverlapMatching;
use crate::scalar::{half, ExtReal, Scalar, Threshold};

/// A validated δ-interleaving: `f: C ⇸ D(δ)` and `g: D ⇸ C(δ)` with
/// `shift(g,δ) ⊛ f = φ^C(2δ)` and `shift(f,δ) ⊛ g = φ^D(2δ)`.
#[derive(Clone, Debug)]
pub struct InterleavingPair<Q> {
    delta: Q,
    f: OverlapMatching<Q>,
    g: OverlapMatching<Q>,
}

impl<Q: Scalar> InterleavingPair<Q> {
    /// Validates the two composite equations (and the source/target shapes)
    /// before accepting the pair.
    pub fn new(delta: Q, f: OverlapMatching<Q>, g: OverlapMatching<Q>) -> Result<Self> {
        let c = f.source().clone();
        let d = g.source().clone();
        if is_interleaving(&c, &d, &delta, &f, &g)? {
            Ok(InterleavingPair { delta, f, g })
        } else {
            Err(Error::Mismatch(
                "composites do not equal the comparison morphisms".into(),
            ))
        }
    }

    pub fn delta(&self) -> &Q {
        &self.delta
    }

    pub fn forward(&self) -> &OverlapMatching<Q> {
        &self.f
    }

    pub fn backward(&self) -> &OverlapMatching<Q> {
        &self.g
    }
}

/// Outcome of a distance computation: the exact infimum, whether some
/// matching achieves it, and a witness δ-matching exactly when one does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceResult<Q> {
    pub value: ExtReal<Q>,
    pub attained: bool,
    pub witness: Option<Matching>,
}

/// Transports a matching along the shift: both barcodes move down by δ and
/// the pairs are kept.  Overlap above is translation invariant, so the
/// result is again an overlap matching.
pub fn shift_matching<Q: Scalar>(f: &OverlapMatching<Q>, delta: &Q) -> OverlapMatching<Q> {
    let pairs: Vec<(Index, Index)> = f.pairs().map(|(x, y)| (x.clone(), y.clone())).collect();
    OverlapMatching::new(f.source().shift(delta), f.target().shift(delta), pairs)
        .expect("translation preserves overlap above")
}

/// Undoes a downward shift: every interval moves up by δ, indices kept.
fn unshift<Q: Scalar>(b: &Barcode<Q>, delta: &Q) -> Barcode<Q> {
    let entries = b
        .iter()
        .map(|(x, i)| {
            let up = Interval::new(
                i.lo().plus(delta),
                i.lo_closed(),
                i.hi().plus(delta),
                i.hi_closed(),
            )
            .expect("shifting an interval preserves nonemptiness");
            (x.clone(), up)
        })
        .collect();
    Barcode::new(entries).expect("indices unchanged")
}

/// `r^δ: D(δ) → D`, the index-preserving bijection undoing the shift.
///
/// `D(δ)` and `D` carry the same indices, so at the level of matchings this
/// is the identity partial injection on the index set of `D`.
pub fn r_delta<Q: Scalar>(d: &Barcode<Q>, delta: &Q) -> Matching {
    debug_assert!(!delta.is_negative());
    Matching::identity(&d.index_set())
}

fn same_morphism<Q: Scalar>(a: &OverlapMatching<Q>, b: &OverlapMatching<Q>) -> bool {
    let pairs = |m: &OverlapMatching<Q>| -> Vec<(Index, Index)> {
        m.pairs().map(|(x, y)| (x.clone(), y.clone())).collect()
    };
    a.source().same_presentation(b.source())
        && a.target().same_presentation(b.target())
        && pairs(a) == pairs(b)
}

/// True iff `(f, g)` is a δ-interleaving between `c` and `d`: both shifted
/// composites equal the comparison morphisms at 2δ.
///
/// Mismatched sources or targets are an error, not a `false`.
pub fn is_interleaving<Q: Scalar>(
    c: &Barcode<Q>,
    d: &Barcode<Q>,
    delta: &Q,
    f: &OverlapMatching<Q>,
    g: &OverlapMatching<Q>,
) -> Result<bool> {
    if !f.source().same_presentation(c)
        || !f.target().same_presentation(&d.shift(delta))
        || !g.source().same_presentation(d)
        || !g.target().same_presentation(&c.shift(delta))
    {
        return Err(Error::Mismatch(
            "interleaving morphisms must run C ⇸ D(δ) and D ⇸ C(δ)".into(),
        ));
    }
    let two = delta.clone() + delta.clone();
    let through_d = shift_matching(g, delta).compose(f)?;
    let through_c = shift_matching(f, delta).compose(g)?;
    Ok(same_morphism(&through_d, &phi(c, &two)) && same_morphism(&through_c, &phi(d, &two)))
}

/// True iff `sigma` is a δ-matching between `c` and `d`: every
/// non-2δ-trivial interval on either side is matched, and each matched pair
/// is mutually contained in the other's δ-thickening.
///
/// `sigma` must be a matching on exactly the two index sets.
pub fn is_delta_matching<Q: Scalar>(
    sigma: &Matching,
    c: &Barcode<Q>,
    d: &Barcode<Q>,
    delta: &Q,
) -> bool {
    assert_eq!(sigma.source(), &c.index_set(), "matching source mismatch");
    assert_eq!(sigma.target(), &d.index_set(), "matching target mismatch");
    let two = delta.clone() + delta.clone();
    for (x, i) in c.iter() {
        if !i.is_delta_trivial(&two) && sigma.apply(x).is_none() {
            return false;
        }
    }
    let image = sigma.image_set();
    for (y, j) in d.iter() {
        if !j.is_delta_trivial(&two) && !image.contains(y) {
            return false;
        }
    }
    sigma.pairs().all(|(x, y)| {
        let i = c.get(x).expect("index sets agree");
        let j = d.get(y).expect("index sets agree");
        i.is_subset_of(&j.thicken(delta)) && j.is_subset_of(&i.thicken(delta))
    })
}

/// `r^δ ∘ f`: rereads an overlap matching `C ⇸ D(δ)` as a plain matching
/// `C ⇸ D` on index sets (the shift preserves indices).
pub fn to_delta_matching<Q: Scalar>(f: &OverlapMatching<Q>) -> Matching {
    let pairs: Vec<(Index, Index)> = f.pairs().map(|(x, y)| (x.clone(), y.clone())).collect();
    Matching::new(f.source().index_set(), f.target().index_set(), pairs)
        .expect("an overlap matching is a partial injection on indices")
}

/// Rebuilds `f: C ⇸ D(δ)` with `r^δ ∘ f = sigma`, failing if some matched
/// pair does not overlap above once the target is shifted.
pub fn from_delta_matching<Q: Scalar>(
    sigma: &Matching,
    c: &Barcode<Q>,
    d: &Barcode<Q>,
    delta: &Q,
) -> Result<OverlapMatching<Q>> {
    if sigma.source() != &c.index_set() || sigma.target() != &d.index_set() {
        return Err(Error::Mismatch(
            "matching indices do not agree with the barcodes".into(),
        ));
    }
    let shifted = d.shift(delta);
    for (x, y) in sigma.pairs() {
        let i = c.get(x).expect("checked index");
        let j = shifted.get(y).expect("checked index");
        if !i.overlaps_above(j) {
            return Err(Error::NotOverlap(format!(
                "{i} does not overlap {j} above (pair {x} -> {y} after shifting by {delta})"
            )));
        }
    }
    let pairs: Vec<(Index, Index)> = sigma.pairs().map(|(x, y)| (x.clone(), y.clone())).collect();
    OverlapMatching::new(c.clone(), shifted, pairs)
}

/// True iff `f` is a δ-interleaving morphism: kernel and cokernel are both
/// 2δ-trivial, which happens exactly when a partner `g` exists.
pub fn is_interleaving_morphism<Q: Scalar>(f: &OverlapMatching<Q>, delta: &Q) -> bool {
    let two = delta.clone() + delta.clone();
    f.kernel().0.is_delta_trivial(&two) && f.cokernel().0.is_delta_trivial(&two)
}

/// The partner of a δ-interleaving morphism `f: C ⇸ D(δ)`: the overlap
/// matching `g: D ⇸ C(δ)` pairing `J ↦ I(δ)` for each `(I, J(δ))` in `f`
/// whenever the pair overlaps above, so that `(f, g)` is a δ-interleaving.
///
/// `is_interleaving_morphism(f, δ)` is a contract error.
pub fn partner<Q: Scalar>(f: &OverlapMatching<Q>, delta: &Q) -> OverlapMatching<Q> {
    assert!(
        is_interleaving_morphism(f, delta),
        "partner requires a 2δ-trivial kernel and cokernel"
    );
    let d = unshift(f.target(), delta);
    let c_shifted = f.source().shift(delta);
    let pairs: Vec<(Index, Index)> = f
        .pairs()
        .filter(|(x, y)| {
            let j = d.get(y).expect("validated index");
            let i = c_shifted.get(x).expect("validated index");
            j.overlaps_above(i)
        })
        .map(|(x, y)| (y.clone(), x.clone()))
        .collect();
    OverlapMatching::new(d, c_shifted, pairs).expect("pairs filtered by overlap above")
}

/// The infimum δ at which the mutual-thickening condition
/// `I ⊆ ex^δ(J) ∧ J ⊆ ex^δ(I)` starts to hold: the maximum of the four
/// one-sided endpoint thresholds.
fn pair_threshold<Q: Scalar>(i: &Interval<Q>, j: &Interval<Q>) -> Threshold<Q> {
    // Left constraint of `inner ⊆ ex^δ(outer)`: the thickened lower end
    // `outer.lo − δ` must reach at or below `inner.lo`.
    fn lo_side<Q: Scalar>(inner: &Interval<Q>, outer: &Interval<Q>) -> Threshold<Q> {
        let at_equality = outer.lo_closed() || !inner.lo_closed();
        match (outer.lo(), inner.lo()) {
            (ExtReal::NegInf, _) => Threshold::zero(),
            (ExtReal::Finite(_), ExtReal::NegInf) => Threshold::infinite(),
            (ExtReal::Finite(o), ExtReal::Finite(i)) => {
                let diff = o.clone() - i.clone();
                if diff.is_negative() {
                    Threshold::zero()
                } else {
                    Threshold {
                        value: ExtReal::Finite(diff),
                        attained: at_equality,
                    }
                }
            }
            (ExtReal::PosInf, _) | (_, ExtReal::PosInf) => unreachable!("lo is never +∞"),
        }
    }
    // Right constraint: `inner.hi` must stay at or below `outer.hi + δ`.
    fn hi_side<Q: Scalar>(inner: &Interval<Q>, outer: &Interval<Q>) -> Threshold<Q> {
        let at_equality = outer.hi_closed() || !inner.hi_closed();
        match (outer.hi(), inner.hi()) {
            (ExtReal::PosInf, _) => Threshold::zero(),
            (ExtReal::Finite(_), ExtReal::PosInf) => Threshold::infinite(),
            (ExtReal::Finite(o), ExtReal::Finite(i)) => {
                let diff = i.clone() - o.clone();
                if diff.is_negative() {
                    Threshold::zero()
                } else {
                    Threshold {
                        value: ExtReal::Finite(diff),
                        attained: at_equality,
                    }
                }
            }
            (ExtReal::NegInf, _) | (_, ExtReal::NegInf) => unreachable!("hi is never -∞"),
        }
    }
    [lo_side(i, j), hi_side(i, j), lo_side(j, i), hi_side(j, i)]
        .into_iter()
        .max()
        .expect("four candidates")
}

/// The infimum δ at which an interval becomes 2δ-trivial: half its
/// triviality threshold.
fn half_threshold<Q: Scalar>(i: &Interval<Q>) -> Threshold<Q> {
    let t = i.triviality_threshold();
    Threshold {
        value: match t.value {
            ExtReal::Finite(v) => ExtReal::Finite(half(&v)),
            other => other,
        },
        attained: t.attained,
    }
}

/// The finite candidate set for the bottleneck infimum: 0, the absolute
/// differences of same-side finite endpoints across the barcodes, and the
/// half-lengths of all finite intervals.
fn candidates<Q: Scalar>(c: &Barcode<Q>, d: &Barcode<Q>) -> Vec<Q> {
    let mut set: BTreeSet<Q> = BTreeSet::new();
    set.insert(Q::zero());
    for i in c.intervals().chain(d.intervals()) {
        if let (ExtReal::Finite(a), ExtReal::Finite(b)) = (i.lo(), i.hi()) {
            set.insert(half(&(b.clone() - a.clone())));
        }
    }
    for i in c.intervals() {
        for j in d.intervals() {
            if let (ExtReal::Finite(a), ExtReal::Finite(b)) = (i.lo(), j.lo()) {
                set.insert((a.clone() - b.clone()).abs());
            }
            if let (ExtReal::Finite(a), ExtReal::Finite(b)) = (i.hi(), j.hi()) {
                set.insert((a.clone() - b.clone()).abs());
            }
        }
    }
    set.into_iter().collect()
}

/// Whether a condition with the given threshold holds just above `delta`,
/// i.e. at `delta + ε` for every small ε > 0.
fn holds_in_limit<Q: Scalar>(t: &Threshold<Q>, delta: &Q) -> bool {
    t.value <= ExtReal::Finite(delta.clone())
}

/// The feasibility graph at a candidate δ, augmented with dummy vertices so
/// that "some matching covers every required interval" becomes "a perfect
/// matching exists".
///
/// Left vertices are the intervals of `C` then one dummy per interval of
/// `D`; right vertices are the intervals of `D` then one dummy per interval
/// of `C`.  Optional (2δ-trivial) intervals get an edge to their own dummy,
/// and dummies pair freely with each other.
fn feasibility_graph<Q: Scalar>(
    pair_thresholds: &[Vec<Threshold<Q>>],
    half_c: &[Threshold<Q>],
    half_d: &[Threshold<Q>],
    delta: &Q,
    limit: bool,
) -> BipartiteGraph {
    let holds = |t: &Threshold<Q>| {
        if limit {
            holds_in_limit(t, delta)
        } else {
            t.holds_at(delta)
        }
    };
    let (nc, nd) = (half_c.len(), half_d.len());
    let mut g = BipartiteGraph::new(nc + nd, nd + nc);
    for i in 0..nc {
        for j in 0..nd {
            if holds(&pair_thresholds[i][j]) {
                g.add_edge(i, j);
            }
        }
    }
    for (i, t) in half_c.iter().enumerate() {
        if holds(t) {
            g.add_edge(i, nd + i);
        }
    }
    for (j, t) in half_d.iter().enumerate() {
        if holds(t) {
            g.add_edge(nc + j, j);
        }
    }
    for j in 0..nd {
        for i in 0..nc {
            g.add_edge(nc + j, nd + i);
        }
    }
    g
}

/// The exact bottleneck distance, with attainment and (when attained) the
/// lexicographically least feasible δ-matching as a witness.
///
/// Scans the candidate values in increasing order; at each, feasibility "just
/// above" the candidate is decided first (the infimum), then feasibility at
/// the candidate exactly (attainment).  Feasibility is constant between
/// consecutive candidates, so the first candidate feasible in the limit is
/// the infimum.
pub fn bottleneck_distance<Q: Scalar>(c: &Barcode<Q>, d: &Barcode<Q>) -> DistanceResult<Q> {
    let c_entries = c.entries();
    let d_entries = d.entries();
    let pair_thresholds: Vec<Vec<Threshold<Q>>> = c_entries
        .iter()
        .map(|(_, i)| {
            d_entries
                .iter()
                .map(|(_, j)| pair_threshold(i, j))
                .collect()
        })
        .collect();
    let half_c: Vec<Threshold<Q>> = c_entries.iter().map(|(_, i)| half_threshold(i)).collect();
    let half_d: Vec<Threshold<Q>> = d_entries.iter().map(|(_, j)| half_threshold(j)).collect();
    let perfect = c_entries.len() + d_entries.len();
    for delta in candidates(c, d) {
        let limit = feasibility_graph(&pair_thresholds, &half_c, &half_d, &delta, true);
        if limit.max_matching_size() < perfect {
            continue;
        }
        let exact = feasibility_graph(&pair_thresholds, &half_c, &half_d, &delta, false);
        if exact.max_matching_size() < perfect {
            return DistanceResult {
                value: ExtReal::Finite(delta),
                attained: false,
                witness: None,
            };
        }
        let assignment = exact.lex_maximum_matching();
        let pairs: Vec<(Index, Index)> = c_entries
            .iter()
            .enumerate()
            .filter_map(|(i, (x, _))| match assignment[i] {
                Some(j) if j < d_entries.len() => Some((x.clone(), d_entries[j].0.clone())),
                _ => None,
            })
            .collect();
        let witness = Matching::new(c.index_set(), d.index_set(), pairs)
            .expect("a matching in the graph is a partial injection");
        return DistanceResult {
            value: ExtReal::Finite(delta),
            attained: true,
            witness: Some(witness),
        };
    }
    DistanceResult {
        value: ExtReal::PosInf,
        attained: false,
        witness: None,
    }
}

/// The interleaving distance: equal to the bottleneck distance, with the
/// witness converted into an actual δ-interleaving pair when attained.
pub fn interleaving_distance<Q: Scalar>(
    c: &Barcode<Q>,
    d: &Barcode<Q>,
) -> (DistanceResult<Q>, Option<InterleavingPair<Q>>) {
    let result = bottleneck_distance(c, d);
    let pair = match (&result.value, result.attained, &result.witness) {
        (ExtReal::Finite(delta), true, Some(sigma)) => {
            // A δ-matching may pair two 2δ-trivial intervals that do not
            // overlap above once shifted; dropping such pairs keeps it a
            // δ-matching and makes it realizable as an overlap matching.
            let shifted = d.shift(delta);
            let two = delta.clone() + delta.clone();
            let kept: Vec<(Index, Index)> = sigma
                .pairs()
                .filter(|(x, y)| {
                    let i = c.get(x).expect("index sets agree");
                    let j = shifted.get(y.as_str()).expect("index sets agree");
                    if i.overlaps_above(j) {
                        return true;
                    }
                    debug_assert!(
                        i.is_delta_trivial(&two)
                            && d.get(y.as_str())
                                .expect("index sets agree")
                                .is_delta_trivial(&two),
                        "only pairs of 2δ-trivial intervals can fail to overlap"
                    );
                    false
                })
                .map(|(x, y)| (x.clone(), y.clone()))
                .collect();
            let pruned = Matching::new(c.index_set(), d.index_set(), kept)
                .expect("subset of a partial injection");
            let f = from_delta_matching(&pruned, c, d, delta)
                .expect("pruned pairs all overlap above after shifting");
            let g = partner(&f, delta);
            let pair = InterleavingPair::new(delta.clone(), f, g)
                .expect("a δ-matching witness always converts to a δ-interleaving");
            Some(pair)
        }
        _ => None,
    };
    (result, pair)
}
