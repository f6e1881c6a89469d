//! Stratified diagrams: finitely presented functors from the real line to
//! the category of matchings, and the equivalence with barcodes.
//!
//! A diagram with critical values `c_1 < … < c_k` assigns a finite token set
//! to each of the `2k+1` strata `(−∞,c_1), {c_1}, (c_1,c_2), …, {c_k},
//! (c_k,∞)` and a matching to each of the `2k` links between consecutive
//! strata; the functor's value is constant on each stratum and its internal
//! morphisms are the link composites.  `functor_E` turns a barcode into such
//! a diagram, `functor_F` glues a diagram's elements into interval classes
//! and reads off a barcode; on the finitely presented subcategory these are
//! mutually inverse equivalences, also on morphisms.

use std::collections::{BTreeMap, BTreeSet};

use crate::barcode::{Barcode, Index};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::matching::Matching;
use crate::overlap::OverlapMatching;
use crate::scalar::{half, ExtReal, Scalar};

/// A finitely presented functor from the real line to Mch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratifiedDiagram<Q> {
    critical: Vec<Q>,
    strata: Vec<BTreeSet<String>>,
    links: Vec<Matching>,
}

impl<Q: Scalar> StratifiedDiagram<Q> {
    /// Validates the stratification: strictly increasing critical values,
    /// `2k+1` strata, and `2k` links whose endpoint sets match the strata.
    pub fn new(
        critical: Vec<Q>,
        strata: Vec<BTreeSet<String>>,
        links: Vec<Matching>,
    ) -> Result<Self> {
        if critical.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDiagram(
                "critical values must be strictly increasing".into(),
            ));
        }
        if strata.len() != 2 * critical.len() + 1 {
            return Err(Error::InvalidDiagram(format!(
                "expected {} strata, found {}",
                2 * critical.len() + 1,
                strata.len()
            )));
        }
        if links.len() + 1 != strata.len() {
            return Err(Error::InvalidDiagram(format!(
                "expected {} links, found {}",
                strata.len() - 1,
                links.len()
            )));
        }
        for (i, link) in links.iter().enumerate() {
            if link.source() != &strata[i] || link.target() != &strata[i + 1] {
                return Err(Error::InvalidDiagram(format!(
                    "link {i} does not join strata {i} and {}",
                    i + 1
                )));
            }
        }
        Ok(StratifiedDiagram {
            critical,
            strata,
            links,
        })
    }

    /// The empty diagram: no critical values, one empty stratum.
    pub fn empty() -> Self {
        StratifiedDiagram {
            critical: Vec::new(),
            strata: vec![BTreeSet::new()],
            links: Vec::new(),
        }
    }

    pub fn critical_values(&self) -> &[Q] {
        &self.critical
    }

    pub fn strata(&self) -> &[BTreeSet<String>] {
        &self.strata
    }

    pub fn links(&self) -> &[Matching] {
        &self.links
    }

    pub fn is_empty(&self) -> bool {
        self.strata.iter().all(|s| s.is_empty())
    }

    /// Stratum position of a point: even positions are open strata, odd
    /// positions are critical points.
    pub fn stratum_position(&self, t: &Q) -> usize {
        match self.critical.binary_search(t) {
            Ok(j) => 2 * j + 1,
            Err(m) => 2 * m,
        }
    }

    /// A representative point inside the stratum at `position`.
    pub fn stratum_representative(&self, position: usize) -> Q {
        let k = self.critical.len();
        debug_assert!(position < 2 * k + 1);
        if position % 2 == 1 {
            return self.critical[(position - 1) / 2].clone();
        }
        let m = position / 2;
        if k == 0 {
            Q::zero()
        } else if m == 0 {
            self.critical[0].clone() - Q::one()
        } else if m == k {
            self.critical[k - 1].clone() + Q::one()
        } else {
            half(&(self.critical[m - 1].clone() + self.critical[m].clone()))
        }
    }

    /// The functor's value at `t`.
    pub fn evaluate(&self, t: &Q) -> &BTreeSet<String> {
        &self.strata[self.stratum_position(t)]
    }

    /// The internal morphism from `s` to `t`: the composite of the links
    /// between their strata; the identity when they share a stratum.
    pub fn internal(&self, s: &Q, t: &Q) -> Result<Matching> {
        if s > t {
            return Err(Error::Mismatch(format!(
                "internal morphism requires s ≤ t, got s = {s}, t = {t}"
            )));
        }
        let (ps, pt) = (self.stratum_position(s), self.stratum_position(t));
        let mut acc = Matching::identity(&self.strata[ps]);
        for i in ps..pt {
            acc = self.links[i].compose(&acc)?;
        }
        Ok(acc)
    }

    /// Inserts critical values, splitting open strata into open/point/open
    /// copies joined by identity links.  `evaluate` and `internal` are
    /// unchanged at every argument; already-present values are ignored.
    pub fn refine(&self, extra: impl IntoIterator<Item = Q>) -> Self {
        let mut d = self.clone();
        for v in extra {
            d = d.insert_critical(v);
        }
        d
    }

    fn insert_critical(mut self, v: Q) -> Self {
        let m = match self.critical.binary_search(&v) {
            Ok(_) => return self,
            Err(m) => m,
        };
        let p = 2 * m;
        let set = self.strata[p].clone();
        let id = Matching::identity(&set);
        self.critical.insert(m, v);
        self.strata.splice(p..=p, [set.clone(), set.clone(), set]);
        self.links.splice(p..p, [id.clone(), id]);
        self
    }

    /// True iff the internal morphism `t → t+δ` is empty for every real `t`.
    ///
    /// The pair of strata hit by `(t, t+δ)` only changes where `t` or `t+δ`
    /// crosses a critical value, so it suffices to check the breakpoints
    /// `c_i` and `c_i − δ`, the midpoints between consecutive breakpoints,
    /// and one point beyond each end.
    pub fn is_delta_trivial(&self, delta: &Q) -> bool {
        debug_assert!(!delta.is_negative());
        let mut probes: Vec<Q> = Vec::new();
        for c in &self.critical {
            probes.push(c.clone());
            probes.push(c.clone() - delta.clone());
        }
        probes.sort();
        probes.dedup();
        if probes.is_empty() {
            probes.push(Q::zero());
        } else {
            let lo = probes[0].clone() - Q::one();
            let hi = probes[probes.len() - 1].clone() + Q::one();
            let mids: Vec<Q> = probes
                .windows(2)
                .map(|w| half(&(w[0].clone() + w[1].clone())))
                .collect();
            probes.extend(mids);
            probes.push(lo);
            probes.push(hi);
        }
        probes.iter().all(|t| {
            self.internal(t, &(t.clone() + delta.clone()))
                .expect("t ≤ t + δ")
                .is_empty()
        })
    }

    /// True iff the diagrams are isomorphic as functors: after refining to a
    /// common grid, their interval-class span multisets agree stratumwise.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        let mut grid = self.critical.clone();
        grid.extend(other.critical.iter().cloned());
        grid.sort();
        grid.dedup();
        let a = self.refine(grid.clone());
        let b = other.refine(grid);
        let spans = |d: &StratifiedDiagram<Q>| {
            let mut v: Vec<(usize, usize)> = classes(d)
                .into_iter()
                .map(|c| (c.first, c.first + c.tokens.len() - 1))
                .collect();
            v.sort();
            v
        };
        spans(&a) == spans(&b)
    }
}

/// A natural transformation between diagrams on a shared critical grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans<Q> {
    source: StratifiedDiagram<Q>,
    target: StratifiedDiagram<Q>,
    components: Vec<Matching>,
}

impl<Q: Scalar> NatTrans<Q> {
    /// Validates the shared grid, the component endpoints, and naturality:
    /// each link square commutes as an equality of matchings.
    pub fn new(
        source: StratifiedDiagram<Q>,
        target: StratifiedDiagram<Q>,
        components: Vec<Matching>,
    ) -> Result<Self> {
        if source.critical != target.critical {
            return Err(Error::InvalidDiagram(
                "natural transformation requires a shared critical grid".into(),
            ));
        }
        if components.len() != source.strata.len() {
            return Err(Error::InvalidDiagram(format!(
                "expected {} components, found {}",
                source.strata.len(),
                components.len()
            )));
        }
        for (p, eta) in components.iter().enumerate() {
            if eta.source() != &source.strata[p] || eta.target() != &target.strata[p] {
                return Err(Error::InvalidDiagram(format!(
                    "component {p} does not join the strata at position {p}"
                )));
            }
        }
        for p in 0..source.links.len() {
            let left = components[p + 1].compose(&source.links[p])?;
            let right = target.links[p].compose(&components[p])?;
            if left != right {
                return Err(Error::InvalidDiagram(format!(
                    "naturality fails on the link at position {p}"
                )));
            }
        }
        Ok(NatTrans {
            source,
            target,
            components,
        })
    }

    pub fn identity(d: &StratifiedDiagram<Q>) -> Self {
        NatTrans {
            source: d.clone(),
            target: d.clone(),
            components: d.strata.iter().map(Matching::identity).collect(),
        }
    }

    /// The zero transformation: all components empty.
    pub fn zero(source: StratifiedDiagram<Q>, target: StratifiedDiagram<Q>) -> Result<Self> {
        let components = source
            .strata
            .iter()
            .zip(&target.strata)
            .map(|(s, t)| Matching::empty(s.clone(), t.clone()))
            .collect();
        NatTrans::new(source, target, components)
    }

    pub fn source(&self) -> &StratifiedDiagram<Q> {
        &self.source
    }

    pub fn target(&self) -> &StratifiedDiagram<Q> {
        &self.target
    }

    pub fn components(&self) -> &[Matching] {
        &self.components
    }

    /// Vertical composition `self ∘ earlier`, stratum by stratum.
    pub fn compose(&self, earlier: &Self) -> Result<Self> {
        if earlier.target != self.source {
            return Err(Error::Mismatch(
                "natural transformation composition: middle diagrams differ".into(),
            ));
        }
        let components: Result<Vec<Matching>> = self
            .components
            .iter()
            .zip(&earlier.components)
            .map(|(late, early)| late.compose(early))
            .collect();
        NatTrans::new(earlier.source.clone(), self.target.clone(), components?)
    }

    /// The pointwise kernel: unmatched source elements with restricted
    /// links, and the canonical inclusion into the source diagram.
    pub fn pointwise_kernel(&self) -> (StratifiedDiagram<Q>, NatTrans<Q>) {
        let strata: Vec<BTreeSet<String>> =
            self.components.iter().map(|eta| eta.kernel_set()).collect();
        let links: Vec<Matching> = self
            .source
            .links
            .iter()
            .enumerate()
            .map(|(p, link)| link.restrict(strata[p].clone(), strata[p + 1].clone()))
            .collect();
        let kernel = StratifiedDiagram {
            critical: self.source.critical.clone(),
            strata: strata.clone(),
            links,
        };
        let inclusions = strata
            .iter()
            .zip(&self.source.strata)
            .map(|(sub, full)| {
                Matching::new(
                    sub.clone(),
                    full.clone(),
                    sub.iter().map(|x| (x.clone(), x.clone())),
                )
                .expect("kernel strata are subsets of the source strata")
            })
            .collect();
        let into = NatTrans::new(kernel.clone(), self.source.clone(), inclusions)
            .expect("kernel elements are closed under links");
        (kernel, into)
    }

    /// The pointwise cokernel: unmatched target elements with restricted
    /// links, and the canonical projection from the target diagram.
    pub fn pointwise_cokernel(&self) -> (StratifiedDiagram<Q>, NatTrans<Q>) {
        let strata: Vec<BTreeSet<String>> = self
            .components
            .iter()
            .map(|eta| eta.cokernel_set())
            .collect();
        let links: Vec<Matching> = self
            .target
            .links
            .iter()
            .enumerate()
            .map(|(p, link)| link.restrict(strata[p].clone(), strata[p + 1].clone()))
            .collect();
        let cokernel = StratifiedDiagram {
            critical: self.target.critical.clone(),
            strata: strata.clone(),
            links,
        };
        let projections = strata
            .iter()
            .zip(&self.target.strata)
            .map(|(sub, full)| {
                Matching::new(
                    full.clone(),
                    sub.clone(),
                    sub.iter().map(|x| (x.clone(), x.clone())),
                )
                .expect("cokernel strata are subsets of the target strata")
            })
            .collect();
        let onto = NatTrans::new(self.target.clone(), cokernel.clone(), projections)
            .expect("matched elements stay matched along links");
        (cokernel, onto)
    }
}

/// `E` on objects: the stratified diagram of a barcode, with critical
/// values the barcode's finite endpoints.  The stratum at `t` holds a token
/// `index@position` for every entry whose interval contains `t`; links
/// connect the tokens of an entry across consecutive strata.
#[allow(non_snake_case)]
pub fn functor_E<Q: Scalar>(c: &Barcode<Q>) -> StratifiedDiagram<Q> {
    functor_E_on_grid(c, endpoint_grid(&[c]))
}

/// `E` with a prescribed critical grid, which must contain every finite
/// endpoint of the barcode.
#[allow(non_snake_case)]
pub fn functor_E_on_grid<Q: Scalar>(c: &Barcode<Q>, critical: Vec<Q>) -> StratifiedDiagram<Q> {
    for i in c.intervals() {
        for end in [i.lo(), i.hi()] {
            if let ExtReal::Finite(v) = end {
                assert!(
                    critical.binary_search(v).is_ok(),
                    "grid must contain endpoint {v}"
                );
            }
        }
    }
    let positions = 2 * critical.len() + 1;
    let skeleton = StratifiedDiagram {
        critical: critical.clone(),
        strata: vec![BTreeSet::new(); positions],
        links: Vec::new(),
    };
    let mut strata: Vec<BTreeSet<String>> = vec![BTreeSet::new(); positions];
    let mut link_pairs: Vec<Vec<(String, String)>> = vec![Vec::new(); positions.saturating_sub(1)];
    for (x, interval) in c.iter() {
        let mut previous: Option<(usize, String)> = None;
        for p in 0..positions {
            let rep = skeleton.stratum_representative(p);
            if !interval.contains(&rep) {
                continue;
            }
            let token = format!("{x}@{p}");
            strata[p].insert(token.clone());
            if let Some((q, prev)) = previous {
                debug_assert_eq!(q + 1, p, "interval strata are consecutive");
                link_pairs[q].push((prev, token.clone()));
            }
            previous = Some((p, token));
        }
    }
    let links = link_pairs
        .into_iter()
        .enumerate()
        .map(|(p, pairs)| {
            Matching::new(strata[p].clone(), strata[p + 1].clone(), pairs)
                .expect("one token per entry per stratum")
        })
        .collect();
    StratifiedDiagram {
        critical,
        strata,
        links,
    }
}

/// All finite endpoints of the given barcodes, sorted and deduplicated.
pub fn endpoint_grid<Q: Scalar>(barcodes: &[&Barcode<Q>]) -> Vec<Q> {
    let mut grid: Vec<Q> = Vec::new();
    for c in barcodes {
        for i in c.intervals() {
            for end in [i.lo(), i.hi()] {
                if let ExtReal::Finite(v) = end {
                    grid.push(v.clone());
                }
            }
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

/// `E` on morphisms: the natural transformation restricting σ to the pairs
/// whose intervals both contain the stratum.  Source and target diagrams are
/// built on the merged endpoint grid.
#[allow(non_snake_case)]
pub fn functor_E_mor<Q: Scalar>(sigma: &OverlapMatching<Q>) -> NatTrans<Q> {
    functor_E_mor_on_grid(sigma, endpoint_grid(&[sigma.source(), sigma.target()]))
}

/// `E` on morphisms over a prescribed grid containing all endpoints of both
/// barcodes.
#[allow(non_snake_case)]
pub fn functor_E_mor_on_grid<Q: Scalar>(sigma: &OverlapMatching<Q>, grid: Vec<Q>) -> NatTrans<Q> {
    let source = functor_E_on_grid(sigma.source(), grid.clone());
    let target = functor_E_on_grid(sigma.target(), grid);
    let components = (0..source.strata.len())
        .map(|p| {
            let rep = source.stratum_representative(p);
            let pairs = sigma.pairs().filter_map(|(x, y)| {
                let i = sigma.source().get(x).expect("validated index");
                let j = sigma.target().get(y).expect("validated index");
                (i.contains(&rep) && j.contains(&rep))
                    .then(|| (format!("{x}@{p}"), format!("{y}@{p}")))
            });
            Matching::new(source.strata[p].clone(), target.strata[p].clone(), pairs)
                .expect("tokens exist exactly where intervals contain the stratum")
        })
        .collect();
    NatTrans::new(source, target, components)
        .expect("overlap matchings restrict to natural transformations")
}

/// One glued equivalence class of a diagram: a run of tokens across
/// consecutive strata starting at position `first`.
struct DiagramClass {
    first: usize,
    tokens: Vec<String>,
}

/// Union-find decomposition of a diagram into classes.  Links are partial
/// injections, so every class is a path: consecutive strata, one token each.
fn classes<Q: Scalar>(d: &StratifiedDiagram<Q>) -> Vec<DiagramClass> {
    let mut out: Vec<DiagramClass> = Vec::new();
    // The left end of each class is a token with no link predecessor.
    for (p, stratum) in d.strata.iter().enumerate() {
        for token in stratum {
            let has_predecessor = p > 0 && d.links[p - 1].pairs().any(|(_, tgt)| tgt == token);
            if has_predecessor {
                continue;
            }
            let mut tokens = vec![token.clone()];
            let mut here = token.clone();
            let mut q = p;
            while q < d.links.len() {
                match d.links[q].apply(&here) {
                    Some(next) => {
                        here = next.clone();
                        tokens.push(here.clone());
                        q += 1;
                    }
                    None => break,
                }
            }
            out.push(DiagramClass { first: p, tokens });
        }
    }
    out.sort_by(|a, b| (a.first, &a.tokens[0]).cmp(&(b.first, &b.tokens[0])));
    out
}

/// The decorated interval spanned by strata `first ..= last` of a diagram.
fn span_interval<Q: Scalar>(d: &StratifiedDiagram<Q>, first: usize, last: usize) -> Interval<Q> {
    let k = d.critical.len();
    let (lo, lo_closed) = if first == 0 {
        (ExtReal::NegInf, false)
    } else if first % 2 == 1 {
        (ExtReal::Finite(d.critical[(first - 1) / 2].clone()), true)
    } else {
        (ExtReal::Finite(d.critical[first / 2 - 1].clone()), false)
    };
    let (hi, hi_closed) = if last == 2 * k {
        (ExtReal::PosInf, false)
    } else if last % 2 == 1 {
        (ExtReal::Finite(d.critical[(last - 1) / 2].clone()), true)
    } else {
        (ExtReal::Finite(d.critical[last / 2].clone()), false)
    };
    Interval::new(lo, lo_closed, hi, hi_closed).expect("class spans are nonempty")
}

/// `F` on objects: glue elements along links into classes and project each
/// class to its decorated interval.  Indices are `q1`, `q2`, … in the
/// deterministic class order.
#[allow(non_snake_case)]
pub fn functor_F<Q: Scalar>(d: &StratifiedDiagram<Q>) -> Barcode<Q> {
    let entries = classes(d)
        .into_iter()
        .enumerate()
        .map(|(n, class)| {
            let interval = span_interval(d, class.first, class.first + class.tokens.len() - 1);
            (format!("q{}", n + 1), interval)
        })
        .collect();
    Barcode::new(entries).expect("class indices are distinct")
}

/// `F` on morphisms: classes are matched when some component pairs their
/// tokens at a common stratum.
#[allow(non_snake_case)]
pub fn functor_F_mor<Q: Scalar>(eta: &NatTrans<Q>) -> OverlapMatching<Q> {
    fn locate(cls: &[DiagramClass]) -> BTreeMap<(usize, &str), usize> {
        let mut map = BTreeMap::new();
        for (n, c) in cls.iter().enumerate() {
            for (offset, token) in c.tokens.iter().enumerate() {
                map.insert((c.first + offset, token.as_str()), n);
            }
        }
        map
    }
    let src_classes = classes(eta.source());
    let tgt_classes = classes(eta.target());
    let src_at = locate(&src_classes);
    let tgt_at = locate(&tgt_classes);
    let mut pairs: BTreeSet<(Index, Index)> = BTreeSet::new();
    for (p, eta_p) in eta.components().iter().enumerate() {
        for (x, y) in eta_p.pairs() {
            let qs = src_at[&(p, x.as_str())];
            let qt = tgt_at[&(p, y.as_str())];
            pairs.insert((format!("q{}", qs + 1), format!("q{}", qt + 1)));
        }
    }
    OverlapMatching::new(functor_F(eta.source()), functor_F(eta.target()), pairs)
        .expect("naturality makes the class matching a valid overlap matching")
}

/// The inverse of `F` on morphisms: transports an overlap matching between
/// `F(a)` and `F(b)` (presented exactly as `functor_F` produces them) to
/// the corresponding natural transformation `a → b`.
pub fn nat_from_matching<Q: Scalar>(
    a: &StratifiedDiagram<Q>,
    b: &StratifiedDiagram<Q>,
    sigma: &OverlapMatching<Q>,
) -> Result<NatTrans<Q>> {
    if !sigma.source().same_presentation(&functor_F(a))
        || !sigma.target().same_presentation(&functor_F(b))
    {
        return Err(Error::Mismatch(
            "matching does not join the barcodes of the two diagrams".into(),
        ));
    }
    let src_classes = classes(a);
    let tgt_classes = classes(b);
    let class_no = |name: &str| -> usize { name[1..].parse::<usize>().expect("q<n> index") - 1 };
    let mut pair_lists: Vec<Vec<(String, String)>> = vec![Vec::new(); a.strata().len()];
    for (qs, qt) in sigma.pairs() {
        let s = &src_classes[class_no(qs)];
        let t = &tgt_classes[class_no(qt)];
        let lo = s.first.max(t.first);
        let hi = (s.first + s.tokens.len() - 1).min(t.first + t.tokens.len() - 1);
        for p in lo..=hi {
            pair_lists[p].push((s.tokens[p - s.first].clone(), t.tokens[p - t.first].clone()));
        }
    }
    let components: Result<Vec<Matching>> = pair_lists
        .into_iter()
        .enumerate()
        .map(|(p, pairs)| Matching::new(a.strata()[p].clone(), b.strata()[p].clone(), pairs))
        .collect();
    NatTrans::new(a.clone(), b.clone(), components?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::barcode::tests::{arb_barcode, bc, QB};
    use crate::overlap::tests::{om, seeded_matching};
    use num_rational::Rational64;
    use proptest::prelude::*;

    type QD = StratifiedDiagram<Rational64>;

    fn q(text: &str) -> Rational64 {
        crate::scalar::parse_scalar(text).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Random diagram: a small grid and seeded random strata and links.
    pub(crate) fn arb_diagram() -> impl Strategy<Value = QD> {
        (0usize..=3, any::<u64>()).prop_map(|(k, seed)| {
            let critical: Vec<Rational64> = (0..k).map(|i| Rational64::new(i as i64, 1)).collect();
            let mut state = seed | 1;
            let mut next = || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 33) as usize
            };
            let strata: Vec<BTreeSet<String>> = (0..2 * k + 1)
                .map(|p| (0..next() % 3).map(|i| format!("e{p}x{i}")).collect())
                .collect();
            let links: Vec<Matching> = (0..2 * k)
                .map(|p| {
                    let mut used = BTreeSet::new();
                    let pairs: Vec<(String, String)> = strata[p]
                        .iter()
                        .filter_map(|s| {
                            let choices: Vec<&String> = strata[p + 1]
                                .iter()
                                .filter(|t| !used.contains(*t))
                                .collect();
                            if choices.is_empty() || next() % 2 == 0 {
                                return None;
                            }
                            let t = choices[next() % choices.len()].clone();
                            used.insert(t.clone());
                            Some((s.clone(), t))
                        })
                        .collect();
                    Matching::new(strata[p].clone(), strata[p + 1].clone(), pairs).unwrap()
                })
                .collect();
            StratifiedDiagram::new(critical, strata, links).unwrap()
        })
    }

    #[test]
    fn functor_e_populations() {
        let d = functor_E(&bc(&["[0,1)"]));
        let sizes: Vec<usize> = d.strata().iter().map(|s| s.len()).collect();
        assert_eq!(sizes, vec![0, 1, 1, 0, 0]);
        assert_eq!(d.evaluate(&q("0")).len(), 1);
        assert_eq!(d.evaluate(&q("1")).len(), 0);

        assert!(functor_E(&QB::empty()).is_empty());

        let d = functor_E(&bc(&["[0,2)", "[1,3)"]));
        assert_eq!(d.evaluate(&q("1")).len(), 2);
        assert_eq!(d.evaluate(&q("2")).len(), 1);
    }

    #[test]
    fn internal_composes_links() {
        let d = functor_E(&bc(&["[0,2)"]));
        let id = d.internal(&q("1"), &q("1")).unwrap();
        assert_eq!(id, Matching::identity(d.evaluate(&q("1"))));
        let two_steps = d.internal(&q("0"), &q("1")).unwrap();
        assert_eq!(two_steps.len(), 1);
        let dead = d.internal(&q("1"), &q("2")).unwrap();
        assert!(dead.is_empty());
        assert!(d.internal(&q("2"), &q("1")).is_err());
    }

    #[test]
    fn refine_preserves_evaluation() {
        let d = functor_E(&bc(&["[0,2)"]));
        let r = d.refine([q("1")]);
        for t in ["0", "1/2", "1", "3/2", "2", "-1", "5"] {
            assert_eq!(d.evaluate(&q(t)), r.evaluate(&q(t)), "at t = {t}");
        }
        for (s, t) in [("0", "2"), ("0", "1"), ("1/2", "3/2")] {
            assert_eq!(
                d.internal(&q(s), &q(t)).unwrap(),
                r.internal(&q(s), &q(t)).unwrap()
            );
        }
        assert_eq!(d.refine([]), d);
        assert_eq!(r.refine([q("1")]), r);
    }

    #[test]
    fn functor_f_decoration_rules() {
        assert!(functor_F(&functor_E(&bc(&["[0,1)"]))).reindexes(&bc(&["[0,1)"])));

        // one element alive on {0} and (0,1) only
        let d = StratifiedDiagram::new(
            vec![q("0"), q("1")],
            vec![set(&[]), set(&["e"]), set(&["e"]), set(&[]), set(&[])],
            vec![
                Matching::empty(set(&[]), set(&["e"])),
                Matching::identity(&set(&["e"])),
                Matching::empty(set(&["e"]), set(&[])),
                Matching::empty(set(&[]), set(&[])),
            ],
        )
        .unwrap();
        assert!(functor_F(&d).reindexes(&bc(&["[0,1)"])));

        // one element alive on (0,1) only
        let d = StratifiedDiagram::new(
            vec![q("0"), q("1")],
            vec![set(&[]), set(&[]), set(&["e"]), set(&[]), set(&[])],
            vec![
                Matching::empty(set(&[]), set(&[])),
                Matching::empty(set(&[]), set(&["e"])),
                Matching::empty(set(&["e"]), set(&[])),
                Matching::empty(set(&[]), set(&[])),
            ],
        )
        .unwrap();
        assert!(functor_F(&d).reindexes(&bc(&["(0,1)"])));
    }

    #[test]
    fn functor_e_mor_components_live_on_intersection() {
        let sigma = om(&["[1,3)"], &["[0,2)"], &[(0, 0)]);
        let eta = functor_E_mor(&sigma);
        // grid {0,1,2,3}: nonempty exactly on {1} (position 3) and (1,2)
        // (position 4), i.e. where t ∈ [1,2)
        let nonempty: Vec<usize> = eta
            .components()
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(|(p, _)| p)
            .collect();
        assert_eq!(nonempty, vec![3, 4]);

        let c = bc(&["[0,2)", "(2,4]"]);
        let id_eta = functor_E_mor(&OverlapMatching::identity(&c));
        assert_eq!(id_eta, NatTrans::identity(&functor_E(&c)));

        let zero = OverlapMatching::empty(c.clone(), c.clone());
        let zero_eta = functor_E_mor(&zero);
        assert!(zero_eta.components().iter().all(Matching::is_empty));
    }

    #[test]
    fn functor_f_mor_round_trips_sigma() {
        let sigma = om(&["[1,3)"], &["[0,2)"], &[(0, 0)]);
        let back = functor_F_mor(&functor_E_mor(&sigma));
        assert!(back.source().reindexes(sigma.source()));
        assert!(back.target().reindexes(sigma.target()));
        assert_eq!(back.interval_pairs(), sigma.interval_pairs());

        let c = bc(&["[0,2)", "(2,4]"]);
        let id_back = functor_F_mor(&NatTrans::identity(&functor_E(&c)));
        assert_eq!(
            id_back,
            OverlapMatching::identity(&functor_F(&functor_E(&c)))
        );

        let zero = NatTrans::zero(functor_E(&c), functor_E(&c)).unwrap();
        assert!(functor_F_mor(&zero).is_empty());
    }

    #[test]
    fn pointwise_kernel_examples() {
        let c = bc(&["[0,2)", "(2,4]"]);
        let id_eta = NatTrans::identity(&functor_E(&c));
        assert!(id_eta.pointwise_kernel().0.is_empty());
        assert!(id_eta.pointwise_cokernel().0.is_empty());

        let sigma = om(&["[1,3)"], &["[0,2)"], &[(0, 0)]);
        let eta = functor_E_mor(&sigma);
        let (ker, _) = eta.pointwise_kernel();
        assert!(functor_F(&ker).reindexes(&bc(&["[2,3)"])));
        let (coker, _) = eta.pointwise_cokernel();
        assert!(functor_F(&coker).reindexes(&bc(&["[0,1)"])));

        let zero = NatTrans::zero(
            functor_E(&c),
            StratifiedDiagram::empty().refine(functor_E(&c).critical_values().to_vec()),
        )
        .unwrap();
        let (ker, _) = zero.pointwise_kernel();
        assert_eq!(ker, functor_E(&c));
    }

    #[test]
    fn delta_trivial_diagram_examples() {
        assert!(functor_E(&bc(&["[0,2)"])).is_delta_trivial(&q("2")));
        assert!(!functor_E(&bc(&["[0,3)"])).is_delta_trivial(&q("2")));
        assert!(QD::empty().is_delta_trivial(&q("0")));
    }

    proptest! {
        /// F(E(C)) reindexes C.
        #[test]
        fn f_of_e_round_trip(c in arb_barcode(5)) {
            prop_assert!(functor_F(&functor_E(&c)).reindexes(&c));
        }

        /// E(F(D)) is isomorphic to D as a functor.
        #[test]
        fn e_of_f_round_trip(d in arb_diagram()) {
            let back = functor_E(&functor_F(&d));
            prop_assert!(back.is_isomorphic(&d));
            // and F is invariant under the round trip
            prop_assert!(functor_F(&back).reindexes(&functor_F(&d)));
        }

        /// F_mor(E_mor(σ)) recovers σ up to reindexing; E_mor is natural
        /// for every valid σ (checked by the NatTrans constructor).
        #[test]
        fn morphism_round_trip(
            c in arb_barcode(4),
            d in arb_barcode(4),
            seed in any::<u64>(),
        ) {
            let sigma = seeded_matching(&c, &d, seed);
            let eta = functor_E_mor(&sigma);
            let back = functor_F_mor(&eta);
            prop_assert!(back.source().reindexes(&c));
            prop_assert!(back.target().reindexes(&d));
            prop_assert_eq!(back.interval_pairs(), sigma.interval_pairs());
        }

        /// E preserves composition: over a shared grid, E(τ⊛σ) equals
        /// E(τ)∘E(σ) literally.
        #[test]
        fn e_mor_preserves_composition(
            b in arb_barcode(3),
            c in arb_barcode(3),
            d in arb_barcode(3),
            s1 in any::<u64>(),
            s2 in any::<u64>(),
        ) {
            let sigma = seeded_matching(&b, &c, s1);
            let tau = seeded_matching(&c, &d, s2);
            let grid = endpoint_grid(&[&b, &c, &d]);
            let e_sigma = functor_E_mor_on_grid(&sigma, grid.clone());
            let e_tau = functor_E_mor_on_grid(&tau, grid.clone());
            let e_comp = functor_E_mor_on_grid(&tau.compose(&sigma).unwrap(), grid);
            prop_assert_eq!(e_tau.compose(&e_sigma).unwrap(), e_comp);
        }

        /// F preserves composition on natural transformations built from
        /// overlap matchings via the inverse transport.
        #[test]
        fn f_mor_preserves_composition(
            a in arb_diagram(),
            b in arb_diagram(),
            c in arb_diagram(),
            s1 in any::<u64>(),
            s2 in any::<u64>(),
        ) {
            // Refining to the union of all critical values puts the three
            // diagrams over a single grid; class spans are unchanged.
            let mut grid: Vec<Rational64> = Vec::new();
            for d in [&a, &b, &c] {
                grid.extend_from_slice(d.critical_values());
            }
            grid.sort();
            grid.dedup();
            let (a, b, c) = (a.refine(grid.clone()), b.refine(grid.clone()), c.refine(grid));
            let sigma = seeded_matching(&functor_F(&a), &functor_F(&b), s1);
            let tau = seeded_matching(&functor_F(&b), &functor_F(&c), s2);
            let eta1 = nat_from_matching(&a, &b, &sigma).unwrap();
            let eta2 = nat_from_matching(&b, &c, &tau).unwrap();
            prop_assert_eq!(functor_F_mor(&eta1).interval_pairs(), sigma.interval_pairs());
            let composed = eta2.compose(&eta1).unwrap();
            let left = functor_F_mor(&composed);
            let right = tau.compose(&sigma).unwrap();
            prop_assert_eq!(left.interval_pairs(), right.interval_pairs());
        }

        /// Pointwise kernels and cokernels agree with the barcode-level
        /// constructions through F.
        #[test]
        fn pointwise_kernels_match_barcode_kernels(
            c in arb_barcode(4),
            d in arb_barcode(4),
            seed in any::<u64>(),
        ) {
            let sigma = seeded_matching(&c, &d, seed);
            let eta = functor_E_mor(&sigma);
            let (ker_d, _) = eta.pointwise_kernel();
            prop_assert!(functor_F(&ker_d).reindexes(&sigma.kernel().0));
            prop_assert!(ker_d.is_isomorphic(&functor_E(&sigma.kernel().0)));
            let (coker_d, _) = eta.pointwise_cokernel();
            prop_assert!(functor_F(&coker_d).reindexes(&sigma.cokernel().0));
            prop_assert!(coker_d.is_isomorphic(&functor_E(&sigma.cokernel().0)));
        }

        /// Diagram-level δ-triviality agrees with interval-level triviality
        /// through E.
        #[test]
        fn delta_trivial_diagram_matches_barcode(
            c in arb_barcode(4),
            n in 0i64..=6,
        ) {
            let delta = Rational64::new(n, 2);
            prop_assert_eq!(
                functor_E(&c).is_delta_trivial(&delta),
                c.is_delta_trivial(&delta)
            );
        }

        /// The internal morphism is functorial: internal(s,u) =
        /// internal(t,u) ∘ internal(s,t).
        #[test]
        fn internal_functorial(d in arb_diagram(), a in -2i64..=6, b in 0i64..=4, c in 0i64..=4) {
            let s = Rational64::new(a, 2);
            let t = s + Rational64::new(b, 2);
            let u = t + Rational64::new(c, 2);
            let left = d.internal(&s, &u).unwrap();
            let right = d.internal(&t, &u).unwrap().compose(&d.internal(&s, &t).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
