//! Finitely presented persistence modules over a prime field.
//!
//! A module is stored as its barcode of half-open bars `[a, b)` (with `a`
//! finite and `b` finite or `+∞`), i.e. as a direct sum of interval modules.
//! A morphism is stored pointwise: one matrix over F_p per critical value,
//! in the bases given by the bars alive at that value.  Everything here is
//! exact; kernels, images, cokernels, and the induced matching of a morphism
//! are computed by Gaussian elimination on a shared critical grid.

use std::collections::BTreeMap;

use crate::barcode::Barcode;
use crate::error::{Error, Result};
use crate::field::{Mat, PrimeField};
use crate::interval::Interval;
use crate::matching::Matching;
use crate::overlap::OverlapMatching;
use crate::scalar::{ExtReal, Scalar, Threshold};

/// Barcode index labels, shared with the rest of the crate.
pub type Index = String;

/// A finitely presented persistence module: a direct sum of interval modules
/// `C^[a,b)` with `a` finite and `b` finite or `+∞`.
///
/// The bars and their entry order fix the coordinate system: at every time
/// `t`, the space `M_t` has one basis vector per bar alive at `t`, in entry
/// order.  All matrices exchanged with [`ModuleMorphism`] use these bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceModule<Q> {
    bars: Barcode<Q>,
}

impl<Q: Scalar> PersistenceModule<Q> {
    /// Wraps a barcode, rejecting any bar that is not of the form `[a, b)`
    /// with `a` finite.
    pub fn new(bars: Barcode<Q>) -> Result<Self> {
        for (x, i) in bars.iter() {
            let lo_ok = i.lo().is_finite() && i.lo_closed();
            let hi_ok = match i.hi() {
                ExtReal::Finite(_) => !i.hi_closed(),
                ExtReal::PosInf => true,
                ExtReal::NegInf => false,
            };
            if !lo_ok || !hi_ok {
                return Err(Error::InvalidModule(format!(
                    "bar {x} = {i} is not of the form [a, b) with a finite"
                )));
            }
        }
        Ok(PersistenceModule { bars })
    }

    /// The zero module (empty barcode).
    pub fn zero() -> Self {
        PersistenceModule {
            bars: Barcode::empty(),
        }
    }

    pub fn bars(&self) -> &Barcode<Q> {
        &self.bars
    }

    /// Positions (into the bar entries) of the bars alive at `t`; this is
    /// the basis of `M_t`, in order.
    pub fn alive_at(&self, t: &Q) -> Vec<usize> {
        self.bars
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, (_, i))| i.contains(t))
            .map(|(p, _)| p)
            .collect()
    }

    /// `dim M_t`: the number of bars alive at `t`.
    pub fn dim_at(&self, t: &Q) -> usize {
        self.alive_at(t).len()
    }

    /// The 0/1 matrix of the internal map `M_s → M_t` in the alive-bar
    /// bases: a bar contributes a 1 exactly when it survives from `s` to
    /// `t`.  Requires `s ≤ t`.
    pub fn internal_matrix(&self, s: &Q, t: &Q) -> Mat {
        assert!(s <= t, "internal maps go forward in time");
        let cols = self.alive_at(s);
        let rows = self.alive_at(t);
        let mut m = Mat::zero(rows.len(), cols.len());
        for (r, bar) in rows.iter().enumerate() {
            if let Some(c) = cols.iter().position(|b| b == bar) {
                m.set(r, c, 1);
            }
        }
        m
    }

    /// All finite endpoint values of the bars, sorted and deduplicated.
    /// Between consecutive critical values nothing changes.
    pub fn critical_values(&self) -> Vec<Q> {
        let mut vals: Vec<Q> = Vec::new();
        for i in self.bars.intervals() {
            for end in [i.lo(), i.hi()] {
                if let Some(v) = end.as_finite() {
                    vals.push(v.clone());
                }
            }
        }
        vals.sort();
        vals.dedup();
        vals
    }

    /// The module as a grid family over its own critical values, together
    /// with that grid.
    pub fn to_grid_family(&self) -> (Vec<Q>, GridFamily) {
        let grid = self.critical_values();
        let dims = grid.iter().map(|t| self.dim_at(t)).collect();
        let steps = grid
            .windows(2)
            .map(|w| self.internal_matrix(&w[0], &w[1]))
            .collect();
        let family = GridFamily::new(dims, steps).expect("internal matrices have matching shapes");
        (grid, family)
    }

    /// `M(δ)`: every bar shifted down by δ; bar order and indices are kept,
    /// so the pointwise bases of `M(δ)` at `t` and of `M` at `t + δ` agree.
    pub fn shift(&self, delta: &Q) -> Self {
        PersistenceModule {
            bars: self.bars.shift(delta),
        }
    }

    /// True iff every internal map `M_t → M_{t+δ}` is zero, i.e. iff every
    /// bar is δ-trivial.
    pub fn is_delta_trivial(&self, delta: &Q) -> bool {
        self.bars.is_delta_trivial(delta)
    }

    /// The infimum of the δ for which the module is δ-trivial.
    pub fn triviality_threshold(&self) -> Threshold<Q> {
        self.bars.triviality_threshold()
    }
}

/// A finite diagram of F_p spaces and maps over an (implicit) grid:
/// dimensions per grid value and one step matrix between consecutive values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridFamily {
    dims: Vec<usize>,
    steps: Vec<Mat>,
}

impl GridFamily {
    /// Checks that `steps[k]` has shape `dims[k+1] × dims[k]`.
    pub fn new(dims: Vec<usize>, steps: Vec<Mat>) -> Result<Self> {
        if steps.len() + 1 != dims.len() && !(dims.is_empty() && steps.is_empty()) {
            return Err(Error::InvalidModule(format!(
                "a family over {} grid values needs {} steps, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                steps.len()
            )));
        }
        for (k, step) in steps.iter().enumerate() {
            if step.rows() != dims[k + 1] || step.cols() != dims[k] {
                return Err(Error::InvalidModule(format!(
                    "step {k} has shape {}×{}, expected {}×{}",
                    step.rows(),
                    step.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        Ok(GridFamily { dims, steps })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn steps(&self) -> &[Mat] {
        &self.steps
    }
}

/// The rank table of a grid family: `get(i, j)` is the rank of the composite
/// map from grid value `i` to grid value `j ≥ i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    table: Vec<Vec<usize>>,
}

impl RankTable {
    /// Number of grid values the table covers.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `r(i, j)` for `i ≤ j`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        assert!(i <= j && j < self.len(), "rank indices out of range");
        self.table[i][j - i]
    }
}

/// Computes all composite ranks `r(i, j)` of a grid family by Gaussian
/// elimination over F_p.
pub fn rank_function(family: &GridFamily, fp: &PrimeField) -> RankTable {
    let n = family.dims.len();
    let mut table = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n - i);
        row.push(family.dims[i]);
        let mut acc = Mat::identity(family.dims[i]);
        for j in i + 1..n {
            acc = family.steps[j - 1].matmul(&acc, fp);
            row.push(acc.rank(fp));
        }
        table.push(row);
    }
    RankTable { table }
}

/// Recovers a barcode from a rank table over a strictly increasing grid.
///
/// The multiplicity of the bar starting at `grid[i]` and ending at
/// `grid[j+1]` (at `+∞` when `j` is the last index) is
/// `r(i,j) − r(i−1,j) − r(i,j+1) + r(i−1,j+1)`, with out-of-range terms
/// read as zero.  This inverts [`rank_function`] whenever the table comes
/// from a genuine module whose critical values all lie in the grid; a
/// negative multiplicity means that precondition was violated.
pub fn barcode_from_ranks<Q: Scalar>(ranks: &RankTable, grid: &[Q]) -> Result<Barcode<Q>> {
    assert_eq!(ranks.len(), grid.len(), "table and grid sizes differ");
    debug_assert!(grid.windows(2).all(|w| w[0] < w[1]));
    let n = grid.len();
    let r = |i: isize, j: usize| -> i64 {
        if i < 0 || j >= n {
            0
        } else {
            ranks.get(i as usize, j) as i64
        }
    };
    let mut intervals = Vec::new();
    for i in 0..n {
        for j in i..n {
            let si = i as isize;
            let mult = r(si, j) - r(si - 1, j) - r(si, j + 1) + r(si - 1, j + 1);
            if mult < 0 {
                return Err(Error::InvalidModule(format!(
                    "negative multiplicity at grid positions ({i}, {j}); \
                     the table is not the rank function of a module on this grid"
                )));
            }
            if mult > 0 {
                let hi = if j + 1 == n {
                    ExtReal::PosInf
                } else {
                    ExtReal::Finite(grid[j + 1].clone())
                };
                for _ in 0..mult {
                    intervals
                        .push(Interval::closed_open(grid[i].clone(), hi.clone()).expect("i < j+1"));
                }
            }
        }
    }
    Ok(Barcode::from_intervals(intervals))
}

/// A morphism `f: M → N` of persistence modules, stored pointwise.
///
/// The grid is the union of the critical values of `M` and `N`; `matrices`
/// holds, for each grid value `t`, the matrix of `f_t` in the alive-bar
/// bases (shape `dim N_t × dim M_t`).  Since nothing changes between
/// critical values, this determines `f_t` for every `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMorphism<Q> {
    source: PersistenceModule<Q>,
    target: PersistenceModule<Q>,
    field: PrimeField,
    grid: Vec<Q>,
    matrices: Vec<Mat>,
}

impl<Q: Scalar> ModuleMorphism<Q> {
    /// Validates shapes, entry ranges, and the commuting squares
    /// `N_{s,t} ∘ f_s = f_t ∘ M_{s,t}` for consecutive grid values.
    pub fn new(
        source: PersistenceModule<Q>,
        target: PersistenceModule<Q>,
        field: PrimeField,
        matrices: Vec<Mat>,
    ) -> Result<Self> {
        let grid = merged_grid(&source, &target);
        if matrices.len() != grid.len() {
            return Err(Error::InvalidModule(format!(
                "expected one matrix per grid value ({}), got {}",
                grid.len(),
                matrices.len()
            )));
        }
        for (k, (t, a)) in grid.iter().zip(&matrices).enumerate() {
            let (rows, cols) = (target.dim_at(t), source.dim_at(t));
            if a.rows() != rows || a.cols() != cols {
                return Err(Error::InvalidModule(format!(
                    "matrix {k} has shape {}×{}, expected {rows}×{cols}",
                    a.rows(),
                    a.cols()
                )));
            }
            for i in 0..rows {
                for j in 0..cols {
                    if a.get(i, j) >= field.modulus() {
                        return Err(Error::InvalidModule(format!(
                            "entry {} of matrix {k} is not reduced modulo {}",
                            a.get(i, j),
                            field.modulus()
                        )));
                    }
                }
            }
        }
        for k in 0..grid.len().saturating_sub(1) {
            let (s, t) = (&grid[k], &grid[k + 1]);
            let lhs = target.internal_matrix(s, t).matmul(&matrices[k], &field);
            let rhs = matrices[k + 1].matmul(&source.internal_matrix(s, t), &field);
            if lhs != rhs {
                return Err(Error::InvalidModule(format!(
                    "commuting square fails between grid values {s} and {t}"
                )));
            }
        }
        Ok(ModuleMorphism {
            source,
            target,
            field,
            grid,
            matrices,
        })
    }

    /// Assembles a morphism from components between interval summands.
    ///
    /// Each entry is `(target index, source index, scalar)`: the component
    /// `C^I → C^J` from source bar `I` to target bar `J`, given by the
    /// scalar at every `t` where both bars are alive.  A nonzero component
    /// is only natural — and only accepted — when `I` overlaps `J` above;
    /// repeated entries for one position are summed.
    pub fn from_interval_matrix(
        source: PersistenceModule<Q>,
        target: PersistenceModule<Q>,
        field: PrimeField,
        entries: &[(Index, Index, u64)],
    ) -> Result<Self> {
        let mut components: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (tgt, src, scalar) in entries {
            let ti = position_of(&target, tgt)?;
            let si = position_of(&source, src)?;
            let scalar = scalar % field.modulus();
            if scalar == 0 {
                continue;
            }
            let i = &source.bars.entries()[si].1;
            let j = &target.bars.entries()[ti].1;
            if !i.overlaps_above(j) {
                return Err(Error::NotOverlap(format!(
                    "component {src} -> {tgt}: {i} does not overlap {j} above"
                )));
            }
            let slot = components.entry((ti, si)).or_insert(0);
            *slot = field.add(*slot, scalar);
        }
        let grid = merged_grid(&source, &target);
        let mut matrices = Vec::with_capacity(grid.len());
        for t in &grid {
            let rows = target.alive_at(t);
            let cols = source.alive_at(t);
            let mut a = Mat::zero(rows.len(), cols.len());
            for (r, ti) in rows.iter().enumerate() {
                for (c, si) in cols.iter().enumerate() {
                    if let Some(v) = components.get(&(*ti, *si)) {
                        a.set(r, c, *v);
                    }
                }
            }
            matrices.push(a);
        }
        ModuleMorphism::new(source, target, field, matrices)
    }

    pub fn source(&self) -> &PersistenceModule<Q> {
        &self.source
    }

    pub fn target(&self) -> &PersistenceModule<Q> {
        &self.target
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn grid(&self) -> &[Q] {
        &self.grid
    }

    pub fn matrices(&self) -> &[Mat] {
        &self.matrices
    }

    /// The matrix of `f_t` for an arbitrary `t`: the stored matrix at the
    /// last grid value `≤ t` (nothing changes in between), or an empty
    /// matrix below the grid, where both modules vanish.
    pub fn matrix_at(&self, t: &Q) -> Mat {
        let k = self.grid.partition_point(|v| v <= t);
        if k == 0 {
            Mat::zero(self.target.dim_at(t), self.source.dim_at(t))
        } else {
            self.matrices[k - 1].clone()
        }
    }

    /// `self ∘ earlier`, evaluated pointwise on the composite's own grid.
    pub fn compose(&self, earlier: &Self) -> Result<Self> {
        if self.field != earlier.field {
            return Err(Error::Mismatch(
                "composition requires a single field".into(),
            ));
        }
        if !earlier.target.bars.same_presentation(&self.source.bars) {
            return Err(Error::Mismatch(
                "composition requires the target of the first map to be the source of the second"
                    .into(),
            ));
        }
        let grid = merged_grid(&earlier.source, &self.target);
        let matrices = grid
            .iter()
            .map(|t| self.matrix_at(t).matmul(&earlier.matrix_at(t), &self.field))
            .collect();
        ModuleMorphism::new(
            earlier.source.clone(),
            self.target.clone(),
            self.field,
            matrices,
        )
    }

    /// `f(δ): M(δ) → N(δ)`: both modules and the grid shift down by δ; the
    /// matrices are unchanged.
    pub fn shift(&self, delta: &Q) -> Self {
        ModuleMorphism {
            source: self.source.shift(delta),
            target: self.target.shift(delta),
            field: self.field,
            grid: self
                .grid
                .iter()
                .map(|v| v.clone() - delta.clone())
                .collect(),
            matrices: self.matrices.clone(),
        }
    }
}

fn position_of<Q: Scalar>(module: &PersistenceModule<Q>, index: &str) -> Result<usize> {
    module
        .bars
        .indices()
        .position(|x| x == index)
        .ok_or_else(|| Error::InvalidModule(format!("unknown bar index {index}")))
}

fn merged_grid<Q: Scalar>(m: &PersistenceModule<Q>, n: &PersistenceModule<Q>) -> Vec<Q> {
    let mut grid = m.critical_values();
    grid.extend(n.critical_values());
    grid.sort();
    grid.dedup();
    grid
}

/// `B(ker f)`: the kernel is computed pointwise (nullspace bases with the
/// induced maps between them), then read off through its rank function.
pub fn kernel_module<Q: Scalar>(f: &ModuleMorphism<Q>) -> PersistenceModule<Q> {
    module_from_family(f.grid(), &kernel_family(f), &f.field())
}

/// `B(im f)`: pivot-column bases of the pointwise images with the induced
/// maps between them.
pub fn image_module<Q: Scalar>(f: &ModuleMorphism<Q>) -> PersistenceModule<Q> {
    module_from_family(f.grid(), &image_family(f), &f.field())
}

/// `B(coker f)`: pointwise quotients by the image, with the induced maps.
pub fn cokernel_module<Q: Scalar>(f: &ModuleMorphism<Q>) -> PersistenceModule<Q> {
    module_from_family(f.grid(), &cokernel_family(f), &f.field())
}

fn module_from_family<Q: Scalar>(
    grid: &[Q],
    family: &GridFamily,
    fp: &PrimeField,
) -> PersistenceModule<Q> {
    let ranks = rank_function(family, fp);
    let bars = barcode_from_ranks(&ranks, grid)
        .expect("families derived from a morphism have nonnegative multiplicities");
    PersistenceModule::new(bars).expect("barcode_from_ranks emits [a, b) bars")
}

fn kernel_family<Q: Scalar>(f: &ModuleMorphism<Q>) -> GridFamily {
    let fp = f.field();
    let bases: Vec<Mat> = f.matrices().iter().map(|a| a.nullspace(&fp)).collect();
    let dims: Vec<usize> = bases.iter().map(Mat::cols).collect();
    let mut steps = Vec::new();
    for k in 0..bases.len().saturating_sub(1) {
        let step = f.source().internal_matrix(&f.grid()[k], &f.grid()[k + 1]);
        let moved = step.matmul(&bases[k], &fp);
        // Naturality carries kernel vectors into the next kernel, so the
        // coordinates exist; the basis is independent, so they are unique.
        let coords = bases[k + 1]
            .solve(&moved, &fp)
            .expect("kernel vectors stay in the kernel");
        steps.push(coords);
    }
    GridFamily::new(dims, steps).expect("shapes agree by construction")
}

fn image_family<Q: Scalar>(f: &ModuleMorphism<Q>) -> GridFamily {
    let fp = f.field();
    let bases: Vec<Mat> = f
        .matrices()
        .iter()
        .map(|a| {
            let cols: Vec<Vec<u64>> = a.pivot_columns(&fp).iter().map(|&j| a.column(j)).collect();
            Mat::from_columns(a.rows(), &cols)
        })
        .collect();
    let dims: Vec<usize> = bases.iter().map(Mat::cols).collect();
    let mut steps = Vec::new();
    for k in 0..bases.len().saturating_sub(1) {
        let step = f.target().internal_matrix(&f.grid()[k], &f.grid()[k + 1]);
        let moved = step.matmul(&bases[k], &fp);
        let coords = bases[k + 1]
            .solve(&moved, &fp)
            .expect("image vectors stay in the image");
        steps.push(coords);
    }
    GridFamily::new(dims, steps).expect("shapes agree by construction")
}

/// An invertible basis of the target space at one grid value, arranged as
/// `[image basis | completing standard vectors]`, plus the positions of the
/// completing vectors.  Quotient coordinates of `w` are the last entries of
/// the solution of `full_basis · x = w`.
struct QuotientChart {
    full_basis: Mat,
    completion: Vec<usize>,
}

fn quotient_chart(a: &Mat, fp: &PrimeField) -> QuotientChart {
    let dim = a.rows();
    let rank = a.rank(fp);
    let mut cols: Vec<Vec<u64>> = a.pivot_columns(fp).iter().map(|&j| a.column(j)).collect();
    // Eliminate [image basis | identity]: the pivots past the image block
    // pick out the standard vectors that complete the basis.
    let mut aug_cols = cols.clone();
    for s in 0..dim {
        let mut e = vec![0u64; dim];
        e[s] = 1;
        aug_cols.push(e);
    }
    let aug = Mat::from_columns(dim, &aug_cols);
    let pivots = aug.pivot_columns(fp);
    debug_assert_eq!(pivots.len(), dim);
    debug_assert!(pivots[..rank].iter().copied().eq(0..rank));
    let completion: Vec<usize> = pivots[rank..].iter().map(|&c| c - rank).collect();
    for &s in &completion {
        let mut e = vec![0u64; dim];
        e[s] = 1;
        cols.push(e);
    }
    QuotientChart {
        full_basis: Mat::from_columns(dim, &cols),
        completion,
    }
}

fn cokernel_family<Q: Scalar>(f: &ModuleMorphism<Q>) -> GridFamily {
    let fp = f.field();
    let charts: Vec<QuotientChart> = f
        .matrices()
        .iter()
        .map(|a| quotient_chart(a, &fp))
        .collect();
    let dims: Vec<usize> = charts.iter().map(|c| c.completion.len()).collect();
    let mut steps = Vec::new();
    for k in 0..charts.len().saturating_sub(1) {
        let step = f.target().internal_matrix(&f.grid()[k], &f.grid()[k + 1]);
        let next = &charts[k + 1];
        let rank = next.full_basis.cols() - next.completion.len();
        let mut cols = Vec::with_capacity(dims[k]);
        for &s in &charts[k].completion {
            // The class of the completing vector e_s maps to the class of
            // step · e_s, read off in the next chart.
            let coords = next
                .full_basis
                .solve_vec(&step.column(s), &fp)
                .expect("the full basis spans the target space");
            cols.push(coords[rank..].to_vec());
        }
        steps.push(Mat::from_columns(dims[k + 1], &cols));
    }
    GridFamily::new(dims, steps).expect("shapes agree by construction")
}

/// The partner position for each bar of `sub`, inside `ambient`, under the
/// canonical injection for submodules: bars are grouped by right endpoint
/// and paired off by ascending left endpoint (ties in entry order), so each
/// bar of `sub` gets an ambient bar with the same death and a birth at or
/// below its own.  Failure is a bug, not an input error.
fn canonical_injection_mono<Q: Scalar>(sub: &Barcode<Q>, ambient: &Barcode<Q>) -> Vec<usize> {
    let sub_groups = group_positions(sub, |i| i.hi().clone(), |i| i.lo().clone(), false);
    let ambient_groups = group_positions(ambient, |i| i.hi().clone(), |i| i.lo().clone(), false);
    let mut partner = vec![usize::MAX; sub.len()];
    for (hi, group) in &sub_groups {
        let candidates = ambient_groups
            .get(hi)
            .unwrap_or_else(|| panic!("canonical injection: no ambient bar dies at {hi:?}"));
        assert!(
            group.len() <= candidates.len(),
            "canonical injection: too few ambient bars dying at {hi:?}"
        );
        for (k, &p) in group.iter().enumerate() {
            let q = candidates[k];
            assert!(
                ambient.entries()[q].1.lo() <= sub.entries()[p].1.lo(),
                "canonical injection: ambient bar born after its submodule bar"
            );
            partner[p] = q;
        }
    }
    partner
}

/// Dual of [`canonical_injection_mono`], for quotients: bars are grouped by
/// left endpoint and paired off by descending right endpoint, so each bar of
/// `quot` gets an ambient bar with the same birth and a death at or above
/// its own.
fn canonical_injection_epi<Q: Scalar>(quot: &Barcode<Q>, ambient: &Barcode<Q>) -> Vec<usize> {
    let quot_groups = group_positions(quot, |i| i.lo().clone(), |i| i.hi().clone(), true);
    let ambient_groups = group_positions(ambient, |i| i.lo().clone(), |i| i.hi().clone(), true);
    let mut partner = vec![usize::MAX; quot.len()];
    for (lo, group) in &quot_groups {
        let candidates = ambient_groups
            .get(lo)
            .unwrap_or_else(|| panic!("canonical injection: no ambient bar born at {lo:?}"));
        assert!(
            group.len() <= candidates.len(),
            "canonical injection: too few ambient bars born at {lo:?}"
        );
        for (k, &p) in group.iter().enumerate() {
            let q = candidates[k];
            assert!(
                ambient.entries()[q].1.hi() >= quot.entries()[p].1.hi(),
                "canonical injection: ambient bar dies before its quotient bar"
            );
            partner[p] = q;
        }
    }
    partner
}

fn group_positions<Q: Scalar>(
    bars: &Barcode<Q>,
    key: impl Fn(&Interval<Q>) -> ExtReal<Q>,
    order: impl Fn(&Interval<Q>) -> ExtReal<Q>,
    descending: bool,
) -> BTreeMap<ExtReal<Q>, Vec<usize>> {
    let mut groups: BTreeMap<ExtReal<Q>, Vec<usize>> = BTreeMap::new();
    for (p, (_, i)) in bars.entries().iter().enumerate() {
        groups.entry(key(i)).or_default().push(p);
    }
    for group in groups.values_mut() {
        // Stable sort: ties stay in entry order.
        if descending {
            group.sort_by(|&a, &b| order(&bars.entries()[b].1).cmp(&order(&bars.entries()[a].1)));
        } else {
            group.sort_by(|&a, &b| order(&bars.entries()[a].1).cmp(&order(&bars.entries()[b].1)));
        }
    }
    groups
}

/// The induced matching `X_f: B(M) ⇸ B(N)` of a module morphism, computed
/// through the epi–mono factorization of `f`: each bar of `B(im f)` is
/// paired with a bar of `B(M)` sharing its birth (death extending upward)
/// and a bar of `B(N)` sharing its death (birth extending downward), and
/// `X_f` matches those two bars.  Every matched source bar overlaps its
/// target above, so the result is a morphism of barcodes.
pub fn induced_matching<Q: Scalar>(f: &ModuleMorphism<Q>) -> OverlapMatching<Q> {
    let im = image_module(f);
    let into_source = canonical_injection_epi(im.bars(), f.source().bars());
    let into_target = canonical_injection_mono(im.bars(), f.target().bars());
    let pairs: Vec<(Index, Index)> = (0..im.bars().len())
        .map(|p| {
            (
                f.source().bars().entries()[into_source[p]].0.clone(),
                f.target().bars().entries()[into_target[p]].0.clone(),
            )
        })
        .collect();
    OverlapMatching::new(f.source().bars().clone(), f.target().bars().clone(), pairs)
        .expect("induced pairs overlap above")
}

/// True iff `f: M → N(δ)` and `g: N → M(δ)` form a δ-interleaving of `M`
/// and `N`: `g_{t+δ} ∘ f_t` equals the internal map `M_t → M_{t+2δ}` and
/// `f_{t+δ} ∘ g_t` equals `N_t → N_{t+2δ}`, for all `t`.
///
/// All four constraints are piecewise constant between the critical values
/// of `M` and `N` and their downward δ- and 2δ-shifts, so checking at those
/// finitely many values decides the condition everywhere.
pub fn check_module_interleaving<Q: Scalar>(
    m: &PersistenceModule<Q>,
    n: &PersistenceModule<Q>,
    delta: &Q,
    f: &ModuleMorphism<Q>,
    g: &ModuleMorphism<Q>,
) -> Result<bool> {
    Ok(module_interleaving_violation(m, n, delta, f, g)?.is_none())
}

/// Like [`check_module_interleaving`], but names the first violated
/// interleaving identity (which composite, at which time) instead of
/// returning a bare boolean.
pub fn module_interleaving_violation<Q: Scalar>(
    m: &PersistenceModule<Q>,
    n: &PersistenceModule<Q>,
    delta: &Q,
    f: &ModuleMorphism<Q>,
    g: &ModuleMorphism<Q>,
) -> Result<Option<String>> {
    debug_assert!(!delta.is_negative());
    if f.field() != g.field() {
        return Err(Error::Mismatch("the two maps use different fields".into()));
    }
    let shape_ok = f.source().bars().same_presentation(m.bars())
        && f.target().bars().same_presentation(n.shift(delta).bars())
        && g.source().bars().same_presentation(n.bars())
        && g.target().bars().same_presentation(m.shift(delta).bars());
    if !shape_ok {
        return Err(Error::Mismatch(
            "expected f: M -> N(δ) and g: N -> M(δ) on the given modules".into(),
        ));
    }
    let fp = f.field();
    let two = delta.clone() + delta.clone();
    let mut probes: Vec<Q> = Vec::new();
    for module in [m, n] {
        for v in module.critical_values() {
            probes.push(v.clone() - delta.clone());
            probes.push(v.clone() - two.clone());
            probes.push(v);
        }
    }
    probes.sort();
    probes.dedup();
    for t in &probes {
        let t_d = t.clone() + delta.clone();
        let t_2d = t.clone() + two.clone();
        let around_m = g.matrix_at(&t_d).matmul(&f.matrix_at(t), &fp);
        if around_m != m.internal_matrix(t, &t_2d) {
            return Ok(Some(format!(
                "g_{t_d} ∘ f_{t} differs from the internal map M_{t} -> M_{t_2d}"
            )));
        }
        let around_n = f.matrix_at(&t_d).matmul(&g.matrix_at(t), &fp);
        if around_n != n.internal_matrix(t, &t_2d) {
            return Ok(Some(format!(
                "f_{t_d} ∘ g_{t} differs from the internal map N_{t} -> N_{t_2d}"
            )));
        }
    }
    Ok(None)
}

/// Builds a δ-interleaving `(f, g)` from a δ-matching σ between `B(M)` and
/// `B(N)`: each matched pair of bars contributes a scalar-1 component in
/// both directions, unmatched (necessarily 2δ-trivial) bars map to zero.
///
/// A matched component whose shifted target no longer admits a map is
/// dropped; that only happens when both bars are 2δ-trivial, where the zero
/// map works just as well.  σ must pass `is_delta_matching`.
pub fn build_interleaving_from_matching<Q: Scalar>(
    m: &PersistenceModule<Q>,
    n: &PersistenceModule<Q>,
    sigma: &Matching,
    delta: &Q,
    field: PrimeField,
) -> (ModuleMorphism<Q>, ModuleMorphism<Q>) {
    assert!(
        crate::interleaving::is_delta_matching(sigma, m.bars(), n.bars(), delta),
        "σ must be a δ-matching between the two barcodes"
    );
    let two = delta.clone() + delta.clone();
    let mut f_entries: Vec<(Index, Index, u64)> = Vec::new();
    let mut g_entries: Vec<(Index, Index, u64)> = Vec::new();
    for (x, y) in sigma.pairs() {
        let i = m.bars().get(x).expect("σ source indexes B(M)");
        let j = n.bars().get(y).expect("σ target indexes B(N)");
        if i.overlaps_above(&j.shift(delta)) {
            f_entries.push((y.clone(), x.clone(), 1));
        } else {
            debug_assert!(i.is_delta_trivial(&two) && j.is_delta_trivial(&two));
        }
        if j.overlaps_above(&i.shift(delta)) {
            g_entries.push((x.clone(), y.clone(), 1));
        } else {
            debug_assert!(i.is_delta_trivial(&two) && j.is_delta_trivial(&two));
        }
    }
    let f = ModuleMorphism::from_interval_matrix(m.clone(), n.shift(delta), field, &f_entries)
        .expect("matched bars overlap above after shifting");
    let g = ModuleMorphism::from_interval_matrix(n.clone(), m.shift(delta), field, &g_entries)
        .expect("matched bars overlap above after shifting");
    (f, g)
}
