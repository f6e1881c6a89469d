//! Exact linear algebra over a prime field F_p.
//!
//! Persistence modules are pointwise finite dimensional vector spaces over a
//! fixed prime field, so every rank, kernel, and quotient they need reduces
//! to Gaussian elimination with residues modulo `p`.  Everything here is
//! exact: no pivoting tolerances, no floating point.

use crate::error::{Error, Result};

/// The field F_p of residues modulo a prime `p`.
///
/// Elements are represented as `u64` values in `0..p`; products go through
/// `u128` so any prime that fits in a `u64` is safe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Builds the field, rejecting composite or degenerate moduli.
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(Error::InvalidModule(format!("{p} is not prime")))
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Canonical residue of a (possibly negative) integer.
    pub fn residue(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.p);
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    ///
    /// Inverting zero is a contract violation, not a recoverable error.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0 && a < self.p, "no inverse for {a} mod {}", self.p);
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        t0.rem_euclid(self.p as i128) as u64
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }
}

/// Deterministic Miller–Rabin primality test, exact for all `u64` inputs
/// with the standard twelve-witness set.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |mut base: u64, mut exp: u64| -> u64 {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = ((acc as u128 * base as u128) % n as u128) as u64;
            }
            base = ((base as u128 * base as u128) % n as u128) as u64;
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A dense row-major matrix over F_p.
///
/// The field is passed to each operation rather than stored, so matrices
/// stay plain data; callers are responsible for using one field throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Mat { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat::new(rows, cols, vec![0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Mat::zero(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has the wrong height");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Mat, fp: &PrimeField) -> Mat {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Mat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = fp.mul(a, rhs.get(k, j));
                    out.set(i, j, fp.add(out.get(i, j), add));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64], fp: &PrimeField) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "vector has the wrong length");
        (0..self.rows)
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.cols {
                    acc = fp.add(acc, fp.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form together with the pivot column indices.
    pub fn rref(&self, fp: &PrimeField) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            let Some(pivot_row) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m.get(row, j);
                m.set(row, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            let inv = fp.inv(m.get(row, col));
            for j in 0..m.cols {
                m.set(row, j, fp.mul(inv, m.get(row, j)));
            }
            for r in 0..m.rows {
                if r != row && m.get(r, col) != 0 {
                    let factor = m.get(r, col);
                    for j in 0..m.cols {
                        let sub = fp.mul(factor, m.get(row, j));
                        m.set(r, j, fp.sub(m.get(r, j), sub));
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self, fp: &PrimeField) -> usize {
        self.rref(fp).1.len()
    }

    /// Indices of a maximal independent set of columns (the pivot columns),
    /// giving a basis of the column space drawn from the matrix itself.
    pub fn pivot_columns(&self, fp: &PrimeField) -> Vec<usize> {
        self.rref(fp).1
    }

    /// A matrix whose columns form a basis of the right kernel
    /// (`cols - rank` of them, each satisfying `self · v = 0`).
    pub fn nullspace(&self, fp: &PrimeField) -> Mat {
        let (r, pivots) = self.rref(fp);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Mat::zero(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, 1);
            for (prow, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, fp.neg(r.get(prow, fc)));
            }
        }
        basis
    }

    /// Solves `self · X = rhs` columnwise; `None` if any column is
    /// inconsistent.  When the kernel is nontrivial the particular solution
    /// with free variables zero is returned.
    pub fn solve(&self, rhs: &Mat, fp: &PrimeField) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows, "heights differ");
        let mut aug = Mat::zero(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            for j in 0..rhs.cols {
                aug.set(i, self.cols + j, rhs.get(i, j));
            }
        }
        let (r, pivots) = aug.rref(fp);
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zero(self.cols, rhs.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(prow, self.cols + j));
            }
        }
        Some(x)
    }

    /// Solves `v = self · x` for a single vector; `None` if `v` is outside
    /// the column space.
    pub fn solve_vec(&self, v: &[u64], fp: &PrimeField) -> Option<Vec<u64>> {
        let rhs = Mat::from_columns(self.rows, &[v.to_vec()]);
        self.solve(&rhs, fp).map(|x| x.column(0))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Rank oracle by exhaustive minor expansion: the largest `k` with a
    /// nonsingular k×k submatrix.  Independent of the elimination code.
    fn rank_by_minors(m: &Mat, fp: &PrimeField) -> usize {
        fn det(m: &Mat, rows: &[usize], cols: &[usize], fp: &PrimeField) -> u64 {
            if rows.is_empty() {
                return 1;
            }
            let mut acc = 0u64;
            for (k, &c) in cols.iter().enumerate() {
                let entry = m.get(rows[0], c);
                if entry == 0 {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det(m, &rows[1..], &rest, fp);
                let term = fp.mul(entry, minor);
                acc = if k % 2 == 0 {
                    fp.add(acc, term)
                } else {
                    fp.sub(acc, term)
                };
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in subsets(n, k - 1) {
                    if rest.iter().all(|&x| x > first) {
                        rest.insert(0, first);
                        out.push(rest);
                    }
                }
            }
            out
        }
        for k in (1..=m.rows().min(m.cols())).rev() {
            for rows in subsets(m.rows(), k) {
                for cols in subsets(m.cols(), k) {
                    if det(m, &rows, &cols, fp) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    fn arb_mat(p: u64) -> impl Strategy<Value = Mat> {
        (1usize..=4, 1usize..=4).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(0..p, r * c).prop_map(move |data| Mat::new(r, c, data))
        })
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0u64..2000 {
            let trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), trial, "disagreement at {n}");
        }
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_647u64 * 3));
        assert!(PrimeField::new(6).is_err());
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn field_arithmetic_is_exhaustively_consistent() {
        for p in [2u64, 3, 5, 7, 11] {
            let fp = f(p);
            for a in 0..p {
                for b in 0..p {
                    assert_eq!(fp.add(a, b), (a + b) % p);
                    assert_eq!(fp.mul(a, b), (a * b) % p);
                    assert_eq!(fp.add(fp.sub(a, b), b), a);
                }
                if a != 0 {
                    assert_eq!(fp.mul(a, fp.inv(a)), 1);
                }
                assert_eq!(fp.add(a, fp.neg(a)), 0);
            }
            assert_eq!(fp.residue(-1), p - 1);
            assert_eq!(fp.residue(p as i64), 0);
        }
    }

    #[test]
    fn rref_examples() {
        let fp = f(5);
        // [1 2; 3 4] is invertible mod 5 (det = -2 = 3).
        let m = Mat::new(2, 2, vec![1, 2, 3, 4]);
        let (r, pivots) = m.rref(&fp);
        assert_eq!(r, Mat::identity(2));
        assert_eq!(pivots, vec![0, 1]);
        // [1 2; 2 4] has rank 1 mod 5 but [1 1; 1 0] has rank 2 mod 2.
        assert_eq!(Mat::new(2, 2, vec![1, 2, 2, 4]).rank(&fp), 1);
        assert_eq!(Mat::new(2, 2, vec![1, 1, 1, 0]).rank(&f(2)), 2);
        // Rank can drop in special characteristic: [1 1; 1 -1] mod 2.
        let m = Mat::new(2, 2, vec![1, 1, 1, 1]);
        assert_eq!(m.rank(&f(2)), 1);
        assert_eq!(m.rank(&f(3)), 1);
    }

    #[test]
    fn solve_examples() {
        let fp = f(7);
        let a = Mat::new(2, 2, vec![1, 2, 3, 4]);
        let b = Mat::new(2, 1, vec![5, 6]);
        let x = a.solve(&b, &fp).unwrap();
        assert_eq!(a.matmul(&x, &fp), b);
        // Inconsistent: [1 1; 1 1] x = (0, 1).
        let sing = Mat::new(2, 2, vec![1, 1, 1, 1]);
        assert!(sing.solve(&Mat::new(2, 1, vec![0, 1]), &fp).is_none());
        assert!(sing.solve(&Mat::new(2, 1, vec![3, 3]), &fp).is_some());
    }

    proptest! {
        /// Elimination rank equals the exhaustive-minor oracle.
        #[test]
        fn rank_matches_minor_oracle(p in prop_oneof![Just(2u64), Just(3), Just(5)],
                                     seed in any::<u64>()) {
            let fp = f(p);
            let mut state = seed;
            let mut next = move || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                state >> 33
            };
            let rows = (next() % 4 + 1) as usize;
            let cols = (next() % 4 + 1) as usize;
            let data: Vec<u64> = (0..rows * cols).map(|_| next() % p).collect();
            let m = Mat::new(rows, cols, data);
            prop_assert_eq!(m.rank(&fp), rank_by_minors(&m, &fp));
        }

        /// Nullspace columns are genuine kernel vectors, independent, and
        /// complete (rank-nullity).
        #[test]
        fn nullspace_is_a_kernel_basis(m in arb_mat(5)) {
            let fp = f(5);
            let ns = m.nullspace(&fp);
            prop_assert_eq!(ns.cols(), m.cols() - m.rank(&fp));
            let product = m.matmul(&ns, &fp);
            prop_assert_eq!(product, Mat::zero(m.rows(), ns.cols()));
            prop_assert_eq!(ns.rank(&fp), ns.cols());
        }

        /// Pivot columns are independent and span every original column.
        #[test]
        fn pivot_columns_form_a_column_basis(m in arb_mat(3)) {
            let fp = f(3);
            let pivots = m.pivot_columns(&fp);
            let basis_cols: Vec<Vec<u64>> = pivots.iter().map(|&j| m.column(j)).collect();
            let basis = Mat::from_columns(m.rows(), &basis_cols);
            prop_assert_eq!(basis.rank(&fp), pivots.len());
            for j in 0..m.cols() {
                let sol = basis.solve_vec(&m.column(j), &fp);
                prop_assert!(sol.is_some(), "column {} not spanned", j);
            }
        }

        /// Solve returns an actual solution whenever it returns at all, and
        /// never misses one (checked against rank of the augmented matrix).
        #[test]
        fn solve_is_sound_and_complete(m in arb_mat(5), seed in any::<u64>()) {
            let fp = f(5);
            let mut state = seed;
            let mut next = move || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                state >> 33
            };
            let v: Vec<u64> = (0..m.rows()).map(|_| next() % 5).collect();
            let mut aug_cols: Vec<Vec<u64>> = (0..m.cols()).map(|j| m.column(j)).collect();
            aug_cols.push(v.clone());
            let aug = Mat::from_columns(m.rows(), &aug_cols);
            let solvable = aug.rank(&fp) == m.rank(&fp);
            match m.solve_vec(&v, &fp) {
                Some(x) => {
                    prop_assert!(solvable);
                    prop_assert_eq!(m.mul_vec(&x, &fp), v);
                }
                None => prop_assert!(!solvable),
            }
        }

        /// Matrix product against the identity and transpose round trips.
        #[test]
        fn matmul_identity_and_transpose(m in arb_mat(7)) {
            let fp = f(7);
            prop_assert_eq!(m.matmul(&Mat::identity(m.cols()), &fp), m.clone());
            prop_assert_eq!(Mat::identity(m.rows()).matmul(&m, &fp), m.clone());
            prop_assert_eq!(m.transpose().transpose(), m);
        }
    }
}
