//! Exact integer linear algebra: dense matrices over Z, Smith normal form,
//! finitely generated abelian groups and bounded complexes of free modules.
//!
//! Two elimination routines share the same pivoting strategy (smallest
//! nonzero absolute value first):
//!
//! * [`smith_normal_form`] is dense and tracks the full unimodular transform
//!   pairs `(U, V)` with `S = U * M * V`, plus their inverses. Use it when
//!   kernels, lifts or coordinate changes are needed.
//! * [`invariant_factors`] runs a sparse elimination that computes only the
//!   diagonal. Chain-level complexes are large but extremely sparse, and
//!   homology needs nothing beyond ranks and invariant factors, so this is
//!   the hot path.
//!
//! The sparse path eliminates to *some* diagonal and then fixes up the
//! divisibility chain by pairwise gcd/lcm sweeps; for diagonal matrices that
//! normalization is exactly the Smith form, so both routines agree (a
//! property test pins this down).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use num_bigint::BigInt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

/// Dense matrix over Z, row-major. An element of `Z^n` is a column vector,
/// so a matrix with `r` rows and `c` columns is a map `Z^c -> Z^r` and
/// composition reads right to left.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Build from rows of machine integers; handy in tests and fixtures.
    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
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

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn mul(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Kronecker product; block `(i,j)` of the result is `self[i][j] * other`.
    pub fn kronecker(&self, other: &IntMatrix) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        let b = other.get(p, q);
                        if !b.is_zero() {
                            out.set(i * other.rows + p, j * other.cols + q, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// True for square matrices with |det| = 1, i.e. all invariant factors 1.
    pub fn is_unimodular(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let fac = invariant_factors(self);
        fac.len() == self.rows && fac.iter().all(One::is_one)
    }

    pub fn row_slices(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub(crate) fn sparse_entries(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if !v.is_zero() {
                    out.push((i, j, v.clone()));
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Nearest-integer quotient: the remainder `a - q*b` has absolute value at
/// most |b|/2, which keeps entries small during elimination.
fn sym_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if (&r * 2u8).magnitude() > b.magnitude() {
        if r.sign() == b.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

// ---------------------------------------------------------------------------
// Smith normal form (dense, with transforms)
// ---------------------------------------------------------------------------

/// Result of [`smith_normal_form`]: `s = u * m * v` with `u`, `v` unimodular,
/// `s` diagonal with nonnegative entries and `s[0][0] | s[1][1] | ...`.
/// The inverses satisfy `m = u_inv * s * v_inv`.
#[derive(Clone, Debug)]
pub struct SmithNormalForm {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl SmithNormalForm {
    /// The nonzero diagonal entries `d_1 | d_2 | ... | d_rank`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s.get(i, i).clone()).collect()
    }
}

struct DenseElim {
    s: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
}

impl DenseElim {
    // row_dst -= q * row_src on s; tracked on u and u_inv.
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols {
                let x = m.get(dst, j) - q * m.get(src, j);
                m.set(dst, j, x);
            }
        }
        // inverse op applied on the right of u_inv: col_src += q * col_dst
        for i in 0..self.u_inv.rows {
            let x = self.u_inv.get(i, src) + q * self.u_inv.get(i, dst);
            self.u_inv.set(i, src, x);
        }
    }

    // col_dst -= q * col_src on s; tracked on v and v_inv.
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        for m in [&mut self.s, &mut self.v] {
            for i in 0..m.rows {
                let x = m.get(i, dst) - q * m.get(i, src);
                m.set(i, dst, x);
            }
        }
        // inverse op applied on the left of v_inv: row_src += q * row_dst
        for j in 0..self.v_inv.cols {
            let x = self.v_inv.get(src, j) + q * self.v_inv.get(dst, j);
            self.v_inv.set(src, j, x);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols {
                let x = m.get(a, j).clone();
                let y = m.get(b, j).clone();
                m.set(a, j, y);
                m.set(b, j, x);
            }
        }
        for i in 0..self.u_inv.rows {
            let x = self.u_inv.get(i, a).clone();
            let y = self.u_inv.get(i, b).clone();
            self.u_inv.set(i, a, y);
            self.u_inv.set(i, b, x);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for m in [&mut self.s, &mut self.v] {
            for i in 0..m.rows {
                let x = m.get(i, a).clone();
                let y = m.get(i, b).clone();
                m.set(i, a, y);
                m.set(i, b, x);
            }
        }
        for j in 0..self.v_inv.cols {
            let x = self.v_inv.get(a, j).clone();
            let y = self.v_inv.get(b, j).clone();
            self.v_inv.set(a, j, y);
            self.v_inv.set(b, j, x);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols {
                let x = -m.get(a, j);
                m.set(a, j, x);
            }
        }
        for i in 0..self.u_inv.rows {
            let x = -self.u_inv.get(i, a);
            self.u_inv.set(i, a, x);
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithNormalForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut e = DenseElim {
        s: m.clone(),
        u: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        u_inv: IntMatrix::identity(rows),
        v_inv: IntMatrix::identity(cols),
    };

    let mut k = 0;
    while k < rows.min(cols) {
        // Smallest nonzero absolute value in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                let x = e.s.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match pivot {
                    Some((pi, pj)) if e.s.get(pi, pj).magnitude() <= x.magnitude() => {}
                    _ => pivot = Some((i, j)),
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        e.swap_rows(k, pr);
        e.swap_cols(k, pc);

        // Clear row and column k; a nonzero remainder becomes the new,
        // strictly smaller pivot, so this terminates.
        'clean: loop {
            for r in (k + 1)..rows {
                if e.s.get(r, k).is_zero() {
                    continue;
                }
                let q = sym_div(e.s.get(r, k), e.s.get(k, k));
                if !q.is_zero() {
                    e.row_sub(r, k, &q);
                }
                if !e.s.get(r, k).is_zero() {
                    e.swap_rows(k, r);
                    continue 'clean;
                }
            }
            for c in (k + 1)..cols {
                if e.s.get(k, c).is_zero() {
                    continue;
                }
                let q = sym_div(e.s.get(k, c), e.s.get(k, k));
                if !q.is_zero() {
                    e.col_sub(c, k, &q);
                }
                if !e.s.get(k, c).is_zero() {
                    e.swap_cols(k, c);
                    continue 'clean;
                }
            }
            break;
        }

        // Make the pivot divide the remaining submatrix before accepting it,
        // so the diagonal comes out as a divisibility chain.
        let piv = e.s.get(k, k).clone();
        let mut offender = None;
        'scan: for i in (k + 1)..rows {
            for j in (k + 1)..cols {
                if !e.s.get(i, j).is_multiple_of(&piv) {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            let minus_one = -BigInt::one();
            e.row_sub(k, i, &minus_one); // row_k += row_i, then retry position k
            continue;
        }

        if e.s.get(k, k).is_negative() {
            e.negate_row(k);
        }
        k += 1;
    }

    SmithNormalForm { s: e.s, u: e.u, v: e.v, u_inv: e.u_inv, v_inv: e.v_inv, rank: k }
}

// ---------------------------------------------------------------------------
// Sparse elimination (rank and invariant factors only)
// ---------------------------------------------------------------------------

struct SparseElim {
    row: Vec<BTreeMap<usize, BigInt>>,
    col: Vec<BTreeSet<usize>>,
}

impl SparseElim {
    fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, BigInt)>) -> Self {
        let mut e = SparseElim { row: vec![BTreeMap::new(); rows], col: vec![BTreeSet::new(); cols] };
        for (r, c, v) in entries {
            if v.is_zero() {
                continue;
            }
            let slot = e.row[r].entry(c).or_insert_with(BigInt::zero);
            *slot += v;
            if slot.is_zero() {
                e.row[r].remove(&c);
            } else {
                e.col[c].insert(r);
            }
        }
        // Accumulation may have cancelled to zero; rebuild column sets exactly.
        for set in &mut e.col {
            set.clear();
        }
        for (r, row) in e.row.iter().enumerate() {
            for &c in row.keys() {
                e.col[c].insert(r);
            }
        }
        e
    }

    fn set(&mut self, r: usize, c: usize, v: BigInt) {
        if v.is_zero() {
            self.row[r].remove(&c);
            self.col[c].remove(&r);
        } else {
            self.row[r].insert(c, v);
            self.col[c].insert(r);
        }
    }

    fn get(&self, r: usize, c: usize) -> BigInt {
        self.row[r].get(&c).cloned().unwrap_or_else(BigInt::zero)
    }

    // row_dst -= q * row_src
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        let src_row = std::mem::take(&mut self.row[src]);
        for (&c, v) in &src_row {
            let x = self.get(dst, c) - q * v;
            self.set(dst, c, x);
        }
        self.row[src] = src_row;
    }

    // col_dst -= q * col_src
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        let rows: Vec<usize> = self.col[src].iter().copied().collect();
        for r in rows {
            let v = self.get(r, src);
            let x = self.get(r, dst) - q * &v;
            self.set(r, dst, x);
        }
    }

    fn delete_row(&mut self, r: usize) {
        let row = std::mem::take(&mut self.row[r]);
        for c in row.keys() {
            self.col[*c].remove(&r);
        }
    }

    fn delete_col(&mut self, c: usize) {
        let rows: Vec<usize> = self.col[c].iter().copied().collect();
        for r in rows {
            self.row[r].remove(&c);
        }
        self.col[c].clear();
    }

    /// Pick the entry with smallest |value|, breaking ties toward least fill.
    fn find_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt, usize)> = None;
        for (r, row) in self.row.iter().enumerate() {
            for (&c, v) in row {
                let fill = (row.len() - 1) * (self.col[c].len() - 1);
                let better = match &best {
                    None => true,
                    Some((_, _, bv, bf)) => {
                        v.magnitude() < bv.magnitude()
                            || (v.magnitude() == bv.magnitude() && fill < *bf)
                    }
                };
                if better {
                    if v.magnitude().is_one() && fill == 0 {
                        return Some((r, c));
                    }
                    best = Some((r, c, v.clone(), fill));
                }
            }
        }
        best.map(|(r, c, _, _)| (r, c))
    }
}

/// Rank and invariant factors `d_1 | d_2 | ... | d_rank` (including any 1s)
/// of an integer matrix given by sparse entries.
pub fn sparse_rank_and_factors(
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, BigInt)>,
) -> (usize, Vec<BigInt>) {
    let mut e = SparseElim::new(rows, cols, entries);
    let mut diag: Vec<BigInt> = Vec::new();

    while let Some((mut pr, mut pc)) = e.find_pivot() {
        'clean: loop {
            let col_rows: Vec<usize> = e.col[pc].iter().copied().filter(|&r| r != pr).collect();
            for r in col_rows {
                let v = e.get(r, pc);
                if v.is_zero() {
                    continue;
                }
                let piv = e.get(pr, pc);
                let q = sym_div(&v, &piv);
                if !q.is_zero() {
                    e.row_sub(r, pr, &q);
                }
                if !e.get(r, pc).is_zero() {
                    pr = r; // remainder is strictly smaller: promote it
                    continue 'clean;
                }
            }
            let row_cols: Vec<usize> =
                e.row[pr].keys().copied().filter(|&c| c != pc).collect();
            for c in row_cols {
                let v = e.get(pr, c);
                if v.is_zero() {
                    continue;
                }
                let piv = e.get(pr, pc);
                let q = sym_div(&v, &piv);
                if !q.is_zero() {
                    e.col_sub(c, pc, &q);
                }
                if !e.get(pr, c).is_zero() {
                    pc = c;
                    continue 'clean;
                }
            }
            break;
        }
        diag.push(e.get(pr, pc).abs());
        e.delete_row(pr);
        e.delete_col(pc);
    }

    let rank = diag.len();
    (rank, divisibility_normalize(diag))
}

/// Normalize a list of positive integers into the equivalent divisibility
/// chain by pairwise gcd/lcm exchanges. For the diagonal of an eliminated
/// matrix this yields exactly the invariant factors.
fn divisibility_normalize(mut d: Vec<BigInt>) -> Vec<BigInt> {
    loop {
        let mut changed = false;
        for i in 0..d.len() {
            for j in (i + 1)..d.len() {
                if d[j].is_multiple_of(&d[i]) {
                    continue;
                }
                let g = d[i].gcd(&d[j]);
                let l = (&d[i] / &g) * &d[j];
                d[i] = g;
                d[j] = l;
                changed = true;
            }
        }
        if !changed {
            return d;
        }
    }
}

/// Invariant factors of a dense matrix (sparse elimination inside).
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    sparse_rank_and_factors(m.rows, m.cols, m.sparse_entries()).1
}

pub fn rank(m: &IntMatrix) -> usize {
    sparse_rank_and_factors(m.rows, m.cols, m.sparse_entries()).0
}

// ---------------------------------------------------------------------------
// Kernels and exact solving
// ---------------------------------------------------------------------------

/// Columns form a basis of the kernel lattice `ker(m)` inside `Z^cols`.
/// The basis is saturated: any integer kernel vector is an integer
/// combination of the columns.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let n = m.cols;
    let free = n - snf.rank;
    IntMatrix::from_fn(n, free, |i, j| snf.v.get(i, snf.rank + j).clone())
}

/// Basis of the column lattice `im(m)` inside `Z^rows`, as matrix columns.
pub fn image_basis(m: &IntMatrix) -> IntMatrix {
    // im(M) = U_inv · im(S), and im(S) has basis d_i · e_i.
    let snf = smith_normal_form(m);
    IntMatrix::from_fn(m.rows(), snf.rank, |i, j| snf.u_inv.get(i, j) * snf.s.get(j, j))
}

/// Solve `m * x = b` over Z; `None` when no integer solution exists.
pub fn solve_exact(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows, b.len());
    let snf = smith_normal_form(m);
    let y = snf.u.apply(b);
    let mut x = vec![BigInt::zero(); m.cols];
    for (i, yi) in y.iter().enumerate() {
        if i < snf.rank {
            let d = snf.s.get(i, i);
            if !yi.is_multiple_of(d) {
                return None;
            }
            x[i] = yi / d;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(snf.v.apply(&x))
}

/// Solve `m * X = B` columnwise; `None` when any column has no solution.
pub fn solve_exact_matrix(m: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(m.rows, b.rows);
    let snf = smith_normal_form(m);
    let mut out = IntMatrix::zeros(m.cols, b.cols);
    for j in 0..b.cols {
        let col: Vec<BigInt> = (0..b.rows).map(|i| b.get(i, j).clone()).collect();
        let y = snf.u.apply(&col);
        let mut x = vec![BigInt::zero(); m.cols];
        for (i, yi) in y.iter().enumerate() {
            if i < snf.rank {
                let d = snf.s.get(i, i);
                if !yi.is_multiple_of(d) {
                    return None;
                }
                x[i] = yi / d;
            } else if !yi.is_zero() {
                return None;
            }
        }
        let sol = snf.v.apply(&x);
        for (i, s) in sol.into_iter().enumerate() {
            out.set(i, j, s);
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Finitely generated abelian groups
// ---------------------------------------------------------------------------

/// A finitely generated abelian group in normal form:
/// `Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k` with `d_i >= 2` and `d_1 | d_2 | ... | d_k`.
/// Structural equality is isomorphism.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FgGroup {
    rank: usize,
    torsion: Vec<BigInt>,
}

impl FgGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgGroup { rank, torsion: Vec::new() }
    }

    /// Normalizes an arbitrary torsion list (orders >= 1, any order) into the
    /// invariant factor chain; entries equal to 1 are dropped.
    pub fn from_parts(rank: usize, torsion: Vec<BigInt>) -> Self {
        for t in &torsion {
            assert!(t.is_positive(), "torsion orders must be positive, got {t}");
        }
        let torsion = divisibility_normalize(torsion)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        FgGroup { rank, torsion }
    }

    pub fn from_parts_i64(rank: usize, torsion: &[i64]) -> Self {
        Self::from_parts(rank, torsion.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn cyclic(order: i64) -> Self {
        Self::from_parts_i64(0, &[order])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.rank == 0
    }

    pub fn direct_sum(&self, other: &FgGroup) -> FgGroup {
        let mut torsion = self.torsion.clone();
        torsion.extend(other.torsion.iter().cloned());
        FgGroup::from_parts(self.rank + other.rank, torsion)
    }

    /// `G ⊗ H`: ranks multiply, free parts smear the other side's torsion,
    /// and `Z/a ⊗ Z/b = Z/gcd(a,b)`.
    pub fn tensor(&self, other: &FgGroup) -> FgGroup {
        let mut torsion = Vec::new();
        for _ in 0..self.rank {
            torsion.extend(other.torsion.iter().cloned());
        }
        for _ in 0..other.rank {
            torsion.extend(self.torsion.iter().cloned());
        }
        for a in &self.torsion {
            for b in &other.torsion {
                torsion.push(a.gcd(b));
            }
        }
        FgGroup::from_parts(self.rank * other.rank, torsion)
    }

    /// `Tor_1(G, H)`: only torsion sees torsion, `Tor(Z/a, Z/b) = Z/gcd(a,b)`.
    pub fn tor(&self, other: &FgGroup) -> FgGroup {
        let mut torsion = Vec::new();
        for a in &self.torsion {
            for b in &other.torsion {
                torsion.push(a.gcd(b));
            }
        }
        FgGroup::from_parts(0, torsion)
    }

    /// `(Hom(G, Z), Ext^1(G, Z))`: the free part dualizes to itself, the
    /// torsion migrates into the Ext term unchanged.
    pub fn dual(&self) -> (FgGroup, FgGroup) {
        (FgGroup::free(self.rank), FgGroup::from_parts(0, self.torsion.clone()))
    }

    /// The presented group `Z^gens / im(relations)`.
    pub fn from_presentation(gens: usize, relations: &IntMatrix) -> FgGroup {
        assert_eq!(relations.rows(), gens, "relation columns must live in Z^gens");
        let (rk, factors) = sparse_rank_and_factors(
            relations.rows(),
            relations.cols(),
            relations.sparse_entries(),
        );
        FgGroup::from_parts(gens - rk, factors)
    }
}

impl fmt::Display for FgGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl fmt::Debug for FgGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn bigint_to_json_value(v: &BigInt) -> serde_json::Value {
    match i64::try_from(v.clone()) {
        Ok(n) => serde_json::Value::from(n),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

impl Serialize for FgGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Torsion<'a>(&'a [BigInt]);
        impl Serialize for Torsion<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for d in self.0 {
                    seq.serialize_element(&bigint_to_json_value(d))?;
                }
                seq.end()
            }
        }
        let mut st = serializer.serialize_struct("FgGroup", 2)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("torsion", &Torsion(&self.torsion))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FgGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum NumOrStr {
            Num(i64),
            Str(String),
        }
        #[derive(Deserialize)]
        struct Raw {
            rank: usize,
            #[serde(default)]
            torsion: Vec<NumOrStr>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut torsion = Vec::new();
        for t in raw.torsion {
            let v = match t {
                NumOrStr::Num(n) => BigInt::from(n),
                NumOrStr::Str(s) => {
                    s.parse::<BigInt>().map_err(|e| de::Error::custom(e.to_string()))?
                }
            };
            torsion.push(v);
        }
        Ok(FgGroup::from_parts(raw.rank, torsion))
    }
}

// ---------------------------------------------------------------------------
// Graded groups
// ---------------------------------------------------------------------------

/// A finite collection of groups indexed by integer degree; zero groups are
/// never stored, so structural equality is degreewise isomorphism.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GradedGroups {
    groups: BTreeMap<i64, FgGroup>,
}

impl GradedGroups {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, degree: i64, group: FgGroup) {
        if !group.is_zero() {
            self.groups.insert(degree, group);
        }
    }

    pub fn get(&self, degree: i64) -> FgGroup {
        self.groups.get(&degree).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.groups.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &FgGroup)> {
        self.groups.iter().map(|(d, g)| (*d, g))
    }

    pub fn single(degree: i64, group: FgGroup) -> Self {
        let mut g = Self::new();
        g.insert(degree, group);
        g
    }

    /// Degrees shift down by `k`: the shifted object `G[k]` has in degree `n`
    /// what `G` had in degree `n + k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = Self::new();
        for (d, g) in self.iter() {
            out.insert(d - k, g.clone());
        }
        out
    }

    pub fn direct_sum(&self, other: &GradedGroups) -> Self {
        let mut out = self.clone();
        for (d, g) in other.iter() {
            out.insert(d, out.get(d).direct_sum(g));
        }
        out
    }

    /// Same groups with every degree negated — converts between homological
    /// and cohomological indexing.
    pub fn negate_degrees(&self) -> Self {
        let mut out = Self::new();
        for (d, g) in self.iter() {
            out.insert(-d, g.clone());
        }
        out
    }

    /// Universal-coefficient dual: the graded groups of `RHom(C, Z)` depend
    /// only on those of `C`, with `rank H^{-i} = rank H^i` and
    /// `torsion H^{-i} = torsion H^{i+1}`.
    pub fn universal_coefficient_dual(&self) -> GradedGroups {
        let mut out = GradedGroups::new();
        let Some(min) = self.groups.keys().next().copied() else { return out };
        let max = *self.groups.keys().next_back().unwrap();
        for i in (min - 1)..=max {
            let rank = self.get(i).rank();
            let torsion = self.get(i + 1).torsion().to_vec();
            out.insert(-i, FgGroup::from_parts(rank, torsion));
        }
        out
    }

    /// Graded groups of a derived tensor product over Z:
    /// `H^n = ⊕_{i+j=n} H^i⊗H^j  ⊕  ⊕_{i+j=n+1} Tor(H^i, H^j)`.
    pub fn kunneth(&self, other: &GradedGroups) -> GradedGroups {
        let mut out = GradedGroups::new();
        for (i, a) in self.iter() {
            for (j, b) in other.iter() {
                let t = a.tensor(b);
                out.insert(i + j, out.get(i + j).direct_sum(&t));
                let tor = a.tor(b);
                out.insert(i + j - 1, out.get(i + j - 1).direct_sum(&tor));
            }
        }
        out
    }
}

impl fmt::Display for GradedGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.iter().map(|(d, g)| format!("{d}: {g}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for GradedGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for GradedGroups {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.groups.len()))?;
        for (d, g) in &self.groups {
            map.serialize_entry(&d.to_string(), g)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GradedGroups {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = GradedGroups;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from integer degrees to groups")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut out = GradedGroups::new();
                while let Some((key, value)) = access.next_entry::<String, FgGroup>()? {
                    let d: i64 =
                        key.parse().map_err(|_| de::Error::custom("bad degree key"))?;
                    out.insert(d, value);
                }
                Ok(out)
            }
        }
        deserializer.deserialize_map(V)
    }
}

// ---------------------------------------------------------------------------
// Bounded complexes of free Z-modules
// ---------------------------------------------------------------------------

/// Sparse matrix data keyed by `(row, col)`; the shape lives in the complex.
pub type SparseEntries = BTreeMap<(usize, usize), BigInt>;

/// A bounded cochain complex of finitely generated free Z-modules.
/// Degree `lo + i` has rank `ranks[i]`; `diffs[i]` maps degree `lo+i` to
/// `lo+i+1`. Homological complexes are stored with negated degrees.
#[derive(Clone, PartialEq, Eq)]
pub struct FreeComplexZ {
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<SparseEntries>,
}

impl FreeComplexZ {
    pub fn empty() -> Self {
        FreeComplexZ { lo: 0, ranks: Vec::new(), diffs: Vec::new() }
    }

    /// A single free module `Z^rank` sitting in one degree.
    pub fn concentrated(degree: i64, rank: usize) -> Self {
        FreeComplexZ { lo: degree, ranks: vec![rank], diffs: Vec::new() }
    }

    pub fn from_sparse(lo: i64, ranks: Vec<usize>, diffs: Vec<SparseEntries>) -> Result<Self> {
        if ranks.is_empty() {
            return Ok(Self::empty());
        }
        if diffs.len() + 1 != ranks.len() {
            return Err(Error::BadComplex {
                deg: lo,
                detail: format!("{} ranks need {} differentials, got {}", ranks.len(), ranks.len() - 1, diffs.len()),
            });
        }
        let c = FreeComplexZ { lo, ranks, diffs };
        c.validate()?;
        Ok(c)
    }

    pub fn from_dense(lo: i64, ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self> {
        if !ranks.is_empty() && diffs.len() + 1 != ranks.len() {
            return Err(Error::BadComplex {
                deg: lo,
                detail: format!(
                    "{} ranks need {} differentials, got {}",
                    ranks.len(),
                    ranks.len() - 1,
                    diffs.len()
                ),
            });
        }
        let sparse: Vec<SparseEntries> = diffs
            .iter()
            .map(|m| {
                m.sparse_entries().into_iter().map(|(r, c, v)| ((r, c), v)).collect()
            })
            .collect();
        let out = FreeComplexZ { lo, ranks, diffs: sparse };
        for (i, m) in diffs.iter().enumerate() {
            if m.rows() != out.ranks.get(i + 1).copied().unwrap_or(0)
                || m.cols() != out.ranks[i]
            {
                return Err(Error::BadComplex {
                    deg: lo + i as i64,
                    detail: format!(
                        "differential is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        out.ranks.get(i + 1).copied().unwrap_or(0),
                        out.ranks[i]
                    ),
                });
            }
        }
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        for (i, d) in self.diffs.iter().enumerate() {
            let (rows, cols) = (self.ranks[i + 1], self.ranks[i]);
            for &(r, c) in d.keys() {
                if r >= rows || c >= cols {
                    return Err(Error::BadComplex {
                        deg: self.lo + i as i64,
                        detail: format!("entry ({r},{c}) outside {rows}x{cols}"),
                    });
                }
            }
        }
        // d ∘ d = 0 for consecutive pairs
        for i in 0..self.diffs.len().saturating_sub(1) {
            let first = &self.diffs[i];
            let second = &self.diffs[i + 1];
            let mut by_col: BTreeMap<usize, Vec<(usize, &BigInt)>> = BTreeMap::new();
            for (&(r, c), v) in second {
                by_col.entry(c).or_default().push((r, v));
            }
            let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
            for (&(mid, c), v1) in first {
                if let Some(hits) = by_col.get(&mid) {
                    for (r, v2) in hits {
                        let slot = acc.entry((*r, c)).or_insert_with(BigInt::zero);
                        *slot += *v2 * v1;
                    }
                }
            }
            if acc.values().any(|v| !v.is_zero()) {
                return Err(Error::NotAComplex { deg: self.lo + i as i64 });
            }
        }
        Ok(())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn rank_at(&self, degree: i64) -> usize {
        if degree < self.lo {
            return 0;
        }
        self.ranks.get((degree - self.lo) as usize).copied().unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// The differential out of `degree`, densified.
    pub fn differential(&self, degree: i64) -> IntMatrix {
        let rows = self.rank_at(degree + 1);
        let cols = self.rank_at(degree);
        let mut m = IntMatrix::zeros(rows, cols);
        if degree >= self.lo {
            if let Some(d) = self.diffs.get((degree - self.lo) as usize) {
                for (&(r, c), v) in d {
                    m.set(r, c, v.clone());
                }
            }
        }
        m
    }

    /// Cohomology in every degree. Only ranks and invariant factors of the
    /// differentials are needed: the free rank in degree `i` is
    /// `rank_i - rank(d_i) - rank(d_{i-1})` and the torsion is the nonunit
    /// part of the invariant factors of `d_{i-1}`.
    pub fn homology(&self) -> GradedGroups {
        let mut out = GradedGroups::new();
        if self.ranks.is_empty() {
            return out;
        }
        let stats: Vec<(usize, Vec<BigInt>)> = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let entries: Vec<(usize, usize, BigInt)> =
                    d.iter().map(|(&(r, c), v)| (r, c, v.clone())).collect();
                sparse_rank_and_factors(self.ranks[i + 1], self.ranks[i], entries)
            })
            .collect();
        for i in 0..self.ranks.len() {
            let out_rank = if i < stats.len() { stats[i].0 } else { 0 };
            let (in_rank, in_factors) = if i > 0 {
                (stats[i - 1].0, stats[i - 1].1.clone())
            } else {
                (0, Vec::new())
            };
            assert!(
                self.ranks[i] >= out_rank + in_rank,
                "rank bookkeeping violated; not a complex?"
            );
            let free = self.ranks[i] - out_rank - in_rank;
            out.insert(self.lo + i as i64, FgGroup::from_parts(free, in_factors));
        }
        out
    }

    /// `RHom(C, Z)` as a complex: degrees negate and differentials transpose.
    pub fn dual(&self) -> FreeComplexZ {
        if self.ranks.is_empty() {
            return Self::empty();
        }
        let n = self.ranks.len();
        let lo = -(self.hi());
        let ranks: Vec<usize> = (0..n).map(|i| self.ranks[n - 1 - i]).collect();
        let diffs: Vec<SparseEntries> = (0..n - 1)
            .map(|i| {
                // dual differential out of degree -(lo+j+1): transpose of diffs[j]
                let j = n - 2 - i;
                self.diffs[j].iter().map(|(&(r, c), v)| ((c, r), v.clone())).collect()
            })
            .collect();
        FreeComplexZ { lo, ranks, diffs }
    }

    /// Shift: `C[k]` has in degree `n` what `C` had in degree `n+k`; the
    /// differential picks up the usual sign `(-1)^k`.
    pub fn shift(&self, k: i64) -> FreeComplexZ {
        let mut out = self.clone();
        out.lo -= k;
        if k.rem_euclid(2) == 1 {
            for d in &mut out.diffs {
                for v in d.values_mut() {
                    *v = -std::mem::take(v);
                }
            }
        }
        out
    }

    /// Total complex of the tensor product over Z, with the Koszul sign
    /// `(-1)^i` on `id ⊗ d` in bidegree `(i, j)`.
    pub fn tensor(&self, other: &FreeComplexZ) -> FreeComplexZ {
        if self.ranks.is_empty() || other.ranks.is_empty() {
            return Self::empty();
        }
        let lo = self.lo + other.lo;
        let hi = self.hi() + other.hi();
        let len = (hi - lo + 1) as usize;

        // Block offsets: in total degree n, blocks (i, j=n-i) ordered by i.
        let offset = |n: i64, i: i64| -> usize {
            let mut off = 0;
            for ii in self.lo..i {
                off += self.rank_at(ii) * other.rank_at(n - ii);
            }
            off
        };

        let ranks: Vec<usize> = (lo..=hi)
            .map(|n| {
                (self.lo..=self.hi())
                    .map(|i| self.rank_at(i) * other.rank_at(n - i))
                    .sum()
            })
            .collect();
        let mut diffs: Vec<SparseEntries> = vec![BTreeMap::new(); len - 1];

        for n in lo..hi {
            let d = &mut diffs[(n - lo) as usize];
            for i in self.lo..=self.hi() {
                let j = n - i;
                let (a, b) = (self.rank_at(i), other.rank_at(j));
                if a == 0 || b == 0 {
                    continue;
                }
                let src_off = offset(n, i);
                // d_self ⊗ id : block (i, j) -> (i+1, j)
                if self.rank_at(i + 1) > 0 {
                    let dst_off = offset(n + 1, i + 1);
                    if i - self.lo < self.diffs.len() as i64 {
                        for (&(r, c), v) in &self.diffs[(i - self.lo) as usize] {
                            for t in 0..b {
                                let key = (dst_off + r * b + t, src_off + c * b + t);
                                *d.entry(key).or_insert_with(BigInt::zero) += v;
                            }
                        }
                    }
                }
                // (-1)^i id ⊗ d_other : block (i, j) -> (i, j+1)
                if other.rank_at(j + 1) > 0 && j - other.lo < other.diffs.len() as i64 {
                    let dst_off = offset(n + 1, i);
                    let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
                    for (&(r, c), v) in &other.diffs[(j - other.lo) as usize] {
                        for s in 0..a {
                            let key = (dst_off + s * other.rank_at(j + 1) + r, src_off + s * b + c);
                            let term = if sign == 1 { v.clone() } else { -v };
                            *d.entry(key).or_insert_with(BigInt::zero) += term;
                        }
                    }
                }
            }
        }
        for d in &mut diffs {
            d.retain(|_, v| !v.is_zero());
        }
        let out = FreeComplexZ { lo, ranks, diffs };
        debug_assert!(out.validate().is_ok());
        out
    }
}

impl fmt::Debug for FreeComplexZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeComplexZ[{}..={}] ranks {:?}", self.lo, self.hi(), self.ranks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    /// Test-only rank over Q by fraction-free elimination; independent of the
    /// Smith normal form code paths.
    fn rational_rank(m: &IntMatrix) -> usize {
        let mut a: Vec<Vec<BigInt>> = m.row_slices();
        let (rows, cols) = (m.rows(), m.cols());
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else { continue };
            a.swap(row, p);
            for r in (row + 1)..rows {
                if a[r][col].is_zero() {
                    continue;
                }
                let (num, den) = (a[r][col].clone(), a[row][col].clone());
                for c in 0..cols {
                    a[r][c] = &a[r][c] * &den - &a[row][c] * &num;
                }
            }
            row += 1;
            rank += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn snf_identity_is_identity() {
        let m = IntMatrix::identity(2);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.s, IntMatrix::identity(2));
        assert_eq!(snf.rank, 2);
    }

    #[test]
    fn snf_zero_matrix() {
        let m = IntMatrix::zeros(3, 2);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.rank, 0);
        assert!(snf.s.is_zero());
        assert!(snf.u.is_unimodular() && snf.v.is_unimodular());
    }

    #[test]
    fn snf_small_example() {
        // [[2,4],[6,8]]: row2 -= 3*row1 gives [[2,4],[0,-4]], col2 -= 2*col1
        // gives [[2,0],[0,-4]]; sign fix yields diag(2,4), rank 2, |det| = 8.
        let m = IntMatrix::from_rows(&[&[2, 4], &[6, 8]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![big(2), big(4)]);
        assert_eq!(snf.s, snf.u.mul(&m).mul(&snf.v));
    }

    #[test]
    fn snf_transforms_are_inverse_pairs() {
        let m = IntMatrix::from_rows(&[&[6, 10, -4], &[2, 0, 8]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.u.mul(&snf.u_inv), IntMatrix::identity(2));
        assert_eq!(snf.v.mul(&snf.v_inv), IntMatrix::identity(3));
        assert_eq!(snf.u_inv.mul(&snf.s).mul(&snf.v_inv), m);
    }

    #[test]
    fn invariant_factors_match_dense_and_sparse() {
        let m = IntMatrix::from_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let snf = smith_normal_form(&m);
        assert_eq!(invariant_factors(&m), snf.diagonal());
    }

    #[test]
    fn kernel_basis_is_saturated() {
        // x + y + z = 0 over Z: kernel is rank 2 and the quotient is Z (no torsion).
        let m = IntMatrix::from_rows(&[&[1, 1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn solve_exact_detects_unsolvable() {
        let m = IntMatrix::from_rows(&[&[2, 0], &[0, 3]]);
        assert_eq!(solve_exact(&m, &[big(4), big(9)]), Some(vec![big(2), big(3)]));
        assert_eq!(solve_exact(&m, &[big(1), big(0)]), None);
    }

    #[test]
    fn fg_group_normal_form() {
        // Z/2 ⊕ Z/3 = Z/6; Z/4 ⊕ Z/6 = Z/2 ⊕ Z/12.
        assert_eq!(FgGroup::from_parts_i64(0, &[2, 3]), FgGroup::from_parts_i64(0, &[6]));
        assert_eq!(
            FgGroup::from_parts_i64(0, &[4, 6]).torsion(),
            &[big(2), big(12)]
        );
        assert_eq!(FgGroup::from_parts_i64(1, &[1, 1]), FgGroup::free(1));
    }

    #[test]
    fn fg_group_dual_splits_rank_and_torsion() {
        let g = FgGroup::from_parts_i64(2, &[3]);
        let (hom, ext) = g.dual();
        assert_eq!(hom, FgGroup::free(2));
        assert_eq!(ext, FgGroup::cyclic(3));
    }

    #[test]
    fn fg_group_tensor_and_tor() {
        let a = FgGroup::from_parts_i64(1, &[4]);
        let b = FgGroup::from_parts_i64(0, &[6]);
        // (Z ⊕ Z/4) ⊗ Z/6 = Z/6 ⊕ Z/gcd(4,6) = Z/2 ⊕ Z/6
        assert_eq!(a.tensor(&b), FgGroup::from_parts_i64(0, &[6, 2]));
        assert_eq!(a.tor(&b), FgGroup::cyclic(2));
    }

    #[test]
    fn multiplication_by_two_complex() {
        // 0 -> Z --2--> Z -> 0 in degrees 0, 1: H^0 = 0, H^1 = Z/2.
        let c = FreeComplexZ::from_dense(
            0,
            vec![1, 1],
            vec![IntMatrix::from_rows(&[&[2]])],
        )
        .unwrap();
        let h = c.homology();
        assert!(h.get(0).is_zero());
        assert_eq!(h.get(1), FgGroup::cyclic(2));
    }

    #[test]
    fn circle_graph_homology() {
        // 4-cycle: vertices v0..v3, edges e_i = [v_i, v_{i+1}].
        // Boundary matrix columns e_i = v_{i+1} - v_i, written by hand.
        let boundary = IntMatrix::from_rows(&[
            &[-1, 0, 0, 1],
            &[1, -1, 0, 0],
            &[0, 1, -1, 0],
            &[0, 0, 1, -1],
        ]);
        // Independent oracle: rank over Q is 3, so H_0 = Z^(4-3) = Z and
        // H_1 = ker = Z^(4-3) = Z; no torsion since invariant factors of a
        // totally unimodular matrix are 1.
        assert_eq!(rational_rank(&boundary), 3);
        // Chain complex C_1 -> C_0 stored cohomologically in degrees -1, 0.
        let c = FreeComplexZ::from_dense(-1, vec![4, 4], vec![boundary]).unwrap();
        let h = c.homology();
        assert_eq!(h.get(0), FgGroup::free(1)); // H_0
        assert_eq!(h.get(-1), FgGroup::free(1)); // H_1
    }

    #[test]
    fn dual_complex_universal_coefficients() {
        // C = [Z --2--> Z] in degrees 0,1: H^1 = Z/2.
        // C^v has H^{-1} rank 0 and H^0 = Z/2 (torsion shifts one degree).
        let c = FreeComplexZ::from_dense(
            0,
            vec![1, 1],
            vec![IntMatrix::from_rows(&[&[2]])],
        )
        .unwrap();
        let dual = c.dual();
        assert_eq!(dual.lo(), -1);
        let h = dual.homology();
        assert_eq!(h.get(0), FgGroup::cyclic(2));
        assert!(h.get(-1).is_zero());
        assert_eq!(c.homology().universal_coefficient_dual(), h);
    }

    #[test]
    fn ucd_matches_definition() {
        let mut g = GradedGroups::new();
        g.insert(0, FgGroup::free(2));
        g.insert(1, FgGroup::from_parts_i64(1, &[3]));
        let d = g.universal_coefficient_dual();
        assert_eq!(d.get(0), FgGroup::from_parts_i64(2, &[3]));
        assert_eq!(d.get(-1), FgGroup::free(1));
    }

    #[test]
    fn kunneth_of_graded_groups() {
        // (Z/2 in degree 1) ⊗L (Z/2 in degree 1):
        // tensor lands in degree 2, Tor in degree 1.
        let g = GradedGroups::single(1, FgGroup::cyclic(2));
        let k = g.kunneth(&g);
        assert_eq!(k.get(2), FgGroup::cyclic(2));
        assert_eq!(k.get(1), FgGroup::cyclic(2));
    }

    #[test]
    fn tensor_of_complexes_matches_kunneth() {
        // [Z --2--> Z] ⊗ [Z --3--> Z]
        let a = FreeComplexZ::from_dense(0, vec![1, 1], vec![IntMatrix::from_rows(&[&[2]])])
            .unwrap();
        let b = FreeComplexZ::from_dense(0, vec![1, 1], vec![IntMatrix::from_rows(&[&[3]])])
            .unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.homology(), a.homology().kunneth(&b.homology()));
    }

    #[test]
    fn not_a_complex_is_rejected() {
        let d0 = IntMatrix::from_rows(&[&[1]]);
        let d1 = IntMatrix::from_rows(&[&[1]]);
        let err = FreeComplexZ::from_dense(0, vec![1, 1, 1], vec![d0, d1]);
        assert!(matches!(err, Err(Error::NotAComplex { .. })));
    }

    #[test]
    fn graded_groups_json_round_trip() {
        let mut g = GradedGroups::new();
        g.insert(-1, FgGroup::free(1));
        g.insert(2, FgGroup::from_parts_i64(0, &[2]));
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"-1":{"rank":1,"torsion":[]},"2":{"rank":0,"torsion":[2]}}"#);
        let back: GradedGroups = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        #[test]
        fn prop_snf_factorization(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = IntMatrix::from_fn(rows, cols, |_, _| big(rng.gen_range(-9..=9)));
            let snf = smith_normal_form(&m);
            prop_assert_eq!(snf.s.clone(), snf.u.mul(&m).mul(&snf.v));
            prop_assert!(snf.u.is_unimodular());
            prop_assert!(snf.v.is_unimodular());
            prop_assert_eq!(snf.u.mul(&snf.u_inv), IntMatrix::identity(rows));
            prop_assert_eq!(snf.v.mul(&snf.v_inv), IntMatrix::identity(cols));
            // diagonal, nonnegative, divisibility chain
            for i in 0..rows {
                for j in 0..cols {
                    if i != j {
                        prop_assert!(snf.s.get(i, j).is_zero());
                    }
                }
            }
            let d = snf.diagonal();
            for w in d.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            // rank agrees with an elimination-free oracle
            prop_assert_eq!(snf.rank, rational_rank(&m));
            // sparse path agrees with dense path
            prop_assert_eq!(invariant_factors(&m), d);
            // transpose invariance
            prop_assert_eq!(invariant_factors(&m.transpose()), invariant_factors(&m));
        }

        #[test]
        fn prop_dual_is_universal_coefficients(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // A random one-step complex already exercises both the rank and
            // the torsion bookkeeping of the dual.
            let a = rng.gen_range(1usize..4);
            let b = rng.gen_range(1usize..4);
            let d0 = IntMatrix::from_fn(b, a, |_, _| big(rng.gen_range(-4..=4)));
            let c = FreeComplexZ::from_dense(0, vec![a, b], vec![d0]).unwrap();
            let h = c.homology();
            let hd = c.dual().homology();
            prop_assert_eq!(h.universal_coefficient_dual(), hd);
        }
    }
}
