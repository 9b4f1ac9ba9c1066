//! Sparse matrices over an exact field, with deterministic Gauss-Jordan
//! elimination.
//!
//! Matrices act on column vectors. Entries are kept in a sorted map with no
//! explicit zeros, so equal matrices have equal representations.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// A sparse column vector.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVec {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: BTreeMap::new() }
    }

    pub fn unit(i: usize, field: Field) -> Self {
        let mut v = SparseVec::new();
        v.set(i, field.one());
        v
    }

    pub fn set(&mut self, i: usize, value: Scalar) {
        if value.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, value);
        }
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries.get(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, s)| (*i, s))
    }

    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, s) in other.iter() {
            let cur = match self.entries.get(&i) {
                Some(t) => t.add(&s.mul(c)),
                None => s.mul(c),
            };
            self.set(i, cur);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, s) in self.iter() {
            out.set(i, s.mul(c));
        }
        out
    }
}

/// A sparse `rows x cols` matrix with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    field: Field,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize, field: Field) -> Self {
        SparseMatrix { rows, cols, field, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        let mut m = SparseMatrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from an entry list, rejecting out-of-range positions
    /// and duplicate positions. Zero values are dropped.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        field: Field,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut m = SparseMatrix::zero(rows, cols, field);
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::input(format!(
                    "matrix entry ({r},{c}) out of range for {rows}x{cols}"
                )));
            }
            if v.is_zero() {
                continue;
            }
            if m.entries.insert((r, c), v).is_some() {
                return Err(Error::input(format!("duplicate matrix entry at ({r},{c})")));
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|((r, c), v)| (*r, *c, v))
    }

    pub fn column(&self, c: usize) -> SparseVec {
        let mut v = SparseVec::new();
        for ((r, cc), s) in self.entries.range((0, c)..=(self.rows, c)) {
            if *cc == c {
                v.set(*r, s.clone());
            }
        }
        v
    }

    /// All columns as sparse vectors. Row-major storage makes per-column
    /// range scans awkward, so this walks the entries once.
    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![SparseVec::new(); self.cols];
        for ((r, c), s) in &self.entries {
            cols[*c].set(*r, s.clone());
        }
        cols
    }

    pub fn set_column(&mut self, c: usize, v: &SparseVec) {
        let keys: Vec<usize> = (0..self.rows)
            .filter(|r| self.entries.contains_key(&(*r, c)))
            .collect();
        for r in keys {
            self.entries.remove(&(r, c));
        }
        for (r, s) in v.iter() {
            self.set(r, c, s.clone());
        }
    }

    pub fn from_columns(rows: usize, field: Field, cols: &[SparseVec]) -> Self {
        let mut m = SparseMatrix::zero(rows, cols.len(), field);
        for (c, v) in cols.iter().enumerate() {
            for (r, s) in v.iter() {
                m.set(r, c, s.clone());
            }
        }
        m
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (c, s) in v.iter() {
            debug_assert!(c < self.cols, "vector index out of range");
            for r in 0..self.rows {
                if let Some(a) = self.entries.get(&(r, c)) {
                    let cur = match out.get(r) {
                        Some(t) => t.add(&a.mul(s)),
                        None => a.mul(s),
                    };
                    out.set(r, cur);
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = SparseMatrix::zero(self.rows, other.cols, self.field);
        for ((r, k), a) in &self.entries {
            for c in 0..other.cols {
                if let Some(b) = other.entries.get(&(*k, c)) {
                    let cur = out.get(*r, c).add(&a.mul(b));
                    out.set(*r, c, cur);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for ((r, c), v) in &other.entries {
            let cur = out.get(*r, *c).add(v);
            out.set(*r, *c, cur);
        }
        out
    }

    pub fn neg(&self) -> SparseMatrix {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v = v.neg();
        }
        out
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.neg())
    }

    pub fn scaled(&self, c: &Scalar) -> SparseMatrix {
        let mut out = SparseMatrix::zero(self.rows, self.cols, self.field);
        for ((r, cc), v) in &self.entries {
            out.set(*r, *cc, v.mul(c));
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = SparseMatrix::zero(self.cols, self.rows, self.field);
        for ((r, c), v) in &self.entries {
            out.set(*c, *r, v.clone());
        }
        out
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Result of reduced row echelon elimination: `transform * input = reduced`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: SparseMatrix,
    /// Pivot columns, one per pivot row, in increasing order.
    pub pivots: Vec<usize>,
    /// Invertible `rows x rows` record of the row operations.
    pub transform: SparseMatrix,
}

/// Reduced row echelon form with deterministic pivoting: for each column in
/// order, the first remaining row with a nonzero entry becomes the pivot row.
pub fn rref(m: &SparseMatrix) -> Rref {
    let field = m.field();
    // Dense-ish row representation for elimination; matrices here are small.
    let mut rows: Vec<SparseVec> = vec![SparseVec::new(); m.rows];
    for (r, c, v) in m.entries() {
        rows[r].set(c, v.clone());
    }
    let mut transform: Vec<SparseVec> = (0..m.rows).map(|r| SparseVec::unit(r, field)).collect();
    let mut pivots = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..m.cols {
        if pivot_row >= m.rows {
            break;
        }
        let found = (pivot_row..m.rows).find(|r| rows[*r].get(col).is_some());
        let Some(r0) = found else { continue };
        rows.swap(pivot_row, r0);
        transform.swap(pivot_row, r0);
        let inv = rows[pivot_row].get(col).unwrap().inv().unwrap();
        rows[pivot_row] = rows[pivot_row].scaled(&inv);
        transform[pivot_row] = transform[pivot_row].scaled(&inv);
        for r in 0..m.rows {
            if r == pivot_row {
                continue;
            }
            if let Some(c) = rows[r].get(col).cloned() {
                let neg = c.neg();
                let (pr, tr) = (rows[pivot_row].clone(), transform[pivot_row].clone());
                rows[r].add_scaled(&pr, &neg);
                transform[r].add_scaled(&tr, &neg);
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    let mut reduced = SparseMatrix::zero(m.rows, m.cols, field);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter() {
            reduced.set(r, c, v.clone());
        }
    }
    let mut t = SparseMatrix::zero(m.rows, m.rows, field);
    for (r, row) in transform.iter().enumerate() {
        for (c, v) in row.iter() {
            t.set(r, c, v.clone());
        }
    }
    Rref { reduced, pivots, transform: t }
}

/// Basis of the kernel, as columns. Free columns are taken in increasing
/// order and the free coordinate is set to 1, so the output is canonical.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let r = rref(m);
    let mut basis = Vec::new();
    let pivot_set: BTreeMap<usize, usize> =
        r.pivots.iter().enumerate().map(|(row, col)| (*col, row)).collect();
    for free in 0..m.cols {
        if pivot_set.contains_key(&free) {
            continue;
        }
        let mut v = SparseVec::new();
        v.set(free, m.field().one());
        for (col, row) in &pivot_set {
            let coeff = r.reduced.get(*row, free);
            if !coeff.is_zero() {
                v.set(*col, coeff.neg());
            }
        }
        basis.push(v);
    }
    basis
}

/// Rank via elimination.
pub fn rank(m: &SparseMatrix) -> usize {
    rref(m).pivots.len()
}

/// Column indices of `m` whose columns form a basis of the column space
/// (the pivot columns of the row-reduced form).
pub fn column_basis_indices(m: &SparseMatrix) -> Vec<usize> {
    rref(m).pivots
}

/// Incremental column span with exact membership tests, used wherever a
/// deterministic "extend this family to a basis" step is needed.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    field: Field,
    dim: usize,
    // Echelonised vectors, keyed by their leading index.
    echelon: BTreeMap<usize, SparseVec>,
    members: Vec<SparseVec>,
}

impl SpanBuilder {
    pub fn new(dim: usize, field: Field) -> Self {
        SpanBuilder { field, dim, echelon: BTreeMap::new(), members: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.echelon.len()
    }

    pub fn members(&self) -> &[SparseVec] {
        &self.members
    }

    /// Reduces `v` against the echelonised span. The result has no support on
    /// pivot leads, equals `v` modulo the span, and is the canonical normal
    /// form of `v` (it depends only on `v` and the span).
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        loop {
            let hit = v
                .iter()
                .find(|(i, _)| self.echelon.contains_key(i))
                .map(|(i, c)| (i, c.clone()));
            match hit {
                Some((i, c)) => {
                    let e = self.echelon.get(&i).unwrap().clone();
                    v.add_scaled(&e, &c.neg());
                }
                None => return v,
            }
        }
    }

    /// Is `coord` the leading index of an echelon vector?
    pub fn has_lead(&self, coord: usize) -> bool {
        self.echelon.contains_key(&coord)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns true when it enlarged the span (and was
    /// recorded as a member).
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let red = self.reduce(v);
        let Some((lead, coeff)) = red.iter().next().map(|(i, s)| (i, s.clone())) else {
            return false;
        };
        debug_assert!(lead < self.dim);
        let normalized = red.scaled(&coeff.inv().unwrap());
        self.echelon.insert(lead, normalized);
        self.members.push(v.clone());
        true
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// Solves `m * x = b` exactly. Returns a deterministic solution (free
/// coordinates zero) or `None` when the system is inconsistent.
pub fn solve(m: &SparseMatrix, b: &SparseVec) -> Option<SparseVec> {
    let r = rref(m);
    let tb = r.transform.apply(b);
    // Inconsistent iff tb has support on non-pivot rows.
    let nrows = r.pivots.len();
    for (i, _) in tb.iter() {
        if i >= nrows {
            return None;
        }
    }
    let mut x = SparseVec::new();
    for (row, col) in r.pivots.iter().enumerate() {
        if let Some(v) = tb.get(row) {
            x.set(*col, v.clone());
        }
    }
    Some(x)
}

/// Solves `m * X = B` columnwise; `None` if any column is inconsistent.
pub fn solve_matrix(m: &SparseMatrix, b: &SparseMatrix) -> Option<SparseMatrix> {
    assert_eq!(m.rows, b.rows);
    let r = rref(m);
    let tb = r.transform.mul(b);
    let nrows = r.pivots.len();
    for (row, _, _) in tb.entries() {
        if row >= nrows {
            return None;
        }
    }
    let mut x = SparseMatrix::zero(m.cols, b.cols, m.field());
    for (row, col) in r.pivots.iter().enumerate() {
        for c in 0..b.cols {
            let v = tb.get(row, c);
            if !v.is_zero() {
                x.set(*col, c, v);
            }
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qmat(rows: usize, cols: usize, data: &[(usize, usize, i64)]) -> SparseMatrix {
        let f = Field::Rational;
        SparseMatrix::from_entries(
            rows,
            cols,
            f,
            data.iter().map(|(r, c, v)| (*r, *c, f.from_i64(*v))),
        )
        .unwrap()
    }

    #[test]
    fn rref_zero_matrix() {
        let m = qmat(1, 1, &[]);
        let r = rref(&m);
        assert!(r.reduced.is_zero());
        assert!(r.pivots.is_empty());
        assert_eq!(r.transform, SparseMatrix::identity(1, Field::Rational));
    }

    #[test]
    fn rref_scalar_normalization() {
        let m = qmat(1, 1, &[(0, 0, 2)]);
        let r = rref(&m);
        assert!(r.reduced.get(0, 0).is_one());
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.transform.get(0, 0), Field::Rational.parse("1/2").unwrap());
        assert_eq!(r.transform.mul(&m), r.reduced);
    }

    #[test]
    fn rref_rank_one() {
        let m = qmat(2, 2, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]);
        let r = rref(&m);
        assert_eq!(r.pivots, vec![0]);
        assert!(r.reduced.get(0, 0).is_one());
        assert!(r.reduced.get(0, 1).is_one());
        assert!(r.reduced.get(1, 0).is_zero());
        assert!(r.reduced.get(1, 1).is_zero());
        assert_eq!(r.transform.mul(&m), r.reduced);
    }

    #[test]
    fn kernel_of_injective_map_is_empty() {
        let m = SparseMatrix::identity(2, Field::Rational);
        assert!(kernel_basis(&m).is_empty());
    }

    #[test]
    fn kernel_of_zero_map_is_standard_basis() {
        let m = qmat(1, 3, &[]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 3);
        for (i, v) in k.iter().enumerate() {
            assert_eq!(v, &SparseVec::unit(i, Field::Rational));
        }
    }

    #[test]
    fn kernel_of_sum_map() {
        let m = qmat(1, 2, &[(0, 0, 1), (0, 1, 1)]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        let f = Field::Rational;
        assert_eq!(k[0].get(0), Some(&f.from_i64(-1)));
        assert_eq!(k[0].get(1), Some(&f.from_i64(1)));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = qmat(2, 2, &[(0, 0, 1), (1, 0, 1)]);
        let mut b = SparseVec::new();
        b.set(0, Field::Rational.one());
        b.set(1, Field::Rational.one());
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.apply(&x), b);
        let mut bad = SparseVec::new();
        bad.set(0, Field::Rational.one());
        assert!(solve(&m, &bad).is_none());
    }

    #[test]
    fn determinism_of_kernel_and_rref() {
        let m = qmat(3, 4, &[(0, 1, 2), (1, 1, 4), (1, 3, 1), (2, 0, 5), (2, 3, 3)]);
        let a = rref(&m);
        let b = rref(&m);
        assert_eq!(a.reduced, b.reduced);
        assert_eq!(a.pivots, b.pivots);
        assert_eq!(a.transform, b.transform);
        assert_eq!(kernel_basis(&m), kernel_basis(&m));
    }
}
