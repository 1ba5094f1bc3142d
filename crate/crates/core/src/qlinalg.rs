//! Exact sparse linear algebra over the rationals.
//!
//! Every dimension in this crate is `generators - rank(relations)`, so the
//! elimination here is exact end to end. Rows are cleared of denominators and
//! reduced fraction-free over the integers (each update is followed by a
//! content division, which keeps entries small for the sparse, small-entry
//! relation systems we build). Reduced echelon forms, kernels and quotient
//! projections are then recovered rationally from the integer echelon rows.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

/// Default ceiling on `rows * cols` for any matrix handed to elimination.
pub const DEFAULT_MAX_CELLS: u128 = 400_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix of {rows}x{cols} exceeds the configured limit of {limit} cells")]
    DimensionOverflow { rows: usize, cols: usize, limit: u128 },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("malformed matrix JSON: {0}")]
    Parse(String),
}

/// Ceiling on matrix cells, overridable with `HICYCLO_MAX_CELLS`.
pub fn max_cells() -> u128 {
    static LIMIT: OnceLock<u128> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("HICYCLO_MAX_CELLS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_CELLS)
    })
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q` in lowest terms (`q` is always printed).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let s = s.trim();
    let bad = || LinalgError::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// A sparse row: strictly increasing column indices, no explicit zeros.
pub type SparseRow = Vec<(usize, Rational)>;

/// Sparse rational matrix stored row-major with sorted, zero-free rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrixQ {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<SparseRow>,
}

impl SparseMatrixQ {
    pub fn new(n_cols: usize) -> Self {
        SparseMatrixQ {
            n_rows: 0,
            n_cols,
            rows: Vec::new(),
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrixQ {
            n_rows,
            n_cols,
            rows: vec![Vec::new(); n_rows],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n_rows];
        for (i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(LinalgError::IndexOutOfRange {
                    row: i,
                    col: j,
                    rows: n_rows,
                    cols: n_cols,
                });
            }
            *acc[i].entry(j).or_insert_with(Rational::zero) += v;
        }
        let rows = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Ok(SparseMatrixQ { n_rows, n_cols, rows })
    }

    pub fn from_dense(dense: &[Vec<Rational>]) -> Self {
        let n_cols = dense.first().map_or(0, Vec::len);
        let mut m = SparseMatrixQ::new(n_cols);
        for row in dense {
            assert_eq!(row.len(), n_cols, "ragged dense matrix");
            m.push_row(
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect(),
            );
        }
        m
    }

    /// Appends a row given as unsorted `(col, value)` pairs; duplicates are summed.
    pub fn push_row(&mut self, entries: Vec<(usize, Rational)>) {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, v) in entries {
            assert!(j < self.n_cols, "column {j} out of range {}", self.n_cols);
            *acc.entry(j).or_insert_with(Rational::zero) += v;
        }
        self.rows.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        self.n_rows += 1;
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.rows[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Entries in canonical row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.n_cols]; self.n_rows];
        for (i, j, v) in self.entries() {
            d[i][j] = v.clone();
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrixQ {
        let mut cols: Vec<SparseRow> = vec![Vec::new(); self.n_cols];
        for (i, j, v) in self.entries() {
            cols[j].push((i, v.clone()));
        }
        SparseMatrixQ {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            rows: cols,
        }
    }

    /// Dense matrix-vector product.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.n_cols);
        self.rows
            .iter()
            .map(|r| r.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &v[*j]))
            .collect()
    }

    /// Product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrixQ) -> SparseMatrixQ {
        assert_eq!(self.n_cols, rhs.n_rows, "shape mismatch in product");
        let mut out = SparseMatrixQ::new(rhs.n_cols);
        for r in &self.rows {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in r {
                for (j, b) in &rhs.rows[*k] {
                    *acc.entry(*j).or_insert_with(Rational::zero) += a * b;
                }
            }
            out.rows.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            out.n_rows += 1;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// Stacks the rows of `other` under `self`.
    pub fn vstack(&mut self, other: &SparseMatrixQ) {
        assert_eq!(self.n_cols, other.n_cols);
        self.rows.extend(other.rows.iter().cloned());
        self.n_rows += other.n_rows;
    }

    fn check_size(&self) -> Result<(), LinalgError> {
        let cells = self.n_rows as u128 * self.n_cols as u128;
        let limit = max_cells();
        if cells > limit {
            return Err(LinalgError::DimensionOverflow {
                rows: self.n_rows,
                cols: self.n_cols,
                limit,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.n_rows,
            cols: self.n_cols,
            entries: self.entries().map(|(i, j, v)| (i, j, format_rational(v))).collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self, LinalgError> {
        let triplets = json
            .entries
            .iter()
            .map(|(i, j, s)| parse_rational(s).map(|v| (*i, *j, v)))
            .collect::<Result<Vec<_>, _>>()?;
        SparseMatrixQ::from_triplets(json.rows, json.cols, triplets)
    }
}

/// Matrix exchange format: `{"rows": R, "cols": C, "entries": [[i, j, "p/q"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl fmt::Display for SparseMatrixQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// Clears denominators and divides out the content; leading entry made positive.
fn integer_row(row: &SparseRow) -> IntRow {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut out: IntRow = row.iter().map(|(j, v)| (*j, v.numer() * (&lcm / v.denom()))).collect();
    normalize(&mut out);
    out
}

fn normalize(row: &mut IntRow) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if g.is_zero() {
        return;
    }
    let flip = row[0].1.is_negative();
    for (_, v) in row.iter_mut() {
        *v /= &g;
        if flip {
            *v = -&*v;
        }
    }
}

/// `a * row - b * pivot`, then primitive. Both rows share their leading column.
fn eliminate(row: &IntRow, pivot: &IntRow) -> IntRow {
    let a = &pivot[0].1;
    let b = &row[0].1;
    let g = a.gcd(b);
    let (a, b) = (a / &g, b / &g);
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut k) = (1, 1);
    while i < row.len() || k < pivot.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let ck = pivot.get(k).map_or(usize::MAX, |e| e.0);
        let (col, v) = if ci < ck {
            i += 1;
            (ci, &a * &row[i - 1].1)
        } else if ck < ci {
            k += 1;
            (ck, -(&b * &pivot[k - 1].1))
        } else {
            i += 1;
            k += 1;
            (ci, &a * &row[i - 1].1 - &b * &pivot[k - 1].1)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    normalize(&mut out);
    out
}

/// Fraction-free sparse forward elimination.
///
/// Columns are processed in increasing order. Among the rows whose leading
/// entry sits in the current column, the sparsest becomes the pivot (ties go
/// to the lowest original row), and the others are reduced against it.
/// Returns the primitive integer echelon rows sorted by leading column.
fn integer_echelon(m: &SparseMatrixQ) -> Vec<IntRow> {
    let mut buckets: BTreeMap<usize, Vec<(usize, IntRow)>> = BTreeMap::new();
    for (idx, row) in m.rows.iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        let r = integer_row(row);
        buckets.entry(r[0].0).or_default().push((idx, r));
    }
    let mut pivots = Vec::new();
    while let Some((_, mut cands)) = buckets.pop_first() {
        let best = cands
            .iter()
            .enumerate()
            .min_by_key(|(_, (idx, r))| (r.len(), *idx))
            .map(|(k, _)| k)
            .expect("bucket is never empty");
        let (pidx, pivot) = cands.swap_remove(best);
        for (idx, r) in cands {
            let reduced = eliminate(&r, &pivot);
            if let Some(&(lead, _)) = reduced.first() {
                buckets.entry(lead).or_default().push((idx.max(pidx), reduced));
            }
        }
        pivots.push(pivot);
    }
    pivots
}

/// Reduced row echelon form of the row space.
#[derive(Clone, Debug)]
pub struct Rref {
    pub n_cols: usize,
    /// Pivot column of each row, increasing.
    pub pivots: Vec<usize>,
    /// Rows with a leading 1 at their pivot and zeros in every other pivot column.
    pub rows: Vec<SparseRow>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.n_cols).filter(|&j| !is_pivot[j]).collect()
    }

    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![Rational::zero(); self.n_cols];
                v[f] = Rational::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if let Ok(k) = row.binary_search_by_key(&f, |e| e.0) {
                        v[p] = -row[k].1.clone();
                    }
                }
                v
            })
            .collect()
    }
}

pub fn rank(m: &SparseMatrixQ) -> Result<usize, LinalgError> {
    m.check_size()?;
    Ok(integer_echelon(m).len())
}

pub fn rref(m: &SparseMatrixQ) -> Result<Rref, LinalgError> {
    m.check_size()?;
    let echelon = integer_echelon(m);
    let mut rows: Vec<SparseRow> = echelon
        .iter()
        .map(|r| {
            let lead = Rational::from_integer(r[0].1.clone());
            r.iter()
                .map(|(j, v)| (*j, Rational::from_integer(v.clone()) / &lead))
                .collect()
        })
        .collect();
    let pivots: Vec<usize> = rows.iter().map(|r| r[0].0).collect();
    // back substitution, last pivot first
    for k in (0..rows.len()).rev() {
        let (upper, lower) = rows.split_at_mut(k);
        let prow = &lower[0];
        let pcol = pivots[k];
        for row in upper.iter_mut() {
            let Ok(pos) = row.binary_search_by_key(&pcol, |e| e.0) else {
                continue;
            };
            let factor = row[pos].1.clone();
            *row = axpy(row, prow, &factor);
        }
    }
    Ok(Rref {
        n_cols: m.n_cols,
        pivots,
        rows,
    })
}

/// `row - factor * other` on sorted sparse rows.
pub fn axpy(row: &SparseRow, other: &SparseRow, factor: &Rational) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut k) = (0, 0);
    while i < row.len() || k < other.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let ck = other.get(k).map_or(usize::MAX, |e| e.0);
        let (col, v) = if ci < ck {
            i += 1;
            (ci, row[i - 1].1.clone())
        } else if ck < ci {
            k += 1;
            (ck, -(factor * &other[k - 1].1))
        } else {
            i += 1;
            k += 1;
            (ci, &row[i - 1].1 - factor * &other[k - 1].1)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct RankKernel {
    pub rank: usize,
    pub kernel_basis: Vec<Vec<Rational>>,
    pub pivot_columns: Vec<usize>,
}

/// Rank, a kernel basis, and the pivot columns of `m`.
///
/// Pivot columns index a basis of the column space: they are the leading
/// columns of the reduced echelon form, i.e. the lexicographically first
/// maximal independent set of columns.
pub fn rank_and_kernel(m: &SparseMatrixQ) -> Result<RankKernel, LinalgError> {
    let r = rref(m)?;
    Ok(RankKernel {
        rank: r.rank(),
        kernel_basis: r.kernel_basis(),
        pivot_columns: r.pivots.clone(),
    })
}

/// `n_cols - rank`.
pub fn quotient_dim(m: &SparseMatrixQ) -> Result<usize, LinalgError> {
    Ok(m.n_cols() - rank(m)?)
}

/// The quotient of `Q^n` by the row space of a relation matrix.
///
/// The basis of the quotient is the set of free (non-pivot) columns; a pivot
/// column is rewritten through its reduced row.
#[derive(Clone, Debug)]
pub struct Quotient {
    n: usize,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    pivot_row: Vec<Option<usize>>,
    rref: Rref,
}

impl Quotient {
    pub fn new(relations: &SparseMatrixQ) -> Result<Self, LinalgError> {
        let rref = rref(relations)?;
        let n = relations.n_cols();
        let basis = rref.free_columns();
        let mut position = vec![None; n];
        for (k, &j) in basis.iter().enumerate() {
            position[j] = Some(k);
        }
        let mut pivot_row = vec![None; n];
        for (k, &p) in rref.pivots.iter().enumerate() {
            pivot_row[p] = Some(k);
        }
        Ok(Quotient {
            n,
            basis,
            position,
            pivot_row,
            rref,
        })
    }

    /// The quotient of `Q^n` by nothing.
    pub fn identity(n: usize) -> Self {
        Quotient::new(&SparseMatrixQ::new(n)).expect("empty matrix is in range")
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Ambient column representing each quotient basis vector.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn rref(&self) -> &Rref {
        &self.rref
    }

    /// Quotient coordinates of the ambient unit vector `e_j`.
    pub fn project(&self, j: usize) -> SparseRow {
        if let Some(k) = self.position[j] {
            return vec![(k, Rational::one())];
        }
        let row = &self.rref.rows[self.pivot_row[j].expect("column is a pivot")];
        row.iter()
            .filter(|(c, _)| *c != j)
            .map(|(c, v)| (self.position[*c].expect("non-pivot entry"), -v.clone()))
            .collect()
    }

    /// Quotient coordinates of a sparse ambient vector.
    pub fn project_sparse(&self, v: &[(usize, Rational)]) -> SparseRow {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, c) in v {
            for (k, a) in self.project(*j) {
                *acc.entry(k).or_insert_with(Rational::zero) += a * c;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Whether a sparse ambient vector lies in the relation subspace.
    pub fn is_relation(&self, v: &[(usize, Rational)]) -> bool {
        self.project_sparse(v).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SparseMatrixQ {
        SparseMatrixQ::from_dense(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn identity_has_full_rank() {
        let rk = rank_and_kernel(&m(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(rk.rank, 2);
        assert!(rk.kernel_basis.is_empty());
        assert_eq!(rk.pivot_columns, vec![0, 1]);
    }

    #[test]
    fn proportional_rows() {
        let rk = rank_and_kernel(&m(&[&[1, 2], &[2, 4]])).unwrap();
        assert_eq!(rk.rank, 1);
        assert_eq!(rk.kernel_basis, vec![vec![rat_int(-2), rat_int(1)]]);
    }

    #[test]
    fn rref_is_reduced() {
        let a = m(&[&[2, 4, 1, 3], &[1, 2, 0, 1], &[3, 6, 1, 4]]);
        let r = rref(&a).unwrap();
        assert_eq!(r.pivots, vec![0, 2]);
        assert_eq!(r.rows[0], vec![(0, rat_int(1)), (1, rat_int(2)), (3, rat_int(1))]);
        assert_eq!(r.rows[1], vec![(2, rat_int(1)), (3, rat_int(1))]);
    }

    #[test]
    fn rational_entries_and_kernel() {
        let a = SparseMatrixQ::from_triplets(
            2,
            3,
            vec![
                (0, 0, rat(1, 2)),
                (0, 1, rat(1, 3)),
                (1, 1, rat(2, 7)),
                (1, 2, rat(-1, 5)),
            ],
        )
        .unwrap();
        let rk = rank_and_kernel(&a).unwrap();
        assert_eq!(rk.rank, 2);
        for k in &rk.kernel_basis {
            assert!(a.mul_vec(k).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn quotient_projection() {
        // e0 + e1 = 0 and e2 = 3 e3
        let a = m(&[&[1, 1, 0, 0], &[0, 0, 1, -3]]);
        let q = Quotient::new(&a).unwrap();
        assert_eq!(q.basis(), &[1, 3]);
        assert_eq!(q.project(0), vec![(0, rat_int(-1))]);
        assert_eq!(q.project(2), vec![(1, rat_int(3))]);
        assert!(q.is_relation(&[(0, rat_int(2)), (1, rat_int(2))]));
    }

    #[test]
    fn overflow_is_reported() {
        let big = SparseMatrixQ::zeros(1, 1);
        assert!(rank(&big).is_ok());
        let huge = SparseMatrixQ {
            n_rows: 1 << 20,
            n_cols: 1 << 20,
            rows: Vec::new(),
        };
        assert!(matches!(rank(&huge), Err(LinalgError::DimensionOverflow { .. })));
    }

    #[test]
    fn json_exchange() {
        let a = SparseMatrixQ::from_triplets(2, 2, vec![(1, 0, rat(-3, 6)), (0, 1, rat_int(2))]).unwrap();
        let j = a.to_json();
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"rows":2,"cols":2,"entries":[[0,1,"2/1"],[1,0,"-1/2"]]}"#
        );
        assert_eq!(SparseMatrixQ::from_json(&j).unwrap(), a);
        assert!(parse_rational("1/0").is_err());
    }
}
