//! Relation rows of `D_{w,m}(μ_N)`: double shuffle, distribution, `I_1(e:e) = 0`
//! and, optionally, dihedral symmetry.

use num_bigint::BigInt;
use rayon::prelude::*;

use super::series::{accumulate, SeriesAcc};
use super::{check_range, DihedralError, GenSpace, Options};
use crate::combinatorics::shuffles;
use crate::qlinalg::{Rational, SparseMatrixQ};

type IntRow = Vec<(usize, i128)>;

fn flush(acc: SeriesAcc, rows: &mut Vec<IntRow>) {
    for (_, row) in acc {
        let row: IntRow = row.into_iter().filter(|(_, c)| *c != 0).collect();
        if !row.is_empty() {
            rows.push(row);
        }
    }
}

fn unit(j: usize, r: usize) -> Vec<i64> {
    let mut v = vec![0; r];
    v[j] = 1;
    v
}

/// All slot tuples `(g_1..g_m)` in `(Z/N)^m`, lexicographic.
fn slot_tuples(level: u32, m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..level).map(move |g| {
                    let mut t = t.clone();
                    t.push(g);
                    t
                })
            })
            .collect();
    }
    out
}

/// Both double shuffle families for one slot tuple (last slot `e`).
fn shuffle_rows(space: &GenSpace, gs: &[u32]) -> Vec<IntRow> {
    let m = space.depth;
    let n = space.level;
    let mut rows = Vec::new();
    for p in 1..m {
        let sh = shuffles(p, m - p);
        let mut stuffle = SeriesAcc::new();
        let mut shuffle = SeriesAcc::new();
        for s in &sh {
            // {g_s1 : ... : g_sm : e | t_s1, ..., t_sm, t_{m+1}}
            let mut slots: Vec<u32> = s.word.iter().map(|&j| gs[j]).collect();
            slots.push(0);
            let mut forms = Vec::with_capacity(m + 1);
            let mut cur = vec![0i64; m];
            for &j in &s.word {
                cur[j] += 1;
                forms.push(cur.clone());
            }
            forms.push(vec![0; m]);
            accumulate(&mut stuffle, space, &slots, &forms, 1);

            // {g_s1, ..., g_sm, g_{m+1} | t_s1 : ... : t_sm : t_{m+1}}
            let mut slots = vec![0u32];
            let mut c = 0u32;
            for &j in &s.word {
                c = (c + gs[j]) % n;
                slots.push(c);
            }
            let mut forms: Vec<Vec<i64>> = s.word.iter().map(|&j| unit(j, m)).collect();
            forms.push(vec![-1; m]);
            accumulate(&mut shuffle, space, &slots, &forms, 1);
        }
        flush(stuffle, &mut rows);
        flush(shuffle, &mut rows);
    }
    rows
}

/// Distribution relations for every divisor `l > 1` of `N`, at one tuple of `l`-th powers.
fn distribution_rows(space: &GenSpace, l: u32, xs: &[u32]) -> Vec<IntRow> {
    let m = space.depth;
    let n = space.level;
    if m == 1 && space.weight == 1 && xs[0] == 0 {
        // I_1(e:e) = Σ_{y^l = e} I_1(y:e) is not imposed
        return Vec::new();
    }
    let mut acc = SeriesAcc::new();
    let mut forms: Vec<Vec<i64>> = (0..m).map(|j| unit(j, m)).collect();
    forms.push(vec![0; m]);
    let mut slots = xs.to_vec();
    slots.push(0);
    accumulate(&mut acc, space, &slots, &forms, 1);
    let scaled: Vec<Vec<i64>> = forms
        .iter()
        .map(|f| f.iter().map(|c| c * i64::from(l)).collect())
        .collect();
    // y_{m+1} = e; the other l - 1 roots give homogeneity translates, cancelling 1/|G_l|
    let roots: Vec<Vec<u32>> = xs
        .iter()
        .map(|&x| (0..n).filter(|y| (l * y) % n == x).collect())
        .collect();
    let mut idx = vec![0usize; m];
    loop {
        let mut ys: Vec<u32> = (0..m).map(|i| roots[i][idx[i]]).collect();
        ys.push(0);
        accumulate(&mut acc, space, &ys, &scaled, -1);
        let mut k = m;
        loop {
            if k == 0 {
                let mut rows = Vec::new();
                flush(acc, &mut rows);
                return rows;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < roots[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Cyclic, reflection and inversion relations at one slot tuple.
fn symmetry_rows_at(space: &GenSpace, gs: &[u32]) -> Vec<IntRow> {
    let m = space.depth;
    let n = space.level;
    let mut slots = gs.to_vec();
    slots.push(0);
    let mut forms: Vec<Vec<i64>> = (0..m).map(|j| unit(j, m)).collect();
    forms.push(vec![-1; m]);
    let neg = |f: &Vec<i64>| f.iter().map(|c| -c).collect::<Vec<i64>>();
    let mut rows = Vec::new();
    for kind in 0..3 {
        let (s2, f2, sign): (Vec<u32>, Vec<Vec<i64>>, i128) = match kind {
            0 => {
                let mut s = slots.clone();
                s.rotate_left(1);
                let mut f = forms.clone();
                f.rotate_left(1);
                (s, f, 1)
            }
            1 => {
                let s: Vec<u32> = slots.iter().rev().copied().collect();
                let mut f: Vec<Vec<i64>> = forms[..m].iter().rev().map(neg).collect();
                f.push(neg(&forms[m]));
                (s, f, if m % 2 == 1 { 1 } else { -1 })
            }
            _ => {
                let s: Vec<u32> = slots.iter().map(|g| (n - g) % n).collect();
                let f: Vec<Vec<i64>> = forms.iter().map(neg).collect();
                (s, f, 1)
            }
        };
        let mut acc = SeriesAcc::new();
        accumulate(&mut acc, space, &slots, &forms, 1);
        accumulate(&mut acc, space, &s2, &f2, -sign);
        flush(acc, &mut rows);
    }
    rows
}

fn to_matrix(cols: usize, rows: Vec<IntRow>) -> SparseMatrixQ {
    let mut mat = SparseMatrixQ::new(cols);
    for r in rows {
        mat.push_row(
            r.into_iter()
                .map(|(j, c)| (j, Rational::from_integer(BigInt::from(c))))
                .collect(),
        );
    }
    mat
}

/// Relation matrix of `D_{w,m}(μ_N)`; columns follow [`GenSpace`] indexing.
pub fn relation_matrix(level: u32, weight: u32, depth: usize, opts: Options) -> Result<SparseMatrixQ, DihedralError> {
    check_range(level, weight, depth)?;
    let space = GenSpace::new(level, weight, depth);
    let tuples = slot_tuples(level, depth);
    let mut rows: Vec<IntRow> = tuples.par_iter().flat_map_iter(|gs| shuffle_rows(&space, gs)).collect();
    if opts.distribution {
        for l in (2..=level).filter(|l| level.is_multiple_of(*l)) {
            let powers: Vec<u32> = {
                let mut p: Vec<u32> = (0..level).map(|a| (l * a) % level).collect();
                p.sort_unstable();
                p.dedup();
                p
            };
            let xs_all: Vec<Vec<u32>> = slot_tuples(level, depth)
                .into_iter()
                .filter(|t| t.iter().all(|x| powers.binary_search(x).is_ok()))
                .collect();
            let dist: Vec<IntRow> = xs_all
                .par_iter()
                .flat_map_iter(|xs| distribution_rows(&space, l, xs))
                .collect();
            rows.extend(dist);
        }
    }
    if !opts.hat && weight == 1 && depth == 1 {
        rows.push(vec![(space.index_of(&[1], &[0, 0]), 1)]);
    }
    if opts.dihedral_m1 && depth == 1 {
        rows.extend(
            tuples
                .par_iter()
                .flat_map_iter(|gs| symmetry_rows_at(&space, gs))
                .collect::<Vec<_>>(),
        );
    }
    Ok(to_matrix(space.len(), rows))
}

/// The cyclic, reflection and inversion relations in any depth.
pub fn symmetry_rows(level: u32, weight: u32, depth: usize) -> Result<SparseMatrixQ, DihedralError> {
    check_range(level, weight, depth)?;
    let space = GenSpace::new(level, weight, depth);
    let rows: Vec<IntRow> = slot_tuples(level, depth)
        .par_iter()
        .flat_map_iter(|gs| symmetry_rows_at(&space, gs))
        .collect();
    Ok(to_matrix(space.len(), rows))
}
