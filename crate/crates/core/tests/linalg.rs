use hicyclo_core::qlinalg::{quotient_dim, rank, rank_and_kernel, rat, rat_int, Quotient};
use hicyclo_core::{Rational, SparseMatrixQ};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn dense(rows: &[Vec<i64>]) -> SparseMatrixQ {
    SparseMatrixQ::from_dense(
        &rows
            .iter()
            .map(|r| r.iter().map(|&x| rat_int(x)).collect())
            .collect::<Vec<_>>(),
    )
}

/// Fraction-free Bareiss elimination over the integers.
fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (n, m) = (a.len(), a.first().map_or(0, Vec::len));
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..n {
            for j in c + 1..m {
                a[i][j] = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == n {
            break;
        }
    }
    r
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7).prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(-3i64..=3, m), n))
}

proptest! {
    #[test]
    fn rank_matches_bareiss(rows in matrix()) {
        prop_assert_eq!(rank(&dense(&rows)).unwrap(), bareiss_rank(&rows));
    }

    #[test]
    fn rank_invariant_under_permutation_and_scaling(
        rows in matrix(),
        perm_seed in any::<u64>(),
        scales in prop::collection::vec((1i64..9, 1i64..9, any::<bool>()), 7),
    ) {
        let base = rank(&dense(&rows)).unwrap();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let mut s = perm_seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let scaled: Vec<Vec<Rational>> = order
            .iter()
            .zip(&scales)
            .map(|(&i, &(p, q, neg))| {
                let f = if neg { -rat(p, q) } else { rat(p, q) };
                rows[i].iter().map(|&x| rat_int(x) * &f).collect()
            })
            .collect();
        prop_assert_eq!(rank(&SparseMatrixQ::from_dense(&scaled)).unwrap(), base);
    }

    #[test]
    fn kernel_vectors_are_annihilated(rows in matrix()) {
        let m = dense(&rows);
        let rk = rank_and_kernel(&m).unwrap();
        prop_assert_eq!(rk.kernel_basis.len() + rk.rank, m.n_cols());
        for k in &rk.kernel_basis {
            prop_assert!(m.mul_vec(k).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn quotient_dimension(rows in matrix()) {
        let m = dense(&rows);
        let q = Quotient::new(&m).unwrap();
        prop_assert_eq!(q.dim(), quotient_dim(&m).unwrap());
        prop_assert_eq!(q.dim() + rank(&m).unwrap(), m.n_cols());
        for row in m.rows() {
            prop_assert!(q.is_relation(row));
        }
    }
}

#[test]
fn hilbert_matrix_is_invertible() {
    let h: Vec<Vec<Rational>> = (0..8).map(|i| (0..8).map(|j| rat(1, i + j + 1)).collect()).collect();
    assert_eq!(rank(&SparseMatrixQ::from_dense(&h)).unwrap(), 8);
}
