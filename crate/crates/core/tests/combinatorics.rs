use std::collections::BTreeSet;

use hicyclo_core::combinatorics::{
    binom, composition_count, compositions, cyclic_canonicalize, plane_trivalent_trees, shuffles, CyclicWord,
};
use proptest::prelude::*;

/// Triangulations of the polygon `0..n` as sets of diagonals, by the triangle on the side `(0, n-1)`.
fn triangulations(vs: &[usize]) -> Vec<BTreeSet<(usize, usize)>> {
    if vs.len() < 3 {
        return vec![BTreeSet::new()];
    }
    let (a, b) = (vs[0], vs[vs.len() - 1]);
    let mut out = Vec::new();
    for k in 1..vs.len() - 1 {
        for left in triangulations(&vs[..=k]) {
            for right in triangulations(&vs[k..]) {
                let mut t: BTreeSet<_> = left.union(&right).copied().collect();
                if k > 1 {
                    t.insert((a, vs[k]));
                }
                if k < vs.len() - 2 {
                    t.insert((vs[k], b));
                }
                out.push(t);
            }
        }
    }
    out
}

#[test]
fn trees_match_triangulations() {
    for n in 3..=8 {
        let polygon: Vec<usize> = (0..n).collect();
        let expected: BTreeSet<_> = triangulations(&polygon).into_iter().collect();
        let trees = plane_trivalent_trees(n);
        let got: BTreeSet<BTreeSet<(usize, usize)>> =
            trees.iter().map(|t| t.diagonals().into_iter().collect()).collect();
        assert_eq!(trees.len(), got.len(), "n={n}");
        assert_eq!(got, expected, "n={n}");
    }
}

#[test]
fn shuffle_counts_up_to_eight() {
    for p in 0..=8 {
        for q in 0..=8 - p {
            let s = shuffles(p, q);
            assert_eq!(s.len() as u64, binom((p + q) as u64, p as u64));
            assert!(s.iter().all(|x| x.is_valid()));
            assert_eq!(s.iter().map(|x| &x.word).collect::<BTreeSet<_>>().len(), s.len());
        }
    }
}

#[test]
fn composition_counts() {
    for w in 1..=10 {
        for m in 1..=w as usize {
            assert_eq!(compositions(w, m).len(), composition_count(w, m));
        }
    }
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent(letters in prop::collection::vec(0u8..3, 1..9)) {
        let w = CyclicWord::new(letters);
        let (c, aut) = cyclic_canonicalize(&w);
        let (cc, aut2) = cyclic_canonicalize(&c);
        prop_assert_eq!(&cc, &c);
        prop_assert_eq!(aut, aut2);
        prop_assert_eq!(w.letters.len() % aut, 0);
    }

    #[test]
    fn canonical_form_is_rotation_invariant(letters in prop::collection::vec(0u8..3, 1..9), k in 0usize..16) {
        let w = CyclicWord::new(letters);
        prop_assert_eq!(cyclic_canonicalize(&w), cyclic_canonicalize(&w.rotate(k)));
    }
}
