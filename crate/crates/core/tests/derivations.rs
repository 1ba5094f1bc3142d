use hicyclo_core::combinatorics::{CyclicWord, Letter};
use hicyclo_core::derivations::{
    cyclic_words, kappa_equivariance_check, kappa_special_check, morphism_check, relabel_cyclic, xi_rank, Derivation,
};
use hicyclo_core::dihedral::{DihedralCoalgebra, Options};
use proptest::prelude::*;

#[test]
fn kappa_is_special_and_equivariant() {
    for n in 1..=3 {
        assert!(kappa_special_check(n, 5), "N={n}");
        assert!(kappa_equivariance_check(n, 4), "N={n}");
    }
}

#[test]
fn bracket_morphism_small_levels() {
    // at N = 1 the first pair, (3, 5), has weight 8
    for (n, w) in [(1, 8), (2, 6)] {
        let dc = DihedralCoalgebra::new(n, Options::default()).unwrap();
        let r = morphism_check(&dc, w).unwrap();
        assert!(r.pass(), "N={n}");
        assert!(!r.cases.is_empty());
    }
}

#[test]
fn xi_injective_level_one() {
    let dc = DihedralCoalgebra::new(1, Options::default()).unwrap();
    for w in 1..=6 {
        for m in 1..=3.min(w as usize) {
            let (rank, dim) = xi_rank(&dc, w, m).unwrap();
            assert_eq!(rank, dim, "w={w} m={m}");
        }
    }
}

#[test]
fn word_count() {
    // necklaces of length 3 over 3 letters
    assert_eq!(cyclic_words(2, 3).len(), 11);
}

proptest! {
    #[test]
    fn kappa_bracket_is_antisymmetric(a in prop::collection::vec(0u32..3, 2..5), b in prop::collection::vec(0u32..3, 2..5)) {
        let word = |v: &[u32]| CyclicWord::new(v.iter().map(|&i| if i == 2 { Letter::Y } else { Letter::X(i) }).collect());
        let (a, b) = (word(&a), word(&b));
        let ka = Derivation::kappa(&a, 2);
        let kb = Derivation::kappa(&b, 2);
        let sum = ka.bracket(&kb).add(&kb.bracket(&ka));
        prop_assert!(sum.is_zero());
        prop_assert!(ka.conjugate(1).same_action(&Derivation::kappa(&relabel_cyclic(&a, 1, 2), 2)));
    }
}
