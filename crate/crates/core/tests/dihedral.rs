use hicyclo_core::dihedral::{dim_D, relation_matrix, symmetry_rows, DihedralCoalgebra, GenSpace, Options};
use hicyclo_core::qlinalg::rank;

#[test]
fn relation_columns_follow_generator_space() {
    for (n, w, m) in [(1, 5, 2), (3, 4, 2), (4, 3, 3), (6, 2, 1)] {
        let r = relation_matrix(n, w, m, Options::default()).unwrap();
        assert_eq!(r.n_cols(), GenSpace::new(n, w, m).len());
        assert!(r.entries().all(|(_, j, _)| j < r.n_cols()));
    }
}

#[test]
fn symmetry_relations_are_implied() {
    for n in 1..=5 {
        for w in 2..=6 {
            for m in 2..=3.min(w as usize) {
                let base = relation_matrix(n, w, m, Options::default()).unwrap();
                let r0 = rank(&base).unwrap();
                let mut with = base.clone();
                with.vstack(&symmetry_rows(n, w, m).unwrap());
                assert_eq!(rank(&with).unwrap(), r0, "N={n} w={w} m={m}");
            }
        }
    }
}

#[test]
fn co_jacobi() {
    for (n, w) in [(1, 9), (1, 11), (2, 6), (3, 5), (5, 4)] {
        let dc = DihedralCoalgebra::new(n, Options::default()).unwrap();
        let cx = dc.cochain_complex(w, 3).unwrap();
        assert!(cx.d_squared_zero, "N={n} w={w}");
        for b in dc.basis(w, 3).unwrap() {
            let mut dd = hicyclo_core::FormalSum::<Vec<_>>::new();
            for ((y, z), c) in dc.delta_basis(b).unwrap().iter() {
                dd.add_scaled(&dc.wedge_differential(&[*y, *z]).unwrap(), c);
            }
            assert!(dd.is_zero(), "N={n} w={w} {b}");
        }
    }
}

#[test]
fn cobracket_kills_relations() {
    for (n, w, m) in [(1, 8, 2), (2, 5, 2), (3, 4, 2), (1, 7, 3), (4, 3, 2), (5, 3, 3)] {
        let dc = DihedralCoalgebra::new(n, Options::default()).unwrap();
        for img in dc.relation_images(w, m).unwrap() {
            assert!(img.is_zero(), "N={n} w={w} m={m}");
        }
    }
}

#[test]
fn parity_at_level_one() {
    for w in (3..=15).step_by(2) {
        assert_eq!(dim_D(1, w, 2, Options::default()).unwrap(), 0, "w={w}");
    }
    for w in (4..=12).step_by(2) {
        assert_eq!(dim_D(1, w, 3, Options::default()).unwrap(), 0, "w={w}");
    }
}

#[test]
fn options_change_only_expected_bidegrees() {
    let plain = DihedralCoalgebra::new(4, Options::default()).unwrap();
    let hat = DihedralCoalgebra::new(4, Options::hat()).unwrap();
    assert_eq!(hat.dim(1, 1).unwrap(), plain.dim(1, 1).unwrap() + 1);
    assert_eq!(hat.dim(3, 2).unwrap(), plain.dim(3, 2).unwrap());
    let no_dist = Options {
        distribution: false,
        ..Options::default()
    };
    assert!(dim_D(4, 2, 1, no_dist).unwrap() >= plain.dim(2, 1).unwrap());
}
