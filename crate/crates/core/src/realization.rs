//! Geometric realization of the modular complex: extended bases go to signed
//! sums of Voronoi cells indexed by plane trivalent trees.
//!
//! Cells are symbolic. A cell is the oriented simplex on its vertex vectors,
//! each vector taken up to sign; reordering vertices multiplies by the sign of
//! the permutation and a repeated vertex makes the cell degenerate.

use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{permutation_sign, plane_trivalent_trees, PlaneTree, TreeEdge};
use crate::formal::FormalSum;
use crate::modular::{
    dihedral_relation_rows, modular_boundary, relation_rows_modular, ExtendedBasis, ModularError, ModularGen,
};
use crate::qlinalg::{rank, Rational, SparseMatrixQ};

pub const MAX_RANK: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizationError {
    #[error("zero vector has no Voronoi form")]
    ZeroVector,
    #[error("rank {0} is outside 1..={MAX_RANK}")]
    UnsupportedRank(usize),
    #[error(transparent)]
    Modular(#[from] ModularError),
}

/// A nonzero lattice vector up to sign, stored with its first nonzero coordinate positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(v: &[i64]) -> Result<Self, RealizationError> {
        match v.iter().find(|&&a| a != 0) {
            None => Err(RealizationError::ZeroVector),
            Some(&a) if a < 0 => Ok(LatticeVector(v.iter().map(|x| -x).collect())),
            Some(_) => Ok(LatticeVector(v.to_vec())),
        }
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// `φ(v_1, ..., v_k)` with vertices in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VoronoiCell {
    pub vectors: Vec<LatticeVector>,
}

impl VoronoiCell {
    /// Sorts the vertices; `None` if two coincide.
    pub fn oriented(vectors: Vec<LatticeVector>) -> Option<(VoronoiCell, i32)> {
        let sign = permutation_sign(&vectors);
        let mut sorted = vectors;
        sorted.sort();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return None;
        }
        Some((VoronoiCell { vectors: sorted }, sign))
    }

    pub fn dim(&self) -> usize {
        self.vectors.len() - 1
    }
}

impl fmt::Display for VoronoiCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vectors.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

pub type CellChain = FormalSum<VoronoiCell>;

fn add_oriented(chain: &mut CellChain, vectors: Vec<LatticeVector>, coef: &Rational) {
    if let Some((cell, s)) = VoronoiCell::oriented(vectors) {
        chain.add_term(cell, coef * Rational::from_integer(s.into()));
    }
}

/// Legs `0..=m` carry `v_{m+1}, v_1, ..., v_m`.
fn leg_label(labels: &ExtendedBasis, leg: usize) -> &[i64] {
    let m = labels.rank();
    if leg == 0 {
        &labels.vectors[m]
    } else {
        &labels.vectors[leg - 1]
    }
}

/// `f_E`: the sum of the labels on one side of the edge.
pub fn edge_vector(edge: TreeEdge, labels: &ExtendedBasis) -> Result<LatticeVector, RealizationError> {
    let (lo, hi) = match edge {
        TreeEdge::Leg(i) => (i, i),
        TreeEdge::Internal(lo, hi) => (lo, hi),
    };
    let dim = labels.ambient();
    let sum: Vec<i64> = (0..dim)
        .map(|c| (lo..=hi).map(|l| leg_label(labels, l)[c]).sum())
        .collect();
    LatticeVector::new(&sum)
}

/// Sign of the reference edge order against the orientation coming from the plane.
pub fn tree_sign(t: &PlaneTree) -> i32 {
    let word = t.orientation_word();
    let positions: Vec<usize> = t
        .edges()
        .iter()
        .map(|e| word.iter().position(|w| w == e).expect("edge in orientation word"))
        .collect();
    permutation_sign(&positions)
}

/// `Σ_T sgn(T) φ(f_{E_1}, ..., f_{E_{2m-1}})` over plane trivalent trees on `m + 1` legs.
pub fn psi_top(labels: &ExtendedBasis) -> Result<CellChain, RealizationError> {
    let m = labels.rank();
    if !(1..=MAX_RANK).contains(&m) {
        return Err(RealizationError::UnsupportedRank(m));
    }
    if m == 1 {
        let v = LatticeVector::new(&labels.vectors[0])?;
        return Ok(FormalSum::single(VoronoiCell { vectors: vec![v] }));
    }
    let trees = plane_trivalent_trees(m + 1);
    let cells: Vec<(Vec<LatticeVector>, i32)> = trees
        .par_iter()
        .map(|t| {
            let vs = t
                .edges()
                .into_iter()
                .map(|e| edge_vector(e, labels))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((vs, tree_sign(t)))
        })
        .collect::<Result<_, RealizationError>>()?;
    let mut chain = CellChain::new();
    for (vs, s) in cells {
        add_oriented(&mut chain, vs, &Rational::from_integer(s.into()));
    }
    Ok(chain)
}

/// `φ(a) * φ(b) = φ(a, b)`, extended bilinearly.
pub fn join(a: &CellChain, b: &CellChain) -> CellChain {
    let mut out = CellChain::new();
    for (x, c) in a.iter() {
        for (y, d) in b.iter() {
            let vs: Vec<LatticeVector> = x.vectors.iter().chain(&y.vectors).cloned().collect();
            add_oriented(&mut out, vs, &(c * d));
        }
    }
    out
}

/// Realization of a wedge: the join of the blocks' chains.
pub fn psi(g: &ModularGen) -> Result<CellChain, RealizationError> {
    let mut acc = FormalSum::single(VoronoiCell { vectors: Vec::new() });
    for b in &g.blocks {
        acc = join(&acc, &psi_top(b)?);
    }
    Ok(acc)
}

pub fn relation_image(rel: &FormalSum<ModularGen>) -> Result<CellChain, RealizationError> {
    let mut out = CellChain::new();
    for (g, c) in rel.iter() {
        out.add_scaled(&psi(g)?, c);
    }
    Ok(out)
}

/// Alternating sum of facets in sorted vertex order.
pub fn simplex_boundary(c: &VoronoiCell) -> CellChain {
    let mut out = CellChain::new();
    if c.vectors.len() < 2 {
        return out;
    }
    for i in 0..c.vectors.len() {
        let mut vs = c.vectors.clone();
        vs.remove(i);
        let s = if i % 2 == 0 { 1 } else { -1 };
        out.add_term(VoronoiCell { vectors: vs }, Rational::from_integer(s.into()));
    }
    out
}

pub fn chain_boundary(chain: &CellChain) -> CellChain {
    let mut out = CellChain::new();
    for (c, a) in chain.iter() {
        out.add_scaled(&simplex_boundary(c), a);
    }
    out
}

/// Whether the forms of the cell are positive definite on `Q^dim`, i.e. the vectors span.
pub fn is_interior(c: &VoronoiCell, dim: usize) -> bool {
    let mut mat = SparseMatrixQ::new(dim);
    for v in &c.vectors {
        mat.push_row(
            v.0.iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(i, &a)| (i, Rational::from_integer(a.into())))
                .collect(),
        );
    }
    rank(&mat).map(|r| r == dim).unwrap_or(false)
}

/// The boundary with faces at infinity (non-spanning vertex sets) dropped.
pub fn interior_boundary(chain: &CellChain, dim: usize) -> CellChain {
    chain_boundary(chain)
        .iter()
        .filter(|(c, _)| is_interior(c, dim))
        .map(|(c, a)| (c.clone(), a.clone()))
        .collect()
}

/// Lines `±c | v1; v2; ...` in cell order.
pub fn serialize_chain(chain: &CellChain) -> String {
    let mut out = String::new();
    for (c, a) in chain.iter() {
        let coef = if a.is_integer() {
            let n = a.to_integer();
            if n > BigInt::from(0) {
                format!("+{n}")
            } else {
                n.to_string()
            }
        } else {
            crate::qlinalg::format_rational(a)
        };
        out.push_str(&format!("{coef} | {c}\n"));
    }
    out
}

/// `Some(s)` if `a = s·b` for `s = ±1`.
pub fn equal_up_to_sign(a: &CellChain, b: &CellChain) -> Option<i32> {
    if a == b {
        return Some(1);
    }
    if *a == -b {
        return Some(-1);
    }
    None
}

/// The Voronoi 5-simplex `φ(e_0, e_1, e_2, e_3, f_{01}, f_{12})` with `e_0 = -(e_1 + e_2 + e_3)`.
pub fn rank_three_simplex() -> VoronoiCell {
    let e0 = vec![-1, -1, -1];
    let vs = [
        e0,
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![0, 0, 1],
        vec![0, -1, -1],
        vec![1, 1, 0],
    ];
    let vectors = vs.iter().map(|v| LatticeVector::new(v).expect("nonzero")).collect();
    VoronoiCell::oriented(vectors).expect("distinct vertices").0
}

/// One named check and whether it held.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
}

fn check(name: impl Into<String>, pass: bool) -> CheckResult {
    CheckResult {
        name: name.into(),
        pass,
    }
}

/// Relation cancellations at rank `m`, plus the simplex and join identities at `m = 3`.
pub fn check_suite(m: usize) -> Result<Vec<CheckResult>, RealizationError> {
    if !(2..=4).contains(&m) {
        return Err(RealizationError::UnsupportedRank(m));
    }
    let mut out = Vec::new();
    for (i, rel) in dihedral_relation_rows(m).iter().enumerate() {
        let name = if i == 0 { "cyclic" } else { "reflection" };
        out.push(check(
            format!("m={m} {name} relation vanishes"),
            relation_image(rel)?.is_zero(),
        ));
    }
    let rows = relation_rows_modular(m)?;
    for (i, rel) in rows.iter().enumerate() {
        let k = i / 2 + 1;
        let img = relation_image(rel)?;
        if i % 2 == 0 {
            out.push(check(format!("m={m} first shuffle k={k} vanishes"), img.is_zero()));
        } else if m == 3 {
            let bd = simplex_boundary(&rank_three_simplex());
            out.push(check(
                format!("m=3 second shuffle k={k} is a simplex boundary"),
                equal_up_to_sign(&img, &bd).is_some(),
            ));
        }
    }
    for (name, top) in boundary_samples(m) {
        let lhs = interior_boundary(&psi(&top)?, m);
        let rhs = relation_image(&modular_boundary(&top)?)?;
        out.push(check(
            format!("m={m} {name} commutes with boundary"),
            equal_up_to_sign(&lhs, &rhs).is_some(),
        ));
    }
    if m == 3 {
        let e = |i: usize| ExtendedBasis::block(3, i, 1);
        let pair = ExtendedBasis::completed(vec![vec![0, 1, 0], vec![0, 0, 1]]);
        for (name, a, b) in [("join of ranks 1+1", e(0), e(1)), ("join of ranks 1+2", e(0), pair)] {
            let (pa, pb) = (psi_top(&a)?, psi_top(&b)?);
            let wedge = psi(&ModularGen { blocks: vec![a, b] })?;
            let ok = wedge == join(&pa, &pb) && join(&pb, &pa) == -&wedge;
            out.push(check(name, ok));
        }
    }
    Ok(out)
}

fn boundary_samples(m: usize) -> Vec<(&'static str, ModularGen)> {
    let mut out = vec![("top generator", ModularGen::single(ExtendedBasis::standard(m)))];
    if m == 3 {
        let blocks = vec![ExtendedBasis::block(3, 0, 1), ExtendedBasis::block(3, 1, 2)];
        out.push(("wedge 1+2", ModularGen { blocks }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rat_int;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector::new(v).unwrap()
    }

    #[test]
    fn canonical_sign() {
        assert_eq!(lv(&[0, -1, 2]), lv(&[0, 1, -2]));
        assert_eq!(LatticeVector::new(&[0, 0]), Err(RealizationError::ZeroVector));
    }

    #[test]
    fn rank_two_single_cell() {
        let chain = psi_top(&ExtendedBasis::standard(2)).unwrap();
        assert_eq!(chain.len(), 1);
        let (cell, c) = chain.iter().next().unwrap();
        assert_eq!(cell.vectors.len(), 3);
        let mut want = CellChain::new();
        add_oriented(&mut want, vec![lv(&[-1, -1]), lv(&[1, 0]), lv(&[0, 1])], &rat_int(1));
        assert_eq!(want.coeff(cell), *c);
    }

    #[test]
    fn rank_three_two_cells() {
        let chain = psi_top(&ExtendedBasis::standard(3)).unwrap();
        // φ(e0,e1,e2,e3,f01) - φ(e0,e1,e2,e3,f12)
        let base = [vec![-1, -1, -1], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let mut want = CellChain::new();
        for (f, c) in [(vec![0, -1, -1], 1), (vec![1, 1, 0], -1)] {
            let mut vs: Vec<LatticeVector> = base.iter().map(|v| lv(v)).collect();
            vs.push(lv(&f));
            add_oriented(&mut want, vs, &rat_int(c));
        }
        assert_eq!(chain, want);
    }

    #[test]
    fn tree_signs_four_legs() {
        let trees = plane_trivalent_trees(4);
        let signs: Vec<i32> = trees.iter().map(tree_sign).collect();
        assert_eq!(signs.iter().sum::<i32>(), 0);
    }

    #[test]
    fn one_simplex_boundary() {
        let (c, s) = VoronoiCell::oriented(vec![lv(&[1, 0]), lv(&[0, 1])]).unwrap();
        assert_eq!(s, -1);
        let bd = simplex_boundary(&c);
        assert_eq!(bd.len(), 2);
        assert!(chain_boundary(&bd).is_zero());
    }

    #[test]
    fn suites_pass() {
        for m in 2..=4 {
            for r in check_suite(m).unwrap() {
                assert!(r.pass, "{}", r.name);
            }
        }
    }
}
