//! The dihedral Lie coalgebra `D_{w,m}(μ_N)`.
//!
//! Generators `I_{n_1..n_m}(g_1 : ... : g_{m+1})` are stored with the last
//! slot normalized to the identity (homogeneity is built into the generator).
//! Relations are coefficient extractions from generating series; the
//! cobracket and the standard cochain complex are computed on quotient bases.

mod cobracket;
mod complex;
mod relations;
mod series;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{composition_count, composition_rank, compositions, Composition};
use crate::qlinalg::{LinalgError, Quotient, SparseMatrixQ};

pub use cobracket::{Wedge, WedgeSum};
pub use complex::CochainComplex;
pub use relations::{relation_matrix, symmetry_rows};
pub use series::{colon_series, comma_series, product_coordinates, series_with_forms, TPolynomial};

/// Largest level accepted by default.
pub const MAX_LEVEL: u32 = 100;
/// Largest weight accepted by default.
pub const MAX_WEIGHT: u32 = 16;
/// Largest depth accepted by default.
pub const MAX_DEPTH: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DihedralError {
    #[error("level {0} is outside the supported range 1..={MAX_LEVEL}")]
    UnsupportedLevel(u32),
    #[error("bidegree (w={weight}, m={depth}) is outside the supported range")]
    InvalidBidegree { weight: u32, depth: usize },
    #[error("slot product constraint violated: arguments sum to {0}, expected 0")]
    ProductConstraint(u32),
    #[error("input is not homogeneous in weight and depth")]
    NotHomogeneous,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A residue `a` mod `N`, standing for `ζ_N^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub residue: u32,
    pub level: u32,
}

impl GroupElement {
    pub fn new(residue: i64, level: u32) -> Self {
        GroupElement {
            residue: residue.rem_euclid(i64::from(level)) as u32,
            level,
        }
    }

    pub fn identity(level: u32) -> Self {
        GroupElement { residue: 0, level }
    }

    pub fn inv(self) -> Self {
        GroupElement::new(-i64::from(self.residue), self.level)
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, other: GroupElement) -> GroupElement {
        assert_eq!(self.level, other.level);
        GroupElement::new(i64::from(self.residue) + i64::from(other.residue), self.level)
    }
}

/// `I_{n_1..n_m}(g_1 : ... : g_m : e)`, slots given as residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DihedralGen {
    pub parts: Vec<u32>,
    pub slots: Vec<u32>,
}

impl DihedralGen {
    /// Canonical generator from arbitrary slots (`slots.len() == parts.len() + 1`).
    pub fn new(parts: Vec<u32>, slots: &[i64], level: u32) -> Self {
        assert_eq!(slots.len(), parts.len() + 1, "need m+1 slots");
        let last = *slots.last().expect("nonempty slots");
        let n = i64::from(level);
        DihedralGen {
            parts,
            slots: slots.iter().map(|s| (s - last).rem_euclid(n) as u32).collect(),
        }
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    /// `I[n1,..,nm](a1:..:am+1)@N`.
    pub fn serialize(&self, level: u32) -> String {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        let slots: Vec<String> = self.slots.iter().map(u32::to_string).collect();
        format!("I[{}]({})@{}", parts.join(","), slots.join(":"), level)
    }
}

impl fmt::Display for DihedralGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        let slots: Vec<String> = self.slots.iter().map(u32::to_string).collect();
        write!(f, "I[{}]({})", parts.join(","), slots.join(":"))
    }
}

/// Relation options.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Options {
    /// Drop the relation `I_1(e:e) = 0`.
    pub hat: bool,
    /// Include distribution relations.
    pub distribution: bool,
    /// Impose cyclic, reflection and inversion symmetry in depth 1.
    pub dihedral_m1: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            hat: false,
            distribution: true,
            dihedral_m1: true,
        }
    }
}

impl Options {
    pub fn hat() -> Self {
        Options {
            hat: true,
            ..Options::default()
        }
    }
}

pub(crate) fn check_range(level: u32, weight: u32, depth: usize) -> Result<(), DihedralError> {
    if level == 0 || level > MAX_LEVEL {
        return Err(DihedralError::UnsupportedLevel(level));
    }
    if depth == 0 || depth > MAX_DEPTH || weight < depth as u32 || weight > MAX_WEIGHT {
        return Err(DihedralError::InvalidBidegree { weight, depth });
    }
    Ok(())
}

/// The generators of one bidegree, indexed by composition rank and slot tuple.
#[derive(Clone, Debug)]
pub struct GenSpace {
    pub level: u32,
    pub weight: u32,
    pub depth: usize,
    n_slot_tuples: usize,
}

impl GenSpace {
    pub fn new(level: u32, weight: u32, depth: usize) -> Self {
        GenSpace {
            level,
            weight,
            depth,
            n_slot_tuples: (level as usize).pow(depth as u32),
        }
    }

    pub fn len(&self) -> usize {
        composition_count(self.weight, self.depth) * self.n_slot_tuples
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column of a generator given by parts and (not necessarily canonical) slots.
    pub fn index_of(&self, parts: &[u32], slots: &[u32]) -> usize {
        let n = self.level;
        let last = slots[self.depth];
        let mut s = 0usize;
        for &g in &slots[..self.depth] {
            s = s * n as usize + ((g + n - last % n) % n) as usize;
        }
        composition_rank(parts) * self.n_slot_tuples + s
    }

    pub fn index(&self, g: &DihedralGen) -> usize {
        self.index_of(&g.parts, &g.slots)
    }

    pub fn generator(&self, idx: usize) -> DihedralGen {
        let comp = idx / self.n_slot_tuples;
        let mut s = idx % self.n_slot_tuples;
        let mut slots = vec![0u32; self.depth + 1];
        for i in (0..self.depth).rev() {
            slots[i] = (s % self.level as usize) as u32;
            s /= self.level as usize;
        }
        let parts = compositions(self.weight, self.depth)
            .into_iter()
            .nth(comp)
            .map(|c: Composition| c.parts)
            .expect("index in range");
        DihedralGen { parts, slots }
    }

    pub fn generators(&self) -> Vec<DihedralGen> {
        let comps = compositions(self.weight, self.depth);
        let mut out = Vec::with_capacity(self.len());
        for c in comps {
            for s in 0..self.n_slot_tuples {
                let mut slots = vec![0u32; self.depth + 1];
                let mut r = s;
                for i in (0..self.depth).rev() {
                    slots[i] = (r % self.level as usize) as u32;
                    r /= self.level as usize;
                }
                out.push(DihedralGen {
                    parts: c.parts.clone(),
                    slots,
                });
            }
        }
        out
    }
}

/// Number of generators minus the rank of the relation matrix.
#[allow(non_snake_case)]
pub fn dim_D(level: u32, weight: u32, depth: usize, opts: Options) -> Result<usize, DihedralError> {
    let m = relation_matrix(level, weight, depth, opts)?;
    Ok(crate::qlinalg::quotient_dim(&m)?)
}

/// A basis vector of some `D_{w,m}`: ordered by weight, then depth, then index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisElt {
    pub weight: u32,
    pub depth: usize,
    pub index: usize,
}

impl fmt::Display for BasisElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}_{}[{}]", self.weight, self.depth, self.index)
    }
}

/// `D_{w,m}` as a quotient of the generator space.
#[derive(Debug)]
pub struct DihedralQuotient {
    pub space: GenSpace,
    pub quotient: Quotient,
}

impl DihedralQuotient {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// The generator representing the `k`-th basis vector.
    pub fn basis_generator(&self, k: usize) -> DihedralGen {
        self.space.generator(self.quotient.basis()[k])
    }
}

/// Quotient spaces of all bidegrees at a fixed level, computed on demand.
#[derive(Debug)]
pub struct DihedralCoalgebra {
    pub level: u32,
    pub opts: Options,
    quotients: Mutex<HashMap<(u32, usize), Arc<DihedralQuotient>>>,
    deltas: Mutex<HashMap<BasisElt, Arc<WedgeSum>>>,
}

impl DihedralCoalgebra {
    pub fn new(level: u32, opts: Options) -> Result<Self, DihedralError> {
        if level == 0 || level > MAX_LEVEL {
            return Err(DihedralError::UnsupportedLevel(level));
        }
        Ok(DihedralCoalgebra {
            level,
            opts,
            quotients: Mutex::new(HashMap::new()),
            deltas: Mutex::new(HashMap::new()),
        })
    }

    pub fn quotient(&self, weight: u32, depth: usize) -> Result<Arc<DihedralQuotient>, DihedralError> {
        if let Some(q) = self.quotients.lock().expect("cache lock").get(&(weight, depth)) {
            return Ok(q.clone());
        }
        let rel = relation_matrix(self.level, weight, depth, self.opts)?;
        let q = Arc::new(DihedralQuotient {
            space: GenSpace::new(self.level, weight, depth),
            quotient: Quotient::new(&rel)?,
        });
        self.quotients
            .lock()
            .expect("cache lock")
            .insert((weight, depth), q.clone());
        Ok(q)
    }

    pub fn dim(&self, weight: u32, depth: usize) -> Result<usize, DihedralError> {
        Ok(self.quotient(weight, depth)?.dim())
    }

    /// Quotient coordinates of a generator.
    pub fn project(&self, g: &DihedralGen) -> Result<Vec<(BasisElt, crate::Rational)>, DihedralError> {
        let (w, m) = (g.weight(), g.depth());
        let q = self.quotient(w, m)?;
        Ok(q.quotient
            .project(q.space.index(g))
            .into_iter()
            .map(|(index, c)| {
                (
                    BasisElt {
                        weight: w,
                        depth: m,
                        index,
                    },
                    c,
                )
            })
            .collect())
    }

    /// All basis elements of `D_{w,m}`.
    pub fn basis(&self, weight: u32, depth: usize) -> Result<Vec<BasisElt>, DihedralError> {
        let d = self.dim(weight, depth)?;
        Ok((0..d).map(|index| BasisElt { weight, depth, index }).collect())
    }

    pub fn basis_generator(&self, b: BasisElt) -> Result<DihedralGen, DihedralError> {
        Ok(self.quotient(b.weight, b.depth)?.basis_generator(b.index))
    }

    /// Relation matrix of one bidegree, as used for the quotient.
    pub fn relations(&self, weight: u32, depth: usize) -> Result<SparseMatrixQ, DihedralError> {
        relation_matrix(self.level, weight, depth, self.opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_indexing_round_trips() {
        let s = GenSpace::new(3, 5, 2);
        assert_eq!(s.len(), 4 * 9);
        for (i, g) in s.generators().iter().enumerate() {
            assert_eq!(s.index(g), i);
            assert_eq!(&s.generator(i), g);
        }
    }

    #[test]
    fn homogeneity_is_canonicalized() {
        let g = DihedralGen::new(vec![1, 2], &[3, 4, 1], 5);
        assert_eq!(g.slots, vec![2, 3, 0]);
        assert_eq!(g.serialize(5), "I[1,2](2:3:0)@5");
    }

    #[test]
    fn range_checks() {
        assert!(matches!(
            dim_D(0, 2, 1, Options::default()),
            Err(DihedralError::UnsupportedLevel(0))
        ));
        assert!(matches!(
            dim_D(1, 1, 2, Options::default()),
            Err(DihedralError::InvalidBidegree { .. })
        ));
    }
}
