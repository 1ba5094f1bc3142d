//! Rank-`m` modular complexes `M^1 → ... → M^m` and their coinvariants
//! `M^• ⊗_{Γ_1(m;N)} S^{w-m}V_m`, with the comparison map `μ` to the
//! dihedral cochain complex.
//!
//! `GL_m(Z)` acts simply transitively on ordered tuples of block extended
//! bases of a fixed rank type, so every such tuple is `g · S` for the
//! standard tuple `S` of its type. Tensoring with `W = Q[cosets] ⊗ S^{w-m}V`
//! and taking coinvariants identifies `⟨gS⟩ ⊗ y` with `⟨S⟩ ⊗ g^{-1}y`; a
//! relation `Σ c_j ⟨h_j S⟩` then contributes the rows `Σ c_j h_j^{-1} y`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{permutation_sign, shuffles};
use crate::dihedral::{BasisElt, DihedralCoalgebra, DihedralError, DihedralGen, Options};
use crate::formal::FormalSum;
use crate::mzvdims::prime_factors;
use crate::qlinalg::{rank, LinalgError, Quotient, Rational, SparseMatrixQ, SparseRow};

pub const MAX_RANK: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModularError {
    #[error("rank {0} is not supported here")]
    UnsupportedRank(usize),
    #[error("level {0} must be 1 or a prime")]
    UnsupportedLevel(u32),
    #[error("weight {weight} must be at least the rank {rank}")]
    InvalidWeight { weight: u32, rank: usize },
    #[error("the comparison map is only defined for weight equal to rank")]
    WeightNotRank,
    #[error("invalid extended basis: {0}")]
    InvalidBasis(String),
    #[error("blocks do not decompose the lattice")]
    InvalidDecomposition,
    #[error("coset vector {0:?} is not a nonzero vector mod the level")]
    InvalidCoset(Vec<u32>),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Dihedral(#[from] DihedralError),
}

pub type IntVector = Vec<i64>;

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    a: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        IntMatrix { n, a }
    }

    pub fn from_columns(cols: &[IntVector]) -> Self {
        let n = cols.len();
        let mut a = vec![0; n * n];
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "square matrix expected");
            for i in 0..n {
                a[i * n + j] = c[i];
            }
        }
        IntMatrix { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut a = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x != 0 {
                    for j in 0..n {
                        a[i * n + j] += x * other.get(k, j);
                    }
                }
            }
        }
        IntMatrix { n, a }
    }

    pub fn mul_vec(&self, v: &[i64]) -> IntVector {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let n = self.n - 1;
        let mut a = Vec::with_capacity(n * n);
        for i in (0..self.n).filter(|&i| i != skip_row) {
            for j in (0..self.n).filter(|&j| j != skip_col) {
                a.push(self.get(i, j));
            }
        }
        IntMatrix { n, a }
    }

    pub fn det(&self) -> i64 {
        match self.n {
            0 => 1,
            1 => self.a[0],
            2 => self.a[0] * self.a[3] - self.a[1] * self.a[2],
            _ => (0..self.n)
                .map(|j| {
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * self.get(0, j) * self.minor(0, j).det()
                })
                .sum(),
        }
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Option<IntMatrix> {
        let d = self.det();
        if d.abs() != 1 {
            return None;
        }
        let n = self.n;
        if n == 1 {
            return Some(IntMatrix { n, a: vec![d] });
        }
        let mut a = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                a[j * n + i] = s * self.minor(i, j).det() * d;
            }
        }
        Some(IntMatrix { n, a })
    }
}

/// `(v_1, ..., v_{r+1})` with `Σ v_i = 0`, the first `r` a basis of the lattice they span.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ExtendedBasis {
    pub vectors: Vec<IntVector>,
}

impl ExtendedBasis {
    pub fn new(vectors: Vec<IntVector>) -> Result<Self, ModularError> {
        if vectors.len() < 2 {
            return Err(ModularError::InvalidBasis("need at least two vectors".into()));
        }
        let dim = vectors[0].len();
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(ModularError::InvalidBasis("ragged vectors".into()));
        }
        if (0..dim).any(|i| vectors.iter().map(|v| v[i]).sum::<i64>() != 0) {
            return Err(ModularError::InvalidBasis("vectors do not sum to zero".into()));
        }
        let r = vectors.len() - 1;
        if r > dim || !primitive(&vectors[..r], dim) {
            return Err(ModularError::InvalidBasis(
                "first vectors are not a primitive basis".into(),
            ));
        }
        Ok(ExtendedBasis { vectors })
    }

    /// `(v_1, ..., v_r, -(v_1 + ... + v_r))`.
    pub fn completed(first: Vec<IntVector>) -> Self {
        let dim = first[0].len();
        let last: IntVector = (0..dim).map(|i| -first.iter().map(|v| v[i]).sum::<i64>()).collect();
        let mut vectors = first;
        vectors.push(last);
        ExtendedBasis { vectors }
    }

    /// `(e_1, ..., e_m, -Σ e_i)`.
    pub fn standard(m: usize) -> Self {
        ExtendedBasis::block(m, 0, m)
    }

    /// Standard extended basis on the coordinates `offset..offset+r` of `Z^dim`.
    pub fn block(dim: usize, offset: usize, r: usize) -> Self {
        ExtendedBasis::completed((0..r).map(|j| unit(dim, offset + j)).collect())
    }

    pub fn rank(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn ambient(&self) -> usize {
        self.vectors[0].len()
    }

    /// The same basis written in `Z^dim` starting at coordinate `offset`.
    pub fn embed(&self, dim: usize, offset: usize) -> Self {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let mut w = vec![0; dim];
                w[offset..offset + v.len()].copy_from_slice(v);
                w
            })
            .collect();
        ExtendedBasis { vectors }
    }
}

impl fmt::Display for ExtendedBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .vectors
            .iter()
            .map(|v| format!("({})", v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "<{}>", vs.join(", "))
    }
}

fn unit(dim: usize, j: usize) -> IntVector {
    let mut v = vec![0; dim];
    v[j] = 1;
    v
}

/// Whether the vectors extend to a basis of `Z^dim` (gcd of maximal minors is 1).
fn primitive(vs: &[IntVector], dim: usize) -> bool {
    let r = vs.len();
    let mut g = 0i64;
    let mut rows = Vec::with_capacity(r);
    for_each_subset(dim, r, &mut |sel: &[usize]| {
        rows.clear();
        for i in sel {
            rows.push(vs.iter().map(|v| v[*i]).collect::<IntVector>());
        }
        let d = IntMatrix::from_columns(&transpose(&rows)).det();
        g = num_integer::gcd(g, d);
    });
    g == 1
}

fn transpose(rows: &[IntVector]) -> Vec<IntVector> {
    if rows.is_empty() {
        return Vec::new();
    }
    (0..rows[0].len())
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect()
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// `[A_1] ∧ ... ∧ [A_k]` for extended bases of complementary sublattices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModularGen {
    pub blocks: Vec<ExtendedBasis>,
}

impl ModularGen {
    pub fn single(b: ExtendedBasis) -> Self {
        ModularGen { blocks: vec![b] }
    }

    pub fn new(blocks: Vec<ExtendedBasis>) -> Result<Self, ModularError> {
        let g = ModularGen { blocks };
        g.basis_matrix()?;
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(ExtendedBasis::rank).sum()
    }

    /// Columns: the first `r_i` vectors of each block in order.
    fn basis_matrix(&self) -> Result<IntMatrix, ModularError> {
        let m = self.blocks.first().map(ExtendedBasis::ambient).unwrap_or(0);
        if self.rank() != m || self.blocks.iter().any(|b| b.ambient() != m) {
            return Err(ModularError::InvalidDecomposition);
        }
        let cols: Vec<IntVector> = self
            .blocks
            .iter()
            .flat_map(|b| b.vectors[..b.rank()].iter().cloned())
            .collect();
        let g = IntMatrix::from_columns(&cols);
        if g.det().abs() != 1 {
            return Err(ModularError::InvalidDecomposition);
        }
        Ok(g)
    }

    /// Blocks sorted by `(rank, vectors)` with the sign of the reordering; `None` if a block repeats.
    pub fn canonical(blocks: Vec<ExtendedBasis>) -> Option<(ModularGen, i32)> {
        let sign = permutation_sign(&blocks.iter().map(|b| (b.rank(), b.clone())).collect::<Vec<_>>());
        let mut sorted = blocks;
        sorted.sort_by(|a, b| (a.rank(), a).cmp(&(b.rank(), b)));
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return None;
        }
        Some((ModularGen { blocks: sorted }, sign))
    }

    /// Rank type, the matrix `g` with `self = ± g · S_type`, and the sign.
    fn locate(&self) -> Result<(Vec<usize>, IntMatrix, i32), ModularError> {
        let mut order: Vec<usize> = (0..self.blocks.len()).collect();
        order.sort_by_key(|&i| self.blocks[i].rank());
        let sign = permutation_sign(&order);
        let sorted = ModularGen {
            blocks: order.iter().map(|&i| self.blocks[i].clone()).collect(),
        };
        let g = sorted.basis_matrix()?;
        Ok((sorted.blocks.iter().map(ExtendedBasis::rank).collect(), g, sign))
    }
}

impl fmt::Display for ModularGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" ∧ "))
    }
}

/// `∂⟨v_1..v_{r+1}⟩ = -Cycle Σ_{k=1}^{r-1} [v_1..v_k] ∧ [v_{k+1}..v_r]`.
fn block_boundary(a: &ExtendedBasis) -> Vec<(ExtendedBasis, ExtendedBasis)> {
    let r = a.rank();
    let mut out = Vec::new();
    for s in 0..=r {
        let w: Vec<IntVector> = (0..=r).map(|j| a.vectors[(j + s) % (r + 1)].clone()).collect();
        for k in 1..r {
            out.push((
                ExtendedBasis::completed(w[..k].to_vec()),
                ExtendedBasis::completed(w[k..r].to_vec()),
            ));
        }
    }
    out
}

/// Leibniz expansion without canonical reordering: `(coefficient, blocks)`.
fn boundary_terms(blocks: &[ExtendedBasis]) -> Vec<(i64, Vec<ExtendedBasis>)> {
    let mut out = Vec::new();
    for i in 0..blocks.len() {
        let leibniz = if i % 2 == 0 { 1 } else { -1 };
        for (b, c) in block_boundary(&blocks[i]) {
            let mut t = Vec::with_capacity(blocks.len() + 1);
            t.extend_from_slice(&blocks[..i]);
            t.push(b);
            t.push(c);
            t.extend_from_slice(&blocks[i + 1..]);
            out.push((-leibniz, t));
        }
    }
    out
}

/// The differential on the free exterior algebra of extended bases.
pub fn modular_boundary(g: &ModularGen) -> Result<FormalSum<ModularGen>, ModularError> {
    g.basis_matrix()?;
    let mut out = FormalSum::new();
    for (c, blocks) in boundary_terms(&g.blocks) {
        if let Some((t, s)) = ModularGen::canonical(blocks) {
            out.add_term(t, Rational::from_integer(BigInt::from(c * i64::from(s))));
        }
    }
    Ok(out)
}

/// `∂∂` on a formal combination of wedges, before any relations are imposed.
pub fn boundary_squared(x: &FormalSum<ModularGen>) -> Result<FormalSum<ModularGen>, ModularError> {
    let mut once = FormalSum::new();
    for (g, c) in x.iter() {
        once.add_scaled(&modular_boundary(g)?, c);
    }
    let mut twice = FormalSum::new();
    for (g, c) in once.iter() {
        twice.add_scaled(&modular_boundary(g)?, c);
    }
    Ok(twice)
}

/// Rewrites every rank-one block `⟨-v, v⟩` as `⟨v, -v⟩` with the first nonzero
/// coordinate of `v` positive, then reorders the wedge.
pub fn normalize_rank_one(x: &FormalSum<ModularGen>) -> FormalSum<ModularGen> {
    let mut out = FormalSum::new();
    for (g, c) in x.iter() {
        let blocks = g
            .blocks
            .iter()
            .map(|b| {
                let lead = b.vectors[0].iter().find(|&&a| a != 0).copied().unwrap_or(0);
                if b.rank() == 1 && lead < 0 {
                    ExtendedBasis {
                        vectors: vec![b.vectors[1].clone(), b.vectors[0].clone()],
                    }
                } else {
                    b.clone()
                }
            })
            .collect();
        if let Some((t, s)) = ModularGen::canonical(blocks) {
            out.add_term(t, c * Rational::from_integer(s.into()));
        }
    }
    out
}

fn term(blocks: Vec<ExtendedBasis>, c: i64) -> (ModularGen, Rational) {
    (ModularGen { blocks }, Rational::from_integer(c.into()))
}

/// Defining relations of `M^1` on the standard extended basis of `Z^m`:
/// the rank-one sign relation, or both shuffle families for `1 ≤ k ≤ m-1`.
pub fn relation_rows_modular(m: usize) -> Result<Vec<FormalSum<ModularGen>>, ModularError> {
    if m == 0 || m > MAX_RANK {
        return Err(ModularError::UnsupportedRank(m));
    }
    if m == 1 {
        let e = ExtendedBasis::standard(1);
        let flipped = ExtendedBasis {
            vectors: vec![vec![-1], vec![1]],
        };
        return Ok(vec![[term(vec![e], 1), term(vec![flipped], -1)].into_iter().collect()]);
    }
    let v = ExtendedBasis::standard(m).vectors;
    // homogeneous affine basis with u' = v
    let mut u: Vec<IntVector> = vec![vec![0; m]];
    for j in 0..m {
        let next: IntVector = u[j].iter().zip(&v[j]).map(|(a, b)| a + b).collect();
        u.push(next);
    }
    let mut rows = Vec::new();
    for k in 1..m {
        let mut first = FormalSum::new();
        let mut second = FormalSum::new();
        for s in shuffles(k, m - k) {
            let mut vs: Vec<IntVector> = s.word.iter().map(|&j| v[j].clone()).collect();
            vs.push(v[m].clone());
            let (g, c) = term(vec![ExtendedBasis { vectors: vs }], 1);
            first.add_term(g, c);
            let mut us: Vec<IntVector> = s.word.iter().map(|&j| u[j].clone()).collect();
            us.push(u[m].clone());
            let (g, c) = term(vec![affine_to_extended(&us)], 1);
            second.add_term(g, c);
        }
        rows.push(first);
        rows.push(second);
    }
    Ok(rows)
}

/// `⟨u_1 : ... : u_{m+1}⟩ = ⟨u_2 - u_1, ..., u_1 - u_{m+1}⟩`.
pub fn affine_to_extended(us: &[IntVector]) -> ExtendedBasis {
    let n = us.len();
    let vectors = (0..n)
        .map(|i| us[(i + 1) % n].iter().zip(&us[i]).map(|(a, b)| a - b).collect())
        .collect();
    ExtendedBasis { vectors }
}

/// Cyclic and reflection relations on the standard extended basis:
/// `⟨v_2..v_{m+1}, v_1⟩ = ⟨v_1..v_{m+1}⟩ = (-1)^{m+1} ⟨v_{m+1}..v_1⟩`.
pub fn dihedral_relation_rows(m: usize) -> Vec<FormalSum<ModularGen>> {
    let v = ExtendedBasis::standard(m).vectors;
    let mut rotated = v.clone();
    rotated.rotate_left(1);
    let reversed: Vec<IntVector> = v.iter().rev().cloned().collect();
    let sign = if m % 2 == 1 { 1 } else { -1 };
    vec![
        [
            term(vec![ExtendedBasis { vectors: rotated }], 1),
            term(vec![ExtendedBasis { vectors: v.clone() }], -1),
        ]
        .into_iter()
        .collect(),
        [
            term(vec![ExtendedBasis { vectors: v }], 1),
            term(vec![ExtendedBasis { vectors: reversed }], -sign),
        ]
        .into_iter()
        .collect(),
    ]
}

/// A nonzero row vector mod `N` (the zero vector when `N = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetVector(pub Vec<u32>);

fn check_level(level: u32) -> Result<(), ModularError> {
    let pf = prime_factors(u64::from(level));
    if level == 0 || (level > 1 && !(pf.len() == 1 && pf[0] == u64::from(level))) {
        return Err(ModularError::UnsupportedLevel(level));
    }
    Ok(())
}

/// `Γ_1(m;N) \ GL_m(Z)` as nonzero vectors mod `N`, lexicographic.
pub fn coset_space(m: usize, level: u32) -> Result<Vec<CosetVector>, ModularError> {
    check_level(level)?;
    if m == 0 || m > MAX_RANK {
        return Err(ModularError::UnsupportedRank(m));
    }
    if level == 1 {
        return Ok(vec![CosetVector(vec![0; m])]);
    }
    let total = (level as usize).pow(m as u32);
    Ok((1..total)
        .map(|mut x| {
            let mut v = vec![0u32; m];
            for i in (0..m).rev() {
                v[i] = (x % level as usize) as u32;
                x /= level as usize;
            }
            CosetVector(v)
        })
        .collect())
}

type Poly = HashMap<Vec<u32>, i128>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            *out.entry(m).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    if vars == 1 {
        return vec![vec![degree]];
    }
    let mut out = Vec::new();
    for d in (0..=degree).rev() {
        for mut rest in monomials(vars - 1, degree - d) {
            rest.insert(0, d);
            out.push(rest);
        }
    }
    out
}

/// `W = Q[cosets] ⊗ S^{w-m} V_m`, indexed by `coset * #monomials + monomial`.
#[derive(Clone, Debug)]
pub struct CoefficientModule {
    pub rank: usize,
    pub level: u32,
    pub degree: u32,
    pub cosets: Vec<CosetVector>,
    pub monomials: Vec<Vec<u32>>,
    mono_index: HashMap<Vec<u32>, usize>,
}

/// The map `y ↦ g^{-1} y` as one sparse column per basis vector.
type Pullback = Vec<Vec<(usize, i128)>>;

impl CoefficientModule {
    pub fn new(rank: usize, level: u32, weight: u32) -> Result<Self, ModularError> {
        if weight < rank as u32 {
            return Err(ModularError::InvalidWeight { weight, rank });
        }
        let cosets = coset_space(rank, level)?;
        let degree = weight - rank as u32;
        let monomials = monomials(rank, degree);
        let mono_index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Ok(CoefficientModule {
            rank,
            level,
            degree,
            cosets,
            monomials,
            mono_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.cosets.len() * self.monomials.len()
    }

    fn coset_index(&self, v: &[u32]) -> usize {
        if self.level == 1 {
            return 0;
        }
        v.iter().fold(0usize, |acc, &x| acc * self.level as usize + x as usize) - 1
    }

    /// The basis vector `(coset, monomial)` at index `idx`.
    pub fn element(&self, idx: usize) -> (&CosetVector, &[u32]) {
        let nm = self.monomials.len();
        (&self.cosets[idx / nm], &self.monomials[idx % nm])
    }

    /// `g^{-1} (c ⊗ P) = (c g) ⊗ (g^{-1} P)` for every basis vector.
    fn pullback(&self, g: &IntMatrix) -> Pullback {
        let m = self.rank;
        let n = i64::from(self.level);
        let ginv = g.inverse().expect("unimodular");
        let coset_map: Vec<usize> = self
            .cosets
            .iter()
            .map(|c| {
                let v: Vec<u32> = (0..m)
                    .map(|j| {
                        let s: i64 = (0..m).map(|i| i64::from(c.0[i]) * g.get(i, j)).sum();
                        s.rem_euclid(n) as u32
                    })
                    .collect();
                self.coset_index(&v)
            })
            .collect();
        // images of e_j under g^{-1}, and their powers
        let columns: Vec<Poly> = (0..m)
            .map(|j| {
                let mut p = Poly::new();
                for i in 0..m {
                    let c = ginv.get(i, j);
                    if c != 0 {
                        p.insert(unit_exp(m, i), i128::from(c));
                    }
                }
                p
            })
            .collect();
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(m);
        for col in &columns {
            let mut pw = vec![Poly::from([(vec![0; m], 1)])];
            for d in 1..=self.degree as usize {
                let next = poly_mul(&pw[d - 1], col);
                pw.push(next);
            }
            powers.push(pw);
        }
        let mono_map: Vec<Vec<(usize, i128)>> = self
            .monomials
            .iter()
            .map(|mono| {
                let mut p = Poly::from([(vec![0; m], 1)]);
                for (j, &d) in mono.iter().enumerate() {
                    p = poly_mul(&p, &powers[j][d as usize]);
                }
                let mut v: Vec<(usize, i128)> = p.into_iter().map(|(k, c)| (self.mono_index[&k], c)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        let nm = self.monomials.len();
        (0..self.dim())
            .map(|idx| {
                let (c, p) = (idx / nm, idx % nm);
                let base = coset_map[c] * nm;
                mono_map[p].iter().map(|&(q, a)| (base + q, a)).collect()
            })
            .collect()
    }
}

fn unit_exp(m: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; m];
    v[i] = 1;
    v
}

/// Nondecreasing rank sequences of length `k` summing to `m`.
pub fn rank_types(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, k: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for r in min..=rem {
            cur.push(r);
            rec(rem - r, k - 1, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, 1, &mut Vec::new(), &mut out);
    out
}

/// The standard generator of a rank type: consecutive coordinate blocks.
pub fn standard_generator(ranks: &[usize]) -> ModularGen {
    let m = ranks.iter().sum();
    let mut offset = 0;
    let blocks = ranks
        .iter()
        .map(|&r| {
            let b = ExtendedBasis::block(m, offset, r);
            offset += r;
            b
        })
        .collect();
    ModularGen { blocks }
}

/// A relation among ordered block tuples: `Σ coef · ⟨g S⟩`.
type Template = Vec<(i64, IntMatrix)>;

fn locate_all(terms: impl IntoIterator<Item = (i64, ModularGen)>, ranks: &[usize]) -> Result<Template, ModularError> {
    let mut out = Vec::new();
    for (c, g) in terms {
        let (t, mat, s) = g.locate()?;
        debug_assert_eq!(t, ranks);
        out.push((c * i64::from(s), mat));
    }
    Ok(out)
}

/// Relation templates of one rank type: block-internal relations and block swaps.
fn type_templates(ranks: &[usize]) -> Result<Vec<Template>, ModularError> {
    let std = standard_generator(ranks);
    let m: usize = ranks.iter().sum();
    let mut out = Vec::new();
    let mut offset = 0;
    for (b, &r) in ranks.iter().enumerate() {
        for rel in relation_rows_modular(r)? {
            let terms = rel.iter().map(|(g, c)| {
                let mut blocks = std.blocks.clone();
                blocks[b] = g.blocks[0].embed(m, offset);
                (
                    c.to_integer().try_into().expect("small coefficient"),
                    ModularGen { blocks },
                )
            });
            out.push(locate_all(terms.collect::<Vec<_>>(), ranks)?);
        }
        offset += r;
    }
    for b in 0..ranks.len().saturating_sub(1) {
        if ranks[b] == ranks[b + 1] {
            let mut swapped = std.blocks.clone();
            swapped.swap(b, b + 1);
            let terms = vec![(1, std.clone()), (1, ModularGen { blocks: swapped })];
            out.push(locate_all(terms, ranks)?);
        }
    }
    Ok(out)
}

fn template_rows(module: &CoefficientModule, template: &Template) -> Vec<SparseRow> {
    let pulls: Vec<(i64, Pullback)> = template.iter().map(|(c, g)| (*c, module.pullback(g))).collect();
    (0..module.dim())
        .filter_map(|y| {
            let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
            for (c, p) in &pulls {
                for &(i, a) in &p[y] {
                    *acc.entry(i).or_insert(0) += i128::from(*c) * a;
                }
            }
            let row: SparseRow = acc
                .into_iter()
                .filter(|(_, a)| *a != 0)
                .map(|(i, a)| (i, Rational::from_integer(BigInt::from(a))))
                .collect();
            (!row.is_empty()).then_some(row)
        })
        .collect()
}

/// Coinvariants of one rank type.
#[derive(Clone, Debug)]
pub struct TypeQuotient {
    pub ranks: Vec<usize>,
    pub relations: SparseMatrixQ,
    pub quotient: Quotient,
}

/// `M^• ⊗_{Γ_1(m;N)} S^{w-m}V_m` in degrees `1..=m`.
#[derive(Clone, Debug)]
pub struct ModularComplex {
    pub rank: usize,
    pub level: u32,
    pub weight: u32,
    pub module: CoefficientModule,
    /// `terms[k - 1]` lists the rank types of `M^k`.
    pub terms: Vec<Vec<TypeQuotient>>,
    pub term_dims: Vec<usize>,
    /// `differentials[k - 1]: M^k → M^{k+1}`, rows indexed by source basis.
    pub differentials: Vec<SparseMatrixQ>,
    pub cohomology_dims: Vec<usize>,
    pub d_squared_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModularReport {
    pub rank: usize,
    pub level: u32,
    pub weight: u32,
    pub term_dims: Vec<usize>,
    pub cohomology: Vec<usize>,
    pub euler: i64,
}

impl ModularComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.term_dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    pub fn report(&self) -> ModularReport {
        ModularReport {
            rank: self.rank,
            level: self.level,
            weight: self.weight,
            term_dims: self.term_dims.clone(),
            cohomology: self.cohomology_dims.clone(),
            euler: self.euler_characteristic(),
        }
    }

    fn offsets(&self, k: usize) -> Vec<usize> {
        let mut out = vec![0];
        for t in &self.terms[k - 1] {
            out.push(out.last().copied().unwrap_or(0) + t.quotient.dim());
        }
        out
    }

    /// The rank type and ambient index in `W` of the `i`-th basis vector of `M^k`.
    pub fn basis_element(&self, k: usize, i: usize) -> (&TypeQuotient, usize) {
        let offs = self.offsets(k);
        let t = offs.partition_point(|&o| o <= i) - 1;
        let tq = &self.terms[k - 1][t];
        (tq, tq.quotient.basis()[i - offs[t]])
    }
}

fn check_rank(m: usize) -> Result<(), ModularError> {
    if !(2..=MAX_RANK).contains(&m) {
        return Err(ModularError::UnsupportedRank(m));
    }
    Ok(())
}

/// Builds the coinvariant complex for `2 ≤ m ≤ 4`, `N = 1` or prime.
pub fn tensor_complex(m: usize, level: u32, weight: u32) -> Result<ModularComplex, ModularError> {
    check_rank(m)?;
    let module = CoefficientModule::new(m, level, weight)?;
    let d = module.dim();
    let mut terms = Vec::with_capacity(m);
    for k in 1..=m {
        let mut level_terms = Vec::new();
        for ranks in rank_types(m, k) {
            let mut rel = SparseMatrixQ::new(d);
            for t in type_templates(&ranks)? {
                for row in template_rows(&module, &t) {
                    rel.push_row(row);
                }
            }
            let quotient = Quotient::new(&rel)?;
            level_terms.push(TypeQuotient {
                ranks,
                relations: rel,
                quotient,
            });
        }
        terms.push(level_terms);
    }
    let term_dims: Vec<usize> = terms
        .iter()
        .map(|ts: &Vec<TypeQuotient>| ts.iter().map(|t| t.quotient.dim()).sum())
        .collect();
    let mut cx = ModularComplex {
        rank: m,
        level,
        weight,
        module,
        terms,
        term_dims,
        differentials: Vec::new(),
        cohomology_dims: Vec::new(),
        d_squared_zero: true,
    };
    for k in 1..m {
        let mat = differential(&cx, k)?;
        cx.differentials.push(mat);
    }
    cx.d_squared_zero = cx.differentials.windows(2).all(|p| p[0].mul(&p[1]).is_zero());
    let ranks: Vec<usize> = cx.differentials.iter().map(rank).collect::<Result<_, _>>()?;
    cx.cohomology_dims = (0..m)
        .map(|i| {
            let out_rank = ranks.get(i).copied().unwrap_or(0);
            let in_rank = if i == 0 { 0 } else { ranks[i - 1] };
            cx.term_dims[i] - out_rank - in_rank
        })
        .collect();
    Ok(cx)
}

/// Images of all of `W_τ` under `∂`, as ambient vectors per target type.
fn boundary_images(
    cx: &ModularComplex,
    k: usize,
    ranks: &[usize],
) -> Result<Vec<(usize, i64, Pullback)>, ModularError> {
    let std = standard_generator(ranks);
    let targets = &cx.terms[k];
    let mut out = Vec::new();
    for (c, blocks) in boundary_terms(&std.blocks) {
        let (t, g, s) = ModularGen { blocks }.locate()?;
        let ti = targets.iter().position(|x| x.ranks == t).expect("known rank type");
        out.push((ti, c * i64::from(s), cx.module.pullback(&g)));
    }
    Ok(out)
}

/// `∂` applied to an ambient vector of `W_τ`, projected to the quotient coordinates of `M^{k+1}`.
fn apply_boundary(
    cx: &ModularComplex,
    k: usize,
    images: &[(usize, i64, Pullback)],
    v: &[(usize, Rational)],
) -> SparseRow {
    let offs = cx.offsets(k + 1);
    let mut per_type: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); cx.terms[k].len()];
    for (y, a) in v {
        for (ti, c, pull) in images {
            for &(i, b) in &pull[*y] {
                let e = per_type[*ti].entry(i).or_insert_with(Rational::zero);
                *e += a * Rational::from_integer(BigInt::from(i128::from(*c) * b));
            }
        }
    }
    let mut row = SparseRow::new();
    for (ti, acc) in per_type.into_iter().enumerate() {
        let amb: SparseRow = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        for (j, x) in cx.terms[k][ti].quotient.project_sparse(&amb) {
            row.push((offs[ti] + j, x));
        }
    }
    row
}

fn differential(cx: &ModularComplex, k: usize) -> Result<SparseMatrixQ, ModularError> {
    let mut mat = SparseMatrixQ::new(cx.term_dims[k]);
    for tq in &cx.terms[k - 1] {
        let images = boundary_images(cx, k, &tq.ranks)?;
        for &y in tq.quotient.basis() {
            mat.push_row(apply_boundary(cx, k, &images, &[(y, Rational::one())]));
        }
    }
    Ok(mat)
}

/// Whether `∂` maps every relation row of `M^k` into the relations of `M^{k+1}`.
pub fn boundary_respects_relations(cx: &ModularComplex, k: usize) -> Result<bool, ModularError> {
    for tq in &cx.terms[k - 1] {
        let images = boundary_images(cx, k, &tq.ranks)?;
        for row in tq.relations.rows() {
            if !apply_boundary(cx, k, &images, row).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Random relation instances at translated bases and random coefficient vectors
/// all lie in the computed relation span.
pub fn stability_check(cx: &ModularComplex, samples: usize, seed: u64) -> Result<bool, ModularError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = cx.rank;
    for _ in 0..samples {
        let g = random_gl(m, &mut rng);
        let k = rng.gen_range(1..=m);
        let ti = rng.gen_range(0..cx.terms[k - 1].len());
        let tq = &cx.terms[k - 1][ti];
        let templates = type_templates(&tq.ranks)?;
        let t = &templates[rng.gen_range(0..templates.len())];
        // the instance Σ c ⟨g h S⟩ ⊗ y
        let translated: Template = t.iter().map(|(c, h)| (*c, g.mul(h))).collect();
        let y = rng.gen_range(0..cx.module.dim());
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, gh) in &translated {
            for &(i, a) in &cx.module.pullback(gh)[y] {
                *acc.entry(i).or_insert_with(Rational::zero) +=
                    Rational::from_integer(BigInt::from(i128::from(*c) * a));
            }
        }
        let v: SparseRow = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        if !tq.quotient.is_relation(&v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A product of elementary transvections and a sign change.
pub fn random_gl(m: usize, rng: &mut impl Rng) -> IntMatrix {
    let mut g = IntMatrix::identity(m);
    for _ in 0..6 {
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let mut e = IntMatrix::identity(m);
        e.a[i * m + j] = if rng.gen_bool(0.5) { 1 } else { -1 };
        g = g.mul(&e);
    }
    if rng.gen_bool(0.5) {
        let mut d = IntMatrix::identity(m);
        let i = rng.gen_range(0..m);
        d.a[i * m + i] = -1;
        g = g.mul(&d);
    }
    g
}

/// Depth-two generators in weight two at level `N`: the degree-one term of the
/// rank-two complex at `w = 2`. Nonzero exactly when the Lie algebra needs
/// generators beyond those of depth one, so it cannot be free on them.
pub fn depth_two_obstruction(level: u32) -> Result<usize, ModularError> {
    Ok(tensor_complex(2, level, 2)?.term_dims[0])
}

/// `μ` of one block: `I_{1,...,1}` with product coordinates `α_j = c · v_j`.
pub fn mu_block(level: u32, block: &ExtendedBasis, coset: &CosetVector) -> DihedralGen {
    let n = i64::from(level);
    let alphas: Vec<i64> = block
        .vectors
        .iter()
        .map(|v| {
            v.iter()
                .zip(&coset.0)
                .map(|(a, &c)| a * i64::from(c))
                .sum::<i64>()
                .rem_euclid(n)
        })
        .collect();
    let r = block.rank();
    let mut slots = vec![0i64];
    let mut acc = 0;
    for a in &alphas[..r] {
        acc += a;
        slots.push(acc);
    }
    DihedralGen::new(vec![1; r], &slots, level)
}

/// `μ` of a wedge generator at a coset, in the wedge basis of the dihedral quotients.
pub fn mu_map(
    dc: &DihedralCoalgebra,
    g: &ModularGen,
    coset: &CosetVector,
) -> Result<FormalSum<Vec<BasisElt>>, ModularError> {
    if g.blocks.iter().any(|b| b.ambient() != coset.0.len()) {
        return Err(ModularError::InvalidCoset(coset.0.clone()));
    }
    let mut acc: FormalSum<Vec<BasisElt>> = FormalSum::single(Vec::new());
    for b in &g.blocks {
        let img = dc.project(&mu_block(dc.level, b, coset))?;
        let mut next = FormalSum::new();
        for (t, c) in acc.iter() {
            for (e, a) in &img {
                let mut v = t.clone();
                v.push(*e);
                next.add_term(v, c * a);
            }
        }
        acc = next;
    }
    let mut out = FormalSum::new();
    for (t, c) in acc.iter() {
        let mut sorted = t.clone();
        sorted.sort();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            continue;
        }
        let s = permutation_sign(t);
        out.add_term(sorted, c * Rational::from_integer(s.into()));
    }
    Ok(out)
}

/// Termwise comparison with the hat dihedral complex, and the chain map `μ` when `w = m`.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub rank: usize,
    pub level: u32,
    pub weight: u32,
    pub modular_dims: Vec<usize>,
    pub dihedral_dims: Vec<usize>,
    pub modular_euler: i64,
    pub dihedral_euler: i64,
    pub modular_cohomology: Vec<usize>,
    pub dihedral_cohomology: Vec<usize>,
    /// `Some(s)` when `μ∂ = s·δμ` holds on every basis vector.
    pub chain_map_sign: Option<i32>,
    pub mu_kills_relations: Option<bool>,
    pub mu_ranks: Option<Vec<usize>>,
}

impl Comparison {
    pub fn termwise_equal(&self) -> bool {
        self.modular_dims == self.dihedral_dims
    }

    pub fn surjective(&self) -> Option<bool> {
        self.mu_ranks.as_ref().map(|r| *r == self.dihedral_dims)
    }
}

pub fn compare(m: usize, level: u32, weight: u32) -> Result<Comparison, ModularError> {
    let cx = tensor_complex(m, level, weight)?;
    let dc = DihedralCoalgebra::new(level, Options::hat())?;
    let dx = dc.cochain_complex(weight, m)?;
    let mut cmp = Comparison {
        rank: m,
        level,
        weight,
        modular_dims: cx.term_dims.clone(),
        dihedral_dims: dx.term_dims.clone(),
        modular_euler: cx.euler_characteristic(),
        dihedral_euler: dx.euler_characteristic(),
        modular_cohomology: cx.cohomology_dims.clone(),
        dihedral_cohomology: dx.cohomology_dims.clone(),
        chain_map_sign: None,
        mu_kills_relations: None,
        mu_ranks: None,
    };
    if weight as usize != m {
        return Ok(cmp);
    }
    let mut mus = Vec::with_capacity(m);
    let mut kills = true;
    for k in 1..=m {
        let index: HashMap<&Vec<BasisElt>, usize> = dx.bases[k - 1].iter().enumerate().map(|(i, t)| (t, i)).collect();
        let image = |tq: &TypeQuotient, y: usize| -> Result<BTreeMap<usize, Rational>, ModularError> {
            let gen = standard_generator(&tq.ranks);
            let mut acc = BTreeMap::new();
            let (c, _) = cx.module.element(y);
            for (t, a) in mu_map(&dc, &gen, c)?.iter() {
                *acc.entry(index[t]).or_insert_with(Rational::zero) += a;
            }
            Ok(acc)
        };
        let mut mat = SparseMatrixQ::new(dx.term_dims[k - 1]);
        for tq in &cx.terms[k - 1] {
            let cols: Vec<BTreeMap<usize, Rational>> =
                (0..cx.module.dim()).map(|y| image(tq, y)).collect::<Result<_, _>>()?;
            for &y in tq.quotient.basis() {
                mat.push_row(
                    cols[y]
                        .iter()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(i, v)| (*i, v.clone()))
                        .collect(),
                );
            }
            for row in tq.relations.rows() {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (y, a) in row {
                    for (i, v) in &cols[*y] {
                        *acc.entry(*i).or_insert_with(Rational::zero) += a * v;
                    }
                }
                if acc.values().any(|v| !v.is_zero()) {
                    kills = false;
                }
            }
        }
        mus.push(mat);
    }
    let mut sign = None;
    let mut ok = true;
    for k in 1..m {
        let lhs = cx.differentials[k - 1].mul(&mus[k]);
        let rhs = mus[k - 1].mul(&dx.differentials[k - 1]);
        match equal_up_to_sign(&lhs, &rhs, sign) {
            Some(s) => sign = sign.or(s),
            None => ok = false,
        }
    }
    cmp.chain_map_sign = if ok { Some(sign.unwrap_or(1)) } else { None };
    cmp.mu_kills_relations = Some(kills);
    cmp.mu_ranks = Some(mus.iter().map(rank).collect::<Result<_, _>>()?);
    Ok(cmp)
}

/// `Some(Some(s))`-style result flattened: `Some(None)` if both sides vanish.
fn equal_up_to_sign(a: &SparseMatrixQ, b: &SparseMatrixQ, fixed: Option<i32>) -> Option<Option<i32>> {
    let candidates: Vec<i32> = match fixed {
        Some(s) => vec![s],
        None => vec![1, -1],
    };
    for s in candidates {
        let sr = Rational::from_integer(s.into());
        let same = a
            .rows()
            .iter()
            .zip(b.rows())
            .all(|(x, y)| x.len() == y.len() && x.iter().zip(y).all(|((i, u), (j, v))| i == j && *u == v * &sr));
        if same {
            let trivial = a.is_zero() && b.is_zero();
            return Some(if trivial { fixed } else { Some(s) });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn determinant_and_inverse() {
        let g = IntMatrix::from_columns(&[vec![1, 1, 0], vec![0, 1, 0], vec![2, 3, -1]]);
        assert_eq!(g.det(), -1);
        let gi = g.inverse().unwrap();
        assert_eq!(g.mul(&gi), IntMatrix::identity(3));
    }

    #[test]
    fn boundary_rank_two() {
        let d = modular_boundary(&ModularGen::single(ExtendedBasis::standard(2))).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|(g, c)| g.blocks.len() == 2 && c.abs() == Rational::one()));
    }

    #[test]
    fn relation_counts() {
        let rows = relation_rows_modular(3).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].len(), 3);
        assert_eq!(rows[2].len(), 3);
        let rows = relation_rows_modular(2).unwrap();
        // ⟨v1,v2,v3⟩ + ⟨v2,v1,v3⟩
        assert_eq!(rows[0].len(), 2);
        assert!(matches!(
            relation_rows_modular(5),
            Err(ModularError::UnsupportedRank(5))
        ));
    }

    #[test]
    fn cosets() {
        assert_eq!(coset_space(2, 5).unwrap().len(), 24);
        assert_eq!(coset_space(2, 1).unwrap().len(), 1);
        assert_eq!(coset_space(3, 7).unwrap().len(), 342);
        assert!(matches!(coset_space(2, 6), Err(ModularError::UnsupportedLevel(6))));
    }

    #[test]
    fn rank_two_trivial_coefficients() {
        let cx = tensor_complex(2, 1, 2).unwrap();
        assert!(cx.d_squared_zero);
        assert_eq!(cx.cohomology_dims[0], 0);
    }

    #[test]
    fn extended_basis_validation() {
        assert!(ExtendedBasis::new(vec![vec![1, 0], vec![0, 1], vec![-1, -1]]).is_ok());
        assert!(ExtendedBasis::new(vec![vec![2, 0], vec![0, 1], vec![-2, -1]]).is_err());
        assert!(ExtendedBasis::new(vec![vec![1, 1, 0], vec![-1, -1, 0]]).is_ok());
    }

    #[test]
    fn rank_three_boundary_squares_to_zero() {
        let x = FormalSum::single(standard_generator(&[3]));
        assert!(normalize_rank_one(&boundary_squared(&x).unwrap()).is_zero());
    }

    #[test]
    fn level_five_comparison() {
        let c = compare(2, 5, 2).unwrap();
        assert!(c.termwise_equal());
        assert_eq!(c.modular_euler, c.dihedral_euler);
        assert!(c.chain_map_sign.is_some());
        assert_eq!(c.mu_kills_relations, Some(true));
        assert_eq!(c.surjective(), Some(true));
    }

    #[test]
    fn obstruction() {
        assert_eq!(depth_two_obstruction(5).unwrap(), 0);
        assert_eq!(depth_two_obstruction(7).unwrap(), 1);
    }

    #[test]
    fn mu_of_standard_block() {
        let g = mu_block(5, &ExtendedBasis::standard(2), &CosetVector(vec![1, 1]));
        assert_eq!(g.parts, vec![1, 1]);
    }
}
