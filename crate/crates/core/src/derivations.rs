//! Special derivations of the free algebra on `Y` and `X_g` (`g ∈ Z/N`),
//! cyclic words, the map `κ`, and the embedding `ξ` of the dual dihedral Lie
//! algebra into depth-graded special equivariant derivations.
//!
//! A special derivation is stored through its witnesses `S_i` with
//! `D(X_i) = [S_i, X_i]`. In the depth-graded algebra the `Y` component of a
//! `κ`-image lies one step deeper than the `X_g` components, so it is dropped.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{compositions, cyclic_canonicalize, CyclicWord, Letter};
use crate::dihedral::{BasisElt, DihedralCoalgebra, DihedralError, DihedralGen};
use crate::formal::FormalSum;
use crate::qlinalg::{rank, LinalgError, Rational, SparseMatrixQ};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("weight {0} is above the supported cutoff {MAX_WEIGHT}")]
    WeightTooLarge(u32),
    #[error(transparent)]
    Dihedral(#[from] DihedralError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Largest derivation weight handled by `ξ`.
pub const MAX_WEIGHT: u32 = 8;

pub type AssocWord = Vec<Letter>;
pub type AssocElt = FormalSum<AssocWord>;

pub fn word(letters: &[Letter]) -> AssocElt {
    FormalSum::single(letters.to_vec())
}

pub fn mul(a: &AssocElt, b: &AssocElt) -> AssocElt {
    let mut out = AssocElt::new();
    for (x, c) in a.iter() {
        for (y, d) in b.iter() {
            let mut w = x.clone();
            w.extend_from_slice(y);
            out.add_term(w, c * d);
        }
    }
    out
}

/// `ab - ba`.
pub fn commutator(a: &AssocElt, b: &AssocElt) -> AssocElt {
    &mul(a, b) - &mul(b, a)
}

/// `Y` followed by `X_0, ..., X_{N-1}`.
pub fn generators(level: u32) -> Vec<Letter> {
    std::iter::once(Letter::Y).chain((0..level).map(Letter::X)).collect()
}

/// `X_∞ = -Y - Σ X_g`.
pub fn x_infinity(level: u32) -> AssocElt {
    generators(level)
        .into_iter()
        .map(|l| (vec![l], -Rational::one()))
        .collect()
}

/// `∂_{X_j} C`: for each occurrence of `j`, the word read cyclically after it.
pub fn cyclic_partial(c: &CyclicWord<Letter>, j: Letter) -> AssocElt {
    let n = c.letters.len();
    let mut out = AssocElt::new();
    for (k, l) in c.letters.iter().enumerate() {
        if *l == j {
            let w: AssocWord = (1..n).map(|i| c.letters[(k + i) % n]).collect();
            out.add_term(w, Rational::one());
        }
    }
    out
}

fn relabel_letter(l: Letter, h: u32, level: u32) -> Letter {
    match l {
        Letter::Y => Letter::Y,
        Letter::X(g) => Letter::X((g + h) % level),
    }
}

fn relabel_elt(x: &AssocElt, h: u32, level: u32) -> AssocElt {
    x.iter()
        .map(|(w, c)| (w.iter().map(|&l| relabel_letter(l, h, level)).collect(), c.clone()))
        .collect()
}

pub fn relabel_cyclic(c: &CyclicWord<Letter>, h: u32, level: u32) -> CyclicWord<Letter> {
    CyclicWord::new(c.letters.iter().map(|&l| relabel_letter(l, h, level)).collect())
}

/// A special derivation `X_i ↦ [S_i, X_i]`, given by its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub level: u32,
    pub witnesses: BTreeMap<Letter, AssocElt>,
}

impl Derivation {
    pub fn zero(level: u32) -> Self {
        Derivation {
            level,
            witnesses: BTreeMap::new(),
        }
    }

    fn from_witnesses(level: u32, witnesses: impl IntoIterator<Item = (Letter, AssocElt)>) -> Self {
        Derivation {
            level,
            witnesses: witnesses.into_iter().filter(|(_, s)| !s.is_zero()).collect(),
        }
    }

    /// `κ(C)(X_j) = [∂_{X_j} C, X_j]`; pure powers give zero.
    pub fn kappa(c: &CyclicWord<Letter>, level: u32) -> Self {
        if c.letters.windows(2).all(|p| p[0] == p[1]) {
            return Derivation::zero(level);
        }
        Derivation::from_witnesses(level, generators(level).into_iter().map(|l| (l, cyclic_partial(c, l))))
    }

    /// The depth-graded part: the `Y` witness is dropped.
    pub fn graded(&self) -> Self {
        Derivation::from_witnesses(
            self.level,
            self.witnesses
                .iter()
                .filter(|(l, _)| **l != Letter::Y)
                .map(|(l, s)| (*l, s.clone())),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.values().is_empty()
    }

    pub fn value(&self, l: Letter) -> AssocElt {
        match self.witnesses.get(&l) {
            Some(s) => commutator(s, &word(&[l])),
            None => AssocElt::new(),
        }
    }

    /// Nonzero images of the generators.
    pub fn values(&self) -> BTreeMap<Letter, AssocElt> {
        generators(self.level)
            .into_iter()
            .map(|l| (l, self.value(l)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn apply(&self, x: &AssocElt) -> AssocElt {
        let images: HashMap<Letter, AssocElt> = self.values().into_iter().collect();
        let mut out = AssocElt::new();
        for (w, c) in x.iter() {
            for (k, l) in w.iter().enumerate() {
                if let Some(img) = images.get(l) {
                    let mid = mul(&mul(&word(&w[..k]), img), &word(&w[k + 1..]));
                    out.add_scaled(&mid, c);
                }
            }
        }
        out
    }

    /// `[D, D']` with witnesses `D(S'_i) - D'(S_i) + [S'_i, S_i]`.
    pub fn bracket(&self, other: &Derivation) -> Derivation {
        let empty = AssocElt::new();
        let keys: BTreeSet<Letter> = self.witnesses.keys().chain(other.witnesses.keys()).copied().collect();
        Derivation::from_witnesses(
            self.level,
            keys.into_iter().map(|l| {
                let s = self.witnesses.get(&l).unwrap_or(&empty);
                let t = other.witnesses.get(&l).unwrap_or(&empty);
                let mut w = &self.apply(t) - &other.apply(s);
                w = &w + &commutator(t, s);
                (l, w)
            }),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Derivation::from_witnesses(self.level, self.witnesses.iter().map(|(l, s)| (*l, s.scale(c))))
    }

    pub fn add(&self, other: &Derivation) -> Self {
        let empty = AssocElt::new();
        let keys: BTreeSet<Letter> = self.witnesses.keys().chain(other.witnesses.keys()).copied().collect();
        Derivation::from_witnesses(
            self.level,
            keys.into_iter().map(|l| {
                (
                    l,
                    self.witnesses.get(&l).unwrap_or(&empty) + other.witnesses.get(&l).unwrap_or(&empty),
                )
            }),
        )
    }

    /// `D(X_∞) = 0`.
    pub fn is_special(&self) -> bool {
        self.apply(&x_infinity(self.level)).is_zero()
    }

    /// `h ∘ D ∘ h^{-1}` for the relabeling `X_g ↦ X_{h+g}`.
    pub fn conjugate(&self, h: u32) -> Self {
        Derivation::from_witnesses(
            self.level,
            self.witnesses
                .iter()
                .map(|(l, s)| (relabel_letter(*l, h, self.level), relabel_elt(s, h, self.level))),
        )
    }

    /// Same action on every generator.
    pub fn same_action(&self, other: &Derivation) -> bool {
        self.values() == other.values()
    }

    /// Coordinates of the images `D(X_i)` as one sparse vector.
    fn coordinates(&self) -> BTreeMap<(Letter, AssocWord), Rational> {
        let mut out = BTreeMap::new();
        for (l, v) in self.values() {
            for (w, c) in v.iter() {
                out.insert((l, w.clone()), c.clone());
            }
        }
        out
    }
}

/// `X_{g_0} Y^{n_0-1} ... X_{g_m} Y^{n_m-1}`.
pub fn colon_word(parts: &[u32], slots: &[u32]) -> AssocWord {
    let mut w = Vec::new();
    for (n, g) in parts.iter().zip(slots) {
        w.push(Letter::X(*g));
        w.extend(std::iter::repeat_n(Letter::Y, *n as usize - 1));
    }
    w
}

fn binom(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `I_{n_0..n_m}(g_0 : ... : g_m)`: the coefficient of `Π t_i^{n_i - 1}` in the
/// generating series `Σ_n I_n(g) Π_{i<m} (t_i - t_m)^{n_i - 1}`.
pub fn colon_coefficient(parts: &[u32], slots: &[u32], level: u32) -> FormalSum<DihedralGen> {
    let m = parts.len() - 1;
    let a: Vec<u32> = parts.iter().map(|n| n - 1).collect();
    let w: u32 = parts.iter().sum::<u32>() - 1;
    let slots_i: Vec<i64> = slots.iter().map(|&g| i64::from(g)).collect();
    let mut out = FormalSum::new();
    for comp in compositions(w, m) {
        let n = &comp.parts;
        if (0..m).any(|i| n[i] - 1 < a[i]) {
            continue;
        }
        let rest: u32 = (0..m).map(|i| n[i] - 1 - a[i]).sum();
        if rest != a[m] {
            continue;
        }
        let mut c = BigInt::one();
        for i in 0..m {
            c *= binom(n[i] - 1, a[i]);
            if (n[i] - 1 - a[i]) % 2 == 1 {
                c = -c;
            }
        }
        out.add_term(DihedralGen::new(n.clone(), &slots_i, level), Rational::from_integer(c));
    }
    out
}

/// One `G`-orbit of cyclic words and its pairing with `D_{w,m}`.
#[derive(Clone, Debug)]
struct OrbitTerm {
    word: CyclicWord<Letter>,
    aut: usize,
    /// Coordinates of `I_{n_0..n_m}(g_0 : ... : g_m)` in the quotient basis.
    coords: Vec<(BasisElt, Rational)>,
}

fn orbit_terms(dc: &DihedralCoalgebra, w: u32, m: usize) -> Result<Vec<OrbitTerm>, DerivationError> {
    let n = dc.level;
    let mut reps: BTreeSet<CyclicWord<Letter>> = BTreeSet::new();
    let mut out = Vec::new();
    for comp in compositions(w + 1, m + 1) {
        let total = (n as usize).pow(m as u32 + 1);
        for mut code in 0..total {
            let mut slots = vec![0u32; m + 1];
            for s in slots.iter_mut() {
                *s = (code % n as usize) as u32;
                code /= n as usize;
            }
            let c = CyclicWord::new(colon_word(&comp.parts, &slots));
            let rep = (0..n)
                .map(|h| cyclic_canonicalize(&relabel_cyclic(&c, h, n)).0)
                .min()
                .expect("nonempty group");
            if !reps.insert(rep) {
                continue;
            }
            let aut = automorphisms(&c, n);
            let mut acc: BTreeMap<BasisElt, Rational> = BTreeMap::new();
            for (g, a) in colon_coefficient(&comp.parts, &slots, n).iter() {
                for (b, x) in dc.project(g)? {
                    *acc.entry(b).or_insert_with(Rational::zero) += a * x;
                }
            }
            let coords = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            out.push(OrbitTerm { word: c, aut, coords });
        }
    }
    Ok(out)
}

/// Pairs of a rotation and a relabeling fixing the cyclic word.
pub fn automorphisms(c: &CyclicWord<Letter>, level: u32) -> usize {
    (0..level)
        .map(|h| {
            let r = relabel_cyclic(c, h, level);
            (0..c.letters.len()).filter(|&k| r.rotate(k) == *c).count()
        })
        .sum()
}

/// `ξ` restricted to one bidegree: the depth-graded image of each dual basis vector.
pub fn xi_bidegree(dc: &DihedralCoalgebra, w: u32, m: usize) -> Result<Vec<Derivation>, DerivationError> {
    if w > MAX_WEIGHT {
        return Err(DerivationError::WeightTooLarge(w));
    }
    let basis = dc.basis(w, m)?;
    let n = dc.level;
    let mut out = vec![Derivation::zero(n); basis.len()];
    for t in orbit_terms(dc, w, m)? {
        let mut averaged = Derivation::zero(n);
        for h in 0..n {
            averaged = averaged.add(&Derivation::kappa(&relabel_cyclic(&t.word, h, n), n));
        }
        let averaged = averaged.graded();
        let weight = Rational::new(BigInt::one(), BigInt::from(t.aut));
        for (b, x) in &t.coords {
            out[b.index] = out[b.index].add(&averaged.scale(&(x * &weight)));
        }
    }
    Ok(out)
}

/// `ξ` of the dual of basis vector `b`.
pub fn xi(dc: &DihedralCoalgebra, b: BasisElt) -> Result<Derivation, DerivationError> {
    Ok(xi_bidegree(dc, b.weight, b.depth)?.swap_remove(b.index))
}

/// Rank of `ξ` on `D_{w,m}^∨` and the dimension of the source.
pub fn xi_rank(dc: &DihedralCoalgebra, w: u32, m: usize) -> Result<(usize, usize), DerivationError> {
    let images = xi_bidegree(dc, w, m)?;
    let coords: Vec<BTreeMap<(Letter, AssocWord), Rational>> = images.iter().map(Derivation::coordinates).collect();
    let keys: BTreeSet<&(Letter, AssocWord)> = coords.iter().flat_map(|c| c.keys()).collect();
    let index: HashMap<&(Letter, AssocWord), usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut mat = SparseMatrixQ::new(keys.len());
    for c in &coords {
        let mut row: Vec<(usize, Rational)> = c.iter().map(|(k, v)| (index[k], v.clone())).collect();
        row.sort_by_key(|(i, _)| *i);
        mat.push_row(row);
    }
    Ok((rank(&mat)?, images.len()))
}

/// The bracket of dual basis vectors: `[a, b](x) = (a ∧ b)(δx)`.
pub fn dual_bracket(
    dc: &DihedralCoalgebra,
    a: BasisElt,
    b: BasisElt,
) -> Result<Vec<(BasisElt, Rational)>, DerivationError> {
    let (w, m) = (a.weight + b.weight, a.depth + b.depth);
    let mut out = Vec::new();
    for x in dc.basis(w, m)? {
        let delta = dc.delta_basis(x)?;
        let c = delta.coeff(&(a, b)) - delta.coeff(&(b, a));
        if !c.is_zero() {
            out.push((x, c));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismCase {
    pub left: String,
    pub right: String,
    pub bracket_nonzero: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismReport {
    pub level: u32,
    pub max_weight: u32,
    /// The sign `s` with `ξ[a, b] = s [ξa, ξb]`, fixed by the first nonzero case.
    pub sign: Option<i32>,
    pub cases: Vec<MorphismCase>,
}

impl MorphismReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }
}

/// `ξ[a, b] = ±[ξa, ξb]` for all pairs of depth-one dual basis vectors of total weight `≤ max_weight`.
pub fn morphism_check(dc: &DihedralCoalgebra, max_weight: u32) -> Result<MorphismReport, DerivationError> {
    let mut depth_one = Vec::new();
    let mut images = HashMap::new();
    for w in 1..max_weight {
        for (b, d) in dc.basis(w, 1)?.into_iter().zip(xi_bidegree(dc, w, 1)?) {
            depth_one.push(b);
            images.insert(b, d);
        }
    }
    let mut targets: HashMap<u32, Vec<Derivation>> = HashMap::new();
    let mut sign = None;
    let mut cases = Vec::new();
    for (i, &a) in depth_one.iter().enumerate() {
        for &b in &depth_one[i + 1..] {
            let w = a.weight + b.weight;
            if w > max_weight {
                continue;
            }
            if let std::collections::hash_map::Entry::Vacant(e) = targets.entry(w) {
                e.insert(xi_bidegree(dc, w, 2)?);
            }
            let mut lhs = Derivation::zero(dc.level);
            for (x, c) in dual_bracket(dc, a, b)? {
                lhs = lhs.add(&targets[&w][x.index].scale(&c));
            }
            let rhs = images[&a].bracket(&images[&b]);
            let pass = match sign {
                Some(s) => lhs.same_action(&rhs.scale(&Rational::from_integer(BigInt::from(s)))),
                None if lhs.is_zero() && rhs.is_zero() => true,
                None => {
                    let found = [1, -1]
                        .into_iter()
                        .find(|&s| lhs.same_action(&rhs.scale(&Rational::from_integer(BigInt::from(s)))));
                    sign = found;
                    found.is_some()
                }
            };
            cases.push(MorphismCase {
                left: a.to_string(),
                right: b.to_string(),
                bracket_nonzero: !lhs.is_zero(),
                pass,
            });
        }
    }
    Ok(MorphismReport {
        level: dc.level,
        max_weight,
        sign,
        cases,
    })
}

/// All cyclic words of the given length over `Y, X_0..X_{N-1}`, one per rotation class.
pub fn cyclic_words(level: u32, length: usize) -> Vec<CyclicWord<Letter>> {
    let gens = generators(level);
    let k = gens.len();
    let mut out = BTreeSet::new();
    for mut code in 0..k.pow(length as u32) {
        let mut letters = Vec::with_capacity(length);
        for _ in 0..length {
            letters.push(gens[code % k]);
            code /= k;
        }
        out.insert(cyclic_canonicalize(&CyclicWord::new(letters)).0);
    }
    out.into_iter().collect()
}

/// `κ(C)` is special for every cyclic word up to the given length.
pub fn kappa_special_check(level: u32, max_length: usize) -> bool {
    (1..=max_length).all(|n| {
        cyclic_words(level, n)
            .iter()
            .all(|c| Derivation::kappa(c, level).is_special())
    })
}

/// `h κ(C) h^{-1} = κ(hC)` for every relabeling and cyclic word up to the given length.
pub fn kappa_equivariance_check(level: u32, max_length: usize) -> bool {
    (1..=max_length).all(|n| {
        cyclic_words(level, n).iter().all(|c| {
            let k = Derivation::kappa(c, level);
            (0..level).all(|h| {
                k.conjugate(h)
                    .same_action(&Derivation::kappa(&relabel_cyclic(c, h, level), level))
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::Options;
    use crate::qlinalg::rat_int;

    fn x(g: u32) -> Letter {
        Letter::X(g)
    }

    #[test]
    fn partial_example() {
        let c = CyclicWord::new(vec![x(1), x(2), x(1), x(2), x(2)]);
        let d = cyclic_partial(&c, x(1));
        let want: AssocElt = [
            (vec![x(2), x(1), x(2), x(2)], rat_int(1)),
            (vec![x(2), x(2), x(1), x(2)], rat_int(1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(d, want);
        assert!(cyclic_partial(&CyclicWord::new(vec![x(2), x(2)]), x(1)).is_zero());
        assert_eq!(
            cyclic_partial(&CyclicWord::new(vec![Letter::Y, x(0)]), Letter::Y),
            word(&[x(0)])
        );
    }

    #[test]
    fn kappa_basics() {
        let k = Derivation::kappa(&CyclicWord::new(vec![x(0), Letter::Y]), 1);
        assert_eq!(k.value(Letter::Y), commutator(&word(&[x(0)]), &word(&[Letter::Y])));
        assert!(Derivation::kappa(&CyclicWord::new(vec![x(0); 3]), 1).is_zero());
        assert!(kappa_special_check(2, 4));
        assert!(kappa_equivariance_check(3, 3));
    }

    #[test]
    fn bracket_antisymmetric() {
        let a = Derivation::kappa(&CyclicWord::new(vec![x(0), Letter::Y, Letter::Y]), 1);
        let b = Derivation::kappa(&CyclicWord::new(vec![x(0), x(0), Letter::Y]), 1);
        assert!(a.bracket(&a).is_zero());
        assert!(a.bracket(&b).same_action(&b.bracket(&a).scale(&rat_int(-1))));
        assert!(a.bracket(&b).is_special());
    }

    #[test]
    fn colon_expansion() {
        // (t_0 - t_1)^2
        let c = colon_coefficient(&[2, 2], &[0, 0], 1);
        assert_eq!(c.len(), 1);
        assert_eq!(c.iter().next().unwrap().1, &rat_int(-2));
        assert_eq!(
            colon_coefficient(&[3, 1], &[0, 0], 1).iter().next().unwrap().1,
            &rat_int(1)
        );
    }

    #[test]
    fn xi_weight_three() {
        let dc = DihedralCoalgebra::new(1, Options::default()).unwrap();
        let images = xi_bidegree(&dc, 3, 1).unwrap();
        assert_eq!(images.len(), 1);
        assert!(!images[0].is_zero());
        let (r, d) = xi_rank(&dc, 3, 1).unwrap();
        assert_eq!(r, d);
    }

    #[test]
    fn jacobi_on_kappa_images() {
        let y = Letter::Y;
        let ks: Vec<Derivation> = [vec![x(0), y], vec![x(0), y, y], vec![x(0), x(0), y, y]]
            .into_iter()
            .map(|w| Derivation::kappa(&CyclicWord::new(w), 1))
            .collect();
        let (a, b, c) = (&ks[0], &ks[1], &ks[2]);
        let sum = a
            .bracket(&b.bracket(c))
            .add(&b.bracket(&c.bracket(a)))
            .add(&c.bracket(&a.bracket(b)));
        assert!(sum.is_zero());
    }

    #[test]
    fn morphism_level_two() {
        let dc = DihedralCoalgebra::new(2, Options::default()).unwrap();
        let r = morphism_check(&dc, 6).unwrap();
        assert!(r.pass());
        assert!(r.cases.iter().any(|c| c.bracket_nonzero));
    }
}
