//! Formal multiple polylogarithm symbols at roots of unity, their stuffle and
//! shuffle products, and closed-form dimension counts.
//!
//! `Li_{n_1..n_m}(x_1..x_m)` sums over `0 < k_1 < ... < k_m`. Arguments are
//! residues mod `N` standing for `ζ_N^x`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formal::FormalSum;
use crate::qlinalg::{format_rational, parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MzvError {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("word must start with an a-letter")]
    MalformedWord,
    #[error("symbol {0} is divergent")]
    Divergent(String),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("certificate: {0}")]
    Certificate(String),
}

/// `Li_{n_1..n_m}(ζ^{x_1}, ..., ζ^{x_m})` at level `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZSymbol {
    pub level: u32,
    pub parts: Vec<u32>,
    pub args: Vec<u32>,
}

impl ZSymbol {
    pub fn new(level: u32, parts: Vec<u32>, args: Vec<u32>) -> Result<Self, MzvError> {
        if level == 0 || parts.len() != args.len() || parts.contains(&0) {
            return Err(MzvError::InvalidSymbol(format!("{parts:?} {args:?} @ {level}")));
        }
        let args = args.into_iter().map(|a| a % level).collect();
        Ok(ZSymbol { level, parts, args })
    }

    /// Classical `ζ(n_1, ..., n_m)`.
    pub fn zeta(parts: &[u32]) -> Self {
        ZSymbol {
            level: 1,
            parts: parts.to_vec(),
            args: vec![0; parts.len()],
        }
    }

    /// The empty symbol, equal to 1.
    pub fn unit(level: u32) -> Self {
        ZSymbol {
            level,
            parts: Vec::new(),
            args: Vec::new(),
        }
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn is_convergent(&self) -> bool {
        match (self.parts.last(), self.args.last()) {
            (Some(&n), Some(&x)) => n > 1 || x != 0,
            _ => true,
        }
    }
}

impl fmt::Display for ZSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        if self.level == 1 {
            write!(f, "ζ({})", parts.join(","))
        } else {
            let args: Vec<String> = self.args.iter().map(u32::to_string).collect();
            write!(f, "Li[{}]({})@{}", parts.join(","), args.join(","), self.level)
        }
    }
}

/// A letter of an iterated integral on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WordLetter {
    /// `dt / (ζ^c - t)`
    A(u32),
    /// `dt / t`
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegralWord {
    pub level: u32,
    pub letters: Vec<WordLetter>,
}

impl IntegralWord {
    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn depth(&self) -> usize {
        self.letters.iter().filter(|l| matches!(l, WordLetter::A(_))).count()
    }

    pub fn is_convergent(&self) -> bool {
        match word_to_comp(self) {
            Ok(z) => z.is_convergent(),
            Err(_) => self.letters.is_empty(),
        }
    }
}

impl fmt::Display for IntegralWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            match l {
                WordLetter::A(c) => write!(f, "a{c}")?,
                WordLetter::B => write!(f, "b")?,
            }
        }
        Ok(())
    }
}

/// `Li_n(x) = ∫_0^1 a(c_1) b^{n_1-1} ... a(c_m) b^{n_m-1}` with `ζ^{c_i} = (x_i ... x_m)^{-1}`.
pub fn comp_to_word(z: &ZSymbol) -> IntegralWord {
    let n = z.level;
    let mut letters = Vec::with_capacity(z.weight() as usize);
    let mut suffix = vec![0u32; z.depth() + 1];
    for i in (0..z.depth()).rev() {
        suffix[i] = (suffix[i + 1] + z.args[i]) % n;
    }
    for (i, &part) in z.parts.iter().enumerate() {
        letters.push(WordLetter::A((n - suffix[i]) % n));
        letters.extend(std::iter::repeat_n(WordLetter::B, part as usize - 1));
    }
    IntegralWord { level: n, letters }
}

pub fn word_to_comp(w: &IntegralWord) -> Result<ZSymbol, MzvError> {
    let n = w.level;
    let mut parts = Vec::new();
    let mut cs = Vec::new();
    for l in &w.letters {
        match l {
            WordLetter::A(c) => {
                parts.push(1);
                cs.push(*c);
            }
            WordLetter::B => match parts.last_mut() {
                Some(p) => *p += 1,
                None => return Err(MzvError::MalformedWord),
            },
        }
    }
    let m = cs.len();
    let args = (0..m)
        .map(|i| {
            let next = if i + 1 < m { cs[i + 1] } else { 0 };
            (next + n - cs[i]) % n
        })
        .collect();
    Ok(ZSymbol { level: n, parts, args })
}

/// Quasi-shuffle product of the index sequences `(n_i, x_i)`.
pub fn stuffle(u: &ZSymbol, v: &ZSymbol) -> Result<FormalSum<ZSymbol>, MzvError> {
    if u.level != v.level {
        return Err(MzvError::LevelMismatch(u.level, v.level));
    }
    let n = u.level;
    let a: Vec<(u32, u32)> = u.parts.iter().copied().zip(u.args.iter().copied()).collect();
    let b: Vec<(u32, u32)> = v.parts.iter().copied().zip(v.args.iter().copied()).collect();
    let mut memo = BTreeMap::new();
    let words = quasi_shuffle(&a, &b, n, &mut memo);
    Ok(words
        .iter()
        .map(|(w, c)| {
            let (parts, args) = w.iter().copied().unzip();
            (ZSymbol { level: n, parts, args }, Rational::from_integer((*c).into()))
        })
        .collect())
}

type Seq = Vec<(u32, u32)>;

fn quasi_shuffle(
    a: &[(u32, u32)],
    b: &[(u32, u32)],
    n: u32,
    memo: &mut BTreeMap<(usize, usize), BTreeMap<Seq, i64>>,
) -> BTreeMap<Seq, i64> {
    if a.is_empty() || b.is_empty() {
        let rest = if a.is_empty() { b } else { a };
        return BTreeMap::from([(rest.to_vec(), 1)]);
    }
    let key = (a.len(), b.len());
    if let Some(r) = memo.get(&key) {
        return r.clone();
    }
    let mut out = BTreeMap::new();
    let mut prepend = |head: (u32, u32), tail: BTreeMap<Seq, i64>| {
        for (w, c) in tail {
            let mut s = Vec::with_capacity(w.len() + 1);
            s.push(head);
            s.extend(w);
            *out.entry(s).or_insert(0) += c;
        }
    };
    prepend(a[0], quasi_shuffle(&a[1..], b, n, memo));
    prepend(b[0], quasi_shuffle(a, &b[1..], n, memo));
    prepend(
        (a[0].0 + b[0].0, (a[0].1 + b[0].1) % n),
        quasi_shuffle(&a[1..], &b[1..], n, memo),
    );
    memo.insert(key, out.clone());
    out
}

/// Shuffle product of iterated integral words.
pub fn shuffle_product(u: &IntegralWord, v: &IntegralWord) -> Result<FormalSum<IntegralWord>, MzvError> {
    if u.level != v.level {
        return Err(MzvError::LevelMismatch(u.level, v.level));
    }
    let mut memo = BTreeMap::new();
    let words = shuffle_letters(&u.letters, &v.letters, &mut memo);
    Ok(words
        .into_iter()
        .map(|(letters, c)| {
            (
                IntegralWord {
                    level: u.level,
                    letters,
                },
                Rational::from_integer(c.into()),
            )
        })
        .collect())
}

type LetterMemo = BTreeMap<(usize, usize), BTreeMap<Vec<WordLetter>, i64>>;

fn shuffle_letters(a: &[WordLetter], b: &[WordLetter], memo: &mut LetterMemo) -> BTreeMap<Vec<WordLetter>, i64> {
    if a.is_empty() || b.is_empty() {
        let rest = if a.is_empty() { b } else { a };
        return BTreeMap::from([(rest.to_vec(), 1)]);
    }
    let key = (a.len(), b.len());
    if let Some(r) = memo.get(&key) {
        return r.clone();
    }
    let mut out: BTreeMap<Vec<WordLetter>, i64> = BTreeMap::new();
    for (head, tail) in [
        (a[0], shuffle_letters(&a[1..], b, memo)),
        (b[0], shuffle_letters(a, &b[1..], memo)),
    ] {
        for (w, c) in tail {
            let mut s = Vec::with_capacity(w.len() + 1);
            s.push(head);
            s.extend(w);
            *out.entry(s).or_insert(0) += c;
        }
    }
    memo.insert(key, out.clone());
    out
}

/// `stuffle(u, v) - shuffle(u, v)`, a combination of convergent symbols that vanishes.
pub fn double_shuffle_identity(u: &ZSymbol, v: &ZSymbol) -> Result<FormalSum<ZSymbol>, MzvError> {
    for z in [u, v] {
        if !z.is_convergent() {
            return Err(MzvError::Divergent(z.to_string()));
        }
    }
    let mut out = stuffle(u, v)?;
    let sh = shuffle_product(&comp_to_word(u), &comp_to_word(v))?;
    for (w, c) in sh.iter() {
        out.add_term(word_to_comp(w)?, -c.clone());
    }
    Ok(out)
}

/// `d_k`: `d_0 = 1, d_1 = 0, d_2 = 1, d_k = d_{k-2} + d_{k-3}`.
pub fn zeta_dim_bound(k: u32) -> u64 {
    let mut d = vec![1u64, 0, 1];
    while d.len() <= k as usize {
        let i = d.len();
        d.push(d[i - 2] + d[i - 3]);
    }
    d[k as usize]
}

/// Degree-`k` dimension of the free graded Lie algebra on generators of the given degrees.
pub fn witt_dims(generator_degrees: &[u32], k: u32) -> u64 {
    let k = k as usize;
    if k == 0 {
        return 0;
    }
    // t_n: tensor algebra dims; p_n from n t_n = Σ_{j=1}^n p_j t_{n-j}
    let mut f = vec![0i128; k + 1];
    for &d in generator_degrees {
        if (d as usize) <= k && d > 0 {
            f[d as usize] += 1;
        }
    }
    let mut t = vec![0i128; k + 1];
    t[0] = 1;
    for n in 1..=k {
        t[n] = (1..=n).map(|j| f[j] * t[n - j]).sum();
    }
    let mut p = vec![0i128; k + 1];
    for n in 1..=k {
        p[n] = n as i128 * t[n] - (1..n).map(|j| p[j] * t[n - j]).sum::<i128>();
    }
    let total: i128 = (1..=k)
        .filter(|d| k.is_multiple_of(*d))
        .map(|d| mobius(d as u64) as i128 * p[k / d])
        .sum();
    (total / k as i128) as u64
}

pub fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, p| acc / p * (p - 1))
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(n: u64) -> Vec<u64> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rank of `K_{2n-1}(Z[ζ_N, 1/N]) ⊗ Q`.
pub fn ktheory_dims(level: u32, n: u32) -> u64 {
    let big_n = u64::from(level);
    match level {
        0 => 0,
        1 => u64::from(n > 1 && n % 2 == 1),
        // Z[1/2]: the unit 2 in degree one, Borel classes in odd degrees
        2 => u64::from(n == 1 || n % 2 == 1),
        _ if n == 1 => euler_phi(big_n) / 2 + prime_factors(big_n).len() as u64 - 1,
        _ => euler_phi(big_n) / 2,
    }
}

/// One term `coef · Li_comp(args)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertTerm {
    pub coef: String,
    pub comp: Vec<u32>,
    pub args: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertFactor {
    pub comp: Vec<u32>,
    pub args: Vec<u32>,
}

/// `coef · Π factors`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertProduct {
    pub coef: String,
    pub factors: Vec<CertFactor>,
}

/// An identity `Σ terms + Σ products = 0` between multiple polylogarithm values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub level: u32,
    pub terms: Vec<CertTerm>,
    #[serde(default)]
    pub products: Vec<CertProduct>,
}

impl Certificate {
    pub fn from_sum(level: u32, sum: &FormalSum<ZSymbol>) -> Self {
        let terms = sum
            .iter()
            .map(|(z, c)| CertTerm {
                coef: format_rational(c),
                comp: z.parts.clone(),
                args: z.args.clone(),
            })
            .collect();
        Certificate {
            level,
            terms,
            products: Vec::new(),
        }
    }

    /// `u · v - stuffle(u, v) = 0`.
    pub fn stuffle(u: &ZSymbol, v: &ZSymbol) -> Result<Self, MzvError> {
        for z in [u, v] {
            if !z.is_convergent() {
                return Err(MzvError::Divergent(z.to_string()));
            }
        }
        let st = stuffle(u, v)?;
        let mut cert = Certificate::from_sum(u.level, &(-&st));
        cert.products.push(CertProduct {
            coef: "1/1".into(),
            factors: [u, v]
                .iter()
                .map(|z| CertFactor {
                    comp: z.parts.clone(),
                    args: z.args.clone(),
                })
                .collect(),
        });
        Ok(cert)
    }

    pub fn double_shuffle(u: &ZSymbol, v: &ZSymbol) -> Result<Self, MzvError> {
        Ok(Certificate::from_sum(u.level, &double_shuffle_identity(u, v)?))
    }

    /// Every term as `(coefficient, factors)`; plain terms have one factor.
    pub fn monomials(&self) -> Result<Vec<(Rational, Vec<ZSymbol>)>, MzvError> {
        let parse = |s: &str| parse_rational(s).map_err(|e| MzvError::Certificate(e.to_string()));
        let sym = |comp: &[u32], args: &[u32]| -> Result<ZSymbol, MzvError> {
            let z = ZSymbol::new(self.level, comp.to_vec(), args.to_vec())?;
            if !z.is_convergent() {
                return Err(MzvError::Divergent(z.to_string()));
            }
            Ok(z)
        };
        let mut out = Vec::new();
        for t in &self.terms {
            out.push((parse(&t.coef)?, vec![sym(&t.comp, &t.args)?]));
        }
        for p in &self.products {
            let fs = p
                .factors
                .iter()
                .map(|f| sym(&f.comp, &f.args))
                .collect::<Result<_, _>>()?;
            out.push((parse(&p.coef)?, fs));
        }
        if out.iter().all(|(c, _)| c.is_zero()) && !out.is_empty() {
            return Err(MzvError::Certificate("all coefficients vanish".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rat_int;

    fn one() -> Rational {
        num_traits::One::one()
    }

    fn z(parts: &[u32]) -> ZSymbol {
        ZSymbol::zeta(parts)
    }

    #[test]
    fn stuffle_depth_one() {
        let s = stuffle(&z(&[2]), &z(&[3])).unwrap();
        let want: FormalSum<ZSymbol> = [(z(&[2, 3]), one()), (z(&[3, 2]), one()), (z(&[5]), one())]
            .into_iter()
            .collect();
        assert_eq!(s, want);
        let s = stuffle(&z(&[1]), &z(&[1])).unwrap();
        assert_eq!(s.coeff(&z(&[1, 1])), rat_int(2));
        assert_eq!(s.coeff(&z(&[2])), rat_int(1));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn stuffle_adds_arguments() {
        let u = ZSymbol::new(3, vec![2], vec![1]).unwrap();
        let s = stuffle(&u, &u).unwrap();
        assert_eq!(s.coeff(&ZSymbol::new(3, vec![4], vec![2]).unwrap()), rat_int(1));
        assert_eq!(s.coeff(&ZSymbol::new(3, vec![2, 2], vec![1, 1]).unwrap()), rat_int(2));
    }

    #[test]
    fn words() {
        assert_eq!(comp_to_word(&z(&[2])).to_string(), "a0b");
        assert_eq!(comp_to_word(&z(&[1, 3])).to_string(), "a0a0bb");
        let w = IntegralWord {
            level: 1,
            letters: vec![WordLetter::B, WordLetter::A(0)],
        };
        assert_eq!(word_to_comp(&w), Err(MzvError::MalformedWord));
        let u = ZSymbol::new(5, vec![1, 2, 1], vec![3, 0, 4]).unwrap();
        assert_eq!(word_to_comp(&comp_to_word(&u)).unwrap(), u);
    }

    #[test]
    fn shuffle_two_two() {
        let s = shuffle_product(&comp_to_word(&z(&[2])), &comp_to_word(&z(&[2]))).unwrap();
        let mapped: FormalSum<ZSymbol> = s.iter().map(|(w, c)| (word_to_comp(w).unwrap(), c.clone())).collect();
        assert_eq!(mapped.coeff(&z(&[2, 2])), rat_int(2));
        assert_eq!(mapped.coeff(&z(&[1, 3])), rat_int(4));
        assert_eq!(mapped.len(), 2);
    }

    #[test]
    fn identity_two_two() {
        let d = double_shuffle_identity(&z(&[2]), &z(&[2])).unwrap();
        let want: FormalSum<ZSymbol> = [(z(&[4]), rat_int(1)), (z(&[1, 3]), rat_int(-4))].into_iter().collect();
        assert_eq!(d, want);
    }

    #[test]
    fn divergent_rejected() {
        assert!(matches!(
            double_shuffle_identity(&z(&[1]), &z(&[2])),
            Err(MzvError::Divergent(_))
        ));
    }

    #[test]
    fn dims() {
        assert_eq!(zeta_dim_bound(0), 1);
        assert_eq!(zeta_dim_bound(5), 2);
        assert_eq!(zeta_dim_bound(12), 12);
        let odd: Vec<u32> = (3..=12).step_by(2).collect();
        assert_eq!(witt_dims(&odd, 12), 2);
        assert_eq!(witt_dims(&[2, 3], 2), 1);
        assert_eq!(witt_dims(&[2, 3], 5), 1);
        assert_eq!(witt_dims(&[1, 1], 4), 3);
    }

    #[test]
    fn ktheory() {
        assert_eq!(ktheory_dims(1, 3), 1);
        assert_eq!(ktheory_dims(1, 2), 0);
        assert_eq!(ktheory_dims(5, 2), 2);
        assert_eq!(ktheory_dims(6, 1), 2);
        assert_eq!(ktheory_dims(7, 1), 3);
    }

    #[test]
    fn certificate_roundtrip() {
        let c = Certificate::stuffle(&z(&[2]), &z(&[3])).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let mons = back.monomials().unwrap();
        assert_eq!(mons.len(), 4);
        assert_eq!(mons.iter().filter(|(_, f)| f.len() == 2).count(), 1);
    }
}
