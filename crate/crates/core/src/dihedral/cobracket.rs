//! The cobracket `δ: D → Λ²D`.
//!
//! For a generator `I_n(g)` of bidegree `(w, m)` we expand every cut term of
//! the defining formula as a product of two generating series in the free
//! variables `t_1..t_m` (with `t_{m+1} = 0`), and read off the coefficient of
//! `t_1^{n_1-1} ... t_m^{n_m-1}`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::series::{accumulate, mono_exps, mono_from_exps, SeriesAcc};
use super::{BasisElt, DihedralCoalgebra, DihedralError, DihedralGen, GenSpace};
use crate::formal::FormalSum;
use crate::qlinalg::Rational;

/// `x ∧ y` with `x < y`.
pub type Wedge = (BasisElt, BasisElt);
pub type WedgeSum = FormalSum<Wedge>;

fn unit(j: usize, r: usize) -> Vec<i64> {
    let mut v = vec![0; r];
    v[j] = 1;
    v
}

/// Adds `c * x ∧ y` in canonical order.
pub(crate) fn add_wedge(out: &mut WedgeSum, x: BasisElt, y: BasisElt, c: Rational) {
    match x.cmp(&y) {
        std::cmp::Ordering::Less => out.add_term((x, y), c),
        std::cmp::Ordering::Greater => out.add_term((y, x), -c),
        std::cmp::Ordering::Equal => {}
    }
}

impl DihedralCoalgebra {
    /// `δ` of a single generator, in quotient coordinates.
    pub fn delta_generator(&self, g: &DihedralGen) -> Result<WedgeSum, DihedralError> {
        let m = g.depth();
        let w = g.weight();
        super::check_range(self.level, w, m)?;
        let mut out = WedgeSum::new();
        if m < 2 {
            return Ok(out);
        }
        let target: Vec<u32> = g.parts.iter().map(|n| n - 1).collect();
        let target_mono = mono_from_exps(&target);
        let mut forms: Vec<Vec<i64>> = (0..m).map(|j| unit(j, m)).collect();
        forms.push(vec![0; m]);
        let mut pairs: HashMap<(u32, usize, usize, usize), i128> = HashMap::new();
        for shift in 0..=m {
            let sl: Vec<u32> = (0..=m).map(|j| g.slots[(j + shift) % (m + 1)]).collect();
            let fo: Vec<Vec<i64>> = (0..=m).map(|j| forms[(j + shift) % (m + 1)].clone()).collect();
            for k in 2..=m {
                let lsl = &sl[..k];
                let mut lfo: Vec<Vec<i64>> = fo[..k - 1].to_vec();
                lfo.push(fo[m].clone());
                let rsl = &sl[k - 1..];
                let rfo = &fo[k - 1..];
                let (ld, rd) = (k - 1, m + 1 - k);
                for w1 in ld as u32..=(w - rd as u32) {
                    let w2 = w - w1;
                    let lspace = GenSpace::new(self.level, w1, ld);
                    let rspace = GenSpace::new(self.level, w2, rd);
                    let mut lacc = SeriesAcc::new();
                    accumulate(&mut lacc, &lspace, lsl, &lfo, 1);
                    let mut racc = SeriesAcc::new();
                    accumulate(&mut racc, &rspace, rsl, rfo, 1);
                    for (lm, lrow) in &lacc {
                        let le = mono_exps(*lm, m);
                        if le.iter().zip(&target).any(|(a, t)| a > t) {
                            continue;
                        }
                        let Some(rrow) = racc.get(&(target_mono - lm)) else {
                            continue;
                        };
                        for (&a, &ca) in lrow {
                            for (&b, &cb) in rrow {
                                let e = pairs.entry((w1, ld, a, b)).or_insert(0);
                                *e -= ca * cb;
                            }
                        }
                    }
                }
            }
        }
        let mut keys: Vec<_> = pairs.into_iter().filter(|(_, c)| *c != 0).collect();
        keys.sort_unstable();
        for ((w1, ld, a, b), c) in keys {
            let (w2, rd) = (w - w1, m - ld);
            let qa = self.quotient(w1, ld)?;
            let qb = self.quotient(w2, rd)?;
            let c = Rational::from_integer(BigInt::from(c));
            for (ia, va) in qa.quotient.project(a) {
                for (ib, vb) in qb.quotient.project(b) {
                    let x = BasisElt {
                        weight: w1,
                        depth: ld,
                        index: ia,
                    };
                    let y = BasisElt {
                        weight: w2,
                        depth: rd,
                        index: ib,
                    };
                    add_wedge(&mut out, x, y, &c * &va * &vb);
                }
            }
        }
        Ok(out)
    }

    /// `δ` of a homogeneous combination of generators.
    pub fn cobracket(&self, x: &FormalSum<DihedralGen>) -> Result<WedgeSum, DihedralError> {
        let mut bideg = None;
        for g in x.keys() {
            let b = (g.weight(), g.depth());
            if *bideg.get_or_insert(b) != b {
                return Err(DihedralError::NotHomogeneous);
            }
        }
        let mut out = WedgeSum::new();
        for (g, c) in x.iter() {
            if c.is_zero() {
                continue;
            }
            out.add_scaled(&self.delta_generator(g)?, c);
        }
        Ok(out)
    }

    /// `δ` of a quotient basis vector (cached).
    pub fn delta_basis(&self, b: BasisElt) -> Result<Arc<WedgeSum>, DihedralError> {
        if let Some(d) = self.deltas.lock().expect("cache lock").get(&b) {
            return Ok(d.clone());
        }
        let g = self.basis_generator(b)?;
        let d = Arc::new(self.delta_generator(&g)?);
        self.deltas.lock().expect("cache lock").insert(b, d.clone());
        Ok(d)
    }

    /// `δ` of every relation row of `D_{w,m}`; all must vanish.
    pub fn relation_images(&self, weight: u32, depth: usize) -> Result<Vec<WedgeSum>, DihedralError> {
        let rel = self.relations(weight, depth)?;
        let space = GenSpace::new(self.level, weight, depth);
        let mut cache: HashMap<usize, WedgeSum> = HashMap::new();
        let mut out = Vec::with_capacity(rel.n_rows());
        for row in rel.rows() {
            let mut acc = WedgeSum::new();
            for (j, c) in row {
                if !cache.contains_key(j) {
                    cache.insert(*j, self.delta_generator(&space.generator(*j))?);
                }
                acc.add_scaled(&cache[j], c);
            }
            out.push(acc);
        }
        Ok(out)
    }
}
