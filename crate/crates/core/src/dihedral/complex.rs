//! The weight `w`, depth `m` part of the standard cochain complex
//! `D → Λ²D → ... → Λ^m D`.

use std::collections::HashMap;

use serde::Serialize;

use super::{BasisElt, DihedralCoalgebra, DihedralError};
use crate::combinatorics::permutation_sign;
use crate::formal::FormalSum;
use crate::qlinalg::{rank, Rational, SparseMatrixQ};

/// Terms, differentials and cohomology of one bigraded piece.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub weight: u32,
    pub depth: usize,
    /// `bases[k - 1]` lists the strictly increasing `k`-tuples spanning `Λ^k`.
    pub bases: Vec<Vec<Vec<BasisElt>>>,
    pub term_dims: Vec<usize>,
    /// `differentials[k - 1]: Λ^k → Λ^{k+1}`; row `i` is the image of the `i`-th source tuple.
    pub differentials: Vec<SparseMatrixQ>,
    pub cohomology_dims: Vec<usize>,
    /// Whether every composite of consecutive differentials vanished.
    pub d_squared_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexReport {
    pub level: u32,
    pub weight: u32,
    pub depth: usize,
    pub term_dims: Vec<usize>,
    pub cohomology: Vec<usize>,
    pub euler: i64,
}

impl CochainComplex {
    /// `Σ (-1)^(k-1) dim Λ^k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.term_dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

impl DihedralCoalgebra {
    /// Strictly increasing `k`-tuples of basis elements of total bidegree `(w, m)`.
    pub fn wedge_basis(&self, k: usize, weight: u32, depth: usize) -> Result<Vec<Vec<BasisElt>>, DihedralError> {
        let mut elems = Vec::new();
        for m in 1..=depth {
            for w in m as u32..=weight {
                if depth - m < k - 1 || (weight - w) < (depth - m) as u32 {
                    continue;
                }
                elems.extend(self.basis(w, m)?);
            }
        }
        elems.sort();
        let mut out = Vec::new();
        fn rec(
            elems: &[BasisElt],
            start: usize,
            k: usize,
            w: u32,
            m: usize,
            cur: &mut Vec<BasisElt>,
            out: &mut Vec<Vec<BasisElt>>,
        ) {
            if k == 0 {
                if w == 0 && m == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for i in start..elems.len() {
                let e = elems[i];
                if e.weight > w || e.depth > m {
                    continue;
                }
                cur.push(e);
                rec(elems, i + 1, k - 1, w - e.weight, m - e.depth, cur, out);
                cur.pop();
            }
        }
        rec(&elems, 0, k, weight, depth, &mut Vec::new(), &mut out);
        Ok(out)
    }

    /// The differential of `x_1 ∧ ... ∧ x_k`, extending `δ` by the Leibniz rule.
    pub fn wedge_differential(&self, x: &[BasisElt]) -> Result<FormalSum<Vec<BasisElt>>, DihedralError> {
        let mut out = FormalSum::new();
        for i in 0..x.len() {
            let d = self.delta_basis(x[i])?;
            for ((y, z), c) in d.iter() {
                let mut t: Vec<BasisElt> = Vec::with_capacity(x.len() + 1);
                t.extend_from_slice(&x[..i]);
                t.push(*y);
                t.push(*z);
                t.extend_from_slice(&x[i + 1..]);
                let mut sorted = t.clone();
                sorted.sort();
                if sorted.windows(2).any(|p| p[0] == p[1]) {
                    continue;
                }
                let sign = permutation_sign(&t) * if i % 2 == 0 { 1 } else { -1 };
                out.add_term(sorted, c * Rational::from_integer(sign.into()));
            }
        }
        Ok(out)
    }

    /// The complex `Λ^1 → ... → Λ^m` in bidegree `(w, m)`.
    pub fn cochain_complex(&self, weight: u32, depth: usize) -> Result<CochainComplex, DihedralError> {
        super::check_range(self.level, weight, depth)?;
        let bases: Vec<Vec<Vec<BasisElt>>> = (1..=depth)
            .map(|k| self.wedge_basis(k, weight, depth))
            .collect::<Result<_, _>>()?;
        let term_dims: Vec<usize> = bases.iter().map(Vec::len).collect();
        let mut differentials = Vec::new();
        for k in 1..depth {
            let target: HashMap<&Vec<BasisElt>, usize> = bases[k].iter().enumerate().map(|(i, t)| (t, i)).collect();
            let mut mat = SparseMatrixQ::new(bases[k].len());
            for src in &bases[k - 1] {
                let img = self.wedge_differential(src)?;
                mat.push_row(img.iter().map(|(t, c)| (target[t], c.clone())).collect());
            }
            differentials.push(mat);
        }
        let d_squared_zero = differentials.windows(2).all(|p| p[0].mul(&p[1]).is_zero());
        let ranks: Vec<usize> = differentials.iter().map(rank).collect::<Result<_, _>>()?;
        let cohomology_dims = (0..depth)
            .map(|i| {
                let out_rank = ranks.get(i).copied().unwrap_or(0);
                let in_rank = if i == 0 { 0 } else { ranks[i - 1] };
                term_dims[i] - out_rank - in_rank
            })
            .collect();
        Ok(CochainComplex {
            weight,
            depth,
            bases,
            term_dims,
            differentials,
            cohomology_dims,
            d_squared_zero,
        })
    }

    /// Matrix of `δ` from `D_{w,m}` to the `Λ²` term of bidegree `(w, m)`.
    pub fn cobracket_matrix(
        &self,
        weight: u32,
        depth: usize,
    ) -> Result<(SparseMatrixQ, Vec<Vec<BasisElt>>), DihedralError> {
        let targets = self.wedge_basis(2, weight, depth)?;
        let index: HashMap<(BasisElt, BasisElt), usize> =
            targets.iter().enumerate().map(|(i, t)| ((t[0], t[1]), i)).collect();
        let mut mat = SparseMatrixQ::new(targets.len());
        for b in self.basis(weight, depth)? {
            let d = self.delta_basis(b)?;
            mat.push_row(d.iter().map(|(p, c)| (index[p], c.clone())).collect());
        }
        Ok((mat, targets))
    }

    pub fn report(&self, cx: &CochainComplex) -> ComplexReport {
        ComplexReport {
            level: self.level,
            weight: cx.weight,
            depth: cx.depth,
            term_dims: cx.term_dims.clone(),
            cohomology: cx.cohomology_dims.clone(),
            euler: cx.euler_characteristic(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::Options;

    #[test]
    fn weight_five_depth_two() {
        let d = DihedralCoalgebra::new(1, Options::default()).unwrap();
        let cx = d.cochain_complex(5, 2).unwrap();
        assert_eq!(cx.term_dims, vec![0, 0]);
        assert_eq!(cx.cohomology_dims[0], 0);
    }

    #[test]
    fn hat_adds_bidegree_one_one() {
        let plain = DihedralCoalgebra::new(1, Options::default()).unwrap();
        let hat = DihedralCoalgebra::new(1, Options::hat()).unwrap();
        assert_eq!(plain.dim(1, 1).unwrap(), 0);
        assert_eq!(hat.dim(1, 1).unwrap(), 1);
    }

    #[test]
    fn d_squared_small() {
        let d = DihedralCoalgebra::new(2, Options::default()).unwrap();
        for w in 3..=5 {
            assert!(d.cochain_complex(w, 3).unwrap().d_squared_zero);
        }
    }
}
