//! Generating series `{g_1 : ... : g_{m+1} | L_1 : ... : L_{m+1}}` with linear
//! forms `L_i` in free variables, expanded into monomials.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use super::{check_range, DihedralError, DihedralGen, GenSpace};
use crate::combinatorics::compositions;
use crate::formal::FormalSum;
use crate::qlinalg::Rational;

/// Monomials are packed 8 bits per variable.
pub(crate) type Mono = u64;

const BITS: u32 = 8;
pub(crate) const MAX_VARS: usize = 8;

pub(crate) fn mono_unit(j: usize) -> Mono {
    1 << (BITS * j as u32)
}

pub(crate) fn mono_from_exps(e: &[u32]) -> Mono {
    e.iter()
        .enumerate()
        .fold(0, |acc, (j, &x)| acc | (u64::from(x) << (BITS * j as u32)))
}

pub(crate) fn mono_exps(m: Mono, vars: usize) -> Vec<u32> {
    (0..vars).map(|j| ((m >> (BITS * j as u32)) & 0xff) as u32).collect()
}

pub(crate) type Poly = Vec<(Mono, i128)>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut acc: HashMap<Mono, i128> = HashMap::with_capacity(a.len() * b.len());
    for (ma, ca) in a {
        for (mb, cb) in b {
            let c = ca.checked_mul(*cb).expect("series coefficient overflow");
            let e = acc.entry(ma + mb).or_insert(0);
            *e = e.checked_add(c).expect("series coefficient overflow");
        }
    }
    let mut out: Poly = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    out.sort_unstable();
    out
}

/// Powers `0..=max` of a linear form.
fn linear_powers(form: &[i64], max: u32) -> Vec<Poly> {
    let lin: Poly = form
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (mono_unit(j), i128::from(c)))
        .collect();
    let mut out = vec![vec![(0, 1i128)]];
    for e in 1..=max as usize {
        let next = poly_mul(&out[e - 1], &lin);
        out.push(next);
    }
    out
}

/// Accumulated relation instance: monomial -> (column -> integer coefficient).
pub(crate) type SeriesAcc = BTreeMap<Mono, BTreeMap<usize, i128>>;

/// Adds `coef * {slots | forms}` truncated to the weight of `space`.
///
/// `forms` holds `m + 1` linear forms over a common set of free variables;
/// the coefficient of `I_n(slots)` is `Π_i (L_i - L_{m+1})^{n_i - 1}`.
pub(crate) fn accumulate(acc: &mut SeriesAcc, space: &GenSpace, slots: &[u32], forms: &[Vec<i64>], coef: i128) {
    let m = space.depth;
    debug_assert_eq!(slots.len(), m + 1);
    debug_assert_eq!(forms.len(), m + 1);
    let top = space.weight - m as u32;
    let powers: Vec<Vec<Poly>> = (0..m)
        .map(|i| {
            let diff: Vec<i64> = forms[i].iter().zip(&forms[m]).map(|(a, b)| a - b).collect();
            linear_powers(&diff, top)
        })
        .collect();
    for comp in compositions(space.weight, m) {
        let col = space.index_of(&comp.parts, slots);
        let mut p: Poly = vec![(0, coef)];
        for (i, &n) in comp.parts.iter().enumerate() {
            p = poly_mul(&p, &powers[i][(n - 1) as usize]);
            if p.is_empty() {
                break;
            }
        }
        for (mono, c) in p {
            let e = acc.entry(mono).or_default().entry(col).or_insert(0);
            *e = e.checked_add(c).expect("series coefficient overflow");
        }
    }
}

/// A polynomial in free variables with coefficients in formal sums of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPolynomial {
    pub num_vars: usize,
    pub terms: BTreeMap<Vec<u32>, FormalSum<DihedralGen>>,
}

impl TPolynomial {
    pub fn coefficient(&self, exps: &[u32]) -> FormalSum<DihedralGen> {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    fn from_acc(acc: SeriesAcc, space: &GenSpace, num_vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (mono, row) in acc {
            let sum: FormalSum<DihedralGen> = row
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(col, c)| (space.generator(col), Rational::from_integer(BigInt::from(c))))
                .collect();
            if !sum.is_zero() {
                terms.insert(mono_exps(mono, num_vars), sum);
            }
        }
        TPolynomial { num_vars, terms }
    }
}

/// The weight-`w` part of `{slots | forms}` for arbitrary linear forms.
pub fn series_with_forms(
    level: u32,
    slots: &[i64],
    forms: &[Vec<i64>],
    weight: u32,
) -> Result<TPolynomial, DihedralError> {
    let m = slots.len().saturating_sub(1);
    check_range(level, weight, m)?;
    assert_eq!(forms.len(), m + 1, "need one linear form per slot");
    let vars = forms[0].len();
    assert!(vars <= MAX_VARS, "too many free variables");
    let space = GenSpace::new(level, weight, m);
    let n = i64::from(level);
    let slots: Vec<u32> = slots.iter().map(|s| s.rem_euclid(n) as u32).collect();
    let mut acc = SeriesAcc::new();
    accumulate(&mut acc, &space, &slots, forms, 1);
    Ok(TPolynomial::from_acc(acc, &space, vars))
}

fn unit(j: usize, r: usize) -> Vec<i64> {
    let mut v = vec![0; r];
    v[j] = 1;
    v
}

/// `{g_1 : ... : g_{m+1} | t_1 : ... : t_{m+1}}` in `t_1..t_m` with `t_{m+1} = -(t_1 + ... + t_m)`.
pub fn colon_series(level: u32, slots: &[i64], weight: u32) -> Result<TPolynomial, DihedralError> {
    let m = slots.len().saturating_sub(1);
    let mut forms: Vec<Vec<i64>> = (0..m).map(|j| unit(j, m)).collect();
    forms.push(vec![-1; m]);
    series_with_forms(level, slots, &forms, weight)
}

/// `{g_1 : ... : g_{m+1} | t_1, ..., t_{m+1}}`, i.e. the colon series at
/// `t_1 : t_1+t_2 : ... : t_1+...+t_m : 0`, in the free variables `t_1..t_m`.
pub fn comma_series(level: u32, slots: &[i64], weight: u32) -> Result<TPolynomial, DihedralError> {
    let m = slots.len().saturating_sub(1);
    let mut forms = Vec::with_capacity(m + 1);
    let mut cur = vec![0i64; m];
    for j in 0..m {
        cur[j] = 1;
        forms.push(cur.clone());
    }
    forms.push(vec![0; m]);
    series_with_forms(level, slots, &forms, weight)
}

/// `{g_1, ..., g_{m+1} | t_1 : ... : t_{m+1}}` with `g_1 ... g_{m+1} = e`:
/// the colon series at slots `(e : g_1 : g_1 g_2 : ... : g_1 ... g_m)`.
pub fn product_coordinates(level: u32, gs: &[i64], weight: u32) -> Result<TPolynomial, DihedralError> {
    let n = i64::from(level);
    let total = gs.iter().sum::<i64>().rem_euclid(n);
    if total != 0 {
        return Err(DihedralError::ProductConstraint(total as u32));
    }
    let m = gs.len().saturating_sub(1);
    let mut slots = vec![0i64];
    let mut acc = 0i64;
    for g in &gs[..m] {
        acc += g;
        slots.push(acc);
    }
    colon_series(level, &slots, weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rat_int;

    fn gen(parts: &[u32], slots: &[i64], n: u32) -> DihedralGen {
        DihedralGen::new(parts.to_vec(), slots, n)
    }

    #[test]
    fn depth_one_weight_three() {
        let s = colon_series(1, &[0, 0], 3).unwrap();
        assert_eq!(s.coefficient(&[2]), FormalSum::term(gen(&[3], &[0, 0], 1), rat_int(4)));
    }

    #[test]
    fn depth_two_weight_two_is_constant() {
        let s = colon_series(3, &[1, 2, 0], 2).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.coefficient(&[0, 0]), FormalSum::single(gen(&[1, 1], &[1, 2, 0], 3)));
    }

    #[test]
    fn depth_two_weight_three_linear_term() {
        let s = colon_series(1, &[0, 0, 0], 3).unwrap();
        let mut want = FormalSum::term(gen(&[2, 1], &[0, 0, 0], 1), rat_int(2));
        want.add_term(gen(&[1, 2], &[0, 0, 0], 1), rat_int(1));
        assert_eq!(s.coefficient(&[1, 0]), want);
    }

    #[test]
    fn product_coordinates_cube_root() {
        let lhs = product_coordinates(3, &[1, 1, 1], 2).unwrap();
        let rhs = colon_series(3, &[0, 1, 2], 2).unwrap();
        assert_eq!(lhs, rhs);
        assert!(matches!(
            product_coordinates(3, &[1, 1, 0], 2),
            Err(DihedralError::ProductConstraint(2))
        ));
    }

    #[test]
    fn comma_depth_one() {
        // m = 1: {g | t1, t2} = {g | t1 : 0}
        let a = comma_series(1, &[0, 0], 4).unwrap();
        let b = series_with_forms(1, &[0, 0], &[vec![1], vec![0]], 4).unwrap();
        assert_eq!(a, b);
    }
}
