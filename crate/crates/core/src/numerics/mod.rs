//! High-precision evaluation of multiple polylogarithms at roots of unity,
//! Bernoulli numbers, even zeta values and identity certificates.

pub mod bigfloat;
mod polylog;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::mzvdims::{Certificate, MzvError, ZSymbol};
use crate::qlinalg::Rational;

pub use bigfloat::{bits_for_digits, pi, root_of_unity, BigComplex, BigFloat};
pub use polylog::MAX_TERMS;
use polylog::{g_at_one, GArg};

/// Guard digits carried beyond the requested precision.
pub const GUARD_DIGITS: u32 = 15;
pub const MAX_DIGITS: u32 = 250;
pub const MAX_EVAL_WEIGHT: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("symbol {0} is divergent")]
    Divergent(String),
    #[error("symbol {0} is outside the supported range")]
    Unsupported(String),
    #[error("requested {0} digits, at most {MAX_DIGITS} supported")]
    TooManyDigits(u32),
    #[error("series needs more than {MAX_TERMS} terms")]
    SlowConvergence,
    #[error(transparent)]
    Mzv(#[from] MzvError),
}

/// A computed value and a rigorous bound on its truncation and rounding error.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: BigComplex,
    pub tail_bound: f64,
    pub terms_used: u64,
}

fn working_prec(digits: u32) -> Result<u32, NumericsError> {
    if digits > MAX_DIGITS {
        return Err(NumericsError::TooManyDigits(digits));
    }
    Ok(bits_for_digits(digits + GUARD_DIGITS))
}

/// `Li_{n_1..n_m}(ζ^{x_1}, ..., ζ^{x_m})`, summed over `0 < k_1 < ... < k_m`.
pub fn eval_polylog(z: &ZSymbol, digits: u32) -> Result<EvalResult, NumericsError> {
    let prec = working_prec(digits)?;
    eval_at_prec(z, digits, prec, &pi(prec))
}

fn eval_at_prec(z: &ZSymbol, digits: u32, prec: u32, pi: &BigFloat) -> Result<EvalResult, NumericsError> {
    if !z.is_convergent() {
        return Err(NumericsError::Divergent(z.to_string()));
    }
    if z.weight() > MAX_EVAL_WEIGHT {
        return Err(NumericsError::Unsupported(z.to_string()));
    }
    let m = z.depth();
    if m == 0 {
        return Ok(EvalResult {
            value: BigComplex::one(prec),
            tail_bound: 0.0,
            terms_used: 0,
        });
    }
    let n = z.level;
    let mut suffix = vec![0u32; m + 1];
    for i in (0..m).rev() {
        suffix[i] = (suffix[i + 1] + z.args[i]) % n;
    }
    let mut args = Vec::with_capacity(z.weight() as usize);
    for i in (0..m).rev() {
        args.extend(std::iter::repeat_with(|| GArg::Zero).take(z.parts[i] as usize - 1));
        args.push(GArg::Value(root_of_unity((n - suffix[i]) % n, n, pi)));
    }
    let eps = 10f64.powi(-((digits + GUARD_DIGITS - 3) as i32));
    let g = g_at_one(&args, eps, prec)?;
    let value = if m % 2 == 1 { -&g.value } else { g.value };
    Ok(EvalResult {
        value,
        tail_bound: g.error,
        terms_used: g.terms,
    })
}

/// Exact `B_k` with `B_1 = -1/2`.
pub fn bernoulli(k: u32) -> Rational {
    let k = k as usize;
    let mut b: Vec<Rational> = Vec::with_capacity(k + 1);
    b.push(Rational::one());
    let mut row: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=k {
        // Σ_{j=0}^{n} binom(n+1, j) B_j = 0
        row = next_binomial_row(&row);
        let next = next_binomial_row(&row);
        let s: Rational = (0..n).map(|j| Rational::from_integer(next[j].clone()) * &b[j]).sum();
        b.push(-s / Rational::from_integer(next[n].clone()));
    }
    b.pop().unwrap_or_else(Rational::zero)
}

fn next_binomial_row(row: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(row.len() + 1);
    out.push(BigInt::one());
    for w in row.windows(2) {
        out.push(&w[0] + &w[1]);
    }
    out.push(BigInt::one());
    out
}

/// `ζ(2n) = (-1)^{n-1} (2π)^{2n} B_{2n} / (2 (2n)!)`.
pub fn euler_even_zeta(n: u32, digits: u32) -> Result<BigFloat, NumericsError> {
    let prec = working_prec(digits)?;
    let two_pi = pi(prec).mul_int(2);
    let mut power = BigFloat::from_int(1, prec);
    for _ in 0..2 * n {
        power = &power * &two_pi;
    }
    let fact: BigInt = (1..=u64::from(2 * n)).map(BigInt::from).product();
    let mut coef = bernoulli(2 * n) / Rational::from_integer(fact * 2);
    if n.is_multiple_of(2) {
        coef = -coef;
    }
    Ok(&power * &BigFloat::from_ratio(&coef, prec))
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub residual: String,
    pub pass: bool,
    pub digits: u32,
    pub terms_used: u64,
    #[serde(skip)]
    pub residual_value: f64,
}

/// Evaluates `Σ coef · Π factors` and checks `|residual| < 10^{-digits+5}`.
pub fn verify_certificate(cert: &Certificate, digits: u32) -> Result<Verification, NumericsError> {
    let prec = working_prec(digits)?;
    let p = pi(prec);
    let monomials = cert.monomials()?;
    let mut symbols: Vec<ZSymbol> = monomials.iter().flat_map(|(_, f)| f.iter().cloned()).collect();
    symbols.sort();
    symbols.dedup();
    let values: Vec<EvalResult> = symbols
        .par_iter()
        .map(|z| eval_at_prec(z, digits, prec, &p))
        .collect::<Result<_, _>>()?;
    let table: BTreeMap<&ZSymbol, &EvalResult> = symbols.iter().zip(&values).collect();
    let mut total = BigComplex::zero(prec);
    for (coef, factors) in &monomials {
        let mut v = BigComplex::real(BigFloat::from_ratio(coef, prec));
        for f in factors {
            v = &v * &table[f].value;
        }
        total = &total + &v;
    }
    let residual_value = total.abs_f64();
    let pass = residual_value < 10f64.powi(5 - digits as i32);
    Ok(Verification {
        residual: format!("{residual_value:.3e}"),
        pass,
        digits,
        terms_used: values.iter().map(|v| v.terms_used).sum(),
        residual_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rat;

    #[test]
    fn bernoulli_small() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat(0, 1));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn zeta_two() {
        let r = eval_polylog(&ZSymbol::zeta(&[2]), 30).unwrap();
        assert_eq!(r.value.re.to_decimal(30), "1.644934066848226436472415166646");
        assert!(r.value.im.is_zero());
        assert!(r.tail_bound < 1e-40);
        let e = euler_even_zeta(1, 30).unwrap();
        assert!((&e - &r.value.re).abs().to_f64() < 1e-40);
    }

    #[test]
    fn euler_three() {
        let a = eval_polylog(&ZSymbol::zeta(&[1, 2]), 30).unwrap();
        let b = eval_polylog(&ZSymbol::zeta(&[3]), 30).unwrap();
        assert!((&a.value - &b.value).abs_f64() < 1e-38);
        assert_eq!(b.value.re.to_decimal(20), "1.20205690315959428540");
    }

    #[test]
    fn li2_minus_one() {
        let z = ZSymbol::new(2, vec![2], vec![1]).unwrap();
        let r = eval_polylog(&z, 25).unwrap();
        let want = euler_even_zeta(1, 25).unwrap().div_int(-2);
        assert!((&r.value.re - &want).abs().to_f64() < 1e-30);
    }

    #[test]
    fn depth_one_weight_one() {
        // Li_1(ζ_3) = -log(1 - ζ_3) = -log(√3) + iπ/6
        let z = ZSymbol::new(3, vec![1], vec![1]).unwrap();
        let r = eval_polylog(&z, 20).unwrap();
        let want_re = -0.5 * 3f64.ln();
        let want_im = std::f64::consts::PI / 6.0;
        assert!((r.value.re.to_f64() - want_re).abs() < 1e-14);
        assert!((r.value.im.to_f64() - want_im).abs() < 1e-14);
    }

    #[test]
    fn divergent() {
        assert!(matches!(
            eval_polylog(&ZSymbol::zeta(&[2, 1]), 10),
            Err(NumericsError::Divergent(_))
        ));
    }
}
