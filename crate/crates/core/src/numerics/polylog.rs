//! Multiple polylogarithms at roots of unity through `G`-functions.
//!
//! `Li_{n_1..n_m}(x_1..x_m) = (-1)^m G(0^{n_m-1}, c_m, ..., 0^{n_1-1}, c_1; 1)`
//! with `c_i = (x_i ... x_m)^{-1}`. The value at `1` is split by the Hölder
//! convolution into products of `G`-values at `λ` and `1 - λ`, each of which
//! is a geometrically convergent nested sum with an explicit tail bound.

use num_bigint::BigInt;

use super::bigfloat::{BigComplex, BigFloat};
use super::NumericsError;

/// Argument of a `G`-function: exact zero or a nonzero complex number.
#[derive(Clone, Debug)]
pub(crate) enum GArg {
    Zero,
    Value(BigComplex),
}

impl GArg {
    fn abs(&self) -> f64 {
        match self {
            GArg::Zero => 0.0,
            GArg::Value(z) => z.abs_f64(),
        }
    }
}

/// A value with an upper bound on its absolute error.
pub(crate) struct Approx {
    pub value: BigComplex,
    pub error: f64,
    pub terms: u64,
}

/// Largest `K` attempted in a single nested sum.
pub const MAX_TERMS: u64 = 2_000_000;

/// `Σ_{N > K} binom(N-1, k-1) ρ^N`, or infinity if the ratio test fails at `K + 1`.
fn tail_bound(k: usize, rho: f64, big_k: u64) -> f64 {
    let n = big_k as f64 + 1.0;
    let k = k as f64;
    let ratio = rho * n / (n - k + 1.0);
    if ratio >= 1.0 || n < k {
        return f64::INFINITY;
    }
    let mut log_binom = 0.0;
    let mut i = 1.0;
    while i < k {
        log_binom += ((n - k + i) / i).ln();
        i += 1.0;
    }
    (log_binom + n * rho.ln()).exp() / (1.0 - ratio)
}

/// `G(0^{m_1-1}, b_1, ..., 0^{m_k-1}, b_k; y)` for `|y| < |b_i|`, the last argument nonzero.
fn g_series(args: &[GArg], y: &BigComplex, eps: f64, prec: u32) -> Result<Approx, NumericsError> {
    if args.is_empty() {
        return Ok(Approx {
            value: BigComplex::one(prec),
            error: 0.0,
            terms: 0,
        });
    }
    let mut blocks: Vec<(u32, BigComplex)> = Vec::new();
    let mut zeros = 0;
    for a in args {
        match a {
            GArg::Zero => zeros += 1,
            GArg::Value(b) => {
                blocks.push((zeros + 1, y.div(b)));
                zeros = 0;
            }
        }
    }
    assert_eq!(zeros, 0, "trailing zero argument");
    let k = blocks.len();
    let rho = blocks.iter().map(|(_, u)| u.abs_f64()).fold(0.0, f64::max);
    if rho >= 1.0 {
        return Err(NumericsError::SlowConvergence);
    }
    let mut big_k = k as u64;
    while tail_bound(k, rho, big_k) > eps {
        big_k += 1 + big_k / 8;
        if big_k > MAX_TERMS {
            return Err(NumericsError::SlowConvergence);
        }
    }
    // F_i(n) = H_i(n) / n^{m_i},  H_i(n+1) = u_i (H_i(n) + F_{i+1}(n)),  F_k(n) = u_k^n / n^{m_k}
    let mut h: Vec<BigComplex> = vec![BigComplex::zero(prec); k];
    let mut power = BigComplex::one(prec);
    let mut sum = BigComplex::zero(prec);
    let mut f = vec![BigComplex::zero(prec); k];
    for n in 1..=big_k {
        let nb = BigInt::from(n);
        power = &power * &blocks[k - 1].1;
        for i in (0..k).rev() {
            let num = if i == k - 1 { power.clone() } else { h[i].clone() };
            f[i] = num.div_big(&nb.pow(blocks[i].0));
        }
        sum = &sum + &f[0];
        for i in 0..k - 1 {
            h[i] = &(&h[i] + &f[i + 1]) * &blocks[i].1;
        }
    }
    if k % 2 == 1 {
        sum = -&sum;
    }
    // rounding: a few ulps per operation, k operations per step
    let ulp = 2f64.powi(-(prec as i32));
    let error = tail_bound(k, rho, big_k) + (big_k as f64) * (k as f64) * 16.0 * ulp;
    Ok(Approx {
        value: sum,
        error,
        terms: big_k,
    })
}

/// `G(a_1..a_w; 1)` with `a_1 ≠ 1` and `a_w ≠ 0`, all nonzero arguments on the unit circle.
pub(crate) fn g_at_one(args: &[GArg], eps: f64, prec: u32) -> Result<Approx, NumericsError> {
    let one = BigComplex::one(prec);
    let flipped: Vec<GArg> = args
        .iter()
        .map(|a| match a {
            GArg::Zero => GArg::Value(one.clone()),
            GArg::Value(z) => {
                let d = &one - z;
                // exact 1 comes from the residue 0 root, which is represented exactly
                if d.is_zero() {
                    GArg::Zero
                } else {
                    GArg::Value(d)
                }
            }
        })
        .collect();
    let delta = flipped
        .iter()
        .filter(|a| !matches!(a, GArg::Zero))
        .map(GArg::abs)
        .fold(1.0, f64::min);
    // balance |λ| / 1 against |1 - λ| / δ
    let lambda_q = num_rational::BigRational::from_float(1.0 / (1.0 + delta)).expect("finite λ");
    let lambda = BigComplex::real(BigFloat::from_ratio(&lambda_q, prec));
    let one_minus = &one - &lambda;
    let w = args.len();
    let count = (w + 1) as f64;
    let mut total = BigComplex::zero(prec);
    let mut error = 0.0;
    let mut terms = 0;
    for j in 0..=w {
        let left_args: Vec<GArg> = flipped[..j].iter().rev().cloned().collect();
        let left = g_series(&left_args, &one_minus, eps / (4.0 * count), prec)?;
        let right = g_series(&args[j..], &lambda, eps / (4.0 * count), prec)?;
        let prod = &left.value * &right.value;
        let (la, ra) = (left.value.abs_f64(), right.value.abs_f64());
        error += la * right.error + ra * left.error + left.error * right.error;
        terms += left.terms + right.terms;
        total = if j % 2 == 0 { &total + &prod } else { &total - &prod };
    }
    Ok(Approx {
        value: total,
        error,
        terms,
    })
}
