//! Fixed-point binary reals and complex numbers: `mant · 2^{-prec}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::qlinalg::Rational;

pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat {
            mant: BigInt::zero(),
            prec,
        }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        BigFloat {
            mant: BigInt::from(n) << prec,
            prec,
        }
    }

    pub fn from_ratio(r: &Rational, prec: u32) -> Self {
        let num = r.numer() << prec;
        BigFloat {
            mant: round_div(&num, r.denom()),
            prec,
        }
    }

    pub fn from_mantissa(mant: BigInt, prec: u32) -> Self {
        BigFloat { mant, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        BigFloat {
            mant: &self.mant * n,
            prec: self.prec,
        }
    }

    pub fn div_int(&self, n: i64) -> Self {
        BigFloat {
            mant: round_div(&self.mant, &BigInt::from(n)),
            prec: self.prec,
        }
    }

    pub fn div_big(&self, n: &BigInt) -> Self {
        BigFloat {
            mant: round_div(&self.mant, n),
            prec: self.prec,
        }
    }

    pub fn div(&self, other: &BigFloat) -> Self {
        assert_eq!(self.prec, other.prec);
        BigFloat {
            mant: round_div(&(&self.mant << self.prec), &other.mant),
            prec: self.prec,
        }
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        let mant = match prec.cmp(&self.prec) {
            Ordering::Greater => &self.mant << (prec - self.prec),
            Ordering::Less => round_shr(&self.mant, self.prec - prec),
            Ordering::Equal => self.mant.clone(),
        };
        BigFloat { mant, prec }
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits();
        if bits <= 1000 {
            let m = self.mant.to_f64().unwrap_or(f64::NAN);
            // split the scaling to stay inside the f64 exponent range
            let half = self.prec / 2;
            m * 2f64.powi(-(half as i32)) * 2f64.powi(-((self.prec - half) as i32))
        } else {
            let shift = bits as u32 - 64;
            let m = (&self.mant >> shift).to_f64().unwrap_or(f64::NAN);
            m * 2f64.powi(shift as i32 - self.prec as i32)
        }
    }

    /// Decimal expansion rounded to `digits` places after the point.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = round_shr(&(&self.mant * BigInt::from(10u32).pow(digits)), self.prec);
        let neg = scaled.sign() == Sign::Minus;
        let s = scaled.abs().to_string();
        let s = if s.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits as usize);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (f64::from(self.prec) / std::f64::consts::LOG2_10).floor() as u32;
        f.write_str(&self.to_decimal(digits.saturating_sub(5)))
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if (&r << 1u32).abs() >= b.abs() {
        if b.is_positive() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn round_shr(a: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return a.clone();
    }
    (a + (BigInt::from(1) << (s - 1))) >> s
}

impl Add for &BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        assert_eq!(self.prec, rhs.prec);
        BigFloat {
            mant: &self.mant + &rhs.mant,
            prec: self.prec,
        }
    }
}

impl Sub for &BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        assert_eq!(self.prec, rhs.prec);
        BigFloat {
            mant: &self.mant - &rhs.mant,
            prec: self.prec,
        }
    }
}

impl Mul for &BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        assert_eq!(self.prec, rhs.prec);
        BigFloat {
            mant: round_shr(&(&self.mant * &rhs.mant), self.prec),
            prec: self.prec,
        }
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            mant: -&self.mant,
            prec: self.prec,
        }
    }
}

/// `π` by Machin's formula.
pub fn pi(prec: u32) -> BigFloat {
    let guard = 16;
    let p = prec + guard;
    let atan_inv = |x: i64| -> BigInt {
        let one = BigInt::from(1) << p;
        let x2 = BigInt::from(x * x);
        let mut power = one / x;
        let mut sum = power.clone();
        let mut k = 1i64;
        while !power.is_zero() {
            power = &power / &x2;
            let term = &power / (2 * k + 1);
            if k % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            k += 1;
        }
        sum
    };
    let v = atan_inv(5) * 16 - atan_inv(239) * 4;
    BigFloat::from_mantissa(round_shr(&v, guard), prec)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        BigComplex {
            re: BigFloat::zero(prec),
            im: BigFloat::zero(prec),
        }
    }

    pub fn real(re: BigFloat) -> Self {
        let im = BigFloat::zero(re.prec);
        BigComplex { re, im }
    }

    pub fn one(prec: u32) -> Self {
        BigComplex::real(BigFloat::from_int(1, prec))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, c: &BigFloat) -> Self {
        BigComplex {
            re: &self.re * c,
            im: &self.im * c,
        }
    }

    pub fn div_int(&self, n: i64) -> Self {
        BigComplex {
            re: self.re.div_int(n),
            im: self.im.div_int(n),
        }
    }

    pub fn div_big(&self, n: &BigInt) -> Self {
        BigComplex {
            re: self.re.div_big(n),
            im: self.im.div_big(n),
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        BigComplex {
            re: self.re.mul_int(n),
            im: self.im.mul_int(n),
        }
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sqr(&self) -> BigFloat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn div(&self, other: &BigComplex) -> Self {
        let num = self * &other.conj();
        let den = other.norm_sqr();
        BigComplex {
            re: num.re.div(&den),
            im: num.im.div(&den),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn to_decimal(&self, digits: u32) -> (String, String) {
        (self.re.to_decimal(digits), self.im.to_decimal(digits))
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

/// `exp(2πi a / N)`.
pub fn root_of_unity(residue: u32, level: u32, pi: &BigFloat) -> BigComplex {
    let prec = pi.prec;
    let a = i64::from(residue % level);
    let n = i64::from(level);
    match (2 * a).cmp(&n) {
        _ if a == 0 => return BigComplex::one(prec),
        Ordering::Equal => return BigComplex::real(BigFloat::from_int(-1, prec)),
        _ => {}
    }
    if 4 * a == n || 4 * a == 3 * n {
        let s = if 4 * a == n { 1 } else { -1 };
        return BigComplex {
            re: BigFloat::zero(prec),
            im: BigFloat::from_int(s, prec),
        };
    }
    // reduce to |θ| ≤ π
    let a = if 2 * a > n { a - n } else { a };
    let guard = 16;
    let p = prec + guard;
    let theta = pi.with_precision(p).mul_int(2 * a).div_int(n);
    let t2 = &theta * &theta;
    let mut cos = BigFloat::from_int(1, p);
    let mut sin = theta.clone();
    let mut ct = cos.clone();
    let mut st = theta;
    let mut k = 1i64;
    loop {
        ct = (&ct * &t2).div_int((2 * k - 1) * (2 * k));
        st = (&st * &t2).div_int((2 * k) * (2 * k + 1));
        if ct.is_zero() && st.is_zero() {
            break;
        }
        if k % 2 == 1 {
            cos = &cos - &ct;
            sin = &sin - &st;
        } else {
            cos = &cos + &ct;
            sin = &sin + &st;
        }
        k += 1;
    }
    BigComplex {
        re: cos.with_precision(prec),
        im: sin.with_precision(prec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = pi(bits_for_digits(50));
        assert_eq!(p.to_decimal(40), "3.1415926535897932384626433832795028841972");
    }

    #[test]
    fn roots() {
        let prec = bits_for_digits(30);
        let p = pi(prec);
        let z = root_of_unity(1, 6, &p);
        assert_eq!(z.re.to_decimal(25), "0.5000000000000000000000000");
        assert_eq!(z.im.to_decimal(25), "0.8660254037844386467637232");
        let w = root_of_unity(2, 5, &p);
        let w5 = (0..4).fold(w.clone(), |acc, _| &acc * &w);
        assert!((&w5 - &BigComplex::one(prec)).abs_f64() < 1e-30);
    }

    #[test]
    fn decimal_rounding() {
        let prec = 64;
        let x = BigFloat::from_ratio(&Rational::new((-1).into(), 8.into()), prec);
        assert_eq!(x.to_decimal(2), "-0.12");
        assert_eq!(BigFloat::from_int(3, prec).to_decimal(0), "3");
        assert!((x.to_f64() + 0.125).abs() < 1e-15);
    }
}
