//! Complex numbers in binary fixed point over `BigInt`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Real fixed-point context: values are integers scaled by `2^prec`.
#[derive(Clone, Debug)]
pub struct Fixed {
    pub prec: u64,
    pi: BigInt,
    ln2: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: BigInt,
    pub im: BigInt,
}

impl Fixed {
    pub fn new(prec: u64) -> Self {
        // work with guard bits, then drop them
        let g = prec + 32;
        let pi = (atan_inv(5, g) * 16 - atan_inv(239, g) * 4) >> 32;
        let ln2 = ln2(g) >> 32;
        Fixed { prec, pi, ln2 }
    }

    pub fn one(&self) -> BigInt {
        BigInt::one() << self.prec
    }

    pub fn from_int(&self, n: &BigInt) -> BigInt {
        n << self.prec
    }

    pub fn pi(&self) -> &BigInt {
        &self.pi
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.prec
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.prec) / b
    }

    /// `sqrt(n)` for a non-negative integer `n`.
    pub fn sqrt_int(&self, n: u64) -> BigInt {
        (BigInt::from(n) << (2 * self.prec)).sqrt()
    }

    /// Nearest integer.
    pub fn round(&self, a: &BigInt) -> BigInt {
        let half = BigInt::one() << (self.prec - 1);
        (a + half) >> self.prec
    }

    /// Distance from `a` to the nearest integer, as a fixed-point value.
    pub fn frac_dist(&self, a: &BigInt) -> BigInt {
        (a - (self.round(a) << self.prec)).abs()
    }

    pub fn exp(&self, x: &BigInt) -> BigInt {
        // x = k ln 2 + r, |r| <= ln 2 / 2
        let k = self.round(&self.div(x, &self.ln2));
        let r = x - &k * &self.ln2;
        let mut sum = self.one();
        let mut term = self.one();
        let mut n = 1u32;
        while !term.is_zero() {
            term = self.mul(&term, &r) / n;
            sum += &term;
            n += 1;
        }
        let k: i64 = k.try_into().expect("exponent fits");
        if k >= 0 {
            sum << k as u64
        } else {
            sum >> (-k) as u64
        }
    }

    /// `(cos x, sin x)` for `|x| <= 4`.
    pub fn cos_sin(&self, x: &BigInt) -> (BigInt, BigInt) {
        let x2 = self.mul(x, x);
        let mut cos = self.one();
        let mut sin = x.clone();
        let mut tc = self.one();
        let mut ts = x.clone();
        let mut n = 1u32;
        while !tc.is_zero() || !ts.is_zero() {
            tc = -self.mul(&tc, &x2) / ((2 * n - 1) * (2 * n));
            ts = -self.mul(&ts, &x2) / ((2 * n) * (2 * n + 1));
            cos += &tc;
            sin += &ts;
            n += 1;
        }
        (cos, sin)
    }

    pub fn cmul(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: (&a.re * &b.re - &a.im * &b.im) >> self.prec,
            im: (&a.re * &b.im + &a.im * &b.re) >> self.prec,
        }
    }

    pub fn cdiv(&self, a: &Complex, b: &Complex) -> Complex {
        let den = &b.re * &b.re + &b.im * &b.im;
        let re = &a.re * &b.re + &a.im * &b.im;
        let im = &a.im * &b.re - &a.re * &b.im;
        Complex {
            re: (re << self.prec) / &den,
            im: (im << self.prec) / &den,
        }
    }

    pub fn cone(&self) -> Complex {
        Complex {
            re: self.one(),
            im: BigInt::zero(),
        }
    }
}

impl Complex {
    pub fn add(&self, o: &Complex) -> Complex {
        Complex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn scale(&self, k: i64) -> Complex {
        Complex {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `max(|re|, |im|)` as a bit length.
    pub fn bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }
}

/// `atan(1/k) * 2^prec`
fn atan_inv(k: u64, prec: u64) -> BigInt {
    let one = BigInt::one() << prec;
    let k2 = BigInt::from(k * k);
    let mut pow = &one / k;
    let mut sum = pow.clone();
    let mut n = 1u64;
    while !pow.is_zero() {
        pow = -pow / &k2;
        sum += &pow / (2 * n + 1);
        n += 1;
    }
    sum
}

/// `ln 2 * 2^prec = sum 1 / (k 2^k)`
fn ln2(prec: u64) -> BigInt {
    let one = BigInt::one() << prec;
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    loop {
        let term = (&one >> k) / k;
        if term.is_zero() {
            break;
        }
        sum += term;
        k += 1;
    }
    sum
}
