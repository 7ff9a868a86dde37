//! Prime fields of word size in Montgomery representation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::is_prime_u64;
use crate::{Error, Result};

/// An element of a [`PrimeField`], stored in Montgomery form.
///
/// Elements carry no reference to their field; mixing elements of different
/// fields is a logic error that is not detected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Fe(u64);

impl Fe {
    /// The raw Montgomery word.
    #[inline]
    pub fn raw(self) -> u64 {
        self.0
    }
}

/// Arithmetic context for `F_p`, `p` an odd prime below `2^62`.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    /// `-p^{-1} mod 2^64`
    pinv: u64,
    /// `R^2 mod p`, `R = 2^64`
    r2: u64,
    one: Fe,
    /// `p - 1 = q * 2^s` with `q` odd
    s: u32,
    q: u64,
    /// generator of the 2-Sylow subgroup of `F_p^*`: `z^q` for a non-residue `z`
    sylow_gen: Fe,
}

pub const MAX_FIELD_BITS: u32 = 62;

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 || p >= 1 << MAX_FIELD_BITS || !is_prime_u64(p) {
            return Err(Error::InvalidFieldModulus(p));
        }
        Ok(Self::new_unchecked(p))
    }

    /// Builds the context without certifying primality. `p` must be odd and
    /// below `2^62`; square roots are meaningless if `p` is composite.
    pub fn new_unchecked(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < 1 << MAX_FIELD_BITS);
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let pinv = inv.wrapping_neg();
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        let s = (p - 1).trailing_zeros();
        let q = (p - 1) >> s;
        let mut f = PrimeField {
            p,
            pinv,
            r2,
            one: Fe(r),
            s,
            q,
            sylow_gen: Fe(r),
        };
        if s > 1 {
            // Non-residue drawn from a stream keyed by p, so the context is a
            // pure function of p.
            let mut rng = ChaCha8Rng::seed_from_u64(p ^ 0x5eed_0f_f1e1d);
            let z = loop {
                let z = f.from_u64(rng.gen_range(2..p));
                if f.legendre(z) == -1 {
                    break z;
                }
            };
            f.sylow_gen = f.pow(z, q);
        } else {
            f.sylow_gen = f.from_u64(p - 1);
        }
        f
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.pinv);
        let r = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    /// REDC of a raw double-word `t < p * 2^64`, e.g. a sum of products of
    /// Montgomery words whose high word has been reduced mod `p`.
    #[inline]
    pub fn mul_raw_montgomery(&self, t: u128) -> Fe {
        Fe(self.redc(t))
    }

    /// REDC of an arbitrary double word: `t R^{-1} mod p`.
    #[inline]
    pub fn reduce_wide(&self, t: u128) -> Fe {
        // t R^{-1} = hi + lo R^{-1}, and hi = REDC(hi * (R mod p))
        let hi = self.redc((t >> 64) * self.one.0 as u128);
        let lo = self.redc(t as u64 as u128);
        self.add(Fe(hi), Fe(lo))
    }

    #[inline]
    pub fn from_u64(&self, x: u64) -> Fe {
        Fe(self.redc((x % self.p) as u128 * self.r2 as u128))
    }

    #[inline]
    pub fn from_i64(&self, x: i64) -> Fe {
        let r = x.rem_euclid(self.p as i64) as u64;
        self.from_u64(r)
    }

    pub fn from_i128(&self, x: i128) -> Fe {
        let r = x.rem_euclid(self.p as i128) as u64;
        self.from_u64(r)
    }

    /// Canonical representative in `[0, p)`.
    #[inline]
    pub fn to_u64(&self, a: Fe) -> u64 {
        self.redc(a.0 as u128)
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    #[inline]
    pub fn one(&self) -> Fe {
        self.one
    }

    #[inline]
    pub fn is_zero(&self, a: Fe) -> bool {
        a.0 == 0
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let s = a.0 + b.0;
        Fe(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        Fe(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.p - b.0
        })
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.redc(a.0 as u128 * b.0 as u128))
    }

    #[inline]
    pub fn sqr(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    #[inline]
    pub fn dbl(&self, a: Fe) -> Fe {
        self.add(a, a)
    }

    pub fn mul_small(&self, a: Fe, k: u64) -> Fe {
        self.mul(a, self.from_u64(k))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = self.one;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.sqr(base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        // a.0 = x R mod p; invert the Montgomery word and fix up with R^3.
        // |t_i| <= p < 2^62 throughout
        let (mut r0, mut r1) = (self.p, a.0);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q as i64 * t1);
        }
        debug_assert_eq!(r0, 1);
        let w = t0.rem_euclid(self.p as i64) as u64; // (xR)^{-1}
        // (xR)^{-1} * R^2 * R^2 / R / R = x^{-1} R
        let w = self.redc(w as u128 * self.r2 as u128);
        Some(Fe(self.redc(w as u128 * self.r2 as u128)))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// Inverts every element in place with a single field inversion.
    /// Returns `false`, leaving `xs` untouched, if any element is zero.
    pub fn batch_inv(&self, xs: &mut [Fe]) -> bool {
        let mut scratch = Vec::with_capacity(xs.len());
        self.batch_inv_with(xs, &mut scratch)
    }

    pub fn batch_inv_with(&self, xs: &mut [Fe], prefix: &mut Vec<Fe>) -> bool {
        prefix.clear();
        let mut acc = self.one;
        for &x in xs.iter() {
            if x.0 == 0 {
                return false;
            }
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = match self.inv(acc) {
            Some(i) => i,
            None => return false,
        };
        for i in (0..xs.len()).rev() {
            let x = xs[i];
            xs[i] = self.mul(inv, prefix[i]);
            inv = self.mul(inv, x);
        }
        true
    }

    /// Legendre symbol `(a/p)` in `{-1, 0, 1}`.
    pub fn legendre(&self, a: Fe) -> i32 {
        if a.0 == 0 {
            return 0;
        }
        let e = self.pow(a, (self.p - 1) / 2);
        if e == self.one {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, a: Fe) -> bool {
        self.legendre(a) >= 0
    }

    /// A square root of `a` (Tonelli-Shanks), or `None` for non-residues.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return Some(a);
        }
        if self.s == 1 {
            let r = self.pow(a, (self.p + 1) / 4);
            return (self.sqr(r) == a).then_some(r);
        }
        let mut x = self.pow(a, (self.q + 1) / 2);
        let mut b = self.pow(a, self.q);
        let mut g = self.sylow_gen;
        let mut r = self.s;
        while b != self.one {
            let mut m = 0;
            let mut t = b;
            while t != self.one {
                t = self.sqr(t);
                m += 1;
                if m == r {
                    return None;
                }
            }
            let mut gs = g;
            for _ in 0..(r - m - 1) {
                gs = self.sqr(gs);
            }
            x = self.mul(x, gs);
            g = self.sqr(gs);
            b = self.mul(b, g);
            r = m;
        }
        Some(x)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        self.from_u64(rng.gen_range(0..self.p))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        self.from_u64(rng.gen_range(1..self.p))
    }

    /// A quadratic non-residue (deterministic for a given field).
    pub fn nonresidue(&self) -> Fe {
        if self.s == 1 {
            return self.from_u64(self.p - 1);
        }
        let mut c = 2;
        loop {
            let z = self.from_u64(c);
            if self.legendre(z) == -1 {
                return z;
            }
            c += 1;
        }
    }
}

/// Square root of `a` modulo the odd prime `p`.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let f = PrimeField::new_unchecked(p);
    f.sqrt(f.from_u64(a)).map(|r| f.to_u64(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_small_examples() {
        assert_eq!(sqrt_mod(0, 7), Some(0));
        let r = sqrt_mod(2, 7).unwrap();
        assert!(r == 3 || r == 4);
        assert_eq!(sqrt_mod(3, 7), None);
    }

    #[test]
    fn sqrt_exhaustive_small_primes() {
        for p in (3..500u64).filter(|&p| is_prime_u64(p)) {
            let squares: std::collections::HashSet<u64> = (0..p).map(|x| x * x % p).collect();
            for a in 0..p {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!(!squares.contains(&a), "p={p} a={a}"),
                }
            }
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(15).is_err());
        assert!(PrimeField::new((1 << 62) + 135).is_err());
        assert!(PrimeField::new(4611686018427387847).is_ok());
    }

    #[test]
    fn batch_inversion() {
        let f = PrimeField::new(1009).unwrap();
        let mut xs: Vec<Fe> = (1..50).map(|i| f.from_u64(i)).collect();
        let orig = xs.clone();
        assert!(f.batch_inv(&mut xs));
        for (a, b) in orig.iter().zip(&xs) {
            assert_eq!(f.mul(*a, *b), f.one());
        }
        let mut with_zero = vec![f.one(), f.zero()];
        assert!(!f.batch_inv(&mut with_zero));
    }

    proptest! {
        #[test]
        fn field_ops_match_u128(a in any::<u64>(), b in any::<u64>(), pidx in 0usize..4) {
            let p = [1009u64, 4382713, 1_000_000_007, 4611686018427387847][pidx];
            let f = PrimeField::new(p).unwrap();
            let (x, y) = (f.from_u64(a), f.from_u64(b));
            let (a, b) = (a % p, b % p);
            prop_assert_eq!(f.to_u64(f.add(x, y)), ((a as u128 + b as u128) % p as u128) as u64);
            prop_assert_eq!(f.to_u64(f.sub(x, y)), ((a as u128 + p as u128 - b as u128) % p as u128) as u64);
            prop_assert_eq!(f.to_u64(f.mul(x, y)), ((a as u128 * b as u128) % p as u128) as u64);
            if b != 0 {
                prop_assert_eq!(f.mul(f.inv(y).unwrap(), y), f.one());
            }
        }

        #[test]
        fn wide_reduction(hi in any::<u64>(), lo in any::<u64>(), pidx in 0usize..4) {
            let p = [1009u64, 4382713, 1_000_000_007, 4611686018427387847][pidx];
            let f = PrimeField::new(p).unwrap();
            let t = ((hi as u128) << 64) | lo as u128;
            // the result represents t R^{-2}
            let back = f.to_u64(f.reduce_wide(t)) as u128;
            let r = (1u128 << 64) % p as u128;
            prop_assert_eq!(back * r % p as u128 * r % p as u128, t % p as u128);
        }

        #[test]
        fn sqrt_squares_back(a in any::<u64>(), pidx in 0usize..4) {
            let p = [1009u64, 4382713, 998244353, 4611686018427387847][pidx];
            let f = PrimeField::new(p).unwrap();
            let x = f.from_u64(a);
            match f.sqrt(x) {
                Some(r) => prop_assert_eq!(f.sqr(r), x),
                None => prop_assert_eq!(f.legendre(x), -1),
            }
        }
    }
}
