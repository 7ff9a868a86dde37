//! Word-size modular arithmetic and number-theoretic primitives.

mod factor;
mod field;

pub use factor::{factorize, FactoredInteger};
pub use field::{sqrt_mod, Fe, PrimeField, MAX_FIELD_BITS};

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = xgcd(a as i128 % m as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).map_or(true, |s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

/// `ceil(lg n)` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Exponent of the prime `q` in `n` (`n > 0`).
pub fn valuation(mut n: u64, q: u64) -> u32 {
    let mut e = 0;
    while n > 0 && n % q == 0 {
        n /= q;
        e += 1;
    }
    e
}

/// The Kronecker symbol `(d/n)`.
pub fn kronecker(d: i64, n: u64) -> i32 {
    if n == 0 {
        return i32::from(d == 1 || d == -1);
    }
    let mut n = n;
    let mut result = 1i32;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        n >>= tz;
    }
    // Jacobi symbol (d/n) for odd n.
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut m = n;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (m % 8 == 3 || m % 8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if n % q == 0 {
            return n == q;
        }
    }
    if n < 37 * 37 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality test: deterministic below `2^64`, otherwise Miller-Rabin with
/// 40 bases drawn from a stream keyed by `n` (error below `2^-80`).
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(m) = n.to_u64() {
        return is_prime_u64(m);
    }
    if n.is_even() {
        return false;
    }
    for &q in &MR_WITNESSES {
        if (n % q).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let two = BigUint::from(2u32);
    let seed = n.iter_u64_digits().fold(0u64, |h, w| h.rotate_left(7) ^ w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'witness: for _ in 0..40 {
        let a = rng.gen_biguint_range(&two, &nm1);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to `bound` (inclusive) by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for `0..=bound`.
pub fn spf_sieve(bound: usize) -> Vec<u32> {
    let mut spf = vec![0u32; bound + 1];
    for i in 2..=bound {
        if spf[i] == 0 {
            let mut j = i;
            while j <= bound {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Decomposition `D = u^2 D_K` of a negative discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantInfo {
    pub d: i64,
    pub fundamental: i64,
    pub conductor: u64,
    pub conductor_factors: FactoredInteger,
}

pub fn is_discriminant(d: i64) -> bool {
    d < 0 && (d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1)
}

pub fn discriminant_info(d: i64) -> crate::Result<DiscriminantInfo> {
    if !is_discriminant(d) {
        return Err(crate::Error::InvalidDiscriminant(d));
    }
    let f = factorize(d.unsigned_abs());
    let mut u = 1u64;
    for &(q, e) in f.factors() {
        let mut k = e / 2;
        while k > 0 {
            let cand = u * q.pow(k);
            let d0 = d / (cand as i64 * cand as i64);
            if d0.rem_euclid(4) == 0 || d0.rem_euclid(4) == 1 {
                u = cand;
                break;
            }
            k -= 1;
        }
    }
    let fundamental = d / (u as i64 * u as i64);
    Ok(DiscriminantInfo {
        d,
        fundamental,
        conductor: u,
        conductor_factors: factorize(u),
    })
}

pub fn is_fundamental(d: i64) -> bool {
    discriminant_info(d).is_ok_and(|i| i.conductor == 1)
}

/// Solves `4q = t^2 - v^2 d` with `t >= 0`, `v >= 1` by the modified
/// Cornacchia algorithm on the fundamental part of `d`.
pub fn solve_norm_equation(d: i64, q: u64) -> Option<(u64, u64)> {
    let info = discriminant_info(d).ok()?;
    let d0 = info.fundamental;
    let u = info.conductor;
    let (t, y) = cornacchia4(d0, q)?;
    let mut sols = vec![(t, y)];
    if d0 == -4 {
        sols.push((2 * y, t / 2));
    } else if d0 == -3 {
        let (t, y) = (t as i128, y as i128);
        for (a, b) in [((t + 3 * y) / 2, (t - y) / 2), ((t - 3 * y) / 2, (t + y) / 2)] {
            sols.push((a.unsigned_abs() as u64, b.unsigned_abs() as u64));
        }
    }
    sols.into_iter()
        .filter(|&(_, y)| y > 0 && y % u == 0)
        .map(|(t, y)| (t, y / u))
        .min_by_key(|&(t, v)| (v, t))
}

/// Primitive solution of `t^2 - y^2 d0 = 4q` for fundamental `d0`.
fn cornacchia4(d0: i64, q: u64) -> Option<(u64, u64)> {
    let n = 4 * q as u128;
    let dd = d0.unsigned_abs() as u128;
    if q == 2 {
        let mut y = 1u128;
        while y * y * dd <= n {
            let r = n - y * y * dd;
            let t = isqrt_u128(r);
            if t * t == r {
                return Some((t as u64, y as u64));
            }
            y += 1;
        }
        return None;
    }
    if kronecker(d0, q) == -1 {
        return None;
    }
    let f = PrimeField::new_unchecked(q);
    let x0 = f.to_u64(f.sqrt(f.from_i64(d0))?);
    let x0 = if (x0 as i128 - d0 as i128).rem_euclid(2) != 0 {
        q - x0
    } else {
        x0
    };
    let (mut a, mut b) = (2 * q as u128, x0 as u128);
    let limit = isqrt_u128(n);
    while b > limit {
        (a, b) = (b, a % b);
    }
    let rem = n.checked_sub(b * b)?;
    if rem % dd != 0 {
        return None;
    }
    let c = rem / dd;
    let y = isqrt_u128(c);
    (y * y == c && y > 0).then_some((b as u64, y as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(12345, 1), 1);
        assert_eq!(kronecker(-8, 2), 0);
        assert_eq!(kronecker(-7, 3), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-23, 5), -1);
    }

    #[test]
    fn kronecker_matches_euler_for_odd_primes() {
        for p in primes_up_to(200).into_iter().skip(1) {
            for d in -60i64..60 {
                let e = pow_mod(d.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
                let expect = match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker(d, p), expect, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn primality_examples() {
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(4382713));
        assert!(!is_prime_u64(4381344));
        assert!(is_prime_u64(18446744073709551557));
        assert!(!is_prime_u64(3215031751));
        let big: BigUint = "115792089237316195423570985008687907853269984665640564039457584007913129639747"
            .parse()
            .unwrap();
        assert!(is_prime(&big));
        assert!(!is_prime(&(&big * 3u32)));
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        let sieve = primes_up_to(1_000_000);
        let mut it = sieve.iter().peekable();
        for n in 0..1_000_000u64 {
            let expect = it.peek().is_some_and(|&&p| p == n);
            if expect {
                it.next();
            }
            assert_eq!(is_prime_u64(n), expect, "n={n}");
        }
        for n in [999_983u64, 999_979, 1_000_001] {
            assert_eq!(is_prime_u64(n), trial_is_prime(n));
        }
    }

    #[test]
    fn discriminant_decomposition() {
        let i = discriminant_info(-108708).unwrap();
        assert_eq!((i.fundamental, i.conductor), (-108708, 1));
        let i = discriminant_info(-16).unwrap();
        assert_eq!((i.fundamental, i.conductor), (-4, 2));
        let i = discriminant_info(-63).unwrap();
        assert_eq!((i.fundamental, i.conductor), (-7, 3));
        assert!(discriminant_info(-5).is_err());
        assert!(is_fundamental(-71));
        assert!(!is_fundamental(-284));
    }

    #[test]
    fn norm_equation_examples() {
        assert_eq!(solve_norm_equation(-71, 107), Some((12, 2)));
        assert_eq!(solve_norm_equation(-7, 23), Some((8, 2)));
        assert_eq!(solve_norm_equation(-108708, 4382713), Some((1370, 12)));
        assert_eq!(solve_norm_equation(-7, 5), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn kronecker_multiplicative(d in -100_000i64..100_000, m in 1u64..100_000, n in 1u64..100_000) {
            prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
        }
    }
}
