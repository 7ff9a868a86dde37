//! Integer factorization for 64-bit inputs.

use super::{is_prime_u64, mul_mod};
use num_integer::Integer;

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            n: 1,
            factors: Vec::new(),
        }
    }

    /// Builds from `(prime, exponent)` pairs; merges duplicates and sorts.
    /// Panics on overflow or zero exponents.
    pub fn from_factors(pairs: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut v: Vec<(u64, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable();
        let mut factors: Vec<(u64, u32)> = Vec::with_capacity(v.len());
        for (q, e) in v {
            match factors.last_mut() {
                Some(last) if last.0 == q => last.1 += e,
                _ => factors.push((q, e)),
            }
        }
        let n = factors.iter().fold(1u64, |acc, &(q, e)| {
            acc.checked_mul(q.checked_pow(e).expect("factor overflow"))
                .expect("factor overflow")
        });
        FactoredInteger { n, factors }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_one(&self) -> bool {
        self.n == 1
    }

    pub fn valuation(&self, q: u64) -> u32 {
        self.factors
            .iter()
            .find(|f| f.0 == q)
            .map_or(0, |f| f.1)
    }

    pub fn divides(&self, m: u64) -> bool {
        m % self.n == 0
    }

    /// Least common multiple of two factored integers.
    pub fn lcm(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut pairs: Vec<(u64, u32)> = self.factors.clone();
        for &(q, e) in &other.factors {
            match pairs.iter_mut().find(|f| f.0 == q) {
                Some(f) => f.1 = f.1.max(e),
                None => pairs.push((q, e)),
            }
        }
        FactoredInteger::from_factors(pairs)
    }

    /// `self / q^k`; `q^k` must divide `self`.
    pub fn remove(&self, q: u64, k: u32) -> FactoredInteger {
        FactoredInteger::from_factors(self.factors.iter().map(|&(p, e)| {
            if p == q {
                (p, e - k)
            } else {
                (p, e)
            }
        }))
    }

    /// Splits the prime support into two parts whose sizes differ by at most one.
    pub fn split_balanced(&self) -> (FactoredInteger, FactoredInteger) {
        let half = self.factors.len() / 2;
        (
            FactoredInteger::from_factors(self.factors[..half].iter().copied()),
            FactoredInteger::from_factors(self.factors[half..].iter().copied()),
        )
    }
}

impl std::fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(q, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{q}")?;
            } else {
                write!(f, "{q}^{e}")?;
            }
        }
        Ok(())
    }
}

const TRIAL_BOUND: u64 = 1 << 10;

/// Complete factorization of `n >= 1` by trial division and Pollard-Brent rho.
pub fn factorize(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factorize(0)");
    let mut n = n;
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    let tz = n.trailing_zeros();
    if tz > 0 {
        pairs.push((2, tz));
        n >>= tz;
    }
    let mut q = 3;
    while q < TRIAL_BOUND && q * q <= n {
        let mut e = 0;
        while n % q == 0 {
            n /= q;
            e += 1;
        }
        if e > 0 {
            pairs.push((q, e));
        }
        q += 2;
    }
    if n > 1 {
        if q * q > n {
            pairs.push((n, 1));
        } else {
            let mut stack = vec![n];
            while let Some(m) = stack.pop() {
                if m == 1 {
                    continue;
                }
                if is_prime_u64(m) {
                    pairs.push((m, 1));
                    continue;
                }
                let d = pollard_brent(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
    }
    FactoredInteger::from_factors(pairs)
}

fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let r = super::isqrt(n);
    if r * r == n {
        return r;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, m) = (2u64, 128usize);
        let (mut g, mut r, mut q) = (1u64, 1usize, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}
