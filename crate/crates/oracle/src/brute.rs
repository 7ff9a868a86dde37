//! Brute-force number theory and elliptic curve counts over small fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128 % m as u128;
    let mut b = a as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    r as u64
}

/// Reduced primitive forms `(a, b, c)` of discriminant `d`, ordered by `(a, b)`.
pub fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out
}

pub fn class_number(d: i64) -> u64 {
    reduced_forms(d).len() as u64
}

/// `6 H(n)`: all reduced forms of discriminant `-n`, primitive or not, with
/// `(a, 0, a)` weighted 1/2 and `(a, a, a)` weighted 1/3.
pub fn hurwitz_times_6(n: u64) -> u64 {
    let d = -(n as i64);
    if d.rem_euclid(4) > 1 {
        return 0;
    }
    let mut total = 0;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            total += if b == 0 && a == c {
                3
            } else if b == a && a == c {
                2
            } else {
                6
            };
        }
        a += 1;
    }
    total
}

/// `#E(F_p)` for `y^2 = x^3 + a x + b` by Euler's criterion at every `x`.
pub fn point_count(p: u64, a: u64, b: u64) -> u64 {
    let mut n = 1;
    for x in 0..p {
        let r = ((x * x % p * x + a * x + b) % p) % p;
        n += if r == 0 {
            1
        } else if pow_mod(r, (p - 1) / 2, p) == 1 {
            2
        } else {
            0
        };
    }
    n
}

/// Number of roots of `x^3 + a x + b` in `F_p`.
pub fn cubic_root_count(p: u64, a: u64, b: u64) -> usize {
    (0..p).filter(|&x| (x * x % p * x + a * x + b) % p == 0).count()
}

/// A curve `(a, b)` with the given `j`, for `j` not 0 or 1728.
pub fn curve_with_j(p: u64, j: u64) -> (u64, u64) {
    assert!(j % p != 0 && (1728 % p) != j % p);
    let den = (1728 + p - j % p) % p;
    let k = j % p * pow_mod(den, p - 2, p) % p;
    (3 * k % p, 2 * k % p)
}

/// All `j` other than 0 and 1728 whose curves have trace `+-t`.
pub fn j_with_trace(p: u64, t: u64) -> Vec<u64> {
    (1..p)
        .filter(|&j| j != 1728 % p)
        .filter(|&j| {
            let (a, b) = curve_with_j(p, j);
            let n = point_count(p, a, b);
            n == p + 1 - t || n == p + 1 + t
        })
        .collect()
}

/// Coefficients of classical modular polynomials, `l -> [(i, j, c)]` with `i >= j`.
pub fn parse_modpoly(text: &str) -> BTreeMap<u64, Vec<(u32, u32, BigInt)>> {
    let mut out: BTreeMap<u64, Vec<(u32, u32, BigInt)>> = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let l: u64 = f[0].parse().unwrap();
        out.entry(l)
            .or_default()
            .push((f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap()));
    }
    out
}

/// `Phi(X, Y) mod p` as a dense matrix indexed `[i][j]`.
pub fn modpoly_mod(coeffs: &[(u32, u32, BigInt)], l: u64, p: u64) -> Vec<Vec<u64>> {
    let n = l as usize + 2;
    let mut m = vec![vec![0u64; n]; n];
    let pb = BigInt::from(p);
    for (i, j, c) in coeffs {
        let r = c.mod_floor(&pb).to_u64().unwrap();
        m[*i as usize][*j as usize] = r;
        m[*j as usize][*i as usize] = r;
    }
    m
}

/// `Phi(x, y) mod p`.
pub fn eval_modpoly(m: &[Vec<u64>], x: u64, y: u64, p: u64) -> u64 {
    let mut acc = 0u128;
    let mut xi = 1u128;
    for row in m {
        let mut yj = 1u128;
        for &c in row {
            acc = (acc + c as u128 * xi % p as u128 * yj) % p as u128;
            yj = yj * y as u128 % p as u128;
        }
        xi = xi * x as u128 % p as u128;
    }
    acc as u64
}

/// Roots of `Phi(X, y)` in `F_p` with multiplicity, by trial evaluation and
/// repeated synthetic division.
pub fn modpoly_roots(m: &[Vec<u64>], y: u64, p: u64) -> Vec<(u64, u32)> {
    let n = m.len();
    let mut poly = vec![0u64; n];
    for (i, row) in m.iter().enumerate() {
        let mut yj = 1u128;
        let mut s = 0u128;
        for &c in row {
            s = (s + c as u128 * yj) % p as u128;
            yj = yj * y as u128 % p as u128;
        }
        poly[i] = s as u64;
    }
    let mut out = Vec::new();
    for x in 0..p {
        let mut cur = poly.clone();
        let mut e = 0;
        loop {
            let k = cur.len();
            if k <= 1 {
                break;
            }
            let mut q = vec![0u64; k - 1];
            let mut acc = cur[k - 1] as u128;
            for i in (0..k - 1).rev() {
                q[i] = acc as u64;
                acc = (cur[i] as u128 + acc * x as u128) % p as u128;
            }
            if acc != 0 {
                break;
            }
            cur = q;
            e += 1;
        }
        if e > 0 {
            out.push((x, e));
        }
    }
    out
}

/// `c mod m` for every modulus by direct big-integer CRT.
pub fn crt(residues: &[u64], moduli: &[u64]) -> BigInt {
    let mut x = BigInt::zero();
    let mut m = BigInt::from(1);
    for (&r, &q) in residues.iter().zip(moduli) {
        let qb = BigInt::from(q);
        let mm = m.mod_floor(&qb).to_u64().unwrap();
        let cur = x.mod_floor(&qb).to_u64().unwrap();
        let inv = pow_mod(mm, q - 2, q);
        let k = ((r + q - cur) % q) as u128 * inv as u128 % q as u128;
        x += &m * BigInt::from(k as u64);
        m *= qb;
    }
    x
}
