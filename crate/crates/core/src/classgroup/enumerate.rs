use num_integer::Integer;

use super::QuadForm;
use crate::arith::{inv_mod, is_discriminant, isqrt, spf_sieve, sqrt_mod};
use crate::{Error, Result};

/// Roots of `x^2 = d (mod q^e)` for a prime `q`, as residues mod `q^e`.
fn roots_prime_power(d: i64, q: u64, e: u32, sqrt_cache: &mut [u32]) -> Vec<u64> {
    let qe = q.pow(e);
    let dm = d.rem_euclid(qe as i64) as u64;
    if q != 2 && d.rem_euclid(q as i64) != 0 {
        let cached = sqrt_cache[q as usize];
        let r = if cached == u32::MAX {
            let r = sqrt_mod(d.rem_euclid(q as i64) as u64, q).map_or(u32::MAX - 1, |r| r as u32);
            sqrt_cache[q as usize] = r;
            r
        } else {
            cached
        };
        if r == u32::MAX - 1 {
            return Vec::new();
        }
        // Hensel lifting of both roots.
        let mut r = r as u64;
        let mut m = q;
        for _ in 1..e {
            let m2 = m * q;
            let f = ((r as i128 * r as i128 - dm as i128).rem_euclid(m2 as i128)) as u64;
            let inv = inv_mod((2 * r) % m2, m2).expect("unit");
            r = ((r as i128 - (f as i128 * inv as i128)).rem_euclid(m2 as i128)) as u64;
            m = m2;
        }
        return if r == 0 { vec![0] } else { vec![r, qe - r] };
    }
    // Ramified or q = 2: lift every root level by level.
    let mut roots: Vec<u64> = (0..q).filter(|&x| (x * x) % q == dm % q).collect();
    let mut m = q;
    for _ in 1..e {
        let m2 = m * q;
        let target = dm % m2;
        let mut next = Vec::new();
        for &r in &roots {
            for k in 0..q {
                let x = r + k * m;
                if (x as u128 * x as u128 % m2 as u128) as u64 == target {
                    next.push(x);
                }
            }
        }
        roots = next;
        m = m2;
    }
    roots
}

fn crt_combine(r1: &[u64], m1: u64, r2: &[u64], m2: u64) -> Vec<u64> {
    let inv = inv_mod(m1 % m2, m2).expect("coprime moduli");
    let m = m1 as u128 * m2 as u128;
    let mut out = Vec::with_capacity(r1.len() * r2.len());
    for &x1 in r1 {
        for &x2 in r2 {
            let t = ((x2 as i128 - x1 as i128).rem_euclid(m2 as i128) as u128 * inv as u128) % m2 as u128;
            out.push(((x1 as u128 + m1 as u128 * t) % m) as u64);
        }
    }
    out
}

/// All primitive reduced forms of discriminant `d`, sorted by `(a, b)`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    if !is_discriminant(d) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let mut out = Vec::new();
    for_each_reduced_form(d, |f| out.push(f))?;
    Ok(out)
}

/// Visits every primitive reduced form of discriminant `d` in `(a, b)` order.
pub fn for_each_reduced_form(d: i64, mut visit: impl FnMut(QuadForm)) -> Result<()> {
    if !is_discriminant(d) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let a_max = isqrt(d.unsigned_abs() / 3) as usize;
    let spf = spf_sieve(a_max.max(2));
    let mut sqrt_cache = vec![u32::MAX; a_max.max(2) + 1];
    let mut bs: Vec<i64> = Vec::new();
    for a in 1..=a_max as u64 {
        // Factor 4a.
        let mut rest = a;
        let mut e2 = 2u32;
        while rest % 2 == 0 {
            rest /= 2;
            e2 += 1;
        }
        let mut roots = roots_prime_power(d, 2, e2, &mut sqrt_cache);
        let mut modulus = 1u64 << e2;
        while rest > 1 && !roots.is_empty() {
            let q = spf[rest as usize] as u64;
            let mut e = 0;
            while rest % q == 0 {
                rest /= q;
                e += 1;
            }
            let rq = roots_prime_power(d, q, e, &mut sqrt_cache);
            let qe = q.pow(e);
            roots = crt_combine(&roots, modulus, &rq, qe);
            modulus *= qe;
        }
        if roots.is_empty() {
            continue;
        }
        let ai = a as i64;
        let two_a = 2 * ai;
        bs.clear();
        for &r in &roots {
            let mut b = (r % two_a as u64) as i64;
            if b > ai {
                b -= two_a;
            }
            bs.push(b);
        }
        bs.sort_unstable();
        bs.dedup();
        for &b in &bs {
            let c = (b as i128 * b as i128 - d as i128) / (4 * a as i128);
            let c = c as i64;
            if c < ai || (c == ai && b < 0) {
                continue;
            }
            if ai.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            visit(QuadForm::new(ai, b, c));
        }
    }
    Ok(())
}

/// The class number `h(d)`.
pub fn class_number(d: i64) -> Result<u64> {
    let mut h = 0u64;
    for_each_reduced_form(d, |_| h += 1)?;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(d: i64) -> Vec<QuadForm> {
        let mut out = Vec::new();
        let mut a = 1i64;
        while 3 * a * a <= -d {
            for b in -a + 1..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                let f = QuadForm::new(a, b, c);
                if f.is_reduced() && f.is_primitive() {
                    out.push(f);
                }
            }
            a += 1;
        }
        out
    }

    #[test]
    fn examples() {
        assert_eq!(reduced_forms(-4).unwrap(), vec![QuadForm::new(1, 0, 1)]);
        assert_eq!(
            reduced_forms(-23).unwrap(),
            vec![QuadForm::new(1, 1, 6), QuadForm::new(2, -1, 3), QuadForm::new(2, 1, 3)]
        );
        assert_eq!(class_number(-108708).unwrap(), 100);
        assert!(reduced_forms(-5).is_err());
        assert!(reduced_forms(8).is_err());
    }

    #[test]
    fn matches_brute_force() {
        for n in 3..6000i64 {
            let d = -n;
            if !is_discriminant(d) {
                continue;
            }
            assert_eq!(reduced_forms(d).unwrap(), brute(d), "d={d}");
        }
        for d in [-4 * 3i64.pow(8), -3 * 2i64.pow(10), -(1i64 << 20), -7 * 25 * 49 * 9] {
            assert_eq!(reduced_forms(d).unwrap(), brute(d), "d={d}");
        }
    }
}
