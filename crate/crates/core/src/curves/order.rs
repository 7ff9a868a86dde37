use num_integer::Integer;
use rand::Rng;

use super::{Curve, Point};
use crate::arith::{isqrt, FactoredInteger, PrimeField};
use crate::{Error, Result};

/// `#E(F_p)` by summing Legendre symbols; for small `p` only.
pub fn point_count_exhaustive(f: &PrimeField, e: &Curve) -> u64 {
    let p = f.modulus();
    let mut n = (p + 1) as i64;
    for x in 0..p {
        n += f.legendre(e.rhs(f, f.from_u64(x))) as i64;
    }
    n as u64
}

/// The factored order of `pt` if it divides `n`, otherwise `None`.
pub fn fast_order(f: &PrimeField, e: &Curve, pt: Point, n: &FactoredInteger) -> Option<FactoredInteger> {
    match n.factors() {
        [] => pt.is_infinity().then(FactoredInteger::one),
        &[(q, k)] => {
            let mut cur = pt;
            for i in 0..=k {
                if cur.is_infinity() {
                    return Some(if i == 0 {
                        FactoredInteger::one()
                    } else {
                        FactoredInteger::from_factors([(q, i)])
                    });
                }
                if i < k {
                    cur = e.scalar_mul(f, q, cur);
                }
            }
            None
        }
        _ => {
            let (n1, n2) = n.split_balanced();
            let a = fast_order(f, e, e.scalar_mul(f, n2.value(), pt), &n1)?;
            let b = fast_order(f, e, e.scalar_mul(f, n1.value(), pt), &n2)?;
            Some(FactoredInteger::from_factors(a.factors().iter().chain(b.factors()).copied()))
        }
    }
}

/// `a / b` when `b | a`.
fn fdiv(a: &FactoredInteger, b: &FactoredInteger) -> Option<FactoredInteger> {
    let mut out = a.clone();
    for &(q, k) in b.factors() {
        if out.valuation(q) < k {
            return None;
        }
        out = out.remove(q, k);
    }
    Some(out)
}

/// Hasse interval `[p + 1 - floor(2 sqrt p), p + 1 + floor(2 sqrt p)]`.
fn hasse(p: u64) -> (u64, u64) {
    let r = isqrt(4 * p);
    (p + 1 - r, p + 1 + r)
}

/// Elements of `{x = 0 mod m0} ∩ {x = a1 mod m1} ∩ H_p`, up to `cap` of them.
fn candidate_orders(p: u64, m0: u64, m1: u64, cap: usize) -> Vec<u64> {
    let a1 = (2 * p + 2) % m1;
    let g = m0.gcd(&m1);
    if a1 % g != 0 {
        return Vec::new();
    }
    // x = m0 k with m0 k = a1 (mod m1)
    let l = m0 as u128 / g as u128 * m1 as u128;
    let m1g = m1 / g;
    let k0 = if m1g == 1 {
        0
    } else {
        let inv = crate::arith::inv_mod((m0 / g) % m1g, m1g).expect("coprime");
        ((a1 / g) as u128 % m1g as u128 * inv as u128 % m1g as u128) as u64
    };
    let c = (m0 as u128 * k0 as u128) % l;
    let (lo, hi) = hasse(p);
    let mut x = lo as u128 + (c + l - lo as u128 % l) % l;
    let mut out = Vec::new();
    while x <= hi as u128 && out.len() < cap {
        out.push(x as u64);
        x += l;
    }
    out
}

const EXHAUSTIVE_FALLBACK: u64 = 1 << 20;
const MAX_ROUNDS: usize = 400;

/// Whether `#E` is `N0` or `N1`, where `N0 + N1 = 2p + 2`.
pub fn test_curve_order<R: Rng + ?Sized>(
    f: &PrimeField,
    e: &Curve,
    n0: &FactoredInteger,
    n1: &FactoredInteger,
    rng: &mut R,
) -> bool {
    test_curve_order_from(f, e, n0, n1, None, rng)
}

/// As [`test_curve_order`], optionally starting from a known point on `E`.
pub(crate) fn test_curve_order_from<R: Rng + ?Sized>(
    f: &PrimeField,
    e: &Curve,
    n0: &FactoredInteger,
    n1: &FactoredInteger,
    first: Option<Point>,
    rng: &mut R,
) -> bool {
    let p = f.modulus();
    if p <= 11 {
        let n = point_count_exhaustive(f, e);
        return n == n0.value() || n == n1.value();
    }
    let curves = [*e, e.twist(f)];
    let mut ns = [n0.clone(), n1.clone()];
    let mut ms = [FactoredInteger::one(), FactoredInteger::one()];
    let mut first = first;
    let mut s = 0usize;
    for _ in 0..MAX_ROUNDS {
        let pt = first.take().unwrap_or_else(|| curves[s].random_point(f, rng));
        let q = curves[s].scalar_mul(f, ms[s].value(), pt);
        let order = fdiv(&ns[s], &ms[s]).and_then(|rest| fast_order(f, &curves[s], q, &rest));
        match order {
            Some(o) => ms[s] = FactoredInteger::from_factors(ms[s].factors().iter().chain(o.factors()).copied()),
            None => {
                let (m0, m1) = (ms[0].value(), ms[1].value());
                if ns[1].value() % m0 == 0 && ns[0].value() % m1 == 0 && ns[0].value() < ns[1].value() {
                    ns.swap(0, 1);
                    continue;
                }
                return false;
            }
        }
        let cands = candidate_orders(p, ms[0].value(), ms[1].value(), 3);
        if cands.is_empty() {
            return false;
        }
        if cands.iter().all(|&x| x == ns[0].value() || x == ns[1].value()) {
            return true;
        }
        s = 1 - s;
    }
    if p < EXHAUSTIVE_FALLBACK {
        let n = point_count_exhaustive(f, e);
        return n == n0.value() || n == n1.value();
    }
    log::warn!("curve order test at p={p} did not converge");
    false
}

/// `E` if `#E = n`, otherwise its quadratic twist.
pub fn select_twist<R: Rng + ?Sized>(f: &PrimeField, e: &Curve, n: u64, rng: &mut R) -> Result<Curve> {
    let p = f.modulus();
    let (lo, hi) = hasse(p);
    if n < lo || n > hi {
        return Err(Error::Precondition(format!("{n} is outside the Hasse interval for p={p}")));
    }
    if p < 64 {
        return Ok(if point_count_exhaustive(f, e) == n { *e } else { e.twist(f) });
    }
    // each trial on the wrong curve succeeds with probability at most 1/2
    for _ in 0..40 {
        let q = e.random_point(f, rng);
        if !e.scalar_mul(f, n, q).is_infinity() {
            return Ok(e.twist(f));
        }
    }
    Ok(*e)
}
