use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{hilbert_class_poly, JobConfig};
use crate::arith::{factorize, is_prime_u64, isqrt, solve_norm_equation, FactoredInteger, PrimeField};
use crate::curves::{curve_from_j, fast_order, point_count_exhaustive, select_twist, Curve};
use crate::polyring::{find_one_root, ModPoly};
use crate::{Error, Result};

/// Which of the two orders `q + 1 -+ t` to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmSign {
    /// `q + 1 - t`
    Plus,
    /// `q + 1 + t`
    Minus,
}

/// A curve over `F_q` with a certified number of points.
#[derive(Clone, Debug)]
pub struct CmCurve {
    pub q: u64,
    pub t: u64,
    pub v: u64,
    pub curve: Curve,
    pub a: u64,
    pub b: u64,
    pub order: u64,
}

const CERTIFY_POINTS: usize = 64;

/// The lcm of random point orders, until it pins `n` down inside the Hasse
/// interval; exhaustive counting for small `q`.
fn certify<R: Rng + ?Sized>(f: &PrimeField, e: &Curve, n: u64, rng: &mut R) -> bool {
    let q = f.modulus();
    if q < 1 << 16 {
        return point_count_exhaustive(f, e) == n;
    }
    let fac = factorize(n);
    let r = isqrt(4 * q);
    let (lo, hi) = (q + 1 - r, q + 1 + r);
    let mut lcm = FactoredInteger::one();
    for _ in 0..CERTIFY_POINTS {
        let pt = e.random_point(f, rng);
        let Some(o) = fast_order(f, e, pt, &fac) else { return false };
        lcm = lcm.lcm(&o);
        let m = lcm.value();
        if hi / m - (lo - 1) / m == 1 {
            return true;
        }
    }
    false
}

/// A curve over `F_q` with endomorphism ring of discriminant `D` and
/// `q + 1 -+ t` points, where `4q = t^2 - v^2 D`.
pub fn cm_construct<R: Rng + ?Sized>(d: i64, q: u64, sign: CmSign, jobs: usize, rng: &mut R) -> Result<CmCurve> {
    if !is_prime_u64(q) || q < 5 {
        return Err(Error::Precondition(format!("q = {q} must be a prime above 3")));
    }
    let f = PrimeField::new(q)?;
    let (t, v) = solve_norm_equation(d, q).ok_or(Error::NoCmSolution { d, q })?;
    let mut config = JobConfig::new(d, BigUint::from(q));
    config.jobs = jobs;
    config.seed = rng.gen();
    let hd = hilbert_class_poly(&config)?;
    let coeffs: Vec<u64> = hd.coeffs.iter().map(|c| c.to_u64().expect("reduced mod q")).collect();
    let poly = ModPoly::from_u64s(&f, &coeffs);
    let j = find_one_root(&f, &poly, rng).ok_or_else(|| Error::PrimeFailure {
        p: q,
        reason: format!("H_{d} mod q has no root"),
    })?;
    let order = match sign {
        CmSign::Plus => q + 1 - t,
        CmSign::Minus => q + 1 + t,
    };
    let curve = select_twist(&f, &curve_from_j(&f, j), order, rng)?;
    if !certify(&f, &curve, order, rng) {
        return Err(Error::PrimeFailure {
            p: q,
            reason: format!("could not certify order {order}"),
        });
    }
    Ok(CmCurve {
        q,
        t,
        v,
        curve,
        a: f.to_u64(curve.a),
        b: f.to_u64(curve.b),
        order,
    })
}
