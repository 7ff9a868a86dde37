//! `j(tau)` by q-expansion and `H_D` over `Z` from the reduced forms.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::brute::reduced_forms;
use crate::fixed::{Complex, Fixed};

/// `q = exp(2 pi i tau)` and `1/q`, with `tau = x + i y` in fixed point.
fn nome(fx: &Fixed, x: &BigInt, y: &BigInt) -> (Complex, Complex) {
    let xr = x - (fx.round(x) << fx.prec);
    let two_pi = fx.pi() * 2;
    let (c, s) = fx.cos_sin(&fx.mul(&two_pi, &xr));
    let r = fx.exp(&-fx.mul(&two_pi, y));
    let rinv = fx.exp(&fx.mul(&two_pi, y));
    let q = Complex {
        re: fx.mul(&r, &c),
        im: fx.mul(&r, &s),
    };
    let qinv = Complex {
        re: fx.mul(&rinv, &c),
        im: -fx.mul(&rinv, &s),
    };
    (q, qinv)
}

fn sigma3(n: u64) -> i64 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d * d * d) as i64).sum()
}

fn cpow(fx: &Fixed, b: &Complex, mut e: u64) -> Complex {
    let mut acc = fx.cone();
    let mut base = b.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = fx.cmul(&acc, &base);
        }
        base = fx.cmul(&base, &base);
        e >>= 1;
    }
    acc
}

/// `j(x + i y)` for `y >= sqrt(3)/2`, via `E4^3 / (q prod (1 - q^n)^24)`.
pub fn j_tau(fx: &Fixed, x: &BigInt, y: &BigInt) -> Complex {
    let (q, qinv) = nome(fx, x, y);
    // |q| <= exp(-pi sqrt 3) < 2^-7.8
    let yf = (y >> (fx.prec.saturating_sub(20))).to_string().parse::<f64>().unwrap() / (1u64 << 20) as f64;
    let bits_per_term = (2.0 * std::f64::consts::PI * yf / std::f64::consts::LN_2).max(7.0);
    let terms = (fx.prec as f64 / bits_per_term) as u64 + 8;

    // E4 = 1 + 240 sum sigma3(n) q^n by Horner
    let mut acc = Complex {
        re: BigInt::zero(),
        im: BigInt::zero(),
    };
    for n in (1..=terms).rev() {
        let c = Complex {
            re: fx.from_int(&BigInt::from(sigma3(n))),
            im: BigInt::zero(),
        };
        acc = fx.cmul(&acc.add(&c), &q);
    }
    let e4 = fx.cone().add(&acc.scale(240));

    // prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}, k over all integers
    let mut eta = fx.cone();
    let mut k = 1u64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > terms {
            break;
        }
        let t1 = cpow(fx, &q, g1);
        let t2 = cpow(fx, &q, g1 + k);
        let t = t1.add(&t2);
        eta = if k % 2 == 1 { eta.sub(&t) } else { eta.add(&t) };
        k += 1;
    }
    let e2 = fx.cmul(&eta, &eta);
    let e4p = fx.cmul(&e2, &e2);
    let e8 = fx.cmul(&e4p, &e4p);
    let e16 = fx.cmul(&e8, &e8);
    let e24 = fx.cmul(&e16, &e8);

    let num = fx.cmul(&fx.cmul(&fx.cmul(&e4, &e4), &e4), &qinv);
    fx.cdiv(&num, &e24)
}

/// `j((-b + sqrt(d)) / 2a)`.
pub fn j_of_form(fx: &Fixed, a: i64, b: i64, d: i64) -> Complex {
    let x = fx.from_int(&BigInt::from(-b)) / (2 * a);
    let y = fx.sqrt_int(d.unsigned_abs()) / (2 * a);
    j_tau(fx, &x, &y)
}

/// The Hilbert class polynomial `H_D` over `Z`, ascending coefficients.
///
/// Precision is chosen from the sizes of the roots and raised until every
/// coefficient rounds cleanly.
pub fn hilbert_class_poly(d: i64) -> Vec<BigInt> {
    assert!(d < 0 && (d.rem_euclid(4) <= 1));
    let forms = reduced_forms(d);
    let sq = (d.unsigned_abs() as f64).sqrt();
    let root_bits: Vec<f64> = forms
        .iter()
        .map(|&(a, _, _)| std::f64::consts::PI * sq / (a as f64 * std::f64::consts::LN_2) + 1.0)
        .collect();
    let total: f64 = root_bits.iter().sum::<f64>() + forms.len() as f64;
    let top = root_bits.iter().cloned().fold(0.0, f64::max);
    let mut extra = 64u64;
    loop {
        let prec = (total + top) as u64 + 2 * forms.len() as u64 + extra;
        let fx = Fixed::new(prec);
        let mut poly = vec![fx.cone()];
        for &(a, b, _) in &forms {
            let j = j_of_form(&fx, a, b, d);
            let mut next = vec![
                Complex {
                    re: BigInt::zero(),
                    im: BigInt::zero()
                };
                poly.len() + 1
            ];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] = next[k + 1].add(c);
                next[k] = next[k].sub(&fx.cmul(&j, c));
            }
            poly = next;
        }
        let tol = BigInt::one() << (prec - 8);
        let clean = poly.iter().all(|c| fx.frac_dist(&c.re) < tol && c.im.magnitude() < tol.magnitude());
        if clean {
            return poly.iter().map(|c| fx.round(&c.re)).collect();
        }
        extra *= 2;
    }
}
