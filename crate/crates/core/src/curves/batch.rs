use super::{Curve, Point};
use crate::arith::{Fe, PrimeField};

/// Non-adjacent form of `n`, most significant digit first.
pub fn naf(n: u64) -> Vec<i8> {
    let mut n = n as u128;
    let mut out = Vec::with_capacity(66);
    while n > 0 {
        if n & 1 == 1 {
            let d: i8 = if n & 3 == 3 { -1 } else { 1 };
            out.push(d);
            if d == 1 {
                n -= 1;
            } else {
                n += 1;
            }
        } else {
            out.push(0);
        }
        n >>= 1;
    }
    out.reverse();
    out
}

/// Reusable buffers for [`scalar_mul_batch`].
#[derive(Default, Debug)]
pub struct BatchScratch {
    idx: Vec<usize>,
    den: Vec<Fe>,
    prefix: Vec<Fe>,
}

/// `n P_i` on `E_i` for every `i`, all in lockstep over the signed digits of
/// `n` (from [`naf`]) with one field inversion per step.
pub fn scalar_mul_batch(
    f: &PrimeField,
    curves: &[Curve],
    points: &[Point],
    digits: &[i8],
    scratch: &mut BatchScratch,
) -> Vec<Point> {
    assert_eq!(curves.len(), points.len());
    let mut acc = vec![Point::Infinity; points.len()];
    let mut started = false;
    for &d in digits {
        if started {
            double_all(f, curves, &mut acc, scratch);
        }
        if d != 0 {
            add_all(f, curves, &mut acc, points, d < 0, scratch);
            started = true;
        }
    }
    acc
}

fn double_all(f: &PrimeField, curves: &[Curve], acc: &mut [Point], s: &mut BatchScratch) {
    s.idx.clear();
    s.den.clear();
    for (i, pt) in acc.iter_mut().enumerate() {
        if let Point::Affine(_, y) = *pt {
            if f.is_zero(y) {
                *pt = Point::Infinity;
            } else {
                s.idx.push(i);
                s.den.push(f.dbl(y));
            }
        }
    }
    let ok = f.batch_inv_with(&mut s.den, &mut s.prefix);
    debug_assert!(ok);
    for (k, &i) in s.idx.iter().enumerate() {
        let Point::Affine(x, y) = acc[i] else { unreachable!() };
        let num = f.add(f.mul_small(f.sqr(x), 3), curves[i].a);
        let lam = f.mul(num, s.den[k]);
        let x3 = f.sub(f.sqr(lam), f.dbl(x));
        let y3 = f.sub(f.mul(lam, f.sub(x, x3)), y);
        acc[i] = Point::Affine(x3, y3);
    }
}

fn add_all(f: &PrimeField, curves: &[Curve], acc: &mut [Point], points: &[Point], negate: bool, s: &mut BatchScratch) {
    s.idx.clear();
    s.den.clear();
    for i in 0..acc.len() {
        let q = if negate { curves[i].neg(f, points[i]) } else { points[i] };
        match (acc[i], q) {
            (_, Point::Infinity) => {}
            (Point::Infinity, _) => acc[i] = q,
            (Point::Affine(x1, _), Point::Affine(x2, _)) => {
                if x1 == x2 {
                    acc[i] = curves[i].add(f, acc[i], q);
                } else {
                    s.idx.push(i);
                    s.den.push(f.sub(x2, x1));
                }
            }
        }
    }
    let ok = f.batch_inv_with(&mut s.den, &mut s.prefix);
    debug_assert!(ok);
    for (k, &i) in s.idx.iter().enumerate() {
        let Point::Affine(x1, y1) = acc[i] else { unreachable!() };
        let q = if negate { curves[i].neg(f, points[i]) } else { points[i] };
        let Point::Affine(x2, y2) = q else { unreachable!() };
        let lam = f.mul(f.sub(y2, y1), s.den[k]);
        let x3 = f.sub(f.sub(f.sqr(lam), x1), x2);
        let y3 = f.sub(f.mul(lam, f.sub(x1, x3)), y1);
        acc[i] = Point::Affine(x3, y3);
    }
}
