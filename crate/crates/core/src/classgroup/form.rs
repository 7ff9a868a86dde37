use num_integer::Integer;

use crate::arith::{kronecker, sqrt_mod, xgcd};
use crate::{Error, Result};

/// A positive definite binary quadratic form `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        let d = self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128;
        i64::try_from(d).expect("discriminant overflow")
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
    }

    /// The principal form of discriminant `d`.
    pub fn identity(d: i64) -> Self {
        let b = d.rem_euclid(2);
        QuadForm::new(1, b, (b * b - d) / 4)
    }

    /// The opposite form `(a, -b, c)`, reduced.
    pub fn inverse(&self) -> Self {
        reduce_unchecked(QuadForm::new(self.a, -self.b, self.c))
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1
    }
}

impl std::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check(f: &QuadForm) -> Result<()> {
    let d = f.b as i128 * f.b as i128 - 4 * f.a as i128 * f.c as i128;
    if f.a <= 0 || d >= 0 || !f.is_primitive() {
        return Err(Error::NonPrimitiveForm {
            a: f.a,
            b: f.b,
            c: f.c,
        });
    }
    Ok(())
}

/// The unique reduced form equivalent to `f`.
pub fn reduce_form(f: QuadForm) -> Result<QuadForm> {
    check(&f)?;
    Ok(reduce_unchecked(f))
}

/// Normalizes `b` into `(-a, a]`, adjusting `c`.
#[inline]
fn normalize(a: i128, b: i128, c: i128) -> (i128, i128, i128) {
    let two_a = 2 * a;
    let mut r = b.rem_euclid(two_a);
    if r > a {
        r -= two_a;
    }
    // b = r + 2 a k  =>  c' = c - k b + a k^2 = c - k (b + r) / 2 ... computed exactly:
    let k = (b - r) / two_a;
    let c = c - k * (b + r) / 2;
    (a, r, c)
}

pub(crate) fn reduce_unchecked(f: QuadForm) -> QuadForm {
    let (mut a, mut b, mut c) = normalize(f.a as i128, f.b as i128, f.c as i128);
    while a > c {
        (a, b, c) = normalize(c, -b, a);
    }
    if b < 0 && (a == c || -b == a) {
        b = -b;
    }
    QuadForm::new(a as i64, b as i64, c as i64)
}

/// Gauss composition of two forms of equal discriminant, reduced.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let (df, dg) = (f.discriminant(), g.discriminant());
    if df != dg {
        return Err(Error::DiscriminantMismatch(df, dg));
    }
    check(f)?;
    check(g)?;
    Ok(compose_unchecked(f, g))
}

/// Composition without validation (Cohen, Alg. 5.4.7).
pub fn compose_unchecked(f: &QuadForm, g: &QuadForm) -> QuadForm {
    let (f, g) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
    let d_disc = b2 * b2 - 4 * a2 * c2;
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (d, y1) = if a2 % a1 == 0 {
        (a1, 0)
    } else {
        let (d, u, _v) = xgcd(a2, a1);
        (d, u)
    };
    let (d1, x2, y2) = if s % d == 0 {
        (d, 0, -1)
    } else {
        let (d1, u, v) = xgcd(s, d);
        (d1, u, -v)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 % v1 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - d_disc) / (4 * a3);
    debug_assert_eq!(b3 * b3 - 4 * a3 * c3, d_disc);
    let (a, b, c) = normalize(a3, b3, c3);
    let mut t = (a, b, c);
    while t.0 > t.2 {
        t = normalize(t.2, -t.1, t.0);
    }
    let (a, mut b, c) = t;
    if b < 0 && (a == c || -b == a) {
        b = -b;
    }
    QuadForm::new(a as i64, b as i64, c as i64)
}

pub fn square(f: &QuadForm) -> QuadForm {
    compose_unchecked(f, f)
}

/// `f^e` by square-and-multiply (`e >= 0`).
pub fn power(f: &QuadForm, mut e: u64) -> QuadForm {
    let mut acc = QuadForm::identity(f.discriminant());
    let mut base = *f;
    while e > 0 {
        if e & 1 == 1 {
            acc = compose_unchecked(&acc, &base);
        }
        base = square(&base);
        e >>= 1;
    }
    acc
}

/// The canonical (unreduced) form `(l, b, c)` with `0 <= b <= l`, or `None`
/// when `(d/l) = -1`. Fails when `l` divides the conductor of `d`.
pub fn prime_form(l: u64, d: i64) -> Result<Option<QuadForm>> {
    let info = crate::arith::discriminant_info(d)?;
    if info.conductor % l == 0 {
        return Err(Error::PrimeDividesConductor { l, d });
    }
    if kronecker(d, l) == -1 {
        return Ok(None);
    }
    let li = l as i64;
    let b = if l == 2 {
        match d.rem_euclid(8) {
            1 => 1,
            0 => 0,
            4 => 2,
            _ => return Ok(None),
        }
    } else {
        let r = sqrt_mod(d.rem_euclid(li) as u64, l).expect("residue by Kronecker") as i64;
        let r = r.min(li - r);
        if (r - d).rem_euclid(2) == 0 {
            r
        } else {
            li - r
        }
    };
    let c = (b as i128 * b as i128 - d as i128) / (4 * l as i128);
    let f = QuadForm::new(li, b, c as i64);
    debug_assert_eq!(f.discriminant(), d);
    Ok(f.is_primitive().then_some(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_form(QuadForm::new(1, 0, 2)).unwrap(), QuadForm::new(1, 0, 2));
        assert_eq!(reduce_form(QuadForm::new(3, 10, 9)).unwrap(), QuadForm::new(1, 0, 2));
        assert_eq!(reduce_form(QuadForm::new(2, -1, 3)).unwrap(), QuadForm::new(2, -1, 3));
        assert!(reduce_form(QuadForm::new(2, 2, 4)).is_err());
        assert!(reduce_form(QuadForm::new(-1, 1, 6)).is_err());
    }

    #[test]
    fn compose_examples() {
        let f = QuadForm::new(2, 1, 3);
        let g = QuadForm::new(2, -1, 3);
        let e = QuadForm::identity(-23);
        assert_eq!(e, QuadForm::new(1, 1, 6));
        assert_eq!(compose(&f, &e).unwrap(), f);
        assert_eq!(compose(&f, &g).unwrap(), e);
        assert_eq!(compose(&f, &f).unwrap(), g);
        assert!(compose(&f, &QuadForm::new(1, 0, 2)).is_err());
    }

    #[test]
    fn prime_form_examples() {
        assert_eq!(prime_form(2, -23).unwrap(), Some(QuadForm::new(2, 1, 3)));
        assert_eq!(prime_form(5, -23).unwrap(), None);
        assert_eq!(prime_form(3, -23).unwrap(), Some(QuadForm::new(3, 1, 2)));
        assert!(prime_form(2, -16).is_err());
        assert_eq!(prime_form(2, -20).unwrap(), Some(QuadForm::new(2, 2, 3)));
    }

    #[test]
    fn power_order() {
        let f = reduce_unchecked(prime_form(3, -71).unwrap().unwrap());
        assert!(!power(&f, 1).is_identity());
        assert!(power(&f, 7).is_identity());
    }
}
