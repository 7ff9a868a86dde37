use rand::Rng;

use super::{Curve, Point};
use crate::arith::{Fe, PrimeField};
use crate::polyring::{gcd, pow_x_mod, roots, ModPoly};
use crate::primeselect::{TorsionConstraint, TwoCondition};
use crate::{Error, Result};

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LongWeierstrass {
    pub a1: Fe,
    pub a2: Fe,
    pub a3: Fe,
    pub a4: Fe,
    pub a6: Fe,
}

impl LongWeierstrass {
    /// Tate normal form `y^2 + (1-c)xy - by = x^3 - bx^2`, with `(0,0)` on it.
    pub fn tate(f: &PrimeField, b: Fe, c: Fe) -> Self {
        LongWeierstrass {
            a1: f.sub(f.one(), c),
            a2: f.neg(b),
            a3: f.neg(b),
            a4: f.zero(),
            a6: f.zero(),
        }
    }

    /// The isomorphic short model `Y^2 = X^3 - 27 c4 X - 54 c6` and the image
    /// of `(x, y)` under `X = 36x + 3 b2`, `Y = 108 (2y + a1 x + a3)`.
    pub fn to_short(&self, f: &PrimeField, pt: Option<(Fe, Fe)>) -> Option<(Curve, Option<Point>)> {
        let b2 = f.add(f.sqr(self.a1), f.mul_small(self.a2, 4));
        let b4 = f.add(f.dbl(self.a4), f.mul(self.a1, self.a3));
        let b6 = f.add(f.sqr(self.a3), f.mul_small(self.a6, 4));
        let c4 = f.sub(f.sqr(b2), f.mul_small(b4, 24));
        let b2_3 = f.mul(f.sqr(b2), b2);
        let c6 = f.sub(f.sub(f.mul_small(f.mul(b2, b4), 36), b2_3), f.mul_small(b6, 216));
        let curve = Curve::new(f, f.neg(f.mul_small(c4, 27)), f.neg(f.mul_small(c6, 54)))?;
        let pt = pt.map(|(x, y)| {
            let xx = f.add(f.mul_small(x, 36), f.mul_small(b2, 3));
            let inner = f.add(f.add(f.dbl(y), f.mul(self.a1, x)), self.a3);
            Point::Affine(xx, f.mul_small(inner, 108))
        });
        Some((curve, pt))
    }
}

/// Rational roots of `x^3 + a x + b`: none, one (given), or three.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CubicRoots {
    None,
    One(Fe),
    Three,
}

/// `X^p - X mod m`, trimmed.
fn frobenius_minus_x(f: &PrimeField, m: &[Fe]) -> Vec<Fe> {
    let mut xp = pow_x_mod(f, f.modulus(), m);
    xp.resize(m.len() - 1, f.zero());
    xp[1] = f.sub(xp[1], f.one());
    while xp.last().is_some_and(|c| f.is_zero(*c)) {
        xp.pop();
    }
    xp
}

fn cubic_roots(f: &PrimeField, e: &Curve) -> CubicRoots {
    let cubic = [e.b, e.a, f.zero(), f.one()];
    let g = frobenius_minus_x(f, &cubic);
    // the cubic's discriminant is -(4a^3 + 27b^2); a nonsquare means one root
    if f.legendre(f.neg(e.discriminant_part(f))) == 1 {
        return if g.is_empty() { CubicRoots::Three } else { CubicRoots::None };
    }
    let h = gcd(f, &cubic, &g);
    debug_assert_eq!(h.len(), 2);
    CubicRoots::One(f.neg(f.div(h[0], h[1]).expect("linear gcd")))
}

/// Number of roots of `x^3 + a x + b`, i.e. `#E[2](F_p) - 1`.
pub fn two_torsion_count(f: &PrimeField, e: &Curve) -> usize {
    if f.legendre(f.neg(e.discriminant_part(f))) == -1 {
        return 1;
    }
    match cubic_roots(f, e) {
        CubicRoots::None => 0,
        CubicRoots::One(_) => 1,
        CubicRoots::Three => 3,
    }
}

/// Whether `4 | #E`.
pub fn has_four_torsion(f: &PrimeField, e: &Curve) -> bool {
    match cubic_roots(f, e) {
        CubicRoots::None => false,
        CubicRoots::One(r) => halvable(f, e, r),
        CubicRoots::Three => true,
    }
}

/// Whether the 2-torsion point `(r, 0)` is twice a rational point.
fn halvable(f: &PrimeField, e: &Curve, r: Fe) -> bool {
    // (r, 0) = 2Q iff x(Q) = r +- sqrt(3r^2 + a) with y(Q) rational
    let Some(s) = f.sqrt(f.add(f.mul_small(f.sqr(r), 3), e.a)) else {
        return false;
    };
    f.is_square(e.rhs(f, f.add(r, s))) || f.is_square(e.rhs(f, f.sub(r, s)))
}

/// Whether `3 | #E`, via rational roots of the 3-division polynomial.
pub fn three_divides_order(f: &PrimeField, e: &Curve) -> bool {
    // psi_3 / 3 = x^4 + 2a x^2 + 4b x - a^2/3
    let third = f.inv(f.from_u64(3)).expect("p > 3");
    let psi = [
        f.neg(f.mul(f.sqr(e.a), third)),
        f.mul_small(e.b, 4),
        f.dbl(e.a),
        f.zero(),
        f.one(),
    ];
    let g = frobenius_minus_x(f, &psi);
    let split = gcd(f, &psi, &g);
    let rational = |x: Fe| f.is_square(e.rhs(f, x));
    match split.len() - 1 {
        0 => false,
        1 => rational(f.neg(split[0])),
        2 => {
            // monic quadratic with both roots in F_p
            let half_b = f.mul(split[1], f.inv(f.from_u64(2)).expect("p odd"));
            let s = f.sqrt(f.sub(f.sqr(half_b), split[0])).expect("split quadratic");
            rational(f.sub(s, half_b)) || rational(f.sub(f.neg(s), half_b))
        }
        _ => roots(f, &ModPoly::new(f, split)).into_iter().any(|r| rational(r.value)),
    }
}

/// Whether `#E` satisfies the parts of `c` not guaranteed by the family.
pub fn satisfies_constraint(f: &PrimeField, e: &Curve, c: &TorsionConstraint) -> bool {
    let v2n = c.n.trailing_zeros();
    let ok2 = match c.two {
        TwoCondition::Any => true,
        TwoCondition::Exact(0) => two_torsion_count(f, e) == 0,
        TwoCondition::Exact(1) => match cubic_roots(f, e) {
            CubicRoots::One(r) => !halvable(f, e, r),
            _ => false,
        },
        TwoCondition::AtLeast(k) if k <= v2n => true,
        TwoCondition::AtLeast(1) => two_torsion_count(f, e) > 0,
        TwoCondition::AtLeast(2) => has_four_torsion(f, e),
        _ => unreachable!("validated by check_supported"),
    };
    ok2 && (!c.three || c.n % 3 == 0 || three_divides_order(f, e))
}

fn check_supported(c: &TorsionConstraint) -> Result<()> {
    let level_ok = (1..=12).contains(&c.n);
    let two_ok = match c.two {
        TwoCondition::Any => true,
        TwoCondition::Exact(k) => k <= 1 && k >= c.n.trailing_zeros(),
        TwoCondition::AtLeast(k) => k <= 2 || k <= c.n.trailing_zeros(),
    };
    if level_ok && two_ok {
        Ok(())
    } else {
        Err(Error::UnsupportedTorsion(c.m))
    }
}

const MAX_DEGENERATE: usize = 1000;

/// A random curve from the family `X_1(N)`, `N = c.n`, with `j != 0, 1728`,
/// filtered by the 2- and 3-power conditions of `c`. Returns the curve and
/// its `N`-torsion point when `N > 1`.
pub fn random_curve_with_torsion<R: Rng + ?Sized>(
    f: &PrimeField,
    c: Option<&TorsionConstraint>,
    rng: &mut R,
) -> Result<(Curve, Option<Point>)> {
    let Some(c) = c else {
        return Ok((random_plain(f, rng), None));
    };
    check_supported(c)?;
    let mut degenerate = 0;
    loop {
        let Some((e, pt)) = sample_family(f, c.n, rng) else {
            degenerate += 1;
            if degenerate > MAX_DEGENERATE {
                return Err(Error::DegenerateParametrization(c.n));
            }
            continue;
        };
        if f.is_zero(e.a) || f.is_zero(e.b) {
            continue;
        }
        if satisfies_constraint(f, &e, c) {
            return Ok((e, pt));
        }
    }
}

fn random_plain<R: Rng + ?Sized>(f: &PrimeField, rng: &mut R) -> Curve {
    loop {
        let a = f.random_nonzero(rng);
        let b = f.random_nonzero(rng);
        if let Some(e) = Curve::new(f, a, b) {
            return e;
        }
    }
}

/// One draw from the family for level `n`; `None` on a degenerate parameter.
fn sample_family<R: Rng + ?Sized>(f: &PrimeField, n: u32, rng: &mut R) -> Option<(Curve, Option<Point>)> {
    let origin = Some((f.zero(), f.zero()));
    let (model, pt) = match n {
        1 => return Some((random_plain(f, rng), None)),
        2 => {
            // y^2 = x^3 + a x^2 + b x
            let w = LongWeierstrass {
                a1: f.zero(),
                a2: f.random(rng),
                a3: f.zero(),
                a4: f.random_nonzero(rng),
                a6: f.zero(),
            };
            (w, origin)
        }
        3 => {
            // y^2 + a1 xy + a3 y = x^3
            let w = LongWeierstrass {
                a1: f.random(rng),
                a2: f.zero(),
                a3: f.random_nonzero(rng),
                a4: f.zero(),
                a6: f.zero(),
            };
            (w, origin)
        }
        11 => {
            let (b, c) = x1_11_point(f, rng)?;
            (LongWeierstrass::tate(f, b, c), origin)
        }
        _ => {
            let t = f.random(rng);
            let (b, c) = kubert(f, n, t)?;
            (LongWeierstrass::tate(f, b, c), origin)
        }
    };
    model.to_short(f, pt)
}

/// Tate normal form parameters `(b, c)` for `N in {4..10, 12}` at `t`.
fn kubert(f: &PrimeField, n: u32, t: Fe) -> Option<(Fe, Fe)> {
    let one = f.one();
    let tm1 = f.sub(t, one);
    let t2 = f.sqr(t);
    let tt1 = f.mul(f.sub(f.dbl(t), one), tm1); // (2t-1)(t-1)
    Some(match n {
        4 => (t, f.zero()),
        5 => (t, t),
        6 => (f.add(t, t2), t),
        7 => (f.mul(t2, tm1), f.mul(t, tm1)),
        8 => (tt1, f.div(tt1, t)?),
        9 => {
            let c = f.mul(t2, tm1);
            (f.mul(c, f.add(f.sub(t2, t), one)), c)
        }
        10 => {
            let q = f.add(f.sub(t2, f.mul_small(t, 3)), one);
            let qi = f.inv(q)?;
            let c = f.neg(f.mul(f.mul(t, tt1), qi));
            let b = f.mul(f.mul(f.mul(t2, t), tt1), f.sqr(qi));
            (b, c)
        }
        12 => {
            let u = f.add(f.sub(f.mul_small(t2, 3), f.mul_small(t, 3)), one);
            let w = f.add(f.sub(f.dbl(t2), f.dbl(t)), one);
            let s = f.mul(t, f.sub(f.dbl(t), one));
            let inv = f.inv(tm1)?;
            let inv3 = f.mul(f.sqr(inv), inv);
            let c = f.neg(f.mul(f.mul(s, u), inv3));
            let b = f.mul(f.mul(f.mul(s, w), u), f.mul(inv3, inv));
            (b, c)
        }
        _ => return None,
    })
}

/// A random point of `r^2 - r s^3 + 3 r s^2 - 4 r s + s = 0`, mapped to Tate
/// normal form by `b = r s (r - 1)`, `c = s (r - 1)`.
fn x1_11_point<R: Rng + ?Sized>(f: &PrimeField, rng: &mut R) -> Option<(Fe, Fe)> {
    let s = f.random_nonzero(rng);
    let s2 = f.sqr(s);
    // r^2 - q r + s = 0 with q = s^3 - 3s^2 + 4s
    let q = f.add(f.sub(f.mul(s2, s), f.mul_small(s2, 3)), f.mul_small(s, 4));
    let disc = f.sub(f.sqr(q), f.mul_small(s, 4));
    let root = f.sqrt(disc)?;
    let root = if rng.gen::<bool>() { f.neg(root) } else { root };
    let half = f.inv(f.from_u64(2)).expect("odd p");
    let r = f.mul(f.add(q, root), half);
    let rm1 = f.sub(r, f.one());
    let c = f.mul(s, rm1);
    let b = f.mul(r, c);
    if f.is_zero(b) {
        return None;
    }
    Some((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::point_count_exhaustive;
    use crate::primeselect::DEFAULT_TABLE;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plain(n: u32) -> TorsionConstraint {
        TorsionConstraint {
            m: n,
            two: TwoCondition::Any,
            three: false,
            n,
            benefit: 1.0,
            cost: 1.0,
        }
    }

    fn exact_order(f: &PrimeField, e: &Curve, pt: Point) -> u64 {
        let mut acc = pt;
        let mut n = 1;
        while !acc.is_infinity() {
            acc = e.add(f, acc, pt);
            n += 1;
        }
        n
    }

    #[test]
    fn families_have_n_torsion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [1009u64, 1013, 1019, 1031] {
            let f = PrimeField::new(p).unwrap();
            for n in 1..=12u32 {
                for _ in 0..200 {
                    let (e, pt) = random_curve_with_torsion(&f, Some(&plain(n)), &mut rng).unwrap();
                    assert!(!f.is_zero(e.a) && !f.is_zero(e.b));
                    let count = point_count_exhaustive(&f, &e);
                    assert_eq!(count % n as u64, 0, "p={p} n={n}");
                    if let Some(pt) = pt {
                        assert!(e.contains(&f, &pt));
                        assert_eq!(exact_order(&f, &e, pt), n as u64);
                    }
                }
            }
        }
    }

    #[test]
    fn divisibility_tests_match_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [101u64, 103, 1009, 1021] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..400 {
                let Some(e) = Curve::new(&f, f.random(&mut rng), f.random(&mut rng)) else { continue };
                let n = point_count_exhaustive(&f, &e);
                assert_eq!(two_torsion_count(&f, &e) > 0, n % 2 == 0);
                assert_eq!(has_four_torsion(&f, &e), n % 4 == 0, "p={p} {e:?}");
                assert_eq!(three_divides_order(&f, &e), n % 3 == 0);
            }
        }
    }

    #[test]
    fn table_rows_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = PrimeField::new(2003).unwrap();
        for row in DEFAULT_TABLE {
            for _ in 0..60 {
                let (e, _) = random_curve_with_torsion(&f, Some(row), &mut rng).unwrap();
                let n = point_count_exhaustive(&f, &e);
                assert!(row.satisfied_by(n), "row m={} #E={n}", row.m);
            }
        }
    }

    #[test]
    fn unsupported_rejected() {
        let f = PrimeField::new(1009).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = plain(13);
        assert!(random_curve_with_torsion(&f, Some(&c), &mut rng).is_err());
        c = plain(4);
        c.two = TwoCondition::Exact(0);
        assert!(random_curve_with_torsion(&f, Some(&c), &mut rng).is_err());
    }
}
