//! Elliptic curves over `F_p` in short Weierstrass form, curves with prescribed
//! torsion, order testing and the search for a curve of given trace.

mod batch;
mod order;
mod search;
mod torsion;

pub use batch::{naf, scalar_mul_batch, BatchScratch};
pub use order::{fast_order, point_count_exhaustive, select_twist, test_curve_order};
pub use search::{find_trace_curve, TraceSearch, TraceSearchOptions};
pub use torsion::{
    has_four_torsion, random_curve_with_torsion, satisfies_constraint, three_divides_order, two_torsion_count,
    LongWeierstrass,
};

use rand::Rng;

use crate::arith::{Fe, PrimeField};

/// `y^2 = x^3 + a x + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Curve {
    pub a: Fe,
    pub b: Fe,
}

/// An affine point or the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(Fe, Fe),
}

impl Point {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<Fe> {
        match self {
            Point::Infinity => None,
            Point::Affine(x, _) => Some(*x),
        }
    }
}

impl Curve {
    pub fn new(field: &PrimeField, a: Fe, b: Fe) -> Option<Curve> {
        let c = Curve { a, b };
        (!field.is_zero(c.discriminant_part(field))).then_some(c)
    }

    pub fn from_u64s(field: &PrimeField, a: u64, b: u64) -> Option<Curve> {
        Curve::new(field, field.from_u64(a), field.from_u64(b))
    }

    /// `4a^3 + 27b^2`
    pub fn discriminant_part(&self, f: &PrimeField) -> Fe {
        let a3 = f.mul(f.sqr(self.a), self.a);
        f.add(f.mul_small(a3, 4), f.mul_small(f.sqr(self.b), 27))
    }

    /// `x^3 + a x + b`
    pub fn rhs(&self, f: &PrimeField, x: Fe) -> Fe {
        f.add(f.mul(f.add(f.sqr(x), self.a), x), self.b)
    }

    pub fn contains(&self, f: &PrimeField, pt: &Point) -> bool {
        match *pt {
            Point::Infinity => true,
            Point::Affine(x, y) => f.sqr(y) == self.rhs(f, x),
        }
    }

    pub fn j_invariant(&self, f: &PrimeField) -> Fe {
        let a3 = f.mul_small(f.mul(f.sqr(self.a), self.a), 4);
        let den = f.add(a3, f.mul_small(f.sqr(self.b), 27));
        f.mul(f.mul_small(a3, 1728), f.inv(den).expect("nonsingular curve"))
    }

    /// The twist `(a c^2, b c^3)`.
    pub fn twist_by(&self, f: &PrimeField, c: Fe) -> Curve {
        let c2 = f.sqr(c);
        Curve {
            a: f.mul(self.a, c2),
            b: f.mul(self.b, f.mul(c2, c)),
        }
    }

    /// The quadratic twist by the field's fixed non-residue.
    pub fn twist(&self, f: &PrimeField) -> Curve {
        self.twist_by(f, f.nonresidue())
    }

    pub fn neg(&self, f: &PrimeField, pt: Point) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x, f.neg(y)),
        }
    }

    pub fn double(&self, f: &PrimeField, pt: Point) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                if f.is_zero(y) {
                    return Point::Infinity;
                }
                let num = f.add(f.mul_small(f.sqr(x), 3), self.a);
                let lam = f.mul(num, f.inv(f.dbl(y)).expect("nonzero"));
                let x3 = f.sub(f.sqr(lam), f.dbl(x));
                let y3 = f.sub(f.mul(lam, f.sub(x, x3)), y);
                Point::Affine(x3, y3)
            }
        }
    }

    pub fn add(&self, f: &PrimeField, p: Point, q: Point) -> Point {
        match (p, q) {
            (Point::Infinity, _) => q,
            (_, Point::Infinity) => p,
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => {
                if x1 == x2 {
                    return if y1 == y2 { self.double(f, p) } else { Point::Infinity };
                }
                let lam = f.mul(f.sub(y2, y1), f.inv(f.sub(x2, x1)).expect("nonzero"));
                let x3 = f.sub(f.sub(f.sqr(lam), x1), x2);
                let y3 = f.sub(f.mul(lam, f.sub(x1, x3)), y1);
                Point::Affine(x3, y3)
            }
        }
    }

    /// `n P` by a signed-digit ladder.
    pub fn scalar_mul(&self, f: &PrimeField, n: u64, pt: Point) -> Point {
        let mut acc = Point::Infinity;
        for d in naf(n) {
            acc = self.double(f, acc);
            match d {
                1 => acc = self.add(f, acc, pt),
                -1 => acc = self.add(f, acc, self.neg(f, pt)),
                _ => {}
            }
        }
        acc
    }

    /// A uniformly random affine point.
    pub fn random_point<R: Rng + ?Sized>(&self, f: &PrimeField, rng: &mut R) -> Point {
        loop {
            let x = f.random(rng);
            if let Some(y) = f.sqrt(self.rhs(f, x)) {
                let y = if rng.gen::<bool>() { f.neg(y) } else { y };
                return Point::Affine(x, y);
            }
        }
    }
}

/// A curve with the given `j`; `j = 0` and `j = 1728` map to `y^2 = x^3 + 1`
/// and `y^2 = x^3 + x`.
pub fn curve_from_j(f: &PrimeField, j: Fe) -> Curve {
    let c1728 = f.from_u64(1728);
    if f.is_zero(j) {
        return Curve {
            a: f.zero(),
            b: f.one(),
        };
    }
    if j == c1728 {
        return Curve {
            a: f.one(),
            b: f.zero(),
        };
    }
    let k = f.mul(j, f.inv(f.sub(c1728, j)).expect("j != 1728"));
    Curve {
        a: f.mul_small(k, 3),
        b: f.dbl(k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_points(f: &PrimeField, e: &Curve) -> Vec<Point> {
        let p = f.modulus();
        let mut out = vec![Point::Infinity];
        for x in 0..p {
            for y in 0..p {
                let pt = Point::Affine(f.from_u64(x), f.from_u64(y));
                if e.contains(f, &pt) {
                    out.push(pt);
                }
            }
        }
        out
    }

    #[test]
    fn group_law_small_field() {
        let f = PrimeField::new(5).unwrap();
        let e = Curve::from_u64s(&f, 0, 1).unwrap();
        let pts = all_points(&f, &e);
        assert_eq!(pts.len(), 6);
        for &p in &pts {
            assert!(e.scalar_mul(&f, 0, p).is_infinity());
            assert!(e.scalar_mul(&f, 6, p).is_infinity());
            assert!(e.scalar_mul(&f, 5, Point::Infinity).is_infinity());
            for &q in &pts {
                let s = e.add(&f, p, q);
                assert!(e.contains(&f, &s));
                assert_eq!(s, e.add(&f, q, p));
                for &r in &pts {
                    assert_eq!(e.add(&f, s, r), e.add(&f, p, e.add(&f, q, r)));
                }
            }
        }
    }

    #[test]
    fn scalar_mul_matches_repeated_addition() {
        let f = PrimeField::new(1009).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let e = loop {
                if let Some(e) = Curve::new(&f, f.random(&mut rng), f.random(&mut rng)) {
                    break e;
                }
            };
            let p = e.random_point(&f, &mut rng);
            let mut acc = Point::Infinity;
            for n in 0..200u64 {
                assert_eq!(e.scalar_mul(&f, n, p), acc);
                acc = e.add(&f, acc, p);
            }
        }
    }

    #[test]
    fn j_roundtrip() {
        let f = PrimeField::new(23).unwrap();
        for j in 0..23 {
            let e = curve_from_j(&f, f.from_u64(j));
            assert_eq!(f.to_u64(e.j_invariant(&f)), j);
        }
        let e = curve_from_j(&f, f.from_u64(1728));
        assert!(f.is_zero(e.b));
        let e = curve_from_j(&f, f.zero());
        assert!(f.is_zero(e.a));
    }

    #[test]
    fn twist_orders_sum() {
        for p in [7u64, 11, 13, 101] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p.min(20) {
                for b in 0..p.min(20) {
                    let Some(e) = Curve::from_u64s(&f, a, b) else { continue };
                    let n = point_count_exhaustive(&f, &e);
                    let nt = point_count_exhaustive(&f, &e.twist(&f));
                    assert_eq!(n + nt, 2 * p + 2);
                    assert_eq!(e.twist(&f).j_invariant(&f), e.j_invariant(&f));
                }
            }
        }
    }
}
