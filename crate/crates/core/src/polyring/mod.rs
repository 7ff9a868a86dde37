//! Dense univariate polynomials over `F_p`.

mod ntt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{Fe, PrimeField};
use crate::{Error, Result};

/// Below this length (of the shorter operand) multiplication is schoolbook.
/// Tuned with `cargo run --release --example tune_mul`.
pub const KARATSUBA_THRESHOLD: usize = 32;
/// At or above this length (of the shorter operand) multiplication uses NTTs.
pub const NTT_THRESHOLD: usize = 3072;

/// A polynomial over `F_p`, coefficients in ascending degree, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    p: u64,
    coeffs: Vec<Fe>,
}

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Root {
    pub value: Fe,
    pub multiplicity: u32,
}

fn trim(v: &mut Vec<Fe>) {
    while v.last().is_some_and(|c| c.raw() == 0) {
        v.pop();
    }
}

impl ModPoly {
    pub fn new(field: &PrimeField, mut coeffs: Vec<Fe>) -> Self {
        trim(&mut coeffs);
        ModPoly {
            p: field.modulus(),
            coeffs,
        }
    }

    pub fn from_u64s(field: &PrimeField, coeffs: &[u64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_u64(c)).collect())
    }

    pub fn from_i64s(field: &PrimeField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: &PrimeField) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &PrimeField) -> Self {
        Self::new(field, vec![field.one()])
    }

    /// `X - r`
    pub fn linear(field: &PrimeField, r: Fe) -> Self {
        Self::new(field, vec![field.neg(r), field.one()])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fe> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Fe> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, field: &PrimeField, x: Fe) -> Fe {
        eval_slice(field, &self.coeffs, x)
    }

    pub fn to_u64s(&self, field: &PrimeField) -> Vec<u64> {
        self.coeffs.iter().map(|&c| field.to_u64(c)).collect()
    }

    fn check(&self, field: &PrimeField) -> Result<()> {
        if self.p != field.modulus() {
            return Err(Error::Precondition(format!(
                "polynomial over F_{} used with F_{}",
                self.p,
                field.modulus()
            )));
        }
        Ok(())
    }
}

pub fn eval_slice(field: &PrimeField, coeffs: &[Fe], x: Fe) -> Fe {
    coeffs
        .iter()
        .rev()
        .fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c))
}

/// Product `f * g`.
pub fn poly_mul(field: &PrimeField, f: &ModPoly, g: &ModPoly) -> Result<ModPoly> {
    f.check(field)?;
    g.check(field)?;
    if f.p != g.p {
        return Err(Error::Precondition("mismatched moduli".into()));
    }
    Ok(ModPoly::new(field, mul(field, &f.coeffs, &g.coeffs)))
}

/// Coefficient-slice product, dispatching on operand length.
pub fn mul(field: &PrimeField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let short = a.len().min(b.len());
    if short < KARATSUBA_THRESHOLD {
        mul_schoolbook(field, a, b)
    } else if short < NTT_THRESHOLD {
        let mut out = vec![field.zero(); a.len() + b.len() - 1];
        mul_karatsuba_unbalanced(field, a, b, &mut out);
        out
    } else {
        ntt::mul_ntt(field, a, b)
    }
}

pub fn mul_schoolbook(field: &PrimeField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Accumulate unreduced 128-bit products in blocks; each product of
    // Montgomery words is below 2^124, so 16 fit without overflow.
    let n = a.len() + b.len() - 1;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lo = k.saturating_sub(b.len() - 1);
        let hi = k.min(a.len() - 1);
        let mut acc = field.zero();
        let mut i = lo;
        while i <= hi {
            let end = (i + 16).min(hi + 1);
            let mut s: u128 = 0;
            for j in i..end {
                s += a[j].raw() as u128 * b[k - j].raw() as u128;
            }
            acc = field.add(acc, reduce_wide(field, s));
            i = end;
        }
        out.push(acc);
    }
    out
}

/// Karatsuba product regardless of length; operands below the threshold
/// still bottom out in schoolbook.
pub fn mul_karatsuba(field: &PrimeField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    mul_karatsuba_unbalanced(field, a, b, &mut out);
    out
}

/// NTT product regardless of length.
pub fn mul_ntt(field: &PrimeField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    ntt::mul_ntt(field, a, b)
}

/// Montgomery-reduces a sum of at most 16 raw products.
#[inline]
fn reduce_wide(field: &PrimeField, s: u128) -> Fe {
    field.reduce_wide(s)
}

fn add_into(field: &PrimeField, dst: &mut [Fe], src: &[Fe]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = field.add(*d, s);
    }
}

fn sub_into(field: &PrimeField, dst: &mut [Fe], src: &[Fe]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = field.sub(*d, s);
    }
}

/// `out += a * b`, `out.len() >= a.len() + b.len() - 1`.
fn mul_karatsuba_unbalanced(field: &PrimeField, a: &[Fe], b: &[Fe], out: &mut [Fe]) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let m = b.len();
    let mut i = 0;
    while i < a.len() {
        let end = (i + m).min(a.len());
        let prod = karatsuba(field, &a[i..end], b);
        add_into(field, &mut out[i..], &prod);
        i = end;
    }
}

fn karatsuba(field: &PrimeField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD || a.len() != b.len() {
        if a.len() != b.len() && a.len().min(b.len()) >= KARATSUBA_THRESHOLD {
            let mut out = vec![field.zero(); a.len() + b.len() - 1];
            mul_karatsuba_unbalanced(field, a, b, &mut out);
            return out;
        }
        return mul_schoolbook(field, a, b);
    }
    let n = a.len();
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let z0 = karatsuba(field, a0, b0);
    let z2 = karatsuba(field, a1, b1);
    let mut sa = a1.to_vec();
    add_into(field, &mut sa, a0);
    let mut sb = b1.to_vec();
    add_into(field, &mut sb, b0);
    let mut z1 = karatsuba(field, &sa, &sb);
    sub_into(field, &mut z1, &z0);
    sub_into(field, &mut z1, &z2);
    let mut out = vec![field.zero(); 2 * n - 1];
    add_into(field, &mut out, &z0);
    add_into(field, &mut out[h..], &z1);
    add_into(field, &mut out[2 * h..], &z2);
    out
}

/// Quotient and remainder of `a` by nonzero `b`.
pub fn divrem(field: &PrimeField, a: &[Fe], b: &[Fe]) -> (Vec<Fe>, Vec<Fe>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = field.inv(b[db]).unwrap();
    let mut q = vec![field.zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = field.mul(r[i + db], lead_inv);
        q[i] = c;
        if c.raw() != 0 {
            for j in 0..db {
                r[i + j] = field.sub(r[i + j], field.mul(c, b[j]));
            }
        }
        r[i + db] = field.zero();
    }
    r.truncate(db);
    trim(&mut r);
    (q, r)
}

/// Remainder of `a` modulo monic `m` in place.
fn rem_monic_in_place(field: &PrimeField, r: &mut Vec<Fe>, m: &[Fe]) {
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = r.pop().unwrap();
        if c.raw() != 0 {
            let base = r.len() - dm;
            for j in 0..dm {
                r[base + j] = field.sub(r[base + j], field.mul(c, m[j]));
            }
        }
    }
    trim(r);
}

fn make_monic(field: &PrimeField, f: &mut [Fe]) {
    if let Some(&l) = f.last() {
        let li = field.inv(l).unwrap();
        for c in f.iter_mut() {
            *c = field.mul(*c, li);
        }
    }
}

/// Monic gcd.
pub fn gcd(field: &PrimeField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        make_monic(field, &mut y);
        rem_monic_in_place(field, &mut x, &y);
        std::mem::swap(&mut x, &mut y);
    }
    make_monic(field, &mut x);
    x
}

/// `base^e mod m` for monic `m` of degree at least 1.
pub fn powmod(field: &PrimeField, base: &[Fe], mut e: u64, m: &[Fe]) -> Vec<Fe> {
    let mut b = base.to_vec();
    rem_monic_in_place(field, &mut b, m);
    let mut acc = vec![field.one()];
    rem_monic_in_place(field, &mut acc, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(field, &acc, &b);
            rem_monic_in_place(field, &mut acc, m);
        }
        e >>= 1;
        if e > 0 {
            b = mul(field, &b, &b);
            rem_monic_in_place(field, &mut b, m);
        }
    }
    acc
}

/// `X^e mod m` by left-to-right square-and-shift.
pub fn pow_x_mod(field: &PrimeField, e: u64, m: &[Fe]) -> Vec<Fe> {
    if e == 0 {
        let mut one = vec![field.one()];
        rem_monic_in_place(field, &mut one, m);
        return one;
    }
    if (2..=SMALL_MODULUS_DEGREE + 1).contains(&m.len()) && m.last() == Some(&field.one()) {
        return pow_x_mod_small(field, e, m);
    }
    let mut acc = vec![field.zero(), field.one()];
    rem_monic_in_place(field, &mut acc, m);
    let bits = 64 - e.leading_zeros();
    for i in (0..bits - 1).rev() {
        acc = mul(field, &acc, &acc);
        rem_monic_in_place(field, &mut acc, m);
        if (e >> i) & 1 == 1 {
            acc.insert(0, field.zero());
            rem_monic_in_place(field, &mut acc, m);
        }
    }
    acc
}

const SMALL_MODULUS_DEGREE: usize = 12;

/// [`pow_x_mod`] on the stack for monic `m` of small degree.
fn pow_x_mod_small(field: &PrimeField, e: u64, m: &[Fe]) -> Vec<Fe> {
    let k = m.len() - 1;
    let zero = field.zero();
    // x^k = -sum m_j x^j
    let mut neg = [zero; SMALL_MODULUS_DEGREE];
    for j in 0..k {
        neg[j] = field.neg(m[j]);
    }
    let reduce = |prod: &mut [Fe; 2 * SMALL_MODULUS_DEGREE]| {
        for i in (k..2 * k).rev() {
            let c = std::mem::replace(&mut prod[i], zero);
            if c.raw() != 0 {
                for j in 0..k {
                    prod[i - k + j] = field.add(prod[i - k + j], field.mul(c, neg[j]));
                }
            }
        }
    };
    let mut acc = [zero; 2 * SMALL_MODULUS_DEGREE];
    acc[1] = field.one();
    reduce(&mut acc);
    let bits = 64 - e.leading_zeros();
    // each wide coefficient collects at most 2k products below p^2
    let lazy = (2 * k as u128) * (field.modulus() as u128) < 1u128 << 64;
    for i in (0..bits - 1).rev() {
        if lazy {
            acc = square_reduce_lazy(field, &acc, &neg, k);
            if (e >> i) & 1 == 1 {
                acc.copy_within(0..k, 1);
                acc[0] = zero;
                reduce(&mut acc);
            }
            continue;
        }
        let mut sq = [zero; 2 * SMALL_MODULUS_DEGREE];
        for a in 0..k {
            let da = field.dbl(acc[a]);
            sq[2 * a] = field.add(sq[2 * a], field.sqr(acc[a]));
            for b in a + 1..k {
                sq[a + b] = field.add(sq[a + b], field.mul(da, acc[b]));
            }
        }
        reduce(&mut sq);
        acc = sq;
        if (e >> i) & 1 == 1 {
            acc.copy_within(0..k, 1);
            acc[0] = zero;
            reduce(&mut acc);
        }
    }
    let mut out = acc[..k].to_vec();
    trim(&mut out);
    out
}

/// `acc^2 mod m` with one Montgomery reduction per coefficient, where
/// `x^k = sum neg_j x^j` mod `m`.
#[inline]
fn square_reduce_lazy(
    field: &PrimeField,
    acc: &[Fe; 2 * SMALL_MODULUS_DEGREE],
    neg: &[Fe; SMALL_MODULUS_DEGREE],
    k: usize,
) -> [Fe; 2 * SMALL_MODULUS_DEGREE] {
    let mut w = [0u128; 2 * SMALL_MODULUS_DEGREE];
    for a in 0..k {
        let x = acc[a].raw() as u128;
        w[2 * a] += x * x;
        let x2 = 2 * x;
        for b in a + 1..k {
            w[a + b] += x2 * acc[b].raw() as u128;
        }
    }
    for i in (k..2 * k - 1).rev() {
        let c = field.mul_raw_montgomery(w[i]).raw() as u128;
        for j in 0..k {
            w[i - k + j] += c * neg[j].raw() as u128;
        }
    }
    let mut out = [field.zero(); 2 * SMALL_MODULUS_DEGREE];
    for j in 0..k {
        out[j] = field.mul_raw_montgomery(w[j]);
    }
    out
}

/// Monic product of the distinct linear factors of `f`: `gcd(X^p - X, f)`.
pub fn split_part(field: &PrimeField, f: &[Fe]) -> Vec<Fe> {
    let mut m = f.to_vec();
    trim(&mut m);
    if m.len() <= 1 {
        return vec![field.one()];
    }
    make_monic(field, &mut m);
    let mut xp = pow_x_mod(field, field.modulus(), &m);
    if xp.len() < 2 {
        xp.resize(2, field.zero());
    }
    xp[1] = field.sub(xp[1], field.one());
    trim(&mut xp);
    gcd(field, &m, &xp)
}

/// One random equal-degree split of a monic squarefree `g` whose roots all
/// lie in `F_p`, `deg g >= 2`.
fn random_split<R: Rng + ?Sized>(field: &PrimeField, g: &[Fe], rng: &mut R) -> (Vec<Fe>, Vec<Fe>) {
    let d = g.len() - 1;
    loop {
        let a = field.random(rng);
        let base = vec![a, field.one()];
        let mut h = powmod(field, &base, (field.modulus() - 1) / 2, g);
        if h.is_empty() {
            h.push(field.zero());
        }
        h[0] = field.sub(h[0], field.one());
        trim(&mut h);
        let mut f1 = gcd(field, g, &h);
        if f1.len() == 1 || f1.len() == d + 1 {
            // a may itself be a root: X + a shares a factor with g.
            if eval_slice(field, g, field.neg(a)).raw() == 0 && d > 1 {
                f1 = vec![a, field.one()];
            } else {
                continue;
            }
        }
        let (f2, r) = divrem(field, g, &f1);
        debug_assert!(r.is_empty());
        return (f1, f2);
    }
}

fn linear_root(field: &PrimeField, g: &[Fe]) -> Fe {
    field.neg(field.mul(g[0], field.inv(g[1]).unwrap()))
}

fn split_all<R: Rng + ?Sized>(field: &PrimeField, g: Vec<Fe>, rng: &mut R, out: &mut Vec<Fe>) {
    let d = g.len() - 1;
    if d == 0 {
        return;
    }
    if d == 1 {
        out.push(linear_root(field, &g));
        return;
    }
    if d == 2 {
        // Quadratic formula avoids a full exponentiation.
        if let Some(rs) = quadratic_roots(field, &g) {
            out.extend(rs);
            return;
        }
    }
    let (a, b) = random_split(field, &g, rng);
    split_all(field, a, rng, out);
    split_all(field, b, rng, out);
}

fn quadratic_roots(field: &PrimeField, g: &[Fe]) -> Option<[Fe; 2]> {
    let inv2a = field.inv(field.dbl(g[2]))?;
    let disc = field.sub(field.sqr(g[1]), field.mul(field.from_u64(4), field.mul(g[2], g[0])));
    let s = field.sqrt(disc)?;
    let nb = field.neg(g[1]);
    Some([
        field.mul(field.add(nb, s), inv2a),
        field.mul(field.sub(nb, s), inv2a),
    ])
}

/// Multiplicity of `r` as a root of `f`, by repeated synthetic division.
pub fn root_multiplicity(field: &PrimeField, f: &[Fe], r: Fe) -> u32 {
    let mut cur = f.to_vec();
    trim(&mut cur);
    let mut e = 0;
    while cur.len() > 1 {
        let (q, rem) = synthetic_div(field, &cur, r);
        if rem.raw() != 0 {
            break;
        }
        cur = q;
        e += 1;
    }
    e
}

/// `f = (X - r) q + rem`.
pub fn synthetic_div(field: &PrimeField, f: &[Fe], r: Fe) -> (Vec<Fe>, Fe) {
    if f.is_empty() {
        return (Vec::new(), field.zero());
    }
    let n = f.len() - 1;
    let mut q = vec![field.zero(); n];
    let mut acc = f[n];
    for i in (0..n).rev() {
        q[i] = acc;
        acc = field.add(f[i], field.mul(acc, r));
    }
    (q, acc)
}

/// Distinct roots of `f` in `F_p`, each found with the given randomness.
pub fn distinct_roots_with<R: Rng + ?Sized>(field: &PrimeField, f: &[Fe], rng: &mut R) -> Vec<Fe> {
    let mut f = f.to_vec();
    trim(&mut f);
    if f.len() <= 1 {
        return Vec::new();
    }
    let g = split_part(field, &f);
    let mut out = Vec::with_capacity(g.len() - 1);
    split_all(field, g, rng, &mut out);
    out
}

/// Distinct roots of `f` with multiplicities, sorted ascending.
pub fn roots_with<R: Rng + ?Sized>(field: &PrimeField, f: &ModPoly, rng: &mut R) -> Vec<Root> {
    let mut rs = distinct_roots_with(field, &f.coeffs, rng);
    rs.sort_by_key(|&r| field.to_u64(r));
    rs.into_iter()
        .map(|r| Root {
            value: r,
            multiplicity: root_multiplicity(field, &f.coeffs, r),
        })
        .collect()
}

fn seed_from(field: &PrimeField, f: &[Fe]) -> u64 {
    f.iter()
        .fold(field.modulus(), |h, c| h.rotate_left(13) ^ c.raw().wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Distinct roots of `f` with multiplicities, sorted ascending. The internal
/// randomness is derived from `f`, so the call is deterministic.
pub fn roots(field: &PrimeField, f: &ModPoly) -> Vec<Root> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(field, &f.coeffs));
    roots_with(field, f, &mut rng)
}

/// Some root of `f` in `F_p`, chosen through `rng`, or `None`.
pub fn find_one_root<R: Rng + ?Sized>(field: &PrimeField, f: &ModPoly, rng: &mut R) -> Option<Fe> {
    find_one_root_slice(field, &f.coeffs, rng)
}

pub fn find_one_root_slice<R: Rng + ?Sized>(field: &PrimeField, f: &[Fe], rng: &mut R) -> Option<Fe> {
    let mut f = f.to_vec();
    trim(&mut f);
    if f.len() <= 1 {
        return None;
    }
    let mut g = split_part(field, &f);
    loop {
        match g.len() - 1 {
            0 => return None,
            1 => return Some(linear_root(field, &g)),
            2 => {
                if let Some(rs) = quadratic_roots(field, &g) {
                    return Some(rs[rng.gen_range(0..2)]);
                }
            }
            _ => {}
        }
        let (a, b) = random_split(field, &g, rng);
        // Weight the branch by its share of roots for a uniform choice.
        let da = (a.len() - 1) as u64;
        let total = (g.len() - 1) as u64;
        g = if rng.gen_range(0..total) < da { a } else { b };
    }
}

/// Monic `prod (X - r)` built pairwise, keeping at most two levels alive.
pub fn product_from_roots(field: &PrimeField, roots: &[Fe]) -> ModPoly {
    if roots.is_empty() {
        return ModPoly::one(field);
    }
    let mut level: Vec<Vec<Fe>> = roots
        .chunks(2)
        .map(|c| match *c {
            [r] => vec![field.neg(r), field.one()],
            [r, s] => vec![field.mul(r, s), field.neg(field.add(r, s)), field.one()],
            _ => unreachable!(),
        })
        .collect();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(mul(field, &a, &b)),
                None => next.push(a),
            }
        }
        level = next;
    }
    ModPoly::new(field, level.pop().unwrap())
}
