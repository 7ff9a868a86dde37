//! Multiplication of long polynomials over `F_p` via three NTT primes and Garner CRT.
//!
//! The transforms work on raw words with lazy Montgomery reduction: values
//! stay in `[0, 4q)` between butterflies, which needs `q < 2^62`.

use crate::arith::{Fe, PrimeField};
use std::sync::OnceLock;

const NTT_PRIMES: [(u64, u64); 3] = [
    (4611685944339202049, 3),
    (4611685941117976577, 3),
    (4611685917495656449, 11),
];

/// Largest supported transform length is `2^30`.
const MAX_LOG_LEN: u32 = 30;

struct NttPrime {
    q: u64,
    /// `-q^{-1} mod 2^64`
    qinv: u64,
    field: PrimeField,
    /// Montgomery words of `g^((q-1)/2^k)` for `k = 0..=MAX_LOG_LEN`
    roots: Vec<u64>,
    inv_roots: Vec<u64>,
}

impl NttPrime {
    /// `a b R^{-1}`, in `[0, 2q)` when `a b < 4 q^2`.
    #[inline(always)]
    fn mulr(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.qinv);
        ((t + m as u128 * self.q as u128) >> 64) as u64
    }

    #[inline(always)]
    fn normalize(&self, mut x: u64) -> u64 {
        if x >= 2 * self.q {
            x -= 2 * self.q;
        }
        if x >= self.q {
            x -= self.q;
        }
        x
    }
}

fn ntt_primes() -> &'static [NttPrime; 3] {
    static CELL: OnceLock<[NttPrime; 3]> = OnceLock::new();
    CELL.get_or_init(|| {
        NTT_PRIMES.map(|(q, g)| {
            let field = PrimeField::new_unchecked(q);
            let g = field.from_u64(g);
            let mut roots = Vec::new();
            let mut inv_roots = Vec::new();
            for k in 0..=MAX_LOG_LEN {
                let w = field.pow(g, (q - 1) >> k);
                inv_roots.push(field.inv(w).unwrap().raw());
                roots.push(w.raw());
            }
            let mut inv = 1u64;
            for _ in 0..6 {
                inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
            }
            NttPrime {
                q,
                qinv: inv.wrapping_neg(),
                field,
                roots,
                inv_roots,
            }
        })
    })
}

/// In-place transform of words in `[0, 4q)`; the output is in `[0, 4q)`.
fn transform(pr: &NttPrime, a: &mut [u64], inverse: bool, twiddles: &mut Vec<u64>) {
    let n = a.len();
    let log_n = n.trailing_zeros();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let table = if inverse { &pr.inv_roots } else { &pr.roots };
    let two_q = 2 * pr.q;
    let one = pr.field.one().raw();
    for s in 1..=log_n {
        let half = 1usize << (s - 1);
        let wm = table[s as usize];
        twiddles.clear();
        let mut w = one;
        for _ in 0..half {
            twiddles.push(w);
            w = pr.normalize(pr.mulr(w, wm));
        }
        for chunk in a.chunks_exact_mut(2 * half) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(twiddles.iter()) {
                let mut u = *x;
                if u >= two_q {
                    u -= two_q;
                }
                let t = pr.mulr(w, *y);
                *x = u + t;
                *y = u + two_q - t;
            }
        }
    }
}

/// Cyclic convolution mod `q` of raw words below `2^62`, as integers in `[0, q)`.
fn convolve_mod(pr: &NttPrime, a: &[Fe], b: &[Fe], len: usize, twiddles: &mut Vec<u64>) -> Vec<u64> {
    let mut fa = vec![0u64; len];
    let mut fb = vec![0u64; len];
    for (d, x) in fa.iter_mut().zip(a) {
        *d = x.raw();
    }
    for (d, x) in fb.iter_mut().zip(b) {
        *d = x.raw();
    }
    transform(pr, &mut fa, false, twiddles);
    transform(pr, &mut fb, false, twiddles);
    for (x, &y) in fa.iter_mut().zip(&fb) {
        *x = pr.mulr(pr.normalize(*x), pr.normalize(y));
    }
    transform(pr, &mut fa, true, twiddles);
    // the pointwise products left a factor R^{-1}; undo it and divide by len
    let f = &pr.field;
    let r_mod_q = f.from_u64(u64::MAX % pr.q + 1);
    // mulr(x, k) = x R / len
    let k = f.mul(r_mod_q, f.inv(f.from_u64(len as u64)).unwrap()).raw();
    fa.truncate(a.len() + b.len() - 1);
    for x in fa.iter_mut() {
        *x = pr.normalize(pr.mulr(*x, k));
    }
    fa
}

/// Product of two nonempty coefficient vectors over `field`.
pub(crate) fn mul_ntt(field: &PrimeField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let out_len = a.len() + b.len() - 1;
    let len = out_len.next_power_of_two();
    assert!(len.trailing_zeros() <= MAX_LOG_LEN, "NTT length too large");
    let primes = ntt_primes();
    let mut twiddles = Vec::with_capacity(len / 2);
    // the exact integer convolution of the Montgomery words
    let r: Vec<Vec<u64>> = primes.iter().map(|pr| convolve_mod(pr, a, b, len, &mut twiddles)).collect();

    let [p1, p2, p3] = primes;
    let (q1, q2) = (p1.q, p2.q);
    let (f2, f3) = (&p2.field, &p3.field);
    // Garner constants, as Montgomery words so that mulr multiplies by them
    let k12 = f2.inv(f2.from_u64(q1)).unwrap().raw();
    let k13 = f3.from_u64(q1).raw();
    let k123 = f3.inv(f3.mul(f3.from_u64(q1), f3.from_u64(q2))).unwrap().raw();
    let p = field.modulus() as u128;
    let q1_mod_p = q1 as u128 % p;
    let q1q2_mod_p = q1 as u128 * q2 as u128 % p;

    (0..out_len)
        .map(|i| {
            let x1 = r[0][i];
            let x2 = p2.normalize(p2.mulr(r[1][i] + 2 * p2.q - x1, k12));
            let mut t = r[2][i] + 2 * p3.q - x1;
            if t >= 2 * p3.q {
                t -= 2 * p3.q;
            }
            let t = t + 2 * p3.q - p3.mulr(x2, k13);
            let x3 = p3.normalize(p3.mulr(t, k123));
            // x1 + x2 q1 + x3 q1 q2 is the integer coefficient, a Montgomery word times R
            field.reduce_wide(x1 as u128 + x2 as u128 * q1_mod_p + x3 as u128 * q1q2_mod_p)
        })
        .collect()
}
