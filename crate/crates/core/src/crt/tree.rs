use num_bigint::BigUint;
use num_traits::One;

/// Products of consecutive moduli, level by level: level `k` holds the
/// products of blocks of `2^{depth - k}` leaves. Only some levels are kept;
/// the rest are rebuilt from the nearest kept level below when needed.
#[derive(Clone, Debug)]
pub struct ProductTree {
    depth: u32,
    /// `(level, products)`, deepest first; always contains the leaves
    kept: Vec<(u32, Vec<BigUint>)>,
    root: BigUint,
}

fn parent_level(children: &[BigUint]) -> Vec<BigUint> {
    children
        .chunks(2)
        .map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() })
        .collect()
}

impl ProductTree {
    /// `omega` in `[0, 1]` selects how many of the `depth` levels stay in
    /// memory: `ceil(depth^omega)`, evenly spaced, leaves included.
    pub fn new(moduli: &[BigUint], omega: f64) -> Self {
        assert!(!moduli.is_empty());
        let n = moduli.len();
        let depth = if n == 1 { 0 } else { u64::BITS - ((n - 1) as u64).leading_zeros() };
        let keep = if depth == 0 {
            1
        } else {
            ((depth as f64).powf(omega.clamp(0.0, 1.0)).ceil() as u32).clamp(1, depth)
        };
        let step = depth.div_ceil(keep).max(1);
        let mut kept = Vec::new();
        let mut level = moduli.to_vec();
        let mut k = depth;
        loop {
            if k == depth || (depth - k) % step == 0 {
                kept.push((k, level.clone()));
            }
            if k == 0 {
                break;
            }
            level = parent_level(&level);
            k -= 1;
        }
        let root = level.pop().unwrap_or_else(BigUint::one);
        kept.retain(|(k, _)| *k > 0 || depth == 0);
        ProductTree { depth, kept, root }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `M`, the product of all moduli.
    pub fn root(&self) -> &BigUint {
        &self.root
    }

    pub fn levels_kept(&self) -> usize {
        self.kept.len()
    }

    /// Products at level `k` (`1 <= k <= depth`).
    pub fn level(&self, k: u32) -> Vec<BigUint> {
        let (mut at, base) = self
            .kept
            .iter()
            .filter(|(l, _)| *l >= k)
            .min_by_key(|(l, _)| *l)
            .map(|(l, v)| (*l, v.clone()))
            .expect("leaves are kept");
        let mut cur = base;
        while at > k {
            cur = parent_level(&cur);
            at -= 1;
        }
        cur
    }

    /// `(M_i mod m_i, M_i mod P)` for every leaf `m_i`, `M_i = M / m_i`, by the
    /// top-down complement recursion.
    pub fn complements(&self, modulus: &BigUint) -> Vec<(BigUint, BigUint)> {
        if self.depth == 0 {
            let m = &self.kept[0].1[0];
            return vec![(BigUint::one() % m, BigUint::one() % modulus)];
        }
        // complements of the root: m/m = 1
        let mut cm = vec![BigUint::one()];
        let mut cp = vec![BigUint::one() % modulus];
        for k in 1..=self.depth {
            let level = self.level(k);
            let one = BigUint::one();
            let mut next_m = Vec::with_capacity(level.len());
            let mut next_p = Vec::with_capacity(level.len());
            for (idx, m) in level.iter().enumerate() {
                let sib = level.get(idx ^ 1).unwrap_or(&one);
                next_m.push((&cm[idx / 2] * sib) % m);
                next_p.push((&cp[idx / 2] * sib) % modulus);
            }
            cm = next_m;
            cp = next_p;
        }
        cm.into_iter().zip(cp).collect()
    }
}

/// `(M_i mod p_i, M_i mod P)` for pairwise coprime moduli.
pub fn build_complements(moduli: &[BigUint], modulus: &BigUint, omega: f64) -> Vec<(BigUint, BigUint)> {
    ProductTree::new(moduli, omega).complements(modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn two_moduli() {
        let c = build_complements(&big(&[5, 7]), &BigUint::from(11u32), 0.5);
        assert_eq!(c[0], (BigUint::from(2u32), BigUint::from(7u32)));
        assert_eq!(c[1], (BigUint::from(5u32), BigUint::from(5u32)));
    }

    #[test]
    fn single_modulus() {
        let c = build_complements(&big(&[13]), &BigUint::from(10u32), 1.0);
        assert_eq!(c, vec![(BigUint::one(), BigUint::one())]);
        let c = build_complements(&big(&[13]), &BigUint::one(), 0.0);
        assert!(c[0].1.is_zero());
    }

    #[test]
    fn against_direct_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let primes: Vec<u64> = {
            let mut v = Vec::new();
            while v.len() < 64 {
                let x = rng.gen_range(1u64 << 29..1 << 30) | 1;
                if crate::arith::is_prime_u64(x) && !v.contains(&x) {
                    v.push(x);
                }
            }
            v
        };
        let p = BigUint::from(rng.gen::<u128>());
        for n in [1usize, 2, 3, 5, 17, 64] {
            let moduli = big(&primes[..n]);
            let m: BigUint = moduli.iter().product();
            for omega in [0.0, 0.5, 1.0] {
                let tree = ProductTree::new(&moduli, omega);
                assert_eq!(tree.root(), &m);
                let c = tree.complements(&p);
                for (i, q) in moduli.iter().enumerate() {
                    let mi = &m / q;
                    assert_eq!(c[i], (&mi % q, &mi % &p), "n={n} omega={omega}");
                }
            }
        }
    }

    #[test]
    fn space_policy() {
        let moduli = big(&crate::arith::primes_up_to(3000)[..400]);
        let t0 = ProductTree::new(&moduli, 0.0);
        let t1 = ProductTree::new(&moduli, 1.0);
        assert_eq!(t0.depth(), 9);
        assert_eq!(t0.levels_kept(), 1);
        assert_eq!(t1.levels_kept(), 9);
        assert!(ProductTree::new(&moduli, 0.5).levels_kept() <= 3);
        for k in 1..=9 {
            assert_eq!(t0.level(k), t1.level(k));
        }
    }
}
