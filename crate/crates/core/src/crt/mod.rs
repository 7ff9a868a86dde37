//! Chinese remaindering of `H_D mod p_i` into `H_D mod P`: the explicit CRT
//! accumulated online when `P` is small, the ordinary CRT when `P >= M`
//! (or `P = 0`, meaning over `Z`), and a hybrid of the two in between.

mod tree;

pub use tree::{build_complements, ProductTree};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{ceil_log2, inv_mod};
use crate::{Error, Result};

/// Online explicit-CRT state over moduli `m_i` (primes, or prime products
/// in the hybrid path) modulo `P`.
#[derive(Clone, Debug)]
pub struct CrtState {
    modulus: BigUint,
    m_mod_p: BigUint,
    moduli: Vec<BigUint>,
    /// `a_i = M_i^{-1} mod m_i`
    a: Vec<BigUint>,
    /// `d_i = a_i M_i mod P`
    d: Vec<BigUint>,
    delta: u32,
    c: Vec<BigUint>,
    /// `s_j` split into a fast word part and a big part
    s_small: Vec<u128>,
    s_big: Vec<BigUint>,
    done: Vec<bool>,
    lazy_bits: u64,
}

impl CrtState {
    /// Precomputation over `moduli` for `h + 1` coefficients modulo `P >= 1`.
    pub fn new(moduli: &[BigUint], modulus: &BigUint, h: usize, omega: f64) -> Result<Self> {
        if modulus.is_zero() {
            return Err(Error::Precondition("explicit CRT needs P >= 1".into()));
        }
        if moduli.is_empty() {
            return Err(Error::Precondition("no CRT moduli".into()));
        }
        let tree = ProductTree::new(moduli, omega);
        let comps = tree.complements(modulus);
        let mut a = Vec::with_capacity(moduli.len());
        let mut d = Vec::with_capacity(moduli.len());
        for (m, (mi_m, mi_p)) in moduli.iter().zip(comps) {
            let ai = inv_big(&mi_m, m).ok_or_else(|| Error::Precondition("CRT moduli are not coprime".into()))?;
            d.push((&ai * &mi_p) % modulus);
            a.push(ai);
        }
        let n = moduli.len() as u64;
        Ok(CrtState {
            m_mod_p: tree.root() % modulus,
            modulus: modulus.clone(),
            moduli: moduli.to_vec(),
            a,
            d,
            delta: ceil_log2(n) + 2,
            c: vec![BigUint::zero(); h + 1],
            s_small: vec![0; h + 1],
            s_big: vec![BigUint::zero(); h + 1],
            done: vec![false; moduli.len()],
            lazy_bits: modulus.bits() + 64,
        })
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn a(&self, i: usize) -> &BigUint {
        &self.a[i]
    }

    pub fn d(&self, i: usize) -> &BigUint {
        &self.d[i]
    }

    fn begin(&mut self, i: usize, len: usize) -> Result<()> {
        if i >= self.done.len() {
            return Err(Error::Precondition(format!("no CRT modulus with index {i}")));
        }
        if self.done[i] {
            return Err(Error::Precondition(format!("CRT modulus {i} already used")));
        }
        if len != self.c.len() {
            return Err(Error::Precondition(format!("expected {} coefficients, got {len}", self.c.len())));
        }
        self.done[i] = true;
        Ok(())
    }

    fn add_c(&mut self, j: usize, term: BigUint) {
        self.c[j] += term;
        if self.c[j].bits() > self.lazy_bits {
            self.c[j] %= &self.modulus;
        }
    }

    /// Folds in `H_D mod m_i` for a word-size modulus `m_i`.
    pub fn update(&mut self, i: usize, coeffs: &[u64]) -> Result<()> {
        self.begin(i, coeffs.len())?;
        let p = self.moduli[i].to_u64().ok_or_else(|| Error::Precondition("modulus exceeds a word".into()))?;
        let a = self.a[i].to_u64().expect("a_i < m_i");
        let di = self.d[i].clone();
        for (j, &cj) in coeffs.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            self.add_c(j, &di * cj);
            let ca = cj as u128 * a as u128;
            let (q, r) = (ca / p as u128, ca % p as u128);
            self.s_small[j] += (q << self.delta) + (r << self.delta) / p as u128;
        }
        Ok(())
    }

    /// Folds in `H_D mod m_i` for an arbitrary modulus.
    pub fn update_big(&mut self, i: usize, coeffs: &[BigUint]) -> Result<()> {
        self.begin(i, coeffs.len())?;
        let di = self.d[i].clone();
        for (j, cj) in coeffs.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            self.add_c(j, &di * cj);
            self.s_big[j] += ((cj * &self.a[i]) << self.delta) / &self.moduli[i];
        }
        Ok(())
    }

    /// `C_j - floor(3/4 + s_j / 2^delta) M mod P`.
    pub fn finalize(self) -> Result<Vec<BigUint>> {
        if let Some(i) = self.done.iter().position(|&x| !x) {
            return Err(Error::Precondition(format!("CRT modulus {i} never updated")));
        }
        let bias = BigUint::from(3u32) << (self.delta - 2);
        Ok(self
            .c
            .iter()
            .zip(self.s_small.iter().zip(&self.s_big))
            .map(|(c, (&ss, sb))| {
                let s = sb + BigUint::from(ss) + &bias;
                let r = (s >> self.delta) % &self.modulus;
                let sub = (r * &self.m_mod_p) % &self.modulus;
                (c % &self.modulus + &self.modulus - sub) % &self.modulus
            })
            .collect())
    }
}

/// Precomputation for word-size prime moduli.
pub fn crt_init(primes: &[u64], modulus: &BigUint, h: usize) -> Result<CrtState> {
    let big: Vec<BigUint> = primes.iter().map(|&p| BigUint::from(p)).collect();
    CrtState::new(&big, modulus, h, 0.5)
}

fn inv_big(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    if let (Some(a), Some(m)) = (a.to_u64(), m.to_u64()) {
        return inv_mod(a % m, m).map(BigUint::from);
    }
    let (a, m) = (BigInt::from(a.clone()), BigInt::from(m.clone()));
    let e = a.extended_gcd(&m);
    e.gcd.is_one().then(|| e.x.mod_floor(&m).to_biguint().expect("non-negative"))
}

/// The signed integer in `(-M/2, M/2]` congruent to every residue.
pub fn crt_exact(residues: &[u64], moduli: &[u64]) -> BigInt {
    let mut acc = ExactCrt::new(moduli, 1);
    for (i, &r) in residues.iter().enumerate() {
        acc.update(i, &[r]).expect("index in range");
    }
    acc.finalize().expect("all residues given").pop().expect("one coefficient")
}

/// Ordinary CRT accumulated online: `sum c_i a_i M_i mod M`.
#[derive(Clone, Debug)]
pub struct ExactCrt {
    moduli: Vec<u64>,
    m: BigUint,
    a: Vec<u64>,
    c: Vec<BigUint>,
    done: Vec<bool>,
}

impl ExactCrt {
    pub fn new(moduli: &[u64], coefficients: usize) -> Self {
        let big: Vec<BigUint> = moduli.iter().map(|&p| BigUint::from(p)).collect();
        let tree = ProductTree::new(&big, 0.5);
        let comps = tree.complements(&BigUint::one());
        let a = moduli
            .iter()
            .zip(&comps)
            .map(|(&p, (mi, _))| if p == 1 { 0 } else { inv_mod(mi.to_u64().unwrap(), p).expect("coprime moduli") })
            .collect();
        ExactCrt {
            moduli: moduli.to_vec(),
            m: tree.root().clone(),
            a,
            c: vec![BigUint::zero(); coefficients],
            done: vec![false; moduli.len()],
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.m
    }

    pub fn update(&mut self, i: usize, coeffs: &[u64]) -> Result<()> {
        if i >= self.done.len() || self.done[i] {
            return Err(Error::Precondition(format!("CRT modulus {i} missing or already used")));
        }
        if coeffs.len() != self.c.len() {
            return Err(Error::Precondition(format!("expected {} coefficients", self.c.len())));
        }
        self.done[i] = true;
        let e = (&self.m / self.moduli[i]) * self.a[i];
        for (acc, &cj) in self.c.iter_mut().zip(coeffs) {
            if cj != 0 {
                *acc += &e * cj;
                if acc.bits() > self.m.bits() + 64 {
                    *acc %= &self.m;
                }
            }
        }
        Ok(())
    }

    /// Residues in `[0, M)`.
    pub fn finalize_unsigned(self) -> Result<Vec<BigUint>> {
        if self.done.iter().any(|&x| !x) {
            return Err(Error::Precondition("CRT residues missing".into()));
        }
        let m = self.m;
        Ok(self.c.into_iter().map(|c| c % &m).collect())
    }

    /// Centered representatives in `(-M/2, M/2]`.
    pub fn finalize(self) -> Result<Vec<BigInt>> {
        let m = self.m.clone();
        let half = &m >> 1u32;
        Ok(self
            .finalize_unsigned()?
            .into_iter()
            .map(|c| if c > half { -BigInt::from(&m - c) } else { BigInt::from(c) })
            .collect())
    }
}

/// Which CRT variant [`CrtAccumulator`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrtMode {
    Explicit,
    Exact,
    Hybrid,
}

#[derive(Clone, Copy, Debug)]
pub struct CrtConfig {
    /// product-tree space policy
    pub omega: f64,
    /// `lg P` above which `P < M` is handled by the hybrid path
    pub hybrid_bits: u64,
}

impl CrtConfig {
    /// Threshold `3 (lg |D|)^3 / 10`.
    pub fn for_discriminant(d: i64) -> Self {
        let lg = (d.unsigned_abs() as f64).log2();
        CrtConfig {
            omega: 0.5,
            hybrid_bits: (0.3 * lg * lg * lg).ceil() as u64,
        }
    }
}

/// A group of consecutive primes whose residues are combined by the ordinary
/// CRT before entering the explicit CRT.
#[derive(Clone, Debug)]
struct Group {
    first: usize,
    exact: Option<ExactCrt>,
    remaining: usize,
}

#[derive(Clone, Debug)]
enum Inner {
    Explicit(CrtState),
    Exact(ExactCrt),
    Hybrid {
        state: CrtState,
        groups: Vec<Group>,
        group_of: Vec<usize>,
    },
}

/// `H_D mod P` assembled from `H_D mod p_i` as they arrive, in any order.
#[derive(Clone, Debug)]
pub struct CrtAccumulator {
    modulus: BigUint,
    inner: Inner,
}

impl CrtAccumulator {
    /// `P = 0` requests the coefficients over `Z`.
    pub fn new(primes: &[u64], modulus: &BigUint, h: usize, config: &CrtConfig) -> Result<Self> {
        let n = h + 1;
        let big: Vec<BigUint> = primes.iter().map(|&p| BigUint::from(p)).collect();
        let mode = Self::choose_mode(primes, modulus, config);
        let inner = match mode {
            CrtMode::Exact => Inner::Exact(ExactCrt::new(primes, n)),
            CrtMode::Explicit => Inner::Explicit(CrtState::new(&big, modulus, h, config.omega)?),
            CrtMode::Hybrid => {
                let target = modulus.bits();
                let mut groups = Vec::new();
                let mut group_of = vec![0; primes.len()];
                let mut q_moduli = Vec::new();
                let mut start = 0;
                while start < primes.len() {
                    let mut q = BigUint::one();
                    let mut end = start;
                    while end < primes.len() && (end == start || q.bits() < target) {
                        q *= primes[end];
                        end += 1;
                    }
                    for g in group_of.iter_mut().take(end).skip(start) {
                        *g = groups.len();
                    }
                    groups.push(Group {
                        first: start,
                        exact: (end - start > 1).then(|| ExactCrt::new(&primes[start..end], n)),
                        remaining: end - start,
                    });
                    q_moduli.push(q);
                    start = end;
                }
                Inner::Hybrid {
                    state: CrtState::new(&q_moduli, modulus, h, config.omega)?,
                    groups,
                    group_of,
                }
            }
        };
        Ok(CrtAccumulator {
            modulus: modulus.clone(),
            inner,
        })
    }

    pub fn choose_mode(primes: &[u64], modulus: &BigUint, config: &CrtConfig) -> CrtMode {
        if modulus.is_zero() {
            return CrtMode::Exact;
        }
        let m_bits: u64 = primes.iter().map(|&p| 64 - p.leading_zeros() as u64).sum();
        let p_bits = modulus.bits();
        // M < 2^m_bits, so this is a cheap sufficient test before the exact one
        if p_bits > m_bits || *modulus >= primes.iter().map(|&p| BigUint::from(p)).product::<BigUint>() {
            return CrtMode::Exact;
        }
        if p_bits > config.hybrid_bits {
            CrtMode::Hybrid
        } else {
            CrtMode::Explicit
        }
    }

    pub fn mode(&self) -> CrtMode {
        match self.inner {
            Inner::Explicit(_) => CrtMode::Explicit,
            Inner::Exact(_) => CrtMode::Exact,
            Inner::Hybrid { .. } => CrtMode::Hybrid,
        }
    }

    /// Folds in the `h + 1` coefficients of `H_D mod p_i`.
    pub fn update(&mut self, i: usize, coeffs: &[u64]) -> Result<()> {
        match &mut self.inner {
            Inner::Explicit(s) => s.update(i, coeffs),
            Inner::Exact(e) => e.update(i, coeffs),
            Inner::Hybrid { state, groups, group_of } => {
                let g = *group_of.get(i).ok_or_else(|| Error::Precondition(format!("no prime with index {i}")))?;
                let group = &mut groups[g];
                match &mut group.exact {
                    None => return state.update(g, coeffs),
                    Some(e) => e.update(i - group.first, coeffs)?,
                }
                group.remaining -= 1;
                if group.remaining == 0 {
                    let residues = group.exact.take().expect("group in progress").finalize_unsigned()?;
                    state.update_big(g, &residues)?;
                }
                Ok(())
            }
        }
    }

    /// Coefficients in `[0, P)`, or over `Z` when `P = 0`.
    pub fn finalize(self) -> Result<Vec<BigInt>> {
        match self.inner {
            Inner::Explicit(s) | Inner::Hybrid { state: s, .. } => {
                Ok(s.finalize()?.into_iter().map(BigInt::from).collect())
            }
            Inner::Exact(e) => {
                let v = e.finalize()?;
                if self.modulus.is_zero() {
                    return Ok(v);
                }
                let p = BigInt::from_biguint(Sign::Plus, self.modulus);
                Ok(v.into_iter().map(|c| c.mod_floor(&p)).collect())
            }
        }
    }
}
