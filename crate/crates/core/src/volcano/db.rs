use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{is_prime_u64, Fe, PrimeField};
use crate::{Error, Result};

const EMBEDDED: &str = include_str!("../../data/phi_db.txt");

/// Classical modular polynomials `Phi_l(X, Y)` for a fixed set of primes.
#[derive(Clone, Debug)]
pub struct ModPolyDb {
    /// `l -> [(i, j, c)]`, coefficient of `X^i Y^j` with `i >= j`
    polys: BTreeMap<u64, Vec<(u32, u32, BigInt)>>,
}

/// `Phi_l` reduced mod `p`, as a dense symmetric `(l+2) x (l+2)` matrix.
#[derive(Clone, Debug)]
pub struct PhiModP {
    l: u64,
    n: usize,
    c: Vec<Fe>,
}

impl ModPolyDb {
    /// The database shipped with the crate, parsed and checked on first use.
    pub fn global() -> Result<&'static ModPolyDb> {
        static DB: OnceLock<Result<ModPolyDb>> = OnceLock::new();
        DB.get_or_init(|| ModPolyDb::parse(EMBEDDED)).as_ref().map_err(Clone::clone)
    }

    pub fn from_file(path: &std::path::Path) -> Result<ModPolyDb> {
        ModPolyDb::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses lines `l i j c` (`#` comments allowed) and checks every
    /// polynomial against the Kronecker congruence.
    pub fn parse(text: &str) -> Result<ModPolyDb> {
        let mut polys: BTreeMap<u64, BTreeMap<(u32, u32), BigInt>> = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::ModPolyDb(format!("line {}: {what}", no + 1));
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let l: u64 = f[0].parse().map_err(|_| bad("bad l"))?;
            let i: u32 = f[1].parse().map_err(|_| bad("bad i"))?;
            let j: u32 = f[2].parse().map_err(|_| bad("bad j"))?;
            let c: BigInt = f[3].parse().map_err(|_| bad("bad coefficient"))?;
            if !is_prime_u64(l) || l > 1000 {
                return Err(bad("l must be a small prime"));
            }
            if i < j || i as u64 > l + 1 {
                return Err(bad("exponents out of range"));
            }
            if polys.entry(l).or_default().insert((i, j), c).is_some() {
                return Err(bad("duplicate coefficient"));
            }
        }
        let db = ModPolyDb {
            polys: polys
                .into_iter()
                .map(|(l, m)| (l, m.into_iter().filter(|(_, c)| !c.is_zero()).map(|((i, j), c)| (i, j, c)).collect()))
                .collect(),
        };
        for &l in db.polys.keys() {
            db.check(l)?;
        }
        Ok(db)
    }

    pub fn levels(&self) -> impl Iterator<Item = u64> + '_ {
        self.polys.keys().copied()
    }

    pub fn contains(&self, l: u64) -> bool {
        self.polys.contains_key(&l)
    }

    pub fn max_level(&self) -> u64 {
        self.polys.keys().next_back().copied().unwrap_or(0)
    }

    /// Stored coefficients `(i, j, c)` with `i >= j`.
    pub fn coefficients(&self, l: u64) -> Result<&[(u32, u32, BigInt)]> {
        self.polys.get(&l).map(Vec::as_slice).ok_or(Error::MissingModularPolynomial(l))
    }

    /// Coefficient of `X^i Y^j`.
    pub fn coefficient(&self, l: u64, i: u32, j: u32) -> Result<BigInt> {
        let (i, j) = (i.max(j), i.min(j));
        Ok(self
            .coefficients(l)?
            .iter()
            .find(|e| e.0 == i && e.1 == j)
            .map(|e| e.2.clone())
            .unwrap_or_default())
    }

    /// Monic of degree `l + 1` in each variable, and
    /// `Phi_l(X, Y) = (X^l - Y)(X - Y^l) mod l`.
    pub fn check(&self, l: u64) -> Result<()> {
        let coeffs = self.coefficients(l)?;
        let top = l as u32 + 1;
        let lb = BigInt::from(l);
        let mut seen_top = false;
        for (i, j, c) in coeffs {
            if (*i, *j) == (top, 0) {
                if !c.is_one() {
                    return Err(Error::ModPolyDb(format!("Phi_{l} is not monic")));
                }
                seen_top = true;
                continue;
            }
            if *i == top {
                return Err(Error::ModPolyDb(format!("Phi_{l} has degree above {top} in Y")));
            }
            let expect: i32 = if (*i, *j) == (l as u32, l as u32) || (*i, *j) == (1, 1) { -1 } else { 0 };
            if (c - expect).mod_floor(&lb) != BigInt::zero() {
                return Err(Error::ModPolyDb(format!(
                    "Phi_{l} fails the Kronecker congruence at X^{i} Y^{j}"
                )));
            }
        }
        let has = |i: u32, j: u32| coeffs.iter().any(|e| e.0 == i && e.1 == j);
        if !seen_top || !has(l as u32, l as u32) || !has(1, 1) {
            return Err(Error::ModPolyDb(format!("Phi_{l} fails the Kronecker congruence")));
        }
        Ok(())
    }

    pub fn reduce(&self, l: u64, f: &PrimeField) -> Result<PhiModP> {
        let n = l as usize + 2;
        let mut c = vec![f.zero(); n * n];
        let p = f.modulus();
        let base = ((1u128 << 64) % p as u128) as u64;
        for (i, j, v) in self.coefficients(l)? {
            let (sign, limbs) = v.to_u64_digits();
            let mut r = 0u64;
            for &limb in limbs.iter().rev() {
                r = ((r as u128 * base as u128 + (limb % p) as u128) % p as u128) as u64;
            }
            let mut x = f.from_u64(r);
            if sign == Sign::Minus {
                x = f.neg(x);
            }
            c[*i as usize * n + *j as usize] = x;
            c[*j as usize * n + *i as usize] = x;
        }
        Ok(PhiModP { l, n, c })
    }
}

impl PhiModP {
    pub fn level(&self) -> u64 {
        self.l
    }

    /// `Phi_l(X, y)`, ascending coefficients, degree `l + 1`.
    pub fn instantiate(&self, f: &PrimeField, y: Fe) -> Vec<Fe> {
        let mut pows = Vec::with_capacity(self.n);
        let mut acc = f.one();
        for _ in 0..self.n {
            pows.push(acc);
            acc = f.mul(acc, y);
        }
        self.c
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(&pows).fold(f.zero(), |s, (&c, &yp)| f.add(s, f.mul(c, yp))))
            .collect()
    }

    pub fn eval(&self, f: &PrimeField, x: Fe, y: Fe) -> Fe {
        crate::polyring::eval_slice(f, &self.instantiate(f, y), x)
    }
}
