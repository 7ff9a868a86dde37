//! Enumeration of the candidate primes `S_z` and cost-ranked selection of the
//! CRT primes.

mod torsion;

use std::collections::{BTreeSet, HashSet};

use num_rational::Ratio;

pub use torsion::{
    div_prob, rank_torsion, AppliesTo, TorsionConstraint, TorsionPlan, TorsionTable, TwoCondition, DEFAULT_TABLE,
    SUPPORTED_LEVELS,
};

use crate::arith::{discriminant_info, is_prime_u64, isqrt_u128, primes_up_to, sqrt_mod};
use crate::classgroup::HurwitzData;
use crate::{Error, Result};

/// A prime `p` with `4p = t^2 - v^2 D`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrtPrime {
    pub p: u64,
    pub t: u64,
    pub v: u64,
    /// `p / H(-v^2 D)`
    pub rho_inv: Ratio<u64>,
    pub plan: TorsionPlan,
    /// `lg p`
    pub benefit: f64,
}

impl CrtPrime {
    pub fn n0(&self) -> u64 {
        self.p + 1 - self.t
    }

    pub fn n1(&self) -> u64 {
        self.p + 1 + self.t
    }

    pub fn rho_inv_f64(&self) -> f64 {
        *self.rho_inv.numer() as f64 / *self.rho_inv.denom() as f64
    }

    /// Expected trace-search cost per bit of `p`; smaller is better.
    pub fn rank_key(&self) -> f64 {
        self.rho_inv_f64() / (self.plan.ratio() * self.benefit)
    }
}

/// Parameters of the prime selection.
#[derive(Clone, Debug)]
pub struct SelectionConfig {
    /// stop growing `z` once `S_z` holds more than `k * b` bits
    pub k: f64,
    /// `z <- floor((1 + delta) z)`
    pub delta: f64,
    pub z0: Option<u64>,
    /// sieve window, in candidate traces
    pub window: usize,
    /// primes below this are skipped
    pub min_prime: u64,
    pub exclude: BTreeSet<u64>,
    pub table: TorsionTable,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            k: 2.0,
            delta: 0.5,
            z0: None,
            window: 1 << 22,
            min_prime: 5,
            exclude: BTreeSet::new(),
            table: TorsionTable::default(),
        }
    }
}

/// Options for [`enumerate_sz_with`].
#[derive(Clone, Debug)]
pub struct SieveOptions<'a> {
    pub window: usize,
    pub min_prime: u64,
    pub exclude: &'a BTreeSet<u64>,
    pub table: &'a TorsionTable,
}

const SIEVE_PRIME_BOUND: u64 = 1 << 12;

/// `S_z` with default sieve settings, sorted by `(v, p)`.
pub fn enumerate_sz(d: i64, z: u64) -> Result<Vec<CrtPrime>> {
    let cfg = SelectionConfig::default();
    enumerate_sz_with(
        d,
        z,
        &SieveOptions {
            window: cfg.window,
            min_prime: cfg.min_prime,
            exclude: &cfg.exclude,
            table: &cfg.table,
        },
    )
}

/// Whether the v-loop may stop: no larger `v` can contribute.
fn v_cutoff(v: u64, z: u64, h_d: f64, abs_d: f64) -> bool {
    let v = v as f64;
    let ll = (v + 4.0).ln().ln();
    v / (ll * ll) >= 44.0 * z as f64 * h_d / abs_d
}

pub fn enumerate_sz_with(d: i64, z: u64, opts: &SieveOptions<'_>) -> Result<Vec<CrtPrime>> {
    if d >= -4 {
        return Err(Error::Precondition(format!("prime enumeration needs D < -4, got {d}")));
    }
    discriminant_info(d)?;
    let hw = HurwitzData::new(d)?;
    let abs_d = d.unsigned_abs();
    let h_d = hw.hurwitz_f64(1);
    let window = opts.window.max(1);

    // Sieving primes with sqrt(D) mod l; `None` for non-residues.
    let sieve: Vec<(u64, Option<u64>)> = primes_up_to(SIEVE_PRIME_BOUND)
        .into_iter()
        .filter(|&l| l > 2)
        .map(|l| (l, sqrt_mod(d.rem_euclid(l as i64) as u64, l)))
        .collect();

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut marks = Vec::new();
    let mut v = 1u64;
    while !v_cutoff(v, z, h_d, abs_d as f64) {
        let hv = hw.hurwitz(v);
        let vd = v as u128 * v as u128 * abs_d as u128;
        let p_max = z as u128 * *hv.numer() as u128 / *hv.denom() as u128;
        let p_min = vd / 4 + 1;
        if p_min > p_max || p_max >= 1u128 << 62 {
            if p_max >= 1u128 << 62 {
                log::warn!("S_z enumeration for D={d} stops at v={v}: primes exceed 62 bits");
                break;
            }
            v += 1;
            continue;
        }
        let t_max = isqrt_u128(4 * p_max - vd) as u64;
        let t0 = if (v as u128 * abs_d as u128) % 2 == 1 { 1 } else { 2 };
        if t_max < t0 {
            v += 1;
            continue;
        }
        let count = (t_max - t0) / 2 + 1;
        let vm = |l: u64| v % l;
        let mut lo = 0u64;
        while lo < count {
            let hi = (lo + window as u64).min(count);
            marks.clear();
            marks.resize((hi - lo) as usize, true);
            for &(l, r) in &sieve {
                if l as u128 >= p_min {
                    break;
                }
                let inv2 = (l + 1) / 2;
                let mut mark_root = |rho: u64| {
                    // t0 + 2i = rho (mod l)
                    let i0 = ((rho + l - t0 % l) % l) * inv2 % l;
                    let mut i = lo + (i0 + l - lo % l) % l;
                    while i < hi {
                        marks[(i - lo) as usize] = false;
                        i += l;
                    }
                };
                if abs_d % l == 0 || vm(l) == 0 {
                    mark_root(0);
                } else if let Some(r) = r {
                    let rho = (vm(l) as u128 * r as u128 % l as u128) as u64;
                    mark_root(rho);
                    mark_root(l - rho);
                }
            }
            for (k, &m) in marks.iter().enumerate() {
                if !m {
                    continue;
                }
                let t = t0 + 2 * (lo + k as u64);
                let p4 = t as u128 * t as u128 + vd;
                debug_assert_eq!(p4 % 4, 0);
                let p = (p4 / 4) as u64;
                if p < opts.min_prime.max(5) || p % 2 == 0 || opts.exclude.contains(&p) || !is_prime_u64(p) {
                    continue;
                }
                if !seen.insert(p) {
                    continue;
                }
                out.push(CrtPrime {
                    p,
                    t,
                    v,
                    rho_inv: Ratio::new(p * *hv.denom(), *hv.numer()),
                    plan: opts.table.rank(p, t),
                    benefit: (p as f64).log2(),
                });
            }
            lo = hi;
        }
        v += 1;
    }
    out.sort_by_key(|c| (c.v, c.p));
    Ok(out)
}

/// Result of the prime selection.
#[derive(Clone, Debug)]
pub struct Selection {
    /// the minimal ranked prefix with `sum lg p > b`
    pub primes: Vec<CrtPrime>,
    /// the rest of `S_z` in rank order, used for replacements
    pub reserve: Vec<CrtPrime>,
    pub z: u64,
    pub sz_bits: f64,
}

/// `floor(-D / (2 H(-D)))`, at least 1.
pub fn initial_z(d: i64) -> Result<u64> {
    let h = HurwitzData::new(d)?.hurwitz(1);
    let z = d.unsigned_abs() as u128 * *h.denom() as u128 / (2 * *h.numer() as u128);
    Ok((z as u64).max(1))
}

fn rank(sz: &mut [CrtPrime]) {
    sz.sort_by(|a, b| a.rank_key().total_cmp(&b.rank_key()).then(a.p.cmp(&b.p)));
}

/// Grows `z` until `S_z` exceeds `k b` bits, ranks it and returns the minimal
/// prefix exceeding `b` bits.
pub fn select_primes(d: i64, b: u64, config: &SelectionConfig) -> Result<Selection> {
    if !(config.k > 1.0 && config.delta > 0.0) {
        return Err(Error::Config(format!(
            "selection needs k > 1 and delta > 0, got k={} delta={}",
            config.k, config.delta
        )));
    }
    let opts = SieveOptions {
        window: config.window,
        min_prime: config.min_prime,
        exclude: &config.exclude,
        table: &config.table,
    };
    let mut z = match config.z0 {
        Some(z) => z.max(1),
        None => initial_z(d)?,
    };
    let target = config.k * b as f64;
    let (mut sz, bits) = loop {
        let sz = enumerate_sz_with(d, z, &opts)?;
        let bits: f64 = sz.iter().map(|c| c.benefit).sum();
        log::debug!("D={d}: z={z} gives {} primes, {bits:.1} bits", sz.len());
        if bits > target {
            break (sz, bits);
        }
        let next = ((1.0 + config.delta) * z as f64).floor() as u64;
        z = next.max(z + 1);
    };
    rank(&mut sz);
    let mut acc = 0.0;
    let mut cut = sz.len();
    for (i, c) in sz.iter().enumerate() {
        acc += c.benefit;
        if acc > b as f64 {
            cut = i + 1;
            break;
        }
    }
    let reserve = sz.split_off(cut);
    Ok(Selection {
        primes: sz,
        reserve,
        z,
        sz_bits: bits,
    })
}
