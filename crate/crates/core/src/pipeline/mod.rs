//! Orchestration: `H_D mod p` per prime, the CRT driver for `H_D mod P`, and
//! the CM construction built on top of it.

mod cm;
mod prime;

pub use cm::{cm_construct, CmCurve, CmSign};
pub use prime::{hilbert_mod_p, is_retryable, PrimeOutcome};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{discriminant_info, factorize, kronecker, valuation};
use crate::classgroup::{height_bound, polycyclic_presentation_bounded, PolycyclicPresentation};
use crate::crt::{CrtAccumulator, CrtConfig, CrtMode};
use crate::curves::TraceSearchOptions;
use crate::primeselect::{select_primes, CrtPrime, Selection, SelectionConfig};
use crate::volcano::{surface_step_cost, ModPolyDb, SurfaceSize};
use crate::{Error, Result};

/// Attempts per prime before the prime is given up.
pub const RETRY_BUDGET: u32 = 5;
/// Reruns with failed primes excluded.
const MAX_RESTARTS: u32 = 3;
/// CRT primes below this are never used.
const MIN_PRIME: u64 = 64;

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub d: i64,
    /// `0` asks for `H_D` over `Z`
    pub modulus: BigUint,
    pub selection: SelectionConfig,
    pub jobs: usize,
    pub seed: u64,
    pub phi_db: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// generator norms to try first, in this order, instead of the cost order
    pub presentation_norms: Option<Vec<u64>>,
    pub trace_search: TraceSearchOptions,
    /// defaults to [`CrtConfig::for_discriminant`]
    pub crt: Option<CrtConfig>,
}

impl JobConfig {
    pub fn new(d: i64, modulus: BigUint) -> Self {
        JobConfig {
            d,
            modulus,
            selection: SelectionConfig::default(),
            jobs: 1,
            seed: 0,
            phi_db: None,
            out: None,
            presentation_norms: None,
            trace_search: TraceSearchOptions::default(),
            crt: None,
        }
    }
}

/// Counters for a whole run.
#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub b: u64,
    pub z: u64,
    pub primes: usize,
    pub prime_bits: f64,
    pub crt_mode: Option<CrtMode>,
    pub presentations: usize,
    pub curves_tested: u64,
    pub order_tests: u64,
    pub aborts: u64,
    pub vertices: u64,
    pub repeated_edges: u64,
    pub retries: u64,
    pub restarts: u32,
    pub seconds: f64,
}

/// `H_D mod P`, coefficients in degree-ascending order.
#[derive(Clone, Debug)]
pub struct HilbertResult {
    pub d: i64,
    pub modulus: BigUint,
    pub h: u64,
    /// in `[0, P)`, or signed over `Z` when `P = 0`
    pub coeffs: Vec<BigInt>,
    pub stats: RunStats,
}

impl HilbertResult {
    /// Header `D <D> P <P> h <h>`, then `<k> <coefficient>` for `k = 0..h`.
    pub fn to_text(&self) -> String {
        let mut s = format!("D {} P {} h {}\n", self.d, self.modulus, self.h);
        for (k, c) in self.coeffs.iter().enumerate() {
            writeln!(s, "{k} {c}").expect("writing to a String");
        }
        s
    }

    pub fn write_to(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Rejects discriminants outside the supported range and conductor primes
/// without a modular polynomial.
pub fn check_discriminant(d: i64, db: &ModPolyDb) -> Result<()> {
    if d >= -4 {
        return Err(Error::Precondition(format!("need D < -4, got {d}")));
    }
    let info = discriminant_info(d)?;
    if matches!(info.fundamental, -3 | -4) {
        return Err(Error::UnsupportedDiscriminant {
            d,
            reason: format!("fundamental discriminant {} has extra automorphisms", info.fundamental),
        });
    }
    for &(l, _) in info.conductor_factors.factors() {
        if !db.contains(l) {
            return Err(Error::UnsupportedDiscriminant {
                d,
                reason: format!("conductor prime {l} has no modular polynomial"),
            });
        }
    }
    Ok(())
}

fn load_db(path: Option<&std::path::Path>) -> Result<DbHandle> {
    Ok(match path {
        Some(p) => DbHandle::Owned(ModPolyDb::from_file(p)?),
        None => DbHandle::Global(ModPolyDb::global()?),
    })
}

enum DbHandle {
    Owned(ModPolyDb),
    Global(&'static ModPolyDb),
}

impl DbHandle {
    fn get(&self) -> &ModPolyDb {
        match self {
            DbHandle::Owned(db) => db,
            DbHandle::Global(db) => db,
        }
    }
}

/// Whether every prime dividing `v` has a modular polynomial.
fn walkable(db: &ModPolyDb, v: u64) -> bool {
    factorize(v).factors().iter().all(|&(l, _)| db.contains(l))
}

/// [`select_primes`] restricted to primes whose volcanoes can be walked.
pub fn select_usable_primes(d: i64, b: u64, config: &SelectionConfig, db: &ModPolyDb) -> Result<Selection> {
    let mut config = config.clone();
    config.min_prime = config.min_prime.max(MIN_PRIME);
    for _ in 0..4 {
        let sel = select_primes(d, b, &config)?;
        let ranked: Vec<CrtPrime> = sel
            .primes
            .into_iter()
            .chain(sel.reserve)
            .filter(|c| walkable(db, c.v))
            .collect();
        let mut acc = 0.0;
        if let Some(cut) = ranked.iter().position(|c| {
            acc += c.benefit;
            acc > b as f64
        }) {
            let mut primes = ranked;
            let reserve = primes.split_off(cut + 1);
            return Ok(Selection {
                primes,
                reserve,
                z: sel.z,
                sz_bits: sel.sz_bits,
            });
        }
        config.k *= 2.0;
    }
    Err(Error::Config(format!("not enough usable primes for D = {d}")))
}

/// Generator norms ordered by the expected surface-walk cost when the
/// volcano depth at `l` is `v_l(v)`; ties keep norm order.
pub fn cost_order(d: i64, v: u64, db: &ModPolyDb) -> Vec<u64> {
    let u = discriminant_info(d).map(|i| i.conductor).unwrap_or(1);
    let mut norms: Vec<u64> = db.levels().filter(|&l| u % l != 0 && kronecker(d, l) != -1).collect();
    let cost = |l: u64| surface_step_cost(l, valuation(v, l), SurfaceSize::Larger);
    norms.sort_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)));
    norms
}

/// One presentation per distinct cost order among the `v` in use.
fn presentations(
    d: i64,
    h: u64,
    primes: &[CrtPrime],
    overrides: Option<&[u64]>,
    db: &ModPolyDb,
) -> Result<BTreeMap<u64, Arc<PolycyclicPresentation>>> {
    if h == 1 {
        let trivial = Arc::new(PolycyclicPresentation::trivial(d));
        return Ok(primes.iter().map(|c| (c.v, trivial.clone())).collect());
    }
    let mut by_order: BTreeMap<Vec<u64>, Arc<PolycyclicPresentation>> = BTreeMap::new();
    let mut out = BTreeMap::new();
    let vs: BTreeSet<u64> = primes.iter().map(|c| c.v).collect();
    for v in vs {
        let order = match overrides {
            Some(o) => o.to_vec(),
            None => cost_order(d, v, db),
        };
        let pres = match by_order.get(&order) {
            Some(p) => p.clone(),
            None => {
                let (p, _) = polycyclic_presentation_bounded(d, h, &order, Some(db.max_level()))?;
                if let Some(&l) = p.norms.iter().find(|&&l| !db.contains(l)) {
                    return Err(Error::MissingModularPolynomial(l));
                }
                if !by_order.is_empty() {
                    log::info!("D={d}: v={v} changes the walk costs; using presentation {p}");
                } else {
                    log::info!("D={d}: presentation {p}");
                }
                let p = Arc::new(p);
                by_order.insert(order, p.clone());
                p
            }
        };
        out.insert(v, pres);
    }
    Ok(out)
}

/// The RNG for attempt `attempt` at prime `p`; independent of scheduling.
pub fn prime_rng(seed: u64, p: u64, attempt: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    rng.set_stream(p);
    rng
}

/// [`hilbert_mod_p`] with up to [`RETRY_BUDGET`] attempts.
fn with_retries(
    cp: &CrtPrime,
    pres: &PolycyclicPresentation,
    db: &ModPolyDb,
    opts: &TraceSearchOptions,
    seed: u64,
) -> (u64, Result<PrimeOutcome>) {
    let mut retries = 0;
    for attempt in 0..RETRY_BUDGET {
        let mut rng = prime_rng(seed, cp.p, attempt);
        match hilbert_mod_p(cp, pres, db, opts, &mut rng) {
            Err(e) if is_retryable(&e) => {
                log::warn!("p={}: attempt {} failed: {e}", cp.p, attempt + 1);
                retries += 1;
            }
            r => return (retries, r),
        }
    }
    (
        retries,
        Err(Error::PrimeFailure {
            p: cp.p,
            reason: format!("retry budget of {RETRY_BUDGET} exhausted"),
        }),
    )
}

enum Round {
    Done(Vec<BigInt>),
    Failed(Vec<u64>),
}

fn run_round(
    config: &JobConfig,
    primes: &[CrtPrime],
    pres: &BTreeMap<u64, Arc<PolycyclicPresentation>>,
    db: &ModPolyDb,
    h: u64,
    stats: &mut RunStats,
) -> Result<Round> {
    let ps: Vec<u64> = primes.iter().map(|c| c.p).collect();
    let mut acc = CrtAccumulator::new(&ps, &config.modulus, h as usize, &config.crt.unwrap_or_else(|| CrtConfig::for_discriminant(config.d)))?;
    stats.crt_mode = Some(acc.mode());
    let jobs = config.jobs.max(1).min(primes.len());
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::sync_channel::<(usize, u64, Result<PrimeOutcome>)>(2 * jobs);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            let tx = tx.clone();
            let (next, stop) = (&next, &stop);
            s.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cp) = primes.get(i) else { break };
                let (retries, r) = with_retries(cp, &pres[&cp.v], db, &config.trace_search, config.seed);
                if tx.send((i, retries, r)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut failed = Vec::new();
        let mut hard = None;
        let mut done = 0usize;
        for (i, retries, r) in rx {
            stats.retries += retries;
            match r {
                Ok(o) if hard.is_none() && failed.is_empty() => {
                    stats.curves_tested += o.curves_tested;
                    stats.order_tests += o.order_tests;
                    stats.aborts += o.aborts;
                    stats.vertices += o.walk.examined;
                    stats.repeated_edges += o.walk.repeated_edges;
                    if let Err(e) = acc.update(i, &o.coeffs) {
                        hard = Some(e);
                        stop.store(true, Ordering::Relaxed);
                    }
                    done += 1;
                    if done % 64 == 0 {
                        log::debug!("D={}: {done} of {} primes done", config.d, primes.len());
                    }
                }
                Ok(_) => {}
                Err(e) if is_retryable(&e) => {
                    failed.push(primes[i].p);
                    stop.store(true, Ordering::Relaxed);
                }
                Err(e) => {
                    hard.get_or_insert(e);
                    stop.store(true, Ordering::Relaxed);
                }
            }
        }
        if let Some(e) = hard {
            return Err(e);
        }
        if !failed.is_empty() {
            return Ok(Round::Failed(failed));
        }
        Ok(Round::Done(acc.finalize()?))
    })
}

/// `H_D mod P`; the result depends only on `(D, P)`.
pub fn hilbert_class_poly(config: &JobConfig) -> Result<HilbertResult> {
    let start = Instant::now();
    let db_handle = load_db(config.phi_db.as_deref())?;
    let db = db_handle.get();
    let d = config.d;
    check_discriminant(d, db)?;
    let hb = height_bound(d)?;
    let h = hb.h;
    let mut stats = RunStats {
        b: hb.b,
        ..RunStats::default()
    };
    if config.modulus.is_one() {
        let mut result = HilbertResult {
            d,
            modulus: config.modulus.clone(),
            h,
            coeffs: vec![BigInt::zero(); h as usize + 1],
            stats,
        };
        result.stats.seconds = start.elapsed().as_secs_f64();
        return Ok(result);
    }
    let mut selection_config = config.selection.clone();
    loop {
        let sel = select_usable_primes(d, hb.b, &selection_config, db)?;
        stats.z = sel.z;
        stats.primes = sel.primes.len();
        stats.prime_bits = sel.primes.iter().map(|c| c.benefit).sum();
        log::info!(
            "D={d}: h={h} b={} using {} primes ({:.0} bits), z={}",
            hb.b,
            stats.primes,
            stats.prime_bits,
            sel.z
        );
        let pres = presentations(d, h, &sel.primes, config.presentation_norms.as_deref(), db)?;
        stats.presentations = pres.values().map(|p| Arc::as_ptr(p) as usize).collect::<BTreeSet<_>>().len();
        match run_round(config, &sel.primes, &pres, db, h, &mut stats)? {
            Round::Done(coeffs) => {
                stats.seconds = start.elapsed().as_secs_f64();
                let result = HilbertResult {
                    d,
                    modulus: config.modulus.clone(),
                    h,
                    coeffs,
                    stats,
                };
                if let Some(path) = &config.out {
                    result.write_to(path)?;
                }
                return Ok(result);
            }
            Round::Failed(failed) => {
                if stats.restarts >= MAX_RESTARTS {
                    return Err(Error::PrimeFailure {
                        p: failed[0],
                        reason: format!("{} primes failed after {} restarts", failed.len(), stats.restarts),
                    });
                }
                log::warn!("D={d}: replacing failed primes {failed:?}");
                stats.restarts += 1;
                selection_config.exclude.extend(failed);
            }
        }
    }
}

#[cfg(test)]
mod tests;
