use rand::Rng;

use crate::arith::PrimeField;
use crate::classgroup::PolycyclicPresentation;
use crate::curves::{find_trace_curve, TraceSearchOptions};
use crate::polyring::product_from_roots;
use crate::primeselect::CrtPrime;
use crate::volcano::{Adjusted, ModPolyDb, VolcanoContext, WalkStats};
use crate::{Error, Result};

/// Fresh curves drawn after aborted order adjustments before giving up.
const MAX_ABORTS: u64 = 64;

/// `H_D mod p` and the work it took.
#[derive(Clone, Debug, Default)]
pub struct PrimeOutcome {
    /// degree-ascending, `h + 1` entries, monic
    pub coeffs: Vec<u64>,
    pub curves_tested: u64,
    pub order_tests: u64,
    pub aborts: u64,
    pub walk: WalkStats,
}

/// Whether a failure at one prime may go away with fresh randomness.
pub fn is_retryable(e: &Error) -> bool {
    matches!(e, Error::PrimeFailure { .. } | Error::DegenerateParametrization(_))
}

/// `H_D mod p` for `p = cp.p`: a curve of trace `+-t`, moved to a vertex with
/// endomorphism ring of discriminant `D`, whose class is then enumerated and
/// multiplied out.
pub fn hilbert_mod_p<R: Rng + ?Sized>(
    cp: &CrtPrime,
    pres: &PolycyclicPresentation,
    db: &ModPolyDb,
    opts: &TraceSearchOptions,
    rng: &mut R,
) -> Result<PrimeOutcome> {
    let d = pres.d;
    let f = PrimeField::new(cp.p)?;
    let ctx = VolcanoContext::new(&f, db, d, cp.t, cp.v)?;
    let mut out = PrimeOutcome::default();
    let j0 = loop {
        let found = find_trace_curve(&f, cp, opts, rng)?;
        out.curves_tested += found.curves_tested;
        out.order_tests += found.order_tests;
        match ctx.adjust_to_order(found.j, rng)? {
            Adjusted::Found(j) => break j,
            Adjusted::Abort => {
                out.aborts += 1;
                if out.aborts >= MAX_ABORTS {
                    return Err(Error::PrimeFailure {
                        p: cp.p,
                        reason: format!("{} curves could not be moved to the right order", out.aborts),
                    });
                }
            }
        }
    };
    let mut roots = ctx.enumerate_ring_class(j0, pres, rng)?;
    out.walk = ctx.stats();
    if roots.len() as u64 != pres.class_number {
        return Err(Error::PrimeFailure {
            p: cp.p,
            reason: format!("enumerated {} of {} roots", roots.len(), pres.class_number),
        });
    }
    let poly = product_from_roots(&f, &roots);
    roots.sort_unstable_by_key(|x| x.raw());
    if roots.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::PrimeFailure {
            p: cp.p,
            reason: "enumeration repeated a vertex".into(),
        });
    }
    out.coeffs = poly.to_u64s(&f);
    Ok(out)
}
