use rand::Rng;

use super::order::test_curve_order_from;
use super::{naf, random_curve_with_torsion, scalar_mul_batch, BatchScratch, Curve, Point};
use crate::arith::{factorize, Fe, PrimeField};
use crate::primeselect::CrtPrime;
use crate::Result;

#[derive(Clone, Copy, Debug)]
pub struct TraceSearchOptions {
    /// curves filtered together per round
    pub batch: usize,
}

impl Default for TraceSearchOptions {
    fn default() -> Self {
        TraceSearchOptions { batch: 64 }
    }
}

/// A curve with trace `+-t` and the work spent finding it.
#[derive(Clone, Debug)]
pub struct TraceSearch {
    pub j: Fe,
    pub curve: Curve,
    /// candidates that reached the scalar-multiplication filter
    pub curves_tested: u64,
    /// candidates passed to the full order test
    pub order_tests: u64,
}

/// Finds `j != 0, 1728` whose curves have trace `+-t` over `F_p`.
pub fn find_trace_curve<R: Rng + ?Sized>(
    f: &PrimeField,
    cp: &CrtPrime,
    opts: &TraceSearchOptions,
    rng: &mut R,
) -> Result<TraceSearch> {
    let p = f.modulus();
    debug_assert_eq!(p, cp.p);
    let (n0, n1) = (cp.n0(), cp.n1());
    let (f0, f1) = (factorize(n0), factorize(n1));
    let target = cp.plan.target_order(n0, n1);
    let constraint = cp.plan.constraint;
    let (naf_a, naf_b) = match target {
        Some(n) => (naf(n), Vec::new()),
        None => (naf(p + 1), naf(cp.t)),
    };
    let batch = opts.batch.max(1);
    let mut scratch = BatchScratch::default();
    let mut curves = Vec::with_capacity(batch);
    let mut points = Vec::with_capacity(batch);
    let mut tested = 0u64;
    let mut order_tests = 0u64;
    loop {
        curves.clear();
        points.clear();
        for _ in 0..batch {
            let (e, _) = random_curve_with_torsion(f, constraint.as_ref(), rng)?;
            points.push(e.random_point(f, rng));
            curves.push(e);
        }
        tested += batch as u64;
        let a = scalar_mul_batch(f, &curves, &points, &naf_a, &mut scratch);
        let pass: Vec<bool> = if target.is_some() {
            a.iter().map(Point::is_infinity).collect()
        } else {
            let b = scalar_mul_batch(f, &curves, &points, &naf_b, &mut scratch);
            a.iter().zip(&b).map(|(x, y)| x.x() == y.x()).collect()
        };
        for i in (0..batch).filter(|&i| pass[i]) {
            order_tests += 1;
            if test_curve_order_from(f, &curves[i], &f0, &f1, Some(points[i]), rng) {
                return Ok(TraceSearch {
                    j: curves[i].j_invariant(f),
                    curve: curves[i],
                    curves_tested: tested - (batch - 1 - i) as u64,
                    order_tests,
                });
            }
        }
    }
}
