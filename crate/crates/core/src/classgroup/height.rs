use super::for_each_reduced_form;
use crate::{Error, Result};

/// Bound on the coefficient size of `H_D`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightBound {
    /// `ceil(lg B) + 2`
    pub b: u64,
    /// an upper bound on `lg B`
    pub lg_b: f64,
    pub h: u64,
    /// `a_1 <= ... <= a_h`
    pub form_norms: Vec<u64>,
}

const ENGE_C: f64 = 2114.567;

/// Relative inflation applied to every rounded term; f64 rounding in
/// `exp`, `ln_1p` and division stays well below `2^-50` relative.
const REL_MARGIN: f64 = 1.0 / (1u64 << 48) as f64;

/// Double-double accumulator (error-free TwoSum).
#[derive(Clone, Copy, Debug, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (x - bb);
        self.hi = s;
        self.lo += err;
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

#[inline]
fn up(x: f64) -> f64 {
    x + x.abs() * REL_MARGIN + f64::MIN_POSITIVE
}

#[inline]
fn down(x: f64) -> f64 {
    x - x.abs() * REL_MARGIN - f64::MIN_POSITIVE
}

/// `lg M_k` for `M_k = exp(x) + C`, as a pair of (lower, upper) estimates.
fn lg_m(x: f64) -> (f64, f64) {
    let main = x / std::f64::consts::LN_2;
    let tail = (ENGE_C * (-x).exp()).ln_1p() / std::f64::consts::LN_2;
    (down(main) + down(tail), up(main) + up(tail))
}

/// The Appendix bound `B = C(h, m) M_h^{-m} prod M_k` in log space.
pub fn height_bound(d: i64) -> Result<HeightBound> {
    if d >= -4 {
        return Err(Error::Precondition(format!("height bound needs D < -4, got {d}")));
    }
    let mut norms = Vec::new();
    for_each_reduced_form(d, |f| norms.push(f.a as u64))?;
    Ok(height_bound_from_norms(d, norms))
}

pub fn height_bound_from_norms(d: i64, mut norms: Vec<u64>) -> HeightBound {
    norms.sort_unstable();
    let h = norms.len() as u64;
    let s = up(std::f64::consts::PI * up((d.unsigned_abs() as f64).sqrt()));
    let mut acc = Dd::default();
    for &a in &norms {
        acc.add(lg_m(up(s / a as f64)).1);
    }
    let sum = up(acc.value());

    let x_h = down(down(std::f64::consts::PI * down((d.unsigned_abs() as f64).sqrt())) / *norms.last().unwrap() as f64);
    let (lg_mh_lo, _) = lg_m(x_h);
    let m_h = x_h.exp() + ENGE_C;
    let m0 = ((h as f64 + 1.0) / (m_h + 1.0)).floor() as u64;

    // B(m) is maximal at the true m, so taking the max over neighbours of the
    // computed m guards against rounding in the floor.
    let mut best = f64::NEG_INFINITY;
    for m in m0.saturating_sub(1)..=(m0 + 1).min(h) {
        let mut lg_binom = Dd::default();
        for i in 0..m {
            lg_binom.add(up(((h - i) as f64).log2()));
            lg_binom.add(-down(((i + 1) as f64).log2()));
        }
        let lg = up(sum + up(lg_binom.value()) - down(m as f64 * lg_mh_lo));
        best = best.max(lg);
    }
    let lg_b = up(best);
    HeightBound {
        b: lg_b.ceil().max(0.0) as u64 + 2,
        lg_b,
        h,
        form_norms: norms,
    }
}
