use num_rational::Ratio;

use super::class_number;
use crate::arith::{discriminant_info, factorize, kronecker};
use crate::Result;

/// Data needed to evaluate `H(-v^2 D)` for many `v` without recomputing `h(D_K)`.
#[derive(Clone, Debug)]
pub struct HurwitzData {
    pub d: i64,
    pub fundamental: i64,
    pub conductor: u64,
    /// `h(D_K)`
    pub h0: u64,
    /// `w(D_K)`
    pub w0: u64,
}

impl HurwitzData {
    pub fn new(d: i64) -> Result<Self> {
        let info = discriminant_info(d)?;
        let h0 = class_number(info.fundamental)?;
        Ok(HurwitzData {
            d,
            fundamental: info.fundamental,
            conductor: info.conductor,
            h0,
            w0: unit_count(info.fundamental),
        })
    }

    /// `H(-v^2 D)` for `v >= 1`.
    pub fn hurwitz(&self, v: u64) -> Ratio<u64> {
        let n = self.conductor * v;
        let mut num = 2 * self.h0;
        for &(p, e) in factorize(n).factors() {
            let chi = kronecker(self.fundamental, p) as i64;
            let pe = p.pow(e);
            let term = (pe - 1) / (p - 1) * (p as i64 - chi) as u64 + 1;
            num *= term;
        }
        Ratio::new(num, self.w0)
    }

    /// `H(-v^2 D)` as a float, for ranking.
    pub fn hurwitz_f64(&self, v: u64) -> f64 {
        let r = self.hurwitz(v);
        *r.numer() as f64 / *r.denom() as f64
    }
}

/// `|O^*|` for the order of discriminant `d`.
pub fn unit_count(d: i64) -> u64 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// The Hurwitz class number `H(-v^2 D)`.
pub fn hurwitz_number(d: i64, v: u64) -> Result<Ratio<u64>> {
    Ok(HurwitzData::new(d)?.hurwitz(v))
}
