//! Torsion constraints for the trace-curve search and their cost/benefit ranking.

use crate::arith::valuation;
use crate::{Error, Result};

/// Condition on the 2-adic valuation of the group order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwoCondition {
    /// no constraint beyond what `N` implies
    Any,
    /// `v_2(#E) = k` exactly
    Exact(u32),
    /// `2^k | #E`
    AtLeast(u32),
}

/// One row of the torsion-constraint table: `m = a * b * N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionConstraint {
    pub m: u32,
    pub two: TwoCondition,
    /// `3 | #E` required
    pub three: bool,
    /// level of the `X_1(N)` family used to generate curves
    pub n: u32,
    pub benefit: f64,
    pub cost: f64,
}

impl TorsionConstraint {
    /// Whether a group of order `order` satisfies the constraint.
    pub fn satisfied_by(&self, order: u64) -> bool {
        if order % self.n as u64 != 0 {
            return false;
        }
        if self.three && order % 3 != 0 {
            return false;
        }
        match self.two {
            TwoCondition::Any => true,
            TwoCondition::Exact(k) => valuation(order, 2) == k,
            TwoCondition::AtLeast(k) => valuation(order, 2) >= k,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.benefit / self.cost
    }

    /// Benefit adjusted for the residue class of `p`. The static values assume
    /// `p = 1 mod 3` and `p != 1 mod l` for primes `l > 3` dividing `N`; the
    /// proportion of curves with `l | #E` is `l/(l^2-1)` when `p = 1 mod l`
    /// and `1/(l-1)` otherwise.
    /// Prime powers use the ratio for `l` itself.
    pub fn adjusted_benefit(&self, p: u64) -> f64 {
        let mut b = self.benefit;
        if (self.three || self.n % 3 == 0) && p % 3 != 1 {
            b *= div_prob(3, true) / div_prob(3, false);
        }
        for l in [5u64, 7, 11] {
            if self.n as u64 % l == 0 && p % l == 1 {
                b *= div_prob(l, false) / div_prob(l, true);
            }
        }
        b
    }

    /// Label in the `a * b * N` notation.
    pub fn label(&self) -> String {
        self.m.to_string()
    }
}

/// Proportion of curves over `F_p` with `l | #E`; `split` means `p = 1 mod l`.
pub fn div_prob(l: u64, split: bool) -> f64 {
    let l = l as f64;
    if split {
        l / (l * l - 1.0)
    } else {
        1.0 / (l - 1.0)
    }
}

/// The supported rows of the ranking table (levels `N <= 12`).
pub const DEFAULT_TABLE: &[TorsionConstraint] = &[
    row(33, TwoCondition::Exact(0), true, 11, 80.0, 2.3),
    row(11, TwoCondition::Exact(0), false, 11, 30.0, 1.2),
    row(66, TwoCondition::Exact(1), true, 11, 106.7, 4.3),
    row(21, TwoCondition::Exact(0), true, 7, 48.0, 2.1),
    row(9, TwoCondition::Exact(0), false, 9, 19.6, 1.0),
    row(7, TwoCondition::Exact(0), false, 7, 18.0, 0.9),
    row(132, TwoCondition::AtLeast(2), true, 11, 64.0, 3.3),
    row(22, TwoCondition::Exact(1), false, 11, 40.0, 2.5),
    row(5, TwoCondition::Exact(0), false, 5, 12.0, 0.9),
    row(44, TwoCondition::AtLeast(2), false, 11, 24.0, 1.8),
    row(10, TwoCondition::Exact(1), false, 10, 16.0, 1.5),
    row(20, TwoCondition::AtLeast(2), false, 10, 9.6, 0.9),
    row(3, TwoCondition::Exact(0), false, 3, 8.0, 0.9),
    row(12, TwoCondition::Any, false, 12, 6.4, 0.7),
    row(6, TwoCondition::Exact(1), false, 6, 10.7, 1.4),
    row(8, TwoCondition::Any, false, 8, 4.0, 0.7),
    row(2, TwoCondition::Exact(1), false, 2, 4.0, 0.9),
    row(4, TwoCondition::Any, false, 4, 2.4, 0.6),
    row(1, TwoCondition::Exact(0), false, 1, 3.0, 0.8),
];

const fn row(m: u32, two: TwoCondition, three: bool, n: u32, benefit: f64, cost: f64) -> TorsionConstraint {
    TorsionConstraint {
        m,
        two,
        three,
        n,
        benefit,
        cost,
    }
}

/// Which of `N0 = p+1-t`, `N1 = p+1+t` a plan applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AppliesTo {
    N0,
    N1,
    Both,
}

impl AppliesTo {
    pub fn label(&self) -> &'static str {
        match self {
            AppliesTo::N0 => "N0",
            AppliesTo::N1 => "N1",
            AppliesTo::Both => "both",
        }
    }
}

/// The constraint chosen for a prime, or the null plan (`constraint = None`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionPlan {
    pub constraint: Option<TorsionConstraint>,
    pub applies_to: AppliesTo,
    /// benefit after residue adjustment and halving for one-sided plans
    pub benefit: f64,
    pub cost: f64,
}

impl TorsionPlan {
    pub fn null() -> Self {
        TorsionPlan {
            constraint: None,
            applies_to: AppliesTo::Both,
            benefit: 1.0,
            cost: 1.0,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.benefit / self.cost
    }

    pub fn m(&self) -> u32 {
        self.constraint.map_or(1, |c| c.m)
    }

    /// The single target order when the plan fixes the sign of the trace.
    pub fn target_order(&self, n0: u64, n1: u64) -> Option<u64> {
        match (self.constraint, self.applies_to) {
            (Some(_), AppliesTo::N0) => Some(n0),
            (Some(_), AppliesTo::N1) => Some(n1),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self.constraint {
            None => "null".to_string(),
            Some(c) => format!("{}@{}", c.label(), self.applies_to.label()),
        }
    }
}

/// A table of torsion constraints, ordered arbitrarily.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionTable {
    pub rows: Vec<TorsionConstraint>,
}

impl Default for TorsionTable {
    fn default() -> Self {
        TorsionTable {
            rows: DEFAULT_TABLE.to_vec(),
        }
    }
}

pub const SUPPORTED_LEVELS: [u32; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

impl TorsionTable {
    /// Parses lines `m a_spec b_spec N benefit cost`. `a_spec` is `2^k`
    /// (exact 2-adic valuation `k + v_2(N)`) or a power of two `a`
    /// (`2^{v_2(a) + v_2(N)}` divides the order); `b_spec` is `1` or `3`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::Config(format!("torsion table line {}: {what}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let m: u32 = fields[0].parse().map_err(|_| bad("m"))?;
            let n: u32 = fields[3].parse().map_err(|_| bad("N"))?;
            if !SUPPORTED_LEVELS.contains(&n) {
                return Err(Error::UnsupportedTorsion(n));
            }
            let vn = valuation(n as u64, 2);
            let two = if let Some(k) = fields[1].strip_prefix("2^") {
                TwoCondition::Exact(k.parse::<u32>().map_err(|_| bad("a_spec"))? + vn)
            } else {
                let a: u32 = fields[1].parse().map_err(|_| bad("a_spec"))?;
                if !a.is_power_of_two() {
                    return Err(bad("a_spec must be a power of two"));
                }
                let k = a.trailing_zeros() + vn;
                if k == vn {
                    TwoCondition::Any
                } else {
                    TwoCondition::AtLeast(k)
                }
            };
            let three = match fields[2] {
                "1" => false,
                "3" => true,
                _ => return Err(bad("b_spec must be 1 or 3")),
            };
            let benefit: f64 = fields[4].parse().map_err(|_| bad("benefit"))?;
            let cost: f64 = fields[5].parse().map_err(|_| bad("cost"))?;
            if !(benefit > 0.0 && cost > 0.0) {
                return Err(bad("benefit and cost must be positive"));
            }
            rows.push(TorsionConstraint {
                m,
                two,
                three,
                n,
                benefit,
                cost,
            });
        }
        Ok(TorsionTable { rows })
    }

    /// Best plan for `(p, t)` among: best row for `N0` only, for `N1` only,
    /// and for both; one-sided plans have their benefit halved.
    pub fn rank(&self, p: u64, t: u64) -> TorsionPlan {
        let n0 = p + 1 - t;
        let n1 = p + 1 + t;
        let mut best = TorsionPlan::null();
        for row in &self.rows {
            let (s0, s1) = (row.satisfied_by(n0), row.satisfied_by(n1));
            let applies_to = match (s0, s1) {
                (true, true) => AppliesTo::Both,
                (true, false) => AppliesTo::N0,
                (false, true) => AppliesTo::N1,
                (false, false) => continue,
            };
            let mut benefit = row.adjusted_benefit(p);
            if applies_to != AppliesTo::Both {
                benefit /= 2.0;
            }
            let plan = TorsionPlan {
                constraint: Some(*row),
                applies_to,
                benefit,
                cost: row.cost,
            };
            if plan.ratio() > best.ratio() {
                best = plan;
            }
        }
        best
    }
}

/// Ranks `(p, t)` against the default table.
pub fn rank_torsion(p: u64, t: u64) -> TorsionPlan {
    TorsionTable::default().rank(p, t)
}
