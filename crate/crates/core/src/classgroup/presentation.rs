use std::collections::HashMap;

use super::form::{compose_unchecked, prime_form, reduce_unchecked};
use super::{class_number, QuadForm};
use crate::arith::{discriminant_info, is_prime_u64, kronecker, primes_up_to};
use crate::{Error, Result};

/// A minimal polycyclic presentation of `cl(D)` by prime forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolycyclicPresentation {
    pub d: i64,
    pub norms: Vec<u64>,
    pub generators: Vec<QuadForm>,
    pub rel_orders: Vec<u64>,
    /// `s_i = Z(x)` for the power relation `alpha_i^{r_i} = alpha^x`
    pub relations: Vec<u64>,
    pub class_number: u64,
}

/// Work counters for Algorithm 2.2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PresentationStats {
    pub insertions: u64,
    pub lookups: u64,
    pub compositions: u64,
}

impl PolycyclicPresentation {
    /// `N_j = prod_{i < j} r_i`
    pub fn strides(&self) -> Vec<u64> {
        let mut n = 1u64;
        self.rel_orders
            .iter()
            .map(|&r| {
                let cur = n;
                n *= r;
                cur
            })
            .collect()
    }

    /// Exponent vector `x` with `Z(x) = z`.
    pub fn decode(&self, z: u64) -> Vec<u64> {
        self.strides()
            .iter()
            .zip(&self.rel_orders)
            .map(|(&n, &r)| (z / n) % r)
            .collect()
    }

    /// `alpha^x` reduced.
    pub fn evaluate(&self, x: &[u64]) -> QuadForm {
        let mut acc = QuadForm::identity(self.d);
        for (g, &e) in self.generators.iter().zip(x) {
            acc = compose_unchecked(&acc, &super::form::power(g, e));
        }
        acc
    }

    /// The presentation for the trivial group (`h = 1`).
    pub fn trivial(d: i64) -> Self {
        PolycyclicPresentation {
            d,
            norms: Vec::new(),
            generators: Vec::new(),
            rel_orders: Vec::new(),
            relations: Vec::new(),
            class_number: 1,
        }
    }
}

impl std::fmt::Display for PolycyclicPresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, (l, r)) in self.norms.iter().zip(&self.rel_orders).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}^{r}")?;
        }
        write!(f, ")")
    }
}

/// Default candidate norms: primes `l <= 6 ln^2 |D|` with `(D/l) != -1`, `l` not dividing the conductor.
pub fn default_generator_norms(d: i64) -> Result<Vec<u64>> {
    let info = discriminant_info(d)?;
    let ln = (d.unsigned_abs() as f64).ln();
    let bound = (6.0 * ln * ln).floor() as u64;
    Ok(primes_up_to(bound.max(2))
        .into_iter()
        .filter(|&l| info.conductor % l != 0 && kronecker(d, l) != -1)
        .collect())
}

/// Algorithm 2.2 over prime forms of the given norms (in order), extended by
/// increasing primes beyond the list as needed.
pub fn polycyclic_presentation(d: i64, cost_order: &[u64]) -> Result<PolycyclicPresentation> {
    let h = class_number(d)?;
    polycyclic_presentation_bounded(d, h, cost_order, None).map(|(p, _)| p)
}

/// Algorithm 2.2 with a known class number. Extension past `cost_order` uses
/// primes up to `max_norm` (unbounded when `None`); exhausting them is an error.
pub fn polycyclic_presentation_bounded(
    d: i64,
    h: u64,
    cost_order: &[u64],
    max_norm: Option<u64>,
) -> Result<(PolycyclicPresentation, PresentationStats)> {
    let info = discriminant_info(d)?;
    let mut stats = PresentationStats::default();
    let identity = QuadForm::identity(d);
    let mut table: Vec<QuadForm> = vec![identity];
    let mut index: HashMap<(i64, i64), u64> = HashMap::new();
    index.insert((identity.a, identity.b), 0);
    stats.insertions += 1;

    let mut chosen_norms = Vec::new();
    let mut chosen_forms = Vec::new();
    let mut rel_orders = Vec::new();
    let mut relations = Vec::new();

    let usable = |l: u64| -> Option<QuadForm> {
        if info.conductor % l == 0 {
            return None;
        }
        prime_form(l, d).ok().flatten().map(reduce_unchecked)
    };

    let mut seen: Vec<u64> = Vec::new();
    let mut process = |gamma: QuadForm, l: u64, table: &mut Vec<QuadForm>, stats: &mut PresentationStats| {
        let n = table.len();
        let mut beta = gamma;
        let mut r = 1u64;
        loop {
            stats.lookups += 1;
            if let Some(&s) = index.get(&(beta.a, beta.b)) {
                if r > 1 {
                    chosen_norms.push(l);
                    chosen_forms.push(gamma);
                    rel_orders.push(r);
                    relations.push(s);
                }
                return;
            }
            for j in 0..n {
                let e = if j == 0 {
                    beta
                } else {
                    stats.compositions += 1;
                    compose_unchecked(&beta, &table[j])
                };
                index.insert((e.a, e.b), table.len() as u64);
                table.push(e);
                stats.insertions += 1;
            }
            beta = compose_unchecked(&beta, &gamma);
            stats.compositions += 1;
            r += 1;
        }
    };

    for &l in cost_order {
        if table.len() as u64 >= h {
            break;
        }
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        if let Some(g) = usable(l) {
            process(g, l, &mut table, &mut stats);
        }
    }
    let mut l = cost_order.iter().copied().max().unwrap_or(1);
    while (table.len() as u64) < h {
        l += 1;
        if max_norm.is_some_and(|m| l > m) || l > d.unsigned_abs() {
            return Err(Error::GeneratorsExhausted {
                found: table.len() as u64,
                h,
            });
        }
        if !is_prime_u64(l) || seen.contains(&l) {
            continue;
        }
        if let Some(g) = usable(l) {
            log::debug!("presentation for D={d}: extending candidates with l={l}");
            process(g, l, &mut table, &mut stats);
        }
    }
    if table.len() as u64 != h {
        return Err(Error::Precondition(format!(
            "table holds {} classes but h({d}) = {h}",
            table.len()
        )));
    }
    Ok((
        PolycyclicPresentation {
            d,
            norms: chosen_norms,
            generators: chosen_forms,
            rel_orders,
            relations,
            class_number: h,
        },
        stats,
    ))
}
