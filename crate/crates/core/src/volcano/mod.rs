//! Modular polynomials and navigation of `l`-isogeny volcanoes over `F_p`:
//! level finding, ascending and descending, surface walks, and the
//! enumeration of `Ell_O(F_p)` along a polycyclic presentation.

mod db;

pub use db::{ModPolyDb, PhiModP};

use std::cell::{Cell, OnceCell};
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::{discriminant_info, factorize, kronecker, valuation, Fe, PrimeField};
use crate::classgroup::PolycyclicPresentation;
use crate::polyring::{find_one_root_slice, roots, root_multiplicity, synthetic_div, ModPoly, Root};
use crate::{Error, Result};

/// Cap on the length of an unbounded walk to the floor.
const MAX_FLOOR_WALK: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkStats {
    /// vertices whose neighbors were computed
    pub examined: u64,
    /// divisions by a repeated root of the previous vertex
    pub repeated_edges: u64,
}

/// Outcome of moving a vertex into `Ell_O(F_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adjusted {
    Found(Fe),
    /// the ring could not be certified; draw a fresh curve
    Abort,
}

/// Everything about `p` and `D` needed to walk the volcanoes of
/// `t^2 - 4p = v^2 D = w^2 D_K`.
#[derive(Debug)]
pub struct VolcanoContext<'a> {
    field: &'a PrimeField,
    db: &'a ModPolyDb,
    pub d: i64,
    pub t: u64,
    pub v: u64,
    /// conductor of `D`
    pub u: u64,
    pub w: u64,
    pub d_k: i64,
    phis: BTreeMap<u64, OnceCell<PhiModP>>,
    excluded: [Fe; 2],
    stats: Cell<WalkStats>,
}

impl<'a> VolcanoContext<'a> {
    pub fn new(field: &'a PrimeField, db: &'a ModPolyDb, d: i64, t: u64, v: u64) -> Result<Self> {
        let p = field.modulus();
        let info = discriminant_info(d)?;
        let lhs = t as i128 * t as i128 - 4 * p as i128;
        if v == 0 || lhs != v as i128 * v as i128 * d as i128 {
            return Err(Error::Precondition(format!("t^2 - 4p != v^2 D for p={p}, t={t}, v={v}, D={d}")));
        }
        Ok(VolcanoContext {
            field,
            db,
            d,
            t,
            v,
            u: info.conductor,
            w: info.conductor * v,
            d_k: info.fundamental,
            phis: db.levels().filter(|&l| l != p).map(|l| (l, OnceCell::new())).collect(),
            excluded: [field.zero(), field.from_u64(1728)],
            stats: Cell::new(WalkStats::default()),
        })
    }

    pub fn field(&self) -> &PrimeField {
        self.field
    }

    pub fn stats(&self) -> WalkStats {
        self.stats.get()
    }

    pub fn reset_stats(&self) {
        self.stats.set(WalkStats::default());
    }

    /// `d(l) = nu_l(w)`
    pub fn depth(&self, l: u64) -> u32 {
        valuation(self.w, l)
    }

    pub fn phi(&self, l: u64) -> Result<&PhiModP> {
        if l == self.field.modulus() {
            return Err(Error::Precondition(format!("l = p = {l}")));
        }
        let cell = self.phis.get(&l).ok_or(Error::MissingModularPolynomial(l))?;
        Ok(cell.get_or_init(|| self.db.reduce(l, self.field).expect("level present in the database")))
    }

    /// `Phi_l(X, j)` mod `p`.
    pub fn phi_instantiate(&self, l: u64, j: Fe) -> Result<ModPoly> {
        Ok(ModPoly::new(self.field, self.phi(l)?.instantiate(self.field, j)))
    }

    fn examine(&self) {
        let mut s = self.stats.get();
        s.examined += 1;
        self.stats.set(s);
    }

    /// `Phi_l(X, j) / (X - prev)^e` with the roots 0 and 1728 divided out.
    fn neighbor_poly(&self, l: u64, j: Fe, prev: Option<Fe>) -> Result<Vec<Fe>> {
        let f = self.field;
        self.examine();
        let mut g = self.phi(l)?.instantiate(f, j);
        let strip = |g: &mut Vec<Fe>, r: Fe| -> u32 {
            let e = root_multiplicity(f, g, r);
            for _ in 0..e {
                *g = synthetic_div(f, g, r).0;
            }
            e
        };
        if let Some(prev) = prev {
            let e = strip(&mut g, prev);
            if e > 1 {
                let mut s = self.stats.get();
                s.repeated_edges += 1;
                self.stats.set(s);
                log::debug!("repeated {l}-isogeny edge at p={} (e={e})", f.modulus());
            }
        }
        for r in self.excluded {
            strip(&mut g, r);
        }
        Ok(g)
    }

    /// Roots of `Phi_l(X, j) / (X - prev)^e` other than 0 and 1728, with
    /// multiplicities, where `e` is the multiplicity of `prev`.
    pub fn neighbors(&self, l: u64, j: Fe, prev: Option<Fe>) -> Result<Vec<Root>> {
        let g = self.neighbor_poly(l, j, prev)?;
        Ok(roots(self.field, &ModPoly::new(self.field, g)))
    }

    /// `deg(j)` in the `l`-isogeny graph, counting multiplicity.
    pub fn degree(&self, l: u64, j: Fe) -> Result<u32> {
        Ok(self.neighbors(l, j, None)?.iter().map(|r| r.multiplicity).sum())
    }

    fn random_neighbor<R: Rng + ?Sized>(&self, l: u64, j: Fe, prev: Option<Fe>, rng: &mut R) -> Result<Option<Fe>> {
        let g = self.neighbor_poly(l, j, prev)?;
        Ok(find_one_root_slice(self.field, &g, rng))
    }

    /// Extends a path by up to `steps` random non-backtracking steps and
    /// returns the number taken.
    pub fn extend_path<R: Rng + ?Sized>(&self, l: u64, path: &mut Vec<Fe>, steps: usize, rng: &mut R) -> Result<usize> {
        for k in 0..steps {
            let n = path.len();
            let prev = (n >= 2).then(|| path[n - 2]);
            match self.random_neighbor(l, path[n - 1], prev, rng)? {
                Some(x) => path.push(x),
                None => return Ok(k),
            }
        }
        Ok(steps)
    }

    /// Whether the last vertex of a path has a neighbor beyond the one before it.
    fn continues(&self, l: u64, path: &[Fe]) -> Result<bool> {
        let n = path.len();
        let g = self.neighbor_poly(l, path[n - 1], (n >= 2).then(|| path[n - 2]))?;
        Ok(g.len() > 1 && crate::polyring::split_part(self.field, &g).len() > 1)
    }

    fn two_distinct<R: Rng + ?Sized>(&self, nbrs: &[Root], rng: &mut R) -> Result<(Fe, Fe)> {
        if nbrs.len() < 2 {
            return Err(self.failure("vertex has fewer than two distinct neighbors"));
        }
        let mut pick: Vec<Fe> = nbrs.iter().map(|r| r.value).collect();
        pick.shuffle(rng);
        Ok((pick[0], pick[1]))
    }

    fn failure(&self, reason: &str) -> Error {
        Error::PrimeFailure {
            p: self.field.modulus(),
            reason: reason.to_string(),
        }
    }

    /// Level of `j` in its `l`-volcano (0 is the surface).
    pub fn find_level<R: Rng + ?Sized>(&self, l: u64, j: Fe, rng: &mut R) -> Result<u32> {
        let d = self.depth(l);
        if d == 0 {
            return Ok(0);
        }
        let nbrs = self.neighbors(l, j, None)?;
        let deg: u32 = nbrs.iter().map(|r| r.multiplicity).sum();
        if deg as u64 != l + 1 {
            return Ok(d);
        }
        let (j1, j2) = self.two_distinct(&nbrs, rng)?;
        let mut p1 = vec![j, j1];
        let k1 = 1 + self.extend_path(l, &mut p1, d as usize - 1, rng)?;
        let mut p2 = vec![j, j2];
        let k2 = 1 + self.extend_path(l, &mut p2, k1 - 1, rng)?;
        Ok(d - k2 as u32)
    }

    /// A neighbor of `j` one level down, given that `j` is on level `k < d`.
    pub fn descend<R: Rng + ?Sized>(&self, l: u64, j: Fe, k: u32, rng: &mut R) -> Result<Fe> {
        let d = self.depth(l);
        if k >= d {
            return Err(Error::Precondition(format!("cannot descend from level {k} of depth {d}")));
        }
        if k == 0 {
            let mut path = vec![j];
            let n = self.extend_path(l, &mut path, MAX_FLOOR_WALK, rng)?;
            if n < d as usize || n == MAX_FLOOR_WALK {
                return Err(self.failure("walk to the floor did not end at depth"));
            }
            return Ok(path[n - d as usize + 1]);
        }
        let nbrs = self.neighbors(l, j, None)?;
        let (j1, j2) = self.two_distinct(&nbrs, rng)?;
        let mut path = vec![j, j1];
        self.extend_path(l, &mut path, (d - k - 1) as usize, rng)?;
        Ok(if self.continues(l, &path)? { j2 } else { j1 })
    }

    /// A neighbor of `j` one level up, given that `j` is on level `k > 0`.
    pub fn ascend<R: Rng + ?Sized>(&self, l: u64, j: Fe, k: u32, rng: &mut R) -> Result<Fe> {
        let d = self.depth(l);
        if k == 0 || k > d {
            return Err(Error::Precondition(format!("cannot ascend from level {k} of depth {d}")));
        }
        let nbrs = self.neighbors(l, j, None)?;
        let deg: u32 = nbrs.iter().map(|r| r.multiplicity).sum();
        if deg == 1 {
            return Ok(nbrs[0].value);
        }
        let mut cands: Vec<Fe> = nbrs.iter().map(|r| r.value).collect();
        cands.shuffle(rng);
        let (last, rest) = cands.split_last().ok_or_else(|| self.failure("isolated vertex"))?;
        for &ji in rest {
            let mut path = vec![j, ji];
            self.extend_path(l, &mut path, (d - k - 1) as usize, rng)?;
            if self.continues(l, &path)? {
                return Ok(ji);
            }
        }
        Ok(*last)
    }

    /// `L = max(ln |D|, v)`
    pub fn level_bound(&self) -> f64 {
        (self.d.unsigned_abs() as f64).ln().max(self.v as f64)
    }

    /// Moves `j` with trace `t` to a vertex whose endomorphism ring has
    /// discriminant `D`.
    ///
    /// For `l | w` with `l <= L` the level is set explicitly; a conductor
    /// prime `l > L` does not divide `v`, so `j` must already be on the floor
    /// of its `l`-volcano, which is checked (one root count) rather than
    /// enforced. A failed check is an [`Adjusted::Abort`].
    pub fn adjust_to_order<R: Rng + ?Sized>(&self, j: Fe, rng: &mut R) -> Result<Adjusted> {
        if self.excluded.contains(&j) {
            return Err(Error::Precondition("j = 0 or 1728".into()));
        }
        let bound = self.level_bound();
        let mut j = j;
        for &(l, _) in factorize(self.w).factors() {
            if !self.db.contains(l) {
                return Err(Error::MissingModularPolynomial(l));
            }
            let target = valuation(self.u, l);
            if (l as f64) <= bound {
                let mut level = self.find_level(l, j, rng)?;
                while level < target {
                    j = self.descend(l, j, level, rng)?;
                    level += 1;
                }
                while level > target {
                    j = self.ascend(l, j, level, rng)?;
                    level -= 1;
                }
            } else if self.degree(l, j)? as u64 == l + 1 {
                return Ok(Adjusted::Abort);
            }
        }
        Ok(Adjusted::Found(j))
    }

    /// A path `j_0, ..., j_n` on the surface of the `l`-volcano of `j_0`,
    /// for `n < #V_0`.
    pub fn walk_surface_path<R: Rng + ?Sized>(&self, l: u64, j0: Fe, n: usize, rng: &mut R) -> Result<Vec<Fe>> {
        if n == 0 {
            return Ok(vec![j0]);
        }
        let d = self.depth(l) as usize;
        let first = self.neighbors(l, j0, None)?;
        let deg: u32 = first.iter().map(|r| r.multiplicity).sum();
        if deg == 0 {
            return Err(self.failure("surface vertex without neighbors"));
        }
        if deg == 1 {
            return Ok(vec![j0, first[0].value]);
        }
        let mut path = vec![j0];
        if d > 0 {
            path.push(first[rng.gen_range(0..first.len())].value);
            if self.extend_path(l, &mut path, d - 1, rng)? < d - 1 {
                return Err(self.failure("surface walk fell off the volcano"));
            }
        }
        let mut i = 0usize;
        let mut visited: Vec<Fe> = path.get(1).copied().into_iter().collect();
        let mut cands: Option<Vec<Fe>> = Some(first.iter().map(|r| r.value).collect());
        loop {
            loop {
                let tip = path[i + d];
                let prev = (i + d >= 1).then(|| path[i + d - 1]);
                if let Some(x) = self.random_neighbor(l, tip, prev, rng)? {
                    path.push(x);
                    break;
                }
                // j_{i+d} is on the floor, so j_{i+1} left the surface
                if d == 0 {
                    return Err(self.failure("surface walk reached a dead end"));
                }
                path.truncate(i + 1);
                let ji = path[i];
                let list = match cands.take() {
                    Some(c) => c,
                    None => {
                        let prev = (i >= 1).then(|| path[i - 1]);
                        self.neighbors(l, ji, prev)?.iter().map(|r| r.value).collect()
                    }
                };
                let fresh: Vec<Fe> = list.iter().copied().filter(|x| !visited.contains(x)).collect();
                let Some(&next) = fresh.get(rng.gen_range(0..fresh.len().max(1))) else {
                    return Err(self.failure("no unvisited surface neighbor"));
                };
                cands = Some(list);
                visited.push(next);
                path.push(next);
                if self.extend_path(l, &mut path, d - 1, rng)? < d - 1 {
                    return Err(self.failure("surface walk fell off the volcano"));
                }
            }
            i += 1;
            if i == n {
                path.truncate(n + 1);
                return Ok(path);
            }
            visited.clear();
            visited.extend(path.get(i + 1).copied());
            cands = None;
        }
    }

    /// Streams `Ell_O(F_p)`: `j0` first, then the remaining `h(D) - 1`
    /// vertices, each exactly once.
    pub fn enumerate_ring_class_with<R: Rng + ?Sized>(
        &self,
        j0: Fe,
        pres: &PolycyclicPresentation,
        rng: &mut R,
        emit: &mut dyn FnMut(Fe),
    ) -> Result<()> {
        if pres.d != self.d {
            return Err(Error::DiscriminantMismatch(pres.d, self.d));
        }
        for &l in &pres.norms {
            if self.u % l == 0 || kronecker(self.d, l) == -1 {
                return Err(Error::Precondition(format!("l = {l} is not a norm of an invertible ideal")));
            }
            self.phi(l)?;
        }
        emit(j0);
        self.enumerate_rec(j0, pres, pres.norms.len(), rng, emit)
    }

    fn enumerate_rec<R: Rng + ?Sized>(
        &self,
        j: Fe,
        pres: &PolycyclicPresentation,
        k: usize,
        rng: &mut R,
        emit: &mut dyn FnMut(Fe),
    ) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        let (l, r) = (pres.norms[k - 1], pres.rel_orders[k - 1]);
        let path = self.walk_surface_path(l, j, r as usize - 1, rng)?;
        for &x in &path[1..] {
            emit(x);
        }
        if k > 1 {
            for &x in &path {
                self.enumerate_rec(x, pres, k - 1, rng, emit)?;
            }
        }
        Ok(())
    }

    /// `Ell_O(F_p)` as a list, `j0` first.
    pub fn enumerate_ring_class<R: Rng + ?Sized>(
        &self,
        j0: Fe,
        pres: &PolycyclicPresentation,
        rng: &mut R,
    ) -> Result<Vec<Fe>> {
        let mut out = Vec::with_capacity(pres.class_number as usize);
        self.enumerate_ring_class_with(j0, pres, rng, &mut |x| out.push(x))?;
        Ok(out)
    }
}

/// Size class of a volcano surface for [`surface_step_cost`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceSize {
    Two,
    Larger,
}

/// Expected vertices examined by a surface walk: the whole one-step walk
/// when `#V_0 = 2`, otherwise the cost per step.
pub fn surface_step_cost(l: u64, d: u32, size: SurfaceSize) -> f64 {
    let (l, d) = (l as f64, d as f64);
    match size {
        SurfaceSize::Two => d + 1.0 + l * d / 2.0,
        SurfaceSize::Larger => 1.0 + (l - 1.0) * d / 2.0,
    }
}
