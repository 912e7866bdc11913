//! Boundary algebras of equivariant circuits and the indices read off them.
//!
//! For a circuit `alpha` of range at most `r` and a cut `x`, the boundary
//! algebra is `P = alpha(A_{L_x}) ∩ A_{L_{x-r}}'`. It is isomorphic to the
//! algebra of the strip `[x-r, x)` and carries the restricted symmetry, which
//! is implemented by a projective representation `W`. The class of its
//! cocycle is the index.
//!
//! Two constructions of `P` are provided: through the near-boundary circuit
//! `eta` (cheap, used everywhere), and directly from the definition as a
//! commutant (an oracle, feasible only for small clusters).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::cohomology::{CohomClass, CohomologyGroup};
use crate::lattice::{check_equivariant, generators, measure_range, Circuit, OnSiteSymmetry, SpinRing};
use crate::linalg::{
    abs, c64, clock_shift, digest, frob, frob_diff, herm_eig, identity, kron, sqrt, unitarity_residual, CMat, ONE, ZERO,
};
use crate::projrep::{as_scalar, classify_phases, ClassMethod, NumericPhaseCochain, ProjectiveRep};
use crate::rng::{complex_normal, derived, normal, Stream};
use crate::tensor::{apply_left, index_map, merge_supports, permute_factors, wire_basis, LocalOperator};
use crate::{Config, Error, Result};

/// Largest cluster dimension handled by the commutant oracle.
pub const MAX_COMMUTANT_DIM: usize = 32;

#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }
    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
    pub(crate) fn union_all(&mut self, items: &[usize]) {
        for w in items.windows(2) {
            self.union(w[0], w[1]);
        }
    }
}

/// `m P`, where the permutation `P` reorders the tensor factors `dims` so
/// that factor `k` of the target is source factor `order[k]`.
fn reorder_columns(m: &CMat, dims: &[usize], order: &[usize]) -> CMat {
    let map = index_map(dims, order);
    CMat::from_fn(m.nrows(), map.len(), |r, i| m[(r, map[i])])
}

/// `P^T m` for the same permutation.
fn reorder_rows(m: &CMat, dims: &[usize], order: &[usize]) -> CMat {
    let map = index_map(dims, order);
    CMat::from_fn(map.len(), m.ncols(), |i, c| m[(map[i], c)])
}

fn inverse_order(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (k, &o) in order.iter().enumerate() {
        inv[o] = k;
    }
    inv
}

// ---------------------------------------------------------------------------
// eta

/// A circuit split at a cut into `eta` and the remaining gates meeting the
/// left half `L_x`, so that `alpha = eta o rest` on operators near the cut.
#[derive(Debug, Clone)]
pub struct EtaSplit {
    pub cut: i64,
    pub eta: Circuit,
    pub rest: Circuit,
}

/// Splits `c` at `x`.
///
/// A gate of layer `i` belongs to `eta` when it lies within a quarter of the
/// circumference of the cut and either straddles the cut or overlaps a gate
/// already placed in `eta`. Every later gate touching `eta` is thereby part
/// of `eta`, so the remaining gates can be moved in front of it.
pub fn eta_circuit(c: &Circuit, ring: &SpinRing, x: i64) -> EtaSplit {
    let geo = ring.geometry();
    let q = (geo.nx() / 4) as i64;
    let offs =
        |g: &LocalOperator| -> Vec<i64> { g.wires().iter().map(|&w| geo.offset_x(ring.wire(w).site, x)).collect() };
    let mut reached = vec![false; c.num_wires()];
    let mut eta_layers = Vec::with_capacity(c.depth());
    let mut rest_layers = Vec::with_capacity(c.depth());
    for layer in c.layers() {
        let mut el = Vec::new();
        let mut rl = Vec::new();
        let mut newly = Vec::new();
        for gate in layer {
            let o = offs(gate);
            let near = o.iter().all(|&v| v >= -q && v < q);
            let left = o.iter().any(|&v| v < 0);
            let straddles = left && o.iter().any(|&v| v >= 0);
            let meets = gate.wires().iter().any(|&w| reached[w]);
            if near && (straddles || meets) {
                newly.extend(gate.wires().iter().copied());
                el.push(gate.clone());
            } else if left {
                rl.push(gate.clone());
            }
        }
        for w in newly {
            reached[w] = true;
        }
        eta_layers.push(el);
        rest_layers.push(rl);
    }
    EtaSplit {
        cut: x,
        eta: Circuit::from_layers(c.num_wires(), eta_layers).expect("subset of a valid circuit"),
        rest: Circuit::from_layers(c.num_wires(), rest_layers).expect("subset of a valid circuit"),
    }
}

/// `max || alpha(O) - eta(rest(O)) ||` over generators `O` on sites left of
/// the cut within a quarter circumference.
pub fn eta_residual(c: &Circuit, split: &EtaSplit, ring: &SpinRing) -> f64 {
    let q = (ring.geometry().nx() / 4) as i64;
    let wires = ring.wires_in_offsets(split.cut, -q, 0);
    generators(ring, &wires)
        .iter()
        .map(|o| {
            let lhs = c.apply(o);
            let rhs = split.eta.apply(&split.rest.apply(o));
            lhs.distance(&rhs).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// factors and boundary algebras

/// A type I factor `F (M_k ⊗ 1_m) F^*` on a set of wires. The frame `F` maps
/// the virtual space `C^k ⊗ C^m` onto the wires (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub wires: Vec<usize>,
    pub dims: Vec<usize>,
    pub frame: CMat,
    pub k: usize,
    pub m: usize,
    /// Strip wires whose algebra this factor is the image of, in the order
    /// of the virtual `C^k` factors. Known only for the `eta` route.
    pub origin: Option<Vec<usize>>,
    pub plain: bool,
}

impl Factor {
    /// The full algebra of one wire.
    pub fn plain(wire: usize, dim: usize) -> Self {
        Factor {
            wires: vec![wire],
            dims: vec![dim],
            frame: identity(dim),
            k: dim,
            m: 1,
            origin: Some(vec![wire]),
            plain: true,
        }
    }

    /// Matrix unit `F (e_ij ⊗ 1) F^*`.
    pub fn unit(&self, i: usize, j: usize) -> LocalOperator {
        let d = self.k * self.m;
        let mut out = CMat::zeros(d, d);
        for a in 0..self.m {
            let ci = self.frame.column(i * self.m + a);
            let cj = self.frame.column(j * self.m + a);
            out += ci * cj.adjoint();
        }
        LocalOperator::new(self.wires.clone(), self.dims.clone(), out).expect("frame matches support")
    }

    /// `F (G ⊗ 1) F^*` for clock and shift `G` of `M_k`.
    pub fn generators(&self) -> Vec<LocalOperator> {
        if self.k == 1 {
            return Vec::new();
        }
        let (z, x) = clock_shift(self.k);
        [z, x]
            .iter()
            .map(|g| {
                let v = kron(g, &identity(self.m));
                let mat = &self.frame * v * self.frame.adjoint();
                LocalOperator::new(self.wires.clone(), self.dims.clone(), mat).expect("frame matches support")
            })
            .collect()
    }

    /// Conditional expectation onto this factor tensored with everything
    /// outside its wires. `x` must contain the factor's wires.
    fn expect(&self, x: &LocalOperator) -> LocalOperator {
        if self.m == 1 {
            return x.clone();
        }
        let pos: Vec<usize> = self
            .wires
            .iter()
            .map(|w| x.wires().binary_search(w).expect("support contains factor"))
            .collect();
        let rest: Vec<usize> = (0..x.wires().len()).filter(|p| !pos.contains(p)).collect();
        let mut order = pos.clone();
        order.extend(rest.iter());
        let xm = permute_factors(x.matrix(), x.dims(), &order);
        let rd: usize = rest.iter().map(|&p| x.dims()[p]).product();
        let fr = kron(&self.frame, &identity(rd));
        let y = fr.adjoint() * xm * &fr;
        let (k, m) = (self.k, self.m);
        let mut z = CMat::zeros(y.nrows(), y.ncols());
        for a in 0..k {
            for a2 in 0..k {
                for r in 0..rd {
                    for r2 in 0..rd {
                        let mut s = ZERO;
                        for c in 0..m {
                            s += y[((a * m + c) * rd + r, (a2 * m + c) * rd + r2)];
                        }
                        s /= m as f64;
                        for b in 0..m {
                            z[((a * m + b) * rd + r, (a2 * m + b) * rd + r2)] = s;
                        }
                    }
                }
            }
        }
        let back = &fr * z * fr.adjoint();
        let new_dims: Vec<usize> = order.iter().map(|&o| x.dims()[o]).collect();
        let mat = permute_factors(&back, &new_dims, &inverse_order(&order));
        LocalOperator::new(x.wires().to_vec(), x.dims().to_vec(), mat).expect("same support")
    }

    /// Hilbert-Schmidt orthonormal basis `F (e_ij ⊗ 1) F^* / sqrt(m)`.
    fn basis(&self) -> Vec<LocalOperator> {
        if self.plain {
            return wire_basis(self.wires[0], self.k);
        }
        let s = c64::new(1.0 / sqrt(self.m as f64), 0.0);
        let mut out = Vec::with_capacity(self.k * self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                out.push(self.unit(i, j).scale(s));
            }
        }
        out
    }
}

/// Which construction produced a boundary algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Eta,
    Definition,
}

/// The boundary algebra at a cut as a tensor product of factors on
/// disjoint wire sets. Wires not covered by any factor contribute scalars.
#[derive(Debug, Clone)]
pub struct BoundaryAlgebra {
    pub cut: i64,
    pub width: usize,
    pub route: Route,
    /// The strip `[x-r, x)`.
    pub strip: Vec<usize>,
    pub factors: Vec<Factor>,
    wire_factor: BTreeMap<usize, usize>,
}

impl BoundaryAlgebra {
    pub fn new(cut: i64, width: usize, route: Route, strip: Vec<usize>, factors: Vec<Factor>) -> Result<Self> {
        let mut wire_factor = BTreeMap::new();
        for (i, f) in factors.iter().enumerate() {
            if f.k * f.m != f.dims.iter().product::<usize>() || f.frame.nrows() != f.k * f.m {
                return Err(Error::Dimension(format!(
                    "factor on {:?} has inconsistent frame",
                    f.wires
                )));
            }
            for &w in &f.wires {
                if wire_factor.insert(w, i).is_some() {
                    return Err(Error::Dimension(format!("wire {w} belongs to two factors")));
                }
            }
        }
        Ok(BoundaryAlgebra {
            cut,
            width,
            route,
            strip,
            factors,
            wire_factor,
        })
    }

    pub fn factor_of(&self, wire: usize) -> Option<usize> {
        self.wire_factor.get(&wire).copied()
    }

    /// `log2` of the size of the matrix algebra, `sum log2 k`.
    pub fn log2_dim(&self) -> f64 {
        self.factors.iter().map(|f| num_traits::Float::log2(f.k as f64)).sum()
    }

    /// Largest unitarity defect of the frames; matrix-unit relations hold
    /// exactly up to this.
    pub fn unit_residual(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| unitarity_residual(&f.frame))
            .fold(0.0, f64::max)
    }

    pub fn generators(&self) -> Vec<LocalOperator> {
        self.factors.iter().flat_map(|f| f.generators()).collect()
    }

    /// Conditional expectation of `op` onto the algebra.
    pub fn project(&self, op: &LocalOperator) -> Result<LocalOperator> {
        let touched: BTreeSet<usize> = op.wires().iter().filter_map(|w| self.factor_of(*w)).collect();
        let mut w = op.wires().to_vec();
        let mut d = op.dims().to_vec();
        for &f in &touched {
            let fac = &self.factors[f];
            let (w2, d2) = merge_supports(&w, &d, &fac.wires, &fac.dims)?;
            w = w2;
            d = d2;
        }
        let uncovered: Vec<usize> = op
            .wires()
            .iter()
            .copied()
            .filter(|w| self.factor_of(*w).is_none())
            .collect();
        let mut x = op.embed(&w, &d)?.reduce_out(&uncovered);
        for &f in &touched {
            x = self.factors[f].expect(&x);
        }
        Ok(x)
    }

    /// `|| op - E(op) || / || op ||`.
    pub fn leakage(&self, op: &LocalOperator) -> Result<f64> {
        let p = self.project(op)?;
        Ok(op.distance(&p)? / op.norm().max(1e-300))
    }

    /// Largest relative leakage of `beta_g(E)` over generators `E`.
    pub fn invariance_leakage(&self, beta: &OnSiteSymmetry) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for e in self.generators() {
            for g in 0..beta.group().order() {
                worst = worst.max(self.leakage(&beta.apply(g, &e))?);
            }
        }
        Ok(worst)
    }

    /// If the algebra is a product of full single-wire algebras, the list of
    /// those wires.
    pub fn wire_structure(&self, tol: f64) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for f in &self.factors {
            if f.plain {
                out.push(f.wires[0]);
                continue;
            }
            let gens = f.generators();
            let mut support: Option<usize> = None;
            for e in &gens {
                let t = e.trim(tol);
                if t.wires().len() != 1 {
                    return None;
                }
                match support {
                    None => support = Some(t.wires()[0]),
                    Some(s) if s == t.wires()[0] => {}
                    _ => return None,
                }
            }
            let w = support?;
            let pos = f.wires.binary_search(&w).ok()?;
            if f.dims[pos] != f.k {
                return None;
            }
            out.push(w);
        }
        out.sort_unstable();
        Some(out)
    }
}

fn strip_of(ring: &SpinRing, x: i64, r: usize) -> Vec<usize> {
    ring.wires_in_offsets(x, -(r as i64), 0)
}

/// `P = eta(A_strip)`: one factor per connected component of `eta` touching
/// the strip, plain factors for the other strip wires.
pub fn boundary_algebra_eta(
    c: &Circuit,
    ring: &SpinRing,
    x: i64,
    r: usize,
    cfg: &Config,
) -> Result<(BoundaryAlgebra, EtaSplit)> {
    let split = eta_circuit(c, ring, x);
    let strip = strip_of(ring, x, r);
    let gates: Vec<(usize, &LocalOperator)> = split
        .eta
        .layers()
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.iter().map(move |g| (i, g)))
        .collect();
    let mut dsu = DisjointSets::new(ring.num_wires());
    for (_, g) in &gates {
        dsu.union_all(g.wires());
    }
    let mut comps: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (_, g) in &gates {
        let root = dsu.find(g.wires()[0]);
        comps.entry(root).or_default().extend(g.wires().iter().copied());
    }
    let strip_set: BTreeSet<usize> = strip.iter().copied().collect();
    let mut factors = Vec::new();
    let mut covered = BTreeSet::new();
    for (root, wires) in comps {
        let kw: Vec<usize> = wires.iter().copied().filter(|w| strip_set.contains(w)).collect();
        if kw.is_empty() {
            continue;
        }
        let sw: Vec<usize> = wires.into_iter().collect();
        let dims = ring.dims_of(&sw);
        let dtot: usize = dims.iter().product();
        cfg.check_dim(dtot)?;
        let mut u = identity(dtot);
        for (_, g) in gates.iter().filter(|(_, g)| dsu.find(g.wires()[0]) == root) {
            let pos: Vec<usize> = g
                .wires()
                .iter()
                .map(|w| sw.binary_search(w).expect("gate inside its component"))
                .collect();
            u = apply_left(&u, &dims, &pos, g.matrix());
        }
        let mut order: Vec<usize> = (0..sw.len()).filter(|&p| strip_set.contains(&sw[p])).collect();
        order.extend((0..sw.len()).filter(|&p| !strip_set.contains(&sw[p])));
        let k: usize = kw.iter().map(|&w| ring.wire(w).dim).product();
        let frame = reorder_columns(&u, &dims, &order);
        covered.extend(sw.iter().copied());
        factors.push(Factor {
            wires: sw,
            dims,
            frame,
            k,
            m: dtot / k,
            origin: Some(kw),
            plain: false,
        });
    }
    for &w in &strip {
        if !covered.contains(&w) {
            factors.push(Factor::plain(w, ring.wire(w).dim));
        }
    }
    factors.sort_by_key(|f| f.wires[0]);
    Ok((BoundaryAlgebra::new(x, r, Route::Eta, strip, factors)?, split))
}

/// Larger of the measured ranges of `alpha` and `alpha^{-1}` on generators
/// within `3r` of the cut.
pub fn measured_range(c: &Circuit, ring: &SpinRing, x: i64, r: usize) -> usize {
    let r = r as i64;
    let window = ring.wires_in_offsets(x, -3 * r, 3 * r);
    measure_range(c, ring, &window).max(measure_range(&c.inverse(), ring, &window))
}

/// `P` straight from the definition. With `rho` the measured range,
/// `P = A_{[x-r, x-rho)} ⊗ Q` where `Q` is the commutant, inside
/// `A_{[x-rho, x+rho)}`, of the left Schmidt components of
/// `alpha(A_{[x, x+2 rho)})` split at `x + rho`.
pub fn boundary_algebra_def(c: &Circuit, ring: &SpinRing, x: i64, r: usize, cfg: &Config) -> Result<BoundaryAlgebra> {
    let rho = measured_range(c, ring, x, r);
    if rho > r {
        return Err(Error::Precondition(format!("measured range {rho} exceeds r = {r}")));
    }
    let strip = strip_of(ring, x, r);
    let ri = rho as i64;
    let geo = ring.geometry();
    let region: BTreeSet<usize> = ring.wires_in_offsets(x, -ri, ri).into_iter().collect();
    let mut comps: Vec<LocalOperator> = Vec::new();
    for o in generators(ring, &ring.wires_in_offsets(x, 0, 2 * ri)) {
        for op in [o.clone(), o.adjoint()] {
            let img = c.apply(&op);
            let left: Vec<usize> = img
                .wires()
                .iter()
                .copied()
                .filter(|&w| geo.offset_x(ring.wire(w).site, x) < ri)
                .collect();
            for (a, _) in img.schmidt_split(&left, 1e-12) {
                let a = a.trim(1e-10);
                if a.wires().is_empty() {
                    continue;
                }
                if let Some(w) = a.wires().iter().find(|w| !region.contains(w)) {
                    return Err(Error::SupportEscape(format!(
                        "component touches wire {w} outside the window"
                    )));
                }
                comps.push(a);
            }
        }
    }
    let mut dsu = DisjointSets::new(ring.num_wires());
    for a in &comps {
        dsu.union_all(a.wires());
    }
    let mut clusters: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for a in &comps {
        clusters
            .entry(dsu.find(a.wires()[0]))
            .or_default()
            .extend(a.wires().iter().copied());
    }
    let mut rng = derived(cfg.seed, 0xdef0 ^ (x as u64));
    let mut factors = Vec::new();
    let mut covered = BTreeSet::new();
    for (root, wires) in clusters {
        let cw: Vec<usize> = wires.into_iter().collect();
        let dims = ring.dims_of(&cw);
        let d: usize = dims.iter().product();
        if d > MAX_COMMUTANT_DIM {
            return Err(Error::CapExceeded {
                dim: d,
                cap: MAX_COMMUTANT_DIM,
            });
        }
        let mine: Vec<&LocalOperator> = comps.iter().filter(|a| dsu.find(a.wires()[0]) == root).collect();
        let mut s = CMat::zeros(d * d, d * d);
        let id = identity(d);
        for a in mine {
            let l = a.embed(&cw, &dims)?.into_matrix();
            for lm in [l.clone(), l.adjoint()] {
                let mm = kron(&id, &lm) - kron(&lm.transpose(), &id);
                s += mm.adjoint() * mm;
            }
        }
        let (vals, vecs) = herm_eig(&s);
        let top = vals.last().copied().unwrap_or(0.0).max(1.0);
        let basis: Vec<CMat> = (0..vals.len())
            .filter(|&i| vals[i] <= cfg.tol.rank * top)
            .map(|i| CMat::from_fn(d, d, |a, b| vecs[(b * d + a, i)]))
            .collect();
        factors.push(factor_from_algebra(&cw, &dims, &basis, &mut rng, cfg)?);
        covered.extend(cw);
    }
    let mut plain: BTreeSet<usize> = ring.wires_in_offsets(x, -(r as i64), -ri).into_iter().collect();
    plain.extend(region.iter().copied().filter(|w| !covered.contains(w)));
    for w in plain {
        factors.push(Factor::plain(w, ring.wire(w).dim));
    }
    factors.sort_by_key(|f| f.wires[0]);
    BoundaryAlgebra::new(x, r, Route::Definition, strip, factors)
}

/// Frame of a factor given a linear basis of it, via the spectral
/// projectors of a random self-adjoint element and matrix units
/// `P_i X P_1`.
fn factor_from_algebra(
    wires: &[usize],
    dims: &[usize],
    basis: &[CMat],
    rng: &mut Stream,
    cfg: &Config,
) -> Result<Factor> {
    let d: usize = dims.iter().product();
    let mut h = CMat::zeros(d, d);
    for b in basis {
        h += (b + b.adjoint()) * c64::new(normal(rng), 0.0);
    }
    let (vals, vecs) = herm_eig(&h);
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(abs(*v)));
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..d {
        if vals[i] - vals[i - 1] > 1e-6 * scale {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(i);
    }
    let k = groups.len();
    let m = groups[0].len();
    if groups.iter().any(|g| g.len() != m) || k * k != basis.len() {
        return Err(Error::Numerical(format!(
            "commutant on {wires:?} is not a factor (dimension {}, multiplicities {:?})",
            basis.len(),
            groups.iter().map(|g| g.len()).collect::<Vec<_>>()
        )));
    }
    let proj = |g: &Vec<usize>| -> CMat {
        let v = CMat::from_fn(d, g.len(), |r, c| vecs[(r, g[c])]);
        &v * v.adjoint()
    };
    let p1 = proj(&groups[0]);
    let f1 = CMat::from_fn(d, m, |r, c| vecs[(r, groups[0][c])]);
    let mut frame = CMat::zeros(d, d);
    for (i, g) in groups.iter().enumerate() {
        let e = if i == 0 {
            p1.clone()
        } else {
            let pi = proj(g);
            let mut best = CMat::zeros(d, d);
            for _ in 0..8 {
                let mut xr = CMat::zeros(d, d);
                for b in basis {
                    xr += b * complex_normal(rng);
                }
                let e = &pi * xr * &p1;
                if frob(&e) > frob(&best) {
                    best = e;
                }
                if frob(&best) > 1e-3 {
                    break;
                }
            }
            let n2 = frob(&best) * frob(&best) / m as f64;
            if n2 < 1e-20 {
                return Err(Error::Numerical("vanishing matrix unit".into()));
            }
            best / c64::new(sqrt(n2), 0.0)
        };
        let cols = e * &f1;
        for a in 0..m {
            frame.set_column(i * m + a, &cols.column(a));
        }
    }
    let res = unitarity_residual(&frame);
    if res > cfg.tol.algebra * 100.0 {
        return Err(Error::Numerical(format!("commutant frame not unitary ({res:.3e})")));
    }
    Ok(Factor {
        wires: wires.to_vec(),
        dims: dims.to_vec(),
        frame,
        k,
        m,
        origin: None,
        plain: false,
    })
}

/// Largest sine of the principal angles between two boundary algebras
/// viewed as linear subspaces, compared cluster by cluster on a common
/// coarsening of their factors. Returns 1 on any structural mismatch.
pub fn span_distance(a: &BoundaryAlgebra, b: &BoundaryAlgebra, cfg: &Config) -> Result<f64> {
    let all: BTreeSet<usize> = a.wire_factor.keys().chain(b.wire_factor.keys()).copied().collect();
    let n = all.iter().next_back().map(|w| w + 1).unwrap_or(0);
    let mut dsu = DisjointSets::new(n);
    for alg in [a, b] {
        for f in alg.factors.iter().filter(|f| !f.plain) {
            dsu.union_all(&f.wires);
        }
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &w in &all {
        clusters.entry(dsu.find(w)).or_default().push(w);
    }
    let mut dims_of: BTreeMap<usize, usize> = BTreeMap::new();
    for alg in [a, b] {
        for f in &alg.factors {
            for (&w, &d) in f.wires.iter().zip(&f.dims) {
                dims_of.insert(w, d);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (_, cw) in clusters {
        if cw.len() == 1 {
            let w = cw[0];
            let pa = a.factor_of(w).map(|f| a.factors[f].plain);
            let pb = b.factor_of(w).map(|f| b.factors[f].plain);
            match (pa, pb) {
                (Some(true), Some(true)) => continue,
                (Some(true), None) | (None, Some(true)) => return Ok(1.0),
                _ => {}
            }
        }
        let dims: Vec<usize> = cw.iter().map(|w| dims_of[w]).collect();
        let d: usize = dims.iter().product();
        let qa = cluster_basis(a, &cw, &dims, cfg)?;
        let qb = cluster_basis(b, &cw, &dims, cfg)?;
        if qa.ncols() != qb.ncols() {
            return Ok(1.0);
        }
        debug_assert_eq!(qa.nrows(), d * d);
        let g = qa.adjoint() * qb;
        let smin = g.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
        worst = worst.max(sqrt((1.0 - smin * smin).max(0.0)));
    }
    Ok(worst)
}

fn cluster_basis(alg: &BoundaryAlgebra, cw: &[usize], dims: &[usize], cfg: &Config) -> Result<CMat> {
    let d: usize = dims.iter().product();
    let mut ops = vec![LocalOperator::scalar(ONE)];
    let fs: BTreeSet<usize> = cw.iter().filter_map(|w| alg.factor_of(*w)).collect();
    let count: usize = fs.iter().map(|&f| alg.factors[f].k * alg.factors[f].k).product();
    if count.saturating_mul(d * d) > 1 << 24 {
        return Err(Error::CapExceeded {
            dim: count * d * d,
            cap: 1 << 24,
        });
    }
    cfg.check_dim(d)?;
    for &f in &fs {
        let fb = alg.factors[f].basis();
        let mut next = Vec::with_capacity(ops.len() * fb.len());
        for o in &ops {
            for e in &fb {
                next.push(o.tensor(e)?);
            }
        }
        ops = next;
    }
    let mut q = CMat::zeros(d * d, ops.len());
    for (i, o) in ops.iter().enumerate() {
        let m = o.embed(cw, dims)?.into_matrix();
        let nrm = frob(&m);
        for c in 0..d {
            for r in 0..d {
                q[(c * d + r, i)] = m[(r, c)] / nrm;
            }
        }
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// implementing unitaries

/// Part of `P` on which the symmetry acts through a dense block: one or more
/// non-plain factors, plain factors sharing an atom with them, and the atom
/// wires outside `P`.
#[derive(Debug, Clone)]
pub struct GroupBlock {
    pub wires: Vec<usize>,
    pub dims: Vec<usize>,
    /// Frame mapping `C^k ⊗ C^m` onto the wires.
    pub frame: CMat,
    pub k: usize,
    pub m: usize,
    /// Strip wires of the `C^k` factor in frame order, when known.
    pub k_wires: Option<Vec<usize>>,
    /// `W(g)` on `C^k`.
    pub w: Vec<CMat>,
    pub residual: f64,
}

/// Implementing unitaries `W(g)` of the symmetry restricted to `P`, as a
/// tensor product of atom unitaries (atoms lying in plain parts of `P`) and
/// dense blocks.
#[derive(Debug, Clone)]
pub struct Implementation {
    pub plain_atoms: Vec<usize>,
    pub blocks: Vec<GroupBlock>,
    pub cocycle: NumericPhaseCochain,
    pub residual: f64,
}

impl Implementation {
    /// Digest of all block matrices, for reports.
    pub fn digest(&self) -> u64 {
        self.blocks
            .iter()
            .flat_map(|b| b.w.iter())
            .fold(0u64, |h, m| h.rotate_left(7) ^ digest(m))
    }
}

/// Computes `W(g)` with `Ad W(g) = beta_g` on `P`, block by block.
///
/// In frame coordinates `U~ = F^* U_g F` must satisfy
/// `U~ (e_i1 ⊗ 1) U~^* = b_i ⊗ 1`. The columns of `W(g)` are read off the
/// `b_i` at the largest diagonal entry of `b_1`, which fixes `W(e) = 1`.
pub fn implementing_unitaries(
    p: &BoundaryAlgebra,
    beta: &OnSiteSymmetry,
    ring: &SpinRing,
    cfg: &Config,
) -> Result<Implementation> {
    let q = beta.group().order();
    let in_p: BTreeSet<usize> = p.factors.iter().flat_map(|f| f.wires.iter().copied()).collect();
    let plain_wire = |w: usize| p.factor_of(w).map(|f| p.factors[f].plain).unwrap_or(false);
    let mut dsu = DisjointSets::new(ring.num_wires());
    let mut dense_root = BTreeSet::new();
    for f in p.factors.iter().filter(|f| !f.plain) {
        dsu.union_all(&f.wires);
    }
    let touched_atoms = beta.atoms_touching(&in_p.iter().copied().collect::<Vec<_>>());
    for &a in &touched_atoms {
        dsu.union_all(&beta.atoms()[a].wires);
    }
    for f in p.factors.iter().filter(|f| !f.plain) {
        dense_root.insert(dsu.find(f.wires[0]));
    }
    let mut comps: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &w in &in_p {
        comps.entry(dsu.find(w)).or_default().insert(w);
    }
    for &a in &touched_atoms {
        let ws = &beta.atoms()[a].wires;
        comps.entry(dsu.find(ws[0])).or_default().extend(ws.iter().copied());
    }
    let mut plain_atoms = Vec::new();
    let mut blocks = Vec::new();
    let mut cocycle = NumericPhaseCochain::new(q, vec![ONE; q * q])?;
    let mut residual: f64 = 0.0;
    for (root, ws) in comps {
        let all_plain = !dense_root.contains(&root) && ws.iter().all(|&w| plain_wire(w));
        if all_plain {
            let ws: Vec<usize> = ws.into_iter().collect();
            for a in beta.atoms_touching(&ws) {
                plain_atoms.push(a);
                cocycle = cocycle.mul(&beta.atom_rep(a).cocycle_of());
            }
            continue;
        }
        let block = dense_block(p, beta, ring, &ws.into_iter().collect::<Vec<_>>(), cfg)?;
        residual = residual.max(block.residual);
        let rep = ProjectiveRep::new(beta.group().clone(), block.w.clone(), cfg.tol.algebra)?;
        cocycle = cocycle.mul(&rep.cocycle_of());
        blocks.push(block);
    }
    plain_atoms.sort_unstable();
    Ok(Implementation {
        plain_atoms,
        blocks,
        cocycle,
        residual,
    })
}

fn dense_block(
    p: &BoundaryAlgebra,
    beta: &OnSiteSymmetry,
    ring: &SpinRing,
    ws: &[usize],
    cfg: &Config,
) -> Result<GroupBlock> {
    let dims = ring.dims_of(ws);
    let dtot: usize = dims.iter().product();
    cfg.check_dim(dtot)?;
    let fids: BTreeSet<usize> = ws.iter().filter_map(|w| p.factor_of(*w)).collect();
    let dense: Vec<&Factor> = fids.iter().map(|&f| &p.factors[f]).filter(|f| !f.plain).collect();
    let plain: Vec<usize> = fids
        .iter()
        .map(|&f| &p.factors[f])
        .filter(|f| f.plain)
        .map(|f| f.wires[0])
        .collect();
    let uncovered: Vec<usize> = ws.iter().copied().filter(|w| p.factor_of(*w).is_none()).collect();

    // block-virtual factors: (k_f, m_f) per dense factor, then plain, then uncovered
    let mut bv_dims = Vec::new();
    let mut bmat = CMat::identity(1, 1);
    let mut bp_wires = Vec::new();
    for f in &dense {
        bv_dims.push(f.k);
        bv_dims.push(f.m);
        bmat = kron(&bmat, &f.frame);
        bp_wires.extend(f.wires.iter().copied());
    }
    for &w in plain.iter().chain(&uncovered) {
        let d = ring.wire(w).dim;
        bv_dims.push(d);
        bmat = kron(&bmat, &identity(d));
        bp_wires.push(w);
    }
    let nd = dense.len();
    let np = plain.len();
    let mut gv_order: Vec<usize> = (0..nd).map(|j| 2 * j).collect();
    gv_order.extend(2 * nd..2 * nd + np);
    gv_order.extend((0..nd).map(|j| 2 * j + 1));
    gv_order.extend(2 * nd + np..bv_dims.len());
    let bp_dims = ring.dims_of(&bp_wires);
    let phys_order: Vec<usize> = ws
        .iter()
        .map(|w| bp_wires.iter().position(|x| x == w).unwrap())
        .collect();
    let frame = reorder_columns(&reorder_rows(&bmat, &bp_dims, &phys_order), &bv_dims, &gv_order);

    let k: usize =
        dense.iter().map(|f| f.k).product::<usize>() * plain.iter().map(|&w| ring.wire(w).dim).product::<usize>();
    let m = dtot / k;
    let k_wires = if dense.iter().all(|f| f.origin.is_some()) {
        let mut kw: Vec<usize> = dense.iter().flat_map(|f| f.origin.clone().unwrap()).collect();
        kw.extend(plain.iter().copied());
        Some(kw)
    } else {
        None
    };

    let (_, rep) = beta.rep_on(ring, ws)?;
    let mut w_all = Vec::with_capacity(rep.matrices().len());
    let mut residual: f64 = 0.0;
    for u in rep.matrices() {
        let ut = frame.adjoint() * u * &frame;
        let col0 = ut.columns(0, m).into_owned();
        let ys: Vec<CMat> = (0..k).map(|i| ut.columns(i * m, m) * col0.adjoint()).collect();
        let bs: Vec<CMat> = ys
            .iter()
            .map(|y| {
                CMat::from_fn(k, k, |j, j2| {
                    let mut s = ZERO;
                    for c in 0..m {
                        s += y[(j * m + c, j2 * m + c)];
                    }
                    s / m as f64
                })
            })
            .collect();
        let jstar = (0..k)
            .max_by(|&a, &b| {
                bs[0][(a, a)]
                    .re
                    .partial_cmp(&bs[0][(b, b)].re)
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap_or(0);
        let norm = sqrt(bs[0][(jstar, jstar)].re.max(1e-300));
        let mut w = CMat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                w[(j, i)] = bs[i][(j, jstar)] / norm;
            }
        }
        let idm = identity(m);
        for (i, y) in ys.iter().enumerate() {
            let wi = w.column(i) * w.column(0).adjoint();
            residual = residual.max(frob_diff(y, &kron(&wi, &idm)));
        }
        residual = residual.max(unitarity_residual(&w));
        w_all.push(w);
    }
    if residual > cfg.tol.algebra {
        return Err(Error::NotInvariant(residual));
    }
    Ok(GroupBlock {
        wires: ws.to_vec(),
        dims,
        frame,
        k,
        m,
        k_wires,
        w: w_all,
        residual,
    })
}

// ---------------------------------------------------------------------------
// indices

/// A classified index together with the diagnostics that produced it.
#[derive(Debug, Clone)]
pub struct IndexResult {
    pub degree: usize,
    pub class: CohomClass,
    pub method: ClassMethod,
    /// Numeric cochain values (`|G|` for degree 1, `|G|^2` for degree 2).
    pub phases: Vec<c64>,
    pub fit_residual: f64,
    /// Implementation or scalarity residual.
    pub residual: f64,
    pub equivariance: f64,
    pub range: usize,
    pub route: Option<Route>,
    pub digest: u64,
}

fn require_width_and_range(c: &Circuit, ring: &SpinRing, r: usize) -> Result<()> {
    ring.require_width(r)?;
    let nq = c.range_bound(ring);
    if nq > r {
        return Err(Error::Precondition(format!("r >= nq violated: r = {r}, nq = {nq}")));
    }
    Ok(())
}

fn require_equivariant(c: &Circuit, beta: &OnSiteSymmetry, ring: &SpinRing, cfg: &Config) -> Result<f64> {
    let eq = check_equivariant(c, beta, ring, None);
    if eq > cfg.tol.equivariance {
        return Err(Error::NotEquivariant(eq));
    }
    Ok(eq)
}

/// Builds `P` along the chosen route and checks it against the strip.
pub fn boundary_algebra(
    c: &Circuit,
    ring: &SpinRing,
    x: i64,
    r: usize,
    route: Route,
    cfg: &Config,
) -> Result<BoundaryAlgebra> {
    let p = match route {
        Route::Eta => {
            let (p, split) = boundary_algebra_eta(c, ring, x, r, cfg)?;
            let res = eta_residual(c, &split, ring);
            if res > cfg.tol.algebra {
                return Err(Error::Verification {
                    what: "alpha = eta o rest".into(),
                    residual: res,
                    tol: cfg.tol.algebra,
                });
            }
            p
        }
        Route::Definition => boundary_algebra_def(c, ring, x, r, cfg)?,
    };
    let strip_bits: f64 = p
        .strip
        .iter()
        .map(|&w| num_traits::Float::log2(ring.wire(w).dim as f64))
        .sum();
    if abs(p.log2_dim() - strip_bits) > 1e-9 {
        return Err(Error::IntersectionDimension {
            expected: format!("2^{strip_bits:.3}"),
            found: format!("2^{:.3}", p.log2_dim()),
        });
    }
    let ur = p.unit_residual();
    if ur > cfg.tol.algebra {
        return Err(Error::Verification {
            what: "matrix units".into(),
            residual: ur,
            tol: cfg.tol.algebra,
        });
    }
    Ok(p)
}

/// Index of an equivariant circuit at cut `x` with width `r`.
pub fn index_1d(
    c: &Circuit,
    beta: &OnSiteSymmetry,
    ring: &SpinRing,
    x: i64,
    r: usize,
    route: Route,
    cfg: &Config,
) -> Result<IndexResult> {
    require_width_and_range(c, ring, r)?;
    beta.require_linear(ring, cfg.tol.snap)?;
    let eq = require_equivariant(c, beta, ring, cfg)?;
    let p = boundary_algebra(c, ring, x, r, route, cfg)?;
    let imp = implementing_unitaries(&p, beta, ring, cfg)?;
    let h2 = CohomologyGroup::default_for(beta.group(), 2)?;
    let (class, fit, method) = classify_phases(&h2, &imp.cocycle, cfg.tol.snap, cfg.tol.class_fit)?;
    Ok(IndexResult {
        degree: 2,
        class,
        method,
        phases: imp.cocycle.values().to_vec(),
        fit_residual: fit,
        residual: imp.residual,
        equivariance: eq,
        range: measured_range(c, ring, x, r),
        route: Some(route),
        digest: imp.digest(),
    })
}

/// Charge of a symmetric unitary in zero dimensions: `beta_g(v) v^* =
/// lambda(g) 1` with `beta_g = Ad rep(g)`.
pub fn index_0d(v: &CMat, rep: &ProjectiveRep, cfg: &Config) -> Result<IndexResult> {
    if v.nrows() != rep.dim() || v.ncols() != rep.dim() {
        return Err(Error::Dimension(
            "unitary and representation differ in dimension".into(),
        ));
    }
    let ur = unitarity_residual(v);
    if ur > cfg.tol.unitary * (rep.dim() as f64) {
        return Err(Error::NotUnitary {
            what: "0d unitary".into(),
            residual: ur,
        });
    }
    let g = rep.group();
    let q = g.order();
    let mut lam = Vec::with_capacity(q);
    let mut residual: f64 = 0.0;
    for u in rep.matrices() {
        let prod = u * v * u.adjoint() * v.adjoint();
        match as_scalar(&prod, cfg.tol.algebra) {
            Some(z) => {
                let (_, res) = crate::linalg::scalar_part(&prod);
                residual = residual.max(res);
                lam.push(z);
            }
            None => return Err(Error::NotScalar(crate::linalg::scalar_part(&prod).1)),
        }
    }
    let h1 = CohomologyGroup::default_for(g, 1)?;
    let mut ks = Vec::with_capacity(q);
    let mut fit: f64 = 0.0;
    for (a, z) in lam.iter().enumerate() {
        let (k, dist) = crate::linalg::snap_phase(*z, h1.modulus());
        if dist > cfg.tol.snap {
            return Err(Error::PhaseNotRoot {
                g: a,
                h: 0,
                distance: dist,
                modulus: h1.modulus(),
            });
        }
        fit = fit.max(dist);
        ks.push(k);
    }
    let exact = crate::group::Cochain::from_values(q, 1, h1.modulus(), ks)?;
    let class = h1.class_of(&exact)?;
    Ok(IndexResult {
        degree: 1,
        class,
        method: ClassMethod::Snapped,
        phases: lam,
        fit_residual: fit,
        residual,
        equivariance: 0.0,
        range: 0,
        route: None,
        digest: digest(v),
    })
}

/// Class of the projective cocycle of a zero-dimensional symmetry action.
pub fn lps_index_0d(rep: &ProjectiveRep, cfg: &Config) -> Result<IndexResult> {
    let h2 = CohomologyGroup::default_for(rep.group(), 2)?;
    let omega = rep.cocycle_of();
    let (class, fit, method) = classify_phases(&h2, &omega, cfg.tol.snap, cfg.tol.class_fit)?;
    Ok(IndexResult {
        degree: 2,
        class,
        method,
        phases: omega.values().to_vec(),
        fit_residual: fit,
        residual: rep.product_residual(),
        equivariance: 0.0,
        range: 0,
        route: None,
        digest: rep.matrices().iter().fold(0u64, |h, m| h.rotate_left(7) ^ digest(m)),
    })
}

// ---------------------------------------------------------------------------
// two dimensions

/// Boundary algebra of one row segment of a vertical cut on a torus.
#[derive(Debug, Clone, PartialEq)]
pub struct RowReport {
    pub row: usize,
    pub log2_dim: f64,
    /// Largest row distance reached by `eta^{-1} beta_g eta` on the row's
    /// generators.
    pub range: usize,
    pub leakage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lps2dReport {
    pub cut: i64,
    pub width: usize,
    pub rows: Vec<RowReport>,
    pub range: usize,
    pub equivariance: f64,
    pub eta_residual: f64,
}

/// Row algebras `P_{x,y} = eta(A_{[x-r, x) x {y}})` along a vertical cut of
/// a torus, and how far the symmetry spreads them across rows.
pub fn boundary_lps_2d(
    c: &Circuit,
    beta: &OnSiteSymmetry,
    ring: &SpinRing,
    x: i64,
    r: usize,
    cfg: &Config,
) -> Result<Lps2dReport> {
    let geo = ring.geometry();
    let ny = match geo {
        crate::lattice::Geometry::Torus { ny, .. } => ny,
        _ => return Err(Error::GeometryMismatch),
    };
    require_width_and_range(c, ring, r)?;
    beta.require_linear(ring, cfg.tol.snap)?;
    let eq = require_equivariant(c, beta, ring, cfg)?;
    let split = eta_circuit(c, ring, x);
    let eres = eta_residual(c, &split, ring);
    if eres > cfg.tol.algebra {
        return Err(Error::Verification {
            what: "alpha = eta o rest".into(),
            residual: eres,
            tol: cfg.tol.algebra,
        });
    }
    let inv = split.eta.inverse();
    let strip = strip_of(ring, x, r);
    let strip_set: BTreeSet<usize> = strip.iter().copied().collect();
    let mut rows = Vec::with_capacity(ny);
    let mut overall = 0usize;
    for y in 0..ny {
        let row_wires: Vec<usize> = strip
            .iter()
            .copied()
            .filter(|&w| geo.coords(ring.wire(w).site).1 == y)
            .collect();
        let log2_dim = row_wires
            .iter()
            .map(|&w| num_traits::Float::log2(ring.wire(w).dim as f64))
            .sum();
        let mut range = 0usize;
        let mut leakage: f64 = 0.0;
        for o in generators(ring, &row_wires) {
            let e = split.eta.apply(&o);
            for g in 0..beta.group().order() {
                let xo = inv.apply(&beta.apply(g, &e)).trim(1e-10);
                let outside: Vec<usize> = xo.wires().iter().copied().filter(|w| !strip_set.contains(w)).collect();
                if !outside.is_empty() {
                    let inside = xo.reduce_out(&outside);
                    leakage = leakage.max(xo.distance(&inside)? / xo.norm().max(1e-300));
                }
                for &w in xo.wires().iter().filter(|w| strip_set.contains(w)) {
                    let dy = geo.offset_y(ring.wire(w).site, y as i64).unsigned_abs() as usize;
                    range = range.max(dy);
                }
            }
        }
        if leakage > cfg.tol.algebra {
            return Err(Error::NotInvariant(leakage));
        }
        overall = overall.max(range);
        rows.push(RowReport {
            row: y,
            log2_dim,
            range,
            leakage,
        });
    }
    Ok(Lps2dReport {
        cut: x,
        width: r,
        rows,
        range: overall,
        equivariance: eq,
        eta_residual: eres,
    })
}

/// Renders a class for diagnostics.
pub fn class_label(c: &CohomClass) -> alloc::string::String {
    if c.invariant_factors.is_empty() {
        return "0 (trivial group)".to_string();
    }
    format!("{:?} in Z/{:?}", c.coordinates, c.invariant_factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{random_symmetric_circuit, shift_entangler, shift_entangler_2d, Layout};
    use crate::group::{Cochain, GroupTable};
    use crate::lattice::Geometry;
    use crate::rng::seeded;

    fn pauli_mu() -> Cochain {
        ProjectiveRep::pauli().exact_cocycle().unwrap().clone()
    }

    #[test]
    fn identity_circuit_has_the_strip_as_boundary() {
        let cfg = Config::default();
        let g = GroupTable::z2xz2();
        let ring = SpinRing::uniform(Geometry::Ring(12), &[4]).unwrap();
        let beta = OnSiteSymmetry::per_leg(&ring, &g, &[(0, ProjectiveRep::regular(&g))]).unwrap();
        let c = Circuit::identity(ring.num_wires());
        let p = boundary_algebra(&c, &ring, 0, 2, Route::Eta, &cfg).unwrap();
        assert_eq!(p.wire_structure(1e-10).unwrap(), vec![10, 11]);
        let ind = index_1d(&c, &beta, &ring, 0, 2, Route::Eta, &cfg).unwrap();
        assert!(ind.class.is_zero());
        assert_eq!(ind.method, ClassMethod::Snapped);
    }

    #[test]
    fn shift_boundary_algebra_has_the_shifted_wire() {
        let cfg = Config::default();
        let sc = shift_entangler(&GroupTable::z2xz2(), &pauli_mu(), 24, &cfg).unwrap();
        let p = boundary_algebra(&sc.circuit, &sc.ring, 0, 4, Route::Eta, &cfg).unwrap();
        // wire id = 3 * site + leg; sites 20..=22 whole, (23, 0), (23, 1), (0, 0)
        let mut expected: Vec<usize> = (60..71).collect();
        expected.insert(0, 0);
        assert_eq!(p.wire_structure(1e-10).unwrap(), expected);
        assert!(p.invariance_leakage(&sc.beta).unwrap() < 1e-10);
        let ind = index_1d(&sc.circuit, &sc.beta, &sc.ring, 0, 4, Route::Eta, &cfg).unwrap();
        assert_eq!(ind.class.coordinates, vec![1]);
        assert!(ind.residual < 1e-10 && ind.equivariance < 1e-10);
        assert_eq!(ind.range, 1);
    }

    #[test]
    fn definition_route_agrees_with_eta() {
        let cfg = Config::default();
        let sc = shift_entangler(&GroupTable::z2xz2(), &pauli_mu(), 24, &cfg).unwrap();
        let (a, _) = boundary_algebra_eta(&sc.circuit, &sc.ring, 5, 4, &cfg).unwrap();
        let b = boundary_algebra_def(&sc.circuit, &sc.ring, 5, 4, &cfg).unwrap();
        assert!(span_distance(&a, &b, &cfg).unwrap() <= 1e-7);
        let ind = index_1d(&sc.circuit, &sc.beta, &sc.ring, 5, 4, Route::Definition, &cfg).unwrap();
        assert_eq!(ind.class.coordinates, vec![1]);
    }

    #[test]
    fn symmetric_brickwork_is_trivial_on_both_routes() {
        let cfg = Config::default();
        let g = GroupTable::cyclic(2);
        let ring = SpinRing::uniform(Geometry::Ring(12), &[2]).unwrap();
        let (_, x) = clock_shift(2);
        let rep = ProjectiveRep::new(g.clone(), vec![identity(2), x], 1e-12).unwrap();
        let beta = OnSiteSymmetry::per_leg(&ring, &g, &[(0, rep)]).unwrap();
        let mut rng = seeded(2);
        let c = random_symmetric_circuit(&ring, &beta, &Layout::Bond(vec![]), 1, &mut rng, &cfg).unwrap();
        let split = eta_circuit(&c, &ring, 1);
        assert!(eta_residual(&c, &split, &ring) < 1e-12);
        for route in [Route::Eta, Route::Definition] {
            let ind = index_1d(&c, &beta, &ring, 1, 2, route, &cfg).unwrap();
            assert!(ind.class.is_zero());
        }
        let (a, _) = boundary_algebra_eta(&c, &ring, 1, 2, &cfg).unwrap();
        let b = boundary_algebra_def(&c, &ring, 1, 2, &cfg).unwrap();
        assert!(span_distance(&a, &b, &cfg).unwrap() <= 1e-7);
    }

    #[test]
    fn width_precondition() {
        let cfg = Config::default();
        let sc = shift_entangler(&GroupTable::cyclic(2), &Cochain::zero(2, 2, 2), 24, &cfg).unwrap();
        assert!(matches!(
            index_1d(&sc.circuit, &sc.beta, &sc.ring, 0, 3, Route::Eta, &cfg),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            index_1d(&sc.circuit, &sc.beta, &sc.ring, 0, 5, Route::Eta, &cfg),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_dimensional_charges() {
        let cfg = Config::default();
        let g = GroupTable::cyclic(2);
        let reg = ProjectiveRep::regular(&g);
        let z = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE]));
        assert_eq!(index_0d(&z, &reg, &cfg).unwrap().class.coordinates, vec![1]);
        assert!(index_0d(&identity(2), &reg, &cfg).unwrap().class.is_zero());
        let h = CMat::from_fn(2, 2, |i, j| if i == 1 && j == 1 { -ONE } else { ONE } / sqrt(2.0));
        assert!(matches!(index_0d(&h, &reg, &cfg), Err(Error::NotScalar(_))));
        assert_eq!(
            lps_index_0d(&ProjectiveRep::pauli(), &cfg).unwrap().class.coordinates,
            vec![1]
        );
        assert!(lps_index_0d(&ProjectiveRep::regular(&GroupTable::z2xz2()), &cfg)
            .unwrap()
            .class
            .is_zero());
    }

    #[test]
    fn rows_of_a_torus_stay_in_their_row() {
        let cfg = Config::default();
        let sc = shift_entangler_2d(&GroupTable::cyclic(2), &Cochain::zero(2, 2, 2), 24, 2, &cfg).unwrap();
        let rep = boundary_lps_2d(&sc.circuit, &sc.beta, &sc.ring, 0, 4, &cfg).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.range, 0);
        assert!(rep.rows.iter().all(|r| (r.log2_dim - 12.0).abs() < 1e-12));
    }
}
