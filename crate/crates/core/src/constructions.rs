//! Explicit constructions: the shift example, random equivariant circuits,
//! symmetric blending, the even/odd factorization, zero-dimensional
//! disentangling and swindle charge schedules.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::boundary::{
    boundary_algebra_eta, eta_residual, implementing_unitaries, index_0d, index_1d, measured_range, IndexResult, Route,
};
use crate::cohomology::{CohomClass, CohomologyGroup};
use crate::group::{Cochain, GroupTable};
use crate::lattice::{check_equivariant, generators, measure_range, Atom, Circuit, Geometry, OnSiteSymmetry, SpinRing};
use crate::linalg::{
    c64, frob, frob_diff, gaussian, identity, kron, polar_unitary, random_unitary, sqrt, swap_matrix, trace, CMat, ONE,
};
use crate::projrep::{equivariant_unitary, ProjectiveRep};
use crate::rng::derived;
use crate::tensor::{apply_left, LocalOperator};
use crate::{Config, Error, Result};

// ---------------------------------------------------------------------------
// scenarios

/// A symmetric entangler: a circuit on a ring commuting with an on-site
/// symmetry.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub ring: SpinRing,
    pub beta: OnSiteSymmetry,
    pub circuit: Circuit,
    /// Width used for indices and blends; the range bound `nq` by default.
    pub width: usize,
    pub equivariance: f64,
}

impl Scenario {
    /// Checks equivariance on all wires.
    pub fn new(name: &str, ring: SpinRing, beta: OnSiteSymmetry, circuit: Circuit, cfg: &Config) -> Result<Self> {
        if circuit.num_wires() != ring.num_wires() {
            return Err(Error::Dimension(format!(
                "circuit on {} wires for a ring with {}",
                circuit.num_wires(),
                ring.num_wires()
            )));
        }
        let eq = check_equivariant(&circuit, &beta, &ring, None);
        if eq > cfg.tol.equivariance {
            return Err(Error::NotEquivariant(eq));
        }
        let width = circuit.range_bound(&ring).max(1);
        Ok(Scenario {
            name: name.to_string(),
            ring,
            beta,
            circuit,
            width,
            equivariance: eq,
        })
    }

    pub fn identity(name: &str, ring: SpinRing, beta: OnSiteSymmetry) -> Self {
        let circuit = Circuit::identity(ring.num_wires());
        Scenario {
            name: name.to_string(),
            ring,
            beta,
            circuit,
            width: 1,
            equivariance: 0.0,
        }
    }

    pub fn with_width(mut self, r: usize) -> Self {
        self.width = r;
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Sitewise stack; the circuits run in parallel.
    pub fn stack(&self, other: &Scenario, cfg: &Config) -> Result<Scenario> {
        let (ring, map) = self.ring.stack(&other.ring)?;
        let beta = self.beta.stack(&other.beta, &ring, &map)?;
        let circuit = self.circuit.stack(&other.circuit, &map, ring.num_wires())?;
        let name = format!("{}+{}", self.name, other.name);
        let sc = Scenario::new(&name, ring, beta, circuit, cfg)?;
        let width = sc.circuit.range_bound(&sc.ring).max(self.width).max(other.width);
        Ok(sc.with_width(width))
    }

    /// `other o self` on the same system, with layers compacted.
    pub fn compose(&self, other: &Scenario, cfg: &Config) -> Result<Scenario> {
        if self.ring != other.ring {
            return Err(Error::GeometryMismatch);
        }
        if self.beta.group() != other.beta.group() || self.beta.atoms().len() != other.beta.atoms().len() {
            return Err(Error::GroupMismatch);
        }
        let circuit = self.circuit.then(&other.circuit)?.compacted();
        let name = format!("{}*{}", other.name, self.name);
        Scenario::new(&name, self.ring.clone(), self.beta.clone(), circuit, cfg)
    }

    /// Appends layers of another circuit on the same ring.
    pub fn followed_by(&self, layers: &Circuit, cfg: &Config) -> Result<Scenario> {
        let circuit = self.circuit.then(layers)?;
        Scenario::new(&self.name, self.ring.clone(), self.beta.clone(), circuit, cfg)
    }

    pub fn index(&self, x: i64, route: Route, cfg: &Config) -> Result<IndexResult> {
        index_1d(&self.circuit, &self.beta, &self.ring, x, self.width, route, cfg)
    }
}

/// Wire of `leg` at `site`.
pub fn wire_at(ring: &SpinRing, site: usize, leg: usize) -> Option<usize> {
    ring.site_wires(site).iter().copied().find(|&w| ring.wire(w).leg == leg)
}

/// Depth-two swap network moving leg `a` one site to the right and leg `b`
/// one site to the left: swap `(j,a)` with `(j,b)`, then `(j,b)` with
/// `(j+1,a)`. On a torus every row is shifted along x.
pub fn shift_circuit(ring: &SpinRing, a: usize, b: usize) -> Result<Circuit> {
    let geo = ring.geometry();
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    for s in 0..ring.num_sites() {
        let (x, y) = geo.coords(s);
        let next = geo.site(x as i64 + 1, y as i64);
        let wa = wire_at(ring, s, a).ok_or_else(|| Error::Dimension(format!("site {s} has no leg {a}")))?;
        let wb = wire_at(ring, s, b).ok_or_else(|| Error::Dimension(format!("site {s} has no leg {b}")))?;
        let wn = wire_at(ring, next, a).ok_or_else(|| Error::Dimension(format!("site {next} has no leg {a}")))?;
        let (da, db) = (ring.wire(wa).dim, ring.wire(wb).dim);
        if da != db {
            return Err(Error::Dimension("shifted legs differ in dimension".into()));
        }
        l1.push(LocalOperator::from_unordered(
            &[wa, wb],
            &[da, da],
            swap_matrix(da, da),
        )?);
        l2.push(LocalOperator::from_unordered(
            &[wb, wn],
            &[da, da],
            swap_matrix(da, da),
        )?);
    }
    Circuit::from_layers(ring.num_wires(), vec![l1, l2])
}

/// Three legs of dimension `|G|`: leg 0 carries `regular_projective(mu)`,
/// leg 1 `regular_projective(-mu)`, leg 2 nothing. The circuit shifts leg 0
/// right and leg 2 left.
pub fn shift_system(group: &GroupTable, mu: &Cochain, geometry: Geometry, cfg: &Config) -> Result<Scenario> {
    mu.require_cocycle(group)?;
    let q = group.order();
    let ring = SpinRing::uniform(geometry, &[q, q, q])?;
    let v = ProjectiveRep::regular_projective(group, mu)?;
    let vbar = ProjectiveRep::regular_projective(group, &mu.neg())?;
    let beta = OnSiteSymmetry::per_leg(&ring, group, &[(0, v), (1, vbar)])?;
    let circuit = shift_circuit(&ring, 0, 2)?;
    Scenario::new("shift", ring, beta, circuit, cfg)
}

/// The shift example on a ring of `n >= 24` sites.
pub fn shift_entangler(group: &GroupTable, mu: &Cochain, n: usize, cfg: &Config) -> Result<Scenario> {
    if n < 24 {
        return Err(Error::Precondition(format!("shift example needs N >= 24, got {n}")));
    }
    shift_system(group, mu, Geometry::Ring(n), cfg)
}

/// The shift example stacked along the rows of a torus.
pub fn shift_entangler_2d(group: &GroupTable, mu: &Cochain, nx: usize, ny: usize, cfg: &Config) -> Result<Scenario> {
    Ok(shift_system(group, mu, Geometry::Torus { nx, ny }, cfg)?.with_name("shift-rows"))
}

// ---------------------------------------------------------------------------
// random equivariant circuits

/// Gate placement for random circuits. Each variant lists the legs a gate
/// acts on (all legs when empty); gates are enlarged to whole atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    /// One gate per site.
    Site(Vec<usize>),
    /// Gates on neighbouring sites `(x, x+1)`, alternating parity by layer.
    Bond(Vec<usize>),
    /// Torus only: gates on `(x, y)` and `(x+1, y+1)`, alternating parity.
    Diagonal(Vec<usize>),
}

fn legs_at(ring: &SpinRing, site: usize, legs: &[usize]) -> Vec<usize> {
    ring.site_wires(site)
        .iter()
        .copied()
        .filter(|&w| legs.is_empty() || legs.contains(&ring.wire(w).leg))
        .collect()
}

/// Supports of the gates of layer `layer`.
pub fn layout_supports(ring: &SpinRing, layout: &Layout, layer: usize) -> Vec<Vec<usize>> {
    let geo = ring.geometry();
    let (nx, ny) = (geo.nx(), geo.ny());
    let pairs = |dy: i64, legs: &[usize]| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for x in (layer % 2..nx).step_by(2) {
            if x + 1 >= nx && nx % 2 == 1 {
                continue;
            }
            for y in 0..ny {
                let a = geo.site(x as i64, y as i64);
                let b = geo.site(x as i64 + 1, y as i64 + dy);
                if a == b {
                    continue;
                }
                let mut w = legs_at(ring, a, legs);
                w.extend(legs_at(ring, b, legs));
                out.push(w);
            }
        }
        out
    };
    match layout {
        Layout::Site(legs) => (0..ring.num_sites()).map(|s| legs_at(ring, s, legs)).collect(),
        Layout::Bond(legs) => pairs(0, legs),
        Layout::Diagonal(legs) => pairs(1, legs),
    }
}

/// Random unitary `u` on the atom closure of `wires` with
/// `beta_g(u) = lambda(g) u`; `lambda = None` gives a symmetric gate.
///
/// A Gaussian matrix is projected onto the charge sector and replaced by its
/// polar factor, which stays in the sector.
pub fn random_charged_gate<R: Rng + ?Sized>(
    beta: &OnSiteSymmetry,
    ring: &SpinRing,
    wires: &[usize],
    lambda: Option<&Cochain>,
    rng: &mut R,
    cfg: &Config,
) -> Result<LocalOperator> {
    let group = beta.group();
    let q = group.order();
    let phases = match lambda {
        Some(l) => {
            if l.degree() != 1 {
                return Err(Error::Dimension("a charge is a 1-cochain".into()));
            }
            l.require_cocycle(group)?;
            l.phases()
        }
        None => vec![ONE; q],
    };
    let ws = beta.atom_closure(wires);
    let dims = ring.dims_of(&ws);
    let d: usize = dims.iter().product();
    cfg.check_dim(d)?;
    for _ in 0..cfg.intertwiner_retries {
        let x = LocalOperator::new(ws.clone(), dims.clone(), gaussian(rng, d, d))?;
        let mut acc = CMat::zeros(d, d);
        for (g, z) in phases.iter().enumerate() {
            acc += beta.apply(g, &x).embed(&ws, &dims)?.matrix() * z.conj();
        }
        acc /= c64::new(q as f64, 0.0);
        let (u, smin) = polar_unitary(&acc);
        if smin > 1e-3 * frob(&acc) / sqrt(d as f64) {
            return LocalOperator::new(ws, dims, u);
        }
    }
    Err(Error::Numerical(format!(
        "no invertible operator of this charge on wires {ws:?}"
    )))
}

/// Random circuit whose gates are each charged with a character drawn from
/// `charges` (symmetric gates when `charges` is empty). Such circuits are
/// equivariant since `Ad(lambda u) = Ad(u)`.
pub fn random_circuit<R: Rng + ?Sized>(
    ring: &SpinRing,
    beta: &OnSiteSymmetry,
    layout: &Layout,
    depth: usize,
    charges: &[Cochain],
    rng: &mut R,
    cfg: &Config,
) -> Result<Circuit> {
    let mut layers = Vec::with_capacity(depth);
    for l in 0..depth {
        let mut used = BTreeSet::new();
        let mut layer = Vec::new();
        for support in layout_supports(ring, layout, l) {
            if support.is_empty() {
                continue;
            }
            let closure = beta.atom_closure(&support);
            if closure.iter().any(|w| used.contains(w)) {
                return Err(Error::Overlap {
                    layer: l,
                    wire: closure[0],
                });
            }
            used.extend(closure.iter().copied());
            let lambda = if charges.is_empty() {
                None
            } else {
                Some(&charges[rng.gen_range(0..charges.len())])
            };
            layer.push(random_charged_gate(beta, ring, &support, lambda, rng, cfg)?);
        }
        layers.push(layer);
    }
    Circuit::new(ring, layers, cfg.tol.gate_unitary)
}

/// Random circuit of symmetric gates.
pub fn random_symmetric_circuit<R: Rng + ?Sized>(
    ring: &SpinRing,
    beta: &OnSiteSymmetry,
    layout: &Layout,
    depth: usize,
    rng: &mut R,
    cfg: &Config,
) -> Result<Circuit> {
    random_circuit(ring, beta, layout, depth, &[], rng, cfg)
}

/// Same automorphism, different layers: random single-wire unitaries `V`
/// are multiplied into layer `i` from the left and `V^*` into layer `i+1`
/// from the right. Depth and gate diameters are unchanged.
pub fn regauge_between<R: Rng + ?Sized>(c: &Circuit, ring: &SpinRing, i: usize, rng: &mut R) -> Result<Circuit> {
    if i + 1 >= c.depth() {
        return Err(Error::Precondition(format!("no layer after layer {i}")));
    }
    let vs: Vec<LocalOperator> = (0..c.num_wires())
        .map(|w| LocalOperator::on_wire(w, random_unitary(rng, ring.wire(w).dim)))
        .collect();
    let mut layers: Vec<Vec<LocalOperator>> = c.layers().to_vec();
    let mut merge = |layer: usize, after: bool| -> Result<()> {
        let mut out = Vec::new();
        let mut done = vec![false; c.num_wires()];
        for g in &layers[layer] {
            let mut g2 = g.clone();
            for &w in g.wires() {
                done[w] = true;
                g2 = if after {
                    vs[w].mul(&g2)?
                } else {
                    g2.mul(&vs[w].adjoint())?
                };
            }
            out.push(g2);
        }
        for (w, v) in vs.iter().enumerate() {
            if !done[w] {
                out.push(if after { v.clone() } else { v.adjoint() });
            }
        }
        layers[layer] = out;
        Ok(())
    };
    merge(i, true)?;
    merge(i + 1, false)?;
    Circuit::new(ring, layers, 1e-8)
}

/// Dense unitary of a circuit over all wires, `U = U_n ... U_1`, so that
/// `alpha(O) = U O U^*`.
pub fn dense_unitary(c: &Circuit, ring: &SpinRing, cfg: &Config) -> Result<CMat> {
    let dims = ring.dims_of(&(0..ring.num_wires()).collect::<Vec<_>>());
    let d: usize = dims.iter().product();
    cfg.check_dim(d)?;
    let mut u = identity(d);
    for layer in c.layers() {
        for g in layer {
            u = apply_left(&u, &dims, g.wires(), g.matrix());
        }
    }
    Ok(u)
}

/// `min_phi || a - e^{i phi} b ||`.
pub fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let z = trace(&(b.adjoint() * a));
    let ph = if z.norm() > 0.0 { z / z.norm() } else { ONE };
    frob_diff(a, &(b * ph))
}

// ---------------------------------------------------------------------------
// blending

/// Which side of a cut keeps the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `alpha` on the left, identity on the right.
    Left,
    /// Mirror image: identity on the left, `alpha` on the right.
    Right,
}

/// Auxiliary degrees of freedom and witnesses for one cut.
///
/// The auxiliary site holds a copy of every strip wire, on which the
/// symmetry acts by the implementing unitaries `W` transported through
/// `pi`, plus one `C[G]` wire with the regular representation when `W`
/// differs from the strip representation.
#[derive(Debug, Clone)]
pub struct Interface {
    pub cut: i64,
    pub side: Side,
    pub aux_site: usize,
    pub strip: Vec<usize>,
    /// `(strip wire, copy)` in ascending strip order.
    pub copies: Vec<(usize, usize)>,
    /// Strip wires on which `W` and the strip representation differ.
    pub dense: Vec<usize>,
    pub regular: Option<usize>,
    /// Phases making the transported `W` match the cocycle of the strip.
    pub gauge: Vec<c64>,
    /// `iota` on `dense ∪ {regular}`, intertwining `W ⊗ rho` with the strip
    /// representation tensor `rho`.
    pub iota: Option<LocalOperator>,
    pub intertwiner_label: u64,
    pub intertwiner_residual: f64,
    pub eta_gates: BTreeSet<(usize, usize)>,
    pub eta_residual: f64,
}

/// A scenario enlarged by the auxiliary sites of a set of cuts.
#[derive(Debug, Clone)]
pub struct BlendSystem {
    pub ring: SpinRing,
    pub beta: OnSiteSymmetry,
    /// `alpha ⊗ id`.
    pub alpha: Circuit,
    pub physical_wires: usize,
    pub width: usize,
    /// Measured range of `alpha` near the cuts.
    pub range: usize,
    pub interfaces: Vec<Interface>,
}

struct Pending {
    cut: i64,
    side: Side,
    aux_site: usize,
    strip: Vec<usize>,
    eta_gates: BTreeSet<(usize, usize)>,
    eta_residual: f64,
    // (P-side wires of a plain atom, their representation)
    plain: Vec<(Vec<usize>, ProjectiveRep)>,
    // strip wires of W in virtual order and W(g)
    dense_order: Vec<usize>,
    w: Vec<CMat>,
}

fn in_arc(geo: Geometry, site: usize, lo: i64, hi: i64) -> bool {
    let x = geo.coords(site).0 as i64;
    (x - lo).rem_euclid(geo.nx() as i64) < hi - lo
}

fn wires_in_arc(ring: &SpinRing, lo: i64, hi: i64, limit: usize) -> Vec<usize> {
    (0..limit)
        .filter(|&w| in_arc(ring.geometry(), ring.wire(w).site, lo, hi))
        .collect()
}

impl BlendSystem {
    /// Adds the auxiliary site of every `(cut, side)`. Requires a trivial
    /// index.
    pub fn build(sc: &Scenario, cuts: &[(i64, Side)], cfg: &Config) -> Result<BlendSystem> {
        let geo = sc.ring.geometry();
        if !matches!(geo, Geometry::Ring(_)) {
            return Err(Error::Precondition("blending is implemented on rings".into()));
        }
        let r = sc.width;
        let n = geo.nx() as i64;
        if let Some(&(x, _)) = cuts.first() {
            let ind = sc.index(x, Route::Eta, cfg)?;
            if !ind.class.is_zero() {
                return Err(Error::NontrivialIndex(ind.class.coordinates));
            }
        }
        let mirror = sc.ring.reflected();
        let mut range = 0;
        let mut pending = Vec::with_capacity(cuts.len());
        for &(cut, side) in cuts {
            let cut = cut.rem_euclid(n);
            let (view, vcut, aux_site) = match side {
                Side::Left => (&sc.ring, cut, geo.site(cut - 1, 0)),
                Side::Right => (&mirror, -cut, geo.site(cut, 0)),
            };
            range = range.max(measured_range(&sc.circuit, view, vcut, r));
            let (p, split) = boundary_algebra_eta(&sc.circuit, view, vcut, r, cfg)?;
            let eres = eta_residual(&sc.circuit, &split, view);
            if eres > cfg.tol.algebra {
                return Err(Error::Verification {
                    what: "alpha = eta o rest".into(),
                    residual: eres,
                    tol: cfg.tol.algebra,
                });
            }
            let imp = implementing_unitaries(&p, &sc.beta, view, cfg)?;
            let eta_gates = split
                .eta
                .layers()
                .iter()
                .enumerate()
                .flat_map(|(i, l)| l.iter().map(move |g| (i, g.wires()[0])))
                .collect();
            let plain = imp
                .plain_atoms
                .iter()
                .map(|&a| (sc.beta.atoms()[a].wires.clone(), sc.beta.atom_rep(a).clone()))
                .collect();
            let mut dense_order = Vec::new();
            let q = sc.beta.group().order();
            let mut w = vec![CMat::identity(1, 1); q];
            for b in &imp.blocks {
                let kw = b
                    .k_wires
                    .clone()
                    .ok_or_else(|| Error::Precondition("boundary block without strip labels".into()))?;
                dense_order.extend(kw);
                for (acc, bw) in w.iter_mut().zip(&b.w) {
                    *acc = kron(acc, bw);
                }
            }
            pending.push(Pending {
                cut,
                side,
                aux_site,
                strip: p.strip.clone(),
                eta_gates,
                eta_residual: eres,
                plain,
                dense_order,
                w,
            });
        }

        let mut ring = sc.ring.clone();
        let mut atoms: Vec<Atom> = sc.beta.atoms().to_vec();
        let group = sc.beta.group().clone();
        let q = group.order();
        let mut interfaces = Vec::with_capacity(pending.len());
        for pd in pending {
            let mut leg = ring.num_legs();
            let mut copies = Vec::with_capacity(pd.strip.len());
            for &s in &pd.strip {
                let c = ring.add_wire(pd.aux_site, leg, ring.wire(s).dim);
                leg += 1;
                copies.push((s, c));
            }
            let copy_of = |s: usize| {
                copies
                    .iter()
                    .find(|(a, _)| *a == s)
                    .map(|(_, c)| *c)
                    .expect("strip wire")
            };
            for (ws, rep) in &pd.plain {
                atoms.push(Atom {
                    wires: ws.iter().map(|&s| copy_of(s)).collect(),
                    rep: rep.clone(),
                });
            }
            let mut dense: Vec<usize> = pd.dense_order.clone();
            dense.sort_unstable();
            let (mut gauge, mut regular, mut iota, mut ires) = (vec![ONE; q], None, None, 0.0);
            let label = ((pd.cut as u64) << 1) | (pd.side == Side::Right) as u64;
            if !dense.is_empty() {
                let cw: Vec<usize> = pd.dense_order.iter().map(|&s| copy_of(s)).collect();
                let dims = ring.dims_of(&cw);
                let mats =
                    pd.w.iter()
                        .map(|m| Ok(LocalOperator::from_unordered(&cw, &dims, m.clone())?.into_matrix()))
                        .collect::<Result<Vec<_>>>()?;
                let w_rep = ProjectiveRep::new(group.clone(), mats, cfg.tol.algebra)?;
                let (_, u_k) = sc.beta.rep_on(&sc.ring, &dense)?;
                gauge = w_rep
                    .matching_gauge(&u_k.cocycle_of(), cfg.tol.class_fit)
                    .map_err(|_| Error::NontrivialIndex(Vec::new()))?;
                let w_lin = w_rep.gauged(&gauge);
                let mut cw_sorted = cw.clone();
                cw_sorted.sort_unstable();
                atoms.push(Atom {
                    wires: cw_sorted,
                    rep: w_lin.clone(),
                });
                let cg = ring.add_wire(pd.aux_site, leg, q);
                let rho = ProjectiveRep::regular(&group);
                atoms.push(Atom {
                    wires: vec![cg],
                    rep: rho.clone(),
                });
                let rep1 = w_lin.tensor(&rho)?;
                let rep2 = u_k.tensor(&rho)?;
                let mut rng = derived(cfg.seed, label);
                let j = equivariant_unitary(&rep1, &rep2, &mut rng, cfg)?;
                ires = crate::projrep::intertwiner_residual(&j, &rep1, &rep2);
                let mut jw = dense.clone();
                jw.push(cg);
                iota = Some(LocalOperator::new(jw.clone(), ring.dims_of(&jw), j)?);
                regular = Some(cg);
            }
            interfaces.push(Interface {
                cut: pd.cut,
                side: pd.side,
                aux_site: pd.aux_site,
                strip: pd.strip,
                copies,
                dense,
                regular,
                gauge,
                iota,
                intertwiner_label: label,
                intertwiner_residual: ires,
                eta_gates: pd.eta_gates,
                eta_residual: pd.eta_residual,
            });
        }
        let beta = OnSiteSymmetry::new(&ring, group, atoms)?;
        beta.require_linear(&ring, cfg.tol.snap)?;
        let alpha = Circuit::from_layers(ring.num_wires(), sc.circuit.layers().to_vec())?;
        Ok(BlendSystem {
            physical_wires: sc.ring.num_wires(),
            ring,
            beta,
            alpha,
            width: r,
            range,
            interfaces,
        })
    }

    /// `theta = Ad(iota) o SWAP o A`, where `A` keeps the gates of `alpha`
    /// lying in the arc `[lo, hi)` outside the `eta` parts of the listed
    /// interfaces, `SWAP` exchanges each strip with its copies and `iota`
    /// restores the strip representation.
    pub fn theta(&self, ifaces: &[usize], lo: i64, hi: i64) -> Result<Circuit> {
        let geo = self.ring.geometry();
        let n = geo.nx() as i64;
        if hi <= lo || hi - lo > n {
            return Err(Error::Precondition(format!("arc [{lo}, {hi}) on a ring of {n} sites")));
        }
        let mut eta = BTreeSet::new();
        for &i in ifaces {
            eta.extend(self.interfaces[i].eta_gates.iter().copied());
        }
        let a = self.alpha.filter(|i, g| {
            g.wires().iter().all(|&w| in_arc(geo, self.ring.wire(w).site, lo, hi)) && !eta.contains(&(i, g.wires()[0]))
        });
        let mut layers: Vec<Vec<LocalOperator>> = a.layers().to_vec();
        let mut swaps = Vec::new();
        let mut js = Vec::new();
        for &i in ifaces {
            let f = &self.interfaces[i];
            for &(s, c) in &f.copies {
                let d = self.ring.wire(s).dim;
                swaps.push(LocalOperator::from_unordered(&[s, c], &[d, d], swap_matrix(d, d))?);
            }
            if let Some(j) = &f.iota {
                js.push(j.clone());
            }
        }
        layers.push(swaps);
        layers.push(js);
        Circuit::from_layers(self.ring.num_wires(), layers)
    }

    /// `max || theta(O) - alpha(O) ||` over physical generators in `[lo, hi)`.
    pub fn agreement(&self, theta: &Circuit, lo: i64, hi: i64) -> f64 {
        let ws = wires_in_arc(&self.ring, lo, hi, self.physical_wires);
        generators(&self.ring, &ws)
            .iter()
            .map(|o| theta.apply(o).distance(&self.alpha.apply(o)).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// `max || c(O) - O ||` over generators of all wires in `[lo, hi)`.
    pub fn fixedness(&self, c: &Circuit, lo: i64, hi: i64) -> f64 {
        let ws = wires_in_arc(&self.ring, lo, hi, self.ring.num_wires());
        generators(&self.ring, &ws)
            .iter()
            .map(|o| c.apply(o).distance(o).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// A blend of a trivial-index scenario at a cut.
#[derive(Debug, Clone)]
pub struct BlendResult {
    pub system: BlendSystem,
    pub theta: Circuit,
    pub cut: i64,
    /// Far end of the arc on which `theta` acts as `alpha`.
    pub left_end: i64,
    pub width: usize,
    /// Window `[lo, hi)` of the left restriction check.
    pub left_window: (i64, i64),
    pub left_residual: f64,
    pub right_residual: f64,
    pub equivariance: f64,
    pub depth: usize,
    pub range: usize,
    pub range_constant: f64,
}

/// Blend at `x`: `theta` equals `alpha ⊗ id` on `[x - N/2 + r + rho, x - r -
/// rho)` and the identity on `[x, x + N/2)`. On a ring the arc has a second
/// end at `x - N/2`, which receives the mirrored construction.
pub fn blend_1d(sc: &Scenario, x: i64, cfg: &Config) -> Result<BlendResult> {
    let n = sc.ring.geometry().nx() as i64;
    let r = sc.width as i64;
    sc.ring.require_width(sc.width)?;
    let x = x.rem_euclid(n);
    let xl = x - n / 2;
    let sys = BlendSystem::build(sc, &[(x, Side::Left), (xl, Side::Right)], cfg)?;
    let rho = sys.range as i64;
    let window = (xl + r + rho, x - r - rho);
    if window.1 <= window.0 {
        return Err(Error::Precondition(format!(
            "N = {n} leaves no interior for r = {r} and measured range {rho}"
        )));
    }
    let theta = sys.theta(&[0, 1], xl, x)?;
    let left = sys.agreement(&theta, window.0, window.1);
    let right = sys.fixedness(&theta, x, xl + n);
    let eq = check_equivariant(&theta, &sys.beta, &sys.ring, None);
    let all: Vec<usize> = (0..sys.ring.num_wires()).collect();
    let range = measure_range(&theta, &sys.ring, &all);
    for (what, res) in [
        ("left restriction", left),
        ("right restriction", right),
        ("equivariance", eq),
    ] {
        if res > cfg.tol.blend {
            return Err(Error::Verification {
                what: what.into(),
                residual: res,
                tol: cfg.tol.blend,
            });
        }
    }
    Ok(BlendResult {
        depth: theta.depth(),
        range_constant: range as f64 / r as f64,
        system: sys,
        theta,
        cut: x,
        left_end: xl,
        width: sc.width,
        left_window: window,
        left_residual: left,
        right_residual: right,
        equivariance: eq,
        range,
    })
}

// ---------------------------------------------------------------------------
// even/odd factorization

/// `alpha ⊗ id = alpha_odd o alpha_even` with block partitioned factors.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub system: BlendSystem,
    pub cuts: Vec<i64>,
    /// `alpha_k = theta_{x_{k+1}} o theta_{x_k}^{-1}`.
    pub pieces: Vec<Circuit>,
    /// Product of the even pieces, which act on disjoint stripes.
    pub even: Circuit,
    /// `(alpha ⊗ id) o alpha_even^{-1}`.
    pub odd: Circuit,
    /// `max || alpha(O) - alpha_odd(alpha_even(O)) ||` over all generators.
    pub residual: f64,
    /// Agreement of each `alpha_k` with `alpha` inside its stripe.
    pub interior_residual: f64,
    /// Maximal runs `(first x, length)` of sites moved by each factor.
    pub blocks_even: Vec<(i64, usize)>,
    pub blocks_odd: Vec<(i64, usize)>,
    pub block_length: usize,
    /// Largest part of a block generator's image outside its block.
    pub block_leakage: f64,
    pub equivariance: f64,
    /// Dense check up to a global phase, when the total dimension allows.
    pub dense_residual: Option<f64>,
}

/// Maximal cyclic runs of sites on which `c` moves some generator.
pub fn active_blocks(c: &Circuit, ring: &SpinRing, tol: f64) -> Vec<(i64, usize)> {
    let geo = ring.geometry();
    let n = geo.nx();
    let mut active = vec![false; n];
    for (w, wire) in ring.wires().iter().enumerate() {
        let x = geo.coords(wire.site).0;
        if active[x] {
            continue;
        }
        if generators(ring, &[w])
            .iter()
            .any(|o| c.apply(o).distance(o).unwrap_or(f64::INFINITY) > tol)
        {
            active[x] = true;
        }
    }
    if active.iter().all(|&a| a) {
        return vec![(0, n)];
    }
    let start = active.iter().position(|&a| !a).expect("some site is idle");
    let mut blocks = Vec::new();
    let mut run: Option<(i64, usize)> = None;
    for k in 1..=n {
        let x = (start + k) % n;
        match (&mut run, active[x]) {
            (Some((_, len)), true) => *len += 1,
            (None, true) => run = Some((x as i64, 1)),
            (Some(b), false) => {
                blocks.push(*b);
                run = None;
            }
            (None, false) => {}
        }
    }
    if let Some(b) = run {
        blocks.push(b);
    }
    blocks.sort_unstable();
    blocks
}

/// Largest norm of the part of `c(O)` outside the block of `O`, over
/// generators at block sites.
pub fn block_leakage(c: &Circuit, ring: &SpinRing, blocks: &[(i64, usize)]) -> f64 {
    let geo = ring.geometry();
    let mut worst: f64 = 0.0;
    for &(x0, len) in blocks {
        let inside = |s: usize| in_arc(geo, s, x0, x0 + len as i64);
        let ws: Vec<usize> = (0..ring.num_wires()).filter(|&w| inside(ring.wire(w).site)).collect();
        for o in generators(ring, &ws) {
            let img = c.apply(&o);
            let out: Vec<usize> = img
                .wires()
                .iter()
                .copied()
                .filter(|&w| !inside(ring.wire(w).site))
                .collect();
            if out.is_empty() {
                continue;
            }
            let kept = img.reduce_out(&out);
            worst = worst.max(img.distance(&kept).unwrap_or(f64::INFINITY));
        }
    }
    worst
}

/// Factorizes at the cuts `x_k = 3 r k`. Needs `N` a multiple of `6r` and a
/// trivial index.
pub fn even_odd_factorization(sc: &Scenario, cfg: &Config) -> Result<Factorization> {
    let n = sc.ring.geometry().nx();
    let r = sc.width;
    if r == 0 || n % (6 * r) != 0 {
        return Err(Error::Precondition(format!(
            "N = {n} is not a multiple of 6r = {}",
            6 * r
        )));
    }
    let kk = n / (3 * r);
    let (r_i, step) = (r as i64, 3 * r as i64);
    let cuts: Vec<i64> = (0..kk as i64).map(|k| step * k).collect();
    let specs: Vec<(i64, Side)> = cuts.iter().map(|&x| (x, Side::Left)).collect();
    let sys = BlendSystem::build(sc, &specs, cfg)?;
    let rho = sys.range as i64;

    let mut pieces = Vec::with_capacity(kk);
    let mut interior: f64 = 0.0;
    for k in 0..kk {
        let x = cuts[k];
        let lo = x - 2 * r_i;
        let here = sys.theta(&[k], lo, x)?;
        let next = sys.theta(&[(k + 1) % kk], lo, x + step)?;
        let piece = here.inverse().then(&next)?;
        if x + r_i < x + step - r_i - rho {
            interior = interior.max(sys.agreement(&piece, x + r_i, x + step - r_i - rho));
        }
        pieces.push(piece);
    }
    let nw = sys.ring.num_wires();
    let mut even = Circuit::identity(nw);
    for p in pieces.iter().step_by(2) {
        even = even.parallel(p)?;
    }
    let odd = even.inverse().then(&sys.alpha)?;
    let all: Vec<usize> = (0..nw).collect();
    let residual = generators(&sys.ring, &all)
        .iter()
        .map(|o| {
            let lhs = sys.alpha.apply(o);
            let rhs = odd.apply(&even.apply(o));
            lhs.distance(&rhs).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    let tol = cfg.tol.blend;
    let blocks_even = active_blocks(&even, &sys.ring, tol);
    let blocks_odd = active_blocks(&odd, &sys.ring, tol);
    let block_length = blocks_even.iter().chain(&blocks_odd).map(|b| b.1).max().unwrap_or(0);
    let leak = block_leakage(&even, &sys.ring, &blocks_even).max(block_leakage(&odd, &sys.ring, &blocks_odd));
    let equivariance =
        check_equivariant(&even, &sys.beta, &sys.ring, None).max(check_equivariant(&odd, &sys.beta, &sys.ring, None));
    let dims_total: f64 = sys.ring.log2_total_dim();
    let dense_residual = if dims_total <= num_traits::Float::log2(cfg.max_dense_dim as f64) + 1e-9 {
        let ua = dense_unitary(&sys.alpha, &sys.ring, cfg)?;
        let ue = dense_unitary(&even, &sys.ring, cfg)?;
        let uo = dense_unitary(&odd, &sys.ring, cfg)?;
        Some(phase_distance(&(uo * ue), &ua))
    } else {
        None
    };
    if residual > cfg.tol.factorization {
        return Err(Error::Verification {
            what: "alpha = alpha_odd o alpha_even".into(),
            residual,
            tol: cfg.tol.factorization,
        });
    }
    Ok(Factorization {
        system: sys,
        cuts,
        pieces,
        even,
        odd,
        residual,
        interior_residual: interior,
        blocks_even,
        blocks_odd,
        block_length,
        block_leakage: leak,
        equivariance,
        dense_residual,
    })
}

// ---------------------------------------------------------------------------
// zero dimensions

/// Diagonal `v|h> = conj(lambda(h)) |h>` on `C[G]`; under the regular
/// representation `Ad U_g (v) = lambda(g) v`.
pub fn charge_unitary(group: &GroupTable, lambda: &Cochain) -> Result<CMat> {
    if lambda.degree() != 1 || lambda.group_order() != group.order() {
        return Err(Error::Dimension("a charge is a 1-cochain on the group".into()));
    }
    lambda.require_cocycle(group)?;
    let ph = lambda.phases();
    Ok(CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        ph.len(),
        ph.iter().map(|z| z.conj()),
    )))
}

/// Symmetric `V = v2 v1^*` relating two unitaries of equal charge.
#[derive(Debug, Clone)]
pub struct Disentangler {
    pub v: CMat,
    pub class: CohomClass,
    /// `max_g || U_g V U_g^* - V ||`.
    pub symmetry_residual: f64,
    /// `min_phi || V v1 - e^{i phi} v2 ||`.
    pub residual: f64,
}

pub fn disentangle_0d(v1: &CMat, v2: &CMat, rep: &ProjectiveRep, cfg: &Config) -> Result<Disentangler> {
    let c1 = index_0d(v1, rep, cfg)?.class;
    let c2 = index_0d(v2, rep, cfg)?.class;
    if c1 != c2 {
        return Err(Error::ChargeMismatch(c1.coordinates, c2.coordinates));
    }
    let v = v2 * v1.adjoint();
    let sym = rep
        .matrices()
        .iter()
        .map(|u| frob_diff(&(u * &v * u.adjoint()), &v))
        .fold(0.0, f64::max);
    if sym > 1e-10 {
        return Err(Error::NotInvariant(sym));
    }
    let residual = phase_distance(&(&v * v1), v2);
    Ok(Disentangler {
        v,
        class: c1,
        symmetry_residual: sym,
        residual,
    })
}

// ---------------------------------------------------------------------------
// swindle

/// Ancilla charges `omega_i`, `i = 1..2K`, cancelling a sequence of local
/// indices pairwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeSchedule {
    pub factors: Vec<u64>,
    /// `ind_1 .. ind_{2K}`, padded with zeros.
    pub indices: Vec<Vec<u64>>,
    pub omega: Vec<Vec<u64>>,
    pub window: usize,
    /// `ind_i + ind_{i+1} = omega_i + omega_{i+1}` for even `i`.
    pub even_pairs_hold: bool,
    /// `omega_i + omega_{i+1} = 0` for odd `i`.
    pub odd_pairs_hold: bool,
}

fn add_mod(a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    a.iter().zip(b).zip(f).map(|((x, y), d)| (x + y) % d).collect()
}

fn neg_mod(a: &[u64], f: &[u64]) -> Vec<u64> {
    a.iter().zip(f).map(|(x, d)| (d - x % d) % d).collect()
}

/// Odd `i`: `omega_i = ind_1 + ... + ind_i`; even `i`: `omega_i =
/// -omega_{i-1}`. Every class must carry the invariant factors `factors`.
pub fn swindle_charges(factors: &[u64], indices: &[CohomClass], window: usize) -> Result<ChargeSchedule> {
    if factors.iter().any(|&d| d == 0) {
        return Err(Error::Dimension("invariant factors must be positive".into()));
    }
    for c in indices {
        if c.invariant_factors != factors {
            return Err(Error::FactorMismatch(factors.to_vec(), c.invariant_factors.clone()));
        }
    }
    let len = 2 * window;
    let zero = vec![0u64; factors.len()];
    let mut ind: Vec<Vec<u64>> = indices.iter().take(len).map(|c| c.coordinates.clone()).collect();
    ind.resize(len, zero.clone());
    let mut omega: Vec<Vec<u64>> = Vec::with_capacity(len);
    let mut sum = zero.clone();
    for i in 1..=len {
        sum = add_mod(&sum, &ind[i - 1], factors);
        if i % 2 == 1 {
            omega.push(sum.clone());
        } else {
            omega.push(neg_mod(&omega[i - 2], factors));
        }
    }
    let mut even_ok = true;
    let mut odd_ok = true;
    for i in 1..len {
        let om = add_mod(&omega[i - 1], &omega[i], factors);
        if i % 2 == 0 {
            even_ok &= add_mod(&ind[i - 1], &ind[i], factors) == om;
        } else {
            odd_ok &= om == zero;
        }
    }
    Ok(ChargeSchedule {
        factors: factors.to_vec(),
        indices: ind,
        omega,
        window,
        even_pairs_hold: even_ok,
        odd_pairs_hold: odd_ok,
    })
}

/// Realizes a degree-one schedule with charge unitaries on `C[G] ⊗ C[G]`
/// and disentangles every pair: for odd `i` the pair `(omega_i,
/// omega_{i+1})` against the identity, for even `i` the pair `(ind_i,
/// ind_{i+1})` against `(omega_i, omega_{i+1})`. Returns the largest
/// symmetry residual of the disentanglers.
pub fn realize_schedule_0d(h1: &CohomologyGroup, schedule: &ChargeSchedule, cfg: &Config) -> Result<f64> {
    if h1.degree() != 1 {
        return Err(Error::DegreeOutOfRange(h1.degree()));
    }
    if h1.invariant_factors() != schedule.factors.as_slice() {
        return Err(Error::FactorMismatch(
            h1.invariant_factors().to_vec(),
            schedule.factors.clone(),
        ));
    }
    let g = h1.group();
    let reg = ProjectiveRep::regular(g);
    let pair_rep = reg.tensor(&reg)?;
    let charge = |coords: &[u64]| -> Result<CMat> { charge_unitary(g, &h1.element(coords).representative) };
    let pair = |a: &[u64], b: &[u64]| -> Result<CMat> { Ok(kron(&charge(a)?, &charge(b)?)) };
    let len = schedule.omega.len();
    let mut worst: f64 = 0.0;
    for i in 1..len {
        let (om_a, om_b) = (&schedule.omega[i - 1], &schedule.omega[i]);
        let d = if i % 2 == 1 {
            disentangle_0d(&pair(om_a, om_b)?, &identity(pair_rep.dim()), &pair_rep, cfg)?
        } else {
            let (ia, ib) = (&schedule.indices[i - 1], &schedule.indices[i]);
            disentangle_0d(&pair(ia, ib)?, &pair(om_a, om_b)?, &pair_rep, cfg)?
        };
        worst = worst.max(d.symmetry_residual);
    }
    Ok(worst)
}
