//! Finite periodic spin systems, on-site symmetries and layered circuits.
//!
//! A site carries one or more wires (tensor legs). Operators, gates and
//! symmetry atoms are all expressed over wire ids, which never change once
//! assigned; stacking and auxiliary degrees of freedom append new wires.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::group::GroupTable;
use crate::linalg::{c64, swap_matrix, unitarity_residual, CMat};
use crate::projrep::ProjectiveRep;
use crate::tensor::{wire_generators, LocalOperator};
use crate::{Error, Result};

/// Relative trimming tolerance applied after every circuit layer.
pub const TRIM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    Ring(usize),
    /// Site index is `x * ny + y`.
    Torus {
        nx: usize,
        ny: usize,
    },
}

impl Geometry {
    pub fn num_sites(&self) -> usize {
        match *self {
            Geometry::Ring(n) => n,
            Geometry::Torus { nx, ny } => nx * ny,
        }
    }

    /// Circumference along the direction transverse to cuts.
    pub fn nx(&self) -> usize {
        match *self {
            Geometry::Ring(n) => n,
            Geometry::Torus { nx, .. } => nx,
        }
    }

    pub fn ny(&self) -> usize {
        match *self {
            Geometry::Ring(_) => 1,
            Geometry::Torus { ny, .. } => ny,
        }
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        match *self {
            Geometry::Ring(_) => (site, 0),
            Geometry::Torus { ny, .. } => (site / ny, site % ny),
        }
    }

    /// Site at integer coordinates, wrapped periodically.
    pub fn site(&self, x: i64, y: i64) -> usize {
        let xi = x.rem_euclid(self.nx() as i64) as usize;
        let yi = y.rem_euclid(self.ny() as i64) as usize;
        match *self {
            Geometry::Ring(_) => xi,
            Geometry::Torus { ny, .. } => xi * ny + yi,
        }
    }

    /// Signed x-offset of a site from a cut, wrapped into `[-nx/2, nx/2)`.
    pub fn offset_x(&self, site: usize, cut: i64) -> i64 {
        wrap(self.coords(site).0 as i64 - cut, self.nx())
    }

    /// Signed y-offset of a site from a row, wrapped into `[-ny/2, ny/2)`.
    pub fn offset_y(&self, site: usize, row: i64) -> i64 {
        wrap(self.coords(site).1 as i64 - row, self.ny())
    }

    /// Extent (number of sites spanned) of a set of sites along each axis.
    pub fn extent(&self, sites: &[usize]) -> (usize, usize) {
        if sites.is_empty() {
            return (0, 0);
        }
        let (x0, y0) = self.coords(sites[0]);
        let span = |offs: Vec<i64>| -> usize {
            let lo = offs.iter().min().copied().unwrap_or(0);
            let hi = offs.iter().max().copied().unwrap_or(0);
            (hi - lo + 1) as usize
        };
        let dx = span(sites.iter().map(|&s| self.offset_x(s, x0 as i64)).collect());
        let dy = span(sites.iter().map(|&s| self.offset_y(s, y0 as i64)).collect());
        (dx, dy)
    }
}

/// Wraps an integer into `[-n/2, n/2)`.
pub fn wrap(v: i64, n: usize) -> i64 {
    let n = n as i64;
    let h = n / 2;
    (v + h).rem_euclid(n) - h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wire {
    pub site: usize,
    pub leg: usize,
    pub dim: usize,
}

/// A finite periodic lattice of wires.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRing {
    geometry: Geometry,
    wires: Vec<Wire>,
    site_wires: Vec<Vec<usize>>,
}

impl SpinRing {
    /// Every site gets the same legs; wire id is `site * legs + leg`.
    pub fn uniform(geometry: Geometry, leg_dims: &[usize]) -> Result<Self> {
        if geometry.num_sites() == 0 {
            return Err(Error::Dimension("lattice without sites".into()));
        }
        if leg_dims.iter().any(|&d| d == 0) {
            return Err(Error::Dimension("wire dimension must be positive".into()));
        }
        let mut ring = SpinRing {
            geometry,
            wires: Vec::new(),
            site_wires: vec![Vec::new(); geometry.num_sites()],
        };
        for s in 0..geometry.num_sites() {
            for (leg, &d) in leg_dims.iter().enumerate() {
                ring.add_wire(s, leg, d);
            }
        }
        Ok(ring)
    }

    /// Explicit per-site dimensions, one wire per site.
    pub fn from_site_dims(geometry: Geometry, dims: &[usize]) -> Result<Self> {
        if dims.len() != geometry.num_sites() {
            return Err(Error::Dimension(format!(
                "{} site dimensions for {} sites",
                dims.len(),
                geometry.num_sites()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Dimension("site dimension must be positive".into()));
        }
        let mut ring = SpinRing {
            geometry,
            wires: Vec::new(),
            site_wires: vec![Vec::new(); geometry.num_sites()],
        };
        for (s, &d) in dims.iter().enumerate() {
            ring.add_wire(s, 0, d);
        }
        Ok(ring)
    }

    /// Appends a wire and returns its id.
    pub fn add_wire(&mut self, site: usize, leg: usize, dim: usize) -> usize {
        let id = self.wires.len();
        self.wires.push(Wire { site, leg, dim });
        self.site_wires[site].push(id);
        id
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
    pub fn num_sites(&self) -> usize {
        self.geometry.num_sites()
    }
    pub fn num_wires(&self) -> usize {
        self.wires.len()
    }
    pub fn wire(&self, id: usize) -> Wire {
        self.wires[id]
    }
    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }
    pub fn site_wires(&self, site: usize) -> &[usize] {
        &self.site_wires[site]
    }
    pub fn dims_of(&self, wires: &[usize]) -> Vec<usize> {
        wires.iter().map(|&w| self.wires[w].dim).collect()
    }
    pub fn site_dim(&self, site: usize) -> usize {
        self.site_wires[site].iter().map(|&w| self.wires[w].dim).product()
    }

    /// `log2` of the total Hilbert space dimension.
    pub fn log2_total_dim(&self) -> f64 {
        self.wires.iter().map(|w| num_traits::Float::log2(w.dim as f64)).sum()
    }

    /// Largest leg index plus one.
    pub fn num_legs(&self) -> usize {
        self.wires.iter().map(|w| w.leg + 1).max().unwrap_or(0)
    }

    /// All wires on sites whose x-offset from `cut` lies in `[lo, hi)`.
    pub fn wires_in_offsets(&self, cut: i64, lo: i64, hi: i64) -> Vec<usize> {
        (0..self.wires.len())
            .filter(|&w| {
                let o = self.geometry.offset_x(self.wires[w].site, cut);
                o >= lo && o < hi
            })
            .collect()
    }

    /// Sites whose x-offset from `cut` lies in `[lo, hi)`.
    pub fn sites_in_offsets(&self, cut: i64, lo: i64, hi: i64) -> Vec<usize> {
        (0..self.num_sites())
            .filter(|&s| {
                let o = self.geometry.offset_x(s, cut);
                o >= lo && o < hi
            })
            .collect()
    }

    /// Sites touched by a set of wires, ascending and without repeats.
    pub fn sites_of(&self, wires: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = wires.iter().map(|&w| self.wires[w].site).collect();
        set.into_iter().collect()
    }

    /// Asserts the circumference needed for constructions of width `r`.
    pub fn require_width(&self, r: usize) -> Result<()> {
        if self.geometry.nx() < 6 * r {
            return Err(Error::Precondition(format!(
                "N >= 6r violated: circumference {} with r = {r}",
                self.geometry.nx()
            )));
        }
        Ok(())
    }

    /// Mirror image `x -> -1 - x` with the same wire ids. A cut `c` becomes
    /// the cut `-c`, with left and right exchanged.
    pub fn reflected(&self) -> SpinRing {
        let geo = self.geometry;
        let mut out = SpinRing {
            geometry: geo,
            wires: Vec::with_capacity(self.wires.len()),
            site_wires: vec![Vec::new(); geo.num_sites()],
        };
        for w in &self.wires {
            let (x, y) = geo.coords(w.site);
            out.add_wire(geo.site(-1 - x as i64, y as i64), w.leg, w.dim);
        }
        out
    }

    /// Sitewise tensor product. Wires of `other` are appended with their
    /// legs shifted past this ring's legs; returns the id map for `other`.
    pub fn stack(&self, other: &SpinRing) -> Result<(SpinRing, Vec<usize>)> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch);
        }
        let shift = self.num_legs();
        let mut out = self.clone();
        let map = other
            .wires
            .iter()
            .map(|w| out.add_wire(w.site, w.leg + shift, w.dim))
            .collect();
        Ok((out, map))
    }
}

/// A group of wires within one site transforming under one projective
/// representation.
#[derive(Debug, Clone)]
pub struct Atom {
    pub wires: Vec<usize>,
    pub rep: ProjectiveRep,
}

/// `beta_g = tensor of Ad(U_j(g))`, with `U_j` the product of the atoms at
/// site `j`. Wires outside every atom transform trivially.
#[derive(Debug, Clone)]
pub struct OnSiteSymmetry {
    group: GroupTable,
    atoms: Vec<Atom>,
    wire_atom: Vec<Option<usize>>,
    // per atom, per group element
    unitaries: Vec<Vec<LocalOperator>>,
}

impl OnSiteSymmetry {
    pub fn new(ring: &SpinRing, group: GroupTable, atoms: Vec<Atom>) -> Result<Self> {
        let mut wire_atom = vec![None; ring.num_wires()];
        let mut unitaries = Vec::with_capacity(atoms.len());
        for (a, atom) in atoms.iter().enumerate() {
            if atom.rep.group() != &group {
                return Err(Error::GroupMismatch);
            }
            if atom.wires.is_empty() || atom.wires.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Dimension(format!("atom {a} needs ascending distinct wires")));
            }
            let site = ring.wire(atom.wires[0]).site;
            for &w in &atom.wires {
                if w >= ring.num_wires() {
                    return Err(Error::Dimension(format!("atom {a} refers to missing wire {w}")));
                }
                if ring.wire(w).site != site {
                    return Err(Error::Dimension(format!("atom {a} spans several sites")));
                }
                if wire_atom[w].is_some() {
                    return Err(Error::Dimension(format!("wire {w} belongs to two atoms")));
                }
                wire_atom[w] = Some(a);
            }
            let dims = ring.dims_of(&atom.wires);
            if dims.iter().product::<usize>() != atom.rep.dim() {
                return Err(Error::Dimension(format!(
                    "atom {a} representation has the wrong dimension"
                )));
            }
            let us = (0..group.order())
                .map(|g| LocalOperator::new(atom.wires.clone(), dims.clone(), atom.rep.matrix(g).clone()))
                .collect::<Result<Vec<_>>>()?;
            unitaries.push(us);
        }
        Ok(OnSiteSymmetry {
            group,
            atoms,
            wire_atom,
            unitaries,
        })
    }

    /// Trivial action.
    pub fn trivial(ring: &SpinRing, group: GroupTable) -> Self {
        OnSiteSymmetry {
            group,
            atoms: Vec::new(),
            wire_atom: vec![None; ring.num_wires()],
            unitaries: Vec::new(),
        }
    }

    /// The same representation on one leg of every site.
    pub fn per_leg(ring: &SpinRing, group: &GroupTable, reps: &[(usize, ProjectiveRep)]) -> Result<Self> {
        let mut atoms = Vec::new();
        for s in 0..ring.num_sites() {
            for &w in ring.site_wires(s) {
                if let Some((_, rep)) = reps.iter().find(|(leg, _)| *leg == ring.wire(w).leg) {
                    atoms.push(Atom {
                        wires: vec![w],
                        rep: rep.clone(),
                    });
                }
            }
        }
        Self::new(ring, group.clone(), atoms)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
    pub fn atom_of(&self, wire: usize) -> Option<usize> {
        self.wire_atom.get(wire).copied().flatten()
    }
    pub fn atom_unitary(&self, atom: usize, g: usize) -> &LocalOperator {
        &self.unitaries[atom][g]
    }

    /// Extends the wire table after wires were appended to the ring.
    pub fn extend_to(&mut self, ring: &SpinRing) {
        self.wire_atom.resize(ring.num_wires(), None);
    }

    /// Adds an atom on wires of `ring` (after `extend_to`).
    pub fn add_atom(&mut self, ring: &SpinRing, atom: Atom) -> Result<()> {
        self.extend_to(ring);
        let mut atoms = self.atoms.clone();
        atoms.push(atom);
        *self = Self::new(ring, self.group.clone(), atoms)?;
        Ok(())
    }

    /// Atoms touching any of the wires, ascending.
    pub fn atoms_touching(&self, wires: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = wires.iter().filter_map(|&w| self.atom_of(w)).collect();
        set.into_iter().collect()
    }

    /// Wires of all atoms touching `wires`, together with `wires` itself.
    pub fn atom_closure(&self, wires: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = wires.iter().copied().collect();
        for a in self.atoms_touching(wires) {
            set.extend(self.atoms[a].wires.iter().copied());
        }
        set.into_iter().collect()
    }

    /// `beta_g(O)`; the support grows to whole atoms.
    pub fn apply(&self, g: usize, op: &LocalOperator) -> LocalOperator {
        let mut out = op.clone();
        for a in self.atoms_touching(op.wires()) {
            out = out
                .conjugate_by(&self.unitaries[a][g])
                .expect("atom dimensions are consistent");
        }
        out
    }

    /// `max_g || beta_g(O) - O ||`.
    pub fn asymmetry(&self, op: &LocalOperator) -> f64 {
        (0..self.group.order())
            .map(|g| self.apply(g, op).distance(op).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Symmetry unitary of one atom as a representation.
    pub fn atom_rep(&self, atom: usize) -> &ProjectiveRep {
        &self.atoms[atom].rep
    }

    /// Product representation of the atoms of a site, with wires ordered
    /// ascending. Wires outside atoms contribute identities.
    pub fn site_rep(&self, ring: &SpinRing, site: usize) -> Result<(Vec<usize>, ProjectiveRep)> {
        let wires = ring.site_wires(site).to_vec();
        self.rep_on(ring, &wires)
    }

    /// Product representation on a set of wires closed under atoms.
    pub fn rep_on(&self, ring: &SpinRing, wires: &[usize]) -> Result<(Vec<usize>, ProjectiveRep)> {
        let mut ws = wires.to_vec();
        ws.sort_unstable();
        ws.dedup();
        let dims = ring.dims_of(&ws);
        let q = self.group.order();
        let mut mats = Vec::with_capacity(q);
        for g in 0..q {
            let mut op = LocalOperator::identity_on(ws.clone(), dims.clone());
            for a in self.atoms_touching(&ws) {
                if self.atoms[a].wires.iter().any(|w| !ws.contains(w)) {
                    return Err(Error::Dimension("wire set is not closed under atoms".into()));
                }
                op = self.unitaries[a][g].mul(&op)?;
            }
            mats.push(op.into_matrix());
        }
        Ok((ws, ProjectiveRep::new(self.group.clone(), mats, 1e-9)?))
    }

    /// Largest deviation of any site representation from linearity, measured
    /// as the distance of its cocycle from the constant 1.
    pub fn linearity_residual(&self, ring: &SpinRing) -> (usize, f64) {
        let q = self.group.order();
        let mut worst = (0, 0.0);
        for s in 0..ring.num_sites() {
            let mut phases = vec![c64::new(1.0, 0.0); q * q];
            for a in self.atoms_touching(ring.site_wires(s)) {
                let c = self.atoms[a].rep.cocycle_of();
                for (p, v) in phases.iter_mut().zip(c.values()) {
                    *p *= v;
                }
            }
            let dev = phases
                .iter()
                .map(|z| (z - c64::new(1.0, 0.0)).norm())
                .fold(0.0, f64::max);
            if dev > worst.1 {
                worst = (s, dev);
            }
        }
        worst
    }

    pub fn require_linear(&self, ring: &SpinRing, tol: f64) -> Result<()> {
        let (site, residual) = self.linearity_residual(ring);
        if residual > tol {
            return Err(Error::NotLinear { site, residual });
        }
        Ok(())
    }

    /// Stacks with a symmetry of `other` whose wires were relabelled by
    /// `map` into `ring`.
    pub fn stack(&self, other: &OnSiteSymmetry, ring: &SpinRing, map: &[usize]) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            let wires: Vec<usize> = a.wires.iter().map(|&w| map[w]).collect();
            let mut order: Vec<usize> = (0..wires.len()).collect();
            order.sort_by_key(|&i| wires[i]);
            let rep = if order.iter().enumerate().all(|(k, &o)| k == o) {
                a.rep.clone()
            } else {
                let dims = ring.dims_of(&wires);
                let mats = a
                    .rep
                    .matrices()
                    .iter()
                    .map(|m| crate::tensor::permute_factors(m, &dims, &order))
                    .collect();
                ProjectiveRep::new(self.group.clone(), mats, 1e-9)?
            };
            atoms.push(Atom {
                wires: order.iter().map(|&i| wires[i]).collect(),
                rep,
            });
        }
        Self::new(ring, self.group.clone(), atoms)
    }
}

/// Layered circuit. Layer 0 is applied first: `alpha = gamma_n o ... o gamma_1`
/// with `gamma_i = Ad(prod of gates in layer i)`.
#[derive(Debug, Clone)]
pub struct Circuit {
    num_wires: usize,
    layers: Vec<Vec<LocalOperator>>,
    // per layer, wire -> gate index + 1 (0 when the wire is idle)
    index: Vec<Vec<u32>>,
}

impl Circuit {
    pub fn identity(num_wires: usize) -> Self {
        Circuit {
            num_wires,
            layers: Vec::new(),
            index: Vec::new(),
        }
    }

    /// Validates disjointness within layers and unitarity of every gate, and
    /// sorts gates by their smallest wire.
    pub fn new(ring: &SpinRing, layers: Vec<Vec<LocalOperator>>, unitary_tol: f64) -> Result<Self> {
        for layer in &layers {
            for gate in layer {
                for (&w, &d) in gate.wires().iter().zip(gate.dims()) {
                    if w >= ring.num_wires() {
                        return Err(Error::Dimension(format!("gate refers to missing wire {w}")));
                    }
                    if ring.wire(w).dim != d {
                        return Err(Error::Dimension(format!("gate has dimension {d} on wire {w}")));
                    }
                }
                let res = unitarity_residual(gate.matrix());
                if res > unitary_tol {
                    return Err(Error::NotUnitary {
                        what: format!("gate on wires {:?}", gate.wires()),
                        residual: res,
                    });
                }
            }
        }
        Self::from_layers(ring.num_wires(), layers)
    }

    /// Like [`Circuit::new`] without the unitarity check.
    pub fn from_layers(num_wires: usize, mut layers: Vec<Vec<LocalOperator>>) -> Result<Self> {
        let mut index = Vec::with_capacity(layers.len());
        for (li, layer) in layers.iter_mut().enumerate() {
            layer.retain(|g| !g.wires().is_empty());
            layer.sort_by_key(|g| g.wires()[0]);
            let mut map = vec![0u32; num_wires];
            for (gi, gate) in layer.iter().enumerate() {
                for &w in gate.wires() {
                    if w >= num_wires {
                        return Err(Error::Dimension(format!("gate refers to missing wire {w}")));
                    }
                    if map[w] != 0 {
                        return Err(Error::Overlap { layer: li, wire: w });
                    }
                    map[w] = gi as u32 + 1;
                }
            }
            index.push(map);
        }
        Ok(Circuit {
            num_wires,
            layers,
            index,
        })
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }
    pub fn depth(&self) -> usize {
        self.layers.len()
    }
    pub fn layers(&self) -> &[Vec<LocalOperator>] {
        &self.layers
    }
    pub fn layer(&self, i: usize) -> &[LocalOperator] {
        &self.layers[i]
    }
    pub fn num_gates(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    /// Gate of layer `i` acting on `wire`, if any.
    pub fn gate_at(&self, i: usize, wire: usize) -> Option<usize> {
        match self.index[i].get(wire) {
            Some(&k) if k > 0 => Some(k as usize - 1),
            _ => None,
        }
    }

    /// Largest gate extent in sites (max over both axes).
    pub fn max_diameter(&self, ring: &SpinRing) -> usize {
        self.layers
            .iter()
            .flatten()
            .map(|g| {
                let (dx, dy) = ring.geometry().extent(&ring.sites_of(g.wires()));
                dx.max(dy)
            })
            .max()
            .unwrap_or(0)
    }

    /// The bound `n q` on the range.
    pub fn range_bound(&self, ring: &SpinRing) -> usize {
        self.depth() * self.max_diameter(ring)
    }

    /// Same automorphism with every gate moved to the earliest layer after
    /// the last earlier gate sharing a wire with it.
    pub fn compacted(&self) -> Circuit {
        let mut last = vec![0usize; self.num_wires];
        let mut layers: Vec<Vec<LocalOperator>> = Vec::new();
        for layer in &self.layers {
            for g in layer {
                let at = g.wires().iter().map(|&w| last[w]).max().unwrap_or(0);
                if at == layers.len() {
                    layers.push(Vec::new());
                }
                layers[at].push(g.clone());
                for &w in g.wires() {
                    last[w] = at + 1;
                }
            }
        }
        Circuit::from_layers(self.num_wires, layers).expect("gates of one layer are disjoint")
    }

    /// Keeps the gates selected by `keep(layer, gate)`.
    pub fn filter(&self, mut keep: impl FnMut(usize, &LocalOperator) -> bool) -> Circuit {
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| l.iter().filter(|g| keep(i, g)).cloned().collect())
            .collect();
        Circuit::from_layers(self.num_wires, layers).expect("subset of a valid circuit")
    }

    /// `alpha(O)`, conjugating only by gates in the light cone of `O`.
    pub fn apply(&self, op: &LocalOperator) -> LocalOperator {
        let mut cur = op.clone();
        for i in 0..self.layers.len() {
            cur = self.apply_layer(i, &cur);
        }
        cur
    }

    fn apply_layer(&self, i: usize, op: &LocalOperator) -> LocalOperator {
        let touched: BTreeSet<usize> = op.wires().iter().filter_map(|&w| self.gate_at(i, w)).collect();
        if touched.is_empty() {
            return op.clone();
        }
        let mut cur = op.clone();
        for gi in touched {
            cur = cur
                .conjugate_by(&self.layers[i][gi])
                .expect("gate dimensions are consistent");
        }
        cur.trim(TRIM_TOL)
    }

    /// Inverse circuit: reversed layers with adjoint gates.
    pub fn inverse(&self) -> Circuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|l| l.iter().map(|g| g.adjoint()).collect())
            .collect();
        Circuit::from_layers(self.num_wires, layers).expect("inverse of a valid circuit")
    }

    /// `next o self`: the layers of `self` followed by those of `next`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        let n = self.num_wires.max(next.num_wires);
        let mut layers = self.layers.clone();
        layers.extend(next.layers.iter().cloned());
        Circuit::from_layers(n, layers)
    }

    /// Layerwise union of two circuits acting on disjoint wires; the depth
    /// is the larger of the two.
    pub fn parallel(&self, other: &Circuit) -> Result<Circuit> {
        let n = self.num_wires.max(other.num_wires);
        let depth = self.depth().max(other.depth());
        let layers = (0..depth)
            .map(|i| {
                let mut l: Vec<LocalOperator> = self.layers.get(i).cloned().unwrap_or_default();
                l.extend(other.layers.get(i).cloned().unwrap_or_default());
                l
            })
            .collect();
        Circuit::from_layers(n, layers)
    }

    /// Renames wires through `map` and embeds into a ring with `num_wires`.
    pub fn relabel(&self, map: &[usize], num_wires: usize) -> Result<Circuit> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                l.iter()
                    .map(|g| {
                        let w: Vec<usize> = g.wires().iter().map(|&x| map[x]).collect();
                        LocalOperator::from_unordered(&w, g.dims(), g.matrix().clone())
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::from_layers(num_wires, layers)
    }

    /// Stacks with a circuit of another ring relabelled by `map`; the
    /// layers run in parallel on disjoint legs.
    pub fn stack(&self, other: &Circuit, map: &[usize], num_wires: usize) -> Result<Circuit> {
        let mine = Circuit::from_layers(num_wires, self.layers.clone())?;
        mine.parallel(&other.relabel(map, num_wires)?)
    }

    /// Every wire touched by some gate.
    pub fn touched_wires(&self) -> BTreeSet<usize> {
        self.layers
            .iter()
            .flatten()
            .flat_map(|g| g.wires().iter().copied())
            .collect()
    }
}

/// Clock and shift generators of every listed wire.
pub fn generators(ring: &SpinRing, wires: &[usize]) -> Vec<LocalOperator> {
    wires
        .iter()
        .flat_map(|&w| wire_generators(w, ring.wire(w).dim))
        .collect()
}

/// `max_{g, O} || alpha(beta_g(O)) - beta_g(alpha(O)) ||` over clock and
/// shift generators of the listed wires (all wires when `None`).
pub fn check_equivariant(c: &Circuit, beta: &OnSiteSymmetry, ring: &SpinRing, wires: Option<&[usize]>) -> f64 {
    let all: Vec<usize> = (0..ring.num_wires()).collect();
    let wires = wires.unwrap_or(&all);
    let mut worst: f64 = 0.0;
    for op in generators(ring, wires) {
        let a = c.apply(&op);
        for g in 0..beta.group().order() {
            let lhs = c.apply(&beta.apply(g, &op));
            let rhs = beta.apply(g, &a);
            worst = worst.max(lhs.distance(&rhs).unwrap_or(f64::INFINITY));
        }
    }
    worst
}

/// Largest x-distance (in sites) by which the circuit moves the support of
/// a single-wire generator, over the listed wires.
pub fn measure_range(c: &Circuit, ring: &SpinRing, wires: &[usize]) -> usize {
    let geo = ring.geometry();
    let mut worst = 0usize;
    for op in generators(ring, wires) {
        let src = ring.wire(op.wires()[0]).site;
        let img = c.apply(&op);
        for s in ring.sites_of(img.wires()) {
            let dx = geo.offset_x(s, geo.coords(src).0 as i64).unsigned_abs() as usize;
            let dy = geo.offset_y(s, geo.coords(src).1 as i64).unsigned_abs() as usize;
            worst = worst.max(dx.max(dy));
        }
    }
    worst
}

/// Residual of `alpha(O1 O2) = alpha(O1) alpha(O2)`.
pub fn homomorphism_residual(c: &Circuit, a: &LocalOperator, b: &LocalOperator) -> Result<f64> {
    let lhs = c.apply(&a.mul(b)?);
    let rhs = c.apply(a).mul(&c.apply(b))?;
    lhs.distance(&rhs)
}

/// Stacks a ring with itself and returns the depth-one circuit of on-site
/// swaps between the two copies, one gate per atom block of `beta` (or per
/// wire outside atoms). Also returns the doubled symmetry `beta ⊗ beta`.
pub fn swap_circuit(ring: &SpinRing, beta: &OnSiteSymmetry) -> Result<(SpinRing, Circuit, OnSiteSymmetry, Vec<usize>)> {
    let (big, map) = ring.stack(ring)?;
    let sym = beta.stack(beta, &big, &map)?;
    let mut gates = Vec::new();
    let mut done = vec![false; ring.num_wires()];
    for w in 0..ring.num_wires() {
        if done[w] {
            continue;
        }
        let block: Vec<usize> = match beta.atom_of(w) {
            Some(a) => beta.atoms()[a].wires.clone(),
            None => vec![w],
        };
        for &b in &block {
            done[b] = true;
        }
        let dims = ring.dims_of(&block);
        let d: usize = dims.iter().product();
        let mut wires = block.clone();
        wires.extend(block.iter().map(|&b| map[b]));
        let mut all_dims = dims.clone();
        all_dims.extend(dims.iter());
        gates.push(LocalOperator::from_unordered(&wires, &all_dims, swap_matrix(d, d))?);
    }
    let c = Circuit::from_layers(big.num_wires(), vec![gates])?;
    Ok((big, c, sym, map))
}

/// Largest residual of `beta_g(V) = V` over the gates of a circuit.
pub fn gate_asymmetry(c: &Circuit, beta: &OnSiteSymmetry) -> f64 {
    c.layers()
        .iter()
        .flatten()
        .map(|g| beta.asymmetry(g))
        .fold(0.0, f64::max)
}

/// Dense comparison helper: distance between `alpha(O)` and an expected
/// operator.
pub fn image_distance(c: &Circuit, op: &LocalOperator, expected: &LocalOperator) -> f64 {
    c.apply(op).distance(expected).unwrap_or(f64::INFINITY)
}

/// Unitary `u` on `wires` as a one-gate, one-layer circuit.
pub fn single_gate(ring: &SpinRing, wires: &[usize], u: CMat) -> Result<Circuit> {
    let dims = ring.dims_of(wires);
    let g = LocalOperator::from_unordered(wires, &dims, u)?;
    Circuit::new(ring, vec![vec![g]], 1e-8)
}
