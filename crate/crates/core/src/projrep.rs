//! Projective unitary representations, numeric cocycles, class fitting and
//! intertwiners.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::cohomology::{solve_coboundary, CohomClass, CohomologyGroup};
use crate::config::Config;
use crate::group::{Cochain, GroupTable};
use crate::linalg::{
    c64, cis, clock_shift, frob, frob_diff, gaussian, identity, kron, polar_unitary, snap_phase, trace,
    unitarity_residual, CMat, ONE,
};
use crate::{Error, Result};

/// A 2-cochain of unit complex phases, index `g |G| + h`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPhaseCochain {
    group_order: usize,
    values: Vec<c64>,
}

impl NumericPhaseCochain {
    pub fn new(group_order: usize, values: Vec<c64>) -> Result<Self> {
        if values.len() != group_order * group_order {
            return Err(Error::Dimension("phase cochain needs |G|^2 values".into()));
        }
        if let Some(z) = values.iter().find(|z| crate::linalg::abs(z.norm() - 1.0) > 1e-9) {
            return Err(Error::Numerical(format!("phase {z} is not of unit modulus")));
        }
        Ok(NumericPhaseCochain { group_order, values })
    }

    pub fn from_exact(c: &Cochain) -> Self {
        assert_eq!(c.degree(), 2);
        NumericPhaseCochain {
            group_order: c.group_order(),
            values: c.phases(),
        }
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }
    pub fn values(&self) -> &[c64] {
        &self.values
    }
    pub fn get(&self, g: usize, h: usize) -> c64 {
        self.values[g * self.group_order + h]
    }

    pub fn mul(&self, other: &Self) -> Self {
        NumericPhaseCochain {
            group_order: self.group_order,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        NumericPhaseCochain {
            group_order: self.group_order,
            values: self.values.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Multiplies by the coboundary of a 1-cochain of phases,
    /// `(d nu)(g, h) = nu(g) nu(h) / nu(gh)`.
    pub fn times_coboundary(&self, g: &GroupTable, nu: &[c64]) -> Self {
        let q = self.group_order;
        let values = (0..q * q)
            .map(|i| {
                let (a, b) = (i / q, i % q);
                self.values[i] * nu[a] * nu[b] / nu[g.mul(a, b)]
            })
            .collect();
        NumericPhaseCochain { group_order: q, values }
    }

    /// Largest deviation from the multiplicative cocycle identity
    /// `c(h,k) c(g,hk) = c(gh,k) c(g,h)`.
    pub fn cocycle_residual(&self, g: &GroupTable) -> f64 {
        let q = self.group_order;
        let mut worst: f64 = 0.0;
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    let lhs = self.get(b, c) * self.get(a, g.mul(b, c));
                    let rhs = self.get(g.mul(a, b), c) * self.get(a, b);
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }

    /// Exact cochain over `Z/m` when every phase lies within `tol` of an
    /// `m`-th root of unity.
    pub fn snap(&self, m: u64, tol: f64) -> Result<Cochain> {
        let q = self.group_order;
        let mut ks = Vec::with_capacity(self.values.len());
        for (i, z) in self.values.iter().enumerate() {
            let (k, dist) = snap_phase(*z, m);
            if dist > tol {
                return Err(Error::PhaseNotRoot {
                    g: i / q,
                    h: i % q,
                    distance: dist,
                    modulus: m,
                });
            }
            ks.push(k);
        }
        Cochain::from_values(q, 2, m, ks)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A map `g -> V(g)` of unitaries with `V(g) V(h) = mu(g,h) V(gh)`.
#[derive(Debug, Clone)]
pub struct ProjectiveRep {
    group: GroupTable,
    dim: usize,
    matrices: Vec<CMat>,
    exact: Option<Cochain>,
}

impl ProjectiveRep {
    /// Validates unitarity and the projective product rule.
    pub fn new(group: GroupTable, matrices: Vec<CMat>, unitary_tol: f64) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::Dimension(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let dim = matrices.first().map(|m| m.nrows()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::Dimension("empty representation".into()));
        }
        for (g, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dimension(format!(
                    "V({g}) has shape {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let res = unitarity_residual(m);
            if res > unitary_tol {
                return Err(Error::NotUnitary {
                    what: format!("V({g})"),
                    residual: res,
                });
            }
        }
        let rep = ProjectiveRep {
            group,
            dim,
            matrices,
            exact: None,
        };
        let res = rep.product_residual();
        if res > unitary_tol.max(1e-9) * 10.0 {
            return Err(Error::Verification {
                what: "projective product rule".into(),
                residual: res,
                tol: unitary_tol,
            });
        }
        Ok(rep)
    }

    fn with_exact(group: GroupTable, matrices: Vec<CMat>, mu: Cochain) -> Self {
        let dim = matrices[0].nrows();
        ProjectiveRep {
            group,
            dim,
            matrices,
            exact: Some(mu),
        }
    }

    /// `V(g) = 1` on `C^dim`.
    pub fn trivial(group: &GroupTable, dim: usize) -> Self {
        let q = group.order();
        Self::with_exact(group.clone(), vec![identity(dim); q], Cochain::zero(q, 2, q as u64))
    }

    /// `U(g)|h> = mu(g,h)|gh>` on `C[G]`.
    pub fn regular_projective(group: &GroupTable, mu: &Cochain) -> Result<Self> {
        if mu.degree() != 2 || mu.group_order() != group.order() {
            return Err(Error::Dimension(
                "regular_projective needs a 2-cochain on the group".into(),
            ));
        }
        mu.require_cocycle(group)?;
        let q = group.order();
        let phases = mu.phases();
        let matrices = (0..q)
            .map(|g| {
                let mut m = CMat::zeros(q, q);
                for h in 0..q {
                    m[(group.mul(g, h), h)] = phases[g * q + h];
                }
                m
            })
            .collect();
        Ok(Self::with_exact(group.clone(), matrices, mu.clone()))
    }

    /// Linear regular representation.
    pub fn regular(group: &GroupTable) -> Self {
        let q = group.order();
        Self::regular_projective(group, &Cochain::zero(q, 2, q as u64)).expect("zero is a cocycle")
    }

    /// `V(a,b) = X^a Z^b` on `C^2` for `Z2 x Z2` with elements `(a,b)` at index
    /// `2a + b`. Its cocycle is `mu((a,b),(c,d)) = (-1)^{bc}`.
    pub fn pauli() -> Self {
        let g = GroupTable::z2xz2();
        let (z, x) = clock_shift(2);
        let mats = (0..4)
            .map(|i| {
                let (a, b) = (i / 2, i % 2);
                let xa = if a == 1 { x.clone() } else { identity(2) };
                let zb = if b == 1 { z.clone() } else { identity(2) };
                xa * zb
            })
            .collect();
        let mu = Cochain::from_fn(4, 2, 4, |x| ((x[0] % 2) * (x[1] / 2)) as u64 * 2);
        Self::with_exact(g, mats, mu)
    }

    /// One-dimensional representation given by a character (1-cochain that
    /// is a homomorphism).
    pub fn character(group: &GroupTable, lambda: &Cochain) -> Result<Self> {
        if lambda.degree() != 1 {
            return Err(Error::Dimension("a character is a 1-cochain".into()));
        }
        lambda.require_cocycle(group)?;
        let mats = lambda
            .phases()
            .into_iter()
            .map(|z| CMat::from_element(1, 1, z))
            .collect();
        let q = group.order();
        Ok(Self::with_exact(group.clone(), mats, Cochain::zero(q, 2, q as u64)))
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }
    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }
    /// Exact cocycle recorded by a named constructor, if any.
    pub fn exact_cocycle(&self) -> Option<&Cochain> {
        self.exact.as_ref()
    }

    /// `mu(g,h) = tr(V(g) V(h) V(gh)^*) / dim`, normalized to unit modulus.
    pub fn cocycle_of(&self) -> NumericPhaseCochain {
        let q = self.group.order();
        let d = self.dim as f64;
        let mut values = Vec::with_capacity(q * q);
        for g in 0..q {
            for h in 0..q {
                let p = &self.matrices[g] * &self.matrices[h] * self.matrices[self.group.mul(g, h)].adjoint();
                let z = trace(&p) / d;
                let n = z.norm();
                values.push(if n > 0.0 { z / n } else { ONE });
            }
        }
        NumericPhaseCochain { group_order: q, values }
    }

    /// `max_{g,h} || V(g) V(h) - mu(g,h) V(gh) ||`.
    pub fn product_residual(&self) -> f64 {
        let mu = self.cocycle_of();
        let q = self.group.order();
        let mut worst: f64 = 0.0;
        for g in 0..q {
            for h in 0..q {
                let lhs = &self.matrices[g] * &self.matrices[h];
                let rhs = &self.matrices[self.group.mul(g, h)] * mu.get(g, h);
                worst = worst.max(frob_diff(&lhs, &rhs));
            }
        }
        worst
    }

    /// Exact cocycle over `Z/m`, snapping phases within `tol`.
    pub fn snapped_cocycle(&self, m: u64, tol: f64) -> Result<Cochain> {
        self.cocycle_of().snap(m, tol)
    }

    /// `V'(g) = nu(g) V(g)`.
    pub fn gauged(&self, nu: &[c64]) -> Self {
        let matrices = self.matrices.iter().zip(nu).map(|(m, z)| m * *z).collect();
        ProjectiveRep {
            group: self.group.clone(),
            dim: self.dim,
            matrices,
            exact: None,
        }
    }

    /// `Q V(g) Q^*`.
    pub fn conjugated_by(&self, q: &CMat) -> Self {
        let matrices = self.matrices.iter().map(|m| q * m * q.adjoint()).collect();
        ProjectiveRep {
            matrices,
            ..self.clone()
        }
    }

    /// Complex conjugate representation; its cocycle is the conjugate.
    pub fn conjugate(&self) -> Self {
        ProjectiveRep {
            group: self.group.clone(),
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| m.map(|z| z.conj())).collect(),
            exact: self.exact.as_ref().map(|c| c.neg()),
        }
    }

    /// `V1(g) ⊗ V2(g)`; cocycles multiply.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| kron(a, b))
            .collect();
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.add(b)?),
            _ => None,
        };
        Ok(ProjectiveRep {
            group: self.group.clone(),
            dim: self.dim * other.dim,
            matrices,
            exact,
        })
    }

    /// Characters `chi(g) = tr V(g)`, a diagnostic only.
    pub fn characters(&self) -> Vec<c64> {
        self.matrices.iter().map(trace).collect()
    }

    /// Gauge `nu` with `V'(g) = nu(g) V(g)` linear, when the class is zero.
    pub fn linearizing_gauge(&self, tol: f64) -> Result<Vec<c64>> {
        let target = NumericPhaseCochain {
            group_order: self.group.order(),
            values: vec![ONE; self.group.order().pow(2)],
        };
        self.matching_gauge(&target, tol)
    }

    /// Gauge `nu` such that the cocycle of `nu V` equals `target`
    /// numerically. Fails with `NoSolution` when the classes differ.
    pub fn matching_gauge(&self, target: &NumericPhaseCochain, tol: f64) -> Result<Vec<c64>> {
        let ratio = target.mul(&self.cocycle_of().conj());
        match coboundary_fit(&self.group, &ratio, tol)? {
            Some((nu, _)) => Ok(nu),
            None => Err(Error::NoSolution),
        }
    }
}

/// Finds phases `nu` with `d nu = rho` numerically, or `None` if `rho` is not
/// a coboundary. Returns the gauge and the snapping residual.
///
/// For `rho = d nu` one has `prod_h rho(g,h) = nu(g)^{|G|}`, which fixes
/// `nu(g)` up to a `|G|`-th root. The remainder `rho / d nu_0` is then valued
/// in `|G|`-th roots and is solved exactly.
pub fn coboundary_fit(g: &GroupTable, rho: &NumericPhaseCochain, tol: f64) -> Result<Option<(Vec<c64>, f64)>> {
    let q = g.order();
    let nu0: Vec<c64> = (0..q)
        .map(|a| {
            let p: c64 = (0..q).map(|b| rho.get(a, b)).product();
            cis(p.arg() / q as f64)
        })
        .collect();
    let sigma = rho.times_coboundary(g, &nu0.iter().map(|z| z.conj()).collect::<Vec<_>>());
    let m = q as u64;
    let mut ks = Vec::with_capacity(q * q);
    let mut resid: f64 = 0.0;
    for z in sigma.values() {
        let (k, d) = snap_phase(*z, m);
        if d > tol {
            return Ok(None);
        }
        resid = resid.max(d);
        ks.push(k);
    }
    let exact = Cochain::from_values(q, 2, m, ks)?;
    if !exact.is_cocycle(g) {
        return Ok(None);
    }
    match solve_coboundary(g, &exact) {
        Ok(nu1) => {
            let ph = nu1.phases();
            let nu = nu0.iter().zip(&ph).map(|(a, b)| a * b).collect();
            Ok(Some((nu, resid)))
        }
        Err(Error::NoSolution) => Ok(None),
        Err(e) => Err(e),
    }
}

/// How a numeric cocycle was classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassMethod {
    Snapped,
    Fitted,
}

/// Classifies a numeric 2-cocycle: snap to roots of the group's modulus if
/// possible, otherwise fit a coboundary gauge against every class
/// representative and require a unique fit.
pub fn classify_phases(
    h2: &CohomologyGroup,
    omega: &NumericPhaseCochain,
    snap_tol: f64,
    fit_tol: f64,
) -> Result<(CohomClass, f64, ClassMethod)> {
    let g = h2.group();
    if let Ok(exact) = omega.snap(h2.modulus(), snap_tol) {
        if exact.is_cocycle(g) {
            let resid = omega.distance(&NumericPhaseCochain::from_exact(&exact));
            return Ok((h2.class_of(&exact)?, resid, ClassMethod::Snapped));
        }
    }
    let mut fits = Vec::new();
    for el in h2.elements() {
        let rep = NumericPhaseCochain::from_exact(&el.representative);
        let rho = omega.mul(&rep.conj());
        if let Some((_, r)) = coboundary_fit(g, &rho, fit_tol)? {
            fits.push((el, r));
        }
    }
    match fits.len() {
        1 => {
            let (el, r) = fits.pop().unwrap();
            Ok((el, r, ClassMethod::Fitted))
        }
        0 => Err(Error::NoClassFit(omega.cocycle_residual(g))),
        _ => Err(Error::AmbiguousClass(
            fits.into_iter().map(|(e, _)| e.coordinates).collect(),
        )),
    }
}

/// Unitary `T` with `T V1(g) = V2(g) T`, by group averaging a random seed and
/// taking the polar factor.
pub fn equivariant_unitary<R: Rng + ?Sized>(
    rep1: &ProjectiveRep,
    rep2: &ProjectiveRep,
    rng: &mut R,
    cfg: &Config,
) -> Result<CMat> {
    if rep1.group != rep2.group {
        return Err(Error::GroupMismatch);
    }
    if rep1.dim != rep2.dim {
        return Err(Error::Dimension(format!(
            "intertwiner between dimensions {} and {}",
            rep1.dim, rep2.dim
        )));
    }
    cfg.check_dim(rep1.dim)?;
    let n = rep1.dim;
    let q = rep1.group.order();
    for _ in 0..cfg.intertwiner_retries {
        let x = gaussian(rng, n, n);
        let mut t = CMat::zeros(n, n);
        for g in 0..q {
            t += &rep2.matrices[g] * &x * rep1.matrices[g].adjoint();
        }
        let (u, smin) = polar_unitary(&t);
        if smin < cfg.tol.intertwiner_singular * frob(&t) / (n as f64).max(1.0) {
            continue;
        }
        if intertwiner_residual(&u, rep1, rep2) <= cfg.tol.intertwiner {
            return Ok(u);
        }
    }
    let cocycle_mismatch = rep1.cocycle_of().distance(&rep2.cocycle_of());
    let character_mismatch = rep1
        .characters()
        .iter()
        .zip(rep2.characters())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Err(Error::NoIntertwiner {
        tries: cfg.intertwiner_retries,
        cocycle_mismatch,
        character_mismatch,
    })
}

/// `max_g || T V1(g) - V2(g) T ||`.
pub fn intertwiner_residual(t: &CMat, rep1: &ProjectiveRep, rep2: &ProjectiveRep) -> f64 {
    rep1.matrices
        .iter()
        .zip(&rep2.matrices)
        .map(|(a, b)| frob_diff(&(t * a), &(b * t)))
        .fold(0.0, f64::max)
}

/// Phases `exp(2 pi i x)` for a real 1-cochain given in turns; used for
/// random gauges in tests and tools.
pub fn random_gauge<R: Rng + ?Sized>(rng: &mut R, q: usize) -> Vec<c64> {
    (0..q).map(|_| cis(2.0 * PI * rng.gen::<f64>())).collect()
}

/// Scalar `lambda` with `m = lambda 1`, if `m` is scalar within `tol`.
pub fn as_scalar(m: &CMat, tol: f64) -> Option<c64> {
    let n = m.nrows();
    let lam = trace(m) / n as f64;
    let mut r = m.clone();
    for i in 0..n {
        r[(i, i)] -= lam;
    }
    if frob(&r) <= tol {
        Some(lam)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use crate::rng::seeded;

    fn groups() -> Vec<GroupTable> {
        ["Z2", "Z3", "Z4", "Z2xZ2", "S3"]
            .iter()
            .map(|n| GroupTable::builtin(n).unwrap())
            .collect()
    }

    #[test]
    fn trivial_rep_has_zero_cocycle() {
        let g = GroupTable::cyclic(3);
        let r = ProjectiveRep::trivial(&g, 2);
        assert!(r.snapped_cocycle(3, 1e-6).unwrap().is_zero());
    }

    #[test]
    fn pauli_cocycle_matches() {
        let r = ProjectiveRep::pauli();
        let mu = r.snapped_cocycle(4, 1e-6).unwrap();
        assert_eq!(&mu, r.exact_cocycle().unwrap());
        assert!(r.product_residual() < 1e-12);
        let h2 = CohomologyGroup::default_for(r.group(), 2).unwrap();
        assert_eq!(h2.class_of(&mu).unwrap().coordinates, vec![1]);
    }

    #[test]
    fn regular_projective_round_trip() {
        let mut rng = seeded(11);
        for g in groups() {
            let q = g.order();
            for _ in 0..10 {
                let nu = Cochain::from_fn(q, 1, q as u64, |_| rng.gen_range(0..q as u64));
                let h2 = CohomologyGroup::default_for(&g, 2).unwrap();
                let el = &h2.elements()[rng.gen_range(0..h2.order() as usize)];
                let mu = el.representative.add(&nu.coboundary(&g)).unwrap();
                let r = ProjectiveRep::regular_projective(&g, &mu).unwrap();
                assert!(r.product_residual() < 1e-12);
                let snapped = r.snapped_cocycle(q as u64, 1e-6).unwrap();
                assert_eq!(snapped, mu);
            }
        }
    }

    #[test]
    fn coboundary_rep_is_linearizable() {
        let g = GroupTable::cyclic(4);
        let nu = Cochain::from_values(4, 1, 4, vec![1, 3, 0, 2]).unwrap();
        let r = ProjectiveRep::regular_projective(&g, &nu.coboundary(&g)).unwrap();
        let inv: Vec<c64> = nu.phases().iter().map(|z| z.conj()).collect();
        let lin = r.gauged(&inv);
        assert!(lin.snapped_cocycle(4, 1e-6).unwrap().is_zero());
        let fit = r.linearizing_gauge(1e-4).unwrap();
        assert!(
            r.gauged(&fit)
                .cocycle_of()
                .distance(&NumericPhaseCochain::from_exact(&Cochain::zero(4, 2, 4)))
                < 1e-9
        );
    }

    #[test]
    fn conjugate_and_tensor() {
        let p = ProjectiveRep::pauli();
        let pc = p.conjugate();
        let h2 = CohomologyGroup::default_for(p.group(), 2).unwrap();
        let t = p.tensor(&pc).unwrap();
        assert!(h2.class_of(&t.snapped_cocycle(4, 1e-6).unwrap()).unwrap().is_zero());
        let pp = p.tensor(&p).unwrap();
        assert!(h2.class_of(&pp.snapped_cocycle(4, 1e-6).unwrap()).unwrap().is_zero());
        assert_eq!(pp.exact_cocycle().unwrap(), &p.exact_cocycle().unwrap().scale(2));
    }

    #[test]
    fn gauge_changes_cochain_not_class() {
        let mut rng = seeded(5);
        let p = ProjectiveRep::pauli();
        let h2 = CohomologyGroup::default_for(p.group(), 2).unwrap();
        let gauge = random_gauge(&mut rng, 4);
        let (cls, _, method) = classify_phases(&h2, &p.gauged(&gauge).cocycle_of(), 1e-6, 1e-4).unwrap();
        assert_eq!(method, ClassMethod::Fitted);
        assert_eq!(cls.coordinates, vec![1]);
    }

    #[test]
    fn intertwiner_for_basis_change() {
        let mut rng = seeded(8);
        let p = ProjectiveRep::pauli();
        let q = random_unitary(&mut rng, 2);
        let p2 = p.conjugated_by(&q);
        let cfg = Config::default();
        let t = equivariant_unitary(&p, &p2, &mut rng, &cfg).unwrap();
        assert!(intertwiner_residual(&t, &p, &p2) < 1e-8);
        assert!(unitarity_residual(&t) < 1e-8);
        // T is a phase times Q
        let ph = as_scalar(&(q.adjoint() * &t), 1e-8).unwrap();
        assert!((ph.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn regular_stacking_equalizes_characters() {
        let mut rng = seeded(9);
        let g = GroupTable::cyclic(3);
        let chars = crate::cohomology::characters(&g).unwrap();
        let a = ProjectiveRep::character(&g, &chars[0]).unwrap();
        let b = ProjectiveRep::character(&g, &chars[1]).unwrap();
        let cfg = Config::default();
        assert!(matches!(
            equivariant_unitary(&a, &b, &mut rng, &cfg),
            Err(Error::NoIntertwiner { .. })
        ));
        let reg = ProjectiveRep::regular(&g);
        let t = equivariant_unitary(&a.tensor(&reg).unwrap(), &b.tensor(&reg).unwrap(), &mut rng, &cfg).unwrap();
        assert!(intertwiner_residual(&t, &a.tensor(&reg).unwrap(), &b.tensor(&reg).unwrap()) < 1e-8);
    }
}
