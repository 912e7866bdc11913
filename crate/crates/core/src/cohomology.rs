//! Cohomology `H^n(G, U(1))` computed exactly with coefficients `Z/m`.
//!
//! A `U(1)` class of degree `n` is always represented by a cocycle valued in
//! `|G|`-th roots of unity, so for `|G|` dividing `m` we have
//! `H^n(G, U(1)) = Z^n(Z/m) / B'` where `B'` consists of the `m`-th-root
//! valued coboundaries of `U(1)` cochains. Those can be taken valued in
//! `(m |G|)`-th roots, which gives the generators of `B'`:
//!
//! * `d e_j` for the standard basis cochains `e_j`;
//! * `(d v) / |G|` for integer lifts `v` of generators of `ker(d mod |G|)`.
//!
//! Plain `Z/m` cohomology differs (for instance `H^2(Z2 x Z2, Z/4)` has order 8).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::group::{coboundary_matrix, gcd, lcm, Cochain, GroupTable};
use crate::smith::{diagonalize, inv_mod, mulmod, solve, ModMat};
use crate::{Error, Result};

/// A cohomology class in invariant-factor coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohomClass {
    pub degree: usize,
    pub invariant_factors: Vec<u64>,
    pub coordinates: Vec<u64>,
    pub representative: Cochain,
}

impl CohomClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|&c| c == 0)
    }
}

/// `H^n(G, U(1))` with its coordinate map.
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    group: GroupTable,
    degree: usize,
    modulus: u64,
    factors: Vec<u64>,
    generators: Vec<Cochain>,
    // stage 1: kernel of d^{n+1}
    v_inv: ModMat,
    kernel: Vec<(usize, u64)>, // (column t, order g_t)
    // stage 2: quotient by B'
    p: ModMat,
    comp_orders: Vec<u64>,
    // stage 3: canonical coordinate k = sum_j c_j w[k][j] mod d_k
    weights: Vec<Vec<u64>>,
}

/// Largest supported degree.
pub const MAX_DEGREE: usize = 3;

impl CohomologyGroup {
    /// `H^n(G, U(1))` computed over `Z/m`; `m` must be a multiple of `|G|`.
    pub fn new(g: &GroupTable, n: usize, m: u64) -> Result<Self> {
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(n));
        }
        let q = g.order() as u64;
        if m == 0 || m % q != 0 {
            return Err(Error::BadModulus {
                modulus: m,
                order: g.order(),
            });
        }
        let cols = g.order().pow(n as u32);

        // stage 1
        let (r1, c1, d_next) = coboundary_matrix(g, n);
        let dn1 = ModMat::from_i64(r1, c1, m, &d_next);
        let dg = diagonalize(&dn1, false, true);
        let v = dg.v.expect("tracked");
        let v_inv = dg.v_inv.expect("tracked");
        let mut kernel = Vec::new();
        for t in 0..cols {
            let dt = dg.diag.get(t).copied().unwrap_or(0);
            let gt = gcd(dt, m);
            if gt > 1 {
                kernel.push((t, gt));
            }
        }
        let kernel_vec = |t: usize, gt: u64| -> Vec<u64> {
            let s = m / gt;
            (0..cols).map(|r| mulmod(v.get(r, t), s, m)).collect()
        };
        let to_z = |x: &[u64]| -> Vec<u64> {
            let y = v_inv.mul_vec(x);
            kernel
                .iter()
                .map(|&(t, gt)| {
                    let s = m / gt;
                    debug_assert_eq!(y[t] % s, 0, "vector not in the kernel");
                    (y[t] / s) % gt
                })
                .collect()
        };

        // stage 2: relations
        let mut relations: Vec<Vec<u64>> = Vec::new();
        if n >= 2 {
            let (r0, c0, d_prev) = coboundary_matrix(g, n - 1);
            let dn = ModMat::from_i64(r0, c0, m, &d_prev);
            for j in 0..c0 {
                relations.push(to_z(&dn.column(j)));
            }
            let dq = ModMat::from_i64(r0, c0, q, &d_prev);
            let dgq = diagonalize(&dq, false, true);
            let vq = dgq.v.expect("tracked");
            for t in 0..c0 {
                let dt = dgq.diag.get(t).copied().unwrap_or(0);
                let gt = gcd(dt, q);
                if gt <= 1 {
                    continue;
                }
                let s = q / gt;
                let lift: Vec<i64> = (0..c0).map(|r| (mulmod(vq.get(r, t), s, q)) as i64).collect();
                // d(lift) is divisible by |G| over the integers
                let img: Vec<u64> = (0..r0)
                    .map(|r| {
                        let val: i64 = (0..c0).map(|c| d_prev[r * c0 + c] * lift[c]).sum();
                        debug_assert_eq!(val.rem_euclid(q as i64), 0);
                        (val / q as i64).rem_euclid(m as i64) as u64
                    })
                    .collect();
                relations.push(to_z(&img));
            }
        }
        let k = kernel.len();
        let mut rel = ModMat::zeros(k, k + relations.len(), m);
        for (i, &(_, gt)) in kernel.iter().enumerate() {
            rel.set(i, i, gt);
        }
        for (j, z) in relations.iter().enumerate() {
            for i in 0..k {
                rel.set(i, k + j, z[i]);
            }
        }
        let dg2 = diagonalize(&rel, true, false);
        let p = dg2.u.expect("tracked");
        let p_inv = dg2.u_inv.expect("tracked");
        let comp_orders: Vec<u64> = (0..k).map(|j| gcd(dg2.diag.get(j).copied().unwrap_or(0), m)).collect();
        let comp_gens: Vec<Vec<u64>> = (0..k)
            .map(|j| {
                let mut x = vec![0u64; cols];
                for (t, &(tt, gt)) in kernel.iter().enumerate() {
                    let coef = p_inv.get(t, j);
                    if coef == 0 {
                        continue;
                    }
                    let kv = kernel_vec(tt, gt);
                    for r in 0..cols {
                        x[r] = (x[r] + mulmod(coef, kv[r], m)) % m;
                    }
                }
                x
            })
            .collect();

        // stage 3: prime-power split and recombination
        let mut by_prime: BTreeMap<u64, Vec<(u64, usize)>> = BTreeMap::new();
        for (j, &h) in comp_orders.iter().enumerate() {
            for (pr, e) in factorize(h) {
                by_prime.entry(pr).or_default().push((pr.pow(e), j));
            }
        }
        for v in by_prime.values_mut() {
            v.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        }
        let nf = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
        // factor index 0 is the largest; reversed at the end
        let mut factors = Vec::with_capacity(nf);
        let mut generators = Vec::with_capacity(nf);
        let mut weights = Vec::with_capacity(nf);
        for idx in 0..nf {
            let parts: Vec<(u64, usize)> = by_prime.values().filter_map(|v| v.get(idx).copied()).collect();
            let dk: u64 = parts.iter().map(|p| p.0).product();
            let mut gen = vec![0u64; cols];
            let mut w = vec![0u64; k];
            for &(pe, j) in &parts {
                let h = comp_orders[j];
                let mult = h / pe;
                for r in 0..cols {
                    gen[r] = (gen[r] + mulmod(mult, comp_gens[j][r], m)) % m;
                }
                // c_p = c_j * mult^{-1} mod p^e, placed with the CRT idempotent
                let u = inv_mod(mult % pe, pe).expect("coprime by construction");
                let rest = dk / pe;
                let e_p = mulmod(rest, inv_mod(rest % pe, pe).expect("coprime"), dk);
                w[j] = (w[j] + mulmod(u, e_p, dk)) % dk;
            }
            factors.push(dk);
            generators.push(Cochain::from_values(g.order(), n, m, gen)?);
            weights.push(w);
        }
        factors.reverse();
        generators.reverse();
        weights.reverse();

        Ok(CohomologyGroup {
            group: g.clone(),
            degree: n,
            modulus: m,
            factors,
            generators,
            v_inv,
            kernel,
            p,
            comp_orders,
            weights,
        })
    }

    /// Default modulus `m = |G|`.
    pub fn default_for(g: &GroupTable, n: usize) -> Result<Self> {
        Self::new(g, n, g.order() as u64)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    /// Invariant factors `d_1 | d_2 | ...`, all greater than one.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }
    /// Cocycle representatives of the factor generators.
    pub fn generators(&self) -> &[Cochain] {
        &self.generators
    }
    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// Class with the given coordinates (reduced mod the factors).
    pub fn element(&self, coords: &[u64]) -> CohomClass {
        assert_eq!(coords.len(), self.factors.len());
        let m = self.modulus;
        let mut rep = Cochain::zero(self.group.order(), self.degree, m);
        let coordinates: Vec<u64> = coords.iter().zip(&self.factors).map(|(c, d)| c % d).collect();
        for (c, gen) in coordinates.iter().zip(&self.generators) {
            if *c != 0 {
                rep = rep.add(&gen.scale(*c)).expect("same shape");
            }
        }
        CohomClass {
            degree: self.degree,
            invariant_factors: self.factors.clone(),
            coordinates,
            representative: rep,
        }
    }

    pub fn zero(&self) -> CohomClass {
        self.element(&vec![0; self.factors.len()])
    }

    /// All classes in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<CohomClass> {
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut coords = vec![0u64; self.factors.len()];
        loop {
            out.push(self.element(&coords));
            let mut i = coords.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < self.factors[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
    }

    /// Coordinates of the class of a cocycle. Cocycles over any modulus are
    /// accepted.
    pub fn class_of(&self, c: &Cochain) -> Result<CohomClass> {
        if c.degree() != self.degree {
            return Err(Error::Dimension(alloc::format!(
                "cochain of degree {} for a degree-{} group",
                c.degree(),
                self.degree
            )));
        }
        if c.group_order() != self.group.order() {
            return Err(Error::GroupMismatch);
        }
        c.require_cocycle(&self.group)?;
        if self.modulus % c.modulus() == 0 {
            let x = c.lift(self.modulus)?;
            let coords = self.coords_of(x.values());
            return Ok(self.element(&coords));
        }
        let big = CohomologyGroup::new(&self.group, self.degree, lcm(self.modulus, c.modulus()))?;
        let target = big.class_of(c)?;
        for el in self.elements() {
            if big.class_of(&el.representative)?.coordinates == target.coordinates {
                return Ok(el);
            }
        }
        Err(Error::Numerical("class not found among group elements".into()))
    }

    fn coords_of(&self, x: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        let y = self.v_inv.mul_vec(x);
        let z: Vec<u64> = self.kernel.iter().map(|&(t, gt)| (y[t] / (m / gt)) % gt).collect();
        let pz = self.p.mul_vec(&z);
        let comps: Vec<u64> = pz.iter().zip(&self.comp_orders).map(|(v, h)| v % h).collect();
        self.weights
            .iter()
            .zip(&self.factors)
            .map(|(w, &dk)| {
                comps
                    .iter()
                    .zip(w)
                    .fold(0u64, |acc, (&c, &wj)| (acc + mulmod(c % dk, wj, dk)) % dk)
            })
            .collect()
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Solves `d nu = c` for a 2-cocycle `c` with `U(1)` phases. The returned
/// 1-cochain has modulus `m |G|` where `m` is the modulus of `c`; `c = 0`
/// yields `nu = 0`.
pub fn solve_coboundary(g: &GroupTable, c: &Cochain) -> Result<Cochain> {
    if c.degree() != 2 {
        return Err(Error::Dimension("solve_coboundary expects a 2-cochain".into()));
    }
    if c.group_order() != g.order() {
        return Err(Error::GroupMismatch);
    }
    c.require_cocycle(g)?;
    let q = g.order() as u64;
    let big = c.modulus() * q;
    if c.is_zero() {
        return Ok(Cochain::zero(g.order(), 1, big));
    }
    let (rows, cols, d) = coboundary_matrix(g, 1);
    let a = ModMat::from_i64(rows, cols, big, &d);
    let target = c.lift(big)?;
    match solve(&a, target.values()) {
        Some(nu) => Cochain::from_values(g.order(), 1, big, nu),
        None => Err(Error::NoSolution),
    }
}

/// Characters `G -> U(1)` as 1-cochains over `Z/|G|`, in the coordinate
/// order of `H^1`.
pub fn characters(g: &GroupTable) -> Result<Vec<Cochain>> {
    let h1 = CohomologyGroup::default_for(g, 1)?;
    Ok(h1.elements().into_iter().map(|c| c.representative).collect())
}

/// Brute-force oracle: counts `N_k = #{x in H : k x = 0}` for every `k`
/// dividing `exponent`, by enumerating normalized cochains. Normalized
/// cochains compute the same cohomology. Feasible for tiny groups only.
pub fn brute_force_order_counts(g: &GroupTable, n: usize, m: u64) -> Result<BTreeMap<u64, u64>> {
    use alloc::collections::BTreeSet;
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(n));
    }
    let q = g.order();
    let big = m * q as u64;
    let normalized = |deg: usize| -> Vec<usize> {
        let mut args = vec![0usize; deg];
        (0..q.pow(deg as u32))
            .filter(|&i| {
                crate::group::decode(i, q, &mut args);
                args.iter().all(|&a| a != 0)
            })
            .collect()
    };
    let enumerate = |deg: usize, modulus: u64, f: &mut dyn FnMut(Cochain)| {
        let free = normalized(deg);
        let total = q.pow(deg as u32);
        let count = (modulus as u128).pow(free.len() as u32);
        assert!(count <= 1 << 22, "brute force too large");
        for code in 0..count as u64 {
            let mut vals = vec![0u64; total];
            let mut rest = code;
            for &slot in &free {
                vals[slot] = rest % modulus;
                rest /= modulus;
            }
            f(Cochain::from_values(q, deg, modulus, vals).unwrap());
        }
    };
    let mut cocycles: Vec<Vec<u64>> = Vec::new();
    enumerate(n, m, &mut |c| {
        if c.is_cocycle(g) {
            cocycles.push(c.values().to_vec());
        }
    });
    let mut bounds: BTreeSet<Vec<u64>> = BTreeSet::new();
    if n == 1 {
        bounds.insert(vec![0; q]);
    } else {
        enumerate(n - 1, big, &mut |nu| {
            let d = nu.coboundary(g);
            if d.values().iter().all(|v| v % q as u64 == 0) {
                bounds.insert(d.values().iter().map(|v| v / q as u64).collect());
            }
        });
    }
    let order = cocycles.len() as u64 / bounds.len() as u64;
    let mut counts = BTreeMap::new();
    for k in 1..=order {
        if order % k != 0 {
            continue;
        }
        let killed = cocycles
            .iter()
            .filter(|x| bounds.contains(&x.iter().map(|v| (v * k) % m).collect::<Vec<_>>()))
            .count() as u64;
        counts.insert(k, killed / bounds.len() as u64);
    }
    Ok(counts)
}

/// `N_k` for the abelian group with the given invariant factors.
pub fn order_counts(factors: &[u64]) -> BTreeMap<u64, u64> {
    let order: u64 = factors.iter().product();
    (1..=order)
        .filter(|k| order % k == 0)
        .map(|k| (k, factors.iter().map(|&d| gcd(k, d)).product()))
        .collect()
}

/// Invariant factors of the abelian group with counts `N_k`, as returned by
/// [`brute_force_order_counts`].
pub fn factors_from_counts(counts: &BTreeMap<u64, u64>) -> Vec<u64> {
    let order = *counts.keys().max().unwrap_or(&1);
    let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for (p, e) in factorize(order) {
        // r_j = number of cyclic p-factors of order >= p^j
        let mut exps = Vec::new();
        let mut prev = 1u64;
        for j in 1..=e {
            let nj = counts[&p.pow(j)];
            let mut r = 0;
            let mut ratio = nj / prev;
            while ratio > 1 {
                ratio /= p;
                r += 1;
            }
            exps.push(r);
            prev = nj;
        }
        // factor sizes from the conjugate partition
        let nfac = exps.first().copied().unwrap_or(0);
        let sizes: Vec<u32> = (0..nfac)
            .map(|i| exps.iter().filter(|&&r| r > i).count() as u32)
            .collect();
        per_prime.push((p, sizes));
    }
    let nf = per_prime.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    let mut out: Vec<u64> = (0..nf)
        .map(|i| {
            per_prime
                .iter()
                .map(|(p, s)| s.get(i).map_or(1, |&e| p.pow(e)))
                .product()
        })
        .collect();
    out.sort();
    out
}
