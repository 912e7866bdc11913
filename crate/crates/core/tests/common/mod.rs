//! Helpers shared by the integration tests: an independent cohomology
//! oracle and small systems.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use symtangle_core::cohomology::CohomologyGroup;
use symtangle_core::group::{Cochain, GroupTable};
use symtangle_core::lattice::{Geometry, OnSiteSymmetry, SpinRing};
use symtangle_core::linalg::{clock_shift, identity};
use symtangle_core::projrep::ProjectiveRep;

// Independent oracle: coboundary straight from the multiplication table.
pub fn naive_d(table: &[Vec<usize>], n: usize, m: u64, vals: &[u64]) -> Vec<u64> {
    let q = table.len();
    let idx = |args: &[usize]| args.iter().fold(0, |a, &x| a * q + x);
    let mut out = Vec::new();
    for code in 0..q.pow(n as u32 + 1) {
        let mut args = vec![0; n + 1];
        let mut c = code;
        for k in (0..=n).rev() {
            args[k] = c % q;
            c /= q;
        }
        let mut acc = vals[idx(&args[1..])] as i64;
        for i in 0..n {
            let mut f = args[..i].to_vec();
            f.push(table[args[i]][args[i + 1]]);
            f.extend_from_slice(&args[i + 2..]);
            let v = vals[idx(&f)] as i64;
            acc += if i % 2 == 0 { -v } else { v };
        }
        let v = vals[idx(&args[..n])] as i64;
        acc += if n % 2 == 0 { -v } else { v };
        out.push(acc.rem_euclid(m as i64) as u64);
    }
    out
}

// Enumerates normalized n-cochains over Z/m (entries with an identity
// argument are zero).
pub fn normalized(q: usize, n: usize, m: u64) -> Vec<Vec<u64>> {
    let len = q.pow(n as u32);
    let free: Vec<usize> = (0..len)
        .filter(|&i| {
            let mut c = i;
            (0..n).all(|_| {
                let ok = c % q != 0;
                c /= q;
                ok
            })
        })
        .collect();
    let total = (m as usize).pow(free.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![0; len];
            for &s in &free {
                v[s] = (code % m as usize) as u64;
                code /= m as usize;
            }
            v
        })
        .collect()
}

// Element-order counts of H^n(G, U(1)) from m-th root cocycles modulo
// coboundaries of (m |G|)-th root cochains.
pub fn brute_counts(g: &GroupTable, n: usize) -> BTreeMap<u64, u64> {
    let table = g.table();
    let q = g.order();
    let m = q as u64;
    let cocycles: Vec<Vec<u64>> = normalized(q, n, m)
        .into_iter()
        .filter(|c| naive_d(&table, n, m, c).iter().all(|&v| v == 0))
        .collect();
    let mut bounds = BTreeSet::new();
    if n == 1 {
        bounds.insert(vec![0; q]);
    } else {
        let big = m * q as u64;
        for nu in normalized(q, n - 1, big) {
            let d = naive_d(&table, n - 1, big, &nu);
            if d.iter().all(|v| v % q as u64 == 0) {
                bounds.insert(d.iter().map(|v| v / q as u64).collect::<Vec<_>>());
            }
        }
    }
    let order = (cocycles.len() / bounds.len()) as u64;
    (1..=order)
        .filter(|k| order % k == 0)
        .map(|k| {
            let killed = cocycles
                .iter()
                .filter(|c| bounds.contains(&c.iter().map(|v| v * k % m).collect::<Vec<_>>()))
                .count();
            (k, (killed / bounds.len()) as u64)
        })
        .collect()
}

/// Cocycle of the class with coordinates `coords` (reduced mod the
/// invariant factors) plus the coboundary of a cochain drawn from `seed`.
pub fn cocycle_with(h: &CohomologyGroup, coords: &[u64], seed: u64) -> (Cochain, Vec<u64>) {
    let g = h.group();
    let q = g.order();
    let m = h.modulus();
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        s >> 33
    };
    let coords: Vec<u64> = coords.iter().zip(h.invariant_factors()).map(|(a, d)| a % d).collect();
    let mut c = Cochain::zero(q, h.degree(), m);
    for (gen, &a) in h.generators().iter().zip(&coords) {
        c = c.add(&gen.scale(a)).unwrap();
    }
    let nu = Cochain::from_fn(q, h.degree() - 1, m, |_| next());
    (c.add(&nu.coboundary(g)).unwrap(), coords)
}

/// A random cocycle with its class coordinates.
pub fn random_cocycle(h: &CohomologyGroup, seed: u64) -> (Cochain, Vec<u64>) {
    let coords: Vec<u64> = (0..h.invariant_factors().len())
        .map(|i| seed.rotate_left(13 * i as u32 + 7) >> 40)
        .collect();
    cocycle_with(h, &coords, seed ^ 0x9e37_79b9_7f4a_7c15)
}

/// Qubit ring with `Z2` acting by `X` on every site.
pub fn z2_qubits(n: usize) -> (SpinRing, OnSiteSymmetry) {
    let g = GroupTable::cyclic(2);
    let ring = SpinRing::uniform(Geometry::Ring(n), &[2]).unwrap();
    let (_, x) = clock_shift(2);
    let rep = ProjectiveRep::new(g.clone(), vec![identity(2), x], 1e-12).unwrap();
    let beta = OnSiteSymmetry::per_leg(&ring, &g, &[(0, rep)]).unwrap();
    (ring, beta)
}

pub fn test_groups() -> Vec<GroupTable> {
    vec![
        GroupTable::cyclic(2),
        GroupTable::cyclic(3),
        GroupTable::cyclic(4),
        GroupTable::z2xz2(),
        GroupTable::s3(),
    ]
}
