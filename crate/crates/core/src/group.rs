//! Finite groups as multiplication tables, and cochains valued in roots of
//! unity with the inhomogeneous coboundary.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A finite group given by its multiplication table. Element 0 is the
/// identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    name: String,
    order: usize,
    mult: Vec<usize>,
    inv: Vec<usize>,
}

impl GroupTable {
    /// Validates a table: closure, identity at index 0, inverses and
    /// associativity (full triple loop).
    pub fn new(name: &str, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut mult = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has length {}", row.len())));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidGroup(format!("entry {v} out of range in row {i}")));
                }
            }
            mult.extend_from_slice(row);
        }
        for g in 0..n {
            if mult[g] != g || mult[g * n] != g {
                return Err(Error::InvalidGroup(format!(
                    "element 0 is not the identity (fails at {g})"
                )));
            }
        }
        let mut inv = vec![usize::MAX; n];
        for g in 0..n {
            for h in 0..n {
                if mult[g * n + h] == 0 {
                    if mult[h * n + g] != 0 {
                        return Err(Error::InvalidGroup(format!("left/right inverse of {g} differ")));
                    }
                    inv[g] = h;
                    break;
                }
            }
            if inv[g] == usize::MAX {
                return Err(Error::InvalidGroup(format!("element {g} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mult[a * n + b];
                for c in 0..n {
                    if mult[ab * n + c] != mult[a * n + mult[b * n + c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(GroupTable {
            name: name.to_string(),
            order: n,
            mult,
            inv,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(&format!("Z{n}"), table).expect("cyclic table is valid")
    }

    /// Direct product; element `(a, b)` has index `a * |B| + b`.
    pub fn product(a: &GroupTable, b: &GroupTable) -> Self {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                    .collect()
            })
            .collect();
        Self::new(&format!("{}x{}", a.name, b.name), table).expect("product table is valid")
    }

    pub fn z2xz2() -> Self {
        Self::product(&Self::cyclic(2), &Self::cyclic(2))
    }

    /// Symmetric group on three letters, elements listed as permutations in
    /// lexicographic order (identity first).
    pub fn s3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = (0..6)
            .map(|a| {
                (0..6)
                    .map(|b| {
                        // (a*b)(i) = a(b(i))
                        let (pa, pb) = (perms[a], perms[b]);
                        index([pa[pb[0]], pa[pb[1]], pa[pb[2]]])
                    })
                    .collect()
            })
            .collect();
        Self::new("S3", table).expect("S3 table is valid")
    }

    /// Built-in groups: `Z<n>`, `Z2xZ2`, `S3`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "Z2xZ2" | "Z2*Z2" | "V4" => Some(Self::z2xz2()),
            "S3" => Some(Self::s3()),
            _ => {
                let n: usize = name.strip_prefix('Z')?.parse().ok()?;
                (n >= 1 && n <= 64).then(|| Self::cyclic(n))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn order(&self) -> usize {
        self.order
    }
    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g * self.order + h]
    }
    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }
    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }
    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (0..self.order).all(|h| self.mul(g, h) == self.mul(h, g)))
    }
    /// Exponent of the group (lcm of element orders).
    pub fn exponent(&self) -> u64 {
        let mut e = 1u64;
        for g in 0..self.order {
            let mut k = 1u64;
            let mut x = g;
            while x != 0 {
                x = self.mul(x, g);
                k += 1;
            }
            e = lcm(e, k);
        }
        e
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// An n-cochain with values `exp(2 pi i k / m)`, stored as `k in Z/m`.
/// Index of `(g_1, ..., g_n)` is `g_1 |G|^{n-1} + ... + g_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cochain {
    degree: usize,
    modulus: u64,
    group_order: usize,
    values: Vec<u64>,
}

impl Cochain {
    pub fn zero(group_order: usize, degree: usize, modulus: u64) -> Self {
        Cochain {
            degree,
            modulus,
            group_order,
            values: vec![0; group_order.pow(degree as u32)],
        }
    }

    pub fn from_values(group_order: usize, degree: usize, modulus: u64, values: Vec<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Dimension("modulus must be positive".into()));
        }
        if values.len() != group_order.pow(degree as u32) {
            return Err(Error::Dimension(format!(
                "{} values for a degree-{degree} cochain on a group of order {group_order}",
                values.len()
            )));
        }
        Ok(Cochain {
            degree,
            modulus,
            group_order,
            values: values.into_iter().map(|v| v % modulus).collect(),
        })
    }

    pub fn from_fn(group_order: usize, degree: usize, modulus: u64, mut f: impl FnMut(&[usize]) -> u64) -> Self {
        let len = group_order.pow(degree as u32);
        let mut args = vec![0usize; degree];
        let values = (0..len)
            .map(|i| {
                decode(i, group_order, &mut args);
                f(&args) % modulus
            })
            .collect();
        Cochain {
            degree,
            modulus,
            group_order,
            values,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn group_order(&self) -> usize {
        self.group_order
    }
    pub fn values(&self) -> &[u64] {
        &self.values
    }
    pub fn get(&self, args: &[usize]) -> u64 {
        self.values[encode(args, self.group_order)]
    }
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Same phases written over a multiple of the modulus.
    pub fn lift(&self, modulus: u64) -> Result<Self> {
        if modulus % self.modulus != 0 {
            return Err(Error::ModulusMismatch(self.modulus, modulus));
        }
        let s = modulus / self.modulus;
        Ok(Cochain {
            modulus,
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        })
    }

    fn common(&self, other: &Cochain) -> Result<(Cochain, Cochain)> {
        if self.degree != other.degree || self.group_order != other.group_order {
            return Err(Error::Dimension("cochain shapes differ".into()));
        }
        let m = lcm(self.modulus, other.modulus);
        Ok((self.lift(m)?, other.lift(m)?))
    }

    /// Pointwise product of phases (sum of exponents) over the common modulus.
    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        let (a, b) = self.common(other)?;
        let m = a.modulus;
        Ok(Cochain {
            values: a.values.iter().zip(&b.values).map(|(x, y)| (x + y) % m).collect(),
            ..a
        })
    }

    pub fn neg(&self) -> Cochain {
        let m = self.modulus;
        Cochain {
            values: self.values.iter().map(|v| (m - v) % m).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: u64) -> Cochain {
        let m = self.modulus;
        Cochain {
            values: self.values.iter().map(|v| (v * (k % m)) % m).collect(),
            ..self.clone()
        }
    }

    /// Equality as phase-valued functions, independent of the modulus.
    pub fn same_phases(&self, other: &Cochain) -> bool {
        match self.common(other) {
            Ok((a, b)) => a.values == b.values,
            Err(_) => false,
        }
    }

    /// Coboundary with the alternating-sum formula and trivial action:
    /// `(dc)(g_1..g_{n+1}) = c(g_2..) + sum_i (-1)^i c(.., g_i g_{i+1}, ..) + (-1)^{n+1} c(g_1..g_n)`.
    pub fn coboundary(&self, g: &GroupTable) -> Cochain {
        assert_eq!(g.order(), self.group_order, "cochain and group disagree");
        let n = self.degree;
        let m = self.modulus as i64;
        let q = self.group_order;
        let len = q.pow(n as u32 + 1);
        let mut args = vec![0usize; n + 1];
        let mut out = Vec::with_capacity(len);
        for idx in 0..len {
            decode(idx, q, &mut args);
            let mut acc: i64 = 0;
            for k in 0..=n + 1 {
                let v = self.values[encode(&face(g, &args, k), q)] as i64;
                acc += if k % 2 == 0 { v } else { -v };
            }
            out.push(acc.rem_euclid(m) as u64);
        }
        Cochain {
            degree: n + 1,
            modulus: self.modulus,
            group_order: q,
            values: out,
        }
    }

    /// Phases `exp(2 pi i k/m)`.
    pub fn phases(&self) -> Vec<crate::c64> {
        self.values
            .iter()
            .map(|&k| crate::linalg::root_of_unity(k, self.modulus))
            .collect()
    }

    /// First tuple where `dc` is nonzero, if any.
    pub fn cocycle_violation(&self, g: &GroupTable) -> Option<(Vec<usize>, u64)> {
        let d = self.coboundary(g);
        let q = self.group_order;
        let mut args = vec![0usize; self.degree + 1];
        d.values.iter().enumerate().find(|(_, &v)| v != 0).map(|(i, &v)| {
            decode(i, q, &mut args);
            (args.clone(), v)
        })
    }

    pub fn is_cocycle(&self, g: &GroupTable) -> bool {
        self.cocycle_violation(g).is_none()
    }

    pub fn require_cocycle(&self, g: &GroupTable) -> Result<()> {
        match self.cocycle_violation(g) {
            None => Ok(()),
            Some((args, value)) => Err(Error::NotCocycle {
                args,
                value,
                modulus: self.modulus,
            }),
        }
    }
}

/// Mixed-radix encoding, first argument most significant.
pub fn encode(args: &[usize], q: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * q + a)
}

pub fn decode(mut idx: usize, q: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % q;
        idx /= q;
    }
}

// Face k of (g_1..g_{n+1}): k = 0 drops g_1, 1 <= k <= n multiplies
// g_k g_{k+1}, k = n+1 drops g_{n+1}.
fn face(g: &GroupTable, args: &[usize], k: usize) -> Vec<usize> {
    let len = args.len();
    let mut out = Vec::with_capacity(len.saturating_sub(1));
    if k == 0 {
        out.extend_from_slice(&args[1..]);
    } else if k == len {
        out.extend_from_slice(&args[..len - 1]);
    } else {
        out.extend_from_slice(&args[..k - 1]);
        out.push(g.mul(args[k - 1], args[k]));
        out.extend_from_slice(&args[k + 1..]);
    }
    out
}

/// Integer matrix of `d: C^n -> C^{n+1}`; rows index (n+1)-tuples, columns
/// n-tuples, row-major.
pub fn coboundary_matrix(g: &GroupTable, n: usize) -> (usize, usize, Vec<i64>) {
    let q = g.order();
    let rows = q.pow(n as u32 + 1);
    let cols = q.pow(n as u32);
    let mut data = vec![0i64; rows * cols];
    let mut args = vec![0usize; n + 1];
    for r in 0..rows {
        decode(r, q, &mut args);
        for k in 0..=n + 1 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = encode(&face(g, &args, k), q);
            data[r * cols + c] += sign;
        }
    }
    (rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli(m: u64) -> Cochain {
        // mu((a,b),(c,d)) = b c (m/2); element (a,b) has index 2a + b.
        Cochain::from_fn(4, 2, m, |x| ((x[0] % 2) * (x[1] / 2)) as u64 * (m / 2))
    }

    #[test]
    fn builtins_validate() {
        for name in ["Z2", "Z3", "Z4", "Z2xZ2", "S3"] {
            let g = GroupTable::builtin(name).unwrap();
            assert_eq!(g.mul(0, 1), 1);
        }
        assert!(!GroupTable::s3().is_abelian());
        assert_eq!(GroupTable::s3().exponent(), 6);
        assert_eq!(GroupTable::z2xz2().exponent(), 2);
    }

    #[test]
    fn rejects_non_associative() {
        // a Latin square with identity that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(GroupTable::new("L5", t), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn sign_character_is_cocycle() {
        let g = GroupTable::cyclic(2);
        let lam = Cochain::from_fn(2, 1, 2, |x| x[0] as u64);
        assert!(lam.coboundary(&g).is_zero());
        let zero = Cochain::zero(2, 1, 2);
        assert!(zero.coboundary(&g).is_zero());
    }

    #[test]
    fn pauli_is_cocycle() {
        let g = GroupTable::z2xz2();
        assert!(pauli(4).coboundary(&g).is_zero());
        assert!(pauli(2).is_cocycle(&g));
    }

    #[test]
    fn degree_one_coboundary_formula() {
        let g = GroupTable::cyclic(4);
        let nu = Cochain::from_values(4, 1, 4, vec![1, 3, 0, 2]).unwrap();
        let d = nu.coboundary(&g);
        for a in 0..4 {
            for b in 0..4 {
                let want = (nu.get(&[b]) + 4 * 4 - nu.get(&[(a + b) % 4]) + nu.get(&[a])) % 4;
                assert_eq!(d.get(&[a, b]), want);
            }
        }
    }

    #[test]
    fn matrix_matches_coboundary() {
        let g = GroupTable::s3();
        let c = Cochain::from_fn(6, 1, 6, |x| (x[0] * 5 + 1) as u64);
        let (rows, cols, d) = coboundary_matrix(&g, 1);
        let dc = c.coboundary(&g);
        for r in 0..rows {
            let v: i64 = (0..cols).map(|k| d[r * cols + k] * c.values()[k] as i64).sum();
            assert_eq!(v.rem_euclid(6) as u64, dc.values()[r]);
        }
    }
}
