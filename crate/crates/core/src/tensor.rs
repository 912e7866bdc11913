//! Operators on ordered sets of wires (tensor factors).
//!
//! A [`LocalOperator`] carries its support as ascending wire ids with the
//! matching dimensions. The first wire is the most significant tensor index.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{c64, frob, identity, CMat, ONE, ZERO};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    wires: Vec<usize>,
    dims: Vec<usize>,
    mat: CMat,
}

impl LocalOperator {
    pub fn new(wires: Vec<usize>, dims: Vec<usize>, mat: CMat) -> Result<Self> {
        if wires.len() != dims.len() {
            return Err(Error::Dimension("wire and dimension lists differ in length".into()));
        }
        if wires.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Dimension(format!("support {wires:?} is not strictly ascending")));
        }
        let d: usize = dims.iter().product();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, support dimension is {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(LocalOperator { wires, dims, mat })
    }

    /// Builds an operator whose support is given in arbitrary order; the
    /// matrix is permuted into ascending wire order.
    pub fn from_unordered(wires: &[usize], dims: &[usize], mat: CMat) -> Result<Self> {
        let mut order: Vec<usize> = (0..wires.len()).collect();
        order.sort_by_key(|&i| wires[i]);
        if order.windows(2).any(|w| wires[w[0]] == wires[w[1]]) {
            return Err(Error::Dimension(format!("support {wires:?} repeats a wire")));
        }
        let d: usize = dims.iter().product();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Dimension("matrix does not match the support".into()));
        }
        let mat = permute_factors(&mat, dims, &order);
        let w = order.iter().map(|&i| wires[i]).collect();
        let dd = order.iter().map(|&i| dims[i]).collect();
        Self::new(w, dd, mat)
    }

    pub fn scalar(z: c64) -> Self {
        LocalOperator {
            wires: Vec::new(),
            dims: Vec::new(),
            mat: CMat::from_element(1, 1, z),
        }
    }

    pub fn identity_on(wires: Vec<usize>, dims: Vec<usize>) -> Self {
        let d = dims.iter().product();
        LocalOperator {
            wires,
            dims,
            mat: identity(d),
        }
    }

    /// Single-wire operator.
    pub fn on_wire(wire: usize, mat: CMat) -> Self {
        let d = mat.nrows();
        LocalOperator {
            wires: vec![wire],
            dims: vec![d],
            mat,
        }
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }
    pub fn into_matrix(self) -> CMat {
        self.mat
    }
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
    pub fn norm(&self) -> f64 {
        frob(&self.mat)
    }

    pub fn adjoint(&self) -> Self {
        LocalOperator {
            mat: self.mat.adjoint(),
            ..self.clone()
        }
    }

    pub fn scale(&self, z: c64) -> Self {
        LocalOperator {
            mat: &self.mat * z,
            ..self.clone()
        }
    }

    /// Tensor with identities so that the support becomes `wires` (a
    /// superset, ascending).
    pub fn embed(&self, wires: &[usize], dims: &[usize]) -> Result<Self> {
        if wires == self.wires.as_slice() {
            return Ok(self.clone());
        }
        let mut pos = Vec::with_capacity(self.wires.len());
        for w in &self.wires {
            match wires.binary_search(w) {
                Ok(p) => pos.push(p),
                Err(_) => return Err(Error::Dimension(format!("wire {w} missing from embedding support"))),
            }
        }
        let rest: Vec<usize> = (0..wires.len()).filter(|p| !pos.contains(p)).collect();
        let d_rest: usize = rest.iter().map(|&p| dims[p]).product();
        // self ⊗ 1 with factors ordered [pos..., rest...], then permuted to ascending
        let big = self.mat.kronecker(&identity(d_rest));
        let mut order_dims: Vec<usize> = pos.iter().map(|&p| dims[p]).collect();
        order_dims.extend(rest.iter().map(|&p| dims[p]));
        let mut src_of = vec![0usize; wires.len()];
        for (k, &p) in pos.iter().chain(rest.iter()).enumerate() {
            src_of[p] = k;
        }
        let mat = permute_factors(&big, &order_dims, &src_of);
        Ok(LocalOperator {
            wires: wires.to_vec(),
            dims: dims.to_vec(),
            mat,
        })
    }

    /// Union of two supports with their dimensions.
    pub fn union_support(&self, other: &Self) -> Result<(Vec<usize>, Vec<usize>)> {
        merge_supports(&self.wires, &self.dims, &other.wires, &other.dims)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (w, d) = self.union_support(other)?;
        let a = self.embed(&w, &d)?;
        let b = other.embed(&w, &d)?;
        Ok(LocalOperator {
            wires: w,
            dims: d,
            mat: a.mat * b.mat,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (w, d) = self.union_support(other)?;
        let a = self.embed(&w, &d)?;
        let b = other.embed(&w, &d)?;
        Ok(LocalOperator {
            wires: w,
            dims: d,
            mat: a.mat + b.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `u self u^*` for a unitary `u`; the support becomes the union.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        let (w, d) = self.union_support(u)?;
        let a = self.embed(&w, &d)?;
        let pos: Vec<usize> = u.wires.iter().map(|x| w.binary_search(x).unwrap()).collect();
        let left = apply_left(&a.mat, &d, &pos, &u.mat);
        let right = apply_left(&left.adjoint(), &d, &pos, &u.mat).adjoint();
        Ok(LocalOperator {
            wires: w,
            dims: d,
            mat: right,
        })
    }

    /// Partial trace over the listed wires divided by their dimension.
    pub fn reduce_out(&self, drop: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.wires.len())
            .filter(|&p| !drop.contains(&self.wires[p]))
            .collect();
        if keep.len() == self.wires.len() {
            return self.clone();
        }
        let gone: Vec<usize> = (0..self.wires.len()).filter(|p| !keep.contains(p)).collect();
        let d_gone: usize = gone.iter().map(|&p| self.dims[p]).product();
        let mut order = keep.clone();
        order.extend(gone.iter());
        let m = permute_factors(&self.mat, &self.dims, &order);
        let d_keep: usize = keep.iter().map(|&p| self.dims[p]).product();
        let mut out = CMat::zeros(d_keep, d_keep);
        for i in 0..d_keep {
            for j in 0..d_keep {
                let mut s = ZERO;
                for k in 0..d_gone {
                    s += m[(i * d_gone + k, j * d_gone + k)];
                }
                out[(i, j)] = s / d_gone as f64;
            }
        }
        LocalOperator {
            wires: keep.iter().map(|&p| self.wires[p]).collect(),
            dims: keep.iter().map(|&p| self.dims[p]).collect(),
            mat: out,
        }
    }

    /// Drops wires on which the operator acts as the identity, relative
    /// tolerance `tol`.
    pub fn trim(&self, tol: f64) -> Self {
        let scale = self.norm().max(1e-300);
        let mut cur = self.clone();
        for w in self.wires.clone() {
            let reduced = cur.reduce_out(&[w]);
            let back = reduced.embed(&cur.wires, &cur.dims).expect("subset");
            let err = crate::linalg::frob_diff(&back.mat, &cur.mat);
            if err <= tol * scale {
                cur = reduced;
            }
        }
        cur
    }

    /// Frobenius distance after embedding both into the union support.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let (w, d) = self.union_support(other)?;
        let a = self.embed(&w, &d)?;
        let b = other.embed(&w, &d)?;
        Ok(crate::linalg::frob_diff(&a.mat, &b.mat))
    }

    /// Operator-Schmidt decomposition across `left` (wires of the support)
    /// and the remaining wires: `self = sum_s a_s ⊗ b_s` with
    /// Hilbert-Schmidt orthogonal families. Terms below `tol` relative to the
    /// largest are dropped.
    pub fn schmidt_split(&self, left: &[usize], tol: f64) -> Vec<(Self, Self)> {
        let lp: Vec<usize> = (0..self.wires.len())
            .filter(|&p| left.contains(&self.wires[p]))
            .collect();
        let rp: Vec<usize> = (0..self.wires.len()).filter(|p| !lp.contains(p)).collect();
        let dl: usize = lp.iter().map(|&p| self.dims[p]).product();
        let dr: usize = rp.iter().map(|&p| self.dims[p]).product();
        let mut order = lp.clone();
        order.extend(rp.iter());
        let m = permute_factors(&self.mat, &self.dims, &order);
        // realign: R[(i,j),(k,l)] = M[(i,k),(j,l)]
        let mut r = CMat::zeros(dl * dl, dr * dr);
        for i in 0..dl {
            for j in 0..dl {
                for k in 0..dr {
                    for l in 0..dr {
                        r[(i * dl + j, k * dr + l)] = m[(i * dr + k, j * dr + l)];
                    }
                }
            }
        }
        let svd = r.svd(true, true);
        let u = svd.u.unwrap();
        let vt = svd.v_t.unwrap();
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let lw: Vec<usize> = lp.iter().map(|&p| self.wires[p]).collect();
        let ld: Vec<usize> = lp.iter().map(|&p| self.dims[p]).collect();
        let rw: Vec<usize> = rp.iter().map(|&p| self.wires[p]).collect();
        let rd: Vec<usize> = rp.iter().map(|&p| self.dims[p]).collect();
        let mut out = Vec::new();
        for (s, &sv) in svd.singular_values.iter().enumerate() {
            if sv <= tol * smax || sv == 0.0 {
                continue;
            }
            let a = CMat::from_fn(dl, dl, |i, j| u[(i * dl + j, s)] * sv);
            let b = CMat::from_fn(dr, dr, |k, l| vt[(s, k * dr + l)]);
            out.push((
                LocalOperator {
                    wires: lw.clone(),
                    dims: ld.clone(),
                    mat: a,
                },
                LocalOperator {
                    wires: rw.clone(),
                    dims: rd.clone(),
                    mat: b,
                },
            ));
        }
        out
    }

    /// Tensor product of operators on disjoint supports.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.wires.iter().any(|w| other.wires.contains(w)) {
            return Err(Error::Dimension("tensor product of overlapping supports".into()));
        }
        let mut wires = self.wires.clone();
        wires.extend(other.wires.iter());
        let mut dims = self.dims.clone();
        dims.extend(other.dims.iter());
        Self::from_unordered(&wires, &dims, self.mat.kronecker(&other.mat))
    }
}

/// Merges two ascending supports, checking that shared wires agree on
/// dimension.
pub fn merge_supports(a: &[usize], da: &[usize], b: &[usize], db: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut w = Vec::with_capacity(a.len() + b.len());
    let mut d = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            w.push(a[i]);
            d.push(da[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            w.push(b[j]);
            d.push(db[j]);
            j += 1;
        } else {
            if da[i] != db[j] {
                return Err(Error::Dimension(format!(
                    "wire {} has dimensions {} and {}",
                    a[i], da[i], db[j]
                )));
            }
            w.push(a[i]);
            d.push(da[i]);
            i += 1;
            j += 1;
        }
    }
    Ok((w, d))
}

/// Reorders tensor factors: factor `k` of the result is factor `order[k]`
/// of the input (rows and columns alike).
pub fn permute_factors(m: &CMat, dims: &[usize], order: &[usize]) -> CMat {
    if order.iter().enumerate().all(|(k, &o)| k == o) {
        return m.clone();
    }
    let map = index_map(dims, order);
    let n = map.len();
    CMat::from_fn(n, n, |i, j| m[(map[i], map[j])])
}

// For each index of the permuted space, the index of the original space.
pub(crate) fn index_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let nf = dims.len();
    let mut strides = vec![1usize; nf];
    for k in (0..nf.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let n: usize = dims.iter().product();
    let mut map = Vec::with_capacity(n);
    let mut digits = vec![0usize; nf];
    for _ in 0..n {
        map.push(digits.iter().zip(order).map(|(&dg, &o)| dg * strides[o]).sum());
        for k in (0..nf).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

/// `(u at positions pos) * m`, where `m` acts on factors with dimensions
/// `dims`.
pub fn apply_left(m: &CMat, dims: &[usize], pos: &[usize], u: &CMat) -> CMat {
    let nf = dims.len();
    let rest: Vec<usize> = (0..nf).filter(|p| !pos.contains(p)).collect();
    // move the target factors last on the row side
    let mut order = rest.clone();
    order.extend(pos.iter());
    let map = index_map(dims, &order);
    let n = map.len();
    let du = u.nrows();
    let nr = n / du;
    let cols = m.ncols();
    // y[(p), (r, c)] = m[map[r*du + p], c]
    let y = CMat::from_fn(du, nr * cols, |p, rc| {
        let (r, c) = (rc % nr, rc / nr);
        m[(map[r * du + p], c)]
    });
    let z = u * y;
    let mut out = CMat::zeros(n, cols);
    for c in 0..cols {
        for r in 0..nr {
            for p in 0..du {
                out[(map[r * du + p], c)] = z[(p, c * nr + r)];
            }
        }
    }
    out
}

/// Single-wire generators of the matrix algebra on a `d`-dimensional wire:
/// the clock and shift operators.
pub fn wire_generators(wire: usize, d: usize) -> Vec<LocalOperator> {
    if d == 1 {
        return Vec::new();
    }
    let (z, x) = crate::linalg::clock_shift(d);
    vec![LocalOperator::on_wire(wire, z), LocalOperator::on_wire(wire, x)]
}

/// Hilbert-Schmidt orthonormal basis of matrix units on a wire.
pub fn wire_basis(wire: usize, d: usize) -> Vec<LocalOperator> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(LocalOperator::on_wire(wire, crate::linalg::unit(d, i, j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob_diff, kron, random_unitary, swap_matrix};
    use crate::rng::seeded;

    fn rand_op(rng: &mut crate::rng::Stream, wires: Vec<usize>, dims: Vec<usize>) -> LocalOperator {
        let d = dims.iter().product();
        LocalOperator::new(wires, dims, crate::linalg::gaussian(rng, d, d)).unwrap()
    }

    #[test]
    fn embed_matches_kron() {
        let mut rng = seeded(1);
        let a = rand_op(&mut rng, vec![3], vec![2]);
        let e = a.embed(&[1, 3, 5], &[3, 2, 2]).unwrap();
        let want = kron(&kron(&identity(3), a.matrix()), &identity(2));
        assert!(frob_diff(e.matrix(), &want) < 1e-12);
    }

    #[test]
    fn unordered_support_is_sorted() {
        let mut rng = seeded(2);
        let a = crate::linalg::gaussian(&mut rng, 2, 2);
        let b = crate::linalg::gaussian(&mut rng, 3, 3);
        let op = LocalOperator::from_unordered(&[7, 2], &[2, 3], kron(&a, &b)).unwrap();
        assert_eq!(op.wires(), &[2, 7]);
        assert!(frob_diff(op.matrix(), &kron(&b, &a)) < 1e-12);
    }

    #[test]
    fn conjugation_matches_dense() {
        let mut rng = seeded(3);
        let o = rand_op(&mut rng, vec![0, 2], vec![2, 3]);
        let u = LocalOperator::new(vec![1, 2], vec![2, 3], random_unitary(&mut rng, 6)).unwrap();
        let c = o.conjugate_by(&u).unwrap();
        let w = [0, 1, 2];
        let d = [2, 2, 3];
        let oe = o.embed(&w, &d).unwrap();
        let ue = u.embed(&w, &d).unwrap();
        let want = ue.matrix() * oe.matrix() * ue.matrix().adjoint();
        assert!(frob_diff(c.matrix(), &want) < 1e-10);
    }

    #[test]
    fn swap_moves_operator() {
        let (z, _) = crate::linalg::clock_shift(3);
        let o = LocalOperator::on_wire(4, z.clone());
        let s = LocalOperator::new(vec![4, 9], vec![3, 3], swap_matrix(3, 3)).unwrap();
        let moved = o.conjugate_by(&s).unwrap().trim(1e-12);
        assert_eq!(moved.wires(), &[9]);
        assert!(frob_diff(moved.matrix(), &z) < 1e-12);
    }

    #[test]
    fn trim_and_reduce() {
        let mut rng = seeded(4);
        let a = rand_op(&mut rng, vec![5], vec![3]);
        let e = a.embed(&[1, 5, 8], &[2, 3, 4]).unwrap();
        let t = e.trim(1e-12);
        assert_eq!(t.wires(), &[5]);
        assert!(frob_diff(t.matrix(), a.matrix()) < 1e-12);
    }

    #[test]
    fn schmidt_reassembles() {
        let mut rng = seeded(5);
        let o = rand_op(&mut rng, vec![0, 1, 2], vec![2, 2, 3]);
        let parts = o.schmidt_split(&[1], 1e-14);
        let mut acc = LocalOperator::new(vec![0, 1, 2], vec![2, 2, 3], CMat::zeros(12, 12)).unwrap();
        for (a, b) in &parts {
            acc = acc.add(&a.tensor(b).unwrap()).unwrap();
        }
        assert!(acc.distance(&o).unwrap() < 1e-10);
        assert!(parts.len() <= 4);
    }
}
