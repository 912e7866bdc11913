//! Dense complex linear algebra helpers on top of nalgebra.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;
use rand::Rng;

#[allow(non_camel_case_types)]
pub type c64 = Complex<f64>;
pub type CMat = DMatrix<c64>;

pub const ZERO: c64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: c64 = Complex { re: 1.0, im: 0.0 };

pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}
pub(crate) fn round(x: f64) -> f64 {
    Float::round(x)
}
pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}
pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}

/// `exp(2 pi i k / m)`.
pub fn root_of_unity(k: u64, m: u64) -> c64 {
    let t = 2.0 * PI * (k % m) as f64 / m as f64;
    Complex::from_polar(1.0, t)
}

/// Phase `exp(i t)`.
pub fn cis(t: f64) -> c64 {
    Complex::from_polar(1.0, t)
}

/// Nearest `m`-th root of unity: exponent and distance.
pub fn snap_phase(z: c64, m: u64) -> (u64, f64) {
    let t = z.arg();
    let turns = t / (2.0 * PI) * m as f64;
    let k = round(turns) as i64;
    let k = k.rem_euclid(m as i64) as u64;
    (k, (z - root_of_unity(k, m)).norm())
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt_f()
}

pub(crate) trait SqrtF {
    fn sqrt_f(self) -> f64;
}
impl SqrtF for f64 {
    fn sqrt_f(self) -> f64 {
        sqrt(self)
    }
}

pub fn frob_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt_f()
}

/// Hilbert-Schmidt inner product `tr(a^* b)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> c64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMat) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `|| U^* U - 1 ||_F`, an upper bound for the operator-norm residual.
pub fn unitarity_residual(u: &CMat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let p = u.adjoint() * u;
    frob_diff(&p, &identity(u.nrows()))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Best scalar approximation `m ~ lambda 1` and its residual.
pub fn scalar_part(m: &CMat) -> (c64, f64) {
    let n = m.nrows();
    let lam = trace(m) / n as f64;
    let mut r = m.clone();
    for i in 0..n {
        r[(i, i)] -= lam;
    }
    (lam, frob(&r))
}

/// Unitary polar factor and the smallest singular value.
pub fn polar_unitary(m: &CMat) -> (CMat, f64) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    (u * vt, smin)
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()) * c64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `exp(i h)` for Hermitian `h`.
pub fn expm_i_herm(h: &CMat) -> CMat {
    let (vals, vecs) = herm_eig(h);
    let n = vals.len();
    let mut d = vecs.clone();
    for c in 0..n {
        let p = cis(vals[c]);
        for r in 0..n {
            d[(r, c)] *= p;
        }
    }
    d * vecs.adjoint()
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| crate::rng::complex_normal(rng))
}

/// Random Hermitian matrix (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = gaussian(rng, n, n);
    (&g + g.adjoint()) * c64::new(0.5, 0.0)
}

/// Haar-ish random unitary via QR-free polar factor of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    polar_unitary(&gaussian(rng, n, n)).0
}

/// Swap of two tensor factors of dimensions `(da, db)`: `|i j> -> |j i>`.
pub fn swap_matrix(da: usize, db: usize) -> CMat {
    let n = da * db;
    let mut m = CMat::zeros(n, n);
    for i in 0..da {
        for j in 0..db {
            m[(j * da + i, i * db + j)] = ONE;
        }
    }
    m
}

/// Generalized Pauli clock `Z` and shift `X` on `C^d`.
pub fn clock_shift(d: usize) -> (CMat, CMat) {
    let z = CMat::from_fn(d, d, |r, c| {
        if r == c {
            root_of_unity(r as u64, d as u64)
        } else {
            ZERO
        }
    });
    let x = CMat::from_fn(d, d, |r, c| if r == (c + 1) % d { ONE } else { ZERO });
    (z, x)
}

/// Matrix unit `|i><j|`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Largest entrywise distance of a unit complex number from 1 over a slice.
pub fn max_phase_dev(vals: &[c64]) -> f64 {
    vals.iter().map(|z| (z - ONE).norm()).fold(0.0, f64::max)
}

/// Deterministic short digest of a matrix: FNV-1a over rounded entries.
pub fn digest(m: &CMat) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut feed = |x: i64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    feed(m.nrows() as i64);
    feed(m.ncols() as i64);
    for z in m.iter() {
        feed(round(z.re * 1e9) as i64);
        feed(round(z.im * 1e9) as i64);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn snap_roundtrip() {
        for m in 1..9u64 {
            for k in 0..m {
                let (kk, d) = snap_phase(root_of_unity(k, m), m);
                assert_eq!(kk, k);
                assert!(d < 1e-12);
            }
        }
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        let mut rng = seeded(3);
        let u = random_unitary(&mut rng, 5);
        assert!(unitarity_residual(&u) < 1e-12);
        let (p, s) = polar_unitary(&u);
        assert!(frob_diff(&p, &u) < 1e-10);
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn swap_moves_factors() {
        let (z, x) = clock_shift(3);
        let s = swap_matrix(3, 2);
        let (z2, _) = clock_shift(2);
        let lhs = &s * kron(&z, &z2) * s.adjoint();
        assert!(frob_diff(&lhs, &kron(&z2, &z)) < 1e-12);
        let _ = x;
    }

    #[test]
    fn expm_is_unitary() {
        let mut rng = seeded(9);
        let h = random_hermitian(&mut rng, 6);
        assert!(unitarity_residual(&expm_i_herm(&h)) < 1e-10);
    }
}
