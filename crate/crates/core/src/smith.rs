//! Diagonalization of matrices over `Z/m` by unimodular row and column
//! operations, with optional tracking of the transforms.
//!
//! `Z/m` is a principal ideal ring, so Bezout 2x2 moves of determinant one
//! suffice. The diagonal is not normalized to divisibility order; callers that
//! need invariant factors split into prime powers afterwards.

use alloc::vec;
use alloc::vec::Vec;

use crate::group::gcd;

/// Dense row-major matrix with entries in `Z/m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMat {
    pub rows: usize,
    pub cols: usize,
    pub modulus: u64,
    pub data: Vec<u64>,
}

impl ModMat {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        ModMat {
            rows,
            cols,
            modulus,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus;
        }
        m
    }

    /// Reduces an integer matrix.
    pub fn from_i64(rows: usize, cols: usize, modulus: u64, data: &[i64]) -> Self {
        let m = modulus as i64;
        ModMat {
            rows,
            cols,
            modulus,
            data: data.iter().map(|v| v.rem_euclid(m) as u64).collect(),
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.modulus;
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter()
                    .zip(x)
                    .fold(0u64, |acc, (&a, &b)| (acc + mulmod(a, b, self.modulus)) % self.modulus)
            })
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    // row_a <- p row_a + q row_b ; row_b <- r row_a + s row_b
    fn mix_rows(&mut self, a: usize, b: usize, [p, q, r, s]: [u64; 4]) {
        let m = self.modulus;
        for c in 0..self.cols {
            let x = self.data[a * self.cols + c];
            let y = self.data[b * self.cols + c];
            if x == 0 && y == 0 {
                continue;
            }
            self.data[a * self.cols + c] = (mulmod(p, x, m) + mulmod(q, y, m)) % m;
            self.data[b * self.cols + c] = (mulmod(r, x, m) + mulmod(s, y, m)) % m;
        }
    }

    // col_a <- p col_a + q col_b ; col_b <- r col_a + s col_b
    fn mix_cols(&mut self, a: usize, b: usize, [p, q, r, s]: [u64; 4]) {
        let m = self.modulus;
        for row in 0..self.rows {
            let x = self.data[row * self.cols + a];
            let y = self.data[row * self.cols + b];
            if x == 0 && y == 0 {
                continue;
            }
            self.data[row * self.cols + a] = (mulmod(p, x, m) + mulmod(q, y, m)) % m;
            self.data[row * self.cols + b] = (mulmod(r, x, m) + mulmod(s, y, m)) % m;
        }
    }
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Extended Euclid on nonnegative integers: `(g, s, t)` with `s a + t b = g`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = xgcd(a as i128 % m as i128, m as i128);
    (g == 1).then(|| s.rem_euclid(m as i128) as u64)
}

fn red(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

// Determinant-one move sending (a, b) to (gcd, 0). When a divides b the move
// is a plain elimination, so the pivot never changes without shrinking.
fn bezout(a: u64, b: u64, m: u64) -> [u64; 4] {
    if b % a == 0 {
        return [1, 0, red(-((b / a) as i128), m), 1 % m];
    }
    let (g, s, q) = xgcd(a as i128, b as i128);
    [red(s, m), red(q, m), red(-(b as i128) / g, m), red(a as i128 / g, m)]
}

/// Result of [`diagonalize`]: `D = U A V` with `D` diagonal.
#[derive(Debug, Clone)]
pub struct Diagonal {
    pub d: ModMat,
    /// Diagonal entries `D[t][t]` for `t < min(rows, cols)`.
    pub diag: Vec<u64>,
    pub u: Option<ModMat>,
    pub u_inv: Option<ModMat>,
    pub v: Option<ModMat>,
    pub v_inv: Option<ModMat>,
}

/// Diagonalizes `a` over `Z/m`. Row transforms are tracked when `rows` is
/// set, column transforms when `cols` is set.
pub fn diagonalize(a: &ModMat, rows: bool, cols: bool) -> Diagonal {
    let m = a.modulus;
    let mut d = a.clone();
    let mut u = rows.then(|| ModMat::identity(a.rows, m));
    let mut u_inv = u.clone();
    let mut v = cols.then(|| ModMat::identity(a.cols, m));
    let mut v_inv = v.clone();
    let n = a.rows.min(a.cols);
    let weight = |x: u64| if x == 0 { u64::MAX } else { gcd(x, m) };

    for t in 0..n {
        // pivot: entry whose ideal is largest (smallest gcd with m)
        let mut best: Option<(usize, usize, u64)> = None;
        for r in t..d.rows {
            for c in t..d.cols {
                let w = weight(d.get(r, c));
                if w != u64::MAX && best.map_or(true, |(_, _, bw)| w < bw) {
                    best = Some((r, c, w));
                    if w == 1 {
                        break;
                    }
                }
            }
            if matches!(best, Some((_, _, 1))) {
                break;
            }
        }
        let Some((pr, pc, _)) = best else { break };
        d.swap_rows(t, pr);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pr);
        }
        if let Some(ui) = u_inv.as_mut() {
            ui.swap_cols(t, pr);
        }
        d.swap_cols(t, pc);
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pc);
        }
        if let Some(vi) = v_inv.as_mut() {
            vi.swap_rows(t, pc);
        }

        loop {
            let mut dirty = false;
            for r in t + 1..d.rows {
                let b = d.get(r, t);
                if b == 0 {
                    continue;
                }
                let a0 = d.get(t, t);
                let mx = bezout(a0, b, m);
                d.mix_rows(t, r, mx);
                if let Some(u) = u.as_mut() {
                    u.mix_rows(t, r, mx);
                }
                if let Some(ui) = u_inv.as_mut() {
                    // U^{-1} M^{-1}, M^{-1} = [[s4, -q4], [-r4, p4]]
                    let [p4, q4, r4, s4] = mx;
                    ui.mix_cols(t, r, [s4, red(-(r4 as i128), m), red(-(q4 as i128), m), p4]);
                }
            }
            for c in t + 1..d.cols {
                let b = d.get(t, c);
                if b == 0 {
                    continue;
                }
                dirty = true;
                let a0 = d.get(t, t);
                // new col_t = s col_t + q col_c ; new col_c = -(b/g) col_t + (a0/g) col_c
                let mx = bezout(a0, b, m);
                d.mix_cols(t, c, mx);
                if let Some(v) = v.as_mut() {
                    v.mix_cols(t, c, mx);
                }
                if let Some(vi) = v_inv.as_mut() {
                    let [p4, q4, r4, s4] = mx;
                    vi.mix_rows(t, c, [s4, red(-(r4 as i128), m), red(-(q4 as i128), m), p4]);
                }
            }
            if !dirty {
                break;
            }
            if (t + 1..d.rows).all(|r| d.get(r, t) == 0) {
                break;
            }
        }
    }
    let diag = (0..n).map(|t| d.get(t, t)).collect();
    Diagonal {
        d,
        diag,
        u,
        u_inv,
        v,
        v_inv,
    }
}

/// Solves `A x = b` over `Z/m`, returning one solution if any exists.
pub fn solve(a: &ModMat, b: &[u64]) -> Option<Vec<u64>> {
    let m = a.modulus;
    let dg = diagonalize(a, true, true);
    let ub = dg.u.as_ref().unwrap().mul_vec(b);
    let mut y = vec![0u64; a.cols];
    for (r, &rhs) in ub.iter().enumerate() {
        let dt = if r < dg.diag.len() { dg.diag[r] } else { 0 };
        if dt == 0 {
            if rhs != 0 {
                return None;
            }
            continue;
        }
        // dt y = rhs (mod m)
        let g = gcd(dt, m);
        if rhs % g != 0 {
            return None;
        }
        let mg = m / g;
        let inv = inv_mod((dt / g) % mg, mg)?;
        y[r] = mulmod(rhs / g, inv, mg);
    }
    Some(dg.v.as_ref().unwrap().mul_vec(&y))
}
