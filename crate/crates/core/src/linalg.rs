//! Small dense complex matrices and their singular value decomposition.
//!
//! The SVD is a one-sided (Hestenes) Jacobi iteration. It is accurate to
//! working precision on the small per-slice matrices produced by block
//! decompositions and keeps real inputs real, which the Fourier-domain code
//! relies on for the self-conjugate slices.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_SWEEPS: usize = 80;

/// Column-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows * cols");
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for l in 0..self.cols {
                let b = rhs[(l, j)];
                if b == ZERO {
                    continue;
                }
                let a = self.col(l);
                let o = out.col_mut(j);
                for i in 0..a.len() {
                    o[i] += a[i] * b;
                }
            }
        }
        out
    }

    /// Keeps the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> CMatrix {
        assert!(k <= self.cols);
        CMatrix { rows: self.rows, cols: k, data: self.data[..k * self.rows].to_vec() }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i + j * self.rows]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i + j * self.rows]
    }
}

/// Full singular value decomposition `A = U diag(s) V^H`.
///
/// `u` is `m x m`, `v` is `n x n` and `s` holds `min(m, n)` values in
/// nonincreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Recomposes `U diag(values) V^H` for a replacement spectrum.
    pub fn recompose_with(&self, values: &[f64]) -> CMatrix {
        let (m, n) = (self.u.rows, self.v.rows);
        assert_eq!(values.len(), self.s.len());
        let mut out = CMatrix::zeros(m, n);
        for (l, &sigma) in values.iter().enumerate() {
            if sigma == 0.0 {
                continue;
            }
            let u = self.u.col(l);
            let v = self.v.col(l);
            for j in 0..n {
                let coeff = v[j].conj() * sigma;
                let o = out.col_mut(j);
                for i in 0..m {
                    o[i] += u[i] * coeff;
                }
            }
        }
        out
    }
}

/// The Jacobi sweep did not converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoConvergence;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // a^H b
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Applies the unitary column rotation `[c, s; -s e^{-iφ}, c e^{-iφ}]` to columns `p < q`.
fn rotate(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let rows = m.rows;
    let (left, right) = m.data.split_at_mut(q * rows);
    let cp = &mut left[p * rows..(p + 1) * rows];
    let cq = &mut right[..rows];
    for i in 0..rows {
        let a = cp[i];
        let b = cq[i] * phase;
        cp[i] = a * c - b * s;
        cq[i] = a * s + b * c;
    }
}

/// Orthonormal completion: extends the first `filled` columns of `u` to a unitary matrix.
fn complete_basis(u: &mut CMatrix, filled: usize) {
    let m = u.rows;
    for target in filled..m {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for t in 0..m {
            let mut v = vec![ZERO; m];
            v[t] = ONE;
            for _ in 0..2 {
                for l in 0..target {
                    let proj = dot(u.col(l), &v);
                    for (vi, ui) in v.iter_mut().zip(u.col(l)) {
                        *vi -= ui * proj;
                    }
                }
            }
            let nrm = norm_sqr(&v).sqrt();
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, v));
            }
        }
        let (nrm, v) = best.expect("m >= 1");
        for (dst, src) in u.col_mut(target).iter_mut().zip(&v) {
            *dst = src / nrm;
        }
    }
}

fn svd_tall(a: &CMatrix) -> Result<Svd, NoConvergence> {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);
    let tol = f64::EPSILON * (m.max(1) as f64);
    // columns at rounding level of the whole matrix carry no direction
    let floor = (f64::EPSILON * a.frobenius()).powi(2);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sqr(w.col(p));
                let beta = norm_sqr(w.col(q));
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let gamma = dot(w.col(p), w.col(q));
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NoConvergence);
    }

    let norms: Vec<f64> = (0..n).map(|j| norm_sqr(w.col(j)).sqrt()).collect();
    if norms.iter().any(|x| !x.is_finite()) {
        return Err(NoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let sigma_max = order.first().map_or(0.0, |&j| norms[j]);
    let keep_floor = sigma_max * 1e-10;
    let mut u = CMatrix::zeros(m, m);
    let mut v_sorted = CMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut filled = 0;
    for (dst, &src) in order.iter().enumerate() {
        s.push(norms[src]);
        v_sorted.col_mut(dst).copy_from_slice(v.col(src));
        if norms[src] > keep_floor && norms[src] > 0.0 && filled == dst {
            let inv = 1.0 / norms[src];
            for (o, z) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *o = z * inv;
            }
            filled += 1;
        }
    }
    complete_basis(&mut u, filled);
    Ok(Svd { u, s, v: v_sorted })
}

/// Singular value decomposition of an arbitrary complex matrix.
pub fn svd(a: &CMatrix) -> Result<Svd, NoConvergence> {
    if a.rows >= a.cols {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint())?;
        Ok(Svd { u: t.v, s: t.s, v: t.u })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(m: usize, n: usize, seed: u64, real: bool) -> CMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let data = (0..m * n)
            .map(|_| {
                let re = next();
                let im = if real { 0.0 } else { next() };
                Complex64::new(re, im)
            })
            .collect();
        CMatrix::from_col_major(m, n, data)
    }

    fn unitary_defect(q: &CMatrix) -> f64 {
        let g = q.adjoint().matmul(q);
        let mut d = 0.0;
        for j in 0..g.cols() {
            for i in 0..g.rows() {
                let target = if i == j { ONE } else { ZERO };
                d += (g[(i, j)] - target).norm_sqr();
            }
        }
        d.sqrt()
    }

    fn check(a: &CMatrix) {
        let f = svd(a).unwrap();
        assert_eq!(f.u.rows(), a.rows());
        assert_eq!(f.v.rows(), a.cols());
        assert!(unitary_defect(&f.u) < 1e-12, "U defect {}", unitary_defect(&f.u));
        assert!(unitary_defect(&f.v) < 1e-12, "V defect {}", unitary_defect(&f.v));
        assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
        let r = f.recompose_with(&f.s);
        let diff: f64 = r.as_slice().iter().zip(a.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff <= 1e-12 * a.frobenius().max(1.0), "reconstruction {diff}");
    }

    #[test]
    fn random_shapes() {
        for m in 1..=7 {
            for n in 1..=7 {
                check(&lcg_matrix(m, n, (m * 31 + n) as u64, false));
                check(&lcg_matrix(m, n, (m * 17 + n) as u64, true));
            }
        }
    }

    #[test]
    fn rank_deficient_and_zero() {
        check(&CMatrix::zeros(3, 2));
        let a = lcg_matrix(5, 1, 3, false);
        let b = lcg_matrix(1, 4, 4, false);
        let low = a.matmul(&b);
        check(&low);
        let f = svd(&low).unwrap();
        assert!(f.s[1] < 1e-14 * f.s[0]);
    }

    #[test]
    fn rank_one_two_by_two_converges() {
        // a column collapses to rounding noise after the first rotation
        let u = [Complex64::new(0.61, 0.2), Complex64::new(-0.37, 0.9)];
        let v = [Complex64::new(1.3, -0.4), Complex64::new(0.25, 0.7)];
        let data = (0..4).map(|k| u[k % 2] * v[k / 2].conj() * 17.0).collect();
        let a = CMatrix::from_col_major(2, 2, data);
        check(&a);
        for seed in 0..200 {
            let x = lcg_matrix(3, 1, seed, false);
            let y = lcg_matrix(1, 3, seed + 1000, false);
            check(&x.matmul(&y));
        }
    }

    #[test]
    fn real_input_stays_real() {
        let a = lcg_matrix(4, 3, 11, true);
        let f = svd(&a).unwrap();
        assert!(f.u.as_slice().iter().all(|z| z.im == 0.0));
        assert!(f.v.as_slice().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn identity_is_fixed() {
        let f = svd(&CMatrix::identity(3)).unwrap();
        assert_eq!(f.s, vec![1.0, 1.0, 1.0]);
        assert_eq!(f.u, CMatrix::identity(3));
    }
}
