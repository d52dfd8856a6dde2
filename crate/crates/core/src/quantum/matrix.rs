//! Dense complex matrices backed by `nalgebra`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

/// Spectral decomposition of a Hermitian matrix; eigenvalues ascending, the
/// matching eigenvectors are the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C64]) -> Self {
        Self(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let entries: Vec<C64> = rows.iter().flat_map(|row| row.iter().map(|&x| re(x))).collect();
        Self::from_row_slice(r, c, &entries)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let d = entries.len();
        Self::from_fn(d, d, |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// `|v><w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] += v;
    }

    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add_scaled(&mut self, other: &ComplexMatrix, s: f64) {
        self.0 += &other.0 * re(s);
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!(self.cols(), other.rows());
        assert_eq!(self.rows(), other.cols());
        let mut acc = ZERO;
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len());
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `<v|self|v>`
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let av = self.apply(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Largest deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let d = self.rows();
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                dev = dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * re(0.5))
    }

    fn require_hermitian(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows(), cols: self.cols() });
        }
        let deviation = self.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(())
    }

    /// Eigendecomposition of the Hermitian part of `self`, eigenvalues
    /// ascending.
    pub fn eigh(&self) -> Eigh {
        assert!(self.is_square());
        let d = self.rows();
        if d == 0 {
            return Eigh { values: vec![], vectors: Self::zeros(0, 0) };
        }
        let h = self.hermitian_part();
        let fm = faer::Mat::<C64>::from_fn(d, d, |i, j| h.0[(i, j)]);
        match fm.self_adjoint_eigen(faer::Side::Lower) {
            Ok(evd) => {
                let (s, u) = (evd.S(), evd.U());
                let values = (0..d).map(|k| s[k].re).collect();
                let vectors = DMatrix::from_fn(d, d, |i, j| u[(i, j)]);
                Eigh { values, vectors: Self(vectors) }
            }
            Err(_) => {
                let eig = h.0.symmetric_eigen();
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
                let vectors = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
                Eigh { values, vectors: Self(vectors) }
            }
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Sum of absolute eigenvalues of a Hermitian matrix.
    pub fn trace_norm_hermitian(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).sum()
    }

    /// Operator (spectral) norm, valid for any matrix.
    pub fn operator_norm(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return scale;
        }
        let unit = &self.0 * re(1.0 / scale);
        let gram = Self(unit.adjoint() * &unit);
        scale * gram.max_eigenvalue().max(0.0).sqrt()
    }

    /// Applies `f` to the spectrum of a Hermitian matrix.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let Eigh { values, vectors } = self.eigh();
        let d = values.len();
        let mut out = DMatrix::zeros(d, d);
        for (k, &lam) in values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            let col = vectors.0.column(k);
            out += (col * col.adjoint()) * re(w);
        }
        Self(out)
    }

    /// Positive part `A_+` of a Hermitian matrix.
    pub fn positive_part(&self) -> Self {
        self.spectral_map(|x| x.max(0.0))
    }

    pub fn sqrt_psd(&self) -> Self {
        self.spectral_map(|x| x.max(0.0).sqrt())
    }

    /// Pseudo-inverse square root; eigenvalues at or below `tol` map to zero.
    pub fn inv_sqrt_psd(&self, tol: f64) -> Self {
        self.spectral_map(|x| if x > tol { 1.0 / x.sqrt() } else { 0.0 })
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.clone().try_inverse().map(Self)
    }

    /// Lower Cholesky factor of a positive-definite matrix.
    pub fn cholesky(&self) -> Option<Self> {
        self.hermitian_part().0.cholesky().map(|c| Self(c.unpack()))
    }

    /// Conjugates by a retained-index isometry: `V^dagger self V`.
    pub fn compress(&self, v: &ComplexMatrix) -> Self {
        Self(v.0.adjoint() * &self.0 * &v.0)
    }

    /// `V self V^dagger`
    pub fn expand(&self, v: &ComplexMatrix) -> Self {
        Self(&v.0 * &self.0 * v.0.adjoint())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

/// Row-major serialized form: `{rows, cols, re, im}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self.row_major();
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            re: entries.iter().map(|x| x.re).collect(),
            im: entries.iter().map(|x| x.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        if r.re.len() != r.rows * r.cols || r.im.len() != r.re.len() {
            return Err(serde::de::Error::custom("matrix entry count does not match shape"));
        }
        let entries: Vec<C64> = r.re.iter().zip(&r.im).map(|(&a, &b)| c(a, b)).collect();
        Ok(ComplexMatrix::from_row_slice(r.rows, r.cols, &entries))
    }
}

pub(crate) fn ensure_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    m.require_hermitian(tol)
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_is_sorted_and_reconstructs() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[re(2.0), c(0.0, 1.0), c(0.0, -1.0), re(2.0)]);
        let e = m.eigh();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        let back = m.spectral_map(|x| x);
        assert!((&back - &m).max_abs() < 1e-12);
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64 - 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| c((i * j) as f64, 0.5));
        assert!(((&a * &b).trace() - a.trace_product(&b)).norm() < 1e-12);
    }

    #[test]
    fn operator_norm_of_nilpotent() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((m.operator_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn serde_roundtrip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let js = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }
}
