//! Dense row-major complex matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Shorthand for the scalar field.
pub type C64 = Complex64;

/// `C64` from real and imaginary parts.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A dense complex matrix stored row-major.
///
/// Every entry is finite; constructors that accept external data reject
/// NaN and infinities.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major data, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Internal constructor for data produced by arithmetic on finite input.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![C64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// The matrix unit `E_ij` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.data[i * cols + j] = C64::new(1.0, 0.0);
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    /// Builds a matrix from real rows; convenient in tests and tables.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let cl = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, cl, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, z) in diag.iter().enumerate() {
            m.data[i * n + i] = *z;
        }
        m
    }

    /// A column vector.
    pub fn column(v: &[C64]) -> Self {
        Self::from_raw(v.len(), 1, v.to_vec())
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries. This is also the vectorisation used throughout the
    /// crate: `vec(X)[i * cols + j] = X[i][j]`.
    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.cols + j] = z;
    }

    /// Reinterprets a vector as a matrix of the given shape.
    pub fn from_vec(rows: usize, cols: usize, v: &[C64]) -> Self {
        assert_eq!(v.len(), rows * cols, "from_vec: length mismatch");
        Self::from_raw(rows, cols, v.to_vec())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "add_scaled: shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![C64::new(0.0, 0.0); n * m];
        for i in 0..n {
            let row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let orow = &other.data[p * m..(p + 1) * m];
                for (o, b) in row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Self::from_raw(n, m, out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`, with the left factor as the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1) = self.shape();
        let (r2, c2) = other.shape();
        let mut out = Self::zeros(r1 * r2, c1 * c2);
        for i in 0..r1 {
            for j in 0..c1 {
                let a = self.get(i, j);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        out.data[(i * r2 + k) * (c1 * c2) + j * c2 + l] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert-Schmidt inner product `tr(self* other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!(self.shape(), other.shape(), "hs_inner: shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dist: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise distance.
    pub fn max_dist(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_dist: shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `‖X*X − 1‖` and `‖XX* − 1‖`, whichever is larger.
    pub fn unitarity_residual(&self) -> f64 {
        let id = Self::identity(self.rows);
        let a = self.adjoint().matmul(self).dist(&id);
        let b = self.matmul(&self.adjoint()).dist(&id);
        a.max(b)
    }

    /// `XY − YX`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// The flip `σ(ξ ⊗ η) = η ⊗ ξ` from `C^m ⊗ C^n` to `C^n ⊗ C^m`.
    pub fn swap(m: usize, n: usize) -> Self {
        let mut s = Self::zeros(m * n, m * n);
        for a in 0..m {
            for b in 0..n {
                s.data[(b * m + a) * (m * n) + (a * n + b)] = C64::new(1.0, 0.0);
            }
        }
        s
    }

    /// The `(p, q)` block of an operator on `C^m ⊗ C^n`, as an `n × n` matrix,
    /// i.e. `(ω_{q,p} ⊗ id)(X)` for the vector functional on the first leg.
    pub fn block(&self, n: usize, p: usize, q: usize) -> Self {
        Self::from_fn(n, n, |r, s| self.get(p * n + r, q * n + s))
    }

    /// For an operator on `C^m ⊗ C^n`, the `m × m` matrix with entries
    /// `X[(p, r), (q, s)]` for fixed second-leg indices `(r, s)`.
    pub fn right_block(&self, n: usize, r: usize, s: usize) -> Self {
        let m = self.rows / n;
        Self::from_fn(m, m, |p, q| self.get(p * n + r, q * n + s))
    }

    /// Partial trace over the first leg of `C^m ⊗ C^n`.
    pub fn partial_trace_first(&self, m: usize) -> Self {
        let n = self.rows / m;
        let mut out = Self::zeros(n, n);
        for p in 0..m {
            for r in 0..n {
                for s in 0..n {
                    out.data[r * n + s] += self.get(p * n + r, p * n + s);
                }
            }
        }
        out
    }

    /// Partial trace over the second leg of `C^m ⊗ C^n`.
    pub fn partial_trace_second(&self, n: usize) -> Self {
        let m = self.rows / n;
        let mut out = Self::zeros(m, m);
        for p in 0..m {
            for q in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..n {
                    acc += self.get(p * n + r, q * n + r);
                }
                out.data[p * m + q] = acc;
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_dist(&self.adjoint()) <= tol
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        CMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        CMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

/// Serialized form: `{"rows": r, "cols": c, "data": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct CMatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CMatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CMatrixRepr::deserialize(d)?;
        let data = r.data.iter().map(|p| C64::new(p[0], p[1])).collect();
        CMatrix::new(r.rows, r.cols, data).map_err(serde::de::Error::custom)
    }
}

/// Serde helper for `Vec<C64>` as a list of `[re, im]` pairs.
pub mod complex_vec {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        if raw.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(serde::de::Error::custom("non-finite entry"));
        }
        Ok(raw.into_iter().map(|p| C64::new(p[0], p[1])).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(seed: u64, r: usize, cl: usize) -> CMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        CMatrix::from_fn(r, cl, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5;
            c(a, b)
        })
    }

    #[test]
    fn rejects_non_finite_and_bad_shape() {
        assert!(CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(CMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn kron_of_units_is_unit() {
        let a = CMatrix::unit(2, 2, 0, 1);
        let b = CMatrix::unit(3, 3, 2, 0);
        let k = a.kron(&b);
        assert_eq!(k, CMatrix::unit(6, 6, 2, 3));
    }

    #[test]
    fn kron_mixed_product() {
        let (a, b, x, y) = (sample(1, 2, 2), sample(2, 3, 3), sample(3, 2, 2), sample(4, 3, 3));
        let lhs = a.kron(&b).matmul(&x.kron(&y));
        let rhs = a.matmul(&x).kron(&b.matmul(&y));
        assert!(lhs.dist(&rhs) < 1e-13);
    }

    #[test]
    fn swap_exchanges_legs() {
        let (a, b) = (sample(5, 2, 2), sample(6, 3, 3));
        let s = CMatrix::swap(2, 3);
        let lhs = s.matmul(&a.kron(&b)).matmul(&s.adjoint());
        assert!(lhs.dist(&b.kron(&a)) < 1e-14);
    }

    #[test]
    fn partial_traces() {
        let (a, b) = (sample(7, 2, 2), sample(8, 3, 3));
        let k = a.kron(&b);
        assert!(k.partial_trace_first(2).dist(&b.scale(a.trace())) < 1e-13);
        assert!(k.partial_trace_second(3).dist(&a.scale(b.trace())) < 1e-13);
        assert!(k.block(3, 0, 1).dist(&b.scale(a.get(0, 1))) < 1e-14);
        assert!(k.right_block(3, 2, 1).dist(&a.scale(b.get(2, 1))) < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let m = sample(9, 2, 3);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"rows\":2,\"cols\":3,\"data\":[["));
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<CMatrix>("{\"rows\":1,\"cols\":2,\"data\":[[0,0]]}").is_err());
    }
}

/// Serde helper for a single `C64` as `[re, im]`.
pub mod complex_scalar {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let p = <[f64; 2]>::deserialize(d)?;
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(serde::de::Error::custom("non-finite entry"));
        }
        Ok(C64::new(p[0], p[1]))
    }
}
