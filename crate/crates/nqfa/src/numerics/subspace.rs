//! Subspaces of matrix spaces with orthonormal bases under `⟨A, B⟩ = tr(A* B)`.

use super::cmatrix::{CMatrix, C64};
use super::dense;
use crate::error::{Error, Result};
use crate::tolerances::{TOL_ORTHO, TOL_RANK, TOL_ZERO};

/// A subspace of `M_{rows × cols}(C)` with an orthonormal basis.
#[derive(Clone, Debug)]
pub struct MatSubspace {
    rows: usize,
    cols: usize,
    basis: Vec<CMatrix>,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Incremental orthonormalisation with SVD rank decisions.
///
/// Candidates are first reduced against the current basis; the surviving
/// residuals of a batch are then ranked by their singular values.
struct Orthonormalizer {
    len: usize,
    tol: f64,
    basis: Vec<Vec<C64>>,
}

const BATCH: usize = 256;

impl Orthonormalizer {
    fn new(len: usize, tol: f64) -> Self {
        Self { len, tol, basis: Vec::new() }
    }

    fn reduce(&self, v: &mut [C64]) {
        // Two passes of classical Gram-Schmidt keep the basis orthonormal to
        // working precision.
        for _ in 0..2 {
            for q in &self.basis {
                let p = dot(q, v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
    }

    fn add_batch(&mut self, cands: &[Vec<C64>]) {
        let mut survivors: Vec<Vec<C64>> = Vec::new();
        for c in cands {
            let n = vnorm(c);
            if n == 0.0 {
                continue;
            }
            let mut r: Vec<C64> = c.iter().map(|z| z / n).collect();
            self.reduce(&mut r);
            let rn = vnorm(&r);
            if rn > self.tol {
                survivors.push(r.iter().map(|z| z / rn).collect());
            }
        }
        if survivors.is_empty() {
            return;
        }
        let k = survivors.len();
        let m = CMatrix::from_fn(self.len, k, |i, j| survivors[j][i]);
        let dec = dense::svd(&m);
        let smax = dec.sigma.first().copied().unwrap_or(0.0);
        for t in 0..dec.sigma.len() {
            if dec.sigma[t] <= self.tol * smax {
                break;
            }
            let mut v: Vec<C64> = (0..self.len).map(|i| dec.u.get(i, t)).collect();
            self.reduce(&mut v);
            let n = vnorm(&v);
            if n > 0.5 {
                self.basis.push(v.iter().map(|z| z / n).collect());
            }
        }
    }

    fn add_all(&mut self, cands: Vec<Vec<C64>>) {
        // Drop entries that are rounding noise relative to the largest input.
        let maxn = cands.iter().map(|c| vnorm(c)).fold(0.0, f64::max);
        if maxn == 0.0 {
            return;
        }
        let kept: Vec<Vec<C64>> =
            cands.into_iter().filter(|c| vnorm(c) > TOL_ZERO * maxn).collect();
        for chunk in kept.chunks(BATCH) {
            self.add_batch(chunk);
        }
    }
}

impl MatSubspace {
    /// The zero subspace.
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, basis: Vec::new() }
    }

    /// The whole space, with the matrix-unit basis.
    pub fn full(rows: usize, cols: usize) -> Self {
        let basis = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| CMatrix::unit(rows, cols, i, j))
            .collect();
        Self { rows, cols, basis }
    }

    /// Wraps a basis assumed orthonormal; used when it was just produced by an
    /// orthonormalisation.
    fn from_orthonormal(rows: usize, cols: usize, vecs: Vec<Vec<C64>>) -> Self {
        let basis = vecs.into_iter().map(|v| CMatrix::from_raw(rows, cols, v)).collect();
        Self { rows, cols, basis }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Coordinates `⟨b_i, x⟩` against the orthonormal basis.
    pub fn coords(&self, x: &CMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| b.hs_inner(x)).collect()
    }

    pub fn from_coords(&self, coords: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for (b, z) in self.basis.iter().zip(coords) {
            out.add_scaled(*z, b);
        }
        out
    }

    pub fn project(&self, x: &CMatrix) -> CMatrix {
        self.from_coords(&self.coords(x))
    }

    /// `‖x − P x‖`.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        assert_eq!(x.shape(), self.shape(), "residual: shape mismatch");
        x.dist(&self.project(x))
    }

    /// `‖x − P x‖ / ‖x‖`, zero for `x = 0`.
    pub fn rel_residual(&self, x: &CMatrix) -> f64 {
        let n = x.norm();
        if n == 0.0 {
            0.0
        } else {
            self.residual(x) / n
        }
    }

    pub fn contains_matrix(&self, x: &CMatrix, tol: f64) -> bool {
        self.rel_residual(x) <= tol
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "subspaces of {}x{} and {}x{} matrices",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Largest residual of a basis vector of `other` projected onto `self`.
    pub fn containment_residual(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(other.basis.iter().map(|b| self.residual(b)).fold(0.0, f64::max))
    }

    /// `other ⊆ self` up to `tol`.
    pub fn contains(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.containment_residual(other)? <= tol)
    }

    /// Two-sided containment residual.
    pub fn equality_residual(&self, other: &Self) -> Result<f64> {
        Ok(self.containment_residual(other)?.max(other.containment_residual(self)?))
    }

    pub fn equals(&self, other: &Self, tol: f64) -> Result<bool> {
        let r = self.equality_residual(other)?;
        Ok(self.dim() == other.dim() && r <= tol)
    }

    /// `self + other`.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        span((self.rows, self.cols), &all, TOL_RANK)
    }

    /// `self ∩ other`, from the kernel of `[Q₁ | −Q₂]`.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let (k, m) = (self.dim(), other.dim());
        if k == 0 || m == 0 {
            return Ok(Self::zero(self.rows, self.cols));
        }
        let len = self.ambient_dim();
        let a = CMatrix::from_fn(len, k + m, |i, j| {
            if j < k {
                self.basis[j].data()[i]
            } else {
                -other.basis[j - k].data()[i]
            }
        });
        let ker = dense::nullspace(&a, TOL_RANK);
        let vecs: Vec<CMatrix> = (0..ker.cols())
            .map(|t| {
                let coeffs: Vec<C64> = (0..k).map(|j| ker.get(j, t)).collect();
                self.from_coords(&coeffs)
            })
            .collect();
        span((self.rows, self.cols), &vecs, TOL_RANK)
    }

    /// Orthogonal complement in the ambient matrix space.
    pub fn complement(&self) -> Self {
        let len = self.ambient_dim();
        if self.dim() == 0 {
            return Self::full(self.rows, self.cols);
        }
        let q = CMatrix::from_fn(self.dim(), len, |i, j| self.basis[i].data()[j].conj());
        let ker = dense::nullspace(&q, TOL_RANK);
        let vecs = (0..ker.cols()).map(|t| (0..len).map(|i| ker.get(i, t)).collect()).collect();
        Self::from_orthonormal(self.rows, self.cols, vecs)
    }

    /// Image under a linear map, re-orthonormalised.
    pub fn map(&self, shape: (usize, usize), f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let imgs: Vec<CMatrix> = self.basis.iter().map(f).collect();
        span(shape, &imgs, TOL_RANK)
    }

    /// Largest deviation from orthonormality of the stored basis.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.hs_inner(b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Orthonormal basis of `span(mats)`. Rank is decided by singular values with
/// threshold `tol · σ_max` after unit-normalising the inputs.
pub fn span(shape: (usize, usize), mats: &[CMatrix], tol: f64) -> Result<MatSubspace> {
    let (rows, cols) = shape;
    if let Some(bad) = mats.iter().find(|m| m.shape() != shape) {
        return Err(Error::Shape(format!(
            "span: expected {rows}x{cols} matrices, got {}x{}",
            bad.rows(),
            bad.cols()
        )));
    }
    let mut orth = Orthonormalizer::new(rows * cols, tol);
    orth.add_all(mats.iter().map(|m| m.data().to_vec()).collect());
    Ok(MatSubspace::from_orthonormal(rows, cols, orth.basis))
}

/// `U = V` up to `tol` (mutual projection residuals).
pub fn subspace_equal(u: &MatSubspace, v: &MatSubspace, tol: f64) -> Result<bool> {
    u.equals(v, tol)
}

/// `V ⊆ U` up to `tol`.
pub fn subspace_contains(u: &MatSubspace, v: &MatSubspace, tol: f64) -> Result<bool> {
    u.contains(v, tol)
}

/// The (unital, if requested) algebra generated by `gens`: alternately span
/// and multiply until the dimension stabilises.
pub fn generated_algebra(shape: (usize, usize), gens: &[CMatrix], unital: bool) -> Result<MatSubspace> {
    if shape.0 != shape.1 {
        return Err(Error::Shape("generated_algebra needs square matrices".into()));
    }
    let mut seed = gens.to_vec();
    if unital {
        seed.push(CMatrix::identity(shape.0));
    }
    let mut orth = Orthonormalizer::new(shape.0 * shape.1, TOL_RANK);
    orth.add_all(seed.iter().map(|m| m.data().to_vec()).collect());
    // Products involving at least one element added in the previous round.
    let mut fresh_from = 0;
    loop {
        let before = orth.basis.len();
        let mats: Vec<CMatrix> =
            orth.basis.iter().map(|v| CMatrix::from_raw(shape.0, shape.1, v.clone())).collect();
        let mut cands = Vec::new();
        for (i, a) in mats.iter().enumerate() {
            for (j, b) in mats.iter().enumerate() {
                if i >= fresh_from || j >= fresh_from {
                    cands.push(a.matmul(b).into_data());
                }
            }
        }
        orth.add_all(cands);
        if orth.basis.len() == before {
            break;
        }
        fresh_from = before;
    }
    Ok(MatSubspace::from_orthonormal(shape.0, shape.1, orth.basis))
}

/// `{x : A x = 0 for every A in ops}`, where each operator acts on the
/// row-major vectorisation of `x`. No operators gives the whole space.
pub fn common_nullspace(shape: (usize, usize), ops: &[CMatrix], tol: f64) -> Result<MatSubspace> {
    let len = shape.0 * shape.1;
    if ops.is_empty() {
        return Ok(MatSubspace::full(shape.0, shape.1));
    }
    if let Some(bad) = ops.iter().find(|a| a.cols() != len) {
        return Err(Error::Shape(format!(
            "common_nullspace: operator acts on dimension {}, expected {len}",
            bad.cols()
        )));
    }
    let total_rows: usize = ops.iter().map(|a| a.rows()).sum();
    let mut data = Vec::with_capacity(total_rows * len);
    for a in ops {
        data.extend_from_slice(a.data());
    }
    let stacked = CMatrix::from_raw(total_rows, len, data);
    let ker = dense::nullspace_scaled(&stacked, tol);
    let vecs = (0..ker.cols()).map(|t| (0..len).map(|i| ker.get(i, t)).collect()).collect();
    Ok(MatSubspace::from_orthonormal(shape.0, shape.1, vecs))
}

/// Default-tolerance wrapper used where `TOL_ORTHO` is the contract.
pub fn equal_default(u: &MatSubspace, v: &MatSubspace) -> Result<bool> {
    u.equals(v, TOL_ORTHO)
}
