//! Complex matrices, subspaces of matrix spaces and the decompositions the
//! rest of the crate is built on.

mod cmatrix;
pub mod dense;
mod subspace;

pub use cmatrix::{c, complex_scalar, complex_vec, CMatrix, C64};
pub use subspace::{
    common_nullspace, equal_default, generated_algebra, span, subspace_contains, subspace_equal,
    MatSubspace,
};

/// Solves for the coordinates of matrices in a fixed, possibly
/// non-orthogonal, family of matrices.
#[derive(Clone, Debug)]
pub struct Coordinates {
    shape: (usize, usize),
    family: Vec<CMatrix>,
    pinv: CMatrix,
}

impl Coordinates {
    /// Precomputes the pseudo-inverse of the vectorised family.
    pub fn new(family: &[CMatrix]) -> Self {
        let shape = family.first().map_or((0, 0), |m| m.shape());
        let len = shape.0 * shape.1;
        let a = CMatrix::from_fn(len, family.len(), |i, j| family[j].data()[i]);
        Self { shape, family: family.to_vec(), pinv: dense::pinv(&a, 1e-12) }
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn family(&self) -> &[CMatrix] {
        &self.family
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Least-squares coordinates of `x`.
    pub fn coords(&self, x: &CMatrix) -> Vec<C64> {
        self.pinv.apply(x.data())
    }

    pub fn combine(&self, coords: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.shape.0, self.shape.1);
        for (m, z) in self.family.iter().zip(coords) {
            out.add_scaled(*z, m);
        }
        out
    }

    /// Coordinates together with the reconstruction residual `‖x − Σ cᵢ mᵢ‖`.
    pub fn coords_checked(&self, x: &CMatrix) -> (Vec<C64>, f64) {
        let c = self.coords(x);
        let r = self.combine(&c).dist(x);
        (c, r)
    }

    /// Splits an operator on `C^m ⊗ C^n` whose first leg lies in the span of
    /// the family (`m × m` matrices) as `Σᵢ familyᵢ ⊗ Yᵢ`, returning the `Yᵢ`.
    pub fn split_first_leg(&self, x: &CMatrix) -> Vec<CMatrix> {
        let m = self.shape.0;
        let n = x.rows() / m;
        let k = self.family.len();
        let mut out = vec![CMatrix::zeros(n, n); k];
        for r in 0..n {
            for s in 0..n {
                let c = self.coords(&x.right_block(n, r, s));
                for (i, z) in c.into_iter().enumerate() {
                    out[i].set(r, s, z);
                }
            }
        }
        out
    }

    /// Splits an operator on `C^m ⊗ C^n` whose second leg lies in the span
    /// of the family (`n × n` matrices) as `Σᵢ Xᵢ ⊗ familyᵢ`.
    pub fn split_second_leg(&self, x: &CMatrix) -> Vec<CMatrix> {
        let n = self.shape.0;
        let m = x.rows() / n;
        let k = self.family.len();
        let mut out = vec![CMatrix::zeros(m, m); k];
        for p in 0..m {
            for q in 0..m {
                let c = self.coords(&x.block(n, p, q));
                for (i, z) in c.into_iter().enumerate() {
                    out[i].set(p, q, z);
                }
            }
        }
        out
    }
}
