//! The convolution algebras `L¹(G)` and `L¹(Ĝ)`, the regular
//! representations, the maps `Θℓ`, `Θr`, `Θ̂ℓop` on `B(ℓ²(G))`, characters
//! and coefficient expansions.
//!
//! Functionals are coordinate vectors against the basis of the algebra they
//! pair with: `⟨f, x⟩ = Σ_k f_k x_k`.

mod expansion;
mod theta;

pub use expansion::{characters, coeff_expansion, reconstruct, Characters, CoeffTable, Coefficient};
pub use theta::{apply_map, theta_l, theta_l_op_dual, theta_l_op_dual_via_w_tilde, theta_r};

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{c, CMatrix, C64};
use crate::qg::{FiniteQuantumGroup, HopfSide};

/// A normal functional on one side of a finite quantum group.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    key: u64,
    coords: Vec<C64>,
}

impl Functional {
    pub fn new(side: &HopfSide, coords: Vec<C64>) -> Result<Self> {
        if coords.len() != side.dim() {
            return Err(Error::Shape(format!(
                "functional with {} coordinates on an algebra of dimension {}",
                coords.len(),
                side.dim()
            )));
        }
        Ok(Self { key: side.key(), coords })
    }

    /// The counit `ε`, unit of the convolution algebra.
    pub fn counit(side: &HopfSide) -> Self {
        Self { key: side.key(), coords: side.tensors().counit.clone() }
    }

    /// The Haar state.
    pub fn haar(side: &HopfSide) -> Self {
        Self { key: side.key(), coords: side.tensors().haar.clone() }
    }

    /// The `k`-th coordinate functional.
    pub fn coordinate(side: &HopfSide, k: usize) -> Self {
        let mut coords = vec![c(0.0, 0.0); side.dim()];
        coords[k] = c(1.0, 0.0);
        Self { key: side.key(), coords }
    }

    /// `a·φ`, i.e. `y ↦ φ(y a)`, for `a` given by coordinates.
    pub fn density(side: &HopfSide, a: &[C64]) -> Self {
        let t = side.tensors();
        let d = side.dim();
        let coords = (0..d)
            .map(|k| {
                let mut e = vec![c(0.0, 0.0); d];
                e[k] = c(1.0, 0.0);
                t.haar_of(&t.mul(&e, a))
            })
            .collect();
        Self { key: side.key(), coords }
    }

    /// Entries uniform in the unit square, seeded by the caller's generator.
    pub fn random(side: &HopfSide, rng: &mut impl Rng) -> Self {
        let coords = (0..side.dim()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        Self { key: side.key(), coords }
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `⟨f, x⟩` for `x` in coordinates.
    pub fn pair(&self, x: &[C64]) -> C64 {
        self.coords.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `⟨f, x⟩` for an operator `x` of the algebra.
    pub fn pair_op(&self, side: &HopfSide, x: &CMatrix) -> C64 {
        self.pair(&side.coords_of(x).0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { key: self.key, coords: self.coords.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_host(self, other)?;
        Ok(Self { key: self.key, coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn check_host(&self, side: &HopfSide) -> Result<()> {
        if self.key != side.key() {
            return Err(Error::Input("functional belongs to a different algebra".into()));
        }
        Ok(())
    }
}

fn same_host(f: &Functional, g: &Functional) -> Result<()> {
    if f.key != g.key {
        return Err(Error::Input("functionals belong to different algebras".into()));
    }
    Ok(())
}

/// `f ⋆ g = (f ⊗ g) ∘ Γ`.
pub fn convolve(side: &HopfSide, f: &Functional, g: &Functional) -> Result<Functional> {
    f.check_host(side)?;
    g.check_host(side)?;
    let t = side.tensors();
    let d = side.dim();
    let mut out = vec![c(0.0, 0.0); d];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..d {
            if f.coords[i] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                *o += t.comult.get(i * d + j, k) * f.coords[i] * g.coords[j];
            }
        }
    }
    Ok(Functional { key: f.key, coords: out })
}

/// `λ(f) = (f ⊗ id)(W)`.
pub fn lambda_rep(q: &FiniteQuantumGroup, f: &Functional) -> Result<CMatrix> {
    f.check_host(q.primal())?;
    Ok(q.lambda(f.coords()))
}

/// `ρ(f) = (id ⊗ f)(V)`.
pub fn rho_rep(q: &FiniteQuantumGroup, f: &Functional) -> Result<CMatrix> {
    f.check_host(q.primal())?;
    Ok(q.rho(f.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn host(name: &str, side: &str) -> (FiniteGroup, FiniteQuantumGroup) {
        let g = FiniteGroup::builtin(name).unwrap();
        let q = FiniteQuantumGroup::from_group_side(&g, side).unwrap();
        (g, q)
    }

    #[test]
    fn counit_is_the_unit_of_convolution() {
        let (_, q) = host("s3", "group");
        let side = q.primal();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = Functional::random(side, &mut rng);
        let e = Functional::counit(side);
        assert!(convolve(side, &e, &f).unwrap().dist(&f) < 1e-14);
        assert!(convolve(side, &f, &e).unwrap().dist(&f) < 1e-14);
    }

    #[test]
    fn point_masses_convolve_by_the_group_law() {
        let (g, q) = host("s3", "function");
        let side = q.primal();
        for a in 0..g.order() {
            for b in 0..g.order() {
                let h = convolve(side, &Functional::coordinate(side, a), &Functional::coordinate(side, b)).unwrap();
                assert!(h.dist(&Functional::coordinate(side, g.mul(a, b))) < 1e-14);
            }
        }
    }

    #[test]
    fn group_algebra_functionals_multiply_pointwise() {
        let (_, q) = host("d4", "group");
        let side = q.primal();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Functional::random(side, &mut rng);
        let g = Functional::random(side, &mut rng);
        let h = convolve(side, &f, &g).unwrap();
        for k in 0..side.dim() {
            assert!((h.coords()[k] - f.coords()[k] * g.coords()[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn functionals_from_another_host_are_rejected() {
        let (_, q1) = host("c2", "function");
        let (_, q2) = host("c2", "function");
        let f = Functional::counit(q1.primal());
        assert!(convolve(q2.primal(), &f, &f).is_err());
        assert!(lambda_rep(&q2, &f).is_err());
    }

    #[test]
    fn lambda_of_counit_is_identity_and_shift_on_z2() {
        let (_, q) = host("c2", "function");
        let side = q.primal();
        assert!(lambda_rep(&q, &Functional::counit(side)).unwrap().dist(&CMatrix::identity(2)) < 1e-14);
        let shift = lambda_rep(&q, &Functional::coordinate(side, 1)).unwrap();
        assert!(shift.dist(&CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])) < 1e-14);
    }

    #[test]
    fn regular_representations_are_homomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, s) in [("s3", "function"), ("s3", "group"), ("q8", "group")] {
            let (_, q) = host(n, s);
            let side = q.primal();
            for _ in 0..20 {
                let f = Functional::random(side, &mut rng);
                let g = Functional::random(side, &mut rng);
                let fg = convolve(side, &f, &g).unwrap();
                let l = lambda_rep(&q, &fg).unwrap();
                assert!(l.dist(&lambda_rep(&q, &f).unwrap().matmul(&lambda_rep(&q, &g).unwrap())) < 1e-10);
                let r = rho_rep(&q, &fg).unwrap();
                assert!(r.dist(&rho_rep(&q, &f).unwrap().matmul(&rho_rep(&q, &g).unwrap())) < 1e-10);
            }
        }
    }

    #[test]
    fn lambda_is_injective() {
        for (n, s) in [("s3", "function"), ("s3", "group"), ("c4", "function")] {
            let (_, q) = host(n, s);
            let side = q.primal();
            let images: Vec<CMatrix> =
                (0..side.dim()).map(|k| lambda_rep(&q, &Functional::coordinate(side, k)).unwrap()).collect();
            let sp = crate::numerics::span((q.dim(), q.dim()), &images, 1e-10).unwrap();
            assert_eq!(sp.dim(), side.dim());
        }
    }

    #[test]
    fn density_pairs_through_haar() {
        let (_, q) = host("s3", "group");
        let side = q.primal();
        let t = side.tensors();
        let a: Vec<C64> = (0..6).map(|k| c(k as f64, 1.0 - k as f64)).collect();
        let y: Vec<C64> = (0..6).map(|k| c(0.5 * k as f64, 2.0)).collect();
        let f = Functional::density(side, &a);
        assert!((f.pair(&y) - t.haar_of(&t.mul(&y, &a))).norm() < 1e-12);
    }
}
