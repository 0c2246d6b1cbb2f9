//! The crossed product `G ⋉ N = span{α(b_k)(ŷ_j ⊗ 1)}`, its dual action and
//! conditional expectation.
//!
//! Elements are handled through coordinates `t_{kj}` (index `k·d + j`)
//! against the generating family. On it the dual action is
//! `α̂(α(b)(ŷ ⊗ 1)) = (1 ⊗ α(b))(Γ̂op(ŷ) ⊗ 1)` and
//! `E(α(b)(ŷ ⊗ 1)) = φ̂(ŷ) α(b)`.

use std::sync::OnceLock;

use super::Action;
use crate::error::{Error, Result};
use crate::fourier::{theta_l_op_dual, Functional};
use crate::numerics::{c, dense, span, CMatrix, Coordinates, MatSubspace, C64};
use crate::tolerances::{TOL_MEMBER, TOL_RANK};

#[derive(Debug)]
pub struct CrossedProduct {
    action: Action,
    gens: Coordinates,
    space: MatSubspace,
    closure_residual: f64,
    w_tilde: OnceLock<CMatrix>,
}

/// Builds `G ⋉ N` and checks that the generating family is a basis closed
/// under multiplication.
pub fn crossed_product(action: &Action) -> Result<CrossedProduct> {
    let host = action.host();
    let d = host.dim();
    let s = d * action.n();
    let mut gens = Vec::with_capacity(d * action.dim_target());
    for a in action.images() {
        for y in host.dual_side().ops() {
            gens.push(a.matmul(&y.kron(&CMatrix::identity(action.n()))));
        }
    }
    let space = span((s, s), &gens, TOL_RANK)?;
    if space.dim() != gens.len() {
        return Err(Error::Numerical(format!(
            "generators α(b)(ŷ ⊗ 1) span {} dimensions, expected {}",
            space.dim(),
            gens.len()
        )));
    }
    // α(N) and L∞(Ĝ) ⊗ 1 are algebras, so the span is closed once
    // (ŷ ⊗ 1)α(b) lies in it.
    let mut closure: f64 = 0.0;
    for a in action.images() {
        for y in host.dual_side().ops() {
            closure = closure.max(space.rel_residual(&y.kron(&CMatrix::identity(action.n())).matmul(a)));
        }
    }
    if closure > TOL_MEMBER {
        return Err(Error::axiom("crossed product closure", closure));
    }
    Ok(CrossedProduct {
        action: action.clone(),
        gens: Coordinates::new(&gens),
        space,
        closure_residual: closure,
        w_tilde: OnceLock::new(),
    })
}

impl CrossedProduct {
    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    /// Side of the square matrices: `dim ℓ²(G) · n`.
    pub fn size(&self) -> usize {
        self.action.host().dim() * self.action.n()
    }

    /// Orthonormal basis of the crossed product.
    pub fn space(&self) -> &MatSubspace {
        &self.space
    }

    /// `α(b_k)(ŷ_j ⊗ 1)` at index `k·d + j`.
    pub fn generators(&self) -> &[CMatrix] {
        self.gens.family()
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }

    /// Coordinates of `T`, which must lie in the crossed product.
    pub fn coords(&self, t: &CMatrix) -> Result<Vec<C64>> {
        if t.shape() != (self.size(), self.size()) {
            return Err(Error::Shape(format!("operator is {}x{}, expected {2}x{2}", t.rows(), t.cols(), self.size())));
        }
        let r = self.space.rel_residual(t);
        if r > TOL_MEMBER {
            return Err(Error::Input(format!("operator lies outside the crossed product (relative residual {r:.3e})")));
        }
        Ok(self.gens.coords(t))
    }

    pub fn element(&self, coords: &[C64]) -> CMatrix {
        self.gens.combine(coords)
    }

    /// `E(T)` as target coordinates: `Σ_j t_kj φ̂(ŷ_j)`.
    pub fn expectation_coords(&self, t: &[C64]) -> Vec<C64> {
        self.expectation_coords_weighted(t, &self.action.host().dual_side().tensors().haar)
    }

    /// `Σ_j t_kj h_j`, i.e. `E(T(â ⊗ 1))` when `h` is the density `â · φ̂`.
    pub(crate) fn expectation_coords_weighted(&self, t: &[C64], h: &[C64]) -> Vec<C64> {
        let d = self.action.host().dim();
        (0..self.action.dim_target()).map(|k| (0..d).map(|j| t[k * d + j] * h[j]).sum()).collect()
    }

    /// `E = (φ̂ ⊗ id ⊗ id) ∘ α̂`, landing in `α(N)`.
    pub fn cond_expectation(&self, t: &CMatrix) -> Result<CMatrix> {
        let coords = self.coords(t)?;
        Ok(self.action.apply_coords(&self.expectation_coords(&coords)))
    }

    /// `α̂(T) = Σ_q ŷ_q ⊗ T_q`; returns the coordinates of each `T_q`.
    pub fn dual_action_coords(&self, t: &[C64]) -> Vec<Vec<C64>> {
        let host = self.action.host();
        let d = host.dim();
        let m = self.action.dim_target();
        let dc = &host.dual_side().tensors().comult;
        let mut out = vec![vec![c(0.0, 0.0); d * m]; d];
        for k in 0..m {
            for j in 0..d {
                let z = t[k * d + j];
                if z == c(0.0, 0.0) {
                    continue;
                }
                // Γ̂op(ŷ_j) = Σ ĉ_j^{pq} ŷ_q ⊗ ŷ_p.
                for p in 0..d {
                    for (q, row) in out.iter_mut().enumerate() {
                        row[k * d + p] += z * dc.get(p * d + q, j);
                    }
                }
            }
        }
        out
    }

    /// `α̂(T)` as an operator on `ℓ²(G) ⊗ ℓ²(G) ⊗ C^n`.
    pub fn dual_action(&self, t: &CMatrix) -> Result<CMatrix> {
        let coords = self.coords(t)?;
        let ys = self.action.host().dual_side().ops();
        let s = self.size();
        let d = self.action.host().dim();
        let mut out = CMatrix::zeros(d * s, d * s);
        for (y, tq) in ys.iter().zip(self.dual_action_coords(&coords)) {
            out = &out + &y.kron(&self.element(&tq));
        }
        Ok(out)
    }

    /// `W̃₁₂*(1 ⊗ T)W̃₁₂`, an operator route to `α̂(T)`.
    pub fn dual_action_via_w_tilde(&self, t: &CMatrix) -> CMatrix {
        let n = self.action.n();
        let d = self.action.host().dim();
        let w = self.w_tilde.get_or_init(|| self.action.host().w_tilde().kron(&CMatrix::identity(n)));
        w.adjoint().matmul(&CMatrix::identity(d).kron(t)).matmul(w)
    }

    /// The dual action with `f̂ ∈ L¹(Ĝop)` sliced off:
    /// `T · f̂ = (f̂ ⊗ id ⊗ id)α̂(T)`.
    pub fn module_action(&self, t: &CMatrix, fhat: &Functional) -> Result<CMatrix> {
        fhat.check_host(self.action.host().dual_side())?;
        let coords = self.coords(t)?;
        let mut out = vec![c(0.0, 0.0); coords.len()];
        for (tq, f) in self.dual_action_coords(&coords).iter().zip(fhat.coords()) {
            for (o, z) in out.iter_mut().zip(tq) {
                *o += f * z;
            }
        }
        Ok(self.element(&out))
    }

    /// `(Θ̂ℓop(f̂) ⊗ id)(T)`, applied to the `ℓ²(G)` leg.
    pub fn module_action_via_theta(&self, t: &CMatrix, fhat: &Functional) -> Result<CMatrix> {
        let map = theta_l_op_dual(self.action.host(), fhat)?;
        Ok(apply_first_leg(&map, t, self.action.n()))
    }

    /// `α(N)` inside the crossed product.
    pub fn alpha_image(&self) -> Result<MatSubspace> {
        self.action.image_space()
    }

    /// Fixed points of `α̂`: the kernel of `α̂ − 1 ⊗ ·` on coordinates.
    pub fn dual_fixed_points(&self) -> Result<MatSubspace> {
        let host = self.action.host();
        let d = host.dim();
        let m = self.action.dim_target();
        let unit = host.dual_side().unit();
        let dm = d * m;
        let mut a = CMatrix::zeros(d * dm, dm);
        for col in 0..dm {
            let mut e = vec![c(0.0, 0.0); dm];
            e[col] = c(1.0, 0.0);
            for (q, tq) in self.dual_action_coords(&e).iter().enumerate() {
                for (r, z) in tq.iter().enumerate() {
                    a.set(q * dm + r, col, *z - unit[q] * e[r]);
                }
            }
        }
        let ker = dense::nullspace_abs(&a, TOL_RANK * (1.0 + a.max_abs()));
        let elems: Vec<CMatrix> =
            (0..ker.cols()).map(|t| self.element(&(0..dm).map(|r| ker.get(r, t)).collect::<Vec<_>>())).collect();
        span((self.size(), self.size()), &elems, TOL_RANK)
    }

    /// `ω_{T,Φ}(v̂) = ⟨(Θ̂ℓop(v̂) ⊗ id)(T), Φ⟩` with the bilinear pairing
    /// `⟨X, Φ⟩ = Σ X_ab Φ_ab`.
    pub fn multiplier_pairing(&self, t: &CMatrix, phi: &CMatrix, vhat: &Functional) -> Result<C64> {
        if phi.shape() != t.shape() {
            return Err(Error::Shape("functional and operator differ in shape".into()));
        }
        let x = self.module_action(t, vhat)?;
        Ok(x.data().iter().zip(phi.data()).map(|(a, b)| a * b).sum())
    }
}

/// `(M ⊗ id)(T)` for a map `M` on `d × d` matrices and `T` on `C^d ⊗ C^n`.
pub fn apply_first_leg(map: &CMatrix, t: &CMatrix, n: usize) -> CMatrix {
    let d = t.rows() / n;
    let mut out = CMatrix::zeros(t.rows(), t.cols());
    for r in 0..n {
        for s in 0..n {
            let x = t.right_block(n, r, s);
            let y = map.apply(x.data());
            for p in 0..d {
                for q in 0..d {
                    out.set(p * n + r, q * n + s, y[p * d + q]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{bundled, canonical_action, ActionKind, BUNDLED};
    use super::*;
    use crate::fourier::theta_r;
    use crate::groups::FiniteGroup;
    use crate::numerics::generated_algebra;
    use crate::qg::FiniteQuantumGroup;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_element(cp: &CrossedProduct, rng: &mut ChaCha8Rng) -> CMatrix {
        let coords: Vec<C64> = (0..cp.dim()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        cp.element(&coords)
    }

    fn all() -> Vec<CrossedProduct> {
        BUNDLED.iter().map(|n| crossed_product(&bundled(n).unwrap()).unwrap()).collect()
    }

    #[test]
    fn dimensions_of_the_bundled_crossed_products() {
        let dims: Vec<usize> = all().iter().map(|cp| cp.dim()).collect();
        // L∞(Ĝ) ⊗ M_2; B(ℓ²(s3)) twice; L∞(Ĝ) for Z/4.
        assert_eq!(dims, vec![24, 36, 36, 4]);
    }

    #[test]
    fn span_is_the_generated_algebra() {
        for name in ["trivial-m2", "c4-trivial-c", "translation-s3"] {
            let cp = crossed_product(&bundled(name).unwrap()).unwrap();
            let a = cp.action();
            let id = CMatrix::identity(a.n());
            let mut gens = a.images().to_vec();
            gens.extend(a.host().dual_side().ops().iter().map(|y| y.kron(&id)));
            let alg = generated_algebra((cp.size(), cp.size()), &gens, true).unwrap();
            assert!(alg.equals(cp.space(), 1e-9).unwrap(), "{name}");
        }
    }

    #[test]
    fn canonical_crossed_product_is_the_image_of_the_extended_comultiplication() {
        let g = FiniteGroup::builtin("s3").unwrap();
        for side in ["function", "group"] {
            let q = Arc::new(FiniteQuantumGroup::from_group_side(&g, side).unwrap());
            let cp = crossed_product(&canonical_action(q.clone(), ActionKind::VonNeumann).unwrap()).unwrap();
            let d = q.dim();
            let imgs: Vec<CMatrix> =
                (0..d * d).map(|k| q.conj_v(&CMatrix::unit(d, d, k / d, k % d))).collect();
            let gamma_r = span((d * d, d * d), &imgs, 1e-10).unwrap();
            assert!(gamma_r.equals(cp.space(), 1e-9).unwrap());
        }
    }

    #[test]
    fn expectation_fixes_alpha_n_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for cp in all() {
            for img in cp.action().images() {
                assert!(cp.cond_expectation(img).unwrap().dist(img) < 1e-10);
            }
            let t = random_element(&cp, &mut rng);
            let e = cp.cond_expectation(&t).unwrap();
            assert!(cp.cond_expectation(&e).unwrap().dist(&e) < 1e-10);
            assert!(cp.alpha_image().unwrap().contains_matrix(&e, 1e-10));
            let one = CMatrix::identity(cp.size());
            assert!(cp.cond_expectation(&one).unwrap().dist(&one) < 1e-10);
        }
    }

    #[test]
    fn expectation_kills_nontrivial_coefficients() {
        for cp in all() {
            let q = cp.action().host();
            let id = CMatrix::identity(cp.action().n());
            for u in q.irreps().iter().filter(|u| !u.is_trivial()) {
                for i in 0..u.dim() {
                    for j in 0..u.dim() {
                        for img in cp.action().images() {
                            let t = img.matmul(&u.coeff(i, j).kron(&id));
                            assert!(cp.cond_expectation(&t).unwrap().norm() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn expectation_on_translations_of_z4_is_the_value_at_zero() {
        let cp = crossed_product(&bundled("c4-trivial-c").unwrap()).unwrap();
        let q = cp.action().host();
        for s in 0..4 {
            let lam = q.lambda(Functional::coordinate(q.primal(), s).coords());
            let e = cp.cond_expectation(&lam).unwrap();
            let expect = if s == 0 { 1.0 } else { 0.0 };
            assert!(e.dist(&CMatrix::identity(4).scale_re(expect)) < 1e-10);
        }
    }

    #[test]
    fn expectation_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for cp in all() {
            for _ in 0..50 {
                let t = random_element(&cp, &mut rng);
                let e = cp.cond_expectation(&t.adjoint().matmul(&t)).unwrap();
                let (vals, _) = dense::eigh(&e);
                assert!(vals[0] >= -1e-10);
            }
        }
    }

    #[test]
    fn operators_outside_the_span_are_rejected() {
        let cp = crossed_product(&bundled("trivial-m2").unwrap()).unwrap();
        let q = cp.action().host();
        // ℓ∞(G) ⊗ 1 is not in L∞(Ĝ) ⊗ M_2 unless it is scalar.
        let x = q.primal().ops()[1].kron(&CMatrix::identity(2));
        assert!(matches!(cp.coords(&x), Err(Error::Input(_))));
    }

    #[test]
    fn dual_action_matches_the_w_tilde_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for cp in all() {
            for _ in 0..3 {
                let t = random_element(&cp, &mut rng);
                let a = cp.dual_action(&t).unwrap();
                let b = cp.dual_action_via_w_tilde(&t);
                assert!(a.dist(&b) < 1e-9 * (1.0 + t.norm()), "{}", cp.action().label());
            }
        }
    }

    #[test]
    fn module_action_matches_theta_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for cp in all() {
            let dual = cp.action().host().dual_side();
            let eps = Functional::counit(dual);
            for _ in 0..5 {
                let t = random_element(&cp, &mut rng);
                assert!(cp.module_action(&t, &eps).unwrap().dist(&t) < 1e-10);
                let f = Functional::random(dual, &mut rng);
                let a = cp.module_action(&t, &f).unwrap();
                let b = cp.module_action_via_theta(&t, &f).unwrap();
                assert!(a.dist(&b) < 1e-9, "{}", cp.action().label());
            }
        }
    }

    #[test]
    fn module_action_on_a_one_dimensional_coefficient() {
        // For 1-dim β, Γ̂op(û) = û ⊗ û, so (α(x)(û ⊗ 1)) · f̂ = ⟨f̂, û⟩ α(x)(û ⊗ 1).
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let cp = crossed_product(&bundled("dual-s3-canonical").unwrap()).unwrap();
        let q = cp.action().host();
        let f = Functional::random(q.dual_side(), &mut rng);
        for u in q.irreps().iter().filter(|u| u.dim() == 1) {
            for img in cp.action().images() {
                let t = img.matmul(&u.coeff(0, 0).kron(&CMatrix::identity(cp.action().n())));
                let scaled = t.scale(f.pair(u.coeff_coords(0, 0)));
                assert!(cp.module_action(&t, &f).unwrap().dist(&scaled) < 1e-10);
            }
        }
    }

    #[test]
    fn fixed_points_of_the_dual_action_are_alpha_n() {
        for cp in all() {
            let fp = cp.dual_fixed_points().unwrap();
            assert!(fp.equals(&cp.alpha_image().unwrap(), 1e-9).unwrap(), "{}", cp.action().label());
        }
    }

    #[test]
    fn expectation_commutes_with_theta_r_in_the_canonical_case() {
        // Transport Θr(f) through the identification B(ℓ²) ≅ G ⋉ ℓ∞(G).
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let g = FiniteGroup::builtin("s3").unwrap();
        for side in ["function", "group"] {
            let q = Arc::new(FiniteQuantumGroup::from_group_side(&g, side).unwrap());
            let cp = crossed_product(&canonical_action(q.clone(), ActionKind::VonNeumann).unwrap()).unwrap();
            let d = q.dim();
            for k in 0..d {
                let th = theta_r(&q, &Functional::coordinate(q.primal(), k)).unwrap();
                for _ in 0..3 {
                    let x = CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                    let tx = crate::fourier::apply_map(&th, &x);
                    let lhs = cp.cond_expectation(&q.conj_v(&tx)).unwrap();
                    let e = cp.cond_expectation(&q.conj_v(&x)).unwrap();
                    // E(T) ∈ α(ℓ∞) = Γ^r(ℓ∞); pull back, apply Θr(f), push forward.
                    let back = pull_back(&q, &e);
                    let rhs = q.conj_v(&crate::fourier::apply_map(&th, &back));
                    assert!(lhs.dist(&rhs) < 1e-9);
                }
            }
        }
    }

    /// `(id ⊗ ε)Γ(y) = y` for `y ∈ L∞(G)`.
    fn pull_back(q: &FiniteQuantumGroup, t: &CMatrix) -> CMatrix {
        q.primal().slice_second(t, &q.primal().tensors().counit)
    }

    #[test]
    fn multiplier_pairing_is_linear_and_unital() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for cp in all() {
            let dual = cp.action().host().dual_side();
            let t = random_element(&cp, &mut rng);
            let s = cp.size();
            let phi = CMatrix::from_fn(s, s, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let direct: C64 = t.data().iter().zip(phi.data()).map(|(a, b)| a * b).sum();
            let at_eps = cp.multiplier_pairing(&t, &phi, &Functional::counit(dual)).unwrap();
            assert!((at_eps - direct).norm() < 1e-10);
            let (v, w) = (Functional::random(dual, &mut rng), Functional::random(dual, &mut rng));
            let z = c(0.3, -1.2);
            let lhs = cp.multiplier_pairing(&t, &phi, &v.add(&w.scale(z)).unwrap()).unwrap();
            let rhs = cp.multiplier_pairing(&t, &phi, &v).unwrap() + z * cp.multiplier_pairing(&t, &phi, &w).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
        }
    }
}
