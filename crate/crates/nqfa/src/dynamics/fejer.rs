//! Fejér representations of crossed-product elements and the spectral
//! projections onto the bands of the dual irreducibles.

use serde::Serialize;

use super::CrossedProduct;
use crate::error::{Error, Result};
use crate::fourier::{characters, coeff_expansion, Functional};
use crate::numerics::{c, CMatrix, C64};

/// Output of a Fejér reconstruction and its distance `‖out − T‖_F`.
#[derive(Clone, Debug, Serialize)]
pub struct FejerReport {
    pub output: CMatrix,
    pub residual: f64,
}

/// `Σ_{β∈F} Σ_{i,j,k} (d_β / λ_i) ⟨f̂, û_ji⟩ E(T(û_ki* ⊗ 1))(û_kj ⊗ 1)`,
/// without checking that `F` carries the coefficients of `f̂`.
pub fn fejer_partial(cp: &CrossedProduct, t: &CMatrix, fhat: &Functional, irreps: &[usize]) -> Result<CMatrix> {
    let q = cp.action().host();
    let dual = q.dual_side();
    fhat.check_host(dual)?;
    let coords = cp.coords(t)?;
    let d = q.dim();
    let m = cp.action().dim_target();
    let mut out = vec![c(0.0, 0.0); d * m];
    for &beta in irreps {
        let u = q.irreps().get(beta).ok_or_else(|| Error::Input(format!("no dual irreducible with index {beta}")))?;
        let nb = u.dim();
        for i in 0..nb {
            for k in 0..nb {
                // E(T(û_ki* ⊗ 1)) through the density of û_ki*.
                let h = Functional::density(dual, &dual.tensors().star_of(u.coeff_coords(k, i)));
                let e = cp.expectation_coords_weighted(&coords, h.coords());
                for j in 0..nb {
                    let w = fhat.pair(u.coeff_coords(j, i)) * (u.qdim() / u.f_eigs()[i]);
                    if w == c(0.0, 0.0) {
                        continue;
                    }
                    let ukj = u.coeff_coords(k, j);
                    for (kk, ek) in e.iter().enumerate() {
                        for (l, z) in ukj.iter().enumerate() {
                            out[kk * d + l] += w * ek * z;
                        }
                    }
                }
            }
        }
    }
    Ok(cp.element(&out))
}

/// As [`fejer_partial`], after checking that every coefficient of `f̂` sits
/// on an irreducible in `irreps`.
pub fn fejer_term(cp: &CrossedProduct, t: &CMatrix, fhat: &Functional, irreps: &[usize]) -> Result<CMatrix> {
    let q = cp.action().host();
    let table = coeff_expansion(q, fhat)?;
    let scale = table.entries.iter().map(|e| e.value.norm()).fold(1.0, f64::max);
    if let Some(beta) = table.support(1e-10 * scale).into_iter().find(|b| !irreps.contains(b)) {
        return Err(Error::Input(format!(
            "functional has coefficients on dual irreducible {beta}, outside the chosen set"
        )));
    }
    fejer_partial(cp, t, fhat, irreps)
}

/// The Fejér sum with `f̂ = ε̂` over every irreducible; exact in finite
/// dimension.
pub fn fejer_reconstruct(cp: &CrossedProduct, t: &CMatrix) -> Result<FejerReport> {
    let q = cp.action().host();
    let all: Vec<usize> = (0..q.irreps().len()).collect();
    let output = fejer_term(cp, t, &Functional::counit(q.dual_side()), &all)?;
    let residual = output.dist(t);
    Ok(FejerReport { output, residual })
}

/// `P_γ(T) = (Θ̂ℓop(χ_γ) ⊗ id)(T)` with `χ_γ = d_γ φ̂_q^γ`. It fixes
/// `α(x)((û^γ_ij)* ⊗ 1)` and kills the other bands.
pub fn spectral_projection(cp: &CrossedProduct, t: &CMatrix, gamma: usize) -> Result<CMatrix> {
    let q = cp.action().host();
    let ch = characters(q, gamma)?;
    let chi = ch.phi_q.scale(c(q.irreps()[gamma].qdim(), 0.0));
    cp.module_action(t, &chi)
}

/// `Σ_{k,l} λ_k d_γ E(P_γ(T)(û_kl ⊗ 1))(û_kl* ⊗ 1)`, which rebuilds
/// `P_γ(T)` from conditional-expectation data alone.
pub fn spectral_projection_from_e_data(cp: &CrossedProduct, t: &CMatrix, gamma: usize) -> Result<CMatrix> {
    let q = cp.action().host();
    let dual = q.dual_side();
    let p = cp.coords(&spectral_projection(cp, t, gamma)?)?;
    let u = &q.irreps()[gamma];
    let d = q.dim();
    let mut out = vec![c(0.0, 0.0); p.len()];
    for k in 0..u.dim() {
        for l in 0..u.dim() {
            let w: C64 = c(u.f_eigs()[k] * u.qdim(), 0.0);
            let h = Functional::density(dual, u.coeff_coords(k, l));
            let e = cp.expectation_coords_weighted(&p, h.coords());
            let ustar = dual.tensors().star_of(u.coeff_coords(k, l));
            for (kk, ek) in e.iter().enumerate() {
                for (j, z) in ustar.iter().enumerate() {
                    out[kk * d + j] += w * ek * z;
                }
            }
        }
    }
    Ok(cp.element(&out))
}
