//! `Θℓ(f)`, `Θr(f)` and `Θ̂ℓop(f̂)` as `d² × d²` matrices acting on the
//! row-major vectorisation of operators on `ℓ²(G)`. Each map is linear in its
//! functional, so the maps of the coordinate functionals are computed once
//! per quantum group and combined.

use super::Functional;
use crate::error::Result;
use crate::numerics::{c, dense, CMatrix, C64};
use crate::qg::FiniteQuantumGroup;

/// `x ↦ M vec(x)`, reshaped.
pub fn apply_map(m: &CMatrix, x: &CMatrix) -> CMatrix {
    CMatrix::from_vec(x.rows(), x.cols(), &m.apply(x.data()))
}

fn combine(maps: &[CMatrix], f: &[C64]) -> CMatrix {
    let n = maps[0].rows();
    let mut out = CMatrix::zeros(n, n);
    for (m, z) in maps.iter().zip(f) {
        if *z != c(0.0, 0.0) {
            out.add_scaled(*z, m);
        }
    }
    out
}

/// Maps of the coordinate functionals, read off the images of the matrix units.
fn basis_maps(d: usize, mut slices: impl FnMut(&CMatrix) -> Vec<CMatrix>) -> Vec<CMatrix> {
    let mut maps = vec![CMatrix::zeros(d * d, d * d); d];
    for r in 0..d {
        for s in 0..d {
            let parts = slices(&CMatrix::unit(d, d, r, s));
            for (k, part) in parts.iter().enumerate() {
                for (row, z) in part.data().iter().enumerate() {
                    maps[k].set(row, r * d + s, *z);
                }
            }
        }
    }
    maps
}

fn theta_r_maps(q: &FiniteQuantumGroup) -> &[CMatrix] {
    q.caches.theta_r.get_or_init(|| {
        let coords = q.primal().coordinates();
        basis_maps(q.dim(), |x| coords.split_second_leg(&q.conj_v(x)))
    })
}

fn theta_l_maps(q: &FiniteQuantumGroup) -> &[CMatrix] {
    q.caches.theta_l.get_or_init(|| {
        let coords = q.primal().coordinates();
        basis_maps(q.dim(), |x| coords.split_first_leg(&q.conj_w(x)))
    })
}

/// `B(ℓ²) = span{π(e_a) ŷ_b}`; on such products
/// `Θ̂ℓop(f̂)(x ŷ) = x (f̂ ⊗ id)Γ̂op(ŷ)`.
fn theta_hat_maps(q: &FiniteQuantumGroup) -> &[CMatrix] {
    q.caches.theta_hat.get_or_init(|| {
        let d = q.dim();
        let xs = q.primal().ops();
        let ys = q.dual_side().ops();
        let dc = &q.dual_side().tensors().comult;
        let source_inv = q.caches.mixed_inverse.get_or_init(|| {
            let source = CMatrix::from_fn(d * d, d * d, |row, col| {
                let (a, b) = (col / d, col % d);
                // Entry (row) of π(e_a) ŷ_b, computed without forming all products.
                let (r, s) = (row / d, row % d);
                (0..d).map(|t| xs[a].get(r, t) * ys[b].get(t, s)).sum()
            });
            dense::inverse(&source).expect("ℓ∞(G) L∞(Ĝ) spans B(ℓ²)")
        });
        (0..d)
            .map(|j| {
                let mut target = CMatrix::zeros(d * d, d * d);
                for a in 0..d {
                    for b in 0..d {
                        let mut slice = CMatrix::zeros(d, d);
                        for i in 0..d {
                            let z = dc.get(i * d + j, b);
                            if z != c(0.0, 0.0) {
                                slice.add_scaled(z, &ys[i]);
                            }
                        }
                        let prod = xs[a].matmul(&slice);
                        for (row, z) in prod.data().iter().enumerate() {
                            target.set(row, a * d + b, *z);
                        }
                    }
                }
                target.matmul(source_inv)
            })
            .collect()
    })
}

/// `Θr(f)(x) = (id ⊗ f)(V(x ⊗ 1)V*)`.
pub fn theta_r(q: &FiniteQuantumGroup, f: &Functional) -> Result<CMatrix> {
    f.check_host(q.primal())?;
    Ok(combine(theta_r_maps(q), f.coords()))
}

/// `Θℓ(f)(x) = (f ⊗ id)(W*(1 ⊗ x)W)`.
pub fn theta_l(q: &FiniteQuantumGroup, f: &Functional) -> Result<CMatrix> {
    f.check_host(q.primal())?;
    Ok(combine(theta_l_maps(q), f.coords()))
}

/// `Θ̂ℓop(f̂)` for `f̂` a functional on `L∞(Ĝ)` convolved through `Γ̂op`.
pub fn theta_l_op_dual(q: &FiniteQuantumGroup, fhat: &Functional) -> Result<CMatrix> {
    fhat.check_host(q.dual_side())?;
    Ok(combine(theta_hat_maps(q), fhat.coords()))
}

/// `(f̂ ⊗ id)(W̃*(1 ⊗ x)W̃)`, an independent route to `Θ̂ℓop(f̂)(x)`.
pub fn theta_l_op_dual_via_w_tilde(q: &FiniteQuantumGroup, fhat: &Functional, x: &CMatrix) -> Result<CMatrix> {
    fhat.check_host(q.dual_side())?;
    let d = q.dim();
    let wt = q.w_tilde();
    let conj = wt.adjoint().matmul(&CMatrix::identity(d).kron(x)).matmul(&wt);
    let parts = q.dual_side().coordinates().split_first_leg(&conj);
    let mut out = CMatrix::zeros(d, d);
    for (p, z) in parts.iter().zip(fhat.coords()) {
        out.add_scaled(*z, p);
    }
    Ok(out)
}
