//! Decompositions delegated to `nalgebra`: SVD, Hermitian eigensystems,
//! inversion and least squares.

use nalgebra::DMatrix;

use super::cmatrix::{CMatrix, C64};
use crate::error::{Error, Result};

fn to_na(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

/// Thin singular value decomposition with singular values sorted in
/// decreasing order.
pub struct Svd {
    /// Left singular vectors as columns, `rows × k`.
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    /// Right singular vectors as columns, `cols × k`.
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    let k = m.rows().min(m.cols());
    if k == 0 {
        return Svd { u: CMatrix::zeros(m.rows(), 0), sigma: vec![], v: CMatrix::zeros(m.cols(), 0) };
    }
    assert!(m.data().iter().all(|z| z.re.is_finite() && z.im.is_finite()), "svd: non-finite input");
    // nalgebra panics while sorting if its iteration yields a NaN; take the
    // unordered result and sort here.
    let dec = match to_na(m).try_svd_unordered(true, true, f64::EPSILON, 0) {
        Some(dec) if dec.singular_values.iter().all(|s| s.is_finite()) => dec,
        _ => return jacobi_svd(m),
    };
    let u = dec.u.expect("svd: u requested");
    let vt = dec.v_t.expect("svd: v_t requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let sigma = order.iter().map(|&i| dec.singular_values[i]).collect();
    let u_sorted = CMatrix::from_fn(m.rows(), k, |i, j| u[(i, order[j])]);
    let v_sorted = CMatrix::from_fn(m.cols(), k, |i, j| vt[(order[j], i)].conj());
    let out = Svd { u: u_sorted, sigma, v: v_sorted };
    // nalgebra's bidiagonal QR occasionally stalls on clustered singular
    // values; fall back to one-sided Jacobi when the result does not
    // reconstruct the input.
    if reconstruction_error(m, &out) > 1e-11 * (1.0 + m.norm()) {
        return jacobi_svd(m);
    }
    out
}

fn reconstruction_error(m: &CMatrix, dec: &Svd) -> f64 {
    let (rows, k) = dec.u.shape();
    let us = CMatrix::from_fn(rows, k, |i, j| dec.u.get(i, j) * dec.sigma[j]);
    let back = us.matmul(&dec.v.adjoint());
    let ortho = |q: &CMatrix| q.adjoint().matmul(q).dist(&CMatrix::identity(q.cols()));
    back.dist(m).max(ortho(&dec.v)).max(ortho(&dec.u))
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn jacobi_svd(m: &CMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = jacobi_svd(&m.adjoint());
        return Svd { u: t.v, sigma: t.sigma, v: t.u };
    }
    let (rows, n) = m.shape();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..rows {
                    let (x, y) = (a.get(i, p), a.get(i, q));
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let rot = |mat: &mut CMatrix, len: usize| {
                    for i in 0..len {
                        let (x, y) = (mat.get(i, p), mat.get(i, q));
                        mat.set(i, p, x * cs - y * phase.conj() * sn);
                        mat.set(i, q, x * phase * sn + y * cs);
                    }
                };
                rot(&mut a, rows);
                rot(&mut v, n);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| (0..rows).map(|i| a.get(i, j).norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let mut u = CMatrix::zeros(rows, n);
    let mut filled = 0;
    for (col, &j) in order.iter().enumerate() {
        if norms[j] > f64::EPSILON * smax * n as f64 && norms[j] > 0.0 {
            for i in 0..rows {
                u.set(i, col, a.get(i, j) / norms[j]);
            }
            filled = col + 1;
        }
    }
    complete_orthonormal(&mut u, filled);
    let v_sorted = CMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Svd { u, sigma, v: v_sorted }
}

/// Fills columns `from..` of `q` so that all columns are orthonormal.
fn complete_orthonormal(q: &mut CMatrix, from: usize) {
    let (rows, cols) = q.shape();
    let mut next = from;
    for e in 0..rows {
        if next == cols {
            break;
        }
        let mut x: Vec<C64> = (0..rows).map(|i| C64::new(if i == e { 1.0 } else { 0.0 }, 0.0)).collect();
        for _ in 0..2 {
            for j in 0..next {
                let dot: C64 = (0..rows).map(|i| q.get(i, j).conj() * x[i]).sum();
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi -= dot * q.get(i, j);
                }
            }
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            for (i, xi) in x.iter().enumerate() {
                q.set(i, next, xi / nrm);
            }
            next += 1;
        }
    }
}

/// Orthonormal basis (as columns) of the kernel of `m`, deciding rank by
/// `σ > rel_tol · σ_max`.
pub fn nullspace(m: &CMatrix, rel_tol: f64) -> CMatrix {
    nullspace_by(m, |smax| rel_tol * smax)
}

/// Nullspace with an absolute cutoff on the singular values.
pub fn nullspace_abs(m: &CMatrix, tol: f64) -> CMatrix {
    nullspace_by(m, |_| tol)
}

/// Nullspace with cutoff `tol · max(σ_max, 1)`: relative for matrices of
/// ordinary size, absolute for those that vanish up to rounding.
pub fn nullspace_scaled(m: &CMatrix, tol: f64) -> CMatrix {
    nullspace_by(m, |smax| tol * smax.max(1.0))
}

fn nullspace_by(m: &CMatrix, cutoff: impl Fn(f64) -> f64) -> CMatrix {
    let n = m.cols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Pad short matrices so the thin SVD carries a full set of right vectors.
    let padded;
    let a = if m.rows() < n {
        let mut data = m.data().to_vec();
        data.resize(n * n, C64::new(0.0, 0.0));
        padded = CMatrix::from_raw(n, n, data);
        &padded
    } else {
        m
    };
    let dec = svd(a);
    let smax = dec.sigma.first().copied().unwrap_or(0.0);
    let thresh = cutoff(smax);
    let keep: Vec<usize> = (0..dec.sigma.len())
        .filter(|&i| smax == 0.0 || dec.sigma[i] <= thresh)
        .collect();
    CMatrix::from_fn(n, keep.len(), |i, j| dec.v.get(i, keep[j]))
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending,
/// eigenvectors as columns.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(m.is_square(), "eigh: square matrix required");
    let n = m.rows();
    // Symmetrise to remove rounding asymmetry before handing to the solver.
    let h = (&m.adjoint() + m).scale_re(0.5);
    let dec = to_na(&h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| dec.eigenvectors[(i, order[j])]);
    let lam = CMatrix::from_diag(&vals.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    let err = h
        .matmul(&vecs)
        .dist(&vecs.matmul(&lam))
        .max(vecs.adjoint().matmul(&vecs).dist(&CMatrix::identity(n)));
    if err <= 1e-11 * (1.0 + h.norm()) {
        return (vals, vecs);
    }
    // Shift to a positive definite matrix, whose SVD is its eigensystem.
    let shift = h.norm() + 1.0;
    let dec = jacobi_svd(&(&h + &CMatrix::identity(n).scale_re(shift)));
    let vals: Vec<f64> = dec.sigma.iter().rev().map(|s| s - shift).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| dec.v.get(i, n - 1 - j));
    (vals, vecs)
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!("inverse of a {}x{} matrix", m.rows(), m.cols())));
    }
    let dec = svd(m);
    let smax = dec.sigma.first().copied().unwrap_or(0.0);
    let smin = dec.sigma.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(Error::Numerical(format!(
            "matrix is singular (condition {:.3e})",
            if smin == 0.0 { f64::INFINITY } else { smax / smin }
        )));
    }
    Ok(pinv_from(&dec, 0.0))
}

fn pinv_from(dec: &Svd, thresh: f64) -> CMatrix {
    let (m, k) = dec.u.shape();
    let n = dec.v.rows();
    let mut out = CMatrix::zeros(n, m);
    for t in 0..k {
        let s = dec.sigma[t];
        if s <= thresh || s == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = dec.v.get(i, t) / s;
            for j in 0..m {
                let z = out.get(i, j) + vi * dec.u.get(j, t).conj();
                out.set(i, j, z);
            }
        }
    }
    out
}

/// Moore-Penrose pseudo-inverse with relative cutoff `rel_tol`.
pub fn pinv(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let dec = svd(m);
    let smax = dec.sigma.first().copied().unwrap_or(0.0);
    pinv_from(&dec, rel_tol * smax)
}

/// Square root and inverse square root of a positive definite matrix.
pub fn sqrt_pd(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.rows();
    let off = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| m.get(i, j).norm())
        .fold(0.0, f64::max);
    if off == 0.0 {
        // Diagonal Gram matrices are common; keep them exact.
        let d: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
        if d.iter().any(|&x| x <= 0.0) {
            return Err(Error::Numerical("Gram matrix is not positive definite".into()));
        }
        let s = CMatrix::from_diag(&d.iter().map(|x| C64::new(x.sqrt(), 0.0)).collect::<Vec<_>>());
        let si =
            CMatrix::from_diag(&d.iter().map(|x| C64::new(1.0 / x.sqrt(), 0.0)).collect::<Vec<_>>());
        return Ok((s, si));
    }
    let (vals, vecs) = eigh(m);
    let top = vals.last().copied().unwrap_or(0.0);
    if vals.first().map_or(true, |&v| v <= 1e-12 * top) {
        return Err(Error::Numerical("Gram matrix is not positive definite".into()));
    }
    let root = |f: fn(f64) -> f64| {
        let d = CMatrix::from_diag(&vals.iter().map(|&x| C64::new(f(x), 0.0)).collect::<Vec<_>>());
        vecs.matmul(&d).matmul(&vecs.adjoint())
    };
    Ok((root(f64::sqrt), root(|x| 1.0 / x.sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cmatrix::c;

    #[test]
    fn svd_reconstructs() {
        let m = CMatrix::from_fn(3, 5, |i, j| c((i * 5 + j) as f64 * 0.1, (i as f64) - (j as f64)));
        let d = svd(&m);
        let s = CMatrix::from_diag(&d.sigma.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let back = d.u.matmul(&s).matmul(&d.v.adjoint());
        assert!(back.dist(&m) < 1e-12);
        assert!(d.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn jacobi_matches_on_clustered_spectrum() {
        let m = CMatrix::from_fn(7, 4, |i, j| {
            let base = if i % 4 == j { 2.0 } else { 0.0 };
            c(base + 1e-14 * ((i * 3 + j) as f64).sin(), 1e-3 * (i as f64 - j as f64))
        });
        let j = jacobi_svd(&m);
        assert!(reconstruction_error(&m, &j) < 1e-12);
        let jt = jacobi_svd(&m.adjoint());
        assert!(reconstruction_error(&m.adjoint(), &jt) < 1e-12);
        let s = svd(&m);
        for (x, y) in s.sigma.iter().zip(&j.sigma) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_handles_rank_deficiency() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[0.0, 0.0, 0.0], &[1.0, 0.0, 1.0]]);
        let j = jacobi_svd(&m);
        assert!(reconstruction_error(&m, &j) < 1e-12);
        assert!(j.sigma[2] < 1e-12);
    }

    #[test]
    fn nullspace_of_short_matrix() {
        let m = CMatrix::from_real_rows(&[&[1.0, 1.0, 0.0]]);
        let n = nullspace(&m, 1e-10);
        assert_eq!(n.cols(), 2);
        assert!(m.matmul(&n).norm() < 1e-14);
    }

    #[test]
    fn inverse_and_singular() {
        let m = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let inv = inverse(&m).unwrap();
        assert!(m.matmul(&inv).dist(&CMatrix::identity(2)) < 1e-14);
        assert!(inverse(&CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]])).is_err());
    }

    #[test]
    fn eigh_and_sqrt() {
        let m = CMatrix::from_fn(3, 3, |i, j| if i == j { c(3.0, 0.0) } else { c(0.5, 0.25 * (i as f64 - j as f64)) });
        let (vals, vecs) = eigh(&m);
        let d = CMatrix::from_diag(&vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        assert!(vecs.matmul(&d).matmul(&vecs.adjoint()).dist(&m) < 1e-12);
        let (s, si) = sqrt_pd(&m).unwrap();
        assert!(s.matmul(&s).dist(&m) < 1e-12);
        assert!(s.matmul(&si).dist(&CMatrix::identity(3)) < 1e-12);
    }
}
