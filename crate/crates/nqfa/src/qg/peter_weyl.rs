//! Irreducible corepresentations of the dual, read off from a matrix-unit
//! decomposition of `L∞(G)` and a slice of `W`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{FiniteQuantumGroup, HopfSide, Origin};
use crate::error::{Error, Result};
use crate::numerics::{c, dense, span, CMatrix, C64};
use crate::tolerances::{TOL_IDENTITY, TOL_RANK};

/// An irreducible unitary corepresentation `û = [û_ij]` of the dual.
#[derive(Clone, Debug)]
pub struct DualIrrep {
    dim: usize,
    f_eigs: Vec<f64>,
    qdim: f64,
    trivial: bool,
    coeffs: Vec<Vec<CMatrix>>,
    coords: Vec<Vec<Vec<C64>>>,
}

impl DualIrrep {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues `λ_i` of the `F`-matrix.
    pub fn f_eigs(&self) -> &[f64] {
        &self.f_eigs
    }

    /// Quantum dimension `d = tr F`.
    pub fn qdim(&self) -> f64 {
        self.qdim
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// `û_ij` as an operator on `ℓ²(G)`.
    pub fn coeff(&self, i: usize, j: usize) -> &CMatrix {
        &self.coeffs[i][j]
    }

    /// Coordinates of `û_ij` against the basis of `L∞(Ĝ)`.
    pub fn coeff_coords(&self, i: usize, j: usize) -> &[C64] {
        &self.coords[i][j]
    }

    /// `χ = Σ_i û_ii`.
    pub fn character(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.coeffs[0][0].rows(), self.coeffs[0][0].cols());
        for i in 0..self.dim {
            out = &out + &self.coeffs[i][i];
        }
        out
    }

    /// `χ_q = Σ_i λ_i û_ii`.
    pub fn q_character(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.coeffs[0][0].rows(), self.coeffs[0][0].cols());
        for i in 0..self.dim {
            out.add_scaled(c(self.f_eigs[i], 0.0), &self.coeffs[i][i]);
        }
        out
    }
}

/// Residuals of the Peter–Weyl relations.
#[derive(Clone, Debug, Serialize)]
pub struct PeterWeylReport {
    /// `φ̂((û^β_kl)* û^α_ij) = δ δ δ / (λ_i d_α)`.
    pub orthogonality_adjoint_left: f64,
    /// `φ̂(û^β_kl (û^α_ij)*) = δ δ δ λ_j / d_α`.
    pub orthogonality_adjoint_right: f64,
    /// `Γ̂(û_ij) = Σ_k û_ik ⊗ û_kj`.
    pub corepresentation: f64,
    /// `Σ_k û_ki* û_kj = δ_ij = Σ_k û_ik û_jk*`.
    pub unitarity: f64,
    /// `Σ dim² − dim ℓ²`, as a float.
    pub completeness: f64,
    /// Dimension of `span{x x̂}` short of `dim B(ℓ²)`.
    pub density_defect: f64,
}

impl PeterWeylReport {
    pub fn max(&self) -> f64 {
        [
            self.orthogonality_adjoint_left,
            self.orthogonality_adjoint_right,
            self.corepresentation,
            self.unitarity,
            self.completeness,
            self.density_defect,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Matrix units `e_ij` of one simple summand, as algebra coordinates.
struct Block {
    units: Vec<Vec<Vec<C64>>>,
}

fn explicit_function_blocks(d: usize) -> Vec<Block> {
    (0..d)
        .map(|s| {
            let mut v = vec![c(0.0, 0.0); d];
            v[s] = c(1.0, 0.0);
            Block { units: vec![vec![v]] }
        })
        .collect()
}

/// `e^π_ij = (n_π / |Γ|) Σ_s conj(π(s)_ij) λ_s`.
fn explicit_group_blocks(g: &crate::groups::FiniteGroup) -> Result<Vec<Block>> {
    let n = g.order() as f64;
    Ok(g.irreps()?
        .iter()
        .map(|rep| {
            let units = (0..rep.dim)
                .map(|i| {
                    (0..rep.dim)
                        .map(|j| {
                            rep.matrices
                                .iter()
                                .map(|m| m.get(i, j).conj() * (rep.dim as f64 / n))
                                .collect()
                        })
                        .collect()
                })
                .collect();
            Block { units }
        })
        .collect())
}

fn spectral_clusters(vals: &[f64], vecs: &CMatrix, gap: f64) -> Vec<(f64, CMatrix)> {
    let n = vals.len();
    let mut out: Vec<(f64, CMatrix)> = Vec::new();
    let mut start = 0;
    for t in 1..=n {
        if t == n || vals[t] - vals[t - 1] > gap {
            let mut p = CMatrix::zeros(vecs.rows(), vecs.rows());
            for s in start..t {
                let v = CMatrix::from_fn(vecs.rows(), 1, |i, _| vecs.get(i, s));
                p = &p + &v.matmul(&v.adjoint());
            }
            out.push((vals[start], p));
            start = t;
        }
    }
    out
}

fn random_coords(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn hermitian_part(side: &HopfSide, x: &[C64]) -> CMatrix {
    let op = side.element(x);
    (&op + &op.adjoint()).scale_re(0.5)
}

/// Matrix units of a finite-dimensional C*-algebra given by operators:
/// minimal central projections from a generic central element, then minimal
/// projections and partial isometries inside each summand.
fn wedderburn(side: &HopfSide) -> Result<Vec<Block>> {
    let d = side.dim();
    let t = side.tensors();
    // Centre: Σ_j z_j (e_j e_i − e_i e_j) = 0 for all i.
    let comm = CMatrix::from_fn(d * d, d, |row, j| {
        let (i, k) = (row / d, row % d);
        t.mult.get(k, j * d + i) - t.mult.get(k, i * d + j)
    });
    let centre = dense::nullspace_abs(&comm, TOL_RANK * (1.0 + t.mult.max_abs()));
    let nz = centre.cols();
    for attempt in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + attempt);
        let mut h = vec![c(0.0, 0.0); d];
        for col in 0..nz {
            let w = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for (i, hi) in h.iter_mut().enumerate() {
                *hi += centre.get(i, col) * w;
            }
        }
        let hz = hermitian_part(side, &h);
        let scale = 1.0 + hz.max_abs();
        let (vals, vecs) = dense::eigh(&hz);
        let central = spectral_clusters(&vals, &vecs, 1e-6 * scale);
        if central.len() != nz {
            continue;
        }
        let mut blocks = Vec::new();
        let mut ok = true;
        for (_, p) in &central {
            let rank = p.trace().re.round() as usize;
            let n = (rank as f64).sqrt().round() as usize;
            if n * n != rank || n == 0 {
                ok = false;
                break;
            }
            // Generic self-adjoint element compressed to the summand; the
            // complement is pushed far away so it forms its own cluster.
            let y = hermitian_part(side, &random_coords(&mut rng, d));
            let offset = 10.0 * (1.0 + y.max_abs() * d as f64);
            let comp = &CMatrix::identity(d) - p;
            let k = &p.matmul(&y).matmul(p) + &comp.scale_re(offset);
            let (kv, kvec) = dense::eigh(&k);
            let clusters = spectral_clusters(&kv, &kvec, 1e-6 * offset);
            let minimal: Vec<CMatrix> = clusters
                .into_iter()
                .filter(|(v, _)| *v < offset / 2.0)
                .map(|(_, q)| q)
                .collect();
            if minimal.len() != n || minimal.iter().any(|q| (q.trace().re - n as f64).abs() > 1e-6) {
                ok = false;
                break;
            }
            let z = side.element(&random_coords(&mut rng, d));
            let mut e1: Vec<CMatrix> = Vec::with_capacity(n);
            for q in &minimal {
                let x = minimal[0].matmul(&z).matmul(q);
                let scale = (x.matmul(&x.adjoint()).trace().re / minimal[0].trace().re).sqrt();
                if scale < 1e-8 {
                    ok = false;
                    break;
                }
                e1.push(x.scale_re(1.0 / scale));
            }
            if !ok {
                break;
            }
            e1[0] = minimal[0].clone();
            let mut units = vec![vec![Vec::new(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let eij = e1[i].adjoint().matmul(&e1[j]);
                    let (cc, r) = side.coords_of(&eij);
                    if r > 1e-8 {
                        ok = false;
                    }
                    units[i][j] = cc;
                }
            }
            blocks.push(Block { units });
        }
        if ok {
            return Ok(blocks);
        }
    }
    Err(Error::Numerical("matrix-unit decomposition did not separate the summands".into()))
}

fn matrix_unit_residual(side: &HopfSide, blocks: &[Block]) -> f64 {
    let t = side.tensors();
    let mut worst: f64 = 0.0;
    let mut total = vec![c(0.0, 0.0); side.dim()];
    for (a, ba) in blocks.iter().enumerate() {
        let n = ba.units.len();
        for i in 0..n {
            for (x, y) in total.iter_mut().zip(&ba.units[i][i]) {
                *x += y;
            }
            for j in 0..n {
                let eij = &ba.units[i][j];
                let star = t.star_of(eij);
                worst = worst.max(dist(&star, &ba.units[j][i]));
                for (b, bb) in blocks.iter().enumerate() {
                    let m = bb.units.len();
                    for k in 0..m {
                        for l in 0..m {
                            let prod = t.mul(eij, &bb.units[k][l]);
                            let r = if a == b && j == k {
                                dist(&prod, &ba.units[i][l])
                            } else {
                                prod.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
                            };
                            worst = worst.max(r);
                        }
                    }
                }
            }
        }
    }
    worst.max(dist(&total, side.unit()))
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub(super) fn compute_irreps(q: &FiniteQuantumGroup) -> Result<Vec<DualIrrep>> {
    let side = q.primal();
    let d = side.dim();
    let blocks = match q.origin() {
        Origin::FunctionAlgebra(_) => explicit_function_blocks(d),
        Origin::GroupAlgebra(g) => match explicit_group_blocks(g) {
            Ok(b) => b,
            Err(_) => wedderburn(side)?,
        },
        _ => wedderburn(side)?,
    };
    let r = matrix_unit_residual(side, &blocks);
    if r > TOL_IDENTITY {
        return Err(Error::axiom("matrix units", r));
    }
    // Columns: coordinates of e^α_ij in the order (α, i, j).
    let mut cols: Vec<&Vec<C64>> = Vec::with_capacity(d);
    for b in &blocks {
        for row in &b.units {
            for u in row {
                cols.push(u);
            }
        }
    }
    if cols.len() != d {
        return Err(Error::Numerical(format!("matrix units span {} of {d} dimensions", cols.len())));
    }
    let mu = CMatrix::from_fn(d, d, |i, j| cols[j][i]);
    let mu_inv = dense::inverse(&mu)?;
    let dual = q.dual_side();
    let mut irreps = Vec::with_capacity(blocks.len());
    let mut row = 0;
    for b in &blocks {
        let n = b.units.len();
        let mut coords = vec![vec![Vec::new(); n]; n];
        let mut coeffs = vec![vec![CMatrix::zeros(d, d); n]; n];
        // (id ⊗ Γ̂)(W) = W₁₃W₁₂, so slicing W at the functional dual to e_ij
        // gives the (j, i) coefficient of a corepresentation.
        for i in 0..n {
            for j in 0..n {
                let f: Vec<C64> = (0..d).map(|k| mu_inv.get(row, k)).collect();
                coeffs[j][i] = dual.element(&f);
                coords[j][i] = f;
                row += 1;
            }
        }
        let trivial = n == 1 && (side.tensors().counit_of(&b.units[0][0]) - c(1.0, 0.0)).norm() < 1e-9;
        // Finite quantum groups are of Kac type: F = 1.
        irreps.push(DualIrrep { dim: n, f_eigs: vec![1.0; n], qdim: n as f64, trivial, coeffs, coords });
    }
    // Trivial corepresentation first; the rest keep their order.
    if let Some(pos) = irreps.iter().position(|u| u.trivial) {
        let t = irreps.remove(pos);
        irreps.insert(0, t);
    }
    Ok(irreps)
}

pub(super) fn report(q: &FiniteQuantumGroup) -> PeterWeylReport {
    let d = q.dim();
    let dual = q.dual_side();
    let irreps = q.irreps();
    let mut left: f64 = 0.0;
    let mut right: f64 = 0.0;
    for (a, ua) in irreps.iter().enumerate() {
        for (b, ub) in irreps.iter().enumerate() {
            for i in 0..ua.dim {
                for j in 0..ua.dim {
                    for k in 0..ub.dim {
                        for l in 0..ub.dim {
                            let same = a == b && i == k && j == l;
                            let x = ua.coeff(i, j);
                            let y = ub.coeff(k, l);
                            let v1 = dual.haar_op(&y.adjoint().matmul(x));
                            let t1 = if same { 1.0 / (ua.f_eigs[i] * ua.qdim) } else { 0.0 };
                            left = left.max((v1 - c(t1, 0.0)).norm());
                            let v2 = dual.haar_op(&y.matmul(&x.adjoint()));
                            let t2 = if same { ua.f_eigs[j] / ua.qdim } else { 0.0 };
                            right = right.max((v2 - c(t2, 0.0)).norm());
                        }
                    }
                }
            }
        }
    }
    let mut corep: f64 = 0.0;
    let mut unitary: f64 = 0.0;
    let id = CMatrix::identity(d);
    for u in irreps {
        let n = u.dim;
        for i in 0..n {
            for j in 0..n {
                let mut rhs = CMatrix::zeros(d * d, d * d);
                let mut s1 = CMatrix::zeros(d, d);
                let mut s2 = CMatrix::zeros(d, d);
                for k in 0..n {
                    rhs = &rhs + &u.coeff(i, k).kron(u.coeff(k, j));
                    s1 = &s1 + &u.coeff(k, i).adjoint().matmul(u.coeff(k, j));
                    s2 = &s2 + &u.coeff(i, k).matmul(&u.coeff(j, k).adjoint());
                }
                corep = corep.max(q.conj_w_hat(u.coeff(i, j)).dist(&rhs));
                let target = if i == j { id.clone() } else { CMatrix::zeros(d, d) };
                unitary = unitary.max(s1.dist(&target)).max(s2.dist(&target));
            }
        }
    }
    let total: usize = irreps.iter().map(|u| u.dim * u.dim).sum();
    let products: Vec<CMatrix> = q
        .primal()
        .ops()
        .iter()
        .flat_map(|x| dual.ops().iter().map(move |y| x.matmul(y)))
        .collect();
    let dens = span((d, d), &products, TOL_RANK).map(|s| s.dim()).unwrap_or(0);
    PeterWeylReport {
        orthogonality_adjoint_left: left,
        orthogonality_adjoint_right: right,
        corepresentation: corep,
        unitarity: unitary,
        completeness: (total as f64 - d as f64).abs(),
        density_defect: (d * d - dens) as f64,
    }
}
