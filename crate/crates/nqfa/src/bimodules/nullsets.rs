//! Null sets and harmonic operators of families of functionals, the
//! lattice identities and the norm-closed variants, which pair through
//! trace-class densities instead of coordinates.

use rand::Rng;
use serde::Serialize;

use super::{bim, ideal_from_generators, linfty, ran_perp, random_ideal, InvariantBimodule, LeftIdeal, Provenance};
use crate::error::Result;
use crate::fourier::{theta_r, Functional};
use crate::numerics::{c, common_nullspace, dense, span, CMatrix, MatSubspace};
use crate::qg::FiniteQuantumGroup;
use crate::tolerances::{TOL_ORTHO, TOL_RANK};

/// Coordinate matrix of `a ↦ (id ⊗ σ)Γ(a)` on `L∞(G)`.
fn theta_r_coords(q: &FiniteQuantumGroup, sigma: &Functional) -> CMatrix {
    let t = q.primal().tensors();
    let d = t.dim;
    CMatrix::from_fn(d, d, |i, k| (0..d).map(|j| t.comult.get(i * d + j, k) * sigma.coords()[j]).sum())
}

/// `𝔑(Σ) = {a ∈ L∞(G) : (id ⊗ σ)Γ(a) = 0 for σ ∈ Σ}`, solved in
/// coordinates of `L∞(G)`.
pub fn null_set(q: &FiniteQuantumGroup, sigma: &[Functional]) -> Result<MatSubspace> {
    let side = q.primal();
    let d = side.dim();
    for s in sigma {
        s.check_host(side)?;
    }
    if sigma.is_empty() {
        return linfty(q);
    }
    let blocks: Vec<CMatrix> = sigma.iter().map(|s| theta_r_coords(q, s)).collect();
    let stacked = CMatrix::from_fn(d * blocks.len(), d, |r, k| blocks[r / d].get(r % d, k));
    let ker = dense::nullspace_scaled(&stacked, TOL_RANK);
    let ops: Vec<CMatrix> =
        (0..ker.cols()).map(|t| side.element(&(0..d).map(|i| ker.get(i, t)).collect::<Vec<_>>())).collect();
    span((d, d), &ops, TOL_RANK)
}

/// `Ñ(Σ) = {T ∈ B(ℓ²(G)) : Θr(σ)(T) = 0 for σ ∈ Σ}`.
pub fn null_set_big(q: &FiniteQuantumGroup, sigma: &[Functional]) -> Result<InvariantBimodule> {
    let d = q.dim();
    let maps: Vec<CMatrix> = sigma.iter().map(|s| theta_r(q, s)).collect::<Result<_>>()?;
    Ok(InvariantBimodule { space: common_nullspace((d, d), &maps, TOL_RANK)?, provenance: Provenance::Nullset })
}

/// `𝔑(Σ) = 𝔑(L¹⋆Σ)`, `Ñ(Σ) = Ñ(L¹⋆Σ)` and `Ñ(Σ) = Bim(𝔑(Σ))`.
#[derive(Clone, Debug, Serialize)]
pub struct NullSetReport {
    pub small_dim: usize,
    pub big_dim: usize,
    pub small_reduces_to_ideal: bool,
    pub big_reduces_to_ideal: bool,
    pub big_is_bim_of_small: bool,
    pub residual: f64,
}

impl NullSetReport {
    pub fn passed(&self) -> bool {
        self.small_reduces_to_ideal && self.big_reduces_to_ideal && self.big_is_bim_of_small
    }
}

pub fn check_null_sets(q: &FiniteQuantumGroup, sigma: &[Functional]) -> Result<NullSetReport> {
    let small = null_set(q, sigma)?;
    let big = null_set_big(q, sigma)?;
    let gen = ideal_from_generators(q, sigma)?.functionals();
    let small_j = null_set(q, &gen)?;
    let big_j = null_set_big(q, &gen)?;
    let b = bim(q, &small)?;
    let residual = small
        .equality_residual(&small_j)?
        .max(big.space.equality_residual(&big_j.space)?)
        .max(big.space.equality_residual(&b.space)?);
    Ok(NullSetReport {
        small_dim: small.dim(),
        big_dim: big.dim(),
        small_reduces_to_ideal: small.equals(&small_j, TOL_ORTHO)?,
        big_reduces_to_ideal: big.space.equals(&big_j.space, TOL_ORTHO)?,
        big_is_bim_of_small: big.space.equals(&b.space, TOL_ORTHO)?,
        residual,
    })
}

/// `H_Σ ⊆ L∞(G)` and `H̃_Σ ⊆ B(ℓ²(G))`, the fixed spaces of the `Θr(σ)`,
/// computed as the null sets of `σ − ε`.
#[derive(Clone, Debug)]
pub struct HarmonicReport {
    pub h: MatSubspace,
    pub h_big: MatSubspace,
    /// `Bim(H_Σ) = H̃_Σ`.
    pub bim_equal: bool,
    pub residual: f64,
}

pub fn harmonic(q: &FiniteQuantumGroup, sigma: &[Functional]) -> Result<HarmonicReport> {
    let eps = Functional::counit(q.primal());
    let shifted: Vec<Functional> = sigma.iter().map(|s| s.sub(&eps)).collect::<Result<_>>()?;
    let h = null_set(q, &shifted)?;
    let h_big = null_set_big(q, &shifted)?.space;
    let b = bim(q, &h)?;
    Ok(HarmonicReport { bim_equal: b.space.equals(&h_big, TOL_ORTHO)?, residual: b.space.equality_residual(&h_big)?, h, h_big })
}

/// One to three random elements of one random ideal, so that `L¹⋆Σ` is
/// usually proper.
pub fn random_sigma(q: &FiniteQuantumGroup, rng: &mut impl Rng) -> Result<Vec<Functional>> {
    let j = random_ideal(q, rng)?;
    let basis = j.functionals();
    let count = rng.gen_range(1..=3);
    (0..count)
        .map(|_| {
            let mut coords = vec![c(0.0, 0.0); q.dim()];
            for b in &basis {
                let r = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                for (o, z) in coords.iter_mut().zip(b.coords()) {
                    *o += r * z;
                }
            }
            Functional::new(q.primal(), coords)
        })
        .collect()
}

/// `Ran(J) = span{Θr(f)_*(ρ) : f ∈ J, ρ ∈ T(ℓ²(G))}`, as densities paired
/// with `B(ℓ²(G))` by `tr(ρ T)`.
pub fn ran(j: &LeftIdeal) -> Result<MatSubspace> {
    let d = j.host().dim();
    span((d, d), &ran_densities(j)?, TOL_RANK)
}

fn ran_densities(j: &LeftIdeal) -> Result<Vec<CMatrix>> {
    let q = j.host();
    let d = q.dim();
    let mut out = Vec::new();
    for f in j.functionals() {
        let m = theta_r(q, &f)?;
        for r in 0..d {
            for s in 0..d {
                out.push(predual(&m, &CMatrix::unit(d, d, r, s)));
            }
        }
    }
    Ok(out)
}

/// A named identity between subspaces.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    pub residual: f64,
}

impl Verdict {
    fn compare(name: &str, a: &MatSubspace, b: &MatSubspace) -> Result<Self> {
        Ok(Self { name: name.into(), holds: a.equals(b, TOL_ORTHO)?, residual: a.equality_residual(b)? })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub verdicts: Vec<Verdict>,
}

impl LatticeReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

/// The join, meet and range identities for a pair of ideals on one host.
pub fn lattice_ops(j1: &LeftIdeal, j2: &LeftIdeal) -> Result<LatticeReport> {
    let q = j1.host();
    let meet = j1.intersect(j2)?;
    let (a1, a2) = (j1.annihilator()?, j2.annihilator()?);
    let (b1, b2) = (bim(q, &a1)?.space, bim(q, &a2)?.space);
    let join_lhs = b1.join(&b2)?;
    let join_rhs = bim(q, &meet.annihilator()?)?.space;
    let meet_lhs = bim(q, &a1.intersect(&a2)?)?.space;
    let meet_rhs = b1.intersect(&b2)?;
    let ran_lhs = ran(j1)?.intersect(&ran(j2)?)?;
    let ran_rhs = ran(&meet)?;
    Ok(LatticeReport {
        verdicts: vec![
            Verdict::compare("bim_join", &join_lhs, &join_rhs)?,
            Verdict::compare("bim_meet", &meet_lhs, &meet_rhs)?,
            Verdict::compare("ran_meet", &ran_lhs, &ran_rhs)?,
        ],
    })
}

/// `tr(ρ T)` pairs trace-class densities with operators. The predual map of
/// `M` sends `ρ` to the `σ` with `tr(σ T) = tr(ρ M(T))`.
fn predual(m: &CMatrix, rho: &CMatrix) -> CMatrix {
    let d = rho.rows();
    let v = m.transpose().apply(rho.transpose().data());
    CMatrix::from_vec(d, d, &v).transpose()
}

/// `{T : tr(ρ T) = 0 for ρ ∈ R}`.
fn lower_perp(shape: (usize, usize), densities: &[CMatrix]) -> Result<MatSubspace> {
    let adj: Vec<CMatrix> = densities.iter().map(CMatrix::adjoint).collect();
    Ok(span(shape, &adj, TOL_RANK)?.complement())
}

/// `RAN(J)_⊥`: the operators annihilated by every `Θr(f)_*(ρ)`.
pub fn ran_perp_predual(j: &LeftIdeal) -> Result<MatSubspace> {
    let d = j.host().dim();
    lower_perp((d, d), &ran_densities(j)?)
}

/// Minimal-norm density `ρ` with `tr(ρ x_k) = f_k` on the basis of `L∞(G)`.
fn density_of(q: &FiniteQuantumGroup, f: &Functional) -> CMatrix {
    let d = q.dim();
    let ops = q.primal().ops();
    let a = CMatrix::from_fn(ops.len(), d * d, |k, i| ops[k].data()[i]);
    let v = dense::pinv(&a, 1e-12).apply(f.coords());
    CMatrix::from_vec(d, d, &v).transpose()
}

/// `J_⊥ ⊆ c₀(G)` through densities: `L∞(G) ∩ {T : tr(ρ_f T) = 0}`.
pub fn lower_annihilator(j: &LeftIdeal) -> Result<MatSubspace> {
    let q = j.host();
    let d = q.dim();
    let dens: Vec<CMatrix> = j.functionals().iter().map(|f| density_of(q, f)).collect();
    if dens.is_empty() {
        return linfty(q);
    }
    linfty(q)?.intersect(&lower_perp((d, d), &dens)?)
}

/// `Bim(J_⊥) ⊆ RAN(J)_⊥` and equality with the predual bookkeeping, plus
/// agreement of `RAN(J)_⊥` with the kernel computation of `Ran(J)⊥`.
#[derive(Clone, Debug, Serialize)]
pub struct CstarReport {
    pub lower_annihilator_dim: usize,
    pub bim_dim: usize,
    pub ranperp_dim: usize,
    pub contained: bool,
    pub equal: bool,
    pub predual_agrees: bool,
    pub residual: f64,
}

impl CstarReport {
    pub fn passed(&self) -> bool {
        self.contained && self.equal && self.predual_agrees
    }
}

pub fn cstar_variants(j: &LeftIdeal) -> Result<CstarReport> {
    let q = j.host();
    let lower = lower_annihilator(j)?;
    let b = bim(q, &lower)?.space;
    let rp = ran_perp_predual(j)?;
    let kernel = ran_perp(j)?.space;
    let r = b.equality_residual(&rp)?;
    Ok(CstarReport {
        lower_annihilator_dim: lower.dim(),
        bim_dim: b.dim(),
        ranperp_dim: rp.dim(),
        contained: rp.containment_residual(&b)? <= TOL_ORTHO,
        equal: b.equals(&rp, TOL_ORTHO)?,
        predual_agrees: rp.equals(&kernel, TOL_ORTHO)?,
        residual: r.max(rp.equality_residual(&kernel)?),
    })
}
