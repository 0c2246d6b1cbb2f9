//! Characters of dual irreducibles and the expansion of functionals on
//! `L∞(Ĝ)` in matrix coefficients.

use std::io::Write;

use serde::Serialize;

use super::Functional;
use crate::error::{Error, Result};
use crate::numerics::{c, CMatrix, C64};
use crate::qg::FiniteQuantumGroup;

/// `χ^β`, `χ_q^β` and `φ̂_q^β = χ_q^β · φ̂`.
#[derive(Clone, Debug)]
pub struct Characters {
    pub chi: CMatrix,
    pub chi_q: CMatrix,
    pub phi_q: Functional,
}

pub fn characters(q: &FiniteQuantumGroup, beta: usize) -> Result<Characters> {
    let u = q
        .irreps()
        .get(beta)
        .ok_or_else(|| Error::Input(format!("no dual irreducible with index {beta}")))?;
    let dual = q.dual_side();
    let mut chi_q_coords = vec![c(0.0, 0.0); dual.dim()];
    for i in 0..u.dim() {
        for (acc, z) in chi_q_coords.iter_mut().zip(u.coeff_coords(i, i)) {
            *acc += z * u.f_eigs()[i];
        }
    }
    Ok(Characters { chi: u.character(), chi_q: u.q_character(), phi_q: Functional::density(dual, &chi_q_coords) })
}

#[derive(Clone, Debug, Serialize)]
pub struct Coefficient {
    pub beta: usize,
    pub i: usize,
    pub j: usize,
    #[serde(with = "crate::numerics::complex_scalar")]
    pub value: C64,
}

/// `⟨f̂, û^β_ij⟩` over every dual irreducible.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffTable {
    pub entries: Vec<Coefficient>,
}

impl CoeffTable {
    /// Irreducibles with a coefficient above `tol` in modulus.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self.entries.iter().filter(|e| e.value.norm() > tol).map(|e| e.beta).collect();
        out.dedup();
        out
    }

    /// Columns `beta,i,j,re,im`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "beta,i,j,re,im")?;
        for e in &self.entries {
            writeln!(w, "{},{},{},{:e},{:e}", e.beta, e.i, e.j, e.value.re, e.value.im)?;
        }
        Ok(())
    }
}

pub fn coeff_expansion(q: &FiniteQuantumGroup, fhat: &Functional) -> Result<CoeffTable> {
    fhat.check_host(q.dual_side())?;
    let mut entries = Vec::new();
    for (beta, u) in q.irreps().iter().enumerate() {
        for i in 0..u.dim() {
            for j in 0..u.dim() {
                entries.push(Coefficient { beta, i, j, value: fhat.pair(u.coeff_coords(i, j)) });
            }
        }
    }
    Ok(CoeffTable { entries })
}

/// `f̂ = Σ (d_β / λ_j^β) ⟨f̂, û^β_ij⟩ (û^β_ij)* · φ̂`.
pub fn reconstruct(q: &FiniteQuantumGroup, table: &CoeffTable) -> Result<Functional> {
    let dual = q.dual_side();
    let t = dual.tensors();
    let mut out = vec![c(0.0, 0.0); dual.dim()];
    for e in &table.entries {
        let u = q
            .irreps()
            .get(e.beta)
            .ok_or_else(|| Error::Input(format!("no dual irreducible with index {}", e.beta)))?;
        if e.i >= u.dim() || e.j >= u.dim() {
            return Err(Error::Input(format!("coefficient ({}, {}) outside irreducible {}", e.i, e.j, e.beta)));
        }
        let w = e.value * (u.qdim() / u.f_eigs()[e.j]);
        let dens = Functional::density(dual, &t.star_of(u.coeff_coords(e.i, e.j)));
        for (acc, z) in out.iter_mut().zip(dens.coords()) {
            *acc += w * z;
        }
    }
    Functional::new(dual, out)
}
