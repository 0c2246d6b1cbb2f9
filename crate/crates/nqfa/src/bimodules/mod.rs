//! `L∞(Ĝ)`-bimodules in `B(ℓ²(G))` attached to left ideals of `L¹(G)`.
//!
//! The central objects are `Bim(J⊥)`, the bimodule generated by the
//! annihilator of an ideal, and `Ran(J)⊥ = ∩_{f∈J} ker Θr(f)`. Both are
//! computed as subspaces and compared. The null sets, harmonic operators,
//! lattice identities and the norm-closed variants live in [`nullsets`].

mod ideals;
mod nullsets;

pub use ideals::{
    characters_of_commutative, enumerate_ideals, ideal_from_generators, is_commutative, pre_annihilator, random_ideal,
    random_ideals, LeftIdeal, MAX_ENUMERATED,
};
pub use nullsets::{
    check_null_sets, cstar_variants, harmonic, lattice_ops, lower_annihilator, null_set, null_set_big, ran,
    ran_perp_predual, random_sigma, CstarReport, HarmonicReport, LatticeReport, NullSetReport, Verdict,
};

use serde::Serialize;

use crate::error::Result;
use crate::fourier::{apply_map, theta_l, theta_l_op_dual, theta_r, Functional};
use crate::numerics::{common_nullspace, span, CMatrix, MatSubspace};
use crate::qg::FiniteQuantumGroup;
use crate::tolerances::{TOL_MEMBER, TOL_ORTHO, TOL_RANK};

/// How a bimodule was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    BimOfAnnihilator,
    Ranperp,
    Nullset,
    Harmonic,
    User,
}

/// A subspace of `B(ℓ²(G))` expected to be an `L∞(Ĝ)`-bimodule invariant
/// under every `Θ̂ℓop(f̂)`.
#[derive(Clone, Debug)]
pub struct InvariantBimodule {
    pub space: MatSubspace,
    pub provenance: Provenance,
}

impl InvariantBimodule {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Largest residual of `x̂ T ŷ` over basis elements.
    pub fn bimodule_residual(&self, q: &FiniteQuantumGroup) -> f64 {
        bimodule_violation(q, &self.space).map_or(0.0, |v| v.residual())
    }

    /// Largest residual of `Θ̂ℓop(ŷ_j)(T)` over basis elements.
    pub fn invariance_residual(&self, q: &FiniteQuantumGroup) -> f64 {
        invariance_violation(q, &self.space).map_or(0.0, |v| v.residual())
    }
}

/// Witness that a subspace is not jointly invariant; indices refer to the
/// subspace basis and the bases of `L∞(Ĝ)` and `L¹(Ĝ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotBimodule { basis: usize, left: usize, right: usize, residual: f64 },
    NotInvariant { basis: usize, functional: usize, residual: f64 },
}

impl Violation {
    pub fn residual(&self) -> f64 {
        match self {
            Violation::NotBimodule { residual, .. } | Violation::NotInvariant { residual, .. } => *residual,
        }
    }
}

/// Projection residual scaled by `max(‖x‖, 1)`; images of unit basis
/// vectors may vanish up to rounding, where a purely relative test is noise.
fn member_residual(u: &MatSubspace, x: &CMatrix) -> f64 {
    u.residual(x) / x.norm().max(1.0)
}

/// The worst `x̂ T ŷ`, or `None` when every product stays inside.
fn bimodule_violation(q: &FiniteQuantumGroup, u: &MatSubspace) -> Option<Violation> {
    let ys = q.dual_side().ops();
    let mut worst: Option<Violation> = None;
    for (b, t) in u.basis().iter().enumerate() {
        for (l, x) in ys.iter().enumerate() {
            let xt = x.matmul(t);
            for (r, y) in ys.iter().enumerate() {
                let residual = member_residual(u, &xt.matmul(y));
                if worst.as_ref().map_or(true, |w| residual > w.residual()) {
                    worst = Some(Violation::NotBimodule { basis: b, left: l, right: r, residual });
                }
            }
        }
    }
    worst.filter(|w| w.residual() > TOL_MEMBER)
}

fn invariance_violation(q: &FiniteQuantumGroup, u: &MatSubspace) -> Option<Violation> {
    let dual = q.dual_side();
    let mut worst: Option<Violation> = None;
    for j in 0..dual.dim() {
        let m = theta_l_op_dual(q, &Functional::coordinate(dual, j)).expect("dual functional");
        for (b, t) in u.basis().iter().enumerate() {
            let residual = member_residual(u, &apply_map(&m, t));
            if worst.as_ref().map_or(true, |w| residual > w.residual()) {
                worst = Some(Violation::NotInvariant { basis: b, functional: j, residual });
            }
        }
    }
    worst.filter(|w| w.residual() > TOL_MEMBER)
}

/// `span{x̂ a ŷ : a ∈ space, x̂, ŷ ∈ L∞(Ĝ)}`.
pub fn bim(q: &FiniteQuantumGroup, space: &MatSubspace) -> Result<InvariantBimodule> {
    let d = q.dim();
    let ys = q.dual_side().ops();
    let mut prods = Vec::with_capacity(space.dim() * ys.len() * ys.len());
    for a in space.basis() {
        for x in ys {
            let xa = x.matmul(a);
            for y in ys {
                prods.push(xa.matmul(y));
            }
        }
    }
    Ok(InvariantBimodule { space: span((d, d), &prods, TOL_RANK)?, provenance: Provenance::BimOfAnnihilator })
}

/// `Ran(J)⊥ = ∩_{f ∈ J} ker Θr(f)`.
pub fn ran_perp(j: &LeftIdeal) -> Result<InvariantBimodule> {
    let q = j.host();
    let d = q.dim();
    let maps: Vec<CMatrix> = j.functionals().iter().map(|f| theta_r(q, f)).collect::<Result<_>>()?;
    Ok(InvariantBimodule { space: common_nullspace((d, d), &maps, TOL_RANK)?, provenance: Provenance::Ranperp })
}

/// `L∞(G)` as a subspace of `B(ℓ²(G))`.
pub fn linfty(q: &FiniteQuantumGroup) -> Result<MatSubspace> {
    span((q.dim(), q.dim()), q.primal().ops(), TOL_RANK)
}

/// Dimensions and verdicts for `Bim(J⊥) ⊆ Ran(J)⊥`, their equality and the
/// trace identity `Bim(J⊥) ∩ L∞(G) = J⊥`.
#[derive(Clone, Debug, Serialize)]
pub struct BimReport {
    pub ideal_dim: usize,
    pub annihilator_dim: usize,
    pub bim_dim: usize,
    pub ranperp_dim: usize,
    pub contained: bool,
    pub equal: bool,
    pub trace_identity: bool,
    pub residual: f64,
}

impl BimReport {
    pub fn passed(&self) -> bool {
        self.contained && self.equal && self.trace_identity
    }
}

pub fn check_bim_equals_ranperp(j: &LeftIdeal) -> Result<BimReport> {
    let q = j.host();
    let ann = j.annihilator()?;
    let b = bim(q, &ann)?;
    let rp = ran_perp(j)?;
    let contain = rp.space.containment_residual(&b.space)?;
    let eq = b.space.equality_residual(&rp.space)?;
    let trace = b.space.intersect(&linfty(q)?)?;
    let tr = trace.equality_residual(&ann)?;
    Ok(BimReport {
        ideal_dim: j.dim(),
        annihilator_dim: ann.dim(),
        bim_dim: b.dim(),
        ranperp_dim: rp.dim(),
        contained: contain <= TOL_ORTHO,
        equal: b.space.equals(&rp.space, TOL_ORTHO)?,
        trace_identity: trace.equals(&ann, TOL_ORTHO)?,
        residual: eq.max(tr),
    })
}

/// Outcome of [`classify_joint_invariant`].
#[derive(Clone, Debug)]
pub enum Classification<'q> {
    /// `U = Bim(J⊥)`; `residual` is the equality residual.
    Ideal { ideal: LeftIdeal<'q>, residual: f64, equal: bool },
    Violation(Violation),
}

/// Either finds `J` with `U = Bim(J⊥)` or returns a violated invariance.
///
/// For an invariant `U` the trace `X = U ∩ L∞(G)` is recovered as the span of
/// `E(T ĝ)` with `E = Θ̂ℓop(φ̂)`, `T` over `U` and `ĝ` over `Pol(Ĝ)`, closed
/// under the left translations `Θℓ(f)`; then `J = X_⊥`.
pub fn classify_joint_invariant<'q>(q: &'q FiniteQuantumGroup, u: &MatSubspace) -> Result<Classification<'q>> {
    if let Some(v) = bimodule_violation(q, u).or_else(|| invariance_violation(q, u)) {
        return Ok(Classification::Violation(v));
    }
    let d = q.dim();
    let e = theta_l_op_dual(q, &Functional::haar(q.dual_side()))?;
    let mut gens = Vec::new();
    for t in u.basis() {
        for irr in q.irreps() {
            for a in 0..irr.dim() {
                for b in 0..irr.dim() {
                    gens.push(apply_map(&e, &t.matmul(irr.coeff(a, b))));
                }
            }
        }
    }
    let primal = q.primal();
    let mut closed = gens.clone();
    for k in 0..primal.dim() {
        let m = theta_l(q, &Functional::coordinate(primal, k))?;
        closed.extend(gens.iter().map(|x| apply_map(&m, x)));
    }
    let x = span((d, d), &closed, TOL_RANK)?;
    let ideal = LeftIdeal::from_space(q, pre_annihilator(q, &x)?)?;
    let rebuilt = bim(q, &ideal.annihilator()?)?;
    let residual = rebuilt.space.equality_residual(u)?;
    let equal = rebuilt.space.equals(u, TOL_ORTHO)?;
    Ok(Classification::Ideal { ideal, residual, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;

    fn host(name: &str, side: &str) -> FiniteQuantumGroup {
        FiniteQuantumGroup::from_group_side(&FiniteGroup::builtin(name).unwrap(), side).unwrap()
    }

    #[test]
    fn bim_of_small_spaces() {
        let q = host("s3", "function");
        let d = q.dim();
        assert_eq!(bim(&q, &MatSubspace::zero(d, d)).unwrap().dim(), 0);
        let one = span((d, d), &[CMatrix::identity(d)], TOL_RANK).unwrap();
        let dual = span((d, d), q.dual_side().ops(), TOL_RANK).unwrap();
        assert!(bim(&q, &one).unwrap().space.equals(&dual, 1e-9).unwrap());
        assert_eq!(bim(&q, &linfty(&q).unwrap()).unwrap().dim(), d * d);
    }

    #[test]
    fn ran_perp_of_trivial_ideals() {
        let q = host("c4", "function");
        assert_eq!(ran_perp(&LeftIdeal::zero(&q)).unwrap().dim(), 16);
        assert_eq!(ran_perp(&LeftIdeal::whole(&q)).unwrap().dim(), 0);
    }

    #[test]
    fn z4_two_dimensional_ideals_have_eight_dimensional_ran_perp() {
        let q = host("c4", "function");
        for j in enumerate_ideals(&q).unwrap().iter().filter(|j| j.dim() == 2) {
            assert_eq!(ran_perp(j).unwrap().dim(), 8);
        }
    }

    #[test]
    fn bim_equals_ran_perp_on_every_z4_ideal() {
        let q = host("c4", "function");
        for j in enumerate_ideals(&q).unwrap() {
            let r = check_bim_equals_ranperp(&j).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn bim_equals_ran_perp_on_random_ideals() {
        for side in ["function", "group"] {
            let q = host("s3", side);
            for j in random_ideals(&q, 20, 11).unwrap() {
                let r = check_bim_equals_ranperp(&j).unwrap();
                assert!(r.passed(), "{side}: {r:?}");
            }
        }
    }

    #[test]
    fn constructed_bimodules_are_invariant() {
        let q = host("s3", "function");
        for j in random_ideals(&q, 5, 12).unwrap() {
            let b = bim(&q, &j.annihilator().unwrap()).unwrap();
            let rp = ran_perp(&j).unwrap();
            assert!(b.bimodule_residual(&q) <= 1e-9 && rp.bimodule_residual(&q) <= 1e-9);
            assert!(b.invariance_residual(&q) <= 1e-9 && rp.invariance_residual(&q) <= 1e-9);
        }
    }

    #[test]
    fn classifier_round_trips_z4_ideals() {
        let q = host("c4", "function");
        for j in enumerate_ideals(&q).unwrap() {
            let u = ran_perp(&j).unwrap().space;
            match classify_joint_invariant(&q, &u).unwrap() {
                Classification::Ideal { ideal, equal, .. } => {
                    assert!(equal);
                    assert!(ideal.annihilator().unwrap().equals(&j.annihilator().unwrap(), 1e-9).unwrap());
                }
                Classification::Violation(v) => panic!("unexpected violation {v:?}"),
            }
        }
    }

    #[test]
    fn classifier_of_everything_is_the_zero_ideal() {
        let q = host("s3", "group");
        let d = q.dim();
        match classify_joint_invariant(&q, &MatSubspace::full(d, d)).unwrap() {
            Classification::Ideal { ideal, equal, .. } => assert!(equal && ideal.dim() == 0),
            Classification::Violation(v) => panic!("{v:?}"),
        }
    }

    #[test]
    fn off_diagonal_unit_is_not_a_bimodule() {
        let q = host("c4", "function");
        let u = span((4, 4), &[CMatrix::unit(4, 4, 0, 1)], TOL_RANK).unwrap();
        match classify_joint_invariant(&q, &u).unwrap() {
            Classification::Violation(v @ Violation::NotBimodule { .. }) => assert!(v.residual() > 0.1),
            other => panic!("expected a bimodule violation, got {other:?}"),
        }
    }

    #[test]
    fn multiplier_invariance_is_checked_separately() {
        let q = host("c4", "function");
        let (a, ys) = (&q.primal().ops()[0], q.dual_side().ops());
        let u = span((4, 4), &[&a.matmul(&ys[1]) + &ys[2]], TOL_RANK).unwrap();
        assert!(matches!(invariance_violation(&q, &u), Some(Violation::NotInvariant { .. })));
        let dual = span((4, 4), ys, TOL_RANK).unwrap();
        assert!(invariance_violation(&q, &dual).is_none() && bimodule_violation(&q, &dual).is_none());
    }
}
