//! Invariant subspaces of a target algebra, their Fubini crossed products
//! and the slice-map property.
//!
//! For an invariant `X ⊆ N` three subspaces of `G ⋉ N` are compared:
//! the span of `α(X)(L∞(Ĝ) ⊗ 1)`, the Fubini crossed product
//! `{T : E(T(v̂ ⊗ 1)) ∈ α(X) for v̂ ∈ Pol(Ĝ)}`, and its dual-action form
//! `{T : T · f̂ ∈ span for every f̂}`. Both Fubini descriptions are solved as
//! linear systems in the coordinates of the crossed product.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{Action, ActionKind, CrossedProduct};
use crate::error::{Error, Result};
use crate::fourier::Functional;
use crate::numerics::{c, dense, span, CMatrix, MatSubspace, C64};
use crate::tolerances::{TOL_MEMBER, TOL_ORTHO, TOL_RANK};

/// Largest residual of `(e_i ⊗ id)α(x)` against `X`, over basis `x` of `X`.
pub fn invariance_residual(a: &Action, x: &MatSubspace) -> f64 {
    let primal = a.host().primal();
    let mut worst: f64 = 0.0;
    for b in x.basis() {
        for part in primal.coordinates().split_first_leg(&a.apply(b)) {
            worst = worst.max(x.residual(&part) / part.norm().max(1.0));
        }
    }
    worst
}

/// Whether `X ⊆ N` and `α(X) ⊆ L∞(G) ⊗ X`.
pub fn check_invariant(a: &Action, x: &MatSubspace) -> Result<bool> {
    let n = span((a.n(), a.n()), a.target_basis(), TOL_RANK)?;
    Ok(n.contains(x, TOL_ORTHO)? && invariance_residual(a, x) <= TOL_MEMBER)
}

/// The smallest invariant subspace containing `x0`: span, then slice
/// `α` against every coordinate functional, until stable.
pub fn orbit_closure(a: &Action, x0: &CMatrix) -> Result<MatSubspace> {
    let shape = (a.n(), a.n());
    let primal = a.host().primal();
    let mut space = span(shape, std::slice::from_ref(x0), TOL_RANK)?;
    loop {
        let mut next = space.basis().to_vec();
        for b in space.basis() {
            for k in 0..primal.dim() {
                next.push(a.module_star(b, &Functional::coordinate(primal, k))?);
            }
        }
        let grown = span(shape, &next, TOL_RANK)?;
        if grown.dim() == space.dim() {
            return Ok(grown);
        }
        space = grown;
    }
}

/// How to choose `X`.
#[derive(Clone, Debug)]
pub enum XChoice {
    /// Orbit closure of a seeded random element of `N`.
    Random(u64),
    Fixed,
    Full,
    Zero,
    /// The span of the given matrices.
    Given(Vec<CMatrix>),
}

impl XChoice {
    /// `random`, `random:<seed>`, `fixed`, `full` or `zero`; anything else
    /// is left to the caller.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(Self::Random(0)),
            "fixed" => Some(Self::Fixed),
            "full" => Some(Self::Full),
            "zero" => Some(Self::Zero),
            _ => s.strip_prefix("random:").and_then(|seed| seed.parse().ok()).map(Self::Random),
        }
    }

    /// The spelling accepted by [`parse`](Self::parse); `given` for an
    /// explicit family.
    pub fn name(&self) -> String {
        match self {
            Self::Random(seed) => format!("random:{seed}"),
            Self::Fixed => "fixed".into(),
            Self::Full => "full".into(),
            Self::Zero => "zero".into(),
            Self::Given(_) => "given".into(),
        }
    }

    pub fn resolve(&self, a: &Action) -> Result<MatSubspace> {
        let shape = (a.n(), a.n());
        match self {
            Self::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let coords: Vec<C64> =
                    (0..a.dim_target()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                orbit_closure(a, &a.target_element(&coords))
            }
            Self::Fixed => a.fixed_points(),
            Self::Full => span(shape, a.target_basis(), TOL_RANK),
            Self::Zero => Ok(MatSubspace::zero(shape.0, shape.1)),
            Self::Given(mats) => span(shape, mats, TOL_RANK),
        }
    }
}

/// `span{α(x)(x̂ ⊗ 1)}`.
pub fn span_crossed(cp: &CrossedProduct, x: &MatSubspace) -> Result<MatSubspace> {
    let a = cp.action();
    let id = CMatrix::identity(a.n());
    let mut gens = Vec::new();
    for b in x.basis() {
        let ab = a.apply(b);
        for y in a.host().dual_side().ops() {
            gens.push(ab.matmul(&y.kron(&id)));
        }
    }
    span((cp.size(), cp.size()), &gens, TOL_RANK)
}

/// Kernel of the stacked coordinate rows, mapped back into the crossed product.
fn solve(cp: &CrossedProduct, rows: Vec<Vec<C64>>) -> Result<MatSubspace> {
    let dm = cp.dim();
    let ker = if rows.is_empty() {
        CMatrix::identity(dm)
    } else {
        let m = CMatrix::from_fn(rows.len(), dm, |r, col| rows[r][col]);
        dense::nullspace_scaled(&m, TOL_RANK)
    };
    let elems: Vec<CMatrix> =
        (0..ker.cols()).map(|t| cp.element(&(0..dm).map(|r| ker.get(r, t)).collect::<Vec<_>>())).collect();
    span((cp.size(), cp.size()), &elems, TOL_RANK)
}

fn unit(len: usize, i: usize) -> Vec<C64> {
    let mut e = vec![c(0.0, 0.0); len];
    e[i] = c(1.0, 0.0);
    e
}

/// `{T ∈ G ⋉ N : E(T(v̂ ⊗ 1)) ∈ α(X) for every coefficient v̂ of every
/// irreducible}`. As `α` is injective, the condition is that the target
/// coordinates `Σ_j t_kj (v̂·φ̂)_j` describe an element orthogonal to `X⊥`.
pub fn fubini_crossed_product(cp: &CrossedProduct, x: &MatSubspace) -> Result<MatSubspace> {
    let a = cp.action();
    let q = a.host();
    let dual = q.dual_side();
    let d = q.dim();
    let m = a.dim_target();
    let perp = x.complement();
    // ⟨p, b_k⟩ for p ⊥ X.
    let overlaps: Vec<Vec<C64>> =
        perp.basis().iter().map(|p| a.target_basis().iter().map(|b| p.hs_inner(b)).collect()).collect();
    let mut rows = Vec::new();
    for irr in q.irreps() {
        for i in 0..irr.dim() {
            for j in 0..irr.dim() {
                let h = Functional::density(dual, irr.coeff_coords(i, j));
                for ov in &overlaps {
                    let mut row = vec![c(0.0, 0.0); d * m];
                    for (k, o) in ov.iter().enumerate() {
                        for (jj, hj) in h.coords().iter().enumerate() {
                            row[k * d + jj] = o * hj;
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    solve(cp, rows)
}

/// `{T ∈ G ⋉ N : T · f̂ ∈ span_crossed(X)}` for f̂ over the coordinate
/// functionals of `L¹(Ĝ)`.
pub fn fubini_via_dual_action(cp: &CrossedProduct, x: &MatSubspace) -> Result<MatSubspace> {
    let dual = cp.action().host().dual_side();
    let dm = cp.dim();
    let target = span_crossed(cp, x)?;
    let target_coords: Vec<CMatrix> =
        target.basis().iter().map(|t| cp.coords(t).map(|v| CMatrix::from_vec(1, dm, &v))).collect::<Result<_>>()?;
    let perp = span((1, dm), &target_coords, TOL_RANK)?.complement();
    let mut rows = Vec::new();
    for j in 0..dual.dim() {
        let f = Functional::coordinate(dual, j);
        let images: Vec<Vec<C64>> = (0..dm)
            .map(|col| cp.coords(&cp.module_action(&cp.element(&unit(dm, col)), &f)?))
            .collect::<Result<_>>()?;
        for p in perp.basis() {
            rows.push((0..dm).map(|col| p.data().iter().zip(&images[col]).map(|(u, v)| u.conj() * v).sum()).collect());
        }
    }
    solve(cp, rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct FubiniReport {
    pub action: String,
    pub kind: ActionKind,
    pub x_dim: usize,
    pub invariant: bool,
    pub span_dim: usize,
    pub fubini_dim: usize,
    /// `span ⊆ Fubini`.
    pub contained: bool,
    /// `span = Fubini`, the slice-map property.
    pub equal: bool,
    /// The two descriptions of the Fubini crossed product agree.
    pub reformulation: bool,
    pub residual: f64,
}

impl FubiniReport {
    pub fn passed(&self) -> bool {
        self.invariant && self.contained && self.equal && self.reformulation
    }
}

/// Runs every comparison for one `(action, X)` pair. A non-invariant `X`
/// is an input error.
pub fn slice_map_check(cp: &CrossedProduct, x: &MatSubspace) -> Result<FubiniReport> {
    let a = cp.action();
    if !check_invariant(a, x)? {
        return Err(Error::Input(format!(
            "subspace is not invariant under {} (residual {:.3e})",
            a.label(),
            invariance_residual(a, x)
        )));
    }
    let sp = span_crossed(cp, x)?;
    let fu = fubini_crossed_product(cp, x)?;
    let re = fubini_via_dual_action(cp, x)?;
    let residual = fu.equality_residual(&sp)?.max(fu.equality_residual(&re)?);
    Ok(FubiniReport {
        action: a.label().to_string(),
        kind: a.kind(),
        x_dim: x.dim(),
        invariant: true,
        span_dim: sp.dim(),
        fubini_dim: fu.dim(),
        contained: fu.contains(&sp, TOL_ORTHO)?,
        equal: fu.equals(&sp, TOL_ORTHO)?,
        reformulation: fu.equals(&re, TOL_ORTHO)?,
        residual,
    })
}

/// The standard choices of `X` for one action: zero, fixed points, full
/// and `orbits` seeded orbit closures.
pub fn standard_cases(a: &Action, orbits: u64) -> Result<Vec<(String, MatSubspace)>> {
    let mut out = vec![
        ("zero".to_string(), XChoice::Zero.resolve(a)?),
        ("fixed".to_string(), XChoice::Fixed.resolve(a)?),
        ("full".to_string(), XChoice::Full.resolve(a)?),
    ];
    for seed in 0..orbits {
        out.push((format!("random:{seed}"), XChoice::Random(seed).resolve(a)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{bundled, crossed_product, trivial_action, BUNDLED};
    use crate::groups::FiniteGroup;
    use crate::qg::FiniteQuantumGroup;
    use std::sync::Arc;

    #[test]
    fn full_fixed_and_zero_are_invariant() {
        for name in BUNDLED {
            let a = bundled(name).unwrap();
            for x in [XChoice::Full, XChoice::Fixed, XChoice::Zero] {
                assert!(check_invariant(&a, &x.resolve(&a).unwrap()).unwrap(), "{name} {x:?}");
            }
        }
    }

    #[test]
    fn a_single_non_constant_function_is_not_invariant_under_translation() {
        let a = bundled("translation-s3").unwrap();
        let x0 = a.target_element(&(0..6).map(|k| c(k as f64, 0.0)).collect::<Vec<_>>());
        let one = span((6, 6), &[x0.clone()], TOL_RANK).unwrap();
        assert!(!check_invariant(&a, &one).unwrap());
        let orbit = orbit_closure(&a, &x0).unwrap();
        assert!(check_invariant(&a, &orbit).unwrap());
        assert!(orbit.dim() > 1 && orbit.contains_matrix(&x0, 1e-10));
    }

    #[test]
    fn trivial_and_full_cases_have_the_expected_dimensions() {
        let a = bundled("translation-s3").unwrap();
        let cp = crossed_product(&a).unwrap();
        let fixed = XChoice::Fixed.resolve(&a).unwrap();
        assert_eq!(fubini_crossed_product(&cp, &fixed).unwrap().dim(), 6 * fixed.dim());
        let full = XChoice::Full.resolve(&a).unwrap();
        assert_eq!(fubini_crossed_product(&cp, &full).unwrap().dim(), cp.dim());
        assert_eq!(fubini_crossed_product(&cp, &XChoice::Zero.resolve(&a).unwrap()).unwrap().dim(), 0);
    }

    #[test]
    fn slice_map_property_on_every_bundled_case() {
        for name in BUNDLED {
            let a = bundled(name).unwrap();
            let cp = crossed_product(&a).unwrap();
            for (label, x) in standard_cases(&a, 3).unwrap() {
                let r = slice_map_check(&cp, &x).unwrap();
                assert!(r.passed(), "{name} {label}: {r:?}");
            }
        }
    }

    #[test]
    fn trivial_action_fubini_is_a_tensor_product() {
        // Any subspace of M_2 is invariant for the trivial action, and the
        // Fubini product is L∞(Ĝ) ⊗ X.
        let q = Arc::new(FiniteQuantumGroup::from_group_algebra(&FiniteGroup::builtin("s3").unwrap()).unwrap());
        let a = trivial_action(q.clone(), 2).unwrap();
        let cp = crossed_product(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let mats: Vec<CMatrix> = (0..2)
            .map(|_| CMatrix::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let x = span((2, 2), &mats, TOL_RANK).unwrap();
        assert!(check_invariant(&a, &x).unwrap());
        let tensors: Vec<CMatrix> =
            q.dual_side().ops().iter().flat_map(|y| mats.iter().map(move |m| y.kron(m))).collect();
        let oracle = span((12, 12), &tensors, TOL_RANK).unwrap();
        assert_eq!(oracle.dim(), 12);
        let fu = fubini_crossed_product(&cp, &x).unwrap();
        assert!(fu.equals(&oracle, 1e-9).unwrap());
    }

    #[test]
    fn non_invariant_input_is_rejected() {
        let a = bundled("translation-s3").unwrap();
        let cp = crossed_product(&a).unwrap();
        let x0 = a.target_element(&(0..6).map(|k| c((k * k) as f64, 0.0)).collect::<Vec<_>>());
        let one = span((6, 6), &[x0], TOL_RANK).unwrap();
        assert!(matches!(slice_map_check(&cp, &one), Err(Error::Input(_))));
    }

    #[test]
    fn parse_choices() {
        assert!(matches!(XChoice::parse("random:7"), Some(XChoice::Random(7))));
        assert!(matches!(XChoice::parse("fixed"), Some(XChoice::Fixed)));
        assert!(XChoice::parse("x.json").is_none());
    }
}
