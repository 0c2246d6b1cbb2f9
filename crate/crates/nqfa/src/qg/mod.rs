//! Finite quantum groups realised on the GNS space of their Haar state.
//!
//! A [`FiniteQuantumGroup`] is built from [`StructureTensors`]. Construction
//! validates the Hopf axioms, forms `ℓ²(G)`, the fundamental unitaries `W`,
//! `V` and `Ŵ = σW*σ`, the dual algebra `L∞(Ĝ) = span{(f ⊗ id)(W)}` on the
//! same space, and the irreducible corepresentations of the dual.

mod peter_weyl;
mod tensors;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use serde::Serialize;

pub use peter_weyl::{DualIrrep, PeterWeylReport};
pub use tensors::{AxiomCheck, StructureTensors};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::limits::Limits;
use crate::numerics::{c, dense, CMatrix, Coordinates, C64};
use crate::tolerances::TOL_AXIOM;

static NEXT_KEY: AtomicU64 = AtomicU64::new(1);

/// Where a quantum group came from; decides how its dual irreps are found.
#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    FunctionAlgebra(FiniteGroup),
    GroupAlgebra(FiniteGroup),
    Tensors,
    Dual(String),
}

/// One of the two Hopf algebras acting on `ℓ²(G)`: `L∞(G)` (the primal
/// side) or `L∞(Ĝ)` (the dual side), with a basis of operators.
#[derive(Clone, Debug)]
pub struct HopfSide {
    key: u64,
    tensors: StructureTensors,
    unit: Vec<C64>,
    coords: Coordinates,
}

impl HopfSide {
    fn new(tensors: StructureTensors, unit: Vec<C64>, ops: Vec<CMatrix>) -> Self {
        let key = NEXT_KEY.fetch_add(1, Ordering::Relaxed);
        let coords = Coordinates::new(&ops);
        Self { key, tensors, unit, coords }
    }

    /// Identifies the side so that functionals from different hosts are
    /// not mixed.
    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn dim(&self) -> usize {
        self.tensors.dim
    }

    pub fn tensors(&self) -> &StructureTensors {
        &self.tensors
    }

    pub fn unit(&self) -> &[C64] {
        &self.unit
    }

    /// Basis operators on `ℓ²(G)`.
    pub fn ops(&self) -> &[CMatrix] {
        self.coords.family()
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coords
    }

    /// The operator with the given coordinates.
    pub fn element(&self, x: &[C64]) -> CMatrix {
        self.coords.combine(x)
    }

    /// Coordinates of an operator in the algebra, with the residual.
    pub fn coords_of(&self, op: &CMatrix) -> (Vec<C64>, f64) {
        self.coords.coords_checked(op)
    }

    /// Haar state evaluated on an operator of the algebra.
    pub fn haar_op(&self, op: &CMatrix) -> C64 {
        self.tensors.haar_of(&self.coords.coords(op))
    }

    /// `(f ⊗ id)(X)` for `X` whose first leg lies in this algebra.
    pub fn slice_first(&self, x: &CMatrix, f: &[C64]) -> CMatrix {
        let parts = self.coords.split_first_leg(x);
        combine(&parts, f)
    }

    /// `(id ⊗ f)(X)` for `X` whose second leg lies in this algebra.
    pub fn slice_second(&self, x: &CMatrix, f: &[C64]) -> CMatrix {
        let parts = self.coords.split_second_leg(x);
        combine(&parts, f)
    }
}

fn combine(parts: &[CMatrix], f: &[C64]) -> CMatrix {
    let (r, cl) = parts.first().map_or((0, 0), |m| m.shape());
    let mut out = CMatrix::zeros(r, cl);
    for (p, z) in parts.iter().zip(f) {
        out.add_scaled(*z, p);
    }
    out
}

/// Residuals of the constructions made on `ℓ²(G)`.
#[derive(Clone, Debug, Serialize)]
pub struct UnitaryReport {
    pub w_unitary: f64,
    pub w_pentagon: f64,
    pub w_implements_comult: f64,
    pub v_unitary: f64,
    pub v_pentagon: f64,
    pub v_implements_comult: f64,
    pub w_hat_is_flipped_adjoint: f64,
    pub gns_representation: f64,
}

impl UnitaryReport {
    pub fn max(&self) -> f64 {
        [
            self.w_unitary,
            self.w_pentagon,
            self.w_implements_comult,
            self.v_unitary,
            self.v_pentagon,
            self.v_implements_comult,
            self.w_hat_is_flipped_adjoint,
            self.gns_representation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Default)]
pub(crate) struct Caches {
    pub theta_r: OnceLock<Vec<CMatrix>>,
    pub theta_l: OnceLock<Vec<CMatrix>>,
    pub theta_hat: OnceLock<Vec<CMatrix>>,
    pub mixed_inverse: OnceLock<CMatrix>,
}

/// A finite quantum group together with its dual, both acting on `ℓ²(G)`.
pub struct FiniteQuantumGroup {
    label: String,
    origin: Origin,
    primal: HopfSide,
    dual: HopfSide,
    /// `L = G^{1/2}` maps algebra coordinates to `ℓ²` coordinates of `Λ(x)`.
    gns: CMatrix,
    w: CMatrix,
    v: CMatrix,
    w_hat: CMatrix,
    /// `V = Σ_i Z_i ⊗ e_i`.
    v_legs: Vec<CMatrix>,
    axioms: Vec<AxiomCheck>,
    dual_axioms: Vec<AxiomCheck>,
    unitaries: UnitaryReport,
    irreps: Vec<DualIrrep>,
    pub(crate) caches: Caches,
}

impl std::fmt::Debug for FiniteQuantumGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteQuantumGroup").field("label", &self.label).field("dim", &self.dim()).finish()
    }
}

/// Embeds an operator on legs `(a, b)` of `(C^d)^{⊗3}`.
pub fn leg3(x: &CMatrix, d: usize, legs: (usize, usize)) -> CMatrix {
    let id = CMatrix::identity(d);
    match legs {
        (0, 1) => x.kron(&id),
        (1, 2) => id.kron(x),
        (1, 0) => {
            let s = CMatrix::swap(d, d);
            s.matmul(x).matmul(&s).kron(&id)
        }
        (2, 1) => {
            let s = CMatrix::swap(d, d);
            id.kron(&s.matmul(x).matmul(&s))
        }
        (0, 2) | (2, 0) => {
            let s23 = id.kron(&CMatrix::swap(d, d));
            let inner = if legs == (0, 2) { x.clone() } else {
                let s = CMatrix::swap(d, d);
                s.matmul(x).matmul(&s)
            };
            s23.matmul(&inner.kron(&id)).matmul(&s23)
        }
        _ => panic!("leg3: invalid legs {legs:?}"),
    }
}

impl FiniteQuantumGroup {
    /// `C(Γ)` with `Γf(s, t) = f(st)`.
    pub fn from_function_algebra(g: &FiniteGroup) -> Result<Self> {
        Self::build(
            StructureTensors::function_algebra(g),
            format!("C({})", g.name()),
            Origin::FunctionAlgebra(g.clone()),
        )
    }

    /// `CΓ` with `Γ(λ_s) = λ_s ⊗ λ_s`.
    pub fn from_group_algebra(g: &FiniteGroup) -> Result<Self> {
        Self::build(
            StructureTensors::group_algebra(g),
            format!("C[{}]", g.name()),
            Origin::GroupAlgebra(g.clone()),
        )
    }

    /// Arbitrary structure tensors; every failed axiom is reported by name.
    pub fn from_structure_tensors(t: StructureTensors) -> Result<Self> {
        Self::build(t, "tensors".into(), Origin::Tensors)
    }

    /// Resolves `<name>` and `side` (`function` or `group`) to a quantum group.
    pub fn from_group_side(g: &FiniteGroup, side: &str) -> Result<Self> {
        match side {
            "function" => Self::from_function_algebra(g),
            "group" => Self::from_group_algebra(g),
            other => Err(Error::Input(format!("unknown side `{other}`; expected function or group"))),
        }
    }

    /// As [`from_group_side`](Self::from_group_side) with explicit limits
    /// instead of the environment.
    pub fn from_group_side_with(g: &FiniteGroup, side: &str, limits: &Limits) -> Result<Self> {
        let (t, label, origin) = match side {
            "function" => (StructureTensors::function_algebra(g), format!("C({})", g.name()), Origin::FunctionAlgebra(g.clone())),
            "group" => (StructureTensors::group_algebra(g), format!("C[{}]", g.name()), Origin::GroupAlgebra(g.clone())),
            other => return Err(Error::Input(format!("unknown side `{other}`; expected function or group"))),
        };
        Self::build_with(t, label, origin, limits)
    }

    fn build(tensors: StructureTensors, label: String, origin: Origin) -> Result<Self> {
        Self::build_with(tensors, label, origin, &Limits::from_env())
    }

    fn build_with(tensors: StructureTensors, label: String, origin: Origin, limits: &Limits) -> Result<Self> {
        let d = tensors.dim;
        limits.check_l2(d)?;
        let axioms = tensors.validate(TOL_AXIOM)?;
        let (unit, _) = tensors.unit();

        let (l, l_inv) = dense::sqrt_pd(&tensors.gram())?;
        let pi: Vec<CMatrix> = (0..d)
            .map(|i| {
                let m = CMatrix::from_fn(d, d, |k, j| tensors.mult.get(k, i * d + j));
                l.matmul(&m).matmul(&l_inv)
            })
            .collect();
        let ll = l.kron(&l);
        let ll_inv = l_inv.kron(&l_inv);

        // W*(Λa ⊗ Λb) = (Λ ⊗ Λ)(Γ(b)(a ⊗ 1)).
        let mut w_star = CMatrix::zeros(d * d, d * d);
        // V(Λa ⊗ Λb) = (Λ ⊗ Λ)(Γ(a)(1 ⊗ b)).
        let mut v = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let cb = tensors.comult.get(i * d + j, b);
                        if cb != c(0.0, 0.0) {
                            for k in 0..d {
                                let m = tensors.mult.get(k, i * d + a);
                                if m != c(0.0, 0.0) {
                                    let z = w_star.get(k * d + j, a * d + b) + cb * m;
                                    w_star.set(k * d + j, a * d + b, z);
                                }
                            }
                        }
                        let ca = tensors.comult.get(i * d + j, a);
                        if ca != c(0.0, 0.0) {
                            for k in 0..d {
                                let m = tensors.mult.get(k, j * d + b);
                                if m != c(0.0, 0.0) {
                                    let z = v.get(i * d + k, a * d + b) + ca * m;
                                    v.set(i * d + k, a * d + b, z);
                                }
                            }
                        }
                    }
                }
            }
        }
        let w = ll.matmul(&w_star).matmul(&ll_inv).adjoint();
        let v = ll.matmul(&v).matmul(&ll_inv);
        let sigma = CMatrix::swap(d, d);
        let w_hat = sigma.matmul(&w.adjoint()).matmul(&sigma);

        let primal = HopfSide::new(tensors, unit, pi);
        let unitaries = check_unitaries(&primal, &w, &v, &w_hat);
        if !(unitaries.max() <= TOL_AXIOM) {
            let named = [
                ("fundamental unitary", unitaries.w_unitary),
                ("pentagon", unitaries.w_pentagon),
                ("comultiplication implemented by W", unitaries.w_implements_comult),
                ("right fundamental unitary", unitaries.v_unitary),
                ("pentagon for V", unitaries.v_pentagon),
                ("comultiplication implemented by V", unitaries.v_implements_comult),
                ("GNS representation", unitaries.gns_representation),
            ];
            let (name, r) = named.into_iter().find(|(_, r)| !(*r <= TOL_AXIOM)).unwrap_or(("unitaries", unitaries.max()));
            return Err(Error::axiom(name, r));
        }

        // L∞(Ĝ) has the basis ŷ_i = (ε_i ⊗ id)(W), ε_i the coordinate functionals.
        let y_hat = primal.coordinates().split_first_leg(&w);
        let v_legs = primal.coordinates().split_second_leg(&v);
        let dual_side_ops = Coordinates::new(&y_hat);
        let dual_tensors = dual_tensors(&primal, &dual_side_ops, &w_hat)?;
        let dual_axioms = dual_tensors.validate(TOL_AXIOM).map_err(|e| match e {
            Error::Axiom { axiom, residual } => Error::axiom(format!("dual {axiom}"), residual),
            other => other,
        })?;
        let (dual_unit, _) = dual_tensors.unit();
        let dual = HopfSide::new(dual_tensors, dual_unit, y_hat);

        let mut q = Self {
            label,
            origin,
            primal,
            dual,
            gns: l,
            w,
            v,
            w_hat,
            v_legs,
            axioms,
            dual_axioms,
            unitaries,
            irreps: Vec::new(),
            caches: Caches::default(),
        };
        q.irreps = peter_weyl::compute_irreps(&q)?;
        Ok(q)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// `dim ℓ²(G) = dim L∞(G) = dim L∞(Ĝ)`.
    pub fn dim(&self) -> usize {
        self.primal.dim()
    }

    /// `L∞(G)` acting on `ℓ²(G)`.
    pub fn primal(&self) -> &HopfSide {
        &self.primal
    }

    /// `L∞(Ĝ)` acting on `ℓ²(G)`.
    pub fn dual_side(&self) -> &HopfSide {
        &self.dual
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn w_hat(&self) -> &CMatrix {
        &self.w_hat
    }

    /// `Λ(x)` in orthonormal coordinates of `ℓ²(G)`.
    pub fn gns_vector(&self, x: &[C64]) -> Vec<C64> {
        self.gns.apply(x)
    }

    pub fn axioms(&self) -> &[AxiomCheck] {
        &self.axioms
    }

    pub fn dual_axioms(&self) -> &[AxiomCheck] {
        &self.dual_axioms
    }

    pub fn unitary_report(&self) -> &UnitaryReport {
        &self.unitaries
    }

    /// Irreducible corepresentations of the dual, the trivial one first.
    pub fn irreps(&self) -> &[DualIrrep] {
        &self.irreps
    }

    /// `Γ(x) = W*(1 ⊗ x)W` for any `x ∈ B(ℓ²)`.
    pub fn conj_w(&self, x: &CMatrix) -> CMatrix {
        let d = self.dim();
        self.w.adjoint().matmul(&CMatrix::identity(d).kron(x)).matmul(&self.w)
    }

    /// `V(x ⊗ 1)V*` for any `x ∈ B(ℓ²)`.
    pub fn conj_v(&self, x: &CMatrix) -> CMatrix {
        let d = self.dim();
        self.v.matmul(&x.kron(&CMatrix::identity(d))).matmul(&self.v.adjoint())
    }

    /// `Γ̂(x̂) = Ŵ*(1 ⊗ x̂)Ŵ`.
    pub fn conj_w_hat(&self, x: &CMatrix) -> CMatrix {
        let d = self.dim();
        self.w_hat.adjoint().matmul(&CMatrix::identity(d).kron(x)).matmul(&self.w_hat)
    }

    /// `λ(f) = (f ⊗ id)(W)`.
    pub fn lambda(&self, f: &[C64]) -> CMatrix {
        self.dual.element(f)
    }

    /// `ρ(f) = (id ⊗ f)(V)`.
    pub fn rho(&self, f: &[C64]) -> CMatrix {
        combine(&self.v_legs, f)
    }

    /// Anti-unitary `J Λ(x) = Λ(x*)` written as `J ξ = K ξ̄`; returns `K`.
    pub fn modular_conjugation(&self) -> CMatrix {
        let t = self.primal.tensors();
        let l_inv = dense::inverse(&self.gns).expect("GNS map is invertible");
        self.gns.matmul(&t.star).matmul(&l_inv.conj())
    }

    /// The fundamental unitary of `Ĝ^op`, `W̃ = σ(J ⊗ J)W*(J ⊗ J)σ`.
    pub fn w_tilde(&self) -> CMatrix {
        let d = self.dim();
        let k = self.modular_conjugation();
        let kk = k.kron(&k);
        // (J ⊗ J) X (J ⊗ J) = (K ⊗ K) X̄ (K ⊗ K)‾.
        let jj = kk.matmul(&self.w.adjoint().conj()).matmul(&kk.conj());
        let s = CMatrix::swap(d, d);
        s.matmul(&jj).matmul(&s)
    }

    /// The dual quantum group as an abstract object with its own GNS space.
    pub fn dual(&self) -> Result<Self> {
        // Same dimension as `self`, which has already passed its cap.
        let mut limits = Limits::from_env();
        limits.max_l2_dim = limits.max_l2_dim.max(self.dim());
        Self::build_with(
            self.dual.tensors().clone(),
            format!("dual of {}", self.label),
            Origin::Dual(self.label.clone()),
            &limits,
        )
    }

    /// Peter–Weyl orthogonality and completeness residuals.
    pub fn peter_weyl_report(&self) -> PeterWeylReport {
        peter_weyl::report(self)
    }
}

fn check_unitaries(primal: &HopfSide, w: &CMatrix, v: &CMatrix, w_hat: &CMatrix) -> UnitaryReport {
    let d = primal.dim();
    let t = primal.tensors();
    let pentagon = |x: &CMatrix| {
        let l = leg3(x, d, (0, 1)).matmul(&leg3(x, d, (0, 2))).matmul(&leg3(x, d, (1, 2)));
        let r = leg3(x, d, (1, 2)).matmul(&leg3(x, d, (0, 1)));
        l.dist(&r)
    };
    let mut w_impl: f64 = 0.0;
    let mut v_impl: f64 = 0.0;
    let mut gns: f64 = 0.0;
    let id = CMatrix::identity(d);
    for i in 0..d {
        let x = &primal.ops()[i];
        let mut gamma = CMatrix::zeros(d * d, d * d);
        for p in 0..d {
            for q in 0..d {
                let z = t.comult.get(p * d + q, i);
                if z != c(0.0, 0.0) {
                    gamma.add_scaled(z, &primal.ops()[p].kron(&primal.ops()[q]));
                }
            }
        }
        let via_w = w.adjoint().matmul(&id.kron(x)).matmul(w);
        let via_v = v.matmul(&x.kron(&id)).matmul(&v.adjoint());
        w_impl = w_impl.max(via_w.dist(&gamma));
        v_impl = v_impl.max(via_v.dist(&gamma));
        // π is a *-representation: π(e_i)* = π(e_i*).
        let mut ei = vec![c(0.0, 0.0); d];
        ei[i] = c(1.0, 0.0);
        gns = gns.max(x.adjoint().dist(&primal.element(&t.star_of(&ei))));
    }
    let sigma = CMatrix::swap(d, d);
    UnitaryReport {
        w_unitary: w.unitarity_residual(),
        w_pentagon: pentagon(w),
        w_implements_comult: w_impl,
        v_unitary: v.unitarity_residual(),
        v_pentagon: pentagon(v),
        v_implements_comult: v_impl,
        w_hat_is_flipped_adjoint: w_hat.dist(&sigma.matmul(&w.adjoint()).matmul(&sigma)),
        gns_representation: gns,
    }
}

/// Structure tensors of `L∞(Ĝ)` against the basis `ŷ_i = λ(ε_i)`.
fn dual_tensors(primal: &HopfSide, ops: &Coordinates, w_hat: &CMatrix) -> Result<StructureTensors> {
    let d = primal.dim();
    let y = ops.family();
    let mut mult = CMatrix::zeros(d, d * d);
    let mut star = CMatrix::zeros(d, d);
    let mut comult = CMatrix::zeros(d * d, d);
    let mut worst: f64 = 0.0;
    let id = CMatrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            let (cc, r) = ops.coords_checked(&y[i].matmul(&y[j]));
            worst = worst.max(r);
            for k in 0..d {
                mult.set(k, i * d + j, cc[k]);
            }
        }
        let (cs, r) = ops.coords_checked(&y[i].adjoint());
        worst = worst.max(r);
        for k in 0..d {
            star.set(k, i, cs[k]);
        }
        let g = w_hat.adjoint().matmul(&id.kron(&y[i])).matmul(w_hat);
        let parts = ops.split_first_leg(&g);
        let mut rebuilt = CMatrix::zeros(d * d, d * d);
        for (p, part) in parts.iter().enumerate() {
            let (cq, _) = ops.coords_checked(part);
            for (q, z) in cq.iter().enumerate() {
                comult.set(p * d + q, i, *z);
                rebuilt.add_scaled(*z, &y[p].kron(&y[q]));
            }
        }
        worst = worst.max(rebuilt.dist(&g));
    }
    if worst > TOL_AXIOM {
        return Err(Error::axiom("dual algebra closure", worst));
    }
    // ε̂(λ(f)) = f(1).
    let counit = primal.unit().to_vec();
    let mut t = StructureTensors {
        dim: d,
        mult,
        star,
        comult,
        counit,
        antipode: CMatrix::zeros(d, d),
        haar: vec![c(0.0, 0.0); d],
    };
    let (unit, ur) = t.unit();
    if ur > TOL_AXIOM {
        return Err(Error::axiom("dual unit", ur));
    }
    let (s, sr) = t.solve_antipode(&unit);
    if sr > TOL_AXIOM {
        return Err(Error::axiom("dual antipode", sr));
    }
    let (h, hr) = t.solve_haar(&unit);
    if hr > TOL_AXIOM {
        return Err(Error::axiom("dual haar invariance", hr));
    }
    t.antipode = s;
    t.haar = h;
    Ok(t)
}
