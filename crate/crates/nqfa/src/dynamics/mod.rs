//! Actions of a finite quantum group on matrix algebras, crossed products,
//! the dual action and Fejér reconstruction.
//!
//! The target `N ⊂ M_n` is given by a basis `b_1, …, b_m` and the action by
//! the coordinates of `α(b_k) = Σ_{i,l} a_{(i·m + l), k} e_i ⊗ b_l`, where
//! `e_i` is the basis of `L∞(G)`.

mod crossed;
mod fejer;

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use crossed::{crossed_product, CrossedProduct};
pub use fejer::{
    fejer_partial, fejer_reconstruct, fejer_term, spectral_projection, spectral_projection_from_e_data,
    FejerReport,
};

use crate::error::{Error, Result};
use crate::fourier::Functional;
use crate::groups::FiniteGroup;
use crate::limits::Limits;
use crate::numerics::{c, dense, span, CMatrix, Coordinates, MatSubspace, C64};
use crate::qg::FiniteQuantumGroup;
use crate::tolerances::{TOL_IDENTITY, TOL_RANK};

/// Names of the actions shipped with the crate.
pub const BUNDLED: [&str; 4] = ["trivial-m2", "translation-s3", "dual-s3-canonical", "c4-trivial-c"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    VonNeumann,
    Cstar,
}

/// One axiom of an action with its residual; `witness` names the pair of
/// basis elements where a pairwise identity is worst.
#[derive(Clone, Debug, Serialize)]
pub struct ActionCheck {
    pub name: &'static str,
    pub residual: f64,
    pub witness: Option<(usize, usize)>,
}

impl ActionCheck {
    fn tol(&self) -> f64 {
        match self.name {
            // Rank defects, counted in dimensions.
            "injective" | "podles" => 0.5,
            _ => TOL_IDENTITY,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tol()
    }
}

/// A validated action `α: N → L∞(G) ⊗ N`.
#[derive(Clone, Debug)]
pub struct Action {
    host: Arc<FiniteQuantumGroup>,
    label: String,
    n: usize,
    basis: Coordinates,
    alpha: CMatrix,
    images: Vec<CMatrix>,
    kind: ActionKind,
    checks: Vec<ActionCheck>,
}

/// On-disk form of an action. `group` is a builtin name or a path to a group
/// file, resolved relative to the action file. Without `target_basis` the
/// target is all of `M_n` with the matrix-unit basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionFile {
    pub group: String,
    pub side: String,
    pub target_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_basis: Option<Vec<CMatrix>>,
    pub alpha: CMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ActionKind>,
}

fn matrix_units(n: usize) -> Vec<CMatrix> {
    (0..n * n).map(|k| CMatrix::unit(n, n, k / n, k % n)).collect()
}

/// `Σ v_{i·m + l} e_i ⊗ b_l`.
fn tensor_element(host: &FiniteQuantumGroup, basis: &[CMatrix], v: &[C64]) -> CMatrix {
    let (d, m) = (host.dim(), basis.len());
    let n = basis[0].rows();
    let mut out = CMatrix::zeros(d * n, d * n);
    for i in 0..d {
        let mut right = CMatrix::zeros(n, n);
        let mut any = false;
        for (l, b) in basis.iter().enumerate() {
            let z = v[i * m + l];
            if z != c(0.0, 0.0) {
                right.add_scaled(z, b);
                any = true;
            }
        }
        if any {
            out = &out + &host.primal().ops()[i].kron(&right);
        }
    }
    out
}

fn combine(mats: &[CMatrix], coords: &[C64]) -> CMatrix {
    let mut out = CMatrix::zeros(mats[0].rows(), mats[0].cols());
    for (m, z) in mats.iter().zip(coords) {
        out.add_scaled(*z, m);
    }
    out
}

impl Action {
    fn assemble(
        host: Arc<FiniteQuantumGroup>,
        label: String,
        basis: Vec<CMatrix>,
        alpha: CMatrix,
        kind: ActionKind,
    ) -> Result<Self> {
        let d = host.dim();
        let m = basis.len();
        if m == 0 {
            return Err(Error::Input("target basis is empty".into()));
        }
        let n = basis[0].rows();
        if let Some(b) = basis.iter().find(|b| b.shape() != (n, n)) {
            return Err(Error::Shape(format!("target basis mixes {n}x{n} and {}x{} matrices", b.rows(), b.cols())));
        }
        if alpha.shape() != (d * m, m) {
            return Err(Error::Shape(format!(
                "alpha is {}x{}; expected {}x{m} for dim L∞(G) = {d} and dim N = {m}",
                alpha.rows(),
                alpha.cols(),
                d * m
            )));
        }
        Limits::from_env().check_target(m)?;
        if span((n, n), &basis, TOL_RANK)?.dim() != m {
            return Err(Error::Input("target basis is linearly dependent".into()));
        }
        let images = (0..m)
            .map(|k| tensor_element(&host, &basis, &(0..d * m).map(|r| alpha.get(r, k)).collect::<Vec<_>>()))
            .collect();
        let mut a = Self { host, label, n, basis: Coordinates::new(&basis), alpha, images, kind, checks: vec![] };
        a.checks = a.compute_checks();
        Ok(a)
    }

    fn compute_checks(&self) -> Vec<ActionCheck> {
        let d = self.host.dim();
        let m = self.dim_target();
        let n = self.n;
        let b = self.basis.family();
        let mut checks = Vec::new();

        let mut closure: f64 = self.basis.coords_checked(&CMatrix::identity(n)).1;
        for x in b {
            closure = closure.max(self.basis.coords_checked(&x.adjoint()).1);
            for y in b {
                closure = closure.max(self.basis.coords_checked(&x.matmul(y)).1);
            }
        }
        checks.push(ActionCheck { name: "target algebra", residual: closure, witness: None });

        let unit = self.apply(&CMatrix::identity(n));
        checks.push(ActionCheck { name: "unital", residual: unit.dist(&CMatrix::identity(d * n)), witness: None });

        let mut hom: (f64, Option<(usize, usize)>) = (-1.0, None);
        for (k, x) in b.iter().enumerate() {
            for (l, y) in b.iter().enumerate() {
                let r = self.apply(&x.matmul(y)).dist(&self.images[k].matmul(&self.images[l]));
                if r > hom.0 {
                    hom = (r, Some((k, l)));
                }
            }
        }
        checks.push(ActionCheck { name: "homomorphism", residual: hom.0, witness: hom.1 });

        let star = b
            .iter()
            .enumerate()
            .map(|(k, x)| self.apply(&x.adjoint()).dist(&self.images[k].adjoint()))
            .fold(0.0, f64::max);
        checks.push(ActionCheck { name: "*-preserving", residual: star, witness: None });

        let sv = dense::svd(&self.alpha).sigma;
        let smax = sv.first().copied().unwrap_or(0.0);
        let rank = sv.iter().filter(|&&s| s > TOL_RANK * smax && smax > 0.0).count();
        checks.push(ActionCheck { name: "injective", residual: (m - rank) as f64, witness: None });

        checks.push(ActionCheck { name: "coaction", residual: self.coaction_residual(), witness: None });

        if self.kind == ActionKind::Cstar {
            let prods: Vec<CMatrix> = self
                .host
                .primal()
                .ops()
                .iter()
                .flat_map(|e| {
                    let left = e.kron(&CMatrix::identity(n));
                    self.images.iter().map(move |a| left.matmul(a)).collect::<Vec<_>>()
                })
                .collect();
            let dim = span((d * n, d * n), &prods, TOL_RANK).map(|s| s.dim()).unwrap_or(0);
            checks.push(ActionCheck { name: "podles", residual: (d * m).saturating_sub(dim) as f64, witness: None });
        }
        checks
    }

    /// `(Γ ⊗ id)α = (id ⊗ α)α`, compared on coordinate tensors indexed
    /// `(p, q, l)`.
    fn coaction_residual(&self) -> f64 {
        let d = self.host.dim();
        let m = self.dim_target();
        let comult = &self.host.primal().tensors().comult;
        let a = &self.alpha;
        let mut worst: f64 = 0.0;
        for k in 0..m {
            let mut diff = 0.0;
            for p in 0..d {
                for q in 0..d {
                    for l in 0..m {
                        let lhs: C64 = (0..d).map(|i| a.get(i * m + l, k) * comult.get(p * d + q, i)).sum();
                        let rhs: C64 = (0..m).map(|lp| a.get(p * m + lp, k) * a.get(q * m + l, lp)).sum();
                        diff += (lhs - rhs).norm_sqr();
                    }
                }
            }
            worst = worst.max(diff.sqrt());
        }
        worst
    }

    pub fn host(&self) -> &FiniteQuantumGroup {
        &self.host
    }

    pub fn host_arc(&self) -> &Arc<FiniteQuantumGroup> {
        &self.host
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    /// `N ⊂ M_n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `dim N`.
    pub fn dim_target(&self) -> usize {
        self.basis.len()
    }

    pub fn target_basis(&self) -> &[CMatrix] {
        self.basis.family()
    }

    /// The coordinate matrix of `α`.
    pub fn alpha_matrix(&self) -> &CMatrix {
        &self.alpha
    }

    /// `α(b_k)` as operators on `ℓ²(G) ⊗ C^n`.
    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn checks(&self) -> &[ActionCheck] {
        &self.checks
    }

    /// Coordinates of `x ∈ N` against the target basis.
    pub fn target_coords(&self, x: &CMatrix) -> Vec<C64> {
        self.basis.coords(x)
    }

    pub fn target_element(&self, coords: &[C64]) -> CMatrix {
        self.basis.combine(coords)
    }

    /// `α(x)` for `x ∈ N`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        self.apply_coords(&self.basis.coords(x))
    }

    pub fn apply_coords(&self, x: &[C64]) -> CMatrix {
        combine(&self.images, x)
    }

    /// `span α(N)` in `B(ℓ²(G) ⊗ C^n)`.
    pub fn image_space(&self) -> Result<MatSubspace> {
        let s = self.host.dim() * self.n;
        span((s, s), &self.images, TOL_RANK)
    }

    /// `N^α = {x : α(x) = 1 ⊗ x}`.
    pub fn fixed_points(&self) -> Result<MatSubspace> {
        let d = self.host.dim();
        let m = self.dim_target();
        let unit = self.host.primal().unit();
        let a = CMatrix::from_fn(d * m, m, |r, k| {
            let (i, l) = (r / m, r % m);
            let triv = if l == k { unit[i] } else { c(0.0, 0.0) };
            self.alpha.get(r, k) - triv
        });
        let ker = dense::nullspace_abs(&a, TOL_RANK * (1.0 + a.max_abs()));
        let elems: Vec<CMatrix> = (0..ker.cols())
            .map(|t| self.target_element(&(0..m).map(|k| ker.get(k, t)).collect::<Vec<_>>()))
            .collect();
        span((self.n, self.n), &elems, TOL_RANK)
    }

    /// `x ⋆_α f = (f ⊗ id)α(x)`, sliced from the operator `α(x)`.
    pub fn module_star(&self, x: &CMatrix, f: &Functional) -> Result<CMatrix> {
        f.check_host(self.host.primal())?;
        Ok(self.host.primal().slice_first(&self.apply(x), f.coords()))
    }

    /// The functional `f ⋆_α ω` on `N` with `⟨x ⋆_α f, ω⟩ = ⟨x, f ⋆_α ω⟩`;
    /// functionals on `N` are coordinate vectors against the target basis.
    pub fn pre_module(&self, f: &Functional, omega: &[C64]) -> Result<Vec<C64>> {
        f.check_host(self.host.primal())?;
        let m = self.dim_target();
        if omega.len() != m {
            return Err(Error::Shape(format!("functional with {} coordinates on N of dimension {m}", omega.len())));
        }
        let d = self.host.dim();
        Ok((0..m)
            .map(|k| {
                let mut acc = c(0.0, 0.0);
                for i in 0..d {
                    for (l, w) in omega.iter().enumerate() {
                        acc += f.coords()[i] * self.alpha.get(i * m + l, k) * w;
                    }
                }
                acc
            })
            .collect())
    }

    pub fn to_file(&self) -> Option<ActionFile> {
        let (group, side) = match self.host.origin() {
            crate::qg::Origin::FunctionAlgebra(g) => (g.name().to_string(), "function"),
            crate::qg::Origin::GroupAlgebra(g) => (g.name().to_string(), "group"),
            _ => return None,
        };
        Some(ActionFile {
            group,
            side: side.into(),
            target_dim: self.n,
            target_basis: Some(self.target_basis().to_vec()),
            alpha: self.alpha.clone(),
            kind: Some(self.kind),
        })
    }
}

/// Validates `α` and fails on the first violated axiom.
pub fn make_action(
    host: Arc<FiniteQuantumGroup>,
    target_basis: Vec<CMatrix>,
    alpha: CMatrix,
    kind: ActionKind,
) -> Result<Action> {
    let label = format!("action of {}", host.label());
    let a = Action::assemble(host, label, target_basis, alpha, kind)?;
    if let Some(bad) = a.checks.iter().find(|ch| !ch.passed()) {
        return Err(match bad.witness {
            Some((k, l)) => Error::AxiomAt {
                axiom: bad.name.into(),
                residual: bad.residual,
                witness: format!("(b_{k}, b_{l})"),
            },
            None => Error::axiom(bad.name, bad.residual),
        });
    }
    Ok(a)
}

/// Like [`make_action`] but returns every check instead of failing.
pub fn assess_action(
    host: Arc<FiniteQuantumGroup>,
    target_basis: Vec<CMatrix>,
    alpha: CMatrix,
    kind: ActionKind,
) -> Result<Vec<ActionCheck>> {
    Ok(Action::assemble(host, String::new(), target_basis, alpha, kind)?.checks)
}

/// `x ↦ 1 ⊗ x` on `M_n`.
pub fn trivial_action(host: Arc<FiniteQuantumGroup>, n: usize) -> Result<Action> {
    let d = host.dim();
    let m = n * n;
    let unit = host.primal().unit().to_vec();
    let alpha = CMatrix::from_fn(d * m, m, |r, k| if r % m == k { unit[r / m] } else { c(0.0, 0.0) });
    let mut a = make_action(host, matrix_units(n), alpha, ActionKind::VonNeumann)?;
    a.label = format!("trivial action of {} on M_{n}", a.host.label());
    Ok(a)
}

/// `Γ` as an action of `G` on `L∞(G)`, with the basis `e_k`.
pub fn canonical_action(host: Arc<FiniteQuantumGroup>, kind: ActionKind) -> Result<Action> {
    let comult = host.primal().tensors().comult.clone();
    let basis = host.primal().ops().to_vec();
    let mut a = make_action(host, basis, comult, kind)?;
    a.label = format!("canonical action of {}", a.host.label());
    Ok(a)
}

/// One of [`BUNDLED`].
pub fn bundled(name: &str) -> Result<Action> {
    let host = |g: &str, side: &str| -> Result<Arc<FiniteQuantumGroup>> {
        Ok(Arc::new(FiniteQuantumGroup::from_group_side(&FiniteGroup::builtin(g)?, side)?))
    };
    let mut a = match name {
        "trivial-m2" => trivial_action(host("s3", "group")?, 2)?,
        "translation-s3" => canonical_action(host("s3", "function")?, ActionKind::Cstar)?,
        "dual-s3-canonical" => canonical_action(host("s3", "group")?, ActionKind::VonNeumann)?,
        "c4-trivial-c" => trivial_action(host("c4", "function")?, 1)?,
        other => {
            return Err(Error::Input(format!("unknown action `{other}`; bundled actions are {}", BUNDLED.join(", "))))
        }
    };
    a.label = name.to_string();
    Ok(a)
}

impl ActionFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds and validates the action; `base` resolves a relative group path.
    pub fn build(&self, base: Option<&Path>) -> Result<Action> {
        let group = match FiniteGroup::builtin(&self.group) {
            Ok(g) => g,
            Err(_) => {
                let p = Path::new(&self.group);
                let path = match base {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                FiniteGroup::from_file(&path)?
            }
        };
        let host = Arc::new(FiniteQuantumGroup::from_group_side(&group, &self.side)?);
        let basis = self.target_basis.clone().unwrap_or_else(|| matrix_units(self.target_dim));
        if basis.iter().any(|b| b.shape() != (self.target_dim, self.target_dim)) {
            return Err(Error::Shape(format!("target basis must consist of {0}x{0} matrices", self.target_dim)));
        }
        make_action(host, basis, self.alpha.clone(), self.kind.unwrap_or(ActionKind::VonNeumann))
    }
}

/// Reads an action file, or a bundled action by name.
pub fn load_action(spec: &str) -> Result<Action> {
    if BUNDLED.contains(&spec) {
        return bundled(spec);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{spec}: {e}")))?;
    ActionFile::from_json(&text)?.build(path.parent())
}
