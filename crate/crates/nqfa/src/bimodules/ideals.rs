//! Closed left ideals of `L¹(G)`, their annihilators in `L∞(G)` and the
//! two ways of producing test families: exhaustive enumeration when the
//! convolution algebra is commutative, and seeded random singly-generated
//! ideals otherwise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fourier::{convolve, Functional};
use crate::numerics::{c, dense, span, CMatrix, MatSubspace, C64};
use crate::qg::FiniteQuantumGroup;
use crate::tolerances::{TOL_IDENTITY, TOL_RANK};

/// Largest number of joint eigenvectors for which every ideal is listed.
pub const MAX_ENUMERATED: usize = 10;

/// A closed left ideal of `L¹(G)`, stored as a subspace of coordinate rows.
#[derive(Clone, Debug)]
pub struct LeftIdeal<'q> {
    host: &'q FiniteQuantumGroup,
    space: MatSubspace,
}

fn row(f: &[C64]) -> CMatrix {
    CMatrix::from_vec(1, f.len(), f)
}

impl<'q> LeftIdeal<'q> {
    /// Wraps a subspace of functionals after checking `e_k ⋆ J ⊆ J`.
    pub fn from_space(host: &'q FiniteQuantumGroup, space: MatSubspace) -> Result<Self> {
        if space.shape() != (1, host.dim()) {
            return Err(Error::Shape(format!("ideal space has shape {:?}", space.shape())));
        }
        let ideal = Self { host, space };
        let r = ideal.ideal_residual();
        if r > TOL_IDENTITY {
            return Err(Error::axiom("left ideal", r));
        }
        Ok(ideal)
    }

    pub fn zero(host: &'q FiniteQuantumGroup) -> Self {
        Self { host, space: MatSubspace::zero(1, host.dim()) }
    }

    pub fn whole(host: &'q FiniteQuantumGroup) -> Self {
        Self { host, space: MatSubspace::full(1, host.dim()) }
    }

    pub fn host(&self) -> &'q FiniteQuantumGroup {
        self.host
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &MatSubspace {
        &self.space
    }

    /// The orthonormal basis as functionals.
    pub fn functionals(&self) -> Vec<Functional> {
        let side = self.host.primal();
        self.space
            .basis()
            .iter()
            .map(|b| Functional::new(side, b.data().to_vec()).expect("basis row has the host dimension"))
            .collect()
    }

    pub fn contains(&self, f: &Functional, tol: f64) -> bool {
        self.space.rel_residual(&row(f.coords())) <= tol
    }

    /// `max ‖e_k ⋆ b − P(e_k ⋆ b)‖` over coordinate functionals and basis.
    pub fn ideal_residual(&self) -> f64 {
        let side = self.host.primal();
        let mut worst: f64 = 0.0;
        for f in self.functionals() {
            for k in 0..side.dim() {
                let g = convolve(side, &Functional::coordinate(side, k), &f).expect("same host");
                worst = worst.max(self.space.residual(&row(g.coords())));
            }
        }
        worst
    }

    /// `J₁ ∩ J₂`, again a left ideal.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        Self::from_space(self.host, self.space.intersect(&other.space)?)
    }

    /// `J⊥ = {a ∈ L∞(G) : ⟨f, a⟩ = 0 for f ∈ J}`, as operators on `ℓ²(G)`.
    pub fn annihilator(&self) -> Result<MatSubspace> {
        let side = self.host.primal();
        let d = side.dim();
        let k = self.dim();
        if k == 0 {
            return span((d, d), side.ops(), TOL_RANK);
        }
        let stacked = CMatrix::from_fn(k, d, |i, j| self.space.basis()[i].data()[j]);
        let ker = dense::nullspace_scaled(&stacked, TOL_RANK);
        let ops: Vec<CMatrix> = (0..ker.cols())
            .map(|t| side.element(&(0..d).map(|i| ker.get(i, t)).collect::<Vec<_>>()))
            .collect();
        span((d, d), &ops, TOL_RANK)
    }
}

/// Functionals vanishing on a subspace `X ⊆ L∞(G)`, as coordinate rows.
pub fn pre_annihilator(host: &FiniteQuantumGroup, x: &MatSubspace) -> Result<MatSubspace> {
    let side = host.primal();
    let d = side.dim();
    if x.dim() == 0 {
        return Ok(MatSubspace::full(1, d));
    }
    let mut rows = Vec::with_capacity(x.dim());
    for b in x.basis() {
        let (coords, r) = side.coords_of(b);
        if r > TOL_IDENTITY * b.norm().max(1.0) {
            return Err(Error::Input(format!("subspace is not contained in L∞(G) (residual {r:.3e})")));
        }
        rows.push(coords);
    }
    let a = CMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let ker = dense::nullspace_scaled(&a, TOL_RANK);
    let fs: Vec<CMatrix> = (0..ker.cols()).map(|t| CMatrix::from_fn(1, d, |_, i| ker.get(i, t))).collect();
    span((1, d), &fs, TOL_RANK)
}

/// The smallest closed left ideal containing `gens`: spans of
/// `gens ∪ L¹ ⋆ gens`, repeated until the dimension is stable.
pub fn ideal_from_generators<'q>(host: &'q FiniteQuantumGroup, gens: &[Functional]) -> Result<LeftIdeal<'q>> {
    let side = host.primal();
    let d = side.dim();
    for g in gens {
        g.check_host(side)?;
    }
    let mut current: Vec<CMatrix> = gens.iter().map(|g| row(g.coords())).collect();
    let mut space = span((1, d), &current, TOL_RANK)?;
    loop {
        let mut next = current.clone();
        for b in space.basis() {
            let f = Functional::new(side, b.data().to_vec())?;
            for k in 0..d {
                next.push(row(convolve(side, &Functional::coordinate(side, k), &f)?.coords()));
            }
        }
        let grown = span((1, d), &next, TOL_RANK)?;
        if grown.dim() == space.dim() {
            return LeftIdeal::from_space(host, grown);
        }
        space = grown;
        current = next;
    }
}

/// Whether `L¹(G)` is commutative, from the convolution of basis functionals.
pub fn is_commutative(host: &FiniteQuantumGroup) -> bool {
    let side = host.primal();
    let d = side.dim();
    (0..d).all(|i| {
        (0..d).all(|j| {
            let (a, b) = (Functional::coordinate(side, i), Functional::coordinate(side, j));
            let ab = convolve(side, &a, &b).expect("same host");
            let ba = convolve(side, &b, &a).expect("same host");
            ab.dist(&ba) <= 1e-12
        })
    })
}

/// Coordinate matrix of `x ↦ (f ⊗ id)Γ(x)` on `L∞(G)`.
fn theta_l_coords(host: &FiniteQuantumGroup, f: &[C64]) -> CMatrix {
    let t = host.primal().tensors();
    let d = t.dim;
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        for i in 0..d {
            if f[i] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                let z = m.get(j, k) + t.comult.get(i * d + j, k) * f[i];
                m.set(j, k, z);
            }
        }
    }
    m
}

/// The characters of a commutative `L¹(G)`: elements `χ` of `L∞(G)` with
/// `(f ⊗ id)Γ(χ) = ⟨f, χ⟩ χ`, as columns. Found by diagonalising a random
/// Hermitian combination of the translation operators and checked against
/// every operator in the family.
pub fn characters_of_commutative(host: &FiniteQuantumGroup) -> Result<CMatrix> {
    if !is_commutative(host) {
        return Err(Error::Unsupported(format!("L¹ of {} is not commutative", host.label())));
    }
    let d = host.dim();
    let ops: Vec<CMatrix> = (0..d).map(|k| theta_l_coords(host, Functional::coordinate(host.primal(), k).coords())).collect();
    for seed in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + seed);
        let mut h = CMatrix::zeros(d, d);
        for a in &ops {
            let r = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h.add_scaled(r, a);
            h.add_scaled(r.conj(), &a.adjoint());
        }
        let (vals, vecs) = dense::eigh(&h);
        let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if vals.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-6 * scale) {
            continue;
        }
        let joint = ops.iter().all(|a| {
            (0..d).all(|t| {
                let v: Vec<C64> = (0..d).map(|i| vecs.get(i, t)).collect();
                let av = a.apply(&v);
                let mu: C64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
                av.iter().zip(&v).map(|(y, x)| (y - mu * x).norm_sqr()).sum::<f64>().sqrt() < 1e-9
            })
        });
        if joint {
            return Ok(vecs);
        }
        return Err(Error::Numerical("translation operators are not simultaneously diagonal".into()));
    }
    Err(Error::Numerical("could not separate the characters of L¹".into()))
}

/// Every closed left ideal of a commutative `L¹(G)`: for each subset `S` of
/// characters, the functionals whose Fourier transform is supported on `S`.
/// Ordered by the bitmask of `S`.
pub fn enumerate_ideals(host: &FiniteQuantumGroup) -> Result<Vec<LeftIdeal<'_>>> {
    let chars = characters_of_commutative(host)?;
    let d = host.dim();
    if d > MAX_ENUMERATED {
        return Err(Error::DimensionCap(format!("{d} characters give too many ideals to list")));
    }
    // Row β of the inverse pairs to δ against the characters.
    let dual_basis = dense::inverse(&chars)?;
    let side = host.primal();
    let mut out = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        let gens: Vec<Functional> = (0..d)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| Functional::new(side, (0..d).map(|k| dual_basis.get(b, k)).collect()))
            .collect::<Result<_>>()?;
        let space = span((1, d), &gens.iter().map(|g| row(g.coords())).collect::<Vec<_>>(), TOL_RANK)?;
        out.push(LeftIdeal::from_space(host, space)?);
    }
    Ok(out)
}

/// `L¹ ⋆ f` for `f = λ⁻¹(A P)`, with `A` random in `L∞(Ĝ)` and `P` a random
/// spectral projection of a random self-adjoint element of `L∞(Ĝ)`. Since
/// `λ` is an injective homomorphism the ideal is `λ⁻¹(L∞(Ĝ) A P)`, which is
/// proper whenever `P ≠ 1` and is usually nonzero.
pub fn random_ideal<'q>(host: &'q FiniteQuantumGroup, rng: &mut impl Rng) -> Result<LeftIdeal<'q>> {
    let dual = host.dual_side();
    let d = host.dim();
    let rand_elem = |rng: &mut dyn rand::RngCore| {
        let coords: Vec<C64> = (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        dual.element(&coords)
    };
    let x = rand_elem(rng);
    let h = &x + &x.adjoint();
    let (vals, vecs) = dense::eigh(&h);
    // Group equal eigenvalues; each group is a spectral projection in L∞(Ĝ).
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (v - vals[g[0]]).abs() < 1e-7 => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let keep = rng.gen_range(1..=groups.len().max(2) - 1);
    groups.shuffle(rng);
    let mut p = CMatrix::zeros(d, d);
    for g in &groups[..keep.min(groups.len())] {
        for &t in g {
            let v: Vec<C64> = (0..d).map(|i| vecs.get(i, t)).collect();
            let col = CMatrix::column(&v);
            p = &p + &col.matmul(&col.adjoint());
        }
    }
    let a = rand_elem(rng);
    let (coords, r) = dual.coords_of(&a.matmul(&p));
    if r > 1e-8 {
        return Err(Error::Numerical(format!("spectral projection left L∞(Ĝ) (residual {r:.3e})")));
    }
    ideal_from_generators(host, &[Functional::new(host.primal(), coords)?])
}

/// `count` seeded random ideals.
pub fn random_ideals(host: &FiniteQuantumGroup, count: usize, seed: u64) -> Result<Vec<LeftIdeal<'_>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_ideal(host, &mut rng)).collect()
}
