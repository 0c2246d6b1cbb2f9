//! Hopf *-algebra structure in coordinates against a fixed basis `e_0..e_{d-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::numerics::{c, complex_vec, dense, CMatrix, C64};

/// Structure constants of a finite-dimensional Hopf *-algebra.
///
/// * `mult` is `d × d²`: column `i·d + j` holds the coordinates of `e_i e_j`.
/// * `star` is `d × d`: the coordinates of `x*` are `star · conj(x)`.
/// * `comult` is `d² × d`: column `k` holds `Γ(e_k)` against `e_i ⊗ e_j`
///   at index `i·d + j`.
/// * `antipode` is `d × d`, acting on coordinates.
/// * `counit` and `haar` list the values on basis elements.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureTensors {
    pub dim: usize,
    pub mult: CMatrix,
    pub star: CMatrix,
    pub comult: CMatrix,
    #[serde(with = "complex_vec")]
    pub counit: Vec<C64>,
    pub antipode: CMatrix,
    #[serde(with = "complex_vec")]
    pub haar: Vec<C64>,
}

/// Result of checking one axiom.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub residual: f64,
}

fn vdist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn basis_vec(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); d];
    v[i] = c(1.0, 0.0);
    v
}

impl StructureTensors {
    fn zero_like(d: usize) -> Self {
        Self {
            dim: d,
            mult: CMatrix::zeros(d, d * d),
            star: CMatrix::zeros(d, d),
            comult: CMatrix::zeros(d * d, d),
            counit: vec![c(0.0, 0.0); d],
            antipode: CMatrix::zeros(d, d),
            haar: vec![c(0.0, 0.0); d],
        }
    }

    /// `C(Γ)` with basis `δ_s`, uniform Haar state.
    pub fn function_algebra(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut t = Self::zero_like(n);
        let one = c(1.0, 0.0);
        for s in 0..n {
            t.mult.set(s, s * n + s, one);
            t.star.set(s, s, one);
            t.antipode.set(g.inv(s), s, one);
            t.haar[s] = c(1.0 / n as f64, 0.0);
            for a in 0..n {
                let b = g.mul(g.inv(a), s);
                t.comult.set(a * n + b, s, one);
            }
        }
        t.counit[g.identity()] = one;
        t
    }

    /// `CΓ` with basis `λ_s`, Haar state the coefficient of the identity.
    pub fn group_algebra(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut t = Self::zero_like(n);
        let one = c(1.0, 0.0);
        for s in 0..n {
            for u in 0..n {
                t.mult.set(g.mul(s, u), s * n + u, one);
            }
            t.star.set(g.inv(s), s, one);
            t.comult.set(s * n + s, s, one);
            t.counit[s] = one;
            t.antipode.set(g.inv(s), s, one);
        }
        t.haar[g.identity()] = one;
        t
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        t.check_shapes()?;
        Ok(t)
    }

    fn check_shapes(&self) -> Result<()> {
        let d = self.dim;
        let ok = self.mult.shape() == (d, d * d)
            && self.star.shape() == (d, d)
            && self.comult.shape() == (d * d, d)
            && self.antipode.shape() == (d, d)
            && self.counit.len() == d
            && self.haar.len() == d;
        if ok && d > 0 {
            Ok(())
        } else {
            Err(Error::Shape(format!("structure tensors inconsistent with dim {d}")))
        }
    }

    pub fn mul(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let d = self.dim;
        let mut out = vec![c(0.0, 0.0); d];
        for i in 0..d {
            if x[i] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                let z = x[i] * y[j];
                if z == c(0.0, 0.0) {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += z * self.mult.get(k, i * d + j);
                }
            }
        }
        out
    }

    pub fn star_of(&self, x: &[C64]) -> Vec<C64> {
        let conj: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        self.star.apply(&conj)
    }

    /// `Γ(x)` as a vector of length `d²`.
    pub fn comult_of(&self, x: &[C64]) -> Vec<C64> {
        self.comult.apply(x)
    }

    pub fn counit_of(&self, x: &[C64]) -> C64 {
        self.counit.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn haar_of(&self, x: &[C64]) -> C64 {
        self.haar.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn antipode_of(&self, x: &[C64]) -> Vec<C64> {
        self.antipode.apply(x)
    }

    /// Product in `A ⊗ A` on vectors of length `d²`.
    pub fn mul2(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let d = self.dim;
        let mut out = vec![c(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                let a = x[i * d + j];
                if a == c(0.0, 0.0) {
                    continue;
                }
                for k in 0..d {
                    for l in 0..d {
                        let b = a * y[k * d + l];
                        if b == c(0.0, 0.0) {
                            continue;
                        }
                        for p in 0..d {
                            let m1 = self.mult.get(p, i * d + k);
                            if m1 == c(0.0, 0.0) {
                                continue;
                            }
                            for q in 0..d {
                                out[p * d + q] += b * m1 * self.mult.get(q, j * d + l);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `(T ⊗ id)` on a vector of length `d²` for a coordinate matrix `T`.
    fn apply_left(&self, t: &CMatrix, x: &[C64]) -> Vec<C64> {
        let d = self.dim;
        let mut out = vec![c(0.0, 0.0); t.rows() * d];
        for i in 0..d {
            for j in 0..d {
                let z = x[i * d + j];
                if z == c(0.0, 0.0) {
                    continue;
                }
                for p in 0..t.rows() {
                    out[p * d + j] += t.get(p, i) * z;
                }
            }
        }
        out
    }

    fn apply_right(&self, t: &CMatrix, x: &[C64]) -> Vec<C64> {
        let d = self.dim;
        let r = t.rows();
        let mut out = vec![c(0.0, 0.0); d * r];
        for i in 0..d {
            for j in 0..d {
                let z = x[i * d + j];
                if z == c(0.0, 0.0) {
                    continue;
                }
                for q in 0..r {
                    out[i * r + q] += t.get(q, j) * z;
                }
            }
        }
        out
    }

    /// Least-squares unit and its residual; a large residual means the
    /// algebra is not unital.
    pub fn unit(&self) -> (Vec<C64>, f64) {
        let d = self.dim;
        // Σ_i u_i e_i e_j = e_j and Σ_i u_i e_j e_i = e_j for all j.
        let mut a = CMatrix::zeros(2 * d * d, d);
        let mut b = vec![c(0.0, 0.0); 2 * d * d];
        for j in 0..d {
            for k in 0..d {
                for i in 0..d {
                    a.set(j * d + k, i, self.mult.get(k, i * d + j));
                    a.set(d * d + j * d + k, i, self.mult.get(k, j * d + i));
                }
                if j == k {
                    b[j * d + k] = c(1.0, 0.0);
                    b[d * d + j * d + k] = c(1.0, 0.0);
                }
            }
        }
        let u = dense::pinv(&a, 1e-12).apply(&b);
        let r = vdist(&a.apply(&u), &b);
        (u, r)
    }

    /// Every axiom with its residual, in a fixed order.
    pub fn axiom_report(&self) -> Vec<AxiomCheck> {
        let d = self.dim;
        let e = |i| basis_vec(d, i);
        let (unit, unit_res) = self.unit();
        let mut out = Vec::new();

        let mut assoc: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let ij = self.mul(&e(i), &e(j));
                for k in 0..d {
                    let l = self.mul(&ij, &e(k));
                    let r = self.mul(&e(i), &self.mul(&e(j), &e(k)));
                    assoc = assoc.max(vdist(&l, &r));
                }
            }
        }
        out.push(AxiomCheck { name: "associativity", residual: assoc });
        out.push(AxiomCheck { name: "unit", residual: unit_res });

        let mut inv: f64 = 0.0;
        for i in 0..d {
            inv = inv.max(vdist(&self.star_of(&self.star_of(&e(i))), &e(i)));
            for j in 0..d {
                let l = self.star_of(&self.mul(&e(i), &e(j)));
                let r = self.mul(&self.star_of(&e(j)), &self.star_of(&e(i)));
                inv = inv.max(vdist(&l, &r));
            }
        }
        out.push(AxiomCheck { name: "involution", residual: inv });

        // Γ must be a unital *-homomorphism and coassociative.
        let unit2: Vec<C64> =
            (0..d * d).map(|k| unit[k / d] * unit[k % d]).collect();
        let mut coassoc = vdist(&self.comult_of(&unit), &unit2);
        for i in 0..d {
            let gi = self.comult_of(&e(i));
            let star2 = {
                // (Γ(x))* computed leg-wise.
                let mut v = vec![c(0.0, 0.0); d * d];
                for p in 0..d {
                    for q in 0..d {
                        let z = gi[p * d + q].conj();
                        if z == c(0.0, 0.0) {
                            continue;
                        }
                        let sp = self.star.apply(&e(p));
                        let sq = self.star.apply(&e(q));
                        for a in 0..d {
                            for b in 0..d {
                                v[a * d + b] += z * sp[a] * sq[b];
                            }
                        }
                    }
                }
                v
            };
            coassoc = coassoc.max(vdist(&self.comult_of(&self.star_of(&e(i))), &star2));
            for j in 0..d {
                let l = self.comult_of(&self.mul(&e(i), &e(j)));
                let r = self.mul2(&gi, &self.comult_of(&e(j)));
                coassoc = coassoc.max(vdist(&l, &r));
            }
            // (Γ ⊗ id)Γ versus (id ⊗ Γ)Γ on vectors of length d³.
            let mut lhs = vec![c(0.0, 0.0); d * d * d];
            let mut rhs = vec![c(0.0, 0.0); d * d * d];
            for p in 0..d {
                for q in 0..d {
                    let z = gi[p * d + q];
                    if z == c(0.0, 0.0) {
                        continue;
                    }
                    let gp = self.comult_of(&e(p));
                    let gq = self.comult_of(&e(q));
                    for a in 0..d {
                        for b in 0..d {
                            lhs[(a * d + b) * d + q] += z * gp[a * d + b];
                            rhs[(p * d + a) * d + b] += z * gq[a * d + b];
                        }
                    }
                }
            }
            coassoc = coassoc.max(vdist(&lhs, &rhs));
        }
        out.push(AxiomCheck { name: "coassociativity", residual: coassoc });

        let counit_row = CMatrix::from_fn(1, d, |_, j| self.counit[j]);
        let mut counit_res = (self.counit_of(&unit) - c(1.0, 0.0)).norm();
        for i in 0..d {
            let gi = self.comult_of(&e(i));
            counit_res = counit_res.max(vdist(&self.apply_left(&counit_row, &gi), &e(i)));
            counit_res = counit_res.max(vdist(&self.apply_right(&counit_row, &gi), &e(i)));
            for j in 0..d {
                let z = self.counit_of(&self.mul(&e(i), &e(j))) - self.counit[i] * self.counit[j];
                counit_res = counit_res.max(z.norm());
            }
        }
        out.push(AxiomCheck { name: "counit", residual: counit_res });

        let mut anti: f64 = 0.0;
        for i in 0..d {
            let gi = self.comult_of(&e(i));
            let target: Vec<C64> = unit.iter().map(|u| u * self.counit[i]).collect();
            let l = self.apply_left(&self.antipode, &gi);
            let r = self.apply_right(&self.antipode, &gi);
            let ml = self.mult_flat(&l);
            let mr = self.mult_flat(&r);
            anti = anti.max(vdist(&ml, &target)).max(vdist(&mr, &target));
        }
        out.push(AxiomCheck { name: "antipode", residual: anti });

        let mut haar = (self.haar_of(&unit) - c(1.0, 0.0)).norm();
        let haar_row = CMatrix::from_fn(1, d, |_, j| self.haar[j]);
        for i in 0..d {
            let gi = self.comult_of(&e(i));
            let target: Vec<C64> = unit.iter().map(|u| u * self.haar[i]).collect();
            haar = haar.max(vdist(&self.apply_right(&haar_row, &gi), &target));
            haar = haar.max(vdist(&self.apply_left(&haar_row, &gi), &target));
        }
        out.push(AxiomCheck { name: "haar invariance", residual: haar });

        let gram = self.gram();
        let herm = gram.max_dist(&gram.adjoint());
        let (vals, _) = dense::eigh(&gram);
        let min_eig = vals.first().copied().unwrap_or(0.0);
        // A singular Gram matrix means φ is not faithful; report it as a
        // residual of at least one.
        let pos = if min_eig > 1e-12 { herm } else { herm.max(1.0 - min_eig.min(0.0)) };
        out.push(AxiomCheck { name: "haar faithful positivity", residual: pos });

        let mut kac: f64 = 0.0;
        for i in 0..d {
            let s2 = self.antipode_of(&self.antipode_of(&e(i)));
            kac = kac.max(vdist(&s2, &e(i)));
            for j in 0..d {
                let z = self.haar_of(&self.mul(&e(i), &e(j))) - self.haar_of(&self.mul(&e(j), &e(i)));
                kac = kac.max(z.norm());
            }
        }
        out.push(AxiomCheck { name: "kac (S^2 = id, tracial haar)", residual: kac });
        out
    }

    /// Multiplication map `A ⊗ A → A` on a vector of length `d²`.
    pub fn mult_flat(&self, x: &[C64]) -> Vec<C64> {
        self.mult.apply(x)
    }

    /// `G_ab = φ(e_a* e_b)`.
    pub fn gram(&self) -> CMatrix {
        let d = self.dim;
        let stars: Vec<Vec<C64>> = (0..d).map(|a| self.star_of(&basis_vec(d, a))).collect();
        CMatrix::from_fn(d, d, |a, b| self.haar_of(&self.mul(&stars[a], &basis_vec(d, b))))
    }

    /// Fails on the first axiom whose residual exceeds `tol`.
    pub fn validate(&self, tol: f64) -> Result<Vec<AxiomCheck>> {
        self.check_shapes()?;
        let report = self.axiom_report();
        if let Some(bad) = report.iter().find(|a| !(a.residual <= tol)) {
            return Err(Error::axiom(bad.name, bad.residual));
        }
        Ok(report)
    }

    /// Solves for the counit-compatible antipode from the Hopf relations.
    pub fn solve_antipode(&self, unit: &[C64]) -> (CMatrix, f64) {
        let d = self.dim;
        let mut a = CMatrix::zeros(2 * d * d, d * d);
        let mut b = vec![c(0.0, 0.0); 2 * d * d];
        for k in 0..d {
            for l in 0..d {
                let row = k * d + l;
                b[row] = self.counit[k] * unit[l];
                b[d * d + row] = self.counit[k] * unit[l];
                for i in 0..d {
                    for j in 0..d {
                        let ck = self.comult.get(i * d + j, k);
                        if ck == c(0.0, 0.0) {
                            continue;
                        }
                        for s in 0..d {
                            // m(S ⊗ id)Γ: S(e_i) = Σ_s S[s][i] e_s, times e_j.
                            let z = a.get(row, s * d + i) + ck * self.mult.get(l, s * d + j);
                            a.set(row, s * d + i, z);
                            // m(id ⊗ S)Γ: e_i times S(e_j).
                            let z2 = a.get(d * d + row, s * d + j) + ck * self.mult.get(l, i * d + s);
                            a.set(d * d + row, s * d + j, z2);
                        }
                    }
                }
            }
        }
        let s = dense::pinv(&a, 1e-12).apply(&b);
        let r = vdist(&a.apply(&s), &b);
        (CMatrix::from_vec(d, d, &s), r)
    }

    /// Solves for the bi-invariant state.
    pub fn solve_haar(&self, unit: &[C64]) -> (Vec<C64>, f64) {
        let d = self.dim;
        let rows = 2 * d * d + 1;
        let mut a = CMatrix::zeros(rows, d);
        let mut b = vec![c(0.0, 0.0); rows];
        for k in 0..d {
            for l in 0..d {
                let r1 = k * d + l;
                let r2 = d * d + k * d + l;
                for j in 0..d {
                    // (id ⊗ φ)Γ(e_k) = φ(e_k) 1, component l.
                    let z = a.get(r1, j) + self.comult.get(l * d + j, k);
                    a.set(r1, j, z);
                    // (φ ⊗ id)Γ(e_k) = φ(e_k) 1, component l.
                    let z2 = a.get(r2, j) + self.comult.get(j * d + l, k);
                    a.set(r2, j, z2);
                }
                a.set(r1, k, a.get(r1, k) - unit[l]);
                a.set(r2, k, a.get(r2, k) - unit[l]);
            }
        }
        for k in 0..d {
            a.set(rows - 1, k, unit[k]);
        }
        b[rows - 1] = c(1.0, 0.0);
        let h = dense::pinv(&a, 1e-12).apply(&b);
        let r = vdist(&a.apply(&h), &b);
        (h, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::TOL_AXIOM;

    fn groups() -> Vec<FiniteGroup> {
        ["c2", "c4", "s3", "d4", "q8"].iter().map(|n| FiniteGroup::builtin(n).unwrap()).collect()
    }

    #[test]
    fn group_tensors_satisfy_axioms() {
        for g in groups() {
            for t in [StructureTensors::function_algebra(&g), StructureTensors::group_algebra(&g)] {
                for a in t.validate(TOL_AXIOM).unwrap() {
                    assert!(a.residual < 1e-12, "{} {}: {}", g.name(), a.name, a.residual);
                }
            }
        }
    }

    #[test]
    fn solved_antipode_and_haar_match_known() {
        for g in groups() {
            for t in [StructureTensors::function_algebra(&g), StructureTensors::group_algebra(&g)] {
                let (u, _) = t.unit();
                let (s, rs) = t.solve_antipode(&u);
                assert!(rs < 1e-10 && s.dist(&t.antipode) < 1e-10);
                let (h, rh) = t.solve_haar(&u);
                assert!(rh < 1e-10 && vdist(&h, &t.haar) < 1e-10);
            }
        }
    }

    #[test]
    fn zeroed_comultiplication_is_named() {
        let g = FiniteGroup::builtin("s3").unwrap();
        let mut t = StructureTensors::function_algebra(&g);
        let gamma_norm = t.comult.norm();
        t.comult = CMatrix::zeros(36, 6);
        match t.validate(TOL_AXIOM) {
            Err(Error::Axiom { axiom, residual }) => {
                assert_eq!(axiom, "coassociativity");
                assert!(residual > 0.1 * gamma_norm / 6.0, "{residual}");
            }
            other => panic!("expected axiom failure, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let g = FiniteGroup::builtin("c4").unwrap();
        let t = StructureTensors::group_algebra(&g);
        let back = StructureTensors::from_json(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back.comult, t.comult);
        assert!(StructureTensors::from_json("{\"dim\":2}").is_err());
    }
}
