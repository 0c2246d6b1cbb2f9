//! Finite groups given by Cayley tables, with built-in examples and their
//! irreducible unitary representations.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{c, dense, CMatrix, C64};

/// A finite group on the elements `0..order`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

/// A unitary representation given by its matrices, indexed by group element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Irrep {
    pub dim: usize,
    pub matrices: Vec<CMatrix>,
}

/// On-disk group description: `{"order": n, "table": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates a Cayley table. Failures name a witness: the offending
    /// triple for associativity, or "no identity" / "missing inverse".
    pub fn from_cayley_table(table: Vec<Vec<usize>>) -> Result<Self> {
        Self::named("custom", table)
    }

    fn named(name: &str, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Input("empty Cayley table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::Input(format!("row {i} contains {bad}, not an element")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    if table[table[a][b]][cc] != table[a][table[b][cc]] {
                        return Err(Error::Input(format!(
                            "associativity fails at ({a}, {b}, {cc})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Input("no identity".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::Input(format!("missing inverse for element {a}")))?;
            inverse.push(inv);
        }
        Ok(Self { name: name.to_string(), order: n, table, identity, inverse })
    }

    /// Built-in groups: `trivial`, `c<n>` (also `z<n>`), `s3`, `d4`, `q8`.
    pub fn builtin(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "trivial" => Self::cyclic(1),
            "s3" => Self::named("s3", s3_table()),
            "d4" => Self::named("d4", d4_table()),
            "q8" => Self::named("q8", q8_table()),
            _ => {
                let digits = lower.strip_prefix('c').or_else(|| lower.strip_prefix('z'));
                match digits.and_then(|d| d.parse::<usize>().ok()) {
                    Some(n) if n >= 1 => Self::cyclic(n),
                    _ => Err(Error::Input(format!("unknown group `{name}`"))),
                }
            }
        }
    }

    /// `Z/n` with elements `0..n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("cyclic group of order 0".into()));
        }
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let name = if n == 1 { "trivial".to_string() } else { format!("c{n}") };
        Self::named(&name, table)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if file.order != file.table.len() {
            return Err(Error::Input(format!(
                "order {} disagrees with table of {} rows",
                file.order,
                file.table.len()
            )));
        }
        Self::from_cayley_table(file.table)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile { order: self.order, table: self.table.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// Smallest `k ≥ 1` with `a^k = e`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// A complete set of irreducible unitary representations, validated.
    ///
    /// Abelian groups get their characters; `s3`, `d4` and `q8` use stored
    /// tables. Anything else has to be supplied through a file.
    pub fn irreps(&self) -> Result<Vec<Irrep>> {
        let irreps = match self.name.as_str() {
            "s3" => s3_irreps(),
            "d4" => d4_irreps(),
            "q8" => q8_irreps(),
            name if name == "trivial" || is_cyclic_name(name) => cyclic_characters(self.order),
            _ if self.is_abelian() => abelian_characters(self)?,
            _ => return Err(Error::Unsupported("irreps unavailable; supply via file".into())),
        };
        validate_irreps(self, &irreps)?;
        Ok(irreps)
    }
}

/// Reads irreps from `[{"dim": n, "matrices": [CMatrix, ...]}, ...]` and
/// validates them against the group.
pub fn irreps_from_file(group: &FiniteGroup, path: &Path) -> Result<Vec<Irrep>> {
    let irreps: Vec<Irrep> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    validate_irreps(group, &irreps)?;
    Ok(irreps)
}

/// Checks shapes, the homomorphism property, unitarity, pairwise
/// inequivalence and completeness (`Σ dim² = |G|`).
pub fn validate_irreps(group: &FiniteGroup, irreps: &[Irrep]) -> Result<()> {
    const TOL: f64 = 1e-9;
    let n = group.order();
    let mut total = 0;
    for (k, rep) in irreps.iter().enumerate() {
        if rep.matrices.len() != n || rep.matrices.iter().any(|m| m.shape() != (rep.dim, rep.dim)) {
            return Err(Error::Input(format!("irrep {k}: expected {n} matrices of size {}", rep.dim)));
        }
        total += rep.dim * rep.dim;
        for a in 0..n {
            let u = rep.matrices[a].unitarity_residual();
            if u > TOL {
                return Err(Error::axiom(format!("irrep {k} unitarity"), u));
            }
            for b in 0..n {
                let r = rep.matrices[a].matmul(&rep.matrices[b]).dist(&rep.matrices[group.mul(a, b)]);
                if r > TOL {
                    return Err(Error::axiom(format!("irrep {k} homomorphism"), r));
                }
            }
        }
    }
    // ⟨χ_a, χ_b⟩ = δ_ab certifies irreducibility and inequivalence.
    let chars: Vec<Vec<C64>> =
        irreps.iter().map(|r| r.matrices.iter().map(CMatrix::trace).collect()).collect();
    for (a, ca) in chars.iter().enumerate() {
        for (b, cb) in chars.iter().enumerate() {
            let ip: C64 = ca.iter().zip(cb).map(|(x, y)| x.conj() * y).sum::<C64>() / n as f64;
            let target = if a == b { 1.0 } else { 0.0 };
            let r = (ip - c(target, 0.0)).norm();
            if r > TOL {
                return Err(Error::axiom(format!("character orthogonality ({a}, {b})"), r));
            }
        }
    }
    if total != n {
        return Err(Error::Input(format!("irreps are incomplete: sum of dim^2 is {total}, order {n}")));
    }
    Ok(())
}

fn is_cyclic_name(name: &str) -> bool {
    name.strip_prefix('c').is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn one_dim(values: Vec<C64>) -> Irrep {
    Irrep { dim: 1, matrices: values.into_iter().map(|z| CMatrix::from_diag(&[z])).collect() }
}

fn cyclic_characters(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|k| {
            one_dim(
                (0..n).map(|j| C64::from_polar(1.0, 2.0 * PI * (k * j % n) as f64 / n as f64)).collect(),
            )
        })
        .collect()
}

/// Characters of an abelian group, read off from the joint eigenvectors of
/// its left regular representation.
fn abelian_characters(g: &FiniteGroup) -> Result<Vec<Irrep>> {
    let n = g.order();
    let left = |s: usize| CMatrix::from_fn(n, n, |i, j| if g.mul(s, j) == i { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let mut h = CMatrix::zeros(n, n);
    for s in 0..n {
        let l = left(s);
        let w = 1.0 / (s as f64 + std::f64::consts::SQRT_2);
        let w2 = 1.0 / (s as f64 + std::f64::consts::E);
        h.add_scaled(c(w, 0.0), &(&l + &l.adjoint()));
        h.add_scaled(c(0.0, w2), &(&l - &l.adjoint()));
    }
    let (_, vecs) = dense::eigh(&h);
    let mut chars: Vec<Vec<C64>> = (0..n)
        .map(|t| {
            let v: Vec<C64> = (0..n).map(|i| vecs.get(i, t)).collect();
            (0..n)
                .map(|s| {
                    let lv = left(s).apply(&v);
                    v.iter().zip(&lv).map(|(a, b)| a.conj() * b).sum()
                })
                .collect()
        })
        .collect();
    // Trivial character first, then by the phases in element order.
    let key = |ch: &Vec<C64>| -> Vec<i64> {
        ch.iter()
            .map(|z| {
                let t = z.arg().rem_euclid(2.0 * PI);
                ((t * 1e6).round() as i64) % ((2.0 * PI * 1e6).round() as i64)
            })
            .collect()
    };
    chars.sort_by_key(key);
    Ok(chars.into_iter().map(one_dim).collect())
}

fn s3_perms() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

fn s3_table() -> Vec<Vec<usize>> {
    let perms = s3_perms();
    let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
    perms
        .iter()
        .map(|p| perms.iter().map(|q| index([p[q[0]], p[q[1]], p[q[2]]])).collect())
        .collect()
}

fn s3_irreps() -> Vec<Irrep> {
    let perms = s3_perms();
    let sign = |p: &[usize; 3]| {
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inversions % 2 == 0 { 1.0 } else { -1.0 }
    };
    // Standard representation on the sum-zero plane.
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r6 = 1.0 / 6f64.sqrt();
    let basis = CMatrix::from_real_rows(&[&[r2, r6], &[-r2, r6], &[0.0, -2.0 * r6]]);
    let standard = perms
        .iter()
        .map(|p| {
            let perm = CMatrix::from_fn(3, 3, |i, j| if p[j] == i { c(1.0, 0.0) } else { c(0.0, 0.0) });
            basis.transpose().matmul(&perm).matmul(&basis)
        })
        .collect();
    vec![
        one_dim(vec![c(1.0, 0.0); 6]),
        one_dim(perms.iter().map(|p| c(sign(p), 0.0)).collect()),
        Irrep { dim: 2, matrices: standard },
    ]
}

/// `r^a s^b` is stored as `a + 4b`.
fn d4_table() -> Vec<Vec<usize>> {
    let mul = |x: usize, y: usize| {
        let (a, b, cc, d) = (x % 4, x / 4, y % 4, y / 4);
        let rot = if b == 0 { (a + cc) % 4 } else { (a + 4 - cc) % 4 };
        rot + 4 * ((b + d) % 2)
    };
    (0..8).map(|x| (0..8).map(|y| mul(x, y)).collect()).collect()
}

fn d4_irreps() -> Vec<Irrep> {
    let mut out = Vec::new();
    for (er, es) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        out.push(one_dim(
            (0..8)
                .map(|x: usize| {
                    let (a, b) = (x % 4, x / 4);
                    c(f64::powi(er, a as i32) * f64::powi(es, b as i32), 0.0)
                })
                .collect(),
        ));
    }
    let r = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
    let s = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let mut mats = Vec::new();
    for x in 0..8usize {
        let (a, b) = (x % 4, x / 4);
        let mut m = CMatrix::identity(2);
        for _ in 0..a {
            m = m.matmul(&r);
        }
        if b == 1 {
            m = m.matmul(&s);
        }
        mats.push(m);
    }
    out.push(Irrep { dim: 2, matrices: mats });
    out
}

/// Elements in the order `1, −1, i, −i, j, −j, k, −k`.
fn q8_matrices() -> Vec<CMatrix> {
    let one = CMatrix::identity(2);
    let i = CMatrix::from_diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
    let j = CMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    let k = i.matmul(&j);
    let mut out = Vec::new();
    for m in [one, i, j, k] {
        out.push(m.clone());
        out.push(m.scale_re(-1.0));
    }
    out
}

fn q8_table() -> Vec<Vec<usize>> {
    let mats = q8_matrices();
    let index = |m: &CMatrix| mats.iter().position(|x| x.dist(m) < 1e-12).unwrap();
    mats.iter().map(|a| mats.iter().map(|b| index(&a.matmul(b))).collect()).collect()
}

fn q8_irreps() -> Vec<Irrep> {
    let mut out = Vec::new();
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let per_unit = [1.0, a, b, a * b];
        out.push(one_dim((0..8).map(|x| c(per_unit[x / 2], 0.0)).collect()));
    }
    out.push(Irrep { dim: 2, matrices: q8_matrices() });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for name in ["trivial", "c2", "c4", "z5", "s3", "d4", "q8"] {
            let g = FiniteGroup::builtin(name).unwrap();
            let irreps = g.irreps().unwrap();
            let total: usize = irreps.iter().map(|r| r.dim * r.dim).sum();
            assert_eq!(total, g.order(), "{name}");
        }
    }

    #[test]
    fn q8_has_one_involution() {
        let g = FiniteGroup::builtin("q8").unwrap();
        let count = (0..8).filter(|&a| g.element_order(a) == 2).count();
        assert_eq!(count, 1);
    }

    #[test]
    fn s3_is_nonabelian_with_dims_112() {
        let g = FiniteGroup::builtin("s3").unwrap();
        assert!(!g.is_abelian());
        let mut dims: Vec<usize> = g.irreps().unwrap().iter().map(|r| r.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
    }

    #[test]
    fn cyclic_characters_are_exponentials() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let irreps = g.irreps().unwrap();
        let z = irreps[1].matrices[1].get(0, 0);
        assert!((z - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn table_errors_name_witnesses() {
        let bad_assoc = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 0, 1]];
        let err = FiniteGroup::from_cayley_table(bad_assoc).unwrap_err().to_string();
        assert!(err.contains("associativity fails at ("), "{err}");

        let no_id = vec![vec![0, 0], vec![0, 0]];
        let err = FiniteGroup::from_cayley_table(no_id).unwrap_err().to_string();
        assert!(err.contains("no identity"), "{err}");

        // Associative monoid {e, z} with z·z = z: identity exists, z has no inverse.
        let monoid = vec![vec![0, 1], vec![1, 1]];
        let err = FiniteGroup::from_cayley_table(monoid).unwrap_err().to_string();
        assert!(err.contains("missing inverse"), "{err}");
    }

    #[test]
    fn custom_abelian_table_gets_characters() {
        // Z/2 × Z/2 written as a table.
        let t = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]];
        let g = FiniteGroup::from_cayley_table(t).unwrap();
        assert_eq!(g.irreps().unwrap().len(), 4);
    }

    #[test]
    fn nonabelian_custom_needs_file() {
        let s3 = FiniteGroup::builtin("s3").unwrap();
        let g = FiniteGroup::from_cayley_table(s3.table().to_vec()).unwrap();
        let err = g.irreps().unwrap_err().to_string();
        assert!(err.contains("irreps unavailable; supply via file"));
    }
}
