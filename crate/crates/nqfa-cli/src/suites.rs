//! Verification suites. Each one collects named residuals for a single
//! quantum group and compares them against a threshold; structural checks
//! (dimension equalities and the like) carry a flag of their own.

use std::sync::Arc;

use nqfa::bimodules::{
    check_bim_equals_ranperp, check_null_sets, cstar_variants, enumerate_ideals, harmonic, is_commutative,
    random_ideals, random_sigma, LeftIdeal,
};
use nqfa::dynamics::{
    canonical_action, crossed_product, fejer_reconstruct, fejer_term, spectral_projection, trivial_action, Action,
    ActionKind, CrossedProduct,
};
use nqfa::fourier::Functional;
use nqfa::fubini::{slice_map_check, XChoice};
use nqfa::numerics::{c, CMatrix, C64};
use nqfa::qg::FiniteQuantumGroup;
use nqfa::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::Suite;

/// Random ideals drawn when the predual is not commutative or too large to
/// enumerate.
const RANDOM_IDEALS: usize = 20;
/// Enumerate ideals only up to this many (`2^dim`).
const MAX_ENUMERATED_IDEALS: usize = 64;
const NULL_SET_SAMPLES: usize = 5;
const FEJER_PAIRS: usize = 5;
const FUBINI_ORBITS: u64 = 2;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub tolerance: f64,
    pub max_residual: f64,
    pub checks: Vec<Check>,
}

/// Residuals plus structural verdicts, before a threshold is applied.
#[derive(Default)]
struct Collector {
    items: Vec<(String, f64, bool)>,
}

impl Collector {
    fn residual(&mut self, name: impl Into<String>, r: f64) {
        self.items.push((name.into(), r, true));
    }

    fn structural(&mut self, name: impl Into<String>, r: f64, ok: bool) {
        self.items.push((name.into(), r, ok));
    }

    /// Every numeric field of a serialisable report, prefixed.
    fn fields(&mut self, prefix: &str, report: &impl Serialize) {
        let value = serde_json::to_value(report).expect("reports serialise");
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                if let Some(r) = v.as_f64() {
                    self.residual(format!("{prefix}{k}"), r);
                }
            }
        }
    }

    fn finish(self, name: &'static str, tolerance: f64) -> SuiteReport {
        let checks: Vec<Check> = self
            .items
            .into_iter()
            .map(|(name, residual, ok)| Check { passed: ok && residual <= tolerance, name, residual })
            .collect();
        SuiteReport {
            name,
            passed: checks.iter().all(|c| c.passed),
            tolerance,
            max_residual: checks.iter().map(|c| c.residual).fold(0.0, f64::max),
            checks,
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Hopf => "hopf",
            Suite::Pentagon => "pentagon",
            Suite::Peterweyl => "peterweyl",
            Suite::Fejer => "fejer",
            Suite::Bimodule => "bimodule",
            Suite::Fubini => "fubini",
            Suite::All => "all",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Hopf | Suite::Pentagon | Suite::Peterweyl => 1e-10,
            _ => 1e-8,
        }
    }

    /// The concrete suites selected by a list of flags, in canonical order.
    pub fn expand(selected: &[Suite]) -> Vec<Suite> {
        const ALL: [Suite; 6] =
            [Suite::Hopf, Suite::Pentagon, Suite::Peterweyl, Suite::Fejer, Suite::Bimodule, Suite::Fubini];
        if selected.contains(&Suite::All) {
            return ALL.to_vec();
        }
        let mut out: Vec<Suite> = selected.to_vec();
        out.sort();
        out.dedup();
        out
    }
}

pub fn run(suite: Suite, q: &Arc<FiniteQuantumGroup>, tol: Option<f64>, seed: u64) -> Result<SuiteReport> {
    let mut col = Collector::default();
    match suite {
        Suite::Hopf => hopf(q, &mut col),
        Suite::Pentagon => col.fields("", q.unitary_report()),
        Suite::Peterweyl => col.fields("", &q.peter_weyl_report()),
        Suite::Fejer => fejer(q, seed, &mut col)?,
        Suite::Bimodule => bimodule(q, seed, &mut col)?,
        Suite::Fubini => fubini(q, seed, &mut col)?,
        Suite::All => unreachable!("expanded before running"),
    }
    Ok(col.finish(suite.name(), tol.unwrap_or(suite.default_tolerance())))
}

fn hopf(q: &FiniteQuantumGroup, col: &mut Collector) {
    for a in q.axioms() {
        col.residual(format!("primal/{}", a.name), a.residual);
    }
    for a in q.dual_axioms() {
        col.residual(format!("dual/{}", a.name), a.residual);
    }
}

fn random_element(cp: &CrossedProduct, rng: &mut ChaCha8Rng) -> CMatrix {
    let coords: Vec<C64> = (0..cp.dim()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    cp.element(&coords)
}

fn suite_actions(q: &Arc<FiniteQuantumGroup>, n: usize) -> Result<Vec<Action>> {
    Ok(vec![trivial_action(q.clone(), n)?, canonical_action(q.clone(), ActionKind::VonNeumann)?])
}

fn fejer(q: &Arc<FiniteQuantumGroup>, seed: u64, col: &mut Collector) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..q.irreps().len()).collect();
    for a in suite_actions(q, 1)? {
        let cp = crossed_product(&a)?;
        let label = a.label().to_string();
        let mut worst = 0.0f64;
        for t in cp.generators() {
            worst = worst.max(fejer_reconstruct(&cp, t)?.residual);
        }
        col.residual(format!("{label}/reconstruct"), worst);

        let mut worst = 0.0f64;
        for _ in 0..FEJER_PAIRS {
            let t = random_element(&cp, &mut rng);
            let f = Functional::random(q.dual_side(), &mut rng);
            let lhs = fejer_term(&cp, &t, &f, &all)?;
            worst = worst.max(lhs.dist(&cp.module_action_via_theta(&t, &f)?));
        }
        col.residual(format!("{label}/module_action"), worst);

        let t = random_element(&cp, &mut rng);
        let mut sum = CMatrix::zeros(t.rows(), t.cols());
        let mut idem = 0.0f64;
        for gamma in 0..q.irreps().len() {
            let p = spectral_projection(&cp, &t, gamma)?;
            idem = idem.max(spectral_projection(&cp, &p, gamma)?.dist(&p));
            sum = &sum + &p;
        }
        col.residual(format!("{label}/projection_sum"), sum.dist(&t));
        col.residual(format!("{label}/projection_idempotent"), idem);
    }
    Ok(())
}

fn ideal_family(q: &FiniteQuantumGroup, seed: u64) -> Result<(String, Vec<LeftIdeal<'_>>)> {
    let d = q.dim();
    if is_commutative(q) && d < usize::BITS as usize && (1usize << d) <= MAX_ENUMERATED_IDEALS {
        Ok(("enumerated".into(), enumerate_ideals(q)?))
    } else {
        Ok((format!("random:{seed}"), random_ideals(q, RANDOM_IDEALS, seed)?))
    }
}

fn bimodule(q: &FiniteQuantumGroup, seed: u64, col: &mut Collector) -> Result<()> {
    let (family, ideals) = ideal_family(q, seed)?;
    for (i, j) in ideals.iter().enumerate() {
        let r = check_bim_equals_ranperp(j)?;
        col.structural(format!("{family}/{i}/bim_equals_ranperp"), r.residual, r.passed());
        let s = cstar_variants(j)?;
        col.structural(format!("{family}/{i}/cstar"), s.residual, s.passed());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..NULL_SET_SAMPLES {
        let sigma = random_sigma(q, &mut rng)?;
        let n = check_null_sets(q, &sigma)?;
        col.structural(format!("sigma/{i}/null_sets"), n.residual, n.passed());
        let h = harmonic(q, &sigma)?;
        col.structural(format!("sigma/{i}/harmonic"), h.residual, h.bim_equal);
    }
    Ok(())
}

fn fubini(q: &Arc<FiniteQuantumGroup>, seed: u64, col: &mut Collector) -> Result<()> {
    let mut choices = vec![XChoice::Zero, XChoice::Fixed, XChoice::Full];
    choices.extend((0..FUBINI_ORBITS).map(|k| XChoice::Random(seed.wrapping_add(k))));
    for a in suite_actions(q, 2)? {
        let cp = crossed_product(&a)?;
        for x in &choices {
            let r = slice_map_check(&cp, &x.resolve(&a)?)?;
            col.structural(format!("{}/{}", a.label(), x.name()), r.residual, r.passed());
        }
    }
    Ok(())
}
