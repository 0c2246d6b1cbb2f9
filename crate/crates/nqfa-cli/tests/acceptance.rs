//! Acceptance suite: one PASS/FAIL line per criterion. Thresholds are pinned
//! here and never read from the library's defaults.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nqfa::bimodules::{
    check_bim_equals_ranperp, check_null_sets, classify_joint_invariant, cstar_variants, enumerate_ideals,
    harmonic, null_set, random_ideals, random_sigma, ran_perp, Classification, LeftIdeal, Violation,
};
use nqfa::dynamics::{
    bundled, crossed_product, fejer_partial, fejer_reconstruct, fejer_term, spectral_projection, trivial_action,
    CrossedProduct, BUNDLED,
};
use nqfa::fourier::{apply_map, theta_r, Functional};
use nqfa::fubini::{slice_map_check, standard_cases};
use nqfa::groups::FiniteGroup;
use nqfa::limits::Limits;
use nqfa::numerics::{c, span, CMatrix, C64};
use nqfa::qg::FiniteQuantumGroup;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

const TOL_HOPF: f64 = 1e-10;
const TOL_PETER_WEYL: f64 = 1e-10;
const TOL_FEJER: f64 = 1e-8;
const TOL_MODULE: f64 = 1e-9;
const TOL_PROJECTION: f64 = 1e-9;
const TOL_ORACLE: f64 = 1e-10;
/// Subspace equalities below are decided at this residual.
const TOL_SUBSPACE: f64 = 1e-8;
const BUDGET_HOPF: Duration = Duration::from_secs(5);
const BUDGET_FEJER: Duration = Duration::from_secs(10);
const BUDGET_VERIFY: Duration = Duration::from_secs(60);
const RANDOM_PAIRS: usize = 50;
const RANDOM_IDEALS: usize = 20;
const SIGMA_SAMPLES: usize = 20;
const SEED: u64 = 0;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn host(name: &str, side: &str) -> FiniteQuantumGroup {
    FiniteQuantumGroup::from_group_side(&FiniteGroup::builtin(name).unwrap(), side).unwrap()
}

fn hosts() -> Vec<FiniteQuantumGroup> {
    let mut out = Vec::new();
    for g in ["c2", "c4", "s3"] {
        for side in ["function", "group"] {
            out.push(host(g, side));
        }
    }
    out
}

fn random_element(cp: &CrossedProduct, rng: &mut ChaCha8Rng) -> CMatrix {
    let coords: Vec<C64> = (0..cp.dim()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    cp.element(&coords)
}

fn hopf_haar_pentagon() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for q in hosts() {
        let axioms = q.axioms().iter().chain(q.dual_axioms()).map(|a| a.residual).fold(0.0, f64::max);
        worst = worst.max(axioms).max(q.unitary_report().max()).max(q.peter_weyl_report().max());
    }
    let t = start.elapsed();
    verdict(worst <= TOL_HOPF && t < BUDGET_HOPF, format!("max residual {worst:.2e} (tol {TOL_HOPF:.0e}), {t:.2?}"))
}

fn peter_weyl() -> Verdict {
    let mut worst = 0.0f64;
    let mut dims_ok = true;
    for q in hosts() {
        worst = worst.max(q.peter_weyl_report().max());
        dims_ok &= q.irreps().iter().map(|u| u.dim() * u.dim()).sum::<usize>() == q.dim();
    }
    // φ̂((û_11)* û_11) for the two-dimensional irreducible of the dual of s3.
    let q = host("s3", "group");
    let dual = q.dual_side().tensors();
    let std = q.irreps().iter().find(|u| u.dim() == 2).expect("s3 has a two-dimensional irreducible");
    let u = std.coeff_coords(0, 0);
    let value = dual.haar_of(&dual.mul(&dual.star_of(u), u));
    let off = (value - c(0.5, 0.0)).norm();
    verdict(
        worst <= TOL_PETER_WEYL && dims_ok && off <= TOL_PETER_WEYL,
        format!("max residual {worst:.2e}, sum of squared dims {dims_ok}, φ̂(u*u) = {:.12} (tol {TOL_PETER_WEYL:.0e})", value.re),
    )
}

fn fejer_exactness() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut rows = 0;
    for name in BUNDLED {
        let cp = crossed_product(&bundled(name).unwrap()).unwrap();
        for t in cp.generators() {
            worst = worst.max(fejer_reconstruct(&cp, t).unwrap().residual);
            rows += 1;
        }
    }
    let t = start.elapsed();
    verdict(
        worst <= TOL_FEJER && t < BUDGET_FEJER,
        format!("{rows} basis elements, max residual {worst:.2e} (tol {TOL_FEJER:.0e}), {t:.2?}"),
    )
}

fn two_sided_identity() -> Verdict {
    let mut worst = 0.0f64;
    for name in BUNDLED {
        let cp = crossed_product(&bundled(name).unwrap()).unwrap();
        let q = cp.action().host();
        let all: Vec<usize> = (0..q.irreps().len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..RANDOM_PAIRS {
            let t = random_element(&cp, &mut rng);
            let f = Functional::random(q.dual_side(), &mut rng);
            let lhs = fejer_term(&cp, &t, &f, &all).unwrap();
            worst = worst.max(lhs.dist(&cp.module_action_via_theta(&t, &f).unwrap()));
        }
    }
    verdict(worst <= TOL_MODULE, format!("{RANDOM_PAIRS} pairs per action, max residual {worst:.2e} (tol {TOL_MODULE:.0e})"))
}

fn spectral_projections() -> Verdict {
    let mut worst = 0.0f64;
    for name in BUNDLED {
        let cp = crossed_product(&bundled(name).unwrap()).unwrap();
        let bands = cp.action().host().irreps().len();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..5 {
            let t = random_element(&cp, &mut rng);
            let scale = t.norm().max(1.0);
            let p: Vec<CMatrix> = (0..bands).map(|g| spectral_projection(&cp, &t, g).unwrap()).collect();
            let mut sum = CMatrix::zeros(t.rows(), t.cols());
            for (g, pg) in p.iter().enumerate() {
                sum = &sum + pg;
                for h in 0..bands {
                    let php = spectral_projection(&cp, pg, h).unwrap();
                    let expected = if g == h { pg.clone() } else { CMatrix::zeros(t.rows(), t.cols()) };
                    worst = worst.max(php.dist(&expected) / scale);
                }
            }
            worst = worst.max(sum.dist(&t) / scale);
        }
    }
    verdict(worst <= TOL_PROJECTION, format!("idempotent, orthogonal, summing to T: max residual {worst:.2e} (tol {TOL_PROJECTION:.0e})"))
}

fn fft(v: &[C64], inverse: bool) -> Vec<C64> {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse { planner.plan_fft_inverse(v.len()) } else { planner.plan_fft_forward(v.len()) };
    let mut buf = v.to_vec();
    plan.process(&mut buf);
    buf
}

fn diagonal(m: &CMatrix) -> Vec<C64> {
    (0..m.rows()).map(|i| m.get(i, i)).collect()
}

/// `Θr(f)` on `C(Z/N)` is convolution with the reflected `f`; the Fejér
/// partial sums of the trivial action of `C[Z/N]` on `C` are truncated
/// Fourier series on the diagonal. Both are compared with rustfft.
fn classical_oracle() -> Verdict {
    let mut worst = 0.0f64;
    let limits = Limits { max_l2_dim: 16, ..Limits::default() };
    for n in [4usize, 8, 16] {
        let g = FiniteGroup::cyclic(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + n as u64);
        let nf = n as f64;

        let q = FiniteQuantumGroup::from_group_side_with(&g, "function", &limits).unwrap();
        for _ in 0..5 {
            let f = Functional::random(q.primal(), &mut rng);
            let x: Vec<C64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let got = apply_map(&theta_r(&q, &f).unwrap(), &q.primal().element(&x));
            let reflected: Vec<C64> = (0..n).map(|t| f.coords()[(n - t) % n]).collect();
            let (xh, fh) = (fft(&x, false), fft(&reflected, false));
            let prod: Vec<C64> = xh.iter().zip(&fh).map(|(a, b)| a * b).collect();
            let y: Vec<C64> = fft(&prod, true).into_iter().map(|z| z / nf).collect();
            worst = worst.max(got.max_dist(&CMatrix::from_diag(&y)));
        }

        let q = Arc::new(FiniteQuantumGroup::from_group_side_with(&g, "group", &limits).unwrap());
        let cp = crossed_product(&trivial_action(q.clone(), 1).unwrap()).unwrap();
        let eps = Functional::counit(q.dual_side());
        // Frequency carried by each band, read off the spectrum of its character.
        let freq: Vec<usize> = q
            .irreps()
            .iter()
            .map(|u| {
                let spectrum = fft(&diagonal(&q.dual_side().element(u.coeff_coords(0, 0))), false);
                let k = (0..n).max_by(|&a, &b| spectrum[a].norm().total_cmp(&spectrum[b].norm())).unwrap();
                assert!(spectrum.iter().enumerate().all(|(j, z)| j == k || z.norm() < 1e-9), "band is not a pure frequency");
                k
            })
            .collect();
        for _ in 0..3 {
            let t = random_element(&cp, &mut rng);
            let th = fft(&diagonal(&t), false);
            for s in 0..freq.len() {
                let bands: Vec<usize> = (0..=s).collect();
                let got = fejer_partial(&cp, &t, &eps, &bands).unwrap();
                let kept: Vec<C64> =
                    (0..n).map(|k| if freq[..=s].contains(&k) { th[k] } else { c(0.0, 0.0) }).collect();
                let want: Vec<C64> = fft(&kept, true).into_iter().map(|z| z / nf).collect();
                worst = worst.max(got.max_dist(&CMatrix::from_diag(&want)));
            }
        }
    }
    verdict(worst <= TOL_ORACLE, format!("N = 4, 8, 16, max entrywise deviation {worst:.2e} (tol {TOL_ORACLE:.0e})"))
}

/// The ideal families: every ideal of `ℓ¹(Z/4)` and seeded random ideals of
/// `ℓ¹(s3)` and of the predual of the dual of `s3`.
fn with_ideal_families(mut check: impl FnMut(&LeftIdeal) -> (bool, f64)) -> (usize, bool, f64) {
    let c4 = host("c4", "function");
    let s3 = host("s3", "function");
    let s3_dual = host("s3", "group");
    let mut families: Vec<(&str, Vec<LeftIdeal>)> = vec![("c4", enumerate_ideals(&c4).unwrap())];
    families.push(("s3", random_ideals(&s3, RANDOM_IDEALS, SEED).unwrap()));
    families.push(("dual s3", random_ideals(&s3_dual, RANDOM_IDEALS, SEED).unwrap()));
    let (mut count, mut ok, mut worst) = (0, true, 0.0f64);
    assert_eq!(families[0].1.len(), 16, "ℓ¹(Z/4) has sixteen closed ideals");
    for (_, ideals) in &families {
        for j in ideals {
            let (passed, residual) = check(j);
            ok &= passed;
            worst = worst.max(residual);
            count += 1;
        }
    }
    (count, ok, worst)
}

fn bimodule_correspondence() -> Verdict {
    let (count, ok, worst) = with_ideal_families(|j| {
        let r = check_bim_equals_ranperp(j).unwrap();
        (r.passed(), r.residual)
    });
    verdict(ok && worst <= TOL_SUBSPACE, format!("{count} ideals (16 + {RANDOM_IDEALS} + {RANDOM_IDEALS}), max residual {worst:.2e}"))
}

fn null_sets_and_harmonic() -> Verdict {
    let mut ok = true;
    let mut worst = 0.0f64;
    for (g, side) in [("c4", "function"), ("s3", "function"), ("s3", "group")] {
        let q = host(g, side);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..SIGMA_SAMPLES {
            let sigma = random_sigma(&q, &mut rng).unwrap();
            let n = check_null_sets(&q, &sigma).unwrap();
            let h = harmonic(&q, &sigma).unwrap();
            ok &= n.passed() && h.bim_equal;
            worst = worst.max(n.residual).max(h.residual);
        }
    }
    let q = host("c4", "function");
    for j in enumerate_ideals(&q).unwrap() {
        let n = null_set(&q, &j.functionals()).unwrap();
        let ann = j.annihilator().unwrap();
        worst = worst.max(n.equality_residual(&ann).unwrap());
    }
    verdict(ok && worst <= TOL_SUBSPACE, format!("{SIGMA_SAMPLES} samples on 3 hosts and 16 ideals, max residual {worst:.2e}"))
}

fn classifier() -> Verdict {
    let q = host("c4", "function");
    let mut ok = true;
    let mut worst = 0.0f64;
    for j in enumerate_ideals(&q).unwrap() {
        let u = ran_perp(&j).unwrap().space;
        match classify_joint_invariant(&q, &u).unwrap() {
            Classification::Ideal { ideal, residual, equal } => {
                let r = ideal.annihilator().unwrap().equality_residual(&j.annihilator().unwrap()).unwrap();
                ok &= equal;
                worst = worst.max(residual).max(r);
            }
            Classification::Violation(_) => ok = false,
        }
    }
    // A single off-diagonal matrix unit is not an L∞(Ĝ)-bimodule.
    let d = q.dim();
    let u = span((d, d), &[CMatrix::unit(d, d, 0, 1)], 1e-12).unwrap();
    let violation = match classify_joint_invariant(&q, &u).unwrap() {
        Classification::Violation(v @ Violation::NotBimodule { .. }) => v.residual(),
        _ => 0.0,
    };
    // On C[Z/4] the diagonal matrix unit spans an ℓ∞(Z/4)-bimodule that is
    // moved by the dual translations.
    let q = host("c4", "group");
    let u = span((d, d), &[CMatrix::unit(d, d, 0, 0)], 1e-12).unwrap();
    let violation2 = match classify_joint_invariant(&q, &u).unwrap() {
        Classification::Violation(v @ Violation::NotInvariant { .. }) => v.residual(),
        _ => 0.0,
    };
    verdict(
        ok && worst <= TOL_SUBSPACE && violation > 0.1 && violation2 > 0.1,
        format!("16 round trips, max residual {worst:.2e}; violations certified at {violation:.2e} and {violation2:.2e}"),
    )
}

fn cstar() -> Verdict {
    let (count, ok, worst) = with_ideal_families(|j| {
        let r = cstar_variants(j).unwrap();
        (r.passed(), r.residual)
    });
    verdict(ok && worst <= TOL_SUBSPACE, format!("{count} ideals, max residual {worst:.2e}"))
}

fn fubini() -> Verdict {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for name in BUNDLED {
        let a = bundled(name).unwrap();
        let cp = crossed_product(&a).unwrap();
        for (_, x) in standard_cases(&a, 3).unwrap() {
            let r = slice_map_check(&cp, &x).unwrap();
            ok &= r.passed();
            worst = worst.max(r.residual);
            cases += 1;
        }
    }
    verdict(ok && worst <= TOL_SUBSPACE, format!("{cases} (action, X) cases, max residual {worst:.2e}"))
}

fn determinism() -> Verdict {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_nqfa"))
            .args(["verify", "--suite", "all", "--seed", "0"])
            .output()
            .expect("binary runs");
        (out, start.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let passed = a.status.success() && b.status.success();
    verdict(
        same && passed && ta.max(tb) < BUDGET_VERIFY,
        format!("identical {same}, exit ok {passed}, {:.2?} and {:.2?}", ta, tb),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("Hopf, Haar and pentagon on six quantum groups", hopf_haar_pentagon),
        ("Peter–Weyl relations", peter_weyl),
        ("Fejér exactness on bundled actions", fejer_exactness),
        ("Fejér term equals the dual module action", two_sided_identity),
        ("spectral projections", spectral_projections),
        ("classical DFT oracle", classical_oracle),
        ("Bim(J⊥) = Ran(J)⊥ with trace identity", bimodule_correspondence),
        ("null sets and harmonic operators", null_sets_and_harmonic),
        ("joint-invariance classifier", classifier),
        ("C* variants", cstar),
        ("Fubini crossed products", fubini),
        ("deterministic verify --suite all", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|e| {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
            });
        if !v.passed {
            failures += 1;
        }
        println!("criterion {:>2}: {} {name}: {}", i + 1, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
