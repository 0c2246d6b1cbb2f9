//! Cyclic groups against an independent FFT.

use std::sync::Arc;

use nqfa::dynamics::{crossed_product, fejer_partial, trivial_action};
use nqfa::fourier::{apply_map, convolve, theta_l, theta_r, Functional};
use nqfa::groups::FiniteGroup;
use nqfa::limits::Limits;
use nqfa::numerics::{c, CMatrix, C64};
use nqfa::qg::FiniteQuantumGroup;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

fn fft(v: &[C64], inverse: bool) -> Vec<C64> {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse { planner.plan_fft_inverse(v.len()) } else { planner.plan_fft_forward(v.len()) };
    let mut buf = v.to_vec();
    plan.process(&mut buf);
    if inverse {
        let n = v.len() as f64;
        buf.iter_mut().for_each(|z| *z /= n);
    }
    buf
}

fn cyclic_convolution(a: &[C64], b: &[C64]) -> Vec<C64> {
    let (fa, fb) = (fft(a, false), fft(b, false));
    fft(&fa.iter().zip(&fb).map(|(x, y)| x * y).collect::<Vec<_>>(), true)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn limits() -> Limits {
    Limits { max_l2_dim: 16, ..Limits::default() }
}

fn host(n: usize, side: &str) -> FiniteQuantumGroup {
    FiniteQuantumGroup::from_group_side_with(&FiniteGroup::cyclic(n).unwrap(), side, &limits()).unwrap()
}

#[test]
fn convolution_of_point_mass_functionals_is_cyclic_convolution() {
    for n in [4, 8, 16] {
        let q = host(n, "function");
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let (f, g) = (random_vec(&mut rng, n), random_vec(&mut rng, n));
        let fg = convolve(q.primal(), &Functional::new(q.primal(), f.clone()).unwrap(), &Functional::new(q.primal(), g.clone()).unwrap())
            .unwrap();
        let want = cyclic_convolution(&f, &g);
        let err = fg.coords().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-10, "N = {n}: {err:e}");
    }
}

/// `Θr(f)x(s) = Σ_t x(s + t) f(t)` and `Θℓ(f)x(s) = Σ_t f(t) x(t + s)` on
/// the diagonal; for an abelian group the two agree.
#[test]
fn theta_maps_are_correlations() {
    for n in [4, 8, 16] {
        let q = host(n, "function");
        let mut rng = ChaCha8Rng::seed_from_u64(100 + n as u64);
        let (x, f) = (random_vec(&mut rng, n), random_vec(&mut rng, n));
        let reflected: Vec<C64> = (0..n).map(|t| f[(n - t) % n]).collect();
        let want = CMatrix::from_diag(&cyclic_convolution(&x, &reflected));
        let f = Functional::new(q.primal(), f).unwrap();
        let xm = q.primal().element(&x);
        for m in [theta_r(&q, &f).unwrap(), theta_l(&q, &f).unwrap()] {
            assert!(apply_map(&m, &xm).max_dist(&want) <= 1e-10, "N = {n}");
        }
    }
}

/// On `C[Z/N]` with the trivial action on `C`, the partial Fejér sums are
/// truncated Fourier series of the diagonal.
#[test]
fn fejer_partial_sums_are_truncated_fourier_series() {
    for n in [4, 8, 16] {
        let q = Arc::new(host(n, "group"));
        let cp = crossed_product(&trivial_action(q.clone(), 1).unwrap()).unwrap();
        let eps = Functional::counit(q.dual_side());
        let freq: Vec<usize> = q
            .irreps()
            .iter()
            .map(|u| {
                let m = q.dual_side().element(u.coeff_coords(0, 0));
                let spectrum = fft(&(0..n).map(|i| m.get(i, i)).collect::<Vec<_>>(), false);
                (0..n).max_by(|&a, &b| spectrum[a].norm().total_cmp(&spectrum[b].norm())).unwrap()
            })
            .collect();
        let mut sorted = freq.clone();
        sorted.sort();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>(), "each frequency is one band");

        let mut rng = ChaCha8Rng::seed_from_u64(200 + n as u64);
        let coords = random_vec(&mut rng, cp.dim());
        let t = cp.element(&coords);
        let spectrum = fft(&(0..n).map(|i| t.get(i, i)).collect::<Vec<_>>(), false);
        let mut previous = f64::INFINITY;
        for s in 0..n {
            let bands: Vec<usize> = (0..=s).collect();
            let got = fejer_partial(&cp, &t, &eps, &bands).unwrap();
            let kept: Vec<C64> = (0..n).map(|k| if freq[..=s].contains(&k) { spectrum[k] } else { c(0.0, 0.0) }).collect();
            assert!(got.max_dist(&CMatrix::from_diag(&fft(&kept, true))) <= 1e-10, "N = {n}, s = {s}");
            let residual = got.dist(&t);
            assert!(residual <= previous + 1e-12);
            previous = residual;
        }
        assert!(previous <= 1e-10);
    }
}
