use jumpfk::jump::{sample_path, JumpSampler};
use jumpfk::lattice::{build_kernel, combined_kernel, convolve, semigroup_apply};
use jumpfk::feynman_kac::PathEnsemble;
use jumpfk::{Field, FieldSeries, Grid, Kernel, KernelProfile, ModelParams, SeedSpec};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn grid_1d(points: usize) -> Grid<f64> {
    Grid::new(1, points as f64 * 0.5, points).unwrap()
}

fn field_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, len)
}

/// Direct `h^d sum_j J(x_i - x_j) f(x_j)` with index arithmetic per axis.
fn brute_convolution(g: &Grid<f64>, kernel: &[f64], f: &[f64]) -> Vec<f64> {
    let n = g.points();
    (0..g.len())
        .map(|i| {
            let ci = g.coords(i);
            (0..g.len())
                .map(|j| {
                    let cj = g.coords(j);
                    let diff: Vec<usize> = ci.iter().zip(&cj).map(|(a, b)| (a + n - b) % n).collect();
                    kernel[g.index(&diff)] * f[j]
                })
                .sum::<f64>()
                * g.cell_volume()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_matches_brute_force(
        dim in 1usize..=2,
        points in prop::sample::select(vec![4usize, 6, 8, 16]),
        seed in any::<u64>(),
    ) {
        let g = Grid::new(dim, points as f64, points).unwrap();
        let len = g.len();
        let mut rng = SeedSpec::new(seed, 0).rng();
        use rand::Rng;
        let kv: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fv: Vec<f64> = (0..len).map(|_| rng.random_range(-3.0..3.0)).collect();
        let k = jumpfk::SignedKernel::new(&g, kv.clone()).unwrap();
        let f = Field::new(&g, fv.clone()).unwrap();
        let fast = convolve(&k, &f).unwrap();
        let slow = brute_convolution(&g, &kv, &fv);
        for (a, b) in fast.values().iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn convolution_is_linear(f in field_strategy(32), h in field_strategy(32), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = grid_1d(32);
        let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
        let f = Field::new(&g, f).unwrap();
        let h = Field::new(&g, h).unwrap();
        let lhs = convolve(&k, &f.scale(a).axpy(b, &h).unwrap()).unwrap();
        let rhs = convolve(&k, &f).unwrap().scale(a).axpy(b, &convolve(&k, &h).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-10);
    }

    #[test]
    fn semigroup_composes(f in field_strategy(32), s in 0.0f64..3.0, t in 0.0f64..3.0, sigma in 0.5f64..3.0) {
        let g = grid_1d(32);
        let k = build_kernel(&KernelProfile::Gaussian { sigma }, &g).unwrap().scaled(1.7).unwrap();
        let f = Field::new(&g, f).unwrap();
        let two = semigroup_apply(&k, s, &semigroup_apply(&k, t, &f).unwrap()).unwrap();
        let one = semigroup_apply(&k, s + t, &f).unwrap();
        prop_assert!(two.distance(&one).unwrap() < 1e-9);
    }

    #[test]
    fn semigroup_conserves_mass(f in field_strategy(32), t in 0.0f64..10.0, radius in 0.5f64..4.0) {
        let g = grid_1d(32);
        let k = build_kernel(&KernelProfile::TopHat { radius }, &g).unwrap().scaled(2.5).unwrap();
        let f = Field::new(&g, f).unwrap();
        let u = semigroup_apply(&k, t, &f).unwrap();
        prop_assert!((u.mean() - f.mean()).abs() < 1e-10);
    }

    #[test]
    fn gamma_equals_beta_when_j_theta_is_nonneg(
        kp in 1.0f64..5.0,
        m_frac in 0.05f64..0.95,
        km in 0.1f64..3.0,
        sigma_plus in 1.0f64..3.0,
        sigma_minus in 1.0f64..3.0,
    ) {
        let g = Grid::new(1, 40.0, 128).unwrap();
        let p = ModelParams::new(kp, km, kp * m_frac).unwrap();
        let ap = build_kernel(&KernelProfile::Gaussian { sigma: sigma_plus }, &g).unwrap();
        let am = build_kernel(&KernelProfile::Gaussian { sigma: sigma_minus }, &g).unwrap();
        let j = combined_kernel(&p, &ap, &am, p.theta()).unwrap();
        prop_assume!(j.is_nonneg());
        prop_assert!((p.gamma(&j) - p.beta()).abs() < 1e-12);
    }

    #[test]
    fn path_integral_is_additive(seed in any::<u64>(), split in 0.05f64..0.95, amp in 0.1f64..2.0) {
        let g = grid_1d(32);
        let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap().scaled(3.0).unwrap();
        let horizon = 2.0;
        let fields = (0..=8)
            .map(|j| Field::from_fn(&g, |x| amp * (x[0] + 0.3 * j as f64).sin()).unwrap())
            .collect();
        let w = FieldSeries::new(0.25, fields).unwrap();
        let path = sample_path(&k, 5, horizon, SeedSpec::new(seed, 1)).unwrap();
        let whole = path.path_potential_integral(&w).unwrap();
        let cut = split * horizon;
        let parts = path.potential_integral_between(&w, 0.0, cut).unwrap()
            + path.potential_integral_between(&w, cut, horizon).unwrap();
        prop_assert!((whole - parts).abs() < 1e-12);
    }

    #[test]
    fn paths_are_reproducible(seed in any::<u64>(), stream in any::<u64>(), start in 0usize..32) {
        let g = grid_1d(32);
        let k = build_kernel(&KernelProfile::TopHat { radius: 2.0 }, &g).unwrap().scaled(2.0).unwrap();
        let a = sample_path(&k, start, 5.0, SeedSpec::new(seed, stream)).unwrap();
        let b = sample_path(&k, start, 5.0, SeedSpec::new(seed, stream)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn weights_are_monotone_in_the_potential(seed in any::<u64>(), shift in 0.0f64..1.0) {
        let g = grid_1d(32);
        let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
        let sampler = JumpSampler::new(&k).unwrap();
        let ens = PathEnsemble::sample(&sampler, &[4], 50, 1.0, SeedSpec::new(seed, 0)).unwrap();
        let w1 = Field::from_fn(&g, |x| (x[0]).cos()).unwrap();
        let w2 = w1.offset(shift).zip_with(&Field::from_fn(&g, |x| 0.2 * x[0].sin().abs()).unwrap(), |a, b| a + b).unwrap();
        let s1 = FieldSeries::constant(w1, 1.0).unwrap();
        let s2 = FieldSeries::constant(w2, 1.0).unwrap();
        let u0 = Field::from_fn(&g, |x| 1.0 + x[0].sin().powi(2)).unwrap();
        let a = ens.weights(0, &u0, &s1, 1.0).unwrap();
        let b = ens.weights(0, &u0, &s2, 1.0).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x <= y));
    }
}

fn chi_square_p_value(kernel: &Kernel<f64>, start: usize, t: f64, n_paths: u64, seed: u64) -> f64 {
    let g = kernel.grid();
    let sampler = JumpSampler::new(kernel).unwrap();
    let mut counts = vec![0u64; g.len()];
    for i in 0..n_paths {
        let p = sampler.sample_path(start, t, SeedSpec::new(seed, i)).unwrap();
        counts[p.position_at(t).unwrap()] += 1;
    }
    // P(X_t = y | X_0 = start) = (e^{t L} 1_y)(start)
    let probs: Vec<f64> = (0..g.len())
        .map(|y| semigroup_apply(kernel, t, &Field::indicator(g, y)).unwrap().get(start))
        .collect();
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // pool cells with expected count below 5 into one bin
    let n = n_paths as f64;
    let (mut stat, mut bins, mut pooled_obs, mut pooled_exp) = (0.0, 0usize, 0.0, 0.0);
    for (c, p) in counts.iter().zip(&probs) {
        let e = n * p;
        if e < 5.0 {
            pooled_obs += *c as f64;
            pooled_exp += e;
        } else {
            stat += (*c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    }
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn transition_law_passes_chi_square() {
    let g = Grid::new(1, 16.0, 32).unwrap();
    let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap().scaled(2.0).unwrap();
    let p = chi_square_p_value(&k, 7, 1.5, 100_000, 21);
    assert!(p > 1e-3, "p = {p}");
}

#[test]
fn transition_law_of_an_asymmetric_kernel() {
    // all mass on displacement +1: the intensity of x -> y is J(x - y), so paths move left
    let g = Grid::new(1, 8.0, 16).unwrap();
    let mut v = vec![0.0; 16];
    v[1] = 0.7;
    v[2] = 0.3;
    let k = Kernel::new(&g, v).unwrap();
    let k = k.scaled(1.0 / k.mass() * 1.5).unwrap();
    let p = chi_square_p_value(&k, 8, 2.0, 100_000, 4);
    assert!(p > 1e-3, "p = {p}");
}
