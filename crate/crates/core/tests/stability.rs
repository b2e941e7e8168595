use num_complex::Complex64;

use jumpfk::lattice::{build_kernel, combined_kernel};
use jumpfk::solver::{logistic_closed_form, solve_logistic, solve_taylor_hierarchy, StepOptions};
use jumpfk::stability::*;
use jumpfk::{Field, Grid, Kernel, KernelProfile, ModelParams};

fn bench() -> (Grid<f64>, ModelParams<f64>, Kernel<f64>, Kernel<f64>) {
    let g = Grid::new(1, 20.0, 64).unwrap();
    let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
    let ap = build_kernel(&KernelProfile::Gaussian { sigma: 1.5 }, &g).unwrap();
    let am = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
    (g, p, ap, am)
}

fn bump(g: &Grid<f64>) -> Field<f64> {
    Field::from_fn(g, |x| (-(x[0] - 10.0).powi(2) / 4.0).exp()).unwrap()
}

/// `a_n = H^{(n)}(0) x^n / n!` by the trapezoid rule on the circle `|z| = x`,
/// using the closed form of `H` with the principal square root.
fn contour_terms(x: f64, beta: f64, gamma: f64, n_max: usize) -> Vec<f64> {
    let m = 512;
    let a = gamma / (2.0 * beta);
    let h = |z: Complex64| a - (a * a - (z.exp() - 1.0) * (gamma / beta)).sqrt();
    (0..=n_max)
        .map(|n| {
            let s: Complex64 = (0..m)
                .map(|j| {
                    let phi = std::f64::consts::TAU * j as f64 / m as f64;
                    h(Complex64::from_polar(x, phi)) * Complex64::from_polar(1.0, -(n as f64) * phi)
                })
                .sum();
            s.re / m as f64
        })
        .collect()
}

#[test]
fn cn_matches_contour_coefficients_at_half_radius() {
    for (beta, gamma) in [(1.0, 4.0), (1.0, 1.0), (0.5, 3.0)] {
        let x = 0.5 * generating_radius(beta, gamma);
        let c = cn_coefficients(beta, gamma, 10).unwrap();
        let oracle = contour_terms(x, beta, gamma, 10);
        let mut w = 1.0;
        for n in 0..=10 {
            if n > 0 {
                w *= x / n as f64;
            }
            assert!((c[n] * w - oracle[n]).abs() < 1e-8, "beta {beta} gamma {gamma} n {n}");
        }
    }
}

#[test]
fn truncated_series_within_tail_bound() {
    let (beta, gamma) = (1.0, 4.0);
    let x = 0.5 * generating_radius(beta, gamma);
    let c = cn_coefficients(beta, gamma, 30).unwrap();
    let mut terms = vec![0.0];
    let mut w = 1.0;
    for (n, cn) in c.iter().enumerate().skip(1) {
        w *= x / n as f64;
        terms.push(cn * w);
    }
    let partial: f64 = terms[..=12].iter().sum();
    // term ratios increase toward x / radius = 1/2 from below
    assert!(terms[1..].windows(2).all(|w| w[1] / w[0] < 0.5));
    let tail = terms[13] / (1.0 - 0.5);
    let h = generating_function(x, beta, gamma).unwrap();
    assert!((partial - h).abs() <= tail);
    assert!((h - x.exp_m1() - beta / gamma * h * h).abs() < 1e-12);
}

#[test]
fn envelope_sandwiches_constant_runs() {
    let (g, p, ap, am) = bench();
    let theta = p.theta();
    let rate = logistic_rate(p.kappa_minus(), theta);
    let run_for = |q0: f64| {
        solve_logistic(&Field::constant(&g, q0), &p, &ap, &am, StepOptions::new(20.0, 0.01))
            .unwrap()
            .norms
    };
    for q0 in [0.1, 0.5, 1.7, 3.0] {
        let (c0, d0) = ((q0 - theta).min(0.0), (q0 - theta).max(0.0));
        let env = decay_envelope(c0, d0, &rate, 1.0, 20).unwrap();
        assert!(env.cross_bounds_hold());
        let check = envelope_check(&run_for(q0), theta, &env, 1e-4).unwrap();
        assert_eq!(check.rows.len(), 21);
        assert!(check.holds, "q0 = {q0}");
    }
}

#[test]
fn envelope_limit_rate_matches_p_origin() {
    let rate = logistic_rate(1.0f64, 2.0);
    let env = decay_envelope(-1.5, 0.0, &rate, 1.0, 60).unwrap();
    assert!((env.limit_rate() + env.p_origin).abs() < 1e-9);
    assert!(env.c_seq.windows(2).all(|w| w[1] >= w[0]));
    assert!(env.rates.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn constant_data_slope_tends_to_beta() {
    let (g, p, ap, am) = bench();
    let run = solve_logistic(&Field::constant(&g, 0.4), &p, &ap, &am, StepOptions::new(20.0, 0.01)).unwrap();
    let early = logistic_decay_rate(&run.norms, &p, Some((2.0, 6.0))).unwrap();
    let late = logistic_decay_rate(&run.norms, &p, Some((12.0, 20.0))).unwrap();
    let gap = |o: &DecayOutcome<f64>| (o.fit().unwrap().slope + p.beta()).abs();
    assert!(gap(&late) < gap(&early));
    assert!(gap(&late) < 1e-3);
}

#[test]
fn generic_data_decays_at_least_at_beta() {
    let (g, p, ap, am) = bench();
    let theta = p.theta();
    let j_theta = combined_kernel(&p, &ap, &am, theta).unwrap();
    assert!(j_theta.is_nonneg());
    let u0 = Field::from_fn(&g, |x| {
        theta * (1.0 + 0.7 * (std::f64::consts::TAU * x[0] / 20.0).cos() + 0.2 * (x[0] * 0.9).sin())
    })
    .unwrap();
    assert!(u0.min() >= 0.2 * theta && u0.max() <= 2.0 * theta);
    let run = solve_logistic(&u0, &p, &ap, &am, StepOptions::new(12.0, 0.01)).unwrap();
    let outcome = logistic_decay_rate(&run.norms, &p, None).unwrap();
    let beta = p.beta();
    assert!(outcome.slope_at_most(-beta, 0.05 * beta), "{outcome:?}");
}

#[test]
fn theta_is_reported_stationary() {
    let (g, p, ap, am) = bench();
    let run = solve_logistic(&Field::constant(&g, p.theta()), &p, &ap, &am, StepOptions::new(2.0, 0.01)).unwrap();
    assert_eq!(logistic_decay_rate(&run.norms, &p, None).unwrap(), DecayOutcome::Stationary);
}

#[test]
fn taylor_bound_zero_lambda() {
    let (g, p, ap, am) = bench();
    let theta = p.theta();
    let j_theta = combined_kernel(&p, &ap, &am, theta).unwrap();
    let run = solve_logistic(&Field::constant(&g, theta), &p, &ap, &am, StepOptions::new(2.0, 0.01)).unwrap();
    let check = taylor_bound_check(&run.norms, &bump(&g), 0.0, theta, p.beta(), p.gamma(&j_theta), 0.0).unwrap();
    assert!(check.holds);
    assert!(check.bound.iter().all(|&b| b == 0.0));
}

#[test]
fn taylor_bound_constant_xi_against_closed_form() {
    let (g, p, ap, am) = bench();
    let theta = p.theta();
    let gamma = p.gamma(&combined_kernel(&p, &ap, &am, theta).unwrap());
    let x = 0.5 * generating_radius(p.beta(), gamma);
    for lambda in [x, -x] {
        let q0 = theta * f64::exp(lambda);
        let run = solve_logistic(&Field::constant(&g, q0), &p, &ap, &am, StepOptions::new(5.0, 0.01)).unwrap();
        let xi = Field::constant(&g, 1.0);
        let check = taylor_bound_check(&run.norms, &xi, lambda, theta, p.beta(), gamma, 1e-6).unwrap();
        assert!(check.holds);
        for (t, obs) in check.times.iter().zip(&check.observed) {
            let exact = (logistic_closed_form(q0, &p, *t).unwrap() - theta).abs();
            assert!((obs - exact).abs() < 5e-4);
        }
    }
}

#[test]
fn taylor_bound_generic_xi() {
    let (g, p, ap, am) = bench();
    let theta = p.theta();
    let gamma = p.gamma(&combined_kernel(&p, &ap, &am, theta).unwrap());
    assert!((gamma - p.beta()).abs() < 1e-12);
    let xi = Field::from_fn(&g, |x| (std::f64::consts::TAU * x[0] / 20.0).sin() - 0.5 * (x[0] * 0.6).cos()).unwrap();
    let lambda = 0.5 * generating_radius(p.beta(), gamma) / xi.sup_norm();
    let u0 = xi.map(|v| theta * (lambda * v).exp());
    let run = solve_logistic(&u0, &p, &ap, &am, StepOptions::new(10.0, 0.01)).unwrap();
    let check = taylor_bound_check(&run.norms, &xi, lambda, theta, p.beta(), gamma, 1e-6).unwrap();
    assert!(check.holds, "excess {}", check.max_excess());
    let err = taylor_bound_check(&run.norms, &xi, 10.0 * lambda, theta, p.beta(), gamma, 1e-6).unwrap_err();
    assert!(err.to_string().contains("radius"));
}

#[test]
fn k1_constant_xi_is_equality() {
    let (g, p, ap, am) = bench();
    let gamma = p.gamma(&combined_kernel(&p, &ap, &am, p.theta()).unwrap());
    let h = solve_taylor_hierarchy(&Field::constant(&g, 1.0), &p, &ap, &am, 1, StepOptions::new(5.0, 0.01)).unwrap();
    let check = k1_decay_check(h.coefficient(1), gamma, 1e-10);
    assert!(check.holds);
    for (t, obs) in check.times.iter().zip(&check.observed) {
        assert!((obs - p.theta() * (-gamma * t).exp()).abs() < 1e-10);
    }
}

#[test]
fn k1_spike_is_strictly_below() {
    let (g, p, ap, am) = bench();
    let gamma = p.gamma(&combined_kernel(&p, &ap, &am, p.theta()).unwrap());
    let h = solve_taylor_hierarchy(&Field::indicator(&g, 17), &p, &ap, &am, 1, StepOptions::new(3.0, 0.01)).unwrap();
    let check = k1_decay_check(h.coefficient(1), gamma, 0.0);
    assert!(check.holds);
    assert!(check.observed.iter().zip(&check.bound).skip(1).all(|(o, b)| o < b));
}

#[test]
fn k1_zero_xi_is_zero() {
    let (g, p, ap, am) = bench();
    let h = solve_taylor_hierarchy(&Field::zeros(&g), &p, &ap, &am, 1, StepOptions::new(1.0, 0.01)).unwrap();
    let check = k1_decay_check(h.coefficient(1), 1.0, 0.0);
    assert!(check.holds);
    assert!(check.observed.iter().all(|&o| o == 0.0));
}

#[test]
fn k1_slope_is_gamma() {
    // a short torus keeps the spectral gap above the constant mode wide
    let g: Grid<f64> = Grid::new(1, 10.0, 32).unwrap();
    let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
    let ap = build_kernel(&KernelProfile::Gaussian { sigma: 1.5 }, &g).unwrap();
    let am = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
    let gamma = p.gamma(&combined_kernel(&p, &ap, &am, p.theta()).unwrap());
    let xi = Field::from_fn(&g, |x| (-(x[0] - 5.0).powi(2)).exp()).unwrap();
    let h = solve_taylor_hierarchy(&xi, &p, &ap, &am, 1, StepOptions::new(20.0, 0.05)).unwrap();
    let k1 = h.coefficient(1);
    let norms: Vec<f64> = k1.fields().iter().map(|f| f.sup_norm()).collect();
    let fit = log_decay_fit(&k1.times(), &norms, (10.0, 20.0)).unwrap();
    assert!((fit.fit().unwrap().slope + gamma).abs() < 1e-3);
}
