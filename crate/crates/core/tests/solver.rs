use jumpfk::io::{read_series_dir, write_series_dir};
use jumpfk::lattice::{build_kernel, combined_kernel};
use jumpfk::solver::*;
use jumpfk::{Field, FieldSeries, Grid, Kernel, KernelProfile, ModelParams};

fn bench() -> (Grid<f64>, ModelParams<f64>, Kernel<f64>, Kernel<f64>) {
    let g = Grid::new(1, 20.0, 64).unwrap();
    let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
    let ap = build_kernel(&KernelProfile::Gaussian { sigma: 1.5 }, &g).unwrap();
    let am = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
    (g, p, ap, am)
}

fn wave(g: &Grid<f64>, base: f64, height: f64) -> Field<f64> {
    Field::from_fn(g, |x| base + height * (std::f64::consts::TAU * x[0] / 20.0).sin()).unwrap()
}

#[test]
fn perturbed_solver_self_convergence() {
    let (g, _, ap, _) = bench();
    let u0 = wave(&g, 1.0, 0.5);
    let w = FieldSeries::new(
        1.0,
        vec![wave(&g, 0.0, 0.5), wave(&g, 0.2, -0.3)],
    )
    .unwrap();
    let at = |dt: f64| {
        solve_perturbed(&u0, &w, &ap, StepOptions::new(1.0, dt)).unwrap().series.last().clone()
    };
    let (coarse, mid, fine) = (at(0.04), at(0.02), at(0.01));
    // Richardson extrapolant of a second-order scheme
    let extrapolated = fine.scale(4.0 / 3.0).axpy(-1.0 / 3.0, &mid).unwrap();
    let e_mid = mid.distance(&extrapolated).unwrap();
    let e_coarse = coarse.distance(&extrapolated).unwrap();
    let ratio = e_coarse / e_mid;
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
}

#[test]
fn solutions_between_zero_and_theta_stay_there() {
    let (g, p, ap, am) = bench();
    assert!(combined_kernel(&p, &ap, &am, p.theta()).unwrap().is_nonneg());
    let u0 = Field::from_fn(&g, |x| 0.5 + 0.5 * (-(x[0] - 7.0).powi(2)).exp() - 0.45 * (-(x[0] - 14.0).powi(2)).exp()).unwrap();
    assert!(u0.min() >= 0.0 && u0.max() <= 1.0);
    let run = solve_logistic(&u0, &p, &ap, &am, StepOptions::new(10.0, 0.01)).unwrap();
    assert!(run.norms.iter().all(|r| r.min >= 0.0 && r.max <= p.theta() + 1e-14));
}

#[test]
fn deviation_from_theta_does_not_increase() {
    let (g, p, ap, am) = bench();
    let dt = 0.01;
    let u0 = Field::from_fn(&g, |x| 1.0 + 0.8 * (std::f64::consts::TAU * x[0] / 20.0).sin().powi(3)).unwrap();
    assert!(u0.min() > 0.19 && u0.max() < 1.81);
    let run = solve_logistic(&u0, &p, &ap, &am, StepOptions::new(10.0, dt)).unwrap();
    let devs: Vec<f64> = run.norms.iter().map(|r| r.deviation(p.theta())).collect();
    assert!(devs.windows(2).all(|w| w[1] <= w[0] + dt * dt));
}

#[test]
fn first_coefficient_is_linear_in_xi() {
    let (g, p, ap, am) = bench();
    let xi = wave(&g, 0.3, 0.7);
    let opts = StepOptions::new(2.0, 0.05);
    let one = solve_taylor_hierarchy(&xi, &p, &ap, &am, 1, opts).unwrap();
    let two = solve_taylor_hierarchy(&xi.scale(2.0), &p, &ap, &am, 1, opts).unwrap();
    for (a, b) in one.coefficient(1).fields().iter().zip(two.coefficient(1).fields()) {
        assert!(a.scale(2.0).distance(b).unwrap() < 1e-10);
    }
}

#[test]
fn resummed_hierarchy_matches_the_solver() {
    let (g, p, ap, am) = bench();
    let theta = p.theta();
    let xi = Field::from_fn(&g, |x| (-(x[0] - 10.0).powi(2) / 4.0).exp()).unwrap();
    let lambda = 0.1;
    let dt = 0.01;
    let opts = StepOptions::new(3.0, dt).storing_every(10);
    let h = solve_taylor_hierarchy(&xi, &p, &ap, &am, 8, opts).unwrap();
    let sum = h.resum(lambda).unwrap();
    let u0 = xi.map(|v| theta * (lambda * v).exp());
    let run = solve_logistic(&u0, &p, &ap, &am, opts).unwrap();
    // terms of order 9 and beyond are far below dt^2 at |lambda| ||xi|| = 0.1
    for (a, b) in sum.fields().iter().zip(run.series.fields()) {
        assert!(a.distance(b).unwrap() < 5.0 * dt * dt);
    }
}

#[test]
fn series_directory_round_trip() {
    let (g, p, ap, am) = bench();
    let run = solve_logistic(&wave(&g, 1.0, 0.3), &p, &ap, &am, StepOptions::new(1.0, 0.01).storing_every(25)).unwrap();
    let dir = std::env::temp_dir().join(format!("jumpfk-series-{}", std::process::id()));
    let manifest = write_series_dir(&dir, &run.series).unwrap();
    assert_eq!(manifest.times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let back: FieldSeries<f64> = read_series_dir(&dir, &manifest).unwrap();
    assert_eq!(back.fields(), run.series.fields());
    std::fs::remove_dir_all(dir).unwrap();
}
