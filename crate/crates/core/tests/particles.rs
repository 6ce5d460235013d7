use std::f64::consts::PI;

use levyfp::particles::{
    ensemble_vs_grid_distance, reflection_coupling_run, sample_stable, sample_stable_2d, simulate, step_euler,
    JumpSampler, DEFAULT_JUMP_CUTOFF,
};
use levyfp::quadrature::adaptive;
use levyfp::{
    CouplingOptions, DensityField, DriftSpec, GeneratorSpec, Grid, InitialDatum, LevyError, LevyMeasureSpec,
    LocalDiffusionSpec, ParticleEnsemble, ParticleModel, RngSpec, WeightFunction,
};

fn spec(grid: Grid, lambda0: f64, levy: LevyMeasureSpec, drift: DriftSpec) -> GeneratorSpec {
    GeneratorSpec::new(grid, LocalDiffusionSpec::isotropic(lambda0).unwrap(), levy, drift).unwrap()
}

fn line() -> Grid {
    Grid::line(256, 16.0).unwrap()
}

fn mean_cos(samples: &[f64], xi: f64) -> f64 {
    samples.iter().map(|x| (xi * x).cos()).sum::<f64>() / samples.len() as f64
}

#[test]
fn stable_draws_have_the_stable_transform() {
    let n = 1_000_000;
    for sigma in [0.8, 1.0, 1.5, 2.0] {
        let mut rng = RngSpec::new(11, 0).particle(0);
        let xs: Vec<f64> = (0..n).map(|_| sample_stable(sigma, 1.0, &mut rng).unwrap()).collect();
        for xi in [0.25, 0.5, 1.0, 2.0] {
            let got = mean_cos(&xs, xi);
            let want = (-(xi as f64).powf(sigma)).exp();
            assert!((got - want).abs() < 3e-3, "σ = {sigma}, ξ = {xi}: {got} vs {want}");
        }
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        assert!(sorted[n / 2].abs() < 5e-3, "σ = {sigma}: median {}", sorted[n / 2]);
    }
}

#[test]
fn stable_scale_enters_as_a_dilation() {
    let mut rng = RngSpec::new(3, 0).particle(0);
    let xs: Vec<f64> = (0..400_000).map(|_| sample_stable(1.2, 0.5, &mut rng).unwrap()).collect();
    let want = (-(0.5f64 * 1.5).powf(1.2)).exp();
    assert!((mean_cos(&xs, 1.5) - want).abs() < 5e-3);
}

#[test]
fn planar_stable_draws_are_isotropic() {
    let n = 400_000;
    for sigma in [1.0, 1.5, 2.0] {
        let mut rng = RngSpec::new(5, 1).particle(0);
        let ps: Vec<[f64; 2]> = (0..n).map(|_| sample_stable_2d(sigma, 1.0, &mut rng).unwrap()).collect();
        for (a, r) in [(0.0, 0.7), (PI / 3.0, 0.7), (PI / 2.0, 1.3)] {
            let (k1, k2) = (r * f64::cos(a), r * f64::sin(a));
            let got = ps.iter().map(|p| (k1 * p[0] + k2 * p[1]).cos()).sum::<f64>() / n as f64;
            let want = (-(r as f64).powf(sigma)).exp();
            assert!((got - want).abs() < 6e-3, "σ = {sigma}, angle {a}: {got} vs {want}");
        }
    }
}

#[test]
fn ou_variance_matches_the_discrete_recursion() {
    let g = spec(line(), 1.0, LevyMeasureSpec::none(), DriftSpec::ou());
    let model = ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap();
    let mut e = ParticleEnsemble::at_point(&[0.0], 200_000, RngSpec::new(1, 0)).unwrap();
    let (dt, n) = (1e-2, 100);
    simulate(&mut e, &model, dt, n).unwrap();
    let a: f64 = 1.0 - dt;
    let want = 2.0 * dt * (1.0 - a.powi(2 * n as i32)) / (1.0 - a * a);
    let (mean, var) = e.mean_variance();
    assert!(mean.abs() < 8e-3);
    assert!((var - want).abs() < 0.015, "{var} vs {want}");
    assert!((want - (1.0 - (-2.0f64).exp())).abs() < 0.01);
    assert!((e.time() - 1.0).abs() < 1e-12);
}

#[test]
fn fractional_ou_transform() {
    let (sigma, c) = (1.5, 0.8);
    let g = spec(line(), 0.0, LevyMeasureSpec::fractional(sigma, c).unwrap(), DriftSpec::ou());
    let model = ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap();
    let x0 = 2.0;
    let mut e = ParticleEnsemble::at_point(&[x0], 400_000, RngSpec::new(2, 0)).unwrap();
    let (dt, n) = (1e-2, 100u64);
    simulate(&mut e, &model, dt, n).unwrap();
    let a: f64 = 1.0 - dt;
    let center = x0 * a.powi(n as i32);
    let spread: f64 = (0..n).map(|k| a.powf(sigma * k as f64)).sum::<f64>() * c * dt;
    for xi in [0.5, 1.0, 2.0] {
        let (re, im) = e.characteristic(xi);
        let damp = (-spread * xi.powf(sigma)).exp();
        assert!((re - damp * (xi * center).cos()).abs() < 5e-3, "ξ = {xi}");
        assert!((im - damp * (xi * center).sin()).abs() < 5e-3, "ξ = {xi}");
    }
}

#[test]
fn tempered_jumps_have_the_levy_khintchine_exponent() {
    let levy = LevyMeasureSpec::tempered(0.7, 1.0).unwrap();
    // tempered kernels have no lower density bound, so a little Brownian noise is required
    let g = spec(line(), 0.1, levy.clone(), DriftSpec::zero());
    let model = ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap();
    match model.jumps() {
        JumpSampler::Tempered { rate, .. } => assert!(*rate > 0.0),
        other => panic!("expected a tempered sampler, got {other:?}"),
    }
    let mut e = ParticleEnsemble::at_point(&[0.0], 300_000, RngSpec::new(9, 0)).unwrap();
    simulate(&mut e, &model, 1e-2, 100).unwrap();
    for xi in [0.5, 1.0, 2.0] {
        let integrand = |z: f64| (1.0 - (xi * z).cos()) * levy.density(z, false);
        // z = y^4 on [0, 1] removes the endpoint singularity
        let side = adaptive(&|y: f64| 4.0 * y.powi(3) * integrand(y.powi(4)), 0.0, 1.0, 1e-10)
            + adaptive(&integrand, 1.0, 80.0, 1e-10);
        let want = (-2.0 * side - 0.1 * xi * xi).exp();
        let (re, _) = e.characteristic(xi);
        assert!((re - want).abs() < 6e-3, "ξ = {xi}: {re} vs {want}");
    }
}

#[test]
fn custom_kernels_and_planar_tempered_jumps_are_rejected() {
    let custom = LevyMeasureSpec::custom("flat", 1.0, 0.5, 1.0, |z| 0.7 / z.abs().powf(2.0)).unwrap();
    let g = spec(line(), 0.0, custom, DriftSpec::zero());
    assert!(matches!(ParticleModel::new(&g, 0.1), Err(LevyError::Unsupported(_))));

    let plane = Grid::new(2, 64, 8.0).unwrap();
    let g2 = spec(plane, 0.1, LevyMeasureSpec::tempered(1.0, 1.0).unwrap(), DriftSpec::zero());
    let model = ParticleModel::new(&g2, 0.1).unwrap();
    let mut e = ParticleEnsemble::at_point(&[0.0, 0.0], 10, RngSpec::new(1, 0)).unwrap();
    assert!(matches!(simulate(&mut e, &model, 1e-2, 1), Err(LevyError::Unsupported(_))));
}

#[test]
fn planar_ensembles_spread_isotropically() {
    let plane = Grid::new(2, 64, 8.0).unwrap();
    let g = spec(plane, 0.5, LevyMeasureSpec::none(), DriftSpec::zero());
    let model = ParticleModel::new(&g, 0.1).unwrap();
    let mut e = ParticleEnsemble::at_point(&[0.0, 0.0], 100_000, RngSpec::new(4, 0)).unwrap();
    simulate(&mut e, &model, 1e-2, 100).unwrap();
    // each coordinate has variance 2 λ0 t
    let m2 = e.positions().chunks(2).map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>() / e.len() as f64;
    assert!((m2 - 2.0).abs() < 0.03, "{m2}");
    assert!((e.bracket_moment(2.0) - 3.0).abs() < 0.03);
}

#[test]
fn histogram_of_exact_samples_is_close_to_the_density() {
    let grid = line();
    let m = InitialDatum::Gaussian { mean: 1.0, variance: 2.0 }.sample(&grid).unwrap();
    let e = ParticleEnsemble::sample_density(&m, 1_000_000, RngSpec::new(7, 0)).unwrap();
    let h = e.histogram(&grid).unwrap();
    assert!((h.mass() - 1.0).abs() < 1e-12);
    let d = ensemble_vs_grid_distance(&e, &m, &WeightFunction::power(0.0).unwrap()).unwrap();
    assert!(d < 0.05, "{d}");
    let (mean, var) = e.mean_variance();
    assert!((mean - 1.0).abs() < 5e-3 && (var - 2.0).abs() < 2e-2);
}

#[test]
fn disjoint_supports_are_at_distance_two() {
    let grid = line();
    let m = DensityField::from_fn(grid, |x| (-(x + 5.0) * (x + 5.0) * 2.0).exp() * (2.0 / PI).sqrt());
    let e = ParticleEnsemble::at_point(&[5.0], 1000, RngSpec::new(1, 0)).unwrap();
    let d = ensemble_vs_grid_distance(&e, &m, &WeightFunction::power(0.0).unwrap()).unwrap();
    assert!((d - 2.0).abs() < 1e-6, "{d}");
}

#[test]
fn stepping_one_at_a_time_equals_one_long_run() {
    let g = spec(line(), 0.3, LevyMeasureSpec::fractional(1.3, 1.0).unwrap(), DriftSpec::power(1.0, 1.5).unwrap());
    let e0 = ParticleEnsemble::gaussian(5000, 0.0, 1.0, RngSpec::new(8, 2)).unwrap();
    let mut stepped = e0.clone();
    for _ in 0..5 {
        stepped = step_euler(&stepped, &g, 1e-2).unwrap();
    }
    let mut long = e0.clone();
    simulate(&mut long, &ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap(), 1e-2, 5).unwrap();
    assert_eq!(stepped.positions(), long.positions());
    assert_eq!(stepped.step_index(), 5);
}

#[test]
fn trajectories_do_not_depend_on_the_thread_count() {
    let g = spec(line(), 0.2, LevyMeasureSpec::tempered(1.2, 1.0).unwrap(), DriftSpec::ou());
    let model = ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut e = ParticleEnsemble::gaussian(20_000, 0.5, 1.0, RngSpec::new(42, 3)).unwrap();
            simulate(&mut e, &model, 1e-2, 20).unwrap();
            (e.positions().to_vec(), e.mean_variance(), e.bracket_moment(1.5))
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn different_seeds_give_different_paths() {
    let a = ParticleEnsemble::gaussian(100, 0.0, 1.0, RngSpec::new(1, 0)).unwrap();
    let b = ParticleEnsemble::gaussian(100, 0.0, 1.0, RngSpec::new(2, 0)).unwrap();
    assert_ne!(a.positions(), b.positions());
}

#[test]
fn coupling_curve_is_a_survival_function() {
    let g = spec(line(), 1.0, LevyMeasureSpec::fractional(1.5, 0.5).unwrap(), DriftSpec::ou());
    let mut opts = CouplingOptions::new(1e-2, 3.0, 4000, RngSpec::new(5, 0));
    opts.stride = 5;
    let stats = reflection_coupling_run(&g, 1.0, -1.0, &opts).unwrap();
    assert_eq!(stats.times.len(), stats.uncoupled.len());
    assert_eq!(stats.uncoupled[0], 1.0);
    assert!(stats.uncoupled.windows(2).all(|w| w[1] <= w[0]));
    assert!(*stats.uncoupled.last().unwrap() < 0.2);
    assert!(stats.coupling_times.iter().flatten().all(|t| *t > 0.0 && *t <= 3.0 + 1e-9));
}

#[test]
fn coincident_starts_are_coupled_at_once() {
    let g = spec(line(), 1.0, LevyMeasureSpec::none(), DriftSpec::ou());
    let opts = CouplingOptions::new(1e-2, 1.0, 100, RngSpec::new(5, 0));
    let stats = reflection_coupling_run(&g, 0.3, 0.3, &opts).unwrap();
    assert!(stats.uncoupled.iter().all(|u| *u == 0.0));
}

#[test]
fn ensembles_validate_their_input() {
    assert!(ParticleEnsemble::new(1, vec![], RngSpec::new(0, 0)).is_err());
    assert!(ParticleEnsemble::new(2, vec![1.0, 2.0, 3.0], RngSpec::new(0, 0)).is_err());
    assert!(ParticleEnsemble::new(1, vec![f64::NAN], RngSpec::new(0, 0)).is_err());
    let m = InitialDatum::DifferenceOfGaussians { shift: 1.0, variance: 1.0 }.sample(&line()).unwrap();
    assert!(ParticleEnsemble::sample_density(&m, 10, RngSpec::new(0, 0)).is_err());
}

#[test]
fn ou_variance_relaxes_from_a_wide_start() {
    let g = spec(line(), 1.0, LevyMeasureSpec::none(), DriftSpec::ou());
    let model = ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap();
    let np = 100_000;
    let mut e = ParticleEnsemble::gaussian(np, 0.0, 4.0, RngSpec::new(21, 0)).unwrap();
    simulate(&mut e, &model, 1e-3, 1000).unwrap();
    let want = 1.0 + 3.0 * (-2.0f64).exp();
    let se = want * (2.0 / np as f64).sqrt();
    let (_, var) = e.mean_variance();
    assert!((var - want).abs() < 3.0 * se, "{var} vs {want} (se {se})");
}

#[test]
fn fractional_ou_reaches_its_stationary_transform() {
    let sigma = 1.5;
    let g = spec(line(), 0.0, LevyMeasureSpec::fractional(sigma, 1.0).unwrap(), DriftSpec::ou());
    let model = ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap();
    let mut e = ParticleEnsemble::at_point(&[0.0], 400_000, RngSpec::new(22, 0)).unwrap();
    simulate(&mut e, &model, 1e-2, 500).unwrap();
    for xi in [0.5f64, 1.0] {
        let want = (-xi.powf(sigma) / sigma).exp();
        let (re, _) = e.characteristic(xi);
        assert!((re - want).abs() < 5e-3, "ξ = {xi}: {re} vs {want}");
    }
}

#[test]
fn particles_agree_with_the_grid_solver() {
    let grid = line();
    let g = spec(grid, 0.0, LevyMeasureSpec::fractional(1.5, 1.0).unwrap(), DriftSpec::ou());
    let m0 = InitialDatum::Gaussian { mean: 1.0, variance: 0.5 }.sample(&grid).unwrap();
    let mut opts = levyfp::ForwardOptions::new(5e-3, 2.0);
    opts.eps_boundary = 1e-2;
    let m = levyfp::ForwardRun::new(g.clone(), m0.clone(), opts).unwrap().solve().unwrap().final_state.unwrap();
    let mut e = ParticleEnsemble::sample_density(&m0, 1_000_000, RngSpec::new(23, 0)).unwrap();
    simulate(&mut e, &ParticleModel::new(&g, DEFAULT_JUMP_CUTOFF).unwrap(), 1e-2, 200).unwrap();
    let d = ensemble_vs_grid_distance(&e, &m, &WeightFunction::power(0.0).unwrap()).unwrap();
    assert!(d < 0.08, "{d}");
}
