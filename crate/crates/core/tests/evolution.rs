use dispersim_core::evolution::{cross_check_eigen, CrossCheck, EvolutionConfig, JumpCache, Probe};
use dispersim_core::gridops::make_grid;
use dispersim_core::potential::MatrixPotential;
use dispersim_core::{c64, Grid2D};
use faer::Mat;

fn gaussian(grid: &Grid2D) -> Vec<f64> {
    let g = grid.field(|x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let zero = vec![0.0; grid.len()];
    g.into_iter().chain(zero).collect()
}

fn free_cache(grid: &Grid2D, f: &[f64], lambda_high: f64) -> JumpCache {
    let pot = MatrixPotential::zero(grid);
    let probe = Probe::Apply {
        f: Mat::from_fn(f.len(), 1, |i, _| f[i]),
    };
    JumpCache::build(1.0, (2.0 * lambda_high - 1.0).sqrt(), 0.4, &pot, grid, &probe).unwrap()
}

fn norm(grid: &Grid2D, u: &[c64]) -> f64 {
    let n = grid.len();
    (0..2 * n).map(|i| grid.weights[i % n] * u[i].norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn free_evolution_is_an_isometry() {
    let g = make_grid(5.0, 26).unwrap();
    let f = gaussian(&g);
    let l = 10.0;
    let cache = free_cache(&g, &f, l);
    let f_c: Vec<c64> = f.iter().map(|&v| c64::new(v, 0.0)).collect();
    let before = norm(&g, &f_c);
    for t in [0.1, 0.25, 0.5] {
        let u = cache.evolve(t, l, 8, false);
        let u: Vec<c64> = (0..u.nrows()).map(|i| u[(i, 0)]).collect();
        let after = norm(&g, &u);
        assert!((after / before - 1.0).abs() < 0.01, "t {t}: {after} vs {before}");
    }
}

#[test]
fn small_time_limit_recovers_the_data() {
    let g = make_grid(5.0, 26).unwrap();
    let f = gaussian(&g);
    let l = 10.0;
    let cache = free_cache(&g, &f, l);
    let at = |t: f64| -> Vec<c64> {
        let u = cache.evolve(t, l, 8, false);
        (0..u.nrows()).map(|i| u[(i, 0)]).collect()
    };
    let (u1, u2, u3) = (at(0.1), at(0.05), at(0.025));
    // first-order Richardson on the last two, checked against the first pair
    let limit: Vec<c64> = u3.iter().zip(&u2).map(|(a, b)| 2.0 * a - b).collect();
    let coarse: Vec<c64> = u2.iter().zip(&u1).map(|(a, b)| 2.0 * a - b).collect();
    let f_c: Vec<c64> = f.iter().map(|&v| c64::new(v, 0.0)).collect();
    let err = |u: &[c64]| {
        let d: Vec<c64> = u.iter().zip(&f_c).map(|(a, b)| a - b).collect();
        norm(&g, &d) / norm(&g, &f_c)
    };
    assert!(err(&limit) < 0.01, "{}", err(&limit));
    assert!(err(&limit) <= err(&coarse) + 1e-3);
}

#[test]
fn free_cross_check_against_dense_propagator() {
    let g = make_grid(8.0, 20).unwrap();
    let pot = MatrixPotential::zero(&g);
    let mut cfg = EvolutionConfig::new(1.0, &g);
    cfg.lambda_high = 12.0;
    match cross_check_eigen(1.0, &pot, &g, 1.0, &cfg).unwrap() {
        CrossCheck::Discrepancy { relative, discrete_modes } => {
            assert_eq!(discrete_modes, 0);
            assert!(relative <= 0.03, "{relative}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn cross_check_refuses_large_grids() {
    let g = make_grid(8.0, 25).unwrap();
    let pot = MatrixPotential::zero(&g);
    let cfg = EvolutionConfig::new(1.0, &g);
    assert!(cross_check_eigen(1.0, &pot, &g, 1.0, &cfg).is_err());
}
