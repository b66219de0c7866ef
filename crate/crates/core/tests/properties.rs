use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wenoshep_core::experiment::evaluation_grid;
use wenoshep_core::{
    all_indicators, build_stencil, fill_distance, franke, piecewise_tilde_f, regular_grid, Geometry,
    IndicatorVector, Interpolant, KernelFamily, Mode, PointSet, RadiusRule, WeightKernel, WenoConfig,
};

fn grid_interpolant(l: u32, f: impl Fn(f64, f64) -> f64, stencil_c: f64) -> Interpolant {
    let ps = regular_grid(l, f).unwrap();
    let kernel = WeightKernel::for_level(KernelFamily::WendlandC2, l).unwrap();
    Interpolant::build(ps, kernel, stencil_c, WenoConfig::default(), Mode::Weno).unwrap()
}

fn grid_indicators(l: u32, f: impl Fn(f64, f64) -> f64) -> (PointSet, IndicatorVector) {
    let ps = regular_grid(l, f).unwrap();
    let h = fill_distance(&ps, 512).unwrap().h;
    let ind = all_indicators(&ps, &RadiusRule::new(2.5, h, 2).unwrap()).unwrap();
    (ps, ind)
}

#[test]
fn indicators_scale_like_h_squared_on_smooth_data() {
    let (_, coarse) = grid_indicators(6, franke);
    let (_, fine) = grid_indicators(7, franke);
    let (n6, n7) = (65usize, 129usize);
    let mut ratios = Vec::new();
    for j in 2..n6 - 2 {
        for i in 2..n6 - 2 {
            ratios.push(coarse.get(j * n6 + i) / fine.get(2 * j * n7 + 2 * i));
        }
    }
    assert!(ratios.iter().all(|r| (2.5..=6.0).contains(r)));
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((mean - 4.0).abs() < 0.1, "mean ratio {mean}");
}

#[test]
fn straddling_indicators_stay_bounded_below() {
    for g in Geometry::ALL {
        for l in 4..=7 {
            let (ps, ind) = grid_indicators(l, |x, y| piecewise_tilde_f(g, x, y));
            let rule = *ind.rule();
            let mut straddle_min = f64::INFINITY;
            for i in 0..ps.len() {
                let st = build_stencil(&ps, i, &rule).unwrap();
                let side = |j: usize| g.in_positive(ps.node(j)[0], ps.node(j)[1]);
                let first = side(st.member_indices[0]);
                if st.member_indices.iter().any(|&j| side(j) != first) {
                    straddle_min = straddle_min.min(ind.get(i));
                }
            }
            assert!(straddle_min >= 0.05, "{g} level {l}: {straddle_min}");
        }
    }
}

/// Largest weight given to a node across the line, over points at distance
/// `1.5 h` on the positive side.
fn max_cross_weight(l: u32) -> (f64, f64) {
    let g = Geometry::Line;
    let interp = grid_interpolant(l, |x, y| piecewise_tilde_f(g, x, y), 2.5);
    let h = fill_distance(interp.points(), 512).unwrap().h;
    let offset = 1.5 * h * 2f64.sqrt();
    let mut worst: f64 = 0.0;
    for k in 0..=200 {
        let x = 0.2 + 0.6 * f64::from(k) / 200.0;
        let p = [x, 1.0 - offset - x];
        assert!((g.distance(p[0], p[1]) - 1.5 * h).abs() < 1e-12);
        for &(i, w) in interp.weights(&p).unwrap().entries() {
            let q = interp.points().node(i);
            if !g.in_positive(q[0], q[1]) {
                worst = worst.max(w);
            }
        }
    }
    (h, worst)
}

#[test]
fn cross_weights_are_suppressed_like_h_to_the_2t() {
    let (h5, w5) = max_cross_weight(5);
    assert!(w5 > 0.0);
    let k = w5 / h5.powi(8);
    for l in [6, 7] {
        let (h, w) = max_cross_weight(l);
        assert!(w <= k * h.powi(8), "level {l}: {w:e} > {:e}", k * h.powi(8));
    }
}

fn naive_wendland_c2(r: f64, eps: f64) -> f64 {
    let s = eps * r;
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - s).powi(4) * (4.0 * s + 1.0)
    }
}

#[test]
fn index_evaluation_matches_double_loop() {
    for seed in [11u64, 12, 13] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(50..=200);
        let m = rng.gen_range(200..=500);
        let coords: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ps = PointSet::new(2, coords.clone(), values.clone()).unwrap();
        let eps = rng.gen_range(3.0..6.0);
        let kernel = WeightKernel::new(KernelFamily::WendlandC2, eps).unwrap();
        let interp = Interpolant::build(ps, kernel, 2.5, WenoConfig::default(), Mode::Linear).unwrap();
        let ind = interp.indicators();

        // Stencils agree with a brute-force filter at the final radius.
        for i in 0..n {
            let st = build_stencil(interp.points(), i, ind.rule()).unwrap();
            let brute: Vec<usize> = (0..n)
                .filter(|&j| {
                    let d = (coords[2 * j] - coords[2 * i]).powi(2) + (coords[2 * j + 1] - coords[2 * i + 1]).powi(2);
                    d < st.radius * st.radius
                })
                .collect();
            assert_eq!(st.member_indices, brute);
        }

        let weno = interp.with_mode(Mode::Weno);
        let mut covered = 0;
        for _ in 0..m {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let omega: Vec<f64> = (0..n)
                .map(|j| {
                    let r = ((coords[2 * j] - x[0]).powi(2) + (coords[2 * j + 1] - x[1]).powi(2)).sqrt();
                    naive_wendland_c2(r, eps)
                })
                .collect();
            let total: f64 = omega.iter().sum();
            if total == 0.0 {
                assert!(interp.eval(&x).is_err() && weno.eval(&x).is_err());
                continue;
            }
            covered += 1;
            let linear: f64 = (0..n).map(|j| omega[j] / total * values[j]).sum();
            let alpha: Vec<f64> = (0..n).map(|j| omega[j] / total / (1e-14 + ind.get(j)).powi(4)).collect();
            let alpha_total: f64 = alpha.iter().sum();
            let nonlinear: f64 = (0..n).map(|j| alpha[j] / alpha_total * values[j]).sum();
            for (got, want) in [(interp.eval(&x).unwrap(), linear), (weno.eval(&x).unwrap(), nonlinear)] {
                assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0), "seed {seed}: {got} vs {want}");
            }
        }
        assert!(covered > m / 2);
    }
}

#[test]
fn first_order_accuracy_on_smooth_data() {
    let zs = evaluation_grid(101);
    for mode in [Mode::Linear, Mode::Weno] {
        let maes: Vec<(f64, f64)> = (4..=7)
            .map(|l| {
                let interp = grid_interpolant(l, franke, 2.5).with_mode(mode);
                let h = fill_distance(interp.points(), 512).unwrap().h;
                let vals = interp.eval_batch(&zs).unwrap();
                let mae = zs.iter().zip(vals).map(|(z, v)| (franke(z[0], z[1]) - v).abs()).fold(0.0, f64::max);
                (h, mae)
            })
            .collect();
        for w in maes.windows(2) {
            let rate = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
            assert!(rate >= 1.0, "{mode}: rate {rate}");
        }
    }
}

#[test]
fn smooth_field_modes_agree_within_five_percent_of_range() {
    let zs = evaluation_grid(101);
    for l in [6, 7] {
        let weno = grid_interpolant(l, franke, 2.5);
        let linear = weno.with_mode(Mode::Linear);
        let scale = weno.points().values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let a = weno.eval_batch(&zs).unwrap();
        let b = linear.eval_batch(&zs).unwrap();
        let diff = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(diff <= 5e-2 * scale, "level {l}: {diff}");
    }
}

#[test]
fn affine_data_differs_from_linear_only_through_rounding_in_indicators() {
    let zs = evaluation_grid(101);
    let f = |x: f64, y: f64| 1.0 + 2.0 * x - 3.0 * y;
    for l in [4, 6] {
        let weno = grid_interpolant(l, f, 2.5);
        let linear = weno.with_mode(Mode::Linear);
        let max_i = weno.indicators().values().iter().copied().fold(0.0, f64::max);
        assert!(max_i <= 1e-12);
        // Damping factors lie in [a, 1] with a = (1 + max_i / eps)^-4, so each
        // weight moves by at most W_i (1/a - 1).
        let spread = (1.0 + max_i / 1e-14).powi(4) - 1.0;
        let osc = 5.0;
        for z in &zs {
            let d = (weno.eval(z).unwrap() - linear.eval(z).unwrap()).abs();
            assert!(d <= spread * osc + 1e-14, "{d} at {z:?}");
        }
    }
}

#[test]
fn far_from_jump_weno_sees_only_the_smooth_part() {
    let g = Geometry::Line;
    let zs = evaluation_grid(101);
    for l in [5, 6] {
        let jump = grid_interpolant(l, |x, y| piecewise_tilde_f(g, x, y), 2.5);
        let smooth = grid_interpolant(l, franke, 2.5);
        let h = fill_distance(jump.points(), 512).unwrap().h;
        let support = jump.kernel().eps_shape().recip();
        let mut checked = 0;
        for z in zs.iter().filter(|z| g.distance(z[0], z[1]) > support + 2.5 * 1.5 * h) {
            let shift = if g.in_positive(z[0], z[1]) { 1.0 } else { 0.0 };
            let a = jump.eval(z).unwrap();
            let b = smooth.eval(z).unwrap() + shift;
            assert!((a - b).abs() <= 1e-9, "level {l} at {z:?}: {a} vs {b}");
            checked += 1;
        }
        assert!(checked > 5000);
    }
}

#[test]
fn weno_stays_within_data_range_at_jumps() {
    for g in Geometry::ALL {
        let interp = grid_interpolant(5, |x, y| piecewise_tilde_f(g, x, y), 2.5);
        let vals = interp.points().values();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for v in interp.eval_batch(&evaluation_grid(80)).unwrap() {
            assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }
}

#[test]
fn weights_sum_to_one_on_scattered_nodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ps = wenoshep_core::halton_points(1089, |x, y| piecewise_tilde_f(Geometry::Circle, x, y)).unwrap();
    let kernel = WeightKernel::for_level(KernelFamily::WendlandC4, 5).unwrap();
    let interp = Arc::new(Interpolant::build(ps, kernel, 2.5, WenoConfig::default(), Mode::Weno).unwrap());
    let mut checked = 0;
    while checked < 2000 {
        let x = [rng.gen::<f64>(), rng.gen::<f64>()];
        if let Ok(w) = interp.weights(&x) {
            assert!((w.sum() - 1.0).abs() <= 1e-12);
            checked += 1;
        }
    }
}
