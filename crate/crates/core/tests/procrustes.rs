use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use salamander_core::env::{fit_residual, solve_base_motion};
use salamander_core::{PlanarTransform, Vec2};

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec2<f64>> {
    (0..n)
        .map(|_| Vec2::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)))
        .collect()
}

#[test]
fn exact_rigid_motions_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let feet = random_points(&mut rng, 3);
        let truth = PlanarTransform::new(
            rng.random_range(-3.1..3.1),
            Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        let anchors: Vec<_> = feet.iter().map(|p| truth.apply(*p)).collect();
        let fit = solve_base_motion(&anchors, &feet).unwrap().transform;
        for p in &feet {
            let d = fit.apply(*p) - truth.apply(*p);
            assert!(d.norm() < 1e-9);
        }
    }
}

/// Least-squares optimum by brute force: for a fixed rotation the best
/// translation is the centroid difference, so scan rotations finely and
/// refine around the best one.
fn brute_force(anchors: &[Vec2<f64>], feet: &[Vec2<f64>]) -> f64 {
    let cost = |th: f64| {
        let n = feet.len() as f64;
        let (mut ca, mut cf) = (Vec2::zero(), Vec2::zero());
        for (a, f) in anchors.iter().zip(feet) {
            ca = ca + *a * (1.0 / n);
            cf = cf + f.rotated(th) * (1.0 / n);
        }
        fit_residual(&PlanarTransform::new(th, ca - cf), anchors, feet)
    };
    let (mut best, mut best_th) = (f64::INFINITY, 0.0);
    let steps = 20_000;
    for k in 0..steps {
        let th = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
        let c = cost(th);
        if c < best {
            (best, best_th) = (c, th);
        }
    }
    let mut h = 2.0 * std::f64::consts::PI / steps as f64;
    while h > 1e-12 {
        for th in [best_th - h, best_th + h] {
            let c = cost(th);
            if c < best {
                (best, best_th) = (c, th);
            }
        }
        h *= 0.5;
    }
    best
}

#[test]
fn inconsistent_four_point_fit_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let feet = random_points(&mut rng, 4);
        let anchors: Vec<_> = random_points(&mut rng, 4);
        let fit = solve_base_motion(&anchors, &feet).unwrap().transform;
        let ours = fit_residual(&fit, &anchors, &feet);
        let reference = brute_force(&anchors, &feet);
        assert!(
            ours <= reference + 1e-12,
            "closed form {ours} worse than search {reference}"
        );
        assert!((ours - reference).abs() < 1e-4);
    }
}

#[test]
fn f32_fit_is_close_to_f64() {
    let a = [Vec2::new(0.1f32, 0.2), Vec2::new(-0.2, 0.1), Vec2::new(0.05, -0.3)];
    let f = [Vec2::new(0.12f32, 0.18), Vec2::new(-0.19, 0.13), Vec2::new(0.02, -0.29)];
    let t32 = solve_base_motion(&a, &f).unwrap().transform;
    let a64: Vec<_> = a.iter().map(|p| Vec2::new(p.x as f64, p.y as f64)).collect();
    let f64s: Vec<_> = f.iter().map(|p| Vec2::new(p.x as f64, p.y as f64)).collect();
    let t64 = solve_base_motion(&a64, &f64s).unwrap().transform;
    let p32 = t32.apply(f[0]);
    let p64 = t64.apply(f64s[0]);
    assert!((p32.x as f64 - p64.x).abs() < 1e-5 && (p32.y as f64 - p64.y).abs() < 1e-5);
}
