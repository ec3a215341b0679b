use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use salamander_core::rl::policy::gaussian_log_prob;
use salamander_core::rl::{
    discrete_entropy, train, PointGoalEnv, ReplayBuffer, SacAgent, SacConfig, TrainConfig, Transition, CURVE_HEADER,
};

#[test]
fn two_outcome_entropy_is_ln2() {
    assert_eq!(discrete_entropy(&[0.5f64, 0.5]), std::f64::consts::LN_2);
}

#[test]
fn monte_carlo_gaussian_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 1_000_000;
    let sum: f64 = (0..n)
        .map(|_| {
            let u: f64 = rng.sample(StandardNormal);
            -gaussian_log_prob(&[u], &[0.0], &[0.0])
        })
        .sum();
    let expect = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    assert!((sum / n as f64 - expect).abs() < 0.01);
}

#[test]
fn sampled_actions_stay_in_the_unit_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let agent = SacAgent::<f64>::new(24, 9, SacConfig::default(), &mut rng).unwrap();
    for _ in 0..2000 {
        let obs: Vec<f64> = (0..24).map(|_| rng.random_range(-50.0..50.0)).collect();
        let s = agent.sample_action(&obs, &mut rng).unwrap();
        assert!(s.action.iter().all(|a| (-1.0..=1.0).contains(a)));
        assert!(s.log_prob.is_finite());
    }
}

#[test]
fn swapping_critics_keeps_the_actor_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut agent = SacAgent::<f64>::new(5, 2, SacConfig::default(), &mut rng).unwrap();
    let obs: Vec<Vec<f64>> = (0..16)
        .map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let noise: Vec<Vec<f64>> = (0..16)
        .map(|_| vec![rng.sample(StandardNormal), rng.sample(StandardNormal)])
        .collect();
    let before = agent.actor_objective(&obs, &noise).unwrap();
    agent.swap_critics();
    assert_eq!(agent.actor_objective(&obs, &noise).unwrap(), before);
}

#[test]
fn replay_sampling_is_uniform() {
    let mut buf = ReplayBuffer::new(50);
    for i in 0..80 {
        buf.push(Transition {
            obs: vec![i as f64],
            action: vec![0.0],
            reward: 0.0,
            next_obs: vec![0.0],
            done: false,
        });
    }
    assert_eq!(buf.len(), 50);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws = 100_000;
    let mut counts = [0usize; 50];
    for i in buf.sample_indices(draws, &mut rng) {
        counts[i] += 1;
    }
    let expect = draws as f64 / 50.0;
    let chi2: f64 = counts.iter().map(|c| (*c as f64 - expect).powi(2) / expect).sum();
    // 49 degrees of freedom; 99.9th percentile is about 85.4.
    assert!(chi2 < 85.4, "chi-square {chi2}");
    assert!(counts.iter().all(|c| *c > 0));
}

#[test]
fn training_is_reproducible_and_sized() {
    let run = |seed| {
        let mut env = PointGoalEnv::<f64>::default();
        let cfg = SacConfig {
            warmup: 200,
            hidden: 16,
            ..SacConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut agent = SacAgent::new(2, 1, cfg, &mut rng).unwrap();
        let tc = TrainConfig {
            total_steps: 600,
            eval_points: 4,
            eval_episodes: 1,
        };
        train(&mut env, &mut agent, &tc, seed).unwrap()
    };
    let a = run(1);
    assert_eq!(a, run(1));
    assert_eq!(a.points.len(), 4);
    let csv = a.to_csv();
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(csv.lines().next(), Some(CURVE_HEADER));
}
