use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use salamander_core::rl::{DenseNet, GradTape, SacAgent, SacConfig};

const H: f64 = 1e-6;
const TOL: f64 = 1e-4;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Loss `c . net(x)` for a fixed random projection `c`.
fn check_network(net: &DenseNet<f64>, rng: &mut ChaCha8Rng) {
    let x = random_vec(rng, net.input_dim(), 1.5);
    let c = random_vec(rng, net.output_dim(), 1.0);
    let loss = |n: &DenseNet<f64>, x: &[f64]| -> f64 { n.forward(x).unwrap().iter().zip(&c).map(|(o, c)| o * c).sum() };
    let mut tape = GradTape::new();
    tape.record(net, &x).unwrap();
    let g = tape.backward(net, std::slice::from_ref(&c)).unwrap();

    let mut probe = net.clone();
    for _ in 0..20 {
        let i = rng.random_range(0..net.n_params());
        let base = probe.params()[i];
        probe.params_mut()[i] = base + H;
        let up = loss(&probe, &x);
        probe.params_mut()[i] = base - H;
        let down = loss(&probe, &x);
        probe.params_mut()[i] = base;
        let fd = (up - down) / (2.0 * H);
        assert!(rel_err(g.params[i], fd) < TOL, "param {i}: {} vs {fd}", g.params[i]);
    }
    for j in 0..x.len() {
        let mut xp = x.clone();
        xp[j] += H;
        let mut xm = x.clone();
        xm[j] -= H;
        let fd = (loss(net, &xp) - loss(net, &xm)) / (2.0 * H);
        assert!(
            rel_err(g.inputs[0][j], fd) < TOL,
            "input {j}: {} vs {fd}",
            g.inputs[0][j]
        );
    }
}

/// Observation and action sizes of every learner in the workbench: the toy
/// task, 8- and 9-joint full-body control and the spine-only hybrid.
const SHAPES: [(usize, usize); 4] = [(2, 1), (22, 8), (24, 9), (24, 1)];

#[test]
fn actor_and_critic_networks_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for point in 0..100 {
        let (obs, act) = SHAPES[point % SHAPES.len()];
        let actor = DenseNet::<f64>::mlp(obs, 64, 2 * act, &mut rng);
        let critic = DenseNet::<f64>::mlp(obs + act, 64, 1, &mut rng);
        check_network(&actor, &mut rng);
        check_network(&critic, &mut rng);
    }
}

#[test]
fn batched_backward_sums_single_sample_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = DenseNet::<f64>::mlp(6, 16, 3, &mut rng);
    let xs: Vec<Vec<f64>> = (0..5).map(|_| random_vec(&mut rng, 6, 1.0)).collect();
    let seeds: Vec<Vec<f64>> = (0..5).map(|_| random_vec(&mut rng, 3, 1.0)).collect();
    let mut batched = GradTape::new();
    batched.record_batch(&net, &xs).unwrap();
    let gb = batched.backward(&net, &seeds).unwrap();
    let mut total = vec![0.0; net.n_params()];
    for (x, s) in xs.iter().zip(&seeds) {
        let mut t = GradTape::new();
        t.record(&net, x).unwrap();
        let g = t.backward(&net, std::slice::from_ref(s)).unwrap();
        for (acc, v) in total.iter_mut().zip(&g.params) {
            *acc += v;
        }
    }
    for (a, b) in gb.params.iter().zip(&total) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn actor_loss_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for &(obs_dim, act_dim) in &SHAPES {
        let cfg = SacConfig::<f64> {
            hidden: 16,
            ..SacConfig::default()
        };
        let mut agent = SacAgent::new(obs_dim, act_dim, cfg, &mut rng).unwrap();
        let obs: Vec<Vec<f64>> = (0..4).map(|_| random_vec(&mut rng, obs_dim, 1.0)).collect();
        let noise: Vec<Vec<f64>> = (0..4).map(|_| random_vec(&mut rng, act_dim, 1.5)).collect();
        let g = agent.actor_gradient(&obs, &noise).unwrap();
        assert!((g.loss - agent.actor_objective(&obs, &noise).unwrap()).abs() < 1e-12);
        for _ in 0..25 {
            let i = rng.random_range(0..agent.actor().n_params());
            let base = agent.actor().params()[i];
            agent.actor_mut().params_mut()[i] = base + H;
            let up = agent.actor_objective(&obs, &noise).unwrap();
            agent.actor_mut().params_mut()[i] = base - H;
            let down = agent.actor_objective(&obs, &noise).unwrap();
            agent.actor_mut().params_mut()[i] = base;
            let fd = (up - down) / (2.0 * H);
            assert!(
                rel_err(g.params[i], fd) < TOL,
                "({obs_dim}, {act_dim}) param {i}: {} vs {fd}",
                g.params[i]
            );
        }
    }
}
