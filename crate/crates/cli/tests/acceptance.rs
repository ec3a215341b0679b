//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any fails. An optional argument filters checks by name.

use std::f64::consts::{E, PI};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use anyhow::{bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use salamander_core::cpg::{Coupling, CpgNetwork, HopfParams};
use salamander_core::env::{fit_residual, solve_base_motion};
use salamander_core::eval::{run_episode_traced, run_suite, GaitController, PolicyController, SuiteConfig};
use salamander_core::gait::{is_stance, limb_phase};
use salamander_core::ode::rk4_step;
use salamander_core::rl::policy::gaussian_log_prob;
use salamander_core::rl::{
    discrete_entropy, random_policy_return, train, DenseNet, GradTape, PointGoalEnv, Policy, SacAgent, SacConfig,
    TrainConfig,
};
use salamander_core::robot::{Limb, SPINE};
use salamander_core::{joint_targets, DyMode, GaitParams, PlanarTransform, RobotVersion, ScenarioConfig, SimEnv, Vec2};

type Check = fn() -> Result<String>;

const CHECKS: [(&str, Check); 10] = [
    ("gait stance fractions and single swing", gait_correctness),
    ("hopf limit cycle and antiphase locking", hopf_limit_cycle),
    ("rk4 step-halving order", rk4_order),
    ("rigid fit against exact and brute-force oracles", procrustes),
    ("network gradients against finite differences", gradients),
    ("entropy sanity", entropy),
    ("sac learns the point-goal task", sac_toy),
    ("hildebrand walks to the goal; hybrid limbs untouched", locomotion),
    ("torque limit slows learned locomotion", torque_trend),
    ("repeated cli runs give identical metric files", reproducibility),
];

fn main() {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    let mut ran = 0;
    for (name, check) in CHECKS {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.1} s): {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.1} s): {e:#}");
            }
        }
    }
    println!("{} of {ran} acceptance checks passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Result<()> {
    ensure!(
        elapsed.as_secs_f64() < limit,
        "{what} took {:.2} s, limit {limit} s",
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn gait_correctness() -> Result<String> {
    let start = Instant::now();
    let g = GaitParams::<f64>::default();
    let n = 10_000;
    let mut stance = [0usize; 4];
    let mut max_swing = 0;
    for k in 0..n {
        let phase = k as f64 / n as f64;
        let mut swing = 0;
        for limb in Limb::ALL {
            if is_stance(limb_phase(phase, limb, &g), g.duty) {
                stance[limb.index()] += 1;
            } else {
                swing += 1;
            }
        }
        max_swing = max_swing.max(swing);
    }
    within(start.elapsed(), 1.0, "sampling")?;
    let fractions: Vec<f64> = stance.iter().map(|s| *s as f64 / n as f64).collect();
    for (limb, f) in Limb::ALL.iter().zip(&fractions) {
        ensure!((f - 0.75).abs() <= 1e-3, "{limb:?} stance fraction {f}");
    }
    ensure!(max_swing <= 1, "{max_swing} limbs in swing at once");
    Ok(format!(
        "stance fractions {fractions:?}, at most {max_swing} limb in swing"
    ))
}

fn hopf() -> Result<HopfParams<f64>> {
    Ok(HopfParams::new(10.0, 1.0, 2.0 * PI)?)
}

fn hopf_limit_cycle() -> Result<String> {
    let start = Instant::now();
    let dt = 1e-3;
    let mut net = CpgNetwork::new(vec![Vec2::new(0.1, 0.0)], vec![hopf()?], vec![], vec![])?;
    let mut crossings = Vec::new();
    let mut prev_y = 0.0;
    for k in 1..=5000 {
        net.advance(dt)?;
        let s = net.states()[0];
        if k > 2000 && prev_y < 0.0 && s.y >= 0.0 && s.x > 0.0 {
            crossings.push((k - 1) as f64 * dt + dt * (-prev_y) / (s.y - prev_y));
        }
        prev_y = s.y;
    }
    let radius = net.states()[0].norm();
    ensure!((radius - 1.0).abs() <= 1e-3, "radius {radius}");
    ensure!(crossings.len() >= 2, "no full period observed");
    let period = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    ensure!((period - 1.0).abs() <= 0.005, "period {period}");

    let couplings = vec![
        Coupling {
            from: 0,
            to: 1,
            weight: 1.0,
            phase_bias: PI,
        },
        Coupling {
            from: 1,
            to: 0,
            weight: 1.0,
            phase_bias: -PI,
        },
    ];
    let mut pair = CpgNetwork::new(
        vec![Vec2::new(1.0, 0.0), Vec2::new(0.8, 0.5)],
        vec![hopf()?; 2],
        couplings,
        vec![],
    )?;
    for _ in 0..5000 {
        pair.advance(dt)?;
    }
    let diff = (pair.phase(1) - pair.phase(0)).rem_euclid(2.0 * PI);
    ensure!((diff - PI).abs() <= 0.01, "phase difference {diff}");
    within(start.elapsed(), 5.0, "integration")?;
    Ok(format!(
        "radius {radius:.6}, period {period:.5} s, phase difference {diff:.5} rad"
    ))
}

fn harmonic_error(steps: usize, reference: &[f64]) -> f64 {
    let w = 2.0 * PI;
    let dt = 1.0 / steps as f64;
    let mut y = vec![1.0, 0.0];
    for _ in 0..steps {
        y = rk4_step(&y, dt, |s, d| {
            d[0] = s[1];
            d[1] = -w * w * s[0];
        });
    }
    ((y[0] - reference[0]).powi(2) + (y[1] - reference[1]).powi(2)).sqrt()
}

fn rk4_order() -> Result<String> {
    // Fine RK4 solution as the reference, checked against the closed form.
    let fine_steps = 20_000;
    let w = 2.0 * PI;
    let mut fine = vec![1.0, 0.0];
    for _ in 0..fine_steps {
        fine = rk4_step(&fine, 1.0 / fine_steps as f64, |s, d| {
            d[0] = s[1];
            d[1] = -w * w * s[0];
        });
    }
    ensure!((fine[0] - w.cos()).abs() < 1e-10 && (fine[1] + w * w.sin()).abs() < 1e-9);
    let mut ratios = Vec::new();
    for n in [50, 100, 200] {
        let ratio = harmonic_error(n, &fine) / harmonic_error(2 * n, &fine);
        ensure!((12.0..=20.0).contains(&ratio), "{n} steps: ratio {ratio}");
        ratios.push(format!("{ratio:.2}"));
    }
    Ok(format!("error ratios {}", ratios.join(", ")))
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec2<f64>> {
    (0..n)
        .map(|_| Vec2::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)))
        .collect()
}

fn brute_force_residual(anchors: &[Vec2<f64>], feet: &[Vec2<f64>]) -> f64 {
    let n = feet.len() as f64;
    let cost = |th: f64| {
        let (mut ca, mut cf) = (Vec2::zero(), Vec2::zero());
        for (a, f) in anchors.iter().zip(feet) {
            ca = ca + *a * (1.0 / n);
            cf = cf + f.rotated(th) * (1.0 / n);
        }
        fit_residual(&PlanarTransform::new(th, ca - cf), anchors, feet)
    };
    let steps = 20_000;
    let (mut best, mut best_th) = (f64::INFINITY, 0.0);
    for k in 0..steps {
        let th = -PI + 2.0 * PI * k as f64 / steps as f64;
        let c = cost(th);
        if c < best {
            (best, best_th) = (c, th);
        }
    }
    let mut h = 2.0 * PI / steps as f64;
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

fn procrustes() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let feet = random_points(&mut rng, 3);
        let truth = PlanarTransform::new(
            rng.random_range(-3.1..3.1),
            Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        let anchors: Vec<_> = feet.iter().map(|p| truth.apply(*p)).collect();
        let fit = solve_base_motion(&anchors, &feet)?.transform;
        for p in &feet {
            worst = worst.max((fit.apply(*p) - truth.apply(*p)).norm());
        }
    }
    ensure!(worst < 1e-9, "exact motion recovered only to {worst:e}");
    let mut gap = 0.0f64;
    for _ in 0..50 {
        let feet = random_points(&mut rng, 4);
        let anchors = random_points(&mut rng, 4);
        let ours = fit_residual(&solve_base_motion(&anchors, &feet)?.transform, &anchors, &feet);
        gap = gap.max((ours - brute_force_residual(&anchors, &feet)).abs());
    }
    ensure!(gap < 1e-4, "4-point residual differs from search by {gap:e}");
    Ok(format!("3-point error {worst:.1e}, 4-point residual gap {gap:.1e}"))
}

const H: f64 = 1e-6;
const TOL: f64 = 1e-4;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Largest relative error of `c . net(x)` gradients over sampled parameters and all inputs.
fn network_error(net: &DenseNet<f64>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let x = random_vec(rng, net.input_dim(), 1.5);
    let c = random_vec(rng, net.output_dim(), 1.0);
    let loss =
        |n: &DenseNet<f64>, x: &[f64]| -> Result<f64> { Ok(n.forward(x)?.iter().zip(&c).map(|(o, c)| o * c).sum()) };
    let mut tape = GradTape::new();
    tape.record(net, &x)?;
    let g = tape.backward(net, std::slice::from_ref(&c))?;
    let mut worst = 0.0f64;
    let mut probe = net.clone();
    for _ in 0..20 {
        let i = rng.random_range(0..net.n_params());
        let base = probe.params()[i];
        probe.params_mut()[i] = base + H;
        let up = loss(&probe, &x)?;
        probe.params_mut()[i] = base - H;
        let down = loss(&probe, &x)?;
        probe.params_mut()[i] = base;
        worst = worst.max(rel_err(g.params[i], (up - down) / (2.0 * H)));
    }
    for j in 0..x.len() {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[j] += H;
        xm[j] -= H;
        worst = worst.max(rel_err(g.inputs[0][j], (loss(net, &xp)? - loss(net, &xm)?) / (2.0 * H)));
    }
    Ok(worst)
}

fn gradients() -> Result<String> {
    // Observation/action sizes of the toy task, 8- and 9-joint control and the spine-only hybrid.
    let shapes = [(2, 1), (22, 8), (24, 9), (24, 1)];
    let hidden = SacConfig::<f64>::default().hidden;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for point in 0..100 {
        let (obs, act) = shapes[point % shapes.len()];
        let actor = DenseNet::<f64>::mlp(obs, hidden, 2 * act, &mut rng);
        let critic = DenseNet::<f64>::mlp(obs + act, hidden, 1, &mut rng);
        worst = worst.max(network_error(&actor, &mut rng)?);
        worst = worst.max(network_error(&critic, &mut rng)?);
    }
    ensure!(worst < TOL, "relative error {worst:e}");
    Ok(format!("worst relative error {worst:.1e} over 100 points"))
}

fn entropy() -> Result<String> {
    let h2 = discrete_entropy(&[0.5f64, 0.5]);
    ensure!(h2 == std::f64::consts::LN_2, "two-outcome entropy {h2}");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 1_000_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let u: f64 = rng.sample(StandardNormal);
        sum -= gaussian_log_prob(&[u], &[0.0], &[0.0]);
    }
    let mc = sum / n as f64;
    let expect = 0.5 * (2.0 * PI * E).ln();
    ensure!((mc - expect).abs() < 0.01, "Monte-Carlo entropy {mc} vs {expect}");
    Ok(format!("ln 2 exact, Gaussian entropy {mc:.5} vs {expect:.5}"))
}

fn sac_toy() -> Result<String> {
    let start = Instant::now();
    let env = PointGoalEnv::<f64>::default();
    let mut summary = Vec::new();
    for seed in 0..3 {
        let baseline = random_policy_return(&env, 200, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut agent = SacAgent::new(2, 1, SacConfig::default(), &mut rng)?;
        let tc = TrainConfig {
            total_steps: 20_000,
            eval_points: 5,
            eval_episodes: 1,
        };
        let curve = train(&mut env.clone(), &mut agent, &tc, seed)?;
        let trained = curve.final_return().context("empty curve")?;
        ensure!(
            trained >= 5.0 * baseline,
            "seed {seed}: return {trained:.3} below 5x random baseline {baseline:.3}"
        );
        summary.push(format!("seed {seed} {trained:.2} vs {baseline:.3}"));
    }
    within(start.elapsed(), 600.0, "training")?;
    Ok(summary.join("; "))
}

/// Drives the spine with an arbitrary non-trivial signal.
struct Wiggle;

impl Policy<f64> for Wiggle {
    fn action_dim(&self) -> usize {
        1
    }
    fn act(&self, obs: &[f64]) -> salamander_core::Result<Vec<f64>> {
        Ok(vec![(obs[0] * 7.0).sin()])
    }
}

fn locomotion() -> Result<String> {
    let cfg = ScenarioConfig::for_version(RobotVersion::Hildebrand8);
    let gait = GaitParams::<f64>::from_config(&cfg)?;
    let mut env = SimEnv::<f64>::from_config(&cfg)?;
    env.reset(0);
    let per_cycle = (gait.period / cfg.env.dt).round() as usize;
    let mut xs = vec![env.state().pose.x];
    let mut arrival = None;
    for k in 1..=cfg.env.horizon {
        let q = joint_targets(&gait, env.model(), k as f64 * cfg.env.dt)?;
        let r = env.step(&q)?;
        if k % per_cycle == 0 {
            xs.push(env.state().pose.x);
        }
        if r.info.goal_reached {
            arrival = Some(k);
            break;
        }
        ensure!(!r.done, "episode ended at step {k} without reaching the goal");
    }
    let arrival = arrival.context("goal not reached within the horizon")?;
    ensure!(xs.len() >= 2, "no complete cycle before arrival");
    let dx: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let min_dx = dx.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure!(min_dx > 0.0, "cycle displacement {min_dx}");

    let hybrid_cfg = ScenarioConfig::for_version(RobotVersion::HildebrandSpineRl);
    let env = SimEnv::<f64>::from_config(&hybrid_cfg)?;
    let hybrid_gait = GaitParams::from_config(&hybrid_cfg)?;
    let mut hybrid = PolicyController {
        policy: Wiggle,
        mode: salamander_core::env::ActionMode::Spine,
        gait: hybrid_gait.clone(),
    };
    let mut pure = GaitController { gait: hybrid_gait };
    let h = hybrid_cfg.env.horizon;
    let (_, hr) = run_episode_traced(&mut env.clone(), &mut hybrid, h, 0, DyMode::Mean)?;
    let (_, pr) = run_episode_traced(&mut env.clone(), &mut pure, h, 0, DyMode::Mean)?;
    let n = hr.len().min(pr.len());
    for (a, b) in hr[..n].iter().zip(&pr[..n]) {
        let (la, lb): (Vec<u64>, Vec<u64>) = (
            a.q[..SPINE].iter().map(|v| v.to_bits()).collect(),
            b.q[..SPINE].iter().map(|v| v.to_bits()).collect(),
        );
        ensure!(la == lb, "limb targets differ at step {}", a.t);
    }
    ensure!(hr.iter().any(|r| r.q[SPINE] != 0.0), "spine never moved");
    Ok(format!(
        "goal at step {arrival}, {} cycles, min cycle dx {min_dx:.4} m; {n} hybrid steps bit-identical",
        dx.len()
    ))
}

fn torque_trend() -> Result<String> {
    let suite = SuiteConfig::from_text(
        "suite.versions = 8j-rl, 8j-rl-tl, 9j-rl, 9j-rl-tl\nsuite.seeds = 3\nsuite.train_steps = 50000\n",
    )?;
    let (result, _) = run_suite(&suite)?;
    let atb = |id: &str| -> Result<f64> {
        Ok(result
            .reports
            .iter()
            .find(|r| r.id == id)
            .context("missing row")?
            .atb
            .mean)
    };
    let mut detail = Vec::new();
    let mut failures = Vec::new();
    for (free, limited) in [("8j-rl", "8j-rl-tl"), ("9j-rl", "9j-rl-tl")] {
        let (a, b) = (atb(free)?, atb(limited)?);
        detail.push(format!("{free} {a:.1} vs {limited} {b:.1}"));
        if b <= a {
            failures.push(free);
        }
    }
    if !failures.is_empty() {
        bail!("torque-limited ATB not larger: {}", detail.join(", "));
    }
    Ok(format!("mean ATB {}", detail.join(", ")))
}

fn salamander(args: &[&str]) -> Result<()> {
    let out = Command::new(env!("CARGO_BIN_EXE_salamander")).args(args).output()?;
    if !out.status.success() {
        bail!(
            "salamander {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        );
    }
    Ok(())
}

fn only_subdir(dir: &Path) -> Result<PathBuf> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    ensure!(entries.len() == 1, "expected one run directory in {}", dir.display());
    Ok(entries.remove(0))
}

fn same_bytes(a: &Path, b: &Path) -> Result<()> {
    let (x, y) = (std::fs::read(a)?, std::fs::read(b)?);
    ensure!(!x.is_empty(), "{} is empty", a.display());
    ensure!(x == y, "{} and {} differ", a.display(), b.display());
    Ok(())
}

fn reproducibility() -> Result<String> {
    let tmp = tempfile::tempdir()?;
    let root = tmp.path();
    let suite = root.join("suite.cfg");
    std::fs::write(
        &suite,
        "suite.versions = 8j-hildebrand, 8j-hildebrand-1j-rl, 8j-rl\nsuite.seeds = 2\nsuite.train_steps = 1500\nsac.warmup = 500\n",
    )?;
    let s = |p: &Path| p.to_str().unwrap().to_string();
    for run in ["a", "b"] {
        let dir = root.join(run);
        salamander(&["bench", "--suite", &s(&suite), "--out", &s(&dir.join("bench"))])?;
        salamander(&[
            "train",
            "--version",
            "8j-rl-tl",
            "--seed",
            "3",
            "--steps",
            "1500",
            "--out",
            &s(&dir.join("train")),
        ])?;
        salamander(&["gait", "--cycles", "2", "--out", &s(&dir.join("gait.csv"))])?;
        salamander(&["cpg-demo", "--seconds", "1", "--out", &s(&dir.join("cpg.csv"))])?;
        let ck = dir.join("train").join("8j-rl-tl-seed3.json");
        salamander(&[
            "rollout",
            "--version",
            "8j-rl-tl",
            "--checkpoint",
            &s(&ck),
            "--trace",
            &s(&dir.join("trace.csv")),
        ])?;
    }
    let (a, b) = (root.join("a"), root.join("b"));
    let (ba, bb) = (only_subdir(&a.join("bench"))?, only_subdir(&b.join("bench"))?);
    let files = [
        (ba.join("metrics.csv"), bb.join("metrics.csv")),
        (ba.join("learning_curves.csv"), bb.join("learning_curves.csv")),
        (a.join("train/8j-rl-tl-seed3.csv"), b.join("train/8j-rl-tl-seed3.csv")),
        (a.join("train/8j-rl-tl-seed3.json"), b.join("train/8j-rl-tl-seed3.json")),
        (a.join("gait.csv"), b.join("gait.csv")),
        (a.join("cpg.csv"), b.join("cpg.csv")),
        (a.join("trace.csv"), b.join("trace.csv")),
    ];
    for (x, y) in &files {
        same_bytes(x, y)?;
    }
    Ok(format!("{} file pairs byte-identical", files.len()))
}
