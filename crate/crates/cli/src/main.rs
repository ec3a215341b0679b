use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use salamander_core::eval::{
    artifact_stem, markdown_table, run_episode_traced, run_suite, train_version, write_suite_outputs, write_trace_csv,
    SuiteConfig,
};
use salamander_core::gait::{global_phase, is_stance, limb_phase};
use salamander_core::rl::Checkpoint;
use salamander_core::robot::{build_robot, joint_names, Limb};
use salamander_core::{eval, joint_targets, CpgNetwork, GaitParams, KvFile, RobotVersion, ScenarioConfig, SimEnv};

#[derive(Parser)]
#[command(name = "salamander", version, about = "Planar salamander-robot locomotion workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the open-loop Hildebrand gait and write joint targets plus stance flags.
    Gait {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        cycles: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the Hopf CPG network and write oscillator states and joint targets.
    CpgDemo {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 5.0)]
        seconds: f64,
        /// Integration step in seconds.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one learned version with SAC; writes a checkpoint and a learning curve.
    Train {
        #[arg(long)]
        version: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        steps: usize,
        /// Extra scenario keys applied on top of the version defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark suite over versions and seeds.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        /// Overrides `suite.seeds`.
        #[arg(long)]
        seeds: Option<usize>,
        /// Overrides `suite.train_steps`.
        #[arg(long)]
        train_steps: Option<usize>,
        /// Load checkpoints from this directory instead of training.
        #[arg(long)]
        checkpoints: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Roll out one full-horizon episode and write its trajectory.
    Rollout {
        #[arg(long)]
        version: String,
        /// Required for learned versions.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trace: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gait { config, cycles, out } => gait(config.as_deref(), cycles, &out),
        Command::CpgDemo {
            config,
            seconds,
            dt,
            out,
        } => cpg_demo(config.as_deref(), seconds, dt, &out),
        Command::Train {
            version,
            seed,
            steps,
            config,
            out,
        } => train(&version, seed, steps, config.as_deref(), &out),
        Command::Bench {
            suite,
            seeds,
            train_steps,
            checkpoints,
            out,
        } => bench(&suite, seeds, train_steps, checkpoints, &out),
        Command::Rollout {
            version,
            checkpoint,
            config,
            seed,
            trace,
        } => rollout(&version, checkpoint.as_deref(), config.as_deref(), seed, &trace),
    }
}

fn load_scenario(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => ScenarioConfig::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(ScenarioConfig::for_version(RobotVersion::Hildebrand8)),
    }
}

/// Version defaults plus any keys from `config`.
fn scenario_for(version: RobotVersion, config: Option<&Path>) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::for_version(version);
    if let Some(p) = config {
        let kv = KvFile::load(p).with_context(|| format!("loading {}", p.display()))?;
        if kv.get("version").is_some() {
            bail!("{}: `version` comes from --version here", p.display());
        }
        cfg.apply_overrides(&kv)?;
    }
    Ok(cfg)
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn gait(config: Option<&Path>, cycles: usize, out: &Path) -> Result<()> {
    let cfg = load_scenario(config)?;
    let params = GaitParams::<f64>::from_config(&cfg)?;
    let model = build_robot::<f64>(&cfg)?;
    let dt = cfg.env.dt;
    let steps = (cycles as f64 * params.period / dt).round() as usize;
    let names = joint_names(model.n_joints());
    let mut text = String::from("step,time,phase");
    for n in &names {
        write!(text, ",q_{n}")?;
    }
    text.push_str(",stance_fl,stance_fr,stance_hl,stance_hr\n");
    let mut stance_steps = [0usize; 4];
    let mut max_swing = 0;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let phase = global_phase(t, &params);
        let q = joint_targets(&params, &model, t)?;
        write!(text, "{k},{t:.4},{phase:.6}")?;
        for v in q.iter() {
            write!(text, ",{v:.9}")?;
        }
        let mut swing = 0;
        for limb in Limb::ALL {
            let s = is_stance(limb_phase(phase, limb, &params), params.duty);
            stance_steps[limb.index()] += usize::from(s);
            swing += usize::from(!s);
            write!(text, ",{}", u8::from(s))?;
        }
        max_swing = max_swing.max(swing);
        text.push('\n');
    }
    create_parent(out)?;
    fs::write(out, text)?;
    let fractions: Vec<String> = stance_steps
        .iter()
        .map(|s| format!("{:.3}", *s as f64 / (steps + 1) as f64))
        .collect();
    println!(
        "{} samples -> {}; stance fraction FL/FR/HL/HR {}; at most {max_swing} limb(s) in swing",
        steps + 1,
        out.display(),
        fractions.join("/")
    );
    Ok(())
}

fn cpg_demo(config: Option<&Path>, seconds: f64, dt: f64, out: &Path) -> Result<()> {
    if !(dt > 0.0 && seconds > 0.0) {
        bail!("--seconds and --dt must be positive");
    }
    let cfg = load_scenario(config)?;
    let model = build_robot::<f64>(&cfg)?;
    let mut net = CpgNetwork::<f64>::from_config(&cfg, &model)?;
    let steps = (seconds / dt).round() as usize;
    let mut text = String::from("step,time");
    for i in 0..net.len() {
        write!(text, ",x{i},y{i},phase{i}")?;
    }
    for n in joint_names(model.n_joints()) {
        write!(text, ",q_{n}")?;
    }
    text.push('\n');
    for k in 0..=steps {
        if k > 0 {
            net.advance(dt)?;
        }
        write!(text, "{k},{:.6}", k as f64 * dt)?;
        for (i, s) in net.states().iter().enumerate() {
            write!(text, ",{:.9},{:.9},{:.9}", s.x, s.y, net.phase(i))?;
        }
        for v in net.cpg_to_joints(&model)?.iter() {
            write!(text, ",{v:.9}")?;
        }
        text.push('\n');
    }
    create_parent(out)?;
    fs::write(out, text)?;
    let radii: Vec<String> = net.states().iter().map(|s| format!("{:.4}", s.norm())).collect();
    println!("{} steps -> {}; final radii {}", steps, out.display(), radii.join(" "));
    Ok(())
}

fn train(version: &str, seed: u64, steps: usize, config: Option<&Path>, out: &Path) -> Result<()> {
    let version = RobotVersion::parse(version)?;
    let cfg = scenario_for(version, config)?;
    let (agent, curve) = train_version(&cfg, seed, steps)?;
    fs::create_dir_all(out)?;
    let stem = artifact_stem(version, seed);
    let ck_path = out.join(format!("{stem}.json"));
    Checkpoint::from_agent(&agent, &cfg.config_hash(), &version.id(), seed, steps).save(&ck_path)?;
    let curve_path = out.join(format!("{stem}.csv"));
    curve.write_csv(&curve_path)?;
    let last = curve.points.last().context("empty learning curve")?;
    println!(
        "{}: seed {seed}, {steps} steps, final eval return {:.4}, goal distance {:.4}",
        version.label(),
        last.eval_return,
        last.eval_goal_distance
    );
    println!("checkpoint {}\ncurve {}", ck_path.display(), curve_path.display());
    Ok(())
}

fn bench(
    suite_path: &Path,
    seeds: Option<usize>,
    train_steps: Option<usize>,
    checkpoints: Option<PathBuf>,
    out: &Path,
) -> Result<()> {
    let mut suite = SuiteConfig::load(suite_path).with_context(|| format!("loading {}", suite_path.display()))?;
    if let Some(n) = seeds {
        suite = suite.with_seed_count(n);
    }
    if let Some(n) = train_steps {
        suite.train_steps = n;
    }
    if let Some(dir) = checkpoints {
        suite.checkpoint_dir = Some(dir);
        suite.train = false;
    }
    suite.validate()?;
    let hash = suite.hash()?;
    let dir = out.join(format!("{}-{hash}", chrono::Utc::now().format("%Y%m%dT%H%M%SZ")));
    let (result, checkpoints) = run_suite(&suite)?;
    write_suite_outputs(&dir, &suite, &result, &checkpoints)?;
    print!("{}", markdown_table(&result.reports));
    println!("results in {}", dir.display());
    Ok(())
}

fn rollout(version: &str, checkpoint: Option<&Path>, config: Option<&Path>, seed: u64, trace: &Path) -> Result<()> {
    let version = RobotVersion::parse(version)?;
    let cfg = scenario_for(version, config)?;
    let policy = match (version.is_learned(), checkpoint) {
        (true, None) => bail!("version `{}` needs --checkpoint", version.id()),
        (true, Some(p)) => {
            let ck = Checkpoint::load(p).with_context(|| format!("loading {}", p.display()))?;
            if ck.robot_version != version.id() {
                bail!(
                    "checkpoint was trained for `{}`, not `{}`",
                    ck.robot_version,
                    version.id()
                );
            }
            if ck.config_hash != cfg.config_hash() {
                eprintln!(
                    "warning: checkpoint config hash {} differs from {}",
                    ck.config_hash,
                    cfg.config_hash()
                );
            }
            Some(ck.to_agent::<f64>()?.policy_snapshot())
        }
        (false, _) => None,
    };
    let mut env = SimEnv::<f64>::from_config(&cfg)?;
    let mut controller = eval::controller_for::<f64, _>(&cfg, policy)?;
    let (m, rows) = run_episode_traced(&mut env, controller.as_mut(), cfg.env.horizon, seed, cfg.eval.dy_mode)?;
    create_parent(trace)?;
    write_trace_csv(fs::File::create(trace)?, &rows, cfg.env.dt)?;
    println!(
        "{}: mdb {:.4} m, atb {}{}, dy {:.4} m ({}), {} steps -> {}",
        version.label(),
        m.mdb,
        m.atb,
        if m.reached { "" } else { " (not reached)" },
        m.dy,
        cfg.eval.dy_mode,
        m.steps,
        trace.display()
    );
    Ok(())
}
