//! Multi-version, multi-seed benchmark runs and their on-disk artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{hash_text, KvFile, RobotVersion, ScenarioConfig};
use crate::env::{LocomotionTask, SimEnv};
use crate::error::{Error, Result};
use crate::rl::{
    train, Checkpoint, Environment, LearningCurve, PolicySnapshot, SacAgent, SacConfig, TrainConfig, CURVE_HEADER,
};

use super::controller::controller_for;
use super::episode::run_episode;
use super::metrics::EpisodeMetrics;
use super::report::{aggregate, markdown_table, ScenarioReport};

/// Header of `metrics.csv`.
pub const METRICS_HEADER: &str = "version,id,row,seed,mdb,atb,dy,reached";

/// Keys that select a version and so cannot be shared across a suite.
const PER_VERSION_KEYS: &[&str] = &["version", "controller", "robot.joints", "robot.torque_limited"];

/// What to run: versions, seeds, training budget, plus scenario overrides
/// shared by every version.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub versions: Vec<RobotVersion>,
    pub seeds: Vec<u64>,
    pub train_steps: usize,
    /// Train learned versions; otherwise load them from `checkpoint_dir`.
    pub train: bool,
    pub checkpoint_dir: Option<PathBuf>,
    pub overrides: KvFile,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            versions: RobotVersion::TABLE.to_vec(),
            seeds: (0..5).collect(),
            train_steps: 20_000,
            train: true,
            checkpoint_dir: None,
            overrides: KvFile::default(),
        }
    }
}

impl SuiteConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_kv(KvFile::parse(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_kv(KvFile::load(path)?)
    }

    /// `suite.*` keys configure the run; everything else overrides each scenario.
    pub fn from_kv(kv: KvFile) -> Result<Self> {
        if let Some(key) = PER_VERSION_KEYS.iter().find(|k| kv.get(k).is_some()) {
            return Err(Error::InvalidParameter(format!(
                "`{key}` cannot appear in a suite file; list versions in suite.versions"
            )));
        }
        let mut cfg = Self::default();
        if let Some(list) = kv.get("suite.versions") {
            cfg.versions = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(RobotVersion::parse)
                .collect::<Result<_>>()?;
        }
        let n_seeds = match kv.parse_value::<usize>("suite.seeds")? {
            Some(n) => n,
            None => kv.parse_value::<usize>("eval.seeds")?.unwrap_or(cfg.seeds.len()),
        };
        cfg.seeds = (0..n_seeds as u64).collect();
        if let Some(n) = kv.parse_value("suite.train_steps")? {
            cfg.train_steps = n;
        }
        if let Some(t) = kv.parse_value("suite.train")? {
            cfg.train = t;
        }
        cfg.checkpoint_dir = kv.get("suite.checkpoint_dir").map(PathBuf::from);
        // Surface unknown keys now rather than per version.
        ScenarioConfig::for_version(RobotVersion::Hildebrand8).apply_overrides(&kv)?;
        cfg.overrides = kv;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.versions.is_empty() {
            return Err(Error::InvalidParameter("suite lists no versions".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("suite needs at least one seed".into()));
        }
        Ok(())
    }

    /// Seeds `0..n`.
    pub fn with_seed_count(mut self, n: usize) -> Self {
        self.seeds = (0..n as u64).collect();
        self
    }

    /// Resolved scenario for one version.
    pub fn scenario(&self, version: RobotVersion) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::for_version(version);
        cfg.apply_overrides(&self.overrides)?;
        Ok(cfg)
    }

    /// Canonical text of the whole suite: run settings followed by every scenario.
    pub fn canonical_text(&self) -> Result<String> {
        let mut out = String::new();
        let ids: Vec<String> = self.versions.iter().map(|v| v.id()).collect();
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        writeln!(out, "suite.versions = {}", ids.join(", ")).ok();
        writeln!(out, "suite.seeds = {}", seeds.join(", ")).ok();
        writeln!(out, "suite.train_steps = {}", self.train_steps).ok();
        writeln!(out, "suite.train = {}", self.train).ok();
        for v in &self.versions {
            writeln!(out, "\n# {}", v.label()).ok();
            out.push_str(&self.scenario(*v)?.to_canonical_text());
        }
        Ok(out)
    }

    pub fn hash(&self) -> Result<String> {
        Ok(hash_text(&self.canonical_text()?))
    }
}

/// Trains a fresh agent on one version's locomotion task.
pub fn train_version(cfg: &ScenarioConfig, seed: u64, steps: usize) -> Result<(SacAgent<f64>, LearningCurve<f64>)> {
    if !cfg.version.is_learned() {
        return Err(Error::InvalidParameter(format!(
            "version `{}` has nothing to train",
            cfg.version.id()
        )));
    }
    let mut task = LocomotionTask::<f64>::from_config(cfg, Some(cfg.sac.train_horizon))?;
    let sac = SacConfig::from_settings(&cfg.sac, task.action_dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agent = SacAgent::new(task.obs_dim(), task.action_dim(), sac, &mut rng)?;
    let curve = train(
        &mut task,
        &mut agent,
        &TrainConfig::from_settings(&cfg.sac, steps),
        seed,
    )?;
    Ok((agent, curve))
}

/// File name used for a version's checkpoint or curve at one seed.
pub fn artifact_stem(version: RobotVersion, seed: u64) -> String {
    format!("{}-seed{seed}", version.id())
}

/// Evaluates one version under `controller_for` on the full-horizon environment.
pub fn evaluate_version(
    cfg: &ScenarioConfig,
    policy: Option<PolicySnapshot<f64>>,
    seed: u64,
) -> Result<EpisodeMetrics<f64>> {
    let mut env = SimEnv::<f64>::from_config(cfg)?;
    let mut controller = controller_for::<f64, _>(cfg, policy)?;
    run_episode(&mut env, controller.as_mut(), cfg.env.horizon, seed, cfg.eval.dy_mode)
}

/// Everything one benchmark run produced.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub reports: Vec<ScenarioReport>,
    pub curves: Vec<(RobotVersion, LearningCurve<f64>)>,
    pub hash: String,
}

struct Job {
    version: RobotVersion,
    seed: u64,
}

struct JobOutput {
    metrics: EpisodeMetrics<f64>,
    curve: Option<LearningCurve<f64>>,
    checkpoint: Option<Checkpoint>,
}

fn run_job(suite: &SuiteConfig, job: &Job) -> Result<JobOutput> {
    let cfg = suite.scenario(job.version)?;
    if !job.version.is_learned() {
        return Ok(JobOutput {
            metrics: evaluate_version(&cfg, None, job.seed)?,
            curve: None,
            checkpoint: None,
        });
    }
    let stem = artifact_stem(job.version, job.seed);
    let (agent, curve, checkpoint) = if suite.train {
        let (agent, curve) = train_version(&cfg, job.seed, suite.train_steps)?;
        let ck = Checkpoint::from_agent(
            &agent,
            &cfg.config_hash(),
            &job.version.id(),
            job.seed,
            suite.train_steps,
        );
        (agent, Some(curve), Some(ck))
    } else {
        let dir = suite.checkpoint_dir.clone().unwrap_or_default();
        let path = dir.join(format!("{stem}.json"));
        if !path.is_file() {
            return Err(Error::MissingCheckpoint {
                version: job.version.id(),
                path: path.display().to_string(),
            });
        }
        (Checkpoint::load(&path)?.to_agent::<f64>()?, None, None)
    };
    Ok(JobOutput {
        metrics: evaluate_version(&cfg, Some(agent.policy_snapshot()), job.seed)?,
        curve,
        checkpoint,
    })
}

/// Runs every (version, seed) pair and aggregates per version. Open-loop and
/// CPG versions are deterministic and run once with seed 0.
pub fn run_suite(suite: &SuiteConfig) -> Result<(SuiteResult, Vec<Option<Checkpoint>>)> {
    suite.validate()?;
    let jobs: Vec<Job> = suite
        .versions
        .iter()
        .flat_map(|&version| {
            let seeds = if version.is_learned() {
                suite.seeds.clone()
            } else {
                vec![0]
            };
            seeds.into_iter().map(move |seed| Job { version, seed })
        })
        .collect();
    let outputs: Vec<JobOutput> = jobs.par_iter().map(|j| run_job(suite, j)).collect::<Result<_>>()?;

    let mut reports = Vec::new();
    let mut curves = Vec::new();
    let mut checkpoints = Vec::new();
    for &version in &suite.versions {
        let cfg = suite.scenario(version)?;
        let mine: Vec<(&Job, &JobOutput)> = jobs
            .iter()
            .zip(&outputs)
            .filter(|(j, _)| j.version == version)
            .collect();
        let metrics: Vec<EpisodeMetrics<f64>> = mine.iter().map(|(_, o)| o.metrics).collect();
        let seeds: Vec<u64> = mine.iter().map(|(j, _)| j.seed).collect();
        reports.push(aggregate(
            &version.label(),
            &version.id(),
            &metrics,
            &seeds,
            &cfg.config_hash(),
            !version.is_learned(),
            cfg.eval.dy_mode,
        )?);
        for (_, o) in &mine {
            if let Some(c) = &o.curve {
                curves.push((version, c.clone()));
            }
            if version.is_learned() {
                checkpoints.push(o.checkpoint.clone());
            }
        }
    }
    Ok((
        SuiteResult {
            reports,
            curves,
            hash: suite.hash()?,
        },
        checkpoints,
    ))
}

/// `metrics.csv`: one row per seed, then mean and std rows per version.
pub fn metrics_csv(reports: &[ScenarioReport]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for r in reports {
        let name = r.version.replace(',', " ");
        for (seed, m) in r.seeds.iter().zip(&r.per_seed) {
            writeln!(
                out,
                "{name},{},seed,{seed},{:.6},{},{:.6},{}",
                r.id, m.mdb, m.atb, m.dy, m.reached
            )
            .ok();
        }
        writeln!(
            out,
            "{name},{},mean,,{:.6},{:.6},{:.6},{}",
            r.id, r.mdb.mean, r.atb.mean, r.dy.mean, r.reached
        )
        .ok();
        writeln!(
            out,
            "{name},{},std,,{:.6},{:.6},{:.6},",
            r.id, r.mdb.std, r.atb.std, r.dy.std
        )
        .ok();
    }
    out
}

const PALETTE: &[&str] = &["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

/// Evaluation return against environment steps, one polyline per curve.
pub fn learning_curves_svg(curves: &[(RobotVersion, LearningCurve<f64>)]) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let pts = curves.iter().flat_map(|(_, c)| c.points.iter());
    let (mut x_max, mut y_min, mut y_max) = (1.0f64, 0.0f64, 1.0f64);
    for p in pts {
        x_max = x_max.max(p.env_step as f64);
        y_min = y_min.min(p.eval_return);
        y_max = y_max.max(p.eval_return);
    }
    let sx = |x: f64| pad + x / x_max * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y_min) / (y_max - y_min) * (h - 2.0 * pad);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .ok();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).ok();
    writeln!(
        out,
        r##"<path d="M{pad} {pad} V{b} H{r}" fill="none" stroke="#333"/>"##,
        b = h - pad,
        r = w - pad
    )
    .ok();
    writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">env steps (max {x_max})</text>"#,
        w / 2.0,
        h - 15.0
    )
    .ok();
    writeln!(
        out,
        r#"<text x="15" y="{}" font-size="12" transform="rotate(-90 15 {})" text-anchor="middle">eval return [{y_min:.2}, {y_max:.2}]</text>"#,
        h / 2.0,
        h / 2.0
    )
    .ok();
    let mut legend: Vec<RobotVersion> = Vec::new();
    for (version, curve) in curves {
        let idx = match legend.iter().position(|v| v == version) {
            Some(i) => i,
            None => {
                legend.push(*version);
                legend.len() - 1
            }
        };
        let colour = PALETTE[idx % PALETTE.len()];
        let coords: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.env_step as f64), sy(p.eval_return)))
            .collect();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"><title>{} seed {}</title></polyline>"#,
            coords.join(" "),
            version.label(),
            curve.seed
        )
        .ok();
    }
    for (i, v) in legend.iter().enumerate() {
        let y = pad + 15.0 * i as f64;
        let colour = PALETTE[i % PALETTE.len()];
        writeln!(
            out,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{colour}" stroke-width="2"/>"#,
            w - 210.0,
            w - 190.0
        )
        .ok();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11">{}</text>"#,
            w - 185.0,
            y + 4.0,
            v.label()
        )
        .ok();
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `config.txt`, `metrics.csv`, `table.md`, `curves/`, `checkpoints/`
/// and `learning_curves.svg` into `dir`.
pub fn write_suite_outputs(
    dir: &Path,
    suite: &SuiteConfig,
    result: &SuiteResult,
    checkpoints: &[Option<Checkpoint>],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.txt"), suite.canonical_text()?)?;
    fs::write(dir.join("metrics.csv"), metrics_csv(&result.reports))?;
    fs::write(dir.join("table.md"), markdown_table(&result.reports))?;
    if !result.curves.is_empty() {
        let curves_dir = dir.join("curves");
        fs::create_dir_all(&curves_dir)?;
        let mut all = format!("version,{CURVE_HEADER}\n");
        for (v, c) in &result.curves {
            c.write_csv(&curves_dir.join(format!("{}.csv", artifact_stem(*v, c.seed))))?;
            for line in c.to_csv().lines().skip(1) {
                writeln!(all, "{},{line}", v.id()).ok();
            }
        }
        fs::write(dir.join("learning_curves.csv"), all)?;
        fs::write(dir.join("learning_curves.svg"), learning_curves_svg(&result.curves))?;
    }
    let saved: Vec<&Checkpoint> = checkpoints.iter().flatten().collect();
    if !saved.is_empty() {
        let ck_dir = dir.join("checkpoints");
        fs::create_dir_all(&ck_dir)?;
        for ck in saved {
            let version = RobotVersion::parse(&ck.robot_version)?;
            ck.save(&ck_dir.join(format!("{}.json", artifact_stem(version, ck.seed))))?;
        }
    }
    Ok(())
}
