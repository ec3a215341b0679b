//! Scenario configuration: the flat `key = value` text format, robot versions
//! and the resolved parameter set every other module is built from.
//!
//! The file format is line based. Blank lines and lines starting with `#` are
//! ignored, everything else must be `key = value`. Lists are comma separated.
//! The full key list lives in `docs/config-keys.md`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Parsed `key = value` file. Keys keep the line they came from for error reporting.
#[derive(Clone, Debug, Default)]
pub struct KvFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                msg: format!("expected `key = value`, found `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config {
                    line: line_no,
                    msg: "empty key".into(),
                });
            }
            if entries
                .insert(key.to_string(), (value.trim().to_string(), line_no))
                .is_some()
            {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|(_, l)| *l).unwrap_or(0)
    }

    pub fn parse_value<V: FromStr>(&self, key: &str) -> Result<Option<V>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<V>().map(Some).map_err(|_| Error::Config {
                line: self.line_of(key),
                msg: format!("cannot parse value `{v}` for `{key}`"),
            }),
        }
    }

    pub fn parse_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| Error::Config {
                    line: self.line_of(key),
                    msg: format!("cannot parse list `{v}` for `{key}`"),
                }),
        }
    }

    fn override_f64(&self, key: &str, slot: &mut f64) -> Result<()> {
        if let Some(v) = self.parse_value::<f64>(key)? {
            *slot = v;
        }
        Ok(())
    }

    fn override_usize(&self, key: &str, slot: &mut usize) -> Result<()> {
        if let Some(v) = self.parse_value::<usize>(key)? {
            *slot = v;
        }
        Ok(())
    }
}

/// Which controller drives a robot version.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ControllerKind {
    Hildebrand,
    Policy,
    Hybrid,
    Cpg,
}

impl FromStr for ControllerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hildebrand" => Ok(Self::Hildebrand),
            "rl" | "policy" => Ok(Self::Policy),
            "hybrid" => Ok(Self::Hybrid),
            "cpg" => Ok(Self::Cpg),
            other => Err(Error::InvalidParameter(format!("unknown controller `{other}`"))),
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hildebrand => "hildebrand",
            Self::Policy => "rl",
            Self::Hybrid => "hybrid",
            Self::Cpg => "cpg",
        })
    }
}

/// The six robot versions compared in the benchmark table, plus a custom variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RobotVersion {
    Hildebrand8,
    Rl8,
    Rl8TorqueLimited,
    HildebrandSpineRl,
    Rl9,
    Rl9TorqueLimited,
    Custom {
        spine: bool,
        torque_limited: bool,
        controller: ControllerKind,
    },
}

impl RobotVersion {
    /// Table order of the six standard versions.
    pub const TABLE: [RobotVersion; 6] = [
        Self::Hildebrand8,
        Self::Rl8,
        Self::Rl8TorqueLimited,
        Self::HildebrandSpineRl,
        Self::Rl9,
        Self::Rl9TorqueLimited,
    ];

    /// Display label used in the results table.
    pub fn label(&self) -> String {
        match self {
            Self::Hildebrand8 => "8-joints Hildebrand".into(),
            Self::Rl8 => "8-joints RL".into(),
            Self::Rl8TorqueLimited => "8-joints RL with torque limit on shoulder and leg joints".into(),
            Self::HildebrandSpineRl => "8-joints Hildebrand + 1 joint RL".into(),
            Self::Rl9 => "9-joints RL".into(),
            Self::Rl9TorqueLimited => "9-joints RL with torque limit on shoulder and leg joints".into(),
            Self::Custom {
                spine,
                torque_limited,
                controller,
            } => format!(
                "custom {}-joints {}{}",
                if *spine { 9 } else { 8 },
                controller,
                if *torque_limited { " (torque limit)" } else { "" }
            ),
        }
    }

    /// Short identifier used for file names and the CLI.
    pub fn id(&self) -> String {
        match self {
            Self::Hildebrand8 => "8j-hildebrand".into(),
            Self::Rl8 => "8j-rl".into(),
            Self::Rl8TorqueLimited => "8j-rl-tl".into(),
            Self::HildebrandSpineRl => "8j-hildebrand-1j-rl".into(),
            Self::Rl9 => "9j-rl".into(),
            Self::Rl9TorqueLimited => "9j-rl-tl".into(),
            Self::Custom {
                spine,
                torque_limited,
                controller,
            } => format!(
                "custom-{}j-{}{}",
                if *spine { 9 } else { 8 },
                controller,
                if *torque_limited { "-tl" } else { "" }
            ),
        }
    }

    pub fn has_spine(&self) -> bool {
        match self {
            Self::Hildebrand8 | Self::Rl8 | Self::Rl8TorqueLimited => false,
            Self::HildebrandSpineRl | Self::Rl9 | Self::Rl9TorqueLimited => true,
            Self::Custom { spine, .. } => *spine,
        }
    }

    pub fn torque_limited(&self) -> bool {
        match self {
            Self::Rl8TorqueLimited | Self::Rl9TorqueLimited => true,
            Self::Custom { torque_limited, .. } => *torque_limited,
            _ => false,
        }
    }

    pub fn controller(&self) -> ControllerKind {
        match self {
            Self::Hildebrand8 => ControllerKind::Hildebrand,
            Self::HildebrandSpineRl => ControllerKind::Hybrid,
            Self::Rl8 | Self::Rl8TorqueLimited | Self::Rl9 | Self::Rl9TorqueLimited => ControllerKind::Policy,
            Self::Custom { controller, .. } => *controller,
        }
    }

    /// True when the version needs a trained policy.
    pub fn is_learned(&self) -> bool {
        matches!(self.controller(), ControllerKind::Policy | ControllerKind::Hybrid)
    }

    /// Looks up a version by table label or short id (case-insensitive);
    /// custom ids look like `custom-8j-cpg` or `custom-9j-rl-tl`.
    pub fn parse(name: &str) -> Result<Self> {
        let wanted = name.trim().to_ascii_lowercase();
        if let Some(v) = Self::TABLE
            .iter()
            .copied()
            .find(|v| v.id() == wanted || v.label().to_ascii_lowercase() == wanted)
        {
            return Ok(v);
        }
        let unknown = || Error::UnknownVersion(name.to_string());
        let rest = wanted.strip_prefix("custom-").ok_or_else(unknown)?;
        let (joints, rest) = rest.split_once("j-").ok_or_else(unknown)?;
        let spine = match joints {
            "8" => false,
            "9" => true,
            _ => return Err(unknown()),
        };
        let (controller, torque_limited) = match rest.strip_suffix("-tl") {
            Some(c) => (c, true),
            None => (rest, false),
        };
        Ok(Self::Custom {
            spine,
            torque_limited,
            controller: controller.parse().map_err(|_| unknown())?,
        })
    }
}

impl fmt::Display for RobotVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Which statistic of |y| the DY metric reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DyMode {
    Mean,
    Max,
    Terminal,
}

impl FromStr for DyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(Self::Mean),
            "max" => Ok(Self::Max),
            "terminal" => Ok(Self::Terminal),
            other => Err(Error::InvalidParameter(format!("unknown dy mode `{other}`"))),
        }
    }
}

impl fmt::Display for DyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mean => "mean",
            Self::Max => "max",
            Self::Terminal => "terminal",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub body_half_length: f64,
    pub limb_length: f64,
    pub anchor_lateral: f64,
    pub lift_threshold: f64,
    pub shoulder_limit: f64,
    pub leg_limit: f64,
    pub spine_limit: f64,
    /// Per-step displacement limit of shoulder and leg joints without a torque limit.
    pub free_rate: f64,
    /// Per-step displacement limit of shoulder and leg joints under a torque limit.
    pub torque_limited_rate: f64,
    pub spine_rate: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            body_half_length: 0.15,
            limb_length: 0.08,
            anchor_lateral: 0.05,
            lift_threshold: 0.01,
            shoulder_limit: 1.0,
            leg_limit: 0.5,
            spine_limit: 0.6,
            free_rate: 1.0,
            torque_limited_rate: 0.04,
            spine_rate: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaitConfig {
    pub period: f64,
    pub duty: f64,
    /// Ordered FL, FR, HL, HR.
    pub offsets: [f64; 4],
    pub shoulder_amplitude: f64,
    pub lift_amplitude: f64,
    pub spine_amplitude: f64,
    pub spine_phase: f64,
    /// Fraction of swing used by each half-cosine lift/lower blend.
    pub lift_blend: f64,
}

impl Default for GaitConfig {
    fn default() -> Self {
        Self {
            period: 1.0,
            duty: 0.75,
            offsets: [0.25, 0.75, 0.0, 0.5],
            shoulder_amplitude: 0.5,
            lift_amplitude: 0.4,
            spine_amplitude: 0.3,
            spine_phase: 0.0,
            lift_blend: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpgConfig {
    pub alpha: f64,
    pub mu: f64,
    /// Intrinsic frequency, rad/s. Zero means "derive from the gait period".
    pub omega: f64,
    pub coupling: f64,
    pub shoulder_gain: f64,
    pub leg_gain: f64,
    pub leg_offset: f64,
    pub spine_gain: f64,
    pub substeps: usize,
}

impl Default for CpgConfig {
    fn default() -> Self {
        Self {
            alpha: 10.0,
            mu: 1.0,
            omega: 0.0,
            coupling: 1.0,
            shoulder_gain: 0.5,
            leg_gain: -0.4,
            leg_offset: -0.1,
            spine_gain: 0.3,
            substeps: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub dt: f64,
    pub horizon: usize,
    pub goal_x: f64,
    pub goal_y: f64,
    pub goal_jitter: f64,
    pub goal_radius: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            horizon: 3000,
            goal_x: 1.5,
            goal_y: 0.0,
            goal_jitter: 0.0,
            goal_radius: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    pub healthy: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            w1: 1.0,
            w2: 1.0,
            w3: -0.5,
            w4: -0.001,
            healthy: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SacSettings {
    pub gamma: f64,
    pub reward_scale: f64,
    pub tau: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub hidden: usize,
    pub buffer_capacity: usize,
    pub warmup: usize,
    pub updates_per_step: usize,
    pub init_alpha: f64,
    pub auto_alpha: bool,
    /// Episode length cap used while training.
    pub train_horizon: usize,
    pub eval_points: usize,
    pub eval_episodes: usize,
}

impl Default for SacSettings {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            reward_scale: 1.0,
            tau: 0.005,
            lr: 3e-4,
            batch_size: 64,
            hidden: 64,
            buffer_capacity: 100_000,
            warmup: 1000,
            updates_per_step: 1,
            init_alpha: 0.2,
            auto_alpha: true,
            train_horizon: 500,
            eval_points: 10,
            eval_episodes: 1,
        }
    }
}

impl SacSettings {
    /// Scenario defaults. With the generic discount and temperature the
    /// walking task settles on standing still for the healthy bonus.
    pub fn locomotion() -> Self {
        Self {
            gamma: 0.95,
            init_alpha: 0.01,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub dy_mode: DyMode,
    pub seeds: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            dy_mode: DyMode::Mean,
            seeds: 5,
        }
    }
}

/// Fully resolved scenario: a robot version plus every tunable default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub version: RobotVersion,
    pub geometry: GeometryConfig,
    pub gait: GaitConfig,
    pub cpg: CpgConfig,
    pub env: EnvConfig,
    pub reward: RewardConfig,
    pub sac: SacSettings,
    pub eval: EvalConfig,
}

impl ScenarioConfig {
    /// Defaults for one version. The spinal sinusoid is only enabled on
    /// spine-equipped open-loop versions.
    pub fn for_version(version: RobotVersion) -> Self {
        let mut gait = GaitConfig::default();
        if !version.has_spine() || version.controller() != ControllerKind::Hildebrand {
            gait.spine_amplitude = 0.0;
        }
        Self {
            version,
            geometry: GeometryConfig::default(),
            gait,
            cpg: CpgConfig::default(),
            env: EnvConfig::default(),
            reward: RewardConfig::default(),
            sac: SacSettings::locomotion(),
            eval: EvalConfig::default(),
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_kv(&KvFile::parse(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_kv(&KvFile::load(path)?)
    }

    /// Resolves a key-value file. `version` defaults to `8j-hildebrand`;
    /// keys under `suite.` are left for the suite loader.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let version = match kv.get("version") {
            None => RobotVersion::Hildebrand8,
            Some(v) if v.eq_ignore_ascii_case("custom") => {
                let joints: usize = kv.parse_value("robot.joints")?.unwrap_or(8);
                let spine = match joints {
                    8 => false,
                    9 => true,
                    n => return Err(Error::InvalidGeometry(format!("robot.joints must be 8 or 9, got {n}"))),
                };
                RobotVersion::Custom {
                    spine,
                    torque_limited: kv.parse_value("robot.torque_limited")?.unwrap_or(false),
                    controller: kv.parse_value("controller")?.unwrap_or(ControllerKind::Hildebrand),
                }
            }
            Some(v) => RobotVersion::parse(v)?,
        };
        let mut cfg = Self::for_version(version);
        cfg.apply_overrides(kv)?;
        Ok(cfg)
    }

    /// Applies every recognised key in `kv`; unknown keys are an error.
    pub fn apply_overrides(&mut self, kv: &KvFile) -> Result<()> {
        for key in kv.keys() {
            if !(key.starts_with("suite.") || KNOWN_KEYS.contains(&key)) {
                return Err(Error::Config {
                    line: kv.line_of(key),
                    msg: format!("unknown key `{key}`"),
                });
            }
        }
        let g = &mut self.geometry;
        kv.override_f64("robot.body_half_length", &mut g.body_half_length)?;
        kv.override_f64("robot.limb_length", &mut g.limb_length)?;
        kv.override_f64("robot.anchor_lateral", &mut g.anchor_lateral)?;
        kv.override_f64("robot.lift_threshold", &mut g.lift_threshold)?;
        kv.override_f64("robot.shoulder_limit", &mut g.shoulder_limit)?;
        kv.override_f64("robot.leg_limit", &mut g.leg_limit)?;
        kv.override_f64("robot.spine_limit", &mut g.spine_limit)?;
        kv.override_f64("robot.free_rate", &mut g.free_rate)?;
        kv.override_f64("robot.torque_limited_rate", &mut g.torque_limited_rate)?;
        kv.override_f64("robot.spine_rate", &mut g.spine_rate)?;

        let gait = &mut self.gait;
        kv.override_f64("gait.period", &mut gait.period)?;
        kv.override_f64("gait.duty", &mut gait.duty)?;
        if let Some(list) = kv.parse_list("gait.offsets")? {
            gait.offsets = list.try_into().map_err(|_| Error::Config {
                line: kv.line_of("gait.offsets"),
                msg: "gait.offsets needs exactly four values (FL, FR, HL, HR)".into(),
            })?;
        }
        kv.override_f64("gait.shoulder_amplitude", &mut gait.shoulder_amplitude)?;
        kv.override_f64("gait.lift_amplitude", &mut gait.lift_amplitude)?;
        kv.override_f64("gait.spine_amplitude", &mut gait.spine_amplitude)?;
        kv.override_f64("gait.spine_phase", &mut gait.spine_phase)?;
        kv.override_f64("gait.lift_blend", &mut gait.lift_blend)?;

        let c = &mut self.cpg;
        kv.override_f64("cpg.alpha", &mut c.alpha)?;
        kv.override_f64("cpg.mu", &mut c.mu)?;
        kv.override_f64("cpg.omega", &mut c.omega)?;
        kv.override_f64("cpg.coupling", &mut c.coupling)?;
        kv.override_f64("cpg.shoulder_gain", &mut c.shoulder_gain)?;
        kv.override_f64("cpg.leg_gain", &mut c.leg_gain)?;
        kv.override_f64("cpg.leg_offset", &mut c.leg_offset)?;
        kv.override_f64("cpg.spine_gain", &mut c.spine_gain)?;
        kv.override_usize("cpg.substeps", &mut c.substeps)?;

        let e = &mut self.env;
        kv.override_f64("env.dt", &mut e.dt)?;
        kv.override_usize("env.horizon", &mut e.horizon)?;
        kv.override_f64("env.goal_x", &mut e.goal_x)?;
        kv.override_f64("env.goal_y", &mut e.goal_y)?;
        kv.override_f64("env.goal_jitter", &mut e.goal_jitter)?;
        kv.override_f64("env.goal_radius", &mut e.goal_radius)?;

        let r = &mut self.reward;
        kv.override_f64("reward.w1", &mut r.w1)?;
        kv.override_f64("reward.w2", &mut r.w2)?;
        kv.override_f64("reward.w3", &mut r.w3)?;
        kv.override_f64("reward.w4", &mut r.w4)?;
        kv.override_f64("reward.healthy", &mut r.healthy)?;

        let s = &mut self.sac;
        kv.override_f64("sac.gamma", &mut s.gamma)?;
        kv.override_f64("sac.reward_scale", &mut s.reward_scale)?;
        kv.override_f64("sac.tau", &mut s.tau)?;
        kv.override_f64("sac.lr", &mut s.lr)?;
        kv.override_usize("sac.batch_size", &mut s.batch_size)?;
        kv.override_usize("sac.hidden", &mut s.hidden)?;
        kv.override_usize("sac.buffer_capacity", &mut s.buffer_capacity)?;
        kv.override_usize("sac.warmup", &mut s.warmup)?;
        kv.override_usize("sac.updates_per_step", &mut s.updates_per_step)?;
        kv.override_f64("sac.init_alpha", &mut s.init_alpha)?;
        if let Some(v) = kv.parse_value::<bool>("sac.auto_alpha")? {
            s.auto_alpha = v;
        }
        kv.override_usize("sac.train_horizon", &mut s.train_horizon)?;
        kv.override_usize("sac.eval_points", &mut s.eval_points)?;
        kv.override_usize("sac.eval_episodes", &mut s.eval_episodes)?;

        if let Some(v) = kv.parse_value::<DyMode>("eval.dy_mode")? {
            self.eval.dy_mode = v;
        }
        kv.override_usize("eval.seeds", &mut self.eval.seeds)?;
        Ok(())
    }

    /// Intrinsic CPG frequency, falling back to one oscillation per gait period.
    pub fn cpg_omega(&self) -> f64 {
        if self.cpg.omega != 0.0 {
            self.cpg.omega
        } else {
            2.0 * std::f64::consts::PI / self.gait.period
        }
    }

    /// Canonical `key = value` listing of every resolved value, sorted by key.
    /// Loading this text reproduces the same configuration.
    pub fn to_canonical_text(&self) -> String {
        let mut lines: BTreeMap<&str, String> = BTreeMap::new();
        match self.version {
            RobotVersion::Custom {
                spine,
                torque_limited,
                controller,
            } => {
                lines.insert("version", "custom".into());
                lines.insert("robot.joints", if spine { "9" } else { "8" }.into());
                lines.insert("robot.torque_limited", torque_limited.to_string());
                lines.insert("controller", controller.to_string());
            }
            v => {
                lines.insert("version", v.id());
            }
        }
        let g = &self.geometry;
        let f = |x: f64| format!("{x:?}");
        lines.insert("robot.body_half_length", f(g.body_half_length));
        lines.insert("robot.limb_length", f(g.limb_length));
        lines.insert("robot.anchor_lateral", f(g.anchor_lateral));
        lines.insert("robot.lift_threshold", f(g.lift_threshold));
        lines.insert("robot.shoulder_limit", f(g.shoulder_limit));
        lines.insert("robot.leg_limit", f(g.leg_limit));
        lines.insert("robot.spine_limit", f(g.spine_limit));
        lines.insert("robot.free_rate", f(g.free_rate));
        lines.insert("robot.torque_limited_rate", f(g.torque_limited_rate));
        lines.insert("robot.spine_rate", f(g.spine_rate));
        let gait = &self.gait;
        lines.insert("gait.period", f(gait.period));
        lines.insert("gait.duty", f(gait.duty));
        lines.insert(
            "gait.offsets",
            gait.offsets.iter().map(|o| f(*o)).collect::<Vec<_>>().join(", "),
        );
        lines.insert("gait.shoulder_amplitude", f(gait.shoulder_amplitude));
        lines.insert("gait.lift_amplitude", f(gait.lift_amplitude));
        lines.insert("gait.spine_amplitude", f(gait.spine_amplitude));
        lines.insert("gait.spine_phase", f(gait.spine_phase));
        lines.insert("gait.lift_blend", f(gait.lift_blend));
        let c = &self.cpg;
        lines.insert("cpg.alpha", f(c.alpha));
        lines.insert("cpg.mu", f(c.mu));
        lines.insert("cpg.omega", f(c.omega));
        lines.insert("cpg.coupling", f(c.coupling));
        lines.insert("cpg.shoulder_gain", f(c.shoulder_gain));
        lines.insert("cpg.leg_gain", f(c.leg_gain));
        lines.insert("cpg.leg_offset", f(c.leg_offset));
        lines.insert("cpg.spine_gain", f(c.spine_gain));
        lines.insert("cpg.substeps", c.substeps.to_string());
        let e = &self.env;
        lines.insert("env.dt", f(e.dt));
        lines.insert("env.horizon", e.horizon.to_string());
        lines.insert("env.goal_x", f(e.goal_x));
        lines.insert("env.goal_y", f(e.goal_y));
        lines.insert("env.goal_jitter", f(e.goal_jitter));
        lines.insert("env.goal_radius", f(e.goal_radius));
        let r = &self.reward;
        lines.insert("reward.w1", f(r.w1));
        lines.insert("reward.w2", f(r.w2));
        lines.insert("reward.w3", f(r.w3));
        lines.insert("reward.w4", f(r.w4));
        lines.insert("reward.healthy", f(r.healthy));
        let s = &self.sac;
        lines.insert("sac.gamma", f(s.gamma));
        lines.insert("sac.reward_scale", f(s.reward_scale));
        lines.insert("sac.tau", f(s.tau));
        lines.insert("sac.lr", f(s.lr));
        lines.insert("sac.batch_size", s.batch_size.to_string());
        lines.insert("sac.hidden", s.hidden.to_string());
        lines.insert("sac.buffer_capacity", s.buffer_capacity.to_string());
        lines.insert("sac.warmup", s.warmup.to_string());
        lines.insert("sac.updates_per_step", s.updates_per_step.to_string());
        lines.insert("sac.init_alpha", f(s.init_alpha));
        lines.insert("sac.auto_alpha", s.auto_alpha.to_string());
        lines.insert("sac.train_horizon", s.train_horizon.to_string());
        lines.insert("sac.eval_points", s.eval_points.to_string());
        lines.insert("sac.eval_episodes", s.eval_episodes.to_string());
        lines.insert("eval.dy_mode", self.eval.dy_mode.to_string());
        lines.insert("eval.seeds", self.eval.seeds.to_string());
        lines.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn config_hash(&self) -> String {
        hash_text(&self.to_canonical_text())
    }
}

/// Short SHA-256 fingerprint used to tag output files.
pub fn hash_text(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(digest)[..16].to_string()
}

/// Keys accepted by [`ScenarioConfig::apply_overrides`].
pub const KNOWN_KEYS: &[&str] = &[
    "version",
    "controller",
    "robot.joints",
    "robot.torque_limited",
    "robot.body_half_length",
    "robot.limb_length",
    "robot.anchor_lateral",
    "robot.lift_threshold",
    "robot.shoulder_limit",
    "robot.leg_limit",
    "robot.spine_limit",
    "robot.free_rate",
    "robot.torque_limited_rate",
    "robot.spine_rate",
    "gait.period",
    "gait.duty",
    "gait.offsets",
    "gait.shoulder_amplitude",
    "gait.lift_amplitude",
    "gait.spine_amplitude",
    "gait.spine_phase",
    "gait.lift_blend",
    "cpg.alpha",
    "cpg.mu",
    "cpg.omega",
    "cpg.coupling",
    "cpg.shoulder_gain",
    "cpg.leg_gain",
    "cpg.leg_offset",
    "cpg.spine_gain",
    "cpg.substeps",
    "env.dt",
    "env.horizon",
    "env.goal_x",
    "env.goal_y",
    "env.goal_jitter",
    "env.goal_radius",
    "reward.w1",
    "reward.w2",
    "reward.w3",
    "reward.w4",
    "reward.healthy",
    "sac.gamma",
    "sac.reward_scale",
    "sac.tau",
    "sac.lr",
    "sac.batch_size",
    "sac.hidden",
    "sac.buffer_capacity",
    "sac.warmup",
    "sac.updates_per_step",
    "sac.init_alpha",
    "sac.auto_alpha",
    "sac.train_horizon",
    "sac.eval_points",
    "sac.eval_episodes",
    "eval.dy_mode",
    "eval.seeds",
];
