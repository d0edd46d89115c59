//! Synthetic multi-camera world.
//!
//! Identities walk the camera graph under a ground-truth first-order Markov
//! chain. Each identity has a prototype appearance; every observation is the
//! prototype plus a fixed per-camera bias plus fresh noise, part-normalized.
//! The camera bias stands in for view-angle and pose change between cameras.
//!
//! Configuration is a flat `key = value` file; see [`SimConfig::parse`].

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::camera_graph::{CameraGraph, CameraId};
use crate::embedding::{Dataset, Embedding, Observation, Shape};
use crate::error::{Error, Result};
use crate::rng;
use crate::transition::{Trajectory, TransitionModel, Visit};

pub const DEFAULT_CORRIDOR_WEIGHT: f64 = 4.0;

pub const DEFAULT_EDGES: &str = "C1 C2\nC2 C3\nC3 C4\nC4 C5\nC2 C4\n";

/// 2023-10-09T00:00:00Z, a Monday.
pub const DEFAULT_EPOCH: f64 = 1_696_809_600.0;

const DAY_START: u32 = 8 * 3600;
const DAY_WINDOW: u32 = 10 * 3600;
const TRAVEL_SECONDS: (u32, u32) = (5, 120);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// Walks prefer the corridor: `p(j | i)` is proportional to the edge
    /// weight, `corridor_weight` on corridor edges and 1 on side links. The
    /// chain is reversible, so the same row also describes where a person
    /// seen on `i` most likely came from.
    Skewed(f64),
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub graph: CameraGraph,
    pub identities: usize,
    pub profile: Profile,
    /// Ground-truth rows, dense over the graph and row-stochastic over
    /// neighbors. Built from `profile` plus any explicit row overrides.
    pub ground_truth: TransitionModel,
    pub visits_per_identity: (usize, usize),
    pub obs_per_visit: (usize, usize),
    pub noise_sigma: f64,
    pub per_camera_bias_sigma: f64,
    pub shape: Shape,
    pub start_distribution: Vec<f64>,
    pub days: u32,
    pub epoch_start: f64,
    pub split_ratio: f64,
    pub row_overrides: BTreeMap<CameraId, Vec<(CameraId, f64)>>,
    pub start_weights: Option<Vec<(CameraId, f64)>>,
}

/// Corridor edges join cameras with consecutive registration indices
/// (`C1-C2`, `C2-C3`, ...); every other edge is a side link.
pub fn is_corridor_edge(a: usize, b: usize) -> bool {
    a.abs_diff(b) == 1
}

fn profile_rows(graph: &CameraGraph, profile: Profile) -> Vec<f64> {
    let n = graph.len();
    let mut probs = vec![0.0; n * n];
    for i in 0..n {
        let nbrs = graph.neighbor_indices(i);
        let weight = |j: usize| match profile {
            Profile::Uniform => 1.0,
            Profile::Skewed(w) if is_corridor_edge(i, j) => w,
            Profile::Skewed(_) => 1.0,
        };
        let total: f64 = nbrs.iter().map(|&j| weight(j)).sum();
        for &j in nbrs {
            probs[i * n + j] = weight(j) / total;
        }
    }
    probs
}

impl Default for SimConfig {
    fn default() -> Self {
        let graph = CameraGraph::parse(DEFAULT_EDGES).expect("default graph");
        let mut cfg = SimConfig {
            seed: 1,
            ground_truth: TransitionModel::from_probabilities(
                &graph,
                vec![0.0; graph.len().pow(2)],
            ),
            start_distribution: Vec::new(),
            graph,
            identities: 128,
            profile: Profile::Skewed(DEFAULT_CORRIDOR_WEIGHT),
            visits_per_identity: (2, 5),
            obs_per_visit: (3, 10),
            noise_sigma: 0.42,
            per_camera_bias_sigma: 0.28,
            shape: Shape::new(6, 16),
            days: 1,
            epoch_start: DEFAULT_EPOCH,
            split_ratio: 0.8,
            row_overrides: BTreeMap::new(),
            start_weights: None,
        };
        cfg.rebuild().expect("default config is valid");
        cfg
    }
}

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::InvalidConfig {
        key: key.into(),
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse {value:?}")))
}

fn parse_weights(key: &str, value: &str) -> Result<Vec<(CameraId, f64)>> {
    value
        .split_whitespace()
        .map(|tok| {
            let (c, w) = tok
                .split_once(':')
                .ok_or_else(|| invalid(key, format!("expected CAM:VALUE, got {tok:?}")))?;
            let cam = CameraId::new(c).map_err(|e| invalid(key, e.to_string()))?;
            Ok((cam, parse_num::<f64>(key, w)?))
        })
        .collect()
}

impl SimConfig {
    /// Recognized keys (one `key = value` per line, `#` comments):
    ///
    /// `seed`, `identities`, `edges` (space-separated `A-B` pairs),
    /// `nodes` (isolated cameras), `profile` (`skewed` | `uniform`),
    /// `corridor_weight`, `row.<CAM>` (explicit ground-truth row, `CAM:p` tokens),
    /// `start` (`CAM:weight` tokens, normalized), `visits_min`, `visits_max`,
    /// `obs_min`, `obs_max`, `noise_sigma`, `bias_sigma`, `parts`, `dim`,
    /// `days`, `epoch_start`, `split_ratio`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        let mut seen = HashSet::new();
        let mut edges: Option<String> = None;
        let mut nodes: Option<String> = None;
        let mut profile = "skewed".to_string();
        let mut corridor_weight = DEFAULT_CORRIDOR_WEIGHT;

        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(invalid(key, "duplicate key"));
            }
            match key {
                "seed" => cfg.seed = parse_num(key, value)?,
                "identities" => cfg.identities = parse_num(key, value)?,
                "edges" => edges = Some(value.to_string()),
                "nodes" => nodes = Some(value.to_string()),
                "profile" => profile = value.to_string(),
                "corridor_weight" => corridor_weight = parse_num(key, value)?,
                "start" => cfg.start_weights = Some(parse_weights(key, value)?),
                "visits_min" => cfg.visits_per_identity.0 = parse_num(key, value)?,
                "visits_max" => cfg.visits_per_identity.1 = parse_num(key, value)?,
                "obs_min" => cfg.obs_per_visit.0 = parse_num(key, value)?,
                "obs_max" => cfg.obs_per_visit.1 = parse_num(key, value)?,
                "noise_sigma" => cfg.noise_sigma = parse_num(key, value)?,
                "bias_sigma" => cfg.per_camera_bias_sigma = parse_num(key, value)?,
                "parts" => cfg.shape.parts = parse_num(key, value)?,
                "dim" => cfg.shape.dim = parse_num(key, value)?,
                "days" => cfg.days = parse_num(key, value)?,
                "epoch_start" => cfg.epoch_start = parse_num(key, value)?,
                "split_ratio" => cfg.split_ratio = parse_num(key, value)?,
                _ => match key.strip_prefix("row.") {
                    Some(cam) => {
                        let cam = CameraId::new(cam).map_err(|e| invalid(key, e.to_string()))?;
                        cfg.row_overrides.insert(cam, parse_weights(key, value)?);
                    }
                    None => return Err(invalid(key, "unknown key")),
                },
            }
        }

        if edges.is_some() || nodes.is_some() {
            let mut doc = String::new();
            for node in nodes.as_deref().unwrap_or("").split_whitespace() {
                writeln!(doc, "node {node}").unwrap();
            }
            for pair in edges.as_deref().unwrap_or("").split_whitespace() {
                let (a, b) = pair
                    .split_once('-')
                    .ok_or_else(|| invalid("edges", format!("expected A-B, got {pair:?}")))?;
                writeln!(doc, "{a} {b}").unwrap();
            }
            cfg.graph = CameraGraph::parse(&doc).map_err(|e| invalid("edges", e.to_string()))?;
        }
        cfg.profile = match profile.as_str() {
            "skewed" => Profile::Skewed(corridor_weight),
            "uniform" => Profile::Uniform,
            other => return Err(invalid("profile", format!("unknown profile {other:?}"))),
        };
        cfg.rebuild()?;
        Ok(cfg)
    }

    /// Replaces the graph and transition profile, discarding row and start
    /// overrides.
    pub fn with_graph(mut self, graph: CameraGraph, profile: Profile) -> Result<Self> {
        self.graph = graph;
        self.profile = profile;
        self.row_overrides.clear();
        self.start_weights = None;
        self.rebuild()?;
        Ok(self)
    }

    /// Recomputes ground truth and start distribution and validates.
    pub fn rebuild(&mut self) -> Result<()> {
        let n = self.graph.len();
        if let Profile::Skewed(w) = self.profile {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("corridor_weight", "must be finite and > 0"));
            }
        }
        let mut probs = profile_rows(&self.graph, self.profile);
        for (cam, row) in &self.row_overrides {
            let key = format!("row.{cam}");
            let i = self
                .graph
                .index_of(cam)
                .map_err(|e| invalid(&key, e.to_string()))?;
            probs[i * n..(i + 1) * n].fill(0.0);
            for (to, p) in row {
                let j = self
                    .graph
                    .index_of(to)
                    .map_err(|e| invalid(&key, e.to_string()))?;
                if !self.graph.adjacent_indices(i, j) {
                    return Err(invalid(&key, format!("{cam} and {to} are not adjacent")));
                }
                if !(0.0..=1.0).contains(p) {
                    return Err(invalid(&key, format!("probability {p} outside [0, 1]")));
                }
                probs[i * n + j] = *p;
            }
        }
        for i in 0..n {
            let nbrs = self.graph.neighbor_indices(i);
            if nbrs.is_empty() {
                continue;
            }
            let s: f64 = nbrs.iter().map(|&j| probs[i * n + j]).sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(invalid(
                    &format!("row.{}", self.graph.camera(i)),
                    format!("row sums to {s}, expected 1"),
                ));
            }
        }
        self.ground_truth = TransitionModel::from_probabilities(&self.graph, probs);

        let mut start = vec![0.0; n];
        match &self.start_weights {
            None => {
                // uniform over cameras that can be left
                for (i, s) in start.iter_mut().enumerate() {
                    if !self.graph.neighbor_indices(i).is_empty() {
                        *s = 1.0;
                    }
                }
            }
            Some(ws) => {
                for (cam, w) in ws {
                    let i = self
                        .graph
                        .index_of(cam)
                        .map_err(|e| invalid("start", e.to_string()))?;
                    if !(*w >= 0.0 && w.is_finite()) {
                        return Err(invalid("start", format!("weight {w} must be >= 0")));
                    }
                    start[i] = *w;
                }
            }
        }
        let total: f64 = start.iter().sum();
        if total <= 0.0 {
            return Err(invalid("start", "no camera has positive start weight"));
        }
        start.iter_mut().for_each(|s| *s /= total);
        for (i, &s) in start.iter().enumerate() {
            if s > 0.0
                && self.graph.neighbor_indices(i).is_empty()
                && self.visits_per_identity.1 > 1
            {
                return Err(invalid(
                    "start",
                    format!(
                        "isolated camera {} cannot start a walk",
                        self.graph.camera(i)
                    ),
                ));
            }
        }
        self.start_distribution = start;
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        if self.identities == 0 {
            return Err(invalid("identities", "must be positive"));
        }
        let (vmin, vmax) = self.visits_per_identity;
        if vmin == 0 || vmin > vmax {
            return Err(invalid("visits_min", "need 1 <= visits_min <= visits_max"));
        }
        let (omin, omax) = self.obs_per_visit;
        if omin == 0 || omin > omax {
            return Err(invalid("obs_min", "need 1 <= obs_min <= obs_max"));
        }
        for (key, v) in [
            ("noise_sigma", self.noise_sigma),
            ("bias_sigma", self.per_camera_bias_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(key, "must be finite and >= 0"));
            }
        }
        if self.shape.is_empty() {
            return Err(invalid("parts", "parts and dim must be positive"));
        }
        if self.days == 0 {
            return Err(invalid("days", "must be positive"));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(invalid("split_ratio", "must lie strictly between 0 and 1"));
        }
        Ok(())
    }

    /// Canonical rendering; parsing it yields an identical config.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("seed", self.seed.to_string());
        kv("identities", self.identities.to_string());
        let nodes: Vec<&str> = self.graph.cameras().iter().map(CameraId::as_str).collect();
        kv("nodes", nodes.join(" "));
        let edges: Vec<String> = self
            .graph
            .edges()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        kv("edges", edges.join(" "));
        match self.profile {
            Profile::Skewed(s) => {
                kv("profile", "skewed".into());
                kv("corridor_weight", format!("{s:?}"));
            }
            Profile::Uniform => kv("profile", "uniform".into()),
        }
        for (cam, row) in &self.row_overrides {
            let toks: Vec<String> = row.iter().map(|(c, p)| format!("{c}:{p:?}")).collect();
            kv(&format!("row.{cam}"), toks.join(" "));
        }
        if let Some(ws) = &self.start_weights {
            let toks: Vec<String> = ws.iter().map(|(c, w)| format!("{c}:{w:?}")).collect();
            kv("start", toks.join(" "));
        }
        kv("visits_min", self.visits_per_identity.0.to_string());
        kv("visits_max", self.visits_per_identity.1.to_string());
        kv("obs_min", self.obs_per_visit.0.to_string());
        kv("obs_max", self.obs_per_visit.1.to_string());
        kv("noise_sigma", format!("{:?}", self.noise_sigma));
        kv("bias_sigma", format!("{:?}", self.per_camera_bias_sigma));
        kv("parts", self.shape.parts.to_string());
        kv("dim", self.shape.dim.to_string());
        kv("days", self.days.to_string());
        kv("epoch_start", format!("{:?}", self.epoch_start));
        kv("split_ratio", format!("{:?}", self.split_ratio));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimWorld {
    pub dataset: Dataset,
    pub trajectories: Vec<Trajectory>,
    /// Part-normalized prototype per identity, in identity order.
    pub prototypes: Vec<(String, Embedding)>,
}

fn gaussian(rng: &mut impl Rng, len: usize, sigma: f64) -> Vec<f64> {
    (0..len)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn sample_index(rng: &mut impl Rng, weights: &[(usize, f64)]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(i, w) in weights {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding left a sliver above the last cumulative sum
    weights
        .iter()
        .rev()
        .find(|(_, w)| *w > 0.0)
        .map(|&(i, _)| i)
        .unwrap_or(weights[0].0)
}

pub fn person_label(index: usize) -> String {
    format!("p{index:04}")
}

struct IdentityDraw {
    observations: Vec<Observation>,
    trajectory: Trajectory,
    prototype: Embedding,
}

fn simulate_identity(cfg: &SimConfig, index: usize, biases: &[Vec<f64>]) -> Result<IdentityDraw> {
    let mut rng = rng::identity_stream(cfg.seed, index);
    let len = cfg.shape.len();
    let person = person_label(index);

    let prototype = loop {
        // a zero part has probability zero; redraw if it ever happens
        if let Ok(e) = Embedding::normalize_parts(cfg.shape, &gaussian(&mut rng, len, 1.0)) {
            break e;
        }
    };

    let start: Vec<(usize, f64)> = cfg.start_distribution.iter().copied().enumerate().collect();
    let mut camera = sample_index(&mut rng, &start);
    let n_visits = rng.random_range(cfg.visits_per_identity.0..=cfg.visits_per_identity.1);
    let day = rng.random_range(0..cfg.days);
    let mut t = cfg.epoch_start
        + f64::from(day) * 86_400.0
        + f64::from(DAY_START + rng.random_range(0..DAY_WINDOW));

    let mut observations = Vec::new();
    let mut visits = Vec::new();
    for v in 0..n_visits {
        if v > 0 {
            match cfg.ground_truth.row(camera) {
                Some(row) => camera = sample_index(&mut rng, &row),
                None => break,
            }
            t += f64::from(rng.random_range(TRAVEL_SECONDS.0..=TRAVEL_SECONDS.1));
        }
        let n_obs = rng.random_range(cfg.obs_per_visit.0..=cfg.obs_per_visit.1);
        let first_seen = t;
        for _ in 0..n_obs {
            let noise = gaussian(&mut rng, len, cfg.noise_sigma);
            let raw: Vec<f64> = prototype
                .values()
                .iter()
                .zip(&biases[camera])
                .zip(&noise)
                .map(|((p, b), e)| p + b + e)
                .collect();
            let embedding = Embedding::normalize_parts(cfg.shape, &raw)?;
            observations.push(Observation {
                obs_id: format!("{person}-{:03}", observations.len()),
                person_id: Some(person.clone()),
                camera: cfg.graph.camera(camera).clone(),
                timestamp: t,
                embedding,
            });
            t += 1.0;
        }
        visits.push(Visit {
            camera: cfg.graph.camera(camera).clone(),
            first_seen,
            last_seen: t - 1.0,
            observations: n_obs,
        });
    }
    Ok(IdentityDraw {
        observations,
        trajectory: Trajectory {
            person_id: person,
            visits,
        },
        prototype,
    })
}

pub fn simulate(cfg: &SimConfig) -> Result<SimWorld> {
    cfg.validate()?;
    let len = cfg.shape.len();
    let mut bias_rng = rng::stream(cfg.seed, rng::CAMERA_BIAS_STREAM);
    let biases: Vec<Vec<f64>> = (0..cfg.graph.len())
        .map(|_| gaussian(&mut bias_rng, len, cfg.per_camera_bias_sigma))
        .collect();

    let draws: Vec<IdentityDraw> = (0..cfg.identities)
        .into_par_iter()
        .map(|k| simulate_identity(cfg, k, &biases))
        .collect::<Result<_>>()?;

    let mut world = SimWorld {
        dataset: Dataset::new(cfg.shape),
        trajectories: Vec::with_capacity(draws.len()),
        prototypes: Vec::with_capacity(draws.len()),
    };
    for d in draws {
        world.dataset.observations.extend(d.observations);
        world
            .prototypes
            .push((d.trajectory.person_id.clone(), d.prototype));
        world.trajectories.push(d.trajectory);
    }
    Ok(world)
}

/// Identity-disjoint split: each identity independently goes to the train
/// side with probability `ratio`.
pub fn split_identities(world: &SimWorld, ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    split_dataset(&world.dataset, ratio, seed)
}

pub fn split_dataset(dataset: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(invalid("split_ratio", "must lie strictly between 0 and 1"));
    }
    let mut people: Vec<&str> = dataset
        .observations
        .iter()
        .filter_map(|o| o.person_id.as_deref())
        .collect();
    people.sort_unstable();
    people.dedup();
    let mut rng = rng::stream(seed, rng::SPLIT_STREAM);
    let train_ids: HashSet<&str> = people
        .iter()
        .copied()
        .filter(|_| rng.random::<f64>() < ratio)
        .collect();
    if train_ids.is_empty() || train_ids.len() == people.len() {
        return Err(Error::Degenerate(format!(
            "split of {} identities left one side empty",
            people.len()
        )));
    }
    let mut train = Dataset::new(dataset.shape);
    let mut test = Dataset::new(dataset.shape);
    for o in &dataset.observations {
        match o.person_id.as_deref() {
            Some(p) if train_ids.contains(p) => train.observations.push(o.clone()),
            Some(_) => test.observations.push(o.clone()),
            None => {}
        }
    }
    Ok((train, test))
}
