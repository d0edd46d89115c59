//! Camera-to-camera transition statistics.
//!
//! Labeled observations are grouped into per-identity trajectories (runs on
//! the same camera collapse into one visit). Consecutive visit pairs are
//! counted over the graph's adjacent ordered pairs and each row is turned
//! into a first-order transition distribution with optional additive
//! smoothing:
//!
//! ```text
//! p(j | i) = (N(j|i) + alpha) / sum_{k in nbr(i)} (N(k|i) + alpha)
//! ```
//!
//! A row whose denominator is zero is *undefined* rather than uniform.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use chrono::DateTime;

use crate::camera_graph::{CameraGraph, CameraId};
use crate::embedding::Observation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    pub camera: CameraId,
    pub first_seen: f64,
    pub last_seen: f64,
    pub observations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub person_id: String,
    pub visits: Vec<Visit>,
}

/// Groups labeled observations per identity, orders each group by
/// `(timestamp, obs_id)` and collapses same-camera runs. Unlabeled
/// observations are ignored. Output is sorted by `person_id`.
pub fn extract_trajectories<'a>(
    observations: impl IntoIterator<Item = &'a Observation>,
) -> Vec<Trajectory> {
    let mut by_person: BTreeMap<&str, Vec<&Observation>> = BTreeMap::new();
    for o in observations {
        if let Some(p) = o.person_id.as_deref() {
            by_person.entry(p).or_default().push(o);
        }
    }
    by_person
        .into_iter()
        .map(|(person, mut obs)| {
            obs.sort_by(|a, b| {
                a.timestamp
                    .total_cmp(&b.timestamp)
                    .then_with(|| a.obs_id.cmp(&b.obs_id))
            });
            let mut visits: Vec<Visit> = Vec::new();
            for o in obs {
                match visits.last_mut() {
                    Some(v) if v.camera == o.camera => {
                        v.last_seen = o.timestamp;
                        v.observations += 1;
                    }
                    _ => visits.push(Visit {
                        camera: o.camera.clone(),
                        first_seen: o.timestamp,
                        last_seen: o.timestamp,
                        observations: 1,
                    }),
                }
            }
            Trajectory {
                person_id: person.to_string(),
                visits,
            }
        })
        .collect()
}

/// A consecutive visit pair whose cameras are not linked in the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NonAdjacentTransition {
    pub person_id: String,
    pub from: CameraId,
    pub to: CameraId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    graph: CameraGraph,
    alpha: f64,
    // dense n*n, row = source camera; only adjacent cells are meaningful
    counts: Vec<u64>,
    probs: Vec<f64>,
    defined: Vec<bool>,
    diagnostics: Vec<NonAdjacentTransition>,
}

impl TransitionModel {
    pub fn estimate(graph: &CameraGraph, trajectories: &[Trajectory], alpha: f64) -> Result<Self> {
        let n = graph.len();
        let mut counts = vec![0u64; n * n];
        let mut diagnostics = Vec::new();
        for t in trajectories {
            for pair in t.visits.windows(2) {
                let i = graph.index_of(&pair[0].camera)?;
                let j = graph.index_of(&pair[1].camera)?;
                if graph.adjacent_indices(i, j) {
                    counts[i * n + j] += 1;
                } else {
                    diagnostics.push(NonAdjacentTransition {
                        person_id: t.person_id.clone(),
                        from: pair[0].camera.clone(),
                        to: pair[1].camera.clone(),
                    });
                }
            }
        }
        Self::from_counts(graph, counts, alpha, diagnostics)
    }

    /// Builds a model from dense counts, row-major in camera registration
    /// order. Counts on non-adjacent cells are ignored.
    pub fn from_counts(
        graph: &CameraGraph,
        counts: Vec<u64>,
        alpha: f64,
        diagnostics: Vec<NonAdjacentTransition>,
    ) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidConfig {
                key: "alpha".into(),
                message: format!("smoothing must be finite and >= 0, got {alpha}"),
            });
        }
        let n = graph.len();
        assert_eq!(counts.len(), n * n, "counts must be n*n");
        let mut counts = counts;
        for i in 0..n {
            for j in 0..n {
                if !graph.adjacent_indices(i, j) {
                    counts[i * n + j] = 0;
                }
            }
        }
        let mut probs = vec![0.0; n * n];
        let mut defined = vec![false; n];
        for i in 0..n {
            let nbrs = graph.neighbor_indices(i);
            let denom: f64 = nbrs.iter().map(|&j| counts[i * n + j] as f64 + alpha).sum();
            if denom > 0.0 {
                defined[i] = true;
                for &j in nbrs {
                    probs[i * n + j] = (counts[i * n + j] as f64 + alpha) / denom;
                }
            }
        }
        Ok(TransitionModel {
            graph: graph.clone(),
            alpha,
            counts,
            probs,
            defined,
            diagnostics,
        })
    }

    /// Builds a model from explicit probabilities (dense, row-major). Rows
    /// with no positive mass on adjacent cells are undefined. Counts are zero.
    pub fn from_probabilities(graph: &CameraGraph, probs: Vec<f64>) -> Self {
        let n = graph.len();
        assert_eq!(probs.len(), n * n, "probabilities must be n*n");
        let mut clean = vec![0.0; n * n];
        let mut defined = vec![false; n];
        for i in 0..n {
            for &j in graph.neighbor_indices(i) {
                clean[i * n + j] = probs[i * n + j];
                if probs[i * n + j] > 0.0 {
                    defined[i] = true;
                }
            }
        }
        TransitionModel {
            graph: graph.clone(),
            alpha: 0.0,
            counts: vec![0; n * n],
            probs: clean,
            defined,
            diagnostics: Vec::new(),
        }
    }

    pub fn graph(&self) -> &CameraGraph {
        &self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn diagnostics(&self) -> &[NonAdjacentTransition] {
        &self.diagnostics
    }

    pub fn count_by_index(&self, from: usize, to: usize) -> u64 {
        self.counts[from * self.graph.len() + to]
    }

    pub fn count(&self, from: &CameraId, to: &CameraId) -> Result<u64> {
        Ok(self.count_by_index(self.graph.index_of(from)?, self.graph.index_of(to)?))
    }

    pub fn is_row_defined(&self, from: usize) -> bool {
        self.defined[from]
    }

    /// `p(to | from)` by camera index. `Ok(None)` for non-adjacent pairs.
    pub fn prob_by_index(&self, from: usize, to: usize) -> Result<Option<f64>> {
        if !self.graph.adjacent_indices(from, to) {
            return Ok(None);
        }
        if !self.defined[from] {
            return Err(Error::UndefinedRow(self.graph.camera(from).to_string()));
        }
        Ok(Some(self.probs[from * self.graph.len() + to]))
    }

    pub fn prob(&self, from: &CameraId, to: &CameraId) -> Result<Option<f64>> {
        self.prob_by_index(self.graph.index_of(from)?, self.graph.index_of(to)?)
    }

    /// Neighbor probabilities of a defined row, in neighbor order.
    pub fn row(&self, from: usize) -> Option<Vec<(usize, f64)>> {
        if !self.defined[from] {
            return None;
        }
        let n = self.graph.len();
        Some(
            self.graph
                .neighbor_indices(from)
                .iter()
                .map(|&j| (j, self.probs[from * n + j]))
                .collect(),
        )
    }

    /// Largest absolute difference over adjacent cells of rows defined in
    /// both models. Graphs must have the same camera order.
    pub fn max_abs_diff(&self, other: &TransitionModel) -> f64 {
        let n = self.graph.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            if !(self.defined[i] && other.defined[i]) {
                continue;
            }
            for &j in self.graph.neighbor_indices(i) {
                worst = worst.max((self.probs[i * n + j] - other.probs[i * n + j]).abs());
            }
        }
        worst
    }

    /// Two CSV blocks (counts, then probabilities) with rows and columns in
    /// camera registration order. Non-adjacent cells are empty; undefined
    /// probability rows are entirely empty.
    pub fn to_csv(&self) -> String {
        let n = self.graph.len();
        let cams = self.graph.cameras();
        let header = {
            let mut h = String::from("from");
            for c in cams {
                h.push(',');
                h.push_str(c.as_str());
            }
            h
        };
        let mut out = String::new();
        out.push_str("# counts\n");
        out.push_str(&header);
        out.push('\n');
        for (i, cam) in cams.iter().enumerate() {
            out.push_str(cam.as_str());
            for j in 0..n {
                out.push(',');
                if self.graph.adjacent_indices(i, j) {
                    write!(out, "{}", self.counts[i * n + j]).unwrap();
                }
            }
            out.push('\n');
        }
        writeln!(out, "\n# probabilities alpha={}", self.alpha).unwrap();
        out.push_str(&header);
        out.push('\n');
        for (i, cam) in cams.iter().enumerate() {
            out.push_str(cam.as_str());
            for j in 0..n {
                out.push(',');
                if self.defined[i] && self.graph.adjacent_indices(i, j) {
                    write!(out, "{:.6}", self.probs[i * n + j]).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`TransitionModel::to_csv`]. Probabilities are
    /// taken as printed, not recomputed from counts.
    pub fn from_csv(graph: &CameraGraph, text: &str) -> Result<Self> {
        let n = graph.len();
        let mut counts = vec![0u64; n * n];
        let mut probs = vec![0.0; n * n];
        let mut defined = vec![false; n];
        let mut alpha = 0.0;

        #[derive(PartialEq)]
        enum Block {
            None,
            Counts,
            Probs,
        }
        let mut block = Block::None;
        let mut expect_header = false;
        let mut seen_rows = [vec![false; n], vec![false; n]];

        let perr = |line: usize, message: String| Error::Parse { line, message };

        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(title) = line.strip_prefix('#') {
                let title = title.trim();
                if title == "counts" {
                    block = Block::Counts;
                } else if let Some(rest) = title.strip_prefix("probabilities") {
                    block = Block::Probs;
                    if let Some(a) = rest.trim().strip_prefix("alpha=") {
                        alpha = a
                            .parse()
                            .map_err(|_| perr(line_no, format!("bad alpha {a:?}")))?;
                    }
                } else {
                    return Err(perr(line_no, format!("unknown block {title:?}")));
                }
                expect_header = true;
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if expect_header {
                let names: Vec<&str> = graph.cameras().iter().map(CameraId::as_str).collect();
                if cells.first() != Some(&"from") || cells[1..] != names[..] {
                    return Err(perr(
                        line_no,
                        "column header does not match the graph's cameras".into(),
                    ));
                }
                expect_header = false;
                continue;
            }
            if block == Block::None {
                return Err(perr(line_no, "data before block title".into()));
            }
            if cells.len() != n + 1 {
                return Err(perr(
                    line_no,
                    format!("expected {} cells, got {}", n + 1, cells.len()),
                ));
            }
            let cam = CameraId::new(cells[0]).map_err(|e| perr(line_no, e.to_string()))?;
            let i = graph.index_of(&cam)?;
            let which = if block == Block::Counts { 0 } else { 1 };
            if std::mem::replace(&mut seen_rows[which][i], true) {
                return Err(perr(line_no, format!("duplicate row {cam}")));
            }
            for (j, cell) in cells[1..].iter().enumerate() {
                if cell.is_empty() {
                    continue;
                }
                if !graph.adjacent_indices(i, j) {
                    return Err(perr(
                        line_no,
                        format!("value on non-adjacent pair {cam}->{}", graph.camera(j)),
                    ));
                }
                match block {
                    Block::Counts => {
                        counts[i * n + j] = cell
                            .parse()
                            .map_err(|_| perr(line_no, format!("bad count {cell:?}")))?;
                    }
                    Block::Probs => {
                        let p: f64 = cell
                            .parse()
                            .map_err(|_| perr(line_no, format!("bad probability {cell:?}")))?;
                        if !(0.0..=1.0).contains(&p) {
                            return Err(perr(line_no, format!("probability {p} outside [0, 1]")));
                        }
                        probs[i * n + j] = p;
                        defined[i] = true;
                    }
                    Block::None => unreachable!(),
                }
            }
        }
        if seen_rows[1].iter().any(|s| !s) {
            return Err(perr(
                text.lines().count(),
                "probability block is missing rows".into(),
            ));
        }
        Ok(TransitionModel {
            graph: graph.clone(),
            alpha,
            counts,
            probs,
            defined,
            diagnostics: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EntryExit {
    pub entries: usize,
    pub exits: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntryExitStats {
    pub per_camera: BTreeMap<CameraId, EntryExit>,
    /// Keyed by UTC calendar day (`YYYY-MM-DD`) of the trajectory's first visit.
    pub per_day: BTreeMap<String, BTreeMap<CameraId, EntryExit>>,
}

impl EntryExitStats {
    pub fn day_totals(&self) -> impl Iterator<Item = (&str, EntryExit)> + '_ {
        self.per_day.iter().map(|(day, cams)| {
            let total = cams
                .values()
                .fold(EntryExit::default(), |acc, e| EntryExit {
                    entries: acc.entries + e.entries,
                    exits: acc.exits + e.exits,
                });
            (day.as_str(), total)
        })
    }
}

pub fn utc_day(timestamp: f64) -> String {
    let secs = timestamp.floor() as i64;
    match DateTime::from_timestamp(secs, 0) {
        Some(dt) => dt.format("%Y-%m-%d").to_string(),
        None => format!("day{}", secs.div_euclid(86_400)),
    }
}

/// Entry camera is the first visit's, exit camera the last visit's.
pub fn entry_exit_stats(trajectories: &[Trajectory]) -> Result<EntryExitStats> {
    let mut stats = EntryExitStats::default();
    let mut any = false;
    for t in trajectories {
        let (Some(first), Some(last)) = (t.visits.first(), t.visits.last()) else {
            continue;
        };
        any = true;
        let day = stats.per_day.entry(utc_day(first.first_seen)).or_default();
        stats
            .per_camera
            .entry(first.camera.clone())
            .or_default()
            .entries += 1;
        stats
            .per_camera
            .entry(last.camera.clone())
            .or_default()
            .exits += 1;
        day.entry(first.camera.clone()).or_default().entries += 1;
        day.entry(last.camera.clone()).or_default().exits += 1;
    }
    if !any {
        return Err(Error::Degenerate("no trajectories".into()));
    }
    Ok(stats)
}

/// Observation and visit counts per camera, for reporting.
pub fn camera_counts(trajectories: &[Trajectory]) -> BTreeMap<CameraId, (usize, usize)> {
    let mut out: BTreeMap<CameraId, (usize, usize)> = BTreeMap::new();
    for v in trajectories.iter().flat_map(|t| &t.visits) {
        let e = out.entry(v.camera.clone()).or_default();
        e.0 += v.observations;
        e.1 += 1;
    }
    out
}

/// Maps each identity to the cameras it was seen on.
pub fn cameras_per_identity(trajectories: &[Trajectory]) -> HashMap<&str, Vec<&CameraId>> {
    trajectories
        .iter()
        .map(|t| {
            let mut cams: Vec<&CameraId> = t.visits.iter().map(|v| &v.camera).collect();
            cams.sort();
            cams.dedup();
            (t.person_id.as_str(), cams)
        })
        .collect()
}
