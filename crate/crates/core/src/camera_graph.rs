//! Undirected topology of a non-overlapping camera network.
//!
//! Cameras are nodes; an edge means a person can walk from one field of view
//! to the other without passing through a third camera. The graph is built
//! once and never mutated afterwards.
//!
//! Edge-list text format, one entry per line:
//!
//! ```text
//! # comment
//! node C6        <- isolated camera
//! C1 C2          <- undirected edge
//! ```
//!
//! Cameras are registered in the order they are first mentioned. Each
//! camera's neighbor list follows the order in which its edges were added.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Printable camera token such as `C1`: non-empty, no whitespace, no `#`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CameraId(String);

impl CameraId {
    pub fn new(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if value.is_empty() || value.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(Error::InvalidCameraId(value));
        }
        Ok(CameraId(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CameraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for CameraId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CameraId::new(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CameraGraph {
    cameras: Vec<CameraId>,
    index: HashMap<CameraId, usize>,
    // adjacency[i] holds neighbor indices in edge insertion order
    adjacency: Vec<Vec<usize>>,
    // unordered pairs stored as (min, max) index, insertion order
    edges: Vec<(usize, usize)>,
}

impl CameraGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a camera if it is not already present and returns its index.
    pub fn add_camera(&mut self, camera: CameraId) -> usize {
        if let Some(&i) = self.index.get(&camera) {
            return i;
        }
        let i = self.cameras.len();
        self.index.insert(camera.clone(), i);
        self.cameras.push(camera);
        self.adjacency.push(Vec::new());
        i
    }

    /// Adds an undirected edge, registering both endpoints. Returns `false`
    /// when the edge already existed.
    pub fn add_edge(&mut self, a: CameraId, b: CameraId) -> Result<bool> {
        if a == b {
            return Err(Error::SelfLoop {
                line: 0,
                camera: a.to_string(),
            });
        }
        let ia = self.add_camera(a);
        let ib = self.add_camera(b);
        if self.adjacency[ia].contains(&ib) {
            return Ok(false);
        }
        self.adjacency[ia].push(ib);
        self.adjacency[ib].push(ia);
        self.edges.push((ia.min(ib), ia.max(ib)));
        Ok(true)
    }

    /// Builds a complete graph over the given cameras, edges in lexicographic
    /// index order.
    pub fn complete(cameras: impl IntoIterator<Item = CameraId>) -> Result<Self> {
        let mut graph = CameraGraph::new();
        for c in cameras {
            graph.add_camera(c);
        }
        let n = graph.len();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (graph.cameras[i].clone(), graph.cameras[j].clone());
                graph.add_edge(a, b)?;
            }
        }
        Ok(graph)
    }

    /// One `A B` edge or `node A` per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut graph = CameraGraph::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let parse_id = |t: &str| {
                CameraId::new(t).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })
            };
            match tokens.as_slice() {
                ["node", c] => {
                    graph.add_camera(parse_id(c)?);
                }
                [a, b] => {
                    let (a, b) = (parse_id(a)?, parse_id(b)?);
                    graph.add_edge(a, b).map_err(|e| match e {
                        Error::SelfLoop { camera, .. } => Error::SelfLoop {
                            line: line_no,
                            camera,
                        },
                        other => other,
                    })?;
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected \"A B\" or \"node A\", got {line:?}"),
                    })
                }
            }
        }
        Ok(graph)
    }

    /// Serializes to the edge-list format: every camera as a `node` line in
    /// registration order, then every edge in insertion order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for c in &self.cameras {
            out.push_str("node ");
            out.push_str(c.as_str());
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("{} {}\n", self.cameras[a], self.cameras[b]));
        }
        out
    }

    pub fn cameras(&self) -> &[CameraId] {
        &self.cameras
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&CameraId, &CameraId)> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| (&self.cameras[a], &self.cameras[b]))
    }

    pub fn index_of(&self, camera: &CameraId) -> Result<usize> {
        self.index
            .get(camera)
            .copied()
            .ok_or_else(|| Error::UnknownCamera(camera.to_string()))
    }

    pub fn contains(&self, camera: &CameraId) -> bool {
        self.index.contains_key(camera)
    }

    pub fn camera(&self, index: usize) -> &CameraId {
        &self.cameras[index]
    }

    pub fn neighbors(&self, camera: &CameraId) -> Result<Vec<CameraId>> {
        let i = self.index_of(camera)?;
        Ok(self.adjacency[i]
            .iter()
            .map(|&j| self.cameras[j].clone())
            .collect())
    }

    pub fn neighbor_indices(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn adjacent_indices(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    pub fn adjacent(&self, a: &CameraId, b: &CameraId) -> Result<bool> {
        Ok(self.adjacent_indices(self.index_of(a)?, self.index_of(b)?))
    }
}

impl std::str::FromStr for CameraGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CameraGraph::parse(s)
    }
}
