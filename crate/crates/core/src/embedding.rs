//! Part-structured appearance embeddings and observation datasets.
//!
//! An embedding is `parts` blocks of `dim` floats stored flat, each block
//! scaled to unit Euclidean norm. Appearance similarity is plain cosine
//! similarity over the whole vector.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::camera_graph::{CameraGraph, CameraId};
use crate::error::{Error, Result};

pub const DEFAULT_PARTS: usize = 6;
pub const DEFAULT_DIM: usize = 2048;

/// Per-part norms below this are treated as zero.
pub const MIN_PART_NORM: f64 = 1e-12;

/// Allowed deviation from unit norm for inputs flagged as already normalized.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub parts: usize,
    pub dim: usize,
}

impl Shape {
    pub fn new(parts: usize, dim: usize) -> Self {
        Shape { parts, dim }
    }

    pub fn len(&self) -> usize {
        self.parts * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for Shape {
    fn default() -> Self {
        Shape::new(DEFAULT_PARTS, DEFAULT_DIM)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    shape: Shape,
    values: Vec<f64>,
    norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // left-to-right accumulation, never reordered
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

impl Embedding {
    /// Scales every part of `raw` to unit norm.
    pub fn normalize_parts(shape: Shape, raw: &[f64]) -> Result<Self> {
        check_len(shape, raw.len())?;
        let mut values = raw.to_vec();
        for (part, block) in values.chunks_mut(shape.dim).enumerate() {
            let norm = dot(block, block).sqrt();
            if !norm.is_finite() || norm < MIN_PART_NORM {
                return Err(Error::ZeroPart { part });
            }
            block.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Self::from_values(shape, values))
    }

    /// Wraps values that are already part-normalized, checking each part's
    /// norm against [`UNIT_NORM_TOLERANCE`].
    pub fn from_normalized(shape: Shape, values: Vec<f64>) -> Result<Self> {
        check_len(shape, values.len())?;
        for (part, block) in values.chunks(shape.dim).enumerate() {
            let norm = dot(block, block).sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
                return Err(Error::NotNormalized { part, norm });
            }
        }
        Ok(Self::from_values(shape, values))
    }

    fn from_values(shape: Shape, values: Vec<f64>) -> Self {
        let norm = dot(&values, &values).sqrt();
        Embedding {
            shape,
            values,
            norm,
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn part(&self, index: usize) -> &[f64] {
        &self.values[index * self.shape.dim..(index + 1) * self.shape.dim]
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dot(&self, other: &Embedding) -> Result<f64> {
        self.check_shape(other)?;
        Ok(dot(&self.values, &other.values))
    }

    fn check_shape(&self, other: &Embedding) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                left_parts: self.shape.parts,
                left_dim: self.shape.dim,
                right_parts: other.shape.parts,
                right_dim: other.shape.dim,
            });
        }
        Ok(())
    }
}

fn check_len(shape: Shape, found: usize) -> Result<()> {
    if shape.is_empty() || found != shape.len() {
        return Err(Error::ShapeMismatch {
            left_parts: shape.parts,
            left_dim: shape.dim,
            right_parts: 1,
            right_dim: found,
        });
    }
    Ok(())
}

/// Cosine similarity, clamped to `[-1, 1]` against rounding.
///
/// Equal to `a·b / parts` for part-normalized inputs. Bitwise symmetric.
pub fn sim_app(a: &Embedding, b: &Embedding) -> Result<f64> {
    let d = a.dot(b)?;
    Ok((d / (a.norm * b.norm)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub obs_id: String,
    pub person_id: Option<String>,
    pub camera: CameraId,
    pub timestamp: f64,
    pub embedding: Embedding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub shape: Shape,
    pub observations: Vec<Observation>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    parts: usize,
    dim: usize,
    #[serde(default)]
    normalized: bool,
}

#[derive(Debug, Serialize)]
struct RecordOut<'a> {
    obs_id: &'a str,
    person_id: Option<&'a str>,
    camera: &'a str,
    timestamp: f64,
    embedding: &'a [f64],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordIn {
    obs_id: String,
    #[serde(default)]
    person_id: Option<String>,
    camera: String,
    timestamp: f64,
    embedding: Vec<f64>,
}

impl Dataset {
    pub fn new(shape: Shape) -> Self {
        Dataset {
            shape,
            observations: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Reads NDJSON records. An optional first line
    /// `{"parts": P, "dim": D, "normalized": bool}` declares the layout;
    /// without it the layout is 6x2048 and features are treated as raw.
    /// Raw features are part-normalized on load.
    pub fn read_ndjson(reader: impl BufRead) -> Result<Self> {
        let mut shape = Shape::default();
        let mut normalized = false;
        let mut observations = Vec::new();
        let mut seen = HashSet::new();
        let mut first = true;
        let mut index = 0usize;

        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<ndjson>", e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if first {
                first = false;
                let value: serde_json::Value =
                    serde_json::from_str(line).map_err(|e| Error::Parse {
                        line: n + 1,
                        message: e.to_string(),
                    })?;
                if value.get("obs_id").is_none() && value.get("parts").is_some() {
                    let header: Header =
                        serde_json::from_value(value).map_err(|e| Error::Parse {
                            line: n + 1,
                            message: format!("bad header: {e}"),
                        })?;
                    shape = Shape::new(header.parts, header.dim);
                    normalized = header.normalized;
                    if shape.is_empty() {
                        return Err(Error::Parse {
                            line: n + 1,
                            message: "header declares an empty embedding".into(),
                        });
                    }
                    continue;
                }
            }

            let record: RecordIn = serde_json::from_str(line).map_err(|e| Error::Schema {
                index,
                message: e.to_string(),
            })?;
            let camera = CameraId::new(record.camera).map_err(|e| Error::Schema {
                index,
                message: e.to_string(),
            })?;
            if record.embedding.len() != shape.len() {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: shape.len(),
                    found: record.embedding.len(),
                });
            }
            if !record.timestamp.is_finite() || record.embedding.iter().any(|v| !v.is_finite()) {
                return Err(Error::Schema {
                    index,
                    message: "non-finite value".into(),
                });
            }
            if !seen.insert(record.obs_id.clone()) {
                return Err(Error::DuplicateObservation {
                    index,
                    obs_id: record.obs_id,
                });
            }
            let embedding = if normalized {
                Embedding::from_normalized(shape, record.embedding)
            } else {
                Embedding::normalize_parts(shape, &record.embedding)
            }
            .map_err(|e| Error::Schema {
                index,
                message: e.to_string(),
            })?;
            observations.push(Observation {
                obs_id: record.obs_id,
                person_id: record.person_id,
                camera,
                timestamp: record.timestamp,
                embedding,
            });
            index += 1;
        }
        Ok(Dataset {
            shape,
            observations,
        })
    }

    pub fn from_ndjson_str(text: &str) -> Result<Self> {
        Self::read_ndjson(text.as_bytes())
    }

    /// Writes a header line followed by one record per observation.
    pub fn write_ndjson(&self, mut writer: impl Write) -> std::io::Result<()> {
        let header = Header {
            parts: self.shape.parts,
            dim: self.shape.dim,
            normalized: true,
        };
        serde_json::to_writer(&mut writer, &header)?;
        writer.write_all(b"\n")?;
        for o in &self.observations {
            let rec = RecordOut {
                obs_id: &o.obs_id,
                person_id: o.person_id.as_deref(),
                camera: o.camera.as_str(),
                timestamp: o.timestamp,
                embedding: o.embedding.values(),
            };
            serde_json::to_writer(&mut writer, &rec)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_ndjson_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_ndjson(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Fails on the first observation whose camera is not in `graph`.
    pub fn check_cameras(&self, graph: &CameraGraph) -> Result<()> {
        match self
            .observations
            .iter()
            .find(|o| !graph.contains(&o.camera))
        {
            Some(o) => Err(Error::UnknownCamera(o.camera.to_string())),
            None => Ok(()),
        }
    }

    pub fn check_labeled(&self) -> Result<()> {
        match self.observations.iter().find(|o| o.person_id.is_none()) {
            Some(o) => Err(Error::Unlabeled(o.obs_id.clone())),
            None => Ok(()),
        }
    }
}
