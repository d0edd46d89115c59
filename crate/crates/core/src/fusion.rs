//! Cross-camera ranking with an optional transition prior.
//!
//! Appearance-only scoring uses cosine similarity directly. With a prior,
//! the score of gallery item `g` for query `q` is
//!
//! ```text
//! max(sim_app(q, g), 0) * p(cam(g) | cam(q))
//! ```
//!
//! and gallery items on cameras not adjacent to the query's camera score 0.
//! Items on the query's own camera are never ranked.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::embedding::{sim_app, Observation};
use crate::error::{Error, Result};
use crate::transition::TransitionModel;

#[derive(Debug, Clone, Copy)]
pub struct QueryGallerySplit<'a> {
    pub queries: &'a [Observation],
    pub gallery: &'a [Observation],
}

impl<'a> QueryGallerySplit<'a> {
    pub fn new(queries: &'a [Observation], gallery: &'a [Observation]) -> Self {
        QueryGallerySplit { queries, gallery }
    }

    /// Every observation queries every other one.
    pub fn all_vs_all(observations: &'a [Observation]) -> Self {
        Self::new(observations, observations)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Match {
    pub obs_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingResult {
    pub query: String,
    pub matches: Vec<Match>,
}

/// Whether `g` takes part in `q`'s ranking at all.
pub fn is_included(q: &Observation, g: &Observation) -> bool {
    q.camera != g.camera && q.obs_id != g.obs_id
}

/// Transition-weighted similarity for a pair on adjacent cameras.
pub fn fused_sim(a: &Observation, b: &Observation, model: &TransitionModel) -> Result<f64> {
    let graph = model.graph();
    let i = graph.index_of(&a.camera)?;
    let j = graph.index_of(&b.camera)?;
    let p = model.prob_by_index(i, j)?.ok_or_else(|| {
        Error::Degenerate(format!(
            "cameras {} and {} are not adjacent",
            a.camera, b.camera
        ))
    })?;
    Ok(fuse(sim_app(&a.embedding, &b.embedding)?, p))
}

/// Clamped appearance score times transition probability.
pub fn fuse(appearance: f64, p: f64) -> f64 {
    appearance.max(0.0) * p
}

/// Score of an included pair under the ranking rules.
pub fn pair_score(
    q: &Observation,
    g: &Observation,
    model: Option<&TransitionModel>,
) -> Result<f64> {
    match model {
        None => sim_app(&q.embedding, &g.embedding),
        Some(m) => {
            let graph = m.graph();
            let (i, j) = (graph.index_of(&q.camera)?, graph.index_of(&g.camera)?);
            match m.prob_by_index(i, j)? {
                Some(p) => Ok(fuse(sim_app(&q.embedding, &g.embedding)?, p)),
                None => Ok(0.0),
            }
        }
    }
}

/// Descending score, ascending obs_id on ties.
pub fn match_order(a: &Match, b: &Match) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.obs_id.cmp(&b.obs_id))
}

/// Ranks the included gallery items with an arbitrary scoring function.
pub fn rank_by<F>(
    query: &Observation,
    gallery: &[Observation],
    mut score: F,
) -> Result<RankingResult>
where
    F: FnMut(&Observation, &Observation) -> Result<f64>,
{
    let mut matches = Vec::with_capacity(gallery.len());
    for g in gallery.iter().filter(|g| is_included(query, g)) {
        let s = score(query, g)?;
        if !s.is_finite() {
            return Err(Error::Degenerate(format!(
                "non-finite score for {} vs {}",
                query.obs_id, g.obs_id
            )));
        }
        matches.push(Match {
            obs_id: g.obs_id.clone(),
            score: s,
        });
    }
    if matches.is_empty() {
        return Err(Error::EmptyGallery(query.obs_id.clone()));
    }
    matches.sort_by(match_order);
    Ok(RankingResult {
        query: query.obs_id.clone(),
        matches,
    })
}

pub fn rank(
    query: &Observation,
    gallery: &[Observation],
    model: Option<&TransitionModel>,
) -> Result<RankingResult> {
    rank_by(query, gallery, |q, g| pair_score(q, g, model))
}

/// Ranks every query of the split, in query order. Rows are computed in
/// parallel on the current rayon pool; each row's arithmetic is sequential,
/// so output does not depend on the pool size.
pub fn rank_all(
    split: QueryGallerySplit<'_>,
    model: Option<&TransitionModel>,
) -> Result<Vec<RankingResult>> {
    split
        .queries
        .par_iter()
        .map(|q| rank(q, split.gallery, model))
        .collect()
}

/// Dense query-by-gallery score matrix, min-max normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major normalized scores; excluded pairs are 0.
    pub values: Vec<f64>,
    /// Row-major mask of pairs that take part in ranking.
    pub included: Vec<bool>,
}

impl SimilarityMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn is_included(&self, row: usize, col: usize) -> bool {
        self.included[row * self.cols + col]
    }
}

/// Scores every query/gallery pair with [`rank`]'s rules and min-max
/// normalizes over the nonzero included entries. When all those entries are
/// equal they map to 1. Excluded and zero-scored pairs stay 0.
pub fn similarity_matrix(
    split: QueryGallerySplit<'_>,
    model: Option<&TransitionModel>,
) -> Result<SimilarityMatrix> {
    let rows = split.queries.len();
    let cols = split.gallery.len();
    let raw: Vec<Vec<(f64, bool)>> = split
        .queries
        .par_iter()
        .map(|q| {
            split
                .gallery
                .iter()
                .map(|g| {
                    if is_included(q, g) {
                        pair_score(q, g, model).map(|s| (s, true))
                    } else {
                        q.embedding.dot(&g.embedding).map(|_| (0.0, false))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(s, inc) in raw.iter().flatten() {
        if inc && s != 0.0 {
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    let span = hi - lo;
    let mut values = Vec::with_capacity(rows * cols);
    let mut included = Vec::with_capacity(rows * cols);
    for &(s, inc) in raw.iter().flatten() {
        included.push(inc);
        values.push(if inc && s != 0.0 {
            if span > 0.0 {
                (s - lo) / span
            } else {
                1.0
            }
        } else {
            0.0
        });
    }
    Ok(SimilarityMatrix {
        rows,
        cols,
        values,
        included,
    })
}

/// CSV of `query_obs,rank,gallery_obs,score,is_correct`, keeping at most
/// `top` matches per query (all when `None`).
pub fn rankings_csv<F>(results: &[RankingResult], top: Option<usize>, is_correct: F) -> String
where
    F: Fn(&str, &str) -> bool,
{
    let mut out = String::from("query_obs,rank,gallery_obs,score,is_correct\n");
    for r in results {
        let depth = top.unwrap_or(r.matches.len()).min(r.matches.len());
        for (k, m) in r.matches[..depth].iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.query,
                k + 1,
                m.obs_id,
                m.score,
                is_correct(&r.query, &m.obs_id)
            )
            .unwrap();
        }
    }
    out
}
