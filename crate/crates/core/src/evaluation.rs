//! Cumulative Matching Characteristic curves and related reports.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::embedding::Observation;
use crate::error::{Error, Result};
use crate::fusion::{QueryGallerySplit, RankingResult, SimilarityMatrix};

/// Rank cut-offs reported in before/after tables.
pub const DEFAULT_KS: [usize; 4] = [1, 5, 10, 15];

#[derive(Debug, Clone, PartialEq)]
pub struct CmcCurve {
    /// `accuracies[k - 1]` is the rank-k accuracy.
    pub accuracies: Vec<f64>,
    /// Queries counted in the denominator.
    pub query_count: usize,
    /// Queries dropped because their gallery held no correct match.
    pub dropped: usize,
}

impl CmcCurve {
    pub fn rank(&self, k: usize) -> Option<f64> {
        k.checked_sub(1)
            .and_then(|i| self.accuracies.get(i))
            .copied()
    }

    pub fn depth(&self) -> usize {
        self.accuracies.len()
    }
}

/// Maps obs_id to person_id for every labeled observation.
pub fn label_lookup<'a>(
    observations: impl IntoIterator<Item = &'a Observation>,
) -> HashMap<&'a str, &'a str> {
    observations
        .into_iter()
        .filter_map(|o| o.person_id.as_deref().map(|p| (o.obs_id.as_str(), p)))
        .collect()
}

/// 1-based rank of the first gallery item sharing the query's label.
pub fn first_correct_rank(
    result: &RankingResult,
    labels: &HashMap<&str, &str>,
) -> Result<Option<usize>> {
    let query_label = labels
        .get(result.query.as_str())
        .ok_or_else(|| Error::Unlabeled(result.query.clone()))?;
    Ok(result
        .matches
        .iter()
        .position(|m| labels.get(m.obs_id.as_str()) == Some(query_label))
        .map(|p| p + 1))
}

/// Curve depth is the longest ranking list among retained queries.
pub fn cmc(results: &[RankingResult], labels: &HashMap<&str, &str>) -> Result<CmcCurve> {
    let mut hits_at = Vec::new();
    let mut depth = 0usize;
    let mut dropped = 0usize;
    for r in results {
        match first_correct_rank(r, labels)? {
            Some(rank) => {
                depth = depth.max(r.matches.len());
                if hits_at.len() < rank {
                    hits_at.resize(rank, 0usize);
                }
                hits_at[rank - 1] += 1;
            }
            None => dropped += 1,
        }
    }
    let retained = results.len() - dropped;
    if retained == 0 {
        return Err(Error::NoRetainedQueries);
    }
    hits_at.resize(depth, 0);
    let mut cumulative = 0usize;
    let accuracies = hits_at
        .iter()
        .map(|h| {
            cumulative += h;
            cumulative as f64 / retained as f64
        })
        .collect();
    Ok(CmcCurve {
        accuracies,
        query_count: retained,
        dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankKRow {
    pub k: usize,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
}

pub fn rank_k_table(before: &CmcCurve, after: &CmcCurve, ks: &[usize]) -> Result<Vec<RankKRow>> {
    ks.iter()
        .map(|&k| {
            let depth = before.depth().min(after.depth());
            match (before.rank(k), after.rank(k)) {
                (Some(b), Some(a)) => Ok(RankKRow {
                    k,
                    before: b,
                    after: a,
                    delta: a - b,
                }),
                _ => Err(Error::RankOutOfRange { k, depth }),
            }
        })
        .collect()
}

/// Rounds to `places` decimals, half away from zero.
pub fn round_to(value: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (value * scale).round() / scale
}

/// Signed percentage with two decimals, e.g. `+7.72%`.
pub fn format_percent(delta: f64) -> String {
    let pct = round_to(delta * 100.0, 2);
    // avoid "-0.00%"
    let pct = if pct == 0.0 { 0.0 } else { pct };
    format!("{pct:+.2}%")
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `k,before,after,delta,delta_pct` rows, accuracies with 4 decimals.
pub fn rank_k_csv(rows: &[RankKRow]) -> String {
    let mut out = String::from("k,before,after,delta,delta_pct\n");
    for r in rows {
        writeln!(
            out,
            "{},{:.4},{:.4},{:+.4},{}",
            r.k,
            r.before,
            r.after,
            round_to(r.delta, 4),
            format_percent(r.delta)
        )
        .unwrap();
    }
    out
}

/// One `rank,accuracy` row per rank.
pub fn export_cmc(curve: &CmcCurve, header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str("rank,accuracy\n");
    }
    for (i, a) in curve.accuracies.iter().enumerate() {
        writeln!(out, "{},{:.4}", i + 1, a).unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub intra_mean: f64,
    pub inter_mean: f64,
    pub ratio: f64,
    pub intra_pairs: usize,
    pub inter_pairs: usize,
}

/// Mean matrix value over included same-identity pairs against included
/// different-identity pairs. Unlabeled observations are skipped.
pub fn separation(matrix: &SimilarityMatrix, split: QueryGallerySplit<'_>) -> Result<Separation> {
    let (mut intra_sum, mut intra_n) = (0.0, 0usize);
    let (mut inter_sum, mut inter_n) = (0.0, 0usize);
    for (i, q) in split.queries.iter().enumerate() {
        let Some(qp) = q.person_id.as_deref() else {
            continue;
        };
        for (j, g) in split.gallery.iter().enumerate() {
            if !matrix.is_included(i, j) {
                continue;
            }
            let Some(gp) = g.person_id.as_deref() else {
                continue;
            };
            let v = matrix.get(i, j);
            if qp == gp {
                intra_sum += v;
                intra_n += 1;
            } else {
                inter_sum += v;
                inter_n += 1;
            }
        }
    }
    if intra_n == 0 || inter_n == 0 {
        return Err(Error::Degenerate(
            "separation needs both same-identity and different-identity pairs".into(),
        ));
    }
    let intra_mean = intra_sum / intra_n as f64;
    let inter_mean = inter_sum / inter_n as f64;
    if inter_mean == 0.0 {
        return Err(Error::Degenerate("inter-identity mean is zero".into()));
    }
    Ok(Separation {
        intra_mean,
        inter_mean,
        ratio: intra_mean / inter_mean,
        intra_pairs: intra_n,
        inter_pairs: inter_n,
    })
}

/// Binary PGM (P5), one byte per cell, `round(255 * value)`.
pub fn export_heatmap(matrix: &SimilarityMatrix) -> Result<Vec<u8>> {
    let mut out = format!("P5\n{} {}\n255\n", matrix.cols, matrix.rows).into_bytes();
    out.reserve(matrix.values.len());
    for (k, &v) in matrix.values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::ValueOutOfRange {
                row: k / matrix.cols,
                col: k % matrix.cols,
                value: v,
            });
        }
        out.push((255.0 * v).round() as u8);
    }
    Ok(out)
}
