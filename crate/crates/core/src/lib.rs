//! Cross-camera person re-identification with camera transition priors.
//!
//! Appearance embeddings from a non-overlapping camera network are ranked by
//! cosine similarity, optionally weighted by a first-order camera-to-camera
//! transition matrix learned from labeled trajectories, and evaluated with
//! Cumulative Matching Characteristic (CMC) curves. A seeded simulator
//! produces synthetic worlds for experiments without real footage.
//!
//! ```
//! use camreid::{CameraGraph, SimConfig, TransitionModel};
//! use camreid::{evaluation, fusion, simulator, transition};
//!
//! let cfg = SimConfig { identities: 40, ..SimConfig::default() };
//! let world = simulator::simulate(&cfg)?;
//! let (train, test) = simulator::split_identities(&world, 0.8, cfg.seed)?;
//!
//! let trajectories = transition::extract_trajectories(&train.observations);
//! let model = TransitionModel::estimate(&cfg.graph, &trajectories, 1.0)?;
//!
//! let split = fusion::QueryGallerySplit::all_vs_all(&test.observations);
//! let labels = evaluation::label_lookup(&test.observations);
//! let before = evaluation::cmc(&fusion::rank_all(split, None)?, &labels)?;
//! let after = evaluation::cmc(&fusion::rank_all(split, Some(&model))?, &labels)?;
//! println!("rank-1 {:.4} -> {:.4}", before.accuracies[0], after.accuracies[0]);
//! # Ok::<(), camreid::Error>(())
//! ```
//!
//! The `book/` directory at the repository root explains each stage in more
//! depth; its code listings are compiled and run as doctests of this crate.

pub mod camera_graph;
pub mod commands;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod fusion;
pub mod manifest;
pub mod rng;
pub mod simulator;
pub mod transition;

pub use camera_graph::{CameraGraph, CameraId};
pub use embedding::{sim_app, Dataset, Embedding, Observation, Shape};
pub use error::{Error, ErrorKind, Result};
pub use evaluation::{CmcCurve, RankKRow, Separation};
pub use fusion::{
    fused_sim, rank, similarity_matrix, QueryGallerySplit, RankingResult, SimilarityMatrix,
};
pub use manifest::RunManifest;
pub use simulator::{SimConfig, SimWorld};
pub use transition::{Trajectory, TransitionModel, Visit};

// Book chapters, compiled as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/camera-graph.md")]
    mod camera_graph {}
    #[doc = include_str!("../../../book/src/embeddings.md")]
    mod embeddings {}
    #[doc = include_str!("../../../book/src/transitions.md")]
    mod transitions {}
    #[doc = include_str!("../../../book/src/fusion.md")]
    mod fusion {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
