//! End-to-end runs behind the `camreid` subcommands.
//!
//! Every command writes its artifacts plus a [`RunManifest`] and returns the
//! paths it wrote. Nothing here reads the clock or OS entropy.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::camera_graph::CameraGraph;
use crate::embedding::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::{self, CmcCurve, Separation, DEFAULT_KS};
use crate::fusion::{self, QueryGallerySplit, RankingResult, SimilarityMatrix};
use crate::manifest::{sha256_hex, RunManifest};
use crate::simulator::{self, SimConfig};
use crate::transition::{self, TransitionModel};

#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    /// Human-readable warnings for the diagnostic stream.
    pub diagnostics: Vec<String>,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).map_err(|e| Error::Parse {
        line: 0,
        message: format!("{}: not UTF-8: {e}", path.display()),
    })
}

struct Writer<'a> {
    dir: &'a Path,
    manifest: &'a mut RunManifest,
    outcome: &'a mut Outcome,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.manifest.output(name, bytes);
        self.outcome.outputs.push(path);
        Ok(())
    }

    fn finish(self, name: &str) -> Result<()> {
        let path = self.dir.join(name);
        self.manifest.write(&path)?;
        self.outcome.outputs.push(path);
        Ok(())
    }
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

fn file_name(path: &Path) -> Result<String> {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| Error::io(path, std::io::Error::other("not a file path")))
}

fn stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    match name.rsplit_once('.') {
        Some((s, _)) if !s.is_empty() => s.to_string(),
        _ => name,
    }
}

/// Runs `f` on a rayon pool of `threads` workers (the global pool if `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Degenerate(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub struct SimulateArgs<'a> {
    pub config: &'a Path,
    pub out: &'a Path,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// Writes `<stem>.ndjson` (the path given), plus `<stem>.train.ndjson`,
/// `<stem>.test.ndjson`, `<stem>.graph.txt`, `<stem>.truth.csv` and
/// `<stem>.manifest.json` in the same directory.
pub fn simulate(args: &SimulateArgs<'_>) -> Result<Outcome> {
    let config_text = read_text(args.config)?;
    let mut cfg = SimConfig::parse(&config_text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let world = with_threads(args.threads, || simulator::simulate(&cfg))??;
    let (train, test) = simulator::split_identities(&world, cfg.split_ratio, cfg.seed)?;

    let dir = parent_dir(args.out);
    let stem = stem(args.out);
    let mut manifest = RunManifest::new("simulate");
    manifest.seed = Some(cfg.seed);
    manifest.config_hash = Some(sha256_hex(cfg.to_config_string().as_bytes()));
    manifest.input(args.config, config_text.as_bytes());
    manifest
        .param("identities", cfg.identities)
        .param("observations", world.dataset.len())
        .param("train_observations", train.len())
        .param("test_observations", test.len());

    let mut outcome = Outcome::default();
    let mut w = Writer {
        dir,
        manifest: &mut manifest,
        outcome: &mut outcome,
    };
    w.put(
        &file_name(args.out)?,
        world.dataset.to_ndjson_string().as_bytes(),
    )?;
    w.put(
        &format!("{stem}.train.ndjson"),
        train.to_ndjson_string().as_bytes(),
    )?;
    w.put(
        &format!("{stem}.test.ndjson"),
        test.to_ndjson_string().as_bytes(),
    )?;
    w.put(
        &format!("{stem}.graph.txt"),
        cfg.graph.to_edge_list().as_bytes(),
    )?;
    w.put(
        &format!("{stem}.truth.csv"),
        cfg.ground_truth.to_csv().as_bytes(),
    )?;
    w.finish(&format!("{stem}.manifest.json"))?;
    Ok(outcome)
}

fn load_graph(path: &Path, manifest: &mut RunManifest) -> Result<CameraGraph> {
    let text = read_text(path)?;
    manifest.input(path, text.as_bytes());
    CameraGraph::parse(&text)
}

fn load_dataset(path: &Path, manifest: &mut RunManifest) -> Result<Dataset> {
    let bytes = read(path)?;
    manifest.input(path, &bytes);
    Dataset::read_ndjson(&bytes[..])
}

pub struct EstimateArgs<'a> {
    pub graph: &'a Path,
    pub train: &'a Path,
    pub alpha: f64,
    pub out: &'a Path,
}

pub fn estimate(args: &EstimateArgs<'_>) -> Result<Outcome> {
    let mut manifest = RunManifest::new("estimate");
    manifest.param("alpha", args.alpha);
    let graph = load_graph(args.graph, &mut manifest)?;
    let train = load_dataset(args.train, &mut manifest)?;
    train.check_cameras(&graph)?;
    let trajectories = transition::extract_trajectories(&train.observations);
    let model = TransitionModel::estimate(&graph, &trajectories, args.alpha)?;

    let mut outcome = Outcome::default();
    for d in model.diagnostics() {
        outcome.diagnostics.push(format!(
            "non-adjacent transition {} -> {} (person {}) left out of the matrix",
            d.from, d.to, d.person_id
        ));
    }
    for (i, cam) in graph.cameras().iter().enumerate() {
        if !model.is_row_defined(i) {
            outcome
                .diagnostics
                .push(format!("row {cam} is undefined: no outgoing transitions"));
        }
    }
    manifest.param("trajectories", trajectories.len());
    manifest.param("non_adjacent_transitions", model.diagnostics().len());

    let dir = parent_dir(args.out);
    let stem = stem(args.out);
    let mut w = Writer {
        dir,
        manifest: &mut manifest,
        outcome: &mut outcome,
    };
    w.put(&file_name(args.out)?, model.to_csv().as_bytes())?;
    w.finish(&format!("{stem}.manifest.json"))?;
    Ok(outcome)
}

pub struct EvaluateArgs<'a> {
    pub graph: &'a Path,
    pub test: &'a Path,
    /// `None` runs the appearance-only baseline.
    pub transitions: Option<&'a Path>,
    pub out_dir: &'a Path,
    /// Matches kept per query in ranking CSVs.
    pub top: Option<usize>,
    pub threads: Option<usize>,
}

/// Scores, CMC curve, matrix and separation for one scoring mode.
pub struct ModeReport {
    pub rankings: Vec<RankingResult>,
    pub curve: CmcCurve,
    pub matrix: SimilarityMatrix,
    pub separation: Result<Separation>,
}

pub fn evaluate_mode(test: &Dataset, model: Option<&TransitionModel>) -> Result<ModeReport> {
    let split = QueryGallerySplit::all_vs_all(&test.observations);
    let labels = evaluation::label_lookup(&test.observations);
    let rankings = fusion::rank_all(split, model)?;
    let curve = evaluation::cmc(&rankings, &labels)?;
    let matrix = fusion::similarity_matrix(split, model)?;
    let separation = evaluation::separation(&matrix, split);
    Ok(ModeReport {
        rankings,
        curve,
        matrix,
        separation,
    })
}

fn separation_row(out: &mut String, name: &str, s: &Result<Separation>) {
    match s {
        Ok(s) => writeln!(
            out,
            "{name},{:.6},{:.6},{:.6},{},{},",
            s.intra_mean, s.inter_mean, s.ratio, s.intra_pairs, s.inter_pairs
        ),
        Err(e) => writeln!(out, "{name},,,,,,{e}"),
    }
    .unwrap();
}

/// Writes into `out_dir`: `cmc_appearance.csv`, `rankings_appearance.csv`,
/// `heatmap_appearance.pgm`, `separation.csv`, `manifest.json`, and with a
/// transition model also `cmc_fused.csv`, `rankings_fused.csv`,
/// `heatmap_fused.pgm` and `rank_k.csv`.
pub fn evaluate(args: &EvaluateArgs<'_>) -> Result<Outcome> {
    let mut manifest = RunManifest::new("evaluate");
    let graph = load_graph(args.graph, &mut manifest)?;
    let test = load_dataset(args.test, &mut manifest)?;
    test.check_cameras(&graph)?;
    test.check_labeled()?;
    let model = match args.transitions {
        Some(path) => {
            let text = read_text(path)?;
            manifest.input(path, text.as_bytes());
            Some(TransitionModel::from_csv(&graph, &text)?)
        }
        None => None,
    };
    manifest.param(
        "mode",
        if model.is_some() {
            "fused"
        } else {
            "appearance-only"
        },
    );
    if let Some(top) = args.top {
        manifest.param("top", top);
    }

    let (before, after) = with_threads(args.threads, || -> Result<_> {
        let before = evaluate_mode(&test, None)?;
        let after = model
            .as_ref()
            .map(|m| evaluate_mode(&test, Some(m)))
            .transpose()?;
        Ok((before, after))
    })??;

    let labels = evaluation::label_lookup(&test.observations);
    let correct = |q: &str, g: &str| labels.contains_key(q) && labels.get(q) == labels.get(g);

    fs::create_dir_all(args.out_dir).map_err(|e| Error::io(args.out_dir, e))?;
    let mut outcome = Outcome::default();
    if before.curve.dropped > 0 {
        outcome.diagnostics.push(format!(
            "{} queries had no correct cross-camera match and were left out of the CMC",
            before.curve.dropped
        ));
    }
    manifest.param("queries", before.curve.query_count);
    manifest.param("dropped_queries", before.curve.dropped);

    let mut sep =
        String::from("scoring,intra_mean,inter_mean,ratio,intra_pairs,inter_pairs,note\n");
    separation_row(&mut sep, "appearance", &before.separation);
    if let Some(a) = &after {
        separation_row(&mut sep, "fused", &a.separation);
    }

    let mut w = Writer {
        dir: args.out_dir,
        manifest: &mut manifest,
        outcome: &mut outcome,
    };
    w.put(
        "cmc_appearance.csv",
        evaluation::export_cmc(&before.curve, true).as_bytes(),
    )?;
    w.put(
        "rankings_appearance.csv",
        fusion::rankings_csv(&before.rankings, args.top, correct).as_bytes(),
    )?;
    w.put(
        "heatmap_appearance.pgm",
        &evaluation::export_heatmap(&before.matrix)?,
    )?;
    if let Some(a) = &after {
        w.put(
            "cmc_fused.csv",
            evaluation::export_cmc(&a.curve, true).as_bytes(),
        )?;
        w.put(
            "rankings_fused.csv",
            fusion::rankings_csv(&a.rankings, args.top, correct).as_bytes(),
        )?;
        w.put("heatmap_fused.pgm", &evaluation::export_heatmap(&a.matrix)?)?;
        let ks: Vec<usize> = DEFAULT_KS.to_vec();
        let rows = evaluation::rank_k_table(&before.curve, &a.curve, &ks)?;
        w.put("rank_k.csv", evaluation::rank_k_csv(&rows).as_bytes())?;
    }
    w.put("separation.csv", sep.as_bytes())?;
    w.finish("manifest.json")?;
    Ok(outcome)
}

pub struct StatsArgs<'a> {
    pub input: &'a Path,
    pub out: &'a Path,
}

pub fn stats_csv(
    stats: &transition::EntryExitStats,
    trajectories: &[transition::Trajectory],
) -> String {
    let counts = transition::camera_counts(trajectories);
    let mut out = String::from("# per camera\ncamera,entries,exits,visits,observations\n");
    for (cam, (obs, visits)) in &counts {
        let ee = stats.per_camera.get(cam).copied().unwrap_or_default();
        writeln!(out, "{cam},{},{},{visits},{obs}", ee.entries, ee.exits).unwrap();
    }
    out.push_str("\n# per day and camera\nday,camera,entries,exits\n");
    for (day, cams) in &stats.per_day {
        for (cam, ee) in cams {
            writeln!(out, "{day},{cam},{},{}", ee.entries, ee.exits).unwrap();
        }
    }
    out.push_str("\n# per day\nday,entries,exits\n");
    for (day, ee) in stats.day_totals() {
        writeln!(out, "{day},{},{}", ee.entries, ee.exits).unwrap();
    }
    out
}

pub fn stats(args: &StatsArgs<'_>) -> Result<Outcome> {
    let mut manifest = RunManifest::new("stats");
    let data = load_dataset(args.input, &mut manifest)?;
    if data.is_empty() {
        return Err(Error::Degenerate(format!(
            "{} has no records",
            args.input.display()
        )));
    }
    data.check_labeled()?;
    let trajectories = transition::extract_trajectories(&data.observations);
    let stats = transition::entry_exit_stats(&trajectories)?;
    manifest.param("trajectories", trajectories.len());

    let mut outcome = Outcome::default();
    let mut w = Writer {
        dir: parent_dir(args.out),
        manifest: &mut manifest,
        outcome: &mut outcome,
    };
    w.put(
        &file_name(args.out)?,
        stats_csv(&stats, &trajectories).as_bytes(),
    )?;
    w.finish(&format!("{}.manifest.json", stem(args.out)))?;
    Ok(outcome)
}
