//! Acceptance checks, one line per criterion.
//!
//! `cargo test -p camreid --test acceptance` prints `PASS` or `FAIL` for each
//! criterion with the measured numbers, and exits nonzero if any fails.

use std::collections::HashMap;
use std::path::Path;
use std::time::{Duration, Instant};

use camreid::commands::{self, EstimateArgs, EvaluateArgs, SimulateArgs};
use camreid::evaluation::{self, CmcCurve};
use camreid::fusion::{self, QueryGallerySplit, RankingResult};
use camreid::simulator::{self, Profile, SimConfig};
use camreid::transition::{self, TransitionModel};
use camreid::{rng, sim_app, CameraGraph, CameraId, Dataset, Embedding, Observation, Shape};
use rand::seq::IndexedRandom;
use rand::Rng;

type Check = (&'static str, Duration, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [Check; 9] = [
        (
            "improvement-delta arithmetic",
            Duration::from_secs(1),
            delta_arithmetic,
        ),
        (
            "fusion improves ranking",
            Duration::from_secs(60),
            fusion_improves,
        ),
        (
            "uninformative prior",
            Duration::from_secs(60),
            uninformative_prior,
        ),
        (
            "cmc oracle equivalence",
            Duration::from_secs(30),
            cmc_oracle,
        ),
        ("row-stochasticity", Duration::MAX, row_stochastic),
        ("transition recovery", Duration::MAX, transition_recovery),
        ("invariance suite", Duration::MAX, invariances),
        ("determinism", Duration::MAX, determinism),
        ("separation direction", Duration::MAX, separation_direction),
    ];
    let mut failed = 0;
    for (n, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let took = start.elapsed();
        let in_time = took <= *budget;
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if *budget == Duration::MAX {
            format!("{:.2}s", took.as_secs_f64())
        } else {
            format!("{:.2}s of {}s", took.as_secs_f64(), budget.as_secs())
        };
        println!(
            "{} {}. {name}: {} [{timing}]",
            if pass { "PASS" } else { "FAIL" },
            n + 1,
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

// 1 -------------------------------------------------------------------------

/// Curve holding `values` at ranks 1, 5, 10, 15, flat in between.
fn step_curve(values: [f64; 4]) -> CmcCurve {
    let mut accuracies = Vec::with_capacity(15);
    for k in 1..=15usize {
        let slot = match k {
            1..=4 => 0,
            5..=9 => 1,
            10..=14 => 2,
            _ => 3,
        };
        accuracies.push(values[slot]);
    }
    CmcCurve {
        accuracies,
        query_count: 10_000,
        dropped: 0,
    }
}

fn delta_arithmetic() -> Verdict {
    // Published before/after CMC values at ranks 1, 5, 10, 15 per day.
    let days = [
        (
            [0.7907, 0.8959, 0.9242, 0.9388],
            [0.8679, 0.9211, 0.9352, 0.9421],
        ),
        (
            [0.7024, 0.8574, 0.8972, 0.9147],
            [0.7845, 0.8947, 0.9245, 0.9354],
        ),
        (
            [0.7803, 0.9438, 0.9625, 0.9686],
            [0.8465, 0.9323, 0.9595, 0.9702],
        ),
        (
            [0.8567, 0.9280, 0.9481, 0.9603],
            [0.8589, 0.9226, 0.9402, 0.9495],
        ),
    ];
    let expected_rank1 = [0.0772, 0.0821, 0.0662, 0.0022];
    let expected_text = ["+7.72%", "+8.21%", "+6.62%", "+0.22%"];

    let mut ok = true;
    let mut rank1 = Vec::new();
    for (d, (before, after)) in days.iter().enumerate() {
        let rows = match evaluation::rank_k_table(
            &step_curve(*before),
            &step_curve(*after),
            &evaluation::DEFAULT_KS,
        ) {
            Ok(rows) => rows,
            Err(e) => return verdict(false, format!("rank_k_table failed: {e}")),
        };
        for (row, (b, a)) in rows.iter().zip(before.iter().zip(after)) {
            // every cut-off, against a difference taken here
            ok &= evaluation::round_to(row.delta, 4) == evaluation::round_to(a - b, 4);
        }
        ok &= evaluation::round_to(rows[0].delta, 4) == expected_rank1[d];
        ok &= evaluation::format_percent(rows[0].delta) == expected_text[d];
        rank1.push(rows[0].delta);
    }
    let mean = evaluation::mean(&rank1);
    ok &= evaluation::round_to(mean, 4) == 0.0569;
    ok &= (mean - 0.056925).abs() < 1e-12;
    let text = evaluation::format_percent(mean);
    ok &= text == "+5.69%";
    let shown: Vec<String> = rank1.iter().map(|d| format!("{d:.4}")).collect();
    verdict(
        ok,
        format!("rank-1 deltas {} mean {mean:.6} ({text})", shown.join(" ")),
    )
}

// 2, 3, 9 -----------------------------------------------------------------

struct Paired {
    before_rank1: f64,
    after_rank1: f64,
    before_ratio: f64,
    after_ratio: f64,
}

/// Simulate, split, estimate on train with alpha = 0, score test all-vs-all.
fn paired_run(cfg: &SimConfig) -> camreid::Result<Paired> {
    let world = simulator::simulate(cfg)?;
    let (train, test) = simulator::split_identities(&world, cfg.split_ratio, cfg.seed)?;
    let model = TransitionModel::estimate(
        &cfg.graph,
        &transition::extract_trajectories(&train.observations),
        0.0,
    )?;
    let before = commands::evaluate_mode(&test, None)?;
    let after = commands::evaluate_mode(&test, Some(&model))?;
    Ok(Paired {
        before_rank1: before.curve.accuracies[0],
        after_rank1: after.curve.accuracies[0],
        before_ratio: before.separation?.ratio,
        after_ratio: after.separation?.ratio,
    })
}

const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

fn default_runs() -> camreid::Result<Vec<Paired>> {
    SEEDS
        .map(|seed| {
            paired_run(&SimConfig {
                seed,
                ..SimConfig::default()
            })
        })
        .collect()
}

fn fusion_improves() -> Verdict {
    let base = SimConfig::default();
    if base.identities < 120 || !matches!(base.profile, Profile::Skewed(_)) {
        return verdict(
            false,
            "default scenario is not skewed with >= 120 identities",
        );
    }
    let runs = match default_runs() {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("run failed: {e}")),
    };
    let in_band = runs.iter().all(|r| (0.60..=0.90).contains(&r.before_rank1));
    let wins = runs
        .iter()
        .filter(|r| r.after_rank1 >= r.before_rank1)
        .count();
    let deltas: Vec<f64> = runs
        .iter()
        .map(|r| r.after_rank1 - r.before_rank1)
        .collect();
    let mean = evaluation::mean(&deltas);
    let lo = runs
        .iter()
        .map(|r| r.before_rank1)
        .fold(f64::INFINITY, f64::min);
    let hi = runs
        .iter()
        .map(|r| r.before_rank1)
        .fold(f64::NEG_INFINITY, f64::max);
    verdict(
        in_band && wins >= 8 && mean > 0.0,
        format!(
            "appearance rank-1 in [{lo:.4}, {hi:.4}], fused >= appearance in {wins}/10 seeds, mean delta {}",
            evaluation::format_percent(mean)
        ),
    )
}

fn uninformative_prior() -> Verdict {
    // Uniform rows on a complete graph, with enough training identities
    // that the estimated rows are close to the uniform ground truth.
    let base = SimConfig::default();
    let complete = CameraGraph::complete(base.graph.cameras().to_vec()).unwrap();
    let mut base = base.with_graph(complete, Profile::Uniform).unwrap();
    base.identities = 1024;
    base.split_ratio = 0.975;
    let runs: camreid::Result<Vec<Paired>> = SEEDS
        .map(|seed| {
            paired_run(&SimConfig {
                seed,
                ..base.clone()
            })
        })
        .collect();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("run failed: {e}")),
    };
    let deltas: Vec<f64> = runs
        .iter()
        .map(|r| r.after_rank1 - r.before_rank1)
        .collect();
    let mean = evaluation::mean(&deltas);
    verdict(
        mean.abs() <= 0.03,
        format!("mean delta {mean:+.4} over 10 seeds (bound 0.03)"),
    )
}

fn separation_direction() -> Verdict {
    let runs = match default_runs() {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("run failed: {e}")),
    };
    let up = runs
        .iter()
        .filter(|r| r.after_ratio >= r.before_ratio)
        .count();
    let mean_before = evaluation::mean(&runs.iter().map(|r| r.before_ratio).collect::<Vec<_>>());
    let mean_after = evaluation::mean(&runs.iter().map(|r| r.after_ratio).collect::<Vec<_>>());
    verdict(
        up >= 8,
        format!("ratio rose in {up}/10 seeds (mean {mean_before:.3} -> {mean_after:.3})"),
    )
}

// 4 -------------------------------------------------------------------------

fn cam(i: usize) -> CameraId {
    CameraId::new(format!("K{i}")).unwrap()
}

fn random_graph(rng: &mut impl Rng, n: usize) -> CameraGraph {
    let mut g = CameraGraph::new();
    for i in 0..n {
        g.add_camera(cam(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.5) {
                g.add_edge(cam(i), cam(j)).unwrap();
            }
        }
    }
    g
}

/// Observations drawn from a small pool of embeddings so that exact score
/// ties are common.
fn random_instance(rng: &mut impl Rng, cameras: usize) -> Vec<Observation> {
    let shape = Shape::new(2, 3);
    let pool: Vec<Embedding> = (0..rng.random_range(2..=12))
        .map(|_| {
            let raw: Vec<f64> = (0..shape.len())
                .map(|_| f64::from(rng.random_range(-3i32..=3)) + 0.5)
                .collect();
            Embedding::normalize_parts(shape, &raw).unwrap()
        })
        .collect();
    let n = rng.random_range(2..=200usize);
    let people = rng.random_range(1..=10usize);
    let mut obs: Vec<Observation> = (0..n)
        .map(|i| Observation {
            obs_id: format!("o{:03}", rng.random_range(0..1000) * 1000 + i),
            person_id: Some(format!("p{}", rng.random_range(0..people))),
            camera: cam(rng.random_range(0..cameras)),
            timestamp: i as f64,
            embedding: pool.choose(rng).unwrap().clone(),
        })
        .collect();
    // every query needs at least one other-camera gallery item
    obs[0].camera = cam(0);
    obs[1].camera = cam(1);
    obs
}

/// Brute force: a gallery item's rank is one plus the number of included
/// items that beat it; the first correct rank is the minimum over correct
/// items. Scores come from `score`, computed independently of the ranking.
fn oracle_cmc(
    obs: &[Observation],
    score: impl Fn(&Observation, &Observation) -> f64,
) -> Option<(Vec<f64>, usize, usize)> {
    let mut first_ranks = Vec::new();
    let mut depth = 0;
    let mut dropped = 0;
    for q in obs {
        let gallery: Vec<(&Observation, f64)> = obs
            .iter()
            .filter(|g| g.camera != q.camera && g.obs_id != q.obs_id)
            .map(|g| (g, score(q, g)))
            .collect();
        let beats = |a: &(&Observation, f64), b: &(&Observation, f64)| {
            a.1 > b.1 || (a.1 == b.1 && a.0.obs_id < b.0.obs_id)
        };
        let best = gallery
            .iter()
            .filter(|c| c.0.person_id == q.person_id)
            .map(|c| 1 + gallery.iter().filter(|o| beats(o, c)).count())
            .min();
        match best {
            Some(r) => {
                first_ranks.push(r);
                depth = depth.max(gallery.len());
            }
            None => dropped += 1,
        }
    }
    if first_ranks.is_empty() {
        return None;
    }
    let acc = (1..=depth)
        .map(|k| first_ranks.iter().filter(|&&r| r <= k).count() as f64 / first_ranks.len() as f64)
        .collect();
    Some((acc, first_ranks.len(), dropped))
}

fn cmc_oracle() -> Verdict {
    let mut rng = rng::stream(4, 0);
    let mut mismatches = 0;
    let mut fused_instances = 0;
    let mut empty = 0;
    for instance in 0..100 {
        let cameras = rng.random_range(2..=5usize);
        let obs = random_instance(&mut rng, cameras);
        let labels = evaluation::label_lookup(&obs);
        let split = QueryGallerySplit::all_vs_all(&obs);

        let model = if instance % 2 == 1 {
            let graph = random_graph(&mut rng, cameras);
            let counts: Vec<u64> = (0..cameras * cameras)
                .map(|_| rng.random_range(0..4))
                .collect();
            let alpha = if rng.random_bool(0.5) { 0.0 } else { 0.5 };
            let m = TransitionModel::from_counts(&graph, counts, alpha, Vec::new()).unwrap();
            // rows must be defined for every camera that issues queries
            if (0..cameras).all(|i| m.is_row_defined(i)) {
                fused_instances += 1;
                Some(m)
            } else {
                None
            }
        } else {
            None
        };

        let expected = oracle_cmc(&obs, |q, g| {
            let app = sim_app(&q.embedding, &g.embedding).unwrap();
            match &model {
                None => app,
                Some(m) => match m.prob(&q.camera, &g.camera).unwrap() {
                    Some(p) => app.max(0.0) * p,
                    None => 0.0,
                },
            }
        });
        let got =
            fusion::rank_all(split, model.as_ref()).and_then(|r| evaluation::cmc(&r, &labels));
        match (expected, got) {
            (Some((acc, kept, dropped)), Ok(curve)) => {
                if curve.accuracies != acc || curve.query_count != kept || curve.dropped != dropped
                {
                    mismatches += 1;
                }
            }
            (None, Err(camreid::Error::NoRetainedQueries)) => empty += 1,
            _ => mismatches += 1,
        }
    }
    verdict(
        mismatches == 0,
        format!(
            "{mismatches} mismatches over 100 instances ({fused_instances} fused, {empty} with no retained query)"
        ),
    )
}

// 5 -------------------------------------------------------------------------

fn row_stochastic() -> Verdict {
    let mut rng = rng::stream(5, 0);
    let mut worst = 0.0f64;
    let mut rows = 0usize;
    let mut wrongly_undefined = 0usize;
    for config in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let graph = random_graph(&mut rng, n);
        let sparse = rng.random_bool(0.3);
        let counts: Vec<u64> = (0..n * n)
            .map(|_| {
                if sparse && rng.random_bool(0.7) {
                    0
                } else {
                    rng.random_range(0..1000)
                }
            })
            .collect();
        let alpha = if config % 2 == 0 {
            0.0
        } else {
            rng.random_range(0.0..5.0)
        };
        let model =
            TransitionModel::from_counts(&graph, counts.clone(), alpha, Vec::new()).unwrap();
        for i in 0..n {
            let nbrs = graph.neighbor_indices(i);
            let support: u64 = nbrs.iter().map(|&j| counts[i * n + j]).sum();
            let should_define = !nbrs.is_empty() && (support > 0 || alpha > 0.0);
            if model.is_row_defined(i) != should_define {
                wrongly_undefined += 1;
            }
            if let Some(row) = model.row(i) {
                rows += 1;
                let sum: f64 = row.iter().map(|(_, p)| p).sum();
                worst = worst.max((sum - 1.0).abs());
            }
        }
    }
    verdict(
        worst <= 1e-9 && wrongly_undefined == 0,
        format!("{rows} defined rows, max |sum - 1| = {worst:.2e}, {wrongly_undefined} rows with wrong definedness"),
    )
}

// 6 -------------------------------------------------------------------------

fn transition_recovery() -> Verdict {
    let cfg = SimConfig {
        seed: 6,
        identities: 1500,
        ..SimConfig::default()
    };
    let world = simulator::simulate(&cfg).unwrap();
    let transitions: usize = world.trajectories.iter().map(|t| t.visits.len() - 1).sum();
    let est = TransitionModel::estimate(&cfg.graph, &world.trajectories, 0.0).unwrap();
    let truth = &cfg.ground_truth;
    let n = cfg.graph.len();
    let mut worst = 0.0f64;
    let mut defined = 0;
    for i in 0..n {
        if !est.is_row_defined(i) {
            continue;
        }
        defined += 1;
        for j in 0..n {
            let a = est.prob_by_index(i, j).unwrap().unwrap_or(0.0);
            let b = truth.prob_by_index(i, j).unwrap().unwrap_or(0.0);
            worst = worst.max((a - b).abs());
        }
    }
    verdict(
        transitions >= 2000 && worst <= 0.05,
        format!("{transitions} transitions, {defined} defined rows, L-inf error {worst:.4} (bound 0.05)"),
    )
}

// 7 -------------------------------------------------------------------------

type Scorer<'a> = dyn Fn(&Observation, &Observation) -> f64 + 'a;

fn same_order(a: &[RankingResult], b: &[RankingResult]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.query == y.query
                && x.matches.len() == y.matches.len()
                && x.matches
                    .iter()
                    .zip(&y.matches)
                    .all(|(m, n)| m.obs_id == n.obs_id)
        })
}

fn invariances() -> Verdict {
    let cfg = SimConfig {
        seed: 7,
        ..SimConfig::default()
    };
    let world = simulator::simulate(&cfg).unwrap();
    let (train, test) = simulator::split_identities(&world, cfg.split_ratio, cfg.seed).unwrap();
    let model = TransitionModel::estimate(
        &cfg.graph,
        &transition::extract_trajectories(&train.observations),
        0.0,
    )
    .unwrap();
    let obs = &test.observations;
    let split = QueryGallerySplit::all_vs_all(obs);
    let labels = evaluation::label_lookup(obs);
    let mut failures = Vec::new();

    // bitwise symmetry
    let mut asymmetric = 0;
    for (i, a) in obs.iter().enumerate() {
        for b in &obs[i..] {
            let ab = sim_app(&a.embedding, &b.embedding).unwrap();
            let ba = sim_app(&b.embedding, &a.embedding).unwrap();
            if ab.to_bits() != ba.to_bits() {
                asymmetric += 1;
            }
        }
    }
    if asymmetric > 0 {
        failures.push(format!("{asymmetric} asymmetric pairs"));
    }

    // strictly increasing transforms of the appearance score
    let base = fusion::rank_all(split, None).unwrap();
    let base_cmc = evaluation::cmc(&base, &labels).unwrap();
    let by_score = |f: &dyn Fn(&Observation, &Observation) -> f64| -> Vec<RankingResult> {
        obs.iter()
            .map(|q| fusion::rank_by(q, obs, |q, g| Ok(f(q, g))).unwrap())
            .collect()
    };
    let app = |q: &Observation, g: &Observation| sim_app(&q.embedding, &g.embedding).unwrap();
    let transforms: [(&str, Box<Scorer<'_>>); 4] = [
        ("x36", Box::new(|q, g| 36.0 * app(q, g))),
        // literal form: raw dot product over squared norms of both inputs
        (
            "literal",
            Box::new(|q, g| {
                let n2 = q.embedding.norm() * q.embedding.norm();
                q.embedding.dot(&g.embedding).unwrap() / (n2 * n2)
            }),
        ),
        ("exp", Box::new(|q, g| app(q, g).exp())),
        ("cube", Box::new(|q, g| app(q, g).powi(3) + 2.0 * app(q, g))),
    ];
    for (name, f) in &transforms {
        let ranked = by_score(f.as_ref());
        let curve = evaluation::cmc(&ranked, &labels).unwrap();
        if curve != base_cmc || !same_order(&ranked, &base) {
            failures.push(format!("{name} changed the ranking"));
        }
    }
    let fused = fusion::rank_all(split, Some(&model)).unwrap();
    let fused_x36: Vec<RankingResult> = obs
        .iter()
        .map(|q| {
            fusion::rank_by(q, obs, |q, g| {
                Ok(36.0 * fusion::pair_score(q, g, Some(&model))?)
            })
            .unwrap()
        })
        .collect();
    if evaluation::cmc(&fused, &labels).unwrap() != evaluation::cmc(&fused_x36, &labels).unwrap() {
        failures.push("x36 changed the fused CMC".into());
    }

    // same-camera and self exclusion in every ranking
    let by_id: HashMap<&str, &Observation> = obs.iter().map(|o| (o.obs_id.as_str(), o)).collect();
    let mut leaked = 0;
    for r in base.iter().chain(&fused) {
        let q = by_id[r.query.as_str()];
        leaked += r
            .matches
            .iter()
            .filter(|m| m.obs_id == q.obs_id || by_id[m.obs_id.as_str()].camera == q.camera)
            .count();
    }
    if leaked > 0 {
        failures.push(format!("{leaked} same-camera matches"));
    }

    // fused never exceeds clamped appearance
    let mut scored = 0usize;
    let mut over = 0usize;
    for q in obs {
        for g in obs.iter().filter(|g| fusion::is_included(q, g)) {
            scored += 1;
            let f = fusion::pair_score(q, g, Some(&model)).unwrap();
            if f > app(q, g).max(0.0) {
                over += 1;
            }
        }
    }
    if over > 0 {
        failures.push(format!("{over} fused scores above clamped appearance"));
    }

    let detail = if failures.is_empty() {
        format!(
            "symmetric, 4 transforms + fused x36 order-preserving, {} rankings exclusive, {scored} pairs suppressed",
            base.len() + fused.len()
        )
    } else {
        failures.join("; ")
    };
    verdict(failures.is_empty(), detail)
}

// 8 -------------------------------------------------------------------------

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let config = root.join("scenario.cfg");
    std::fs::write(&config, SimConfig::default().to_config_string()).unwrap();

    let sim_runs = [(Some(1usize), "s1"), (Some(4), "s4"), (Some(4), "s4b")];
    for (threads, name) in sim_runs {
        let dir = root.join(name);
        std::fs::create_dir(&dir).unwrap();
        commands::simulate(&SimulateArgs {
            config: &config,
            out: &dir.join("world.ndjson"),
            seed: Some(8),
            threads,
        })
        .unwrap();
    }
    let sims: Vec<_> = sim_runs
        .iter()
        .map(|(_, n)| snapshot(&root.join(n)))
        .collect();
    let sim_same = sims.windows(2).all(|w| w[0] == w[1]);

    let s1 = root.join("s1");
    let truth = root.join("est.csv");
    commands::estimate(&EstimateArgs {
        graph: &s1.join("world.graph.txt"),
        train: &s1.join("world.train.ndjson"),
        alpha: 0.0,
        out: &truth,
    })
    .unwrap();
    let eval_runs = [(Some(1usize), "e1"), (Some(4), "e4"), (Some(4), "e4b")];
    for (threads, name) in eval_runs {
        commands::evaluate(&EvaluateArgs {
            graph: &s1.join("world.graph.txt"),
            test: &s1.join("world.test.ndjson"),
            transitions: Some(&truth),
            out_dir: &root.join(name),
            top: Some(10),
            threads,
        })
        .unwrap();
    }
    let evals: Vec<_> = eval_runs
        .iter()
        .map(|(_, n)| snapshot(&root.join(n)))
        .collect();
    let eval_same = evals.windows(2).all(|w| w[0] == w[1]);

    // the library entry point must not depend on pool size either
    let test =
        Dataset::from_ndjson_str(&std::fs::read_to_string(s1.join("world.test.ndjson")).unwrap())
            .unwrap();
    let ranked = |n| {
        commands::with_threads(Some(n), || {
            fusion::rank_all(QueryGallerySplit::all_vs_all(&test.observations), None).unwrap()
        })
        .unwrap()
    };
    let lib_same = ranked(1) == ranked(4);

    verdict(
        sim_same && eval_same && lib_same,
        format!(
            "simulate {} files {}, evaluate {} files {}, rank_all {}",
            sims[0].len(),
            if sim_same { "identical" } else { "differ" },
            evals[0].len(),
            if eval_same { "identical" } else { "differ" },
            if lib_same { "identical" } else { "differs" },
        ),
    )
}
