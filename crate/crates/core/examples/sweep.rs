//! Rank-1 before/after the transition prior over a range of seeds.
//!
//! `cargo run --release --example sweep -- [noise_sigma] [bias_sigma] [uniform|skewed] [identities] [alpha|truth] [split_ratio]`

use camreid::simulator::{self, Profile, SimConfig};
use camreid::{evaluation, fusion, transition, CameraGraph, TransitionModel};

fn main() -> camreid::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut base = SimConfig::default();
    if let Some(s) = args.first() {
        base.noise_sigma = s.parse().expect("noise_sigma");
    }
    if let Some(s) = args.get(1) {
        base.per_camera_bias_sigma = s.parse().expect("bias_sigma");
    }
    if args.get(2).map(String::as_str) == Some("uniform") {
        let complete = CameraGraph::complete(base.graph.cameras().to_vec())?;
        base = base.with_graph(complete, Profile::Uniform)?;
    }

    if let Some(s) = args.get(3) {
        base.identities = s.parse().expect("identities");
    }
    // `truth` scores with the generating matrix instead of an estimate.
    let use_truth = args.get(4).map(String::as_str) == Some("truth");
    let alpha: f64 = match args.get(4) {
        Some(s) if !use_truth => s.parse().expect("alpha"),
        _ => 0.0,
    };

    if let Some(s) = args.get(5) {
        base.split_ratio = s.parse().expect("split_ratio");
    }

    let mut deltas = Vec::new();
    for seed in 1..=10u64 {
        let cfg = SimConfig {
            seed,
            ..base.clone()
        };
        let world = simulator::simulate(&cfg)?;
        let (train, test) = simulator::split_identities(&world, cfg.split_ratio, seed)?;
        let model = TransitionModel::estimate(
            &cfg.graph,
            &transition::extract_trajectories(&train.observations),
            alpha,
        )?;
        let model = if use_truth {
            cfg.ground_truth.clone()
        } else {
            model
        };
        let split = fusion::QueryGallerySplit::all_vs_all(&test.observations);
        let labels = evaluation::label_lookup(&test.observations);
        let before = commands_mode(split, None, &labels)?;
        let after = commands_mode(split, Some(&model), &labels)?;
        let m0 = fusion::similarity_matrix(split, None)?;
        let m1 = fusion::similarity_matrix(split, Some(&model))?;
        let s0 = evaluation::separation(&m0, split)?;
        let s1 = evaluation::separation(&m1, split)?;
        println!(
            "seed {seed:2}: rank-1 {:.4} -> {:.4} ({})  separation {:.3} -> {:.3}",
            before,
            after,
            evaluation::format_percent(after - before),
            s0.ratio,
            s1.ratio
        );
        deltas.push(after - before);
    }
    println!(
        "mean delta {}",
        evaluation::format_percent(evaluation::mean(&deltas))
    );
    Ok(())
}

fn commands_mode(
    split: fusion::QueryGallerySplit<'_>,
    model: Option<&TransitionModel>,
    labels: &std::collections::HashMap<&str, &str>,
) -> camreid::Result<f64> {
    let curve = evaluation::cmc(&fusion::rank_all(split, model)?, labels)?;
    Ok(curve.accuracies[0])
}
