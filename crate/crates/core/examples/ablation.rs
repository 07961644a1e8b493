//! Trains the ablation variants on synthetic biased data and prints MAR
//! NDCG@20 per seed.
//!
//! `cargo run --release -p debias-core --example ablation -- [n_seeds] [spec.json] [config overrides]`

use debias_core::data::{generate_synthetic, SyntheticSpec};
use debias_core::eval::{evaluate_ranking, relevant_by_user};
use debias_core::optim::{train, Preset, TrainConfig, TrainData, Variant};
use debias_core::InteractionGraph;

fn main() -> debias_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n_seeds: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let base_spec: SyntheticSpec = match args.get(2) {
        Some(s) => serde_json::from_str(s)?,
        None => SyntheticSpec::default(),
    };
    let mut base = TrainConfig::preset(Preset::Synthetic);
    for a in args.iter().skip(3) {
        let (k, v) = debias_core::optim::config::parse_assignment(a)?;
        let mut t = toml::Table::new();
        t.insert(k, v);
        base = base.merge(&t)?;
    }
    let variants = [Variant::AdvDrop, Variant::NoPb, Variant::NoPbNoInv, Variant::LightGcn];
    for seed in 0..n_seeds {
        let mut ds = generate_synthetic(&SyntheticSpec { seed, ..base_spec.clone() })?;
        ds.ensure_validation(0.1, seed)?;
        let graph = InteractionGraph::build(ds.n_users, ds.n_items, &ds.train)?;
        let data = TrainData {
            validation: relevant_by_user(ds.n_users, &ds.validation),
            graph: graph.clone(),
            attributes: Vec::new(),
        };
        let test = relevant_by_user(ds.n_users, &ds.test);
        let mut line = format!("seed {seed}:");
        for v in variants {
            let config = v.apply(&TrainConfig { seed, ..base.clone() });
            let out = train(config, data.clone())?;
            let reps = out.model.infer(&graph.normalize())?;
            let m = evaluate_ranking(&reps, &graph, &test, &[20])?;
            if v == Variant::AdvDrop {
                let p = out.head.probabilities(&out.model, &graph)?;
                let groups = debias_core::eval::popularity_groups(&graph, 4)?;
                let means = debias_core::eval::group_means(&graph, &p, &groups);
                let noise: std::collections::BTreeSet<_> =
                    ds.ground_truth.as_ref().unwrap().noise_interactions.iter().copied().collect();
                let (mut pn, mut nn, mut pc, mut nc) = (0.0, 0, 0.0, 0);
                for (e, &(u, i)) in graph.edges().iter().enumerate() {
                    if noise.contains(&(u, i)) {
                        pn += p[e];
                        nn += 1;
                    } else {
                        pc += p[e];
                        nc += 1;
                    }
                }
                let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(99);
                let half = vec![0.5; p.len()];
                let (mut l_learned, mut l_half) = (0.0, 0.0);
                for _ in 0..50 {
                    let c = debias_core::losses::ContrastBatch::sample(ds.n_users, ds.n_items, 100, 0.1, &mut rng)?;
                    let m = debias_core::bias::sample_masks(&p, &mut rng);
                    l_learned += debias_core::optim::invariance_loss(&out.model, &graph, &m, &c)?;
                    let m = debias_core::bias::sample_masks(&half, &mut rng);
                    l_half += debias_core::optim::invariance_loss(&out.model, &graph, &m, &c)?;
                }
                println!("  invariance loss: learned head {:.3}, P_B = 0.5 {:.3}", l_learned / 50.0, l_half / 50.0);
                println!(
                    "  P_B by quartile {:?}; noise {:.3} clean {:.3}",
                    means.iter().map(|m| format!("{:.3}", m.unwrap_or(f64::NAN))).collect::<Vec<_>>(),
                    pn / nn.max(1) as f64,
                    pc / nc.max(1) as f64
                );
            }
            line.push_str(&format!(
                " {}={:.4} (r{} val {:.4})",
                v.name(),
                m.ndcg(20).unwrap(),
                out.rounds_run,
                out.best_val_ndcg.unwrap_or(f64::NAN)
            ));
        }
        println!("{line}");
    }
    Ok(())
}
