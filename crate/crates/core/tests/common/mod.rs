//! Reference implementations used as oracles by the integration tests.
//! Everything here is written independently of the library code it checks.
#![allow(dead_code)]

use debias_core::bias::sigmoid;
use debias_core::eval::{evaluate_ranking, relevant_by_user};
use debias_core::losses::ContrastBatch;
use debias_core::optim::{invariance_loss, train, TrainConfig, TrainData};
use debias_core::{Dataset, EmbeddingModel, InteractionGraph, MaskPair};
use ndarray::Array2;
use rand::Rng;

/// Central differences of `f` at `x`.
pub fn numeric_grad(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|k| {
            let orig = x[k];
            x[k] = orig + h;
            let up = f(&x);
            x[k] = orig - h;
            let down = f(&x);
            x[k] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `|a - n| / (|a| + |n|)` in the Euclidean norm; zero when both vanish.
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(numeric).map(|(a, n)| a - n).collect();
    let scale = norm(analytic) + norm(numeric);
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Random bipartite graph where every user has at least one edge and at least
/// one unobserved item.
pub fn random_graph<R: Rng>(n_users: usize, n_items: usize, density: f64, rng: &mut R) -> InteractionGraph {
    let mut edges = Vec::new();
    for u in 0..n_users {
        let mut row: Vec<usize> = (0..n_items).filter(|_| rng.random::<f64>() < density).collect();
        if row.is_empty() {
            row.push(rng.random_range(0..n_items));
        }
        if row.len() == n_items {
            row.pop();
        }
        edges.extend(row.into_iter().map(|i| (u, i)));
    }
    InteractionGraph::build(n_users, n_items, &edges).unwrap()
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-1.0..1.0))
}

/// Every assignment of `n` bits, as bool vectors.
pub fn all_bit_vectors(n: usize) -> Vec<Vec<bool>> {
    (0..1u32 << n)
        .map(|code| (0..n).map(|b| code >> b & 1 == 1).collect())
        .collect()
}

/// Exact `E[f(M)]` and its gradient w.r.t. the logits, where
/// `M+_e ~ Bern(sigmoid(phi_e))` and `M-_e ~ Bern(1 - sigmoid(phi_e))`,
/// enumerating all `4^n` mask pairs.
pub fn enumerate_expectation(phi: &[f64], mut f: impl FnMut(&MaskPair) -> f64) -> (f64, Vec<f64>) {
    let n = phi.len();
    let p: Vec<f64> = phi.iter().map(|&x| sigmoid(x)).collect();
    let configs = all_bit_vectors(n);
    let mut value = 0.0;
    let mut grad = vec![0.0; n];
    for plus in &configs {
        for minus in &configs {
            let mut prob = 1.0;
            for e in 0..n {
                prob *= if plus[e] { p[e] } else { 1.0 - p[e] };
                prob *= if minus[e] { 1.0 - p[e] } else { p[e] };
            }
            let masks = MaskPair::new(plus.clone(), minus.clone()).unwrap();
            let loss = f(&masks);
            value += prob * loss;
            // d log P / d phi_e for plus ~ Bern(p), minus ~ Bern(1 - p)
            for e in 0..n {
                let score_plus = if plus[e] { 1.0 - p[e] } else { -p[e] };
                let score_minus = if minus[e] { -p[e] } else { 1.0 - p[e] };
                grad[e] += prob * loss * (score_plus + score_minus);
            }
        }
    }
    (value, grad)
}

/// Exact expected invariance loss over the views of a fixed toy instance.
pub fn expected_invariance(
    model: &EmbeddingModel,
    graph: &InteractionGraph,
    contrast: &ContrastBatch,
    phi: &[f64],
) -> (f64, Vec<f64>) {
    enumerate_expectation(phi, |m| invariance_loss(model, graph, m, contrast).unwrap())
}

/// NDCG@K straight from the definition: rank by counting better-scored
/// candidates, ideal DCG by trying every ordering of the candidates.
pub fn brute_ndcg(scores: &[f64], exclude: &[usize], relevant: &[usize], k: usize) -> f64 {
    let candidates: Vec<usize> = (0..scores.len()).filter(|i| !exclude.contains(i)).collect();
    let rank_of = |i: usize| {
        1 + candidates
            .iter()
            .filter(|&&j| scores[j] > scores[i] || (scores[j] == scores[i] && j < i))
            .count()
    };
    let mut by_rank: Vec<(usize, usize)> = candidates.iter().map(|&i| (rank_of(i), i)).collect();
    by_rank.sort();
    let dcg_of = |order: &[usize]| -> f64 {
        let mut total = 0.0;
        for (pos, item) in order.iter().enumerate() {
            let rank = pos + 1;
            if rank <= k && relevant.contains(item) {
                total += 1.0 / (rank as f64 + 1.0).log2();
            }
        }
        total
    };
    let order: Vec<usize> = by_rank.iter().map(|&(_, i)| i).collect();
    let dcg = dcg_of(&order);
    let mut best = 0.0f64;
    for perm in permutations(&candidates) {
        best = best.max(dcg_of(&perm));
    }
    dcg / best
}

pub fn brute_recall(scores: &[f64], exclude: &[usize], relevant: &[usize], k: usize) -> f64 {
    let candidates: Vec<usize> = (0..scores.len()).filter(|i| !exclude.contains(i)).collect();
    let hits = relevant
        .iter()
        .filter(|&&r| {
            !exclude.contains(&r) && {
                let better = candidates
                    .iter()
                    .filter(|&&j| scores[j] > scores[r] || (scores[j] == scores[r] && j < r))
                    .count();
                better < k
            }
        })
        .count();
    hits as f64 / relevant.len() as f64
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (idx, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(idx);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Prediction bias by explicit loops over every pair of labels.
/// `labels[n]` labels the rows (users) when `user_side`, else the columns.
pub fn brute_prediction_bias(scores: &Array2<f64>, labels: &[Option<usize>], n_labels: usize, user_side: bool) -> f64 {
    let (n_other, get): (usize, Box<dyn Fn(usize, usize) -> f64>) = if user_side {
        (scores.ncols(), Box::new(|node, o| scores[[node, o]]))
    } else {
        (scores.nrows(), Box::new(|node, o| scores[[o, node]]))
    };
    let mut total = 0.0;
    for o in 0..n_other {
        let mut avg = vec![None; n_labels];
        for (a, slot) in avg.iter_mut().enumerate() {
            let mut sum = 0.0;
            let mut count = 0;
            for (node, l) in labels.iter().enumerate() {
                if *l == Some(a) {
                    sum += get(node, o);
                    count += 1;
                }
            }
            if count > 0 {
                *slot = Some(sum / count as f64);
            }
        }
        let mut worst = 0.0f64;
        for a1 in 0..n_labels {
            for a2 in 0..n_labels {
                if let (Some(x), Some(y)) = (avg[a1], avg[a2]) {
                    worst = worst.max(x - y);
                }
            }
        }
        total += worst;
    }
    total / n_other as f64
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Gini coefficient of nonnegative counts (mean absolute difference form).
pub fn gini(counts: &[f64]) -> f64 {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let mut abs_diff = 0.0;
    for a in counts {
        for b in counts {
            abs_diff += (a - b).abs();
        }
    }
    abs_diff / (2.0 * n * n * mean)
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start;
        while end + 1 < idx.len() && x[idx[end + 1]] == x[idx[start]] {
            end += 1;
        }
        let r = (start + end) as f64 / 2.0 + 1.0;
        for &k in &idx[start..=end] {
            ranks[k] = r;
        }
        start = end + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Training inputs for a dataset whose validation split is already carved.
pub fn train_data(ds: &Dataset) -> TrainData {
    TrainData {
        graph: InteractionGraph::build(ds.n_users, ds.n_items, &ds.train).unwrap(),
        validation: relevant_by_user(ds.n_users, &ds.validation),
        attributes: ds.attributes.clone(),
    }
}

/// Trains and scores NDCG@`k` on the test split with the undropped graph.
pub fn test_ndcg(config: TrainConfig, data: &TrainData, test: &[(usize, usize)], k: usize) -> f64 {
    let out = train(config, data.clone()).unwrap();
    let reps = out.model.infer(&data.graph.normalize()).unwrap();
    let relevant = relevant_by_user(data.graph.n_users(), test);
    evaluate_ranking(&reps, &data.graph, &relevant, &[k]).unwrap().ndcg(k).unwrap()
}

pub mod gradcheck {
    //! One random instance per call; each returns the relative error between
    //! the analytic gradient and central differences.

    use super::*;
    use debias_core::bias::BiasHead;
    use debias_core::losses::{bpr_on_view, infonce_loss, TripletBatch};
    use debias_core::model::propagate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = 1e-6;

    struct Instance {
        graph: InteractionGraph,
        layer0: Array2<f64>,
        n_layers: usize,
        rng: ChaCha8Rng,
    }

    fn instance(seed: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_users = rng.random_range(2..5);
        let n_items = rng.random_range(3..6);
        let dim = rng.random_range(2..5);
        let n_layers = rng.random_range(1..4);
        let graph = random_graph(n_users, n_items, 0.5, &mut rng);
        let layer0 = random_matrix(n_users + n_items, dim, &mut rng);
        Instance {
            graph,
            layer0,
            n_layers,
            rng,
        }
    }

    fn reshape(x: &[f64], like: &Array2<f64>) -> Array2<f64> {
        Array2::from_shape_vec(like.dim(), x.to_vec()).unwrap()
    }

    fn flat(a: &Array2<f64>) -> Vec<f64> {
        a.iter().copied().collect()
    }

    /// Linear functional of the readout, differentiated w.r.t. layer 0.
    pub fn propagation(seed: u64) -> f64 {
        let mut inst = instance(seed);
        let adj = inst.graph.normalize();
        let weights = random_matrix(inst.layer0.nrows(), inst.layer0.ncols(), &mut inst.rng);
        let n_users = inst.graph.n_users();
        let f = |x: &[f64]| {
            let z = propagate(&reshape(x, &inst.layer0), inst.n_layers, &adj).unwrap().readout(n_users);
            (z.matrix() * &weights).sum()
        };
        let trace = propagate(&inst.layer0, inst.n_layers, &adj).unwrap();
        let analytic = trace.backward(&weights).unwrap();
        relative_error(&flat(&analytic), &numeric_grad(&flat(&inst.layer0), H, f))
    }

    pub fn bpr(seed: u64) -> f64 {
        let mut inst = instance(seed);
        let adj = inst.graph.normalize();
        let edges: Vec<usize> = (0..inst.graph.n_edges()).collect();
        let batch = TripletBatch::sample(&inst.graph, &edges, &mut inst.rng).unwrap();
        let n_users = inst.graph.n_users();
        let f = |x: &[f64]| {
            let z = propagate(&reshape(x, &inst.layer0), inst.n_layers, &adj).unwrap().readout(n_users);
            bpr_on_view(&z, &batch, None).unwrap()
        };
        let trace = propagate(&inst.layer0, inst.n_layers, &adj).unwrap();
        let mut g = Array2::zeros(inst.layer0.dim());
        bpr_on_view(&trace.readout(n_users), &batch, Some(&mut g)).unwrap();
        let analytic = trace.backward(&g).unwrap();
        relative_error(&flat(&analytic), &numeric_grad(&flat(&inst.layer0), H, f))
    }

    fn random_views(inst: &mut Instance) -> MaskPair {
        let n = inst.graph.n_edges();
        let plus = (0..n).map(|_| inst.rng.random::<f64>() < 0.7).collect();
        let minus = (0..n).map(|_| inst.rng.random::<f64>() < 0.7).collect();
        MaskPair::new(plus, minus).unwrap()
    }

    /// Invariance loss over two masked views, w.r.t. the shared layer 0.
    pub fn infonce(seed: u64) -> f64 {
        let mut inst = instance(seed);
        let masks = random_views(&mut inst);
        let adj_plus = inst.graph.normalize_masked(&masks.plus).unwrap();
        let adj_minus = inst.graph.normalize_masked(&masks.minus).unwrap();
        let tau = inst.rng.random_range(0.2..1.0);
        let contrast = ContrastBatch::all(inst.graph.n_users(), inst.graph.n_items(), tau).unwrap();
        let n_users = inst.graph.n_users();
        let f = |x: &[f64]| {
            let l0 = reshape(x, &inst.layer0);
            let zp = propagate(&l0, inst.n_layers, &adj_plus).unwrap().readout(n_users);
            let zm = propagate(&l0, inst.n_layers, &adj_minus).unwrap().readout(n_users);
            infonce_loss(&zp, &zm, &contrast, false).unwrap().0
        };
        let tp = propagate(&inst.layer0, inst.n_layers, &adj_plus).unwrap();
        let tm = propagate(&inst.layer0, inst.n_layers, &adj_minus).unwrap();
        let (_, grads) = infonce_loss(&tp.readout(n_users), &tm.readout(n_users), &contrast, true).unwrap();
        let grads = grads.unwrap();
        let analytic = tp.backward(&grads.plus).unwrap() + tm.backward(&grads.minus).unwrap();
        relative_error(&flat(&analytic), &numeric_grad(&flat(&inst.layer0), H, f))
    }

    /// Smooth per-edge functional of `P_B`, w.r.t. the head parameters.
    pub fn head(seed: u64) -> f64 {
        let mut inst = instance(seed);
        let model = EmbeddingModel::new(inst.layer0.clone(), inst.graph.n_users(), inst.n_layers).unwrap();
        let dim = model.dim();
        let coef: Vec<f64> = (0..inst.graph.n_edges()).map(|_| inst.rng.random_range(-2.0..2.0)).collect();
        let params: Vec<f64> = (0..2 * dim + 1).map(|_| inst.rng.random_range(-1.0..1.0)).collect();
        let head_from = |x: &[f64]| BiasHead {
            weight: ndarray::Array1::from(x[..2 * dim].to_vec()),
            bias: x[2 * dim],
        };
        let f = |x: &[f64]| {
            let p = head_from(x).probabilities(&model, &inst.graph).unwrap();
            p.iter().zip(&coef).map(|(p, c)| c * p * p).sum::<f64>()
        };
        let head = head_from(&params);
        let p = head.probabilities(&model, &inst.graph).unwrap();
        // d(c p^2)/dphi = 2 c p * p (1 - p)
        let grad_logits: Vec<f64> = p.iter().zip(&coef).map(|(p, c)| 2.0 * c * p * p * (1.0 - p)).collect();
        let g = head.backward(&model, &inst.graph, &grad_logits).unwrap();
        let analytic: Vec<f64> = g.weight.iter().copied().chain([g.bias]).collect();
        relative_error(&analytic, &numeric_grad(&params, H, f))
    }

    /// Full representation-stage objective: BPR on both views plus
    /// `lambda` times the invariance loss.
    pub fn combined(seed: u64) -> f64 {
        let mut inst = instance(seed);
        let masks = random_views(&mut inst);
        let adj_plus = inst.graph.normalize_masked(&masks.plus).unwrap();
        let adj_minus = inst.graph.normalize_masked(&masks.minus).unwrap();
        let edges: Vec<usize> = (0..inst.graph.n_edges()).collect();
        let batch = TripletBatch::sample(&inst.graph, &edges, &mut inst.rng).unwrap();
        let contrast = ContrastBatch::all(inst.graph.n_users(), inst.graph.n_items(), 0.5).unwrap();
        let lambda = inst.rng.random_range(0.1..2.0);
        let n_users = inst.graph.n_users();
        let f = |x: &[f64]| {
            let l0 = reshape(x, &inst.layer0);
            let zp = propagate(&l0, inst.n_layers, &adj_plus).unwrap().readout(n_users);
            let zm = propagate(&l0, inst.n_layers, &adj_minus).unwrap().readout(n_users);
            let rec = bpr_on_view(&zp, &batch, None).unwrap() + bpr_on_view(&zm, &batch, None).unwrap();
            rec + lambda * infonce_loss(&zp, &zm, &contrast, false).unwrap().0
        };
        let tp = propagate(&inst.layer0, inst.n_layers, &adj_plus).unwrap();
        let tm = propagate(&inst.layer0, inst.n_layers, &adj_minus).unwrap();
        let (zp, zm) = (tp.readout(n_users), tm.readout(n_users));
        let mut gp = Array2::zeros(inst.layer0.dim());
        let mut gm = Array2::zeros(inst.layer0.dim());
        bpr_on_view(&zp, &batch, Some(&mut gp)).unwrap();
        bpr_on_view(&zm, &batch, Some(&mut gm)).unwrap();
        let grads = infonce_loss(&zp, &zm, &contrast, true).unwrap().1.unwrap();
        gp.scaled_add(lambda, &grads.plus);
        gm.scaled_add(lambda, &grads.minus);
        let analytic = tp.backward(&gp).unwrap() + tm.backward(&gm).unwrap();
        relative_error(&flat(&analytic), &numeric_grad(&flat(&inst.layer0), H, f))
    }
}

pub mod arm {
    //! Toy instances for the ARM estimator, small enough to enumerate.

    use super::*;
    use debias_core::bias::ArmSample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub struct Toy {
        pub model: EmbeddingModel,
        pub graph: InteractionGraph,
        pub contrast: ContrastBatch,
        pub phi: Vec<f64>,
    }

    /// At most `max_edges` edges, so at most `2 * max_edges` mask bits.
    pub fn toy(seed: u64, max_edges: usize) -> Toy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_users = rng.random_range(2..4);
        let n_items = rng.random_range(2..4);
        let mut all: Vec<(usize, usize)> = (0..n_users).flat_map(|u| (0..n_items).map(move |i| (u, i))).collect();
        rand::seq::SliceRandom::shuffle(all.as_mut_slice(), &mut rng);
        let n_edges = rng.random_range(2..=max_edges.min(all.len()));
        all.truncate(n_edges);
        let graph = InteractionGraph::build(n_users, n_items, &all).unwrap();
        let dim = rng.random_range(2..4);
        let layer0 = random_matrix(n_users + n_items, dim, &mut rng);
        let model = EmbeddingModel::new(layer0, n_users, rng.random_range(1..3)).unwrap();
        let contrast = ContrastBatch::all(n_users, n_items, rng.random_range(0.2..1.0)).unwrap();
        let phi = (0..graph.n_edges()).map(|_| rng.random_range(-1.5..1.5)).collect();
        Toy {
            model,
            graph,
            contrast,
            phi,
        }
    }

    /// Per-logit `(true gradient, Monte-Carlo mean, standard error)` of the
    /// ARM estimate of `grad E[L_inv]`.
    pub fn estimate(toy: &Toy, samples: usize, seed: u64) -> Vec<(f64, f64, f64)> {
        let (_, truth) = expected_invariance(&toy.model, &toy.graph, &toy.contrast, &toy.phi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = toy.phi.len();
        let mut draws = vec![Vec::with_capacity(samples); n];
        for _ in 0..samples {
            let s = ArmSample::draw(n, &mut rng);
            let (gt, lt) = s.mask_pairs(&toy.phi).unwrap();
            let l_gt = invariance_loss(&toy.model, &toy.graph, &gt, &toy.contrast).unwrap();
            let l_lt = invariance_loss(&toy.model, &toy.graph, &lt, &toy.contrast).unwrap();
            for (e, g) in s.gradient(l_gt, l_lt).into_iter().enumerate() {
                draws[e].push(g);
            }
        }
        truth
            .into_iter()
            .zip(&draws)
            .map(|(t, d)| {
                let (m, se) = mean_and_se(d);
                (t, m, se)
            })
            .collect()
    }

    /// True gradient within `z` standard errors of the Monte-Carlo mean, on
    /// every logit. The tiny absolute slack covers components whose estimator
    /// is identically zero.
    pub fn within(rows: &[(f64, f64, f64)], z: f64) -> bool {
        rows.iter().all(|&(t, m, se)| (t - m).abs() <= z * se + 1e-12)
    }
}

pub mod metric_oracles {
    //! Exhaustive comparisons of the metric implementations against the
    //! brute-force definitions above. Each returns the number of cases.

    use super::*;
    use debias_core::eval::{ndcg_at_k, prediction_bias, rank_items, recall_at_k, AttributeTable, Side};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn subset(bits: &[bool]) -> Vec<usize> {
        bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    /// Every ranking of up to 5 items (as score permutations, with and without
    /// ties), every exclusion set and relevant set, every K.
    pub fn exhaustive_ranking_check() -> usize {
        let mut checked = 0;
        for n in 1..=5usize {
            let items: Vec<usize> = (0..n).collect();
            let mut score_vectors: Vec<Vec<f64>> = permutations(&items)
                .into_iter()
                .map(|p| p.into_iter().map(|r| r as f64).collect())
                .collect();
            // a tied instance per size
            score_vectors.push((0..n).map(|i| (i / 2) as f64).collect());
            for scores in &score_vectors {
                for excl_bits in all_bit_vectors(n) {
                    let exclude = subset(&excl_bits);
                    if exclude.len() == n {
                        continue;
                    }
                    for rel_bits in all_bit_vectors(n) {
                        let relevant: Vec<usize> = subset(&rel_bits).into_iter().filter(|i| !exclude.contains(i)).collect();
                        if relevant.is_empty() || relevant.len() != subset(&rel_bits).len() {
                            continue;
                        }
                        for k in 1..=n {
                            let ranked = rank_items(scores, &exclude, k);
                            let ndcg = ndcg_at_k(&ranked, &relevant, k).unwrap();
                            let recall = recall_at_k(&ranked, &relevant, k).unwrap();
                            assert_eq!(ndcg, brute_ndcg(scores, &exclude, &relevant, k), "{scores:?} {exclude:?} {relevant:?} {k}");
                            assert_eq!(recall, brute_recall(scores, &exclude, &relevant, k));
                            checked += 1;
                        }
                    }
                }
            }
        }
        checked
    }

    /// Every labelling of up to 5 nodes with up to 3 labels (at least two groups
    /// populated, some nodes unlabelled), on both sides, random scores.
    pub fn exhaustive_bias_check() -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0;
        for n_labeled in 2..=5usize {
            for n_other in 1..=5usize {
                for n_labels in 2..=3usize {
                    let choices = n_labels + 1;
                    for code in 0..choices.pow(n_labeled as u32) {
                        let labels: Vec<Option<usize>> = (0..n_labeled)
                            .map(|k| {
                                let c = code / choices.pow(k as u32) % choices;
                                (c < n_labels).then_some(c)
                            })
                            .collect();
                        let populated = (0..n_labels).filter(|l| labels.contains(&Some(*l))).count();
                        for side in [Side::User, Side::Item] {
                            let shape = match side {
                                Side::User => (n_labeled, n_other),
                                Side::Item => (n_other, n_labeled),
                            };
                            let scores = Array2::from_shape_simple_fn(shape, || rng.random_range(-3.0..3.0));
                            let domain = (0..n_labels).map(|l| l.to_string()).collect();
                            let attrs = AttributeTable::new("a", side, domain, labels.clone()).unwrap();
                            let got = prediction_bias(&scores, &attrs);
                            if populated < 2 {
                                assert!(got.is_err());
                                continue;
                            }
                            let want = brute_prediction_bias(&scores, &labels, n_labels, side == Side::User);
                            assert_eq!(got.unwrap(), want, "{labels:?} {side:?}");
                            checked += 1;
                        }
                    }
                }
            }
        }
        checked
    }
}
