//! Monte Carlo engine: weight generation W_i = X_i/S_N, forward multinomial
//! offspring, the backward discrete-time n-coalescent, and unbiased
//! estimators of c_N and Phi_j^(N).
//!
//! All moment estimators are Rao-Blackwellized: conditional on a weight
//! draw, the categorical sampling noise is integrated out exactly through
//! power sums of the weights, so a replicate contributes
//! sum over ordered distinct j-tuples of prod w_i^{k_i} rather than an
//! indicator. Replicates map to fixed counter-based RNG streams and are
//! reduced in replicate order, so results depend only on the seed, never
//! on the worker count.

use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Model;
use crate::moments::Method;
use crate::partition::{enumerate_partitions, Partition};
use crate::rng::stream_rng;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("sample size {n_sample} exceeds population size {n_pop}")]
    SampleTooLarge { n_sample: usize, n_pop: u64 },
    #[error("need at least {need} replicates, got {got}")]
    TooFewReplicates { need: u64, got: u64 },
    #[error("sample size must be >= 1")]
    EmptySample,
}

/// N positive weights summing to one, with the seed that produced them.
#[derive(Debug, Clone)]
pub struct WeightVector {
    pub w: Vec<f64>,
    pub seed: u64,
}

/// Monte Carlo point estimate with its standard error and provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateCi {
    pub value: f64,
    pub std_error: f64,
    pub replicates: u64,
    pub seed: u64,
    pub method: Method,
}

/// A realized genealogy: partitions from generation 0 (singletons) until
/// absorption in a single block or the horizon.
#[derive(Debug, Clone)]
pub struct GenealogyPath {
    pub partitions: Vec<Partition>,
    /// Generation of most recent common ancestor, when reached.
    pub absorbed_at: Option<usize>,
}

/// Walker/Vose alias table for O(1) categorical draws after O(N) setup.
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        let total: f64 = kahan_sum(weights);
        let mut prob = vec![0.0f64; n];
        let mut alias = vec![0u32; n];
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut small: Vec<u32> = Vec::with_capacity(n);
        let mut large: Vec<u32> = Vec::with_capacity(n);
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i as u32);
            } else {
                large.push(i as u32);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s as usize] = scaled[s as usize];
            alias[s as usize] = l;
            scaled[l as usize] -= 1.0 - scaled[s as usize];
            if scaled[l as usize] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for &i in small.iter().chain(large.iter()) {
            prob[i as usize] = 1.0;
        }
        AliasTable { prob, alias }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }
}

fn kahan_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Draw the fitness values and normalize them into weights. Sampling and
/// normalization run in log space (log-sum-exp), so laws whose values can
/// exceed the f64 range still produce finite weights.
pub fn draw_weights<R: Rng + ?Sized>(model: &Model, n_pop: u64, rng: &mut R) -> Vec<f64> {
    let n = n_pop as usize;
    let mut lx = Vec::with_capacity(n);
    for _ in 0..n {
        lx.push(model.sample_log(rng));
    }
    let top = lx.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut w: Vec<f64> = lx.iter().map(|&l| (l - top).exp()).collect();
    let s = kahan_sum(&w);
    for v in w.iter_mut() {
        *v = (*v / s).max(f64::MIN_POSITIVE);
    }
    w
}

/// Weight vector from stream 0 of `seed`.
pub fn sample_weights(model: &Model, n_pop: u64, seed: u64) -> WeightVector {
    let mut rng = stream_rng(seed, 0);
    WeightVector {
        w: draw_weights(model, n_pop, &mut rng),
        seed,
    }
}

/// Offspring counts (nu_1..nu_N): multinomial with parameters N and the
/// weights, via conditional binomials. The counts always sum to N.
pub fn sample_offspring<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Vec<u64> {
    let n = weights.len() as u64;
    let mut out = vec![0u64; weights.len()];
    let mut remaining = n;
    let mut mass_left = 1.0f64;
    for (i, &w) in weights.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == weights.len() {
            out[i] = remaining;
            break;
        }
        let p = (w / mass_left).clamp(0.0, 1.0);
        let draw = rand_distr::Binomial::new(remaining, p)
            .expect("p clamped to [0,1]")
            .sample(rng);
        out[i] = draw;
        remaining -= draw;
        mass_left = (mass_left - w).max(f64::MIN_POSITIVE);
    }
    out
}

/// One backward generation: every block picks a parent index from the
/// alias table; blocks with equal parents merge.
pub fn step_genealogy<R: Rng + ?Sized>(
    partition: &Partition,
    parents: &AliasTable,
    rng: &mut R,
) -> Partition {
    let labels: Vec<u64> = (0..partition.block_count())
        .map(|_| parents.sample(rng) as u64)
        .collect();
    partition
        .merge_by_parent(&labels)
        .expect("one label per block")
}

/// Simulate the discrete-time n-coalescent with annually resampled weights.
pub fn simulate_coalescent(
    model: &Model,
    n_pop: u64,
    n_sample: usize,
    horizon: usize,
    seed: u64,
) -> Result<GenealogyPath, SimError> {
    if n_sample == 0 {
        return Err(SimError::EmptySample);
    }
    if n_sample as u64 > n_pop {
        return Err(SimError::SampleTooLarge { n_sample, n_pop });
    }
    let mut rng = stream_rng(seed, 0);
    let mut current = Partition::singletons(n_sample);
    let mut partitions = vec![current.clone()];
    let mut absorbed_at = (current.block_count() == 1).then_some(0);
    for r in 1..=horizon {
        if absorbed_at.is_some() {
            break;
        }
        let weights = draw_weights(model, n_pop, &mut rng);
        let alias = AliasTable::new(&weights);
        current = step_genealogy(&current, &alias, &mut rng);
        partitions.push(current.clone());
        if current.block_count() == 1 {
            absorbed_at = Some(r);
        }
    }
    Ok(GenealogyPath {
        partitions,
        absorbed_at,
    })
}

/// Reduce per-replicate statistics (already in replicate order) to an
/// estimate with a batch-means standard error.
fn reduce(stats: Vec<f64>, seed: u64) -> EstimateCi {
    let n = stats.len() as f64;
    let mean = stats.iter().sum::<f64>() / n;
    let var = stats.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    EstimateCi {
        value: mean,
        std_error: (var / n).sqrt(),
        replicates: stats.len() as u64,
        seed,
        method: Method::MonteCarlo,
    }
}

/// Rao-Blackwellized estimate of c_N = N E(W_1^2): the average of
/// sum_i w_i^2 over fresh weight draws.
pub fn estimate_cn(
    model: &Model,
    n_pop: u64,
    reps: u64,
    seed: u64,
) -> Result<EstimateCi, SimError> {
    if reps < 2 {
        return Err(SimError::TooFewReplicates { need: 2, got: reps });
    }
    let stats: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            let w = draw_weights(model, n_pop, &mut rng);
            w.iter().map(|x| x * x).sum::<f64>()
        })
        .collect();
    Ok(reduce(stats, seed))
}

/// Expansion of the ordered-distinct-tuple sum into weight power sums:
/// one term per set partition of {1..j} with Moebius coefficient
/// prod_B (-1)^(|B|-1) (|B|-1)!.
fn power_sum_expansion(ks: &[u32]) -> Vec<(f64, Vec<u32>)> {
    enumerate_partitions(ks.len())
        .into_iter()
        .map(|p| {
            let mut coef = 1.0f64;
            let mut orders = Vec::with_capacity(p.block_count());
            for block in p.blocks() {
                let sz = block.len();
                if sz > 1 {
                    let sign = if (sz - 1) % 2 == 1 { -1.0 } else { 1.0 };
                    coef *= sign * crate::special::gamma(sz as f64);
                }
                orders.push(block.iter().map(|&i| ks[i - 1]).sum::<u32>());
            }
            (coef, orders)
        })
        .collect()
}

/// Unbiased estimate of Phi_j^(N)(k_1..k_j). Vanishes exactly when j > N.
pub fn estimate_phi(
    model: &Model,
    n_pop: u64,
    ks: &[u32],
    reps: u64,
    seed: u64,
) -> Result<EstimateCi, SimError> {
    if reps < 2 {
        return Err(SimError::TooFewReplicates { need: 2, got: reps });
    }
    assert!(!ks.is_empty() && ks.iter().all(|&k| k >= 1));
    if ks.len() as u64 > n_pop {
        return Ok(EstimateCi {
            value: 0.0,
            std_error: 0.0,
            replicates: reps,
            seed,
            method: Method::MonteCarlo,
        });
    }
    let expansion = power_sum_expansion(ks);
    let max_order = ks.iter().sum::<u32>();
    let stats: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            let w = draw_weights(model, n_pop, &mut rng);
            // p_m = sum_i w_i^m for m = 1..=max_order
            let mut p = vec![0.0f64; max_order as usize + 1];
            for &x in &w {
                let mut pw = 1.0;
                for m in 1..=max_order as usize {
                    pw *= x;
                    p[m] += pw;
                }
            }
            expansion
                .iter()
                .map(|(coef, orders)| {
                    coef * orders.iter().map(|&m| p[m as usize]).product::<f64>()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(reduce(stats, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Model;

    /// Asymptotic Kolmogorov-Smirnov p-value.
    fn ks_p_value(sorted: &[f64]) -> f64 {
        let n = sorted.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in sorted.iter().enumerate() {
            let cdf = x.clamp(0.0, 1.0);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
        }
        let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
        let mut p = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            p += 2.0 * (-1f64).powi(k + 1) * (-2.0 * kf * kf * lambda * lambda).exp();
        }
        p.clamp(0.0, 1.0)
    }

    #[test]
    fn degenerate_weights_are_uniform() {
        let wv = sample_weights(&Model::degenerate(2.0).unwrap(), 50, 1);
        for &w in &wv.w {
            assert!((w - 0.02).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_sum_to_one_under_heavy_tails() {
        let m = Model::pareto(0.5).unwrap();
        for seed in 0..5 {
            let wv = sample_weights(&m, 100_000, seed);
            let s = kahan_sum(&wv.w);
            assert!((s - 1.0).abs() < 1e-12, "seed {seed}: {s}");
            assert!(wv.w.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn weight_mean_is_one_over_n() {
        // E(W_1) = 1/N for any model
        let m = Model::pareto(1.5).unwrap();
        let n_pop = 100u64;
        let reps = 4000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for r in 0..reps {
            let mut rng = stream_rng(5, r);
            let w = draw_weights(&m, n_pop, &mut rng);
            sum += w[0];
            sumsq += w[0] * w[0];
        }
        let mean = sum / reps as f64;
        let sd = ((sumsq / reps as f64 - mean * mean) / reps as f64).sqrt();
        assert!(
            (mean - 0.01).abs() <= 3.0 * sd,
            "mean {mean} vs 0.01 (se {sd})"
        );
    }

    #[test]
    fn gamma_one_pair_weight_is_uniform() {
        // Gamma(1), N = 2: w_1 ~ Uniform(0,1); KS test on 10^4 draws
        let m = Model::gamma(1.0).unwrap();
        let mut xs: Vec<f64> = (0..10_000u64)
            .map(|r| {
                let mut rng = stream_rng(6, r);
                draw_weights(&m, 2, &mut rng)[0]
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        let p = ks_p_value(&xs);
        assert!(p > 0.01, "KS p = {p}");
    }

    #[test]
    fn offspring_counts_sum_to_population() {
        let m = Model::pareto(1.5).unwrap();
        let mut rng = stream_rng(7, 0);
        for n_pop in [1u64, 2, 17, 300] {
            let w = draw_weights(&m, n_pop, &mut rng);
            let nu = sample_offspring(&w, &mut rng);
            assert_eq!(nu.iter().sum::<u64>(), n_pop);
            if n_pop == 1 {
                assert_eq!(nu[0], 1);
            }
        }
    }

    #[test]
    fn offspring_factorial_moment_wright_fisher() {
        // Degenerate, N = 100: E(nu_1 (nu_1 - 1)) = (N)_2 E(W_1^2) = 0.99
        let m = Model::degenerate(1.0).unwrap();
        let n_pop = 100u64;
        let reps = 60_000;
        let mut rng = stream_rng(8, 0);
        let w = draw_weights(&m, n_pop, &mut rng);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut mean1 = 0.0;
        for _ in 0..reps {
            let nu = sample_offspring(&w, &mut rng);
            let v = (nu[0] * nu[0].saturating_sub(1)) as f64;
            sum += v;
            sumsq += v * v;
            mean1 += nu[0] as f64;
        }
        let n = reps as f64;
        let mean = sum / n;
        let sd = ((sumsq / n - mean * mean) / n).sqrt();
        assert!((mean - 0.99).abs() <= 3.0 * sd, "factorial moment {mean} (se {sd})");
        // E(nu_1) = 1 by exchangeability
        let m1 = mean1 / n;
        assert!((m1 - 1.0).abs() <= 3.0 * (2.0 / n.sqrt()), "mean offspring {m1}");
    }

    #[test]
    fn pair_merge_probability_is_one_over_n() {
        let m = Model::degenerate(1.0).unwrap();
        let n_pop = 50u64;
        let mut rng = stream_rng(9, 0);
        let w = draw_weights(&m, n_pop, &mut rng);
        let alias = AliasTable::new(&w);
        let start = Partition::singletons(2);
        let steps = 100_000;
        let mut merged = 0u64;
        for _ in 0..steps {
            if step_genealogy(&start, &alias, &mut rng).block_count() == 1 {
                merged += 1;
            }
        }
        let emp = merged as f64 / steps as f64;
        let p = 1.0 / n_pop as f64;
        let se = (p * (1.0 - p) / steps as f64).sqrt();
        assert!((emp - p).abs() <= 3.0 * se, "{emp} vs {p}");
    }

    #[test]
    fn triple_merge_probability_at_fixed_weights() {
        // conditional on w: P(all three merge) = sum_i w_i^3
        let m = Model::pareto(1.0).unwrap();
        let mut rng = stream_rng(10, 0);
        let w = draw_weights(&m, 30, &mut rng);
        let target: f64 = w.iter().map(|x| x * x * x).sum();
        let alias = AliasTable::new(&w);
        let start = Partition::singletons(3);
        let steps = 100_000;
        let mut all = 0u64;
        for _ in 0..steps {
            if step_genealogy(&start, &alias, &mut rng).block_count() == 1 {
                all += 1;
            }
        }
        let emp = all as f64 / steps as f64;
        let se = (target * (1.0 - target) / steps as f64).sqrt();
        assert!((emp - target).abs() <= 3.5 * se, "{emp} vs {target}");
    }

    #[test]
    fn single_lineage_is_absorbed_immediately() {
        let m = Model::gamma(1.0).unwrap();
        let path = simulate_coalescent(&m, 10, 1, 100, 3).unwrap();
        assert_eq!(path.absorbed_at, Some(0));
        assert_eq!(path.partitions.len(), 1);
    }

    #[test]
    fn pair_absorption_time_is_geometric() {
        // Degenerate, n = 2: absorption ~ Geometric(1/N), mean N
        let m = Model::degenerate(1.0).unwrap();
        let n_pop = 100u64;
        let reps = 2_000u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for r in 0..reps {
            let path = simulate_coalescent(&m, n_pop, 2, 100_000, 1000 + r).unwrap();
            let t = path.absorbed_at.expect("horizon is generous") as f64;
            sum += t;
            sumsq += t * t;
        }
        let mean = sum / reps as f64;
        let sd = ((sumsq / reps as f64 - mean * mean) / reps as f64).sqrt();
        assert!(
            (mean - 100.0).abs() <= 3.0 * sd,
            "mean absorption {mean} (se {sd})"
        );
    }

    #[test]
    fn horizon_leaves_absorption_unset() {
        let m = Model::degenerate(1.0).unwrap();
        let path = simulate_coalescent(&m, 1_000_000, 2, 3, 4).unwrap();
        assert_eq!(path.absorbed_at, None);
        assert_eq!(path.partitions.len(), 4);
        for w in path.partitions.windows(2) {
            assert!(w[0].is_coarsening(&w[1]).unwrap());
            assert!(w[1].block_count() <= w[0].block_count());
        }
    }

    #[test]
    fn invalid_simulation_parameters() {
        let m = Model::gamma(1.0).unwrap();
        assert!(matches!(
            simulate_coalescent(&m, 5, 6, 10, 0),
            Err(SimError::SampleTooLarge { .. })
        ));
        assert!(matches!(
            simulate_coalescent(&m, 5, 0, 10, 0),
            Err(SimError::EmptySample)
        ));
        assert!(matches!(
            estimate_cn(&m, 10, 1, 0),
            Err(SimError::TooFewReplicates { .. })
        ));
    }

    #[test]
    fn cn_estimate_degenerate_is_exact() {
        let m = Model::degenerate(1.0).unwrap();
        let est = estimate_cn(&m, 20, 50, 0).unwrap();
        assert!((est.value - 0.05).abs() < 1e-14);
        assert!(est.std_error < 1e-15, "{}", est.std_error);
        assert_eq!(est.replicates, 50);
    }

    #[test]
    fn cn_estimate_gamma_matches_dirichlet() {
        // Gamma(1), N = 99: c_N = 2/(N+1) = 0.02
        let m = Model::gamma(1.0).unwrap();
        let est = estimate_cn(&m, 99, 4_000, 21).unwrap();
        assert!(
            (est.value - 0.02).abs() <= 3.0 * est.std_error,
            "{} +- {}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn phi_estimates_degenerate_and_identities() {
        let m = Model::degenerate(1.0).unwrap();
        // (N)_2 N^{-4} = 90/10^4 exactly, with zero variance
        let est = estimate_phi(&m, 10, &[2, 2], 20, 0).unwrap();
        assert!((est.value - 0.009).abs() < 1e-15);
        assert!(est.std_error < 1e-15, "{}", est.std_error);
        // Phi_1(1) = 1 exactly (p_1 = 1 per draw)
        let m = Model::pareto(0.5).unwrap();
        let est = estimate_phi(&m, 100, &[1], 10, 1).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        // vanishes when j > N
        let est = estimate_phi(&m, 2, &[1, 1, 1], 10, 1).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn phi_estimate_gamma_pair() {
        // Gamma(1), N = 10: Phi_2(1,1) = 90 E(W1 W2) = 90/110
        let m = Model::gamma(1.0).unwrap();
        let est = estimate_phi(&m, 10, &[1, 1], 4_000, 31).unwrap();
        assert!(
            (est.value - 9.0 / 11.0).abs() <= 3.0 * est.std_error,
            "{} +- {}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn per_draw_consistency_and_monotonicity() {
        // the power-sum statistics satisfy the consistency relation and the
        // monotonicity relation exactly, draw by draw
        let m = Model::pareto(1.0).unwrap();
        let (n_pop, reps, seed) = (50u64, 64, 77);
        let a = estimate_phi(&m, n_pop, &[2], reps, seed).unwrap();
        let b = estimate_phi(&m, n_pop, &[2, 1], reps, seed).unwrap();
        let c = estimate_phi(&m, n_pop, &[3], reps, seed).unwrap();
        let residual = a.value - b.value - c.value;
        assert!(residual.abs() < 1e-12, "residual {residual}");
        let lo = estimate_phi(&m, n_pop, &[2, 2], reps, seed).unwrap();
        assert!(lo.value <= a.value + 1e-12);
        // c_N >= 1/N
        let cn = estimate_cn(&m, n_pop, reps, seed).unwrap();
        assert!(cn.value >= 1.0 / n_pop as f64);
    }

    #[test]
    fn power_sum_expansion_matches_direct_sum() {
        // brute-force ordered-distinct-tuple sums on a small weight vector
        let w = [0.4f64, 0.3, 0.2, 0.1];
        let p = |m: u32| w.iter().map(|x| x.powi(m as i32)).sum::<f64>();
        let direct = |ks: &[u32]| {
            let n = w.len();
            let mut total = 0.0;
            let idx = [0usize; 3];
            let _ = idx;
            // up to j = 3 nested loops
            match ks.len() {
                2 => {
                    for a in 0..n {
                        for b in 0..n {
                            if a != b {
                                total += w[a].powi(ks[0] as i32) * w[b].powi(ks[1] as i32);
                            }
                        }
                    }
                }
                3 => {
                    for a in 0..n {
                        for b in 0..n {
                            for c in 0..n {
                                if a != b && b != c && a != c {
                                    total += w[a].powi(ks[0] as i32)
                                        * w[b].powi(ks[1] as i32)
                                        * w[c].powi(ks[2] as i32);
                                }
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
            total
        };
        for ks in [vec![2u32, 2], vec![1, 3], vec![1, 1, 1], vec![2, 1, 1], vec![3, 2, 1]] {
            let expansion = power_sum_expansion(&ks);
            let via_p: f64 = expansion
                .iter()
                .map(|(c, orders)| c * orders.iter().map(|&m| p(m)).product::<f64>())
                .sum();
            let brute = direct(&ks);
            assert!(
                (via_p - brute).abs() < 1e-14,
                "ks={ks:?}: {via_p} vs {brute}"
            );
        }
    }

    #[test]
    fn large_deviation_decay_of_small_sums() {
        // P(S_N <= N/2) for Gamma(1) decays at least geometrically; the
        // exact values are P(N, N/2) (regularized lower incomplete gamma)
        let m = Model::gamma(1.0).unwrap();
        let reps = 200_000u64;
        let mut prev_exact = 1.0;
        for n_pop in [10u64, 20, 40, 80] {
            let hits: u64 = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(40 + n_pop, r);
                    let s: f64 = (0..n_pop).map(|_| m.sample(&mut rng)).sum();
                    u64::from(s <= n_pop as f64 / 2.0)
                })
                .sum();
            let emp = hits as f64 / reps as f64;
            // geometric decay: the per-N root stays below a fixed q < 1
            assert!(
                emp.powf(1.0 / n_pop as f64) <= 0.9,
                "N={n_pop}: emp {emp}"
            );
            let exact = crate::special::regularized_gamma_p(n_pop as f64, n_pop as f64 / 2.0);
            assert!(exact < prev_exact * 0.25, "exact values fall geometrically");
            prev_exact = exact;
            if exact > 1e-4 {
                let se = (exact * (1.0 - exact) / reps as f64).sqrt();
                assert!((emp - exact).abs() <= 4.0 * se, "N={n_pop}: {emp} vs {exact}");
            }
        }
    }

    #[test]
    fn estimates_do_not_depend_on_worker_count() {
        let m = Model::pareto(1.5).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| estimate_cn(&m, 500, 40, 99).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}
