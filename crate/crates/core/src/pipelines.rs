//! End-to-end MapReduce clustering jobs.
//!
//! Every pipeline ends with an evaluation round over all of `V`, so the
//! reported objective is the exact unweighted cost of the returned centers.

use crate::clusterers::{
    self, finish_snap, gonzalez_on, initial_means, lloyd_iterate, local_search_run, snap_into,
    LloydConfig, LloydPartial, LocalSearchConfig,
};
use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::metric::{ClusteringSolution, Dataset, ObjectiveKind, PointBlock, PointId, WeightedPointSet};
use crate::mr::{partition_arbitrary, ClusterConfig, Job, JobTrace, KeyValue};
use crate::sampling::{sample_rounds, SampleConfig};
use crate::seed;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineResult {
    pub solution: ClusteringSolution,
    pub trace: JobTrace,
    /// Points handed to the final clusterer: `|C|` for the sampling
    /// pipelines, the union of part centers for the divide scheme and `n`
    /// for parallel Lloyd.
    pub sample_size: usize,
    /// Sampling iterations; zero for pipelines that do not sample.
    pub sample_iterations: usize,
}

/// Sequential algorithm applied to the reduced, weighted instance.
#[derive(Clone, Debug, PartialEq)]
pub enum FinalClusterer {
    LocalSearch(LocalSearchConfig),
    Lloyd(LloydConfig),
}

impl FinalClusterer {
    fn with_seed(&self, seed: u64) -> Self {
        match self {
            FinalClusterer::LocalSearch(cfg) => FinalClusterer::LocalSearch(LocalSearchConfig { seed, ..cfg.clone() }),
            FinalClusterer::Lloyd(cfg) => FinalClusterer::Lloyd(LloydConfig { seed, ..cfg.clone() }),
        }
    }

    fn seed(&self) -> u64 {
        match self {
            FinalClusterer::LocalSearch(cfg) => cfg.seed,
            FinalClusterer::Lloyd(cfg) => cfg.seed,
        }
    }

    /// Words a machine holds to run this clusterer on `m` weighted points.
    fn input_words(&self, m: usize, dim: usize) -> u64 {
        let m = m as u64;
        match self {
            // Points, weights and the pairwise distances.
            FinalClusterer::LocalSearch(_) => 2 * m + m * m,
            FinalClusterer::Lloyd(_) => m * (dim as u64 + 1),
        }
    }

    /// Runs on `ws`; returns the centers and the work done in words.
    fn run(&self, ds: &Dataset, ws: &WeightedPointSet, k: usize) -> Result<(Vec<PointId>, u64)> {
        let k = k.min(ws.len());
        let m = ws.len() as u64;
        match self {
            FinalClusterer::LocalSearch(cfg) => {
                let out = local_search_run(ds, ws, k, cfg)?;
                Ok((out.solution.centers, (out.evaluations + 1) * m))
            }
            FinalClusterer::Lloyd(cfg) => {
                let run = clusterers::lloyd_run(ds, ws, k, cfg)?;
                Ok((run.solution.centers, (run.iterations as u64 + 1) * m * k as u64))
            }
        }
    }
}

fn check_k(ds: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k > ds.len() {
        return Err(Error::usage(format!("k = {k} must be in [1, {}]", ds.len())));
    }
    Ok(())
}

fn spread_parts(items: usize, wanted: f64, machines: usize) -> usize {
    (wanted.ceil() as usize).clamp(1, machines).min(items.max(1))
}

/// The closing round: machines hold slices of `V` plus the centers and
/// report assignments with partial costs.
fn evaluation_round(job: &mut Job<'_>, ds: &Dataset, centers: &[PointId], kind: ObjectiveKind) -> Result<ClusteringSolution> {
    let mut centers = centers.to_vec();
    centers.sort_unstable();
    centers.dedup();
    if centers.is_empty() {
        return Err(Error::usage("no centers to evaluate"));
    }
    let n = ds.len();
    let parts = spread_parts(n, n as f64, job.machines());
    let c_len = centers.len() as u64;
    let inputs = partition_arbitrary(ds.all_ids(), parts, job.mapper_seed(0))
        .into_iter()
        .enumerate()
        .map(|(i, part)| {
            let words = part.len() as u64 + c_len;
            KeyValue::new(i, part, words)
        })
        .collect();
    let block = PointBlock::new(ds, centers.clone());
    let out = job.round(inputs, |ctx, parts: Vec<Vec<PointId>>| {
        let mut pairs = Vec::new();
        let mut sum = ExactSum::new();
        let mut max = 0.0f64;
        for part in parts {
            ctx.charge(part.len() as u64 * c_len);
            for x in part {
                let (d, c) = block.nearest(ds, x).expect("centers non-empty");
                sum.add(d);
                max = max.max(d);
                pairs.push((x, c));
            }
        }
        let words = 2 * pairs.len() as u64 + 2;
        Ok(vec![KeyValue::new(0, (pairs, sum, max), words)])
    })?;
    let mut assignment = vec![PointId(u32::MAX); n];
    let mut sum = ExactSum::new();
    let mut max = 0.0f64;
    for kv in out {
        let (pairs, s, m) = kv.value;
        for (x, c) in pairs {
            assignment[x.index()] = c;
        }
        sum.merge(&s);
        max = max.max(m);
    }
    let objective = match kind {
        ObjectiveKind::KCenter => max,
        ObjectiveKind::KMedian => sum.value(),
        ObjectiveKind::WeightedKMedian => {
            return Err(Error::usage("pipelines evaluate unweighted objectives only"))
        }
    };
    Ok(ClusteringSolution {
        centers,
        assignment,
        objective,
        kind,
    })
}

/// Sampling followed by farthest-point traversal on the sample. Coins and
/// the traversal start both use the cluster seed.
pub fn mapreduce_kcenter(ds: &Dataset, k: usize, epsilon: f64, cluster: &ClusterConfig) -> Result<PipelineResult> {
    mapreduce_kcenter_with(ds, &SampleConfig::new(k, epsilon, cluster.seed), cluster)
}

/// [`mapreduce_kcenter`] with full control over sampling; `sample.k` is
/// the number of centers and `sample.seed` seeds the traversal start.
pub fn mapreduce_kcenter_with(ds: &Dataset, sample: &SampleConfig, cluster: &ClusterConfig) -> Result<PipelineResult> {
    let k = sample.k;
    check_k(ds, k)?;
    let mut job = Job::new(cluster)?;
    let outcome = sample_rounds(&mut job, ds, sample)?;
    let c = outcome.sample.clone();
    let m = c.len() as u64;
    let seed = sample.seed;
    let out = job.round(vec![KeyValue::new(0, c, m + m * m)], |ctx, mut vals| {
        let points = vals.pop().expect("one input");
        ctx.charge(k as u64 * points.len() as u64);
        let centers = gonzalez_on(ds, &points, k.min(points.len()), seed)?;
        let words = centers.len() as u64;
        Ok(vec![KeyValue::new(0, centers, words)])
    })?;
    let centers = &out[0].value;
    let solution = evaluation_round(&mut job, ds, centers, ObjectiveKind::KCenter)?;
    Ok(PipelineResult {
        solution,
        trace: job.finish(),
        sample_size: outcome.len(),
        sample_iterations: outcome.iterations,
    })
}

/// Sampling, weighting of the sample by the points it attracts, and a
/// weighted clusterer on one machine.
///
/// A point of the sample weighs one plus the number of non-sampled points
/// whose nearest sample point it is.
///
/// Sampling coins use the cluster seed; the clusterer carries its own.
pub fn mapreduce_kmedian(
    ds: &Dataset,
    k: usize,
    epsilon: f64,
    clusterer: &FinalClusterer,
    cluster: &ClusterConfig,
) -> Result<PipelineResult> {
    mapreduce_kmedian_with(ds, &SampleConfig::new(k, epsilon, cluster.seed), clusterer, cluster)
}

pub fn mapreduce_kmedian_with(
    ds: &Dataset,
    sample: &SampleConfig,
    clusterer: &FinalClusterer,
    cluster: &ClusterConfig,
) -> Result<PipelineResult> {
    let k = sample.k;
    check_k(ds, k)?;
    let n = ds.len();
    let mut job = Job::new(cluster)?;
    let outcome = sample_rounds(&mut job, ds, sample)?;
    let c = outcome.sample.clone();
    let weights = weigh_sample(&mut job, ds, &c, sample.epsilon)?;
    debug_assert_eq!(weights.iter().sum::<u64>(), n as u64);
    let ws = WeightedPointSet::new(c, weights)?;

    let dim = ds.dim().unwrap_or(0);
    let words = clusterer.input_words(ws.len(), dim);
    let out = job.round(vec![KeyValue::new(0, ws, words)], |ctx, mut vals| {
        let ws = vals.pop().expect("one input");
        let (centers, work) = clusterer.run(ds, &ws, k)?;
        ctx.charge(work);
        let words = centers.len() as u64;
        Ok(vec![KeyValue::new(0, centers, words)])
    })?;
    let solution = evaluation_round(&mut job, ds, &out[0].value, ObjectiveKind::KMedian)?;
    Ok(PipelineResult {
        solution,
        trace: job.finish(),
        sample_size: outcome.len(),
        sample_iterations: outcome.iterations,
    })
}

/// One round over `V \ C`: each point adds one to its nearest member of
/// `C`. Returns weights aligned with `c`.
fn weigh_sample(job: &mut Job<'_>, ds: &Dataset, c: &[PointId], epsilon: f64) -> Result<Vec<u64>> {
    let n = ds.len();
    let mut in_c = vec![false; n];
    for &p in c {
        in_c[p.index()] = true;
    }
    let rest: Vec<PointId> = ds.ids().filter(|p| !in_c[p.index()]).collect();
    let mut weights = vec![1u64; c.len()];
    if rest.is_empty() {
        return Ok(weights);
    }
    let n_eps = (n as f64).powf(epsilon);
    let parts = spread_parts(rest.len(), n as f64 / n_eps, job.machines());
    let c_len = c.len() as u64;
    let inputs = partition_arbitrary(rest, parts, job.mapper_seed(2))
        .into_iter()
        .enumerate()
        .map(|(i, part)| {
            let r = part.len() as u64;
            KeyValue::new(i, part, r + c_len + r * c_len)
        })
        .collect();
    let block = PointBlock::new(ds, c.to_vec());
    let position = |id: PointId| c.binary_search(&id).expect("center from the sample");
    let out = job.round(inputs, |ctx, parts: Vec<Vec<PointId>>| {
        let mut counts = vec![0u64; c.len()];
        for part in parts {
            ctx.charge(part.len() as u64 * c_len);
            for x in part {
                let (_, y) = block.nearest(ds, x).expect("sample non-empty");
                counts[position(y)] += 1;
            }
        }
        Ok(vec![KeyValue::new(0, counts, c_len)])
    })?;
    for kv in out {
        for (w, add) in weights.iter_mut().zip(kv.value) {
            *w += add;
        }
    }
    Ok(weights)
}

/// The partition-based scheme: `ell` arbitrary parts (default
/// `ceil(sqrt(n / k))`) are clustered independently, their centers
/// weighted by cluster size, and the union clustered once more.
///
/// Part `i` runs the clusterer with a seed derived from its index; part 0
/// keeps the configured seed, so a single part reproduces the plain
/// clusterer on `V`.
pub fn mapreduce_divide_kmedian(
    ds: &Dataset,
    k: usize,
    ell: Option<usize>,
    clusterer: &FinalClusterer,
    cluster: &ClusterConfig,
) -> Result<PipelineResult> {
    check_k(ds, k)?;
    let n = ds.len();
    let mut job = Job::new(cluster)?;
    let machines = job.machines();
    let parts = ell.unwrap_or_else(|| (n as f64 / k as f64).sqrt().ceil() as usize);
    if parts == 0 || n / parts < k {
        return Err(Error::usage(format!(
            "{parts} parts of {n} points leave a part with fewer than k = {k} points"
        )));
    }
    let dim = ds.dim().unwrap_or(0);
    let base_seed = clusterer.seed();
    let inputs = partition_arbitrary(ds.all_ids(), parts, job.mapper_seed(0))
        .into_iter()
        .enumerate()
        .map(|(i, part)| {
            let words = clusterer.input_words(part.len(), dim);
            KeyValue::new(i % machines, (i, part), words)
        })
        .collect();
    let out = job.round(inputs, |ctx, parts: Vec<(usize, Vec<PointId>)>| {
        let mut emitted = Vec::new();
        for (i, part) in parts {
            let part_seed = if i == 0 { base_seed } else { seed::derive_seed(base_seed, &[i as u64]) };
            let local = clusterer.with_seed(part_seed);
            let ws = WeightedPointSet::unit(part)?;
            let (centers, work) = local.run(ds, &ws, k)?;
            ctx.charge(work);
            let block = PointBlock::new(ds, centers.clone());
            let mut counts = vec![0u64; centers.len()];
            for &x in ws.points() {
                let (_, c) = block.nearest(ds, x).expect("centers non-empty");
                counts[block.ids().iter().position(|&y| y == c).expect("center")] += 1;
            }
            ctx.charge(ws.len() as u64 * centers.len() as u64);
            let words = 2 * centers.len() as u64;
            emitted.push(KeyValue::new(0, centers.into_iter().zip(counts).collect::<Vec<_>>(), words));
        }
        Ok(emitted)
    })?;
    let mut pairs: Vec<(PointId, u64)> = out.into_iter().flat_map(|kv| kv.value).collect();
    pairs.sort_unstable();
    let (points, weights): (Vec<PointId>, Vec<u64>) = pairs.into_iter().unzip();
    let ws = WeightedPointSet::new(points, weights)?;
    let sample_size = ws.len();

    let words = clusterer.input_words(ws.len(), dim);
    let out = job.round(vec![KeyValue::new(0, ws, words)], |ctx, mut vals| {
        let ws = vals.pop().expect("one input");
        let (centers, work) = clusterer.run(ds, &ws, k)?;
        ctx.charge(work);
        let words = centers.len() as u64;
        Ok(vec![KeyValue::new(0, centers, words)])
    })?;
    let solution = evaluation_round(&mut job, ds, &out[0].value, ObjectiveKind::KMedian)?;
    Ok(PipelineResult {
        solution,
        trace: job.finish(),
        sample_size,
        sample_iterations: 0,
    })
}

/// Lloyd's algorithm with each iteration as one round over a fixed
/// partition of `V`. Produces exactly the centers of the sequential
/// version with the same configuration.
pub fn parallel_lloyd(ds: &Dataset, k: usize, cfg: &LloydConfig, cluster: &ClusterConfig) -> Result<PipelineResult> {
    check_k(ds, k)?;
    let dim = ds
        .dim()
        .ok_or_else(|| Error::usage("Lloyd's algorithm needs a euclidean dataset"))?;
    let n = ds.len();
    let mut job = Job::new(cluster)?;
    let parts = spread_parts(n, n as f64, job.machines());
    let slices = partition_arbitrary(ds.all_ids(), parts, job.mapper_seed(0));
    let mean_words = (k * dim) as u64;
    fn feed(slices: &[Vec<PointId>], mean_words: u64) -> Vec<KeyValue<&[PointId]>> {
        slices
            .iter()
            .enumerate()
            .map(|(i, s)| KeyValue::new(i, s.as_slice(), s.len() as u64 + mean_words))
            .collect()
    }

    let initial = initial_means(ds, &ds.all_ids(), k, cfg.seed)?;
    let (means, _, _, _) = lloyd_iterate(initial, cfg, |means| {
        let out = job.round(feed(&slices, mean_words), |ctx, vals: Vec<&[PointId]>| {
            let mut partial = LloydPartial::new(k, dim);
            for slice in vals {
                ctx.charge(slice.len() as u64 * k as u64);
                partial.accumulate(ds, slice.iter().map(|&p| (p, 1)), means);
            }
            let words = partial.words();
            Ok(vec![KeyValue::new(0, partial, words)])
        })?;
        let mut total = LloydPartial::new(k, dim);
        for kv in out {
            total.merge(&kv.value);
        }
        Ok(total)
    })?;

    let out = job.round(feed(&slices, mean_words), |ctx, vals: Vec<&[PointId]>| {
        let mut best = vec![(f64::INFINITY, PointId(u32::MAX)); k];
        for slice in vals {
            ctx.charge(slice.len() as u64 * k as u64);
            snap_into(ds, slice, &means, dim, &mut best);
        }
        Ok(vec![KeyValue::new(0, best, 2 * k as u64)])
    })?;
    let mut best = vec![(f64::INFINITY, PointId(u32::MAX)); k];
    for kv in out {
        for (b, cand) in best.iter_mut().zip(kv.value) {
            if cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1) {
                *b = cand;
            }
        }
    }
    let centers = finish_snap(best);
    let solution = evaluation_round(&mut job, ds, &centers, ObjectiveKind::KMedian)?;
    Ok(PipelineResult {
        solution,
        trace: job.finish(),
        sample_size: n,
        sample_iterations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clusterers::{gonzalez_kcenter, lloyd_kmedian, local_search_kmedian};
    use crate::datagen::{generate, DataGenConfig};
    use crate::metric::evaluate;

    fn data(n: usize, seed: u64) -> Dataset {
        generate(&DataGenConfig {
            n,
            k_true: 5,
            seed,
            ..Default::default()
        })
    }

    #[test]
    fn evaluation_matches_the_sequential_evaluator() {
        let ds = data(3000, 1);
        let centers = [PointId(5), PointId(77), PointId(1000), PointId(2999)];
        for machines in [1, 7, 100] {
            let cfg = ClusterConfig::new(machines, 3);
            let mut job = Job::new(&cfg).unwrap();
            for kind in [ObjectiveKind::KMedian, ObjectiveKind::KCenter] {
                let mr = evaluation_round(&mut job, &ds, &centers, kind).unwrap();
                let seq = ClusteringSolution::evaluate(&ds, &centers, kind, None).unwrap();
                assert_eq!(mr, seq);
            }
        }
    }

    #[test]
    fn small_input_reduces_to_the_baselines() {
        // Below the size guard the sample is all of V with unit weights.
        let ds = data(400, 2);
        let cluster = ClusterConfig::new(10, 9);

        let kc = mapreduce_kcenter(&ds, 5, 0.1, &cluster).unwrap();
        assert_eq!(kc.sample_size, 400);
        assert_eq!(kc.solution, gonzalez_kcenter(&ds, 5, 9).unwrap());

        let ls_cfg = LocalSearchConfig::with_seed(6);
        let km = mapreduce_kmedian(&ds, 5, 0.1, &FinalClusterer::LocalSearch(ls_cfg.clone()), &cluster).unwrap();
        let base = local_search_kmedian(&ds, &WeightedPointSet::all(&ds), 5, &ls_cfg).unwrap();
        assert_eq!(km.solution.centers, base.centers);
        assert_eq!(km.solution.objective, base.objective);
        // Sampling stops at once; then weighting is skipped, one reducer
        // clusters and one round evaluates.
        assert_eq!(km.trace.round_count(), 2);
    }

    #[test]
    fn k_equal_to_n_costs_nothing() {
        let ds = data(30, 8);
        let res = mapreduce_kcenter(&ds, 30, 0.2, &ClusterConfig::new(3, 1)).unwrap();
        assert_eq!(res.solution.objective, 0.0);
    }

    #[test]
    fn line_weights() {
        let ds = Dataset::euclidean(1, vec![0.0, 1.0, 10.0, 11.0]).unwrap();
        let cfg = ClusterConfig::new(2, 0);
        let mut job = Job::new(&cfg).unwrap();
        let w = weigh_sample(&mut job, &ds, &[PointId(0), PointId(2)], 0.5).unwrap();
        assert_eq!(w, vec![2, 2]);
    }

    #[test]
    fn single_part_divide_is_plain_local_search() {
        let ds = data(600, 9);
        let cfg = LocalSearchConfig::with_seed(4);
        let res = mapreduce_divide_kmedian(&ds, 5, Some(1), &FinalClusterer::LocalSearch(cfg.clone()), &ClusterConfig::new(4, 0)).unwrap();
        let base = local_search_kmedian(&ds, &WeightedPointSet::all(&ds), 5, &cfg).unwrap();
        assert_eq!(res.solution.centers, base.centers);
        assert_eq!(res.solution.objective, base.objective);
        assert!(matches!(
            mapreduce_divide_kmedian(&ds, 5, Some(200), &FinalClusterer::LocalSearch(cfg), &ClusterConfig::new(4, 0)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn one_center_lands_next_to_the_global_mean() {
        let ds = data(3000, 10);
        let run = clusterers::lloyd_run(&ds, &WeightedPointSet::all(&ds), 1, &LloydConfig::default()).unwrap();
        // Oracle: coordinate-wise mean computed directly.
        let mut mean = [0.0f64; 3];
        for p in ds.ids() {
            for (m, c) in mean.iter_mut().zip(ds.coords(p)) {
                *m += c / 3000.0;
            }
        }
        for (a, b) in run.mean_history[0].iter().zip(mean) {
            assert!((a - b).abs() < 1e-12);
        }
        // The mean never moves again; convergence is seen one pass later.
        assert!(run.mean_history.iter().all(|m| *m == run.mean_history[0]));
        assert_eq!(run.iterations, 3);
        let par = parallel_lloyd(&ds, 1, &LloydConfig::default(), &ClusterConfig::new(7, 1)).unwrap();
        let best = ds
            .ids()
            .min_by(|&a, &b| {
                let da = crate::metric::sq_dist(ds.coords(a), &run.means);
                let db = crate::metric::sq_dist(ds.coords(b), &run.means);
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .unwrap();
        assert_eq!(par.solution.centers, vec![best]);
    }

    #[test]
    fn parallel_lloyd_equals_sequential() {
        let ds = data(5000, 3);
        let cfg = LloydConfig::with_seed(11);
        let seq = lloyd_kmedian(&ds, None, 5, &cfg).unwrap();
        for machines in [1, 3, 64] {
            let par = parallel_lloyd(&ds, 5, &cfg, &ClusterConfig::new(machines, machines as u64)).unwrap();
            assert_eq!(par.solution, seq, "machines = {machines}");
        }
    }

    #[test]
    fn sampling_pipeline_on_a_real_sample() {
        let ds = data(60_000, 4);
        let cluster = ClusterConfig::new(50, 1);
        let res = mapreduce_kmedian(&ds, 2, 0.1, &FinalClusterer::Lloyd(LloydConfig::with_seed(2)), &cluster).unwrap();
        assert!(res.sample_size < 60_000);
        assert!(res.sample_iterations >= 1);
        assert_eq!(res.trace.round_count(), 3 * res.sample_iterations + 3);
        // ceil(1/eps) = 10.
        assert!(res.trace.round_count() <= 3 * (10 + 2) + 4);
        let direct = evaluate(&ds, &res.solution.centers, ObjectiveKind::KMedian, None).unwrap();
        assert_eq!(res.solution.objective, direct);
    }

    #[test]
    fn divide_uses_at_most_four_rounds() {
        let ds = data(2000, 5);
        for clusterer in [
            FinalClusterer::Lloyd(LloydConfig::with_seed(1)),
            FinalClusterer::LocalSearch(LocalSearchConfig::with_seed(1)),
        ] {
            let res = mapreduce_divide_kmedian(&ds, 5, None, &clusterer, &ClusterConfig::new(8, 2)).unwrap();
            assert!(res.trace.round_count() <= 4);
            // ceil(sqrt(2000 / 5)) = 20 parts, five centers each.
            assert_eq!(res.sample_size, 100);
            assert_eq!(res.solution.centers.len(), 5);
            let direct = evaluate(&ds, &res.solution.centers, ObjectiveKind::KMedian, None).unwrap();
            assert_eq!(res.solution.objective, direct);
        }
    }

    #[test]
    fn weights_cover_every_point() {
        let ds = data(1000, 6);
        let cfg = ClusterConfig::new(5, 0);
        let mut job = Job::new(&cfg).unwrap();
        let c: Vec<PointId> = (0..1000).step_by(37).map(PointId::from).collect();
        let w = weigh_sample(&mut job, &ds, &c, 0.2).unwrap();
        assert_eq!(w.iter().sum::<u64>(), 1000);
        // Oracle: nearest sample point by brute force.
        let mut expect = vec![1u64; c.len()];
        for x in ds.ids().filter(|x| !c.contains(x)) {
            let (_, y) = crate::metric::dist_to_set(&ds, x, &c).unwrap();
            expect[c.iter().position(|&p| p == y).unwrap()] += 1;
        }
        assert_eq!(w, expect);
    }

    #[test]
    fn k_is_validated() {
        let ds = data(100, 7);
        let cluster = ClusterConfig::new(4, 0);
        assert!(mapreduce_kcenter(&ds, 0, 0.1, &cluster).is_err());
        assert!(parallel_lloyd(&ds, 101, &LloydConfig::default(), &cluster).is_err());
    }
}
