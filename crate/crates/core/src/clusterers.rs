//! Sequential clustering algorithms and the brute-force optimum.
//!
//! These run on a single (simulated) machine: as baselines, as the
//! algorithm applied to a sample inside the MapReduce pipelines, and as the
//! exact oracle in tests.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::metric::{
    sq_dist, ClusteringSolution, Dataset, ObjectiveKind, PointId, WeightedPointSet,
};
use crate::seed;

/// Points of a subset with coordinates gathered for fast row computations.
struct View<'a> {
    ds: &'a Dataset,
    ids: &'a [PointId],
    coords: Vec<f64>,
    dim: usize,
}

impl<'a> View<'a> {
    fn new(ds: &'a Dataset, ids: &'a [PointId]) -> Self {
        let dim = ds.dim().unwrap_or(0);
        let mut coords = Vec::new();
        if dim > 0 {
            coords.reserve(ids.len() * dim);
            for &id in ids {
                coords.extend_from_slice(ds.coords(id));
            }
        }
        View {
            ds,
            ids,
            coords,
            dim,
        }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    /// Distances from position `c` to every position.
    fn row(&self, c: usize, out: &mut [f64]) {
        if self.dim == 0 {
            let from = self.ids[c];
            for (o, &id) in out.iter_mut().zip(self.ids) {
                *o = self.ds.dist(from, id);
            }
            return;
        }
        let dim = self.dim;
        let center = &self.coords[c * dim..(c + 1) * dim];
        match dim {
            3 => {
                let cc: [f64; 3] = center.try_into().unwrap();
                for (o, p) in out.iter_mut().zip(self.coords.chunks_exact(3)) {
                    let mut s = 0.0;
                    for i in 0..3 {
                        let d = p[i] - cc[i];
                        s += d * d;
                    }
                    *o = s.sqrt();
                }
            }
            _ => {
                for (o, p) in out.iter_mut().zip(self.coords.chunks_exact(dim)) {
                    *o = sq_dist(p, center).sqrt();
                }
            }
        }
    }
}

fn check_k(k: usize, m: usize, what: &str) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::usage(format!("k = {k} must be in [1, {m}] ({what})")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// k-center

/// Farthest-point traversal over all of `V` from a seeded random start.
pub fn gonzalez_kcenter(ds: &Dataset, k: usize, seed: u64) -> Result<ClusteringSolution> {
    let points = ds.all_ids();
    let centers = gonzalez_on(ds, &points, k, seed)?;
    ClusteringSolution::evaluate(ds, &centers, ObjectiveKind::KCenter, None)
}

/// Farthest-point traversal restricted to `points`; returns the centers.
pub fn gonzalez_on(ds: &Dataset, points: &[PointId], k: usize, seed: u64) -> Result<Vec<PointId>> {
    check_k(k, points.len(), "gonzalez")?;
    let start = seed::rng(seed).random_range(0..points.len());
    gonzalez_from(ds, points, k, start)
}

/// Farthest-point traversal starting at `points[start]`.
pub fn gonzalez_from(ds: &Dataset, points: &[PointId], k: usize, start: usize) -> Result<Vec<PointId>> {
    check_k(k, points.len(), "gonzalez")?;
    if start >= points.len() {
        return Err(Error::usage("start position out of range"));
    }
    let view = View::new(ds, points);
    let m = view.len();
    let mut dist = vec![f64::INFINITY; m];
    let mut chosen = vec![false; m];
    let mut row = vec![0.0; m];
    let mut centers = Vec::with_capacity(k);
    let mut next = start;
    for _ in 0..k {
        chosen[next] = true;
        centers.push(points[next]);
        view.row(next, &mut row);
        for (d, &r) in dist.iter_mut().zip(&row) {
            if r < *d {
                *d = r;
            }
        }
        let mut best: Option<usize> = None;
        for j in 0..m {
            if chosen[j] {
                continue;
            }
            best = match best {
                Some(b) if dist[j] < dist[b] || (dist[j] == dist[b] && points[j] > points[b]) => {
                    Some(b)
                }
                _ => Some(j),
            };
        }
        match best {
            Some(b) => next = b,
            None => break,
        }
    }
    Ok(centers)
}

// ---------------------------------------------------------------------------
// k-median local search

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSearchConfig {
    /// A swap is taken only if it brings the cost below this fraction of the
    /// current cost.
    pub improvement_factor: f64,
    /// Cap on accepted swaps; defaults to `10 * |points|`.
    pub max_iterations: Option<usize>,
    pub seed: u64,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig {
            improvement_factor: 0.999,
            max_iterations: None,
            seed: 0,
        }
    }
}

impl LocalSearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        LocalSearchConfig {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSearchOutcome {
    pub solution: ClusteringSolution,
    pub initial_cost: f64,
    pub swaps: usize,
    /// Candidate evaluations performed; each touches every point once.
    pub evaluations: u64,
}

/// Single-swap local search for weighted k-median from a seeded random
/// k-subset.
pub fn local_search_kmedian(
    ds: &Dataset,
    ws: &WeightedPointSet,
    k: usize,
    cfg: &LocalSearchConfig,
) -> Result<ClusteringSolution> {
    Ok(local_search_run(ds, ws, k, cfg)?.solution)
}

pub fn local_search_run(
    ds: &Dataset,
    ws: &WeightedPointSet,
    k: usize,
    cfg: &LocalSearchConfig,
) -> Result<LocalSearchOutcome> {
    check_k(k, ws.len(), "local search")?;
    let mut init = index::sample(&mut seed::rng(cfg.seed), ws.len(), k).into_vec();
    init.sort_unstable();
    local_search_from(ds, ws, &init, cfg)
}

#[derive(Clone, Copy)]
struct Near {
    slot: usize,
    d: f64,
}

struct SwapState {
    medoids: Vec<usize>,
    is_medoid: Vec<bool>,
    near: Vec<Near>,
    second: Vec<Near>,
    loss: Vec<f64>,
    cost: f64,
}

impl SwapState {
    fn new(view: &View<'_>, weights: &[f64], medoids: Vec<usize>) -> Self {
        let m = view.len();
        let mut is_medoid = vec![false; m];
        for &p in &medoids {
            is_medoid[p] = true;
        }
        let far = Near {
            slot: usize::MAX,
            d: f64::INFINITY,
        };
        let mut state = SwapState {
            medoids,
            is_medoid,
            near: vec![far; m],
            second: vec![far; m],
            loss: Vec::new(),
            cost: 0.0,
        };
        let mut row = vec![0.0; m];
        for slot in 0..state.medoids.len() {
            view.row(state.medoids[slot], &mut row);
            for j in 0..m {
                state.offer(j, slot, row[j]);
            }
        }
        state.refresh(weights);
        state
    }

    fn offer(&mut self, j: usize, slot: usize, d: f64) {
        let cand = Near { slot, d };
        if d < self.near[j].d {
            self.second[j] = self.near[j];
            self.near[j] = cand;
        } else if d < self.second[j].d {
            self.second[j] = cand;
        }
    }

    fn refresh(&mut self, weights: &[f64]) {
        let k = self.medoids.len();
        self.loss = vec![0.0; k];
        let mut cost = 0.0;
        for (j, &w) in weights.iter().enumerate() {
            let near = self.near[j];
            cost += w * near.d;
            if k > 1 {
                self.loss[near.slot] += w * (self.second[j].d - near.d);
            }
        }
        self.cost = cost;
    }

    /// Cost change of replacing each medoid slot by `c`; returns the best.
    fn evaluate(&self, weights: &[f64], row: &[f64], delta: &mut [f64]) -> (usize, f64) {
        if self.medoids.len() == 1 {
            let total: f64 = weights.iter().zip(row).map(|(w, d)| w * d).sum();
            return (0, total - self.cost);
        }
        delta.copy_from_slice(&self.loss);
        let mut shared = 0.0;
        for j in 0..row.len() {
            let d = row[j];
            let near = self.near[j];
            if d < near.d {
                shared += weights[j] * (d - near.d);
                delta[near.slot] += weights[j] * (near.d - self.second[j].d);
            } else if d < self.second[j].d {
                delta[near.slot] += weights[j] * (d - self.second[j].d);
            }
        }
        let mut best = 0;
        for i in 1..delta.len() {
            if delta[i] < delta[best] {
                best = i;
            }
        }
        (best, delta[best] + shared)
    }

    fn swap(&mut self, view: &View<'_>, weights: &[f64], slot: usize, c: usize, row: &[f64]) {
        let old = self.medoids[slot];
        self.is_medoid[old] = false;
        self.is_medoid[c] = true;
        self.medoids[slot] = c;
        let k = self.medoids.len();
        let far = Near {
            slot: usize::MAX,
            d: f64::INFINITY,
        };
        let mut stale = Vec::new();
        for j in 0..row.len() {
            if self.near[j].slot == slot || self.second[j].slot == slot {
                stale.push(j);
            } else {
                self.offer(j, slot, row[j]);
            }
        }
        if !stale.is_empty() {
            for &j in &stale {
                self.near[j] = far;
                self.second[j] = far;
            }
            // Recompute affected points against every medoid.
            for s in 0..k {
                let p = self.medoids[s];
                for &j in &stale {
                    let d = if s == slot { row[j] } else { view_dist(view, j, p) };
                    self.offer(j, s, d);
                }
            }
        }
        self.refresh(weights);
    }
}

fn view_dist(view: &View<'_>, a: usize, b: usize) -> f64 {
    if view.dim == 0 {
        view.ds.dist(view.ids[a], view.ids[b])
    } else {
        let dim = view.dim;
        sq_dist(
            &view.coords[a * dim..(a + 1) * dim],
            &view.coords[b * dim..(b + 1) * dim],
        )
        .sqrt()
    }
}

/// Local search from the given initial medoid positions (indices into
/// `ws.points()`).
///
/// Candidates are visited round-robin; for each non-medoid the best medoid
/// to drop is found in one pass over the points and the swap is taken when
/// it beats `improvement_factor * cost`. The search ends after a full cycle
/// without a swap or when the swap cap is reached.
pub fn local_search_from(
    ds: &Dataset,
    ws: &WeightedPointSet,
    initial: &[usize],
    cfg: &LocalSearchConfig,
) -> Result<LocalSearchOutcome> {
    let m = ws.len();
    let k = initial.len();
    check_k(k, m, "local search")?;
    if !(cfg.improvement_factor > 0.0 && cfg.improvement_factor < 1.0) {
        return Err(Error::usage("improvement factor must be in (0, 1)"));
    }
    let mut seen = vec![false; m];
    for &p in initial {
        if p >= m || std::mem::replace(&mut seen[p], true) {
            return Err(Error::usage("initial medoids must be distinct positions"));
        }
    }
    let view = View::new(ds, ws.points());
    let weights: Vec<f64> = ws.weights().iter().map(|&w| w as f64).collect();
    let mut state = SwapState::new(&view, &weights, initial.to_vec());
    let initial_cost = state.cost;
    let max_swaps = cfg.max_iterations.unwrap_or(10 * m);

    let mut row = vec![0.0; m];
    let mut delta = vec![0.0; k];
    let mut swaps = 0;
    let mut evaluations = 0u64;
    let mut idle = 0;
    let mut c = 0;
    while idle < m && swaps < max_swaps {
        if !state.is_medoid[c] {
            view.row(c, &mut row);
            evaluations += 1;
            let (slot, change) = state.evaluate(&weights, &row, &mut delta);
            if state.cost + change < cfg.improvement_factor * state.cost {
                state.swap(&view, &weights, slot, c, &row);
                swaps += 1;
                idle = 0;
            }
        }
        idle += 1;
        c = (c + 1) % m;
    }

    let centers: Vec<PointId> = state.medoids.iter().map(|&p| ws.points()[p]).collect();
    let solution =
        ClusteringSolution::evaluate(ds, &centers, ObjectiveKind::WeightedKMedian, Some(ws))?;
    Ok(LocalSearchOutcome {
        solution,
        initial_cost,
        swaps,
        evaluations,
    })
}

// ---------------------------------------------------------------------------
// Lloyd's algorithm

#[derive(Clone, Debug, PartialEq)]
pub struct LloydConfig {
    pub max_iterations: usize,
    /// Stop once the relative change of the squared-error objective falls
    /// to this value.
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        LloydConfig {
            max_iterations: 100,
            convergence_tol: 1e-9,
            seed: 0,
        }
    }
}

impl LloydConfig {
    pub fn with_seed(seed: u64) -> Self {
        LloydConfig {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LloydRun {
    /// Centers snapped to the nearest input points.
    pub solution: ClusteringSolution,
    /// Final continuous centers, row-major `k x dim`.
    pub means: Vec<f64>,
    /// Assignment passes performed.
    pub iterations: usize,
    /// Weighted sum of squared distances to the means, per pass.
    pub sse_history: Vec<f64>,
    /// Means after each pass.
    pub mean_history: Vec<Vec<f64>>,
}

/// Per-cluster sums from one assignment pass over some of the points.
/// Partials from disjoint point sets merge exactly.
#[derive(Clone, Debug)]
pub(crate) struct LloydPartial {
    sums: Vec<ExactSum>,
    weights: Vec<u64>,
    sse: ExactSum,
    dim: usize,
}

impl LloydPartial {
    pub(crate) fn new(k: usize, dim: usize) -> Self {
        LloydPartial {
            sums: vec![ExactSum::new(); k * dim],
            weights: vec![0; k],
            sse: ExactSum::new(),
            dim,
        }
    }

    /// Assigns each point to its nearest mean (ties to the lower index).
    pub(crate) fn accumulate<I>(&mut self, ds: &Dataset, points: I, means: &[f64])
    where
        I: IntoIterator<Item = (PointId, u64)>,
    {
        let dim = self.dim;
        for (p, w) in points {
            let x = ds.coords(p);
            let mut best = 0;
            let mut best_sq = f64::INFINITY;
            for (c, mean) in means.chunks_exact(dim).enumerate() {
                let sq = sq_dist(x, mean);
                if sq < best_sq {
                    best_sq = sq;
                    best = c;
                }
            }
            let wf = w as f64;
            for (j, &xj) in x.iter().enumerate() {
                self.sums[best * dim + j].add_product(wf, xj);
            }
            self.weights[best] += w;
            self.sse.add_product(wf, best_sq);
        }
    }

    pub(crate) fn merge(&mut self, other: &LloydPartial) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        self.sse.merge(&other.sse);
    }

    pub(crate) fn sse(&self) -> f64 {
        self.sse.value()
    }

    /// Weighted means; clusters that received no points keep their mean.
    pub(crate) fn means(&self, old: &[f64]) -> Vec<f64> {
        let dim = self.dim;
        let mut out = old.to_vec();
        for (c, &w) in self.weights.iter().enumerate() {
            if w > 0 {
                for j in 0..dim {
                    out[c * dim + j] = self.sums[c * dim + j].value() / w as f64;
                }
            }
        }
        out
    }

    /// Words needed to ship this partial: a sum per coordinate and a count
    /// per cluster, plus the error term.
    pub(crate) fn words(&self) -> u64 {
        (self.sums.len() + self.weights.len() + 1) as u64
    }
}

/// The iteration shared by sequential and parallel Lloyd: `step` performs
/// one assignment pass against the given means.
pub(crate) fn lloyd_iterate<F>(
    initial: Vec<f64>,
    cfg: &LloydConfig,
    mut step: F,
) -> Result<(Vec<f64>, usize, Vec<f64>, Vec<Vec<f64>>)>
where
    F: FnMut(&[f64]) -> Result<LloydPartial>,
{
    let mut means = initial;
    let mut sse_history = Vec::new();
    let mut mean_history = Vec::new();
    let mut iterations = 0;
    loop {
        let partial = step(&means)?;
        let sse = partial.sse();
        means = partial.means(&means);
        mean_history.push(means.clone());
        iterations += 1;
        let converged = sse == 0.0
            || sse_history
                .last()
                .is_some_and(|&prev: &f64| (prev - sse).abs() <= cfg.convergence_tol * prev);
        sse_history.push(sse);
        if converged || iterations >= cfg.max_iterations.max(1) {
            break;
        }
    }
    Ok((means, iterations, sse_history, mean_history))
}

/// Nearest point of `points` to each mean (ties to the smaller id),
/// deduplicated and sorted.
pub(crate) fn snap_means(ds: &Dataset, points: &[PointId], means: &[f64], dim: usize) -> Vec<PointId> {
    let mut best: Vec<(f64, PointId)> = vec![(f64::INFINITY, PointId(u32::MAX)); means.len() / dim];
    snap_into(ds, points, means, dim, &mut best);
    finish_snap(best)
}

pub(crate) fn snap_into(ds: &Dataset, points: &[PointId], means: &[f64], dim: usize, best: &mut [(f64, PointId)]) {
    for &p in points {
        let x = ds.coords(p);
        for (c, mean) in means.chunks_exact(dim).enumerate() {
            let d = sq_dist(x, mean).sqrt();
            if d < best[c].0 || (d == best[c].0 && p < best[c].1) {
                best[c] = (d, p);
            }
        }
    }
}

pub(crate) fn finish_snap(best: Vec<(f64, PointId)>) -> Vec<PointId> {
    let mut centers: Vec<PointId> = best.into_iter().map(|(_, p)| p).collect();
    centers.sort_unstable();
    centers.dedup();
    centers
}

pub(crate) fn initial_means(ds: &Dataset, points: &[PointId], k: usize, seed: u64) -> Result<Vec<f64>> {
    check_k(k, points.len(), "lloyd")?;
    let mut picks = index::sample(&mut seed::rng(seed), points.len(), k).into_vec();
    picks.sort_unstable();
    Ok(picks
        .into_iter()
        .flat_map(|i| ds.coords(points[i]).to_vec())
        .collect())
}

fn require_euclidean(ds: &Dataset) -> Result<usize> {
    ds.dim()
        .ok_or_else(|| Error::usage("Lloyd's algorithm needs a euclidean dataset"))
}

/// Lloyd's algorithm with centers snapped to input points. Without weights
/// it clusters all of `V` under the k-median objective; with weights it
/// clusters the weighted set under the weighted objective.
pub fn lloyd_kmedian(
    ds: &Dataset,
    weights: Option<&WeightedPointSet>,
    k: usize,
    cfg: &LloydConfig,
) -> Result<ClusteringSolution> {
    let all;
    let ws = match weights {
        Some(ws) => ws,
        None => {
            all = WeightedPointSet::all(ds);
            &all
        }
    };
    let run = lloyd_run(ds, ws, k, cfg)?;
    if weights.is_none() {
        return ClusteringSolution::evaluate(ds, &run.solution.centers, ObjectiveKind::KMedian, None);
    }
    Ok(run.solution)
}

pub fn lloyd_run(ds: &Dataset, ws: &WeightedPointSet, k: usize, cfg: &LloydConfig) -> Result<LloydRun> {
    require_euclidean(ds)?;
    let init = initial_means(ds, ws.points(), k, cfg.seed)?;
    lloyd_run_from(ds, ws, init, cfg)
}

pub fn lloyd_run_from(
    ds: &Dataset,
    ws: &WeightedPointSet,
    initial: Vec<f64>,
    cfg: &LloydConfig,
) -> Result<LloydRun> {
    let dim = require_euclidean(ds)?;
    if initial.is_empty() || initial.len() % dim != 0 {
        return Err(Error::usage("initial means must be a non-empty k x dim array"));
    }
    if ws.is_empty() {
        return Err(Error::usage("no points to cluster"));
    }
    let k = initial.len() / dim;
    let (means, iterations, sse_history, mean_history) = lloyd_iterate(initial, cfg, |means| {
        let mut partial = LloydPartial::new(k, dim);
        partial.accumulate(ds, ws.iter(), means);
        Ok(partial)
    })?;
    let centers = snap_means(ds, ws.points(), &means, dim);
    let solution = ClusteringSolution::evaluate(ds, &centers, ObjectiveKind::WeightedKMedian, Some(ws))?;
    Ok(LloydRun {
        solution,
        means,
        iterations,
        sse_history,
        mean_history,
    })
}

// ---------------------------------------------------------------------------
// Exhaustive optimum

/// Largest number of k-subsets the exhaustive search will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact optimum over all k-subsets of the candidate points: all of `V`,
/// or the weighted set for the weighted objective.
pub fn brute_force_opt(
    ds: &Dataset,
    k: usize,
    kind: ObjectiveKind,
    weights: Option<&WeightedPointSet>,
) -> Result<ClusteringSolution> {
    let all;
    let ws = match (kind, weights) {
        (ObjectiveKind::WeightedKMedian, Some(ws)) => ws,
        (ObjectiveKind::WeightedKMedian, None) => {
            return Err(Error::usage("weighted objective requires weights"))
        }
        (_, Some(_)) => {
            return Err(Error::usage(format!("weights given with unweighted objective {kind}")))
        }
        (_, None) => {
            all = WeightedPointSet::all(ds);
            &all
        }
    };
    let m = ws.len();
    check_k(k, m, "brute force")?;
    let count = binomial(m, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::usage(format!(
            "C({m}, {k}) = {count} subsets exceeds the limit of {BRUTE_FORCE_LIMIT}"
        )));
    }
    let view = View::new(ds, ws.points());
    let w: Vec<f64> = ws.weights().iter().map(|&x| x as f64).collect();
    let matrix = (m <= 2048).then(|| {
        let mut mat = vec![0.0; m * m];
        for (c, row) in mat.chunks_exact_mut(m).enumerate() {
            view.row(c, row);
        }
        mat
    });
    let mut search = Exhaustive {
        view: &view,
        matrix,
        weights: &w,
        max_objective: kind == ObjectiveKind::KCenter,
        k,
        chosen: Vec::with_capacity(k),
        best_cost: f64::INFINITY,
        best: Vec::new(),
        scratch: vec![vec![0.0; m]; k + 1],
    };
    search.scratch[0].fill(f64::INFINITY);
    search.descend(0, 0);
    let centers: Vec<PointId> = search.best.iter().map(|&p| ws.points()[p]).collect();
    ClusteringSolution::evaluate(ds, &centers, kind, weights)
}

struct Exhaustive<'a> {
    view: &'a View<'a>,
    matrix: Option<Vec<f64>>,
    weights: &'a [f64],
    max_objective: bool,
    k: usize,
    chosen: Vec<usize>,
    best_cost: f64,
    best: Vec<usize>,
    /// `scratch[d]` holds distances to the nearest of the first `d` chosen.
    scratch: Vec<Vec<f64>>,
}

impl Exhaustive<'_> {
    fn row_into(&self, c: usize, out: &mut [f64]) {
        match &self.matrix {
            Some(mat) => {
                let m = out.len();
                out.copy_from_slice(&mat[c * m..(c + 1) * m]);
            }
            None => self.view.row(c, out),
        }
    }

    fn descend(&mut self, depth: usize, start: usize) {
        let m = self.view.len();
        let mut row = vec![0.0; m];
        for c in start..=m - (self.k - depth) {
            self.row_into(c, &mut row);
            self.chosen.push(c);
            if depth + 1 == self.k {
                let cur = &self.scratch[depth];
                let cost = if self.max_objective {
                    cur.iter().zip(&row).map(|(a, b)| a.min(*b)).fold(0.0, f64::max)
                } else {
                    cur.iter()
                        .zip(&row)
                        .zip(self.weights)
                        .map(|((a, b), w)| w * a.min(*b))
                        .sum()
                };
                if cost < self.best_cost {
                    self.best_cost = cost;
                    self.best = self.chosen.clone();
                }
            } else {
                let (lo, hi) = self.scratch.split_at_mut(depth + 1);
                for ((n, &a), &b) in hi[0].iter_mut().zip(&lo[depth]).zip(&row) {
                    *n = a.min(b);
                }
                self.descend(depth + 1, c + 1);
            }
            self.chosen.pop();
        }
    }
}

use rand::Rng as _;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::evaluate;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> Dataset {
        Dataset::euclidean(1, xs.to_vec()).unwrap()
    }

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    /// Independent oracle: every k-subset through the public evaluator.
    fn enumerate_opt(ds: &Dataset, k: usize, kind: ObjectiveKind) -> f64 {
        fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<PointId>, f: &mut dyn FnMut(&[PointId])) {
            if cur.len() == k {
                f(cur);
                return;
            }
            for c in start..n {
                cur.push(PointId::from(c));
                rec(n, k, c + 1, cur, f);
                cur.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(ds.len(), k, 0, &mut Vec::new(), &mut |s| {
            best = best.min(evaluate(ds, s, kind, None).unwrap());
        });
        best
    }

    #[test]
    fn line_optima() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(enumerate_opt(&ds, 2, ObjectiveKind::KMedian), 2.0);
        assert_eq!(enumerate_opt(&ds, 2, ObjectiveKind::KCenter), 1.0);
        let med = brute_force_opt(&ds, 2, ObjectiveKind::KMedian, None).unwrap();
        assert_eq!(med.objective, 2.0);
        let cen = brute_force_opt(&ds, 2, ObjectiveKind::KCenter, None).unwrap();
        assert_eq!(cen.objective, 1.0);
        assert_eq!(brute_force_opt(&ds, 4, ObjectiveKind::KMedian, None).unwrap().objective, 0.0);
    }

    #[test]
    fn brute_force_guard() {
        let ds = line(&(0..200).map(f64::from).collect::<Vec<_>>());
        assert_eq!(binomial(200, 4), 64_684_950);
        assert!(matches!(
            brute_force_opt(&ds, 4, ObjectiveKind::KMedian, None),
            Err(Error::Usage(_))
        ));
        assert!(brute_force_opt(&ds, 3, ObjectiveKind::KMedian, None).is_ok());
        assert!(brute_force_opt(&ds, 0, ObjectiveKind::KMedian, None).is_err());
    }

    #[test]
    fn gonzalez_examples() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0]);
        let all = ds.all_ids();
        assert_eq!(gonzalez_from(&ds, &all, 2, 0).unwrap(), ids(&[0, 3]));
        assert_eq!(evaluate(&ds, &ids(&[0, 3]), ObjectiveKind::KCenter, None).unwrap(), 1.0);

        let full = gonzalez_kcenter(&ds, 4, 7).unwrap();
        assert_eq!(full.objective, 0.0);
        assert_eq!(full.centers.len(), 4);

        let one = gonzalez_from(&ds, &all, 1, 2).unwrap();
        assert_eq!(one, ids(&[2]));
        assert_eq!(evaluate(&ds, &one, ObjectiveKind::KCenter, None).unwrap(), 10.0);
        assert!(gonzalez_kcenter(&ds, 5, 0).is_err());
    }

    #[test]
    fn gonzalez_with_duplicate_points_picks_distinct_centers() {
        let ds = line(&[0.0, 0.0, 0.0]);
        let c = gonzalez_from(&ds, &ds.all_ids(), 3, 1).unwrap();
        assert_eq!(c, ids(&[1, 0, 2]));
    }

    #[test]
    fn local_search_line_from_bad_start() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0]);
        let ws = WeightedPointSet::all(&ds);
        let out = local_search_from(&ds, &ws, &[0, 1], &LocalSearchConfig::default()).unwrap();
        assert_eq!(out.initial_cost, 19.0);
        assert_eq!(out.solution.objective, 2.0);
        // Every 2-subset start reaches the optimum on this instance.
        for a in 0..4 {
            for b in a + 1..4 {
                let out = local_search_from(&ds, &ws, &[a, b], &LocalSearchConfig::default()).unwrap();
                assert_eq!(out.solution.objective, 2.0, "start {a},{b}");
            }
        }
    }

    #[test]
    fn local_search_with_k_equal_to_size() {
        let ds = line(&[0.0, 1.0, 10.0]);
        let ws = WeightedPointSet::all(&ds);
        let out = local_search_run(&ds, &ws, 3, &LocalSearchConfig::default()).unwrap();
        assert_eq!(out.solution.objective, 0.0);
        assert_eq!(out.swaps, 0);
        assert!(local_search_kmedian(&ds, &ws, 4, &LocalSearchConfig::default()).is_err());
    }

    #[test]
    fn weighted_path_prefers_heavy_end() {
        // Path a - b - c with unit edges; weights 5, 1, 1.
        let ds = line(&[0.0, 1.0, 2.0]);
        let ws = WeightedPointSet::new(ds.all_ids(), vec![5, 1, 1]).unwrap();
        for (c, expected) in [(0u32, 3.0), (1, 6.0), (2, 11.0)] {
            let cost =
                evaluate(&ds, &[PointId(c)], ObjectiveKind::WeightedKMedian, Some(&ws)).unwrap();
            assert_eq!(cost, expected);
        }
        for seed in 0..5 {
            let sol = local_search_kmedian(&ds, &ws, 1, &LocalSearchConfig::with_seed(seed)).unwrap();
            assert_eq!(sol.centers, ids(&[0]));
            assert_eq!(sol.objective, 3.0);
        }
        let opt = brute_force_opt(&ds, 1, ObjectiveKind::WeightedKMedian, Some(&ws)).unwrap();
        assert_eq!(opt.centers, ids(&[0]));
    }

    #[test]
    fn lloyd_fixed_point() {
        let ds = Dataset::from_points(&[vec![0.0, 0.0], vec![5.0, 5.0], vec![0.0, 0.0]]).unwrap();
        let ws = WeightedPointSet::all(&ds);
        let run = lloyd_run_from(&ds, &ws, vec![0.0, 0.0, 5.0, 5.0], &LloydConfig::default()).unwrap();
        assert_eq!(run.iterations, 1);
        assert_eq!(run.sse_history, vec![0.0]);
        assert_eq!(run.solution.objective, 0.0);
    }

    #[test]
    fn lloyd_two_clusters() {
        let ds = Dataset::from_points(&[
            vec![0.0, 0.0],
            vec![0.0, 0.1],
            vec![10.0, 10.0],
            vec![10.0, 10.1],
        ])
        .unwrap();
        let ws = WeightedPointSet::all(&ds);
        let opt = brute_force_opt(&ds, 2, ObjectiveKind::KMedian, None).unwrap();
        for init in [[0usize, 1], [0, 2], [1, 3], [2, 3]] {
            let means: Vec<f64> = init.iter().flat_map(|&i| ds.coords(PointId::from(i)).to_vec()).collect();
            let run = lloyd_run_from(&ds, &ws, means, &LloydConfig::default()).unwrap();
            let mut m = run.means.chunks(2).map(|c| (c[0], c[1])).collect::<Vec<_>>();
            m.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((m[0].0 - 0.0).abs() < 1e-12 && (m[0].1 - 0.05).abs() < 1e-12, "{m:?}");
            assert!((m[1].0 - 10.0).abs() < 1e-12 && (m[1].1 - 10.05).abs() < 1e-12, "{m:?}");
            assert_eq!(run.solution.objective, opt.objective);
        }
    }

    #[test]
    fn lloyd_is_deterministic_and_needs_coordinates() {
        let ds = crate::datagen::generate(&crate::datagen::DataGenConfig {
            n: 2000,
            k_true: 5,
            seed: 1,
            ..Default::default()
        });
        let ws = WeightedPointSet::all(&ds);
        let a = lloyd_run(&ds, &ws, 5, &LloydConfig::with_seed(3)).unwrap();
        let b = lloyd_run(&ds, &ws, 5, &LloydConfig::with_seed(3)).unwrap();
        assert_eq!(a, b);
        let explicit = Dataset::explicit(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(lloyd_kmedian(&explicit, None, 1, &LloydConfig::default()).is_err());
    }

    fn small_instance() -> impl Strategy<Value = (Vec<Vec<f64>>, usize)> {
        (6usize..16, 1usize..4).prop_flat_map(|(n, k)| {
            (prop::collection::vec(prop::collection::vec(0.0f64..10.0, 2), n), Just(k))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn brute_force_matches_enumeration((pts, k) in small_instance()) {
            let ds = Dataset::from_points(&pts).unwrap();
            for kind in [ObjectiveKind::KMedian, ObjectiveKind::KCenter] {
                let fast = brute_force_opt(&ds, k, kind, None).unwrap().objective;
                let slow = enumerate_opt(&ds, k, kind);
                prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0));
            }
        }

        #[test]
        fn solutions_reevaluate_exactly((pts, k) in small_instance(), seed in any::<u64>()) {
            let ds = Dataset::from_points(&pts).unwrap();
            let ws = WeightedPointSet::all(&ds);
            let g = gonzalez_kcenter(&ds, k, seed).unwrap();
            prop_assert_eq!(g.objective, evaluate(&ds, &g.centers, ObjectiveKind::KCenter, None).unwrap());
            let ls = local_search_kmedian(&ds, &ws, k, &LocalSearchConfig::with_seed(seed)).unwrap();
            prop_assert_eq!(ls.objective, evaluate(&ds, &ls.centers, ObjectiveKind::WeightedKMedian, Some(&ws)).unwrap());
            prop_assert_eq!(ls.objective, evaluate(&ds, &ls.centers, ObjectiveKind::KMedian, None).unwrap());
            let ll = lloyd_kmedian(&ds, None, k, &LloydConfig::with_seed(seed)).unwrap();
            prop_assert_eq!(ll.objective, evaluate(&ds, &ll.centers, ObjectiveKind::KMedian, None).unwrap());
            // Assignments attain the distance to the center set.
            for (x, &c) in ds.ids().zip(&ls.assignment) {
                let (d, nearest) = crate::metric::dist_to_set(&ds, x, &ls.centers).unwrap();
                prop_assert_eq!(c, nearest);
                prop_assert_eq!(ds.dist(x, c), d);
            }
        }

        #[test]
        fn lloyd_error_never_increases(pts in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 3), 10..200), k in 1usize..6, seed in any::<u64>()) {
            let ds = Dataset::from_points(&pts).unwrap();
            let ws = WeightedPointSet::all(&ds);
            let run = lloyd_run(&ds, &ws, k.min(pts.len()), &LloydConfig::with_seed(seed)).unwrap();
            for w in run.sse_history.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", run.sse_history);
            }
        }

        #[test]
        fn local_search_beats_the_single_swap_bound((pts, k) in small_instance(), seed in any::<u64>()) {
            let ds = Dataset::from_points(&pts).unwrap();
            let ws = WeightedPointSet::all(&ds);
            let opt = brute_force_opt(&ds, k, ObjectiveKind::KMedian, None).unwrap().objective;
            let ls = local_search_kmedian(&ds, &ws, k, &LocalSearchConfig::with_seed(seed)).unwrap();
            prop_assert!(ls.objective <= 5.0 * opt + 1e-9);
            let g = gonzalez_kcenter(&ds, k, seed).unwrap();
            let opt_c = brute_force_opt(&ds, k, ObjectiveKind::KCenter, None).unwrap().objective;
            prop_assert!(g.objective <= 2.0 * opt_c + 1e-9);
        }
    }
}
