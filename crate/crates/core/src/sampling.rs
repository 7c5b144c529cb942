//! Iterative sampling: shrink the point set to a small sample that
//! represents every point well, sequentially or as MapReduce rounds.
//!
//! Each iteration adds a random sample to `S`, draws a probe set `H`, picks
//! the pivot of `H` (the point at position `ceil(8 log2 n)` when `H` is
//! ordered by distance to `S`, farthest first) and drops from `R` every
//! point strictly closer to `S` than the pivot. The loop runs while
//! `|R| > (4/eps) k n^eps log2 n` and the result is `S ∪ R`.
//!
//! Coin flips are a pure function of (seed, iteration, point id), so the
//! sequential and MapReduce versions draw identical samples however the
//! points are partitioned.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metric::{dist_to_set, Dataset, PointBlock, PointId};
use crate::mr::{partition_arbitrary, ClusterConfig, Job, JobTrace, KeyValue};
use crate::seed;

const STREAM_SAMPLE: u64 = 1;
const STREAM_PROBE: u64 = 2;
const STREAM_PROBE_RETRY: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleConfig {
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    /// Overrides the default stall bound of `10 * ceil(1/eps)` iterations.
    pub stall_limit: Option<usize>,
}

impl SampleConfig {
    pub fn new(k: usize, epsilon: f64, seed: u64) -> Self {
        SampleConfig {
            k,
            epsilon,
            seed,
            stall_limit: None,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::usage(format!("k = {} must be in [1, {n}]", self.k)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::usage(format!(
                "epsilon = {} must be in (0, 0.5)",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// `n^eps * log2 n`, the factor shared by every threshold.
    fn scale(&self, n: usize) -> f64 {
        let n = n as f64;
        n.powf(self.epsilon) * n.log2()
    }

    /// The loop runs while `|R|` exceeds this.
    pub fn size_guard(&self, n: usize) -> f64 {
        4.0 / self.epsilon * self.k as f64 * self.scale(n)
    }

    /// Per-point probability of joining `S`, clamped to 1.
    pub fn sample_probability(&self, n: usize, remaining: usize) -> f64 {
        (9.0 * self.k as f64 * self.scale(n) / remaining as f64).min(1.0)
    }

    /// Per-point probability of joining `H`, clamped to 1.
    pub fn probe_probability(&self, n: usize, remaining: usize) -> f64 {
        (4.0 * self.scale(n) / remaining as f64).min(1.0)
    }

    /// Safety bound after which a still-running loop is reported as stalled.
    pub fn max_iterations(&self) -> usize {
        self.stall_limit
            .unwrap_or(10 * (1.0 / self.epsilon).ceil() as usize)
    }
}

/// Position (1-based, farthest first) of the pivot: `ceil(8 log2 n)`.
pub fn pivot_rank(n: usize) -> usize {
    ((8.0 * (n as f64).log2()).ceil() as usize).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleOutcome {
    /// `C = S ∪ R`, sorted by id.
    pub sample: Vec<PointId>,
    pub iterations: usize,
    /// `|R|` before the first iteration and after each one.
    pub r_sizes: Vec<usize>,
    /// `|S|` before the first iteration and after each one.
    pub s_sizes: Vec<usize>,
}

impl SampleOutcome {
    fn whole(n: usize) -> Self {
        SampleOutcome {
            sample: (0..n).map(PointId::from).collect(),
            iterations: 0,
            r_sizes: vec![n],
            s_sizes: vec![0],
        }
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    /// `iteration,r_size,s_size`, one row per recorded state.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,r_size,s_size\n");
        for (i, (r, s)) in self.r_sizes.iter().zip(&self.s_sizes).enumerate() {
            let _ = writeln!(out, "{i},{r},{s}");
        }
        out
    }
}

/// Orders `H` by distance to `S` (farthest first, ties by id) and returns
/// the point at position `min(ceil(8 log2 n), |H|)`.
pub fn select_pivot(ds: &Dataset, probes: &[PointId], sample: &[PointId], n: usize) -> Result<PointId> {
    if probes.is_empty() {
        return Err(Error::usage("pivot selection from an empty probe set"));
    }
    if sample.is_empty() {
        return Err(Error::usage("pivot selection against an empty sample"));
    }
    let ranked = probes
        .iter()
        .map(|&h| dist_to_set(ds, h, sample).map(|(d, _)| (d, h)))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_ranked(ranked, n).1)
}

fn select_ranked(mut ranked: Vec<(f64, PointId)>, n: usize) -> (f64, PointId) {
    ranked.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let rank = pivot_rank(n).min(ranked.len());
    ranked[rank - 1]
}

#[derive(Debug, Default)]
struct Draw {
    sampled: Vec<PointId>,
    probes: Vec<PointId>,
    probes_retry: Vec<PointId>,
}

impl Draw {
    fn words(&self) -> u64 {
        (self.sampled.len() + self.probes.len() + self.probes_retry.len()) as u64
    }

    fn absorb(&mut self, other: Draw) {
        self.sampled.extend(other.sampled);
        self.probes.extend(other.probes);
        self.probes_retry.extend(other.probes_retry);
    }

    /// The probe set, falling back to the doubled-probability redraw.
    fn into_parts(mut self) -> (Vec<PointId>, Vec<PointId>) {
        self.sampled.sort_unstable();
        let mut probes = if self.probes.is_empty() {
            self.probes_retry
        } else {
            self.probes
        };
        probes.sort_unstable();
        (self.sampled, probes)
    }
}

fn flip_coins(seed: u64, iteration: usize, points: &[PointId], p_sample: f64, p_probe: f64) -> Draw {
    let it = iteration as u64;
    let p_retry = (2.0 * p_probe).min(1.0);
    let mut draw = Draw::default();
    for &x in points {
        let id = u64::from(x.0);
        if seed::coin(seed, STREAM_SAMPLE, it, id) < p_sample {
            draw.sampled.push(x);
        }
        if seed::coin(seed, STREAM_PROBE, it, id) < p_probe {
            draw.probes.push(x);
        }
        if seed::coin(seed, STREAM_PROBE_RETRY, it, id) < p_retry {
            draw.probes_retry.push(x);
        }
    }
    draw
}

fn membership(n: usize, points: &[PointId]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for p in points {
        mask[p.index()] = true;
    }
    mask
}

fn finish(mut s: Vec<PointId>, r: Vec<PointId>, iterations: usize, r_sizes: Vec<usize>, s_sizes: Vec<usize>) -> SampleOutcome {
    s.extend(r);
    s.sort_unstable();
    SampleOutcome {
        sample: s,
        iterations,
        r_sizes,
        s_sizes,
    }
}

/// Sequential iterative sampling.
pub fn iterative_sample(ds: &Dataset, cfg: &SampleConfig) -> Result<SampleOutcome> {
    let n = ds.len();
    cfg.validate(n)?;
    if n <= 1 {
        return Ok(SampleOutcome::whole(n));
    }
    let guard = cfg.size_guard(n);
    let mut remaining = ds.all_ids();
    // d(x, S) for every x still in R, maintained as S grows.
    let mut dist = vec![f64::INFINITY; n];
    let mut sampled: Vec<PointId> = Vec::new();
    let mut r_sizes = vec![n];
    let mut s_sizes = vec![0];
    let mut iteration = 0;

    while remaining.len() as f64 > guard {
        iteration += 1;
        if iteration > cfg.max_iterations() {
            return Err(Error::Stall {
                iterations: iteration - 1,
                remaining: remaining.len(),
            });
        }
        let p_sample = cfg.sample_probability(n, remaining.len());
        let p_probe = cfg.probe_probability(n, remaining.len());
        let (fresh, probes) = flip_coins(cfg.seed, iteration, &remaining, p_sample, p_probe).into_parts();

        let fresh_block = PointBlock::new(ds, fresh.clone());
        for &x in &remaining {
            let d = fresh_block.min_dist(ds, x);
            if d < dist[x.index()] {
                dist[x.index()] = d;
            }
        }
        let is_fresh = membership(n, &fresh);
        sampled.extend_from_slice(&fresh);

        let pivot = (!probes.is_empty() && !sampled.is_empty()).then(|| {
            select_ranked(probes.iter().map(|&h| (dist[h.index()], h)).collect(), n).0
        });
        remaining.retain(|x| {
            !is_fresh[x.index()] && !pivot.is_some_and(|p| dist[x.index()] < p)
        });
        r_sizes.push(remaining.len());
        s_sizes.push(sampled.len());
    }
    Ok(finish(sampled, remaining, iteration, r_sizes, s_sizes))
}

/// Iterative sampling as MapReduce rounds: three rounds per iteration
/// (coin flips, pivot selection, filtering).
pub fn mr_iterative_sample(
    ds: &Dataset,
    cfg: &SampleConfig,
    cluster: &ClusterConfig,
) -> Result<(SampleOutcome, JobTrace)> {
    let mut job = Job::new(cluster)?;
    let outcome = sample_rounds(&mut job, ds, cfg)?;
    Ok((outcome, job.finish()))
}

/// Number of parts when the mappers split `items` into groups of about
/// `group` points, capped by the machine count.
fn part_count(items: usize, parts_wanted: f64, machines: usize) -> usize {
    (parts_wanted.ceil() as usize).clamp(1, machines.max(1)).min(items.max(1))
}

pub(crate) fn sample_rounds(job: &mut Job<'_>, ds: &Dataset, cfg: &SampleConfig) -> Result<SampleOutcome> {
    let n = ds.len();
    cfg.validate(n)?;
    if n <= 1 {
        return Ok(SampleOutcome::whole(n));
    }
    let guard = cfg.size_guard(n);
    let n_eps = (n as f64).powf(cfg.epsilon);
    let mut remaining = ds.all_ids();
    let mut sampled: Vec<PointId> = Vec::new();
    let mut r_sizes = vec![n];
    let mut s_sizes = vec![0];
    let mut iteration = 0;

    while remaining.len() as f64 > guard {
        iteration += 1;
        if iteration > cfg.max_iterations() {
            return Err(Error::Stall {
                iterations: iteration - 1,
                remaining: remaining.len(),
            });
        }
        let r_len = remaining.len();
        let p_sample = cfg.sample_probability(n, r_len);
        let p_probe = cfg.probe_probability(n, r_len);

        // Round 1: groups of about n^eps points flip their coins.
        let parts = part_count(r_len, r_len as f64 / n_eps, job.machines());
        let inputs = partition_arbitrary(remaining.clone(), parts, job.mapper_seed(1))
            .into_iter()
            .enumerate()
            .map(|(i, part)| {
                let words = part.len() as u64;
                KeyValue::new(i, part, words)
            })
            .collect();
        let seed = cfg.seed;
        let draws = job.round(inputs, |ctx, parts: Vec<Vec<PointId>>| {
            let mut draw = Draw::default();
            for part in &parts {
                ctx.charge(part.len() as u64);
                draw.absorb(flip_coins(seed, iteration, part, p_sample, p_probe));
            }
            let words = draw.words();
            Ok(vec![KeyValue::new(0, draw, words)])
        })?;
        let mut draw = Draw::default();
        for kv in draws {
            draw.absorb(kv.value);
        }
        let (fresh, probes) = draw.into_parts();
        let is_fresh = membership(n, &fresh);
        sampled.extend_from_slice(&fresh);
        sampled.sort_unstable();
        let s_block = PointBlock::new(ds, sampled.clone());
        let s_len = sampled.len() as u64;

        // Round 2: H, S and the H-to-S distances on one machine.
        let pivot = if probes.is_empty() || sampled.is_empty() {
            None
        } else {
            let h_len = probes.len() as u64;
            let words = h_len + s_len + h_len * s_len;
            let out = job.round(vec![KeyValue::new(0, probes, words)], |ctx, mut vals| {
                let probes = vals.pop().expect("one input");
                ctx.charge(probes.len() as u64 * s_block.len() as u64);
                let ranked = probes.iter().map(|&h| (s_block.min_dist(ds, h), h)).collect();
                let (d, _) = select_ranked(ranked, n);
                Ok(vec![KeyValue::new(0, d, 1)])
            })?;
            Some(out[0].value)
        };

        // Round 3: about n^(1-eps) groups drop the points closer to S than
        // the pivot.
        let parts = part_count(r_len, n as f64 / n_eps, job.machines());
        let inputs = partition_arbitrary(std::mem::take(&mut remaining), parts, job.mapper_seed(3))
            .into_iter()
            .enumerate()
            .map(|(i, part)| {
                let r = part.len() as u64;
                KeyValue::new(i, part, r + s_len + r * s_len + 1)
            })
            .collect();
        let kept = job.round(inputs, |ctx, parts: Vec<Vec<PointId>>| {
            let mut keep = Vec::new();
            for part in parts {
                ctx.charge(part.len() as u64 * s_len);
                keep.extend(part.into_iter().filter(|x| {
                    !is_fresh[x.index()]
                        && !pivot.is_some_and(|p| s_block.min_dist(ds, *x) < p)
                }));
            }
            let words = keep.len() as u64;
            Ok(vec![KeyValue::new(0, keep, words)])
        })?;
        remaining = kept.into_iter().flat_map(|kv| kv.value).collect();
        remaining.sort_unstable();
        r_sizes.push(remaining.len());
        s_sizes.push(sampled.len());
    }
    Ok(finish(sampled, remaining, iteration, r_sizes, s_sizes))
}
