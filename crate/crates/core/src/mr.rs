//! A deterministic, single-process MapReduce simulator.
//!
//! A round takes key-value pairs whose keys are machine addresses, groups
//! them by key and runs the reducer once per machine. Every pair declares
//! its size in words (one word per stored distance, point id or weight), so
//! per-machine memory can be accounted and capped without materializing
//! the data a real cluster would ship. Simulated time for a round is the
//! time of its slowest machine; shuffle time is not modelled.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

/// Nominal cost of touching one word in word-count time mode.
pub const SECONDS_PER_WORD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct KeyValue<V> {
    pub key: usize,
    pub value: V,
    pub words: u64,
}

impl<V> KeyValue<V> {
    pub fn new(key: usize, value: V, words: u64) -> Self {
        KeyValue {
            key,
            value,
            words: words.max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TimeMode {
    /// Measured wall time of each reducer invocation.
    #[default]
    WallClock,
    /// `(input words + reported work) * SECONDS_PER_WORD`; fully reproducible.
    WordCount,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterConfig {
    pub machines: usize,
    pub memory_cap_words: Option<u64>,
    pub seed: u64,
    pub time_mode: TimeMode,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            machines: 100,
            memory_cap_words: None,
            seed: 0,
            time_mode: TimeMode::WallClock,
        }
    }
}

impl ClusterConfig {
    pub fn new(machines: usize, seed: u64) -> Self {
        ClusterConfig {
            machines,
            seed,
            ..Default::default()
        }
    }

    pub fn with_time_mode(mut self, mode: TimeMode) -> Self {
        self.time_mode = mode;
        self
    }

    pub fn with_memory_cap(mut self, cap: u64) -> Self {
        self.memory_cap_words = Some(cap);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.machines == 0 {
            return Err(Error::usage("cluster needs at least one machine"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MachineStats {
    pub machine: usize,
    pub input_words: u64,
    /// High-water mark of memory on the machine, input included.
    pub peak_words: u64,
    /// Work reported by the reducer, in words touched.
    pub work_words: u64,
    pub time_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrace {
    pub round: usize,
    pub machines: Vec<MachineStats>,
    pub max_machine_time: f64,
    pub max_machine_memory: u64,
}

impl RoundTrace {
    fn new(round: usize, machines: Vec<MachineStats>) -> Self {
        let max_machine_time = machines.iter().map(|m| m.time_seconds).fold(0.0, f64::max);
        let max_machine_memory = machines.iter().map(|m| m.peak_words).max().unwrap_or(0);
        RoundTrace {
            round,
            machines,
            max_machine_time,
            max_machine_memory,
        }
    }

    pub fn machine_count(&self) -> usize {
        self.machines.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct JobTrace {
    pub rounds: Vec<RoundTrace>,
}

impl JobTrace {
    /// Makespan: sum over rounds of the slowest machine's time.
    pub fn total_time(&self) -> f64 {
        self.rounds.iter().map(|r| r.max_machine_time).sum()
    }

    pub fn peak_memory(&self) -> u64 {
        self.rounds.iter().map(|r| r.max_machine_memory).max().unwrap_or(0)
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// Appends another job's rounds, renumbering them.
    pub fn extend(&mut self, other: JobTrace) {
        for mut r in other.rounds {
            r.round = self.rounds.len();
            self.rounds.push(r);
        }
    }

    /// Traces compared without wall time.
    pub fn same_accounting(&self, other: &JobTrace) -> bool {
        self.rounds.len() == other.rounds.len()
            && self.rounds.iter().zip(&other.rounds).all(|(a, b)| {
                a.machines.len() == b.machines.len()
                    && a.machines.iter().zip(&b.machines).all(|(x, y)| {
                        (x.machine, x.input_words, x.peak_words, x.work_words)
                            == (y.machine, y.input_words, y.peak_words, y.work_words)
                    })
            })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,machine,input_words,peak_words,time_seconds\n");
        for r in &self.rounds {
            for m in &r.machines {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:.9}",
                    r.round, m.machine, m.input_words, m.peak_words, m.time_seconds
                );
            }
        }
        out
    }
}

/// Per-invocation view handed to a reducer.
#[derive(Debug)]
pub struct ReduceContext {
    key: usize,
    seed: u64,
    input_words: u64,
    peak_words: u64,
    work_words: u64,
}

impl ReduceContext {
    pub fn key(&self) -> usize {
        self.key
    }

    /// Seed derived from (job seed, round, key).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_words(&self) -> u64 {
        self.input_words
    }

    /// Declares `words` of working memory held alongside the input.
    pub fn hold(&mut self, words: u64) {
        self.peak_words = self.peak_words.max(self.input_words + words);
    }

    /// Reports work done, in words touched.
    pub fn charge(&mut self, words: u64) {
        self.work_words += words;
    }
}

/// Runs one round: group by key, reduce each group, concatenate outputs in
/// key order then emission order.
pub fn run_round<V, W, F>(
    cfg: &ClusterConfig,
    round: usize,
    inputs: Vec<KeyValue<V>>,
    reducer: F,
) -> Result<(Vec<KeyValue<W>>, RoundTrace)>
where
    F: Fn(&mut ReduceContext, Vec<V>) -> Result<Vec<KeyValue<W>>>,
{
    cfg.validate()?;
    let mut groups: BTreeMap<usize, (Vec<V>, u64)> = BTreeMap::new();
    for kv in inputs {
        if kv.key >= cfg.machines {
            return Err(Error::usage(format!(
                "key {} addresses a machine beyond the {} available",
                kv.key, cfg.machines
            )));
        }
        let entry = groups.entry(kv.key).or_default();
        entry.0.push(kv.value);
        entry.1 += kv.words;
    }

    let mut outputs = Vec::new();
    let mut stats = Vec::with_capacity(groups.len());
    for (machine, (values, input_words)) in groups {
        if let Some(cap) = cfg.memory_cap_words {
            if input_words > cap {
                return Err(Error::MemoryViolation {
                    round,
                    machine,
                    words: input_words,
                    cap,
                });
            }
        }
        let mut ctx = ReduceContext {
            key: machine,
            seed: seed::derive_seed(cfg.seed, &[round as u64, machine as u64]),
            input_words,
            peak_words: input_words,
            work_words: 0,
        };
        let start = Instant::now();
        let emitted = reducer(&mut ctx, values)?;
        let elapsed = start.elapsed().as_secs_f64();
        if let Some(cap) = cfg.memory_cap_words {
            if ctx.peak_words > cap {
                return Err(Error::MemoryViolation {
                    round,
                    machine,
                    words: ctx.peak_words,
                    cap,
                });
            }
        }
        let time_seconds = match cfg.time_mode {
            TimeMode::WallClock => elapsed,
            TimeMode::WordCount => (input_words + ctx.work_words) as f64 * SECONDS_PER_WORD,
        };
        stats.push(MachineStats {
            machine,
            input_words,
            peak_words: ctx.peak_words,
            work_words: ctx.work_words,
            time_seconds,
        });
        outputs.extend(emitted);
    }
    Ok((outputs, RoundTrace::new(round, stats)))
}

/// A driver's handle on a multi-round job.
#[derive(Debug)]
pub struct Job<'c> {
    cfg: &'c ClusterConfig,
    trace: JobTrace,
}

impl<'c> Job<'c> {
    pub fn new(cfg: &'c ClusterConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Job {
            cfg,
            trace: JobTrace::default(),
        })
    }

    pub fn config(&self) -> &ClusterConfig {
        self.cfg
    }

    pub fn machines(&self) -> usize {
        self.cfg.machines
    }

    pub fn round<V, W, F>(&mut self, inputs: Vec<KeyValue<V>>, reducer: F) -> Result<Vec<KeyValue<W>>>
    where
        F: Fn(&mut ReduceContext, Vec<V>) -> Result<Vec<KeyValue<W>>>,
    {
        let (out, trace) = run_round(self.cfg, self.trace.rounds.len(), inputs, reducer)?;
        self.trace.rounds.push(trace);
        Ok(out)
    }

    /// Seed for driver-side (mapper) decisions in the upcoming round.
    pub fn mapper_seed(&self, tag: u64) -> u64 {
        seed::derive_seed(self.cfg.seed, &[u64::MAX, self.trace.rounds.len() as u64, tag])
    }

    pub fn trace(&self) -> &JobTrace {
        &self.trace
    }

    pub fn finish(self) -> JobTrace {
        self.trace
    }
}

/// Seeded balanced partition: part sizes differ by at most one, and each
/// part keeps its items in input order.
pub fn partition_arbitrary<T>(items: Vec<T>, parts: usize, seed: u64) -> Vec<Vec<T>> {
    assert!(parts >= 1, "partition into zero parts");
    let n = items.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let base = n / parts;
    let extra = n % parts;
    let mut part_of = vec![0usize; n];
    let mut start = 0;
    for p in 0..parts {
        let size = base + usize::from(p < extra);
        for &i in &order[start..start + size] {
            part_of[i] = p;
        }
        start += size;
    }
    let mut out: Vec<Vec<T>> = (0..parts)
        .map(|p| Vec::with_capacity(base + usize::from(p < extra)))
        .collect();
    for (item, p) in items.into_iter().zip(part_of) {
        out[p].push(item);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn identity(ctx: &mut ReduceContext, vals: Vec<u32>) -> Result<Vec<KeyValue<u32>>> {
        let key = ctx.key();
        Ok(vals.into_iter().map(|v| KeyValue::new(key, v, 1)).collect())
    }

    #[test]
    fn single_machine_identity() {
        let cfg = ClusterConfig::new(1, 3);
        let inputs: Vec<_> = (0..5).map(|v| KeyValue::new(0, v, 1)).collect();
        let (out, trace) = run_round(&cfg, 0, inputs.clone(), identity).unwrap();
        assert_eq!(out, inputs);
        assert_eq!(trace.machine_count(), 1);
        assert_eq!(trace.machines[0].input_words, 5);
    }

    #[test]
    fn counts_per_machine() {
        let cfg = ClusterConfig::new(10, 0);
        let inputs: Vec<_> = (0..55u32)
            .map(|v| KeyValue::new((v % 10) as usize, v, 2))
            .collect();
        let (out, trace) = run_round(&cfg, 0, inputs, |ctx, vals: Vec<u32>| {
            Ok(vec![KeyValue::new(ctx.key(), vals.len(), 1)])
        })
        .unwrap();
        assert_eq!(out.len(), 10);
        for (m, kv) in out.iter().enumerate() {
            let expected = if m < 5 { 6 } else { 5 };
            assert_eq!(kv.key, m);
            assert_eq!(kv.value, expected);
            assert_eq!(trace.machines[m].input_words, 2 * expected as u64);
        }
    }

    #[test]
    fn memory_cap_boundary() {
        let cfg = ClusterConfig::new(2, 0).with_memory_cap(10);
        let ok = vec![KeyValue::new(1, 0u32, 10)];
        assert!(run_round(&cfg, 0, ok, identity).is_ok());
        let over = vec![KeyValue::new(1, 0u32, 6), KeyValue::new(1, 1, 5)];
        match run_round(&cfg, 4, over, identity) {
            Err(Error::MemoryViolation {
                round: 4,
                machine: 1,
                words: 11,
                cap: 10,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let held = vec![KeyValue::new(0, 0u32, 4)];
        let err = run_round(&cfg, 0, held, |ctx, _: Vec<u32>| {
            ctx.hold(7);
            Ok(Vec::<KeyValue<u32>>::new())
        });
        assert!(matches!(err, Err(Error::MemoryViolation { words: 11, .. })));
    }

    #[test]
    fn keys_beyond_machines_are_rejected() {
        let cfg = ClusterConfig::new(2, 0);
        let err = run_round(&cfg, 0, vec![KeyValue::new(2, 0u32, 1)], identity);
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn key_seeds_differ_and_repeat() {
        let cfg = ClusterConfig::new(3, 11);
        let inputs: Vec<_> = (0..3).map(|k| KeyValue::new(k, (), 1)).collect();
        let run = || {
            run_round(&cfg, 2, inputs.clone(), |ctx, _| {
                Ok(vec![KeyValue::new(0, ctx.seed(), 1)])
            })
            .unwrap()
            .0
        };
        let a: Vec<u64> = run().into_iter().map(|kv| kv.value).collect();
        let b: Vec<u64> = run().into_iter().map(|kv| kv.value).collect();
        assert_eq!(a, b);
        assert!(a[0] != a[1] && a[1] != a[2]);
    }

    #[test]
    fn word_count_time_and_totals() {
        let cfg = ClusterConfig::new(4, 0).with_time_mode(TimeMode::WordCount);
        let mut job = Job::new(&cfg).unwrap();
        let inputs: Vec<_> = (0..4).map(|k| KeyValue::new(k, k as u64, 100 * (k as u64 + 1))).collect();
        let out = job
            .round(inputs, |ctx, v: Vec<u64>| {
                ctx.charge(v[0] * 1000);
                Ok(vec![KeyValue::new(0, v[0], 1)])
            })
            .unwrap();
        job.round(out, |_, _: Vec<u64>| Ok(Vec::<KeyValue<()>>::new()))
            .unwrap();
        let trace = job.finish();
        assert_eq!(trace.round_count(), 2);
        let r0 = &trace.rounds[0];
        assert_eq!(r0.max_machine_time, (400 + 3000) as f64 * SECONDS_PER_WORD);
        assert_eq!(r0.max_machine_memory, 400);
        assert_eq!(
            trace.total_time(),
            trace.rounds.iter().map(|r| r.max_machine_time).sum::<f64>()
        );
        assert_eq!(trace.peak_memory(), 400);
        let csv = trace.to_csv();
        assert!(csv.starts_with("round,machine,input_words,peak_words,time_seconds\n"));
        assert_eq!(csv.lines().count(), 1 + 4 + 1);
        assert!(csv.contains("\n0,3,400,400,0.000003400\n"));
    }

    #[test]
    fn partition_examples() {
        let parts = partition_arbitrary((0..10).collect::<Vec<_>>(), 3, 9);
        let mut sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 4]);
        assert_eq!(
            partition_arbitrary((0..10).collect::<Vec<_>>(), 1, 9),
            vec![(0..10).collect::<Vec<_>>()]
        );
        assert_eq!(
            partition_arbitrary((0..50).collect::<Vec<_>>(), 7, 1),
            partition_arbitrary((0..50).collect::<Vec<_>>(), 7, 1)
        );
    }

    proptest! {
        #[test]
        fn partition_is_balanced_and_exact(n in 0usize..300, parts in 1usize..40, seed in any::<u64>()) {
            let parts_v = partition_arbitrary((0..n).collect::<Vec<_>>(), parts, seed);
            prop_assert_eq!(parts_v.len(), parts);
            let max = parts_v.iter().map(Vec::len).max().unwrap();
            let min = parts_v.iter().map(Vec::len).min().unwrap();
            prop_assert!(max - min <= 1);
            let mut all: Vec<usize> = parts_v.iter().flatten().copied().collect();
            prop_assert!(parts_v.iter().all(|p| p.windows(2).all(|w| w[0] < w[1])));
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn shuffle_conserves_values(values in prop::collection::vec((0usize..8, any::<u16>()), 0..200)) {
            let cfg = ClusterConfig::new(8, 0);
            let inputs: Vec<_> = values.iter().map(|&(k, v)| KeyValue::new(k, v, 1)).collect();
            let (out, trace) = run_round(&cfg, 0, inputs, |ctx, vals: Vec<u16>| {
                Ok(vals.into_iter().map(|v| KeyValue::new(ctx.key(), v, 1)).collect())
            }).unwrap();
            let mut sent: Vec<(usize, u16)> = values.clone();
            let mut received: Vec<(usize, u16)> = out.into_iter().map(|kv| (kv.key, kv.value)).collect();
            // Output is grouped in key order.
            prop_assert!(received.windows(2).all(|w| w[0].0 <= w[1].0));
            sent.sort_unstable();
            received.sort_unstable();
            prop_assert_eq!(sent, received);
            let total: u64 = trace.machines.iter().map(|m| m.input_words).sum();
            prop_assert_eq!(total, values.len() as u64);
        }
    }
}
