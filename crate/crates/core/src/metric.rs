//! Points, distances and clustering objectives.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::seed;

/// Dense index of a point in a [`Dataset`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(u32::try_from(i).expect("point index exceeds u32"))
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    KCenter,
    KMedian,
    WeightedKMedian,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::KCenter => "kcenter",
            ObjectiveKind::KMedian => "kmedian",
            ObjectiveKind::WeightedKMedian => "weighted_kmedian",
        })
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Euclidean { dim: usize, coords: Vec<f64> },
    Explicit { matrix: Vec<f64> },
}

/// An immutable point set with its metric.
#[derive(Clone, Debug)]
pub struct Dataset {
    n: usize,
    repr: Repr,
}

/// Triples checked on load when the matrix is too large for the exhaustive check.
const SAMPLED_TRIPLES: usize = 100_000;
const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 1000;

impl Dataset {
    /// Builds a Euclidean dataset from row-major coordinates.
    pub fn euclidean(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::usage(format!(
                "{} coordinates is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidMetric(format!(
                "non-finite coordinate for point {}",
                pos / dim
            )));
        }
        let n = coords.len() / dim;
        if n > u32::MAX as usize {
            return Err(Error::usage("too many points"));
        }
        Ok(Dataset {
            n,
            repr: Repr::Euclidean { dim, coords },
        })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::usage("points have differing dimensions"));
        }
        Dataset::euclidean(dim, points.concat())
    }

    /// Builds a dataset from an explicit `n x n` distance matrix, validating
    /// that it is a metric.
    pub fn explicit(n: usize, matrix: Vec<f64>) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::usage(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        let ds = Dataset {
            n,
            repr: Repr::Explicit { matrix },
        };
        ds.validate_metric()?;
        Ok(ds)
    }

    fn validate_metric(&self) -> Result<()> {
        let Repr::Explicit { matrix } = &self.repr else {
            return Ok(());
        };
        let n = self.n;
        let m = |a: usize, b: usize| matrix[a * n + b];
        for a in 0..n {
            if m(a, a) != 0.0 {
                return Err(Error::InvalidMetric(format!("non-zero diagonal at {a}")));
            }
            for b in 0..n {
                let d = m(a, b);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "entry ({a}, {b}) = {d} is not a finite non-negative distance"
                    )));
                }
                if d != m(b, a) {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({a}, {b})")));
                }
            }
        }
        let violates = |a: usize, b: usize, c: usize| {
            let via = m(a, b) + m(b, c);
            m(a, c) > via + 1e-9 * via.max(1.0)
        };
        let fail = |a, b, c| {
            Err(Error::InvalidMetric(format!(
                "triangle inequality fails for ({a}, {b}, {c})"
            )))
        };
        if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if violates(a, b, c) {
                            return fail(a, b, c);
                        }
                    }
                }
            }
        } else {
            let mut rng = seed::rng(0x7472_6961_6e67_6c65);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                );
                if violates(a, b, c) {
                    return fail(a, b, c);
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.repr, Repr::Euclidean { .. })
    }

    /// Coordinate dimension, or `None` for explicit metrics.
    pub fn dim(&self) -> Option<usize> {
        match &self.repr {
            Repr::Euclidean { dim, .. } => Some(*dim),
            Repr::Explicit { .. } => None,
        }
    }

    /// Coordinates of a point. Panics for explicit metrics.
    #[inline]
    pub fn coords(&self, id: PointId) -> &[f64] {
        match &self.repr {
            Repr::Euclidean { dim, coords } => {
                let i = id.index() * dim;
                &coords[i..i + dim]
            }
            Repr::Explicit { .. } => panic!("explicit metric has no coordinates"),
        }
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = PointId> + Clone {
        (0..self.n as u32).map(PointId)
    }

    pub fn all_ids(&self) -> Vec<PointId> {
        self.ids().collect()
    }

    fn check(&self, id: PointId) -> Result<()> {
        if id.index() >= self.n {
            return Err(Error::usage(format!(
                "point {id} out of range for {} points",
                self.n
            )));
        }
        Ok(())
    }

    /// Distance between two points, with range checking.
    pub fn distance(&self, a: PointId, b: PointId) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dist(a, b))
    }

    /// Unchecked distance; panics on out-of-range ids.
    #[inline]
    pub fn dist(&self, a: PointId, b: PointId) -> f64 {
        match &self.repr {
            Repr::Euclidean { .. } => sq_dist(self.coords(a), self.coords(b)).sqrt(),
            Repr::Explicit { matrix } => matrix[a.index() * self.n + b.index()],
        }
    }

    /// Reads either file format; the header decides which.
    ///
    /// Euclidean files start with `n d`, explicit matrices with `n`.
    pub fn read_from<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines().enumerate();
        let (header_line, header) = loop {
            match lines.next() {
                Some((i, line)) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break (i + 1, line);
                    }
                }
                None => return Err(Error::parse(1, "empty dataset file")),
            }
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_count = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(header_line, format!("invalid count {s:?}")))
        };
        let (n, dim) = match fields.as_slice() {
            [n] => (parse_count(n)?, None),
            [n, d] => (parse_count(n)?, Some(parse_count(d)?)),
            _ => {
                return Err(Error::parse(
                    header_line,
                    "header must be `n d` (euclidean) or `n` (explicit)",
                ))
            }
        };
        let width = dim.unwrap_or(n);
        let mut values = Vec::with_capacity(n * width);
        let mut rows = 0;
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if rows == n {
                return Err(Error::parse(i + 1, "more rows than declared"));
            }
            let before = values.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::parse(i + 1, format!("invalid number {tok:?}")))?;
                values.push(v);
            }
            if values.len() - before != width {
                return Err(Error::parse(
                    i + 1,
                    format!("expected {width} values, found {}", values.len() - before),
                ));
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::parse(
                header_line,
                format!("declared {n} rows, found {rows}"),
            ));
        }
        match dim {
            Some(d) => Dataset::euclidean(d, values),
            None => Dataset::explicit(n, values),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Dataset::read_from(std::fs::File::open(path)?)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        match &self.repr {
            Repr::Euclidean { dim, coords } => {
                writeln!(w, "{} {}", self.n, dim)?;
                write_rows(&mut w, coords, *dim)?;
            }
            Repr::Explicit { matrix } => {
                writeln!(w, "{}", self.n)?;
                write_rows(&mut w, matrix, self.n)?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(file)
    }
}

fn write_rows<W: Write>(w: &mut W, values: &[f64], width: usize) -> std::io::Result<()> {
    for row in values.chunks(width.max(1)) {
        let mut first = true;
        for v in row {
            if !first {
                w.write_all(b" ")?;
            }
            let text = format!("{v:?}");
            write!(w, "{}", text.strip_suffix(".0").unwrap_or(&text))?;
            first = false;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

/// A set of points with coordinates gathered contiguously, for repeated
/// nearest-point queries against it.
#[derive(Clone, Debug)]
pub struct PointBlock {
    ids: Vec<PointId>,
    coords: Vec<f64>,
    dim: usize,
}

impl PointBlock {
    pub fn new(ds: &Dataset, ids: Vec<PointId>) -> Self {
        let (coords, dim) = match ds.dim() {
            Some(dim) => {
                let mut coords = Vec::with_capacity(ids.len() * dim);
                for &id in &ids {
                    coords.extend_from_slice(ds.coords(id));
                }
                (coords, dim)
            }
            None => (Vec::new(), 0),
        };
        PointBlock { ids, coords, dim }
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// `d(x, block)`; `+inf` for an empty block.
    pub fn min_dist(&self, ds: &Dataset, x: PointId) -> f64 {
        if self.dim == 0 {
            return self
                .ids
                .iter()
                .map(|&y| ds.dist(x, y))
                .fold(f64::INFINITY, f64::min);
        }
        let xc = ds.coords(x);
        match self.dim {
            2 => min_sq_fixed::<2>(xc, &self.coords),
            3 => min_sq_fixed::<3>(xc, &self.coords),
            _ => self
                .coords
                .chunks_exact(self.dim)
                .map(|c| sq_dist(xc, c))
                .fold(f64::INFINITY, f64::min),
        }
        .sqrt()
    }

    /// Nearest member of the block to `x` with ties going to the smallest id.
    /// Returns `None` for an empty block.
    pub fn nearest(&self, ds: &Dataset, x: PointId) -> Option<(f64, PointId)> {
        let mut best_d = f64::INFINITY;
        let mut best_id = PointId(u32::MAX);
        if self.dim == 0 {
            for &y in &self.ids {
                let d = ds.dist(x, y);
                if d < best_d || (d == best_d && y < best_id) {
                    best_d = d;
                    best_id = y;
                }
            }
        } else {
            // Compare squared distances, taking square roots only for near
            // ties so the (distance, id) order matches `Dataset::dist`.
            let xc = ds.coords(x);
            let mut best_sq = f64::INFINITY;
            for (j, c) in self.coords.chunks_exact(self.dim).enumerate() {
                let sq = sq_dist(xc, c);
                if sq <= best_sq * (1.0 + 1e-15) {
                    let d = sq.sqrt();
                    let id = self.ids[j];
                    if d < best_d || (d == best_d && id < best_id) {
                        best_d = d;
                        best_id = id;
                    }
                    if sq < best_sq {
                        best_sq = sq;
                    }
                }
            }
        }
        (!self.ids.is_empty()).then_some((best_d, best_id))
    }
}

#[inline]
fn min_sq_fixed<const D: usize>(xc: &[f64], coords: &[f64]) -> f64 {
    let x: [f64; D] = xc.try_into().expect("dimension mismatch");
    let mut lanes = [f64::INFINITY; 4];
    let mut chunks = coords.chunks_exact(4 * D);
    for block in &mut chunks {
        for (lane, c) in block.chunks_exact(D).enumerate() {
            let mut s = 0.0;
            for i in 0..D {
                let d = x[i] - c[i];
                s += d * d;
            }
            if s < lanes[lane] {
                lanes[lane] = s;
            }
        }
    }
    let mut best = lanes.iter().copied().fold(f64::INFINITY, f64::min);
    for c in chunks.remainder().chunks_exact(D) {
        let mut s = 0.0;
        for i in 0..D {
            let d = x[i] - c[i];
            s += d * d;
        }
        if s < best {
            best = s;
        }
    }
    best
}

/// `d(x, S)` and the nearest member of `S`, ties broken by smallest id.
pub fn dist_to_set(ds: &Dataset, x: PointId, set: &[PointId]) -> Result<(f64, PointId)> {
    ds.check(x)?;
    if set.is_empty() {
        return Err(Error::usage("distance to an empty set"));
    }
    let mut best = (f64::INFINITY, PointId(u32::MAX));
    for &y in set {
        ds.check(y)?;
        let d = ds.dist(x, y);
        if d < best.0 || (d == best.0 && y < best.1) {
            best = (d, y);
        }
    }
    Ok(best)
}

/// Points with positive integer multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPointSet {
    points: Vec<PointId>,
    weights: Vec<u64>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<PointId>, weights: Vec<u64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::usage("points and weights differ in length"));
        }
        if weights.contains(&0) {
            return Err(Error::usage("weights must be at least 1"));
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::usage("weighted point set contains duplicates"));
        }
        Ok(WeightedPointSet { points, weights })
    }

    pub fn unit(points: Vec<PointId>) -> Result<Self> {
        let weights = vec![1; points.len()];
        WeightedPointSet::new(points, weights)
    }

    pub fn all(ds: &Dataset) -> Self {
        WeightedPointSet {
            points: ds.all_ids(),
            weights: vec![1; ds.len()],
        }
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointId, u64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Chosen centers with the induced assignment and objective value.
///
/// For `KCenter` and `KMedian` the assignment covers every point of the
/// dataset, indexed by point id. For `WeightedKMedian` it follows the order
/// of the weighted set's points.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringSolution {
    pub centers: Vec<PointId>,
    pub assignment: Vec<PointId>,
    pub objective: f64,
    pub kind: ObjectiveKind,
}

impl ClusteringSolution {
    /// Assigns every relevant point to its nearest center and computes the
    /// objective.
    pub fn evaluate(
        ds: &Dataset,
        centers: &[PointId],
        kind: ObjectiveKind,
        weights: Option<&WeightedPointSet>,
    ) -> Result<Self> {
        check_centers(ds, centers)?;
        let mut centers = centers.to_vec();
        centers.sort_unstable();
        centers.dedup();
        let block = PointBlock::new(ds, centers.clone());
        let (assignment, objective) = match (kind, weights) {
            (ObjectiveKind::WeightedKMedian, Some(ws)) => {
                let mut sum = ExactSum::new();
                let assignment = ws
                    .iter()
                    .map(|(x, w)| {
                        let (d, c) = block.nearest(ds, x).expect("centers non-empty");
                        sum.add_product(w as f64, d);
                        c
                    })
                    .collect();
                (assignment, sum.value())
            }
            (ObjectiveKind::WeightedKMedian, None) => {
                return Err(Error::usage("weighted objective requires weights"))
            }
            (_, Some(_)) => {
                return Err(Error::usage(format!(
                    "weights given with unweighted objective {kind}"
                )))
            }
            (ObjectiveKind::KMedian, None) => {
                let mut sum = ExactSum::new();
                let assignment = ds
                    .ids()
                    .map(|x| {
                        let (d, c) = block.nearest(ds, x).expect("centers non-empty");
                        sum.add(d);
                        c
                    })
                    .collect();
                (assignment, sum.value())
            }
            (ObjectiveKind::KCenter, None) => {
                let mut max = 0.0f64;
                let assignment = ds
                    .ids()
                    .map(|x| {
                        let (d, c) = block.nearest(ds, x).expect("centers non-empty");
                        max = max.max(d);
                        c
                    })
                    .collect();
                (assignment, max)
            }
        };
        Ok(ClusteringSolution {
            centers,
            assignment,
            objective,
            kind,
        })
    }

    /// `center_ids;objective` with ids separated by spaces.
    pub fn to_csv_line(&self) -> String {
        let ids: Vec<String> = self.centers.iter().map(|c| c.to_string()).collect();
        format!("{};{}", ids.join(" "), self.objective)
    }
}

fn check_centers(ds: &Dataset, centers: &[PointId]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::usage("no centers given"));
    }
    centers.iter().try_for_each(|&c| ds.check(c))
}

/// Objective value of `centers`; see [`ClusteringSolution::evaluate`].
pub fn evaluate(
    ds: &Dataset,
    centers: &[PointId],
    kind: ObjectiveKind,
    weights: Option<&WeightedPointSet>,
) -> Result<f64> {
    check_centers(ds, centers)?;
    let block = PointBlock::new(ds, centers.to_vec());
    match (kind, weights) {
        (ObjectiveKind::WeightedKMedian, Some(ws)) => {
            let mut sum = ExactSum::new();
            for (x, w) in ws.iter() {
                sum.add_product(w as f64, block.min_dist(ds, x));
            }
            Ok(sum.value())
        }
        (ObjectiveKind::WeightedKMedian, None) => {
            Err(Error::usage("weighted objective requires weights"))
        }
        (_, Some(_)) => Err(Error::usage(format!(
            "weights given with unweighted objective {kind}"
        ))),
        (ObjectiveKind::KMedian, None) => {
            Ok(ds.ids().map(|x| block.min_dist(ds, x)).collect::<ExactSum>().value())
        }
        (ObjectiveKind::KCenter, None) => Ok(ds
            .ids()
            .map(|x| block.min_dist(ds, x))
            .fold(0.0, f64::max)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn line(xs: &[f64]) -> Dataset {
        Dataset::euclidean(1, xs.to_vec()).unwrap()
    }

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    #[test]
    fn three_four_five() {
        let ds = Dataset::from_points(&[vec![0.0, 0.0, 0.0], vec![3.0, 4.0, 0.0]]).unwrap();
        assert_eq!(ds.distance(PointId(0), PointId(1)).unwrap(), 5.0);
        assert_eq!(ds.distance(PointId(1), PointId(1)).unwrap(), 0.0);
    }

    #[test]
    fn explicit_lookup() {
        #[rustfmt::skip]
        let m = vec![
            0.0, 4.0, 5.0,
            4.0, 0.0, 7.0,
            5.0, 7.0, 0.0,
        ];
        let ds = Dataset::explicit(3, m).unwrap();
        assert_eq!(ds.distance(PointId(1), PointId(2)).unwrap(), 7.0);
        assert!(!ds.is_euclidean());
    }

    #[test]
    fn out_of_range_is_a_usage_error() {
        let ds = line(&[0.0, 1.0]);
        assert!(matches!(
            ds.distance(PointId(0), PointId(2)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn rejects_non_metrics() {
        let asym = vec![0.0, 1.0, 2.0, 0.0];
        assert!(matches!(
            Dataset::explicit(2, asym),
            Err(Error::InvalidMetric(_))
        ));
        let diag = vec![1.0, 1.0, 1.0, 0.0];
        assert!(Dataset::explicit(2, diag).is_err());
        #[rustfmt::skip]
        let triangle = vec![
            0.0, 1.0, 5.0,
            1.0, 0.0, 1.0,
            5.0, 1.0, 0.0,
        ];
        assert!(Dataset::explicit(3, triangle).is_err());
        assert!(Dataset::euclidean(1, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn dist_to_set_examples() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(
            dist_to_set(&ds, PointId(1), &ids(&[0, 2])).unwrap(),
            (1.0, PointId(0))
        );
        assert_eq!(
            dist_to_set(&ds, PointId(2), &ids(&[0, 2])).unwrap(),
            (0.0, PointId(2))
        );
        assert!(dist_to_set(&ds, PointId(1), &[]).is_err());

        // Point 0 at 3.0 is equidistant from ids 2 (at 1.0) and 5 (at 5.0).
        let ds = line(&[3.0, 9.0, 1.0, 20.0, 30.0, 5.0]);
        assert_eq!(
            dist_to_set(&ds, PointId(0), &ids(&[5, 2])).unwrap(),
            (2.0, PointId(2))
        );
        let block = PointBlock::new(&ds, ids(&[5, 2]));
        assert_eq!(block.nearest(&ds, PointId(0)), Some((2.0, PointId(2))));
    }

    #[test]
    fn objectives_on_the_line() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0]);
        let c = ids(&[0, 2]);
        assert_eq!(evaluate(&ds, &c, ObjectiveKind::KMedian, None).unwrap(), 2.0);
        assert_eq!(evaluate(&ds, &c, ObjectiveKind::KCenter, None).unwrap(), 1.0);
    }

    #[test]
    fn weighted_single_center() {
        let ds = line(&[0.0, 2.5]);
        let ws = WeightedPointSet::new(ids(&[0, 1]), vec![3, 1]).unwrap();
        let cost = evaluate(&ds, &ids(&[0]), ObjectiveKind::WeightedKMedian, Some(&ws)).unwrap();
        assert_eq!(cost, 1.0 * 2.5);
        let cost = evaluate(&ds, &ids(&[1]), ObjectiveKind::WeightedKMedian, Some(&ws)).unwrap();
        assert_eq!(cost, 3.0 * 2.5);
    }

    #[test]
    fn weights_with_unweighted_kind_is_rejected() {
        let ds = line(&[0.0, 1.0]);
        let ws = WeightedPointSet::all(&ds);
        assert!(matches!(
            evaluate(&ds, &ids(&[0]), ObjectiveKind::KMedian, Some(&ws)),
            Err(Error::Usage(_))
        ));
        assert!(evaluate(&ds, &ids(&[0]), ObjectiveKind::WeightedKMedian, None).is_err());
        assert!(evaluate(&ds, &[], ObjectiveKind::KMedian, None).is_err());
    }

    #[test]
    fn weighted_set_validation() {
        assert!(WeightedPointSet::new(ids(&[0, 1]), vec![1, 0]).is_err());
        assert!(WeightedPointSet::new(ids(&[0, 0]), vec![1, 1]).is_err());
        assert!(WeightedPointSet::new(ids(&[0]), vec![1, 1]).is_err());
    }

    #[test]
    fn solution_matches_evaluate() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0, 4.0]);
        let c = ids(&[3, 0]);
        let sol = ClusteringSolution::evaluate(&ds, &c, ObjectiveKind::KMedian, None).unwrap();
        assert_eq!(sol.centers, ids(&[0, 3]));
        assert_eq!(sol.assignment, ids(&[0, 0, 3, 3, 0]));
        assert_eq!(
            sol.objective,
            evaluate(&ds, &c, ObjectiveKind::KMedian, None).unwrap()
        );
        assert_eq!(sol.to_csv_line(), "0 3;6");
    }

    #[test]
    fn file_formats_round_trip() {
        let ds = Dataset::from_points(&[vec![0.1, -2.0], vec![1e-300, 3.5]]).unwrap();
        let mut buf = Vec::new();
        ds.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "2 2\n0.1 -2\n1e-300 3.5\n");
        let back = Dataset::read_from(&buf[..]).unwrap();
        assert_eq!(back.coords(PointId(1)), ds.coords(PointId(1)));

        let explicit = "3\n0 1 2\n1 0 1.5\n2 1.5 0\n";
        let ds = Dataset::read_from(explicit.as_bytes()).unwrap();
        assert_eq!(ds.dist(PointId(2), PointId(1)), 1.5);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Dataset::read_from("2 2\n0 0\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = Dataset::read_from("3 1\n0\n1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = Dataset::read_from("2 2\n0 0 0\n1 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    fn random_points() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 3), 2..40)
    }

    proptest! {
        #[test]
        fn distance_is_symmetric_with_zero_self_distance(pts in random_points()) {
            let ds = Dataset::from_points(&pts).unwrap();
            for a in ds.ids() {
                prop_assert_eq!(ds.dist(a, a), 0.0);
                for b in ds.ids() {
                    prop_assert_eq!(ds.dist(a, b), ds.dist(b, a));
                }
            }
        }

        #[test]
        fn block_agrees_with_dist_to_set(pts in random_points(), mask in any::<u64>()) {
            let ds = Dataset::from_points(&pts).unwrap();
            let set: Vec<PointId> = ds.ids().filter(|p| mask >> (p.0 % 64) & 1 == 1).collect();
            prop_assume!(!set.is_empty());
            let block = PointBlock::new(&ds, set.clone());
            for x in ds.ids() {
                let expected = dist_to_set(&ds, x, &set).unwrap();
                prop_assert_eq!(block.nearest(&ds, x), Some(expected));
                prop_assert_eq!(block.min_dist(&ds, x).to_bits(), expected.0.to_bits());
            }
        }

        #[test]
        fn singleton_kmedian_is_sum_of_distances(pts in random_points(), c in 0usize..40) {
            let ds = Dataset::from_points(&pts).unwrap();
            let c = PointId::from(c % ds.len());
            let cost = evaluate(&ds, &[c], ObjectiveKind::KMedian, None).unwrap();
            let naive: f64 = ds.ids().map(|x| ds.dist(x, c)).sum();
            prop_assert!((cost - naive).abs() <= 1e-9 * naive.max(1.0));
            let exact = crate::exact::exact_sum(ds.ids().map(|x| ds.dist(x, c)));
            prop_assert_eq!(cost, exact);
        }
    }

    #[test]
    fn sampled_triangle_check_on_large_matrix() {
        // Shortest-path closure of a ring is a metric; break one entry.
        let n = 1200;
        let mut m = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let k = a.abs_diff(b);
                m[a * n + b] = k.min(n - k) as f64;
            }
        }
        assert!(Dataset::explicit(n, m.clone()).is_ok());
        // Inflating every distance from point 0 except to its neighbours
        // breaks the triangle inequality in many triples.
        for b in 2..n - 1 {
            m[b] = 1000.0;
            m[b * n] = 1000.0;
        }
        assert!(Dataset::explicit(n, m).is_err());
    }
}
