//! Synthetic clustered data: planted centers in the unit cube, Zipf-sized
//! clusters and Gaussian spread around each center.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;

use crate::metric::Dataset;
use crate::seed;

#[derive(Clone, Debug, PartialEq)]
pub struct DataGenConfig {
    pub n: usize,
    pub k_true: usize,
    /// Cluster `i` (1-based) gets weight `i^alpha`.
    pub zipf_alpha: f64,
    /// Use `i^-alpha` instead, the usual Zipf orientation.
    pub zipf_decreasing: bool,
    /// Expected distance scale of a point from its center.
    pub sigma: f64,
    pub dim: usize,
    pub seed: u64,
}

impl Default for DataGenConfig {
    fn default() -> Self {
        DataGenConfig {
            n: 10_000,
            k_true: 25,
            zipf_alpha: 0.0,
            zipf_decreasing: false,
            sigma: 0.1,
            dim: 3,
            seed: 0,
        }
    }
}

impl DataGenConfig {
    pub fn cluster_weights(&self) -> Vec<f64> {
        let exponent = if self.zipf_decreasing {
            -self.zipf_alpha
        } else {
            self.zipf_alpha
        };
        (1..=self.k_true).map(|i| (i as f64).powf(exponent)).collect()
    }
}

/// A generated dataset with its ground truth.
#[derive(Clone, Debug)]
pub struct Generated {
    pub dataset: Dataset,
    /// Row-major planted centers, `k_true x dim`.
    pub centers: Vec<f64>,
    /// Planted cluster (0-based) of each point.
    pub labels: Vec<usize>,
}

pub fn generate(cfg: &DataGenConfig) -> Dataset {
    generate_labeled(cfg).dataset
}

/// Panics if `k_true` is zero or exceeds `n`, or if `sigma` or `dim` is not
/// positive.
pub fn generate_labeled(cfg: &DataGenConfig) -> Generated {
    assert!(cfg.k_true >= 1 && cfg.k_true <= cfg.n.max(1), "need 1 <= k_true <= n");
    assert!(cfg.dim >= 1, "dimension must be positive");
    assert!(cfg.sigma > 0.0 && cfg.sigma.is_finite(), "sigma must be positive");
    let mut rng = seed::rng(cfg.seed);
    let dim = cfg.dim;
    let centers: Vec<f64> = (0..cfg.k_true * dim).map(|_| rng.random::<f64>()).collect();
    let pick = WeightedIndex::new(cfg.cluster_weights()).expect("positive cluster weights");
    let spread = Normal::new(0.0, cfg.sigma / (dim as f64).sqrt()).expect("valid sigma");

    let mut coords = Vec::with_capacity(cfg.n * dim);
    let mut labels = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let c = pick.sample(&mut rng);
        labels.push(c);
        for j in 0..dim {
            coords.push(centers[c * dim + j] + spread.sample(&mut rng));
        }
    }
    let dataset = Dataset::euclidean(dim, coords).expect("generated coordinates are finite");
    Generated {
        dataset,
        centers,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{sq_dist, PointId};
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn uniform_sizes_pass_chi_squared() {
        let k = 25;
        let n = 10_000;
        let chi = ChiSquared::new((k - 1) as f64).unwrap();
        for seed in 0..30 {
            let g = generate_labeled(&DataGenConfig {
                n,
                k_true: k,
                seed,
                ..Default::default()
            });
            let mut counts = vec![0usize; k];
            for &l in &g.labels {
                counts[l] += 1;
            }
            let expected = n as f64 / k as f64;
            let stat: f64 = counts
                .iter()
                .map(|&c| (c as f64 - expected).powi(2) / expected)
                .sum();
            let p = 1.0 - chi.cdf(stat);
            assert!(p > 0.001, "seed {seed}: p = {p}");
        }
    }

    #[test]
    fn large_alpha_concentrates_mass() {
        let n = 20_000;
        let g = generate_labeled(&DataGenConfig {
            n,
            zipf_alpha: 10.0,
            seed: 2,
            ..Default::default()
        });
        // Weights grow with i as printed: the last cluster is the heaviest,
        // but 24^10 / 25^10 is still 0.66, so it holds only about a third.
        let share = 25f64.powi(10) / (1..=25).map(|i| (i as f64).powi(10)).sum::<f64>();
        let top = g.labels.iter().filter(|&&l| l == 24).count() as f64 / n as f64;
        assert!((top - share).abs() < 0.02, "{top} vs {share}");

        let g = generate_labeled(&DataGenConfig {
            n,
            zipf_alpha: 10.0,
            zipf_decreasing: true,
            seed: 2,
            ..Default::default()
        });
        let first = g.labels.iter().filter(|&&l| l == 0).count();
        assert!(first as f64 > 0.99 * n as f64, "{first}");
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = DataGenConfig {
            n: 500,
            seed: 77,
            ..Default::default()
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        generate(&cfg).write_to(&mut a).unwrap();
        generate(&cfg).write_to(&mut b).unwrap();
        assert_eq!(a, b);
        let mut c = Vec::new();
        generate(&DataGenConfig { seed: 78, ..cfg }).write_to(&mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn centers_lie_in_unit_cube() {
        let g = generate_labeled(&DataGenConfig {
            n: 100,
            k_true: 40,
            dim: 5,
            ..Default::default()
        });
        assert_eq!(g.centers.len(), 200);
        assert!(g.centers.iter().all(|&c| (0.0..1.0).contains(&c)));
    }

    /// Mean of a chi variable with `d` degrees of freedom, divided by sqrt(d).
    fn scaled_chi_mean(d: usize) -> f64 {
        let d = d as f64;
        (2.0f64.sqrt() * (ln_gamma((d + 1.0) / 2.0) - ln_gamma(d / 2.0)).exp()) / d.sqrt()
    }

    #[test]
    fn spread_matches_sigma() {
        // Closed form for d = 3: 2 sqrt(2/pi) / sqrt(3).
        let c3 = scaled_chi_mean(3);
        assert!((c3 - 2.0 * (2.0 / std::f64::consts::PI).sqrt() / 3f64.sqrt()).abs() < 1e-12);
        for (dim, sigma) in [(3, 0.1), (2, 0.5), (8, 0.02)] {
            let g = generate_labeled(&DataGenConfig {
                n: 100_000,
                k_true: 10,
                sigma,
                dim,
                seed: 5,
                ..Default::default()
            });
            let total: f64 = g
                .labels
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let p = g.dataset.coords(PointId::from(i));
                    sq_dist(p, &g.centers[l * dim..(l + 1) * dim]).sqrt()
                })
                .sum();
            let mean = total / 100_000.0;
            let target = sigma * scaled_chi_mean(dim);
            assert!(
                mean >= 0.9 * target && mean <= 1.1 * target,
                "dim {dim}: mean {mean} vs {target}"
            );
        }
    }
}
