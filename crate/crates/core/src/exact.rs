//! Order-independent floating point summation.
//!
//! Sums are kept as a list of non-overlapping partials (Shewchuk's
//! algorithm) and rounded once at the end, so the result is the correctly
//! rounded value of the exact real sum. Two accumulators can be merged
//! without loss, which is what lets per-machine partial sums reproduce the
//! sequential result bit for bit.

#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
    special: f64,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        if !value.is_finite() {
            self.special += value;
            return;
        }
        let mut x = value;
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Adds `weight * value` without rounding the product.
    pub fn add_product(&mut self, weight: f64, value: f64) {
        if weight == 1.0 {
            self.add(value);
            return;
        }
        let hi = weight * value;
        if !hi.is_finite() {
            self.add(hi);
            return;
        }
        let lo = weight.mul_add(value, -hi);
        self.add(hi);
        if lo != 0.0 {
            self.add(lo);
        }
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
        self.special += other.special;
    }

    pub fn value(&self) -> f64 {
        if self.special != 0.0 || self.special.is_nan() {
            return self.special;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Round half-even correction when the remaining partials push the
        // tail past a halfway point.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        s.extend(iter);
        s
    }
}

pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<ExactSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancels_catastrophically_large_terms() {
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
        assert_eq!(exact_sum([]), 0.0);
    }

    #[test]
    fn products_are_not_rounded_early() {
        let mut s = ExactSum::new();
        s.add_product(3.0, 0.1);
        s.add(-0.30000000000000004);
        // 3 * 0.1 in exact arithmetic differs from its rounded product.
        assert!(s.value().abs() < 1e-16);
        assert_ne!(s.value(), 0.0);
    }

    proptest! {
        #[test]
        fn merge_order_does_not_matter(
            values in prop::collection::vec(-1e6f64..1e6, 0..200),
            split in 0usize..200,
        ) {
            let split = split.min(values.len());
            let whole = exact_sum(values.iter().copied());
            let mut a: ExactSum = values[..split].iter().copied().collect();
            let b: ExactSum = values[split..].iter().copied().collect();
            a.merge(&b);
            prop_assert_eq!(a.value().to_bits(), whole.to_bits());
            let reversed = exact_sum(values.iter().rev().copied());
            prop_assert_eq!(reversed.to_bits(), whole.to_bits());
        }
    }
}
