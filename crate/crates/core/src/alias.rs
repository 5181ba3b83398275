//! Vose alias tables for O(1) sampling from a finite distribution.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds a table from weights that already sum to one.
    pub fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        assert!(n > 0, "alias table needs at least one outcome");
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
        let mut prob = vec![1.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
        }
        AliasTable { prob, alias }
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = self.prob.len();
        if n == 1 {
            return 0;
        }
        let i = rng.random_range(0..n);
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }

    /// Probability mass the table assigns to each outcome.
    pub fn implied_pmf(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut pmf = vec![0.0; self.prob.len()];
        for (i, (&p, &a)) in self.prob.iter().zip(&self.alias).enumerate() {
            pmf[i] += p / n;
            pmf[a as usize] += (1.0 - p) / n;
        }
        pmf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn implied_pmf_matches_weights() {
        let w = [0.1, 0.2, 0.05, 0.4, 0.25];
        let t = AliasTable::new(&w);
        for (a, b) in t.implied_pmf().iter().zip(&w) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_frequencies() {
        let w = [0.7, 0.3];
        let t = AliasTable::new(&w);
        let mut rng = rng_from_seed(1);
        let n = 200_000;
        let hits = (0..n).filter(|_| t.sample(&mut rng) == 0).count();
        let f = hits as f64 / n as f64;
        assert!((f - 0.7).abs() < 5.0 * (0.21f64 / n as f64).sqrt());
    }
}
