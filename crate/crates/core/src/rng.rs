//! Counter-based deterministic random streams.
//!
//! Every random decision in the simulator draws from a [`CounterRng`] whose
//! key is derived from a tuple of integers such as
//! `(root, epoch, iteration, worker, layer, vertex)`. Output `i` of a stream is
//! a pure function of `(key, i)`, so results never depend on which thread ran
//! which batch or in what order.

use std::collections::HashMap;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of integers into a single 64-bit stream key.
///
/// Order matters: `derive_key(&[1, 2]) != derive_key(&[2, 1])`.
pub fn derive_key(parts: &[u64]) -> u64 {
    let mut h = mix64(GOLDEN ^ parts.len() as u64);
    for &p in parts {
        h = mix64(h.wrapping_add(GOLDEN) ^ mix64(p.wrapping_add(GOLDEN)));
    }
    h
}

/// A random stream identified by a key; output `i` is `mix(key, i)`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    pub fn from_parts(parts: &[u64]) -> Self {
        Self::new(derive_key(parts))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.key
                ^ mix64(
                    c.wrapping_mul(GOLDEN)
                        .wrapping_add(self.key.rotate_left(17)),
                ),
        )
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 / DEN
    }

    /// Uniform integer in `[0, bound)` without modulo bias (Lemire's method).
    ///
    /// # Panics
    ///
    /// Panics if `bound` is zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be non-zero");
        let mut m = (self.next_u64() as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = (self.next_u64() as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    pub fn below_usize(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        for i in (1..slice.len()).rev() {
            let j = self.below_usize(i + 1);
            slice.swap(i, j);
        }
    }

    /// Draws `k` distinct indices from `0..n` uniformly, in draw order.
    ///
    /// Uses a sparse partial Fisher-Yates so the cost is `O(k)` regardless of `n`.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        if k == n {
            let mut all: Vec<usize> = (0..n).collect();
            self.shuffle(&mut all);
            return all;
        }
        let mut out = Vec::with_capacity(k);
        if k <= 32 {
            // Small draws (typical fanouts): a linear scan beats hashing.
            let mut swapped: Vec<(usize, usize)> = Vec::with_capacity(2 * k);
            let lookup = |swapped: &[(usize, usize)], i: usize| {
                swapped
                    .iter()
                    .rev()
                    .find(|&&(idx, _)| idx == i)
                    .map_or(i, |&(_, v)| v)
            };
            for i in 0..k {
                let j = i + self.below_usize(n - i);
                let vi = lookup(&swapped, i);
                let vj = lookup(&swapped, j);
                swapped.push((j, vi));
                swapped.push((i, vj));
                out.push(vj);
            }
        } else {
            let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * k);
            for i in 0..k {
                let j = i + self.below_usize(n - i);
                let vi = *swapped.get(&i).unwrap_or(&i);
                let vj = *swapped.get(&j).unwrap_or(&j);
                swapped.insert(j, vi);
                swapped.insert(i, vj);
                out.push(vj);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_stream() {
        let mut a = CounterRng::from_parts(&[1, 2, 3]);
        let mut b = CounterRng::from_parts(&[1, 2, 3]);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn key_order_matters() {
        assert_ne!(derive_key(&[1, 2]), derive_key(&[2, 1]));
        assert_ne!(derive_key(&[0]), derive_key(&[0, 0]));
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = CounterRng::new(9);
        for bound in [1u64, 2, 3, 7, 1000, u64::MAX] {
            for _ in 0..200 {
                assert!(r.below(bound) < bound);
            }
        }
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut r = CounterRng::new(5);
        for _ in 0..1000 {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn sample_distinct_is_distinct() {
        let mut r = CounterRng::new(11);
        for (n, k) in [(10, 3), (10, 10), (10, 20), (1000, 5), (1, 1), (5, 0)] {
            let mut s = r.sample_distinct(n, k);
            assert_eq!(s.len(), k.min(n));
            assert!(s.iter().all(|&x| x < n));
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), k.min(n));
        }
    }
}
