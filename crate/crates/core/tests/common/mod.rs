//! Test-only oracles and generators, independent of the library's combination
//! code paths.

#![allow(dead_code)]

use evifuse::belief::MassFunction;
use evifuse::FocalSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random mass function with 1..=6 focal elements (∅ allowed when
/// `allow_empty`).
pub fn random_mass(rng: &mut ChaCha8Rng, n: usize, allow_empty: bool) -> MassFunction {
    let subsets = 1u32 << n;
    let count = rng.gen_range(1..=6.min(subsets as usize));
    let mut entries = Vec::with_capacity(count);
    let mut total = 0.0;
    for _ in 0..count {
        let lo = if allow_empty { 0 } else { 1 };
        let bits = rng.gen_range(lo..subsets) as u16;
        let w: f64 = rng.gen_range(0.01..1.0);
        total += w;
        entries.push((FocalSet::from_bits(bits, n).unwrap(), w));
    }
    MassFunction::new(n, entries.into_iter().map(|(s, w)| (s, w / total))).unwrap()
}

/// Dense vector over all 2^n subsets, indexed by bits.
pub fn dense(m: &MassFunction) -> Vec<f64> {
    let mut v = vec![0.0; 1 << m.width()];
    for (set, mass) in m.focal_elements() {
        v[set.bits() as usize] += mass;
    }
    v
}

/// Brute-force conjunctive rule: every pair of subsets, every target.
pub fn dense_conjunctive(a: &[f64], b: &[f64]) -> Vec<f64> {
    let size = a.len();
    (0..size)
        .map(|target| {
            let mut acc = 0.0;
            for (x, ax) in a.iter().enumerate() {
                for (y, by) in b.iter().enumerate() {
                    if x & y == target {
                        acc += ax * by;
                    }
                }
            }
            acc
        })
        .collect()
}

/// Closed form of combining simple support functions `(class, support)`
/// with the conjunctive rule: classes are independent and any two
/// supported classes intersect in ∅.
pub fn simple_support_product(n: usize, supports: &[(usize, f64)]) -> Vec<f64> {
    let mut keep = vec![1.0; n];
    for &(c, s) in supports {
        keep[c] *= 1.0 - s;
    }
    let mut out = vec![0.0; 1 << n];
    let all: f64 = keep.iter().product();
    out[(1 << n) - 1] = all;
    for c in 0..n {
        let others: f64 = (0..n).filter(|&o| o != c).map(|o| keep[o]).product();
        out[1 << c] += (1.0 - keep[c]) * others;
    }
    // everything else is conflict (when n == 1, D is also the singleton)
    let assigned: f64 = out.iter().sum();
    out[0] = 1.0 - assigned;
    out
}

pub fn binomial(n: u64, k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}
