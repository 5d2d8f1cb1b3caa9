//! Reference implementations shared by the oracle tests and the acceptance
//! suite. Deliberately naive.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn full_lcs(a: &[char], b: &[char]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

pub fn full_substring(a: &[char], b: &[char]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    let mut best = 0;
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            if a[i - 1] == b[j - 1] {
                t[i][j] = t[i - 1][j - 1] + 1;
                best = best.max(t[i][j]);
            }
        }
    }
    best
}

/// Gap sums over all N! orderings (Heap's algorithm, duplicates included).
pub fn brute_gap_sums(tokens: &[u32], v: usize) -> (Vec<u64>, u64) {
    let mut a = tokens.to_vec();
    let n = a.len();
    let mut sums = vec![0u64; v - 1];
    let mut orderings = 0u64;
    let mut visit = |a: &[u32]| {
        let mut first = vec![usize::MAX; v];
        let mut order = Vec::with_capacity(v);
        for (p, &t) in a.iter().enumerate() {
            if first[t as usize] == usize::MAX {
                first[t as usize] = p;
                order.push(p);
            }
        }
        for i in 0..v - 1 {
            sums[i] += (order[i + 1] - order[i]) as u64;
        }
        orderings += 1;
    };
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    (sums, orderings)
}

/// Every frequency vector over up to `types` types with total `n`.
pub fn compositions(n: usize, types: usize) -> Vec<Vec<usize>> {
    if types == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, types - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn bag_of(freqs: &[usize]) -> (Vec<String>, Vec<u32>) {
    let mut words = Vec::new();
    let mut ids = Vec::new();
    let mut next = 0u32;
    for (t, &f) in freqs.iter().enumerate() {
        if f == 0 {
            continue;
        }
        for _ in 0..f {
            words.push(format!("w{t}"));
            ids.push(next);
        }
        next += 1;
    }
    (words, ids)
}

const ALPHABETS: &[&str] = &["ab", "abcd", "aAbB ", "the quick brown fox", "ÄäßéÉ€ a", "0123456789abcdefghijklmnopqrstuvwxyz@#"];

fn random_string(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

/// Random string pairs up to 200 characters over assorted alphabets.
pub fn random_pairs(n: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let alphabet: Vec<char> = ALPHABETS[i % ALPHABETS.len()].chars().collect();
            let a = random_string(&mut rng, &alphabet, 200);
            // Every fourth pair is a light edit of the first string, so long
            // common runs are exercised too.
            let b = if i % 4 == 0 {
                let mut cs: Vec<char> = a.chars().collect();
                for _ in 0..rng.random_range(0..5) {
                    if !cs.is_empty() {
                        let p = rng.random_range(0..cs.len());
                        cs[p] = alphabet[rng.random_range(0..alphabet.len())];
                    }
                }
                cs.into_iter().collect()
            } else {
                random_string(&mut rng, &alphabet, 200)
            };
            (a, b)
        })
        .collect()
}
