//! Brute-force references shared by the integration tests. Nothing here
//! goes through the automaton.
#![allow(dead_code)]

use std::cmp::Ordering;

/// Every word over `{0, …, b−1}` of length `n`, lexicographic.
pub fn all_words(b: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * b as usize);
        for w in &out {
            for a in 0..b {
                let mut x = w.clone();
                x.push(a);
                next.push(x);
            }
        }
        out = next;
    }
    out
}

/// `w ∈ L` iff every suffix is `≼` the prefix of `c` of the same length.
pub fn in_language(c: &[u32], w: &[u32]) -> bool {
    (0..w.len()).all(|i| {
        let suffix = &w[i..];
        assert!(suffix.len() <= c.len(), "reference needs more digits");
        suffix.cmp(&c[..suffix.len()]) != Ordering::Greater
    })
}

/// Longest suffix of `w` that is a prefix of `c`, by direct scan.
pub fn longest_suffix_prefix(c: &[u32], w: &[u32]) -> usize {
    (0..=w.len()).rev().find(|&l| l <= c.len() && w[w.len() - l..] == c[..l]).unwrap()
}

/// Zeros in `c` right after its prefix of length `j` (`j ≥ 1`).
pub fn zeros_after(c: &[u32], j: usize) -> usize {
    c[j..].iter().take_while(|&&d| d == 0).count()
}

pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Parry measure of the golden-mean shift (no `11`): with left and right
/// Perron vector `(g, 1)`, `μ[w] = u_{w_1} u_{w_m} / (g^{m−1} (g² + 1))`.
pub fn golden_parry(w: &[u32]) -> f64 {
    let g = golden_ratio();
    if w.windows(2).any(|p| p == [1, 1]) {
        return 0.0;
    }
    let u = |a: u32| if a == 0 { g } else { 1.0 };
    u(w[0]) * u(w[w.len() - 1]) / (g.powi(w.len() as i32 - 1) * (g * g + 1.0))
}
