//! Border (failure) table of the digit prefix, used to find the longest
//! suffix of a word that is a prefix of `c`.

/// `fail[i]` is the length of the longest proper border of `pattern[..=i]`.
pub(crate) fn failure_table(pattern: &[u32]) -> Vec<usize> {
    let mut fail = vec![0; pattern.len()];
    let mut k = 0;
    for i in 1..pattern.len() {
        while k > 0 && pattern[i] != pattern[k] {
            k = fail[k - 1];
        }
        if pattern[i] == pattern[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// Length of the longest suffix of `text` that is a prefix of `pattern`.
/// `pattern` must be at least as long as `text`.
pub(crate) fn longest_suffix_prefix(pattern: &[u32], fail: &[usize], text: &[u32]) -> usize {
    debug_assert!(pattern.len() >= text.len());
    let mut k = 0;
    for &a in text {
        while k > 0 && a != pattern[k] {
            k = fail[k - 1];
        }
        if a == pattern[k] {
            k += 1;
        }
    }
    k
}
