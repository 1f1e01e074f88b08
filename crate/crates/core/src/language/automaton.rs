use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::kmp;
use super::word::Word;
use crate::digits::{DigitSeq, Periodicity};
use crate::error::{Error, Result};

/// The spine-and-fallback graph reading the expansion `c` of 1.
///
/// State `j` means "the longest suffix read so far that is a prefix of `c`
/// has length `j`". From `j` the letter `c_{j+1}` advances along the spine,
/// any smaller letter falls back to the root, and larger letters are
/// forbidden. With a periodicity certificate `(p, q)` the spine closes up:
/// state `p + q` is identified with state `p`.
#[derive(Debug, Clone)]
pub struct PrefixAutomaton {
    digits: DigitSeq,
    fold: Option<Periodicity>,
    /// `rows[j][a]` for the states whose next spine digit is stored.
    rows: Vec<Vec<Option<usize>>>,
    failure: Vec<usize>,
}

/// Outcome of running a word from the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Walk {
    /// `matched = |s(w)|`; `state` is the (possibly folded) end vertex.
    Accepted { matched: usize, state: usize },
    /// The suffix starting at 1-based `position` exceeds the matching prefix of `c`.
    Rejected { position: usize },
}

/// One labeled edge of the automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub label: u32,
    pub to: usize,
}

impl PrefixAutomaton {
    pub fn build(digits: &DigitSeq) -> Result<Self> {
        // a purely periodic c would fold a spine state onto the root; unroll
        // one period so that the root keeps meaning s(w) = ε
        let fold = digits.periodicity().map(|p| match p.preperiod {
            0 => Periodicity {
                preperiod: p.period,
                period: p.period,
            },
            _ => p,
        });
        let n_rows = match fold {
            Some(Periodicity { preperiod, period }) => {
                let folded = preperiod + period;
                // the state being merged away must behave like its target
                if let (Some(a), Some(b)) = (digits.digit(folded), digits.digit(preperiod)) {
                    if a != b {
                        return Err(Error::MalformedDigits(format!(
                            "cannot fold state {folded} onto {preperiod}: spine digits {a} and {b} differ"
                        )));
                    }
                }
                folded
            }
            None => digits.depth(),
        };
        let b = digits.alphabet();
        let mut rows = Vec::with_capacity(n_rows);
        for j in 0..n_rows {
            let c = digits.digit(j).expect("spine digit inside the stored prefix or certificate");
            let row = (0..b)
                .map(|a| match a.cmp(&c) {
                    std::cmp::Ordering::Less => Some(0),
                    std::cmp::Ordering::Equal => Some(fold_index(fold, j + 1)),
                    std::cmp::Ordering::Greater => None,
                })
                .collect();
            rows.push(row);
        }
        Ok(PrefixAutomaton {
            digits: digits.clone(),
            fold,
            rows,
            failure: kmp::failure_table(digits.digits()),
        })
    }

    pub fn digits(&self) -> &DigitSeq {
        &self.digits
    }

    pub fn alphabet(&self) -> u32 {
        self.digits.alphabet()
    }

    /// Number of stored digits `N`.
    pub fn depth(&self) -> usize {
        self.digits.depth()
    }

    pub fn fold(&self) -> Option<Periodicity> {
        self.fold
    }

    pub fn is_folded(&self) -> bool {
        self.fold.is_some()
    }

    /// KMP border table over the stored digits.
    pub fn failure_table(&self) -> &[usize] {
        &self.failure
    }

    /// Maps an unfolded vertex `q_j` to its state index.
    pub fn state_of(&self, matched: usize) -> usize {
        fold_index(self.fold, matched)
    }

    /// Longest word length the automaton can answer for, if bounded.
    pub fn max_length(&self) -> Option<usize> {
        if self.digits.is_extendable() {
            None
        } else {
            Some(self.depth())
        }
    }

    pub(crate) fn check_length(&self, len: usize) -> Result<()> {
        match self.max_length() {
            Some(max) if len > max => Err(Error::DepthExceeded {
                needed: len,
                available: max,
            }),
            _ => Ok(()),
        }
    }

    /// Size of a state space large enough for every word of length `≤ len`.
    pub fn state_bound(&self, len: usize) -> Result<usize> {
        self.check_length(len)?;
        Ok(match self.fold {
            Some(Periodicity { preperiod, period }) => preperiod + period,
            None => len + 1,
        })
    }

    /// Transition from state `j` on letter `a`; `None` means the letter is forbidden.
    pub fn step(&self, j: usize, a: u32) -> Result<Option<usize>> {
        if a >= self.alphabet() {
            return Ok(None);
        }
        if let Some(row) = self.rows.get(j) {
            return Ok(row[a as usize]);
        }
        // past the stored prefix of an unfolded automaton
        let c = self.digits.require(j)?;
        Ok(match a.cmp(&c) {
            std::cmp::Ordering::Less => Some(0),
            std::cmp::Ordering::Equal => Some(j + 1),
            std::cmp::Ordering::Greater => None,
        })
    }

    pub fn walk(&self, w: &Word) -> Result<Walk> {
        self.check_length(w.len())?;
        let mut state = 0;
        let mut matched = 0;
        for (i, &a) in w.letters().iter().enumerate() {
            match self.step(state, a)? {
                Some(next) => {
                    state = next;
                    matched = if a < self.digits.require(matched)? { 0 } else { matched + 1 };
                }
                None => {
                    return Ok(Walk::Rejected {
                        position: i + 1 - matched,
                    })
                }
            }
        }
        Ok(Walk::Accepted { matched, state })
    }

    pub fn is_member(&self, w: &Word) -> Result<bool> {
        Ok(matches!(self.walk(w)?, Walk::Accepted { .. }))
    }

    /// `q(w)` as the unfolded vertex index, which equals `|s(w)|`.
    pub fn end_state(&self, w: &Word) -> Result<usize> {
        match self.walk(w)? {
            Walk::Accepted { matched, .. } => Ok(matched),
            Walk::Rejected { position } => Err(not_in_language(w, position)),
        }
    }

    /// Membership with a `NotInLanguage` error carrying the offending position.
    pub fn require_member(&self, w: &Word) -> Result<()> {
        self.end_state(w).map(|_| ())
    }

    /// `|L_n|` by dynamic programming over the states.
    pub fn count_words(&self, n: usize) -> Result<BigUint> {
        let states = self.state_bound(n)?;
        let mut cur = vec![BigUint::zero(); states];
        cur[0] = BigUint::one();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); states];
            for (j, count) in cur.iter().enumerate() {
                if count.is_zero() {
                    continue;
                }
                for a in 0..self.alphabet() {
                    if let Some(t) = self.step(j, a)? {
                        next[t] += count;
                    }
                }
            }
            cur = next;
        }
        Ok(cur.into_iter().sum())
    }

    /// The words of `L_n` in increasing lexicographic order.
    pub fn enumerate_words(&self, n: usize) -> Result<Words<'_>> {
        self.check_length(n)?;
        Ok(Words {
            aut: self,
            n,
            letters: Vec::with_capacity(n),
            states: vec![0],
            next: vec![0],
            done: false,
        })
    }

    /// Edges out of the states with a stored spine digit, in (state, label) order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (from, row) in self.rows.iter().enumerate() {
            for (label, to) in row.iter().enumerate() {
                if let Some(to) = *to {
                    out.push(Edge {
                        from,
                        label: label as u32,
                        to,
                    });
                }
            }
        }
        out
    }

    /// Number of states with outgoing edges materialized.
    pub fn materialized_states(&self) -> usize {
        self.rows.len()
    }
}

pub(crate) fn not_in_language(w: &Word, position: usize) -> Error {
    Error::NotInLanguage {
        word: w.to_string(),
        position,
    }
}

fn fold_index(fold: Option<Periodicity>, j: usize) -> usize {
    match fold {
        Some(Periodicity { preperiod, period }) if j >= preperiod + period => preperiod + (j - preperiod) % period,
        _ => j,
    }
}

/// Lexicographic depth-first stream over `L_n`.
#[derive(Debug)]
pub struct Words<'a> {
    aut: &'a PrefixAutomaton,
    n: usize,
    letters: Vec<u32>,
    states: Vec<usize>,
    next: Vec<u32>,
    done: bool,
}

impl Iterator for Words<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        loop {
            let d = self.letters.len();
            if d == self.n {
                let w = Word::new(self.letters.clone());
                if self.n == 0 {
                    self.done = true;
                } else {
                    self.backtrack();
                }
                return Some(w);
            }
            let mut advanced = false;
            while self.next[d] < self.aut.alphabet() {
                let a = self.next[d];
                self.next[d] += 1;
                // length was checked up front, so steps cannot run out of digits
                if let Ok(Some(t)) = self.aut.step(self.states[d], a) {
                    self.letters.push(a);
                    self.states.push(t);
                    self.next.push(0);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                if d == 0 {
                    self.done = true;
                    return None;
                }
                self.backtrack();
            }
        }
    }
}

impl Words<'_> {
    fn backtrack(&mut self) {
        self.letters.pop();
        self.states.pop();
        self.next.pop();
    }
}

/// Brute-force membership straight from the definition: every suffix of `w`
/// is `≼` the prefix of `c` of the same length.
pub fn is_member_oracle(digits: &DigitSeq, w: &Word) -> Result<bool> {
    let n = w.len();
    let c: Vec<u32> = (0..n).map(|i| digits.require(i)).collect::<Result<_>>()?;
    let x = w.letters();
    for k in 0..n {
        let tail = &x[k..];
        if tail > &c[..n - k] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden(depth: usize) -> DigitSeq {
        let d: Vec<u32> = (0..depth).map(|i| if i % 2 == 0 { 1 } else { 0 }).collect();
        DigitSeq::new(d, 2).unwrap()
    }

    fn three_halves() -> DigitSeq {
        DigitSeq::new(vec![1, 0, 1, 0, 0, 0, 0, 0, 1], 2).unwrap()
    }

    #[test]
    fn golden_depth_four_edges() {
        let aut = PrefixAutomaton::build(&golden(4)).unwrap();
        assert_eq!(aut.step(0, 0).unwrap(), Some(0));
        assert_eq!(aut.step(0, 1).unwrap(), Some(1));
        assert_eq!(aut.step(1, 0).unwrap(), Some(2));
        assert_eq!(aut.step(1, 1).unwrap(), None);
        assert_eq!(aut.materialized_states(), 4);
    }

    #[test]
    fn three_halves_depth_three_edges() {
        let c = DigitSeq::new(vec![1, 0, 1], 2).unwrap();
        let aut = PrefixAutomaton::build(&c).unwrap();
        let edges = aut.edges();
        let expect = [(0, 0, 0), (0, 1, 1), (1, 0, 2), (2, 0, 0), (2, 1, 3)];
        let got: Vec<_> = edges.iter().map(|e| (e.from, e.label, e.to)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn depth_one_base_case() {
        let c = DigitSeq::new(vec![2], 3).unwrap();
        let aut = PrefixAutomaton::build(&c).unwrap();
        let got: Vec<_> = aut.edges().iter().map(|e| (e.from, e.label, e.to)).collect();
        assert_eq!(got, [(0, 0, 0), (0, 1, 0), (0, 2, 1)]);
    }

    #[test]
    fn membership_examples() {
        let aut = PrefixAutomaton::build(&golden(6)).unwrap();
        assert!(!aut.is_member(&Word::new(vec![1, 1])).unwrap());
        assert!(aut.is_member(&Word::new(vec![1, 0, 1])).unwrap());
        assert!(aut.is_member(&Word::empty()).unwrap());
        assert_eq!(aut.end_state(&Word::new(vec![1, 0])).unwrap(), 2);
        assert_eq!(aut.end_state(&Word::new(vec![0, 0])).unwrap(), 0);
        assert_eq!(aut.end_state(&Word::new(vec![0, 1])).unwrap(), 1);
        match aut.end_state(&Word::new(vec![0, 1, 1])) {
            Err(Error::NotInLanguage { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unfolded_depth_is_enforced() {
        let aut = PrefixAutomaton::build(&golden(3)).unwrap();
        assert!(matches!(
            aut.is_member(&Word::zeros(4)),
            Err(Error::DepthExceeded { needed: 4, available: 3 })
        ));
    }

    #[test]
    fn folded_golden_accepts_long_words() {
        let c = golden(2).with_periodicity(0, 2).unwrap();
        let aut = PrefixAutomaton::build(&c).unwrap();
        assert_eq!(aut.state_bound(100).unwrap(), 4);
        assert_eq!(aut.fold(), Some(Periodicity { preperiod: 2, period: 2 }));
        let w = Word::new((0..50).map(|i| (i % 2) as u32).collect());
        assert!(aut.is_member(&w).unwrap());
        // 0101…01 ends in the c-prefix 1010…1 of length 49
        assert_eq!(aut.end_state(&w).unwrap(), 49);
        assert_eq!(aut.state_of(49), 3);
        let mut v = Word::new(vec![1, 0, 1, 0, 1, 0]);
        assert_eq!(aut.end_state(&v).unwrap(), 6);
        v.push(1);
        assert_eq!(aut.end_state(&v).unwrap(), 7);
    }

    #[test]
    fn golden_counts_are_fibonacci() {
        let aut = PrefixAutomaton::build(&golden(12)).unwrap();
        let counts: Vec<u64> = (0..=5).map(|n| aut.count_words(n).unwrap().try_into().unwrap()).collect();
        assert_eq!(counts, [1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn enumeration_order_and_count() {
        let aut = PrefixAutomaton::build(&golden(6)).unwrap();
        let words: Vec<Word> = aut.enumerate_words(2).unwrap().collect();
        assert_eq!(words, [Word::new(vec![0, 0]), Word::new(vec![0, 1]), Word::new(vec![1, 0])]);
        let eps: Vec<Word> = aut.enumerate_words(0).unwrap().collect();
        assert_eq!(eps, [Word::empty()]);
    }

    /// All words over the alphabet of length n, lexicographically.
    fn all_words(b: u32, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| (0..b).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                }))
                .collect();
        }
        out
    }

    #[test]
    fn three_halves_matches_oracle() {
        let c = three_halves();
        let aut = PrefixAutomaton::build(&c).unwrap();
        for n in 0..=9 {
            let oracle: Vec<Word> = all_words(2, n)
                .into_iter()
                .filter(|w| is_member_oracle(&c, w).unwrap())
                .collect();
            let listed: Vec<Word> = aut.enumerate_words(n).unwrap().collect();
            assert_eq!(listed, oracle, "n = {n}");
            assert_eq!(aut.count_words(n).unwrap(), BigUint::from(oracle.len()));
        }
    }

    #[test]
    fn oracle_needs_digits() {
        let c = DigitSeq::new(vec![1, 0], 2).unwrap();
        assert!(is_member_oracle(&c, &Word::zeros(3)).is_err());
    }
}
