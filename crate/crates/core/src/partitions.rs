//! Strict partitions, integer index sequences, and the straightening calculus
//! that normalizes an arbitrary Q-index sequence to ±(strict partition) or zero.
//!
//! Straightening applies, in order:
//! 1. contraction of `{+a, -a}` pairs into the scalar factor `(-1)^(a-1)`,
//!    with the sign of the permutation that brings the pair to the front;
//! 2. zero when a negative entry remains unpaired or a positive entry repeats;
//! 3. deletion of zeros after moving them to the tail, with the sign of the
//!    moving permutation;
//! 4. descending sort of the remaining distinct positive entries, with the
//!    sign of the sorting permutation.

use crate::error::Error;
use crate::rat::{rat, Rat};
use std::collections::HashSet;
use std::fmt;

/// An ordered list of integer indices labelling a Q-function.
///
/// Entries may repeat, be zero, or — as intermediate results of the raising
/// and lowering actions — be negative. The empty sequence labels the constant
/// Q-function 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSequence {
    parts: Vec<i64>,
}

impl IndexSequence {
    pub fn new(parts: Vec<i64>) -> Self {
        IndexSequence { parts }
    }

    pub fn empty() -> Self {
        IndexSequence { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Copy with `parts[position] += delta` at the 1-based `position`.
    /// No straightening is performed.
    pub fn shift_part(&self, position: usize, delta: i64) -> Result<IndexSequence, Error> {
        if position == 0 || position > self.parts.len() {
            return Err(Error::PositionOutOfRange {
                position,
                len: self.parts.len(),
            });
        }
        let mut parts = self.parts.clone();
        parts[position - 1] += delta;
        Ok(IndexSequence { parts })
    }

    /// Copy with extra indices appended at the tail.
    pub fn with_appended(&self, extra: &[i64]) -> IndexSequence {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(extra);
        IndexSequence { parts }
    }

    /// Copy with the entry at 0-based `index` removed.
    pub fn without(&self, index: usize) -> IndexSequence {
        let mut parts = self.parts.clone();
        parts.remove(index);
        IndexSequence { parts }
    }

    /// Normalizes this sequence to `±scalar·(strict partition)` or zero.
    pub fn straighten(&self) -> StraightenResult {
        let mut parts = self.parts.clone();
        let mut sign = 1i32;
        let mut scalar = rat(1);

        // Contract {+a, -a} pairs, leftmost negative entry first, matched
        // with the leftmost occurrence of +a. Each contraction carries the
        // sign of the permutation bringing the pair to positions (1, 2) and
        // the factor (-1)^(a-1).
        while let Some(neg) = parts.iter().position(|&v| v < 0) {
            let a = -parts[neg];
            let Some(pos) = parts.iter().position(|&v| v == a) else {
                return StraightenResult::Zero;
            };
            let perm_parity = if pos < neg { pos + neg + 1 } else { pos + neg };
            if perm_parity % 2 == 1 {
                sign = -sign;
            }
            if (a - 1) % 2 == 1 {
                scalar = -scalar;
            }
            let (hi, lo) = if pos > neg { (pos, neg) } else { (neg, pos) };
            parts.remove(hi);
            parts.remove(lo);
        }

        let mut seen = HashSet::new();
        for &v in &parts {
            if v > 0 && !seen.insert(v) {
                return StraightenResult::Zero;
            }
        }

        // Move zeros to the tail (keeping their order) and delete them; the
        // permutation sign is (-1) per zero/nonzero transposition.
        let mut zero_inversions = 0usize;
        for (idx, &v) in parts.iter().enumerate() {
            if v == 0 {
                zero_inversions += parts[idx + 1..].iter().filter(|&&w| w != 0).count();
            }
        }
        if zero_inversions % 2 == 1 {
            sign = -sign;
        }
        let mut positives: Vec<i64> = parts.into_iter().filter(|&v| v != 0).collect();

        let mut sort_inversions = 0usize;
        for i in 0..positives.len() {
            for j in i + 1..positives.len() {
                if positives[i] < positives[j] {
                    sort_inversions += 1;
                }
            }
        }
        if sort_inversions % 2 == 1 {
            sign = -sign;
        }
        positives.sort_unstable_by(|a, b| b.cmp(a));

        let partition = StrictPartition {
            parts: positives.into_iter().map(|v| v as u32).collect(),
        };
        StraightenResult::Term {
            sign,
            scalar,
            partition,
        }
    }
}

impl From<&StrictPartition> for IndexSequence {
    fn from(p: &StrictPartition) -> Self {
        IndexSequence {
            parts: p.parts.iter().map(|&v| v as i64).collect(),
        }
    }
}

impl fmt::Display for IndexSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

/// A strictly decreasing list of positive integers.
///
/// The derived `Ord` compares part lists lexicographically; listings in
/// decreasing lexicographic order iterate it in reverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StrictPartition {
    parts: Vec<u32>,
}

impl StrictPartition {
    pub fn new(parts: Vec<u32>) -> Result<Self, Error> {
        for w in parts.windows(2) {
            if w[0] <= w[1] {
                return Err(Error::InvalidPartition(format!(
                    "parts must strictly decrease, got {:?}",
                    parts
                )));
            }
        }
        if parts.last() == Some(&0) {
            return Err(Error::InvalidPartition("parts must be positive".into()));
        }
        Ok(StrictPartition { parts })
    }

    pub fn empty() -> Self {
        StrictPartition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of (nonzero) parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn contains(&self, value: u32) -> bool {
        self.parts.contains(&value)
    }

    /// True when every part is even; the empty partition qualifies.
    pub fn all_parts_even(&self) -> bool {
        self.parts.iter().all(|&p| p % 2 == 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.parts.iter().map(|&p| p.into()).collect())
    }
}

impl fmt::Display for StrictPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

/// Outcome of straightening an index sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StraightenResult {
    /// No canonical form exists: a repeated positive part, or an unpaired
    /// negative entry.
    Zero,
    Term {
        /// +1 or -1, the sign of the normalizing permutation.
        sign: i32,
        /// Product of the `(-1)^(a-1)` contraction factors; 1 when no
        /// negative entries occurred.
        scalar: Rat,
        partition: StrictPartition,
    },
}

impl StraightenResult {
    /// `sign * scalar`, or 0 for `Zero`.
    pub fn coefficient(&self) -> Rat {
        match self {
            StraightenResult::Zero => rat(0),
            StraightenResult::Term { sign, scalar, .. } => rat(*sign as i64) * scalar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartFilter {
    All,
    /// Only partitions whose parts are all even.
    EvenPartsOnly,
}

/// All strict partitions of `n`, in decreasing lexicographic order.
pub fn strict_partitions_of(n: u32, filter: PartFilter) -> Vec<StrictPartition> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    descend(n, n, filter, &mut stack, &mut out);
    out
}

fn descend(
    remaining: u32,
    max_part: u32,
    filter: PartFilter,
    stack: &mut Vec<u32>,
    out: &mut Vec<StrictPartition>,
) {
    if remaining == 0 {
        out.push(StrictPartition {
            parts: stack.clone(),
        });
        return;
    }
    for m in (1..=remaining.min(max_part)).rev() {
        if filter == PartFilter::EvenPartsOnly && m % 2 == 1 {
            continue;
        }
        stack.push(m);
        descend(remaining - m, m - 1, filter, stack, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;
    use proptest::prelude::*;

    fn seq(parts: &[i64]) -> IndexSequence {
        IndexSequence::new(parts.to_vec())
    }

    fn sp(parts: &[u32]) -> StrictPartition {
        StrictPartition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn straighten_moves_zeros_and_sorts() {
        // Q_{0,2,3,0,1} = -Q_{3,2,1}
        match seq(&[0, 2, 3, 0, 1]).straighten() {
            StraightenResult::Term {
                sign,
                scalar,
                partition,
            } => {
                assert_eq!(sign, -1);
                assert_eq!(scalar, rat(1));
                assert_eq!(partition, sp(&[3, 2, 1]));
            }
            StraightenResult::Zero => panic!("expected a term"),
        }
    }

    #[test]
    fn straighten_keeps_strict_sequences() {
        match seq(&[4, 2]).straighten() {
            StraightenResult::Term {
                sign,
                scalar,
                partition,
            } => {
                assert_eq!(sign, 1);
                assert_eq!(scalar, rat(1));
                assert_eq!(partition, sp(&[4, 2]));
            }
            StraightenResult::Zero => panic!("expected a term"),
        }
    }

    #[test]
    fn repeated_positive_part_is_zero() {
        assert_eq!(seq(&[2, 2]).straighten(), StraightenResult::Zero);
        assert_eq!(seq(&[5, 3, 3, 1]).straighten(), StraightenResult::Zero);
    }

    #[test]
    fn paired_negative_contracts() {
        // Q_{3,-3} = (-1)^2 = +1 on the empty partition
        match seq(&[3, -3]).straighten() {
            StraightenResult::Term {
                sign,
                scalar,
                partition,
            } => {
                assert_eq!(sign, 1);
                assert_eq!(scalar, rat(1));
                assert!(partition.is_empty());
            }
            StraightenResult::Zero => panic!("expected a term"),
        }
        // Q_{2,-2} = (-1)^1 = -1
        assert_eq!(seq(&[2, -2]).straighten().coefficient(), rat(-1));
        // the pair may sit apart; permutation signs apply
        assert_eq!(seq(&[-1, 1]).straighten().coefficient(), rat(-1));
        match seq(&[5, 1, -1]).straighten() {
            StraightenResult::Term {
                sign,
                scalar,
                partition,
            } => {
                assert_eq!(sign, 1);
                assert_eq!(scalar, rat(1));
                assert_eq!(partition, sp(&[5]));
            }
            StraightenResult::Zero => panic!("expected a term"),
        }
        // contraction happens before zero handling
        match seq(&[4, 2, 1, -2]).straighten() {
            StraightenResult::Term {
                sign,
                scalar,
                partition,
            } => {
                assert_eq!(sign, -1);
                assert_eq!(scalar, rat(-1));
                assert_eq!(partition, sp(&[4, 1]));
            }
            StraightenResult::Zero => panic!("expected a term"),
        }
    }

    #[test]
    fn unpaired_negative_is_zero() {
        assert_eq!(seq(&[3, -2]).straighten(), StraightenResult::Zero);
        assert_eq!(seq(&[-4]).straighten(), StraightenResult::Zero);
        assert_eq!(seq(&[5, 4, -3, 0]).straighten(), StraightenResult::Zero);
    }

    #[test]
    fn single_zero_deletion_carries_the_sign() {
        // Q_{0,2} = -Q_2: the zero passes one nonzero entry
        assert_eq!(seq(&[0, 2]).straighten().coefficient(), rat(-1));
        match seq(&[5, 0, 1]).straighten() {
            StraightenResult::Term { sign, partition, .. } => {
                assert_eq!(sign, -1);
                assert_eq!(partition, sp(&[5, 1]));
            }
            StraightenResult::Zero => panic!("expected a term"),
        }
        // trailing zeros cost nothing
        assert_eq!(seq(&[3, 1, 0]).straighten().coefficient(), rat(1));
    }

    #[test]
    fn empty_sequence_is_the_empty_partition() {
        match seq(&[]).straighten() {
            StraightenResult::Term {
                sign,
                scalar,
                partition,
            } => {
                assert_eq!(sign, 1);
                assert_eq!(scalar, rat(1));
                assert!(partition.is_empty());
            }
            StraightenResult::Zero => panic!("expected a term"),
        }
    }

    #[test]
    fn shift_part_is_positional() {
        let s = seq(&[3, 1]);
        assert_eq!(s.shift_part(2, 2).unwrap(), seq(&[3, 3]));
        assert_eq!(s.shift_part(1, 4).unwrap(), seq(&[7, 1]));
        assert_eq!(s.shift_part(2, -2).unwrap(), seq(&[3, -1]));
        assert!(matches!(
            s.shift_part(3, 1),
            Err(Error::PositionOutOfRange { position: 3, len: 2 })
        ));
        assert!(s.shift_part(0, 1).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let all4: Vec<_> = strict_partitions_of(4, PartFilter::All);
        assert_eq!(all4, vec![sp(&[4]), sp(&[3, 1])]);
        assert_eq!(
            strict_partitions_of(0, PartFilter::All),
            vec![StrictPartition::empty()]
        );
        assert_eq!(
            strict_partitions_of(6, PartFilter::EvenPartsOnly),
            vec![sp(&[6]), sp(&[4, 2])]
        );
        assert_eq!(
            strict_partitions_of(6, PartFilter::All),
            vec![sp(&[6]), sp(&[5, 1]), sp(&[4, 2]), sp(&[3, 2, 1])]
        );
    }

    /// Independent count of partitions into distinct parts via the
    /// generating-function recurrence on prod (1 + x^k).
    fn distinct_part_counts(limit: usize) -> Vec<u64> {
        let mut c = vec![0u64; limit + 1];
        c[0] = 1;
        for k in 1..=limit {
            for n in (k..=limit).rev() {
                c[n] += c[n - k];
            }
        }
        c
    }

    #[test]
    fn enumeration_matches_generating_function_counts() {
        let counts = distinct_part_counts(20);
        for n in 0..=20u32 {
            let list = strict_partitions_of(n, PartFilter::All);
            assert_eq!(list.len() as u64, counts[n as usize], "count at n={n}");
            // duplicate-free, well-formed, correctly ordered
            for p in &list {
                assert_eq!(p.size(), n);
                assert!(StrictPartition::new(p.parts().to_vec()).is_ok());
            }
            for w in list.windows(2) {
                assert!(w[0] > w[1], "decreasing lexicographic order");
            }
        }
    }

    #[test]
    fn even_filter_agrees_with_filtering() {
        for n in 0..=20u32 {
            let filtered: Vec<_> = strict_partitions_of(n, PartFilter::All)
                .into_iter()
                .filter(|p| p.all_parts_even())
                .collect();
            assert_eq!(strict_partitions_of(n, PartFilter::EvenPartsOnly), filtered);
        }
    }

    #[test]
    fn straighten_scalar_example_sign() {
        // two contractions multiply: {1,-1} gives +1, {2,-2} gives -1
        assert_eq!(seq(&[1, -1, 2, -2]).straighten().coefficient(), rat(-1));
        assert_eq!(
            seq(&[1, -1, 2, -2]).straighten(),
            seq(&[2, -2, 1, -1]).straighten()
        );
        assert_eq!(frac(1, 1), rat(1));
    }

    fn arb_distinct_positive_seq() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::btree_set(1i64..40, 1..6)
            .prop_map(|s| s.into_iter().collect::<Vec<_>>())
    }

    proptest! {
        #[test]
        fn permutations_change_only_the_sign(base in arb_distinct_positive_seq(), seed in 0u64..1000) {
            let mut permuted = base.clone();
            // a deterministic shuffle driven by the seed
            let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut swaps = 0usize;
            for i in (1..permuted.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let j = (state as usize) % (i + 1);
                if j != i {
                    permuted.swap(i, j);
                    swaps += 1;
                }
            }
            let a = seq(&base).straighten();
            let b = seq(&permuted).straighten();
            match (a, b) {
                (
                    StraightenResult::Term { sign: s1, partition: p1, .. },
                    StraightenResult::Term { sign: s2, partition: p2, .. },
                ) => {
                    prop_assert_eq!(p1, p2);
                    let expected = if swaps % 2 == 0 { s1 } else { -s1 };
                    prop_assert_eq!(s2, expected);
                }
                _ => prop_assert!(false, "distinct positive entries never straighten to zero"),
            }
        }

        #[test]
        fn straighten_is_idempotent(parts in proptest::collection::vec(-6i64..12, 0..7)) {
            if let StraightenResult::Term { partition, .. } = seq(&parts).straighten() {
                let again = IndexSequence::from(&partition).straighten();
                match again {
                    StraightenResult::Term { sign, scalar, partition: p2 } => {
                        prop_assert_eq!(sign, 1);
                        prop_assert_eq!(scalar, rat(1));
                        prop_assert_eq!(p2, partition);
                    }
                    StraightenResult::Zero => prop_assert!(false, "canonical form must be stable"),
                }
            }
        }

        #[test]
        fn repeated_positive_always_zero(
            mut parts in proptest::collection::vec(0i64..10, 0..5),
            dup in 1i64..10,
            at in 0usize..5,
        ) {
            parts.push(dup);
            let at = at.min(parts.len());
            parts.insert(at, dup);
            prop_assert_eq!(seq(&parts).straighten(), StraightenResult::Zero);
        }
    }
}
