//! Run-length sequences of exponent signs ("S-sequences") of words, their
//! cyclic versions, and the structural facts about the S-sequences attached
//! to a slope's relator that the cancellation layer relies on.

use crate::farey::{fusion_intervals, Slope};
use crate::words::{u_word, v_decomposition, Word};
use crate::{Error, Result};
use serde::Serialize;
use std::fmt;

/// Run lengths of maximal constant-sign blocks of a linear word.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SSeq(Vec<u64>);

impl SSeq {
    pub fn empty() -> SSeq {
        SSeq(Vec::new())
    }

    pub fn runs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.0.len();
        (0..n / 2).all(|i| self.0[i] == self.0[n - 1 - i])
    }
}

impl fmt::Display for SSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Run lengths read cyclically: a first and last block of equal sign are one
/// block. Stored starting at the block containing the word's first letter.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CyclicSSeq(Vec<u64>);

impl CyclicSSeq {
    pub fn runs(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of cyclic start positions where `pattern` matches entry for
    /// entry. The empty pattern matches nowhere, and a pattern longer than
    /// the sequence cannot match.
    pub fn count(&self, pattern: &[u64]) -> usize {
        if pattern.is_empty() || pattern.len() > self.0.len() {
            return 0;
        }
        let n = self.0.len();
        (0..n)
            .filter(|&i| (0..pattern.len()).all(|j| self.0[(i + j) % n] == pattern[j]))
            .count()
    }

    pub fn contains(&self, pattern: &[u64]) -> bool {
        self.count(pattern) > 0
    }
}

impl fmt::Display for CyclicSSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        SSeq(self.0.clone()).fmt(f)
    }
}

fn linear_runs(w: &Word) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut cur_sign = 0i32;
    let mut cur_len = 0u64;
    for l in w.letters() {
        if l.sign() == cur_sign {
            cur_len += 1;
        } else {
            if cur_len > 0 {
                runs.push(cur_len);
            }
            cur_sign = l.sign();
            cur_len = 1;
        }
    }
    if cur_len > 0 {
        runs.push(cur_len);
    }
    runs
}

/// S-sequence of a nonempty word.
pub fn s_sequence(w: &Word) -> Result<SSeq> {
    if w.is_empty() {
        return Err(Error::Precondition("s_sequence requires a nonempty word".into()));
    }
    Ok(SSeq(linear_runs(w)))
}

/// Cyclic S-sequence of a nonempty word.
pub fn cyclic_s_sequence(w: &Word) -> Result<CyclicSSeq> {
    if w.is_empty() {
        return Err(Error::Precondition("cyclic_s_sequence requires a nonempty word".into()));
    }
    let mut runs = linear_runs(w);
    let first = w.letters()[0].sign();
    let last = w.letters()[w.len() - 1].sign();
    if runs.len() >= 2 && first == last {
        // wraparound: the last block continues into the first
        let tail = runs.pop().unwrap();
        runs[0] += tail;
    }
    Ok(CyclicSSeq(runs))
}

/// The two characteristic S-sequences of a slope, from the four-factor
/// relator decomposition: `s1 = S(v1)`, `s2 = S(v2)` (`s2` is empty exactly
/// when the lower Farey parent has denominator 1).
#[derive(Clone, Debug, Serialize)]
pub struct SlopeSequences {
    pub r: Slope,
    /// floor(p/q); every run length is m or m+1
    pub m: u64,
    pub s1: SSeq,
    pub s2: SSeq,
    pub cs: CyclicSSeq,
}

pub fn slope_s_sequences(r: &Slope) -> Result<SlopeSequences> {
    let (q, p) = r.qp_u64()?;
    if q == 0 || q == p {
        return Err(Error::Precondition(format!(
            "slope_s_sequences requires 0 < r < 1, got {r}"
        )));
    }
    let [v1, v2, _, _] = v_decomposition(r)?;
    let s1 = s_sequence(&v1)?;
    let s2 = if v2.is_empty() { SSeq::empty() } else { s_sequence(&v2)? };
    let cs = cyclic_s_sequence(&u_word(r)?)?;
    Ok(SlopeSequences { r: r.clone(), m: p / q, s1, s2, cs })
}

/// Structural report on the slope's S-sequences: the cyclic sequence splits
/// as `(S1, S2, S1, S2)`, each part is symmetric and occurs exactly twice,
/// all entries are `m` or `m+1`, and `S1` is bordered by `m+1` entries
/// (degenerating to the single entry `m` when `S2` is empty).
#[derive(Clone, Debug, Serialize)]
pub struct SequenceReport {
    pub data: SlopeSequences,
    pub decomposition_ok: bool,
    pub s1_symmetric: bool,
    pub s2_symmetric: bool,
    pub s1_count: usize,
    pub s2_count: Option<usize>,
    pub counts_ok: bool,
    pub entries_ok: bool,
    pub border_ok: bool,
}

impl SequenceReport {
    pub fn ok(&self) -> bool {
        self.decomposition_ok
            && self.s1_symmetric
            && self.s2_symmetric
            && self.counts_ok
            && self.entries_ok
            && self.border_ok
    }
}

pub fn check_prop_sequence(r: &Slope) -> Result<SequenceReport> {
    let data = slope_s_sequences(r)?;
    let mut expected: Vec<u64> = Vec::new();
    for part in [&data.s1, &data.s2, &data.s1, &data.s2] {
        expected.extend_from_slice(part.runs());
    }
    let decomposition_ok = data.cs.runs() == &expected[..];
    let s1_symmetric = data.s1.is_symmetric();
    let s2_symmetric = data.s2.is_symmetric();
    let s1_count = data.cs.count(data.s1.runs());
    let s2_count = if data.s2.is_empty() { None } else { Some(data.cs.count(data.s2.runs())) };
    let counts_ok = s1_count == 2 && s2_count.is_none_or(|c| c == 2);
    let entries_ok = data
        .cs
        .runs()
        .iter()
        .all(|&e| e == data.m || e == data.m + 1);
    let border_ok = if data.s2.is_empty() {
        data.s1.runs() == [data.m]
    } else {
        let runs = data.s1.runs();
        runs.first() == Some(&(data.m + 1)) && runs.last() == Some(&(data.m + 1))
    };
    Ok(SequenceReport {
        data,
        decomposition_ok,
        s1_symmetric,
        s2_symmetric,
        s1_count,
        s2_count,
        counts_ok,
        entries_ok,
        border_ok,
    })
}

/// For `s` in the fusion union of `r`, the relator of `s` must avoid one of
/// the two characteristic sequences of `r`; `consistent` records that
/// implication for the given pair.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionReport {
    pub r: Slope,
    pub s: Slope,
    pub in_union: bool,
    pub contains_s1: bool,
    pub contains_s2: bool,
    pub consistent: bool,
}

pub fn check_prop_connection(r: &Slope, s: &Slope) -> Result<ConnectionReport> {
    let data = slope_s_sequences(r)?;
    let in_union = fusion_intervals(r)?.in_union(s);
    let cs_s = cyclic_s_sequence(&u_word(s)?)?;
    let contains_s1 = cs_s.contains(data.s1.runs());
    let contains_s2 = cs_s.contains(data.s2.runs());
    let consistent = !in_union || !(contains_s1 && contains_s2);
    Ok(ConnectionReport {
        r: r.clone(),
        s: s.clone(),
        in_union,
        contains_s1,
        contains_s2,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(txt: &str) -> Slope {
        txt.parse().unwrap()
    }

    fn w(txt: &str) -> Word {
        txt.parse().unwrap()
    }

    #[test]
    fn golden_slope_sequences() {
        let d = slope_s_sequences(&s("2/5")).unwrap();
        assert_eq!(d.m, 2);
        assert_eq!(d.s1.runs(), &[3]);
        assert_eq!(d.s2.runs(), &[2]);
        assert_eq!(d.cs.runs(), &[3, 2, 3, 2]);

        let d = slope_s_sequences(&s("1/3")).unwrap();
        assert_eq!(d.m, 3);
        assert_eq!(d.s1.runs(), &[3]);
        assert!(d.s2.is_empty());
        assert_eq!(d.cs.runs(), &[3, 3]);

        let d = slope_s_sequences(&s("1/2")).unwrap();
        assert_eq!(d.s1.runs(), &[2]);
        assert!(d.s2.is_empty());
        assert_eq!(d.cs.runs(), &[2, 2]);

        let d = slope_s_sequences(&s("5/17")).unwrap();
        assert_eq!(d.m, 3);
        assert_eq!(d.s1.runs(), &[4, 3, 4]);
        assert_eq!(d.s2.runs(), &[3, 3]);
        assert_eq!(d.cs.runs(), &[4, 3, 4, 3, 3, 4, 3, 4, 3, 3]);

        let d = slope_s_sequences(&s("3/8")).unwrap();
        assert_eq!(d.m, 2);
        assert_eq!(d.s1.runs(), &[3, 3]);
        assert_eq!(d.s2.runs(), &[2]);
        assert_eq!(d.cs.runs(), &[3, 3, 2, 3, 3, 2]);

        let d = slope_s_sequences(&s("2/7")).unwrap();
        assert_eq!(d.m, 3);
        assert_eq!(d.s1.runs(), &[4]);
        assert_eq!(d.s2.runs(), &[3]);
        assert_eq!(d.cs.runs(), &[4, 3, 4, 3]);
    }

    #[test]
    fn golden_reports() {
        for r in ["2/5", "1/3", "1/2", "5/17", "3/8", "2/7", "3/7"] {
            let rep = check_prop_sequence(&s(r)).unwrap();
            assert!(rep.ok(), "sequence report fails for {r}: {rep:?}");
        }
    }

    #[test]
    fn cyclic_wraparound() {
        assert_eq!(cyclic_s_sequence(&w("b a b")).unwrap().runs(), &[3]);
        assert_eq!(cyclic_s_sequence(&w("a b'")).unwrap().runs(), &[1, 1]);
        // first and last blocks share a sign: they merge, starting at the
        // wrapped block
        assert_eq!(cyclic_s_sequence(&w("b' a b b a b'")).unwrap().runs(), &[2, 4]);
        assert_eq!(cyclic_s_sequence(&w("a")).unwrap().runs(), &[1]);
        assert!(cyclic_s_sequence(&Word::new()).is_err());
    }

    #[test]
    fn count_semantics() {
        let cs = cyclic_s_sequence(&u_word(&s("2/5")).unwrap()).unwrap();
        assert_eq!(cs.count(&[3]), 2);
        assert_eq!(cs.count(&[2]), 2);
        assert_eq!(cs.count(&[3, 2]), 2);
        assert_eq!(cs.count(&[2, 3]), 2);
        assert_eq!(cs.count(&[3, 2, 3, 2]), 2);
        assert_eq!(cs.count(&[]), 0);
        assert_eq!(cs.count(&[3, 2, 3, 2, 3]), 0);
        assert_eq!(cs.count(&[4]), 0);
    }

    #[test]
    fn connection_examples() {
        // 1/3 lies in I1 of 2/5 and its relator has runs (3,3): it contains
        // S1=(3) but not S2=(2)
        let rep = check_prop_connection(&s("2/5"), &s("1/3")).unwrap();
        assert!(rep.in_union && rep.contains_s1 && !rep.contains_s2 && rep.consistent);
        // 0 has cyclic runs (2): contains S2 only
        let rep = check_prop_connection(&s("2/5"), &s("0/1")).unwrap();
        assert!(rep.in_union && !rep.contains_s1 && rep.contains_s2 && rep.consistent);
        // the slope itself is not in its own union
        let rep = check_prop_connection(&s("2/5"), &s("2/5")).unwrap();
        assert!(!rep.in_union && rep.contains_s1 && rep.contains_s2 && rep.consistent);
    }

    fn canonical_rotation(mut v: Vec<u64>) -> Vec<u64> {
        if v.is_empty() {
            return v;
        }
        let n = v.len();
        let mut best = v.clone();
        for _ in 1..n {
            v.rotate_left(1);
            if v < best {
                best = v.clone();
            }
        }
        best
    }

    proptest! {
        #[test]
        fn prop_sequence_report(q in 1u64..80, p in 2u64..80) {
            prop_assume!(q < p && num_integer::gcd(q, p) == 1);
            let r = Slope::new_int(q as i64, p as i64).unwrap();
            let rep = check_prop_sequence(&r).unwrap();
            prop_assert!(rep.ok(), "report fails for {}: {:?}", r, rep);
            // run lengths sum to the relator length
            let total: u64 = rep.data.cs.runs().iter().sum();
            prop_assert_eq!(total, 2 * p);
        }

        #[test]
        fn prop_cyclic_rotation_invariant(codes in proptest::collection::vec(0u8..4, 1..30), k in 0usize..30) {
            let word = Word::from_codes(&codes);
            let mut rot = codes.clone();
            rot.rotate_left(k % codes.len());
            let rotated = Word::from_codes(&rot);
            let a = cyclic_s_sequence(&word).unwrap();
            let b = cyclic_s_sequence(&rotated).unwrap();
            prop_assert_eq!(
                canonical_rotation(a.runs().to_vec()),
                canonical_rotation(b.runs().to_vec())
            );
        }
    }
}
