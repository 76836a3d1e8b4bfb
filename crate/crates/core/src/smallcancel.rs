//! Small-cancellation machinery for the symmetrized relator set of a slope:
//! piece detection (definitional and via run sequences), minimal piece
//! counts, and the C(4)/T(4) conditions.

use crate::farey::Slope;
use crate::sseq::{slope_s_sequences, SlopeSequences};
use crate::words::{u_word, Word};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::HashMap;

fn invert_codes(codes: &[u8]) -> Vec<u8> {
    // letter code xor 1 is its inverse
    codes.iter().rev().map(|c| c ^ 1).collect()
}

/// All cyclic rotations of the relator of `r` and of its inverse,
/// deduplicated. Pieces and piece counts are defined against this set.
pub struct SymmetrizedSet {
    r: Slope,
    two_p: usize,
    elements: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    inverse_of: Vec<usize>,
    /// longest common prefix with any *other* element, per element
    max_lcp: Vec<usize>,
    /// the two cyclic representatives, doubled for wraparound subwords
    doubled: [Vec<u8>; 2],
    /// element id of the rotation starting at each position
    rot_id: [Vec<usize>; 2],
}

pub fn symmetrized_set(r: &Slope) -> Result<SymmetrizedSet> {
    let (q, p) = r.qp_u64()?;
    if q == 0 || q == p {
        return Err(Error::Precondition(format!(
            "symmetrized_set requires 0 < r < 1, got {r}"
        )));
    }
    let u = u_word(r)?.codes();
    let two_p = u.len();
    let mut elements: Vec<Vec<u8>> = Vec::with_capacity(2 * two_p);
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut doubled_arr: [Vec<u8>; 2] = [Vec::new(), Vec::new()];
    let mut rot_id: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (sign, base) in [u.clone(), invert_codes(&u)].into_iter().enumerate() {
        let mut doubled = base.clone();
        doubled.extend_from_slice(&base);
        for start in 0..two_p {
            let rot = doubled[start..start + two_p].to_vec();
            let id = *index.entry(rot.clone()).or_insert_with(|| {
                elements.push(rot);
                elements.len() - 1
            });
            rot_id[sign].push(id);
        }
        doubled_arr[sign] = doubled;
    }
    let inverse_of = elements
        .iter()
        .map(|e| index[&invert_codes(e)])
        .collect();
    let n = elements.len();
    let mut max_lcp = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            let lcp = elements[i]
                .iter()
                .zip(&elements[j])
                .take_while(|(x, y)| x == y)
                .count();
            if lcp > max_lcp[i] {
                max_lcp[i] = lcp;
            }
            if lcp > max_lcp[j] {
                max_lcp[j] = lcp;
            }
        }
    }
    Ok(SymmetrizedSet {
        r: r.clone(),
        two_p,
        elements,
        index,
        inverse_of,
        max_lcp,
        doubled: doubled_arr,
        rot_id,
    })
}

impl SymmetrizedSet {
    pub fn slope(&self) -> &Slope {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn relator_len(&self) -> usize {
        self.two_p
    }

    pub fn words(&self) -> Vec<Word> {
        self.elements.iter().map(|e| Word::from_codes(e)).collect()
    }

    pub fn contains_element(&self, w: &Word) -> bool {
        self.index.contains_key(&w.codes())
    }

    /// Is `v` a (cyclic) subword of either relator representative?
    pub fn contains_subword(&self, v: &Word) -> bool {
        let codes = v.codes();
        self.find_subword(&codes).is_some()
    }

    fn find_subword(&self, codes: &[u8]) -> Option<(usize, usize)> {
        if codes.is_empty() || codes.len() > self.two_p {
            return None;
        }
        for sign in 0..2 {
            for start in 0..self.two_p {
                if &self.doubled[sign][start..start + codes.len()] == codes {
                    return Some((sign, start));
                }
            }
        }
        None
    }

    pub(crate) fn is_piece_codes(&self, v: &[u8]) -> bool {
        // definitional: v is a common prefix of two distinct elements
        let mut hits = 0;
        for e in &self.elements {
            if e.len() >= v.len() && &e[..v.len()] == v {
                hits += 1;
                if hits >= 2 {
                    return true;
                }
            }
        }
        false
    }

    /// Equivalent piece test in O(1) for a subword given as a position in
    /// one of the doubled representatives: the subword is a prefix of the
    /// rotation starting there, so it is a piece exactly when that rotation
    /// shares at least that long a prefix with some other element.
    fn is_piece_at(&self, sign: usize, start: usize, len: usize) -> bool {
        self.max_lcp[self.rot_id[sign][start]] >= len
    }

    pub fn min_piece_count(&self, v: &Word) -> Result<u32> {
        let codes = v.codes();
        if codes.is_empty() {
            return Err(Error::Precondition("min_piece_count requires a nonempty word".into()));
        }
        // best[i] = least number of pieces concatenating to v[..i]
        let n = codes.len();
        let mut best = vec![u32::MAX; n + 1];
        best[0] = 0;
        for i in 0..n {
            if best[i] == u32::MAX {
                continue;
            }
            for j in i + 1..=n {
                if self.is_piece_codes(&codes[i..j]) {
                    let cand = best[i] + 1;
                    if cand < best[j] {
                        best[j] = cand;
                    }
                }
            }
        }
        if best[n] == u32::MAX {
            // cannot happen for subwords of the relators: single letters are
            // pieces there
            return Err(Error::Precondition(format!(
                "{v} is not a concatenation of pieces"
            )));
        }
        Ok(best[n])
    }
}

pub fn is_piece_bruteforce(set: &SymmetrizedSet, v: &Word) -> Result<bool> {
    let codes = v.codes();
    if codes.is_empty() {
        return Err(Error::Precondition("is_piece_bruteforce requires a nonempty word".into()));
    }
    Ok(set.is_piece_codes(&codes))
}

fn runs_of(codes: &[u8]) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut cur_sign = 2u8;
    let mut cur = 0u64;
    for &c in codes {
        let sign = c & 1;
        if sign == cur_sign {
            cur += 1;
        } else {
            if cur > 0 {
                runs.push(cur);
            }
            cur_sign = sign;
            cur = 1;
        }
    }
    if cur > 0 {
        runs.push(cur);
    }
    runs
}

fn contains_block(runs: &[u64], pat: &[u64]) -> bool {
    !pat.is_empty() && runs.len() >= pat.len() && runs.windows(pat.len()).any(|w| w == pat)
}

/// Run-sequence piece criterion: a subword is a piece exactly when its run
/// sequence neither contains `S1` as a block nor contains `S2` strictly
/// inside (an occurrence with at least one run on each side; when `S2` is
/// empty that degenerates to "has at least two runs").
fn sseq_piece_rule(runs: &[u64], s1: &[u64], s2: &[u64]) -> bool {
    if contains_block(runs, s1) {
        return false;
    }
    let n = runs.len();
    if s2.is_empty() {
        return n < 2;
    }
    let m = s2.len();
    if n >= m + 2 {
        for i in 1..=n - m - 1 {
            if &runs[i..i + m] == s2 {
                return false;
            }
        }
    }
    true
}

/// Run-sequence criterion for "not a product of two pieces": the run
/// sequence contains the block `(S1, S2)` with at least one run after it,
/// or the block `(S2, S1)` with at least one run before it.
fn two_piece_obstruction(runs: &[u64], s1: &[u64], s2: &[u64]) -> bool {
    let m = s1.len() + s2.len();
    let n = runs.len();
    if n <= m {
        return false;
    }
    let mut pat: Vec<u64> = s1.to_vec();
    pat.extend_from_slice(s2);
    if runs[..n - 1].windows(m).any(|w| w == pat) {
        return true;
    }
    pat.clear();
    pat.extend_from_slice(s2);
    pat.extend_from_slice(s1);
    runs[1..].windows(m).any(|w| w == pat)
}

/// Cached context for the run-sequence piece tests of one slope.
pub struct PieceContext {
    pub set: SymmetrizedSet,
    pub seqs: SlopeSequences,
}

impl PieceContext {
    pub fn new(r: &Slope) -> Result<PieceContext> {
        Ok(PieceContext { set: symmetrized_set(r)?, seqs: slope_s_sequences(r)? })
    }

    pub fn is_piece_sseq(&self, v: &Word) -> Result<bool> {
        let codes = v.codes();
        if self.set.find_subword(&codes).is_none() {
            return Err(Error::Precondition(format!(
                "{v} is not a subword of the cyclic relator words"
            )));
        }
        Ok(sseq_piece_rule(&runs_of(&codes), self.seqs.s1.runs(), self.seqs.s2.runs()))
    }
}

/// Run-sequence piece test for a subword of the cyclic relator words of `r`.
pub fn is_piece_sseq(r: &Slope, v: &Word) -> Result<bool> {
    PieceContext::new(r)?.is_piece_sseq(v)
}

pub fn min_piece_count(r: &Slope, v: &Word) -> Result<u32> {
    symmetrized_set(r)?.min_piece_count(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct C4Report {
    pub r: Slope,
    pub elements: usize,
    /// least piece count over all elements; C(4) needs >= 4
    pub min_pieces: u32,
    pub ok: bool,
}

pub fn verify_c4(r: &Slope) -> Result<C4Report> {
    let set = symmetrized_set(r)?;
    let audit = audit_tables(&set);
    Ok(c4_from_tables(&set, &audit))
}

#[derive(Clone, Debug, Serialize)]
pub struct T4Report {
    pub r: Slope,
    pub elements: usize,
    /// a triple (i, j, k) where all three adjacent products cancel and no
    /// adjacent pair is inverse, if one exists
    pub bad_triple: Option<(usize, usize, usize)>,
    pub ok: bool,
}

pub fn verify_t4(r: &Slope) -> Result<T4Report> {
    let set = symmetrized_set(r)?;
    Ok(t4_report(&set))
}

fn t4_report(set: &SymmetrizedSet) -> T4Report {
    let n = set.elements.len();
    let words_per_row = n.div_ceil(64);
    // cancels[i][j]: the product e_i e_j cancels at the junction
    let mut out_rows = vec![0u64; n * words_per_row];
    let mut in_rows = vec![0u64; n * words_per_row];
    for i in 0..n {
        let last = *set.elements[i].last().unwrap();
        for j in 0..n {
            let first = set.elements[j][0];
            if last == first ^ 1 && set.inverse_of[i] != j {
                out_rows[i * words_per_row + j / 64] |= 1 << (j % 64);
                in_rows[j * words_per_row + i / 64] |= 1 << (i % 64);
            }
        }
    }
    // a violating triple is a directed triangle i -> j -> k -> i
    for i in 0..n {
        for j in 0..n {
            if out_rows[i * words_per_row + j / 64] >> (j % 64) & 1 == 0 {
                continue;
            }
            for w in 0..words_per_row {
                let both = out_rows[j * words_per_row + w] & in_rows[i * words_per_row + w];
                if both != 0 {
                    let k = w * 64 + both.trailing_zeros() as usize;
                    return T4Report {
                        r: set.r.clone(),
                        elements: n,
                        bad_triple: Some((i, j, k)),
                        ok: false,
                    };
                }
            }
        }
    }
    T4Report { r: set.r.clone(), elements: n, bad_triple: None, ok: true }
}

/// Minimal piece counts of every cyclic subword position, by dynamic
/// programming over the doubled representatives.
struct AuditTables {
    /// mpc[sign][start][len - 1]
    mpc: [Vec<Vec<u32>>; 2],
}

fn audit_tables(set: &SymmetrizedSet) -> AuditTables {
    let two_p = set.two_p;
    let mut mpc: [Vec<Vec<u32>>; 2] = [Vec::new(), Vec::new()];
    for sign in 0..2 {
        let mut table = vec![vec![u32::MAX; two_p]; two_p];
        for len in 1..=two_p {
            for start in 0..two_p {
                if set.is_piece_at(sign, start, len) {
                    table[start][len - 1] = 1;
                    continue;
                }
                let mut best = u32::MAX;
                for j in 1..len {
                    if set.is_piece_at(sign, start, j) {
                        let rest = table[(start + j) % two_p][len - j - 1];
                        if rest != u32::MAX && rest + 1 < best {
                            best = rest + 1;
                        }
                    }
                }
                table[start][len - 1] = best;
            }
        }
        mpc[sign] = table;
    }
    AuditTables { mpc }
}

fn c4_from_tables(set: &SymmetrizedSet, tables: &AuditTables) -> C4Report {
    let two_p = set.two_p;
    let mut min_pieces = u32::MAX;
    for sign in 0..2 {
        for start in 0..two_p {
            let v = tables.mpc[sign][start][two_p - 1];
            if v < min_pieces {
                min_pieces = v;
            }
        }
    }
    C4Report { r: set.r.clone(), elements: set.elements.len(), min_pieces, ok: min_pieces >= 4 }
}

/// One exhaustive sweep over every cyclic subword of the relator words of
/// `r`: cross-checks the three piece tests against each other, the run-
/// sequence two-piece obstruction against the DP, and evaluates C(4), T(4)
/// and the expected set cardinality.
#[derive(Clone, Debug, Serialize)]
pub struct PieceAudit {
    pub r: Slope,
    pub subwords: u64,
    pub pieces: u64,
    /// disagreements between the definitional test and the prefix-table test
    pub table_mismatches: u64,
    /// disagreements between the definitional test and the run-sequence rule
    pub sseq_mismatches: u64,
    /// disagreements between (min_piece_count >= 3) and the run-sequence
    /// two-piece obstruction
    pub obstruction_mismatches: u64,
    pub first_mismatch: Option<(usize, usize, usize)>,
    pub cardinality_ok: bool,
    pub c4: C4Report,
    pub t4: T4Report,
}

impl PieceAudit {
    pub fn ok(&self) -> bool {
        self.table_mismatches == 0
            && self.sseq_mismatches == 0
            && self.obstruction_mismatches == 0
            && self.cardinality_ok
            && self.c4.ok
            && self.t4.ok
    }
}

pub fn piece_audit(r: &Slope) -> Result<PieceAudit> {
    let set = symmetrized_set(r)?;
    let seqs = slope_s_sequences(r)?;
    let tables = audit_tables(&set);
    let two_p = set.two_p;
    let (s1, s2) = (seqs.s1.runs(), seqs.s2.runs());
    let mut audit = PieceAudit {
        r: r.clone(),
        subwords: 0,
        pieces: 0,
        table_mismatches: 0,
        sseq_mismatches: 0,
        obstruction_mismatches: 0,
        first_mismatch: None,
        cardinality_ok: set.elements.len() == 2 * two_p,
        c4: c4_from_tables(&set, &tables),
        t4: t4_report(&set),
    };
    // proper cyclic subwords only: full rotations are elements, not pieces
    for sign in 0..2 {
        for start in 0..two_p {
            for len in 1..two_p {
                audit.subwords += 1;
                let slice = &set.doubled[sign][start..start + len];
                let brute = set.is_piece_codes(slice);
                if brute {
                    audit.pieces += 1;
                }
                let mut bad = false;
                if set.is_piece_at(sign, start, len) != brute {
                    audit.table_mismatches += 1;
                    bad = true;
                }
                let runs = runs_of(slice);
                if sseq_piece_rule(&runs, s1, s2) != brute {
                    audit.sseq_mismatches += 1;
                    bad = true;
                }
                let dp_ge3 = tables.mpc[sign][start][len - 1] >= 3;
                if two_piece_obstruction(&runs, s1, s2) != dp_ge3 {
                    audit.obstruction_mismatches += 1;
                    bad = true;
                }
                if bad && audit.first_mismatch.is_none() {
                    audit.first_mismatch = Some((sign, start, len));
                }
            }
        }
    }
    Ok(audit)
}
