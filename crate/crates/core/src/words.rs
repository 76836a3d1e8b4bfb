//! Words in the rank-2 free group on `a`, `b`: the relator word attached to
//! a slope, its hat core and four-factor decomposition, free and cyclic
//! reduction, and primitive torus words.

use crate::farey::{fusion_intervals, Slope};
use crate::{Error, Result};
use serde::ser::SerializeSeq;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Gen {
    A,
    B,
}

/// One letter `a`, `a'`, `b` or `b'` (prime marks the inverse).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub gen: Gen,
    pub inv: bool,
}

pub const A: Letter = Letter { gen: Gen::A, inv: false };
pub const A_INV: Letter = Letter { gen: Gen::A, inv: true };
pub const B: Letter = Letter { gen: Gen::B, inv: false };
pub const B_INV: Letter = Letter { gen: Gen::B, inv: true };

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Exponent sign, +1 or -1.
    pub fn sign(self) -> i32 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    /// Compact code 0..=3 used by the cancellation tables.
    pub(crate) fn code(self) -> u8 {
        match (self.gen, self.inv) {
            (Gen::A, false) => 0,
            (Gen::A, true) => 1,
            (Gen::B, false) => 2,
            (Gen::B, true) => 3,
        }
    }

    pub(crate) fn from_code(c: u8) -> Letter {
        match c {
            0 => A,
            1 => A_INV,
            2 => B,
            _ => B_INV,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ch = match self.gen {
            Gen::A => 'a',
            Gen::B => 'b',
        };
        write!(f, "{ch}")?;
        if self.inv {
            write!(f, "'")?;
        }
        Ok(())
    }
}

/// A word in the free group on `a`, `b`; not reduced unless stated.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(parts: &[&Word]) -> Word {
        let mut w = Word::new();
        for p in parts {
            w.extend(p);
        }
        w
    }

    /// Reverse with every letter inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Signed generator exponent sums `(e_a, e_b)`.
    pub fn exponent_sums(&self) -> (i64, i64) {
        let mut ea = 0i64;
        let mut eb = 0i64;
        for l in &self.0 {
            match l.gen {
                Gen::A => ea += l.sign() as i64,
                Gen::B => eb += l.sign() as i64,
            }
        }
        (ea, eb)
    }

    pub(crate) fn codes(&self) -> Vec<u8> {
        self.0.iter().map(|l| l.code()).collect()
    }

    pub(crate) fn from_codes(codes: &[u8]) -> Word {
        Word(codes.iter().map(|&c| Letter::from_code(c)).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Space-separated letters: `a b a' b'`.
    fn from_str(s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let l = match tok {
                "a" => A,
                "a'" => A_INV,
                "b" => B,
                "b'" => B_INV,
                _ => {
                    return Err(Error::Precondition(format!(
                        "unknown letter {tok:?}; expected a, a', b, b'"
                    )))
                }
            };
            letters.push(l);
        }
        Ok(Word(letters))
    }
}

/// Words serialize as `[["a",1],["b",-1],...]`.
impl Serialize for Word {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(self.0.len()))?;
        for l in &self.0 {
            let name = match l.gen {
                Gen::A => "a",
                Gen::B => "b",
            };
            seq.serialize_element(&(name, l.sign()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(String, i32)> = Vec::deserialize(de)?;
        let mut letters = Vec::with_capacity(raw.len());
        for (name, sign) in raw {
            let gen = match name.as_str() {
                "a" => Gen::A,
                "b" => Gen::B,
                _ => return Err(de::Error::custom(format!("unknown generator {name:?}"))),
            };
            let inv = match sign {
                1 => false,
                -1 => true,
                _ => return Err(de::Error::custom(format!("exponent must be +-1, got {sign}"))),
            };
            letters.push(Letter { gen, inv });
        }
        Ok(Word(letters))
    }
}

/// A cyclically reduced word up to rotation, stored in a canonical rotation
/// (lexicographically least letter encoding among all rotations).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Cancel adjacent inverse pairs until none remain.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if out.last().is_some_and(|&t| t == l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Cyclically reduce: returns the canonical-rotation core `c` and a
/// conjugator `g` with `w = g c g'` in the free group.
pub fn cyclic_reduce(w: &Word) -> (CyclicWord, Word) {
    let reduced = free_reduce(w);
    let mut core: Vec<Letter> = reduced.0;
    let mut conj: Vec<Letter> = Vec::new();
    while core.len() >= 2 && core[0] == core[core.len() - 1].inverse() {
        conj.push(core[0]);
        core.pop();
        core.remove(0);
    }
    // canonical rotation; rotating the core by k extends the conjugator by
    // the rotated-off prefix
    let k = least_rotation(&core);
    conj.extend_from_slice(&core[..k]);
    core.rotate_left(k);
    (CyclicWord(Word(core)), Word(conj))
}

fn least_rotation(letters: &[Letter]) -> usize {
    if letters.is_empty() {
        return 0;
    }
    let codes: Vec<u8> = letters.iter().map(|l| l.code()).collect();
    let n = codes.len();
    let mut best = 0usize;
    for cand in 1..n {
        for i in 0..n {
            let (x, y) = (codes[(cand + i) % n], codes[(best + i) % n]);
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    best = cand;
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    best
}

fn qp_checked(r: &Slope) -> Result<(i128, i128)> {
    let (q, p) = r.qp_u64()?;
    if q > p {
        return Err(Error::Precondition(format!("slope {r} lies outside [0,1]")));
    }
    Ok((q as i128, p as i128))
}

/// Exponent sign `(-1)^floor(i q / p)` for `r = q/p`, `1 <= i <= p-1`.
pub fn epsilon(i: u64, r: &Slope) -> Result<i32> {
    let (q, p) = qp_checked(r)?;
    let i = i as i128;
    if i < 1 || i > p - 1 {
        return Err(Error::Precondition(format!("epsilon index {i} outside 1..={}", p - 1)));
    }
    Ok(if ((i * q) / p) % 2 == 0 { 1 } else { -1 })
}

/// The alternating core `b^e1 a^e2 b^e3 ...` of length `p - 1`.
pub fn u_hat(r: &Slope) -> Result<Word> {
    let (q, p) = qp_checked(r)?;
    let mut letters = Vec::with_capacity((p - 1) as usize);
    for i in 1..p {
        let gen = if i % 2 == 1 { Gen::B } else { Gen::A };
        let inv = ((i * q) / p) % 2 == 1;
        letters.push(Letter { gen, inv });
    }
    Ok(Word(letters))
}

/// The length-`2p` relator word of a slope `q/p` in `[0, 1]`: for odd `p` it
/// is `a * uhat * b^((-1)^q) * uhat'`, for even `p` it is
/// `a * uhat * a' * uhat'`.
pub fn u_word(r: &Slope) -> Result<Word> {
    let (q, p) = qp_checked(r)?;
    let hat = u_hat(r)?;
    let hat_inv = hat.inverse();
    let mid = if p % 2 == 1 {
        Letter { gen: Gen::B, inv: q % 2 == 1 }
    } else {
        A_INV
    };
    let mut w = Word::with_cap((2 * p) as usize);
    w.push(A);
    w.extend(&hat);
    w.push(mid);
    w.extend(&hat_inv);
    debug_assert_eq!(w.len() as i128, 2 * p);
    Ok(w)
}

impl Word {
    fn with_cap(n: usize) -> Word {
        Word(Vec::with_capacity(n))
    }
}

/// Split the relator of `r` into four factors with lengths
/// `(p2+1, p1-1, p2+1, p1-1)`, where `p1`, `p2` are the denominators of the
/// Farey parents of `r`. Requires `0 < r < 1`.
pub fn v_decomposition(r: &Slope) -> Result<[Word; 4]> {
    let fusion = fusion_intervals(r)?;
    let p1 = fusion.r1.den().try_into().map_err(|_| {
        Error::Precondition(format!("denominator of {} too large", fusion.r1))
    })?;
    let p2: usize = fusion.r2.den().try_into().map_err(|_| {
        Error::Precondition(format!("denominator of {} too large", fusion.r2))
    })?;
    let p1: usize = p1;
    let u = u_word(r)?;
    let l = u.letters();
    let (c1, c2) = (p2 + 1, p1 - 1);
    debug_assert_eq!(2 * (c1 + c2), l.len());
    let v1 = Word(l[..c1].to_vec());
    let v2 = Word(l[c1..c1 + c2].to_vec());
    let v3 = Word(l[c1 + c2..2 * c1 + c2].to_vec());
    let v4 = Word(l[2 * c1 + c2..].to_vec());
    Ok([v1, v2, v3, v4])
}

/// Primitive torus word for a slope `q/p` of the once-punctured torus:
/// abelianizes to `a^p b^q`, with `1/0` mapped to `b`.
pub fn torus_slope_word(s: &Slope) -> Result<Word> {
    if s.is_infinite() {
        return Ok(Word(vec![B]));
    }
    let q: i128 = s
        .num()
        .try_into()
        .map_err(|_| Error::Precondition(format!("slope {s} too large for a torus word")))?;
    let p: i128 = s
        .den()
        .try_into()
        .map_err(|_| Error::Precondition(format!("slope {s} too large for a torus word")))?;
    let mut w = Word::new();
    let floor_div = |a: i128, b: i128| a.div_euclid(b);
    for i in 1..=p {
        w.push(A);
        let e = floor_div(i * q, p) - floor_div((i - 1) * q, p);
        let letter = if e >= 0 { B } else { B_INV };
        for _ in 0..e.abs() {
            w.push(letter);
        }
    }
    Ok(w)
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
    fn golden_relators() {
        assert_eq!(u_word(&s("2/5")).unwrap().to_string(), "a b a b' a' b a b a' b'");
        assert_eq!(u_word(&s("1/3")).unwrap().to_string(), "a b a b' a' b'");
        assert_eq!(u_word(&s("1/2")).unwrap().to_string(), "a b a' b'");
        assert_eq!(u_word(&s("0/1")).unwrap().to_string(), "a b");
        assert_eq!(u_word(&s("1/1")).unwrap().to_string(), "a b'");
        assert_eq!(
            u_word(&s("3/8")).unwrap().to_string(),
            "a b a b' a' b' a b a' b' a' b a b a' b'"
        );
        assert!(u_word(&s("3/2")).is_err());
        assert!(u_word(&s("-1/3")).is_err());
        assert!(u_word(&Slope::infinity()).is_err());
    }

    #[test]
    fn golden_hat() {
        assert_eq!(u_hat(&s("2/5")).unwrap().to_string(), "b a b' a'");
        assert_eq!(u_hat(&s("1/2")).unwrap().to_string(), "b");
        assert_eq!(u_hat(&s("0/1")).unwrap().to_string(), "");
    }

    #[test]
    fn golden_epsilon() {
        let r = s("2/5");
        let eps: Vec<i32> = (1..=4).map(|i| epsilon(i, &r).unwrap()).collect();
        assert_eq!(eps, vec![1, 1, -1, -1]);
        assert!(epsilon(0, &r).is_err());
        assert!(epsilon(5, &r).is_err());
    }

    #[test]
    fn golden_v_decomposition() {
        let [v1, v2, v3, v4] = v_decomposition(&s("2/5")).unwrap();
        assert_eq!(v1.to_string(), "a b a");
        assert_eq!(v2.to_string(), "b' a'");
        assert_eq!(v3.to_string(), "b a b");
        assert_eq!(v4.to_string(), "a' b'");
        // degenerate middle factors at a denominator-1 parent
        let [v1, v2, v3, v4] = v_decomposition(&s("1/3")).unwrap();
        assert_eq!(v1.to_string(), "a b a");
        assert!(v2.is_empty());
        assert_eq!(v3.to_string(), "b' a' b'");
        assert!(v4.is_empty());
    }

    #[test]
    fn word_parse_display_roundtrip() {
        let word = w("a b a' b'");
        assert_eq!(word.to_string(), "a b a' b'");
        assert!("a c".parse::<Word>().is_err());
    }

    #[test]
    fn word_json_shape() {
        let word = w("a b'");
        let js = serde_json::to_string(&word).unwrap();
        assert_eq!(js, r#"[["a",1],["b",-1]]"#);
        let back: Word = serde_json::from_str(&js).unwrap();
        assert_eq!(back, word);
        assert!(serde_json::from_str::<Word>(r#"[["a",2]]"#).is_err());
    }

    #[test]
    fn reduction_basics() {
        assert_eq!(free_reduce(&w("a a' b")), w("b"));
        assert_eq!(free_reduce(&w("a b b' a' a b")), w("a b"));
        assert!(free_reduce(&w("a b b' a'")).is_empty());
        // a b a b' a' is (a b) a (a b)', so the cyclic core is a single letter
        let (core, conj) = cyclic_reduce(&w("a b a b' a'"));
        assert_eq!(core.word(), &w("a"));
        assert_eq!(conj, w("a b"));
        let back = Word::concat(&[&conj, core.word(), &conj.inverse()]);
        assert_eq!(free_reduce(&back), free_reduce(&w("a b a b' a'")));
        let (core, conj) = cyclic_reduce(&w("b' a b b a b' a' b"));
        let back = Word::concat(&[&conj, core.word(), &conj.inverse()]);
        assert_eq!(free_reduce(&back), free_reduce(&w("b' a b b a b' a' b")));
    }

    #[test]
    fn cyclic_canonical_rotation() {
        let (c1, _) = cyclic_reduce(&w("b a b a"));
        let (c2, _) = cyclic_reduce(&w("a b a b"));
        assert_eq!(c1, c2);
        let (c3, _) = cyclic_reduce(&w("b' a b a a"));
        let (c4, _) = cyclic_reduce(&w("a a b' a b"));
        assert_eq!(c3, c4);
    }

    #[test]
    fn golden_torus_words() {
        assert_eq!(torus_slope_word(&s("0/1")).unwrap().to_string(), "a");
        assert_eq!(torus_slope_word(&Slope::infinity()).unwrap().to_string(), "b");
        assert_eq!(torus_slope_word(&s("1/1")).unwrap().to_string(), "a b");
        assert_eq!(torus_slope_word(&s("1/2")).unwrap().to_string(), "a a b");
        assert_eq!(torus_slope_word(&s("-1/1")).unwrap().to_string(), "a b'");
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec(0u8..4, 0..max_len)
            .prop_map(|codes| Word::from_codes(&codes))
    }

    proptest! {
        #[test]
        fn prop_relator_shape(q in 1u32..60, p in 2u32..60) {
            prop_assume!(q < p);
            let g = num_integer::gcd(q, p);
            let r = Slope::new_int((q / g) as i64, (p / g) as i64).unwrap();
            let (qq, pp) = r.qp_u64().unwrap();
            let u = u_word(&r).unwrap();
            prop_assert_eq!(u.len() as u64, 2 * pp);
            // already freely and cyclically reduced
            prop_assert_eq!(&free_reduce(&u), &u);
            let first = u.letters()[0];
            let last = u.letters()[u.len() - 1];
            prop_assert!(first != last.inverse());
            // abelianization law by denominator parity
            let (ea, eb) = u.exponent_sums();
            if pp % 2 == 1 {
                prop_assert_eq!(ea, 1);
                prop_assert_eq!(eb, if qq % 2 == 0 { 1 } else { -1 });
            } else {
                prop_assert_eq!(ea, 0);
                prop_assert_eq!(eb, 0);
            }
            // exponent-sign symmetry of the hat core: eps_i = (-1)^(q-1) eps_(p-i)
            let flip = if qq % 2 == 1 { 1 } else { -1 };
            for i in 1..pp {
                let (ei, ej) = (epsilon(i, &r).unwrap(), epsilon(pp - i, &r).unwrap());
                prop_assert_eq!(ei, flip * ej);
            }
        }

        #[test]
        fn prop_v_decomposition_concat(q in 1u32..60, p in 2u32..60) {
            prop_assume!(q < p && num_integer::gcd(q, p) == 1);
            let r = Slope::new_int(q as i64, p as i64).unwrap();
            let [v1, v2, v3, v4] = v_decomposition(&r).unwrap();
            let joined = Word::concat(&[&v1, &v2, &v3, &v4]);
            prop_assert_eq!(joined, u_word(&r).unwrap());
            prop_assert_eq!(v1.len(), v3.len());
            prop_assert_eq!(v2.len(), v4.len());
        }

        #[test]
        fn prop_free_reduce_idempotent(word in arb_word(40)) {
            let once = free_reduce(&word);
            prop_assert_eq!(&free_reduce(&once), &once);
            // w w' reduces to the identity
            let cancel = Word::concat(&[&word, &word.inverse()]);
            prop_assert!(free_reduce(&cancel).is_empty());
        }

        #[test]
        fn prop_cyclic_reduce_conjugation_invariant(word in arb_word(24), conj in arb_word(8)) {
            let conjugated = Word::concat(&[&conj, &word, &conj.inverse()]);
            let (c1, g1) = cyclic_reduce(&word);
            let (c2, g2) = cyclic_reduce(&conjugated);
            prop_assert_eq!(&c1, &c2);
            // and each conjugator actually recovers its input
            for (src, (core, g)) in [(&word, (&c1, &g1)), (&conjugated, (&c2, &g2))] {
                let back = Word::concat(&[g, core.word(), &g.inverse()]);
                prop_assert_eq!(free_reduce(&back), free_reduce(src));
            }
        }

        #[test]
        fn prop_torus_word_abelianization(q in -20i64..20, p in 1i64..20) {
            let sl = Slope::new_int(q, p).unwrap();
            let word = torus_slope_word(&sl).unwrap();
            let (ea, eb) = word.exponent_sums();
            prop_assert_eq!(&Slope::new_int(eb, ea).unwrap(), &sl);
            prop_assert_eq!(&free_reduce(&word), &word);
        }
    }
}
