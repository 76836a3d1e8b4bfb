//! Exact slope arithmetic on the Farey tessellation: canonical fractions,
//! continued fractions, fusion-interval computation and Stern-Brocot
//! enumeration of rationals in an interval.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A slope `q/p` in lowest terms. Invariant: `p > 0` and `gcd(q, p) = 1`,
/// except the point at infinity which is stored as `1/0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Slope {
    num: BigInt,
    den: BigInt,
}

impl Slope {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::InvalidSlope("0/0 is not a slope".into()));
        }
        if den.is_zero() {
            return Ok(Slope { num: BigInt::one(), den: BigInt::zero() });
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Ok(Slope { num, den })
    }

    pub fn new_int(q: i64, p: i64) -> Result<Self> {
        Slope::new(BigInt::from(q), BigInt::from(p))
    }

    pub fn infinity() -> Self {
        Slope { num: BigInt::one(), den: BigInt::zero() }
    }

    pub fn zero() -> Self {
        Slope { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Slope { num: BigInt::one(), den: BigInt::one() }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Farey sum `(q+q')/(p+p')`. For a pair of Farey neighbors this is the
    /// third vertex of the tessellation triangle on the edge between them.
    pub fn mediant(&self, other: &Slope) -> Result<Slope> {
        Slope::new(&self.num + &other.num, &self.den + &other.den)
    }

    /// True when `|q p' - q' p| = 1`, i.e. the two slopes span an edge of the
    /// Farey tessellation.
    pub fn is_farey_neighbor(&self, other: &Slope) -> bool {
        let det = &self.num * &other.den - &other.num * &self.den;
        det.abs().is_one()
    }

    pub fn to_f64(&self) -> f64 {
        big_ratio_f64(&self.num, &self.den)
    }

    /// Numerator and denominator as `u64`, defined for finite slopes in
    /// `[0, 1]` with a denominator that fits; used by the word builders.
    pub fn qp_u64(&self) -> Result<(u64, u64)> {
        let err = || Error::Precondition(format!("slope {self} does not fit in u64 coordinates"));
        if self.is_infinite() || self.num.is_negative() {
            return Err(err());
        }
        let q = self.num.to_u64().ok_or_else(err)?;
        let p = self.den.to_u64().ok_or_else(err)?;
        Ok((q, p))
    }
}

/// Finite slopes in numeric order, with the point at infinity greater than
/// every finite slope. This is a tie-break total order for deterministic
/// output, not a projective statement.
impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            // dens positive, so cross-multiplication preserves order
            (false, false) => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Accepts `q/p`, a bare integer `n`, or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Slope::infinity());
        }
        let bad = || Error::InvalidSlope(format!("cannot parse {s:?} as q/p, integer, or inf"));
        if let Some((qs, ps)) = s.split_once('/') {
            let q = BigInt::from_str(qs.trim()).map_err(|_| bad())?;
            let p = BigInt::from_str(ps.trim()).map_err(|_| bad())?;
            Slope::new(q, p)
        } else {
            let q = BigInt::from_str(s).map_err(|_| bad())?;
            Ok(Slope { num: q, den: BigInt::one() })
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        Slope::from_str(&s).map_err(de::Error::custom)
    }
}

/// Reduce an integer pair to a canonical slope; `(0, 0)` is rejected.
pub fn canonicalize(q: &BigInt, p: &BigInt) -> Result<Slope> {
    Slope::new(q.clone(), p.clone())
}

fn big_ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    if d.is_zero() {
        return if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let bits = n.bits().max(d.bits());
    if bits <= 500 {
        let nf = n.to_f64().unwrap_or(f64::NAN);
        let df = d.to_f64().unwrap_or(f64::NAN);
        nf / df
    } else {
        // shift both so the quotient survives in f64 range
        let s = (bits - 500) as u64;
        let nf = (n >> s).to_f64().unwrap_or(f64::NAN);
        let df = (d >> s).to_f64().unwrap_or(f64::NAN);
        nf / df
    }
}

/// Continued fraction `[m1, ..., mk]` in normal form: every term positive and
/// the last term at least 2. The empty sequence denotes 0. The value is
/// `1/(m1 + 1/(m2 + ...))`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ContinuedFraction {
    terms: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value(&self) -> Slope {
        cf_value(&self.terms).expect("normal-form terms are positive")
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "]")
    }
}

/// Normal-form continued fraction of `r`, for `0 < r < 1`. The greedy
/// Euclidean expansion always ends with a term at least 2.
pub fn cont_frac(r: &Slope) -> Result<ContinuedFraction> {
    if !(r > &Slope::zero() && r < &Slope::one()) {
        return Err(Error::Precondition(format!("cont_frac requires 0 < r < 1, got {r}")));
    }
    let mut a = r.den.clone();
    let mut b = r.num.clone();
    let mut terms = Vec::new();
    while !b.is_zero() {
        let (m, rem) = a.div_rem(&b);
        terms.push(m);
        a = b;
        b = rem;
    }
    Ok(ContinuedFraction { terms })
}

/// Value of an arbitrary positive term sequence (normal form not required,
/// so a trailing 1 is accepted); the empty sequence evaluates to 0.
pub fn cf_value(terms: &[BigInt]) -> Result<Slope> {
    if let Some(bad) = terms.iter().find(|t| !t.is_positive()) {
        return Err(Error::Precondition(format!(
            "cf_value requires positive terms, got {bad}"
        )));
    }
    if terms.is_empty() {
        return Ok(Slope::zero());
    }
    // tail value m_i + 1/tail as n/d, folded right to left; r = 1/tail
    let mut n = terms[terms.len() - 1].clone();
    let mut d = BigInt::one();
    for m in terms[..terms.len() - 1].iter().rev() {
        let nn = m * &n + &d;
        d = std::mem::replace(&mut n, nn);
    }
    Slope::new(d, n)
}

/// A closed interval of finite slopes.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SlopeInterval {
    lo: Slope,
    hi: Slope,
}

impl SlopeInterval {
    pub fn new(lo: Slope, hi: Slope) -> Result<Self> {
        if lo.is_infinite() || hi.is_infinite() {
            return Err(Error::Precondition("interval endpoints must be finite".into()));
        }
        if lo > hi {
            return Err(Error::Precondition(format!("interval endpoints out of order: {lo} > {hi}")));
        }
        Ok(SlopeInterval { lo, hi })
    }

    pub fn lo(&self) -> &Slope {
        &self.lo
    }

    pub fn hi(&self) -> &Slope {
        &self.hi
    }

    pub fn contains(&self, s: &Slope) -> bool {
        !s.is_infinite() && s >= &self.lo && s <= &self.hi
    }

    pub fn contains_interior(&self, s: &Slope) -> bool {
        !s.is_infinite() && s > &self.lo && s < &self.hi
    }
}

impl fmt::Display for SlopeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The two Farey parents of `r` and the closed intervals they bound against
/// 0 and 1. `r1 < r < r2`, both are Farey neighbors of `r`, and their
/// mediant is `r`.
#[derive(Clone, Debug, Serialize)]
pub struct Fusion {
    pub r1: Slope,
    pub r2: Slope,
    pub i1: SlopeInterval,
    pub i2: SlopeInterval,
}

impl Fusion {
    /// Closed-interval membership in `I1 ∪ I2`.
    pub fn in_union(&self, s: &Slope) -> bool {
        self.i1.contains(s) || self.i2.contains(s)
    }
}

/// Compute the Farey parents of `r = [m1,...,mk]`: one parent drops the last
/// term, the other decrements it, and which is the smaller depends on the
/// parity of `k`. Requires `0 < r < 1`.
pub fn fusion_intervals(r: &Slope) -> Result<Fusion> {
    let cf = cont_frac(r)?;
    let terms = cf.terms();
    let k = terms.len();
    let shorter = cf_value(&terms[..k - 1])?;
    let mut dec = terms[..k - 1].to_vec();
    let last = &terms[k - 1] - 1u32;
    if last.is_positive() {
        dec.push(last);
    }
    let longer = cf_value(&dec)?;
    let (r1, r2) = if k % 2 == 1 { (shorter, longer) } else { (longer, shorter) };
    debug_assert!(r1.is_farey_neighbor(r) && r2.is_farey_neighbor(r));
    debug_assert_eq!(&r1.mediant(&r2).unwrap(), r);
    debug_assert!(&r1 < r && r < &r2);
    let i1 = SlopeInterval::new(Slope::zero(), r1.clone())?;
    let i2 = SlopeInterval::new(r2.clone(), Slope::one())?;
    Ok(Fusion { r1, r2, i1, i2 })
}

/// All rationals in the interval with denominator at most `max_den`, in
/// increasing order. The interval must lie within `[0, 1]`.
pub fn enumerate_interval(iv: &SlopeInterval, max_den: u64) -> Result<Vec<Slope>> {
    if iv.lo < Slope::zero() || iv.hi > Slope::one() {
        return Err(Error::Precondition(format!(
            "enumerate_interval requires an interval within [0,1], got {iv}"
        )));
    }
    if max_den == 0 {
        return Err(Error::Precondition("enumerate_interval requires max_den >= 1".into()));
    }
    let max_den = BigInt::from(max_den);
    let mut out = Vec::new();
    if iv.lo.den <= max_den {
        out.push(iv.lo.clone());
    }
    // in-order walk of the Stern-Brocot subtree over (0,1), clipped to the
    // interval; the mediant minimizes the denominator over its subtree, so
    // a too-large mediant prunes the whole subtree
    enum Task {
        Node(Slope, Slope),
        Emit(Slope),
    }
    let mut stack = vec![Task::Node(Slope::zero(), Slope::one())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Node(l, r) => {
                if l >= iv.hi || r <= iv.lo {
                    continue;
                }
                let m = l.mediant(&r).expect("finite mediant");
                if m.den > max_den {
                    continue;
                }
                let emit = m > iv.lo && m < iv.hi;
                stack.push(Task::Node(m.clone(), r));
                if emit {
                    stack.push(Task::Emit(m.clone()));
                }
                stack.push(Task::Node(l, m));
            }
            Task::Emit(s) => out.push(s),
        }
    }
    if iv.hi != iv.lo && iv.hi.den <= max_den {
        out.push(iv.hi.clone());
    }
    Ok(out)
}

/// The two Farey parents of a slope in (0,1): the unique neighbors (a, b)
/// with a < s < b whose mediant is s.
pub fn farey_parents(s: &Slope) -> Result<(Slope, Slope)> {
    if s.is_infinite() || s <= &Slope::zero() || s >= &Slope::one() {
        return Err(Error::Precondition(format!(
            "farey_parents requires 0 < s < 1, got {s}"
        )));
    }
    let (q, p) = (&s.num, &s.den);
    // p1 = q^{-1} mod p gives the parent denominator: q*p1 - p*q1 = 1
    let egcd = q.extended_gcd(p);
    debug_assert!(egcd.gcd.is_one());
    let p1 = egcd.x.mod_floor(p);
    let q1: BigInt = (q * &p1 - 1) / p;
    let a = Slope::new(q1.clone(), p1.clone())?;
    let b = Slope::new(q - &q1, p - &p1)?;
    debug_assert_eq!(&a.mediant(&b).unwrap(), s);
    debug_assert!(&a < s && s < &b);
    Ok((a, b))
}
