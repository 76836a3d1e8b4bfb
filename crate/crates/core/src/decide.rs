//! Classification of simple loops by slope: null-homotopy, homotopy between
//! two loops, induced epimorphisms, peripherality and primitivity. All
//! decisions are exact rational computations on normalized slopes.

use crate::farey::Slope;
use crate::orbit::{orbit_normalize, FareyEdge};
use crate::{Error, Result};
use num_bigint::BigInt;
use serde::Serialize;

fn qp(r: &Slope) -> Result<(u64, u64)> {
    r.qp_u64()
}

fn require_interior(r: &Slope) -> Result<(u64, u64)> {
    let (q, p) = qp(r)?;
    if q == 0 || q == p {
        return Err(Error::Precondition(format!("expected 0 < r < 1, got {r}")));
    }
    Ok((q, p))
}

fn one_minus(s: &Slope) -> Slope {
    if s.is_infinite() {
        return Slope::infinity();
    }
    Slope::new(s.den() - s.num(), s.den().clone()).expect("mirror slope")
}

fn plus_one(s: &Slope) -> Slope {
    if s.is_infinite() {
        return Slope::infinity();
    }
    Slope::new(s.num() + s.den(), s.den().clone()).expect("shifted slope")
}

fn trace_strings(trace: &[FareyEdge]) -> Vec<String> {
    trace.iter().map(|e| e.to_string()).collect()
}

/// The complement is hyperbolic exactly when q is not congruent to ±1
/// modulo p (two-bridge torus links are the excluded cases).
pub fn is_hyperbolic(r: &Slope) -> Result<bool> {
    let (q, p) = require_interior(r)?;
    Ok(q != 1 && q + 1 != p)
}

#[derive(Clone, Debug, Serialize)]
pub struct NullVerdict {
    pub r: Slope,
    pub s: Slope,
    pub normalized: Slope,
    pub null_homotopic: bool,
    pub trace: Vec<String>,
}

/// A loop is null-homotopic exactly when its slope normalizes to ∞ or to r
/// under the reflection group of r.
pub fn is_null_homotopic(r: &Slope, s: &Slope) -> Result<NullVerdict> {
    require_interior(r)?;
    let (nf, trace) = orbit_normalize(r, s)?;
    let null_homotopic = nf.is_infinite() || nf == *r;
    Ok(NullVerdict {
        r: r.clone(),
        s: s.clone(),
        normalized: nf,
        null_homotopic,
        trace: trace_strings(&trace),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EpiVerdict {
    pub r: Slope,
    pub s: Slope,
    pub epimorphism: bool,
    /// which translate witnessed the orbit membership, if any
    pub witness: Option<String>,
}

/// The slope group of s surjects onto the group of r exactly when s or s+1
/// lies in the orbit of r or ∞.
pub fn has_epimorphism(r: &Slope, s: &Slope) -> Result<EpiVerdict> {
    require_interior(r)?;
    let mut witness = None;
    for (label, cand) in [("s", s.clone()), ("s+1", plus_one(s))] {
        let (nf, _) = orbit_normalize(r, &cand)?;
        if nf.is_infinite() || nf == *r {
            witness = Some(format!("{label} = {cand} normalizes to {nf}"));
            break;
        }
    }
    Ok(EpiVerdict {
        r: r.clone(),
        s: s.clone(),
        epimorphism: witness.is_some(),
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HomotopyOutcome {
    NullHomotopic,
    Homotopic,
    NotHomotopic,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyVerdict {
    pub r: Slope,
    pub s: Slope,
    pub t: Slope,
    pub s_normalized: Slope,
    pub t_normalized: Slope,
    pub outcome: HomotopyOutcome,
    /// identifier of the rule that decided the outcome
    pub clause: Option<String>,
    pub witness: String,
    pub mirror_derived: bool,
}

/// Reduce a decision for r > 1/2 to the mirrored one for 1 − r, when the
/// caller opted in. Returns the slopes to use plus whether mirroring fired.
fn mirror_reduce(r: &Slope, slopes: &mut [Slope], allow_mirror: bool) -> Result<(Slope, bool)> {
    let (q, p) = require_interior(r)?;
    if 2 * q <= p {
        return Ok((r.clone(), false));
    }
    if !allow_mirror {
        return Err(Error::Precondition(format!(
            "r = {r} exceeds 1/2; rerun with the mirror option to decide via 1-r"
        )));
    }
    for s in slopes.iter_mut() {
        *s = one_minus(s);
    }
    Ok((one_minus(r), true))
}

/// Decide whether the simple loops of slopes s and t are homotopic in the
/// complement of the link of slope r (r ≤ 1/2; opt-in mirror for r > 1/2).
pub fn are_homotopic(r: &Slope, s: &Slope, t: &Slope, allow_mirror: bool) -> Result<HomotopyVerdict> {
    let mut slopes = [s.clone(), t.clone()];
    let (r0, mirror_derived) = mirror_reduce(r, &mut slopes, allow_mirror)?;
    let [s0, t0] = slopes;
    let (sn, _) = orbit_normalize(&r0, &s0)?;
    let (tn, _) = orbit_normalize(&r0, &t0)?;
    let s_null = sn.is_infinite() || sn == r0;
    let t_null = tn.is_infinite() || tn == r0;
    let mut verdict = HomotopyVerdict {
        r: r.clone(),
        s: s.clone(),
        t: t.clone(),
        s_normalized: sn.clone(),
        t_normalized: tn.clone(),
        outcome: HomotopyOutcome::NotHomotopic,
        clause: None,
        witness: String::new(),
        mirror_derived,
    };
    if s_null && t_null {
        verdict.outcome = HomotopyOutcome::NullHomotopic;
        verdict.clause = Some("both-trivial".into());
        verdict.witness = format!("both slopes normalize into {{∞, {r0}}}");
        return Ok(verdict);
    }
    if s_null != t_null {
        verdict.witness = "exactly one loop is null-homotopic".into();
        return Ok(verdict);
    }
    if sn == tn {
        verdict.outcome = HomotopyOutcome::Homotopic;
        verdict.clause = Some("equal-normal-forms".into());
        verdict.witness = format!("both slopes normalize to {sn}");
        return Ok(verdict);
    }
    let (qr, pr) = qp(&r0)?;
    if qr == 1 {
        let (q1, p1) = qp(&sn)?;
        let (q2, p2) = qp(&tn)?;
        if q1 == q2 && q1 >= 1 && (p1 + p2) == q1 * pr {
            verdict.outcome = HomotopyOutcome::Homotopic;
            verdict.clause = Some("fusion-sum".into());
            verdict.witness = format!(
                "equal numerators and {q1}/({p1}+{p2}) = {r0} for the normalized pair {sn}, {tn}"
            );
            return Ok(verdict);
        }
    }
    if (qr, pr) == (3, 8) {
        let pair = |a: &str, b: &str| -> bool {
            let a: Slope = a.parse().unwrap();
            let b: Slope = b.parse().unwrap();
            (sn == a && tn == b) || (sn == b && tn == a)
        };
        if pair("1/6", "3/10") || pair("3/4", "5/12") {
            verdict.outcome = HomotopyOutcome::Homotopic;
            verdict.clause = Some("exceptional-3-8".into());
            verdict.witness = format!("normalized pair {{{sn}, {tn}}} is an exceptional pair for 3/8");
            return Ok(verdict);
        }
    }
    verdict.witness = format!("normalized slopes {sn} and {tn} match no homotopy rule");
    Ok(verdict)
}

#[derive(Clone, Debug, Serialize)]
pub struct PeripheralVerdict {
    pub r: Slope,
    pub s: Slope,
    pub normalized: Slope,
    pub peripheral: bool,
    pub clause: Option<String>,
    pub mirror_derived: bool,
}

fn normalized_essential(r0: &Slope, s0: &Slope) -> Result<Slope> {
    let (nf, _) = orbit_normalize(r0, s0)?;
    if nf.is_infinite() || nf == *r0 {
        return Err(Error::Precondition(format!(
            "slope {s0} is null-homotopic for r = {r0}; the loop is not essential"
        )));
    }
    Ok(nf)
}

fn require_hyperbolic(r0: &Slope) -> Result<()> {
    if !is_hyperbolic(r0)? {
        return Err(Error::Precondition(format!(
            "r = {r0} is a torus-link slope (q ≡ ±1 mod p); decision requires a hyperbolic link"
        )));
    }
    Ok(())
}

/// Decide whether the loop of slope s is peripheral (freely homotopic into
/// a boundary torus) in the hyperbolic complement of the link of slope r.
pub fn peripheral_status(r: &Slope, s: &Slope, allow_mirror: bool) -> Result<PeripheralVerdict> {
    let mut slopes = [s.clone()];
    let (r0, mirror_derived) = mirror_reduce(r, &mut slopes, allow_mirror)?;
    require_hyperbolic(&r0)?;
    let nf = normalized_essential(&r0, &slopes[0])?;
    let (qr, pr) = qp(&r0)?;
    let (qs, ps) = qp(&nf)?;
    let mut clause = None;
    if (qr, pr) == (2, 5) && ps == 5 && (qs == 1 || qs == 3) {
        clause = Some("exc-2-5".into());
    } else if pr == 2 * qr + 1 && qr >= 3 && ps == pr && qs == qr + 1 {
        clause = Some(format!("fan-n-2n1(n={qr})"));
    } else if qr == 2 && pr >= 7 && pr % 2 == 1 && ps == pr && qs == 1 {
        clause = Some(format!("fan-2-2n1(n={})", (pr - 1) / 2));
    }
    Ok(PeripheralVerdict {
        r: r.clone(),
        s: s.clone(),
        normalized: nf,
        peripheral: clause.is_some(),
        clause,
        mirror_derived,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Primitivity {
    Primitive,
    PowerOfPrimitive(u8),
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimitivityVerdict {
    pub r: Slope,
    pub s: Slope,
    pub normalized: Slope,
    pub primitivity: Primitivity,
    pub clause: Option<String>,
    pub mirror_derived: bool,
}

/// Decide whether the loop of slope s represents a primitive element of the
/// link group of r, or a proper power of a primitive element.
pub fn primitivity(r: &Slope, s: &Slope, allow_mirror: bool) -> Result<PrimitivityVerdict> {
    let mut slopes = [s.clone()];
    let (r0, mirror_derived) = mirror_reduce(r, &mut slopes, allow_mirror)?;
    require_hyperbolic(&r0)?;
    let nf = normalized_essential(&r0, &slopes[0])?;
    let (qr, pr) = qp(&r0)?;
    let (qs, ps) = qp(&nf)?;
    let (primitivity, clause) = if (qr, pr) == (2, 5) && ((qs, ps) == (2, 7) || (qs, ps) == (3, 4)) {
        (Primitivity::PowerOfPrimitive(3), Some("exc-2-5-cube".to_string()))
    } else if (qr, pr) == (3, 7) && (qs, ps) == (2, 7) {
        (Primitivity::PowerOfPrimitive(2), Some("exc-3-7-square".to_string()))
    } else if (qr, pr) == (2, 7) && (qs, ps) == (3, 7) {
        (Primitivity::PowerOfPrimitive(2), Some("exc-2-7-square".to_string()))
    } else {
        (Primitivity::Primitive, None)
    };
    Ok(PrimitivityVerdict {
        r: r.clone(),
        s: s.clone(),
        normalized: nf,
        primitivity,
        clause,
        mirror_derived,
    })
}

/// Enumerate, for r = 1/p, all normalized pairs matched by the fusion-sum
/// homotopy rule with denominators at most max_den.
pub fn fusion_sum_pairs(p: u64, max_den: u64) -> Result<Vec<(Slope, Slope)>> {
    if p < 2 {
        return Err(Error::Precondition("fusion_sum_pairs requires p >= 2".into()));
    }
    let mut out = Vec::new();
    for q in 1..=max_den {
        let total = q * p;
        for p1 in q..=(total - 1) / 2 {
            let p2 = total - p1;
            if p1 > max_den || p2 > max_den {
                continue;
            }
            if num_integer::gcd(q, p1) != 1 || num_integer::gcd(q, p2) != 1 {
                continue;
            }
            let s = Slope::new(BigInt::from(q), BigInt::from(p1))?;
            let t = Slope::new(BigInt::from(q), BigInt::from(p2))?;
            out.push((s, t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::fusion_intervals;
    use proptest::prelude::*;

    fn s(txt: &str) -> Slope {
        txt.parse().unwrap()
    }

    #[test]
    fn hyperbolicity() {
        assert!(is_hyperbolic(&s("2/5")).unwrap());
        assert!(is_hyperbolic(&s("3/8")).unwrap());
        assert!(is_hyperbolic(&s("3/7")).unwrap());
        assert!(is_hyperbolic(&s("5/17")).unwrap());
        assert!(!is_hyperbolic(&s("1/3")).unwrap());
        assert!(!is_hyperbolic(&s("1/2")).unwrap());
        assert!(!is_hyperbolic(&s("4/5")).unwrap());
        assert!(!is_hyperbolic(&s("6/7")).unwrap());
        assert!(is_hyperbolic(&s("0/1")).is_err());
        assert!(is_hyperbolic(&s("1/1")).is_err());
    }

    #[test]
    fn null_homotopy_cases() {
        let v = is_null_homotopic(&s("1/3"), &s("7/3")).unwrap();
        assert!(v.null_homotopic);
        assert_eq!(v.normalized, s("1/3"));
        assert!(!v.trace.is_empty());

        let v = is_null_homotopic(&s("2/5"), &s("1/3")).unwrap();
        assert!(!v.null_homotopic);
        assert_eq!(v.normalized, s("1/3"));

        assert!(is_null_homotopic(&s("2/5"), &Slope::infinity()).unwrap().null_homotopic);
        assert!(is_null_homotopic(&s("2/5"), &s("2/5")).unwrap().null_homotopic);
    }

    #[test]
    fn epimorphism_cases() {
        assert!(has_epimorphism(&s("2/5"), &s("2/5")).unwrap().epimorphism);
        assert!(has_epimorphism(&s("2/5"), &s("12/5")).unwrap().epimorphism);
        assert!(has_epimorphism(&s("2/5"), &s("-3/5")).unwrap().epimorphism);
        assert!(!has_epimorphism(&s("2/5"), &s("1/3")).unwrap().epimorphism);
        let v = has_epimorphism(&s("2/5"), &Slope::infinity()).unwrap();
        assert!(v.epimorphism);
        assert!(v.witness.unwrap().starts_with("s ="));
    }

    #[test]
    fn homotopy_exceptional_3_8() {
        let v = are_homotopic(&s("3/8"), &s("1/6"), &s("3/10"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::Homotopic);
        assert_eq!(v.clause.as_deref(), Some("exceptional-3-8"));

        let v = are_homotopic(&s("3/8"), &s("3/4"), &s("5/12"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::Homotopic);
        assert_eq!(v.clause.as_deref(), Some("exceptional-3-8"));

        let v = are_homotopic(&s("3/8"), &s("1/6"), &s("5/12"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::NotHomotopic);
    }

    #[test]
    fn homotopy_fusion_sum() {
        let v = are_homotopic(&s("1/3"), &s("1/2"), &s("1/1"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::Homotopic);
        assert_eq!(v.clause.as_deref(), Some("fusion-sum"));

        let v = are_homotopic(&s("1/5"), &s("2/7"), &s("2/3"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::Homotopic);
        assert_eq!(v.clause.as_deref(), Some("fusion-sum"));

        let v = are_homotopic(&s("1/3"), &s("1/2"), &s("2/3"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::NotHomotopic);
    }

    #[test]
    fn homotopy_normal_forms_and_trivial() {
        let v = are_homotopic(&s("2/5"), &s("7/5"), &s("3/5"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::Homotopic);
        assert_eq!(v.clause.as_deref(), Some("equal-normal-forms"));

        let v = are_homotopic(&s("2/5"), &Slope::infinity(), &s("2/5"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::NullHomotopic);

        let v = are_homotopic(&s("2/5"), &Slope::infinity(), &s("1/3"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::NotHomotopic);

        let v = are_homotopic(&s("2/5"), &s("1/3"), &s("1/2"), false).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::NotHomotopic);
    }

    #[test]
    fn homotopy_mirror() {
        assert!(are_homotopic(&s("5/8"), &s("5/6"), &s("7/10"), false).is_err());
        let v = are_homotopic(&s("5/8"), &s("5/6"), &s("7/10"), true).unwrap();
        assert_eq!(v.outcome, HomotopyOutcome::Homotopic);
        assert_eq!(v.clause.as_deref(), Some("exceptional-3-8"));
        assert!(v.mirror_derived);
        // the flag is inert when r is already at most 1/2
        let v = are_homotopic(&s("3/8"), &s("1/6"), &s("3/10"), true).unwrap();
        assert!(!v.mirror_derived);
    }

    #[test]
    fn peripheral_cases() {
        let v = peripheral_status(&s("2/5"), &s("1/5"), false).unwrap();
        assert!(v.peripheral);
        assert_eq!(v.clause.as_deref(), Some("exc-2-5"));
        assert!(peripheral_status(&s("2/5"), &s("3/5"), false).unwrap().peripheral);

        let v = peripheral_status(&s("3/7"), &s("4/7"), false).unwrap();
        assert!(v.peripheral);
        assert_eq!(v.clause.as_deref(), Some("fan-n-2n1(n=3)"));
        let v = peripheral_status(&s("3/7"), &s("18/7"), false).unwrap();
        assert!(v.peripheral, "normalization before clause matching");

        let v = peripheral_status(&s("2/7"), &s("1/7"), false).unwrap();
        assert!(v.peripheral);
        assert_eq!(v.clause.as_deref(), Some("fan-2-2n1(n=3)"));
        assert!(peripheral_status(&s("2/9"), &s("1/9"), false).unwrap().peripheral);
        assert!(peripheral_status(&s("4/9"), &s("5/9"), false).unwrap().peripheral);

        assert!(!peripheral_status(&s("2/5"), &s("1/3"), false).unwrap().peripheral);
        assert!(!peripheral_status(&s("5/17"), &s("1/3"), false).unwrap().peripheral);
        assert!(!peripheral_status(&s("3/8"), &s("1/6"), false).unwrap().peripheral);

        assert!(peripheral_status(&s("1/3"), &s("1/2"), false).is_err());
        assert!(peripheral_status(&s("2/5"), &Slope::infinity(), false).is_err());
    }

    #[test]
    fn peripheral_mirror() {
        assert!(peripheral_status(&s("3/5"), &s("2/5"), false).is_err());
        let v = peripheral_status(&s("3/5"), &s("2/5"), true).unwrap();
        assert!(v.peripheral);
        assert!(v.mirror_derived);
    }

    #[test]
    fn primitivity_cases() {
        let v = primitivity(&s("2/5"), &s("2/7"), false).unwrap();
        assert_eq!(v.primitivity, Primitivity::PowerOfPrimitive(3));
        assert_eq!(v.clause.as_deref(), Some("exc-2-5-cube"));
        let v = primitivity(&s("2/5"), &s("3/4"), false).unwrap();
        assert_eq!(v.primitivity, Primitivity::PowerOfPrimitive(3));

        let v = primitivity(&s("3/7"), &s("2/7"), false).unwrap();
        assert_eq!(v.primitivity, Primitivity::PowerOfPrimitive(2));
        let v = primitivity(&s("2/7"), &s("3/7"), false).unwrap();
        assert_eq!(v.primitivity, Primitivity::PowerOfPrimitive(2));

        let v = primitivity(&s("5/17"), &s("1/3"), false).unwrap();
        assert_eq!(v.primitivity, Primitivity::Primitive);
        assert!(v.clause.is_none());

        assert!(primitivity(&s("1/3"), &s("1/2"), false).is_err());
    }

    #[test]
    fn fusion_sum_pairs_lie_in_the_union() {
        for p in 2u64..=50 {
            let r = Slope::new_int(1, p as i64).unwrap();
            let fusion = fusion_intervals(&r).unwrap();
            for (a, b) in fusion_sum_pairs(p, 50).unwrap() {
                assert!(fusion.in_union(&a), "pair member {a} outside I1∪I2 for r=1/{p}");
                assert!(fusion.in_union(&b), "pair member {b} outside I1∪I2 for r=1/{p}");
                let v = are_homotopic(&r, &a, &b, false).unwrap();
                assert_eq!(v.outcome, HomotopyOutcome::Homotopic, "({a},{b}) for 1/{p}");
            }
        }
    }

    proptest! {
        #[test]
        fn homotopy_symmetric(qr in 1u64..20, pr in 2u64..40, a in -40i64..40, b in 1i64..40, c in -40i64..40, d in 1i64..40) {
            let pr = pr.max(qr + 1);
            prop_assume!(num_integer::gcd(qr, pr) == 1);
            prop_assume!(2 * qr <= pr);
            let r = Slope::new_int(qr as i64, pr as i64).unwrap();
            let s = Slope::new_int(a, b).unwrap();
            let t = Slope::new_int(c, d).unwrap();
            let v1 = are_homotopic(&r, &s, &t, false).unwrap();
            let v2 = are_homotopic(&r, &t, &s, false).unwrap();
            prop_assert_eq!(v1.outcome, v2.outcome);
            prop_assert_eq!(v1.clause, v2.clause);
        }

        #[test]
        fn homotopy_reflexive(qr in 1u64..20, pr in 2u64..40, a in -40i64..40, b in 1i64..40) {
            let pr = pr.max(qr + 1);
            prop_assume!(num_integer::gcd(qr, pr) == 1);
            prop_assume!(2 * qr <= pr);
            let r = Slope::new_int(qr as i64, pr as i64).unwrap();
            let s = Slope::new_int(a, b).unwrap();
            let v = are_homotopic(&r, &s, &s, false).unwrap();
            prop_assert!(matches!(v.outcome, HomotopyOutcome::Homotopic | HomotopyOutcome::NullHomotopic));
        }

        #[test]
        fn null_matches_epi_on_unshifted(qr in 1u64..12, pr in 2u64..24, a in -30i64..30, b in 1i64..30) {
            let pr = pr.max(qr + 1);
            prop_assume!(num_integer::gcd(qr, pr) == 1);
            let r = Slope::new_int(qr as i64, pr as i64).unwrap();
            let s = Slope::new_int(a, b).unwrap();
            let null = is_null_homotopic(&r, &s).unwrap();
            if null.null_homotopic {
                prop_assert!(has_epimorphism(&r, &s).unwrap().epimorphism);
            }
        }
    }
}
